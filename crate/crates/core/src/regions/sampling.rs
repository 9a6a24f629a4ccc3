use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Additive recurrence (Kronecker) sequence in `d` dimensions with a seeded
/// random shift. Point `i` is `frac(shift + (i + 1) alpha)`.
#[derive(Debug, Clone)]
pub struct QuasiRandom {
    alpha: Vec<f64>,
    shift: Vec<f64>,
}

impl QuasiRandom {
    pub fn new(dim: usize, seed: u64) -> Self {
        // phi solves x^(d+1) = x + 1
        let mut phi: f64 = 2.0;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha = (1..=dim).map(|j| phi.powi(-(j as i32)).fract()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        QuasiRandom { alpha, shift }
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let t = (i + 1) as f64;
        self.alpha
            .iter()
            .zip(&self.shift)
            .map(|(a, s)| (s + t * a).fract())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_unit_cube() {
        let a = QuasiRandom::new(2, 7);
        let b = QuasiRandom::new(2, 7);
        for i in 0..100 {
            let p = a.point(i);
            assert_eq!(p, b.point(i));
            assert!(p.iter().all(|&x| (0.0..1.0).contains(&x)));
        }
        assert_ne!(QuasiRandom::new(2, 8).point(0), a.point(0));
    }

    #[test]
    fn low_discrepancy_mean() {
        let s = QuasiRandom::new(2, 0);
        let n = 4096;
        let mean: f64 = (0..n).map(|i| s.point(i)[1]).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 1e-3);
    }
}
