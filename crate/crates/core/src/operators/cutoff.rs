use serde::{Deserialize, Serialize};

fn f0(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn f1(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        f0(t) / (t * t)
    }
}

fn f2(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        let u = 1.0 / t;
        f0(t) * (u.powi(4) - 2.0 * u.powi(3))
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`, C-infinity in between.
/// Returns the value and first two derivatives.
pub fn smooth_step(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (f, fp, fpp) = (f0(t), f1(t), f2(t));
    let s = 1.0 - t;
    let (g, gp, gpp) = (f0(s), -f1(s), f2(s));
    let d = f + g;
    let dp = fp + gp;
    let n = fp * g - f * gp;
    let np = fpp * g - f * gpp;
    (f / d, n / (d * d), np / (d * d) - 2.0 * n * dp / (d * d * d))
}

/// Even plateau cutoff: 1 on `|x| <= delta0`, 0 on `|x| >= 2 delta0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub delta0: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec { delta0: 0.1 }
    }
}

impl CutoffSpec {
    pub fn new(delta0: f64) -> Self {
        CutoffSpec { delta0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        smooth_step((2.0 * self.delta0 - x.abs()) / self.delta0).0
    }

    /// Value, first and second derivative at `x`.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        let d = self.delta0;
        let (s, sp, spp) = smooth_step((2.0 * d - x.abs()) / d);
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        (s, -sign * sp / d, spp / (d * d))
    }
}

/// `exp(1 - 1/(1 - 4 s^2))` on `|s| < 1/2`, zero elsewhere; `bump(0) = 1`.
pub fn bump(s: f64) -> f64 {
    let u = 1.0 - 4.0 * s * s;
    if u <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / u).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let c = CutoffSpec::new(0.1);
        assert_eq!(c.value(0.0), 1.0);
        assert_eq!(c.value(-0.1), 1.0);
        assert_eq!(c.value(0.2), 0.0);
        assert_eq!(c.value(-0.35), 0.0);
        let mid = c.value(0.15);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_differences() {
        let c = CutoffSpec::new(0.3);
        let h = 1e-5;
        for &x in &[0.35, 0.4, 0.5, -0.45, -0.55] {
            let (_, d1, d2) = c.jet(x);
            let fd1 = (c.value(x + h) - c.value(x - h)) / (2.0 * h);
            let fd2 = (c.value(x + h) - 2.0 * c.value(x) + c.value(x - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "{x}: {d1} vs {fd1}");
            assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()), "{x}: {d2} vs {fd2}");
        }
    }

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(0.5), 0.0);
        assert!(bump(0.25) > 0.0 && bump(0.25) < 1.0);
        assert_eq!(bump(0.3), bump(-0.3));
    }
}
