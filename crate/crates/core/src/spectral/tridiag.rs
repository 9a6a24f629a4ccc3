/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have n-1 entries");
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + lambda.abs());
        let mut count = 0;
        let mut d = self.diag[0] - lambda;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let e = self.off[i - 1];
            d = self.diag[i] - lambda - e * e / d;
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// The `j`-th smallest eigenvalue (0-based), bracketed in `[lo, hi]`.
    /// Requires `sturm_count(lo) <= j < sturm_count(hi)`.
    pub fn eigenvalue_by_index(&self, j: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        let floor = 4.0 * f64::EPSILON * self.norm_bound();
        let tol = tol.max(floor);
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in `[lo, hi)`, ascending.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
        let (c_lo, c_hi) = (self.sturm_count(lo), self.sturm_count(hi));
        (c_lo..c_hi).map(|j| self.eigenvalue_by_index(j, lo, hi, tol)).collect()
    }

    pub fn eigenvalue_index(&self, j: usize, tol: f64) -> f64 {
        let (lo, hi) = self.gershgorin();
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        self.eigenvalue_by_index(j, lo - pad, hi + pad, tol)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Eigenvector for an accurate eigenvalue estimate, by inverse iteration.
    /// Unit 2-norm, first significant entry positive.
    pub fn inverse_iteration(&self, lambda: f64, max_iter: usize) -> Option<Vec<f64>> {
        let n = self.diag.len();
        let lu = ShiftedLu::factor(self, lambda);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0).collect();
        normalize(&mut x);
        for _ in 0..max_iter {
            let mut y = x.clone();
            lu.solve(&mut y);
            if !normalize(&mut y) {
                return None;
            }
            let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            if dot < 0.0 {
                y.iter_mut().for_each(|v| *v = -*v);
            }
            let done = 1.0 - dot.abs() < 1e-14;
            x = y;
            if done {
                fix_sign(&mut x);
                return Some(x);
            }
        }
        None
    }
}

fn normalize(x: &mut [f64]) -> bool {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0 && scale.is_finite()) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= scale);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    true
}

/// First entry above `1e-8` of the maximum is made positive.
pub(crate) fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * max) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// LU factors of `T - sigma I` with partial pivoting.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swap: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, sigma: f64) -> Self {
        let n = t.diag.len();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - sigma).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swap[i] = true;
            }
        }
        let tiny = f64::EPSILON * t.norm_bound().max(1.0);
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        ShiftedLu { dl, d, du, du2, swap }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
