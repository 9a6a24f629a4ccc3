use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::packet::{Packet, Window};
use crate::error::{Error, Result};
use crate::operators::{CoefficientSpec, CutoffSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessOptions {
    /// Half-widths of the box in the dilated variables `(lambda x, lambda y, lambda^{k+1} t)`.
    pub extent: [f64; 3],
    pub points: [usize; 3],
    pub panels: usize,
    pub max_points: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { extent: [5.0, 6.0, 12.0], points: [64, 96, 128], panels: 8, max_points: 1 << 21 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub lambda: f64,
    pub norm_f: f64,
    pub norm_lf: f64,
    /// `||L F_lambda||_2 / ||F_lambda||_2`.
    pub ratio: f64,
    /// `||d_t F_lambda||_2 / ||F_lambda||_2`.
    pub dt_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub k: u32,
    pub coeff: CoefficientSpec,
    pub options: WitnessOptions,
    pub rows: Vec<WitnessRow>,
    /// Least-squares slope of `log ratio` against `log lambda`.
    pub ratio_exponent: f64,
    pub dt_exponent: f64,
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

/// `L^2` witness family `lambda^{(k+3)/2} f(lambda x, lambda y, lambda^{k+1} t) zeta(x, y, t)`
/// built from a Schwartz null solution `f` of `L_0`, for odd `k` and `a(0) = ±1`.
///
/// All integrals are taken in the dilated variables, where the family has a
/// fixed profile; the common Jacobian cancels in every reported ratio.
pub fn l2_witness(k: u32, coeff: &CoefficientSpec, lambdas: &[f64], opts: &WitnessOptions) -> Result<WitnessReport> {
    if k % 2 == 0 {
        return Err(Error::InvalidInput("the L2 witness needs odd k".into()));
    }
    if coeff.a0.abs() != 1.0 {
        return Err(Error::InvalidInput(format!("witness implemented for a(0) = ±1 only, got {}", coeff.a0)));
    }
    if coeff.taylor(1) != 0.0 || coeff.taylor(2) != 0.0 {
        return Err(Error::InvalidInput("witness needs a'(0) = a''(0) = 0".into()));
    }
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l >= 1.0)) {
        return Err(Error::InvalidInput("lambdas must be >= 1".into()));
    }
    let total: usize = opts.points.iter().product();
    if total > opts.max_points || opts.points.iter().any(|&n| n < 8) {
        return Err(Error::GridBudget(format!("{total} grid points, budget {}", opts.max_points)));
    }
    let work = if coeff.a0 < 0.0 { coeff.negated() } else { coeff.clone() };
    let f = Packet::new(
        k,
        Window::Gaussian { center: 0.0, sigma: 1.5 },
        Window::Bump { center: 3.0, scale: 2.0 },
        opts.panels,
    );
    let axis = |e: f64, n: usize| -> Vec<f64> { (0..n).map(|i| -e + 2.0 * e * i as f64 / (n - 1) as f64).collect() };
    let xs = axis(opts.extent[0], opts.points[0]);
    let ys = axis(opts.extent[1], opts.points[1]);
    let ts = axis(opts.extent[2], opts.points[2]);
    let zeta = CutoffSpec::new(1.0);
    let kf = k as f64;
    let i = Complex64::new(0.0, 1.0);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let lt = lambda.powi(k as i32 + 1);
        let zy: Vec<_> = ys.iter().map(|&y| zeta.jet(y / lambda)).collect();
        let zt: Vec<_> = ts.iter().map(|&t| zeta.jet(t / lt)).collect();
        let sums = f.map_slices(&xs, &ys, &ts, |ix, slice| {
            let x = xs[ix] / lambda;
            let (zx, zx1, zx2) = zeta.jet(x);
            let xk = x.powi(k as i32);
            let xk1 = if k == 1 { 1.0 } else { x.powi(k as i32 - 1) };
            let b = work.perturbation(x);
            let a = work.a0 + b;
            let (mut nf, mut nl, mut nt) = (0.0, 0.0, 0.0);
            for (iy, &(zy0, zy1, zy2)) in zy.iter().enumerate() {
                for (it, &(zt0, zt1, zt2)) in zt.iter().enumerate() {
                    let raw = slice.jet(iy, it);
                    let (fv, fx, fy, ft) = (raw.f, raw.fx * lambda, raw.fy * lambda, raw.ft * lt);
                    let z = zx * zy0 * zt0;
                    let z_x = zx1 * zy0 * zt0;
                    let z_y = zx * zy1 * zt0;
                    let z_t = zx * zy0 * zt1;
                    let y_z = -z_y + xk * z_t;
                    let y_f = -fy + ft * xk;
                    let yy_z = zx * zy2 * zt0 - 2.0 * xk * zx * zy1 * zt1 + xk * xk * zx * zy0 * zt2;
                    let l = i * (kf * xk1 * b * z) * ft - 2.0 * z_x * fx - 2.0 * y_z * y_f
                        - fv * (zx2 * zy0 * zt0 + yy_z)
                        + i * (a * kf * xk1 * z_t) * fv;
                    nf += (fv * z).norm_sqr();
                    nl += l.norm_sqr();
                    nt += (ft * z + fv * z_t).norm_sqr();
                }
            }
            (nf, nl, nt)
        });
        let cell: f64 = opts
            .extent
            .iter()
            .zip(&opts.points)
            .map(|(e, &n)| 2.0 * e / (n - 1) as f64)
            .product();
        let (nf, nl, nt) = sums.into_iter().fold((0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        let norm_f = (nf * cell).sqrt();
        let norm_lf = (nl * cell).sqrt();
        rows.push(WitnessRow { lambda, norm_f, norm_lf, ratio: norm_lf / norm_f, dt_ratio: (nt / nf).sqrt() });
    }
    let ls: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let ratio_exponent = loglog_slope(&ls, &rows.iter().map(|r| r.ratio).collect::<Vec<_>>());
    let dt_exponent = loglog_slope(&ls, &rows.iter().map(|r| r.dt_ratio).collect::<Vec<_>>());
    Ok(WitnessReport { k, coeff: coeff.clone(), options: *opts, rows, ratio_exponent, dt_exponent })
}
