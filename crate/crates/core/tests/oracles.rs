use dochar::hermite::{
    gaussian_moment, hermite_poly, inner_product, int, lemma41_bracket, rat, HermiteFunction, Rational,
};
use dochar::operators::{chart_c, chart_d, CoefficientSpec, Family, OperatorInstance};
use dochar::perturbation::{fit_eps_series, lambda2_closed_form, rs_step, NumericOptions, PerturbationProblem};
use dochar::quadrature::composite;
use dochar::spectral::{eigenvalues_in_window, refine_until};
use dochar::{Discretization, SolverOptions};
use num_traits::ToPrimitive;

fn binom(n: i64, k: i64) -> Rational {
    if k < 0 || k > n {
        return int(0);
    }
    let mut r = int(1);
    for i in 0..k {
        r = r * rat(n - i, i + 1);
    }
    r
}

/// Coefficient of `eps^m` in the centred family-B potential with `b = 0`,
/// as a dense list of `y` coefficients.
fn potential_taylor(k: i64, a0: i64, m: usize) -> Vec<Rational> {
    // p = sum_j C(k, j+1)/k eps^j y^(j+1),  p' = sum_j C(k-1, j) eps^j y^j
    let mut out = vec![int(0); m + 3];
    for i in 0..=m {
        let j = m - i;
        let c = binom(k, i as i64 + 1) * binom(k, j as i64 + 1) / int(k * k);
        out[i + j + 2] += c;
    }
    out[m] -= int(a0) * binom(k - 1, m as i64);
    out
}

#[test]
fn betas_match_taylor_expansion_of_potential() {
    for k in 1..=8u32 {
        for n in 0..=5usize {
            let p = PerturbationProblem::new(k, n);
            let a0 = 2 * n as i64 + 1;
            let zeroth = potential_taylor(k as i64, a0, 0);
            assert_eq!(zeroth[0], int(-a0));
            assert_eq!(zeroth[2], int(1));
            for m in 1..=2 {
                let want = potential_taylor(k as i64, a0, m);
                for (d, c) in want.iter().enumerate() {
                    assert_eq!(&p.betas[m - 1].coeff(d), c, "k={k} n={n} eps^{m} y^{d}");
                }
            }
        }
    }
}

#[test]
fn hermite_polynomials_match_explicit_sum() {
    for n in 0..=14i64 {
        let h = hermite_poly(n as usize);
        for m in 0..=n / 2 {
            let mut c = int(2i64.pow((n - 2 * m) as u32));
            for i in 1..=n {
                c = c * int(i);
            }
            for i in 1..=m {
                c = c / int(i);
            }
            for i in 1..=(n - 2 * m) {
                c = c / int(i);
            }
            if m % 2 == 1 {
                c = -c;
            }
            assert_eq!(h.coeff((n - 2 * m) as usize), c, "H_{n} coefficient of y^{}", n - 2 * m);
        }
    }
}

#[test]
fn gaussian_moments_match_quadrature() {
    let nodes = composite(-12.0, 12.0, 64, 10);
    for m in 0..=8usize {
        let num: f64 = nodes.iter().map(|&(y, w)| w * y.powi(2 * m as i32) * (-y * y).exp()).sum();
        let exact = gaussian_moment(2 * m).to_f64().unwrap() * std::f64::consts::PI.sqrt();
        assert!((num - exact).abs() <= 1e-11 * exact, "m={m}: {num} vs {exact}");
        assert_eq!(gaussian_moment(2 * m + 1), int(0));
    }
}

#[test]
fn second_order_energy_decomposition() {
    for k in 2..=8i64 {
        for n in 0..=6usize {
            let h = HermiteFunction::mode(n);
            let hh = inner_product(&h, &h);
            let n1 = inner_product(&h.mul_y(1), &h.mul_y(1)) / &hh;
            let n2 = inner_product(&h.mul_y(2), &h.mul_y(2)) / &hh;
            let nn = n as i64;
            assert_eq!(n1, rat(2 * nn + 1, 2));
            assert_eq!(n2, rat(3 * (2 * nn * nn + 2 * nn + 1), 4));
            let lam2 = rs_step(&PerturbationProblem::new(k as u32, n), 2).unwrap().lambdas[2].clone();
            let rhs = rat(7 * k - 11, 12) * &n2 - rat((2 * nn + 1) * (k - 2), 2) * &n1
                - int(k - 1) * lemma41_bracket(n) / int(48);
            assert_eq!(lam2.clone() / int(k - 1), rhs);
            assert_eq!(lam2, lambda2_closed_form(k as u32, n));
        }
    }
}

fn spectrum(op: &OperatorInstance, hi: f64) -> Vec<f64> {
    let disc = op.discretization(hi, None).unwrap();
    refine_until(op, &disc, -1e3, hi, 1e-7, &SolverOptions::default()).unwrap().eigenvalues
}

#[test]
fn chart_d_rescales_spectrum() {
    let (eta, tau, k) = (3.0, -8.0, 2);
    let coeff = CoefficientSpec::polynomial(1.0, vec![0.0, 0.0, 0.5]).unwrap();
    let a = OperatorInstance::new(Family::A { eta, tau }, k, coeff.clone());
    let d = chart_d(eta, tau, k).unwrap();
    let dop = OperatorInstance::new(Family::D { w: d.w, eps: d.eps, sign_tau: d.sign_tau }, k, coeff);
    let scale = tau.abs().powf(2.0 / (k as f64 + 1.0));
    let ea = spectrum(&a, 40.0);
    let ed = spectrum(&dop, 40.0 / scale);
    assert!(ea.len() >= 3);
    for (x, y) in ea.iter().zip(&ed) {
        assert!((x - scale * y).abs() <= 1e-6 * x.abs().max(1.0), "{x} vs {}", scale * y);
    }
}

#[test]
fn chart_c_rescales_spectrum() {
    let (eta, tau, k) = (-2.0, 8.0, 2);
    let coeff = CoefficientSpec::constant(1.0);
    let a = OperatorInstance::new(Family::A { eta, tau }, k, coeff.clone());
    let c = chart_c(eta, tau, k).unwrap();
    let b = OperatorInstance::new(Family::B { z: c.z, eps: c.eps }, k, coeff);
    let scale = (c.eps * c.z).powi(-2);
    let ea = spectrum(&a, 30.0);
    let eb = spectrum(&b, 30.0 / scale);
    assert!(ea.len() >= 3);
    for (x, y) in ea.iter().zip(&eb) {
        assert!((x - scale * y).abs() <= 1e-6 * x.abs().max(1.0), "{x} vs {}", scale * y);
    }
}

#[test]
fn reflected_operators_share_spectrum() {
    let coeff = CoefficientSpec::polynomial(1.5, vec![0.0, 0.0, 0.7]).unwrap();
    for k in [1, 3] {
        let a = OperatorInstance::new(Family::A { eta: 2.0, tau: 5.0 }, k, coeff.clone());
        let b = OperatorInstance::new(Family::A { eta: -2.0, tau: 5.0 }, k, coeff.clone());
        let (ea, eb) = (spectrum(&a, 40.0), spectrum(&b, 40.0));
        assert_eq!(ea.len(), eb.len());
        for (x, y) in ea.iter().zip(&eb) {
            assert!((x - y).abs() <= 1e-7 * x.abs().max(1.0));
        }
    }
}

#[test]
fn finite_difference_error_is_fourth_order_after_extrapolation() {
    let pot = |y: f64| y * y;
    let opts = SolverOptions::default();
    let exact = [1.0, 3.0, 5.0];
    let errs: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&h| {
            let coarse = Discretization::covering(-10.0, 10.0, h);
            let fine = coarse.refined();
            let a = eigenvalues_in_window(&pot, &coarse, 0.0, 6.0, false, &opts).unwrap().eigenvalues;
            let b = eigenvalues_in_window(&pot, &fine, 0.0, 6.0, false, &opts).unwrap().eigenvalues;
            a.iter().zip(&b).zip(&exact).map(|((x, y), e)| ((4.0 * y - x) / 3.0 - e).abs()).fold(0.0, f64::max)
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((3.5..=4.5).contains(&order), "{errs:?}");
    }
}

#[test]
fn eps_fit_residual_shrinks_with_grid() {
    let opts = NumericOptions::default();
    let wide = fit_eps_series(2, 1, &[0.04, 0.08, 0.12, 0.16], &opts).unwrap();
    let narrow = fit_eps_series(2, 1, &[0.01, 0.02, 0.03, 0.04], &opts).unwrap();
    assert!(narrow.resid < wide.resid, "{} vs {}", narrow.resid, wide.resid);
}
