use dochar::solvability::{
    classify, evaluate_wave_packet, l2_witness, null_solution_residual, solvability_probe, ProbeOptions, Rule,
    WavePacketParams, WitnessOptions,
};
use dochar::{CoefficientSpec, Discretization};
use proptest::prelude::*;

#[test]
fn classifier_examples() {
    let flat = |a0| CoefficientSpec::flat(a0, 1.0).unwrap();
    assert_eq!(classify(1, &flat(3.0)).rule, Rule::FlatExceptional);
    assert!(!classify(1, &flat(3.0)).solvable);
    assert!(classify(2, &flat(3.0)).solvable);
    let curved = CoefficientSpec::polynomial(1.0, vec![0.0, 0.0, 0.5]).unwrap();
    assert!(classify(2, &curved).solvable);
    assert_eq!(classify(2, &curved).rule, Rule::PerturbedExceptional);
}

#[test]
fn null_solutions_on_fine_grids() {
    let k1 = null_solution_residual(1, 1.0, 1.0, &Discretization { center: 1.0, half_width: 7.0, n: 60_000 }).unwrap();
    assert!(k1.max() <= 1e-7, "{k1:?}");
    assert!(k1.first_order <= 2e-8, "{k1:?}");
    let k2 = null_solution_residual(2, 1.0, 1.0, &Discretization::covering(0.0, 6.0, 1e-4)).unwrap();
    assert!(k2.max() <= 1e-7, "{k2:?}");
    assert_eq!(k2.critical_point, 1.0);
    assert!((k2.peak - 1.0).abs() < 1e-12);
}

fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0.ln() / n, a.1 + p.1.ln() / n));
    let sxy: f64 = pts.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn packet_decays_in_time() {
    let p = WavePacketParams { lambda: 64.0, k: 2 };
    let t0 = p.lambda.powf(-0.25);
    let pts: Vec<(f64, f64)> = [1.0, 1.5, 2.0, 3.0, 4.0]
        .iter()
        .map(|&m| (m * t0, evaluate_wave_packet(&p, p.x_lambda(), 0.0, m * t0).unwrap().norm()))
        .collect();
    let slope = loglog_slope(&pts);
    assert!(slope < -3.0, "{slope}");
}

#[test]
fn packet_rejects_small_lambda() {
    assert!(evaluate_wave_packet(&WavePacketParams { lambda: 8.0, k: 2 }, 0.5, 0.0, 0.0).is_err());
}

#[test]
fn scaled_family_concentrates() {
    let flat = CoefficientSpec::flat(1.0, 1.0).unwrap();
    let r = solvability_probe(1, &flat, &[16.0, 32.0, 64.0], &ProbeOptions::default()).unwrap();
    assert_eq!(r.path, "scaled");
    for w in r.rows.windows(2) {
        assert!(w[1].l_psi_ratio < w[0].l_psi_ratio, "{:?}", r.rows);
    }
}

#[test]
fn probe_respects_lambda_cap() {
    let flat = CoefficientSpec::flat(1.0, 1.0).unwrap();
    let r = solvability_probe(2, &flat, &[512.0], &ProbeOptions::default());
    assert!(matches!(r, Err(dochar::Error::GridBudget(_))));
}

#[test]
fn l2_witness_trends() {
    let coeff = CoefficientSpec::polynomial(1.0, vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    let w = l2_witness(1, &coeff, &[4.0, 8.0, 16.0], &WitnessOptions::default()).unwrap();
    let f0 = w.rows[0].norm_f;
    for r in &w.rows {
        assert!((r.norm_f / f0 - 1.0).abs() < 0.05);
    }
    for p in w.rows.windows(2) {
        assert!(p[1].ratio <= 0.55 * p[0].ratio, "{:?}", w.rows);
    }
    assert!((w.dt_exponent - 2.0).abs() < 0.1);
    let cubic = CoefficientSpec::polynomial(-1.0, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
    let w = l2_witness(1, &cubic, &[4.0, 8.0, 16.0], &WitnessOptions::default()).unwrap();
    assert!((w.ratio_exponent + 1.0).abs() < 0.1, "{}", w.ratio_exponent);
}

#[test]
fn l2_witness_preconditions() {
    let quad = CoefficientSpec::polynomial(1.0, vec![0.0, 0.0, 1.0]).unwrap();
    assert!(l2_witness(1, &quad, &[4.0], &WitnessOptions::default()).is_err());
    let flat = CoefficientSpec::flat(1.0, 1.0).unwrap();
    assert!(l2_witness(2, &flat, &[4.0], &WitnessOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn polynomial_perturbation_lowers_rho(k in 1u32..=3, m in 1usize..=4, c in 0.5..2.0f64) {
        let flat = CoefficientSpec::flat(1.0, 1.0).unwrap();
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = c;
        let poly = CoefficientSpec::polynomial(1.0, coeffs).unwrap();
        let lambdas = [16.0, 64.0];
        let opts = ProbeOptions::default();
        let rf = solvability_probe(k, &flat, &lambdas, &opts).unwrap();
        let rp = solvability_probe(k, &poly, &lambdas, &opts).unwrap();
        prop_assert!(rp.rows[1].rho < rf.rows[1].rho, "k={} m={} c={}: {} vs {}", k, m, c, rp.rows[1].rho, rf.rows[1].rho);
    }
}
