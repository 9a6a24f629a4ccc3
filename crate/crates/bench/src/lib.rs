//! Fixtures shared by the criterion benches.

use dochar::{CoefficientSpec, Discretization, Family, OperatorInstance};

/// Family B with `a(0) = 3`, `a - a(0) = x^2`, near the small-eigenvalue regime.
pub fn double_well(k: u32, eps: f64) -> OperatorInstance {
    let coeff = CoefficientSpec::polynomial(3.0, vec![0.0, 0.0, 1.0]).expect("valid polynomial");
    OperatorInstance::new(Family::B { z: 0.05, eps }, k, coeff)
}

pub fn oscillator_grid(n: usize) -> Discretization {
    Discretization::new(10.0, n)
}
