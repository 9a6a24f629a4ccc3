//! Exact calculus on functions `p(y) exp(-y^2/2)` with rational `p`.
//!
//! Modes are the unnormalized physicists' Hermite functions
//! `H_q(y) exp(-y^2/2)`, so every identity becomes a rational equality.
//! Inner products are reported in units of `sqrt(pi)`.

mod poly;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
pub use poly::{int, rat, Polynomial, Rational};

pub const DEFAULT_DEGREE_CAP: usize = 64;

/// `p(y) exp(-y^2/2)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HermiteFunction {
    pub poly: Polynomial,
}

/// `H_q(y)`, built from `H_{q+1} = 2y H_q - 2q H_{q-1}`.
pub fn hermite_poly(q: usize) -> Polynomial {
    let mut prev = Polynomial::zero();
    let mut cur = Polynomial::one();
    for j in 0..q {
        let next = &cur.shift_up(1).scale(&int(2)) - &prev.scale(&int(2 * j as i64));
        prev = cur;
        cur = next;
    }
    cur
}

/// `int y^n exp(-y^2) dy / sqrt(pi)`.
pub fn gaussian_moment(n: usize) -> Rational {
    if n % 2 == 1 {
        return Rational::zero();
    }
    let m = n / 2;
    let mut r = Rational::one();
    for j in 1..=m {
        r = r * rat(2 * j as i64 - 1, 2);
    }
    r
}

impl HermiteFunction {
    pub fn new(poly: Polynomial) -> Self {
        HermiteFunction { poly }
    }

    pub fn zero() -> Self {
        HermiteFunction { poly: Polynomial::zero() }
    }

    pub fn mode(q: usize) -> Self {
        HermiteFunction { poly: hermite_poly(q) }
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn ensure_degree(&self, cap: usize) -> Result<()> {
        match self.degree() {
            Some(d) if d > cap => Err(Error::DegreeCap { degree: d, cap }),
            _ => Ok(()),
        }
    }

    /// `(-d/dy + y) f`: `p -> 2y p - p'`.
    pub fn raise(&self) -> Self {
        let p = &self.poly;
        HermiteFunction::new(&p.shift_up(1).scale(&int(2)) - &p.derivative())
    }

    /// `(d/dy + y) f`: `p -> p'`.
    pub fn lower(&self) -> Self {
        HermiteFunction::new(self.poly.derivative())
    }

    pub fn mul_y(&self, power: usize) -> Self {
        HermiteFunction::new(self.poly.shift_up(power))
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        HermiteFunction::new(&self.poly * p)
    }

    /// `(-d^2/dy^2 + y^2) f`: `p -> -p'' + 2y p' + p`.
    pub fn apply_oscillator(&self) -> Self {
        let p = &self.poly;
        let d1 = p.derivative();
        let d2 = d1.derivative();
        let t = &d1.shift_up(1).scale(&int(2)) - &d2;
        HermiteFunction::new(&t + p)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HermiteFunction::new(self.poly.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermiteFunction::new(&self.poly + &other.poly)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermiteFunction::new(&self.poly - &other.poly)
    }
}

/// `int f g dy / sqrt(pi)`.
pub fn inner_product(f: &HermiteFunction, g: &HermiteFunction) -> Rational {
    let prod = &f.poly * &g.poly;
    prod.coeffs()
        .iter()
        .enumerate()
        .filter(|(i, c)| i % 2 == 0 && !c.is_zero())
        .map(|(i, c)| c * gaussian_moment(i))
        .fold(Rational::zero(), |a, b| a + b)
}

/// Expansion in unnormalized Hermite modes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HermiteCoefficients {
    pub coeffs: BTreeMap<usize, Rational>,
}

impl HermiteCoefficients {
    pub fn mode(q: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(q, Rational::one());
        HermiteCoefficients { coeffs }
    }

    pub fn get(&self, q: usize) -> Rational {
        self.coeffs.get(&q).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn from_function(f: &HermiteFunction) -> Self {
        let mut rem = f.poly.clone();
        let mut coeffs = BTreeMap::new();
        while let Some(d) = rem.degree() {
            let h = hermite_poly(d);
            let c = rem.coeff(d) / h.coeff(d);
            rem = &rem - &h.scale(&c);
            coeffs.insert(d, c);
        }
        HermiteCoefficients { coeffs }
    }

    pub fn to_function(&self) -> HermiteFunction {
        let mut p = Polynomial::zero();
        for (&q, c) in &self.coeffs {
            p = &p + &hermite_poly(q).scale(c);
        }
        HermiteFunction::new(p)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&q, v)| (q, v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        HermiteCoefficients { coeffs }
    }
}

/// `(H - (2n+1))^{-1}` on the orthocomplement of mode `n`.
pub fn resolvent(n: usize, f: &HermiteCoefficients) -> Result<HermiteCoefficients> {
    if !f.get(n).is_zero() {
        return Err(Error::KernelComponent(n));
    }
    let coeffs = f
        .coeffs
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&p, v)| (p, v / int(2 * (p as i64 - n as i64))))
        .collect();
    Ok(HermiteCoefficients { coeffs })
}

/// `48 <v, H_q^{-1} v> / <h_q, h_q>` with `v = (y^3 - (2q+1) y) h_q`.
pub fn lemma41_bracket(q: usize) -> Rational {
    let base = HermiteFunction::mode(q);
    let odd = Polynomial::new(vec![int(0), -int(2 * q as i64 + 1), int(0), int(1)]);
    let v = base.mul_poly(&odd);
    let coeffs = HermiteCoefficients::from_function(&v);
    let rv = resolvent(q, &coeffs).expect("odd polynomial shifts never hit mode q");
    int(48) * inner_product(&v, &rv.to_function()) / inner_product(&base, &base)
}

/// `-6q^2 - 6q + 9`.
pub fn lemma41_bracket_closed_form(q: usize) -> Rational {
    let q = q as i64;
    int(-6 * q * q - 6 * q + 9)
}
