use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mode {0} component is nonzero; resolvent undefined")]
    KernelComponent(usize),
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("inverse iteration did not converge near {0}")]
    Convergence(f64),
    #[error("refinement budget exhausted after {levels} levels (last change {last_change:e})")]
    BudgetExceeded { levels: usize, last_change: f64 },
    #[error("no eigenvalue in [{lo}, {hi}]")]
    WindowEmpty { lo: f64, hi: f64 },
    #[error("expected one eigenvalue in [{lo}, {hi}], found {count}")]
    UniquenessViolated { lo: f64, hi: f64, count: usize },
    #[error("unnormalized null solution overflows (log max = {0:.1})")]
    OverflowGuard(f64),
    #[error("quadrature did not settle within {0} panels")]
    QuadratureBudget(usize),
    #[error("grid budget exceeded: {0}")]
    GridBudget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
