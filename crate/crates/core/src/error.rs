use thiserror::Error;

/// Every fallible operation in the crate reports through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at z = {re} + {im}i")]
    GammaPole { re: f64, im: f64 },

    /// `ln_value` is the real part of ln Γ(z); use [`crate::special_fn::ln_gamma`] instead.
    #[error("gamma function overflows f64 (ln|Γ| = {ln_value})")]
    Overflow { ln_value: f64 },

    #[error("Re z = {re} lies outside the integral-representation strip ({lo}, {hi})")]
    StripViolation { re: f64, lo: f64, hi: f64 },

    /// z = m·ω₁ + k·ω₂ with m, k ≥ 1.
    #[error("double sine pole at lattice point m = {m}, k = {k}")]
    Pole { m: u32, k: u32 },

    #[error("periods must be positive and finite (got {w1}, {w2})")]
    InvalidPeriods { w1: f64, w2: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("quadrature budget exhausted: estimate {estimate_re} + {estimate_im}i, error {error}")]
    BudgetExceeded {
        estimate_re: f64,
        estimate_im: f64,
        error: f64,
    },

    #[error("integrand is not finite at t = {at}")]
    NonFinite { at: f64 },

    /// Combined decay of kernel and input is not positive along some direction.
    #[error("integral diverges: combined decay rate {rate} along {direction}")]
    Divergent { rate: f64, direction: &'static str },

    #[error("analytic continuation not valid: {0}")]
    Continuation(String),

    #[error("coincident arguments: {0}")]
    Coincident(String),

    #[error("unknown check name `{0}`")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
