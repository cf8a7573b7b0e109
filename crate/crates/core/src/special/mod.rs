//! Scalar special functions: Bernoulli numbers, ζ(k), Dirichlet β(s) = L(χ₋₄, s),
//! complex polylogarithms, the Bloch–Wigner dilogarithm and Zagier's
//! single-valued polylogarithms.
//!
//! Branch convention: principal logarithm, Liₙ cut along [1, ∞). On the cut
//! (real z > 1) every Liₖ returns its boundary value from above, z + i0.

mod bernoulli;
pub mod hp;
mod polylog;
mod zagier;
mod zeta;

pub use bernoulli::{bernoulli, bernoulli_f64};
pub use polylog::{li, Polylog};
pub use zagier::{bloch_wigner, zagier_l, zagier_lhat};
pub use zeta::{dirichlet_beta, zeta};

pub(crate) use polylog::li_upper;
pub(crate) use zagier::{lhat, zagier_l_f64};
pub(crate) use zeta::zeta_f64;

/// Smallest absolute error the f64 routines promise.
pub const F64_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Precision {
    pub target_abs_error: f64,
    pub max_terms: usize,
}

impl Precision {
    pub fn new(target_abs_error: f64, max_terms: usize) -> Result<Self, SpecialError> {
        if !(target_abs_error > 0.0) || max_terms < 1 {
            return Err(SpecialError::InvalidPrecision);
        }
        Ok(Precision { target_abs_error, max_terms })
    }

    fn check(&self) -> Result<(), SpecialError> {
        if !(self.target_abs_error > 0.0) || self.max_terms < 1 {
            return Err(SpecialError::InvalidPrecision);
        }
        if self.target_abs_error < F64_FLOOR {
            return Err(SpecialError::Unattainable(self.target_abs_error));
        }
        Ok(())
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision { target_abs_error: F64_FLOOR, max_terms: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecialError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("precision must have a positive tolerance and at least one term")]
    InvalidPrecision,
    #[error("tolerance {0:e} is below what double precision can deliver")]
    Unattainable(f64),
    #[error("term budget of {0} is too small for the requested tolerance")]
    Budget(usize),
}
