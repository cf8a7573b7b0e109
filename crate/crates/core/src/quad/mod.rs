//! Numerical integration over intervals and boxes.
//!
//! - [`integrate_1d`]: adaptive Gauss–Kronrod (G7/K15) with a global error queue;
//! - [`cubature`]: adaptive dyadic subdivision with a tensor G7/K15 rule per cell;
//! - [`lattice`]: randomly shifted rank-1 lattice rule on the unit cube;
//! - [`monte_carlo`]: plain Monte Carlo with a seeded ChaCha stream.
//!
//! Integrands return `None` at nodes that must be skipped (inside a singular
//! neighbourhood); skipped nodes contribute zero and are counted.

mod cubature;
mod gk;
mod sampling;

use serde::{Deserialize, Serialize};

pub use cubature::cubature;
pub use gk::integrate_1d;
pub(crate) use gk::rule15;
pub use sampling::{lattice, lattice_generator, monte_carlo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    TensorGauss,
    QuasiMc,
    Mc,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::TensorGauss => "tensor-gauss",
            Method::QuasiMc => "quasi-mc",
            Method::Mc => "mc",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tensor-gauss" | "tensor" => Ok(Method::TensorGauss),
            "quasi-mc" | "qmc" => Ok(Method::QuasiMc),
            "mc" => Ok(Method::Mc),
            other => Err(format!("unknown quadrature method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: Method,
    /// Tensor rule: initial cells per dimension.
    pub points_per_dim: usize,
    /// Sample budget (QMC/MC) or integrand-evaluation budget (tensor).
    pub total_samples: usize,
    pub seed: u64,
    /// Maximum number of dyadic refinements of a tensor cell.
    pub adaptive_depth: u32,
    /// Nodes whose singular quantity falls below this radius are skipped.
    pub singular_cutoff: f64,
    /// Tensor rule stopping tolerance on the summed error estimate.
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            method: Method::TensorGauss,
            points_per_dim: 4,
            total_samples: 20_000_000,
            seed: 0,
            adaptive_depth: 40,
            singular_cutoff: 1e-12,
            abs_tol: 1e-9,
            rel_tol: 0.0,
        }
    }
}

impl QuadratureConfig {
    pub fn tensor() -> Self {
        Self::default()
    }

    pub fn quasi_mc(total_samples: usize, seed: u64) -> Self {
        QuadratureConfig { method: Method::QuasiMc, total_samples, seed, ..Self::default() }
    }

    pub fn mc(total_samples: usize, seed: u64) -> Self {
        QuadratureConfig { method: Method::Mc, total_samples, seed, ..Self::default() }
    }

    /// Tensor rule up to two dimensions, quasi-MC with 10⁶ samples above.
    pub fn for_dim(d: usize) -> Self {
        if d <= 2 { Self::tensor() } else { Self::quasi_mc(1_000_000, 0) }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let bad = |m: &str| Err(QuadError::InvalidConfig(m.to_string()));
        if self.total_samples < 1 {
            return bad("total_samples must be at least 1");
        }
        if self.points_per_dim < 1 {
            return bad("points_per_dim must be at least 1");
        }
        if !(self.singular_cutoff >= 0.0) {
            return bad("singular_cutoff must be nonnegative");
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) {
            return bad("tolerances must be nonnegative");
        }
        Ok(())
    }
}

/// An integral estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integrand evaluations (including skipped nodes).
    pub samples: u64,
    pub skipped: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("integrand returned a non-finite value at {0:?}")]
    NonFinite(Vec<f64>),
    #[error("every node fell inside the singular cutoff")]
    AllSkipped,
}

/// Integrate over the box `[lo, hi]` with the method chosen in `cfg`.
pub fn integrate_box<F>(f: F, lo: &[f64], hi: &[f64], cfg: &QuadratureConfig) -> Result<Estimate, QuadError>
where
    F: Fn(&[f64]) -> Option<f64> + Sync + Send,
{
    cfg.validate()?;
    assert_eq!(lo.len(), hi.len());
    let d = lo.len();
    let est = match cfg.method {
        Method::TensorGauss => cubature(&f, lo, hi, cfg)?,
        Method::QuasiMc | Method::Mc => {
            let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
            let g = |u: &[f64]| {
                let mut buf = [0.0; 8];
                let mut heap;
                let x: &mut [f64] = if d <= 8 {
                    &mut buf[..d]
                } else {
                    heap = vec![0.0; d];
                    &mut heap[..]
                };
                for j in 0..d {
                    x[j] = lo[j] + (hi[j] - lo[j]) * u[j];
                }
                f(x)
            };
            let e = if cfg.method == Method::QuasiMc { lattice(&g, d, cfg)? } else { monte_carlo(&g, d, cfg)? };
            Estimate { value: e.value * vol, error: e.error * vol, ..e }
        }
    };
    if est.samples > 0 && est.skipped == est.samples {
        return Err(QuadError::AllSkipped);
    }
    Ok(est)
}
