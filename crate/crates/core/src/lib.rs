//! Classical and generalized Mahler measures of Laurent polynomials.
//!
//! The crate is organised bottom-up:
//!
//! - [`laurent`]: exact sparse Laurent polynomials, a text parser and rational functions;
//! - [`special`]: Bernoulli numbers, ζ, Dirichlet β, polylogarithms, the Bloch–Wigner
//!   dilogarithm and Zagier's single-valued polylogarithms (plus a fixed-point backend);
//! - [`quad`]: adaptive Gauss–Kronrod, tensor cubature, rank-1 lattice and Monte Carlo rules;
//! - [`roots`]: Aberth–Ehrlich root finder with a companion-matrix fallback;
//! - [`measure`]: m(P) by Jensen's formula, direct torus quadrature and the Jensen-reduced integral;
//! - [`genmm`]: generalized measures m(f₁,…,f_r), order statistics and the family closed forms;
//! - [`forms`]: Goncharov's regulator forms pulled back to paths and patches;
//! - [`identities`]: the identity registry and verification engine.

pub mod forms;
pub mod genmm;
pub mod identities;
pub mod laurent;
pub mod measure;
pub mod quad;
pub mod roots;
pub mod special;

mod par;

pub use laurent::{parse, LaurentPolynomial, ParseError, RationalFunction};
pub use measure::{MeasureError, MeasureResult};
pub use quad::{Method, QuadratureConfig};
