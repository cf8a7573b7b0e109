//! Classical Mahler measure m(P) = ∫_{𝕋ⁿ} log|P|.
//!
//! Three routes:
//!
//! - [`mahler_1var`]: one variable, exact up to root-finding error by Jensen's
//!   formula, log|a_d| + Σ log⁺|αⱼ|;
//! - [`mahler_direct`]: quadrature of log|P| over the whole torus;
//! - [`mahler_jensen_reduced`]: Jensen's formula in one variable, leaving the
//!   (n−1)-dimensional integral of log|a_d| + Σ log⁺|αⱼ| over the other
//!   variables. The combined integrand stays bounded where a_d vanishes
//!   (the large root compensates), which is why m(a_d) is not split off.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::laurent::{coeff_to_c64, CompiledPoly, LaurentError, LaurentPolynomial, RationalFunction};
use crate::quad::{integrate_box, QuadError, QuadratureConfig};
use crate::roots::{roots, RootError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Route and quadrature rule, e.g. `jensen/tensor-gauss`.
    pub method: String,
    pub samples_used: u64,
    /// Seed, skipped nodes, monomial shift and convergence flag.
    pub metadata: BTreeMap<String, Value>,
}

impl MeasureResult {
    pub(crate) fn exact(value: f64, method: &str) -> Self {
        MeasureResult { value, error_estimate: 0.0, method: method.to_string(), samples_used: 1, metadata: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("the zero polynomial has no Mahler measure")]
    ZeroPolynomial,
    #[error("expected a polynomial in one variable, found {0} variables")]
    NotUnivariate(usize),
    #[error("coefficients must be real")]
    NonRealCoefficients,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Root tolerance (componentwise backward error) used inside integrands.
const ROOT_TOL: f64 = 1e-15;

/// log|a_d| + Σ log⁺|αⱼ| for the polynomial Σ c_k x^k (ascending coefficients).
fn jensen_kernel(c: &[Complex64]) -> Result<f64, RootError> {
    let d = c.len() - 1;
    if d == 0 {
        return Ok(c[0].norm().ln());
    }
    if d == 1 {
        return Ok(c[0].norm().max(c[1].norm()).ln());
    }
    let mut s = c[d].norm().ln();
    for a in roots(c, ROOT_TOL)? {
        s += a.norm().ln().max(0.0);
    }
    Ok(s)
}

/// m(P) for P in at most one variable.
pub fn mahler_1var(p: &LaurentPolynomial) -> Result<f64, MeasureError> {
    if p.is_zero() {
        return Err(MeasureError::ZeroPolynomial);
    }
    let q = p.trimmed().monomial_normalized().0.trimmed();
    match q.vars().len() {
        0 => Ok(coeff_to_c64(&q.as_constant().unwrap()).norm().ln()),
        1 => {
            let coeffs = q.as_poly_in(&q.vars()[0])?;
            let c: Vec<Complex64> = coeffs.iter().map(|a| coeff_to_c64(&a.as_constant().unwrap())).collect();
            Ok(jensen_kernel(&c)?)
        }
        n => Err(MeasureError::NotUnivariate(n)),
    }
}

fn shift_metadata(vars: &[String], shift: &[i32]) -> Value {
    let m: serde_json::Map<String, Value> =
        vars.iter().zip(shift).filter(|(_, &e)| e != 0).map(|(v, &e)| (v.clone(), json!(e))).collect();
    Value::Object(m)
}

fn finish(route: &str, est: crate::quad::Estimate, cfg: &QuadratureConfig, mut meta: BTreeMap<String, Value>) -> MeasureResult {
    meta.insert("seed".into(), json!(cfg.seed));
    meta.insert("skipped".into(), json!(est.skipped));
    meta.insert("converged".into(), json!(est.converged));
    MeasureResult {
        value: est.value,
        error_estimate: est.error,
        method: format!("{route}/{}", cfg.method.tag()),
        samples_used: est.samples.max(1),
        metadata: meta,
    }
}

/// Torus average of log|P| by the quadrature rule in `cfg`. Nodes with
/// |P| < `singular_cutoff` are skipped and counted.
pub fn mahler_direct(p: &LaurentPolynomial, cfg: &QuadratureConfig) -> Result<MeasureResult, MeasureError> {
    if p.is_zero() {
        return Err(MeasureError::ZeroPolynomial);
    }
    let q = p.trimmed();
    let n = q.vars().len();
    if n == 0 {
        return Ok(MeasureResult::exact(coeff_to_c64(&q.as_constant().unwrap()).norm().ln(), "direct/exact"));
    }
    let f = q.compile();
    let cut = cfg.singular_cutoff;
    let integrand = move |t: &[f64]| {
        let v = f.eval_torus(t).norm();
        if v < cut || v == 0.0 { None } else { Some(v.ln()) }
    };
    let est = integrate_box(integrand, &vec![0.0; n], &vec![1.0; n], cfg)?;
    let mut meta = BTreeMap::new();
    meta.insert("dims".into(), json!(n));
    Ok(finish("direct", est, cfg, meta))
}

/// Jensen reduction in `var`: P is first divided by its gcd monomial (which
/// leaves m(P) unchanged), then written as Σ a_k(x')·var^k and
/// ∫_{𝕋ⁿ⁻¹} (log|a_d| + Σⱼ log⁺|αⱼ(x')|) is computed. Nodes where
/// |a_d| < `singular_cutoff` are skipped and counted in the metadata.
pub fn mahler_jensen_reduced(p: &LaurentPolynomial, var: &str, cfg: &QuadratureConfig) -> Result<MeasureResult, MeasureError> {
    if p.is_zero() {
        return Err(MeasureError::ZeroPolynomial);
    }
    let trimmed = p.trimmed();
    if trimmed.var_index(var).is_none() {
        return Err(LaurentError::VarAbsent(var.to_string()).into());
    }
    let (q, shift) = trimmed.monomial_normalized();
    // after the shift P may no longer depend on `var` (P = var^k·Q): degree 0
    let coeffs = match q.as_poly_in(var) {
        Err(LaurentError::VarAbsent(_)) => vec![q.trimmed()],
        r => r?,
    };
    let mut meta = BTreeMap::new();
    meta.insert("var".into(), json!(var));
    meta.insert("shift".into(), shift_metadata(trimmed.vars(), &shift));
    let rest = coeffs[0].vars().to_vec();
    if rest.is_empty() {
        let mut r = MeasureResult::exact(mahler_1var(&q)?, "jensen/exact");
        r.metadata = meta;
        return Ok(r);
    }
    let compiled: Vec<CompiledPoly> = coeffs.iter().map(|a| a.compile()).collect();
    let d = compiled.len() - 1;
    let cut = cfg.singular_cutoff;
    let failures = std::sync::atomic::AtomicU64::new(0);
    let integrand = |t: &[f64]| {
        let mut c = [Complex64::new(0.0, 0.0); 8];
        let mut heap;
        let c: &mut [Complex64] = if d < 8 {
            &mut c[..=d]
        } else {
            heap = vec![Complex64::new(0.0, 0.0); d + 1];
            &mut heap[..]
        };
        for (k, a) in compiled.iter().enumerate() {
            c[k] = a.eval_torus(t);
        }
        if c[d].norm() < cut || c[d].norm() == 0.0 {
            return None;
        }
        match jensen_kernel(c) {
            Ok(v) => Some(v),
            Err(_) => {
                failures.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                None
            }
        }
    };
    let n = rest.len();
    let est = integrate_box(integrand, &vec![0.0; n], &vec![1.0; n], cfg)?;
    meta.insert("dims".into(), json!(n));
    meta.insert("degree".into(), json!(d));
    let f = failures.into_inner();
    if f > 0 {
        meta.insert("root_failures".into(), json!(f));
    }
    Ok(finish("jensen", est, cfg, meta))
}

/// The curve R(x,y)·R(x⁻¹,y⁻¹) = 1 with denominators cleared:
/// N·N* − D·D* where P* = P(x⁻¹, …), returned in primitive form (gcd monomial
/// and rational content removed). Its zeros on the torus are where |R| = 1.
pub fn boundary_curve(r: &RationalFunction) -> Result<LaurentPolynomial, MeasureError> {
    let (n, d) = (r.numerator(), r.denominator());
    if !n.has_real_coefficients() || !d.has_real_coefficients() {
        return Err(MeasureError::NonRealCoefficients);
    }
    let c = &(n * &n.inverted()) - &(d * &d.inverted());
    Ok(c.primitive())
}
