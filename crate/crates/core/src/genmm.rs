//! Generalized Mahler measures m(f₁,…,f_r) = ∫ max_i log|f_i|.
//!
//! For the families f_i = P(x_i) with P one of 1−x, (1−x)/(1+x) and
//! 1+x−x⁻¹, |P(e(θ))| is a monotone function g of a statistic h(θ) with known
//! distribution, so the r-dimensional integral collapses to the expectation of
//! log g at the maximum of r i.i.d. draws of h:
//!
//! m = ∫₀¹ r·p^{r−1}·log g(Q(p)) dp,   Q = CDF⁻¹ of h.
//!
//! The closed forms are finite sums of ζ(2j+1)/π^{2j} (or Li_k(±φ²)/π^{k−1})
//! with integer weights of size up to r!, so they are accumulated in fixed
//! point and rounded once.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::laurent::{parse, CompiledPoly, LaurentPolynomial, RationalFunction};
use crate::measure::MeasureResult;
use crate::par;
use crate::quad::{integrate_1d, integrate_box, QuadError, QuadratureConfig};
use crate::special::hp::Hp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// P = 1 − x
    OneMinusX,
    /// P = (1 − x)/(1 + x)
    Ratio,
    /// P = 1 + x − x⁻¹
    Golden,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::OneMinusX, Family::Ratio, Family::Golden];

    pub fn tag(&self) -> &'static str {
        match self {
            Family::OneMinusX => "1mx",
            Family::Ratio => "ratio",
            Family::Golden => "golden",
        }
    }

    /// P(x_i) as a rational function in the variable `x{i}`.
    pub fn function(&self, i: usize) -> RationalFunction {
        let x = format!("x{i}");
        let p = |s: String| parse(&s).expect("family text parses");
        match self {
            Family::OneMinusX => p(format!("1-{x}")).into(),
            Family::Ratio => RationalFunction::new(p(format!("1-{x}")), p(format!("1+{x}"))).unwrap(),
            Family::Golden => p(format!("1+{x}-{x}^-1")).into(),
        }
    }

    /// f₁ … f_n in the distinct variables x1 … xn.
    pub fn functions(&self, n: usize) -> Vec<RationalFunction> {
        (1..=n).map(|i| self.function(i)).collect()
    }

    /// log ‖P‖∞ on the unit circle: log 2, +∞ (pole at x = −1) and log √5.
    pub fn log_sup_norm(&self) -> f64 {
        match self {
            Family::OneMinusX => 2f64.ln(),
            Family::Ratio => f64::INFINITY,
            Family::Golden => 0.5 * 5f64.ln(),
        }
    }

    pub fn profile(&self) -> MonotoneProfile {
        match self {
            Family::OneMinusX => MonotoneProfile {
                family: *self,
                fold_map: fold_to_half,
                cdf: |t| (2.0 * t).clamp(0.0, 1.0),
                quantile: |p| 0.5 * p,
                g: |h| 2.0 * (PI * h).sin(),
                direction: Direction::Increasing,
            },
            Family::Ratio => MonotoneProfile {
                family: *self,
                fold_map: fold_to_half,
                cdf: |t| (2.0 * t).clamp(0.0, 1.0),
                quantile: |p| 0.5 * p,
                g: |h| (PI * h).tan(),
                direction: Direction::Increasing,
            },
            Family::Golden => MonotoneProfile {
                family: *self,
                fold_map: |t| (2.0 * PI * t).sin().abs(),
                cdf: |u| 2.0 / PI * u.clamp(0.0, 1.0).asin(),
                quantile: |p| (0.5 * PI * p).sin(),
                g: |u| (1.0 + 4.0 * u * u).sqrt(),
                direction: Direction::Increasing,
            },
        }
    }

    /// The family's closed form for n functions.
    pub fn closed_form(&self, n: u32) -> f64 {
        match self {
            Family::OneMinusX => closed_one_minus_x(n),
            Family::Ratio => closed_ratio(n),
            Family::Golden => closed_golden(n),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1mx" | "one_minus_x" | "1-x" => Ok(Family::OneMinusX),
            "ratio" => Ok(Family::Ratio),
            "golden" => Ok(Family::Golden),
            other => Err(format!("unknown family `{other}` (expected 1mx, ratio or golden)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u32,
}

fn fold_to_half(t: f64) -> f64 {
    (t - t.round()).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// |P(e(θ))| = g(h(θ)) with g monotone and h distributed with a closed-form CDF
/// when θ is uniform on [0, 1).
#[derive(Debug, Clone, Copy)]
pub struct MonotoneProfile {
    pub family: Family,
    /// θ ↦ h(θ)
    pub fold_map: fn(f64) -> f64,
    pub cdf: fn(f64) -> f64,
    pub quantile: fn(f64) -> f64,
    /// h ↦ |P|
    pub g: fn(f64) -> f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GmmError {
    #[error("at least one function is required")]
    Empty,
    #[error("function {0} is identically zero")]
    ZeroFunction(usize),
    #[error("n must be at least 1")]
    ZeroOrder,
    #[error("profile does not match |P| at θ = {theta}: g(h) = {profile}, |P| = {direct}")]
    ProfileMismatch { theta: f64, profile: f64, direct: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

impl MonotoneProfile {
    /// Compare g∘h against |P(e(θ))| at 100 pseudo-random θ.
    pub fn validate(&self) -> Result<(), GmmError> {
        let f = self.family.function(1);
        let (num, den) = f.compile(&["x1".to_string()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6d6d);
        for _ in 0..100 {
            let theta: f64 = rng.gen();
            let direct = (num.eval_torus(&[theta]) / den.eval_torus(&[theta])).norm();
            let profile = (self.g)((self.fold_map)(theta));
            if (direct - profile).abs() > 1e-10 * direct.max(1.0) {
                return Err(GmmError::ProfileMismatch { theta, profile, direct });
            }
        }
        Ok(())
    }
}

/// Torus average of max_i log|f_i| by the quadrature rule in `cfg`. Nodes
/// where some denominator, or every numerator, is below `singular_cutoff` are
/// skipped. With one polynomial this is the same computation as
/// [`mahler_direct`](crate::measure::mahler_direct), node for node.
pub fn gmm_direct(fs: &[RationalFunction], cfg: &QuadratureConfig) -> Result<MeasureResult, GmmError> {
    if fs.is_empty() {
        return Err(GmmError::Empty);
    }
    if let Some(i) = fs.iter().position(|f| f.is_zero()) {
        return Err(GmmError::ZeroFunction(i));
    }
    let mut vars: Vec<String> = Vec::new();
    for f in fs {
        for v in f.vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    let n = vars.len();
    let compiled: Vec<(CompiledPoly, CompiledPoly)> = fs.iter().map(|f| f.compile(&vars).unwrap()).collect();
    let cut = cfg.singular_cutoff;
    let integrand = |t: &[f64]| {
        let mut best = f64::NEG_INFINITY;
        for (num, den) in &compiled {
            let d = den.eval_torus(t).norm();
            if d < cut || d == 0.0 {
                return None;
            }
            let v = num.eval_torus(t).norm();
            if v < cut || v == 0.0 {
                continue;
            }
            best = best.max(v.ln() - d.ln());
        }
        if best == f64::NEG_INFINITY { None } else { Some(best) }
    };
    let est = if n == 0 {
        crate::quad::Estimate {
            value: integrand(&[]).unwrap_or(f64::NEG_INFINITY),
            error: 0.0,
            samples: 1,
            skipped: 0,
            converged: true,
        }
    } else {
        integrate_box(integrand, &vec![0.0; n], &vec![1.0; n], cfg)?
    };
    let mut meta = BTreeMap::new();
    meta.insert("seed".into(), json!(cfg.seed));
    meta.insert("skipped".into(), json!(est.skipped));
    meta.insert("converged".into(), json!(est.converged));
    meta.insert("dims".into(), json!(n));
    meta.insert("functions".into(), json!(fs.len()));
    Ok(MeasureResult {
        value: est.value,
        error_estimate: est.error,
        method: format!("gmm-direct/{}", cfg.method.tag()),
        samples_used: est.samples.max(1),
        metadata: meta,
    })
}

/// m(P(x₁),…,P(x_n)) as the 1-D integral ∫₀¹ n·p^{n−1}·log g(Q(p)) dp
/// (for a decreasing g the minimum order statistic, weight n(1−p)^{n−1}).
/// Adaptive Gauss–Kronrod to `min(cfg.abs_tol, 1e-12)`.
pub fn gmm_order_stat(profile: &MonotoneProfile, n: u32, cfg: &QuadratureConfig) -> Result<MeasureResult, GmmError> {
    if n == 0 {
        return Err(GmmError::ZeroOrder);
    }
    profile.validate()?;
    let nf = n as f64;
    let (g, q, dir) = (profile.g, profile.quantile, profile.direction);
    let f = move |p: f64| {
        let w = match dir {
            Direction::Increasing => nf * p.powi(n as i32 - 1),
            Direction::Decreasing => nf * (1.0 - p).powi(n as i32 - 1),
        };
        if w == 0.0 {
            return Some(0.0);
        }
        Some(w * g(q(p)).ln())
    };
    let tol = cfg.abs_tol.min(1e-12);
    let est = integrate_1d(f, 0.0, 1.0, tol, 0.0, 20_000)?;
    let mut meta = BTreeMap::new();
    meta.insert("family".into(), json!(profile.family.tag()));
    meta.insert("n".into(), json!(n));
    meta.insert("converged".into(), json!(est.converged));
    Ok(MeasureResult {
        value: est.value,
        error_estimate: est.error,
        method: "order-stat/gauss-kronrod".into(),
        samples_used: est.samples,
        metadata: meta,
    })
}

fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |a, k| a * k)
}

fn rat(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// Σ_j c_j·ζ(2j+1)/π^{2j}, accumulated in fixed point.
fn zeta_pi_sum(terms: &[(u32, BigRational)], hp: &Hp) -> f64 {
    let pi = hp.pi();
    let pi2 = hp.mul(&pi, &pi);
    let mut acc = BigInt::zero();
    for (j, c) in terms {
        if c.is_zero() {
            continue;
        }
        let denom = hp.powi(&pi2, *j);
        let z = hp.div(&hp.zeta(2 * j + 1), &denom);
        acc += hp.mul(&hp.from_rational(c), &z);
    }
    hp.to_f64(&acc)
}

/// Coefficient of ζ(2j+1)/π^{2j} in the odd-n sums:
/// (2m−1)!/(2m−2j−1)! · (−1)^j (1 − w^j) / 4^j with w = 4 or w·2 = 2^{2j+1}.
fn odd_terms(n: u32, weight: impl Fn(u32) -> BigInt) -> Vec<(u32, BigRational)> {
    let m = n.div_ceil(2);
    (1..m)
        .map(|j| {
            let c = factorial(n) * weight(j) * if j % 2 == 0 { 1 } else { -1 };
            (j, rat(c, factorial(n - 2 * j) << (2 * j)))
        })
        .collect()
}

fn even_terms(n: u32, lead: BigRational, weight: impl Fn(u32) -> BigInt) -> Vec<(u32, BigRational)> {
    let m = n / 2;
    let mut t: Vec<(u32, BigRational)> = (1..=m)
        .map(|j| {
            let c = factorial(n) * weight(j) * if j % 2 == 0 { 1 } else { -1 };
            (j, rat(c, factorial(n - 2 * j) << (2 * j)))
        })
        .collect();
    t[m as usize - 1].1 += lead;
    t
}

fn one_minus_4j(j: u32) -> BigInt {
    BigInt::one() - (BigInt::one() << (2 * j))
}

fn one_minus_2_2j1(j: u32) -> BigInt {
    BigInt::one() - (BigInt::one() << (2 * j + 1))
}

/// m(1−x₁, …, 1−x_n).
///
/// Even n = 2m: (−1)^{m+1}(2m)!ζ(2m+1)/π^{2m}
///   + (2m)!·Σ_{j=1}^{m} (−1)^j (1−4^j) ζ(2j+1) / ((2m−2j)! (2π)^{2j}).
///
/// Odd n = 2m−1: (2m−1)!·Σ_{j=1}^{m−1} (−1)^j (1−4^j) ζ(2j+1) / ((2m−2j−1)! (2π)^{2j}).
///
/// # Panics
/// If n = 0.
pub fn closed_one_minus_x(n: u32) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    let hp = Hp::for_factorial(n as u64);
    let terms = if n % 2 == 1 {
        odd_terms(n, one_minus_4j)
    } else {
        let m = n / 2;
        let sign = if m % 2 == 1 { 1 } else { -1 };
        let lead = BigRational::from_integer(factorial(n) * sign);
        even_terms(n, lead, one_minus_4j)
    };
    zeta_pi_sum(&terms, &hp)
}

/// m((1−x₁)/(1+x₁), …, (1−x_n)/(1+x_n)).
///
/// Even n = 2m: (−1)^m (2m)! (1−2^{2m+1}) ζ(2m+1)/(2π)^{2m}
///   + (2m)!·Σ_{j=1}^{m} (−1)^j (1−2^{2j+1}) ζ(2j+1) / ((2m−2j)! (2π)^{2j}).
///
/// Odd n = 2m−1: (2m−1)!·Σ_{j=1}^{m−1} (−1)^j (1−2^{2j+1}) ζ(2j+1) / ((2m−2j−1)! (2π)^{2j}).
///
/// # Panics
/// If n = 0.
pub fn closed_ratio(n: u32) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    let hp = Hp::for_factorial(n as u64);
    let terms = if n % 2 == 1 {
        odd_terms(n, one_minus_2_2j1)
    } else {
        let m = n / 2;
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let lead = rat(factorial(n) * one_minus_2_2j1(m) * sign, BigInt::one() << (2 * m));
        even_terms(n, lead, one_minus_2_2j1)
    };
    zeta_pi_sum(&terms, &hp)
}

/// m(1+x₁−x₁⁻¹, …, 1+x_n−x_n⁻¹) with φ = (√5−1)/2:
///
/// −log φ + n!·Σ_{k odd, 3≤k≤n+1} (−1)^{(k−1)/2} Li_k(−φ²) / ((n−k+1)!·π^{k−1})
///   − [n even]·n!·(−1)^{n/2}·Li_{n+1}(φ²)/πⁿ.
///
/// For n = 2 this is (2/π²)(Li₃(φ²) − Li₃(−φ²)) − log φ.
///
/// # Panics
/// If n = 0.
pub fn closed_golden(n: u32) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    let hp = Hp::for_factorial(n as u64);
    let one = hp.one();
    let phi = (hp.sqrt(&hp.from_int(5)) - &one) / 2;
    let phi2 = hp.mul(&phi, &phi);
    let neg_phi2 = -phi2.clone();
    let pi = hp.pi();
    let nf = BigRational::from_integer(factorial(n));
    let mut acc = -hp.ln(&phi);
    for k in (3..=n + 1).step_by(2) {
        let sign = if (k - 1) / 2 % 2 == 0 { 1 } else { -1 };
        let c = &nf / BigRational::from_integer(factorial(n + 1 - k) * sign);
        let v = hp.div(&hp.li_real(k, &neg_phi2), &hp.powi(&pi, k - 1));
        acc += hp.mul(&hp.from_rational(&c), &v);
    }
    if n % 2 == 0 {
        let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
        let c = &nf * BigRational::from_integer(BigInt::from(sign));
        let v = hp.div(&hp.li_real(n + 1, &phi2), &hp.powi(&pi, n));
        acc -= hp.mul(&hp.from_rational(&c), &v);
    }
    hp.to_f64(&acc)
}

/// Σ_{j=1}^{m−1} (−1)^j C(2m−1, 2j) (2j)! (1−2^{2j}) ζ(2j+1)/(2π)^{2j}, the
/// odd-n value m(1−x₁, …, 1−x_{2m−1}); it tends to log 2 as m → ∞.
///
/// # Panics
/// If m = 0.
pub fn limit_series(m: u32) -> f64 {
    assert!(m >= 1, "m must be at least 1");
    let n = 2 * m - 1;
    let terms: Vec<(u32, BigRational)> = (1..m)
        .map(|j| {
            let binom = factorial(n) / (factorial(2 * j) * factorial(n - 2 * j));
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let c = binom * factorial(2 * j) * one_minus_4j(j) * sign;
            (j, rat(c, BigInt::one() << (2 * j)))
        })
        .collect();
    zeta_pi_sum(&terms, &Hp::for_factorial(n as u64))
}

/// Heuristic ‖P‖∞ on the torus: a grid of up to 256 points per dimension
/// (at most 2^24 in total), then coordinate ascent from the best few grid
/// points. Returns the maximum found and its angles θ ∈ [0,1)ⁿ
/// (xⱼ = e^{2πiθⱼ}). The value is at least every sampled |P|.
pub fn sup_norm(p: &LaurentPolynomial) -> (f64, Vec<f64>) {
    let q = p.trimmed();
    let n = q.vars().len();
    let f = q.compile();
    if n == 0 {
        return (f.eval_torus(&[]).norm(), vec![]);
    }
    let per = ((1u64 << 24) as f64).powf(1.0 / n as f64).floor().min(256.0).max(2.0) as usize;
    let total = per.pow(n as u32);
    let point = |idx: usize, th: &mut [f64]| {
        let mut r = idx;
        for t in th.iter_mut() {
            *t = (r % per) as f64 / per as f64;
            r /= per;
        }
    };
    const CHUNK: usize = 1 << 14;
    const KEEP: usize = 4;
    let chunks = total.div_ceil(CHUNK);
    let bests: Vec<Vec<(f64, usize)>> = par::map_indexed(chunks, |c| {
        let mut th = vec![0.0; n];
        let mut top: Vec<(f64, usize)> = Vec::with_capacity(KEEP + 1);
        for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
            point(idx, &mut th);
            let v = f.eval_torus(&th).norm();
            if top.len() < KEEP || v > top[KEEP - 1].0 {
                top.push((v, idx));
                top.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                top.truncate(KEEP);
            }
        }
        top
    });
    let mut top: Vec<(f64, usize)> = bests.into_iter().flatten().collect();
    top.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    top.truncate(KEEP);
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    for &(v0, idx) in &top {
        let mut th = vec![0.0; n];
        point(idx, &mut th);
        let mut v = v0;
        let mut step = 1.0 / per as f64;
        while step > 1e-13 {
            let mut improved = false;
            for j in 0..n {
                for s in [step, -step] {
                    let old = th[j];
                    th[j] = (old + s).rem_euclid(1.0);
                    let w = f.eval_torus(&th).norm();
                    if w > v {
                        v = w;
                        improved = true;
                    } else {
                        th[j] = old;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if v > best.0 {
            best = (v, th);
        }
    }
    best
}

/// Evaluate a family at a point of the circle (for plotting and checks).
pub fn family_abs(family: Family, theta: f64) -> f64 {
    let f = family.function(1);
    let x = Complex64::cis(2.0 * PI * theta);
    f.evaluate(&[x]).map(|z| z.norm()).unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZETA3: f64 = 1.2020569031595942854;

    #[test]
    fn small_closed_values() {
        let pi2 = PI * PI;
        assert_eq!(closed_one_minus_x(1), 0.0);
        assert!((closed_one_minus_x(2) - 3.5 * ZETA3 / pi2).abs() < 1e-15);
        assert!((closed_one_minus_x(3) - 4.5 * ZETA3 / pi2).abs() < 1e-15);
        assert_eq!(closed_ratio(1), 0.0);
        assert!((closed_ratio(2) - 7.0 * ZETA3 / pi2).abs() < 1e-15);
        assert!((closed_golden(1) - 1.6180339887498949f64.ln()).abs() < 1e-15);
        assert_eq!(limit_series(1), 0.0);
        assert!((limit_series(2) - 4.5 * ZETA3 / pi2).abs() < 1e-15);
    }

    // mpmath (50 digits): the order-statistic integral and the closed forms agree.
    #[test]
    fn reference_values() {
        let golden = [
            0.48121182505960345,
            0.63688119561853012,
            0.70341744217581361,
            0.73728843070733202,
            0.75670346203650986,
            0.76881808933422995,
            0.77687058481555015,
        ];
        for (i, v) in golden.iter().enumerate() {
            assert!((closed_golden(i as u32 + 1) - v).abs() < 2e-16, "n={}", i + 1);
        }
        assert!((closed_one_minus_x(4) - 0.6011481442).abs() < 1e-10);
        assert!((closed_ratio(3) - 1.2788351965).abs() < 1e-10);
        assert!((closed_ratio(4) - 1.5676777731).abs() < 1e-10);
    }

    #[test]
    fn golden_two_matches_displayed_formula() {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let p = crate::special::Precision::default();
        let li3 = |x: f64| crate::special::li(3, Complex64::new(x, 0.0), &p).unwrap().value.re;
        let v = 2.0 / (PI * PI) * (li3(phi * phi) - li3(-phi * phi)) - phi.ln();
        assert!((closed_golden(2) - v).abs() < 1e-15);
    }

    #[test]
    fn limit_series_is_the_odd_closed_form() {
        for m in 1..=45 {
            assert_eq!(limit_series(m).to_bits(), closed_one_minus_x(2 * m - 1).to_bits());
        }
        let l2 = 2f64.ln();
        assert!((limit_series(50) - l2).abs() < (limit_series(10) - l2).abs());
    }

    #[test]
    fn order_stat_matches_closed_forms() {
        let cfg = QuadratureConfig::tensor();
        for fam in Family::ALL {
            let prof = fam.profile();
            for n in 1..=6 {
                let r = gmm_order_stat(&prof, n, &cfg).unwrap();
                let c = fam.closed_form(n);
                assert!((r.value - c).abs() < 1e-9, "{fam:?} n={n}: {} vs {c}", r.value);
            }
        }
    }

    #[test]
    fn profiles_validate() {
        for fam in Family::ALL {
            fam.profile().validate().unwrap();
        }
        let mut bad = Family::Golden.profile();
        bad.g = |u| 1.0 + u;
        assert!(matches!(bad.validate(), Err(GmmError::ProfileMismatch { .. })));
    }

    #[test]
    fn direct_single_function_is_mahler_direct() {
        let p = parse("1+x+y").unwrap();
        let cfg = QuadratureConfig::quasi_mc(1 << 16, 5);
        let a = gmm_direct(&[p.clone().into()], &cfg).unwrap();
        let b = crate::measure::mahler_direct(&p, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
        let r = gmm_direct(&[parse("x-2").unwrap().into()], &QuadratureConfig::tensor()).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
        assert_eq!(gmm_direct(&[], &cfg), Err(GmmError::Empty));
    }

    #[test]
    fn sup_norms() {
        let (v, _) = sup_norm(&parse("1+x").unwrap());
        assert!((v - 2.0).abs() < 1e-12);
        let (v, th) = sup_norm(&parse("1+x+y+z").unwrap());
        assert!((v - 4.0).abs() < 1e-12 && th.iter().all(|t| t.min(1.0 - t) < 1e-5));
        let (v, th) = sup_norm(&parse("1+x-x^-1").unwrap());
        assert!((v - 5f64.sqrt()).abs() < 1e-12);
        assert!((th[0] - 0.25).abs() < 1e-6 || (th[0] - 0.75).abs() < 1e-6);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("1mx".parse::<Family>().unwrap(), Family::OneMinusX);
        assert!("nope".parse::<Family>().is_err());
        assert!((family_abs(Family::Golden, 0.25) - 5f64.sqrt()).abs() < 1e-12);
    }
}
