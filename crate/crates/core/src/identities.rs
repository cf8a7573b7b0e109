//! The identity registry and its verification engine.
//!
//! Every record pairs an input (a polynomial, a generalized-measure family, a
//! polylogarithm relation or a series) with a closed form written as an
//! [`Expr`] tree. [`verify`] computes the numeric side with an independent
//! method and compares.
//!
//! Polylogarithm classes {z}ₙ exist here only through their images 𝓛ₙ(z): a
//! relation Σ cᵢ{gᵢ}ₙ = 0 is checked as |Σ cᵢ 𝓛ₙ(gᵢ)| being at rounding level.
//! Torsion in the underlying groups is invisible to this test.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::forms::Jet;
use crate::genmm::{gmm_direct, gmm_order_stat, Family, FamilySpec, GmmError};
use crate::laurent::parse;
use crate::measure::{mahler_direct, mahler_jensen_reduced, MeasureError, MeasureResult};
use crate::par;
use crate::quad::{integrate_box, Estimate, QuadError, QuadratureConfig};
use crate::special::{dirichlet_beta, li_upper, zagier_l_f64, zeta_f64, Precision};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentityError {
    #[error("unknown identity `{0}`")]
    UnknownId(String),
    #[error("method `{method}` does not apply to `{id}`")]
    InapplicableMethod { id: String, method: String },
    #[error("relation argument {0} evaluates to 0")]
    DegenerateArgument(String),
    #[error("cannot evaluate expression: {0}")]
    Evaluation(String),
    #[error("cannot parse `{text}`: {message}")]
    Parse { text: String, message: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Gmm(#[from] GmmError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A closed-form or argument expression, evaluated in complex arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Rational { num: i64, den: i64 },
    Pi,
    /// The imaginary unit.
    I,
    /// A free variable of a relation.
    Var { name: String },
    Sqrt { arg: Box<Expr> },
    Log { arg: Box<Expr> },
    /// Riemann ζ(s).
    Zeta { s: u32 },
    /// Dirichlet β(s) = L(χ₋₄, s).
    Beta { s: u32 },
    /// Liₙ on the principal branch (upper side of the cut).
    Li { n: u32, arg: Box<Expr> },
    /// Zagier's single-valued 𝓛ₙ.
    ZagierL { n: u32, arg: Box<Expr> },
    Add { terms: Vec<Expr> },
    Mul { factors: Vec<Expr> },
    Div { num: Box<Expr>, den: Box<Expr> },
    Neg { arg: Box<Expr> },
    Pow { base: Box<Expr>, exp: i32 },
}

pub type Env = BTreeMap<String, Complex64>;

impl Expr {
    pub fn q(num: i64, den: i64) -> Expr {
        Expr::Rational { num, den }
    }
    pub fn int(n: i64) -> Expr {
        Expr::q(n, 1)
    }
    pub fn var(name: &str) -> Expr {
        Expr::Var { name: name.to_string() }
    }
    pub fn zeta(s: u32) -> Expr {
        Expr::Zeta { s }
    }
    pub fn beta(s: u32) -> Expr {
        Expr::Beta { s }
    }
    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt { arg: Box::new(a) }
    }
    pub fn log(a: Expr) -> Expr {
        Expr::Log { arg: Box::new(a) }
    }
    pub fn li(n: u32, a: Expr) -> Expr {
        Expr::Li { n, arg: Box::new(a) }
    }
    pub fn zagier(n: u32, a: Expr) -> Expr {
        Expr::ZagierL { n, arg: Box::new(a) }
    }
    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::Add { terms }
    }
    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::Mul { factors }
    }
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div { num: Box::new(a), den: Box::new(b) }
    }
    pub fn neg(a: Expr) -> Expr {
        Expr::Neg { arg: Box::new(a) }
    }
    pub fn pow(a: Expr, exp: i32) -> Expr {
        Expr::Pow { base: Box::new(a), exp }
    }
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    pub fn eval(&self, env: &Env) -> Result<Complex64, IdentityError> {
        let r = |x: f64| Complex64::new(x, 0.0);
        let bad = |m: String| Err(IdentityError::Evaluation(m));
        let v = match self {
            Expr::Rational { num, den } => {
                if *den == 0 {
                    return bad("zero denominator".into());
                }
                r(*num as f64 / *den as f64)
            }
            Expr::Pi => r(PI),
            Expr::I => Complex64::i(),
            Expr::Var { name } => match env.get(name) {
                Some(v) => *v,
                None => return bad(format!("unbound variable `{name}`")),
            },
            Expr::Sqrt { arg } => arg.eval(env)?.sqrt(),
            Expr::Log { arg } => {
                let a = arg.eval(env)?;
                if a.norm() == 0.0 {
                    return bad("log of 0".into());
                }
                a.ln()
            }
            Expr::Zeta { s } => {
                if *s < 2 {
                    return bad(format!("ζ({s})"));
                }
                r(zeta_f64(*s as usize))
            }
            Expr::Beta { s } => match dirichlet_beta(*s as i64, &Precision::default()) {
                Ok(v) => r(v),
                Err(e) => return bad(e.to_string()),
            },
            Expr::Li { n, arg } => {
                if *n < 1 {
                    return bad(format!("Li_{n}"));
                }
                li_upper(*n as usize, arg.eval(env)?)
            }
            Expr::ZagierL { n, arg } => {
                if *n < 2 {
                    return bad(format!("𝓛_{n}"));
                }
                r(zagier_l_f64(*n as usize, arg.eval(env)?))
            }
            Expr::Add { terms } => {
                let mut s = Complex64::new(0.0, 0.0);
                for t in terms {
                    s += t.eval(env)?;
                }
                s
            }
            Expr::Mul { factors } => {
                let mut s = Complex64::new(1.0, 0.0);
                for t in factors {
                    s *= t.eval(env)?;
                }
                s
            }
            Expr::Div { num, den } => {
                let d = den.eval(env)?;
                if d.norm() == 0.0 {
                    return bad("division by 0".into());
                }
                num.eval(env)? / d
            }
            Expr::Neg { arg } => -arg.eval(env)?,
            Expr::Pow { base, exp } => base.eval(env)?.powi(*exp),
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            bad(format!("non-finite value of {self}"))
        }
    }

    /// Value of a closed form without free variables; must be real.
    pub fn eval_real(&self) -> Result<f64, IdentityError> {
        let v = self.eval(&Env::new())?;
        if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
            return Err(IdentityError::Evaluation(format!("{self} is not real ({v})")));
        }
        Ok(v.re)
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Expr::Var { .. } => true,
            Expr::Sqrt { arg } | Expr::Log { arg } | Expr::Li { arg, .. } | Expr::ZagierL { arg, .. } | Expr::Neg { arg } => {
                arg.has_vars()
            }
            Expr::Pow { base, .. } => base.has_vars(),
            Expr::Div { num, den } => num.has_vars() || den.has_vars(),
            Expr::Add { terms } => terms.iter().any(Expr::has_vars),
            Expr::Mul { factors } => factors.iter().any(Expr::has_vars),
            _ => false,
        }
    }

    fn is_sum(&self) -> bool {
        matches!(self, Expr::Add { .. })
    }

    fn is_atom(&self) -> bool {
        matches!(
            self,
            Expr::Pi | Expr::I | Expr::Var { .. } | Expr::Zeta { .. } | Expr::Beta { .. } | Expr::Li { .. } | Expr::ZagierL { .. }
        ) || matches!(self, Expr::Rational { den: 1, num } if *num >= 0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = |e: &Expr, f: &mut fmt::Formatter<'_>| if e.is_atom() { write!(f, "{e}") } else { write!(f, "({e})") };
        match self {
            Expr::Rational { num, den: 1 } => write!(f, "{num}"),
            Expr::Rational { num, den } => write!(f, "{num}/{den}"),
            Expr::Pi => write!(f, "π"),
            Expr::I => write!(f, "i"),
            Expr::Var { name } => write!(f, "{name}"),
            Expr::Sqrt { arg } => write!(f, "√{}", Wrapped(arg)),
            Expr::Log { arg } => write!(f, "log{}", Wrapped(arg)),
            Expr::Zeta { s } => write!(f, "ζ({s})"),
            Expr::Beta { s } => write!(f, "β({s})"),
            Expr::Li { n, arg } => write!(f, "Li_{n}({arg})"),
            Expr::ZagierL { n, arg } => write!(f, "𝓛_{n}({arg})"),
            Expr::Add { terms } => {
                for (i, t) in terms.iter().enumerate() {
                    match (i, t) {
                        (0, _) => write!(f, "{t}")?,
                        (_, Expr::Neg { arg }) => write!(f, " − {}", SumTerm(arg))?,
                        _ => write!(f, " + {}", SumTerm(t))?,
                    }
                }
                Ok(())
            }
            Expr::Mul { factors } => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "·")?;
                    }
                    if matches!(t, Expr::Add { .. } | Expr::Neg { .. }) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
            Expr::Div { num, den } => {
                paren(num, f)?;
                write!(f, "/")?;
                paren(den, f)
            }
            Expr::Neg { arg } => {
                write!(f, "−")?;
                paren(arg, f)
            }
            Expr::Pow { base, exp } => {
                paren(base, f)?;
                write!(f, "^{exp}")
            }
        }
    }
}

struct Wrapped<'a>(&'a Expr);
impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0)
    }
}

struct SumTerm<'a>(&'a Expr);
impl fmt::Display for SumTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_sum() { write!(f, "({})", self.0) } else { write!(f, "{}", self.0) }
    }
}

/// One term c·{g}ₙ of a relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationTerm {
    pub num: i64,
    pub den: i64,
    pub arg: Expr,
}

impl RelationTerm {
    pub fn coeff(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Σ cᵢ{gᵢ}ₙ, claimed to vanish. Arguments may use the free variables in
/// `vars`; a relation without variables is checked at a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub order: u32,
    pub vars: Vec<String>,
    pub terms: Vec<RelationTerm>,
}

impl RelationSpec {
    pub fn new(order: u32, vars: &[&str], terms: Vec<(i64, i64, Expr)>) -> Self {
        assert!(terms.len() >= 2, "a relation needs at least two terms");
        assert!(order >= 2, "relations are evaluated through 𝓛ₙ with n ≥ 2");
        RelationSpec {
            order,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            terms: terms.into_iter().map(|(num, den, arg)| RelationTerm { num, den, arg }).collect(),
        }
    }

    /// Σ cᵢ 𝓛ₙ(gᵢ) at one point.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<f64, IdentityError> {
        let env: Env = self.vars.iter().cloned().zip(point.iter().copied()).collect();
        let mut s = 0.0;
        for t in &self.terms {
            let g = t.arg.eval(&env)?;
            if g.norm() == 0.0 {
                return Err(IdentityError::DegenerateArgument(t.arg.to_string()));
            }
            s += t.coeff() * zagier_l_f64(self.order as usize, g);
        }
        Ok(s)
    }

    /// `count` pseudo-random points in [−2, 2]² ⊂ ℂ per variable, rejecting
    /// points where some non-constant argument or 1 − argument is within
    /// 0.05 of 0.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
        if self.vars.is_empty() {
            return vec![vec![]];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p: Vec<Complex64> =
                self.vars.iter().map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            let env: Env = self.vars.iter().cloned().zip(p.iter().copied()).collect();
            let ok = self.terms.iter().all(|t| match t.arg.eval(&env) {
                Ok(_) if !t.arg.has_vars() => true,
                Ok(g) => g.norm() > 0.05 && (1.0 - g).norm() > 0.05,
                Err(_) => false,
            });
            if ok {
                out.push(p);
            }
        }
        out
    }
}

/// max over the points of |Σ cᵢ 𝓛ₙ(gᵢ)|.
pub fn relation_residual(rel: &RelationSpec, points: &[Vec<Complex64>]) -> Result<f64, IdentityError> {
    let single = [vec![]];
    let points = if rel.vars.is_empty() { &single[..] } else { points };
    let mut worst = 0.0f64;
    for p in points {
        worst = worst.max(rel.evaluate(p)?.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "series", rename_all = "snake_case")]
pub enum SeriesSpec {
    /// Σ_{k≥l} C(k,l) λᵏ/k = λˡ/(l(1−λ)ˡ) for l = 1..l_max, λ = num/den.
    TailSum { num: u32, den: u32, l_max: u32 },
    /// 2 Σ_{l≥1} (1 − (−1)ˡ)/l².
    OddReciprocalSquares,
    /// −∫_B η(2, x, z) / (2π²) for z(1−x) = 1 + x + 2xy; see [`log2_block`].
    Log2Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    Mahler,
    Gmm,
    PolylogRelation,
    Series,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IdentityInput {
    /// A polynomial and the variable for the Jensen reduction.
    Polynomial { text: String, var: String },
    Family { spec: FamilySpec },
    Relation { spec: RelationSpec },
    Series { spec: SeriesSpec },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMethod {
    Jensen,
    Direct,
    OrderStat,
    ClosedOnly,
}

impl VerifyMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            VerifyMethod::Jensen => "jensen",
            VerifyMethod::Direct => "direct",
            VerifyMethod::OrderStat => "order_stat",
            VerifyMethod::ClosedOnly => "closed_only",
        }
    }
}

impl std::str::FromStr for VerifyMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jensen" => Ok(VerifyMethod::Jensen),
            "direct" => Ok(VerifyMethod::Direct),
            "order_stat" | "order-stat" => Ok(VerifyMethod::OrderStat),
            "closed_only" | "closed-only" | "closed" => Ok(VerifyMethod::ClosedOnly),
            other => Err(format!("unknown verification method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub id: String,
    pub kind: IdentityKind,
    pub input: IdentityInput,
    pub closed_form: Expr,
    pub source: String,
    /// Tolerance for the default method with its default configuration.
    pub tolerance: f64,
    pub default_method: VerifyMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityRecord {
    pub fn closed_value(&self) -> Result<f64, IdentityError> {
        self.closed_form.eval_real()
    }

    pub fn applicable(&self, m: VerifyMethod) -> bool {
        use VerifyMethod::*;
        match self.kind {
            IdentityKind::Mahler => matches!(m, Jensen | Direct),
            IdentityKind::Gmm => matches!(m, OrderStat | Direct | ClosedOnly),
            IdentityKind::PolylogRelation => matches!(m, ClosedOnly),
            IdentityKind::Series => match &self.input {
                IdentityInput::Series { spec: SeriesSpec::Log2Block } => matches!(m, Direct),
                _ => matches!(m, ClosedOnly),
            },
        }
    }

    /// The quadrature budget the record's tolerance was set for.
    pub fn default_config(&self, method: VerifyMethod) -> QuadratureConfig {
        match (&self.input, method) {
            (IdentityInput::Polynomial { text, .. }, VerifyMethod::Jensen) => {
                let dims = parse(text).map(|p| p.used_vars().len()).unwrap_or(1).saturating_sub(1);
                if dims <= 2 { jensen_tensor() } else { QuadratureConfig::quasi_mc(10_000_000, 0) }
            }
            (IdentityInput::Polynomial { .. }, VerifyMethod::Direct) => QuadratureConfig::quasi_mc(10_000_000, 0),
            (IdentityInput::Family { .. }, VerifyMethod::Direct) => QuadratureConfig::quasi_mc(1_000_000, 0),
            _ => QuadratureConfig::tensor(),
        }
    }
}

fn jensen_tensor() -> QuadratureConfig {
    QuadratureConfig { abs_tol: 1e-8, ..QuadratureConfig::tensor() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub method: VerifyMethod,
    pub numeric_value: f64,
    pub closed_value: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub error_estimate: f64,
    pub samples: u64,
    pub seed: u64,
    /// Quadrature tag and metadata of the numeric side.
    pub metadata: BTreeMap<String, Value>,
}

fn phi_plus() -> Expr {
    Expr::div(Expr::add(vec![Expr::int(1), Expr::sqrt(Expr::int(5))]), Expr::int(2))
}

fn phi_minus() -> Expr {
    Expr::div(Expr::sub(Expr::sqrt(Expr::int(5)), Expr::int(1)), Expr::int(2))
}

/// c·ζ(s)/π^k
fn zeta_over_pi(num: i64, den: i64, s: u32, k: i32) -> Expr {
    Expr::mul(vec![Expr::q(num, den), Expr::zeta(s), Expr::pow(Expr::Pi, -k)])
}

fn build_registry() -> Vec<IdentityRecord> {
    let mut v = Vec::new();
    let mut mahler = |id: &str, text: &str, closed: Expr, source: &str, tol: f64, note: Option<&str>| {
        v.push(IdentityRecord {
            id: id.into(),
            kind: IdentityKind::Mahler,
            input: IdentityInput::Polynomial { text: text.into(), var: "z".into() },
            closed_form: closed,
            source: source.into(),
            tolerance: tol,
            default_method: VerifyMethod::Jensen,
            note: note.map(String::from),
        })
    };
    mahler("smyth_xyz", "1+x+y+z", zeta_over_pi(7, 2, 3, 2), "Smyth", 1e-5, None);
    mahler(
        "smyth2",
        "1+x+y^-1-(1+x+y)*z",
        zeta_over_pi(14, 3, 3, 2),
        "Smyth",
        1e-4,
        Some("uncleared form: m(1+x+y) ≠ 0, so the y⁻¹ term is kept and removed by the monomial shift"),
    );
    mahler("linear_7z3", "(1-x)*(1-y)+(1+x)*(1+y)*z", zeta_over_pi(7, 1, 3, 2), "𝓛₃ boundary evaluation", 1e-4, None);
    mahler(
        "linear_log2",
        "1+x+2*y+(1-x)*z",
        Expr::add(vec![zeta_over_pi(7, 2, 3, 2), Expr::mul(vec![Expr::q(1, 2), Expr::log(Expr::int(2))])]),
        "𝓛₃ boundary evaluation plus the log 2 block",
        1e-4,
        None,
    );
    mahler("condon", "(1-y)*(1+x)+(1-x)*z", zeta_over_pi(28, 5, 3, 2), "Condon", 1e-4, None);
    mahler(
        "fourvar",
        "(1+x1)*(1+x)+(1-x1)*(1+y)*z",
        Expr::mul(vec![Expr::int(24), Expr::beta(4), Expr::pow(Expr::Pi, -3)]),
        "four-variable 𝓛-value evaluation",
        5e-3,
        Some("three-dimensional Jensen integral, quasi-Monte Carlo with 10⁷ samples"),
    );

    let mut gmm = |id: &str, family: Family, n: u32, closed: Expr, source: &str| {
        v.push(IdentityRecord {
            id: id.into(),
            kind: IdentityKind::Gmm,
            input: IdentityInput::Family { spec: FamilySpec { family, n } },
            closed_form: closed,
            source: source.into(),
            tolerance: 1e-8,
            default_method: VerifyMethod::OrderStat,
            note: None,
        })
    };
    gmm("gmm_1mx_2", Family::OneMinusX, 2, zeta_over_pi(7, 2, 3, 2), "Gon–Oyanagi");
    gmm("gmm_1mx_3", Family::OneMinusX, 3, zeta_over_pi(9, 2, 3, 2), "Gon–Oyanagi");
    gmm(
        "gmm_1mx_4",
        Family::OneMinusX,
        4,
        Expr::sub(zeta_over_pi(9, 1, 3, 2), zeta_over_pi(93, 2, 5, 4)),
        "Gon–Oyanagi",
    );
    gmm("gmm_ratio_2", Family::Ratio, 2, zeta_over_pi(7, 1, 3, 2), "generalized-measure closed form");
    gmm("gmm_golden_1", Family::Golden, 1, Expr::log(Expr::add(vec![Expr::int(1), phi_minus()])), "generalized-measure closed form");
    let phi2 = || Expr::pow(phi_minus(), 2);
    gmm(
        "gmm_golden_2",
        Family::Golden,
        2,
        Expr::sub(
            Expr::mul(vec![
                Expr::q(2, 1),
                Expr::pow(Expr::Pi, -2),
                Expr::sub(Expr::li(3, phi2()), Expr::li(3, Expr::neg(phi2()))),
            ]),
            Expr::log(phi_minus()),
        ),
        "generalized-measure closed form",
    );

    let l = |z: Expr| z;
    let c = |n: i64, d: i64| Expr::q(n, d);
    let mut rel = |id: &str, spec: RelationSpec, source: &str, note: Option<&str>| {
        v.push(IdentityRecord {
            id: id.into(),
            kind: IdentityKind::PolylogRelation,
            input: IdentityInput::Relation { spec },
            closed_form: Expr::int(0),
            source: source.into(),
            tolerance: 1e-10,
            default_method: VerifyMethod::ClosedOnly,
            note: note.map(String::from),
        })
    };
    rel(
        "l3_three_minus_three",
        RelationSpec::new(3, &[], vec![(2, 1, l(c(3, 1))), (-1, 1, l(c(-3, 1))), (-13, 6, l(c(1, 1)))]),
        "2𝓛₃(3) − 𝓛₃(−3) = (13/6)ζ(3)",
        None,
    );
    rel(
        "l3_22_term",
        RelationSpec::new(
            3,
            &[],
            vec![(4, 1, c(3, 1)), (2, 1, c(1, 3)), (-3, 1, c(-1, 3)), (6, 1, c(-1, 1)), (-2, 1, c(1, 1))],
        ),
        "instance of the 22-term relation",
        None,
    );
    rel("l3_minus_one", RelationSpec::new(3, &[], vec![(1, 1, c(-1, 1)), (3, 4, c(1, 1))]), "{−1}₃ = −(3/4){1}₃", None);
    rel("l3_two", RelationSpec::new(3, &[], vec![(1, 1, c(2, 1)), (-7, 8, c(1, 1))]), "{2}₃ = (7/8){1}₃", None);
    rel(
        "l3_golden",
        RelationSpec::new(3, &[], vec![(1, 1, phi_plus()), (1, 1, Expr::neg(phi_plus())), (-1, 5, c(1, 1))]),
        "{φ}₃ + {−φ}₃ = (1/5){1}₃",
        None,
    );
    rel(
        "l3_four",
        RelationSpec::new(3, &[], vec![(1, 1, c(4, 1)), (-4, 1, c(2, 1)), (-4, 1, c(-2, 1))]),
        "{4}₃ = 4{2}₃ + 4{−2}₃",
        None,
    );
    rel(
        "l3_minus_one_two",
        RelationSpec::new(3, &[], vec![(1, 1, c(-1, 1)), (2, 1, c(2, 1)), (-1, 1, c(1, 1))]),
        "{−1}₃ + 2{2}₃ = {1}₃",
        None,
    );
    let (x, y) = (Expr::var("x"), Expr::var("y"));
    let xy = || Expr::mul(vec![Expr::var("x"), Expr::var("y")]);
    let one_minus = |e: Expr| Expr::sub(Expr::int(1), e);
    rel(
        "five_term",
        RelationSpec::new(
            2,
            &["x", "y"],
            vec![
                (1, 1, x.clone()),
                (1, 1, one_minus(xy())),
                (1, 1, y.clone()),
                (1, 1, Expr::div(one_minus(x.clone()), one_minus(xy()))),
                (1, 1, Expr::div(one_minus(y.clone()), one_minus(xy()))),
            ],
        ),
        "five-term relation for D",
        None,
    );
    rel(
        "l3_three_term",
        RelationSpec::new(
            3,
            &["x"],
            vec![
                (1, 1, x.clone()),
                (1, 1, one_minus(x.clone())),
                (1, 1, one_minus(Expr::pow(x.clone(), -1))),
                (-1, 1, c(1, 1)),
            ],
        ),
        "𝓛₃(x) + 𝓛₃(1−x) + 𝓛₃(1−1/x) = ζ(3)",
        None,
    );

    let mut series = |id: &str, spec: SeriesSpec, closed: Expr, source: &str, tol: f64, method: VerifyMethod| {
        v.push(IdentityRecord {
            id: id.into(),
            kind: IdentityKind::Series,
            input: IdentityInput::Series { spec },
            closed_form: closed,
            source: source.into(),
            tolerance: tol,
            default_method: method,
            note: None,
        })
    };
    series(
        "tail_sum",
        SeriesSpec::TailSum { num: 1, den: 2, l_max: 10 },
        Expr::int(0),
        "Σ_{k≥l} C(k,l)λᵏ/k = λˡ/(l(1−λ)ˡ); the numeric side is the largest relative deviation over l",
        1e-12,
        VerifyMethod::ClosedOnly,
    );
    series(
        "three_zeta2",
        SeriesSpec::OddReciprocalSquares,
        Expr::div(Expr::pow(Expr::Pi, 2), Expr::int(2)),
        "2Σ(1−(−1)ˡ)/l² = 3ζ(2) = π²/2",
        1e-10,
        VerifyMethod::ClosedOnly,
    );
    series(
        "log2_block",
        SeriesSpec::Log2Block,
        Expr::log(Expr::int(2)),
        "−∫_B η(2,x,z) = 2π² log 2",
        1e-3 * std::f64::consts::LN_2,
        VerifyMethod::Direct,
    );
    v
}

/// The built-in identities, in a fixed order.
pub fn registry() -> &'static [IdentityRecord] {
    static R: OnceLock<Vec<IdentityRecord>> = OnceLock::new();
    R.get_or_init(build_registry)
}

pub fn lookup(id: &str) -> Option<&'static IdentityRecord> {
    registry().iter().find(|r| r.id == id)
}

/// The registry as JSON.
pub fn registry_json() -> Value {
    serde_json::to_value(registry()).expect("registry serializes")
}

/// Σ_{k≥l} C(k,l) λᵏ/k, summed until the terms fall below 1e−18 of the total.
pub fn tail_sum(l: u32, lambda: f64) -> f64 {
    assert!(l >= 1 && (0.0..1.0).contains(&lambda));
    let l = l as f64;
    // T_l = λˡ/l, T_{k+1}/T_k = λk/(k+1−l)
    let mut t = lambda.powf(l) / l;
    let mut s = 0.0;
    let mut k = l;
    loop {
        s += t;
        t *= lambda * k / (k + 1.0 - l);
        k += 1.0;
        if t < 1e-18 * s && k > l + 1.0 {
            return s;
        }
    }
}

/// 2Σ_{l≥1}(1−(−1)ˡ)/l² = 4Σ_{k≥0} 1/(2k+1)²: partial sum to K = 10⁵ (added
/// from the small end) plus the Euler–Maclaurin tail.
pub fn odd_reciprocal_squares() -> f64 {
    const K: u64 = 100_000;
    let f = |k: f64| 4.0 / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
    let mut s = 0.0;
    for k in (0..K).rev() {
        s += f(k as f64);
    }
    let kk = K as f64;
    let u = 2.0 * kk + 1.0;
    // ∫_K^∞ f + f(K)/2 − f'(K)/12 + f'''(K)/720
    s + 2.0 / u + f(kk) / 2.0 + 16.0 / (12.0 * u.powi(3)) - 768.0 / (720.0 * u.powi(5))
}

/// −∫_B η(2, x, z) / (2π²) where z(1−x) = 1 + x + 2xy and
/// B = {−π ≤ arg x, arg y, arg x + arg y ≤ π}.
///
/// On the torus log|x| = 0, and the non-exact part reduces to
/// log 2 · ∫_B d arg x ∧ d arg z. With x = e^{iα}, y = e^{iβ} only
/// w = 1 + x + 2xy depends on β, so the integrand is ∂_β arg w. B is
/// the hexagon α ∈ [−π, 0], β ∈ [−π−α, π] ∪ α ∈ [0, π], β ∈ [−π, π−α]; each
/// half is mapped to the unit square. The integrand has a 1/r singularity at
/// (α, β) = (0, ±π), where w = 0, so nodes with |w| below the cutoff are skipped.
pub fn log2_block(cfg: &QuadratureConfig) -> Result<Estimate, IdentityError> {
    let cut = cfg.singular_cutoff;
    let half = |lower: bool| {
        move |uv: &[f64]| -> Option<f64> {
            let (alpha, lo, width) = if lower {
                let a = -PI + PI * uv[0];
                (a, -PI - a, 2.0 * PI + a)
            } else {
                let a = PI * uv[0];
                (a, -PI, 2.0 * PI - a)
            };
            let beta = lo + width * uv[1];
            let x = Complex64::cis(alpha);
            let y = Complex64::cis(beta);
            let i = Complex64::i();
            let w = 1.0 + x + 2.0 * x * y;
            if w.norm() < cut {
                return None;
            }
            let xj = Jet::new(x, vec![i * x, Complex64::new(0.0, 0.0)]);
            let wj = Jet::new(w, vec![i * x + 2.0 * i * x * y, 2.0 * i * x * y]);
            // d i arg x ∧ d i arg w = −d arg x ∧ d arg w
            let v = -xj.di_arg().wedge(&wj.di_arg()).top().re;
            Some(v * PI * width)
        }
    };
    let a = integrate_box(half(true), &[0.0, 0.0], &[1.0, 1.0], cfg)?;
    let b = integrate_box(half(false), &[0.0, 0.0], &[1.0, 1.0], cfg)?;
    let scale = std::f64::consts::LN_2 / (2.0 * PI * PI);
    Ok(Estimate {
        value: (a.value + b.value) * scale,
        error: (a.error + b.error) * scale,
        samples: a.samples + b.samples,
        skipped: a.skipped + b.skipped,
        converged: a.converged && b.converged,
    })
}

/// Verify one record. `tol = None` uses the record's tolerance when `method`
/// is its default method; for any other method the tolerance is the larger of
/// the record's and three times the numeric error estimate.
pub fn verify(id: &str, method: VerifyMethod, cfg: &QuadratureConfig, tol: Option<f64>) -> Result<VerificationReport, IdentityError> {
    let rec = lookup(id).ok_or_else(|| IdentityError::UnknownId(id.to_string()))?;
    if !rec.applicable(method) {
        return Err(IdentityError::InapplicableMethod { id: id.into(), method: method.tag().into() });
    }
    let closed = rec.closed_value()?;
    let mut meta = BTreeMap::new();
    let from_measure = |r: MeasureResult, meta: &mut BTreeMap<String, Value>| {
        meta.insert("route".into(), json!(r.method));
        meta.extend(r.metadata);
        (r.value, r.error_estimate, r.samples_used)
    };
    let (numeric, err, samples) = match (&rec.input, method) {
        (IdentityInput::Polynomial { text, var }, m) => {
            let p = parse(text).map_err(|e| IdentityError::Parse { text: text.clone(), message: e.to_string() })?;
            let r = if m == VerifyMethod::Jensen { mahler_jensen_reduced(&p, var, cfg)? } else { mahler_direct(&p, cfg)? };
            from_measure(r, &mut meta)
        }
        (IdentityInput::Family { spec }, VerifyMethod::OrderStat) => {
            from_measure(gmm_order_stat(&spec.family.profile(), spec.n, cfg)?, &mut meta)
        }
        (IdentityInput::Family { spec }, VerifyMethod::Direct) => {
            from_measure(gmm_direct(&spec.family.functions(spec.n as usize), cfg)?, &mut meta)
        }
        (IdentityInput::Family { spec }, _) => {
            meta.insert("route".into(), json!("family closed form (fixed point)"));
            (spec.family.closed_form(spec.n), 0.0, 0)
        }
        (IdentityInput::Relation { spec }, _) => {
            let pts = spec.sample_points(100, cfg.seed);
            meta.insert("points".into(), json!(pts.len()));
            (relation_residual(spec, &pts)?, 0.0, pts.len() as u64)
        }
        (IdentityInput::Series { spec: SeriesSpec::TailSum { num, den, l_max } }, _) => {
            let lam = *num as f64 / *den as f64;
            let worst = (1..=*l_max)
                .map(|l| {
                    let exact = lam.powi(l as i32) / (l as f64 * (1.0 - lam).powi(l as i32));
                    (tail_sum(l, lam) - exact).abs() / exact
                })
                .fold(0.0, f64::max);
            meta.insert("lambda".into(), json!(lam));
            (worst, 0.0, *l_max as u64)
        }
        (IdentityInput::Series { spec: SeriesSpec::OddReciprocalSquares }, _) => (odd_reciprocal_squares(), 0.0, 100_000),
        (IdentityInput::Series { spec: SeriesSpec::Log2Block }, _) => {
            let e = log2_block(cfg)?;
            meta.insert("route".into(), json!(format!("log2-block/{}", cfg.method.tag())));
            meta.insert("skipped".into(), json!(e.skipped));
            meta.insert("converged".into(), json!(e.converged));
            (e.value, e.error, e.samples)
        }
    };
    let tolerance = tol.unwrap_or(if method == rec.default_method { rec.tolerance } else { rec.tolerance.max(3.0 * err) });
    let abs_diff = (numeric - closed).abs();
    Ok(VerificationReport {
        id: rec.id.clone(),
        method,
        numeric_value: numeric,
        closed_value: closed,
        abs_diff,
        tolerance,
        pass: abs_diff <= tolerance,
        error_estimate: err,
        samples,
        seed: cfg.seed,
        metadata: meta,
    })
}

/// Verify each record with its default method and configuration (seeded with
/// `seed`), in parallel; reports come back in registry order.
pub fn verify_all(seed: u64) -> Vec<Result<VerificationReport, IdentityError>> {
    par::map_slice(registry(), |r| verify(&r.id, r.default_method, &r.default_config(r.default_method).with_seed(seed), None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(id: &str) -> VerificationReport {
        let r = lookup(id).unwrap();
        verify(id, r.default_method, &r.default_config(r.default_method), None).unwrap()
    }

    #[test]
    fn registry_shape() {
        let r = registry();
        assert!(r.len() >= 10);
        let mut ids: Vec<&str> = r.iter().map(|x| x.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), r.len());
        for rec in r {
            assert!(rec.closed_value().unwrap().is_finite(), "{}", rec.id);
            assert!(rec.applicable(rec.default_method));
        }
        let smyth = lookup("smyth_xyz").unwrap().closed_value().unwrap();
        assert!((smyth - 7.0 * 1.2020569031595942854 / (2.0 * PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn json_round_trip() {
        let text = serde_json::to_string(registry()).unwrap();
        let back: Vec<IdentityRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, registry());
    }

    #[test]
    fn closed_forms_are_pure() {
        for rec in registry() {
            assert_eq!(rec.closed_value().unwrap().to_bits(), rec.closed_value().unwrap().to_bits());
        }
    }

    #[test]
    fn display() {
        assert_eq!(lookup("condon").unwrap().closed_form.to_string(), "28/5·ζ(3)·π^-2");
        assert_eq!(Expr::sub(Expr::Pi, Expr::int(1)).to_string(), "π − 1");
    }

    #[test]
    fn family_closed_forms_match_expressions() {
        for rec in registry().iter().filter(|r| r.kind == IdentityKind::Gmm) {
            let r = verify(&rec.id, VerifyMethod::ClosedOnly, &QuadratureConfig::tensor(), Some(1e-14)).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn gmm_order_stat_records() {
        for id in ["gmm_1mx_2", "gmm_ratio_2", "gmm_golden_1", "gmm_golden_2"] {
            let r = run(id);
            assert!(r.pass, "{r:?}");
        }
        let golden1 = lookup("gmm_golden_1").unwrap().closed_value().unwrap();
        assert!((golden1 - 0.48121182505960344).abs() < 1e-15);
    }

    #[test]
    fn relations_vanish() {
        for rec in registry().iter().filter(|r| r.kind == IdentityKind::PolylogRelation) {
            let r = run(&rec.id);
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn broken_relation_is_caught() {
        let bad = RelationSpec::new(3, &[], vec![(1, 1, Expr::int(2)), (-3, 4, Expr::int(1))]);
        assert!(relation_residual(&bad, &[]).unwrap() > 0.1);
        let zero = RelationSpec::new(3, &[], vec![(1, 1, Expr::int(0)), (1, 1, Expr::int(1))]);
        assert!(matches!(relation_residual(&zero, &[]), Err(IdentityError::DegenerateArgument(_))));
    }

    #[test]
    fn series_records() {
        for id in ["tail_sum", "three_zeta2"] {
            let r = run(id);
            assert!(r.pass, "{r:?}");
        }
        for l in 1..=10 {
            assert!((tail_sum(l, 0.5) - 1.0 / l as f64).abs() < 1e-12 / l as f64);
        }
    }

    #[test]
    fn log2_block_value() {
        let e = log2_block(&QuadratureConfig::tensor()).unwrap();
        assert!((e.value - std::f64::consts::LN_2).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn errors() {
        let cfg = QuadratureConfig::tensor();
        assert!(matches!(verify("nope", VerifyMethod::Jensen, &cfg, None), Err(IdentityError::UnknownId(_))));
        assert!(matches!(
            verify("smyth_xyz", VerifyMethod::OrderStat, &cfg, None),
            Err(IdentityError::InapplicableMethod { .. })
        ));
    }
}
