use clap::{ArgGroup, Args, ValueEnum};
use mahler::genmm::{gmm_direct, gmm_order_stat, sup_norm, Family, GmmError};
use mahler::identities::{lookup, registry, verify as verify_one, verify_all, IdentityError, IdentityKind, IdentityRecord, VerificationReport, VerifyMethod};
use mahler::measure::{mahler_1var, mahler_direct, mahler_jensen_reduced};
use mahler::{parse, LaurentPolynomial, MeasureError, MeasureResult, QuadratureConfig, RationalFunction};

use crate::output::Row;
use crate::{Clock, Failure, Global};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMethod {
    /// Exact for one variable, Jensen-reduced otherwise.
    Auto,
    /// Roots of a one-variable polynomial.
    Exact,
    Jensen,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Tensor,
    Qmc,
    Mc,
}

/// Quadrature overrides shared by the numeric commands.
#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Cubature rule (default: tensor up to two dimensions, quasi-MC above).
    #[arg(long, value_enum)]
    pub rule: Option<Rule>,
    /// Sample budget (QMC/MC) or evaluation budget (tensor).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    /// Absolute tolerance of the adaptive tensor rule.
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

impl QuadArgs {
    fn is_default(&self) -> bool {
        self.rule.is_none() && self.samples.is_none() && self.abs_tol.is_none()
    }

    /// `base` with the overrides applied and the global seed.
    fn apply(&self, base: QuadratureConfig, seed: u64) -> Result<QuadratureConfig, Failure> {
        let mut cfg = match self.rule {
            None => base,
            Some(Rule::Tensor) => QuadratureConfig::tensor(),
            Some(Rule::Qmc) => QuadratureConfig::quasi_mc(1_000_000, seed),
            Some(Rule::Mc) => QuadratureConfig::mc(1_000_000, seed),
        };
        if let Some(n) = self.samples {
            cfg.total_samples = n as usize;
        }
        if let Some(t) = self.abs_tol {
            cfg.abs_tol = t;
        }
        cfg.seed = seed;
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn parse_poly(text: &str) -> Result<LaurentPolynomial, Failure> {
    parse(text).map_err(|e| {
        let caret = format!("{}^", " ".repeat(e.pos));
        Failure::Usage(format!("cannot parse `{text}`: {e}\n  {text}\n  {caret}"))
    })
}

/// A polynomial, or `num/den` split at the last top-level slash.
fn parse_function(text: &str) -> Result<RationalFunction, Failure> {
    let whole = parse(text);
    if let Ok(p) = whole {
        return Ok(p.into());
    }
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    let Some(i) = split else {
        return parse_poly(text).map(Into::into);
    };
    let (num, den) = (parse_poly(&text[..i])?, parse_poly(&text[i + 1..])?);
    RationalFunction::new(num, den).map_err(|e| Failure::Usage(format!("`{text}`: {e}")))
}

fn measure_failure(e: MeasureError) -> Failure {
    match e {
        MeasureError::ZeroPolynomial | MeasureError::NotUnivariate(_) | MeasureError::NonRealCoefficients | MeasureError::Laurent(_) => {
            Failure::Usage(e.to_string())
        }
        MeasureError::Roots(_) | MeasureError::Quad(_) => Failure::Numeric(e.to_string()),
    }
}

fn gmm_failure(e: GmmError) -> Failure {
    match e {
        GmmError::Empty | GmmError::ZeroFunction(_) | GmmError::ZeroOrder => Failure::Usage(e.to_string()),
        _ => Failure::Numeric(e.to_string()),
    }
}

fn identity_failure(e: IdentityError) -> Failure {
    match e {
        IdentityError::UnknownId(_) | IdentityError::InapplicableMethod { .. } => Failure::Usage(e.to_string()),
        _ => Failure::Numeric(e.to_string()),
    }
}

fn finite(value: f64, what: &str) -> Result<f64, Failure> {
    if value.is_finite() { Ok(value) } else { Err(Failure::Numeric(format!("{what} is not finite ({value})"))) }
}

fn measure_row(command: &'static str, input: &str, r: &MeasureResult, seed: u64, clock: &Clock) -> Result<Row, Failure> {
    let mut row = Row::new(command, input, r.method.clone(), finite(r.value, "value")?, r.error_estimate, seed);
    row.samples = r.samples_used;
    row.wall_ms = clock.ms();
    Ok(row)
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Laurent polynomial, e.g. "1+x+y+z" or "x^-1+2*y".
    pub polynomial: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: EvalMethod,
    /// Variable eliminated by Jensen's formula (default: the last one).
    #[arg(long)]
    pub var: Option<String>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

pub fn eval(a: &EvalArgs, g: &Global) -> Result<Vec<Row>, Failure> {
    let clock = Clock::start(g);
    let p = parse_poly(&a.polynomial)?;
    let vars = p.trimmed().used_vars();
    let method = match a.method {
        EvalMethod::Auto if vars.len() <= 1 => EvalMethod::Exact,
        EvalMethod::Auto => EvalMethod::Jensen,
        m => m,
    };
    let r = match method {
        EvalMethod::Exact => {
            if vars.len() > 1 {
                return Err(Failure::Usage(format!(
                    "exact evaluation needs at most one variable, `{}` has {}; use --method jensen or direct",
                    a.polynomial,
                    vars.len()
                )));
            }
            let v = mahler_1var(&p).map_err(measure_failure)?;
            let mut r = MeasureResult { value: v, error_estimate: 0.0, method: "exact/roots".into(), samples_used: 1, metadata: Default::default() };
            r.metadata.insert("vars".into(), serde_json::json!(vars));
            r
        }
        EvalMethod::Jensen => {
            let var = match &a.var {
                Some(v) => v.clone(),
                None => vars.last().cloned().ok_or_else(|| Failure::Usage("a constant has no variable to eliminate".into()))?,
            };
            if !vars.contains(&var) {
                return Err(Failure::Usage(format!("`{var}` does not occur in `{}`", a.polynomial)));
            }
            let cfg = a.quad.apply(QuadratureConfig::for_dim(vars.len() - 1), g.seed)?;
            mahler_jensen_reduced(&p, &var, &cfg).map_err(measure_failure)?
        }
        EvalMethod::Direct | EvalMethod::Auto => {
            let cfg = a.quad.apply(QuadratureConfig::for_dim(vars.len()), g.seed)?;
            mahler_direct(&p, &cfg).map_err(measure_failure)?
        }
    };
    Ok(vec![measure_row("eval", &a.polynomial, &r, g.seed, &clock)?])
}

fn parse_method(s: &str) -> Result<VerifyMethod, String> {
    s.parse()
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("which").required(true).args(["all", "id"])))]
pub struct VerifyArgs {
    /// Every registry record (those the method applies to, with --method).
    #[arg(long)]
    pub all: bool,
    /// Record id; may be repeated.
    #[arg(long)]
    pub id: Vec<String>,
    /// jensen, direct, order-stat or closed-only (default: the record's own).
    #[arg(long, value_parser = parse_method)]
    pub method: Option<VerifyMethod>,
    /// Absolute tolerance (default: the record's).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

fn report_row(command: &'static str, rec: &IdentityRecord, r: &VerificationReport, wall_ms: u64) -> Row {
    let mut row = Row::new(command, rec.id.clone(), r.method.tag(), r.numeric_value, r.error_estimate, r.seed);
    row.closed_form = Some(r.closed_value);
    row.pass = Some(r.pass);
    row.samples = r.samples;
    row.wall_ms = wall_ms;
    row.tolerance = Some(r.tolerance);
    row.closed_expr = Some(rec.closed_form.to_string());
    row
}

pub fn verify(a: &VerifyArgs, g: &Global) -> Result<Vec<Row>, Failure> {
    if let Some(t) = a.tol {
        if !(t >= 0.0) {
            return Err(Failure::Usage(format!("--tol must be nonnegative, got {t}")));
        }
    }
    let records: Vec<&IdentityRecord> = if a.all {
        registry().iter().filter(|r| a.method.is_none_or(|m| r.applicable(m))).collect()
    } else {
        a.id.iter().map(|id| lookup(id).ok_or_else(|| Failure::Usage(format!("unknown identity `{id}` (see `mm list`)")))).collect::<Result<_, _>>()?
    };
    if a.all && a.method.is_none() && a.tol.is_none() && a.quad.is_default() {
        let clock = Clock::start(g);
        let reports = verify_all(g.seed);
        let ms = clock.ms();
        return records.iter().zip(reports).map(|(rec, r)| r.map(|r| report_row("verify", rec, &r, ms)).map_err(identity_failure)).collect();
    }
    records
        .iter()
        .map(|rec| {
            let clock = Clock::start(g);
            let m = a.method.unwrap_or(rec.default_method);
            if !rec.applicable(m) {
                return Err(Failure::Usage(format!("method `{}` does not apply to `{}`", m.tag(), rec.id)));
            }
            let cfg = a.quad.apply(rec.default_config(m), g.seed)?;
            let r = verify_one(&rec.id, m, &cfg, a.tol).map_err(identity_failure)?;
            Ok(report_row("verify", rec, &r, clock.ms()))
        })
        .collect()
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["family", "function"])))]
pub struct GmmArgs {
    /// 1mx (1−x), ratio ((1−x)/(1+x)) or golden (1+x−x⁻¹).
    #[arg(long, requires = "n")]
    pub family: Option<Family>,
    /// Number of functions in the family.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: Option<u32>,
    /// An explicit function, polynomial or `num/den`; repeat for each.
    #[arg(long = "fn", value_name = "TEXT")]
    pub function: Vec<String>,
    /// Also integrate the family directly over the n-torus.
    #[arg(long)]
    pub direct: bool,
    /// Tolerance for the order-statistic value against the closed form.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

pub fn gmm(a: &GmmArgs, g: &Global) -> Result<Vec<Row>, Failure> {
    let Some(family) = a.family else {
        let clock = Clock::start(g);
        let fs = a.function.iter().map(|t| parse_function(t)).collect::<Result<Vec<_>, _>>()?;
        let mut vars: Vec<String> = fs.iter().flat_map(|f| f.vars()).collect();
        vars.sort();
        vars.dedup();
        let cfg = a.quad.apply(QuadratureConfig::for_dim(vars.len()), g.seed)?;
        let r = gmm_direct(&fs, &cfg).map_err(gmm_failure)?;
        return Ok(vec![measure_row("gmm", &a.function.join(", "), &r, g.seed, &clock)?]);
    };
    let n = a.n.expect("clap requires --n with --family");
    let input = format!("{} n={n}", family.tag());
    let closed = family.closed_form(n);
    let mut rows = Vec::new();

    let clock = Clock::start(g);
    let cfg = a.quad.apply(QuadratureConfig::tensor(), g.seed)?;
    let r = gmm_order_stat(&family.profile(), n, &cfg).map_err(gmm_failure)?;
    let mut row = measure_row("gmm", &input, &r, g.seed, &clock)?;
    row.closed_form = Some(closed);
    row.pass = Some((r.value - closed).abs() <= a.tol);
    row.tolerance = Some(a.tol);
    rows.push(row);

    if a.direct {
        let clock = Clock::start(g);
        let cfg = a.quad.apply(QuadratureConfig::quasi_mc(1_000_000, g.seed), g.seed)?;
        let r = gmm_direct(&family.functions(n as usize), &cfg).map_err(gmm_failure)?;
        let tol = a.tol.max(3.0 * r.error_estimate);
        let mut row = measure_row("gmm", &input, &r, g.seed, &clock)?;
        row.closed_form = Some(closed);
        row.pass = Some((r.value - closed).abs() <= tol);
        row.tolerance = Some(tol);
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_n: u32,
}

pub fn limit(a: &LimitArgs, g: &Global) -> Result<Vec<Row>, Failure> {
    let profile = a.family.profile();
    let lsn = a.family.log_sup_norm();
    let cfg = QuadratureConfig::tensor().with_seed(g.seed);
    (1..=a.max_n)
        .map(|n| {
            let clock = Clock::start(g);
            let r = gmm_order_stat(&profile, n, &cfg).map_err(gmm_failure)?;
            let mut row = measure_row("limit", a.family.tag(), &r, g.seed, &clock)?;
            row.closed_form = Some(a.family.closed_form(n));
            row.n = Some(n);
            row.log_sup_norm = Some(lsn.is_finite().then_some(lsn));
            row.gap = Some(lsn.is_finite().then(|| lsn - r.value));
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Args)]
pub struct RelationsArgs {
    /// Residual tolerance (default: each record's).
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn relations(a: &RelationsArgs, g: &Global) -> Result<Vec<Row>, Failure> {
    registry()
        .iter()
        .filter(|r| r.kind == IdentityKind::PolylogRelation)
        .map(|rec| {
            let clock = Clock::start(g);
            let cfg = rec.default_config(VerifyMethod::ClosedOnly).with_seed(g.seed);
            let r = verify_one(&rec.id, VerifyMethod::ClosedOnly, &cfg, a.tol).map_err(identity_failure)?;
            Ok(report_row("relations", rec, &r, clock.ms()))
        })
        .collect()
}

#[derive(Debug, Args)]
pub struct SupnormArgs {
    pub polynomial: String,
}

pub fn supnorm(a: &SupnormArgs, g: &Global) -> Result<Vec<Row>, Failure> {
    let clock = Clock::start(g);
    let p = parse_poly(&a.polynomial)?;
    let (s, theta) = sup_norm(&p);
    let mut row = Row::new("supnorm", a.polynomial.clone(), "grid+ascent", finite(s, "sup norm")?, 0.0, g.seed);
    row.log_sup_norm = Some((s > 0.0).then(|| s.ln()));
    row.argmax = Some(theta);
    row.wall_ms = clock.ms();
    Ok(vec![row])
}

pub fn list(g: &Global) -> Result<Vec<Row>, Failure> {
    registry()
        .iter()
        .map(|rec| {
            let closed = rec.closed_value().map_err(identity_failure)?;
            let mut row = Row::new("list", rec.id.clone(), rec.default_method.tag(), closed, 0.0, g.seed);
            row.closed_form = Some(closed);
            row.kind = Some(serde_json::to_value(rec.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
            row.tolerance = Some(rec.tolerance);
            row.closed_expr = Some(rec.closed_form.to_string());
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functions_split_at_top_level_slash() {
        let f = parse_function("(1-x)/(1+x)").unwrap();
        assert_eq!(f.denominator(), &parse("1+x").unwrap());
        assert!(parse_function("1-x").unwrap().denominator().as_constant().is_some());
        assert!(matches!(parse_function("(1-x)/(0)"), Err(Failure::Usage(_))));
    }

    #[test]
    fn parse_errors_point_at_the_offset() {
        let Err(Failure::Usage(m)) = parse_poly("1+x+(") else { panic!() };
        assert!(m.ends_with("\n  1+x+(\n       ^"), "{m}");
    }
}
