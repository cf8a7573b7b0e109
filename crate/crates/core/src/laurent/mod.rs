//! Sparse multivariate Laurent polynomials with exact Gaussian-rational coefficients.

mod parse;
mod rational;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use parse::{parse, ParseError, ParseErrorKind};
pub use rational::RationalFunction;

/// Exact coefficient: a Gaussian rational `re + i·im`.
pub type Coeff = Complex<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaurentError {
    #[error("variable `{0}` does not occur in the polynomial")]
    VarAbsent(String),
    #[error("variable `{0}` occurs with a negative exponent; shift by a monomial first")]
    NegativeExponent(String),
    #[error("only monomials can be raised to a negative power")]
    NonMonomialInverse,
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {0} is zero but carries a negative exponent")]
    ZeroCoordinate(usize),
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("coefficients are not all real")]
    NonRealCoefficients,
}

pub(crate) fn coeff_from_int(n: i64) -> Coeff {
    Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
}

pub(crate) fn coeff_to_c64(c: &Coeff) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

fn coeff_is_zero(c: &Coeff) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

/// A Laurent polynomial in named variables.
///
/// Variables keep their order of first appearance; equality is semantic
/// (independent of variable order and of variables that do not occur).
#[derive(Debug, Clone)]
pub struct LaurentPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i32>, Coeff>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        LaurentPolynomial { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff_is_zero(&c) {
            terms.insert(Vec::new(), c);
        }
        LaurentPolynomial { vars: Vec::new(), terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(coeff_from_int(n))
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Coeff::one());
        LaurentPolynomial { vars: vec![name.to_string()], terms }
    }

    /// Build from explicit terms; zero coefficients are dropped and equal
    /// exponent vectors are summed.
    pub fn from_terms<I>(vars: Vec<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, Coeff)>,
    {
        let n = vars.len();
        let mut out = LaurentPolynomial { vars, terms: BTreeMap::new() };
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent vector length must match the variable count");
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: Vec<i32>, c: Coeff) {
        if coeff_is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.clone() + c;
                if coeff_is_zero(v) {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value if the polynomial has no non-trivial monomial.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Variables that occur with a nonzero exponent somewhere, in order.
    pub fn used_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|e| e[i] != 0))
            .map(|i| self.vars[i].clone())
            .collect()
    }

    /// Drop variables that do not occur.
    pub fn trimmed(&self) -> Self {
        let used = self.used_vars();
        self.with_vars(&used).expect("used variables are a valid target")
    }

    /// Re-express over `vars`, which must contain every used variable.
    pub fn with_vars(&self, vars: &[String]) -> Result<Self, LaurentError> {
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match vars.iter().position(|w| w == v) {
                Some(j) => map.push(Some(j)),
                None => {
                    if self.terms.keys().any(|e| e[i] != 0) {
                        return Err(LaurentError::VarAbsent(v.clone()));
                    }
                    map.push(None);
                }
            }
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut f = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    f[j] = k;
                }
            }
            (f, c.clone())
        });
        Ok(Self::from_terms(vars.to_vec(), terms))
    }

    fn merged_vars(&self, other: &Self) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    /// Coefficient of the monomial given as `(variable, exponent)` pairs.
    pub fn coeff(&self, monomial: &[(&str, i32)]) -> Coeff {
        let mut e = vec![0; self.vars.len()];
        for &(v, k) in monomial {
            match self.var_index(v) {
                Some(i) => e[i] += k,
                None if k == 0 => {}
                None => return Coeff::zero(),
            }
        }
        self.terms.get(&e).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let terms = self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone()));
        Self::from_terms(self.vars.clone(), terms)
    }

    pub fn pow(&self, k: i32) -> Result<Self, LaurentError> {
        if k < 0 {
            if self.terms.len() != 1 {
                return Err(LaurentError::NonMonomialInverse);
            }
            let (e, c) = self.terms.iter().next().unwrap();
            let inv = Coeff::one() / c.clone();
            let mono = Self::from_terms(
                self.vars.clone(),
                [(e.iter().map(|&x| -x).collect(), inv)],
            );
            return mono.pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Self::from_int(1);
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// P(x₁⁻¹, …, xₙ⁻¹).
    pub fn inverted(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.iter().map(|&x| -x).collect(), c.clone()));
        Self::from_terms(self.vars.clone(), terms)
    }

    /// Complex-conjugate coefficients.
    pub fn conj_coeffs(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.conj()));
        Self::from_terms(self.vars.clone(), terms)
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    /// Minimum exponent of each variable (zero for the zero polynomial).
    pub fn gcd_monomial(&self) -> Vec<i32> {
        let mut m: Option<Vec<i32>> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(mut m) => {
                    for (a, &b) in m.iter_mut().zip(e) {
                        *a = (*a).min(b);
                    }
                    m
                }
            });
        }
        m.unwrap_or_else(|| vec![0; self.vars.len()])
    }

    /// Divide by the gcd monomial; returns the result and the exponents removed.
    pub fn monomial_normalized(&self) -> (Self, Vec<i32>) {
        let g = self.gcd_monomial();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(&g).map(|(a, b)| a - b).collect(), c.clone()));
        (Self::from_terms(self.vars.clone(), terms), g)
    }

    /// Monomial-normalized, trimmed, with coprime rational content removed and
    /// the last term in graded order made positive. Unit-free canonical form.
    pub fn primitive(&self) -> Self {
        let (p, _) = self.monomial_normalized();
        let p = p.trimmed();
        if p.is_zero() {
            return p;
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in p.terms.values() {
            for r in [&c.re, &c.im] {
                if !r.is_zero() {
                    num_gcd = num_gcd.gcd(r.numer());
                    den_lcm = den_lcm.lcm(r.denom());
                }
            }
        }
        let mut s = BigRational::new(den_lcm, num_gcd);
        let lead = p.sorted_terms().last().map(|(_, c)| (*c).clone()).unwrap();
        let lead_neg = if lead.re.is_zero() { lead.im.is_negative() } else { lead.re.is_negative() };
        if lead_neg {
            s = -s;
        }
        p.scale(&Complex::new(s, BigRational::zero()))
    }

    /// Smallest and largest exponent of `var`.
    pub fn degree_range(&self, var: &str) -> Option<(i32, i32)> {
        let i = self.var_index(var)?;
        let mut it = self.terms.keys().map(|e| e[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), k| (lo.min(k), hi.max(k))))
    }

    /// Coefficients `[a_0, …, a_d]` in the other variables, with
    /// `p = Σ a_k · var^k` and `a_d ≠ 0`.
    pub fn as_poly_in(&self, var: &str) -> Result<Vec<LaurentPolynomial>, LaurentError> {
        let i = self
            .var_index(var)
            .filter(|&i| self.terms.keys().any(|e| e[i] != 0))
            .ok_or_else(|| LaurentError::VarAbsent(var.to_string()))?;
        if self.terms.keys().any(|e| e[i] < 0) {
            return Err(LaurentError::NegativeExponent(var.to_string()));
        }
        let rest: Vec<String> =
            self.vars.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()).collect();
        let d = self.terms.keys().map(|e| e[i]).max().unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(Vec<i32>, Coeff)>> = vec![Vec::new(); d + 1];
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f.remove(i) as usize;
            buckets[k].push((f, c.clone()));
        }
        Ok(buckets.into_iter().map(|b| Self::from_terms(rest.clone(), b)).collect())
    }

    /// Inverse of [`as_poly_in`](Self::as_poly_in).
    pub fn from_poly_in(coeffs: &[LaurentPolynomial], var: &str) -> Self {
        let x = Self::var(var);
        let mut acc = Self::zero();
        let mut pw = Self::from_int(1);
        for a in coeffs {
            acc = &acc + &(a * &pw);
            pw = &pw * &x;
        }
        acc
    }

    /// Term-by-term evaluation at a point with one coordinate per variable.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64, LaurentError> {
        if point.len() != self.vars.len() {
            return Err(LaurentError::DimensionMismatch { expected: self.vars.len(), got: point.len() });
        }
        for (i, z) in point.iter().enumerate() {
            if *z == Complex64::zero() && self.terms.keys().any(|e| e[i] < 0) {
                return Err(LaurentError::ZeroCoordinate(i));
            }
        }
        Ok(self.compile().eval(point))
    }

    /// Floating-point evaluator with precomputed coefficients.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.vars.len(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), coeff_to_c64(c))).collect(),
        }
    }

    fn canonical(&self) -> BTreeMap<Vec<(&str, i32)>, &Coeff> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut k: Vec<(&str, i32)> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(i, &x)| (self.vars[i].as_str(), x))
                    .collect();
                k.sort();
                (k, c)
            })
            .collect()
    }

    /// Terms in print order: total degree, then earlier variables first.
    fn sorted_terms(&self) -> Vec<(&Vec<i32>, &Coeff)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|(a, _), (b, _)| {
            let da: i64 = a.iter().map(|&x| x as i64).sum();
            let db: i64 = b.iter().map(|&x| x as i64).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        t
    }
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for LaurentPolynomial {}

impl From<i64> for LaurentPolynomial {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

fn binop(a: &LaurentPolynomial, b: &LaurentPolynomial, sign: i64) -> LaurentPolynomial {
    let vars = a.merged_vars(b);
    let a = a.with_vars(&vars).unwrap();
    let b = b.with_vars(&vars).unwrap();
    let s = coeff_from_int(sign);
    let terms = a.terms.into_iter().chain(b.terms.into_iter().map(|(e, c)| (e, c * s.clone())));
    LaurentPolynomial::from_terms(vars, terms)
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        binop(self, rhs, 1)
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        binop(self, rhs, -1)
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        let vars = self.merged_vars(rhs);
        let a = self.with_vars(&vars).unwrap();
        let b = rhs.with_vars(&vars).unwrap();
        let mut out = LaurentPolynomial { vars, terms: BTreeMap::new() };
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(&coeff_from_int(-1))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $f(self, rhs: Self) -> LaurentPolynomial { (&self).$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Coefficient magnitude text (no leading sign) and whether it is negative.
fn fmt_coeff(c: &Coeff) -> (String, bool) {
    if c.im.is_zero() {
        (fmt_rational(&c.re.abs()), c.re.is_negative())
    } else if c.re.is_zero() {
        let m = c.im.abs();
        let s = if m.is_one() { "I".to_string() } else { format!("{}*I", fmt_rational(&m)) };
        (s, c.im.is_negative())
    } else {
        let im = if c.im.abs().is_one() { "I".to_string() } else { format!("{}*I", fmt_rational(&c.im.abs())) };
        let op = if c.im.is_negative() { '-' } else { '+' };
        (format!("({}{}{})", fmt_rational(&c.re), op, im), false)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| if x == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], x) })
                .collect();
            let (mag, neg) = fmt_coeff(c);
            let body = match (mono.is_empty(), mag.as_str()) {
                (true, _) => mag,
                (false, "1") => mono.join("*"),
                (false, _) => format!("{}*{}", mag, mono.join("*")),
            };
            match (k, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Floating-point form of a [`LaurentPolynomial`] for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(Vec<i32>, Complex64)>,
}

impl CompiledPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut s = Complex64::zero();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                if k != 0 {
                    t *= xi.powi(k);
                }
            }
            s += t;
        }
        s
    }

    /// Evaluate at `x_j = e^{2πiθ_j}`; monomials are formed from the reduced phase
    /// Σ e_j θ_j mod 1, so the result is exactly periodic in each θ_j.
    pub fn eval_torus(&self, theta: &[f64]) -> Complex64 {
        let mut s = Complex64::zero();
        for (e, c) in &self.terms {
            let mut ph = 0.0;
            for (&t, &k) in theta.iter().zip(e) {
                if k != 0 {
                    let p = k as f64 * t;
                    ph += p - p.round();
                }
            }
            ph -= ph.round();
            s += c * Complex64::cis(std::f64::consts::TAU * ph);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPolynomial {
        parse(s).unwrap()
    }

    #[test]
    fn equality_ignores_order_and_unused_vars() {
        assert_eq!(p("x+y"), p("y+x"));
        assert_eq!(p("x-x+y"), p("y"));
        assert_ne!(p("x+y"), p("x+2*y"));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&p("1+x") * &p("1-x"), p("1-x^2"));
        assert_eq!(p("x^-1").pow(-2).unwrap(), p("x^2"));
        assert_eq!(p("2*x").pow(-1).unwrap(), p("1/2*x^-1"));
        assert!(p("1+x").pow(-1).is_err());
    }

    #[test]
    fn as_poly_in_examples() {
        let c = p("1+x+y+z").as_poly_in("z").unwrap();
        assert_eq!(c, vec![p("1+x+y"), p("1")]);
        let c = p("(1-x)*(1-y)+(1+x)*(1+y)*z").as_poly_in("z").unwrap();
        assert_eq!(c, vec![p("(1-x)*(1-y)"), p("(1+x)*(1+y)")]);
        assert_eq!(p("1+x").as_poly_in("z"), Err(LaurentError::VarAbsent("z".into())));
        assert_eq!(p("1+x^-1").as_poly_in("x"), Err(LaurentError::NegativeExponent("x".into())));
    }

    #[test]
    fn evaluate_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(p("1+x+y+z").evaluate(&[one, one, one]).unwrap(), Complex64::new(4.0, 0.0));
        assert_eq!(p("x^-1").evaluate(&[Complex64::new(2.0, 0.0)]).unwrap(), Complex64::new(0.5, 0.0));
        let w = Complex64::cis(std::f64::consts::TAU / 3.0);
        assert!(p("1+x+y").evaluate(&[w, w.conj()]).unwrap().norm() < 1e-15);
        assert!(matches!(
            p("x^-1").evaluate(&[Complex64::zero()]),
            Err(LaurentError::ZeroCoordinate(0))
        ));
    }

    #[test]
    fn torus_eval_matches_generic() {
        let q = p("1+x+2*y^-1-3/2*x^3*y");
        let c = q.compile();
        let th = [0.123, -0.77];
        let pt: Vec<Complex64> = th.iter().map(|t| Complex64::cis(std::f64::consts::TAU * t)).collect();
        assert!((c.eval_torus(&th) - c.eval(&pt)).norm() < 1e-14);
    }

    #[test]
    fn primitive_form() {
        assert_eq!(p("-2*x^2*y+4*x^3*y").primitive(), p("-1+2*x"));
        assert_eq!(p("3/2-3/4*x").primitive(), p("-2+x"));
    }

    #[test]
    fn display() {
        assert_eq!(p("3/2*x*y^-1").to_string(), "3/2*x*y^-1");
        assert_eq!(p("1+x+y+z").to_string(), "1 + x + y + z");
        assert_eq!(p("-x+2").to_string(), "2 - x");
        assert_eq!(p("0").to_string(), "0");
    }
}
