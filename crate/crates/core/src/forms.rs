//! Goncharov's regulator forms pulled back to parametrised paths and patches.
//!
//! A coordinate is a [`Jet`]: its value and its derivatives along each patch
//! direction. From a jet come the 1-forms d log|x| = Re(dx/x) and
//! d i·arg x = i·Im(dx/x); the forms below are wedge products of these with
//! scalar coefficients log|x| and 𝓛̂ₙ(x). A [`Form`] on a `dim`-dimensional
//! parameter space stores one complex coefficient per subset of directions.
//!
//! - η_n(n)(x₁,…,xₙ) = Alt_n Σ_{p≥0} log|x₁| ∧_{j=2}^{2p+1} d log|x_j| ∧_{j=2p+2}^{n} d i arg x_j / ((2p+1)!(n−2p−1)!)
//! - η_n(l)(x; x₁,…,x_{l−1}) = 𝓛̂_{n−l+1}(x) Alt_{l−1} Σ_p ∧_{j≤2p} d log|x_j| ∧_{j>2p} d i arg x_j / ((2p+1)!(l−1−2p)!)
//!   + Σ_{k,p≥1} β_{k,p} 𝓛̂_{n−l+1−k,k}(x) ∧ Alt_{l−1} log|x₁| ∧_{j=2}^{p} d log|x_j| ∧_{j>p} d i arg x_j / ((p−1)!(l−1−p)!)
//!
//! with 𝓛̂_{p,q}(x) = 𝓛̂_p(x) log^{q−1}|x| d log|x| for p ≥ 2 and
//! 𝓛̂_{1,q}(x) = (log|x| d log|1−x| − log|1−x| d log|x|) log^{q−1}|x|.
//!
//! Only log|x| and the differentials of the coordinates enter, never arg x
//! itself, so paths may cross the negative real axis freely.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::par;
use crate::quad::rule15;
use crate::special::{bernoulli, bloch_wigner, lhat};

const MAX_DIM: usize = 4;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A differential form on a parameter space of dimension `dim` ≤ 4. The
/// coefficient of ds_{i₁}∧…∧ds_{i_k} (i₁ < … < i_k) sits at the bitmask of
/// {i₁,…,i_k}.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    dim: usize,
    coeffs: [Complex64; 1 << MAX_DIM],
}

impl Form {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "parameter dimension above {MAX_DIM}");
        Form { dim, coeffs: [Complex64::zero(); 1 << MAX_DIM] }
    }

    pub fn scalar(dim: usize, v: Complex64) -> Self {
        let mut f = Self::zero(dim);
        f.coeffs[0] = v;
        f
    }

    pub fn one_form(comps: &[Complex64]) -> Self {
        let mut f = Self::zero(comps.len());
        for (i, &v) in comps.iter().enumerate() {
            f.coeffs[1 << i] = v;
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient of the basis element with direction set `mask`.
    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs[mask]
    }

    /// Coefficient of ds₁∧…∧ds_dim.
    pub fn top(&self) -> Complex64 {
        self.coeffs[(1 << self.dim) - 1]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut f = self.clone();
        for v in f.coeffs.iter_mut() {
            *v *= k;
        }
        f
    }

    pub fn add(&self, o: &Form) -> Self {
        let mut f = self.clone();
        for (a, b) in f.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
        f
    }

    pub fn wedge(&self, o: &Form) -> Self {
        let mut f = Self::zero(self.dim);
        let n = 1 << self.dim;
        for a in 0..n {
            if self.coeffs[a] == Complex64::zero() {
                continue;
            }
            for b in 0..n {
                if a & b != 0 || o.coeffs[b] == Complex64::zero() {
                    continue;
                }
                // sign of merging the sorted index lists of a and b
                let mut inv = 0;
                for j in 0..self.dim {
                    if b >> j & 1 == 1 {
                        inv += (a >> (j + 1)).count_ones();
                    }
                }
                let s = if inv % 2 == 0 { 1.0 } else { -1.0 };
                f.coeffs[a | b] += self.coeffs[a] * o.coeffs[b] * s;
            }
        }
        f
    }

    pub fn max_abs_diff(&self, o: &Form) -> f64 {
        self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// A coordinate value with its derivatives along each parameter direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub derivs: Vec<Complex64>,
}

impl Jet {
    pub fn new(value: Complex64, derivs: Vec<Complex64>) -> Self {
        Jet { value, derivs }
    }

    pub fn constant(value: Complex64, dim: usize) -> Self {
        Jet { value, derivs: vec![Complex64::zero(); dim] }
    }

    pub fn one_minus(&self) -> Self {
        Jet { value: 1.0 - self.value, derivs: self.derivs.iter().map(|d| -d).collect() }
    }

    pub fn log_abs(&self) -> f64 {
        self.value.norm().ln()
    }

    /// d log|x| = Re(dx/x)
    pub fn dlog_abs(&self) -> Form {
        let c: Vec<Complex64> = self.derivs.iter().map(|d| Complex64::new((d / self.value).re, 0.0)).collect();
        Form::one_form(&c)
    }

    /// d i·arg x = i·Im(dx/x)
    pub fn di_arg(&self) -> Form {
        let c: Vec<Complex64> = self.derivs.iter().map(|d| Complex64::new(0.0, (d / self.value).im)).collect();
        Form::one_form(&c)
    }
}

fn factorial(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> BigRational {
    let mut r = BigRational::one();
    for i in 0..k {
        r = r * BigRational::from_integer((n - i).into()) / BigRational::from_integer((i + 1).into());
    }
    r
}

/// β_{k,p} = (−1)^p (p−1)!/(k+p+1)! · Σ_{j=0}^{⌊(p−1)/2⌋} C(k+p+1, 2j+1) 2^{k+p−2j} B_{k+p−2j}.
pub fn beta_kp(k: usize, p: usize) -> BigRational {
    assert!(p >= 1, "p must be at least 1");
    let mut s = BigRational::zero();
    for j in 0..=(p - 1) / 2 {
        let e = k + p - 2 * j;
        let pow2 = BigRational::from_integer(num_bigint::BigInt::one() << e);
        s += binomial(k + p + 1, 2 * j + 1) * pow2 * bernoulli(e);
    }
    let mut fp = num_bigint::BigInt::one();
    for i in 2..p {
        fp *= i;
    }
    let mut fk = num_bigint::BigInt::one();
    for i in 2..=k + p + 1 {
        fk *= i;
    }
    let r = s * BigRational::new(fp, fk);
    if p % 2 == 0 { r } else { -r }
}

/// Permutations of 0..m with their signs (Heap's algorithm order).
fn permutations(m: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(k: usize, a: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if k <= 1 {
            out.push((a.clone(), sign));
            return;
        }
        for i in 0..k {
            a.swap(i, k - 1);
            let s = if i == k - 1 { sign } else { -sign };
            rec(k - 1, a, s, out);
            a.swap(i, k - 1);
        }
    }
    let mut out = Vec::new();
    rec(m, &mut (0..m).collect(), 1.0, &mut out);
    out
}

/// Alt_m F = Σ_σ sgn(σ) F(x_σ(1), …, x_σ(m)).
fn alt(xs: &[Jet], dim: usize, f: impl Fn(&[&Jet]) -> Form) -> Form {
    let mut acc = Form::zero(dim);
    for (perm, sign) in permutations(xs.len()) {
        let ys: Vec<&Jet> = perm.iter().map(|&i| &xs[i]).collect();
        acc = acc.add(&f(&ys).scale(c(sign)));
    }
    acc
}

fn check(xs: &[Jet]) -> Result<usize, FormError> {
    let dim = xs.first().map(|x| x.derivs.len()).unwrap_or(0);
    if dim > MAX_DIM {
        return Err(FormError::Dimension(dim));
    }
    for (i, x) in xs.iter().enumerate() {
        if x.derivs.len() != dim {
            return Err(FormError::Dimension(x.derivs.len()));
        }
        if x.value.norm() == 0.0 {
            return Err(FormError::ZeroCoordinate(i));
        }
    }
    Ok(dim)
}

/// η_n(n)(x₁,…,xₙ) as an (n−1)-form.
pub fn eta_nn(xs: &[Jet]) -> Result<Form, FormError> {
    let n = xs.len();
    if n == 0 {
        return Err(FormError::Arity { expected: 1, got: 0 });
    }
    let dim = check(xs)?;
    Ok(alt(xs, dim, |y| {
        let mut acc = Form::zero(dim);
        for p in 0..=(n - 1) / 2 {
            let mut w = Form::scalar(dim, c(y[0].log_abs() / (factorial(2 * p + 1) * factorial(n - 2 * p - 1))));
            for j in 1..=2 * p {
                w = w.wedge(&y[j].dlog_abs());
            }
            for j in 2 * p + 1..n {
                w = w.wedge(&y[j].di_arg());
            }
            acc = acc.add(&w);
        }
        acc
    }))
}

/// 𝓛̂_{p,q}(x) as a 1-form.
fn lhat_pq(p: usize, q: usize, x: &Jet) -> Form {
    let lx = x.log_abs();
    let pw = lx.powi(q as i32 - 1);
    if p >= 2 {
        x.dlog_abs().scale(lhat(p, x.value) * pw)
    } else {
        let y = x.one_minus();
        let ly = y.log_abs();
        y.dlog_abs().scale(c(lx)).add(&x.dlog_abs().scale(c(-ly))).scale(c(pw))
    }
}

/// η_n(l)(x; x₁,…,x_{l−1}) as an (l−1)-form, 1 ≤ l < n.
pub fn eta_nl(n: usize, x: &Jet, xs: &[Jet]) -> Result<Form, FormError> {
    let l = xs.len() + 1;
    if l >= n || n < 2 {
        return Err(FormError::Order { n, l });
    }
    let mut all = vec![x.clone()];
    all.extend_from_slice(xs);
    let dim = check(&all)?;
    if (1.0 - x.value).norm() == 0.0 && n - l >= 1 {
        return Err(FormError::Singular("argument equals 1".into()));
    }
    let m = l - 1;
    let block1 = alt(xs, dim, |y| {
        let mut acc = Form::zero(dim);
        for p in 0..=m / 2 {
            let mut w = Form::scalar(dim, c(1.0 / (factorial(2 * p + 1) * factorial(m - 2 * p))));
            for j in 0..2 * p {
                w = w.wedge(&y[j].dlog_abs());
            }
            for j in 2 * p..m {
                w = w.wedge(&y[j].di_arg());
            }
            acc = acc.add(&w);
        }
        acc
    })
    .scale(lhat(n - l + 1, x.value));
    let mut block2 = Form::zero(dim);
    for k in 1..=n - l {
        let lpq = lhat_pq(n - l + 1 - k, k, x);
        for p in 1..=m {
            let b = num_traits::ToPrimitive::to_f64(&beta_kp(k, p)).unwrap();
            if b == 0.0 {
                continue;
            }
            let a = alt(xs, dim, |y| {
                let mut w = Form::scalar(dim, c(y[0].log_abs() / (factorial(p - 1) * factorial(m - p))));
                for j in 1..p {
                    w = w.wedge(&y[j].dlog_abs());
                }
                for j in p..m {
                    w = w.wedge(&y[j].di_arg());
                }
                w
            });
            block2 = block2.add(&lpq.wedge(&a).scale(c(b)));
        }
    }
    Ok(block1.add(&block2))
}

/// η₂(2)(x, y) = log|x| d i arg y − log|y| d i arg x.
pub fn eta2(x: &Jet, y: &Jet) -> Form {
    y.di_arg().scale(c(x.log_abs())).add(&x.di_arg().scale(c(-y.log_abs())))
}

/// η₃(3)(x, y, z) = Σ_cyclic log|x| ((1/3) d log|y| ∧ d log|z| + d i arg y ∧ d i arg z).
pub fn eta3(x: &Jet, y: &Jet, z: &Jet) -> Form {
    let term = |a: &Jet, b: &Jet, d: &Jet| {
        b.dlog_abs().wedge(&d.dlog_abs()).scale(c(1.0 / 3.0)).add(&b.di_arg().wedge(&d.di_arg())).scale(c(a.log_abs()))
    };
    term(x, y, z).add(&term(y, z, x)).add(&term(z, x, y))
}

/// ω(x, y) = η₃(2)(x, y) = i D(x) d i arg y − (1/3)(log|x| d log|1−x| − log|1−x| d log|x|) log|y|.
pub fn omega(x: &Jet, y: &Jet) -> Form {
    let one_minus = x.one_minus();
    let first = y.di_arg().scale(Complex64::new(0.0, bloch_wigner(x.value)));
    let second = one_minus
        .dlog_abs()
        .scale(c(x.log_abs()))
        .add(&x.dlog_abs().scale(c(-one_minus.log_abs())))
        .scale(c(-y.log_abs() / 3.0));
    first.add(&second)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormError {
    #[error("coordinate {0} vanishes")]
    ZeroCoordinate(usize),
    #[error("parameter dimension {0} is not supported")]
    Dimension(usize),
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("η_{n}({l}) requires 1 ≤ l < n")]
    Order { n: usize, l: usize },
    #[error("singularity: {0}")]
    Singular(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
}

/// Argument of a form, in terms of the path/patch coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arg {
    /// The i-th coordinate x_i.
    Coord(usize),
    /// 1 − x_i.
    OneMinus(usize),
    /// A constant.
    Const(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    EtaNN { n: usize },
    /// η_n(l); the first argument is x, the remaining l − 1 are x₁ … x_{l−1}.
    EtaNL { n: usize, l: usize },
    Eta2,
    Eta3,
    Omega,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormSpec {
    pub kind: FormKind,
    pub args: Vec<Arg>,
}

impl FormSpec {
    pub fn new(kind: FormKind, args: Vec<Arg>) -> Result<Self, FormError> {
        let expected = match kind {
            FormKind::EtaNN { n } => n,
            FormKind::EtaNL { l, .. } => l,
            FormKind::Eta2 | FormKind::Omega => 2,
            FormKind::Eta3 => 3,
        };
        if args.len() != expected {
            return Err(FormError::Arity { expected, got: args.len() });
        }
        Ok(FormSpec { kind, args })
    }

    /// Degree of the form.
    pub fn degree(&self) -> usize {
        match self.kind {
            FormKind::EtaNN { n } => n - 1,
            FormKind::EtaNL { l, .. } => l - 1,
            FormKind::Eta2 | FormKind::Omega => 1,
            FormKind::Eta3 => 2,
        }
    }

    /// Evaluate at a parameter point given the jets of the coordinates.
    pub fn eval(&self, coords: &[Jet]) -> Result<Form, FormError> {
        let dim = coords.first().map(|j| j.derivs.len()).unwrap_or(0);
        let jets: Vec<Jet> = self
            .args
            .iter()
            .map(|a| match *a {
                Arg::Coord(i) => coords.get(i).cloned().ok_or(FormError::Arity { expected: i + 1, got: coords.len() }),
                Arg::OneMinus(i) => {
                    coords.get(i).map(Jet::one_minus).ok_or(FormError::Arity { expected: i + 1, got: coords.len() })
                }
                Arg::Const(re, im) => Ok(Jet::constant(Complex64::new(re, im), dim)),
            })
            .collect::<Result<_, _>>()?;
        check(&jets)?;
        Ok(match self.kind {
            FormKind::EtaNN { .. } => eta_nn(&jets)?,
            FormKind::EtaNL { n, .. } => eta_nl(n, &jets[0], &jets[1..])?,
            FormKind::Eta2 => eta2(&jets[0], &jets[1]),
            FormKind::Eta3 => eta3(&jets[0], &jets[1], &jets[2]),
            FormKind::Omega => {
                if (1.0 - jets[0].value).norm() == 0.0 {
                    return Err(FormError::Singular("ω(x, ·) at x = 1".into()));
                }
                omega(&jets[0], &jets[1])
            }
        })
    }

    /// Smallest distance of any argument (and of 1 − x for polylog slots) to 0.
    fn proximity(&self, coords: &[Jet]) -> f64 {
        let mut d = f64::INFINITY;
        for (k, a) in self.args.iter().enumerate() {
            let v = match *a {
                Arg::Coord(i) => coords[i].value,
                Arg::OneMinus(i) => 1.0 - coords[i].value,
                Arg::Const(re, im) => Complex64::new(re, im),
            };
            d = d.min(v.norm());
            let polylog_slot = matches!(self.kind, FormKind::Omega | FormKind::EtaNL { .. }) && k == 0;
            if polylog_slot {
                d = d.min((1.0 - v).norm());
            }
        }
        d
    }
}

pub type PathFn = Arc<dyn Fn(f64) -> Vec<(Complex64, Complex64)> + Send + Sync>;
pub type PatchFn = Arc<dyn Fn(f64, f64) -> Vec<(Complex64, Complex64, Complex64)> + Send + Sync>;

/// t ↦ (x_i(t), x_i'(t)) on [t0, t1].
#[derive(Clone)]
pub struct PathSpec {
    pub coords: PathFn,
    pub t0: f64,
    pub t1: f64,
    /// Initial number of segments of the composite rule.
    pub steps: usize,
    pub singular_cutoff: f64,
}

impl PathSpec {
    pub fn new(coords: PathFn, t0: f64, t1: f64, steps: usize) -> Self {
        PathSpec { coords, t0, t1, steps: steps.max(1), singular_cutoff: 1e-12 }
    }

    /// The straight segment from a to b as the single coordinate x.
    pub fn segment(a: Complex64, b: Complex64) -> Self {
        Self::new(Arc::new(move |t| vec![(a + (b - a) * t, b - a)]), 0.0, 1.0, 4)
    }

    /// x = r·e^{iα}, α ∈ [α0, α1].
    pub fn arc(r: f64, a0: f64, a1: f64) -> Self {
        Self::new(
            Arc::new(move |a| {
                let x = Complex64::from_polar(r, a);
                vec![(x, Complex64::i() * x)]
            }),
            a0,
            a1,
            8,
        )
    }

    /// Check nonvanishing coordinates and derivatives against central
    /// differences (relative 1e−6) at 33 points.
    pub fn validate(&self) -> Result<(), FormError> {
        if !(self.t0.is_finite() && self.t1.is_finite()) {
            return Err(FormError::InvalidDomain("non-finite endpoints".into()));
        }
        let h = 1e-6 * (self.t1 - self.t0).abs().max(1e-300);
        for i in 0..=32 {
            let t = self.t0 + (self.t1 - self.t0) * i as f64 / 32.0;
            let v = (self.coords)(t);
            let (lo, hi) = ((self.coords)(t - h), (self.coords)(t + h));
            for (j, (x, dx)) in v.iter().enumerate() {
                if x.norm() < self.singular_cutoff {
                    return Err(FormError::ZeroCoordinate(j));
                }
                let fd = (hi[j].0 - lo[j].0) / (2.0 * h);
                if (fd - dx).norm() > 1e-6 * dx.norm().max(1.0) {
                    return Err(FormError::InvalidDomain(format!("derivative of coordinate {j} inconsistent at t = {t}")));
                }
            }
        }
        Ok(())
    }
}

/// (s, t) ↦ (x_i, ∂x_i/∂s, ∂x_i/∂t) on [s0, s1] × [t0, t1].
#[derive(Clone)]
pub struct PatchSpec {
    pub coords: PatchFn,
    pub s: (f64, f64),
    pub t: (f64, f64),
    /// Initial cells per side.
    pub grid: usize,
    pub singular_cutoff: f64,
}

impl PatchSpec {
    pub fn new(coords: PatchFn, s: (f64, f64), t: (f64, f64), grid: usize) -> Self {
        PatchSpec { coords, s, t, grid: grid.max(1), singular_cutoff: 1e-12 }
    }

    /// The boundary, counter-clockwise in (s, t), as four paths.
    pub fn boundary(&self) -> [PathSpec; 4] {
        let (s0, s1) = self.s;
        let (t0, t1) = self.t;
        let edge = |f: Arc<dyn Fn(f64) -> (f64, f64, f64, f64) + Send + Sync>| {
            let c = self.coords.clone();
            let g: PathFn = Arc::new(move |u| {
                let (s, t, ds, dt) = f(u);
                c(s, t).into_iter().map(|(x, xs, xt)| (x, xs * ds + xt * dt)).collect()
            });
            let mut p = PathSpec::new(g, 0.0, 1.0, self.grid);
            p.singular_cutoff = self.singular_cutoff;
            p
        };
        [
            edge(Arc::new(move |u| (s0 + (s1 - s0) * u, t0, s1 - s0, 0.0))),
            edge(Arc::new(move |u| (s1, t0 + (t1 - t0) * u, 0.0, t1 - t0))),
            edge(Arc::new(move |u| (s1 - (s1 - s0) * u, t1, s0 - s1, 0.0))),
            edge(Arc::new(move |u| (s0, t1 - (t1 - t0) * u, 0.0, t0 - t1))),
        ]
    }
}

/// A path or patch integral with the last refinement change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormIntegral {
    pub value: Complex64,
    pub delta: f64,
    pub segments: usize,
}

const REFINE_TOL: f64 = 1e-12;
const MAX_SEGMENTS: usize = 1 << 14;

fn path_pass(form: &FormSpec, path: &PathSpec, segs: usize) -> Result<Complex64, FormError> {
    let rule = rule15();
    let h = (path.t1 - path.t0) / segs as f64;
    let parts = par::map_indexed(segs, |k| -> Result<Complex64, FormError> {
        let a = path.t0 + h * k as f64;
        let mut s = Complex64::zero();
        for &(x, w, _) in &rule {
            let t = a + 0.5 * h * (x + 1.0);
            let jets: Vec<Jet> = (path.coords)(t).into_iter().map(|(v, d)| Jet::new(v, vec![d])).collect();
            if form.proximity(&jets) < path.singular_cutoff {
                return Err(FormError::Singular(format!("argument within cutoff at t = {t}")));
            }
            s += form.eval(&jets)?.coeff(1) * w;
        }
        Ok(s * 0.5 * h)
    });
    parts.into_iter().try_fold(Complex64::zero(), |acc, p| Ok(acc + p?))
}

/// ∫_γ form for a 1-form, composite 15-point rule on `steps` segments,
/// doubled until successive values differ by less than 1e−12 (or 2^14
/// segments).
pub fn path_integral(form: &FormSpec, path: &PathSpec) -> Result<FormIntegral, FormError> {
    if form.degree() != 1 {
        return Err(FormError::Arity { expected: 1, got: form.degree() });
    }
    path.validate()?;
    let mut segs = path.steps;
    let mut prev = path_pass(form, path, segs)?;
    loop {
        segs *= 2;
        let cur = path_pass(form, path, segs)?;
        let delta = (cur - prev).norm();
        if delta < REFINE_TOL * cur.norm().max(1.0) || segs >= MAX_SEGMENTS {
            return Ok(FormIntegral { value: cur, delta, segments: segs });
        }
        prev = cur;
    }
}

fn patch_pass(form: &FormSpec, patch: &PatchSpec, n: usize) -> Result<Complex64, FormError> {
    let rule = rule15();
    let (s0, s1) = patch.s;
    let (t0, t1) = patch.t;
    let (hs, ht) = ((s1 - s0) / n as f64, (t1 - t0) / n as f64);
    let parts = par::map_indexed(n * n, |k| -> Result<Complex64, FormError> {
        let (i, j) = (k / n, k % n);
        let mut acc = Complex64::zero();
        for &(x, wx, _) in &rule {
            let s = s0 + hs * (i as f64 + 0.5 * (x + 1.0));
            for &(y, wy, _) in &rule {
                let t = t0 + ht * (j as f64 + 0.5 * (y + 1.0));
                let jets: Vec<Jet> =
                    (patch.coords)(s, t).into_iter().map(|(v, ds, dt)| Jet::new(v, vec![ds, dt])).collect();
                if form.proximity(&jets) < patch.singular_cutoff {
                    return Err(FormError::Singular(format!("argument within cutoff at (s, t) = ({s}, {t})")));
                }
                acc += form.eval(&jets)?.coeff(0b11) * (wx * wy);
            }
        }
        Ok(acc * (0.25 * hs * ht))
    });
    parts.into_iter().try_fold(Complex64::zero(), |acc, p| Ok(acc + p?))
}

/// ∬ form over a patch for a 2-form, as the coefficient of ds∧dt.
pub fn patch_integral(form: &FormSpec, patch: &PatchSpec) -> Result<FormIntegral, FormError> {
    if form.degree() != 2 {
        return Err(FormError::Arity { expected: 2, got: form.degree() });
    }
    let mut n = patch.grid;
    let mut prev = patch_pass(form, patch, n)?;
    loop {
        n *= 2;
        let cur = patch_pass(form, patch, n)?;
        let delta = (cur - prev).norm();
        if delta < REFINE_TOL * cur.norm().max(1.0) || n * n >= MAX_SEGMENTS {
            return Ok(FormIntegral { value: cur, delta, segments: n * n });
        }
        prev = cur;
    }
}

/// Both sides of Stokes' theorem for η₃(3)(x, 1−x, y) = dω(x, y) where
/// coordinate 0 of the patch is x and coordinate 1 is y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesCheck {
    pub surface: Complex64,
    pub boundary: Complex64,
    pub residual: f64,
}

pub fn stokes_check(patch: &PatchSpec) -> Result<StokesCheck, FormError> {
    let eta = FormSpec::new(FormKind::Eta3, vec![Arg::Coord(0), Arg::OneMinus(0), Arg::Coord(1)])?;
    let om = FormSpec::new(FormKind::Omega, vec![Arg::Coord(0), Arg::Coord(1)])?;
    let surface = if patch.s.0 == patch.s.1 || patch.t.0 == patch.t.1 {
        Complex64::zero()
    } else {
        patch_integral(&eta, patch)?.value
    };
    let mut boundary = Complex64::zero();
    for edge in patch.boundary() {
        if edge.t0 == edge.t1 {
            continue;
        }
        boundary += path_integral(&om, &edge)?.value;
    }
    Ok(StokesCheck { surface, boundary, residual: (surface - boundary).norm() })
}

/// |∬ η₃(3)(x, 1−x, y) − ∮ ω(x, y)| over a patch.
pub fn stokes_residual(patch: &PatchSpec) -> Result<f64, FormError> {
    Ok(stokes_check(patch)?.residual)
}

/// ∫ ω(x, x) along x = e^{iα}, α ∈ [0, π]; equals 𝓛₃(−1) − 𝓛₃(1) = −(7/4)ζ(3).
pub fn omega_half_circle() -> Result<FormIntegral, FormError> {
    let om = FormSpec::new(FormKind::Omega, vec![Arg::Coord(0), Arg::Coord(0)])?;
    // the start point x = 1 is a polylog singularity, but the quadrature
    // nodes never reach it and log|x| = 0 kills the log|1−x| term
    let mut p = PathSpec::arc(1.0, 0.0, PI);
    p.singular_cutoff = 0.0;
    path_integral(&om, &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{zagier_l, Precision};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_jet(rng: &mut ChaCha8Rng, dim: usize) -> Jet {
        let mut z = || Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let v = z();
        Jet::new(v, (0..dim).map(|_| z()).collect())
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_kp(1, 1), BigRational::new((-1).into(), 3.into()));
        assert_eq!(beta_kp(2, 1), BigRational::zero());
        // (1,2): (+1)·1!/4!·C(4,1)·2³·B₃ = 0
        assert_eq!(beta_kp(1, 2), BigRational::zero());
        // (2,2): 1/5!·C(5,1)·2⁴·B₄ = (5·16·(−1/30))/120 = −1/45
        assert_eq!(beta_kp(2, 2), BigRational::new((-1).into(), 45.into()));
    }

    #[test]
    fn wedge_signs() {
        let a = Form::one_form(&[c(1.0), c(0.0)]);
        let b = Form::one_form(&[c(0.0), c(1.0)]);
        assert_eq!(a.wedge(&b).top(), c(1.0));
        assert_eq!(b.wedge(&a).top(), c(-1.0));
        assert_eq!(a.wedge(&a).top(), c(0.0));
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(3).iter().map(|p| p.1).sum::<f64>(), 0.0);
    }

    #[test]
    fn displays_match_definitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (x, y, z) = (rand_jet(&mut rng, 2), rand_jet(&mut rng, 2), rand_jet(&mut rng, 2));
            let a = eta_nn(&[x.clone(), y.clone()]).unwrap();
            assert!(a.max_abs_diff(&eta2(&x, &y)) < 1e-12);
            let a = eta_nn(&[x.clone(), y.clone(), z.clone()]).unwrap();
            assert!(a.max_abs_diff(&eta3(&x, &y, &z)) < 1e-12);
            let a = eta_nl(3, &x, &[y.clone()]).unwrap();
            assert!(a.max_abs_diff(&omega(&x, &y)) < 1e-12, "{a:?} {:?}", omega(&x, &y));
        }
    }

    #[test]
    fn eta_n1_is_lhat() {
        let p = Precision::default();
        let x = Jet::constant(Complex64::new(0.3, 0.7), 1);
        for n in 2..=5 {
            let f = eta_nl(n, &x, &[]).unwrap();
            let v = crate::special::zagier_lhat(n as i64, x.value, &p).unwrap();
            assert!((f.coeff(0) - v).norm() < 1e-15);
        }
    }

    #[test]
    fn alternating_and_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let js: Vec<Jet> = (0..4).map(|_| rand_jet(&mut rng, 3)).collect();
            let a = eta_nn(&js).unwrap();
            let mut sw = js.clone();
            sw.swap(1, 3);
            let b = eta_nn(&sw).unwrap();
            assert!(a.add(&b).max_abs_diff(&Form::zero(3)) < 1e-12);
            let rep = vec![js[0].clone(), js[0].clone(), js[2].clone()];
            assert!(eta_nn(&rep).unwrap().max_abs_diff(&Form::zero(3)) < 1e-12);
        }
    }

    #[test]
    fn beta_block_vanishes_on_the_circle() {
        let x = Jet::new(Complex64::cis(0.7), vec![Complex64::i() * Complex64::cis(0.7)]);
        let y = Jet::new(Complex64::new(0.4, 0.9), vec![Complex64::new(0.3, -0.2)]);
        let full = eta_nl(3, &x, &[y.clone()]).unwrap();
        let block1 = y.di_arg().scale(lhat(2, x.value));
        assert!(full.max_abs_diff(&block1) < 1e-15);
    }

    #[test]
    fn only_arg_terms_survive_on_the_torus() {
        let t = |a: f64| Jet::new(Complex64::cis(a), vec![Complex64::i() * Complex64::cis(a), c(0.0)]);
        let (x, y) = (t(0.4), t(1.9));
        let z = Jet::new(Complex64::new(2.0, 1.0), vec![c(0.5), Complex64::new(0.0, 1.0)]);
        let f = eta_nn(&[x.clone(), y.clone(), z.clone()]).unwrap();
        let expect = x.di_arg().wedge(&y.di_arg()).scale(c(z.log_abs()));
        assert!(f.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn eta2_integrates_to_bloch_wigner() {
        let f = FormSpec::new(FormKind::Eta2, vec![Arg::Coord(0), Arg::OneMinus(0)]).unwrap();
        let (a, b) = (Complex64::new(0.2, 0.5), Complex64::new(-1.5, 2.0));
        let r = path_integral(&f, &PathSpec::segment(a, b)).unwrap();
        let expect = Complex64::new(0.0, bloch_wigner(b) - bloch_wigner(a));
        assert!((r.value - expect).norm() < 1e-10, "{r:?} vs {expect}");
    }

    #[test]
    fn closed_loop_gives_zero() {
        let f = FormSpec::new(FormKind::Eta2, vec![Arg::Coord(0), Arg::OneMinus(0)]).unwrap();
        // circle of radius 2 around 0 encloses both 0 and 1
        let r = path_integral(&f, &PathSpec::arc(2.0, 0.0, 2.0 * PI)).unwrap();
        assert!(r.value.norm() < 1e-10, "{r:?}");
    }

    #[test]
    fn omega_on_half_circle() {
        let p = Precision::default();
        let r = omega_half_circle().unwrap();
        let expect = zagier_l(3, c(-1.0), &p).unwrap() - zagier_l(3, c(1.0), &p).unwrap();
        assert!((r.value - c(expect)).norm() < 1e-9, "{r:?} vs {expect}");
    }

    #[test]
    fn stokes_on_small_patch() {
        let patch = PatchSpec::new(
            Arc::new(|s, t| {
                let x = Complex64::new(0.3 + 0.05 * s, 0.1);
                let y = Complex64::cis(t);
                vec![(x, c(0.05), c(0.0)), (y, c(0.0), Complex64::i() * y)]
            }),
            (0.0, 1.0),
            (0.0, 1.0),
            2,
        );
        let r = stokes_check(&patch).unwrap();
        assert!(r.residual < 1e-9, "{r:?}");
        let flat = PatchSpec { s: (0.5, 0.5), ..patch };
        let r = stokes_check(&flat).unwrap();
        assert!(r.surface == Complex64::zero() && r.boundary.norm() < 1e-12);
    }

    #[test]
    fn path_validation() {
        let bad = PathSpec::new(Arc::new(|t| vec![(Complex64::new(1.0 + t, 0.0), c(3.0))]), 0.0, 1.0, 2);
        assert!(matches!(bad.validate(), Err(FormError::InvalidDomain(_))));
        let zero = PathSpec::segment(c(-1.0), c(1.0));
        assert!(matches!(zero.validate(), Err(FormError::ZeroCoordinate(0))));
    }
}
