use num_complex::Complex64;

use super::{CompiledPoly, LaurentError, LaurentPolynomial};

/// A quotient of two Laurent polynomials, kept unreduced.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    numerator: LaurentPolynomial,
    denominator: LaurentPolynomial,
}

impl RationalFunction {
    pub fn new(numerator: LaurentPolynomial, denominator: LaurentPolynomial) -> Result<Self, LaurentError> {
        if denominator.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        Ok(RationalFunction { numerator, denominator })
    }

    pub fn numerator(&self) -> &LaurentPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &LaurentPolynomial {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Used variables of numerator then denominator, in order of appearance.
    pub fn vars(&self) -> Vec<String> {
        let mut v = self.numerator.used_vars();
        for w in self.denominator.used_vars() {
            if !v.contains(&w) {
                v.push(w);
            }
        }
        v
    }

    /// Evaluate with coordinates ordered as [`vars`](Self::vars).
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64, LaurentError> {
        let vars = self.vars();
        let n = self.numerator.with_vars(&vars)?.evaluate(point)?;
        let d = self.denominator.with_vars(&vars)?.evaluate(point)?;
        Ok(n / d)
    }

    /// Numerator and denominator compiled over a common variable list.
    pub fn compile(&self, vars: &[String]) -> Result<(CompiledPoly, CompiledPoly), LaurentError> {
        Ok((self.numerator.with_vars(vars)?.compile(), self.denominator.with_vars(vars)?.compile()))
    }

    /// R(x₁⁻¹, …, xₙ⁻¹).
    pub fn inverted(&self) -> Self {
        RationalFunction { numerator: self.numerator.inverted(), denominator: self.denominator.inverted() }
    }
}

impl From<LaurentPolynomial> for RationalFunction {
    fn from(p: LaurentPolynomial) -> Self {
        RationalFunction { numerator: p, denominator: LaurentPolynomial::from_int(1) }
    }
}
