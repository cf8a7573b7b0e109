use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

// Grows monotonically; every entry is a pure function of its index, so the
// order in which callers extend it cannot change any value.
static TABLE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// Exact Bernoulli number Bⱼ with B₁ = −1/2.
pub fn bernoulli(j: usize) -> BigRational {
    if j >= 3 && j % 2 == 1 {
        return BigRational::zero();
    }
    let mut t = TABLE
        .get_or_init(|| Mutex::new(vec![BigRational::from_integer(1.into())]))
        .lock()
        .unwrap();
    while t.len() <= j {
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0
        let m = t.len();
        let mut s = BigRational::zero();
        for (k, b) in t.iter().enumerate() {
            if !b.is_zero() {
                s += b * BigRational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(k)));
            }
        }
        t.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    t[j].clone()
}

pub fn bernoulli_f64(j: usize) -> f64 {
    bernoulli(j).to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn table_values() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(12), q(-691, 2730));
        assert_eq!(bernoulli(3), q(0, 1));
        assert_eq!(bernoulli(31), q(0, 1));
        assert_eq!(bernoulli(20), q(-174611, 330));
    }
}
