//! Binary fixed-point arithmetic on `BigInt` for sums with heavy cancellation.
//!
//! A value `v` represents `v / 2^bits`. The working precision is rounded up to
//! a multiple of 256 bits and constants are cached per precision, so a result
//! never depends on which precisions were requested earlier.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GUARD: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hp {
    bits: u64,
}

type Cache = Mutex<HashMap<(u64, &'static str, u64), BigInt>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(bits: u64, name: &'static str, arg: u64, f: impl FnOnce() -> BigInt) -> BigInt {
    if let Some(v) = cache().lock().unwrap().get(&(bits, name, arg)) {
        return v.clone();
    }
    let v = f();
    cache().lock().unwrap().entry((bits, name, arg)).or_insert(v).clone()
}

impl Hp {
    /// Context with at least `min_bits` fractional bits.
    pub fn new(min_bits: u64) -> Self {
        let b = (min_bits + GUARD).div_ceil(256) * 256;
        Hp { bits: b }
    }

    /// Precision adequate for sums of size n!·(small) that cancel down to O(1):
    /// log2(n!) + 96 bits.
    pub fn for_factorial(n: u64) -> Self {
        let lg: f64 = (2..=n.max(1)).map(|k| (k as f64).log2()).sum();
        Hp::new(lg.ceil() as u64 + 96)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn from_int(&self, n: i64) -> BigInt {
        BigInt::from(n) << self.bits
    }

    pub fn from_rational(&self, r: &BigRational) -> BigInt {
        (r.numer() << self.bits) / r.denom()
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    pub fn powi(&self, a: &BigInt, k: u32) -> BigInt {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn to_f64(&self, a: &BigInt) -> f64 {
        BigRational::new(a.clone(), BigInt::one() << self.bits).to_f64().unwrap_or(f64::NAN)
    }

    /// Σ_{j≥0} (−1)^j / ((2j+1) k^{2j+1}) = atan(1/k).
    fn atan_inv(&self, k: u64) -> BigInt {
        let k = BigInt::from(k);
        let k2 = &k * &k;
        let mut p = self.one() / &k;
        let mut s = BigInt::zero();
        let mut j = 0u64;
        while !p.is_zero() {
            let t = &p / (2 * j + 1);
            if j % 2 == 0 { s += t } else { s -= t }
            p /= &k2;
            j += 1;
        }
        s
    }

    pub fn pi(&self) -> BigInt {
        cached(self.bits, "pi", 0, || 16 * self.atan_inv(5) - 4 * self.atan_inv(239))
    }

    /// 2·atanh(t) for fixed-point |t| ≤ 1/3.
    fn atanh2(&self, t: &BigInt) -> BigInt {
        let t2 = self.mul(t, t);
        let mut p = t.clone();
        let mut s = BigInt::zero();
        let mut j = 0u64;
        while !p.is_zero() {
            s += &p / (2 * j + 1);
            p = self.mul(&p, &t2);
            j += 1;
        }
        2 * s
    }

    pub fn ln2(&self) -> BigInt {
        cached(self.bits, "ln2", 0, || self.atanh2(&(self.one() / 3)))
    }

    /// Natural log of a positive fixed-point value.
    pub fn ln(&self, x: &BigInt) -> BigInt {
        assert!(x.is_positive(), "log of a non-positive value");
        // x = 2^k · y with y ∈ [1, 2)
        let k = x.bits() as i64 - 1 - self.bits as i64;
        let y = if k >= 0 { x >> k as u64 } else { x << (-k) as u64 };
        let one = self.one();
        let t = self.div(&(&y - &one), &(&y + &one));
        self.atanh2(&t) + self.ln2() * BigInt::from(k)
    }

    pub fn sqrt(&self, x: &BigInt) -> BigInt {
        (x << self.bits).sqrt()
    }

    /// ζ(s), s ≥ 2, by Borwein's η-series with exact integer weights.
    pub fn zeta(&self, s: u32) -> BigInt {
        assert!(s >= 2);
        cached(self.bits, "zeta", s as u64, || {
            let n = ((self.bits + 16) as f64 * std::f64::consts::LN_2 / (3.0 + 8f64.sqrt()).ln()).ceil() as u64 + 2;
            // d_k = n Σ_{i≤k} (n+i−1)! 4^i / ((n−i)! (2i)!)
            let mut d = Vec::with_capacity(n as usize + 1);
            let mut t = BigInt::one();
            let mut acc = BigInt::zero();
            for i in 0..=n {
                acc += &t;
                d.push(acc.clone());
                if i < n {
                    t = t * BigInt::from(4 * (n + i) * (n - i)) / BigInt::from((2 * i + 1) * (2 * i + 2));
                }
            }
            let dn = d[n as usize].clone();
            let mut sum = BigInt::zero();
            for k in 0..n {
                let num = (&d[k as usize] - &dn) << self.bits;
                let term = num / BigInt::from(k + 1).pow(s);
                if k % 2 == 0 { sum += term } else { sum -= term }
            }
            let eta = -(sum / &dn);
            // ζ = η · 2^{s−1} / (2^{s−1} − 1)
            let p = BigInt::one() << (s - 1);
            (eta * &p) / (p - 1)
        })
    }

    /// Li_n(x) = Σ x^k / k^n for a real fixed-point |x| < 1.
    pub fn li_real(&self, n: u32, x: &BigInt) -> BigInt {
        let mut p = x.clone();
        let mut s = BigInt::zero();
        let mut k = 1u64;
        while !p.is_zero() {
            s += &p / BigInt::from(k).pow(n);
            p = self.mul(&p, x);
            k += 1;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let h = Hp::new(200);
        assert_eq!(h.to_f64(&h.pi()), std::f64::consts::PI);
        assert_eq!(h.to_f64(&h.ln2()), std::f64::consts::LN_2);
        assert_eq!(h.to_f64(&h.sqrt(&h.from_int(5))), 5f64.sqrt());
        assert_eq!(h.to_f64(&h.ln(&h.from_int(10))), 10f64.ln());
        // ln(1/7) = −1.9459101490553133051…
        assert_eq!(h.to_f64(&h.ln(&(h.one() / 7))), -7f64.ln());
    }

    #[test]
    fn zeta_against_exact_even_values() {
        // ζ(2) = π²/6 and ζ(4) = π⁴/90 checked to the full working precision.
        let h = Hp::new(512);
        let pi = h.pi();
        let pi2 = h.mul(&pi, &pi);
        let z2: BigInt = &pi2 / 6;
        assert!((h.zeta(2) - z2).abs() < BigInt::from(1u64 << 20));
        let z4: BigInt = h.mul(&pi2, &pi2) / 90;
        assert!((h.zeta(4) - z4).abs() < BigInt::from(1u64 << 20));
        assert_eq!(h.to_f64(&h.zeta(3)), 1.2020569031595942854);
    }

    #[test]
    fn polylog_series() {
        let h = Hp::new(256);
        let half = h.one() / 2;
        // Li₁(1/2) = log 2, Li₂(1/2) = π²/12 − log²2/2
        assert!((h.li_real(1, &half) - h.ln2()).abs() < BigInt::from(1u64 << 16));
        let l2 = h.ln2();
        let expect: BigInt = h.mul(&h.pi(), &h.pi()) / 12 - h.mul(&l2, &l2) / 2;
        assert!((h.li_real(2, &half) - expect).abs() < BigInt::from(1u64 << 16));
    }

    #[test]
    fn precision_is_bucketed() {
        assert_eq!(Hp::new(10).bits(), 256);
        assert_eq!(Hp::new(193).bits(), 512);
        assert!(Hp::for_factorial(81).bits() >= 400);
    }
}
