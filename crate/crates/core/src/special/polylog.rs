use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::{bernoulli_f64, zeta_f64, Precision, SpecialError};

/// A polylogarithm value; `on_cut` marks real z > 1, where the value is the
/// boundary value from the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polylog {
    pub value: Complex64,
    pub on_cut: bool,
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re > 1.0
}

/// log(w) where w is a negative real quantity approached from below the
/// real axis when `lower` is set (i.e. argument −π instead of π).
fn ln_branch(w: Complex64, lower: bool) -> Complex64 {
    if lower && w.im == 0.0 && w.re < 0.0 {
        Complex64::new((-w.re).ln(), -PI)
    } else {
        w.ln()
    }
}

fn series(n: usize, z: Complex64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    let mut p = z;
    for k in 1..10_000 {
        let t = p / (k as f64).powi(n as i32);
        s += t;
        if t.norm() <= 1e-17 * s.norm().max(1e-300) {
            break;
        }
        p *= z;
    }
    s
}

// ζ(−m) = (−1)^m B_{m+1}/(m+1), m = 0, 1, …
fn zeta_negative() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        (0..=160usize)
            .map(|m| {
                let b = bernoulli_f64(m + 1) / (m + 1) as f64;
                if m % 2 == 0 { b } else { -b }
            })
            .collect()
    })
}

fn zeta_any(k: i64) -> f64 {
    if k >= 2 {
        zeta_f64(k as usize)
    } else {
        zeta_negative()[(-k) as usize]
    }
}

/// Log-series Liₙ(z) = Σ_{k≠n−1} ζ(n−k) μ^k/k! + μ^{n−1}/(n−1)!·(H_{n−1} − log(−μ)),
/// μ = log z, valid for |μ| < 2π.
fn log_series(n: usize, z: Complex64) -> Complex64 {
    let mu = z.ln();
    if mu.norm() == 0.0 {
        return Complex64::new(zeta_f64(n), 0.0);
    }
    let harmonic: f64 = (1..n).map(|k| 1.0 / k as f64).sum();
    let mut s = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0); // μ^k / k!
    let kmax = n + 150;
    for k in 0..kmax {
        if k > 0 {
            p *= mu / k as f64;
        }
        if k + 1 == n {
            s += p * (harmonic - ln_branch(-mu, on_cut(z)));
            continue;
        }
        let t = p * zeta_any(n as i64 - k as i64);
        s += t;
        if k >= n && t.norm() != 0.0 && t.norm() < 1e-18 * s.norm().max(1e-300) {
            break;
        }
    }
    s
}

/// Liₙ(z) for |z| ≥ 2 through Liₙ(z) + (−1)ⁿLiₙ(1/z) = −Lⁿ/n! + 2Σ_k L^{n−2k}/(n−2k)!·Li_{2k}(−1),
/// L = log(−z).
fn inversion(n: usize, z: Complex64) -> Complex64 {
    let l = ln_branch(-z, on_cut(z));
    let inv = series(n, 1.0 / z);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut pw = vec![Complex64::new(1.0, 0.0); n + 1]; // L^j / j!
    for j in 1..=n {
        pw[j] = pw[j - 1] * l / j as f64;
    }
    let mut s = -pw[n];
    for k in 1..=n / 2 {
        let li_minus_one = -(1.0 - 2f64.powi(1 - 2 * k as i32)) * zeta_f64(2 * k);
        s += pw[n - 2 * k] * (2.0 * li_minus_one);
    }
    s - sign * inv
}

/// Liₙ(z) with the upper boundary value on the cut. Callers guarantee n ≥ 1
/// and (n, z) ≠ (1, 1).
pub(crate) fn li_upper(n: usize, z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if n == 1 {
        return -ln_branch(1.0 - z, on_cut(z));
    }
    let r = z.norm();
    if r <= 0.5 {
        series(n, z)
    } else if r < 2.0 {
        log_series(n, z)
    } else {
        inversion(n, z)
    }
}

/// Classical polylogarithm Liₙ(z), principal branch with cut [1, ∞).
pub fn li(n: i64, z: Complex64, prec: &Precision) -> Result<Polylog, SpecialError> {
    if n < 1 {
        return Err(SpecialError::Domain(format!("Li_{n} requires n >= 1")));
    }
    if n == 1 && z == Complex64::new(1.0, 0.0) {
        return Err(SpecialError::Domain("Li_1 has a pole at z = 1".into()));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecialError::Domain("non-finite argument".into()));
    }
    prec.check()?;
    Ok(Polylog { value: li_upper(n as usize, z), on_cut: on_cut(z) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    // mpmath polylog at 30 digits.
    const REF: &[(usize, (f64, f64), (f64, f64))] = &[
        (2, (0.3, 0.4), (0.26659686674274042, 0.46136289181910899)),
        (2, (-1.2, 0.7), (-0.99763925792564034, 0.4539290196093633)),
        (3, (1.5, -0.2), (1.9035237381714732, -0.55864739371660641)),
        (3, (3.0, 1.0), (2.7398286620366889, 2.6616251736679357)),
        (4, (-5.0, -2.0), (-4.1685972552759545, -1.4085627355197733)),
        (2, (0.9, 0.9), (0.61151020731241485, 1.3006011903521028)),
        (5, (0.1, -1.9), (-0.0066732735364797058, -1.8871807931906469)),
        (7, (-0.6, 0.6), (-0.59983030272067657, 0.59456963058962655)),
        (3, (40.0, -3.0), (2.9268563280653555, -21.133201993743043)),
    ];

    #[test]
    fn matches_reference_values() {
        for &(n, (zr, zi), (vr, vi)) in REF {
            let v = li_upper(n, c(zr, zi));
            assert!(close(v, c(vr, vi), 1e-13), "Li_{n}({zr}+{zi}i) = {v}");
        }
    }

    #[test]
    fn special_points() {
        let p = Precision::default();
        assert!(close(li(2, c(1.0, 0.0), &p).unwrap().value, c(PI * PI / 6.0, 0.0), 1e-15));
        assert!(close(li(1, c(0.5, 0.0), &p).unwrap().value, c(2f64.ln(), 0.0), 1e-15));
        assert!(close(li(3, c(1.0, 0.0), &p).unwrap().value, c(1.2020569031595942, 0.0), 1e-15));
        assert!(li(1, c(1.0, 0.0), &p).is_err());
        assert!(li(0, c(0.5, 0.0), &p).is_err());
    }

    #[test]
    fn cut_gives_upper_boundary_value() {
        let p = Precision::default();
        for n in 1..=5 {
            for x in [1.3, 2.0, 2.618, 3.0, 7.5] {
                let on = li(n, c(x, 0.0), &p).unwrap();
                assert!(on.on_cut);
                let above = li_upper(n as usize, c(x, 1e-9));
                assert!(close(on.value, above, 1e-7), "n={n} x={x}: {} vs {above}", on.value);
                // Discontinuity across the cut: 2π·log^{n−1}(x)/(n−1)!.
                let below = li_upper(n as usize, c(x, -1e-9));
                let fact: f64 = (1..n).map(|k| k as f64).product();
                let jump = 2.0 * PI * x.ln().powi(n as i32 - 1) / fact;
                assert!((on.value.im - below.im - jump).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn regions_agree_on_their_borders() {
        for n in 2..=6 {
            for k in 0..24 {
                let a = 2.0 * PI * k as f64 / 24.0 + 0.1;
                for r in [0.5, 2.0] {
                    let z = Complex64::from_polar(r, a);
                    let lo = Complex64::from_polar(r * (1.0 - 1e-12), a);
                    let hi = Complex64::from_polar(r * (1.0 + 1e-12), a);
                    assert!(close(li_upper(n, lo), li_upper(n, hi), 1e-11), "n={n} z={z}");
                }
            }
        }
    }
}
