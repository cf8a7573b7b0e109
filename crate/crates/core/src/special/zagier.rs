use num_complex::Complex64;

use super::{bernoulli_f64, li_upper, zeta_f64, Precision, SpecialError};

/// Σ_{j=0}^{n−1} 2^j B_j/j! · log^j|z| · Li_{n−j}(z), before taking a real or
/// imaginary part. All Li use the same (upper) side of the cut.
pub(crate) fn zagier_sum(n: usize, z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(zeta_f64(n), 0.0);
    }
    let lg = z.norm().ln();
    let mut s = Complex64::new(0.0, 0.0);
    let mut w = 1.0; // 2^j log^j|z| / j!
    for j in 0..n {
        if j > 0 {
            w *= 2.0 * lg / j as f64;
        }
        let b = bernoulli_f64(j);
        if b != 0.0 && (j == 0 || w != 0.0) {
            s += li_upper(n - j, z) * (b * w);
        }
    }
    s
}

/// 𝓛ₙ(z) in double precision: Re of the sum for odd n, Im for even n.
pub(crate) fn zagier_l_f64(n: usize, z: Complex64) -> f64 {
    let s = zagier_sum(n, z);
    if n % 2 == 1 { s.re } else { s.im }
}

fn check_order(n: i64, prec: &Precision) -> Result<(), SpecialError> {
    if n < 2 {
        return Err(SpecialError::Domain(format!("single-valued polylog of order {n} requires n >= 2")));
    }
    prec.check()
}

/// Zagier's single-valued polylogarithm 𝓛ₙ (real). 𝓛₂ is the Bloch–Wigner
/// dilogarithm; 𝓛ₙ(0) = 0 and 𝓛ₙ(1) = ζ(n) for odd n.
pub fn zagier_l(n: i64, z: Complex64, prec: &Precision) -> Result<f64, SpecialError> {
    check_order(n, prec)?;
    Ok(zagier_l_f64(n as usize, z))
}

/// 𝓛̂ₙ: the same sum with Re for odd n and i·Im for even n.
pub fn zagier_lhat(n: i64, z: Complex64, prec: &Precision) -> Result<Complex64, SpecialError> {
    check_order(n, prec)?;
    Ok(lhat(n as usize, z))
}

pub(crate) fn lhat(n: usize, z: Complex64) -> Complex64 {
    let s = zagier_sum(n, z);
    if n % 2 == 1 {
        Complex64::new(s.re, 0.0)
    } else {
        Complex64::new(0.0, s.im)
    }
}

/// Bloch–Wigner dilogarithm D(z) = Im Li₂(z) + log|z|·arg(1 − z).
/// On the cut arg(1 − z) is taken from the same side as Li₂, which makes D
/// continuous; D(0) = D(1) = 0.
pub fn bloch_wigner(z: Complex64) -> f64 {
    if (z.re == 0.0 && z.im == 0.0) || z == Complex64::new(1.0, 0.0) {
        return 0.0;
    }
    let arg = if z.im == 0.0 && z.re > 1.0 { -std::f64::consts::PI } else { (1.0 - z).arg() };
    li_upper(2, z).im + z.norm().ln() * arg
}
