//! Polynomial roots by Aberth–Ehrlich iteration, falling back to the
//! eigenvalues of the companion matrix when the iteration stagnates.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Sweeps without a decrease of the largest residual before falling back.
const STAGNATION: usize = 50;
const MAX_SWEEPS: usize = 2000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial has no roots")]
    Constant,
    #[error("leading coefficient {0:e} is below the underflow threshold")]
    LeadingUnderflow(f64),
    #[error("non-finite coefficient")]
    NonFinite,
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// |p(z)| relative to Σ|a_k||z|^k — the componentwise backward error.
fn backward_error(c: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut s = 0.0;
    for a in c.iter().rev() {
        s = s * r + a.norm();
    }
    let (p, _) = horner(c, z);
    if s == 0.0 { 0.0 } else { p.norm() / s }
}

fn quadratic(c: &[Complex64]) -> Vec<Complex64> {
    let (a, b, cc) = (c[2], c[1], c[0]);
    let disc = (b * b - 4.0 * a * cc).sqrt();
    // choose the sign avoiding cancellation
    let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
    if q.norm() == 0.0 {
        return vec![Complex64::new(0.0, 0.0); 2];
    }
    vec![q / a, cc / q]
}

fn companion(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let lead = c[d];
    let m = DMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            -c[d - 1 - j] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let schur = m.schur();
    let (_, t) = schur.unpack();
    (0..d).map(|i| t[(i, i)]).collect()
}

fn polish(c: &[Complex64], z: &mut [Complex64]) {
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let cand = *zi - step;
            if backward_error(c, cand) <= backward_error(c, *zi) {
                *zi = cand;
            } else {
                break;
            }
        }
    }
}

fn aberth(c: &[Complex64], tol: f64) -> Option<Vec<Complex64>> {
    let d = c.len() - 1;
    // initial points on a circle of radius |a_0/a_d|^{1/d}, offset to break symmetry
    let r = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64).max(f64::MIN_POSITIVE.sqrt());
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / d as f64 + 0.4)).collect();
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    for _ in 0..MAX_SWEEPS {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        let worst = z.iter().map(|&zi| backward_error(c, zi)).fold(0.0, f64::max);
        if worst <= tol || moved <= 4.0 * f64::EPSILON {
            return Some(z);
        }
        if worst < best {
            best = worst;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= STAGNATION {
                return None;
            }
        }
    }
    None
}

/// All roots (with multiplicity) of Σ a_k x^k, coefficients in ascending order.
/// Trailing zero coefficients in the highest positions are not allowed: the
/// leading coefficient must be nonzero and above the underflow threshold.
/// `tol` is the target componentwise backward error of each root.
pub fn roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>, RootError> {
    if coeffs.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
        return Err(RootError::NonFinite);
    }
    if coeffs.iter().all(|a| a.norm() == 0.0) {
        return Err(RootError::ZeroPolynomial);
    }
    let d = coeffs.len() - 1;
    if d == 0 {
        return Err(RootError::Constant);
    }
    let scale = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let lead = coeffs[d].norm();
    if lead <= f64::MIN_POSITIVE || lead < 1e-290 * scale {
        return Err(RootError::LeadingUnderflow(lead));
    }
    // roots at zero
    let k0 = coeffs.iter().position(|a| a.norm() != 0.0).unwrap();
    let c = &coeffs[k0..];
    let mut out = vec![Complex64::new(0.0, 0.0); k0];
    match c.len() - 1 {
        0 => {}
        1 => out.push(-c[0] / c[1]),
        2 => out.extend(quadratic(c)),
        _ => {
            let tol = tol.max(4.0 * f64::EPSILON);
            let mut z = aberth(c, tol).unwrap_or_else(|| companion(c));
            polish(c, &mut z);
            out.extend(z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(c: &[f64]) -> Vec<Complex64> {
        c.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn sorted(mut z: Vec<Complex64>) -> Vec<Complex64> {
        z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        z
    }

    #[test]
    fn small_degrees() {
        let r = sorted(roots(&real(&[-1.0, 0.0, 1.0]), 1e-15).unwrap());
        assert!((r[0].re + 1.0).abs() < 1e-15 && (r[1].re - 1.0).abs() < 1e-15);
        assert_eq!(roots(&real(&[-2.0, 1.0]), 1e-15).unwrap(), vec![Complex64::new(2.0, 0.0)]);
        let r = roots(&real(&[-1.0, 0.0, 0.0, 1.0]), 1e-15).unwrap();
        assert_eq!(r.len(), 3);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-14);
            assert!((z.powi(3) - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(roots(&real(&[0.0, 0.0]), 1e-15), Err(RootError::ZeroPolynomial));
        assert_eq!(roots(&real(&[3.0]), 1e-15), Err(RootError::Constant));
        assert!(matches!(roots(&real(&[1.0, 1e-320]), 1e-15), Err(RootError::LeadingUnderflow(_))));
    }

    #[test]
    fn zero_roots_and_multiplicity() {
        // x²(x−1)³
        let r = roots(&real(&[0.0, 0.0, -1.0, 3.0, -3.0, 1.0]), 1e-15).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        for z in r.iter().filter(|z| z.norm() != 0.0) {
            assert!((z - 1.0).norm() < 1e-4);
        }
    }

    #[test]
    fn lehmer_polynomial() {
        let c = real(&[1.0, 1.0, 0.0, -1.0, -1.0, -1.0, -1.0, -1.0, 0.0, 1.0, 1.0]);
        let r = roots(&c, 1e-15).unwrap();
        assert_eq!(r.len(), 10);
        let outside: Vec<_> = r.iter().filter(|z| z.norm() > 1.0 + 1e-9).collect();
        assert_eq!(outside.len(), 1);
        assert!((outside[0].re - 1.1762808182599175).abs() < 1e-13);
    }

    #[test]
    fn companion_matches_aberth() {
        let c: Vec<Complex64> =
            (0..9).map(|k| Complex64::new((k as f64 * 0.7).sin() + 0.1, (k as f64 * 1.3).cos())).collect();
        let a = sorted(aberth(&c, 1e-15).unwrap());
        let b = sorted(companion(&c));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-9, "{x} {y}");
        }
    }

    #[test]
    fn wilkinson_like() {
        // Π (x − k), k = 1..12
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for k in 1..=12 {
            let mut n = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                n[i + 1] += a;
                n[i] -= a * k as f64;
            }
            c = n;
        }
        let r = sorted(roots(&c, 1e-15).unwrap());
        for (k, z) in r.iter().enumerate() {
            assert!((z - (k + 1) as f64).norm() < 1e-6, "{z}");
        }
    }
}
