use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Estimate, QuadError, QuadratureConfig};
use crate::par;

const CHUNK: usize = 4096;

/// Positive root of x^{d+1} = x + 1 (the plastic-type constant of order d).
fn phi_d(d: usize) -> f64 {
    let mut x: f64 = 1.5;
    for _ in 0..100 {
        let f = x.powi(d as i32 + 1) - x - 1.0;
        let df = (d as f64 + 1.0) * x.powi(d as i32) - 1.0;
        let nx = x - f / df;
        if (nx - x).abs() < 1e-16 {
            return nx;
        }
        x = nx;
    }
    x
}

/// Generating vector of an N-point rank-1 lattice in d dimensions, from the
/// Kronecker sequence α_j = φ_d^{−j}: z_j = round(N·frac(α_j)) forced odd so
/// that every coordinate is a permutation of the N-point grid when N is a power
/// of two.
pub fn lattice_generator(n: u64, d: usize) -> Vec<u64> {
    let p = phi_d(d);
    (1..=d)
        .map(|j| {
            let a = p.powi(-(j as i32)).fract();
            let z = ((n as f64) * a).round() as u64 % n.max(1);
            if n > 1 { z | 1 } else { 0 }
        })
        .collect()
}

struct Partial {
    sum: f64,
    sumsq: f64,
    skipped: u64,
}

fn run_chunk<G>(g: &G, d: usize, count: usize, point: impl Fn(usize, &mut [f64])) -> Result<Partial, QuadError>
where
    G: Fn(&[f64]) -> Option<f64>,
{
    let mut x = vec![0.0; d];
    let mut p = Partial { sum: 0.0, sumsq: 0.0, skipped: 0 };
    for i in 0..count {
        point(i, &mut x);
        match g(&x) {
            Some(v) if v.is_finite() => {
                p.sum += v;
                p.sumsq += v * v;
            }
            Some(_) => return Err(QuadError::NonFinite(x)),
            None => p.skipped += 1,
        }
    }
    Ok(p)
}

/// Randomly shifted rank-1 lattice rule on [0,1)^d. With budget B the lattice
/// has N = 2^k points, the largest with 8N ≤ B, and q = ⌊B/N⌋ ≥ 8 independent
/// ChaCha shifts. The estimate is the mean of the q shifted rules and the error
/// is their standard error.
pub fn lattice<G>(g: &G, d: usize, cfg: &QuadratureConfig) -> Result<Estimate, QuadError>
where
    G: Fn(&[f64]) -> Option<f64> + Sync + Send,
{
    cfg.validate()?;
    let budget = cfg.total_samples as u64;
    let mut n = 1u64;
    while 16 * n <= budget {
        n *= 2;
    }
    let q = (budget / n).max(1) as usize;
    let z = lattice_generator(n, d);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shifts: Vec<Vec<f64>> = (0..q).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
    let chunks_per_shift = (n as usize).div_ceil(CHUNK);
    let parts = par::map_indexed(q * chunks_per_shift, |t| {
        let (s, c) = (t / chunks_per_shift, t % chunks_per_shift);
        let start = c * CHUNK;
        let count = CHUNK.min(n as usize - start);
        let shift = &shifts[s];
        run_chunk(g, d, count, |i, x| {
            let k = (start + i) as u64;
            for j in 0..d {
                let base = ((k as u128 * z[j] as u128) % n as u128) as f64 / n as f64;
                let v = base + shift[j];
                x[j] = if v >= 1.0 { v - 1.0 } else { v };
            }
        })
    });
    let mut means = Vec::with_capacity(q);
    let mut skipped = 0;
    let mut it = parts.into_iter();
    for _ in 0..q {
        let mut s = 0.0;
        for _ in 0..chunks_per_shift {
            let p = it.next().unwrap()?;
            s += p.sum;
            skipped += p.skipped;
        }
        means.push(s / n as f64);
    }
    let mean = means.iter().sum::<f64>() / q as f64;
    let error = if q > 1 {
        let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (q - 1) as f64;
        (var / q as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(Estimate { value: mean, error, samples: n * q as u64, skipped, converged: q >= 8 })
}

/// Plain Monte Carlo on [0,1)^d. Chunk c of 4096 samples draws from
/// ChaCha8(seed) on stream c, so the samples do not depend on the thread count.
pub fn monte_carlo<G>(g: &G, d: usize, cfg: &QuadratureConfig) -> Result<Estimate, QuadError>
where
    G: Fn(&[f64]) -> Option<f64> + Sync + Send,
{
    cfg.validate()?;
    let total = cfg.total_samples;
    let chunks = total.div_ceil(CHUNK);
    let parts = par::map_indexed(chunks, |c| {
        let count = CHUNK.min(total - c * CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c as u64);
        let pts: Vec<f64> = (0..count * d).map(|_| rng.gen::<f64>()).collect();
        run_chunk(g, d, count, |i, x| x.copy_from_slice(&pts[i * d..(i + 1) * d]))
    });
    let (mut s, mut s2, mut skipped) = (0.0, 0.0, 0);
    for p in parts {
        let p = p?;
        s += p.sum;
        s2 += p.sumsq;
        skipped += p.skipped;
    }
    let n = total as f64;
    let mean = s / n;
    let error = if total > 1 { ((s2 / n - mean * mean).max(0.0) / (n - 1.0)).sqrt() } else { f64::INFINITY };
    Ok(Estimate { value: mean, error, samples: total as u64, skipped, converged: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_odd_and_in_range() {
        for d in 1..6 {
            let z = lattice_generator(1 << 16, d);
            assert_eq!(z.len(), d);
            assert!(z.iter().all(|&v| v % 2 == 1 && v < 1 << 16));
        }
        assert!((phi_d(1) - 1.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn lattice_integrates_smooth_periodic() {
        let g = |x: &[f64]| Some(x.iter().map(|t| 1.0 + (2.0 * std::f64::consts::PI * t).cos()).product());
        let e = lattice(&g, 3, &QuadratureConfig::quasi_mc(1 << 16, 7)).unwrap();
        assert!((e.value - 1.0).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn mc_error_is_honest() {
        let g = |x: &[f64]| Some(x[0] * x[1]);
        let e = monte_carlo(&g, 2, &QuadratureConfig::mc(100_000, 3)).unwrap();
        assert!((e.value - 0.25).abs() < 5.0 * e.error);
        assert!(e.error > 1e-4 && e.error < 1e-3);
    }

    #[test]
    fn seeds_reproduce_and_differ() {
        let g = |x: &[f64]| Some((x[0] - x[1]).abs().sqrt());
        let a = lattice(&g, 2, &QuadratureConfig::quasi_mc(50_000, 1)).unwrap();
        let b = lattice(&g, 2, &QuadratureConfig::quasi_mc(50_000, 1)).unwrap();
        let c = lattice(&g, 2, &QuadratureConfig::quasi_mc(50_000, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.value, c.value);
        let m1 = monte_carlo(&g, 2, &QuadratureConfig::mc(10_000, 1)).unwrap();
        let m2 = monte_carlo(&g, 2, &QuadratureConfig::mc(10_000, 1)).unwrap();
        assert_eq!(m1, m2);
    }
}
