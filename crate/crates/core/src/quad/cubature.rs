use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gk::rule15;
use super::{Estimate, QuadError, QuadratureConfig};
use crate::par;

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    depth: u32,
    value: f64,
    error: f64,
    evals: u64,
    skipped: u64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error).then_with(|| lex(&o.lo, &self.lo))
    }
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
}

/// Tensor K15 and G7 rules on one cell.
fn tensor_rule<F>(f: &F, lo: Vec<f64>, hi: Vec<f64>, depth: u32) -> Result<Cell, QuadError>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let d = lo.len();
    let rule = rule15();
    let half: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let jac: f64 = half.iter().product();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let (mut k, mut g) = (0.0, 0.0);
    let (mut evals, mut skipped) = (0u64, 0u64);
    loop {
        let (mut wk, mut wg) = (1.0, 1.0);
        for j in 0..d {
            let (t, a, b) = rule[idx[j]];
            x[j] = mid[j] + half[j] * t;
            wk *= a;
            wg *= b;
        }
        evals += 1;
        match f(&x) {
            Some(v) if v.is_finite() => {
                k += wk * v;
                g += wg * v;
            }
            Some(_) => return Err(QuadError::NonFinite(x)),
            None => skipped += 1,
        }
        // odometer increment
        let mut j = 0;
        loop {
            if j == d {
                let value = k * jac;
                let error = ((k - g) * jac).abs();
                return Ok(Cell { lo, hi, depth, value, error, evals, skipped });
            }
            idx[j] += 1;
            if idx[j] < 15 {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn children(c: &Cell) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = c.lo.len();
    (0..1usize << d)
        .map(|mask| {
            let mut lo = c.lo.clone();
            let mut hi = c.hi.clone();
            for j in 0..d {
                let m = 0.5 * (c.lo[j] + c.hi[j]);
                if mask >> j & 1 == 0 { hi[j] = m } else { lo[j] = m }
            }
            (lo, hi)
        })
        .collect()
}

/// Adaptive cubature on the box `[lo, hi]`: the box is split into
/// `points_per_dim^d` cells, each integrated with the tensor product of the
/// 15-point Kronrod rule; the error of a cell is |K⊗…⊗K − G⊗…⊗G|. Cells with
/// the largest errors are bisected in every direction until the summed error
/// meets `max(abs_tol, rel_tol·|I|)`, the evaluation budget `total_samples`
/// is spent, or the cells reach `adaptive_depth`.
///
/// Cells are refined in batches; a batch is evaluated in parallel but its
/// composition and the final summation order depend only on the integrand,
/// so results do not depend on the thread count.
pub fn cubature<F>(f: &F, lo: &[f64], hi: &[f64], cfg: &QuadratureConfig) -> Result<Estimate, QuadError>
where
    F: Fn(&[f64]) -> Option<f64> + Sync + Send,
{
    cfg.validate()?;
    let d = lo.len();
    if d == 0 {
        return Ok(match f(&[]) {
            Some(v) if v.is_finite() => Estimate { value: v, error: 0.0, samples: 1, skipped: 0, converged: true },
            Some(_) => return Err(QuadError::NonFinite(vec![])),
            None => Estimate { value: 0.0, error: 0.0, samples: 1, skipped: 1, converged: true },
        });
    }
    let per_cell = 15u64.pow(d as u32);
    let n0 = cfg.points_per_dim;
    let mut boxes = Vec::with_capacity(n0.pow(d as u32));
    let mut idx = vec![0usize; d];
    'outer: loop {
        let a: Vec<f64> = (0..d).map(|j| lo[j] + (hi[j] - lo[j]) * idx[j] as f64 / n0 as f64).collect();
        let b: Vec<f64> = (0..d).map(|j| lo[j] + (hi[j] - lo[j]) * (idx[j] + 1) as f64 / n0 as f64).collect();
        boxes.push((a, b));
        for j in 0..d {
            idx[j] += 1;
            if idx[j] < n0 {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }

    let eval_all = |bs: Vec<(Vec<f64>, Vec<f64>)>, depth: u32| -> Result<Vec<Cell>, QuadError> {
        par::map_slice(&bs, |(a, b)| tensor_rule(f, a.clone(), b.clone(), depth)).into_iter().collect()
    };

    let mut heap: BinaryHeap<Cell> = BinaryHeap::new();
    let mut done: Vec<Cell> = Vec::new();
    let (mut evals, mut skipped) = (0u64, 0u64);
    let (mut total, mut err) = (0.0, 0.0);
    for c in eval_all(boxes, 0)? {
        evals += c.evals;
        skipped += c.skipped;
        total += c.value;
        err += c.error;
        heap.push(c);
    }
    let budget = cfg.total_samples as u64;
    let mut converged = false;
    loop {
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            converged = true;
            break;
        }
        if heap.is_empty() {
            break;
        }
        let batch = (heap.len() / 4).clamp(1, 512);
        let cost = batch as u64 * (1u64 << d) * per_cell;
        if evals + cost > budget {
            break;
        }
        let mut split = Vec::with_capacity(batch);
        let mut depth = Vec::with_capacity(batch);
        while split.len() < batch {
            let Some(c) = heap.pop() else { break };
            if c.depth >= cfg.adaptive_depth {
                done.push(c);
                continue;
            }
            total -= c.value;
            err -= c.error;
            split.extend(children(&c));
            depth.extend(std::iter::repeat(c.depth + 1).take(1 << d));
        }
        if split.is_empty() {
            continue;
        }
        let cells: Vec<Cell> = par::map_indexed(split.len(), |i| tensor_rule(f, split[i].0.clone(), split[i].1.clone(), depth[i]))
            .into_iter()
            .collect::<Result<_, _>>()?;
        for c in cells {
            evals += c.evals;
            skipped += c.skipped;
            total += c.value;
            err += c.error;
            heap.push(c);
        }
    }
    let mut cells = heap.into_vec();
    cells.extend(done);
    cells.sort_by(|a, b| lex(&a.lo, &b.lo));
    let value = cells.iter().map(|c| c.value).sum();
    let error = cells.iter().map(|c| c.error).sum();
    Ok(Estimate { value, error, samples: evals, skipped, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_2d() {
        let f = |x: &[f64]| Some((x[0] * x[1]).exp());
        let cfg = QuadratureConfig { abs_tol: 1e-13, ..QuadratureConfig::tensor() };
        let e = cubature(&f, &[0.0, 0.0], &[1.0, 1.0], &cfg).unwrap();
        // ∫∫ e^{xy} = Σ 1/(k!(k+1)²)
        let mut s = 0.0;
        let mut fact = 1.0;
        for k in 0..30 {
            if k > 0 {
                fact *= k as f64;
            }
            s += 1.0 / (fact * ((k + 1) * (k + 1)) as f64);
        }
        assert!(e.converged);
        assert!((e.value - s).abs() < 1e-13);
    }

    #[test]
    fn log_kink_2d() {
        // m(1 + x + y) over the 2-torus; log singularities at the two zeros
        let f = |t: &[f64]| {
            let z = num_complex::Complex64::new(1.0 + t[0].cos() + t[1].cos(), t[0].sin() + t[1].sin());
            Some(z.norm().ln())
        };
        let cfg = QuadratureConfig { abs_tol: 1e-6, total_samples: 50_000_000, ..QuadratureConfig::tensor() };
        let pi = std::f64::consts::PI;
        let e = cubature(&f, &[-pi, -pi], &[pi, pi], &cfg).unwrap();
        assert!((e.value / (4.0 * pi * pi) - 0.32306594721945051).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn three_dims_and_skips() {
        let f = |x: &[f64]| if x[0] < 1e-3 { None } else { Some(x[0] + x[1] * x[2]) };
        let cfg = QuadratureConfig { abs_tol: 1e-10, ..QuadratureConfig::tensor() };
        let e = cubature(&f, &[0.0; 3], &[1.0; 3], &cfg).unwrap();
        assert!((e.value - 0.75).abs() < 1e-3);
        assert!(e.skipped == 0 || e.skipped < e.samples);
    }
}
