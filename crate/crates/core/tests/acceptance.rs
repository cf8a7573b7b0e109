//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//! Runs single-threaded so the wall-clock limits are meaningful.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use mahler::forms::{path_integral, stokes_check, Arg, FormKind, FormSpec, PatchSpec, PathSpec};
use mahler::genmm::{closed_one_minus_x, gmm_direct, gmm_order_stat, Family};
use mahler::identities::{log2_block, lookup, relation_residual, tail_sum, verify, IdentityInput, IdentityRecord};
use mahler::measure::{mahler_1var, mahler_jensen_reduced};
use mahler::special::{bloch_wigner, zagier_l, Precision};
use mahler::{parse, QuadratureConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn record(id: &str, tol: f64) -> (bool, String) {
    let r = lookup(id).unwrap();
    let cfg = r.default_config(r.default_method);
    let rep = verify(id, r.default_method, &cfg, Some(tol)).unwrap();
    (rep.pass, format!("{id}: |{:.10} − {:.10}| = {:.2e} (tol {tol:.0e})", rep.numeric_value, rep.closed_value, rep.abs_diff))
}

fn timed(limit: Duration, ids: &[(&str, f64)]) -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for &(id, tol) in ids {
        let (p, d) = record(id, tol);
        pass &= p;
        parts.push(d);
    }
    let el = t.elapsed();
    pass &= el < limit;
    parts.push(format!("{:.2?} (limit {:?})", el, limit));
    outcome(pass, parts.join("; "))
}

fn c1() -> Outcome {
    timed(Duration::from_secs(60), &[("smyth_xyz", 1e-5)])
}

fn c2() -> Outcome {
    timed(Duration::from_secs(300), &[("smyth2", 1e-4), ("linear_7z3", 1e-4), ("linear_log2", 1e-4), ("condon", 1e-4)])
}

fn c3() -> Outcome {
    let r = lookup("fourvar").unwrap();
    let cfg = QuadratureConfig::quasi_mc(10_000_000, 0);
    let t = Instant::now();
    let rep = verify("fourvar", r.default_method, &cfg, Some(5e-3)).unwrap();
    let el = t.elapsed();
    outcome(
        rep.pass && el < Duration::from_secs(600) && rep.samples <= 10_000_000,
        format!("fourvar: |{:.8} − {:.8}| = {:.2e} (tol 5e-3), {} samples, {:.2?}", rep.numeric_value, rep.closed_value, rep.abs_diff, rep.samples, el),
    )
}

fn c4() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for id in ["l3_three_minus_three", "l3_22_term", "l3_minus_one", "l3_two", "l3_golden"] {
        let spec = match &lookup(id).unwrap().input {
            IdentityInput::Relation { spec } => spec.clone(),
            _ => unreachable!(),
        };
        let r = relation_residual(&spec, &[]).unwrap();
        worst = worst.max(r);
        parts.push(format!("{id} {r:.1e}"));
    }
    let el = t.elapsed();
    outcome(worst < 1e-10 && el < Duration::from_secs(1), format!("{}; {:.2?}", parts.join(", "), el))
}

fn c5() -> Outcome {
    let mut pass = true;
    let mut worst_os: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    let tensor = QuadratureConfig::tensor();
    for fam in Family::ALL {
        for n in 1..=4u32 {
            let closed = fam.closed_form(n);
            let os = gmm_order_stat(&fam.profile(), n, &tensor).unwrap().value;
            worst_os = worst_os.max((closed - os).abs());
            let d = gmm_direct(&fam.functions(n as usize), &QuadratureConfig::quasi_mc(1_000_000, 7)).unwrap();
            worst_sigma = worst_sigma.max((closed - d.value).abs() / d.error_estimate);
        }
    }
    pass &= worst_os <= 1e-6 && worst_sigma <= 3.0;
    let mut pairs = Vec::new();
    let qmc = QuadratureConfig::quasi_mc(1_000_000, 7);
    for (fam, text) in [(Family::OneMinusX, "1-x1+(1-x2)*z"), (Family::Ratio, "(1-x1)*(1+x2)+(1+x1)*(1-x2)*z")] {
        let g = gmm_direct(&fam.functions(2), &qmc).unwrap();
        let m = mahler_jensen_reduced(&parse(text).unwrap(), "z", &tensor).unwrap();
        let diff = (g.value - m.value).abs();
        let comb = 3.0 * (g.error_estimate + m.error_estimate);
        pass &= diff <= comb;
        pairs.push(format!("{}: |gmm − m(f₁+z f₂)| = {diff:.1e} ≤ {comb:.1e}", fam.tag()));
    }
    outcome(
        pass,
        format!("closed vs order-stat max {worst_os:.1e}; closed vs direct max {worst_sigma:.2}σ; {}", pairs.join("; ")),
    )
}

fn c6() -> Outcome {
    let e = log2_block(&QuadratureConfig::tensor()).unwrap();
    let rel = (e.value - LN_2).abs() / LN_2;
    let tail = (1..=10).map(|l| (tail_sum(l, 0.5) - 1.0 / l as f64).abs()).fold(0.0, f64::max);
    outcome(rel < 1e-3 && tail < 1e-12, format!("log2 block {:.12} (rel {rel:.1e}); tail identity max {tail:.1e}", e.value))
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let eta = FormSpec::new(FormKind::Eta2, vec![Arg::Coord(0), Arg::OneMinus(0)]).unwrap();
    let pt = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
    // distance from p to the segment [a, b]
    let dist = |p: Complex64, a: Complex64, b: Complex64| {
        let t = (((p - a) * (b - a).conj()).re / (b - a).norm_sqr()).clamp(0.0, 1.0);
        (a + (b - a) * t - p).norm()
    };
    let mut worst_path: f64 = 0.0;
    let mut paths = 0;
    while paths < 20 {
        let (a, b) = (pt(&mut rng), pt(&mut rng));
        if dist(Complex64::new(0.0, 0.0), a, b) < 0.1 || dist(Complex64::new(1.0, 0.0), a, b) < 0.1 {
            continue;
        }
        let r = path_integral(&eta, &PathSpec::segment(a, b)).unwrap();
        let expect = Complex64::new(0.0, bloch_wigner(b) - bloch_wigner(a));
        worst_path = worst_path.max((r.value - expect).norm());
        paths += 1;
    }
    let mut worst_stokes: f64 = 0.0;
    let mut patches = 0;
    while patches < 10 {
        let x0 = pt(&mut rng);
        let y0 = pt(&mut rng);
        if x0.norm() < 0.3 || (1.0 - x0).norm() < 0.3 || y0.norm() < 0.3 {
            continue;
        }
        let h: [Complex64; 4] = std::array::from_fn(|_| 0.1 * pt(&mut rng) / 2.5);
        let patch = PatchSpec::new(
            std::sync::Arc::new(move |s, t| {
                let x = x0 + h[0] * s + h[1] * t;
                let y = y0 + h[2] * s + h[3] * t;
                vec![(x, h[0], h[1]), (y, h[2], h[3])]
            }),
            (0.0, 1.0),
            (0.0, 1.0),
            2,
        );
        worst_stokes = worst_stokes.max(stokes_check(&patch).unwrap().residual);
        patches += 1;
    }
    outcome(
        worst_path < 1e-8 && worst_stokes < 1e-6,
        format!("η₂ endpoint max {worst_path:.1e} over 20 paths; Stokes max {worst_stokes:.1e} over 10 patches"),
    )
}

fn c8() -> Outcome {
    let p = Precision::default();
    let l = |n: i64, z: Complex64| zagier_l(n, z, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut z = || {
        let r = rng.gen_range(0.1f64..10.0);
        Complex64::from_polar(r, rng.gen_range(-PI..PI))
    };
    let mut inv: f64 = 0.0;
    let mut conj: f64 = 0.0;
    let mut dist: f64 = 0.0;
    for _ in 0..200 {
        let w = z();
        for n in 2..=4 {
            let s = if n % 2 == 0 { -1.0 } else { 1.0 };
            inv = inv.max((l(n, 1.0 / w) - s * l(n, w)).abs());
            conj = conj.max((l(n, w.conj()) - s * l(n, w)).abs());
            dist = dist.max((l(n, w) + l(n, -w) - l(n, w * w) / 2f64.powi(n as i32 - 1)).abs());
        }
    }
    let five = lookup("five_term").unwrap();
    let three = lookup("l3_three_term").unwrap();
    let res = |rec: &IdentityRecord| match &rec.input {
        IdentityInput::Relation { spec } => relation_residual(spec, &spec.sample_points(500, 3)).unwrap(),
        _ => unreachable!(),
    };
    let (five, three) = (res(five), res(three));
    let fe = inv.max(conj).max(dist).max(five).max(three) < 1e-10;

    // multiplicativity and monomial invariance
    let q = QuadratureConfig::tensor();
    let a = parse("1+x+y").unwrap();
    let b = parse("2+x*y-y").unwrap();
    let ab = &a * &b;
    let ma = mahler_jensen_reduced(&a, "y", &q).unwrap();
    let mb = mahler_jensen_reduced(&b, "y", &q).unwrap();
    let mab = mahler_jensen_reduced(&ab, "y", &q).unwrap();
    let mult = (mab.value - ma.value - mb.value).abs() <= 3.0 * (ma.error_estimate + mb.error_estimate + mab.error_estimate) + 1e-12;
    let u1 = parse("3-x+4*x^3").unwrap();
    let u2 = parse("x-5").unwrap();
    let mult1 = (mahler_1var(&(&u1 * &u2)).unwrap() - mahler_1var(&u1).unwrap() - mahler_1var(&u2).unwrap()).abs() < 1e-13;
    let shifted = &parse("x^-3*y^2").unwrap() * &a;
    let mono = mahler_jensen_reduced(&shifted, "y", &q).unwrap().value.to_bits() == ma.value.to_bits();

    // seed determinism, independent of the thread count
    let four = parse("(1+x1)*(1+x)+(1-x1)*(1+y)*z").unwrap();
    let cfg = QuadratureConfig::quasi_mc(200_000, 42);
    let one = serde_json::to_string(&mahler_jensen_reduced(&four, "z", &cfg).unwrap()).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let many = pool.install(|| serde_json::to_string(&mahler_jensen_reduced(&four, "z", &cfg).unwrap()).unwrap());
    let again = serde_json::to_string(&mahler_jensen_reduced(&four, "z", &cfg).unwrap()).unwrap();
    let det = one == many && one == again;

    outcome(
        fe && mult && mult1 && mono && det,
        format!(
            "inversion {inv:.1e}, conjugation {conj:.1e}, distribution {dist:.1e}, five-term {five:.1e}, 𝓛₃ three-term {three:.1e}; \
             multiplicativity {mult}/{mult1}; monomial invariance {mono}; seed determinism {det}"
        ),
    )
}

fn c9() -> Outcome {
    let vals: Vec<f64> = (1..=81).map(closed_one_minus_x).collect();
    let below = vals.iter().all(|&v| v < LN_2);
    let gap = |n: usize| LN_2 - vals[n - 1];
    let golden = Family::Golden;
    let cap = golden.log_sup_norm();
    let gold: Vec<f64> =
        (1..=20).map(|n| gmm_order_stat(&golden.profile(), n, &QuadratureConfig::tensor()).unwrap().value).collect();
    let gbelow = gold.iter().all(|&v| v < cap);
    outcome(
        below && gap(41) < gap(9) && gbelow,
        format!(
            "1−x: max value {:.6} < log 2, gap(9) = {:.4e}, gap(41) = {:.4e}; golden: max value {:.6} < log √5 = {:.6}",
            vals.iter().cloned().fold(f64::MIN, f64::max),
            gap(9),
            gap(41),
            gold.iter().cloned().fold(f64::MIN, f64::max),
            cap
        ),
    )
}

fn main() {
    // the closed forms and relation checks are cheap; keep everything on one thread
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Smyth 1+x+y+z, Jensen 2-D", c1),
        ("four three-variable results", c2),
        ("four-variable result, quasi-MC 3-D", c3),
        ("trilogarithm relations", c4),
        ("generalized measures", c5),
        ("log 2 block and tail identity", c6),
        ("regulator forms", c7),
        ("property suites", c8),
        ("limit of generalized measures", c9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = pool.install(f);
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
