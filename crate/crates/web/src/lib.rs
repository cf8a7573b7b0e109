//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns plain data (JSON text or a flat `Float64Array`), so
//! the same functions run and are tested natively.

use mahler::genmm::{gmm_order_stat, Family};
use mahler::measure::{mahler_1var, mahler_jensen_reduced};
use mahler::special::{zagier_l, Precision};
use mahler::{parse, QuadratureConfig};
use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Quasi-MC budget above two integration dimensions, kept small enough for a page.
const BROWSER_SAMPLES: usize = 200_000;

fn measure_value(text: &str) -> Result<Value, String> {
    let p = parse(text).map_err(|e| e.to_string())?;
    let vars = p.trimmed().used_vars();
    if vars.len() <= 1 {
        let v = mahler_1var(&p).map_err(|e| e.to_string())?;
        return Ok(json!({ "value": v, "error": 0.0, "method": "exact/roots", "samples": 1, "vars": vars }));
    }
    let var = vars.last().expect("at least two variables");
    let dims = vars.len() - 1;
    let cfg = if dims <= 2 { QuadratureConfig::tensor() } else { QuadratureConfig::quasi_mc(BROWSER_SAMPLES, 0) };
    let r = mahler_jensen_reduced(&p, var, &cfg).map_err(|e| e.to_string())?;
    Ok(json!({ "value": r.value, "error": r.error_estimate, "method": r.method, "samples": r.samples_used, "vars": vars }))
}

/// m(P) of a polynomial typed by the user, as JSON
/// `{value, error, method, samples, vars}` or `{error_message}`.
#[wasm_bindgen]
pub fn measure(text: &str) -> String {
    match measure_value(text) {
        Ok(v) => v.to_string(),
        Err(m) => json!({ "error_message": m }).to_string(),
    }
}

fn gmm_rows(family: &str, max_n: u32) -> Result<Value, String> {
    let family: Family = family.parse()?;
    if !(1..=200).contains(&max_n) {
        return Err(format!("max_n must be in 1..=200, got {max_n}"));
    }
    let lsn = family.log_sup_norm();
    let profile = family.profile();
    let cfg = QuadratureConfig::tensor();
    let rows = (1..=max_n)
        .map(|n| {
            let r = gmm_order_stat(&profile, n, &cfg).map_err(|e| e.to_string())?;
            Ok(json!({ "n": n, "value": r.value, "closed_form": family.closed_form(n) }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json!({ "family": family.tag(), "log_sup_norm": lsn.is_finite().then_some(lsn), "rows": rows }))
}

/// m(P(x₁),…,P(x_n)) for n = 1..max_n, as JSON
/// `{family, log_sup_norm, rows: [{n, value, closed_form}]}` or `{error_message}`.
#[wasm_bindgen]
pub fn gmm_curve(family: &str, max_n: u32) -> String {
    match gmm_rows(family, max_n) {
        Ok(v) => v.to_string(),
        Err(m) => json!({ "error_message": m }).to_string(),
    }
}

/// 𝓛ₙ(z) on a `res × res` grid over [re_min, re_max] × [im_min, im_max], row
/// by row from the top (largest imaginary part). n = 2 is the Bloch–Wigner
/// function. Returns an empty array for invalid input.
#[wasm_bindgen]
pub fn zagier_grid(n: u32, res: u32, re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Vec<f64> {
    let prec = Precision::default();
    if !(2..=8).contains(&n) || !(2..=1024).contains(&res) || !(re_max > re_min) || !(im_max > im_min) {
        return Vec::new();
    }
    let step = |lo: f64, hi: f64, k: u32| lo + (hi - lo) * k as f64 / (res - 1) as f64;
    let mut out = Vec::with_capacity((res * res) as usize);
    for row in 0..res {
        let im = step(im_max, im_min, row);
        for col in 0..res {
            let z = Complex64::new(step(re_min, re_max, col), im);
            out.push(zagier_l(n as i64, z, &prec).unwrap_or(f64::NAN));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parsed(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn measures() {
        let v = parsed(measure("x-2"));
        assert!((v["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
        let v = parsed(measure("1+x+y"));
        assert!((v["value"].as_f64().unwrap() - 0.3230659472).abs() < 1e-8, "{v}");
        assert!(parsed(measure("1+x+(")).get("error_message").is_some());
    }

    #[test]
    fn curves() {
        let v = parsed(gmm_curve("golden", 3));
        assert_eq!(v["rows"].as_array().unwrap().len(), 3);
        assert!((v["rows"][0]["value"].as_f64().unwrap() - 0.481211825).abs() < 1e-8);
        assert!((v["log_sup_norm"].as_f64().unwrap() - 0.5 * 5f64.ln()).abs() < 1e-15);
        assert_eq!(parsed(gmm_curve("ratio", 1))["log_sup_norm"], Value::Null);
        assert!(parsed(gmm_curve("nope", 3)).get("error_message").is_some());
        assert!(parsed(gmm_curve("1mx", 0)).get("error_message").is_some());
    }

    #[test]
    fn grid_layout() {
        let g = zagier_grid(2, 3, -1.0, 1.0, -1.0, 1.0);
        assert_eq!(g.len(), 9);
        // D vanishes on the real line (middle row) and is odd under conjugation
        assert!(g[3..6].iter().all(|v| v.abs() < 1e-15));
        for k in 0..3 {
            assert!((g[k] + g[6 + k]).abs() < 1e-14);
        }
        assert!(zagier_grid(1, 3, -1.0, 1.0, -1.0, 1.0).is_empty());
    }
}
