//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes JSON measure specs (the same format as the CLI) and
//! returns a JSON string, so the page needs no generated type definitions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ncmeasure::classical::{compare, oracle_decompose, oracle_moments};
use ncmeasure::gns::cuntz_distance;
use ncmeasure::specfile::{self, MeasureSpec};
use ncmeasure::transforms::herglotz;
use ncmeasure::{simon_decompose, MatrixPoint, C64};

fn parse(text: &str) -> Result<MeasureSpec, String> {
    specfile::parse(text).map_err(|e| e.to_string())
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

/// `Re H_μ(z e_1)` on a polar grid of the unit disk, radii up to `max_radius`.
pub fn herglotz_field_json(
    spec: &str,
    degree: usize,
    rings: usize,
    spokes: usize,
    max_radius: f64,
) -> Result<String, String> {
    let spec = parse(spec)?;
    let d = spec.alphabet().map_err(|e| e.to_string())?;
    let mu = spec.to_measure(Some(degree)).map_err(|e| e.to_string())?;
    if !(max_radius > 0.0 && max_radius < 1.0) {
        return Err(format!("max_radius must lie in (0, 1), got {max_radius}"));
    }
    let mut rows = Vec::with_capacity(rings);
    for i in 1..=rings {
        let r = max_radius * i as f64 / rings as f64;
        let mut row = Vec::with_capacity(spokes);
        for j in 0..spokes {
            let z = C64::from_polar(r, std::f64::consts::TAU * j as f64 / spokes as f64);
            let mut zs = vec![C64::new(0.0, 0.0); d];
            zs[0] = z;
            let p = MatrixPoint::scalars(&zs).map_err(|e| e.to_string())?;
            let h = herglotz(&mu, &p, degree).map_err(|e| e.to_string())?;
            row.push(json!({"re": h.value[(0, 0)].re, "im": h.value[(0, 0)].im, "tail": h.error_bound()}));
        }
        rows.push(json!({"radius": r, "values": row}));
    }
    Ok(json!({"degree": degree, "rings": rows}).to_string())
}

/// Engine decomposition at one degree, with the closed-form answer when both
/// specs are one-variable circle measures.
pub fn decompose_json(mu: &str, lambda: &str, degree: usize) -> Result<String, String> {
    let mu_spec = parse(mu)?;
    let lambda_spec = parse(lambda)?;
    let m = mu_spec
        .to_measure(Some(degree))
        .map_err(|e| e.to_string())?;
    let l = lambda_spec
        .to_measure(Some(degree))
        .map_err(|e| e.to_string())?;
    let r = simon_decompose(&m, &l, degree).map_err(|e| e.to_string())?;
    let mut out = json!({
        "degree": degree,
        "moments_mu": r.moments_mu.iter().copied().map(pair).collect::<Vec<_>>(),
        "moments_ac": r.moments_ac.iter().copied().map(pair).collect::<Vec<_>>(),
        "moments_s": r.moments_s.iter().copied().map(pair).collect::<Vec<_>>(),
        "kernel_dim": r.kernel_dim,
        "trace_d": r.trace_d,
        "toeplitz_residual": r.toeplitz_residual,
    });
    if let (1, Some(a), Some(b)) = (m.d(), mu_spec.classical(), lambda_spec.classical()) {
        let oracle = oracle_moments(&oracle_decompose(&a, &b), degree);
        let cmp = compare(&r, &oracle, degree).map_err(|e| e.to_string())?;
        out["oracle"] = json!({
            "ac": oracle.ac.iter().copied().map(pair).collect::<Vec<_>>(),
            "sing": oracle.sing.iter().copied().map(pair).collect::<Vec<_>>(),
            "ac_error": cmp.ac_error,
            "sing_error": cmp.sing_error,
        });
    }
    Ok(out.to_string())
}

/// Cuntz distance at each degree of `ladder`.
pub fn cuntz_trace_json(spec: &str, ladder: &[usize]) -> Result<String, String> {
    let spec = parse(spec)?;
    let top = ladder.iter().copied().max().unwrap_or(1);
    let m = spec.to_measure(Some(top)).map_err(|e| e.to_string())?;
    let distances = ladder
        .iter()
        .map(|&n| cuntz_distance(&m, n).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(json!({"degrees": ladder, "distances": distances}).to_string())
}

#[wasm_bindgen]
pub fn herglotz_field(
    spec: &str,
    degree: usize,
    rings: usize,
    spokes: usize,
    max_radius: f64,
) -> Result<String, JsError> {
    herglotz_field_json(spec, degree, rings, spokes, max_radius).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decompose(mu: &str, lambda: &str, degree: usize) -> Result<String, JsError> {
    decompose_json(mu, lambda, degree).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cuntz_trace(spec: &str, ladder: Vec<usize>) -> Result<String, JsError> {
    cuntz_trace_json(spec, &ladder).map_err(|e| JsError::new(&e))
}
