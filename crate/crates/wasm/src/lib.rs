//! Browser bindings: Segre cone membership, determinant guards and the
//! torsion of small sample structures. Every function returns a JSON string.

use almost_grassmann::analysis::{analyze_field, Tolerances};
use almost_grassmann::coframe::{GridSpec, Layout};
use almost_grassmann::curvature::determinant_guards;
use almost_grassmann::error::Error;
use almost_grassmann::geometry::{
    flat_coframe, perturbed_coframe, segre_factors, segre_membership, web_coframe, ChartFactors, SegrePoint,
    ThreeWeb, DEFAULT_CONE_TOL,
};
use almost_grassmann::tensor::Signature;
use nalgebra::DMatrix;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, Error>;

/// Membership of the `p×q` matrix `entries` (row-major) in the Segre cone,
/// with its singular values and, for members, the factors `t ⊗ s`.
pub fn segre_json(p: usize, q: usize, entries: &[f64]) -> Result<Value> {
    if entries.len() != p * q {
        return Err(Error::ComponentCount {
            expected: p * q,
            found: entries.len(),
        });
    }
    let z = SegrePoint::new(DMatrix::from_row_slice(p, q, entries))?;
    let mut sv: Vec<f64> = z.z.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let member = segre_membership(&z, DEFAULT_CONE_TOL);
    let factors = if member {
        let (t, s) = segre_factors(&z, DEFAULT_CONE_TOL)?;
        json!({ "t": t.as_slice(), "s": s.as_slice() })
    } else {
        Value::Null
    };
    Ok(json!({ "member": member, "singular_values": sv, "factors": factors }))
}

pub fn guards_json(p: usize, q: usize) -> Result<Value> {
    let s = Signature::new(p, q)?;
    let g = determinant_guards(s);
    Ok(json!({
        "guards": g,
        "b1_unique": g.b1_unique(),
        "b2_unique": g.b2_unique(),
        "notes": g.notes(),
    }))
}

/// Torsion and verdict of a sample structure on a small star grid around
/// the origin. `kind` is `flat`, `perturbed` or `web`; `param` is the chart
/// amplitude, the perturbation size or the web deformation.
pub fn torsion_json(kind: &str, p: usize, q: usize, param: f64) -> Result<Value> {
    let s = Signature::new(p, q)?;
    if s.n() > 16 {
        return Err(Error::SystemTooLarge(format!("demo limited to pq <= 16, got {}", s.n())));
    }
    let grid = GridSpec::cube(s.n(), -0.25, 0.25, 5);
    let layout = Layout::star(&grid, 1)?;
    let field = match kind {
        "flat" => flat_coframe(s, &grid, &layout, ChartFactors::Analytic { amplitude: param })?,
        "perturbed" => perturbed_coframe(s, &grid, &layout, param)?,
        "web" => web_coframe(s, ThreeWeb::Polynomial { epsilon: param }, &grid, &layout)?,
        other => return Err(Error::Parse(format!("unknown structure `{other}`"))),
    };
    let r = analyze_field(&field, Tolerances::default())?;
    Ok(json!({
        "a": r.norms.a,
        "a_alpha": r.norms.a_alpha,
        "a_beta": r.norms.a_beta,
        "spacing": grid.spacing()[0],
        "verdict": r.verdict,
        "notes": r.notes,
    }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn segre(p: usize, q: usize, entries: &[f64]) -> std::result::Result<String, JsError> {
    to_js(segre_json(p, q, entries))
}

#[wasm_bindgen]
pub fn guards(p: usize, q: usize) -> std::result::Result<String, JsError> {
    to_js(guards_json(p, q))
}

#[wasm_bindgen]
pub fn torsion(kind: &str, p: usize, q: usize, param: f64) -> std::result::Result<String, JsError> {
    to_js(torsion_json(kind, p, q, param))
}
