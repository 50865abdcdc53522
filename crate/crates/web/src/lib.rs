//! Browser bindings. Each export is a thin wrapper over a plain function
//! so the logic also runs (and is tested) natively.

use bipencil::algebra::{frozen_argument, linear_pencil_curvature, LieStructure};
use bipencil::expr::parse_rational;
use bipencil::web::{blaschke_curvature, hexagon_trace, Web3};
use bipencil::{Pencil, PoissonTensor, Vars};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Curvature of the pencil spanned by two bivectors, given by their
/// `xy, yz, zx` components. Returns the form and a verdict line.
pub fn curvature_text(p: [&str; 3], q: [&str; 3]) -> Result<String, String> {
    let v = Vars::xyz();
    let p = PoissonTensor::parse(&v, p[0], p[1], p[2]).map_err(|e| format!("P: {e}"))?;
    let q = PoissonTensor::parse(&v, q[0], q[1], q[2]).map_err(|e| format!("Q: {e}"))?;
    let form = Pencil::new(p, q).and_then(|pen| pen.curvature()).map_err(err)?;
    let verdict = if form.is_zero() { "FLAT" } else { "NON-FLAT" };
    Ok(format!("{form}\n{verdict}"))
}

/// Curvature of the linear pencil on `[z,x] = x, [z,y] = a y` with the
/// cocycle frozen at `xi = (xi_x, xi_y, 0)`.
pub fn family_text(a: &str, xi_x: &str, xi_y: &str) -> Result<String, String> {
    let a = parse_rational(a).map_err(|e| format!("a: {e}"))?;
    let xi = [
        parse_rational(xi_x).map_err(|e| format!("xi_x: {e}"))?,
        parse_rational(xi_y).map_err(|e| format!("xi_y: {e}"))?,
        parse_rational("0").map_err(err)?,
    ];
    let g = LieStructure::parse("0", &format!("-({a})*y"), "x").map_err(err)?;
    let c = frozen_argument(&g, &xi);
    let form = linear_pencil_curvature(&g, &c).map_err(err)?;
    Ok(format!("{form}\ncocycle {c}"))
}

/// Hexagon of the web `(u, v, f3)` through `(u, v)`: seven vertices as
/// `[u0, v0, ..., u6, v6]`, then the closure defect, then the value of
/// `theta` at the origin.
pub fn hexagon_points(f3: &str, u: f64, v: f64, eps: f64) -> Result<Vec<f64>, String> {
    let w = Web3::parse("u", "v", f3).map_err(err)?;
    let theta = blaschke_curvature(&w).map_err(err)?.theta.eval_f64(&[u, v]).map_err(err)?;
    let t = hexagon_trace(&w.compile(), [u, v], eps).map_err(err)?;
    let mut out: Vec<f64> = t.vertices.iter().flatten().copied().collect();
    out.push(t.defect);
    out.push(theta);
    Ok(out)
}

#[wasm_bindgen]
pub fn pencil_curvature(p_xy: &str, p_yz: &str, p_zx: &str, q_xy: &str, q_yz: &str, q_zx: &str) -> Result<String, JsError> {
    curvature_text([p_xy, p_yz, p_zx], [q_xy, q_yz, q_zx]).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn family_curvature(a: &str, xi_x: &str, xi_y: &str) -> Result<String, JsError> {
    family_text(a, xi_x, xi_y).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn hexagon(f3: &str, u: f64, v: f64, eps: f64) -> Result<Vec<f64>, JsError> {
    hexagon_points(f3, u, v, eps).map_err(|e| JsError::new(&e))
}
