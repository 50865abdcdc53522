use bipencil::algebra::{
    flatness_obstruction_report, is_cocycle, lie_pencil_curvature, linear_pencil_curvature, AlgebraError, LiePencilDef,
    LieStructure, Linearization,
};
use bipencil::connection::{verify_frame, verify_theorem, ConnectionError, Gauge};
use bipencil::expr::format_rational;
use bipencil::pencil::{curvature_numeric, Pencil, TwoForm, DEFAULT_STEP};
use bipencil::poisson::PoissonTensor;
use bipencil::web::{
    blaschke_curvature, geometric_ladder, hexagon_ladder, reduction_crosscheck, sample_points, verify_casimirs, Check,
    ReductionMode, ReductionRoute, WebError, REDUCTION_TOL,
};
use bipencil::{ExprError, PencilError, RatExpr, Rational, Vars};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::problem::{Kind, Problem, Source};
use crate::report::Report;
use crate::CliError;

/// A finished report and whether every check in it passed.
pub type Outcome = Result<(Report, bool), CliError>;

/// Numeric and exact curvature agree when within this.
pub const NUMERIC_TOL: f64 = 1e-6;

fn check(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { label: label.into(), passed, detail: detail.into() }
}

fn checks_value(checks: &[Check]) -> Value {
    Value::Array(checks.iter().map(|c| Value::String(c.to_string())).collect())
}

fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

fn basis(vars: &Vars) -> [String; 3] {
    let n = |i: usize| vars.name(i).to_string();
    [format!("d{}^d{}", n(0), n(1)), format!("d{}^d{}", n(1), n(2)), format!("d{}^d{}", n(2), n(0))]
}

/// Each coefficient on its own, so it re-parses.
fn components(form: &TwoForm) -> Value {
    let b = basis(form.xy.vars());
    let mut m = serde_json::Map::new();
    for (k, c) in b.iter().zip([&form.xy, &form.yz, &form.zx]) {
        m.insert(k.clone(), Value::String(c.to_string()));
    }
    Value::Object(m)
}

fn pole(e: ExprError, point: &[Rational]) -> CliError {
    CliError::Input(format!("at {}: {e}", fmt_point(point)))
}

fn tensor_checks(p: &PoissonTensor, q: &PoissonTensor) -> Vec<Check> {
    let sum = p.add(q);
    [("P", p), ("Q", q), ("P+Q", &sum)]
        .into_iter()
        .map(|(name, t)| {
            let j = t.jacobiator();
            let detail = if j.is_zero() { String::new() } else { format!("jacobiator = {j}") };
            check(format!("{name} satisfies Jacobi"), j.is_zero(), detail)
        })
        .collect()
}

fn algebra_check(label: &str, g: &LieStructure) -> Check {
    let [xy, yz, zx] = [(0, 1), (1, 2), (2, 0)].map(|(i, j)| g.bracket(i, j).clone());
    match LieStructure::from_brackets(xy, yz, zx) {
        Ok(_) => check(label, true, ""),
        Err(e) => check(label, false, e.to_string()),
    }
}

pub fn check_cmd(pr: &Problem) -> Outcome {
    let mut checks = Vec::new();
    match (&pr.source, pr.kind) {
        (_, Kind::Web) => {
            let web = pr.web.as_ref().expect("web kind has functions");
            let (jac, dep) = match blaschke_curvature(web) {
                Ok(_) => (check("Jacobian of (f1, f2) not identically zero", true, ""), check("f3 depends on f1 and f2", true, "")),
                Err(WebError::SingularJacobian) => (
                    check("Jacobian of (f1, f2) not identically zero", false, ""),
                    check("f3 depends on f1 and f2", false, "not checked"),
                ),
                Err(e @ WebError::DegenerateFamily(_)) => {
                    (check("Jacobian of (f1, f2) not identically zero", true, ""), check("f3 depends on f1 and f2", false, e.to_string()))
                }
                Err(e) => return Err(CliError::Math(e.to_string())),
            };
            checks.push(jac);
            checks.push(dep);
        }
        (Source::Linear { algebra, cocycle }, _) => {
            let lie = algebra_check("algebra satisfies Jacobi", algebra);
            let ok = lie.passed;
            checks.push(lie);
            checks.push(if ok {
                check("A is a 2-cocycle", is_cocycle(algebra, cocycle), format!("{cocycle}"))
            } else {
                check("A is a 2-cocycle", false, "not checked")
            });
        }
        (Source::Lie { p, q }, _) => {
            checks.push(algebra_check("P satisfies Jacobi", p));
            checks.push(algebra_check("Q satisfies Jacobi", q));
            checks.push(algebra_check("P+Q satisfies Jacobi", &p.add(q)));
        }
        (Source::Tensors, _) => {
            let (p, q) = pr.tensors()?;
            checks.extend(tensor_checks(p, q));
            let valid = checks.iter().all(|c| c.passed);
            if let (Some(c), true) = (&pr.casimirs, valid) {
                let pen = Pencil::new_unchecked(p.clone(), q.clone());
                let rep = verify_casimirs(&pen, c).map_err(|e| CliError::Math(e.to_string()))?;
                checks.extend(rep.checks);
            }
            if let (Some(frame), true) = (&pr.frame, valid) {
                let pen = Pencil::new_unchecked(p.clone(), q.clone());
                checks.push(match verify_frame(&pen, frame) {
                    Ok(_) => check("frame: P = X^Y, Q = X^Z, commutators of pencil shape", true, ""),
                    Err(e) => check("frame: P = X^Y, Q = X^Z, commutators of pencil shape", false, e.to_string()),
                });
            }
        }
    }
    let ok = checks.iter().all(|c| c.passed);
    let mut r = Report::new();
    r.set("kind", pr.kind.name())
        .set("checks", checks_value(&checks))
        .set("result", if ok { "pass" } else { "fail" });
    Ok((r, ok))
}

fn to_f64(p: &[Rational]) -> [f64; 3] {
    [0, 1, 2].map(|i| p[i].to_f64().unwrap_or(f64::NAN))
}

fn fmt_values(vars: &Vars, v: &[Rational; 3]) -> String {
    let b = basis(vars);
    let parts: Vec<String> = b.iter().zip(v).map(|(k, c)| format!("{k} = {}", format_rational(c))).collect();
    parts.join(", ")
}

/// Cross-checks the specialised formula when the file carries an algebra.
fn specialised(pr: &Problem) -> Result<Option<(&'static str, TwoForm)>, CliError> {
    let math = |e: AlgebraError| CliError::Math(e.to_string());
    Ok(match &pr.source {
        Source::Tensors => None,
        Source::Linear { algebra, cocycle } => Some(("linear", linear_pencil_curvature(algebra, cocycle).map_err(math)?)),
        Source::Lie { p, q } => {
            let d = LiePencilDef::new(p.clone(), q.clone()).map_err(math)?;
            Some(("lie", lie_pencil_curvature(&d).map_err(math)?))
        }
    })
}

pub fn curvature_cmd(pr: &Problem, at: &[Vec<Rational>], numeric: bool, step: Option<f64>) -> Outcome {
    if pr.kind == Kind::Web {
        return Err(CliError::Input("curvature applies to pencil files; use web-curvature for webs".into()));
    }
    let pen = pr.pencil()?;
    let form = pen.curvature().map_err(|e| CliError::Math(e.to_string()))?;
    let mut ok = true;
    let mut r = Report::new();
    r.set("kind", pr.kind.name()).set("curvature", form.to_string()).set("components", components(&form));
    if let Some((name, other)) = specialised(pr)? {
        let agrees = other == form;
        ok &= agrees;
        r.set(&format!("{name} formula agrees"), agrees);
    }
    let mut points: Vec<Vec<Rational>> = at.to_vec();
    points.extend(pr.points.iter().cloned());
    if !points.is_empty() {
        let mut vals = Vec::new();
        for p in &points {
            let v = form.eval(p).map_err(|e| pole(e, p))?;
            vals.push(Value::String(format!("{}: {}", fmt_point(p), fmt_values(&pr.vars, &v))));
        }
        r.set("at", Value::Array(vals));
    }
    if numeric || pr.options.numeric_check {
        let h = step.or(pr.options.step).unwrap_or(DEFAULT_STEP);
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Input(format!("step must be positive, got {h}")));
        }
        let candidates: Vec<Vec<Rational>> = if points.is_empty() {
            sample_points(10).into_iter().map(|p| p.to_vec()).collect()
        } else {
            points.clone()
        };
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for p in &candidates {
            let Ok(exact) = form.eval(p) else {
                rows.push(Value::String(format!("{}: skipped (pole)", fmt_point(p))));
                continue;
            };
            match curvature_numeric(&pen, to_f64(p), h) {
                Ok(num) => {
                    let dev = (0..3).map(|i| (num[i] - exact[i].to_f64().unwrap_or(f64::NAN)).abs()).fold(0.0, f64::max);
                    worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
                    rows.push(Value::String(format!("{}: deviation {dev:.1e}", fmt_point(p))));
                }
                Err(e) => rows.push(Value::String(format!("{}: skipped ({e})", fmt_point(p)))),
            }
        }
        let agrees = worst <= NUMERIC_TOL;
        ok &= agrees;
        r.set("numeric check", json!({
            "step": format!("{h:e}"),
            "tolerance": format!("{NUMERIC_TOL:e}"),
            "points": rows,
            "max deviation": format!("{worst:.1e}"),
            "agrees": agrees,
        }));
    }
    r.set("verdict", if form.is_zero() { "FLAT" } else { "NON-FLAT" });
    Ok((r, ok))
}

pub fn linearize_cmd(pr: &Problem, at: Option<Vec<Rational>>) -> Outcome {
    let point = at
        .or_else(|| pr.points.first().cloned())
        .ok_or_else(|| CliError::Input("linearize needs a point: --at x,y,z or `points` in the file".into()))?;
    let pen = pr.pencil()?;
    let rank = pen.rank_at(&point).map_err(|e| match e {
        PencilError::Expr(x) => pole(x, &point),
        other => CliError::Math(other.to_string()),
    })?;
    let rep = flatness_obstruction_report(&pen, &point).map_err(|e| match e {
        AlgebraError::NotSingular => CliError::Input(format!("{} is not a singular point: {e}", fmt_point(&point))),
        AlgebraError::Expr(x) => pole(x, &point),
        other => CliError::Math(other.to_string()),
    })?;
    let mut r = Report::new();
    r.set("kind", pr.kind.name()).set("point", fmt_point(&point)).set("rank", rank);
    match &rep.linearization {
        Linearization::Linear { vanishing, algebra, cocycle } => {
            r.set("linearization", "linear pencil")
                .set("vanishing combination", vanishing.to_string())
                .set("algebra", algebra.to_string())
                .set("cocycle", cocycle.to_string());
        }
        Linearization::Lie(d) => {
            r.set("linearization", "lie pencil").set("P", d.p.to_string()).set("Q", d.q.to_string());
        }
    }
    r.set("kronecker", rep.kronecker)
        .set("curvature", rep.curvature.as_ref().map_or(Value::Null, |c| Value::String(c.to_string())))
        .set("verdict", rep.verdict.to_string());
    Ok((r, true))
}

pub fn web_cmd(pr: &Problem) -> Outcome {
    let web = pr
        .web
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("web-curvature needs a web file, got {}", pr.kind.name())))?;
    let b = blaschke_curvature(web).map_err(|e| CliError::Math(e.to_string()))?;
    let mut r = Report::new();
    r.set("kind", "web")
        .set("functions", Value::Array(web.functions().iter().map(|f| Value::String(f.to_string())).collect()))
        .set("theta", b.theta.to_string())
        .set("k", b.k.to_string())
        .set("kappa", b.kappa.to_string())
        .set("hexagonal", b.theta.is_zero());
    if let Some(h) = &pr.hexagon {
        let eps = geometric_ladder(h.eps_min, h.eps_max, h.steps);
        let fit = hexagon_ladder(&web.compile(), h.origin, &eps).map_err(|e| CliError::Math(e.to_string()))?;
        let kappa = b.kappa.eval_f64(&h.origin).map_err(|e| CliError::Input(e.to_string()))?;
        r.set("hexagon", json!({
            "origin": format!("({}, {})", h.origin[0], h.origin[1]),
            "epsilons": fit.epsilons.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            "defects": fit.defects.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>(),
            "exponent": format!("{:.3}", fit.exponent),
            "kappa_hat": format!("{:.4}", fit.kappa_hat),
            "kappa at origin": format!("{kappa:.4}"),
        }));
    }
    Ok((r, true))
}

pub fn reduce_cmd(pr: &Problem, numeric: bool) -> Outcome {
    let c = pr
        .casimirs
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("reduce-check needs a reduction file, got {}", pr.kind.name())))?;
    let pen = pr.pencil()?;
    let casimirs = verify_casimirs(&pen, c).map_err(|e| CliError::Math(e.to_string()))?;
    let mut r = Report::new();
    r.set("kind", pr.kind.name()).set("casimirs", checks_value(&casimirs.checks));
    if !casimirs.passed() {
        r.set("agree", false);
        return Ok((r, false));
    }
    let mode = if numeric || pr.options.numeric_check { ReductionMode::NumericOnly } else { ReductionMode::Auto };
    let rep = reduction_crosscheck(&pen, c, mode).map_err(|e| CliError::Math(e.to_string()))?;
    r.set("curvature", rep.curvature.to_string());
    match &rep.route {
        ReductionRoute::Exact { h_of_fg, pullback } => {
            r.set("route", "exact").set("h(f, g)", h_of_fg.to_string()).set("pullback", pullback.to_string());
        }
        ReductionRoute::Numeric { points, max_deviation } => {
            r.set("route", "numeric")
                .set("points", points.len())
                .set("max deviation", format!("{max_deviation:.1e}"))
                .set("tolerance", format!("{REDUCTION_TOL:e}"));
        }
    }
    r.set("agree", rep.agree);
    Ok((r, rep.agree))
}

fn exprs(v: &[RatExpr]) -> Value {
    Value::Array(v.iter().map(|e| Value::String(e.to_string())).collect())
}

pub fn connection_cmd(pr: &Problem, alt: bool) -> Outcome {
    let frame = pr
        .frame
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("connection-check needs a connection file, got {}", pr.kind.name())))?;
    let pen = pr.pencil()?;
    let gauge = if alt { Gauge::alt(&pr.vars) } else { Gauge::Canonical };
    let rep = match verify_theorem(&pen, frame, &gauge) {
        Ok(rep) => rep,
        Err(e @ (ConnectionError::WedgeMismatch { .. } | ConnectionError::Inconsistent(_) | ConnectionError::Degenerate)) => {
            let mut r = Report::new();
            r.set("kind", pr.kind.name()).set("frame", format!("rejected: {e}")).set("holds", false);
            return Ok((r, false));
        }
        Err(e) => return Err(CliError::Math(e.to_string())),
    };
    let c = &rep.commutators;
    let conn = &rep.connection;
    let mut r = Report::new();
    r.set("kind", pr.kind.name())
        .set("convention", rep.convention)
        .set("gauge", if alt { "alt" } else { "default" })
        .set("commutators", json!({
            "a": c.a.to_string(), "b": c.b.to_string(), "c": c.c.to_string(),
            "u": c.u.to_string(), "v": c.v.to_string(), "w": c.w.to_string(),
        }))
        .set("connection", json!({
            "alpha(X, Y, Z)": exprs(&conn.alpha),
            "beta(X, Y, Z)": exprs(&conn.beta),
            "gamma(X, Y, Z)": exprs(&conn.gamma),
        }))
        .set("Ric(e_i, e_j) by row", json!({
            "X": exprs(&rep.ricci.ric[0]),
            "Y": exprs(&rep.ricci.ric[1]),
            "Z": exprs(&rep.ricci.ric[2]),
        }))
        .set("Alt Ric", rep.ricci.alt.to_string())
        .set("-4 Alt Ric", rep.minus_four_alt.to_string())
        .set("curvature", rep.curvature.to_string())
        .set("holds", rep.holds);
    Ok((r, rep.holds))
}
