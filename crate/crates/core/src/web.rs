//! Planar 3-webs: Blaschke curvature, numeric hexagon tracing, and the
//! reduction of a pencil to the web cut out by its Casimir functions.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{CompiledExpr, ExprError, Monomial, Poly, RatExpr, Rational, Vars};
use crate::pencil::{Pencil, PencilError, TwoForm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WebError {
    #[error("web functions must share one 2-variable chart, got {0} variables")]
    Dimension(usize),
    #[error("Jacobian of (f1, f2) vanishes identically")]
    SingularJacobian,
    #[error("f3 does not depend on f{0}")]
    DegenerateFamily(usize),
    #[error("level curve left the working region while tracing toward family {family}")]
    LeftRegion { family: usize },
    #[error("root finder did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("Casimir checks failed: {0}")]
    CasimirsFailed(String),
    #[error("numeric reduction failed: {0}")]
    NumericFailed(String),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Three families of plane curves, the level sets of `f1`, `f2`, `f3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Web3 {
    pub f1: RatExpr,
    pub f2: RatExpr,
    pub f3: RatExpr,
}

impl Web3 {
    pub fn new(f1: RatExpr, f2: RatExpr, f3: RatExpr) -> Result<Self, WebError> {
        let n = f1.vars().len();
        if n != 2 || f2.vars() != f1.vars() || f3.vars() != f1.vars() {
            return Err(WebError::Dimension(n));
        }
        Ok(Web3 { f1, f2, f3 })
    }

    /// Parses three functions of `(u, v)`.
    pub fn parse(f1: &str, f2: &str, f3: &str) -> Result<Self, WebError> {
        let v = uv();
        Web3::new(crate::parse(f1, &v)?, crate::parse(f2, &v)?, crate::parse(f3, &v)?)
    }

    pub fn vars(&self) -> &Vars {
        self.f1.vars()
    }

    pub fn functions(&self) -> [&RatExpr; 3] {
        [&self.f1, &self.f2, &self.f3]
    }

    pub fn compile(&self) -> CompiledWeb {
        let fs = self.functions();
        CompiledWeb {
            f: fs.map(CompiledExpr::new),
            grad: fs.map(|f| [CompiledExpr::new(&f.diff(0)), CompiledExpr::new(&f.diff(1))]),
        }
    }
}

/// The chart `(u, v)`.
pub fn uv() -> Vars {
    Vars::new(&["u", "v"]).expect("valid names")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlaschkeCurvature {
    /// Coefficient of `df1^df2`.
    pub theta: RatExpr,
    /// Coefficient of `du^dv`.
    pub k: RatExpr,
    /// Leading coefficient of the hexagon closure defect in `eps^3`,
    /// `theta / (2 f3_1 f3_2)` with `f3_i` the partials of `f3` in the `(f1, f2)` chart.
    pub kappa: RatExpr,
}

/// `theta = 2 d_1 d_2 log(f3_1 / f3_2) df1^df2`, where `d_1, d_2` are the
/// coordinate fields of the chart `(f1, f2)` written on `(u, v)` through the
/// inverse Jacobian.
pub fn blaschke_curvature(w: &Web3) -> Result<BlaschkeCurvature, WebError> {
    let (a_u, a_v) = (w.f1.diff(0), w.f1.diff(1));
    let (b_u, b_v) = (w.f2.diff(0), w.f2.diff(1));
    let det = &a_u * &b_v - &a_v * &b_u;
    if det.is_zero() {
        return Err(WebError::SingularJacobian);
    }
    let d1 = |g: &RatExpr| (&b_v * &g.diff(0) - &b_u * &g.diff(1)) / det.clone();
    let d2 = |g: &RatExpr| (&a_u * &g.diff(1) - &a_v * &g.diff(0)) / det.clone();
    let p1 = d1(&w.f3);
    let p2 = d2(&w.f3);
    if p1.is_zero() {
        return Err(WebError::DegenerateFamily(1));
    }
    if p2.is_zero() {
        return Err(WebError::DegenerateFamily(2));
    }
    let r = &p1 / &p2;
    let log_d2 = &d2(&r) / &r;
    let theta = d1(&log_d2).scale(&Rational::from_integer(2.into()));
    let k = &theta * &det;
    let kappa = &theta / &(&p1 * &p2).scale(&Rational::from_integer(2.into()));
    Ok(BlaschkeCurvature { theta, k, kappa })
}

/// Pointwise access to the three web functions and their gradients.
pub trait NumericWeb {
    fn value(&self, i: usize, p: [f64; 2]) -> f64;
    fn grad(&self, i: usize, p: [f64; 2]) -> [f64; 2];
}

#[derive(Clone, Debug)]
pub struct CompiledWeb {
    f: [CompiledExpr; 3],
    grad: [[CompiledExpr; 2]; 3],
}

impl NumericWeb for CompiledWeb {
    fn value(&self, i: usize, p: [f64; 2]) -> f64 {
        self.f[i].eval(&p)
    }

    fn grad(&self, i: usize, p: [f64; 2]) -> [f64; 2] {
        [self.grad[i][0].eval(&p), self.grad[i][1].eval(&p)]
    }
}

/// Residual below which a point counts as on its target level set.
pub const ROOT_TOL: f64 = 1e-14;
const MAX_STEP: f64 = 0.05;
const MAX_STEPS: usize = 4000;

fn add(p: [f64; 2], s: f64, t: [f64; 2]) -> [f64; 2] {
    [p[0] + s * t[0], p[1] + s * t[1]]
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

struct Tracer<'a, W: ?Sized> {
    web: &'a W,
}

impl<W: NumericWeb + ?Sized> Tracer<'_, W> {
    /// Newton projection back onto `f_fam = level` along the gradient.
    fn project(&self, fam: usize, level: f64, mut q: [f64; 2]) -> Option<[f64; 2]> {
        for _ in 0..60 {
            let r = self.web.value(fam, q) - level;
            if !r.is_finite() {
                return None;
            }
            if r.abs() <= 1e-16 * level.abs().max(1.0) {
                return Some(q);
            }
            let g = self.web.grad(fam, q);
            let n2 = dot2(g, g);
            if !(n2 > 0.0) {
                return None;
            }
            let next = add(q, -r / n2, g);
            if next == q {
                return Some(q);
            }
            q = next;
        }
        Some(q)
    }

    /// Walks the level curve of family `fam` through `start` until family
    /// `target` takes the value `goal`.
    fn follow(&self, fam: usize, start: [f64; 2], target: usize, goal: f64) -> Result<[f64; 2], WebError> {
        let left = || WebError::LeftRegion { family: target + 1 };
        let level = self.web.value(fam, start);
        let phi = |p: [f64; 2]| self.web.value(target, p) - goal;
        let tol = ROOT_TOL * goal.abs().max(1.0);
        let mut p = start;
        let mut r = phi(p);
        for _ in 0..MAX_STEPS {
            if !r.is_finite() {
                return Err(left());
            }
            if r.abs() <= tol {
                return Ok(p);
            }
            let g = self.web.grad(fam, p);
            let gn = dot2(g, g).sqrt();
            if !(gn > 0.0) {
                return Err(left());
            }
            let mut t = [-g[1] / gn, g[0] / gn];
            let mut rate = dot2(self.web.grad(target, p), t);
            if rate * r > 0.0 {
                t = [-t[0], -t[1]];
                rate = -rate;
            }
            if !(rate.abs() > 1e-300) {
                return Err(left());
            }
            let s = (1.5 * r.abs() / rate.abs()).min(MAX_STEP);
            let at = |sigma: f64| self.project(fam, level, add(p, sigma, t));
            let q = at(s).ok_or_else(left)?;
            let rq = phi(q);
            if !rq.is_finite() {
                return Err(left());
            }
            if rq.abs() <= tol || rq.signum() != r.signum() {
                return self.bracketed(&at, &phi, (0.0, r), (s, rq), tol);
            }
            if rq.abs() >= r.abs() {
                return Err(left());
            }
            p = q;
            r = rq;
        }
        Err(left())
    }

    /// Bisection with secant polish on `sigma -> phi(at(sigma))`.
    fn bracketed(
        &self,
        at: &dyn Fn(f64) -> Option<[f64; 2]>,
        phi: &dyn Fn([f64; 2]) -> f64,
        (mut a, mut fa): (f64, f64),
        (mut b, mut fb): (f64, f64),
        tol: f64,
    ) -> Result<[f64; 2], WebError> {
        let mut best = (fb.abs(), b);
        for i in 0..200 {
            let secant = b - fb * (b - a) / (fb - fa);
            let mid = 0.5 * (a + b);
            let lo = a.min(b);
            let hi = a.max(b);
            let sigma = if i % 4 != 3 && secant > lo && secant < hi { secant } else { mid };
            let q = at(sigma).ok_or(WebError::NoConvergence { residual: best.0 })?;
            let fs = phi(q);
            if fs.abs() < best.0 {
                best = (fs.abs(), sigma);
            }
            if fs.abs() <= tol || (hi - lo) <= 1e-17 {
                return Ok(q);
            }
            if fs.signum() == fa.signum() {
                a = sigma;
                fa = fs;
            } else {
                b = sigma;
                fb = fs;
            }
        }
        if best.0 <= 1e3 * tol {
            return at(best.1).ok_or(WebError::NoConvergence { residual: best.0 });
        }
        Err(WebError::NoConvergence { residual: best.0 })
    }
}

/// One hexagon around `origin`.
#[derive(Clone, Debug, PartialEq)]
pub struct HexagonTrace {
    pub origin: [f64; 2],
    pub epsilon: f64,
    /// `A, B, C, D, E, F, G`.
    pub vertices: [[f64; 2]; 7],
    /// `f3(G) - f3(A)`.
    pub defect: f64,
}

/// Builds the hexagon of level curves through `origin`. `A` lies on the
/// first-family curve through `origin` with `f3(A) - f3(origin) = epsilon`;
/// the path then alternates families until it returns to that curve at `G`.
pub fn hexagon_trace<W: NumericWeb + ?Sized>(web: &W, origin: [f64; 2], epsilon: f64) -> Result<HexagonTrace, WebError> {
    let tr = Tracer { web };
    let l = [0, 1, 2].map(|i| web.value(i, origin));
    let a = tr.follow(0, origin, 2, l[2] + epsilon)?;
    // (family followed, family hit) for B..G
    let legs = [(1, 2), (0, 1), (2, 0), (1, 2), (0, 1), (2, 0)];
    let mut v = [a; 7];
    for (n, &(fam, hit)) in legs.iter().enumerate() {
        v[n + 1] = tr.follow(fam, v[n], hit, l[hit])?;
    }
    let defect = web.value(2, v[6]) - web.value(2, v[0]);
    Ok(HexagonTrace { origin, epsilon, vertices: v, defect })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderFit {
    pub epsilons: Vec<f64>,
    pub defects: Vec<f64>,
    /// Least-squares slope of `log|defect|` against `log eps`.
    pub exponent: f64,
    /// `defect / eps^3` at the smallest `eps`.
    pub kappa_hat: f64,
}

/// `n` geometric steps from `eps_min` to `eps_max`.
pub fn geometric_ladder(eps_min: f64, eps_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && eps_min > 0.0 && eps_max > eps_min);
    let r = (eps_max / eps_min).ln() / (n - 1) as f64;
    (0..n).map(|i| eps_min * (r * i as f64).exp()).collect()
}

pub fn hexagon_ladder<W: NumericWeb + ?Sized>(web: &W, origin: [f64; 2], epsilons: &[f64]) -> Result<LadderFit, WebError> {
    let defects = epsilons
        .iter()
        .map(|&e| hexagon_trace(web, origin, e).map(|h| h.defect))
        .collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = defects.iter().map(|d| d.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let i0 = (0..epsilons.len())
        .min_by(|&i, &j| epsilons[i].total_cmp(&epsilons[j]))
        .unwrap_or(0);
    Ok(LadderFit {
        epsilons: epsilons.to_vec(),
        defects: defects.clone(),
        exponent: sxy / sxx,
        kappa_hat: defects.get(i0).map_or(f64::NAN, |d| d / epsilons[i0].powi(3)),
    })
}

/// Casimir functions of `P`, `Q` and `P + Q`, in the pencil's chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CasimirTriple {
    pub f: RatExpr,
    pub g: RatExpr,
    pub h: RatExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { label: label.into(), passed, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.passed { "ok" } else { "FAILED" };
        if self.detail.is_empty() {
            write!(f, "{}: {s}", self.label)
        } else {
            write!(f, "{}: {s} ({})", self.label, self.detail)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CasimirReport {
    pub checks: Vec<Check>,
}

impl CasimirReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn failures(&self) -> String {
        let v: Vec<String> = self.checks.iter().filter(|c| !c.passed).map(|c| c.label.clone()).collect();
        v.join("; ")
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Fixed, irregular rational sample points in 3-space.
pub fn sample_points(n: usize) -> Vec<[Rational; 3]> {
    (0..n as i64)
        .map(|k| {
            [
                r(3 + (7 * k) % 11, 4 + k % 3),
                r(-5 + (5 * k + 3) % 13, 3 + k % 4),
                r(-2 + (3 * k + 1) % 7, 2 + k % 5),
            ]
        })
        .collect()
}

fn gradient(e: &RatExpr) -> [RatExpr; 3] {
    [e.diff(0), e.diff(1), e.diff(2)]
}

fn cross(a: &[RatExpr; 3], b: &[RatExpr; 3]) -> [RatExpr; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn verify_casimirs(pencil: &Pencil, c: &CasimirTriple) -> Result<CasimirReport, WebError> {
    let mut checks = Vec::new();
    let pq = pencil.p().add(pencil.q());
    for (name, fun, t, tname) in [("f", &c.f, pencil.p(), "P"), ("g", &c.g, pencil.q(), "Q"), ("h", &c.h, &pq, "P+Q")] {
        let bad: Vec<String> = (0..3)
            .filter_map(|i| {
                let b = t.bracket_coord(i, fun);
                (!b.is_zero()).then(|| format!("{{{},{name}}} = {b}", pencil.vars().name(i)))
            })
            .collect();
        checks.push(Check::new(format!("{name} is a Casimir of {tname}"), bad.is_empty(), bad.join(", ")));
    }
    let grads = [gradient(&c.f), gradient(&c.g), gradient(&c.h)];
    let det = {
        let n = cross(&grads[1], &grads[2]);
        (0..3).fold(RatExpr::zero(pencil.vars()), |acc, i| acc + &grads[0][i] * &n[i])
    };
    checks.push(Check::new("det J(f,g,h) = 0", det.is_zero(), if det.is_zero() { String::new() } else { det.to_string() }));
    for (a, b, la) in [(0, 1, "df, dg"), (0, 2, "df, dh"), (1, 2, "dg, dh")] {
        let n = cross(&grads[a], &grads[b]);
        let passed = n.iter().any(|e| !e.is_zero());
        checks.push(Check::new(format!("{la} independent"), passed, ""));
    }
    Ok(CasimirReport { checks })
}

/// Which route the reduction cross-check takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionMode {
    /// Exact elimination of `h` as a function of `(f, g)`, numeric if that fails.
    Auto,
    NumericOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReductionRoute {
    /// `h = H(f, g)` with `H` a rational function of `(u, v)`.
    Exact { h_of_fg: RatExpr, pullback: TwoForm },
    Numeric { points: Vec<[f64; 3]>, max_deviation: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport {
    pub curvature: TwoForm,
    pub route: ReductionRoute,
    pub agree: bool,
}

/// Agreement threshold for the numeric route.
pub const REDUCTION_TOL: f64 = 1e-6;

/// Compares the pencil curvature with the pullback of the Blaschke curvature
/// of the web of level sets of `f, g, h` along `(f, g)`.
pub fn reduction_crosscheck(pencil: &Pencil, c: &CasimirTriple, mode: ReductionMode) -> Result<ReductionReport, WebError> {
    let rep = verify_casimirs(pencil, c)?;
    if !rep.passed() {
        return Err(WebError::CasimirsFailed(rep.failures()));
    }
    let curvature = pencil.curvature()?;
    if mode == ReductionMode::Auto {
        if let Some(h_of_fg) = eliminate(c, 3)? {
            let web = Web3::new(RatExpr::var(&uv(), 0), RatExpr::var(&uv(), 1), h_of_fg.clone())?;
            let theta = blaschke_curvature(&web)?.theta.substitute(&[c.f.clone(), c.g.clone()])?;
            let n = cross(&gradient(&c.f), &gradient(&c.g));
            // (df^dg)_{xy} = n_z, _{yz} = n_x, _{zx} = n_y
            let pullback = TwoForm { xy: &theta * &n[2], yz: &theta * &n[0], zx: &theta * &n[1] };
            let agree = pullback == curvature;
            return Ok(ReductionReport { curvature, route: ReductionRoute::Exact { h_of_fg, pullback }, agree });
        }
    }
    let (points, max_deviation) = numeric_pullback(&curvature, c, 10)?;
    Ok(ReductionReport {
        curvature,
        route: ReductionRoute::Numeric { points, max_deviation },
        agree: max_deviation <= REDUCTION_TOL,
    })
}

/// Monomials in two variables of total degree at most `d`.
fn monomials2(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for t in 0..=d {
        for i in 0..=t {
            out.push(Monomial::from_exponents(vec![i, t - i]));
        }
    }
    out
}

/// Finds `H` with `h = H(f, g)` exactly, trying numerator and denominator
/// degrees up to `max_degree`. Coefficients come from an exact nullspace
/// computed on sample values; the candidate is then certified symbolically.
pub fn eliminate(c: &CasimirTriple, max_degree: u32) -> Result<Option<RatExpr>, WebError> {
    let v = uv();
    for d in 1..=max_degree {
        let monos = monomials2(d);
        let m = monos.len();
        let mut rows = Vec::new();
        for p in sample_points(6 * m + 20) {
            let (Ok(f), Ok(g), Ok(h)) = (c.f.eval(&p), c.g.eval(&p), c.h.eval(&p)) else {
                continue;
            };
            let vals: Vec<Rational> = monos
                .iter()
                .map(|mo| {
                    let e = mo.exponents();
                    num_traits::pow(f.clone(), e[0] as usize) * num_traits::pow(g.clone(), e[1] as usize)
                })
                .collect();
            // D(f,g) h - N(f,g) = 0; unknowns are D's coefficients then N's
            let mut row: Vec<Rational> = vals.iter().map(|x| x * &h).collect();
            row.extend(vals.iter().map(|x| -x.clone()));
            rows.push(row);
            if rows.len() >= 2 * m + 12 {
                break;
            }
        }
        for sol in nullspace(rows, 2 * m) {
            let den = Poly::from_terms(&v, monos.iter().cloned().zip(sol[..m].iter().cloned()));
            let num = Poly::from_terms(&v, monos.iter().cloned().zip(sol[m..].iter().cloned()));
            if den.is_zero() {
                continue;
            }
            let Ok(h_of_fg) = RatExpr::new(num, den) else { continue };
            match h_of_fg.substitute(&[c.f.clone(), c.g.clone()]) {
                Ok(back) if back == c.h => return Ok(Some(h_of_fg)),
                _ => continue,
            }
        }
    }
    Ok(None)
}

/// Basis of the right nullspace of a rational matrix with `ncols` columns.
fn nullspace(mut rows: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); ncols];
            v[fc] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][fc].clone();
            }
            v
        })
        .collect()
}

struct Lifted {
    grads: [[CompiledExpr; 3]; 3],
}

impl Lifted {
    fn grad(&self, i: usize, p: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|k| self.grads[i][k].eval(&p))
    }

    /// Lifts of `d/df`, `d/dg` orthogonal to the common kernel of `df, dg`.
    fn fields(&self, p: [f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let a = self.grad(0, p);
        let b = self.grad(1, p);
        let n = cross3(a, b);
        let n2 = dot3(n, n);
        let vf = cross3(b, n).map(|x| x / n2);
        let vg = cross3(n, a).map(|x| x / n2);
        (vf, vg, n)
    }

    fn log_ratio(&self, p: [f64; 3]) -> f64 {
        let (vf, vg, _) = self.fields(p);
        let dh = self.grad(2, p);
        (dot3(dh, vf) / dot3(dh, vg)).abs().ln()
    }
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

/// 4th-order central derivative of `phi` along the straight line through `p` with direction `v`.
fn along(phi: &dyn Fn([f64; 3]) -> f64, p: [f64; 3], v: [f64; 3], h: f64) -> f64 {
    let at = |s: f64| phi([p[0] + s * v[0], p[1] + s * v[1], p[2] + s * v[2]]);
    (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
}

/// Points whose Richardson error estimate exceeds this are skipped.
const STENCIL_GUARD: f64 = 1e-7;

/// Numeric `pi^* theta` against the exact curvature at sample points.
fn numeric_pullback(curv: &TwoForm, c: &CasimirTriple, n: usize) -> Result<(Vec<[f64; 3]>, f64), WebError> {
    let lifted = Lifted { grads: [&c.f, &c.g, &c.h].map(|e| gradient(e).each_ref().map(CompiledExpr::new)) };
    let inner = |q: [f64; 3], h: f64| {
        let (_, vg, _) = lifted.fields(q);
        along(&|x| lifted.log_ratio(x), q, vg, h)
    };
    // nested 4th-order stencils, with one Richardson step to cancel the h^4 term
    // returns the estimate and its Richardson error estimate
    let k_at = |p: [f64; 3], vf: [f64; 3]| {
        let d = |h: f64| 2.0 * along(&|q| inner(q, h), p, vf, h);
        let (coarse, fine) = (d(2e-3), d(1e-3));
        ((16.0 * fine - coarse) / 15.0, (fine - coarse).abs() / 15.0)
    };
    let mut points = Vec::new();
    let mut worst = 0.0f64;
    for p in sample_points(200) {
        if points.len() == n {
            break;
        }
        let Ok(exact) = curv.eval(&p) else { continue };
        if [&c.f, &c.g, &c.h].iter().any(|e| e.eval(&p).is_err()) {
            continue;
        }
        let pf = p.clone().map(|x| crate::expr::rational_to_f64(&x));
        let (vf, vg, nrm) = lifted.fields(pf);
        let dh = lifted.grad(2, pf);
        let scale = dot3(nrm, nrm).sqrt();
        if !(scale > 1e-3) || dot3(dh, vg).abs() < 1e-6 || dot3(dh, vf).abs() < 1e-6 {
            continue;
        }
        let (k, err) = k_at(pf, vf);
        // the stencil straddles a singular locus; the estimate is not trustworthy here
        if !(err * scale < STENCIL_GUARD) {
            continue;
        }
        // (df^dg)_{xy} = n_z, _{yz} = n_x, _{zx} = n_y
        let approx = [k * nrm[2], k * nrm[0], k * nrm[1]];
        let exact = exact.map(|x| crate::expr::rational_to_f64(&x));
        if approx.iter().any(|x| !x.is_finite()) {
            continue;
        }
        for (a, e) in approx.iter().zip(&exact) {
            worst = worst.max((a - e).abs());
        }
        points.push(pf);
    }
    if points.len() < n {
        return Err(WebError::NumericFailed(format!("only {} usable sample points", points.len())));
    }
    Ok((points, worst))
}
