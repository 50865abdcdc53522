//! Poisson pencils on 3-space: pointwise classification and the curvature form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::{format_rational, ExprError, RatExpr, Rational, Vars};
use crate::poisson::{is_compatible, PoissonError, PoissonTensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PencilError {
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error("P and Q are not compatible: P+Q fails the Jacobi identity ({jacobiator})")]
    Incompatible { jacobiator: String },
    #[error("all three determinants vanish identically: P and Q are proportional")]
    Proportional,
    #[error("pencil has rank 0 at the point, spectrum is undefined")]
    ZeroRank,
    #[error("singular transformation matrix")]
    SingularMatrix,
    #[error("determinant for the {axis} term is nearly zero near the point ({value:e})")]
    NearSingular { axis: Axis, value: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Chart axis. Each axis owns one curvature term: `z` gives `dx^dy`,
/// `x` gives `dy^dz`, `y` gives `dz^dx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        match i {
            0 => Axis::X,
            1 => Axis::Y,
            2 => Axis::Z,
            _ => panic!("axis index {i} out of range"),
        }
    }

    /// The cyclic pair `(i, j)` following this axis.
    pub fn others(self) -> (usize, usize) {
        let k = self.index();
        ((k + 1) % 3, (k + 2) % 3)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

/// 2-form `xy dx^dy + yz dy^dz + zx dz^dx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoForm {
    pub xy: RatExpr,
    pub yz: RatExpr,
    pub zx: RatExpr,
}

impl TwoForm {
    pub fn zero(vars: &Vars) -> Self {
        let z = RatExpr::zero(vars);
        TwoForm { xy: z.clone(), yz: z.clone(), zx: z }
    }

    pub fn is_zero(&self) -> bool {
        self.xy.is_zero() && self.yz.is_zero() && self.zx.is_zero()
    }

    /// Coefficient of the term owned by `axis`.
    pub fn component(&self, axis: Axis) -> &RatExpr {
        match axis {
            Axis::Z => &self.xy,
            Axis::X => &self.yz,
            Axis::Y => &self.zx,
        }
    }

    fn component_mut(&mut self, axis: Axis) -> &mut RatExpr {
        match axis {
            Axis::Z => &mut self.xy,
            Axis::X => &mut self.yz,
            Axis::Y => &mut self.zx,
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<[Rational; 3], ExprError> {
        Ok([self.xy.eval(point)?, self.yz.eval(point)?, self.zx.eval(point)?])
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<[f64; 3], ExprError> {
        Ok([self.xy.eval_f64(point)?, self.yz.eval_f64(point)?, self.zx.eval_f64(point)?])
    }

    /// Nonzero terms as `(coefficient, "dx^dy")` pairs.
    pub fn terms(&self) -> Vec<(&RatExpr, String)> {
        let v = self.xy.vars();
        let n = |i: usize| v.name(i).to_string();
        [(&self.xy, 0, 1), (&self.yz, 1, 2), (&self.zx, 2, 0)]
            .into_iter()
            .filter(|(c, _, _)| !c.is_zero())
            .map(|(c, i, j)| (c, format!("d{}^d{}", n(i), n(j))))
            .collect()
    }
}

impl fmt::Display for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, basis)) in terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c} {basis}")?;
        }
        Ok(())
    }
}

/// Projective pair `(alpha:beta)` with `alpha P + beta Q = 0` at a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePair {
    pub alpha: Rational,
    pub beta: Rational,
}

impl ProjectivePair {
    /// Scales to coprime integers with the first nonzero entry positive.
    pub fn normalized(alpha: Rational, beta: Rational) -> Self {
        assert!(!(alpha.is_zero() && beta.is_zero()), "zero projective pair");
        let l = alpha.denom().lcm(beta.denom());
        let a: BigInt = (&alpha * Rational::from_integer(l.clone())).to_integer();
        let b: BigInt = (&beta * Rational::from_integer(l)).to_integer();
        let g = a.gcd(&b);
        let (mut a, mut b) = (a / &g, b / &g);
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
        }
        ProjectivePair { alpha: Rational::from_integer(a), beta: Rational::from_integer(b) }
    }
}

impl fmt::Display for ProjectivePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", format_rational(&self.alpha), format_rational(&self.beta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Spectrum {
    Empty,
    Single(ProjectivePair),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    p: PoissonTensor,
    q: PoissonTensor,
}

impl Pencil {
    /// Validates that `p`, `q` and `p + q` are Poisson.
    pub fn new(p: PoissonTensor, q: PoissonTensor) -> Result<Self, PencilError> {
        if !is_compatible(&p, &q)? {
            let j = p.add(&q).jacobiator();
            return Err(PencilError::Incompatible { jacobiator: j.to_string() });
        }
        Ok(Pencil { p, q })
    }

    pub fn new_unchecked(p: PoissonTensor, q: PoissonTensor) -> Self {
        Pencil { p, q }
    }

    pub fn p(&self) -> &PoissonTensor {
        &self.p
    }

    pub fn q(&self) -> &PoissonTensor {
        &self.q
    }

    pub fn vars(&self) -> &Vars {
        self.p.vars()
    }

    pub fn rank_at(&self, point: &[Rational]) -> Result<usize, PencilError> {
        let p = self.p.eval(point)?;
        let q = self.q.eval(point)?;
        let zero = |v: &[Rational; 3]| v.iter().all(Zero::is_zero);
        Ok(if zero(&p) && zero(&q) { 0 } else { 2 })
    }

    pub fn spectrum_at(&self, point: &[Rational]) -> Result<Spectrum, PencilError> {
        let p = self.p.eval(point)?;
        let q = self.q.eval(point)?;
        let pz = p.iter().all(Zero::is_zero);
        if pz && q.iter().all(Zero::is_zero) {
            return Err(PencilError::ZeroRank);
        }
        let proportional = (0..3).all(|i| {
            let j = (i + 1) % 3;
            (&p[i] * &q[j] - &p[j] * &q[i]).is_zero()
        });
        if !proportional {
            return Ok(Spectrum::Empty);
        }
        if pz {
            return Ok(Spectrum::Single(ProjectivePair::normalized(Rational::one(), Rational::zero())));
        }
        // q = mu p, so mu P - Q vanishes
        let i = (0..3).find(|&i| !p[i].is_zero()).expect("p nonzero");
        let mu = &q[i] / &p[i];
        Ok(Spectrum::Single(ProjectivePair::normalized(mu, -Rational::one())))
    }

    /// Rank 2 with empty spectrum. Rank-0 points are not Kronecker.
    pub fn is_kronecker_at(&self, point: &[Rational]) -> Result<bool, PencilError> {
        match self.spectrum_at(point) {
            Ok(s) => Ok(s == Spectrum::Empty),
            Err(PencilError::ZeroRank) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// `{k,i}_P {k,j}_Q - {k,i}_Q {k,j}_P` for the axis `k` and its cyclic pair `(i, j)`.
    pub fn delta(&self, axis: Axis) -> RatExpr {
        let k = axis.index();
        let (i, j) = axis.others();
        let pi = self.p.entry(k, i);
        let pj = self.p.entry(k, j);
        let qi = self.q.entry(k, i);
        let qj = self.q.entry(k, j);
        pi * qj - qi * pj
    }

    /// The curvature 2-form. A term whose determinant vanishes identically is omitted.
    pub fn curvature(&self) -> Result<TwoForm, PencilError> {
        let mut out = TwoForm::zero(self.vars());
        let mut any = false;
        for axis in Axis::ALL {
            let d = self.delta(axis);
            if d.is_zero() {
                continue;
            }
            any = true;
            let k = axis.index();
            let xk = RatExpr::var(self.vars(), k);
            let div_p = self.p.sgrad(&xk).divergence();
            let div_q = self.q.sgrad(&xk).divergence();
            let a = self.p.bracket_coord(k, &(&div_q / &d));
            let b = self.q.bracket_coord(k, &(&div_p / &d));
            *out.component_mut(axis) = (a - b).scale(&Rational::from_integer(2.into()));
        }
        if !any {
            return Err(PencilError::Proportional);
        }
        Ok(out)
    }

    pub fn is_flat(&self) -> Result<bool, PencilError> {
        Ok(self.curvature()?.is_zero())
    }

    /// `(a P + b Q, c P + d Q)` for the matrix `[[a, b], [c, d]]`.
    pub fn gl2_transform(&self, m: [[Rational; 2]; 2]) -> Result<Pencil, PencilError> {
        let [[a, b], [c, d]] = &m;
        if (a * d - b * c).is_zero() {
            return Err(PencilError::SingularMatrix);
        }
        Ok(Pencil {
            p: self.p.combine(a, &self.q, b),
            q: self.p.combine(c, &self.q, d),
        })
    }
}

/// Pointwise evaluation of the two tensors, as `([P_xy, P_yz, P_zx], [Q_xy, Q_yz, Q_zx])`.
pub trait NumericPencil {
    fn tensors(&self, x: [f64; 3]) -> ([f64; 3], [f64; 3]);
}

impl NumericPencil for Pencil {
    fn tensors(&self, x: [f64; 3]) -> ([f64; 3], [f64; 3]) {
        let p = self.p.eval_f64(&x).unwrap_or([f64::NAN; 3]);
        let q = self.q.eval_f64(&x).unwrap_or([f64::NAN; 3]);
        (p, q)
    }
}

impl<F> NumericPencil for F
where
    F: Fn([f64; 3]) -> ([f64; 3], [f64; 3]),
{
    fn tensors(&self, x: [f64; 3]) -> ([f64; 3], [f64; 3]) {
        self(x)
    }
}

/// `T^{ij}` from the stored components.
fn entry_f64(t: &[f64; 3], i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => t[0],
        (1, 2) => t[1],
        (2, 0) => t[2],
        (1, 0) => -t[0],
        (2, 1) => -t[1],
        (0, 2) => -t[2],
        _ => 0.0,
    }
}

fn shifted(x: [f64; 3], i: usize, s: f64) -> [f64; 3] {
    let mut y = x;
    y[i] += s;
    y
}

/// Below this the determinant is treated as zero.
const DELTA_FLOOR: f64 = 1e-12;

/// Step for `curvature_numeric` in double precision.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Finite-difference evaluation of the curvature coefficients
/// `[dx^dy, dy^dz, dz^dx]` at `x`.
///
/// Both the divergences and the outer bracket use 4th-order central
/// stencils. A term is skipped when its determinant is below
/// the floor at every outer stencil point.
pub fn curvature_numeric<N: NumericPencil + ?Sized>(
    pencil: &N,
    x: [f64; 3],
    h: f64,
) -> Result<[f64; 3], PencilError> {
    let mut out = [0.0; 3];
    for axis in Axis::ALL {
        let k = axis.index();
        let (i, j) = axis.others();
        let delta = |y: [f64; 3]| {
            let (p, q) = pencil.tensors(y);
            entry_f64(&p, k, i) * entry_f64(&q, k, j) - entry_f64(&q, k, i) * entry_f64(&p, k, j)
        };
        // divergence of the field with components T^{k m}
        let div = |y: [f64; 3], use_q: bool| {
            let comp = |z: [f64; 3], m: usize| {
                let (p, q) = pencil.tensors(z);
                entry_f64(if use_q { &q } else { &p }, k, m)
            };
            (0..3)
                .filter(|&m| m != k)
                .map(|m| {
                    let f = |s: f64| comp(shifted(y, m, s), m);
                    (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
                })
                .sum::<f64>()
        };
        let mut stencil = vec![x];
        for m in 0..3 {
            for s in [h, -h, 2.0 * h, -2.0 * h] {
                stencil.push(shifted(x, m, s));
            }
        }
        let deltas: Vec<f64> = stencil.iter().map(|&y| delta(y)).collect();
        if deltas.iter().all(|d| d.abs() < DELTA_FLOOR) {
            continue;
        }
        if let Some(&d) = deltas.iter().find(|d| d.abs() < DELTA_FLOOR) {
            return Err(PencilError::NearSingular { axis, value: d });
        }
        let ratio_q = |y: [f64; 3]| div(y, true) / delta(y);
        let ratio_p = |y: [f64; 3]| div(y, false) / delta(y);
        let (p0, q0) = pencil.tensors(x);
        let mut acc = 0.0;
        for m in (0..3).filter(|&m| m != k) {
            let d = |f: &dyn Fn([f64; 3]) -> f64| {
                let g = |s: f64| f(shifted(x, m, s));
                (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h)
            };
            let dq = d(&ratio_q);
            let dp = d(&ratio_p);
            acc += entry_f64(&p0, k, m) * dq - entry_f64(&q0, k, m) * dp;
        }
        let slot = match axis {
            Axis::Z => 0,
            Axis::X => 1,
            Axis::Y => 2,
        };
        out[slot] = 2.0 * acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(xy: &str, yz: &str, zx: &str) -> PoissonTensor {
        PoissonTensor::parse(&Vars::xyz(), xy, yz, zx).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn lie_pencil() -> Pencil {
        Pencil::new(t("0", "y", "x"), t("0", "-(x+y)", "0")).unwrap()
    }

    #[test]
    fn deltas_of_lie_pencil() {
        let pen = lie_pencil();
        let v = Vars::xyz();
        assert_eq!(pen.delta(Axis::Z), crate::parse("x*(x+y)", &v).unwrap());
        assert!(pen.delta(Axis::X).is_zero());
        assert!(pen.delta(Axis::Y).is_zero());
    }

    #[test]
    fn golden_curvature() {
        let c = lie_pencil().curvature().unwrap();
        assert_eq!(c.to_string(), "(-4)/((x+y)^2) dx^dy");
        assert!(c.yz.is_zero() && c.zx.is_zero());
    }

    #[test]
    fn constant_pencil_is_flat() {
        let pen = Pencil::new(t("1", "0", "2"), t("0", "3", "-1")).unwrap();
        assert!(pen.is_flat().unwrap());
        assert_eq!(pen.curvature().unwrap().to_string(), "0");
    }

    #[test]
    fn proportional_pencil_rejected() {
        let pen = Pencil::new(t("x", "0", "0"), t("2*x", "0", "0")).unwrap();
        assert_eq!(pen.curvature(), Err(PencilError::Proportional));
    }

    #[test]
    fn spectrum_cases() {
        let pen = Pencil::new(t("1", "0", "0"), t("0", "1", "0")).unwrap();
        let o = [r(0), r(0), r(0)];
        assert_eq!(pen.spectrum_at(&o).unwrap(), Spectrum::Empty);
        let pen = Pencil::new(t("1", "x", "0"), t("2", "2*x", "0")).unwrap();
        let s = pen.spectrum_at(&[r(1), r(0), r(0)]).unwrap();
        assert_eq!(s, Spectrum::Single(ProjectivePair::normalized(r(2), r(-1))));
        assert_eq!(s, Spectrum::Single(ProjectivePair::normalized(r(-4), r(2))));
        let zero = Pencil::new_unchecked(t("0", "0", "0"), t("0", "0", "0"));
        assert_eq!(zero.rank_at(&o).unwrap(), 0);
        assert_eq!(zero.spectrum_at(&o), Err(PencilError::ZeroRank));
    }

    #[test]
    fn kronecker_locus_of_lie_pencil() {
        let pen = lie_pencil();
        assert!(pen.is_kronecker_at(&[r(1), r(1), r(0)]).unwrap());
        assert!(!pen.is_kronecker_at(&[r(0), r(1), r(0)]).unwrap());
        assert!(!pen.is_kronecker_at(&[r(0), r(5), r(3)]).unwrap());
        // Q vanishes on x + y = 0
        let s = pen.spectrum_at(&[r(1), r(-1), r(0)]).unwrap();
        assert_eq!(s, Spectrum::Single(ProjectivePair::normalized(r(0), r(1))));
    }

    #[test]
    fn gl2_invariance() {
        let pen = lie_pencil();
        let c = pen.curvature().unwrap();
        let swap = pen.gl2_transform([[r(0), r(1)], [r(1), r(0)]]).unwrap();
        assert_eq!(swap.curvature().unwrap(), c);
        let shear = pen.gl2_transform([[r(1), r(0)], [r(1), r(1)]]).unwrap();
        assert_eq!(shear.curvature().unwrap(), c);
        assert_eq!(
            pen.gl2_transform([[r(1), r(2)], [r(2), r(4)]]),
            Err(PencilError::SingularMatrix)
        );
    }

    #[test]
    fn numeric_oracle_matches() {
        let pen = lie_pencil();
        let n = curvature_numeric(&pen, [1.0, 1.0, 0.0], 1e-4).unwrap();
        assert!((n[0] + 1.0).abs() < 1e-6, "{n:?}");
        assert!(n[1].abs() < 1e-9 && n[2].abs() < 1e-9);
        let closure = |_x: [f64; 3]| ([1.0, 2.0, 0.5], [0.0, 1.0, 3.0]);
        let n = curvature_numeric(&closure, [0.3, 0.2, 0.1], 1e-4).unwrap();
        assert!(n.iter().all(|c| c.abs() < 1e-10));
    }
}
