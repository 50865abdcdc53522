//! Three-dimensional Lie algebras, their 2-cocycles, and the linear and Lie
//! pencils built from them.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{format_rational, ExprError, Monomial, RatExpr, Rational, Vars};
use crate::pencil::{Axis, Pencil, PencilError, ProjectivePair, Spectrum, TwoForm};
use crate::poisson::PoissonTensor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("Jacobi identity fails on (x, y, z): [[x,y],z] + [[y,z],x] + [[z,x],y] = {0}")]
    Jacobi(String),
    #[error("{0} is not a linear homogeneous polynomial in the chart variables")]
    NotLinear(String),
    #[error("the point is not singular: the pencil is Kronecker there")]
    NotSingular,
    #[error("linear part at the point is not a Lie algebra: {0}")]
    LinearPartNotLie(String),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Vector = [Rational; 3];

fn zero_vec() -> Vector {
    [Rational::zero(), Rational::zero(), Rational::zero()]
}

fn dot(a: &Vector, b: &Vector) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combo(a: &Rational, u: &Vector, b: &Rational, v: &Vector) -> Vector {
    [0, 1, 2].map(|i| a * &u[i] + b * &v[i])
}

fn fmt_vec(v: &Vector, names: [&str; 3]) -> String {
    let mut s = String::new();
    for (c, n) in v.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let neg = c < &Rational::zero();
        let a = if neg { -c.clone() } else { c.clone() };
        if neg {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if !a.is_one() {
            s.push_str(&format_rational(&a));
            s.push('*');
        }
        s.push_str(n);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Structure constants `c[i][j][k]`: the `e_k` coefficient of `[e_i, e_j]`
/// for the basis `e_0 = x, e_1 = y, e_2 = z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieStructure {
    c: [[Vector; 3]; 3],
}

impl LieStructure {
    /// From `[x,y]`, `[y,z]`, `[z,x]` as coefficient vectors. Checks Jacobi.
    pub fn from_brackets(xy: Vector, yz: Vector, zx: Vector) -> Result<Self, AlgebraError> {
        let g = Self::from_brackets_unchecked(xy, yz, zx);
        let j = g.jacobiator();
        if j.iter().any(|c| !c.is_zero()) {
            return Err(AlgebraError::Jacobi(fmt_vec(&j, ["x", "y", "z"])));
        }
        Ok(g)
    }

    pub fn from_brackets_unchecked(xy: Vector, yz: Vector, zx: Vector) -> Self {
        let mut c: [[Vector; 3]; 3] = Default::default();
        let neg = |v: &Vector| v.clone().map(|a| -a);
        c[1][0] = neg(&xy);
        c[2][1] = neg(&yz);
        c[0][2] = neg(&zx);
        c[0][1] = xy;
        c[1][2] = yz;
        c[2][0] = zx;
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = zero_vec();
        }
        LieStructure { c }
    }

    /// Reads brackets written as linear forms, e.g. `"-x-y"`.
    pub fn parse(xy: &str, yz: &str, zx: &str) -> Result<Self, AlgebraError> {
        let g = Self::parse_unchecked(xy, yz, zx)?;
        Self::from_brackets(g.c[0][1].clone(), g.c[1][2].clone(), g.c[2][0].clone())
    }

    /// As `parse`, without the Jacobi check.
    pub fn parse_unchecked(xy: &str, yz: &str, zx: &str) -> Result<Self, AlgebraError> {
        let v = Vars::xyz();
        let read = |s: &str| -> Result<Vector, AlgebraError> { linear_coeffs(&crate::parse(s, &v)?) };
        Ok(Self::from_brackets_unchecked(read(xy)?, read(yz)?, read(zx)?))
    }

    /// The linear tensor `{x_i, x_j} = sum_k c^k_ij x_k` read back as structure constants.
    pub fn from_tensor(t: &PoissonTensor) -> Result<Self, AlgebraError> {
        Self::from_brackets(linear_coeffs(&t.xy)?, linear_coeffs(&t.yz)?, linear_coeffs(&t.zx)?)
    }

    pub fn abelian() -> Self {
        Self::from_brackets_unchecked(zero_vec(), zero_vec(), zero_vec())
    }

    pub fn bracket(&self, i: usize, j: usize) -> &Vector {
        &self.c[i][j]
    }

    /// Bracket of arbitrary elements.
    pub fn bracket_vec(&self, u: &Vector, v: &Vector) -> Vector {
        let mut out = zero_vec();
        for i in 0..3 {
            for j in 0..3 {
                let s = &u[i] * &v[j];
                if s.is_zero() {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    *o += &s * c;
                }
            }
        }
        out
    }

    /// `[[x,y],z] + [[y,z],x] + [[z,x],y]`
    pub fn jacobiator(&self) -> Vector {
        let e = |i: usize| {
            let mut v = zero_vec();
            v[i] = Rational::one();
            v
        };
        let mut acc = zero_vec();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let t = self.bracket_vec(&self.c[i][j], &e(k));
            for (a, b) in acc.iter_mut().zip(t) {
                *a += b;
            }
        }
        acc
    }

    /// `tr ad e_i = sum_j c^j_ij`
    pub fn tr_ad(&self, i: usize) -> Rational {
        (0..3).map(|j| self.c[i][j][j].clone()).sum()
    }

    pub fn is_unimodular(&self) -> bool {
        (0..3).all(|i| self.tr_ad(i).is_zero())
    }

    pub fn lie_poisson(&self) -> PoissonTensor {
        let v = Vars::xyz();
        let lin = |w: &Vector| {
            let mut acc = RatExpr::zero(&v);
            for (k, c) in w.iter().enumerate() {
                acc = acc + RatExpr::var(&v, k).scale(c);
            }
            acc
        };
        PoissonTensor { xy: lin(&self.c[0][1]), yz: lin(&self.c[1][2]), zx: lin(&self.c[2][0]) }
    }

    pub fn add(&self, other: &Self) -> Self {
        let one = Rational::one();
        Self::from_brackets_unchecked(
            combo(&one, &self.c[0][1], &one, &other.c[0][1]),
            combo(&one, &self.c[1][2], &one, &other.c[1][2]),
            combo(&one, &self.c[2][0], &one, &other.c[2][0]),
        )
    }

    /// Basis of the cocycle space. In dimension 3 the cocycle identity is one
    /// linear condition on `(A_xy, A_yz, A_zx)`, so the space has dimension 2 or 3.
    pub fn cocycle_basis(&self) -> Vec<Cocycle> {
        let units = [
            Cocycle::new(Rational::one(), Rational::zero(), Rational::zero()),
            Cocycle::new(Rational::zero(), Rational::one(), Rational::zero()),
            Cocycle::new(Rational::zero(), Rational::zero(), Rational::one()),
        ];
        let w: Vec<Rational> = units.iter().map(|a| a.cocycle_defect(self)).collect();
        let Some(p) = w.iter().position(|c| !c.is_zero()) else {
            return units.to_vec();
        };
        // kernel of (w_0, w_1, w_2): e_q - (w_q / w_p) e_p for q != p
        (0..3)
            .filter(|&q| q != p)
            .map(|q| {
                let mut v = [Rational::zero(), Rational::zero(), Rational::zero()];
                v[q] = Rational::one();
                v[p] = -(&w[q] / &w[p]);
                let [a, b, c] = v;
                Cocycle::new(a, b, c)
            })
            .collect()
    }
}

impl fmt::Display for LieStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = ["x", "y", "z"];
        write!(
            f,
            "[x,y] = {}, [y,z] = {}, [z,x] = {}",
            fmt_vec(&self.c[0][1], n),
            fmt_vec(&self.c[1][2], n),
            fmt_vec(&self.c[2][0], n)
        )
    }
}

fn linear_coeffs(e: &RatExpr) -> Result<Vector, AlgebraError> {
    let num = e.num();
    if !e.den().is_one() || !num.is_linear_homogeneous() || num.vars().len() != 3 {
        return Err(AlgebraError::NotLinear(e.to_string()));
    }
    Ok([0, 1, 2].map(|i| {
        let mut m = vec![0; 3];
        m[i] = 1;
        num.coeff(&Monomial::from_exponents(m))
    }))
}

/// Constant skew form on the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cocycle {
    pub xy: Rational,
    pub yz: Rational,
    pub zx: Rational,
}

impl Cocycle {
    pub fn new(xy: Rational, yz: Rational, zx: Rational) -> Self {
        Cocycle { xy, yz, zx }
    }

    pub fn zero() -> Self {
        Cocycle::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.xy.is_zero() && self.yz.is_zero() && self.zx.is_zero()
    }

    /// `A(e_i, e_j)`
    pub fn value(&self, i: usize, j: usize) -> Rational {
        match (i, j) {
            (0, 1) => self.xy.clone(),
            (1, 2) => self.yz.clone(),
            (2, 0) => self.zx.clone(),
            (1, 0) => -self.xy.clone(),
            (2, 1) => -self.yz.clone(),
            (0, 2) => -self.zx.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn apply(&self, u: &Vector, v: &Vector) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    acc += &u[i] * &v[j] * self.value(i, j);
                }
            }
        }
        acc
    }

    fn cocycle_defect(&self, g: &LieStructure) -> Rational {
        let e = |i: usize| {
            let mut v = zero_vec();
            v[i] = Rational::one();
            v
        };
        [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
            .iter()
            .map(|&(i, j, k)| self.apply(g.bracket(i, j), &e(k)))
            .sum()
    }

    pub fn tensor(&self, vars: &Vars) -> PoissonTensor {
        PoissonTensor::constant(vars, self.xy.clone(), self.yz.clone(), self.zx.clone())
    }

    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Self {
        Cocycle::new(
            a * &self.xy + b * &other.xy,
            a * &self.yz + b * &other.yz,
            a * &self.zx + b * &other.zx,
        )
    }
}

impl fmt::Display for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A(x,y) = {}, A(y,z) = {}, A(z,x) = {}",
            format_rational(&self.xy),
            format_rational(&self.yz),
            format_rational(&self.zx)
        )
    }
}

/// `A(u, v) = <xi, [u, v]>`
pub fn frozen_argument(g: &LieStructure, xi: &Vector) -> Cocycle {
    Cocycle::new(dot(xi, g.bracket(0, 1)), dot(xi, g.bracket(1, 2)), dot(xi, g.bracket(2, 0)))
}

/// `A([x,y],z) + A([y,z],x) + A([z,x],y) = 0`
pub fn is_cocycle(g: &LieStructure, a: &Cocycle) -> bool {
    a.cocycle_defect(g).is_zero()
}

/// The pencil `(lie_poisson(g), A)`.
pub fn linear_pencil(g: &LieStructure, a: &Cocycle) -> Pencil {
    Pencil::new_unchecked(g.lie_poisson(), a.tensor(&Vars::xyz()))
}

fn axis_term(k: usize, delta: &RatExpr, value: RatExpr) -> (Axis, RatExpr) {
    let d2 = delta * delta;
    (Axis::from_index(k), &value / &d2)
}

/// Curvature of the linear pencil `(lie_poisson(g), A)`:
/// `2 A(e_k, D_k) tr ad e_k / D_k^2` per axis, where `D_k` is the
/// determinant read as an element of the algebra.
pub fn linear_pencil_curvature(g: &LieStructure, a: &Cocycle) -> Result<TwoForm, AlgebraError> {
    let v = Vars::xyz();
    let mut out = TwoForm::zero(&v);
    let mut any = false;
    for axis in Axis::ALL {
        let k = axis.index();
        let (i, j) = axis.others();
        // {k,i}_P {k,j}_A - {k,i}_A {k,j}_P
        let d = combo(&a.value(k, j), g.bracket(k, i), &-a.value(k, i), g.bracket(k, j));
        if d.iter().all(Zero::is_zero) {
            continue;
        }
        any = true;
        let tr = g.tr_ad(k);
        let mut e = zero_vec();
        e[k] = Rational::one();
        let num = Rational::from_integer(2.into()) * a.apply(&e, &d) * tr;
        if num.is_zero() {
            continue;
        }
        let mut delta = RatExpr::zero(&v);
        for (m, c) in d.iter().enumerate() {
            delta = delta + RatExpr::var(&v, m).scale(c);
        }
        let (ax, c) = axis_term(k, &delta, RatExpr::constant(&v, num));
        set_component(&mut out, ax, c);
    }
    if !any {
        return Err(PencilError::Proportional.into());
    }
    Ok(out)
}

fn set_component(form: &mut TwoForm, axis: Axis, c: RatExpr) {
    match axis {
        Axis::Z => form.xy = c,
        Axis::X => form.yz = c,
        Axis::Y => form.zx = c,
    }
}

/// Two Lie structures whose sum is again a Lie structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiePencilDef {
    pub p: LieStructure,
    pub q: LieStructure,
}

impl LiePencilDef {
    pub fn new(p: LieStructure, q: LieStructure) -> Result<Self, AlgebraError> {
        let s = p.add(&q);
        let j = s.jacobiator();
        if j.iter().any(|c| !c.is_zero()) {
            return Err(AlgebraError::Jacobi(format!("P+Q: {}", fmt_vec(&j, ["x", "y", "z"]))));
        }
        Ok(LiePencilDef { p, q })
    }

    pub fn pencil(&self) -> Pencil {
        Pencil::new_unchecked(self.p.lie_poisson(), self.q.lie_poisson())
    }
}

/// Curvature of a Lie pencil: the divergences collapse to `tr ad`, giving
/// `2 (tr ad_P e_k {x_k, D_k}_Q - tr ad_Q e_k {x_k, D_k}_P) / D_k^2`.
pub fn lie_pencil_curvature(d: &LiePencilDef) -> Result<TwoForm, AlgebraError> {
    let pen = d.pencil();
    let v = Vars::xyz();
    let mut out = TwoForm::zero(&v);
    let mut any = false;
    for axis in Axis::ALL {
        let delta = pen.delta(axis);
        if delta.is_zero() {
            continue;
        }
        any = true;
        let k = axis.index();
        let tp = d.p.tr_ad(k);
        let tq = d.q.tr_ad(k);
        if tp.is_zero() && tq.is_zero() {
            continue;
        }
        let num = pen.q().bracket_coord(k, &delta).scale(&tp) - pen.p().bracket_coord(k, &delta).scale(&tq);
        let (ax, c) = axis_term(k, &delta, num.scale(&Rational::from_integer(2.into())));
        set_component(&mut out, ax, c);
    }
    if !any {
        return Err(PencilError::Proportional.into());
    }
    Ok(out)
}

/// Linearization of a pencil at a singular point.
#[derive(Clone, Debug, PartialEq)]
pub enum Linearization {
    /// Rank 2: the combination vanishing at the point gives the Lie structure,
    /// the other generator evaluated at the point gives the cocycle.
    Linear { vanishing: ProjectivePair, algebra: LieStructure, cocycle: Cocycle },
    /// Rank 0: linear parts of both generators.
    Lie(LiePencilDef),
}

impl Linearization {
    pub fn pencil(&self) -> Pencil {
        match self {
            Linearization::Linear { algebra, cocycle, .. } => linear_pencil(algebra, cocycle),
            Linearization::Lie(d) => d.pencil(),
        }
    }

    pub fn curvature(&self) -> Result<TwoForm, AlgebraError> {
        match self {
            Linearization::Linear { algebra, cocycle, .. } => linear_pencil_curvature(algebra, cocycle),
            Linearization::Lie(d) => lie_pencil_curvature(d),
        }
    }
}

/// Linear part at `point` of a tensor that vanishes there: `c^k_ij = d_k T^ij(point)`.
fn linear_part(t: &PoissonTensor, point: &[Rational]) -> Result<LieStructure, AlgebraError> {
    let grad = |e: &RatExpr| -> Result<Vector, AlgebraError> {
        Ok([e.diff(0).eval(point)?, e.diff(1).eval(point)?, e.diff(2).eval(point)?])
    };
    let g = LieStructure::from_brackets_unchecked(grad(&t.xy)?, grad(&t.yz)?, grad(&t.zx)?);
    let j = g.jacobiator();
    if j.iter().any(|c| !c.is_zero()) {
        return Err(AlgebraError::LinearPartNotLie(fmt_vec(&j, ["x", "y", "z"])));
    }
    Ok(g)
}

pub fn linearize(pencil: &Pencil, point: &[Rational]) -> Result<Linearization, AlgebraError> {
    match pencil.spectrum_at(point) {
        Ok(Spectrum::Empty) => Err(AlgebraError::NotSingular),
        Ok(Spectrum::Single(pair)) => {
            let r = pencil.p().combine(&pair.alpha, pencil.q(), &pair.beta);
            let algebra = linear_part(&r, point)?;
            let s = if pair.beta.is_zero() { pencil.q() } else { pencil.p() };
            let [xy, yz, zx] = s.eval(point)?;
            Ok(Linearization::Linear { vanishing: pair, algebra, cocycle: Cocycle::new(xy, yz, zx) })
        }
        Err(PencilError::ZeroRank) => {
            let p = linear_part(pencil.p(), point)?;
            let q = linear_part(pencil.q(), point)?;
            Ok(Linearization::Lie(LiePencilDef::new(p, q).map_err(|e| match e {
                AlgebraError::Jacobi(s) => AlgebraError::LinearPartNotLie(s),
                other => other,
            })?))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The linearization is Kronecker and not flat, so the pencil is not flat.
    NotFlat,
    /// The linearization is flat or not Kronecker; nothing follows.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NotFlat => "not flat",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    pub linearization: Linearization,
    /// Whether the linearization is Kronecker on a dense set.
    pub kronecker: bool,
    /// `None` when the linearization is nowhere Kronecker.
    pub curvature: Option<TwoForm>,
    pub verdict: Verdict,
}

/// One-directional test: a flat pencil has a flat linearization whenever
/// that linearization is Kronecker.
pub fn flatness_obstruction_report(pencil: &Pencil, point: &[Rational]) -> Result<ObstructionReport, AlgebraError> {
    let linearization = linearize(pencil, point)?;
    let curvature = match linearization.curvature() {
        Ok(c) => Some(c),
        Err(AlgebraError::Pencil(PencilError::Proportional)) => None,
        Err(e) => return Err(e),
    };
    let kronecker = curvature.is_some();
    let verdict = match &curvature {
        Some(c) if !c.is_zero() => Verdict::NotFlat,
        _ => Verdict::Inconclusive,
    };
    Ok(ObstructionReport { linearization, kronecker, curvature, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn vec3(a: i64, b: i64, c: i64) -> Vector {
        [r(a), r(b), r(c)]
    }

    fn so3() -> LieStructure {
        LieStructure::parse("z", "x", "y").unwrap()
    }

    #[test]
    fn so3_tensor() {
        let t = so3().lie_poisson();
        assert_eq!(t.xy.to_string(), "z");
        assert_eq!(t.yz.to_string(), "x");
        assert!(t.is_poisson());
        assert!(so3().is_unimodular());
    }

    #[test]
    fn jacobi_failure_reported() {
        // [x,y] = x, [y,z] = y, [z,x] = 0 is not a Lie algebra
        let err = LieStructure::parse("x", "y", "0").unwrap_err();
        assert!(matches!(err, AlgebraError::Jacobi(_)), "{err}");
    }

    #[test]
    fn frozen_argument_values() {
        // [z,x] = x, [z,y] = 2y
        let g = LieStructure::parse("0", "-2*y", "x").unwrap();
        let a = frozen_argument(&g, &vec3(1, 0, 0));
        assert_eq!(a, Cocycle::new(r(0), r(0), r(1)));
        assert!(is_cocycle(&g, &a));
        assert!(frozen_argument(&LieStructure::abelian(), &vec3(3, 1, 2)).is_zero());
    }

    #[test]
    fn cocycle_condition() {
        // [x,y] = y: A(y,z) must vanish
        let g = LieStructure::parse("y", "0", "0").unwrap();
        assert!(!is_cocycle(&g, &Cocycle::new(r(1), r(1), r(0))));
        assert!(is_cocycle(&g, &Cocycle::new(r(1), r(0), r(2))));
        for b in g.cocycle_basis() {
            assert!(is_cocycle(&g, &b));
        }
        assert_eq!(g.cocycle_basis().len(), 2);
        assert_eq!(so3().cocycle_basis().len(), 3);
    }

    #[test]
    fn linear_formula_matches_general() {
        let g = LieStructure::parse("y", "0", "0").unwrap();
        let a = Cocycle::new(r(3), r(0), r(-2));
        let lin = linear_pencil_curvature(&g, &a).unwrap();
        let gen = linear_pencil(&g, &a).curvature().unwrap();
        assert_eq!(lin, gen);
        // 2 A(x,y) / (A(x,z) y^2) dy^dz with A(x,z) = 2
        assert_eq!(lin.yz, crate::parse("3/y^2", &Vars::xyz()).unwrap());
    }

    #[test]
    fn lie_formula_matches_general() {
        let d = LiePencilDef::new(
            LieStructure::parse("0", "y", "x").unwrap(),
            LieStructure::parse("0", "-x-y", "0").unwrap(),
        )
        .unwrap();
        let lie = lie_pencil_curvature(&d).unwrap();
        assert_eq!(lie, d.pencil().curvature().unwrap());
        assert_eq!(lie.to_string(), "(-4)/((x+y)^2) dx^dy");
    }

    #[test]
    fn linearization_verdicts() {
        let pen = LiePencilDef::new(
            LieStructure::parse("0", "y", "x").unwrap(),
            LieStructure::parse("0", "-x-y", "0").unwrap(),
        )
        .unwrap()
        .pencil();
        let rep = flatness_obstruction_report(&pen, &[r(1), r(-1), r(0)]).unwrap();
        assert_eq!(rep.verdict, Verdict::NotFlat);
        assert!(rep.kronecker);
        let rep = flatness_obstruction_report(&pen, &[r(0), r(1), r(0)]).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert!(rep.curvature.unwrap().is_zero());
        assert!(matches!(
            flatness_obstruction_report(&pen, &[r(1), r(1), r(0)]),
            Err(AlgebraError::NotSingular)
        ));
        // rank 0 at the origin: the Lie pencil is its own linearization
        match linearize(&pen, &[r(0), r(0), r(0)]).unwrap() {
            Linearization::Lie(d) => assert_eq!(d.pencil(), pen),
            other => panic!("{other:?}"),
        }
    }
}
