//! Torsion-free connections compatible with a pencil, built from a frame
//! `X, Y, Z` with `P = X^Y` and `Q = X^Z`, and the alternated Ricci form.

use thiserror::Error;

use crate::expr::{RatExpr, Rational, Vars};
use crate::pencil::{Pencil, PencilError, TwoForm};
use crate::poisson::{PoissonTensor, VectorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error("{tensor} != {wedge}: component {component} differs ({lhs} vs {rhs})")]
    WedgeMismatch { tensor: &'static str, wedge: &'static str, component: &'static str, lhs: String, rhs: String },
    #[error("frame is degenerate: det(X, Y, Z) vanishes identically")]
    Degenerate,
    #[error("frame is inconsistent with a compatible pencil: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

/// Vector fields `X, Y, Z` in the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub x: VectorField,
    pub y: VectorField,
    pub z: VectorField,
}

impl Frame {
    pub fn new(x: VectorField, y: VectorField, z: VectorField) -> Self {
        Frame { x, y, z }
    }

    /// Parses each field from three component strings.
    pub fn parse(vars: &Vars, x: [&str; 3], y: [&str; 3], z: [&str; 3]) -> Result<Self, crate::ExprError> {
        let field = |c: [&str; 3]| -> Result<VectorField, crate::ExprError> {
            Ok(VectorField([crate::parse(c[0], vars)?, crate::parse(c[1], vars)?, crate::parse(c[2], vars)?]))
        };
        Ok(Frame { x: field(x)?, y: field(y)?, z: field(z)? })
    }

    pub fn fields(&self) -> [&VectorField; 3] {
        [&self.x, &self.y, &self.z]
    }

    fn vars(&self) -> &Vars {
        self.x.0[0].vars()
    }

    /// `F[i][a]`: component `i` of frame field `a`.
    fn matrix(&self) -> [[RatExpr; 3]; 3] {
        let f = self.fields();
        [0, 1, 2].map(|i| [0, 1, 2].map(|a| f[a].0[i].clone()))
    }
}

pub fn wedge(u: &VectorField, v: &VectorField) -> PoissonTensor {
    let c = |i: usize, j: usize| &u.0[i] * &v.0[j] - &u.0[j] * &v.0[i];
    PoissonTensor { xy: c(0, 1), yz: c(1, 2), zx: c(2, 0) }
}

type Mat3 = [[RatExpr; 3]; 3];

fn det3(m: &Mat3) -> RatExpr {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| &m[r1][c1] * &m[r2][c2] - &m[r1][c2] * &m[r2][c1];
    &m[0][0] * &minor(1, 2, 1, 2) - &m[0][1] * &minor(1, 2, 0, 2) + &m[0][2] * &minor(1, 2, 0, 1)
}

fn inverse3(m: &Mat3) -> Option<Mat3> {
    let d = det3(m);
    if d.is_zero() {
        return None;
    }
    let cof = |r: usize, c: usize| {
        let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        let v = &m[rs[0]][cs[0]] * &m[rs[1]][cs[1]] - &m[rs[0]][cs[1]] * &m[rs[1]][cs[0]];
        if (r + c) % 2 == 0 { v } else { -v }
    };
    // inverse = adj / det, adj = cofactor transpose
    Some([0, 1, 2].map(|i| [0, 1, 2].map(|j| &cof(j, i) / &d)))
}

/// Coefficients of the frame commutators
/// `[X,Y] = aX + cY`, `[X,Z] = bX + cZ`, `[Y,Z] = uX + vY + wZ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commutators {
    pub a: RatExpr,
    pub b: RatExpr,
    pub c: RatExpr,
    pub u: RatExpr,
    pub v: RatExpr,
    pub w: RatExpr,
    /// `structure[p][q][r]`: the `e_r` component of `[e_p, e_q]`.
    pub structure: [[[RatExpr; 3]; 3]; 3],
}

/// Checks `P = X^Y` and `Q = X^Z`, decomposes the commutators in the frame
/// and checks the shape forced by compatibility.
pub fn verify_frame(pencil: &Pencil, frame: &Frame) -> Result<Commutators, ConnectionError> {
    for (t, tn, w, wn) in [
        (pencil.p(), "P", wedge(&frame.x, &frame.y), "X^Y"),
        (pencil.q(), "Q", wedge(&frame.x, &frame.z), "X^Z"),
    ] {
        for (lhs, rhs, comp) in [(&t.xy, &w.xy, "xy"), (&t.yz, &w.yz, "yz"), (&t.zx, &w.zx, "zx")] {
            if lhs != rhs {
                return Err(ConnectionError::WedgeMismatch {
                    tensor: tn,
                    wedge: wn,
                    component: comp,
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
    }
    let inv = inverse3(&frame.matrix()).ok_or(ConnectionError::Degenerate)?;
    let fields = frame.fields();
    let zero = RatExpr::zero(frame.vars());
    let mut structure: [[[RatExpr; 3]; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| zero.clone())));
    for p in 0..3 {
        for q in (p + 1)..3 {
            let br = fields[p].lie_bracket(fields[q]);
            for r in 0..3 {
                let mut acc = zero.clone();
                for i in 0..3 {
                    acc = acc + &inv[r][i] * &br.0[i];
                }
                structure[q][p][r] = -acc.clone();
                structure[p][q][r] = acc;
            }
        }
    }
    let s = &structure;
    let mut bad = Vec::new();
    if !s[0][1][2].is_zero() {
        bad.push(format!("[X,Y] has Z component {}", s[0][1][2]));
    }
    if !s[0][2][1].is_zero() {
        bad.push(format!("[X,Z] has Y component {}", s[0][2][1]));
    }
    if s[0][1][1] != s[0][2][2] {
        bad.push(format!("Y component of [X,Y] ({}) differs from Z component of [X,Z] ({})", s[0][1][1], s[0][2][2]));
    }
    if !bad.is_empty() {
        return Err(ConnectionError::Inconsistent(bad.join("; ")));
    }
    Ok(Commutators {
        a: s[0][1][0].clone(),
        b: s[0][2][0].clone(),
        c: s[0][1][1].clone(),
        u: s[1][2][0].clone(),
        v: s[1][2][1].clone(),
        w: s[1][2][2].clone(),
        structure,
    })
}

/// Values of the free components `beta(Y)`, `beta(Z)`, `gamma(Z)`;
/// `gamma(Y)` then equals `u + beta(Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// All three free components zero.
    Canonical,
    Free { beta_y: RatExpr, beta_z: RatExpr, gamma_z: RatExpr },
}

impl Gauge {
    /// A fixed non-canonical gauge: `beta(Y) = z`, `beta(Z) = 1`, `gamma(Z) = x`.
    /// Changing the gauge shifts `Ric` by a symmetric term built from the
    /// derivative of these components along `X`, so a gauge that is constant
    /// along `X` may leave `Ric` untouched.
    pub fn alt(vars: &Vars) -> Gauge {
        Gauge::Free {
            beta_y: RatExpr::var(vars, 2),
            beta_z: RatExpr::one(vars),
            gamma_z: RatExpr::var(vars, 0),
        }
    }
}

/// `nabla_W X = alpha(W) X`, `nabla_W Y = beta(W) X - alpha(W) Y`,
/// `nabla_W Z = gamma(W) X - alpha(W) Z`, each form stored by its values on `X, Y, Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilConnection {
    pub alpha: [RatExpr; 3],
    pub beta: [RatExpr; 3],
    pub gamma: [RatExpr; 3],
}

impl PencilConnection {
    /// `gamma[a][b][c]`: the `e_c` component of `nabla_{e_a} e_b`.
    pub fn christoffel(&self) -> [[[RatExpr; 3]; 3]; 3] {
        let zero = self.alpha[0].vars();
        let z = RatExpr::zero(zero);
        std::array::from_fn(|a| {
            [
                [self.alpha[a].clone(), z.clone(), z.clone()],
                [self.beta[a].clone(), -&self.alpha[a], z.clone()],
                [self.gamma[a].clone(), z.clone(), -&self.alpha[a]],
            ]
        })
    }

    /// Components `T(e_a, e_b)` that fail to vanish, as `(a, b, c, value)`.
    pub fn torsion_defects(&self, comm: &Commutators) -> Vec<(usize, usize, usize, RatExpr)> {
        let g = self.christoffel();
        let mut out = Vec::new();
        for a in 0..3 {
            for b in (a + 1)..3 {
                for c in 0..3 {
                    let t = &g[a][b][c] - &g[b][a][c] - comm.structure[a][b][c].clone();
                    if !t.is_zero() {
                        out.push((a, b, c, t));
                    }
                }
            }
        }
        out
    }

    /// Frame components of `nabla_{e_a}` applied to the constant bivectors
    /// `e_0^e_1` and `e_0^e_2`. All vanish for a compatible connection.
    pub fn parallel_defects(&self) -> Vec<String> {
        let g = self.christoffel();
        let mut out = Vec::new();
        for (name, (p, q)) in [("P", (0, 1)), ("Q", (0, 2))] {
            for (a, ga) in g.iter().enumerate() {
                // (nabla_a (e_p^e_q))^{rs} = G[a][p][r] d_{qs} + d_{pr} G[a][q][s] - (r<->s)
                for r in 0..3 {
                    for s in (r + 1)..3 {
                        let term = |r: usize, s: usize| {
                            let mut t = RatExpr::zero(ga[0][0].vars());
                            if s == q {
                                t = t + ga[p][r].clone();
                            }
                            if r == p {
                                t = t + ga[q][s].clone();
                            }
                            t
                        };
                        let v = term(r, s) - term(s, r);
                        if !v.is_zero() {
                            out.push(format!("nabla_{a} {name} [{r}{s}] = {v}"));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Solves the torsion equations for `alpha`, `beta(X)`, `gamma(X)` and fills
/// the free components from `gauge`.
pub fn solve_connection(comm: &Commutators, gauge: &Gauge) -> Result<PencilConnection, ConnectionError> {
    let vars = comm.a.vars();
    let zero = RatExpr::zero(vars);
    let (beta_y, beta_z, gamma_z) = match gauge {
        Gauge::Canonical => (zero.clone(), zero.clone(), zero.clone()),
        Gauge::Free { beta_y, beta_z, gamma_z } => (beta_y.clone(), beta_z.clone(), gamma_z.clone()),
    };
    let conn = PencilConnection {
        alpha: [-&comm.c, -&comm.w, comm.v.clone()],
        beta: [&comm.a - &comm.w, beta_y, beta_z.clone()],
        gamma: [&comm.b + &comm.v, &comm.u + &beta_z, gamma_z],
    };
    let defects = conn.torsion_defects(comm);
    if !defects.is_empty() {
        let s: Vec<String> = defects.iter().map(|(a, b, c, t)| format!("T({a},{b})^{c} = {t}")).collect();
        return Err(ConnectionError::Inconsistent(s.join("; ")));
    }
    Ok(conn)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RicciResult {
    /// `ric[b][c] = Ric(e_b, e_c)`.
    pub ric: [[RatExpr; 3]; 3],
    /// `Alt Ric` as a chart 2-form.
    pub alt: TwoForm,
}

/// Ricci tensor `Ric(U, V) = tr(W -> R(W, V) U)` (index form `R_ij = R^k_ikj`,
/// the acted-on vector in the first slot) with
/// `R(U, V) = nabla_U nabla_V - nabla_V nabla_U - nabla_[U,V]`,
/// and its skew part `(Ric - Ric^T) / 2` written in the chart.
///
/// Tracing `R(W, U) V` instead transposes `Ric` and flips the sign of the skew part.
pub fn ricci(frame: &Frame, comm: &Commutators, conn: &PencilConnection) -> Result<RicciResult, ConnectionError> {
    let g = conn.christoffel();
    let e = frame.fields();
    let vars = frame.vars();
    let zero = RatExpr::zero(vars);
    // R(e_a, e_b) e_c, component f
    let riem = |a: usize, b: usize, c: usize, f: usize| {
        let mut t = e[a].apply(&g[b][c][f]) - e[b].apply(&g[a][c][f]);
        for d in 0..3 {
            t = t + &g[b][c][d] * &g[a][d][f] - &g[a][c][d] * &g[b][d][f];
            let s = &comm.structure[a][b][d];
            if !s.is_zero() {
                t = t - s * &g[d][c][f];
            }
        }
        t
    };
    let ric: [[RatExpr; 3]; 3] = std::array::from_fn(|b| {
        std::array::from_fn(|c| (0..3).fold(zero.clone(), |acc, a| acc + riem(a, c, b, a)))
    });
    let half = Rational::new(1.into(), 2.into());
    let alt_frame: Mat3 = std::array::from_fn(|b| std::array::from_fn(|c| (&ric[b][c] - &ric[c][b]).scale(&half)));
    let inv = inverse3(&frame.matrix()).ok_or(ConnectionError::Degenerate)?;
    // Omega_ij = sum_bc inv[b][i] A_bc inv[c][j]
    let omega = |i: usize, j: usize| {
        let mut acc = zero.clone();
        for b in 0..3 {
            for c in 0..3 {
                if b != c && !alt_frame[b][c].is_zero() {
                    acc = acc + &inv[b][i] * &alt_frame[b][c] * inv[c][j].clone();
                }
            }
        }
        acc
    };
    let alt = TwoForm { xy: omega(0, 1), yz: omega(1, 2), zx: omega(2, 0) };
    Ok(RicciResult { ric, alt })
}

/// The curvature and trace conventions under which `-4 Alt Ric` reproduces
/// the pencil curvature.
pub const CONVENTION: &str =
    "R(U,V) = [nabla_U, nabla_V] - nabla_[U,V]; Ric(U,V) = tr(W -> R(W,V)U); Alt Ric(U,V) = (Ric(U,V) - Ric(V,U))/2";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub convention: &'static str,
    pub commutators: Commutators,
    pub connection: PencilConnection,
    pub ricci: RicciResult,
    pub curvature: TwoForm,
    /// `-4 Alt Ric`.
    pub minus_four_alt: TwoForm,
    pub holds: bool,
}

/// Compares the pencil curvature with `-4 Alt Ric` of the connection built
/// from `frame` in `gauge`.
pub fn verify_theorem(pencil: &Pencil, frame: &Frame, gauge: &Gauge) -> Result<TheoremReport, ConnectionError> {
    let commutators = verify_frame(pencil, frame)?;
    let connection = solve_connection(&commutators, gauge)?;
    let ricci = ricci(frame, &commutators, &connection)?;
    let curvature = pencil.curvature()?;
    let m4 = Rational::from_integer((-4).into());
    let minus_four_alt = TwoForm {
        xy: ricci.alt.xy.scale(&m4),
        yz: ricci.alt.yz.scale(&m4),
        zx: ricci.alt.zx.scale(&m4),
    };
    let holds = minus_four_alt == curvature;
    Ok(TheoremReport { convention: CONVENTION, commutators, connection, ricci, curvature, minus_four_alt, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lie_pencil() -> Pencil {
        let v = Vars::xyz();
        Pencil::new(
            PoissonTensor::parse(&v, "0", "y", "x").unwrap(),
            PoissonTensor::parse(&v, "0", "-(x+y)", "0").unwrap(),
        )
        .unwrap()
    }

    fn lie_frame() -> Frame {
        Frame::parse(&Vars::xyz(), ["0", "0", "1"], ["x", "-y", "0"], ["0", "x+y", "0"]).unwrap()
    }

    #[test]
    fn frame_commutators() {
        let c = verify_frame(&lie_pencil(), &lie_frame()).unwrap();
        // [X,Y] = 0, [X,Z] = 0, [Y,Z] = (x-y) d_y... decomposed in the frame
        assert!(c.a.is_zero() && c.b.is_zero() && c.c.is_zero());
        assert!(!(c.u.is_zero() && c.v.is_zero() && c.w.is_zero()));
    }

    #[test]
    fn wrong_frame_rejected() {
        let f = Frame::parse(&Vars::xyz(), ["0", "0", "1"], ["x", "y", "0"], ["0", "x+y", "0"]).unwrap();
        assert!(matches!(verify_frame(&lie_pencil(), &f), Err(ConnectionError::WedgeMismatch { .. })));
    }

    #[test]
    fn connection_is_torsion_free_and_parallel() {
        let c = verify_frame(&lie_pencil(), &lie_frame()).unwrap();
        for gauge in [Gauge::Canonical, Gauge::alt(&Vars::xyz())] {
            let conn = solve_connection(&c, &gauge).unwrap();
            assert!(conn.torsion_defects(&c).is_empty());
            assert!(conn.parallel_defects().is_empty());
        }
    }

    #[test]
    fn theorem_on_lie_pencil() {
        let rep = verify_theorem(&lie_pencil(), &lie_frame(), &Gauge::Canonical).unwrap();
        assert_eq!(rep.curvature.to_string(), "(-4)/((x+y)^2) dx^dy");
        assert!(rep.holds, "{} vs {}", rep.minus_four_alt, rep.curvature);
    }

    #[test]
    fn theorem_on_linear_family() {
        let v = Vars::xyz();
        let pen = Pencil::new(
            PoissonTensor::parse(&v, "0", "-2*y", "x").unwrap(),
            PoissonTensor::parse(&v, "0", "-2", "1").unwrap(),
        )
        .unwrap();
        let f = Frame::parse(&v, ["0", "0", "1"], ["x", "2*y", "0"], ["1", "2", "0"]).unwrap();
        for g in [Gauge::Canonical, Gauge::alt(&v)] {
            let rep = verify_theorem(&pen, &f, &g).unwrap();
            assert!(rep.holds, "{} vs {}", rep.minus_four_alt, rep.curvature);
        }
    }

    #[test]
    fn alt_is_gauge_independent() {
        let v = Vars::xyz();
        let c = verify_frame(&lie_pencil(), &lie_frame()).unwrap();
        let r0 = ricci(&lie_frame(), &c, &solve_connection(&c, &Gauge::Canonical).unwrap()).unwrap();
        let r1 = ricci(&lie_frame(), &c, &solve_connection(&c, &Gauge::alt(&v)).unwrap()).unwrap();
        assert_eq!(r0.alt, r1.alt);
        assert_ne!(r0.ric, r1.ric);
    }
}
