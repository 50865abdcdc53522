//! Skew 2-tensors on 3-space and the bracket operations built on them.

use thiserror::Error;

use crate::expr::{ExprError, RatExpr, Rational, Vars};

/// Bivector field in the chart `(x, y, z)`, stored by its three
/// independent components `{x,y}`, `{y,z}`, `{z,x}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PoissonTensor {
    pub xy: RatExpr,
    pub yz: RatExpr,
    pub zx: RatExpr,
}

/// Vector field `(vx, vy, vz)` with rational-function components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField(pub [RatExpr; 3]);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoissonError {
    #[error("expected 3 chart variables, got {0}")]
    Dimension(usize),
    #[error("{which} fails the Jacobi identity: {{x,{{y,z}}}} + cyclic = {jacobiator}")]
    NotPoisson { which: &'static str, jacobiator: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl PoissonTensor {
    pub fn new(xy: RatExpr, yz: RatExpr, zx: RatExpr) -> Result<Self, PoissonError> {
        let n = xy.vars().len();
        if n != 3 {
            return Err(PoissonError::Dimension(n));
        }
        assert!(xy.vars() == yz.vars() && yz.vars() == zx.vars(), "components over different charts");
        Ok(PoissonTensor { xy, yz, zx })
    }

    /// Parses the three components `{x,y}`, `{y,z}`, `{z,x}`.
    pub fn parse(vars: &Vars, xy: &str, yz: &str, zx: &str) -> Result<Self, PoissonError> {
        Self::new(crate::parse(xy, vars)?, crate::parse(yz, vars)?, crate::parse(zx, vars)?)
    }

    pub fn zero(vars: &Vars) -> Self {
        let z = RatExpr::zero(vars);
        PoissonTensor { xy: z.clone(), yz: z.clone(), zx: z }
    }

    pub fn constant(vars: &Vars, xy: Rational, yz: Rational, zx: Rational) -> Self {
        PoissonTensor {
            xy: RatExpr::constant(vars, xy),
            yz: RatExpr::constant(vars, yz),
            zx: RatExpr::constant(vars, zx),
        }
    }

    pub fn vars(&self) -> &Vars {
        self.xy.vars()
    }

    /// `P^{ij} = {x_i, x_j}` for chart indices 0, 1, 2.
    pub fn entry(&self, i: usize, j: usize) -> RatExpr {
        match (i, j) {
            (0, 1) => self.xy.clone(),
            (1, 2) => self.yz.clone(),
            (2, 0) => self.zx.clone(),
            (1, 0) => -&self.xy,
            (2, 1) => -&self.yz,
            (0, 2) => -&self.zx,
            _ => RatExpr::zero(self.vars()),
        }
    }

    pub fn components(&self) -> [&RatExpr; 3] {
        [&self.xy, &self.yz, &self.zx]
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PoissonTensor { xy: self.xy.scale(c), yz: self.yz.scale(c), zx: self.zx.scale(c) }
    }

    /// `a*self + b*other`
    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Self {
        PoissonTensor {
            xy: self.xy.scale(a) + other.xy.scale(b),
            yz: self.yz.scale(a) + other.yz.scale(b),
            zx: self.zx.scale(a) + other.zx.scale(b),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        PoissonTensor {
            xy: &self.xy + &other.xy,
            yz: &self.yz + &other.yz,
            zx: &self.zx + &other.zx,
        }
    }

    /// `{f, g} = sum_{i<j} P^{ij} (f_i g_j - f_j g_i)`
    pub fn bracket(&self, f: &RatExpr, g: &RatExpr) -> RatExpr {
        let df: Vec<RatExpr> = (0..3).map(|i| f.diff(i)).collect();
        let dg: Vec<RatExpr> = (0..3).map(|i| g.diff(i)).collect();
        let mut acc = RatExpr::zero(self.vars());
        for (i, j, p) in [(0, 1, &self.xy), (1, 2, &self.yz), (2, 0, &self.zx)] {
            if p.is_zero() {
                continue;
            }
            let minor = &df[i] * &dg[j] - &df[j] * &dg[i];
            acc = acc + p * &minor;
        }
        acc
    }

    /// `{x_k, f}` for a chart coordinate.
    pub fn bracket_coord(&self, k: usize, f: &RatExpr) -> RatExpr {
        let mut acc = RatExpr::zero(self.vars());
        for j in 0..3 {
            if j == k {
                continue;
            }
            let e = self.entry(k, j);
            if !e.is_zero() {
                acc = acc + e * f.diff(j);
            }
        }
        acc
    }

    /// The single independent component `{x,{y,z}} + {y,{z,x}} + {z,{x,y}}`
    /// of the Jacobiator; it vanishes identically iff the tensor is Poisson.
    pub fn jacobiator(&self) -> RatExpr {
        let a = self.bracket_coord(0, &self.yz);
        let b = self.bracket_coord(1, &self.zx);
        let c = self.bracket_coord(2, &self.xy);
        a + b + c
    }

    pub fn is_poisson(&self) -> bool {
        self.jacobiator().is_zero()
    }

    /// Hamiltonian vector field with components `{f, x_i}`.
    pub fn sgrad(&self, f: &RatExpr) -> VectorField {
        VectorField([0, 1, 2].map(|i| -self.bracket_coord(i, f)))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<[Rational; 3], ExprError> {
        Ok([self.xy.eval(point)?, self.yz.eval(point)?, self.zx.eval(point)?])
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<[f64; 3], ExprError> {
        Ok([self.xy.eval_f64(point)?, self.yz.eval_f64(point)?, self.zx.eval_f64(point)?])
    }
}

/// Checks that `p` and `q` are Poisson and that `p + q` is Poisson.
pub fn is_compatible(p: &PoissonTensor, q: &PoissonTensor) -> Result<bool, PoissonError> {
    let jp = p.jacobiator();
    if !jp.is_zero() {
        return Err(PoissonError::NotPoisson { which: "P", jacobiator: jp.to_string() });
    }
    let jq = q.jacobiator();
    if !jq.is_zero() {
        return Err(PoissonError::NotPoisson { which: "Q", jacobiator: jq.to_string() });
    }
    Ok(p.add(q).is_poisson())
}

impl VectorField {
    pub fn divergence(&self) -> RatExpr {
        let [a, b, c] = &self.0;
        a.diff(0) + b.diff(1) + c.diff(2)
    }

    /// Derivative of `f` along the field.
    pub fn apply(&self, f: &RatExpr) -> RatExpr {
        let mut acc = RatExpr::zero(f.vars());
        for (i, v) in self.0.iter().enumerate() {
            if !v.is_zero() {
                acc = acc + v * f.diff(i);
            }
        }
        acc
    }

    /// Lie bracket `[U, V]^i = U(V^i) - V(U^i)`.
    pub fn lie_bracket(&self, other: &VectorField) -> VectorField {
        VectorField([0, 1, 2].map(|i| self.apply(&other.0[i]) - other.apply(&self.0[i])))
    }

    pub fn scale_by(&self, f: &RatExpr) -> VectorField {
        VectorField([0, 1, 2].map(|i| &self.0[i] * f))
    }
}
