//! Exact curvature of Poisson pencils on 3-manifolds.
//!
//! The scalar kernel is [`expr::RatExpr`], an exact multivariate rational
//! function over the rationals. Everything above it (brackets, pencils,
//! Lie algebras, webs, connections) is built from that kernel, so every
//! identity the crate certifies is an exact rational-function identity.

pub mod algebra;
pub mod connection;
pub mod expr;
pub mod pencil;
pub mod poisson;
pub mod web;

pub use expr::{parse, ExprError, Poly, RatExpr, Rational, Vars};
pub use pencil::{Axis, Pencil, PencilError, TwoForm};
pub use poisson::{PoissonTensor, VectorField};


