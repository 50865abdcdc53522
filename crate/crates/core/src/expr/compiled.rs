use super::{rational_to_f64, Poly, RatExpr};

/// Double-precision copy of a rational function for hot numeric loops.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    num: Vec<(f64, Vec<i32>)>,
    den: Vec<(f64, Vec<i32>)>,
}

fn compile_poly(p: &Poly) -> Vec<(f64, Vec<i32>)> {
    p.terms()
        .map(|(m, c)| (rational_to_f64(c), m.exponents().iter().map(|&e| e as i32).collect()))
        .collect()
}

fn eval_terms(terms: &[(f64, Vec<i32>)], x: &[f64]) -> f64 {
    terms
        .iter()
        .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k) }))
        .sum()
}

impl CompiledExpr {
    pub fn new(e: &RatExpr) -> Self {
        CompiledExpr { num: compile_poly(e.num()), den: compile_poly(e.den()) }
    }

    /// NaN at poles. `x` must have one entry per variable.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = eval_terms(&self.den, x);
        if d == 0.0 {
            return f64::NAN;
        }
        eval_terms(&self.num, x) / d
    }
}

impl From<&RatExpr> for CompiledExpr {
    fn from(e: &RatExpr) -> Self {
        CompiledExpr::new(e)
    }
}
