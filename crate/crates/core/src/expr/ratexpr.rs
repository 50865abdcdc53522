use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::factor::squarefree;
use super::gcd::gcd;
use super::{ExprError, Poly, Rational, Vars};

/// Reduced quotient of two polynomials.
///
/// Invariants: the denominator is nonzero with graded-lex leading
/// coefficient 1, and numerator and denominator are coprime. Zero is `0/1`.
/// Under these invariants structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatExpr {
    num: Poly,
    den: Poly,
}

impl RatExpr {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatExpr::zero(num.vars());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        Self::normalized(num, den)
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatExpr { num, den }
        } else {
            let inv = lc.recip();
            RatExpr { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn zero(vars: &Vars) -> Self {
        RatExpr { num: Poly::zero(vars), den: Poly::one(vars) }
    }

    pub fn one(vars: &Vars) -> Self {
        RatExpr::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        RatExpr { num: Poly::constant(vars, c), den: Poly::one(vars) }
    }

    pub fn int(vars: &Vars, n: i64) -> Self {
        RatExpr::constant(vars, Rational::from_integer(n.into()))
    }

    pub fn var(vars: &Vars, index: usize) -> Self {
        RatExpr::from_poly(Poly::var(vars, index))
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self, ExprError> {
        let i = vars.index_of(name).ok_or_else(|| ExprError::UnknownVariable(name.into()))?;
        Ok(RatExpr::var(vars, i))
    }

    pub fn from_poly(p: Poly) -> Self {
        let vars = p.vars().clone();
        RatExpr { num: p, den: Poly::one(&vars) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> RatExpr {
        if c.is_zero() {
            return RatExpr::zero(self.vars());
        }
        RatExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<RatExpr, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &RatExpr) -> Result<RatExpr, ExprError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, e: u32) -> RatExpr {
        RatExpr { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Integer power; negative exponents fail on zero.
    pub fn powi(&self, e: i64) -> Result<RatExpr, ExprError> {
        let p = self.pow(e.unsigned_abs() as u32);
        if e < 0 {
            p.recip()
        } else {
            Ok(p)
        }
    }

    /// Exact partial derivative by the quotient rule.
    pub fn diff(&self, var: usize) -> RatExpr {
        if self.den.is_one() {
            return RatExpr::from_poly(self.num.diff(var));
        }
        let dn = self.num.diff(var);
        let dd = self.den.diff(var);
        if dd.is_zero() {
            return Self::reduce(dn, self.den.clone());
        }
        // (n'd - nd')/d^2; a common factor of d survives only through d'
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::reduce(num, self.den.pow(2))
    }

    pub fn diff_named(&self, name: &str) -> Result<RatExpr, ExprError> {
        let i = self.vars().index_of(name).ok_or_else(|| ExprError::UnknownVariable(name.into()))?;
        Ok(self.diff(i))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ExprError> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(ExprError::Pole { den: self.den.to_string() });
        }
        Ok(self.num.eval(point)? / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, ExprError> {
        let d = self.den.eval_f64(point)?;
        if d == 0.0 {
            return Err(ExprError::Pole { den: self.den.to_string() });
        }
        Ok(self.num.eval_f64(point)? / d)
    }

    /// Composes with `values[i]` substituted for variable `i`. The result
    /// lives over the variable list of the substituted values.
    pub fn substitute(&self, values: &[RatExpr]) -> Result<RatExpr, ExprError> {
        if values.len() != self.vars().len() {
            return Err(ExprError::PointArity { expected: self.vars().len(), got: values.len() });
        }
        let target = values.first().map(|v| v.vars().clone()).ok_or(ExprError::PointArity {
            expected: self.vars().len(),
            got: 0,
        })?;
        let n = subst_poly(&self.num, values, &target);
        let d = subst_poly(&self.den, values, &target);
        n.checked_div(&d)
    }

    /// Re-expresses over another variable list (matching names).
    pub fn rebase(&self, target: &Vars) -> Result<RatExpr, ExprError> {
        Ok(RatExpr { num: self.num.rebase(target)?, den: self.den.rebase(target)? })
    }

    /// `num/den` with both sides fully expanded.
    pub fn to_expanded_string(&self) -> String {
        if self.den.is_one() {
            self.num.to_string()
        } else {
            format!("({})/({})", self.num, self.den)
        }
    }

    fn den_factored(&self) -> String {
        let (_, factors) = squarefree(&self.den);
        if let [(f, 1)] = factors.as_slice() {
            return f.to_string();
        }
        let parts: Vec<String> = factors
            .iter()
            .map(|(f, k)| {
                let base = if f.num_terms() == 1 && f.total_degree() == 1 && f.leading_coeff().is_one() {
                    f.to_string()
                } else {
                    format!("({f})")
                };
                if *k == 1 {
                    base
                } else {
                    format!("{base}^{k}")
                }
            })
            .collect();
        parts.join("*")
    }
}

fn subst_poly(p: &Poly, values: &[RatExpr], target: &Vars) -> RatExpr {
    let mut acc = RatExpr::zero(target);
    let mut powers: Vec<Vec<RatExpr>> = values.iter().map(|v| vec![RatExpr::one(target), v.clone()]).collect();
    for (m, c) in p.terms() {
        let mut t = RatExpr::constant(target, c.clone());
        for (i, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[i].len() <= e as usize {
                let next = &powers[i][powers[i].len() - 1] * &values[i];
                powers[i].push(next);
            }
            t = &t * &powers[i][e as usize];
        }
        acc = &acc + &t;
    }
    acc
}

/// Canonical form: the numerator expanded in graded-lex order; a
/// non-trivial denominator is parenthesized and printed as a product of
/// its squarefree factors, e.g. `(-4)/((x+y)^2)`.
impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den_factored())
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatExpr({self})")
    }
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatExpr::from_poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return RatExpr::reduce(&self.num + &rhs.num, self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        let bb = self.den.exact_div(&g).expect("gcd divides");
        let dd = rhs.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &dd) + &(&rhs.num * &bb);
        if num.is_zero() {
            return RatExpr::zero(self.vars());
        }
        let den = &self.den * &dd;
        if g.is_one() {
            return RatExpr::normalized(num, den);
        }
        let h = gcd(&num, &g);
        if h.is_one() {
            RatExpr::normalized(num, den)
        } else {
            RatExpr::normalized(num.exact_div(&h).expect("divides"), den.exact_div(&h).expect("divides"))
        }
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        self + &(-rhs)
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        if self.is_zero() || rhs.is_zero() {
            return RatExpr::zero(self.vars());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatExpr::from_poly(&self.num * &rhs.num);
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let a = self.num.exact_div(&g1).expect("divides");
        let d = rhs.den.exact_div(&g1).expect("divides");
        let c = rhs.num.exact_div(&g2).expect("divides");
        let b = self.den.exact_div(&g2).expect("divides");
        RatExpr::normalized(&a * &c, &b * &d)
    }
}

/// Panics on division by the zero expression; see [`RatExpr::checked_div`].
impl Div for &RatExpr {
    type Output = RatExpr;
    fn div(self, rhs: &RatExpr) -> RatExpr {
        self.checked_div(rhs).expect("division by zero RatExpr")
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RatExpr {
            type Output = RatExpr;
            fn $f(self, rhs: RatExpr) -> RatExpr {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&RatExpr> for RatExpr {
            type Output = RatExpr;
            fn $f(self, rhs: &RatExpr) -> RatExpr {
                (&self).$f(rhs)
            }
        }
        impl $tr<RatExpr> for &RatExpr {
            type Output = RatExpr;
            fn $f(self, rhs: RatExpr) -> RatExpr {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> RatExpr {
        parse(s, &Vars::xyz()).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn cancellation() {
        assert!(e("(x+y)/(x+y)").is_one());
        assert!((e("x/y") * e("y/x")).is_one());
    }

    #[test]
    fn sum_of_fractions() {
        assert_eq!(e("1/(x+y)") + e("1/(x-y)"), e("2*x/(x^2-y^2)"));
    }

    #[test]
    fn golden_form_structure() {
        let t = e("-4/(x+y)^2");
        assert_eq!(t.num(), e("-4").num());
        assert_eq!(t.den(), e("x^2+2*x*y+y^2").num());
        assert_eq!(t.to_string(), "(-4)/((x+y)^2)");
    }

    #[test]
    fn derivative_rules() {
        assert_eq!(e("x^2*y").diff(0), e("2*x*y"));
        assert_eq!(e("1/(x+y)").diff(0), e("-1/(x+y)^2"));
    }

    #[test]
    fn evaluation() {
        assert_eq!(e("-4/(x+y)^2").eval(&[q(1), q(1), q(0)]).unwrap(), q(-1));
        assert!(matches!(e("x/y").eval(&[q(1), q(0), q(0)]), Err(ExprError::Pole { .. })));
        // 2(1-a^2) s t / (a (t x - s y)^2) at a=2, s=t=1, (1,0,0)
        let f = e("2*(1-4)*1*1/(2*(1*x-1*y)^2)");
        assert_eq!(f.eval(&[q(1), q(0), q(0)]).unwrap(), q(-3));
    }

    #[test]
    fn substitution() {
        let uv = Vars::new(&["u", "v"]).unwrap();
        let f = parse("u/v - v", &uv).unwrap();
        let r = f.substitute(&[e("x*y"), e("x")]).unwrap();
        assert_eq!(r, e("y-x"));
    }

    #[test]
    fn denominators_printed_factored() {
        assert_eq!(e("1/(x^2*y)").to_string(), "(1)/(x^2*y)");
        assert_eq!(e("x/(2*y+2)").to_string(), "(1/2*x)/(y+1)");
        assert_eq!(e("3/(x*(x+y)^2)").to_expanded_string(), "(3)/(x^3+2*x^2*y+x*y^2)");
    }
}
