use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{format_rational, rational_to_f64, ExprError, Rational, Vars};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub(crate) fn gcd_with(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in a map keyed by graded-lex monomials with no zero
/// coefficients, so equal polynomials have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(vars: &Vars) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Poly::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Poly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn var(vars: &Vars, index: usize) -> Self {
        assert!(index < vars.len(), "variable index out of range");
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        Poly::monomial(vars, Monomial(e), Rational::one())
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), vars.len(), "exponent vector length");
        let mut p = Poly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Poly::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Largest term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// True when every term has total degree exactly one.
    pub fn is_linear_homogeneous(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 1)
    }

    /// Coefficient of the monomial, zero if absent.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Poly) {
        assert!(
            self.vars == other.vars,
            "mixing polynomials over different variable lists: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    /// `self -= c * m * d`
    fn sub_mul_term(&mut self, d: &Poly, m: &Monomial, c: &Rational) {
        for (k, a) in &d.terms {
            self.add_term(k.mul(m), -(a * c));
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Poly {
        let mut out = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut k = m.clone();
            k.0[var] -= 1;
            out.add_term(k, c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ExprError> {
        self.check_arity(point.len())?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, ExprError> {
        self.check_arity(point.len())?;
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= x.powi(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    fn check_arity(&self, got: usize) -> Result<(), ExprError> {
        if got != self.vars.len() {
            return Err(ExprError::PointArity { expected: self.vars.len(), got });
        }
        Ok(())
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        self.check_vars(d);
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        if d.num_terms() == 1 {
            let mut q = Poly::zero(&self.vars);
            for (m, c) in &self.terms {
                q.terms.insert(m.checked_div(&dm)?, c / &dc);
            }
            return Some(q);
        }
        let mut r = self.clone();
        let mut q = Poly::zero(&self.vars);
        while let Some((m, c)) = r.leading() {
            let qm = m.checked_div(&dm)?;
            let qc = c / &dc;
            r.sub_mul_term(d, &qm, &qc);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Divides by the leading coefficient. Returns the coefficient and the monic polynomial.
    pub fn monic(&self) -> (Rational, Poly) {
        match self.leading() {
            None => (Rational::one(), self.clone()),
            Some((_, c)) => {
                let c = c.clone();
                let inv = c.recip();
                (c, self.scale(&inv))
            }
        }
    }

    /// Coefficients as a univariate polynomial in `var`; the coefficient
    /// polynomials live over the same variable list and do not involve `var`.
    pub fn coeffs_in(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut k = m.clone();
            k.0[var] = 0;
            out.entry(e)
                .or_insert_with(|| Poly::zero(&self.vars))
                .terms
                .insert(k, c.clone());
        }
        out
    }

    /// Leading coefficient in `var` (as a polynomial free of `var`).
    pub fn lead_coeff_in(&self, var: usize) -> (u32, Poly) {
        let d = self.degree_in(var);
        let mut out = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.0[var] == d {
                let mut k = m.clone();
                k.0[var] = 0;
                out.terms.insert(k, c.clone());
            }
        }
        (d, out)
    }

    pub fn times_var_pow(&self, var: usize, e: u32) -> Poly {
        let mut m = Monomial::one(self.vars.len());
        m.0[var] = e;
        self.mul_term(&m, &Rational::one())
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.vars.len()),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd_with(m)),
        }
    }

    /// Re-expresses the polynomial over another variable list by name.
    /// Every variable actually used must exist in `target`.
    pub fn rebase(&self, target: &Vars) -> Result<Poly, ExprError> {
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.names().iter().enumerate() {
            let used = self.involves(i);
            match target.index_of(name) {
                Some(j) => map.push(Some(j)),
                None if !used => map.push(None),
                None => return Err(ExprError::UnknownVariable(name.clone())),
            }
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] = k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    pub(crate) fn fmt_with(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.name(v).to_string()),
                    _ => factors.push(format!("{}^{}", self.vars.name(v), e)),
                }
            }
            if factors.is_empty() {
                f.write_str(&format_rational(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", format_rational(&a))?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = Poly::zero(&self.vars);
        for (m, c) in &rhs.terms {
            for (k, a) in &self.terms {
                out.add_term(k.mul(m), a * c);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0, 0]);
        let b = Monomial(vec![1, 1, 0]);
        let c = Monomial(vec![0, 0, 3]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn exact_division() {
        let v = Vars::xyz();
        let x = Poly::var(&v, 0);
        let y = Poly::var(&v, 1);
        let s = &x + &y;
        let p = &s * &(&x - &y);
        assert_eq!(p.exact_div(&s).unwrap(), &x - &y);
        assert!(p.exact_div(&(&x + &Poly::one(&v))).is_none());
        assert!(x.exact_div(&y).is_none());
    }

    #[test]
    fn diff_and_eval() {
        let v = Vars::xyz();
        let x = Poly::var(&v, 0);
        let y = Poly::var(&v, 1);
        let p = &(&x * &x) * &y;
        assert_eq!(p.diff(0), (&x * &y).scale(&r(2)));
        assert_eq!(p.eval(&[r(2), r(3), r(0)]).unwrap(), r(12));
        assert_eq!(p.eval_f64(&[2.0, 3.0, 0.0]).unwrap(), 12.0);
    }

    #[test]
    fn printing() {
        let v = Vars::xyz();
        let x = Poly::var(&v, 0);
        let y = Poly::var(&v, 1);
        let p = &(&x * &x) - &(&y * &y).scale(&Rational::new(3.into(), 4.into()));
        assert_eq!(p.to_string(), "x^2-3/4*y^2");
        assert_eq!((-&x).to_string(), "-x");
        assert_eq!(Poly::zero(&v).to_string(), "0");
    }
}
