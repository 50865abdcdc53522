//! Multivariate polynomial gcd over Q by content / primitive-part recursion.
//!
//! The polynomial is viewed as univariate in its first variable with
//! coefficients in the remaining ones; contents are computed recursively
//! and primitive parts are reduced by a primitive pseudo-remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Poly, Rational};

/// Monic gcd (leading coefficient 1 under graded-lex order). `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic().1;
    }
    if b.is_zero() {
        return a.monic().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.vars());
    }
    if a.num_terms() == 1 || b.num_terms() == 1 {
        let m = a.monomial_content().gcd_with(&b.monomial_content());
        return Poly::monomial(a.vars(), m, Rational::one());
    }
    if a.exact_div(b).is_some() {
        return b.monic().1;
    }
    if b.exact_div(a).is_some() {
        return a.monic().1;
    }
    if let Some(g) = heuristic(&integer_primitive(a), &integer_primitive(b)) {
        return g.monic().1;
    }
    let n = a.vars().len();
    let var = (0..n).find(|&i| a.involves(i) || b.involves(i)).expect("non-constant");
    match (a.involves(var), b.involves(var)) {
        (true, true) => gcd_in(a, b, var),
        (true, false) => gcd(&content_in(a, var), b),
        (false, true) => gcd(a, &content_in(b, var)),
        (false, false) => unreachable!(),
    }
}

/// Gcd of the integer coefficients, positive.
fn int_content(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().map(|(_, c)| c.numer().magnitude().clone().into()).max().unwrap_or_else(BigInt::zero)
}

/// `p` with `xi` substituted for `var`.
fn eval_at(p: &Poly, var: usize, xi: &BigInt) -> Poly {
    let mut out = Poly::zero(p.vars());
    for (d, c) in p.coeffs_in(var) {
        out = &out + &c.scale(&Rational::from_integer(xi.pow(d)));
    }
    out
}

/// Inverse of `eval_at` with balanced `xi`-adic digits.
fn reconstruct(mut image: Poly, var: usize, xi: &BigInt) -> Poly {
    let half = xi / 2;
    let mut out = Poly::zero(image.vars());
    let mut i = 0;
    while !image.is_zero() {
        let digit = Poly::from_terms(
            image.vars(),
            image.terms().filter_map(|(m, c)| {
                let mut r = c.numer().mod_floor(xi);
                if r > half {
                    r -= xi;
                }
                (!r.is_zero()).then(|| (m.clone(), Rational::from_integer(r)))
            }),
        );
        image = (&image - &digit).scale(&Rational::new(BigInt::one(), xi.clone()));
        out = &out + &digit.times_var_pow(var, i);
        i += 1;
    }
    out
}

/// Heuristic gcd of integer polynomials: evaluate the main variable at a
/// large integer, recurse, rebuild the candidate from its `xi`-adic digits
/// and keep it only if it divides both inputs. `None` means give up.
fn heuristic(a: &Poly, b: &Poly) -> Option<Poly> {
    let (ca, cb) = (int_content(a), int_content(b));
    let c = Rational::from_integer(ca.gcd(&cb));
    let a = a.scale(&Rational::new(BigInt::one(), ca));
    let b = b.scale(&Rational::new(BigInt::one(), cb));
    if a.is_constant() || b.is_constant() {
        return Some(Poly::constant(a.vars(), c));
    }
    let var = (0..a.vars().len()).find(|&i| a.involves(i) && b.involves(i))?;
    let mut xi: BigInt = BigInt::from(2) * max_norm(&a).min(max_norm(&b)) + 29;
    for _ in 0..6 {
        if xi.bits() > 4096 {
            return None;
        }
        let (ia, ib) = (eval_at(&a, var, &xi), eval_at(&b, var, &xi));
        if !ia.is_zero() && !ib.is_zero() {
            if let Some(g) = heuristic(&ia, &ib) {
                let g = reconstruct(g, var, &xi);
                if !g.is_zero() {
                    let g = integer_primitive(&g);
                    if a.exact_div(&g).is_some() && b.exact_div(&g).is_some() {
                        return Some(g.scale(&c));
                    }
                }
            }
        }
        xi = xi * BigInt::from(73794) / BigInt::from(27011);
    }
    None
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
pub(crate) fn content_in(p: &Poly, var: usize) -> Poly {
    let mut acc = Poly::zero(p.vars());
    for c in p.coeffs_in(var).into_values() {
        acc = gcd(&acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

pub(crate) fn primitive_part_in(p: &Poly, var: usize) -> Poly {
    let c = content_in(p, var);
    p.exact_div(&c).expect("content divides")
}

/// Pseudo-remainder of `a` by `b` in `var`, up to a nonzero factor free of `var`.
fn pseudo_rem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let (db, lb) = b.lead_coeff_in(var);
    let mut r = a.clone();
    while !r.is_zero() && r.involves(var) && r.degree_in(var) >= db {
        let (dr, lr) = r.lead_coeff_in(var);
        let shifted = (b * &lr).times_var_pow(var, dr - db);
        r = &(&r * &lb) - &shifted;
    }
    r
}

/// Dense coefficients in `var` after substituting `point` for the other variables.
fn image_in(p: &Poly, var: usize, point: &[Rational]) -> Vec<Rational> {
    let coeffs = p.coeffs_in(var);
    let deg = coeffs.keys().next_back().copied().unwrap_or(0) as usize;
    let mut out = vec![Rational::zero(); deg + 1];
    for (d, c) in coeffs {
        out[d as usize] = c.eval(point).expect("point has full length");
    }
    out
}

fn univariate_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    let trim = |v: &mut Vec<Rational>| {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() {
            let f = a.last().unwrap() / &lb;
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[i + shift] -= &f * c;
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True when an evaluation image proves the gcd of `a` and `b` free of `var`.
/// The image gcd degree bounds the true one from above as long as both
/// leading coefficients survive the substitution.
fn coprime_in(a: &Poly, b: &Poly, var: usize) -> bool {
    let n = a.vars().len();
    for attempt in 0..3i64 {
        let point: Vec<Rational> = (0..n).map(|j| Rational::from_integer((2 + 7 * attempt + 3 * j as i64).into())).collect();
        let (_, la) = a.lead_coeff_in(var);
        let (_, lb) = b.lead_coeff_in(var);
        if la.eval(&point).map_or(true, |v| v.is_zero()) || lb.eval(&point).map_or(true, |v| v.is_zero()) {
            continue;
        }
        return univariate_gcd_degree(image_in(a, var, &point), image_in(b, var, &point)) == 0;
    }
    false
}

/// Rescales to coprime integer coefficients. Polynomial contents ignore
/// rational factors, so without this the remainder sequence grows its
/// coefficients exponentially.
fn integer_primitive(p: &Poly) -> Poly {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    if num.is_zero() {
        return p.clone();
    }
    p.scale(&Rational::new(den, num))
}

fn gcd_in(a: &Poly, b: &Poly, var: usize) -> Poly {
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let c = gcd(&ca, &cb);
    if coprime_in(a, b, var) {
        return c;
    }
    let mut p = integer_primitive(&a.exact_div(&ca).expect("content divides"));
    let mut q = integer_primitive(&b.exact_div(&cb).expect("content divides"));
    if p.degree_in(var) < q.degree_in(var) {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        let r = pseudo_rem(&p, &q, var);
        if r.is_zero() {
            break q;
        }
        if !r.involves(var) {
            break Poly::one(a.vars());
        }
        p = q;
        q = integer_primitive(&primitive_part_in(&r, var));
    };
    let g = primitive_part_in(&g, var);
    (&c * &g).monic().1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Vars};

    fn p(s: &str) -> Poly {
        let e = parse(s, &Vars::xyz()).unwrap();
        assert!(e.den().is_one());
        e.num().clone()
    }

    #[test]
    fn common_linear_factor() {
        let g = gcd(&p("x^2-y^2"), &p("x^2+2*x*y+y^2"));
        assert_eq!(g, p("x+y"));
    }

    #[test]
    fn coprime() {
        assert!(gcd(&p("x^2+y"), &p("x+y^2")).is_one());
    }

    #[test]
    fn multivariate_with_content() {
        let a = p("(x+z)*(y*z+1)^2*(x-y)");
        let b = p("(y*z+1)*(x-y)^2*(z+3)");
        let g = gcd(&a, &b);
        assert_eq!(g, p("(y*z+1)*(x-y)").monic().1);
    }

    #[test]
    fn monomial_case() {
        assert_eq!(gcd(&p("x^2*y"), &p("x*y^3+x^2*y^2")), p("x*y"));
    }

    #[test]
    fn rational_coefficients_normalized() {
        let g = gcd(&p("2*x+4*y"), &p("3*x^2+6*x*y"));
        assert_eq!(g, p("x+2*y"));
    }

    #[test]
    fn heuristic_agrees_with_remainder_sequence() {
        let cases = [
            ("x^2*y-3*z+1", "y*z^2-x+2", "x*z+y^2-5"),
            ("2*x+3*y*z", "x^2-y^2+z", "7*y-x*z^2"),
            ("x*y*z+1", "x+y+z", "x-y"),
        ];
        for (f, g, h) in cases {
            let a = &p(f) * &p(g);
            let b = &p(f) * &p(h);
            let fast = gcd(&a, &b);
            let slow = gcd_in(&a, &b, 0);
            assert_eq!(fast, slow);
            assert!(fast.exact_div(&p(f)).is_some());
        }
    }
}
