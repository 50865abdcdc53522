//! Squarefree decomposition (Yun) used for printing denominators.

use num_traits::One;

use super::gcd::{content_in, gcd};
use super::{Poly, Rational};

/// Writes `p = c * prod f_i^{k_i}` with monic, pairwise coprime, squarefree
/// factors `f_i`, sorted by descending leading monomial.
pub fn squarefree(p: &Poly) -> (Rational, Vec<(Poly, u32)>) {
    let (c, m) = p.monic();
    let mut out = Vec::new();
    if !m.is_zero() {
        split(&m, &mut out);
    }
    out.sort_by(|a, b| {
        let ka = a.0.leading().map(|(m, _)| m.clone());
        let kb = b.0.leading().map(|(m, _)| m.clone());
        kb.cmp(&ka).then_with(|| a.0.to_string().cmp(&b.0.to_string())).then(a.1.cmp(&b.1))
    });
    (c, out)
}

fn split(p: &Poly, out: &mut Vec<(Poly, u32)>) {
    if p.is_constant() {
        return;
    }
    let vars = p.vars().clone();
    let mc = p.monomial_content();
    let p = if mc.is_one() {
        p.clone()
    } else {
        for (i, &e) in mc.exponents().iter().enumerate() {
            if e > 0 {
                out.push((Poly::var(&vars, i), e));
            }
        }
        p.exact_div(&Poly::monomial(&vars, mc, Rational::one())).expect("monomial content divides")
    };
    if p.is_constant() {
        return;
    }
    let v = (0..vars.len()).find(|&i| p.involves(i)).expect("non-constant");
    let c = content_in(&p, v);
    let prim = p.exact_div(&c).expect("content divides");
    yun(&prim, v, out);
    split(&c, out);
}

fn yun(f: &Poly, v: usize, out: &mut Vec<(Poly, u32)>) {
    let fp = f.diff(v);
    let a0 = gcd(f, &fp);
    let mut b = f.exact_div(&a0).expect("gcd divides");
    let mut c = fp.exact_div(&a0).expect("gcd divides");
    let mut d = &c - &b.diff(v);
    let mut k = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((a.monic().1, k));
        }
        let nb = b.exact_div(&a).expect("gcd divides");
        c = d.exact_div(&a).expect("gcd divides");
        b = nb;
        d = &c - &b.diff(v);
        k += 1;
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Vars};

    fn p(s: &str) -> Poly {
        parse(s, &Vars::xyz()).unwrap().num().clone()
    }

    #[test]
    fn perfect_square() {
        let (c, fs) = squarefree(&p("x^2+2*x*y+y^2"));
        assert!(c.is_one());
        assert_eq!(fs, vec![(p("x+y"), 2)]);
    }

    #[test]
    fn mixed_multiplicities() {
        let (c, fs) = squarefree(&p("3*x*(x+y)^2*(z+1)^3"));
        assert_eq!(c, Rational::from_integer(3.into()));
        let mut prod = Poly::one(&Vars::xyz());
        for (f, k) in &fs {
            prod = &prod * &f.pow(*k);
        }
        assert_eq!(prod.scale(&c), p("3*x*(x+y)^2*(z+1)^3"));
        assert_eq!(fs.iter().map(|f| f.1).collect::<Vec<_>>(), vec![1, 2, 3]);
    }
}
