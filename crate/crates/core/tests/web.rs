use bipencil::pencil::Pencil;
use bipencil::poisson::PoissonTensor;
use bipencil::web::*;
use bipencil::{parse, Vars};

fn casimirs(f: &str, g: &str, h: &str) -> CasimirTriple {
    let v = Vars::xyz();
    CasimirTriple { f: parse(f, &v).unwrap(), g: parse(g, &v).unwrap(), h: parse(h, &v).unwrap() }
}

fn pencil(p: [&str; 3], q: [&str; 3]) -> Pencil {
    let v = Vars::xyz();
    Pencil::new(
        PoissonTensor::parse(&v, p[0], p[1], p[2]).unwrap(),
        PoissonTensor::parse(&v, q[0], q[1], q[2]).unwrap(),
    )
    .unwrap()
}

#[test]
fn ladder_fits_cubic_defect() {
    let w = Web3::parse("u", "v", "u+v+u^2*v").unwrap();
    let o = [0.5, 0.3];
    let kappa = blaschke_curvature(&w).unwrap().kappa.eval_f64(&o).unwrap();
    let fit = hexagon_ladder(&w.compile(), o, &geometric_ladder(1e-3, 1e-1, 7)).unwrap();
    println!("kappa {kappa} fit {fit:?}");
    assert!((fit.exponent - 3.0).abs() < 0.2);
    assert!((fit.kappa_hat - kappa).abs() < 0.1 * kappa.abs());
}

#[test]
fn reduction_nonflat_exact_and_numeric() {
    let pen = pencil(["0", "y", "x"], ["0", "-(x+y)", "0"]);
    let c = casimirs("x*y", "x", "y-x");
    let rep = reduction_crosscheck(&pen, &c, ReductionMode::Auto).unwrap();
    println!("{rep:?}");
    assert!(matches!(rep.route, ReductionRoute::Exact { .. }));
    assert!(rep.agree);
    let rep = reduction_crosscheck(&pen, &c, ReductionMode::NumericOnly).unwrap();
    println!("{rep:?}");
    assert!(rep.agree);
}

#[test]
fn reduction_flat_family() {
    // [z,x] = x, [z,y] = y with the frozen cocycle A(z,x) = A(z,y) = 1
    let pen = pencil(["0", "-y", "x"], ["0", "-1", "1"]);
    let c = casimirs("x/y", "y-x", "(x+1)/(y+1)");
    let rep = reduction_crosscheck(&pen, &c, ReductionMode::Auto).unwrap();
    println!("{rep:?}");
    assert!(rep.curvature.is_zero());
    assert!(matches!(rep.route, ReductionRoute::Exact { .. }));
    assert!(rep.agree);
}

#[test]
fn reduction_algebraic_h_uses_numeric_route() {
    // a = 2: [z,x] = x, [z,y] = 2y, A(z,x) = 1, A(z,y) = 2
    let pen = pencil(["0", "-2*y", "x"], ["0", "-2", "1"]);
    let c = casimirs("x^2/y", "y-2*x", "(x+1)^2/(y+1)");
    let rep = reduction_crosscheck(&pen, &c, ReductionMode::Auto).unwrap();
    println!("{rep:?}");
    assert!(matches!(rep.route, ReductionRoute::Numeric { .. }));
    assert!(rep.agree);
}
