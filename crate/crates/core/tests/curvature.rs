mod common;

use common::*;
use lbq::geometry::{covariant_derivative, divergence, indices, raise_index};
use lbq::{Chart, Expr, SymTensor, Variance, ZeroTest};

fn same(c: &Chart, a: &Expr, b: &Expr) -> bool {
    c.zero_test().is_zero(&(a - b))
}

#[test]
fn scalar_curvature_of_the_ladder() {
    assert!(same(&h3(), h3().scalar_curvature(), &e("-6*(1 + 1/sin(q3)^2)")));
    let sc4 = h4().scalar_curvature().clone();
    assert!(same(&h4(), &(sc4 * e("-1/6")), &e("(4 + 3*sin(q3)^2)/(q4^2*sin(q3)^2)")));
    let sc5 = e("-12*(6*sin(q3)^2 + 8 + 3*sin(q4)^2*sin(q3)^2)/(q5^2*sin(q4)^2*sin(q3)^2)");
    assert!(same(&h5(), h5().scalar_curvature(), &sc5));
}

#[test]
fn reduced_minkowski_curvature() {
    let c = er2();
    let corrected = e("6*a^2*(r^2 + z^2)/(a^2*r^2 - z^2)^2");
    assert!(same(&c, c.scalar_curvature(), &corrected));
    // the value printed without the square differs
    let printed = e("6*a^2*(r^2 + z^2)/(a^2*r^2 - z^2)");
    assert!(c.zero_test().check(&(c.scalar_curvature() - printed)).is_nonzero());
}

#[test]
fn weyl_scalars() {
    let c = h4();
    assert!(same(&c, c.weyl_scalar().unwrap(), &e("24/(q4^2*sin(q3)^2)")));
    let c = h4prime();
    assert!(same(&c, c.weyl_scalar().unwrap(), &e("24/(sin(q4)^2*sin(q3)^2)")));
    let c = h5();
    let printed = e("4*sqrt(6)*sqrt(3*sin(q3)^4 + 8*sin(q3)^2 + 48)/(q5^2*sin(q4)^2*sin(q3)^2)");
    assert!(same(&c, c.weyl_scalar().unwrap(), &(printed.clone() * e("sqrt(3)"))));
    assert!(!same(&c, c.weyl_scalar().unwrap(), &printed));
}

#[test]
fn conformal_terms() {
    assert!(same(&er2(), &er2().conformal_laplacian_term(), &(er2().scalar_curvature() * e("-1/8"))));
    assert!(same(&h4(), &h4().conformal_laplacian_term(), &(h4().scalar_curvature() * e("-1/6"))));
    assert!(h2().conformal_laplacian_term().is_zero_const());
}

fn corpus() -> Vec<(&'static str, Chart)> {
    vec![
        ("flat2", flat2()),
        ("h2", h2()),
        ("h3", h3()),
        ("h4", h4()),
        ("h4prime", h4prime()),
        ("h5", h5()),
        ("er2", er2()),
        ("rad1", rad1()),
    ]
}

#[test]
fn first_bianchi() {
    for (name, c) in corpus() {
        let r = c.riemann();
        let n = c.dim();
        let cyc = SymTensor::from_fn(n, &[Variance::Up, Variance::Down, Variance::Down, Variance::Down], &[], |i| {
            let (a, b, cc, d) = (i[0], i[1], i[2], i[3]);
            (r.get(&[a, b, cc, d]) + r.get(&[a, cc, d, b]) + r.get(&[a, d, b, cc])).normal()
        });
        assert!(cyc.check_zero(c.zero_test()).holds(), "{name}");
    }
}

#[test]
fn contracted_bianchi() {
    for (name, c) in corpus() {
        let half = c.scalar_curvature() * e("1/2");
        let einstein = c.ricci().zip_with(c.metric(), |r, g| (r - &half * g).normal()).unwrap();
        let up = raise_index(&c, &einstein, 0).unwrap();
        let d = divergence(&c, &up).unwrap();
        assert!(d.check_zero(c.zero_test()).holds(), "{name}: {d}");
    }
}

#[test]
fn ricci_trace_is_scalar_curvature() {
    for (name, c) in corpus() {
        let mixed = raise_index(&c, c.ricci(), 0).unwrap();
        let tr = mixed.contract(0, 1).unwrap();
        assert!(same(&c, tr.get(&[]), c.scalar_curvature()), "{name}");
    }
}

#[test]
fn weyl_is_trace_free() {
    for (name, c) in corpus().into_iter().filter(|(_, c)| c.dim() >= 3) {
        let w = raise_index(&c, c.weyl().unwrap(), 0).unwrap();
        for (i, j) in [(0, 1), (0, 2), (0, 3)] {
            let t = w.contract(i, j).unwrap();
            assert!(t.check_zero(c.zero_test()).holds(), "{name} trace ({i},{j})");
        }
    }
}

#[test]
fn weyl_vanishes_in_three_dimensions() {
    for c in [h3(), er2(), rad1()] {
        assert!(c.weyl().unwrap().check_zero(c.zero_test()).holds());
    }
}

#[test]
fn cotton_york() {
    let c = h3();
    assert!(c.cotton_york().unwrap().check_zero(c.zero_test()).holds());
    let flat = Chart::diagonal(&["x", "y", "z"], vec![e("1"), e("1"), e("1")]).unwrap();
    assert!(flat.cotton_york().unwrap().check_zero(flat.zero_test()).holds());
    let c = rad1();
    assert!(c.cotton_york().unwrap().check_zero(c.zero_test()).fails());
}

#[test]
fn ricci_is_diagonal_on_separable_charts() {
    for c in [h3(), h4(), h4prime(), h5(), rad1()] {
        let r = c.ricci();
        for ix in indices(c.dim(), 2).filter(|ix| ix[0] != ix[1]) {
            assert!(c.zero_test().is_zero(r.get(&ix)));
        }
    }
    let r = er2().ricci().clone();
    assert!(!er2().zero_test().is_zero(r.get(&[0, 2])));
}

/// Christoffel symbols against central differences of the metric.
#[test]
fn christoffel_by_finite_differences() {
    use lbq::expr::{evaluate, Point};
    use rand::{Rng, SeedableRng};
    let c = er2();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let g = c.metric();
    let names = ["r", "phi", "z"];
    for _ in 0..10 {
        let mut p = Point::new().float("a", rng.gen_range(0.5..2.0));
        for n in names {
            p = p.float(n, rng.gen_range(0.5..2.0));
        }
        let h = 1e-5;
        let dg = |d: usize, i: usize, j: usize| {
            let f = |pt: &Point| evaluate(g.get(&[i, j]), pt).unwrap().to_f64();
            (f(&p.shifted(names[d], h)) - f(&p.shifted(names[d], -h))) / (2.0 * h)
        };
        for ix in indices(3, 3) {
            let (a, b, cc) = (ix[0], ix[1], ix[2]);
            let mut want = 0.0;
            for d in 0..3 {
                let ginv = evaluate(c.inverse_metric().get(&[a, d]), &p).unwrap().to_f64();
                want += 0.5 * ginv * (dg(b, d, cc) + dg(cc, d, b) - dg(d, b, cc));
            }
            let got = evaluate(c.christoffel().get(&ix), &p).unwrap().to_f64();
            assert!((got - want).abs() <= 1e-6 * (1.0 + want.abs()), "{ix:?}: {got} vs {want}");
        }
    }
}

#[test]
fn metricity_everywhere() {
    let zt = ZeroTest::default();
    for (name, c) in corpus() {
        assert!(covariant_derivative(&c, c.inverse_metric()).check_zero(&zt).holds(), "{name}");
    }
}
