mod common;

use common::*;
use lbq::corrections::{
    commutation_residual, compatibility_check, gauge_space_check, obstruction_one_form, rad_obstruction,
    simultaneous_correction, solve_correction_pair, solve_potential, stackel_correction, Corrected, CorrectionError,
    CorrectionFamily, CorrectionPair, Simultaneous, StackelOutcome,
};
use lbq::integrability::{carter_condition, poisson_commutes, QuadraticObservable, StackelSystem};
use lbq::{Chart, Expr};
use proptest::prelude::*;

fn ham(c: &Chart) -> QuadraticObservable {
    QuadraticObservable::hamiltonian(c, "H", Expr::zero())
}

fn same(c: &Chart, a: &Expr, b: &Expr) -> bool {
    c.zero_test().is_zero(&(a - b))
}

fn pair_for(c: &Chart, k: &str, e_text: &str) -> CorrectionPair {
    solve_correction_pair(c, &ham(c), &obs(c, "K", k), &e(e_text)).unwrap()
}

const ER_E: &str = "-3*a^2*(r^2+z^2)/(4*(a^2*r^2-z^2)^2) - (a^2+1)/4*(a^2*r^2+z^2)/(a^2*r^2-z^2)^2";
const ER_E_PRINTED: &str = "-3*a^2*(r^2+z^2)/(4*(a^2*r^2-z^2)^2) - (a+1)^2/4*(a^2*r^2+z^2)/(a^2*r^2-z^2)";
const ER_EK: &str = "-a^2*(a^2*r^2+4*z^2)/(4*(a^2*r^2-z^2)^2)";

#[test]
fn reduced_minkowski_correction() {
    let c = er2();
    let k = er2_k(&c);
    let sc8 = (c.scalar_curvature() * e("-1/8")).normal();
    let e_corr = e(ER_E);
    assert!(same(&c, &sc8, &e("-3*a^2*(r^2+z^2)/(4*(a^2*r^2-z^2)^2)")));
    let pair = solve_correction_pair(&c, &ham(&c), &k, &e_corr).unwrap();
    assert!(same(&c, &pair.e_k, &e(ER_EK)), "{}", pair.e_k);
    match solve_correction_pair(&c, &ham(&c), &k, &e(ER_E_PRINTED)) {
        Err(CorrectionError::NotClosed(v)) => assert!(v.fails()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn incompatible_curvature_correction() {
    let c = rad1();
    let k = rad1_k();
    assert!(carter_condition(&c, &k).unwrap().holds());
    let zero = obstruction_one_form(&c, &k, &Expr::zero()).unwrap();
    assert!(zero.check_zero(c.zero_test()).holds());
    let v = compatibility_check(&c, &k, c.scalar_curvature()).unwrap();
    let f = v.failure().expect("not closed");
    assert_eq!(f.index, vec![1, 2]);
    // the residual is a multiple of (∂₂² + ∂₃²)∂₂∂₃ ln(u+v) with a nonvanishing factor
    let l = opaque("ln(u(q2) + v(q3))");
    let mixed = l.diff("q2").diff("q3");
    let lap = (mixed.diff("q2").diff("q2") + mixed.diff("q3").diff("q3")).normal();
    let ratio = (&f.residual / &lap).normal();
    assert_eq!(ratio, Expr::int(-2));
}

#[test]
fn three_dimensional_pair() {
    let c = h3();
    let e3 = (c.scalar_curvature() * e("-1/8")).normal();
    assert!(same(&c, &e3, &e("3/4*(1+1/sin(q3)^2)")));
    // printed expansion carries the opposite sign
    assert!(!same(&c, &e3, &e("-3/4*(1+1/sin(q3)^2)")));
    let k3 = obs(&c, "K3", K3);
    assert!(compatibility_check(&c, &k3, &e3).unwrap().holds());
    let pair = solve_correction_pair(&c, &ham(&c), &k3, &e3).unwrap();
    assert!(same(&c, &pair.e_k, &e("-1/2*cos(q2)*(5/tan(q3)^2 + 2)")), "{}", pair.e_k);
}

#[test]
fn four_dimensional_pairs() {
    let c = h4();
    let e4 = (c.scalar_curvature() * e("-1/6")).normal();
    assert!(same(&c, &e4, &e("(4+3*sin(q3)^2)/(q4^2*sin(q3)^2)")));
    let p = pair_for(&c, K4, "(4+3*sin(q3)^2)/(q4^2*sin(q3)^2)");
    assert!(same(&c, &p.e_k, &e("-2*cos(q3)*(4+3*sin(q3)^2)/(q4^2*sin(q3)^2)")), "{}", p.e_k);
    let p = pair_for(&c, K3, "3/q4^2*(1+1/sin(q3)^2)");
    assert!(same(&c, &p.e_k, &e("-1/2*cos(q2)*(5/tan(q3)^2 + 2)")), "{}", p.e_k);
}

#[test]
fn primed_four_dimensional_pairs() {
    let c = h4prime();
    let e4 = (c.scalar_curvature() * e("-1/6")).normal();
    let printed = e("(4+3*sin(q3)^2)/(sin(q4)^2*sin(q3)^2) + 2");
    assert!(same(&c, &e4, &printed));
    let p = pair_for(&c, K4P, "(4+3*sin(q3)^2)/(sin(q4)^2*sin(q3)^2) + 2");
    let ek = e("-2*cos(q3)*((4+3*sin(q3)^2)/(tan(q4)^2*sin(q3)^2) + 1)");
    assert!(same(&c, &p.e_k, &ek), "{}", p.e_k);
    let p = pair_for(&c, K3, "3/sin(q4)^2*(1+1/sin(q3)^2)");
    assert!(same(&c, &p.e_k, &e("-1/2*cos(q2)*(5/tan(q3)^2 + 2)")), "{}", p.e_k);
}

#[test]
fn residual_includes_classical_potentials() {
    let c = flat2();
    let h = QuadraticObservable::hamiltonian(&c, "H", e("x^2 + y^2"));
    let k = obs(&c, "K", "p1^2").with_potential(e("2*x^2"));
    let zero = CorrectionPair::zero();
    assert!(commutation_residual(&c, &h, &k, &zero).unwrap().check_zero(c.zero_test()).holds());
    let k = k.with_potential(e("x^2"));
    assert!(matches!(solve_correction_pair(&c, &h, &k, &Expr::zero()), Err(CorrectionError::Residual(_))));
}

fn four_d_items(c: &Chart) -> Vec<Corrected> {
    let item = |k: &str, ee: &str, f: &str| Corrected { observable: obs(c, "K", k), e: e(ee), f: e(f) };
    vec![
        item(K4, "(4+3*sin(q3)^2)/(q4^2*sin(q3)^2)", "-2*cos(q3)*(4+3*sin(q3)^2)/(q4^2*sin(q3)^2)"),
        item(K3, "3/q4^2*(1+1/sin(q3)^2)", "-1/2*cos(q2)*(5/tan(q3)^2 + 2)"),
        item(K2, "0", "0"),
        item(H3, "0", "0"),
        item(H2, "0", "0"),
        item(H1, "0", "0"),
    ]
}

const FAMILY4: &str =
    "3/q4^2 + 3/(q4^2*sin(q3)^2) + (C1 + C2*cos(q2))/(q4^2*sin(q3)^2*sin(q2)^2) + C3*q4^2 + C4";

#[test]
fn four_dimensional_family() {
    let c = h4();
    let items = four_d_items(&c);
    let fam = CorrectionFamily::new(e(FAMILY4), &["C1", "C2", "C3", "C4"]);
    let out = simultaneous_correction(&c, &items, &fam).unwrap();
    let Simultaneous::Compatible { constraints, fixed, free, e: surviving, potentials } = out else {
        panic!("{out:?}")
    };
    assert!(constraints.iter().all(|k| k.item == 2), "{constraints:?}");
    let printed = e("(cos(q2)^4 - 6*cos(q2)^2 - 3)*C2 - 8*C1*cos(q2)");
    for k in &constraints {
        let ratio = (k.equation() / &printed).normal();
        assert!(!c.zero_test().is_zero(&ratio));
        for x in ["C1", "C2"] {
            assert!(c.zero_test().is_zero(&ratio.diff(x)), "{} / printed = {ratio}", k.equation());
        }
    }
    let names: Vec<String> = fixed.iter().map(|(n, v)| format!("{n}={v}")).collect();
    assert_eq!(names, ["C1=0", "C2=0"]);
    assert_eq!(free.iter().map(|n| n.to_string()).collect::<Vec<_>>(), ["C3", "C4"]);
    assert!(same(&c, &surviving, &e("3/q4^2 + 3/(q4^2*sin(q3)^2) + C3*q4^2 + C4")));
    // corrected operator potentials
    let expect = [
        "2*cos(q3)*(C3*q4^2 - 3*(1+sin(q3)^2)/(q4^2*sin(q3)^2))",
        "-1/2*cos(q2)*(5/tan(q3)^2 + 2)",
        "0",
        "3/(4*sin(q3)^2)",
        "0",
        "0",
    ];
    // operator list names the q4^2 coefficient C4 after dropping the additive constant
    for (w, x) in potentials.iter().zip(expect) {
        let diff = (w - e(x)).normal();
        for q in ["q1", "q2", "q3", "q4"] {
            assert!(c.zero_test().is_zero(&diff.diff(q)), "{x}: {diff}");
        }
    }
}

#[test]
fn single_pair_needs_no_shift() {
    let c = h3();
    let items = vec![Corrected {
        observable: obs(&c, "K3", K3),
        e: e("3/4*(1+1/sin(q3)^2)"),
        f: e("-1/2*cos(q2)*(5/tan(q3)^2 + 2)"),
    }];
    let out = simultaneous_correction(&c, &items, &CorrectionFamily::from(e("3/4*(1+1/sin(q3)^2)"))).unwrap();
    match out {
        Simultaneous::Compatible { potentials, constraints, .. } => {
            assert!(constraints.is_empty());
            assert!(same(&c, &potentials[0], &items[0].f));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn incompatible_candidate_is_reported() {
    let c = h4();
    let items = four_d_items(&c);
    let out = simultaneous_correction(&c, &items, &CorrectionFamily::from(e(FAMILY4).subst("C2", &e("1")))).unwrap();
    match out {
        Simultaneous::Incompatible { item, verdict, .. } => {
            assert_eq!(item, 2);
            assert!(verdict.fails());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn five_dimensional_correction() {
    let c = h5();
    let fam = "C5*q5^2 + 27/(4*q5^2) + 12/(q5^2*sin(q4)^2)*(1+1/sin(q3)^2)";
    let item = |k: &str, f: &str| Corrected { observable: obs(&c, "K", k), e: e(fam), f: e(f) };
    // each integral with the shared E and its printed potential
    let items = vec![
        item(
            K5,
            "2*cos(q4)*(C5*q5^2 - 21/(4*q5^2) - 12/(q5^2*sin(q4)^2)*(1+1/sin(q3)^2))",
        ),
        item(H4P, "3/sin(q4)^2*(1+1/sin(q3)^2)"),
        item(K3, "-1/2*cos(q2)*(5/tan(q3)^2 + 2)"),
        item(K2, "0"),
        item(H3, "3/(4*sin(q3)^2)"),
        item(H2, "0"),
        item(H1, "0"),
    ];
    let h = ham(&c);
    for it in &items {
        let pair = CorrectionPair::new(it.e.clone(), it.f.clone());
        let r = commutation_residual(&c, &h, &it.observable.with_potential(Expr::zero()), &pair).unwrap();
        assert!(r.check_zero(c.zero_test()).holds(), "{}", it.f);
    }
    let out = simultaneous_correction(&c, &items, &CorrectionFamily::new(e(fam), &["C5"])).unwrap();
    assert!(matches!(out, Simultaneous::Compatible { ref fixed, .. } if fixed.is_empty()), "{out:?}");
}

#[test]
fn primed_integral_inside_five_dimensions() {
    let c = h5();
    let e5 = e("27/(4*q5^2) + 12/(q5^2*sin(q4)^2)*(1+1/sin(q3)^2)");
    let p = solve_correction_pair(&c, &ham(&c), &obs(&c, "K", K4P), &e5).unwrap();
    let corrected = e("2*cos(q3)*(-1 - 3/tan(q4)^2*(1+1/sin(q3)^2))");
    let printed = e("2*cos(q3)*(-tan(q4)^2 - 3 - 3/sin(q3)^2)");
    let d = (&p.e_k - corrected).normal();
    assert!(["q1", "q2", "q3", "q4", "q5"].iter().all(|x| c.zero_test().is_zero(&d.diff(x))), "{}", p.e_k);
    assert!(!c.zero_test().is_zero(&(&p.e_k - printed).normal().diff("q4")));
}

#[test]
fn gauge_examples() {
    let c = h4();
    let k = obs(&c, "K4", K4);
    let p0 = pair_for(&c, K4, "(4+3*sin(q3)^2)/(q4^2*sin(q3)^2)");
    assert!(gauge_space_check(&c, &k, &p0, &p0).unwrap().holds());
    let shifted = CorrectionPair::new(&p0.e + e("C3*q4^2 + C4"), &p0.e_k + e("2*cos(q3)*C3*q4^2"));
    assert!(gauge_space_check(&c, &k, &p0, &shifted).unwrap().holds());
    let bad = CorrectionPair::new(&p0.e + e("q4"), p0.e_k.clone());
    assert!(gauge_space_check(&c, &k, &p0, &bad).unwrap().fails());
}

#[test]
fn stackel_three_dimensional() {
    let c = h3();
    let e3 = e("3/4*(1+1/sin(q3)^2)");
    let sys = StackelSystem::new(c.clone(), vec![ham(&c), obs(&c, "H2", H2), obs(&c, "H1", H1)], true).unwrap();
    match stackel_correction(&sys, &e3).unwrap() {
        StackelOutcome::Valid { corrections, multiplier, robertson, pre_robertson, system } => {
            assert!(corrections[1..].iter().all(Expr::is_zero_const), "{corrections:?}");
            assert!(multiplier.holds());
            assert!(robertson.holds());
            assert!(pre_robertson.holds());
            assert!(system.involution().holds());
        }
        other => panic!("{other:?}"),
    }
    let sys = StackelSystem::new(c.clone(), vec![ham(&c), obs(&c, "K2", K2), obs(&c, "H1", H1)], false).unwrap();
    match stackel_correction(&sys, &e3).unwrap() {
        StackelOutcome::Valid { corrections, .. } => assert!(corrections[1..].iter().all(Expr::is_zero_const)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn stackel_zero_correction() {
    let c = h3();
    let sys = StackelSystem::new(c.clone(), vec![ham(&c), obs(&c, "H2", H2), obs(&c, "H1", H1)], true).unwrap();
    match stackel_correction(&sys, &Expr::zero()).unwrap() {
        StackelOutcome::Valid { corrections, .. } => assert!(corrections.iter().all(Expr::is_zero_const)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn stackel_four_dimensional() {
    let c = h4();
    let obs_list = vec![ham(&c), obs(&c, "H3", H3), obs(&c, "H2", H2), obs(&c, "H1", H1)];
    let sys = StackelSystem::new(c.clone(), obs_list, true).unwrap();
    let e4 = e("3*(1+sin(q3)^2)/(q4^2*sin(q3)^2) + C4*q4^2");
    match stackel_correction(&sys, &e4).unwrap() {
        StackelOutcome::Valid { corrections, multiplier, robertson, .. } => {
            assert!(same(&c, &corrections[1], &e("3/(4*sin(q3)^2)")), "{}", corrections[1]);
            assert!(corrections[2].is_zero_const() && corrections[3].is_zero_const());
            assert!(multiplier.holds());
            assert!(robertson.holds());
        }
        other => panic!("{other:?}"),
    }
    // not a multiplier: the correction must leave the system separable
    match stackel_correction(&sys, &e("q3*q4")).unwrap() {
        StackelOutcome::Invalid { verdict, .. } => assert!(verdict.fails()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn stackel_requires_pre_robertson() {
    let c = h4();
    let sys = StackelSystem::new(c.clone(), vec![ham(&c), obs(&c, "K4", K4), obs(&c, "K3", K3), obs(&c, "H1", H1)], false)
        .unwrap();
    assert!(matches!(stackel_correction(&sys, &Expr::zero()), Err(CorrectionError::PreRobertson(_))));
}

#[test]
fn conformal_obstruction() {
    let c = h3();
    for p in [H1, H2, K2, K3] {
        assert!(rad_obstruction(&c, &obs(&c, "K", p)).unwrap().holds(), "{p}");
    }
    let c = rad1();
    assert!(rad_obstruction(&c, &rad1_k()).unwrap().fails());
}

#[test]
fn conformal_obstruction_matches_curvature_correction() {
    let cases: Vec<(Chart, QuadraticObservable)> = {
        let h = h3();
        let mut v: Vec<_> = [H1, H2, K2, K3].iter().map(|p| (h.clone(), obs(&h, "K", p))).collect();
        let er = er2();
        let k = er2_k(&er);
        v.push((er, k));
        v.push((rad1(), rad1_k()));
        v
    };
    for (c, k) in cases {
        let e = (c.scalar_curvature() * Expr::rational(-1, 8)).normal();
        let a = rad_obstruction(&c, &k).unwrap().holds();
        let b = compatibility_check(&c, &k, &e).unwrap().holds();
        assert_eq!(a, b, "dim {} {}", c.dim(), k.name());
    }
}

#[test]
fn zero_correction_is_carter() {
    let corpus: Vec<(Chart, Vec<&str>)> = vec![
        (h2(), vec![H1, K2]),
        (h3(), vec![H1, H2, K2, K3]),
        (h4(), vec![H1, H2, H3, K2, K3, K4]),
        (h4prime(), vec![K3, K4P]),
    ];
    for (c, list) in corpus {
        let h = ham(&c);
        for p in list {
            let k = obs(&c, "K", p);
            assert!(poisson_commutes(&c, &h, &k).unwrap().holds());
            let carter = carter_condition(&c, &k).unwrap().holds();
            let zero = match solve_correction_pair(&c, &h, &k, &Expr::zero()) {
                Ok(pair) => pair.e_k.is_zero_const(),
                Err(_) => false,
            };
            assert_eq!(carter, zero, "{p}");
        }
    }
}

#[test]
fn potential_recovery_reports_residual() {
    let c = flat2();
    let w = lbq::SymTensor::from_vec(lbq::Variance::Down, vec![e("exp(x^2)"), e("0")]);
    match solve_potential(&c, &w) {
        Err(CorrectionError::Integration { coord, .. }) => assert_eq!(coord, "x"),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Stäckel multipliers of `H2` in the three-dimensional chart are
    /// homogeneous solutions, and adding one keeps the pair valid.
    #[test]
    fn gauge_invariance(a in -3i64..=3, b in -3i64..=3, cc in -3i64..=3, d in -3i64..=3) {
        let c = h3();
        let k = obs(&c, "H2", H2);
        let base = CorrectionPair::new(e("3/4*(1+1/sin(q3)^2)"), e("0"));
        let f = e(&format!("{a}*q3 + {b}*q3^2"));
        let g = e(&format!("{cc}*cos(q2) + {d}*q2"));
        let eo = (&f + e("4/sin(q3)^2") * &g).normal();
        let shifted = CorrectionPair::new(&base.e + &eo, &base.e_k + &g);
        prop_assert!(gauge_space_check(&c, &k, &base, &shifted).unwrap().holds());
        let w = obstruction_one_form(&c, &k, &shifted.e).unwrap();
        let back = solve_potential(&c, &w).unwrap();
        prop_assert!(same(&c, &back, &shifted.e_k));
        let r = commutation_residual(&c, &ham(&c), &k, &shifted).unwrap();
        prop_assert!(r.check_zero(c.zero_test()).holds());
    }
}
