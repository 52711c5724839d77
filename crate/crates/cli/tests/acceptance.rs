//! Acceptance run: one PASS/FAIL line per check. Lines tagged `known` are
//! printed values that disagree with the computation; each has a corrected
//! companion line. The process fails only on unexpected results.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use lbq::corrections::{
    commutation_residual, compatibility_check, gauge_space_check, obstruction_one_form, simultaneous_correction,
    solve_correction_pair, solve_potential, Corrected, CorrectionPair, Simultaneous,
};
use lbq::geometry::{divergence, raise_index};
use lbq::integrability::{carter_condition, ck_divergence_flat, ck_tensor, poisson_bracket, QuadraticObservable};
use lbq::operators::{commutator_is_zero, lb_quantize, theorem1_cross_check};
use lbq::{Chart, Expr, SymTensor, Variance, Verdict};
use lbq_cli::report::conventions;
use lbq_cli::spec::Spec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: [&str; 9] = ["rad1", "er2", "h2", "h3", "h4", "h4prime", "h5", "flat2", "einstein2"];

fn load(name: &str) -> Spec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.toml"));
    Spec::load(&path, lbq::ZeroTest::default().seed).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[derive(Default)]
struct Tally {
    pass: usize,
    fail: usize,
    known: usize,
    unexpected: Vec<String>,
}

impl Tally {
    fn check(&mut self, crit: u8, what: &str, ok: bool) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{crit}] {what}");
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
            self.unexpected.push(format!("[{crit}] {what}"));
        }
    }

    /// A printed value expected to disagree with the computation.
    fn known(&mut self, crit: u8, what: &str, ok: bool, why: &str) {
        if ok {
            println!("PASS [{crit}] {what} (listed as a known conflict but it holds)");
            self.pass += 1;
            self.unexpected.push(format!("[{crit}] {what}: expected a conflict"));
        } else {
            println!("FAIL [{crit}] {what} (known: {why})");
            self.fail += 1;
            self.known += 1;
        }
    }

    fn budget(&mut self, crit: u8, start: Instant, limit: Duration) {
        let t = start.elapsed();
        self.check(crit, &format!("runtime {:.2} s within {} s", t.as_secs_f64(), limit.as_secs()), t < limit);
    }
}

fn same(c: &Chart, a: &Expr, b: &Expr) -> bool {
    c.zero_test().is_zero(&(a - b).normal())
}

/// Equal up to an additive constant.
fn same_mod_const(c: &Chart, a: &Expr, b: &Expr) -> bool {
    let d = (a - b).normal();
    c.coords().iter().all(|x| c.zero_test().is_zero(&d.diff(x)))
}

fn obs<'a>(s: &'a Spec, n: &str) -> &'a QuadraticObservable {
    s.observable(n).unwrap()
}

fn ex(s: &Spec, t: &str) -> Expr {
    s.expr("acceptance", t).unwrap()
}

fn ham(s: &Spec) -> QuadraticObservable {
    s.hamiltonian()
}

fn solved_ek(s: &Spec, k: &str, e: &str) -> Option<Expr> {
    solve_correction_pair(&s.chart, &ham(s), obs(s, k), &ex(s, e)).ok().map(|p| p.e_k)
}

fn operators_commute(s: &Spec, k: &str, pair: &CorrectionPair) -> bool {
    theorem1_cross_check(&s.chart, &ham(s), obs(s, k), pair).is_ok_and(|x| x.agree() && x.operator.holds())
}

fn criterion1(t: &mut Tally) {
    let start = Instant::now();
    let h3 = load("h3");
    t.check(1, "Sc3 = -6(1+1/sin^2 q3)", same(&h3.chart, h3.chart.scalar_curvature(), &ex(&h3, "-6*(1+1/sin(q3)^2)")));
    let er = load("er2");
    let sc = er.chart.scalar_curvature();
    t.known(
        1,
        "Sc(er2) = 6a^2(r^2+z^2)/(a^2r^2-z^2) as printed",
        same(&er.chart, sc, &ex(&er, "6*a^2*(r^2+z^2)/(a^2*r^2-z^2)")),
        "denominator must be squared",
    );
    t.check(
        1,
        "Sc(er2) = 6a^2(r^2+z^2)/(a^2r^2-z^2)^2",
        same(&er.chart, sc, &ex(&er, "6*a^2*(r^2+z^2)/(a^2*r^2-z^2)^2")),
    );
    let h5 = load("h5");
    t.check(
        1,
        "Sc5 = -12(6 sin^2q3 + 8 + 3 sin^2q4 sin^2q3)/(q5^2 sin^2q4 sin^2q3)",
        same(
            &h5.chart,
            h5.chart.scalar_curvature(),
            &ex(&h5, "-12*(6*sin(q3)^2+8+3*sin(q4)^2*sin(q3)^2)/(q5^2*sin(q4)^2*sin(q3)^2)"),
        ),
    );
    let h4 = load("h4");
    t.check(
        1,
        "W4 = 24/(q4^2 sin^2 q3)",
        same(&h4.chart, h4.chart.weyl_scalar().unwrap(), &ex(&h4, "24/(q4^2*sin(q3)^2)")),
    );
    let w5 = "4*sqrt(6)*sqrt(3*sin(q3)^4 + 8*sin(q3)^2 + 48)/(q5^2*sin(q4)^2*sin(q3)^2)";
    let w = h5.chart.weyl_scalar().unwrap();
    t.known(1, "W5 as printed", same(&h5.chart, w, &ex(&h5, w5)), "printed value is sqrt(C.C), W4 uses sqrt(3 C.C)");
    t.check(1, "W5 = sqrt(3) x printed", same(&h5.chart, w, &ex(&h5, &format!("sqrt(3)*{w5}"))));
    t.budget(1, start, Duration::from_secs(10));
}

fn criterion2(t: &mut Tally) {
    let start = Instant::now();
    let er = load("er2");
    let d = ck_divergence_flat(&er.chart, obs(&er, "K")).unwrap();
    let printed = [
        "-3*a^2/(a^2*r^2-z^2)*r*(2*a^2*r^2+3*z^2)",
        "0",
        "-3*a^2/(a^2*r^2-z^2)*z*(2*a^2*z^2+3*r^2)",
    ];
    let corrected = [
        "3*a^2*r*(2*a^2*r^2+3*z^2)/(a^2*r^2-z^2)^3",
        "0",
        "3*a^2*z*(3*a^2*r^2+2*z^2)/(a^2*r^2-z^2)^3",
    ];
    let all = |want: &[&str; 3]| (0..3).all(|i| same(&er.chart, d.get(&[i]), &ex(&er, want[i])));
    t.known(2, "(dC_K)^flat on er2 equals the printed one-form", all(&printed), "sign, denominator power and dz term differ");
    t.check(2, "(dC_K)^flat on er2 equals 3a^2/(a^2r^2-z^2)^3 (r(2a^2r^2+3z^2), 0, z(3a^2r^2+2z^2))", all(&corrected));
    t.budget(2, start, Duration::from_secs(5));
}

fn criterion3(t: &mut Tally) {
    let start = Instant::now();
    let er = load("er2");
    let c = &er.chart;
    let ek = ex(&er, "-a^2*(a^2*r^2+4*z^2)/(4*(a^2*r^2-z^2)^2)");
    let printed = er.correction("ER_printed").unwrap();
    t.known(
        3,
        "E as printed gives a potential E_K",
        solve_correction_pair(c, &ham(&er), obs(&er, "K"), &printed.pair.e).is_ok(),
        "obstruction one-form not closed; (a+1)^2 should be a^2+1 and the last denominator squared",
    );
    let corrected = er.correction("ER").unwrap();
    let w = obstruction_one_form(c, obs(&er, "K"), &corrected.pair.e).unwrap();
    let got = solve_potential(c, &w);
    t.check(
        3,
        "corrected E: solve_potential returns -a^2(a^2r^2+4z^2)/(4(a^2r^2-z^2)^2)",
        got.as_ref().is_ok_and(|g| same(c, g, &ek)),
    );
    let pair = CorrectionPair::new(corrected.pair.e.clone(), ek);
    let h = lb_quantize(c, &ham(&er), &pair.e);
    let k = lb_quantize(c, obs(&er, "K"), &pair.e_k);
    let comm = commutator_is_zero(&h, &k, c.zero_test()).unwrap();
    t.check(3, "[H_E, K_{E_K}] = 0, every coefficient Zero", comm.holds());
    t.budget(3, start, Duration::from_secs(30));
}

fn criterion4(t: &mut Tally) {
    let start = Instant::now();
    let r = load("rad1");
    let c = &r.chart;
    let k = obs(&r, "K");
    t.check(4, "E = 0 passes carter_condition", carter_condition(c, k).unwrap().holds());
    let v = compatibility_check(c, k, c.scalar_curvature()).unwrap();
    let l = ex(&r, "ln(u(q2) + v(q3))").diff("q2").diff("q3");
    let lap = (l.diff("q2").diff("q2") + l.diff("q3").diff("q3")).normal();
    let proportional = match &v {
        Verdict::Fails(f) => {
            let ratio = (&f.residual / &lap).normal();
            !c.zero_test().is_zero(&ratio) && c.coords().iter().all(|x| c.zero_test().is_zero(&ratio.diff(x)))
        }
        _ => false,
    };
    t.check(4, "E = Sc fails compatibility_check", v.fails());
    t.check(4, "witness proportional to (d_q2^2 + d_q3^2) d_q2 d_q3 ln(u+v)", proportional);
    t.budget(4, start, Duration::from_secs(10));
}

fn criterion5(t: &mut Tally) {
    let start = Instant::now();
    let ek3 = "-1/2*cos(q2)*(5/tan(q3)^2 + 2)";
    let h3 = load("h3");
    let e3 = (h3.chart.scalar_curvature() * Expr::rational(-1, 8)).normal();
    t.known(
        5,
        "E3 = -Sc3/8 = -3/4(1+1/sin^2 q3) as expanded",
        same(&h3.chart, &e3, &ex(&h3, "-3/4*(1+1/sin(q3)^2)")),
        "-Sc3/8 is +3/4(1+1/sin^2 q3)",
    );
    let got = solved_ek(&h3, "K3", "-Sc/8");
    t.check(5, "E3 = -Sc3/8 -> E_K3 = -1/2 cos q2 (5 cot^2 q3 + 2)", got.is_some_and(|g| same(&h3.chart, &g, &ex(&h3, ek3))));

    let h4 = load("h4");
    let got = solved_ek(&h4, "K4", "-Sc/6");
    let ek4 = ex(&h4, "-2*cos(q3)*(4+3*sin(q3)^2)/(q4^2*sin(q3)^2)");
    t.check(5, "E4 = -Sc4/6 -> E_K4", got.is_some_and(|g| same(&h4.chart, &g, &ek4)));
    let got = solved_ek(&h4, "K3", "3/q4^2*(1+1/sin(q3)^2)");
    t.check(5, "bar E4 -> bar E_K3", got.is_some_and(|g| same(&h4.chart, &g, &ex(&h4, ek3))));

    let hp = load("h4prime");
    let got = solved_ek(&hp, "K4", "-Sc/6");
    let want = ex(&hp, "-2*cos(q3)*((4+3*sin(q3)^2)/(tan(q4)^2*sin(q3)^2) + 1)");
    t.check(5, "primed 4D pair E'4 -> E'_K4", got.is_some_and(|g| same(&hp.chart, &g, &want)));
    let got = solved_ek(&hp, "K3", "3/sin(q4)^2*(1+1/sin(q3)^2)");
    t.check(5, "primed 4D pair bar E'4 -> bar E'_K3", got.is_some_and(|g| same(&hp.chart, &g, &ex(&hp, ek3))));

    let items: Vec<Corrected> = h4
        .simultaneous
        .iter()
        .map(|n| {
            let nc = h4.correction(n).unwrap();
            let o = obs(&h4, nc.observable.as_deref().unwrap()).clone();
            Corrected { observable: o, e: nc.pair.e.clone(), f: nc.pair.e_k.clone() }
        })
        .collect();
    let fam = h4.correction("family4").unwrap().family();
    match simultaneous_correction(&h4.chart, &items, &fam) {
        Ok(Simultaneous::Compatible { constraints, fixed, free, e, potentials }) => {
            let printed = ex(&h4, "(cos(q2)^4 - 6*cos(q2)^2 - 3)*C2 - 8*C1*cos(q2)");
            let one = constraints.len() == 1
                && constraints.iter().all(|k| {
                    let ratio = (k.equation() / &printed).normal();
                    ["C1", "C2"].iter().all(|x| h4.chart.zero_test().is_zero(&ratio.diff(x)))
                });
            t.check(5, "one constraint, proportional to (cos^4q2 - 6cos^2q2 - 3)C2 - 8C1 cos q2", one);
            let fixed: Vec<String> = fixed.iter().map(|(n, v)| format!("{n}={v}")).collect();
            t.check(5, "constraint forces C1 = C2 = 0", fixed == ["C1=0", "C2=0"]);
            let free: Vec<String> = free.iter().map(|n| n.to_string()).collect();
            t.check(5, "C3, C4 stay free", free == ["C3", "C4"]);
            t.check(
                5,
                "surviving family 3/q4^2 + 3/(q4^2 sin^2q3) + C3 q4^2 + C4",
                same(&h4.chart, &e, &ex(&h4, "3/q4^2 + 3/(q4^2*sin(q3)^2) + C3*q4^2 + C4")),
            );
            // operator list: the q4^2 coefficient is called C4 and the constant dropped
            let list = ["list_K4", "list_K3", "list_K2", "list_H3", "list_H2", "list_H1"];
            let order = ["E4", "E4_K3", "zero_K2", "zero_H3", "zero_H2", "zero_H1"];
            let renamed: Vec<Expr> = potentials.iter().map(|p| p.subst("C3", &ex(&h4, "C4"))).collect();
            let agree = list.iter().all(|l| {
                let nc = h4.correction(l).unwrap();
                let i = order.iter().position(|o| h4.correction(o).unwrap().observable == nc.observable).unwrap();
                same_mod_const(&h4.chart, &renamed[i], &nc.pair.e_k)
            });
            t.check(5, "family potentials match the six-operator list", agree);
        }
        other => t.check(5, &format!("simultaneous_correction on the 4D family: {other:?}"), false),
    }
    let mut tensorial = true;
    let mut operator = true;
    for l in ["list_K4", "list_K3", "list_H3", "list_K2", "list_H2", "list_H1"] {
        let nc = h4.correction(l).unwrap();
        let k = obs(&h4, nc.observable.as_deref().unwrap());
        let x = theorem1_cross_check(&h4.chart, &ham(&h4), k, &nc.pair).unwrap();
        tensorial &= x.tensorial.holds();
        operator &= x.operator.holds();
    }
    t.check(5, "six-operator list commutes with H (tensorial pipeline)", tensorial);
    t.check(5, "six-operator list commutes with H (direct commutator)", operator);
    let low = operators_commute(&h3, "K3", &h3.correction("E3").unwrap().pair)
        && operators_commute(&h3, "K2", &CorrectionPair::new(e3.clone(), Expr::zero()))
        && operators_commute(&h3, "H2", &CorrectionPair::new(e3.clone(), Expr::zero()))
        && operators_commute(&hp, "K4", &hp.correction("E4").unwrap().pair);
    t.check(5, "direct commutator on the 3D pairs and the primed 4D pair", low);
    t.budget(5, start, Duration::from_secs(300));
}

fn criterion6(t: &mut Tally) {
    let start = Instant::now();
    let h5 = load("h5");
    let c = &h5.chart;
    let mut tensorial = true;
    let mut operator = true;
    for n in ["K5", "H4", "K3", "K2", "H3", "H2", "H1"] {
        let nc = h5.correction(&format!("e5_{n}")).unwrap();
        let r = commutation_residual(c, &ham(&h5), obs(&h5, n), &nc.pair).unwrap();
        let ok = r.check_zero(c.zero_test()).holds();
        t.check(6, &format!("e5 with the printed potential of {n}: tensorial residual Zero"), ok);
        tensorial &= ok;
        operator &= operators_commute(&h5, n, &nc.pair);
    }
    let e5 = "27/(4*q5^2) + 12/(q5^2*sin(q4)^2)*(1+1/sin(q3)^2)";
    let got = solved_ek(&h5, "K4", e5);
    let printed = ex(&h5, "2*cos(q3)*(-tan(q4)^2 - 3 - 3/sin(q3)^2)");
    let corrected = ex(&h5, "2*cos(q3)*(-1 - 3/tan(q4)^2*(1+1/sin(q3)^2))");
    t.known(
        6,
        "K'4 at C4 = 0 against e5: printed E_K",
        got.as_ref().is_some_and(|g| same_mod_const(c, g, &printed)),
        "tan^2 q4 and cot^2 q4 terms exchanged",
    );
    t.check(6, "K'4 at C4 = 0 against e5: corrected E_K", got.is_some_and(|g| same_mod_const(c, &g, &corrected)));
    let items: Vec<Corrected> = h5
        .simultaneous
        .iter()
        .map(|n| {
            let nc = h5.correction(n).unwrap();
            Corrected { observable: obs(&h5, nc.observable.as_deref().unwrap()).clone(), e: nc.pair.e.clone(), f: nc.pair.e_k.clone() }
        })
        .collect();
    let sim = simultaneous_correction(c, &items, &h5.correction("family5").unwrap().family());
    t.check(
        6,
        "e5 family with free C5 validates against all seven integrals",
        matches!(sim, Ok(Simultaneous::Compatible { ref fixed, .. }) if fixed.is_empty()),
    );
    t.check(6, "direct 5D commutator for all seven pairs", operator && tensorial);
    t.budget(6, start, Duration::from_secs(600));
}

fn einstein(c: &Chart) -> bool {
    let n = Expr::int(c.dim() as i64);
    let s = (c.scalar_curvature() / &n).normal();
    c.ricci().zip_with(c.metric(), |r, g| (r - &s * g).normal()).unwrap().check_zero(c.zero_test()).holds()
}

fn diagonal(t: &SymTensor) -> bool {
    t.indices().all(|ix| ix[0] == ix[1] || t.get(&ix).is_zero_const())
}

fn criterion7(t: &mut Tally) {
    let start = Instant::now();
    let specs: Vec<Spec> = CORPUS.iter().map(|n| load(n)).collect();
    let (mut first, mut contracted, mut trace_free) = (true, true, true);
    let (mut antisym, mut einstein_ok, mut diag_ok) = (true, true, true);
    let (mut n_einstein, mut n_diag) = (0, 0);
    for s in &specs {
        let c = &s.chart;
        let r = c.riemann();
        let n = c.dim();
        let cyc = SymTensor::from_fn(n, &[Variance::Up, Variance::Down, Variance::Down, Variance::Down], &[], |i| {
            let (a, b, cc, d) = (i[0], i[1], i[2], i[3]);
            (r.get(&[a, b, cc, d]) + r.get(&[a, cc, d, b]) + r.get(&[a, d, b, cc])).normal()
        });
        first &= cyc.check_zero(c.zero_test()).holds();
        let half = c.scalar_curvature() * Expr::rational(1, 2);
        let g = c.ricci().zip_with(c.metric(), |r, g| (r - &half * g).normal()).unwrap();
        let div = divergence(c, &raise_index(c, &g, 0).unwrap()).unwrap();
        contracted &= div.check_zero(c.zero_test()).holds();
        if n >= 3 {
            let w = raise_index(c, c.weyl().unwrap(), 0).unwrap();
            trace_free &= [(0, 1), (0, 2), (0, 3)].iter().all(|&(i, j)| w.contract(i, j).unwrap().check_zero(c.zero_test()).holds());
        }
        let is_einstein = einstein(c);
        let diag_ricci = diagonal(c.ricci());
        for o in &s.observables {
            let ck = ck_tensor(c, o).unwrap();
            let sum = ck.zip_with(&ck.transpose(0, 1), |x, y| (x + y).normal()).unwrap();
            antisym &= sum.check_zero(c.zero_test()).holds();
            if is_einstein {
                n_einstein += 1;
                einstein_ok &= ck.check_zero(c.zero_test()).holds();
            }
            if diag_ricci && diagonal(o.tensor()) {
                n_diag += 1;
                diag_ok &= ck.check_zero(c.zero_test()).holds();
            }
        }
    }
    t.check(7, "first Bianchi identity Zero on all nine corpus charts", first);
    t.check(7, "contracted Bianchi identity Zero on all nine corpus charts", contracted);
    t.check(7, "Weyl tensor trace-free (corpus charts with N >= 3)", trace_free);
    t.check(7, "C_K antisymmetric for every corpus observable", antisym);
    t.check(7, &format!("Einstein chart => C_K = 0 ({n_einstein} observables)"), einstein_ok && n_einstein > 0);
    t.check(7, &format!("diagonal Ricci and diagonal K => C_K = 0 ({n_diag} observables)"), diag_ok && n_diag > 0);

    // homogeneous solutions of H2 in the 3D chart: Stäckel multipliers
    let h3 = &specs[3];
    let c = &h3.chart;
    let k = obs(h3, "H2");
    let base = CorrectionPair::new(ex(h3, "3/4*(1+1/sin(q3)^2)"), Expr::zero());
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a0e);
    let mut gauge = true;
    for _ in 0..24 {
        let mut r = || rng.gen_range(-3i64..=3);
        let f = ex(h3, &format!("{}*q3 + {}*q3^2 + {}*cos(q3)", r(), r(), r()));
        let g = ex(h3, &format!("{}*cos(q2) + {}*q2 + {}*sin(q2)^2", r(), r(), r()));
        let eo = (&f + ex(h3, "4/sin(q3)^2") * &g).normal();
        let shifted = CorrectionPair::new(&base.e + &eo, &base.e_k + &g);
        gauge &= gauge_space_check(c, k, &base, &shifted).unwrap().holds();
        gauge &= commutation_residual(c, &ham(h3), k, &shifted).unwrap().check_zero(c.zero_test()).holds();
    }
    t.check(7, "gauge invariance under 24 random homogeneous solutions", gauge);

    // tensorial verdict and commutator verdict agree
    let mut agree = 0;
    let mut total = 0;
    for s in &specs {
        let h = ham(s);
        for o in s.observables.iter().filter(|o| o.name() != h.name()) {
            let pairs: Vec<CorrectionPair> = std::iter::once(CorrectionPair::zero())
                .chain(s.corrections.iter().filter(|nc| nc.observable.as_deref() == Some(o.name())).map(|nc| nc.pair.clone()))
                .collect();
            for p in pairs {
                let x = theorem1_cross_check(&s.chart, &h, o, &p).unwrap();
                total += 1;
                agree += usize::from(x.agree());
            }
        }
    }
    t.check(7, &format!("tensorial and operator verdicts agree on the corpus ({agree}/{total})"), agree == total);
    let bases: [(&Spec, &str, &str, &str); 4] = [
        (&specs[3], "K3", "3/4*(1+1/sin(q3)^2)", "-1/2*cos(q2)*(5/tan(q3)^2 + 2)"),
        (&specs[3], "K2", "3/4*(1+1/sin(q3)^2)", "0"),
        (&specs[2], "K2", "0", "0"),
        (&specs[7], "L", "0", "0"),
    ];
    let shapes = ["q", "q^2", "sin(q)", "cos(q)^2", "1/(1+q^2)", "exp(q)"];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let (mut runs, mut ok, mut failing) = (0, 0, 0);
    for round in 0..15 {
        for (s, k, e0, ek0) in &bases {
            let c = &s.chart;
            let x = c.coord(rng.gen_range(0..c.dim())).to_string();
            let bump = format!("{}*({})", rng.gen_range(1..=5), shapes[rng.gen_range(0..shapes.len())].replace('q', &x));
            let (e, ek) = if round % 3 == 2 {
                // non-Killing perturbation of the tensor itself
                (e0.to_string(), ek0.to_string())
            } else if round % 3 == 0 {
                (format!("{e0} + {bump}"), ek0.to_string())
            } else {
                (e0.to_string(), format!("{ek0} + {bump}"))
            };
            let mut kk = obs(s, k).clone();
            if round % 3 == 2 {
                let n = c.dim();
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let mut rows: Vec<Vec<Expr>> = (0..n).map(|a| (0..n).map(|b| kk.tensor().get(&[a, b]).clone()).collect()).collect();
                let add = ex(s, &bump);
                rows[i][j] = (&rows[i][j] + &add).normal();
                if i != j {
                    rows[j][i] = (&rows[j][i] + &add).normal();
                }
                kk = QuadraticObservable::new("Kp", &rows, Expr::zero()).unwrap();
            }
            let pair = CorrectionPair::new(ex(s, &e), ex(s, &ek));
            let x = theorem1_cross_check(&s.chart, &ham(s), &kk, &pair).unwrap();
            runs += 1;
            ok += usize::from(x.agree());
            failing += usize::from(!x.operator.holds());
        }
    }
    t.check(
        7,
        &format!("tensorial and operator verdicts agree on {runs} random perturbations ({ok} agree, {failing} non-commuting)"),
        ok == runs && runs >= 50,
    );
    t.budget(7, start, Duration::from_secs(300));
}

fn criterion8(t: &mut Tally) {
    let start = Instant::now();
    let h2 = load("h2");
    let c = &h2.chart;
    let h = ham(&h2);
    let cot = c.zero_test().is_zero(&poisson_bracket(c, &h, obs(&h2, "K2")));
    let atan = c.zero_test().is_zero(&poisson_bracket(c, &h, obs(&h2, "K2atan")));
    t.check(8, "{H2, K2} = 0 with tan^-1 q read as cot q", cot);
    t.check(8, "{H2, K2} != 0 with tan^-1 q read as arctan q", !atan);
    t.check(8, "exactly one reading makes {H2, K2} vanish", cot != atan);
    t.check(
        8,
        "adopted reading recorded in every report",
        conventions().get("inverse_tangent").is_some_and(|v| v.contains("cot")),
    );
    let zero = CorrectionPair::zero();
    t.check(
        8,
        "H1 and K2 each commute with H under plain quantization on the 2D Einstein chart",
        operators_commute(&h2, "H1", &zero) && operators_commute(&h2, "K2", &zero),
    );
    t.budget(8, start, Duration::from_secs(10));
}

fn main() {
    let start = Instant::now();
    let mut t = Tally::default();
    criterion1(&mut t);
    criterion2(&mut t);
    criterion3(&mut t);
    criterion4(&mut t);
    criterion5(&mut t);
    criterion6(&mut t);
    criterion7(&mut t);
    criterion8(&mut t);
    println!(
        "acceptance: {} passed, {} failed ({} known conflicts, {} unexpected) in {:.1} s",
        t.pass,
        t.fail,
        t.known,
        t.unexpected.len(),
        start.elapsed().as_secs_f64()
    );
    if !t.unexpected.is_empty() {
        for u in &t.unexpected {
            println!("unexpected: {u}");
        }
        std::process::exit(1);
    }
}
