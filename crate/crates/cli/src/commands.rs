use lbq::corrections::{
    rad_obstruction, simultaneous_correction, solve_correction_pair, stackel_correction, Corrected, CorrectionError,
    CorrectionPair, Simultaneous, StackelOutcome,
};
use lbq::geometry::{indices, Chart, Symmetry};
use lbq::integrability::{
    carter_condition, is_killing, poisson_commutes, pre_robertson_condition, robertson_condition, QuadraticObservable,
};
use lbq::operators::{commutator_is_zero, lb_quantize, theorem1_cross_check};
use lbq::{Expr, Verdict};
use serde_json::json;

use crate::report::{Status, TaskReport};
use crate::spec::{Spec, SpecError};

/// Identity check of a computed expression against an expected one.
fn expect_equal(chart: &Chart, got: &Expr, want: &Expr) -> Verdict {
    let d = (got - want).normal();
    let v = chart.zero_test().check(&d);
    Verdict::scalar(d, v)
}

/// Nonzero components, one per symmetry orbit.
fn comps(t: &lbq::SymTensor, label: impl Fn(&[usize]) -> String) -> serde_json::Value {
    let canonical = |ix: &[usize]| {
        t.symmetries().iter().all(|s| match *s {
            Symmetry::Symmetric(i, j) | Symmetry::Antisymmetric(i, j) => ix[i.min(j)] <= ix[i.max(j)],
        })
    };
    let map = indices(t.dim(), t.rank())
        .filter(|ix| canonical(ix) && !t.get(ix).is_zero_const())
        .map(|ix| (label(&ix), json!(t.get(&ix).to_string())))
        .collect();
    serde_json::Value::Object(map)
}

pub fn curvature(spec: &Spec, expect: &[(String, String)]) -> Result<Vec<TaskReport>, SpecError> {
    let c = &spec.chart;
    let name = |i: usize| c.coord(i).to_string();
    let mut r = TaskReport::new("curvature", None)
        .value("christoffel", comps(c.christoffel(), |ix| format!("G^{}_{},{}", name(ix[0]), name(ix[1]), name(ix[2]))))
        .value("ricci", comps(c.ricci(), |ix| format!("Ric_{},{}", name(ix[0]), name(ix[1]))))
        .value("scalar_curvature", c.scalar_curvature().to_string())
        .value("conformal_term", c.conformal_laplacian_term().to_string());
    if c.dim() >= 3 {
        let w = c.weyl().map_err(|e| SpecError::Invalid(e.to_string()))?;
        r = r.value("weyl_vanishes", w.check_zero(c.zero_test()).holds());
        let a = c.cotton_york().map_err(|e| SpecError::Invalid(e.to_string()))?;
        r = r.value("cotton_york_vanishes", a.check_zero(c.zero_test()).holds());
        let ws = c.weyl_scalar().map_err(|e| SpecError::Invalid(e.to_string()))?;
        r = r.value("weyl_scalar", ws.to_string());
    }
    let mut out = vec![r];
    for (key, text) in expect {
        let want = spec.expr("--expect", text)?;
        let got = match key.as_str() {
            "sc" => c.scalar_curvature().clone(),
            "weyl" => c.weyl_scalar().map_err(|e| SpecError::Invalid(e.to_string()))?.clone(),
            other => return Err(SpecError::Invalid(format!("unknown curvature quantity `{other}` (use sc or weyl)"))),
        };
        out.push(
            TaskReport::new("curvature-golden", Some(key))
                .with_verdict(&expect_equal(c, &got, &want))
                .value("expected", want.to_string())
                .value("computed", got.to_string()),
        );
    }
    Ok(out)
}

fn selected<'a>(spec: &'a Spec, name: Option<&str>, skip_h: bool) -> Result<Vec<&'a QuadraticObservable>, SpecError> {
    match name {
        Some(n) => Ok(vec![spec.observable(n)?]),
        None => {
            let h = spec.hamiltonian();
            Ok(spec.observables.iter().filter(|o| !skip_h || o.name() != h.name()).collect())
        }
    }
}

fn integrability_error(task: &str, subject: Option<&str>, e: impl ToString) -> TaskReport {
    TaskReport::error(task, subject, e)
}

pub fn check(spec: &Spec, what: &str, observable: Option<&str>) -> Result<Vec<TaskReport>, SpecError> {
    let c = &spec.chart;
    let h = spec.hamiltonian();
    let per_observable = |skip_h: bool, f: &dyn Fn(&QuadraticObservable) -> Result<Verdict, String>| {
        Ok(selected(spec, observable, skip_h)?
            .into_iter()
            .map(|o| match f(o) {
                Ok(v) => TaskReport::new(what, Some(o.name())).with_verdict(&v),
                Err(e) => integrability_error(what, Some(o.name()), e),
            })
            .collect())
    };
    match what {
        "killing" => per_observable(false, &|o| is_killing(c, o).map_err(|e| e.to_string())),
        "poisson" => per_observable(true, &|o| poisson_commutes(c, &h, o).map_err(|e| e.to_string())),
        "carter" => per_observable(true, &|o| carter_condition(c, o).map_err(|e| e.to_string())),
        "robertson" | "pre-robertson" => {
            let sys = spec.stackel_system()?;
            let v = if what == "robertson" { robertson_condition(&sys) } else { pre_robertson_condition(&sys) };
            let names: Vec<&str> = sys.observables().iter().map(|o| o.name()).collect();
            Ok(vec![match v {
                Ok(v) => TaskReport::new(what, Some(&names.join(","))).with_verdict(&v),
                Err(e) => integrability_error(what, None, e),
            }])
        }
        other => Err(SpecError::Invalid(format!(
            "unknown check `{other}` (killing, poisson, carter, robertson, pre-robertson)"
        ))),
    }
}

fn correction_error(task: &str, subject: Option<&str>, e: CorrectionError) -> TaskReport {
    match e {
        CorrectionError::NotClosed(v) | CorrectionError::Residual(v) | CorrectionError::PreRobertson(v) => {
            TaskReport::new(task, subject).with_verdict(&v).value("error", e_kind(&v))
        }
        CorrectionError::Undecided(v) => TaskReport::new(task, subject).with_verdict(&v),
        other => TaskReport::error(task, subject, other),
    }
}

fn e_kind(v: &Verdict) -> &'static str {
    if v.fails() {
        "not closed or residual nonzero"
    } else {
        "undecided"
    }
}

pub fn solve(spec: &Spec, observable: &str, e: &str, expect_ek: Option<&str>) -> Result<Vec<TaskReport>, SpecError> {
    let c = &spec.chart;
    let k = spec.observable(observable)?;
    let cand = spec.candidate(e, &[])?;
    let task = "solve-correction";
    let mut r = match solve_correction_pair(c, &spec.hamiltonian(), k, &cand.pair.e) {
        Ok(pair) => {
            let mut r = TaskReport::new(task, Some(observable)).with_verdict(&Verdict::Holds);
            if let Some(w) = expect_ek {
                let want = spec.expr("--expect-ek", w)?;
                r = r.with_verdict(&expect_equal(c, &pair.e_k, &want)).value("expected_E_K", want.to_string());
            }
            r.value("E_K", pair.e_k.to_string())
        }
        Err(err) => correction_error(task, Some(observable), err),
    };
    r = r.value("E", cand.pair.e.to_string());
    Ok(vec![r])
}

pub fn simultaneous(spec: &Spec, e: &str, constants: &[String]) -> Result<Vec<TaskReport>, SpecError> {
    let c = &spec.chart;
    let items = spec
        .simultaneous
        .iter()
        .map(|n| {
            let nc = spec.correction(n)?;
            let o = spec.observable(nc.observable.as_deref().unwrap_or_default())?;
            Ok(Corrected { observable: o.clone(), e: nc.pair.e.clone(), f: nc.pair.e_k.clone() })
        })
        .collect::<Result<Vec<_>, SpecError>>()?;
    if items.is_empty() {
        return Err(SpecError::Invalid("spec lists no [simultaneous] items".into()));
    }
    let cand = spec.candidate(e, constants)?;
    let task = "simultaneous";
    let out = match simultaneous_correction(c, &items, &cand.family()) {
        Err(err) => correction_error(task, Some(&cand.name), err),
        Ok(s) => {
            let item_names = |i: usize| spec.simultaneous[i].clone();
            match s {
                Simultaneous::Compatible { constraints, fixed, free, e, potentials } => {
                    TaskReport::new(task, Some(&cand.name))
                        .with_verdict(&Verdict::Holds)
                        .value(
                            "constraints",
                            constraints.iter().map(|k| json!({"item": item_names(k.item), "equation": format!("{} = 0", k.equation())})).collect::<Vec<_>>(),
                        )
                        .value("fixed", fixed.iter().map(|(n, v)| format!("{n} = {v}")).collect::<Vec<_>>())
                        .value("free", free.iter().map(|n| n.to_string()).collect::<Vec<_>>())
                        .value("E", e.to_string())
                        .value(
                            "potentials",
                            serde_json::Value::Object(
                                potentials.iter().enumerate().map(|(i, w)| (item_names(i), json!(w.to_string()))).collect(),
                            ),
                        )
                }
                Simultaneous::Incompatible { item, constraints, verdict } => TaskReport::new(task, Some(&cand.name))
                    .with_verdict(&verdict)
                    .value("item", item_names(item))
                    .value(
                        "constraints",
                        constraints.iter().map(|k| format!("{} = 0", k.equation())).collect::<Vec<_>>(),
                    ),
            }
        }
    };
    Ok(vec![out])
}

pub fn stackel(spec: &Spec, e: &str) -> Result<Vec<TaskReport>, SpecError> {
    let sys = spec.stackel_system()?;
    let cand = spec.candidate(e, &[])?;
    let task = "stackel";
    let names: Vec<String> = sys.observables().iter().map(|o| o.name().to_string()).collect();
    Ok(vec![match stackel_correction(&sys, &cand.pair.e) {
        Err(err) => correction_error(task, Some(&names.join(",")), err),
        Ok(StackelOutcome::Invalid { item, verdict }) => {
            TaskReport::new(task, Some(&names.join(","))).with_verdict(&verdict).value("item", names[item].clone())
        }
        Ok(StackelOutcome::Valid { corrections, multiplier, robertson, pre_robertson, system }) => {
            let status = multiplier.clone().and(pre_robertson.clone());
            let corrected: serde_json::Map<String, serde_json::Value> = system
                .observables()
                .iter()
                .map(|o| (o.name().to_string(), json!(o.potential().to_string())))
                .collect();
            TaskReport::new(task, Some(&names.join(",")))
                .with_verdict(&status)
                .value(
                    "corrections",
                    serde_json::Value::Object(
                        names.iter().zip(&corrections).map(|(n, e)| (n.clone(), json!(e.to_string()))).collect(),
                    ),
                )
                .value("corrected_potentials", serde_json::Value::Object(corrected))
                .value("multiplier_form", multiplier.holds())
                .value("robertson", robertson.holds())
                .value("pre_robertson_after", pre_robertson.holds())
        }
    }])
}

pub fn rad(spec: &Spec, observable: &str) -> Result<Vec<TaskReport>, SpecError> {
    let k = spec.observable(observable)?;
    Ok(vec![match rad_obstruction(&spec.chart, k) {
        Ok(v) => TaskReport::new("rad-obstruction", Some(observable)).with_verdict(&v),
        Err(e) => TaskReport::error("rad-obstruction", Some(observable), e),
    }])
}

pub fn verify_commute(spec: &Spec, h: &str, k: &str, e: Option<&str>, ek: Option<&str>) -> Result<Vec<TaskReport>, SpecError> {
    let c = &spec.chart;
    let (hh, kk) = (spec.observable(h)?, spec.observable(k)?);
    let mut pair = match e {
        Some(t) => spec.candidate(t, &[])?.pair,
        None => CorrectionPair::zero(),
    };
    if let Some(t) = ek {
        pair.e_k = spec.expr("--EK", t)?;
    }
    let subject = format!("{h},{k}");
    let task = "verify-commute";
    let base = |v: &Verdict, order: Option<usize>| {
        TaskReport::new(task, Some(&subject))
            .with_verdict(v)
            .value("E", pair.e.to_string())
            .value("E_K", pair.e_k.to_string())
            .value("operator_failing_order", order.map_or(serde_json::Value::Null, |o| json!(o)))
    };
    // the tensorial test needs a natural first operator; otherwise only the commutator is run
    if !hh.is_natural(c) {
        let a = lb_quantize(c, hh, &pair.e);
        let b = lb_quantize(c, kk, &pair.e_k);
        return Ok(vec![match commutator_is_zero(&a, &b, c.zero_test()) {
            Ok(x) => base(&x.verdict, x.order).value("tensorial", "not applicable"),
            Err(err) => TaskReport::error(task, Some(&subject), err),
        }]);
    }
    Ok(vec![match theorem1_cross_check(c, hh, kk, &pair) {
        Err(err) => TaskReport::error(task, Some(&subject), err),
        Ok(x) => {
            let mut r = base(&x.operator.verdict, x.operator.order)
                .value("tensorial", x.tensorial.to_string())
                .value("agree", x.agree());
            if !x.agree() {
                r.status = Status::Error;
            }
            r
        }
    }])
}
