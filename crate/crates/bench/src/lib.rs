//! Fixtures shared by the benches.

use lbq::integrability::{momenta, QuadraticObservable};
use lbq::{parse, Chart, Expr};

pub fn e(s: &str) -> Expr {
    parse(s).expect("fixture expression")
}

/// Diagonal inverse metric of the sphere ladder in `n` dimensions; with
/// `flat_top` the last factor is `4/q_n^2` instead of `4/sin(q_n)^2`.
pub fn ladder(n: usize, flat_top: bool) -> Chart {
    let mut diag = vec![e("1")];
    for k in 2..=n {
        let f = if k == n && flat_top { e(&format!("4/q{k}^2")) } else { e(&format!("4/sin(q{k})^2")) };
        diag = diag.into_iter().map(|d| (d * &f).normal()).collect();
        diag.push(e("1"));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Chart::diagonal(&refs, diag).expect("ladder chart")
}

pub fn reduced_minkowski() -> Chart {
    Chart::diagonal(&["r", "phi", "z"], vec![e("1"), e("1/r^2 - a^2/z^2"), e("1")]).expect("chart")
}

/// Observable from a polynomial written in `p1..pN`.
pub fn observable(chart: &Chart, name: &str, poly: &str) -> QuadraticObservable {
    let ps = momenta(chart);
    let mut text = poly.to_string();
    for (i, p) in ps.iter().enumerate().rev() {
        text = text.replace(&format!("p{}", i + 1), p);
    }
    let refs: Vec<&str> = ps.iter().map(String::as_str).collect();
    QuadraticObservable::from_polynomial(name, &e(&text), &refs).expect("observable")
}

pub const K3: &str = "cos(q2)*p3^2 - 4*sin(q2)/tan(q3)*p2*p3 - 8*cos(q2)/tan(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2))";
pub const K4: &str =
    "cos(q3)*p4^2 - 4*sin(q3)/q4*p3*p4 - 8*cos(q3)/q4^2*(p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2)))";
