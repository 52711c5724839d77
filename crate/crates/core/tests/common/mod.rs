#![allow(dead_code)]

use lbq::{parse, Chart, Expr, Parser};

pub fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

pub fn opaque(s: &str) -> Expr {
    Parser::new().with_functions(["u", "v"]).parse(s).unwrap()
}

pub fn coords(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("q{i}")).collect()
}

/// Inverse metric diagonal of the extension ladder. `last` is the factor
/// multiplying the previous Hamiltonian at the top level.
pub fn ladder(n: usize, flat_top: bool) -> Vec<Expr> {
    let mut diag = vec![e("1")];
    for k in 2..=n {
        let f = if k == n && flat_top { format!("4/q{k}^2") } else { format!("4/sin(q{k})^2") };
        let f = e(&f);
        diag = diag.into_iter().map(|d| (d * &f).normal()).collect();
        diag.push(e("1"));
    }
    diag
}

fn chart(n: usize, diag: Vec<Expr>) -> Chart {
    let names = coords(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Chart::diagonal(&refs, diag).unwrap()
}

pub fn h2() -> Chart {
    chart(2, ladder(2, false))
}

pub fn h3() -> Chart {
    chart(3, ladder(3, false))
}

pub fn h4() -> Chart {
    chart(4, ladder(4, true))
}

pub fn h4prime() -> Chart {
    chart(4, ladder(4, false))
}

pub fn h5() -> Chart {
    let mut d: Vec<Expr> = ladder(4, false).into_iter().map(|x| (x * e("4/q5^2")).normal()).collect();
    d.push(e("1"));
    chart(5, d)
}

pub fn er2() -> Chart {
    Chart::diagonal(&["r", "phi", "z"], vec![e("1"), e("1/r^2 - a^2/z^2"), e("1")]).unwrap()
}

pub fn rad1() -> Chart {
    let w = opaque("1/(u(q2) + v(q3))");
    Chart::diagonal(&["q1", "q2", "q3"], vec![e("1"), w.clone(), w]).unwrap()
}

pub fn flat2() -> Chart {
    Chart::diagonal(&["x", "y"], vec![e("1"), e("1")]).unwrap()
}

use lbq::integrability::{momenta, QuadraticObservable};

/// Observable from a polynomial in `p1..pN`, renamed to the chart momenta.
pub fn obs(chart: &Chart, name: &str, poly: &str) -> QuadraticObservable {
    let mut text = poly.to_string();
    for (i, p) in momenta(chart).iter().enumerate().rev() {
        text = text.replace(&format!("p{}", i + 1), p);
    }
    let ps = momenta(chart);
    let refs: Vec<&str> = ps.iter().map(String::as_str).collect();
    QuadraticObservable::from_polynomial(name, &e(&text), &refs).unwrap()
}

pub const H1: &str = "p1^2/2";
pub const H2: &str = "p2^2/2 + 4/sin(q2)^2*(p1^2/2)";
pub const H3: &str = "p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2))";
pub const H4: &str = "p4^2/2 + 4/q4^2*(p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2)))";
pub const H4P: &str = "p4^2/2 + 4/sin(q4)^2*(p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2)))";
pub const K2: &str = "cos(q1)*p2^2 - 4*sin(q1)/tan(q2)*p1*p2 - 8*cos(q1)/tan(q2)^2*(p1^2/2)";
pub const K2_ATAN: &str = "cos(q1)*p2^2 - 4*sin(q1)*atan(q2)*p1*p2 - 8*cos(q1)*atan(q2)^2*(p1^2/2)";
pub const K3: &str = "cos(q2)*p3^2 - 4*sin(q2)/tan(q3)*p2*p3 - 8*cos(q2)/tan(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2))";
pub const K4: &str =
    "cos(q3)*p4^2 - 4*sin(q3)/q4*p3*p4 - 8*cos(q3)/q4^2*(p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2)))";
pub const K4P: &str = "cos(q3)*p4^2 - 4*sin(q3)/tan(q4)*p3*p4 - 8*cos(q3)/tan(q4)^2*(p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2)))";
pub const H5: &str =
    "p5^2/2 + 4/q5^2*(p4^2/2 + 4/sin(q4)^2*(p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2))))";
pub const K5: &str = "cos(q4)*p5^2 - 4*sin(q4)/q5*p4*p5 - 8*cos(q4)/q5^2*(p4^2/2 + 4/sin(q4)^2*(p3^2/2 + 4/sin(q3)^2*(p2^2/2 + 4/sin(q2)^2*(p1^2/2))))";

pub fn er2_k(chart: &Chart) -> QuadraticObservable {
    QuadraticObservable::new(
        "K",
        &[vec![e("1"), e("0"), e("0")], vec![e("0"), e("1/r^2"), e("0")], vec![e("0"), e("0"), e("0")]],
        e("0"),
    )
    .map(|k| {
        assert_eq!(k.dim(), chart.dim());
        k
    })
    .unwrap()
}

pub fn rad1_k() -> QuadraticObservable {
    let w = opaque("1/(u(q2) + v(q3))");
    let z = e("0");
    QuadraticObservable::new(
        "K",
        &[
            vec![z.clone(), z.clone(), z.clone()],
            vec![z.clone(), (e("2") * opaque("v(q3)") * &w).normal(), z.clone()],
            vec![z.clone(), z.clone(), (e("-2") * opaque("u(q2)") * &w).normal()],
        ],
        z,
    )
    .unwrap()
}
