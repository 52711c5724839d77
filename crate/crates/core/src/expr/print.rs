use std::fmt::{self, Write};

use num_traits::{One, Signed, Zero};

use super::{Expr, Kind, Q};

const P_ADD: u8 = 1;
const P_MUL: u8 = 2;
const P_POW: u8 = 4;
const P_ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e.kind() {
        Kind::Num(q) => {
            if q.is_integer() && !q.is_negative() {
                P_ATOM
            } else {
                P_MUL
            }
        }
        Kind::Sym(_) | Kind::Fun { .. } | Kind::Call(..) => P_ATOM,
        Kind::Add(_) => P_ADD,
        Kind::Mul(_) => P_MUL,
        Kind::Pow(_, e) => {
            if e.is_negative() {
                P_MUL
            } else {
                P_POW
            }
        }
    }
}

fn write_q(out: &mut String, q: &Q) {
    if q.is_integer() {
        write!(out, "{}", q.numer()).unwrap();
    } else {
        write!(out, "{}/{}", q.numer(), q.denom()).unwrap();
    }
}

fn wrap(out: &mut String, e: &Expr, min: u8) {
    if prec(e) < min {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_pos_pow(out: &mut String, base: &Expr, e: &Q) {
    if e.is_one() {
        wrap(out, base, P_MUL + 1);
        return;
    }
    wrap(out, base, P_ATOM);
    out.push('^');
    if e.is_integer() {
        write_q(out, e);
    } else {
        out.push('(');
        write_q(out, e);
        out.push(')');
    }
}

/// Factor split into numerator and denominator powers (all exponents positive).
fn write_product(out: &mut String, coeff: &Q, factors: &[Expr]) {
    let mut num: Vec<(Expr, Q)> = Vec::new();
    let mut den: Vec<(Expr, Q)> = Vec::new();
    for f in factors {
        match f.kind() {
            Kind::Pow(b, e) if e.is_negative() => den.push((b.clone(), -e)),
            Kind::Pow(b, e) => num.push((b.clone(), e.clone())),
            _ => num.push((f.clone(), Q::one())),
        }
    }
    if coeff.is_negative() {
        out.push('-');
    }
    let c = coeff.abs();
    let mut pieces = 0;
    if !c.numer().is_one() || num.is_empty() {
        write!(out, "{}", c.numer()).unwrap();
        pieces += 1;
    }
    for (b, e) in &num {
        if pieces > 0 {
            out.push('*');
        }
        write_pos_pow(out, b, e);
        pieces += 1;
    }
    let den_count = den.len() + usize::from(!c.denom().is_one());
    if den_count == 0 {
        return;
    }
    out.push('/');
    if den_count > 1 {
        out.push('(');
    }
    let mut first = true;
    if !c.denom().is_one() {
        write!(out, "{}", c.denom()).unwrap();
        first = false;
    }
    for (b, e) in &den {
        if !first {
            out.push('*');
        }
        write_pos_pow(out, b, e);
        first = false;
    }
    if den_count > 1 {
        out.push(')');
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e.kind() {
        Kind::Num(q) => write_q(out, q),
        Kind::Sym(s) => out.push_str(s),
        Kind::Fun { name, arg, order } => {
            if *order == 0 {
                write!(out, "{name}({arg})").unwrap();
            } else {
                write!(out, "diff({name},{arg},{order})").unwrap();
            }
        }
        Kind::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a);
            out.push(')');
        }
        Kind::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (c, _) = t.split_coeff();
                if i == 0 {
                    write_expr(out, t);
                } else if c.is_negative() {
                    out.push_str(" - ");
                    let neg = -t;
                    if neg.is_one() {
                        out.push('1');
                    } else {
                        wrap(out, &neg, P_MUL);
                    }
                } else {
                    out.push_str(" + ");
                    wrap(out, t, P_MUL);
                }
            }
        }
        Kind::Mul(fs) => {
            let (c, rest) = match fs[0].kind() {
                Kind::Num(q) => (q.clone(), &fs[1..]),
                _ => (Q::one(), &fs[..]),
            };
            write_product(out, &c, rest);
        }
        Kind::Pow(b, x) => {
            if x.is_negative() {
                write_product(out, &Q::one(), std::slice::from_ref(e));
            } else if x.is_zero() {
                out.push('1');
            } else {
                write_pos_pow(out, b, x);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}
