use std::collections::HashMap;

use num_traits::One;

use super::{Builtin, Expr, Kind, Q};

/// Exact partial derivative in canonical form.
pub fn differentiate(e: &Expr, x: &str) -> Expr {
    let mut memo = HashMap::new();
    go(e, x, &mut memo)
}

fn go(e: &Expr, x: &str, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(d) = memo.get(&e.ptr_id()) {
        return d.clone();
    }
    let d = match e.kind() {
        Kind::Num(_) => Expr::zero(),
        Kind::Sym(s) => {
            if &**s == x {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Kind::Fun { name, arg, order } => {
            if &**arg == x {
                Expr::fun(name, arg, order + 1)
            } else {
                Expr::zero()
            }
        }
        Kind::Add(ts) => Expr::add_all(ts.iter().map(|t| go(t, x, memo))),
        Kind::Mul(fs) => {
            let ds: Vec<Expr> = fs.iter().map(|f| go(f, x, memo)).collect();
            let mut terms = Vec::new();
            for (i, di) in ds.iter().enumerate() {
                if di.is_zero_const() {
                    continue;
                }
                let mut prod: Vec<Expr> = Vec::with_capacity(fs.len());
                prod.push(di.clone());
                prod.extend(fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()));
                terms.push(Expr::mul_all(prod));
            }
            Expr::add_all(terms)
        }
        Kind::Pow(b, p) => {
            let db = go(b, x, memo);
            if db.is_zero_const() {
                Expr::zero()
            } else {
                Expr::mul_all([Expr::num(p.clone()), b.pow(&(p - Q::one())), db])
            }
        }
        Kind::Call(f, a) => {
            let da = go(a, x, memo);
            if da.is_zero_const() {
                Expr::zero()
            } else {
                let outer = match f {
                    Builtin::Sin => a.cos(),
                    Builtin::Cos => -a.sin(),
                    Builtin::Tan => a.cos().powi(-2),
                    Builtin::Atan => (Expr::one() + a.powi(2)).recip(),
                    Builtin::Ln => a.recip(),
                    Builtin::Exp => e.clone(),
                    Builtin::Abs => a * e.recip(),
                };
                outer * da
            }
        }
    };
    memo.insert(e.ptr_id(), d.clone());
    d
}
