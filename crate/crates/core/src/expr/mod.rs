//! Scalar expressions over coordinates, parameters and opaque functions.
//!
//! Every constructor returns a canonical tree: sums and products are
//! flattened and sorted, numeric constants folded and equal bases merged.
//! Quotients are stored as powers with exponent `-1`.

mod antideriv;
mod diff;
mod eval;
mod parse;
mod poly;
mod print;
mod ratfun;
mod zero;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use antideriv::{antiderivative, IntegrationError};
pub use diff::differentiate;
pub use eval::{evaluate, Binding, EvalError, Point, Value};
pub use parse::{parse, ParseError, Parser};
pub use ratfun::normalize;
pub use zero::{Witness, ZeroTest, ZeroVerdict};

/// Arbitrary precision rational.
pub type Q = BigRational;

/// Interned-by-value identifier.
pub type Name = Arc<str>;

/// Builtin elementary functions. `sqrt` is parsed to a power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Sin,
    Cos,
    Tan,
    Atan,
    Ln,
    Exp,
    Abs,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Tan => "tan",
            Builtin::Atan => "atan",
            Builtin::Ln => "ln",
            Builtin::Exp => "exp",
            Builtin::Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        Some(match s {
            "sin" => Builtin::Sin,
            "cos" => Builtin::Cos,
            "tan" => Builtin::Tan,
            "atan" => Builtin::Atan,
            "ln" => Builtin::Ln,
            "exp" => Builtin::Exp,
            "abs" => Builtin::Abs,
            _ => return None,
        })
    }
}

/// Node payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Num(Q),
    Sym(Name),
    /// Opaque function `name` of the single coordinate `arg`, differentiated `order` times.
    Fun { name: Name, arg: Name, order: u32 },
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Q),
    Call(Builtin, Expr),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    hash: u64,
}

/// Immutable, cheaply clonable canonical expression.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn mix(h: u64, x: u64) -> u64 {
    let mut h = h ^ x;
    h = h.wrapping_mul(FNV_PRIME);
    h ^ (h >> 29)
}

fn hash_bytes(h: u64, bytes: &[u8]) -> u64 {
    bytes.iter().fold(h, |h, &b| mix(h, b as u64))
}

fn hash_q(h: u64, q: &Q) -> u64 {
    let h = hash_bytes(h, &q.numer().to_signed_bytes_le());
    hash_bytes(mix(h, 0x2f), &q.denom().to_signed_bytes_le())
}

fn structural_hash(kind: &Kind) -> u64 {
    match kind {
        Kind::Num(q) => hash_q(mix(FNV_OFFSET, 1), q),
        Kind::Sym(s) => hash_bytes(mix(FNV_OFFSET, 2), s.as_bytes()),
        Kind::Fun { name, arg, order } => {
            let h = hash_bytes(mix(FNV_OFFSET, 3), name.as_bytes());
            mix(hash_bytes(mix(h, 0x3b), arg.as_bytes()), *order as u64)
        }
        Kind::Add(ts) => ts.iter().fold(mix(FNV_OFFSET, 4), |h, t| mix(h, t.0.hash)),
        Kind::Mul(fs) => fs.iter().fold(mix(FNV_OFFSET, 5), |h, f| mix(h, f.0.hash)),
        Kind::Pow(b, e) => hash_q(mix(mix(FNV_OFFSET, 6), b.0.hash), e),
        Kind::Call(f, a) => mix(mix(mix(FNV_OFFSET, 7), *f as u64), a.0.hash),
    }
}

impl Expr {
    fn raw(kind: Kind) -> Expr {
        let hash = structural_hash(&kind);
        Expr(Arc::new(Node { kind, hash }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Deterministic structural hash.
    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn num(q: Q) -> Expr {
        Expr::raw(Kind::Num(q))
    }

    pub fn int(i: i64) -> Expr {
        Expr::num(Q::from_integer(BigInt::from(i)))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::num(Q::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::raw(Kind::Sym(Arc::from(name)))
    }

    pub fn sym_named(name: Name) -> Expr {
        Expr::raw(Kind::Sym(name))
    }

    pub fn fun(name: &str, arg: &str, order: u32) -> Expr {
        Expr::raw(Kind::Fun { name: Arc::from(name), arg: Arc::from(arg), order })
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self.kind() {
            Kind::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&Name> {
        match self.kind() {
            Kind::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self.kind(), Kind::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind(), Kind::Num(q) if q.is_one())
    }

    /// Split off the numeric coefficient: `c * rest`.
    pub fn split_coeff(&self) -> (Q, Expr) {
        match self.kind() {
            Kind::Num(q) => (q.clone(), Expr::one()),
            Kind::Mul(fs) => match fs[0].kind() {
                Kind::Num(q) => {
                    let rest = if fs.len() == 2 {
                        fs[1].clone()
                    } else {
                        Expr::raw(Kind::Mul(fs[1..].to_vec()))
                    };
                    (q.clone(), rest)
                }
                _ => (Q::one(), self.clone()),
            },
            _ => (Q::one(), self.clone()),
        }
    }

    /// Multiply by a rational without re-sorting a product.
    fn scaled(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        match self.kind() {
            Kind::Num(q) => Expr::num(q * c),
            Kind::Mul(fs) => {
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::num(c.clone()));
                v.extend(fs.iter().cloned());
                Expr::raw(Kind::Mul(v))
            }
            _ => Expr::raw(Kind::Mul(vec![Expr::num(c.clone()), self.clone()])),
        }
    }

    /// Canonical sum.
    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Q::zero();
        let mut map: BTreeMap<Expr, Q> = BTreeMap::new();
        let push = |t: &Expr, map: &mut BTreeMap<Expr, Q>, constant: &mut Q| match t.kind() {
            Kind::Num(q) => *constant += q,
            _ => {
                let (c, rest) = t.split_coeff();
                let slot = map.entry(rest).or_insert_with(Q::zero);
                *slot += c;
            }
        };
        for t in terms {
            if let Kind::Add(ts) = t.kind() {
                for s in ts {
                    push(s, &mut map, &mut constant);
                }
            } else {
                push(&t, &mut map, &mut constant);
            }
        }
        let mut out = Vec::with_capacity(map.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (rest, c) in map {
            if !c.is_zero() {
                out.push(rest.scaled(&c));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::raw(Kind::Add(out)),
        }
    }

    /// Canonical product.
    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coeff = Q::one();
        let mut map: BTreeMap<Expr, Q> = BTreeMap::new();
        fn push(f: &Expr, coeff: &mut Q, map: &mut BTreeMap<Expr, Q>) {
            match f.kind() {
                Kind::Num(q) => *coeff *= q,
                Kind::Pow(b, e) => *map.entry(b.clone()).or_insert_with(Q::zero) += e,
                _ => *map.entry(f.clone()).or_insert_with(Q::zero) += Q::one(),
            }
        }
        for f in factors {
            if let Kind::Mul(fs) = f.kind() {
                for g in fs {
                    push(g, &mut coeff, &mut map);
                }
            } else {
                push(&f, &mut coeff, &mut map);
            }
            if coeff.is_zero() {
                return Expr::zero();
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(map.len() + 1);
        for (base, e) in map {
            if e.is_zero() {
                continue;
            }
            if let Kind::Num(b) = base.kind() {
                let np = num_pow(b, &e);
                coeff *= np.coeff;
                if let Some((rb, re)) = np.rest {
                    out.push(Expr::raw(Kind::Pow(Expr::num(rb), re)));
                }
                continue;
            }
            out.push(if e.is_one() { base } else { Expr::raw(Kind::Pow(base, e)) });
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::num(coeff);
        }
        out.sort();
        if coeff.is_one() && out.len() == 1 {
            return out.pop().unwrap();
        }
        if !coeff.is_one() {
            out.insert(0, Expr::num(coeff));
        }
        Expr::raw(Kind::Mul(out))
    }

    /// Canonical power with rational exponent. Fractional powers of products are
    /// distributed (real positive domain).
    pub fn pow(&self, e: &Q) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return self.clone();
        }
        match self.kind() {
            Kind::Num(b) => {
                let np = num_pow(b, e);
                match np.rest {
                    None => Expr::num(np.coeff),
                    Some((rb, re)) => {
                        let r = Expr::raw(Kind::Pow(Expr::num(rb), re));
                        if np.coeff.is_one() {
                            r
                        } else {
                            Expr::raw(Kind::Mul(vec![Expr::num(np.coeff), r]))
                        }
                    }
                }
            }
            Kind::Pow(b, e1) => b.pow(&(e1 * e)),
            Kind::Mul(fs) => Expr::mul_all(fs.iter().map(|f| f.pow(e))),
            _ => Expr::raw(Kind::Pow(self.clone(), e.clone())),
        }
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(&Q::from_integer(BigInt::from(n)))
    }

    pub fn sqrt(&self) -> Expr {
        self.pow(&Q::new(BigInt::from(1), BigInt::from(2)))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    /// Canonical builtin application.
    pub fn call(f: Builtin, arg: Expr) -> Expr {
        if let Kind::Num(q) = arg.kind() {
            match f {
                Builtin::Sin | Builtin::Tan | Builtin::Atan if q.is_zero() => return Expr::zero(),
                Builtin::Cos | Builtin::Exp if q.is_zero() => return Expr::one(),
                Builtin::Ln if q.is_one() => return Expr::zero(),
                Builtin::Abs => return Expr::num(q.abs()),
                _ => {}
            }
        }
        match (f, arg.kind()) {
            (Builtin::Ln, Kind::Call(Builtin::Exp, inner)) => return inner.clone(),
            (Builtin::Exp, Kind::Call(Builtin::Ln, inner)) => return inner.clone(),
            _ => {}
        }
        let (c, _) = arg.split_coeff();
        if c.is_negative() && !matches!(arg.kind(), Kind::Num(_)) {
            let flipped = -arg.clone();
            match f {
                Builtin::Sin | Builtin::Tan | Builtin::Atan => {
                    return -Expr::raw(Kind::Call(f, flipped));
                }
                Builtin::Cos | Builtin::Abs => return Expr::raw(Kind::Call(f, flipped)),
                _ => {}
            }
        }
        Expr::raw(Kind::Call(f, arg))
    }

    pub fn sin(&self) -> Expr {
        Expr::call(Builtin::Sin, self.clone())
    }
    pub fn cos(&self) -> Expr {
        Expr::call(Builtin::Cos, self.clone())
    }
    pub fn tan(&self) -> Expr {
        Expr::call(Builtin::Tan, self.clone())
    }
    pub fn ln(&self) -> Expr {
        Expr::call(Builtin::Ln, self.clone())
    }
    pub fn exp(&self) -> Expr {
        Expr::call(Builtin::Exp, self.clone())
    }

    /// Children in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match self.kind() {
            Kind::Num(_) | Kind::Sym(_) | Kind::Fun { .. } => vec![],
            Kind::Add(v) | Kind::Mul(v) => v.iter().collect(),
            Kind::Pow(b, _) => vec![b],
            Kind::Call(_, a) => vec![a],
        }
    }

    /// Free symbols (coordinates and parameters), excluding opaque function arguments.
    pub fn free_symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Kind::Sym(s) = e.kind() {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Opaque jets `(name, arg, order)` present in the expression.
    pub fn jets(&self) -> BTreeSet<(Name, Name, u32)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Kind::Fun { name, arg, order } = e.kind() {
                out.insert((name.clone(), arg.clone(), *order));
            }
        });
        out
    }

    /// True when the expression varies with coordinate `x`.
    pub fn depends_on(&self, x: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| match e.kind() {
            Kind::Sym(s) if &**s == x => found = true,
            Kind::Fun { arg, .. } if &**arg == x => found = true,
            _ => {}
        });
        found
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Bottom-up rebuild through the canonical constructors.
    pub fn map_leaves<F: Fn(&Expr) -> Option<Expr>>(&self, f: &F) -> Expr {
        if let Some(r) = f(self) {
            return r;
        }
        match self.kind() {
            Kind::Num(_) | Kind::Sym(_) | Kind::Fun { .. } => self.clone(),
            Kind::Add(ts) => Expr::add_all(ts.iter().map(|t| t.map_leaves(f))),
            Kind::Mul(fs) => Expr::mul_all(fs.iter().map(|t| t.map_leaves(f))),
            Kind::Pow(b, e) => b.map_leaves(f).pow(e),
            Kind::Call(g, a) => Expr::call(*g, a.map_leaves(f)),
        }
    }

    /// Replace symbol `name` by `value`.
    pub fn subst(&self, name: &str, value: &Expr) -> Expr {
        self.map_leaves(&|e| match e.kind() {
            Kind::Sym(s) if &**s == name => Some(value.clone()),
            _ => None,
        })
    }

    /// Simultaneous substitution of several symbols.
    pub fn subst_all(&self, map: &BTreeMap<Name, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        self.map_leaves(&|e| match e.kind() {
            Kind::Sym(s) => map.get(s).cloned(),
            _ => None,
        })
    }

    /// Partial derivative with respect to `x`.
    pub fn diff(&self, x: &str) -> Expr {
        diff::differentiate(self, x)
    }

    /// Rational-function normal form (see [`normalize`]).
    pub fn normal(&self) -> Expr {
        ratfun::normalize(self)
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

/// `b^e = coeff * rest`, where `rest` is a reduced numeric radical.
struct NumPow {
    coeff: Q,
    rest: Option<(Q, Q)>,
}

impl NumPow {
    fn keep(b: &Q, e: &Q) -> NumPow {
        NumPow { coeff: Q::one(), rest: Some((b.clone(), e.clone())) }
    }

    fn exact(v: Q) -> NumPow {
        NumPow { coeff: v, rest: None }
    }
}

/// Splits `n = c^k * r`, pulling out k-th powers of small factors.
fn extract_power(n: &BigInt, k: u32) -> (BigInt, BigInt) {
    let mut r = n.clone();
    let mut c = BigInt::one();
    let mut p = 2u32;
    while p < 1000 {
        let pk = num_traits::pow(BigInt::from(p), k as usize);
        if pk > r {
            break;
        }
        while (&r % &pk).is_zero() {
            r /= &pk;
            c *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (c, r)
}

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return int_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

fn qpow_int(b: &Q, e: &BigInt) -> Option<Q> {
    let k = e.to_i32()?;
    if b.is_zero() && k < 0 {
        return None;
    }
    Some(num_traits::pow::Pow::pow(b, k))
}

fn num_pow(b: &Q, e: &Q) -> NumPow {
    if e.is_integer() {
        return match qpow_int(b, e.numer()) {
            Some(v) => NumPow::exact(v),
            None => NumPow::keep(b, e),
        };
    }
    if b.is_negative() || b.is_zero() {
        return NumPow::keep(b, e);
    }
    let Some(k) = e.denom().to_u32() else {
        return NumPow::keep(b, e);
    };
    if let (Some(rn), Some(rd)) = (int_root(b.numer(), k), int_root(b.denom(), k)) {
        let root = Q::new(rn, rd);
        return match qpow_int(&root, e.numer()) {
            Some(v) => NumPow::exact(v),
            None => NumPow::keep(b, e),
        };
    }
    let whole = e.floor();
    let frac = e - &whole;
    let Some(mut coeff) = qpow_int(b, whole.numer()) else {
        return NumPow::keep(b, e);
    };
    // b^(p/k) = (b^p)^(1/k) with k-th powers pulled out of numerator and denominator
    let Some(bp) = frac.numer().to_i32().and_then(|p| qpow_int(b, &BigInt::from(p))) else {
        return NumPow::keep(b, e);
    };
    let (cn, rn) = extract_power(bp.numer(), k);
    let (cd, rd) = extract_power(bp.denom(), k);
    coeff *= Q::new(cn, cd);
    let base = Q::new(rn, rd);
    if base.is_one() {
        return NumPow::exact(coeff);
    }
    NumPow { coeff, rest: Some((base, Q::new(BigInt::one(), BigInt::from(k)))) }
}

fn kind_rank(k: &Kind) -> u8 {
    match k {
        Kind::Num(_) => 0,
        Kind::Sym(_) => 1,
        Kind::Fun { .. } => 2,
        Kind::Call(..) => 3,
        Kind::Pow(..) => 4,
        Kind::Mul(_) => 5,
        Kind::Add(_) => 6,
    }
}

fn base_exp(e: &Expr) -> (&Expr, Option<&Q>) {
    match e.kind() {
        Kind::Pow(b, x) => (b, Some(x)),
        _ => (e, None),
    }
}

fn cmp_list(a: &[Expr], b: &[Expr]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

fn cmp_plain(a: &Expr, b: &Expr) -> Ordering {
    let (ka, kb) = (a.kind(), b.kind());
    let r = kind_rank(ka).cmp(&kind_rank(kb));
    if r != Ordering::Equal {
        return r;
    }
    match (ka, kb) {
        (Kind::Num(x), Kind::Num(y)) => x.cmp(y),
        (Kind::Sym(x), Kind::Sym(y)) => x.cmp(y),
        (
            Kind::Fun { name: n1, arg: a1, order: o1 },
            Kind::Fun { name: n2, arg: a2, order: o2 },
        ) => (n1, a1, o1).cmp(&(n2, a2, o2)),
        (Kind::Call(f, x), Kind::Call(g, y)) => f.cmp(g).then_with(|| x.cmp(y)),
        (Kind::Add(x), Kind::Add(y)) | (Kind::Mul(x), Kind::Mul(y)) => cmp_list(x, y),
        (Kind::Pow(b1, e1), Kind::Pow(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
        _ => unreachable!("equal ranks share a kind"),
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Expr) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let a_num = matches!(self.kind(), Kind::Num(_));
        let b_num = matches!(other.kind(), Kind::Num(_));
        match (a_num, b_num) {
            (true, true) => return cmp_plain(self, other),
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ba, ea) = base_exp(self);
        let (bb, eb) = base_exp(other);
        if ea.is_none() && eb.is_none() {
            return cmp_plain(self, other);
        }
        let one = Q::one();
        ba.cmp(bb).then_with(|| ea.unwrap_or(&one).cmp(eb.unwrap_or(&one)))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Expr) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Expr {
        Expr::int(i)
    }
}

impl From<Q> for Expr {
    fn from(q: Q) -> Expr {
        Expr::num(q)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, rhs)
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add_all([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::add_all([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::mul_all([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::mul_all([a.clone(), b.recip()]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.kind() {
            Kind::Num(q) => Expr::num(-q),
            Kind::Add(ts) => Expr::add_all(ts.iter().map(|t| -t)),
            _ => {
                let (c, rest) = self.split_coeff();
                rest.scaled(&-c)
            }
        }
    }
}
