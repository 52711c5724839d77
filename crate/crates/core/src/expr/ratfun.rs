//! Rational-function normal form over a ring of kernels.
//!
//! Kernels are symbols, opaque jets, `sin`/`cos` pairs, radicals and opaque
//! builtin applications. `cos^2` is rewritten as `1 - sin^2` and radical
//! powers are reduced below their index, so a zero numerator proves the
//! input vanishes identically.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{Mono, Poly};
use super::{Builtin, Expr, Kind, Q};

#[derive(Clone, Debug)]
pub(crate) enum Kernel {
    Plain(Expr),
    Sin { arg: Expr },
    Cos { arg: Expr, sin: u32 },
    /// `base^(1/q)`; `value` is the base as a rational function.
    Radical { base: Expr, q: u32, value: RatFun },
}

/// `num / (dmono * prod factor^e)`; factors are registered in the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RatFun {
    pub num: Poly,
    pub dmono: Mono,
    pub dfac: Vec<(u32, u32)>,
}

impl RatFun {
    pub fn zero() -> RatFun {
        RatFun::from_poly(Poly::zero())
    }

    pub fn one() -> RatFun {
        RatFun::from_poly(Poly::one())
    }

    pub fn constant(q: Q) -> RatFun {
        RatFun::from_poly(Poly::constant(q))
    }

    pub fn from_poly(num: Poly) -> RatFun {
        RatFun { num, dmono: Mono::one(), dfac: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn has_trivial_den(&self) -> bool {
        self.dmono.is_one() && self.dfac.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.has_trivial_den() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn scale(&self, q: &Q) -> RatFun {
        if q.is_zero() {
            return RatFun::zero();
        }
        RatFun { num: self.num.scale(q), dmono: self.dmono.clone(), dfac: self.dfac.clone() }
    }
}

fn merge_exps(a: &[(u32, u32)], b: &[(u32, u32)], f: impl Fn(u32, u32) -> u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (id, x, y) = match (a.get(i), b.get(j)) {
            (Some(&(ia, ea)), Some(&(ib, eb))) if ia == ib => {
                i += 1;
                j += 1;
                (ia, ea, eb)
            }
            (Some(&(ia, ea)), Some(&(ib, _))) if ia < ib => {
                i += 1;
                (ia, ea, 0)
            }
            (Some(_), Some(&(ib, eb))) => {
                j += 1;
                (ib, 0, eb)
            }
            (Some(&(ia, ea)), None) => {
                i += 1;
                (ia, ea, 0)
            }
            (None, Some(&(ib, eb))) => {
                j += 1;
                (ib, 0, eb)
            }
            (None, None) => unreachable!(),
        };
        let e = f(x, y);
        if e > 0 {
            out.push((id, e));
        }
    }
    out
}

const MAX_TRIG_MULTIPLE: u64 = 12;

/// Conversion context: kernel table, factor registry and memo.
#[derive(Default)]
pub(crate) struct Ring {
    kernels: Vec<Kernel>,
    index: HashMap<Expr, u32>,
    trig: HashMap<Expr, (u32, u32)>,
    factors: Vec<Poly>,
    factor_index: HashMap<Poly, u32>,
    memo: HashMap<Expr, RatFun>,
    /// Set when a kernel may satisfy relations the normal form does not see.
    pub(crate) tainted: bool,
    /// Set on division by an identically zero denominator.
    pub(crate) pole: bool,
    depth: u32,
}

impl Ring {
    pub fn new() -> Ring {
        Ring::default()
    }

    pub fn kernel(&self, v: u32) -> &Kernel {
        &self.kernels[v as usize]
    }

    /// Variable index of a plain symbol or jet, if it occurs.
    pub fn lookup(&self, key: &Expr) -> Option<u32> {
        self.index.get(key).copied()
    }

    pub fn plain_var(&mut self, e: &Expr) -> u32 {
        if let Some(&v) = self.index.get(e) {
            return v;
        }
        let v = self.kernels.len() as u32;
        self.kernels.push(Kernel::Plain(e.clone()));
        self.index.insert(e.clone(), v);
        v
    }

    fn trig_pair(&mut self, arg: &Expr) -> (u32, u32) {
        if let Some(&p) = self.trig.get(arg) {
            return p;
        }
        if arg.as_sym().is_none() {
            self.tainted = true;
        }
        let s = self.kernels.len() as u32;
        self.kernels.push(Kernel::Sin { arg: arg.clone() });
        self.kernels.push(Kernel::Cos { arg: arg.clone(), sin: s });
        self.trig.insert(arg.clone(), (s, s + 1));
        (s, s + 1)
    }

    fn factor(&self, id: u32) -> &Poly {
        &self.factors[id as usize]
    }

    pub fn den_poly(&self, r: &RatFun) -> Poly {
        let mut p = Poly::monomial(r.dmono.clone(), Q::one());
        for &(id, e) in &r.dfac {
            p = p.mul(&self.factor(id).pow(e));
        }
        p
    }

    /// Split a primitive, monomial-free polynomial into registered factors.
    fn register(&mut self, p: Poly) -> Vec<(u32, u32)> {
        if p.as_constant().is_some() {
            return Vec::new();
        }
        if let Some(&id) = self.factor_index.get(&p) {
            return vec![(id, 1)];
        }
        for id in 0..self.factors.len() as u32 {
            let f = self.factor(id);
            if f.len() > p.len() || f.len() < 2 {
                continue;
            }
            if let Some(h) = p.div_exact(f) {
                let rest = self.register(h);
                return merge_exps(&[(id, 1)], &rest, |x, y| x + y);
            }
        }
        let id = self.factors.len() as u32;
        self.factor_index.insert(p.clone(), id);
        self.factors.push(p);
        vec![(id, 1)]
    }

    /// Remove common monomials and registered factors between numerator and denominator.
    fn cancel(&mut self, mut r: RatFun) -> RatFun {
        if r.num.is_zero() {
            return RatFun::zero();
        }
        if !r.dmono.is_one() {
            let g = r.num.mono_content().gcd(&r.dmono);
            if !g.is_one() {
                r.num = r.num.div_mono(&g);
                r.dmono = r.dmono.div(&g);
            }
        }
        if r.num.len() > 1 || r.num.lead().is_some_and(|(m, _)| !m.is_one()) {
            let mut out = Vec::with_capacity(r.dfac.len());
            for &(id, e) in &r.dfac {
                let mut left = e;
                while left > 0 {
                    match r.num.div_exact(&self.factors[id as usize]) {
                        Some(q) => {
                            r.num = q;
                            left -= 1;
                        }
                        None => break,
                    }
                }
                if left > 0 {
                    out.push((id, left));
                }
            }
            r.dfac = out;
        }
        r
    }

    fn reduce_num(&mut self, num: Poly) -> (Poly, Mono, Vec<(u32, u32)>) {
        let mut num = num;
        let mut dmono = Mono::one();
        let mut dfac = Vec::new();
        for _ in 0..8 {
            let mut changed = false;
            for v in num.vars() {
                match self.kernels[v as usize].clone() {
                    Kernel::Cos { sin, .. } if num.degree(v) >= 2 => {
                        let repl = Poly::one().sub(&Poly::var(sin).pow(2));
                        num = num.reduce_power(v, 2, &repl);
                        changed = true;
                    }
                    Kernel::Radical { q, value, .. } if num.degree(v) >= q => {
                        if value.has_trivial_den() {
                            num = num.reduce_power(v, q, &value.num);
                        } else {
                            let coeffs = num.coefficients_in(v);
                            let top = (coeffs.len() as u32 - 1) / q;
                            let dv = self.den_poly(&value);
                            let mut acc = Poly::zero();
                            for (i, c) in coeffs.iter().enumerate() {
                                if c.is_zero() {
                                    continue;
                                }
                                let (m, r) = (i as u32 / q, i as u32 % q);
                                let term = c
                                    .mul(&Poly::var(v).pow(r))
                                    .mul(&value.num.pow(m))
                                    .mul(&dv.pow(top - m));
                                acc = acc.add(&term);
                            }
                            num = acc;
                            dmono = dmono.mul(&value.dmono.pow(top));
                            let scaled: Vec<(u32, u32)> = value.dfac.iter().map(|&(id, e)| (id, e * top)).collect();
                            dfac = merge_exps(&dfac, &scaled, |x, y| x + y);
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        (num, dmono, dfac)
    }

    /// Bring a rational function to reduced form: kernel relations applied, common factors removed.
    fn finish(&mut self, r: RatFun) -> RatFun {
        let (num, extra_m, extra_f) = self.reduce_num(r.num);
        let mut r = RatFun { num, dmono: r.dmono.mul(&extra_m), dfac: merge_exps(&r.dfac, &extra_f, |x, y| x + y) };
        // Even cosine powers and full radical powers leave the denominator monomial.
        for &(v, e) in &r.dmono.0.clone() {
            match self.kernels[v as usize].clone() {
                Kernel::Cos { sin, .. } if e >= 2 => {
                    let k = e / 2;
                    r.dmono = r.dmono.with_degree(v, e % 2);
                    let f = Poly::var(sin).pow(2).sub(&Poly::one());
                    let ids = self.register(f);
                    let ids: Vec<(u32, u32)> = ids.into_iter().map(|(id, x)| (id, x * k)).collect();
                    r.dfac = merge_exps(&r.dfac, &ids, |x, y| x + y);
                    if k % 2 == 1 {
                        r.num = r.num.neg();
                    }
                }
                Kernel::Radical { q, value, .. } if e >= q => {
                    let m = e / q;
                    r.dmono = r.dmono.with_degree(v, e % q);
                    let inv = self.inv_raw(&value);
                    for _ in 0..m {
                        r.num = r.num.mul(&inv.num);
                        r.dmono = r.dmono.mul(&inv.dmono);
                        r.dfac = merge_exps(&r.dfac, &inv.dfac, |x, y| x + y);
                    }
                    let (num, em, ef) = self.reduce_num(r.num);
                    r.num = num;
                    r.dmono = r.dmono.mul(&em);
                    r.dfac = merge_exps(&r.dfac, &ef, |x, y| x + y);
                }
                _ => {}
            }
        }
        self.cancel(r)
    }

    pub fn add_many(&mut self, items: Vec<RatFun>) -> RatFun {
        let items: Vec<RatFun> = items.into_iter().filter(|r| !r.is_zero()).collect();
        match items.len() {
            0 => return RatFun::zero(),
            1 => return items.into_iter().next().unwrap(),
            _ => {}
        }
        // Group by denominator first.
        let mut groups: Vec<(Mono, Vec<(u32, u32)>, Poly)> = Vec::new();
        for r in items {
            match groups.iter_mut().find(|g| g.0 == r.dmono && g.1 == r.dfac) {
                Some(g) => g.2 = g.2.add(&r.num),
                None => groups.push((r.dmono, r.dfac, r.num)),
            }
        }
        let mut lm = Mono::one();
        let mut lf: Vec<(u32, u32)> = Vec::new();
        for g in &groups {
            lm = lm.lcm(&g.0);
            lf = merge_exps(&lf, &g.1, |x, y| x.max(y));
        }
        let mut num = Poly::zero();
        for (m, f, p) in &groups {
            if p.is_zero() {
                continue;
            }
            let mut cof = Poly::monomial(lm.div(m), Q::one());
            for (id, e) in merge_exps(&lf, f, |x, y| x - y) {
                cof = cof.mul(&self.factor(id).pow(e));
            }
            num = num.add(&p.mul(&cof));
        }
        self.finish(RatFun { num, dmono: lm, dfac: lf })
    }

    pub fn add(&mut self, a: &RatFun, b: &RatFun) -> RatFun {
        self.add_many(vec![a.clone(), b.clone()])
    }

    pub fn sub(&mut self, a: &RatFun, b: &RatFun) -> RatFun {
        self.add_many(vec![a.clone(), b.scale(&-Q::one())])
    }

    pub fn mul_many(&mut self, items: Vec<RatFun>) -> RatFun {
        if items.iter().any(RatFun::is_zero) {
            return RatFun::zero();
        }
        let mut num = Poly::one();
        let mut dmono = Mono::one();
        let mut dfac: Vec<(u32, u32)> = Vec::new();
        for r in &items {
            num = num.mul(&r.num);
            dmono = dmono.mul(&r.dmono);
            dfac = merge_exps(&dfac, &r.dfac, |x, y| x + y);
        }
        self.finish(RatFun { num, dmono, dfac })
    }

    pub fn mul(&mut self, a: &RatFun, b: &RatFun) -> RatFun {
        if let Some(c) = a.as_constant() {
            return b.scale(&c);
        }
        if let Some(c) = b.as_constant() {
            return a.scale(&c);
        }
        self.mul_many(vec![a.clone(), b.clone()])
    }

    fn inv_raw(&mut self, r: &RatFun) -> RatFun {
        if r.num.is_zero() {
            self.pole = true;
            return RatFun::zero();
        }
        let (c, p) = r.num.primitive();
        let m = p.mono_content();
        let p = p.div_mono(&m);
        let dfac = self.register(p);
        RatFun { num: self.den_poly(r).scale(&c.recip()), dmono: m, dfac }
    }

    pub fn inv(&mut self, r: &RatFun) -> RatFun {
        let raw = self.inv_raw(r);
        self.finish(raw)
    }

    pub fn div(&mut self, a: &RatFun, b: &RatFun) -> RatFun {
        let ib = self.inv(b);
        self.mul(a, &ib)
    }

    pub fn powi(&mut self, r: &RatFun, n: i64) -> RatFun {
        if n == 0 {
            return RatFun::one();
        }
        let base = if n < 0 { self.inv(r) } else { r.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = RatFun::one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Convert an expression into the ring.
    pub fn convert(&mut self, e: &Expr) -> RatFun {
        if let Some(r) = self.memo.get(e) {
            return r.clone();
        }
        let r = match e.kind() {
            Kind::Num(q) => RatFun::constant(q.clone()),
            Kind::Sym(_) | Kind::Fun { .. } => RatFun::from_poly(Poly::var(self.plain_var(e))),
            Kind::Add(ts) => {
                let items: Vec<RatFun> = ts.iter().map(|t| self.convert(t)).collect();
                self.add_many(items)
            }
            Kind::Mul(fs) => {
                let items: Vec<RatFun> = fs.iter().map(|f| self.convert(f)).collect();
                self.mul_many(items)
            }
            Kind::Pow(b, x) => {
                if x.is_integer() {
                    let rb = self.convert(b);
                    match x.numer().to_i64() {
                        Some(n) => self.powi(&rb, n),
                        None => {
                            self.tainted = true;
                            RatFun::from_poly(Poly::var(self.plain_var(e)))
                        }
                    }
                } else {
                    self.radical(b, x)
                }
            }
            Kind::Call(f, a) => match f {
                Builtin::Sin | Builtin::Cos | Builtin::Tan => self.trig(*f, a),
                _ => {
                    let na = self.normal_expr(a);
                    let key = Expr::call(*f, na);
                    if matches!(key.kind(), Kind::Call(..)) {
                        self.tainted = true;
                        RatFun::from_poly(Poly::var(self.plain_var(&key)))
                    } else {
                        self.convert(&key)
                    }
                }
            },
        };
        self.memo.insert(e.clone(), r.clone());
        r
    }

    fn normal_expr(&mut self, e: &Expr) -> Expr {
        let r = self.convert(e);
        self.to_expr(&r)
    }

    fn radical(&mut self, b: &Expr, x: &Q) -> RatFun {
        let nb = self.normal_expr(b);
        self.depth += 1;
        let out = self.radical_of_normal(nb, x);
        self.depth -= 1;
        out
    }

    fn radical_of_normal(&mut self, nb: Expr, x: &Q) -> RatFun {
        if self.depth < 8 {
            match nb.kind() {
                Kind::Mul(fs) => {
                    let parts: Vec<Expr> = fs.iter().map(|f| f.pow(x)).collect();
                    let items: Vec<RatFun> = parts.iter().map(|p| self.convert(p)).collect();
                    return self.mul_many(items);
                }
                Kind::Pow(inner, s) => {
                    let merged = inner.pow(&(s * x));
                    return self.convert(&merged);
                }
                _ => {}
            }
        }
        if nb.is_zero_const() {
            if x.is_negative() {
                self.pole = true;
            }
            return RatFun::zero();
        }
        let Some(q) = x.denom().to_u32() else {
            self.tainted = true;
            let key = nb.pow(x);
            return RatFun::from_poly(Poly::var(self.plain_var(&key)));
        };
        let key = Expr::raw(Kind::Pow(nb.clone(), Q::new(BigInt::one(), BigInt::from(q))));
        let v = match self.index.get(&key) {
            Some(&v) => v,
            None => {
                let value = self.convert(&nb);
                let v = self.kernels.len() as u32;
                self.kernels.push(Kernel::Radical { base: nb.clone(), q, value });
                self.index.insert(key, v);
                self.tainted = true;
                v
            }
        };
        let p = x.numer().clone();
        let (m, r) = p.div_mod_floor(&BigInt::from(q));
        let rb = self.convert(&nb);
        let whole = self.powi(&rb, m.to_i64().unwrap_or(0));
        let frac = RatFun::from_poly(Poly::monomial(Mono::var(v, r.to_u32().unwrap_or(0)), Q::one()));
        self.mul(&whole, &frac)
    }

    /// Integer-linear combination of symbols, if `a` is one.
    fn linear_symbols(a: &Expr) -> Option<Vec<(Expr, i64)>> {
        let one = |t: &Expr| -> Option<(Expr, i64)> {
            let (c, rest) = t.split_coeff();
            if !c.is_integer() || rest.as_sym().is_none() {
                return None;
            }
            Some((rest, c.numer().to_i64()?))
        };
        let out: Vec<(Expr, i64)> = match a.kind() {
            Kind::Add(ts) => ts.iter().map(one).collect::<Option<_>>()?,
            _ => vec![one(a)?],
        };
        let total: u64 = out.iter().map(|(_, n)| n.unsigned_abs()).sum();
        (total <= MAX_TRIG_MULTIPLE).then_some(out)
    }

    fn trig(&mut self, f: Builtin, a: &Expr) -> RatFun {
        let na = self.normal_expr(a);
        let (cos, sin) = match Ring::linear_symbols(&na) {
            Some(parts) => {
                let mut re = Poly::one();
                let mut im = Poly::zero();
                for (sym, n) in parts {
                    let (s, c) = self.trig_pair(&sym);
                    let ps = if n < 0 { Poly::var(s).neg() } else { Poly::var(s) };
                    let pc = Poly::var(c);
                    for _ in 0..n.unsigned_abs() {
                        let nre = re.mul(&pc).sub(&im.mul(&ps));
                        let nim = re.mul(&ps).add(&im.mul(&pc));
                        re = nre;
                        im = nim;
                    }
                }
                let (re, _, _) = self.reduce_num(re);
                let (im, _, _) = self.reduce_num(im);
                (RatFun::from_poly(re), RatFun::from_poly(im))
            }
            None => {
                let (c, _) = na.split_coeff();
                let (arg, sign) = if c.is_negative() { (-&na, -Q::one()) } else { (na, Q::one()) };
                let (s, cv) = self.trig_pair(&arg);
                (RatFun::from_poly(Poly::var(cv)), RatFun::from_poly(Poly::var(s).scale(&sign)))
            }
        };
        match f {
            Builtin::Sin => sin,
            Builtin::Cos => cos,
            _ => self.div(&sin, &cos),
        }
    }

    /// Every kernel index occurring in numerator or denominator.
    pub fn vars_of(&self, r: &RatFun) -> BTreeSet<u32> {
        let mut out: BTreeSet<u32> = r.num.vars().into_iter().collect();
        out.extend(r.dmono.0.iter().map(|p| p.0));
        for &(id, _) in &r.dfac {
            out.extend(self.factor(id).vars());
        }
        out
    }

    pub fn factor_poly(&self, id: u32) -> &Poly {
        self.factor(id)
    }

    /// Clear kernel `v` (with a quadratic relation) from the denominator by the
    /// conjugate `v -> -v`. `None` unless the result is free of `v`.
    pub fn rationalize(&mut self, r: &RatFun, v: u32) -> Option<RatFun> {
        let d = self.den_poly(r);
        if d.degree(v) == 0 {
            return (r.num.degree(v) == 0).then(|| r.clone());
        }
        let conj = d.negate_odd(v);
        let (n2, m1, f1) = self.reduce_num(r.num.mul(&conj));
        let (d2, m2, f2) = self.reduce_num(d.mul(&conj));
        if !(m1.is_one() && f1.is_empty() && m2.is_one() && f2.is_empty()) {
            return None;
        }
        if n2.degree(v) > 0 || d2.degree(v) > 0 {
            return None;
        }
        Some(self.div(&RatFun::from_poly(n2), &RatFun::from_poly(d2)))
    }

    pub(crate) fn kernel_expr(&self, v: u32) -> Expr {
        match &self.kernels[v as usize] {
            Kernel::Plain(e) => e.clone(),
            Kernel::Sin { arg } => Expr::call(Builtin::Sin, arg.clone()),
            Kernel::Cos { arg, .. } => Expr::call(Builtin::Cos, arg.clone()),
            Kernel::Radical { base, q, .. } => {
                Expr::raw(Kind::Pow(base.clone(), Q::new(BigInt::one(), BigInt::from(*q))))
            }
        }
    }

    fn mono_expr(&self, m: &Mono) -> Expr {
        Expr::mul_all(m.0.iter().map(|&(v, e)| self.kernel_expr(v).powi(e as i64)))
    }

    fn poly_expr(&self, p: &Poly) -> Expr {
        Expr::add_all(p.terms.iter().map(|(m, c)| Expr::num(c.clone()) * self.mono_expr(m)))
    }

    /// Expression for a primitive factor, with a sign fixed by the expression order.
    /// Returns `(expr, flipped)` where `flipped` means `expr = -p`.
    fn factor_expr(&self, p: &Poly) -> (Expr, bool) {
        if let [(m2, c2), (m0, c0)] = p.terms.as_slice() {
            if m0.is_one() && c2.is_one() && (-c0).is_one() {
                if let [(v, 2)] = m2.0.as_slice() {
                    if let Kernel::Sin { arg } = &self.kernels[*v as usize] {
                        // sin^2 - 1 = -cos^2
                        return (Expr::call(Builtin::Cos, arg.clone()).powi(2), true);
                    }
                }
            }
        }
        let e = self.poly_expr(p);
        let last_negative = match e.kind() {
            Kind::Add(ts) => ts.last().is_some_and(|t| t.split_coeff().0.is_negative()),
            _ => false,
        };
        if last_negative {
            (-e, true)
        } else {
            (e, false)
        }
    }

    pub fn to_expr(&self, r: &RatFun) -> Expr {
        if r.num.is_zero() {
            return Expr::zero();
        }
        if r.has_trivial_den() {
            let (c, p) = r.num.primitive();
            if let (fe, true) = self.factor_expr(&p) {
                if !matches!(fe.kind(), Kind::Add(_)) {
                    return fe * Expr::num(-c);
                }
            }
            return self.poly_expr(&r.num);
        }
        let (mut c, p) = r.num.primitive();
        let m = p.mono_content();
        let p = p.div_mono(&m);
        let mut parts = Vec::with_capacity(r.dfac.len() + 4);
        parts.push(self.mono_expr(&m));
        if p.as_constant().is_none() {
            let (pe, flipped) = self.factor_expr(&p);
            if flipped {
                c = -c;
            }
            parts.push(pe);
        }
        if !r.dmono.is_one() {
            parts.push(self.mono_expr(&r.dmono).recip());
        }
        for &(id, e) in &r.dfac {
            let (fe, flipped) = self.factor_expr(self.factor(id));
            if flipped && e % 2 == 1 {
                c = -c;
            }
            parts.push(fe.powi(-(e as i64)));
        }
        parts.push(Expr::num(c));
        Expr::mul_all(parts)
    }
}

/// Rational-function normal form: a single quotient of expanded polynomials in
/// the kernels, with common monomials and recognised factors cancelled.
pub fn normalize(e: &Expr) -> Expr {
    if matches!(e.kind(), Kind::Num(_) | Kind::Sym(_) | Kind::Fun { .. }) {
        return e.clone();
    }
    let mut ring = Ring::new();
    let r = ring.convert(e);
    if ring.pole {
        return e.clone();
    }
    ring.to_expr(&r)
}

/// Outcome of an exact zero check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Exact {
    Zero,
    /// Numerator nonzero in a ring without hidden relations.
    NonZero,
    Unknown,
}

pub(crate) fn exact_zero(e: &Expr) -> Exact {
    if e.is_zero_const() {
        return Exact::Zero;
    }
    if let Kind::Num(_) = e.kind() {
        return Exact::NonZero;
    }
    let mut ring = Ring::new();
    let r = ring.convert(e);
    if ring.pole {
        return Exact::Unknown;
    }
    match (r.is_zero(), ring.tainted) {
        (true, _) => Exact::Zero,
        (false, false) => Exact::NonZero,
        (false, true) => Exact::Unknown,
    }
}
