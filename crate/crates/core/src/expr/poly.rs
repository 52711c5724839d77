//! Sparse multivariate polynomials over Q with a lexicographic term order.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Q;

/// Monomial as `(variable, exponent)` pairs sorted by variable, exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Mono(pub Vec<(u32, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(v: u32, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    fn merge<F: Fn(u32, u32) -> u32>(&self, o: &Mono, f: F) -> Mono {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (v, x, y) = match (a.get(i), b.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        i += 1;
                        (va, ea, 0)
                    }
                    Ordering::Greater => {
                        j += 1;
                        (vb, 0, eb)
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (va, ea, eb)
                    }
                },
                (Some(&(va, ea)), None) => {
                    i += 1;
                    (va, ea, 0)
                }
                (None, Some(&(vb, eb))) => {
                    j += 1;
                    (vb, 0, eb)
                }
                (None, None) => unreachable!(),
            };
            let e = f(x, y);
            if e > 0 {
                out.push((v, e));
            }
        }
        Mono(out)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        self.merge(o, |x, y| x + y)
    }

    /// Caller guarantees `o` divides `self`.
    pub fn div(&self, o: &Mono) -> Mono {
        self.merge(o, |x, y| x - y)
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().all(|&(v, e)| o.degree(v) >= e)
    }

    pub fn gcd(&self, o: &Mono) -> Mono {
        self.merge(o, |x, y| x.min(y))
    }

    pub fn lcm(&self, o: &Mono) -> Mono {
        self.merge(o, |x, y| x.max(y))
    }

    pub fn pow(&self, n: u32) -> Mono {
        Mono(self.0.iter().map(|&(v, e)| (v, e * n)).filter(|(_, e)| *e > 0).collect())
    }

    pub fn without(&self, v: u32) -> Mono {
        Mono(self.0.iter().copied().filter(|(w, _)| *w != v).collect())
    }

    pub fn with_degree(&self, v: u32, e: u32) -> Mono {
        self.without(v).mul(&Mono::var(v, e))
    }
}

impl Ord for Mono {
    /// Dense lexicographic order, lower variable index most significant.
    fn cmp(&self, o: &Mono) -> Ordering {
        let (a, b) = (&self.0, &o.0);
        for k in 0.. {
            match (a.get(k), b.get(k)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        return if va < vb { Ordering::Greater } else { Ordering::Less };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
        }
        unreachable!()
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Mono) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Terms sorted by descending monomial, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Poly {
    pub terms: Vec<(Mono, Q)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn constant(q: Q) -> Poly {
        if q.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::one(), q)] }
        }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn monomial(m: Mono, q: Q) -> Poly {
        if q.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, q)] }
        }
    }

    pub fn var(v: u32) -> Poly {
        Poly::monomial(Mono::var(v, 1), Q::one())
    }

    fn from_map(map: HashMap<Mono, Q>) -> Poly {
        let mut terms: Vec<(Mono, Q)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn lead(&self) -> Option<&(Mono, Q)> {
        self.terms.first()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.iter().flat_map(|(m, _)| m.0.iter().map(|p| p.0)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree(v)).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Q) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn mul_term(&self, m: &Mono, q: &Q) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * q)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if o.len() == 1 {
            return self.mul_term(&o.terms[0].0, &o.terms[0].1);
        }
        if self.len() == 1 {
            return o.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut map: HashMap<Mono, Q> = HashMap::with_capacity(self.len() * o.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let slot = map.entry(ma.mul(mb)).or_insert_with(Q::zero);
                *slot += ca * cb;
            }
        }
        Poly::from_map(map)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.lead()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.len() == 1 {
            let mut terms = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                if !dm.divides(m) {
                    return None;
                }
                terms.push((m.div(dm), c / dc));
            }
            return Some(Poly { terms });
        }
        for &(v, e) in &dm.0 {
            if self.degree(v) < e {
                return None;
            }
        }
        let mut rem = self.clone();
        let mut quot: Vec<(Mono, Q)> = Vec::new();
        while let Some((rm, rc)) = rem.lead().cloned() {
            if !dm.divides(&rm) {
                return None;
            }
            let qm = rm.div(dm);
            let qc = &rc / dc;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Largest monomial dividing every term.
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else { return Mono::one() };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_mono(&self, m: &Mono) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(n, c)| (n.div(m), c.clone())).collect() }
    }

    /// `(c, p)` with `self = c * p`, `p` integral, primitive, positive leading coefficient.
    pub fn primitive(&self) -> (Q, Poly) {
        if self.is_zero() {
            return (Q::one(), Poly::zero());
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let mut content = Q::new(num, den);
        if self.terms[0].1.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Replace `v^k` by `repl` wherever the degree of `v` reaches `k`.
    pub fn reduce_power(&self, v: u32, k: u32, repl: &Poly) -> Poly {
        if self.degree(v) < k {
            return self.clone();
        }
        let mut powers: Vec<Poly> = vec![Poly::one()];
        let mut map: HashMap<Mono, Q> = HashMap::new();
        let mut add = |m: Mono, c: Q| {
            let slot = map.entry(m).or_insert_with(Q::zero);
            *slot += c;
        };
        for (m, c) in &self.terms {
            let e = m.degree(v);
            if e < k {
                add(m.clone(), c.clone());
                continue;
            }
            let (d, r) = (e / k, e % k);
            while powers.len() <= d as usize {
                let next = powers.last().unwrap().mul(repl);
                powers.push(next);
            }
            let rest = m.with_degree(v, r);
            for (pm, pc) in &powers[d as usize].terms {
                add(rest.mul(pm), c * pc);
            }
        }
        let out = Poly::from_map(map);
        if out.degree(v) >= k {
            out.reduce_power(v, k, repl)
        } else {
            out
        }
    }

    /// Substitute `v -> -v`.
    pub fn negate_odd(&self, v: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| if m.degree(v) % 2 == 1 { (m.clone(), -c) } else { (m.clone(), c.clone()) })
                .collect(),
        }
    }

    /// Coefficients in powers of `v`: `self = sum_i out[i] * v^i`.
    pub fn coefficients_in(&self, v: u32) -> Vec<Poly> {
        let deg = self.degree(v) as usize;
        let mut maps: Vec<HashMap<Mono, Q>> = vec![HashMap::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.degree(v) as usize;
            maps[e].insert(m.without(v), c.clone());
        }
        maps.into_iter().map(Poly::from_map).collect()
    }

    /// Partial derivative in `v`.
    #[cfg(test)]
    pub fn derivative(&self, v: u32) -> Poly {
        let mut map = HashMap::new();
        for (m, c) in &self.terms {
            let e = m.degree(v);
            if e > 0 {
                map.insert(m.with_degree(v, e - 1), c * Q::from_integer(e.into()));
            }
        }
        Poly::from_map(map)
    }
}
