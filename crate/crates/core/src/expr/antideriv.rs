//! Univariate antiderivatives for the closed-form class used by potential recovery:
//! polynomials, rational functions whose denominators split into linear and
//! quadratic factors in the integration variable, rational functions of
//! `sin x`, `cos x`, and derivatives of opaque jets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::eval::evaluate;
use super::ratfun::{exact_zero, Exact, Kernel, RatFun, Ring};
use super::{normalize, Builtin, Expr, Kind, Q, ZeroTest};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("no closed-form antiderivative in `{variable}` for {residual} ({reason})")]
    Unsupported { variable: String, residual: Expr, reason: String },
    #[error("antiderivative in `{variable}` failed its derivative check")]
    Verification { variable: String },
}

fn unsupported(x: &str, f: &Expr, reason: &str) -> IntegrationError {
    IntegrationError::Unsupported { variable: x.to_string(), residual: f.clone(), reason: reason.to_string() }
}

/// Antiderivative of `f` with respect to `x`, with zero constant of integration.
/// The result is verified by differentiation before it is returned.
pub fn antiderivative(f: &Expr, x: &str) -> Result<Expr, IntegrationError> {
    let f = normalize(f);
    if f.is_zero_const() {
        return Ok(Expr::zero());
    }
    let out = normalize(&integrate(&f, x, 0)?);
    let check = &out.diff(x) - &f;
    if ZeroTest::default().is_zero(&check) {
        Ok(out)
    } else {
        Err(IntegrationError::Verification { variable: x.to_string() })
    }
}

const MAX_DEPTH: u32 = 6;

fn integrate(f: &Expr, x: &str, depth: u32) -> Result<Expr, IntegrationError> {
    if depth > MAX_DEPTH {
        return Err(unsupported(x, f, "recursion limit"));
    }
    if !f.depends_on(x) {
        return Ok(f * Expr::sym(x));
    }
    // Split sums so each class is handled on its own.
    if let Kind::Add(ts) = f.kind() {
        let (dep, indep): (Vec<Expr>, Vec<Expr>) = ts.iter().cloned().partition(|t| t.depends_on(x));
        if !indep.is_empty() {
            let rest = integrate(&Expr::add_all(dep), x, depth)?;
            return Ok(Expr::add_all(indep) * Expr::sym(x) + rest);
        }
    }
    let jets_in_x = f.jets().into_iter().any(|(_, arg, _)| &*arg == x);
    if jets_in_x {
        return integrate_jets(f, x, depth);
    }
    let mut ring = Ring::new();
    let r = ring.convert(f);
    let xe = Expr::sym(x);
    let mut plain_x = false;
    let mut trig_x = false;
    for v in ring.vars_of(&r) {
        match ring.kernel(v) {
            Kernel::Plain(e) if *e == xe => plain_x = true,
            Kernel::Sin { arg } | Kernel::Cos { arg, .. } if *arg == xe => trig_x = true,
            k => {
                if ring.kernel_expr(v).depends_on(x) {
                    let _ = k;
                    return Err(unsupported(x, f, "dependence through a non-rational kernel"));
                }
            }
        }
    }
    match (plain_x, trig_x) {
        (true, false) => integrate_rational(&mut ring, &r, x, f),
        (false, true) => integrate_trig(f, x, depth),
        _ => Err(unsupported(x, f, "mixed polynomial and trigonometric dependence")),
    }
}

// ---------------------------------------------------------------------------
// Polynomials in x over the field of rational functions in the other kernels.

#[derive(Clone, Debug)]
struct UPoly(Vec<RatFun>);

impl UPoly {
    fn trimmed(mut self) -> UPoly {
        while self.0.last().is_some_and(RatFun::is_zero) {
            self.0.pop();
        }
        self
    }

    fn constant(c: RatFun) -> UPoly {
        UPoly(vec![c]).trimmed()
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lc(&self) -> &RatFun {
        self.0.last().expect("nonzero polynomial")
    }

    fn coeff(&self, i: usize) -> RatFun {
        self.0.get(i).cloned().unwrap_or_else(RatFun::zero)
    }
}

fn up_sub(ring: &mut Ring, a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.0.len().max(b.0.len());
    UPoly((0..n).map(|i| ring.sub(&a.coeff(i), &b.coeff(i))).collect()).trimmed()
}

fn up_mul(ring: &mut Ring, a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_zero() || b.is_zero() {
        return UPoly(Vec::new());
    }
    let mut out = vec![RatFun::zero(); a.0.len() + b.0.len() - 1];
    for (i, ca) in a.0.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.0.iter().enumerate() {
            let p = ring.mul(ca, cb);
            out[i + j] = ring.add(&out[i + j], &p);
        }
    }
    UPoly(out).trimmed()
}

fn up_scale(ring: &mut Ring, a: &UPoly, c: &RatFun) -> UPoly {
    UPoly(a.0.iter().map(|x| ring.mul(x, c)).collect()).trimmed()
}

fn up_pow(ring: &mut Ring, a: &UPoly, n: u32) -> UPoly {
    let mut acc = UPoly::constant(RatFun::one());
    for _ in 0..n {
        acc = up_mul(ring, &acc, a);
    }
    acc
}

fn up_divrem(ring: &mut Ring, a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    let inv = ring.inv(b.lc());
    let mut rem = a.clone();
    let mut quot = vec![RatFun::zero(); a.0.len().saturating_sub(b.deg()).max(1)];
    while !rem.is_zero() && rem.deg() >= b.deg() {
        let k = rem.deg() - b.deg();
        let c = ring.mul(rem.lc(), &inv);
        let mut shifted = vec![RatFun::zero(); k];
        shifted.extend(b.0.iter().map(|bc| ring.mul(bc, &c)));
        let top = rem.deg();
        rem = up_sub(ring, &rem, &UPoly(shifted));
        // Guard against a leading coefficient the ring could not cancel.
        if !rem.is_zero() && rem.deg() >= top {
            rem.0.truncate(top);
            rem = rem.trimmed();
        }
        quot[k] = c;
    }
    (UPoly(quot).trimmed(), rem)
}

/// `(g, s, t)` with `s a + t b = g`.
fn up_ext_gcd(ring: &mut Ring, a: &UPoly, b: &UPoly) -> (UPoly, UPoly, UPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (UPoly::constant(RatFun::one()), UPoly(Vec::new()));
    let (mut t0, mut t1) = (UPoly(Vec::new()), UPoly::constant(RatFun::one()));
    while !r1.is_zero() {
        let (q, r) = up_divrem(ring, &r0, &r1);
        let qs = up_mul(ring, &q, &s1);
        let qt = up_mul(ring, &q, &t1);
        let s2 = up_sub(ring, &s0, &qs);
        let t2 = up_sub(ring, &t0, &qt);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

fn up_from_poly(p: &super::poly::Poly, xv: u32) -> UPoly {
    UPoly(p.coefficients_in(xv).into_iter().map(RatFun::from_poly).collect()).trimmed()
}

fn up_expr(ring: &Ring, p: &UPoly, x: &Expr) -> Expr {
    Expr::add_all(p.0.iter().enumerate().map(|(i, c)| ring.to_expr(c) * x.powi(i as i64)))
}

fn is_radical_free(e: &Expr) -> bool {
    let mut ok = true;
    e.visit(&mut |n| {
        if let Kind::Pow(_, q) = n.kind() {
            if !q.is_integer() {
                ok = false;
            }
        }
    });
    ok
}

fn ln_abs(e: Expr) -> Expr {
    Expr::call(Builtin::Ln, Expr::call(Builtin::Abs, e))
}

fn integrate_rational(ring: &mut Ring, r: &RatFun, x: &str, f: &Expr) -> Result<Expr, IntegrationError> {
    let xe = Expr::sym(x);
    let xv = ring.lookup(&xe).expect("x is a kernel");
    // Denominator: x-free part folds into the numerator field element.
    let mut const_den = RatFun { num: super::poly::Poly::one(), dmono: r.dmono.without(xv), dfac: Vec::new() };
    let mut xfactors: Vec<(UPoly, u32)> = Vec::new();
    let xdeg = r.dmono.degree(xv);
    if xdeg > 0 {
        xfactors.push((UPoly(vec![RatFun::zero(), RatFun::one()]), xdeg));
    }
    for &(id, e) in &r.dfac {
        let p = ring.factor_poly(id).clone();
        if p.degree(xv) == 0 {
            const_den.dfac.push((id, e));
        } else {
            xfactors.push((up_from_poly(&p, xv), e));
        }
    }
    let inv_const = ring.inv(&RatFun::from_poly(ring.den_poly(&const_den)));
    let num = up_scale(ring, &up_from_poly(&r.num, xv), &inv_const);
    if let Some((p, _)) = xfactors.iter().find(|(p, _)| p.deg() > 2) {
        let _ = p;
        return Err(unsupported(x, f, "denominator factor of degree above two"));
    }
    let mut den = UPoly::constant(RatFun::one());
    let mut powers = Vec::with_capacity(xfactors.len());
    for (p, e) in &xfactors {
        let pe = up_pow(ring, p, *e);
        den = up_mul(ring, &den, &pe);
        powers.push(pe);
    }
    let (quot, rem) = up_divrem(ring, &num, &den);
    let mut out: Vec<Expr> = Vec::new();
    for (i, c) in quot.0.iter().enumerate() {
        if !c.is_zero() {
            let k = Q::from_integer((i as i64 + 1).into());
            out.push(ring.to_expr(c) * xe.powi(i as i64 + 1) * Expr::num(k.recip()));
        }
    }
    if rem.is_zero() {
        return Ok(Expr::add_all(out));
    }
    // Partial fractions over the coprime prime-power factors.
    for (i, (p, e)) in xfactors.iter().enumerate() {
        let mut others = UPoly::constant(RatFun::one());
        for (j, pw) in powers.iter().enumerate() {
            if j != i {
                others = up_mul(ring, &others, pw);
            }
        }
        let (g, s, _) = up_ext_gcd(ring, &others, &powers[i]);
        if g.deg() != 0 || g.is_zero() {
            return Err(unsupported(x, f, "denominator factors are not coprime"));
        }
        let ginv = ring.inv(g.lc());
        let s = up_scale(ring, &s, &ginv);
        let rs = up_mul(ring, &rem, &s);
        let (_, mut part) = up_divrem(ring, &rs, &powers[i]);
        // p-adic digits: part = sum_j a_j p^j.
        for j in 0..*e {
            let (qd, a) = up_divrem(ring, &part, p);
            part = qd;
            if a.is_zero() {
                continue;
            }
            let m = e - j;
            out.push(match p.deg() {
                1 => linear_term(ring, &a, p, m, &xe),
                _ => quadratic_term(ring, &a, p, m, &xe, x, f)?,
            });
        }
    }
    Ok(Expr::add_all(out))
}

/// `∫ c / (alpha x + beta)^m`.
fn linear_term(ring: &Ring, a: &UPoly, p: &UPoly, m: u32, xe: &Expr) -> Expr {
    let c = ring.to_expr(&a.coeff(0));
    let alpha = ring.to_expr(&p.coeff(1));
    let pe = up_expr(ring, p, xe);
    if m == 1 {
        c / alpha * ln_abs(pe)
    } else {
        let k = Expr::int(1 - m as i64);
        c / (alpha * &k) * pe.powi(1 - m as i64)
    }
}

/// `∫ (u x + v) / (alpha x^2 + beta x + gamma)^m`.
fn quadratic_term(
    ring: &Ring,
    a: &UPoly,
    p: &UPoly,
    m: u32,
    xe: &Expr,
    x: &str,
    f: &Expr,
) -> Result<Expr, IntegrationError> {
    let u = ring.to_expr(&a.coeff(1));
    let v = ring.to_expr(&a.coeff(0));
    let alpha = ring.to_expr(&p.coeff(2));
    let beta = ring.to_expr(&p.coeff(1));
    let gamma = ring.to_expr(&p.coeff(0));
    let pe = up_expr(ring, p, xe);
    let two = Expr::int(2);
    let delta = normalize(&(Expr::int(4) * &alpha * &gamma - beta.powi(2)));
    // (u x + v) = u/(2 alpha) p' + (v - u beta/(2 alpha))
    let k1 = &u / (&two * &alpha);
    let k2 = &v - &u * &beta / (&two * &alpha);
    let log_part = if m == 1 { ln_abs(pe.clone()) } else { pe.powi(1 - m as i64) / Expr::int(1 - m as i64) };
    let lin = &two * &alpha * xe + &beta;
    let j1 = {
        let minus = normalize(&-&delta);
        let sq_minus = normalize(&minus.sqrt());
        let sq_plus = normalize(&delta.sqrt());
        if is_radical_free(&sq_minus) && !minus.is_zero_const() {
            Expr::one() / &sq_minus * ln_abs((&lin - &sq_minus) / (&lin + &sq_minus))
        } else if is_radical_free(&sq_plus) && !delta.is_zero_const() {
            &two / &sq_plus * Expr::call(Builtin::Atan, &lin / &sq_plus)
        } else if delta.is_zero_const() {
            return Err(unsupported(x, f, "repeated quadratic root"));
        } else {
            match sign_at_sample(&delta) {
                Some(true) => &two / &sq_plus * Expr::call(Builtin::Atan, &lin / &sq_plus),
                Some(false) => Expr::one() / &sq_minus * ln_abs((&lin - &sq_minus) / (&lin + &sq_minus)),
                None => return Err(unsupported(x, f, "discriminant sign undetermined")),
            }
        }
    };
    // J_m = (2 alpha x + beta)/((m-1) delta p^(m-1)) + 2(2m-3) alpha/((m-1) delta) J_(m-1)
    let mut jm = j1;
    for k in 2..=m as i64 {
        let first = &lin / (Expr::int(k - 1) * &delta * pe.powi(k - 1));
        let coef = Expr::int(2 * (2 * k - 3)) * &alpha / (Expr::int(k - 1) * &delta);
        jm = first + coef * jm;
    }
    Ok(k1 * log_part + k2 * jm)
}

fn sign_at_sample(e: &Expr) -> Option<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(e.structural_hash());
    for _ in 0..20 {
        let p = ZeroTest::sample_point(e, &mut rng);
        if let Ok(v) = evaluate(e, &p) {
            let x = v.to_f64();
            if x != 0.0 {
                return Some(x > 0.0);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Rational functions of sin x, cos x.

fn flip(f: &Expr, x: &Expr, sign_s: i64, sign_c: i64) -> Expr {
    f.map_leaves(&|e| match e.kind() {
        Kind::Call(Builtin::Sin, a) if a == x => Some(e * Expr::int(sign_s)),
        Kind::Call(Builtin::Cos, a) if a == x => Some(e * Expr::int(sign_c)),
        _ => None,
    })
}

fn substitute_trig(f: &Expr, x: &Expr, s: &Expr, c: &Expr) -> Expr {
    f.map_leaves(&|e| match e.kind() {
        Kind::Call(Builtin::Sin, a) if a == x => Some(s.clone()),
        Kind::Call(Builtin::Cos, a) if a == x => Some(c.clone()),
        _ => None,
    })
}

/// Bring an expression in `t` to a radical-free rational form, if possible.
fn rationalized(g: &Expr) -> Option<Expr> {
    let mut ring = Ring::new();
    let mut r = ring.convert(g);
    for v in ring.vars_of(&r) {
        if let Kernel::Radical { q: 2, .. } = ring.kernel(v) {
            r = ring.rationalize(&r, v)?;
        }
    }
    let out = ring.to_expr(&r);
    is_radical_free(&out).then_some(out)
}

fn integrate_trig(f: &Expr, x: &str, depth: u32) -> Result<Expr, IntegrationError> {
    let xe = Expr::sym(x);
    let t = Expr::sym(&format!("{x}__t"));
    let tname = format!("{x}__t");
    let (s, c) = (xe.sin(), xe.cos());
    let one = Expr::one();
    let odd_in_c = exact_zero(&(flip(f, &xe, 1, -1) + f)) == Exact::Zero;
    let odd_in_s = exact_zero(&(flip(f, &xe, -1, 1) + f)) == Exact::Zero;
    let even_pair = exact_zero(&(flip(f, &xe, -1, -1) - f)) == Exact::Zero;
    let root = |e: Expr| e.sqrt();
    // (s(t), c(t), dx/dt, t(x))
    let mut plans: Vec<(Expr, Expr, Expr, Expr)> = Vec::new();
    if odd_in_c {
        let ct = root(&one - t.powi(2));
        plans.push((t.clone(), ct.clone(), ct.recip(), s.clone()));
    }
    if odd_in_s {
        let st = root(&one - t.powi(2));
        plans.push((st.clone(), t.clone(), -st.recip(), c.clone()));
    }
    if even_pair {
        let k = root(&one + t.powi(2));
        plans.push((&t / &k, k.recip(), (&one + t.powi(2)).recip(), &s / &c));
    }
    let w = &one + t.powi(2);
    plans.push((
        Expr::int(2) * &t / &w,
        (&one - t.powi(2)) / &w,
        Expr::int(2) / &w,
        &s / (&one + &c),
    ));
    let mut last = None;
    for (st, ct, dxdt, back) in plans {
        let g = substitute_trig(f, &xe, &st, &ct) * dxdt;
        let Some(g) = rationalized(&g) else { continue };
        if g.free_symbols().contains(x) {
            continue;
        }
        match integrate(&g, &tname, depth + 1) {
            Ok(h) => return Ok(h.subst(&tname, &back)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| unsupported(x, f, "trigonometric form outside the substitution table")))
}

// ---------------------------------------------------------------------------
// Opaque jets.

fn replace_jet(f: &Expr, name: &str, x: &str, order: u32, by: &Expr) -> Expr {
    f.map_leaves(&|e| match e.kind() {
        Kind::Fun { name: n, arg, order: o } if &**n == name && &**arg == x && *o == order => Some(by.clone()),
        _ => None,
    })
}

fn integrate_jets(f: &Expr, x: &str, depth: u32) -> Result<Expr, IntegrationError> {
    let (name, _, top) = f
        .jets()
        .into_iter()
        .filter(|(_, arg, _)| &**arg == x)
        .max_by_key(|(_, _, o)| *o)
        .expect("caller found a jet");
    if top == 0 {
        return Err(unsupported(x, f, "undifferentiated opaque function of the integration variable"));
    }
    let y = Expr::sym("__jet_y");
    let z = Expr::sym("__jet_z");
    let fy = replace_jet(f, &name, x, top, &y);
    let a1 = normalize(&fy.diff("__jet_y"));
    if !ZeroTest::default().is_zero(&a1.diff("__jet_y")) {
        return Err(unsupported(x, f, "nonlinear in the highest jet"));
    }
    let a1z = replace_jet(&a1, &name, x, top - 1, &z);
    if a1z.depends_on(x) {
        return Err(unsupported(x, f, "jet coefficient depends on the integration variable"));
    }
    let g = integrate(&normalize(&a1z), "__jet_z", depth + 1)?;
    let part = replace_jet(&g.subst("__jet_z", &Expr::fun(&name, x, top - 1)), &name, x, top, &Expr::zero());
    let rest = normalize(&(f - &part.diff(x)));
    if rest.is_zero_const() {
        return Ok(part);
    }
    let still_top = rest.jets().into_iter().any(|(n, a, o)| n == name && &*a == x && o >= top);
    if still_top {
        return Err(unsupported(x, &rest, "jet residual did not reduce"));
    }
    Ok(part + integrate(&rest, x, depth + 1)?)
}
