use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Builtin, Expr, Kind, Name, Q};

/// Numeric value: exact while every leaf is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q_to_f64(q),
            Value::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn abs(&self) -> f64 {
        self.to_f64().abs()
    }

    fn add(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Float(self.to_f64() + o.to_f64()),
        }
    }

    fn mul(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Float(self.to_f64() * o.to_f64()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Value::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Value::Float(x) => write!(f, "{x:e}"),
        }
    }
}

pub(crate) fn q_to_f64(q: &Q) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale to a 60-bit integer quotient, then reapply the power of two.
    let n = q.numer().abs();
    let d = q.denom();
    let k = n.bits() as i64 - d.bits() as i64 - 60;
    let int = if k > 0 { &n / (d << k as usize) } else { (&n << (-k) as usize) / d };
    let mag = int.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(k.clamp(-2000, 2000) as i32);
    if q.is_negative() {
        -mag
    } else {
        mag
    }
}

/// How a symbol is bound at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Value(Value),
    /// Angle `q = 2 atan(t)`; `sin q`, `cos q` evaluate exactly.
    HalfAngle(Q),
}

/// Assignment of every free symbol and opaque jet.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point {
    pub symbols: BTreeMap<Name, Binding>,
    pub jets: BTreeMap<(Name, u32), Value>,
}

impl Point {
    pub fn new() -> Point {
        Point::default()
    }

    pub fn exact(mut self, name: &str, q: Q) -> Point {
        self.symbols.insert(name.into(), Binding::Value(Value::Exact(q)));
        self
    }

    pub fn float(mut self, name: &str, x: f64) -> Point {
        self.symbols.insert(name.into(), Binding::Value(Value::Float(x)));
        self
    }

    pub fn half_angle(mut self, name: &str, t: Q) -> Point {
        self.symbols.insert(name.into(), Binding::HalfAngle(t));
        self
    }

    pub fn jet(mut self, f: &str, order: u32, v: Value) -> Point {
        self.jets.insert((f.into(), order), v);
        self
    }

    /// Coordinate value as a float.
    pub fn coordinate(&self, name: &str) -> Option<f64> {
        match self.symbols.get(name)? {
            Binding::Value(v) => Some(v.to_f64()),
            Binding::HalfAngle(t) => Some(2.0 * q_to_f64(t).atan()),
        }
    }

    /// Copy of the point with one coordinate shifted (float), for finite differences.
    pub fn shifted(&self, name: &str, h: f64) -> Point {
        let mut p = self.clone();
        let x = self.coordinate(name).unwrap_or(0.0) + h;
        p.symbols.insert(name.into(), Binding::Value(Value::Float(x)));
        p
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, b) in &self.symbols {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            match b {
                Binding::Value(v) => write!(f, "{k}={v}")?,
                Binding::HalfAngle(t) => write!(f, "{k}=2*atan({})", Value::Exact(t.clone()))?,
            }
        }
        for ((name, k), v) in &self.jets {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{name}^({k})={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol `{0}` has no value at this point")]
    Unbound(String),
    #[error("division by zero")]
    Pole,
    #[error("{0} outside its real domain")]
    Domain(&'static str),
}

/// Evaluate at a point; exact when every leaf is rational.
pub fn evaluate(e: &Expr, p: &Point) -> Result<Value, EvalError> {
    let mut memo = HashMap::new();
    Evaluator { p, memo: &mut memo }.eval(e)
}

/// Evaluate and also return the largest magnitude among top-level summands.
pub(crate) fn evaluate_scaled(e: &Expr, p: &Point) -> Result<(Value, f64), EvalError> {
    let mut memo = HashMap::new();
    let mut ev = Evaluator { p, memo: &mut memo };
    match e.kind() {
        Kind::Add(ts) => {
            let mut acc = Value::Exact(Q::zero());
            let mut scale = 0f64;
            for t in ts {
                let v = ev.eval(t)?;
                scale = scale.max(v.abs());
                acc = acc.add(&v);
            }
            Ok((acc, scale))
        }
        _ => {
            let v = ev.eval(e)?;
            let s = v.abs();
            Ok((v, s))
        }
    }
}

struct Evaluator<'a> {
    p: &'a Point,
    memo: &'a mut HashMap<usize, Value>,
}

fn trig_exact(t: &Q, n: &BigInt) -> Option<(Q, Q)> {
    // (c + i s) for angle n * 2 atan(t), by repeated squaring of the unit complex number.
    let d = Q::one() + t * t;
    let c1 = (Q::one() - t * t) / &d;
    let s1 = (Q::from_integer(2.into()) * t) / &d;
    let mut k = n.abs().to_u32()?;
    if k > 64 {
        return None;
    }
    let (mut rc, mut rs) = (Q::one(), Q::zero());
    let (mut bc, mut bs) = (c1, s1);
    while k > 0 {
        if k & 1 == 1 {
            let nc = &rc * &bc - &rs * &bs;
            let ns = &rc * &bs + &rs * &bc;
            rc = nc;
            rs = ns;
        }
        let nc = &bc * &bc - &bs * &bs;
        let ns = Q::from_integer(2.into()) * &bc * &bs;
        bc = nc;
        bs = ns;
        k >>= 1;
    }
    if n.is_negative() {
        rs = -rs;
    }
    Some((rc, rs))
}

impl Evaluator<'_> {
    fn eval(&mut self, e: &Expr) -> Result<Value, EvalError> {
        if let Some(v) = self.memo.get(&e.ptr_id()) {
            return Ok(v.clone());
        }
        let v = self.eval_inner(e)?;
        self.memo.insert(e.ptr_id(), v.clone());
        Ok(v)
    }

    /// Exact (cos, sin) of a trig argument when it is an integer multiple of a half-angle symbol.
    fn exact_angle(&self, a: &Expr) -> Option<(Q, Q)> {
        let (c, rest) = a.split_coeff();
        if !c.is_integer() {
            return None;
        }
        let Kind::Sym(s) = rest.kind() else { return None };
        match self.p.symbols.get(s)? {
            Binding::HalfAngle(t) => trig_exact(t, c.numer()),
            Binding::Value(_) => None,
        }
    }

    fn eval_inner(&mut self, e: &Expr) -> Result<Value, EvalError> {
        Ok(match e.kind() {
            Kind::Num(q) => Value::Exact(q.clone()),
            Kind::Sym(s) => match self.p.symbols.get(s) {
                Some(Binding::Value(v)) => v.clone(),
                Some(Binding::HalfAngle(t)) => Value::Float(2.0 * q_to_f64(t).atan()),
                None if &**s == "pi" => Value::Float(std::f64::consts::PI),
                None => return Err(EvalError::Unbound(s.to_string())),
            },
            Kind::Fun { name, order, .. } => match self.p.jets.get(&(name.clone(), *order)) {
                Some(v) => v.clone(),
                None => return Err(EvalError::Unbound(format!("{name}^({order})"))),
            },
            Kind::Add(ts) => {
                let mut acc = Value::Exact(Q::zero());
                for t in ts {
                    acc = acc.add(&self.eval(t)?);
                }
                acc
            }
            Kind::Mul(fs) => {
                let mut acc = Value::Exact(Q::one());
                for f in fs {
                    acc = acc.mul(&self.eval(f)?);
                }
                acc
            }
            Kind::Pow(b, x) => {
                let bv = self.eval(b)?;
                pow_value(&bv, x)?
            }
            Kind::Call(f, a) => {
                if matches!(f, Builtin::Sin | Builtin::Cos | Builtin::Tan) {
                    if let Some((c, s)) = self.exact_angle(a) {
                        return Ok(Value::Exact(match f {
                            Builtin::Sin => s,
                            Builtin::Cos => c,
                            _ => {
                                if c.is_zero() {
                                    return Err(EvalError::Pole);
                                }
                                s / c
                            }
                        }));
                    }
                }
                let av = self.eval(a)?;
                call_value(*f, &av)?
            }
        })
    }
}

fn pow_value(b: &Value, x: &Q) -> Result<Value, EvalError> {
    if x.is_integer() {
        if let Value::Exact(q) = b {
            if q.is_zero() && x.is_negative() {
                return Err(EvalError::Pole);
            }
            let k = x.numer().to_i32().ok_or(EvalError::Domain("exponent"))?;
            return Ok(Value::Exact(num_traits::pow::Pow::pow(q, k)));
        }
        let f = b.to_f64();
        if f == 0.0 && x.is_negative() {
            return Err(EvalError::Pole);
        }
        return Ok(Value::Float(f.powi(x.numer().to_i32().unwrap_or(i32::MAX))));
    }
    let f = b.to_f64();
    if f <= 0.0 {
        if f == 0.0 && !x.is_negative() {
            return Ok(Value::Exact(Q::zero()));
        }
        return Err(EvalError::Domain("fractional power"));
    }
    if let Value::Exact(q) = b {
        let root = Expr::num(q.clone()).pow(x);
        if let Some(v) = root.as_num() {
            return Ok(Value::Exact(v.clone()));
        }
    }
    Ok(Value::Float(f.powf(q_to_f64(x))))
}

fn call_value(f: Builtin, a: &Value) -> Result<Value, EvalError> {
    let zero = matches!(a, Value::Exact(q) if q.is_zero());
    Ok(match f {
        Builtin::Sin if zero => Value::Exact(Q::zero()),
        Builtin::Cos if zero => Value::Exact(Q::one()),
        Builtin::Tan if zero => Value::Exact(Q::zero()),
        Builtin::Atan if zero => Value::Exact(Q::zero()),
        Builtin::Exp if zero => Value::Exact(Q::one()),
        Builtin::Sin => Value::Float(a.to_f64().sin()),
        Builtin::Cos => Value::Float(a.to_f64().cos()),
        Builtin::Tan => {
            let c = a.to_f64().cos();
            if c == 0.0 {
                return Err(EvalError::Pole);
            }
            Value::Float(a.to_f64().sin() / c)
        }
        Builtin::Atan => Value::Float(a.to_f64().atan()),
        Builtin::Exp => Value::Float(a.to_f64().exp()),
        Builtin::Ln => {
            if a.to_f64() <= 0.0 {
                return Err(EvalError::Domain("ln"));
            }
            match a {
                Value::Exact(q) if q.is_one() => Value::Exact(Q::zero()),
                _ => Value::Float(a.to_f64().ln()),
            }
        }
        Builtin::Abs => match a {
            Value::Exact(q) => Value::Exact(q.abs()),
            Value::Float(x) => Value::Float(x.abs()),
        },
    })
}
