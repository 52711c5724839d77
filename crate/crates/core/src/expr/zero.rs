use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::evaluate_scaled;
use super::ratfun::{exact_zero, Exact};
use super::{Builtin, Expr, Kind, Name, Point, Value, Q};

/// Configuration of the identically-zero test.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTest {
    /// Sample points required when no exact decision is available.
    pub samples: usize,
    /// Relative tolerance against the largest summand.
    pub tolerance: f64,
    pub seed: u64,
    /// Attempts allowed for points that hit a pole or leave the domain.
    pub max_retries: usize,
}

impl Default for ZeroTest {
    fn default() -> ZeroTest {
        ZeroTest { samples: 20, tolerance: 1e-9, seed: 0x1b_5eed, max_retries: 200 }
    }
}

/// Point where an expression was found nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Point,
    pub value: Value,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "value {} at {}", self.value, self.point)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroVerdict {
    /// `exact` when proved by the normal form rather than by sampling.
    Zero { exact: bool },
    NonZero { witness: Option<Witness> },
    Undecided { reason: String },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero { .. })
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, ZeroVerdict::NonZero { .. })
    }
}

/// Symbols appearing inside trigonometric arguments.
fn angle_symbols(e: &Expr) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    e.visit(&mut |n| {
        if let Kind::Call(Builtin::Sin | Builtin::Cos | Builtin::Tan, a) = n.kind() {
            out.extend(a.free_symbols());
        }
    });
    out
}

fn random_q(rng: &mut ChaCha8Rng, lo: (i64, i64), hi: (i64, i64)) -> Q {
    let den: i64 = rng.gen_range(1..=24);
    let lo_n = (lo.0 * den + lo.1 - 1) / lo.1;
    let hi_n = hi.0 * den / hi.1;
    let n = rng.gen_range(lo_n.max(1)..=hi_n.max(lo_n.max(1)));
    Q::new(BigInt::from(n), BigInt::from(den))
}

impl ZeroTest {
    pub fn with_seed(mut self, seed: u64) -> ZeroTest {
        self.seed = seed;
        self
    }

    /// Deterministic random point for `e`, drawn from the stream `rng`.
    pub(crate) fn sample_point(e: &Expr, rng: &mut ChaCha8Rng) -> Point {
        let angles = angle_symbols(e);
        let mut p = Point::new();
        for s in e.free_symbols() {
            if &*s == "pi" {
                continue;
            }
            if angles.contains(&s) {
                let t = random_q(rng, (1, 10), (3, 1));
                p = p.half_angle(&s, t);
            } else {
                let v = random_q(rng, (1, 4), (3, 1));
                p = p.exact(&s, v);
            }
        }
        for (name, _arg, order) in e.jets() {
            let mut v = random_q(rng, (1, 4), (3, 1));
            if rng.gen_bool(0.5) {
                v = -v;
            }
            p.jets.insert((name, order), Value::Exact(v));
        }
        p
    }

    fn rng_for(&self, e: &Expr) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ e.structural_hash())
    }

    /// Search for a point where `e` is clearly nonzero.
    fn sample(&self, e: &Expr, need: usize) -> Result<Option<Witness>, String> {
        let mut rng = self.rng_for(e);
        let mut good = 0;
        let mut failures = 0;
        while good < need {
            let p = ZeroTest::sample_point(e, &mut rng);
            match evaluate_scaled(e, &p) {
                Ok((v, scale)) => {
                    good += 1;
                    let nonzero = match &v {
                        Value::Exact(q) => !q.is_zero(),
                        Value::Float(x) => {
                            !x.is_finite() || x.abs() > self.tolerance * (1.0 + scale)
                        }
                    };
                    if nonzero {
                        return Ok(Some(Witness { point: p, value: v }));
                    }
                }
                Err(err) => {
                    failures += 1;
                    if failures > self.max_retries {
                        return Err(format!("no admissible sample point after {failures} attempts: {err}"));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn check(&self, e: &Expr) -> ZeroVerdict {
        match exact_zero(e) {
            Exact::Zero => ZeroVerdict::Zero { exact: true },
            Exact::NonZero => {
                ZeroVerdict::NonZero { witness: self.sample(e, self.samples).ok().flatten() }
            }
            Exact::Unknown => match self.sample(e, self.samples) {
                Ok(Some(w)) => ZeroVerdict::NonZero { witness: Some(w) },
                Ok(None) => ZeroVerdict::Zero { exact: false },
                Err(reason) => ZeroVerdict::Undecided { reason },
            },
        }
    }

    pub fn is_zero(&self, e: &Expr) -> bool {
        self.check(e).is_zero()
    }

    /// Sampling only, skipping the normal form (for cross-checks).
    pub fn check_by_sampling(&self, e: &Expr) -> ZeroVerdict {
        if e.is_zero_const() {
            return ZeroVerdict::Zero { exact: true };
        }
        match self.sample(e, self.samples) {
            Ok(Some(w)) => ZeroVerdict::NonZero { witness: Some(w) },
            Ok(None) => ZeroVerdict::Zero { exact: false },
            Err(reason) => ZeroVerdict::Undecided { reason },
        }
    }
}
