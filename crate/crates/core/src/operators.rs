//! Linear differential operators on scalar functions with symbolic
//! coefficients, Laplace-Beltrami quantization and exact commutators.
//!
//! Quantization convention: `K̂ = ħ²/2 (∇_a K^{ab} ∇_b - E_K) + W`, i.e. the
//! Laplacian enters with a positive sign. With the curvature sign fixed in
//! [`crate::geometry`] this is the choice under which the correction
//! equation `∇E_K - K∇E + ⅓δC_K = 0` is equivalent to `[Ĥ_E, K̂_{E_K}] = 0`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::corrections::{commutation_residual, CorrectionError, CorrectionPair};
use crate::expr::{Expr, Name, ZeroTest};
use crate::geometry::Chart;
use crate::integrability::{poisson_commutes, QuadraticObservable};
use crate::verdict::Verdict;
use crate::HBAR;

/// Highest derivative order an operator may carry.
pub const MAX_ORDER: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("operator order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderOverflow(usize),
    #[error("operators act on different coordinates")]
    ChartMismatch,
    #[error(transparent)]
    Correction(#[from] CorrectionError),
}

/// Derivative multi-index: `α[i]` derivatives in the `i`-th coordinate.
pub type MultiIndex = Vec<u8>;

fn order_of(a: &[u8]) -> usize {
    a.iter().map(|&k| k as usize).sum()
}

/// `Σ_α c_α ∂^α`
#[derive(Clone, PartialEq)]
pub struct DiffOperator {
    coords: Vec<Name>,
    terms: BTreeMap<MultiIndex, Expr>,
}

impl DiffOperator {
    pub fn zero(coords: &[Name]) -> DiffOperator {
        DiffOperator { coords: coords.to_vec(), terms: BTreeMap::new() }
    }

    /// Multiplication by `f`.
    pub fn multiplication(coords: &[Name], f: Expr) -> DiffOperator {
        let mut op = DiffOperator::zero(coords);
        op.insert(vec![0; coords.len()], f);
        op
    }

    /// `∂_i`
    pub fn partial(coords: &[Name], i: usize) -> DiffOperator {
        let mut a = vec![0; coords.len()];
        a[i] = 1;
        let mut op = DiffOperator::zero(coords);
        op.insert(a, Expr::one());
        op
    }

    fn from_terms(coords: &[Name], terms: BTreeMap<MultiIndex, Vec<Expr>>) -> DiffOperator {
        let normal: Vec<(MultiIndex, Expr)> =
            terms.into_par_iter().map(|(a, ts)| (a, Expr::add_all(ts).normal())).collect();
        let mut op = DiffOperator::zero(coords);
        for (a, c) in normal {
            op.insert(a, c);
        }
        op
    }

    fn insert(&mut self, a: MultiIndex, c: Expr) {
        if c.is_zero_const() {
            self.terms.remove(&a);
        } else {
            self.terms.insert(a, c);
        }
    }

    pub fn coords(&self) -> &[Name] {
        &self.coords
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: &[u8]) -> Expr {
        self.terms.get(a).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn order(&self) -> usize {
        self.terms.keys().map(|a| order_of(a)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, o: &DiffOperator) -> Result<(), OperatorError> {
        if self.coords == o.coords {
            Ok(())
        } else {
            Err(OperatorError::ChartMismatch)
        }
    }

    fn combine(&self, o: &DiffOperator, sign: i64) -> Result<DiffOperator, OperatorError> {
        self.check_same(o)?;
        let mut terms: BTreeMap<MultiIndex, Vec<Expr>> = BTreeMap::new();
        for (a, c) in &self.terms {
            terms.entry(a.clone()).or_default().push(c.clone());
        }
        for (a, c) in &o.terms {
            terms.entry(a.clone()).or_default().push(Expr::int(sign) * c);
        }
        Ok(DiffOperator::from_terms(&self.coords, terms))
    }

    pub fn add(&self, o: &DiffOperator) -> Result<DiffOperator, OperatorError> {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &DiffOperator) -> Result<DiffOperator, OperatorError> {
        self.combine(o, -1)
    }

    pub fn scale(&self, f: &Expr) -> DiffOperator {
        let terms = self.terms.iter().map(|(a, c)| (a.clone(), vec![f * c])).collect();
        DiffOperator::from_terms(&self.coords, terms)
    }

    /// Coefficients with derivatives of total order `k` only.
    pub fn homogeneous_part(&self, k: usize) -> DiffOperator {
        let terms = self.terms.iter().filter(|(a, _)| order_of(a) == k).map(|(a, c)| (a.clone(), c.clone())).collect();
        DiffOperator { coords: self.coords.clone(), terms }
    }

    fn derive(&self, f: &Expr, a: &[u8]) -> Expr {
        let mut out = f.clone();
        for (i, &k) in a.iter().enumerate() {
            for _ in 0..k {
                out = out.diff(&self.coords[i]);
            }
        }
        out
    }

    /// The operator applied to `f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::add_all(self.terms.iter().map(|(a, c)| c * self.derive(f, a)).collect::<Vec<_>>()).normal()
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (a, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, &k) in a.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·∂{}", self.coords[i])?,
                    _ => write!(f, "·∂{}^{k}", self.coords[i])?,
                }
            }
        }
        Ok(())
    }
}

/// Multi-indices `γ ≤ α` with the product of binomial coefficients.
fn sub_indices(a: &[u8]) -> Vec<(MultiIndex, i64)> {
    let mut out = vec![(Vec::new(), 1i64)];
    for &k in a {
        out = out
            .into_iter()
            .flat_map(|(g, w)| {
                (0..=k).map(move |j| {
                    let mut g = g.clone();
                    g.push(j);
                    (g, w * binomial(k, j))
                })
            })
            .collect();
    }
    out
}

fn binomial(n: u8, k: u8) -> i64 {
    (0..k as i64).fold(1, |acc, i| acc * (n as i64 - i) / (i + 1))
}

/// Terms of `A ∘ B` grouped by multi-index, unnormalized.
fn product_terms(a: &DiffOperator, b: &DiffOperator, sign: i64, out: &mut BTreeMap<MultiIndex, Vec<Expr>>) {
    let mut jets: BTreeMap<(MultiIndex, MultiIndex), Expr> = BTreeMap::new();
    for (alpha, ca) in &a.terms {
        for (gamma, w) in sub_indices(alpha) {
            let rest: MultiIndex = alpha.iter().zip(&gamma).map(|(x, y)| x - y).collect();
            for (beta, cb) in &b.terms {
                let d = jets.entry((gamma.clone(), beta.clone())).or_insert_with(|| b.derive(cb, &gamma).normal());
                if d.is_zero_const() {
                    continue;
                }
                let idx: MultiIndex = rest.iter().zip(beta).map(|(x, y)| x + y).collect();
                out.entry(idx).or_default().push(Expr::int(sign * w) * ca * &*d);
            }
        }
    }
}

/// `A ∘ B` by the Leibniz rule.
pub fn compose(a: &DiffOperator, b: &DiffOperator) -> Result<DiffOperator, OperatorError> {
    a.check_same(b)?;
    let order = a.order() + b.order();
    if order > MAX_ORDER {
        return Err(OperatorError::OrderOverflow(order));
    }
    let mut terms = BTreeMap::new();
    product_terms(a, b, 1, &mut terms);
    Ok(DiffOperator::from_terms(&a.coords, terms))
}

/// `[A, B] = A∘B - B∘A`
pub fn commutator(a: &DiffOperator, b: &DiffOperator) -> Result<DiffOperator, OperatorError> {
    a.check_same(b)?;
    let order = a.order() + b.order();
    if order > MAX_ORDER {
        return Err(OperatorError::OrderOverflow(order));
    }
    let mut terms = BTreeMap::new();
    product_terms(a, b, 1, &mut terms);
    product_terms(b, a, -1, &mut terms);
    Ok(DiffOperator::from_terms(&a.coords, terms))
}

/// `Δf = |g|^{-1/2} ∂_a(|g|^{1/2} g^{ab} ∂_b f)`
pub fn laplace_beltrami(chart: &Chart) -> DiffOperator {
    weighted_laplacian(chart, chart.inverse_metric().components().to_vec())
}

/// `∇_a K^{ab} ∇_b` in divergence form, with `∂_a ln|g|^{1/2} = -½ ∂_a ln|det g^{-1}|`.
fn weighted_laplacian(chart: &Chart, k: Vec<Expr>) -> DiffOperator {
    let n = chart.dim();
    let coords = chart.coords();
    let det = chart.inverse_determinant();
    let dlog: Vec<Expr> = coords.iter().map(|q| (det.diff(q) / det * Expr::rational(-1, 2)).normal()).collect();
    let mut terms: BTreeMap<MultiIndex, Vec<Expr>> = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            let kab = &k[a * n + b];
            if kab.is_zero_const() {
                continue;
            }
            let mut second = vec![0u8; n];
            second[a] += 1;
            second[b] += 1;
            terms.entry(second).or_default().push(kab.clone());
            let mut first = vec![0u8; n];
            first[b] = 1;
            let e = terms.entry(first).or_default();
            e.push(kab.diff(&coords[a]));
            e.push(kab * &dlog[a]);
        }
    }
    DiffOperator::from_terms(coords, terms)
}

/// `K̂_{E_K} = ħ²/2 (∇_a K^{ab} ∇_b - E_K) + W` with `W` the classical potential of `k`.
pub fn lb_quantize(chart: &Chart, k: &QuadraticObservable, e_k: &Expr) -> DiffOperator {
    let half = Expr::sym(HBAR).powi(2) * Expr::rational(1, 2);
    let lap = weighted_laplacian(chart, k.tensor().components().to_vec());
    let mut terms: BTreeMap<MultiIndex, Vec<Expr>> =
        lap.terms.into_iter().map(|(a, c)| (a, vec![&half * c])).collect();
    terms
        .entry(vec![0; chart.dim()])
        .or_default()
        .extend([-(&half * e_k), k.potential().clone()]);
    DiffOperator::from_terms(chart.coords(), terms)
}

/// `Δ - (N-2)/(4(N-1)) Sc` written with this crate's curvature sign, so that
/// it is the Yamabe operator: `Δ + (N-2)/(4(N-1)) Sc`.
pub fn conformal_laplacian(chart: &Chart) -> DiffOperator {
    let n = chart.dim() as i64;
    let mut terms: BTreeMap<MultiIndex, Vec<Expr>> =
        laplace_beltrami(chart).terms.into_iter().map(|(a, c)| (a, vec![c])).collect();
    let sc = chart.scalar_curvature() * Expr::rational(n - 2, 4 * (n - 1));
    terms.entry(vec![0; chart.dim()]).or_default().push(sc);
    DiffOperator::from_terms(chart.coords(), terms)
}

/// Commutator verdict with the highest derivative order at which it fails.
#[derive(Clone, Debug, PartialEq)]
pub struct Commutation {
    pub verdict: Verdict,
    pub order: Option<usize>,
    pub residual: DiffOperator,
}

impl Commutation {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Tests `[A, B] = 0` coefficient by coefficient, highest order first.
pub fn commutator_is_zero(a: &DiffOperator, b: &DiffOperator, zt: &ZeroTest) -> Result<Commutation, OperatorError> {
    let residual = commutator(a, b)?;
    let mut undecided = None;
    for k in (0..=residual.order()).rev() {
        let part = residual.homogeneous_part(k);
        let checks: Vec<(MultiIndex, Expr, _)> =
            part.terms.par_iter().map(|(a, c)| (a.clone(), c.clone(), zt.check(c))).collect();
        let v = Verdict::from_components(
            checks.into_iter().map(|(a, c, z)| (a.into_iter().map(usize::from).collect(), c, z)),
        );
        match v {
            Verdict::Holds => {}
            Verdict::Fails(f) => {
                return Ok(Commutation { verdict: Verdict::Fails(f), order: Some(k), residual });
            }
            u => {
                undecided.get_or_insert((u, k));
            }
        }
    }
    Ok(match undecided {
        Some((v, k)) => Commutation { verdict: v, order: Some(k), residual },
        None => Commutation { verdict: Verdict::Holds, order: None, residual },
    })
}

/// Side-by-side verdicts of the tensorial pipeline and the operator commutator.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub tensorial: Verdict,
    pub operator: Commutation,
}

impl CrossCheck {
    pub fn agree(&self) -> bool {
        self.tensorial.holds() == self.operator.holds()
    }
}

/// Runs `{H, K} = 0` plus the full commutation residual, and the direct
/// commutator `[Ĥ_E, K̂_{E_K}]`.
pub fn theorem1_cross_check(
    chart: &Chart,
    h: &QuadraticObservable,
    k: &QuadraticObservable,
    pair: &CorrectionPair,
) -> Result<CrossCheck, OperatorError> {
    let classical = poisson_commutes(chart, h, k).map_err(CorrectionError::from)?;
    let tensorial = match classical {
        Verdict::Holds => commutation_residual(chart, h, k, pair)?.check_zero(chart.zero_test()),
        other => other,
    };
    let hh = lb_quantize(chart, h, &pair.e);
    let kk = lb_quantize(chart, k, &pair.e_k);
    let operator = commutator_is_zero(&hh, &kk, chart.zero_test())?;
    Ok(CrossCheck { tensorial, operator })
}
