//! Quantum corrections: the obstruction one-form `K∇E - ⅓δC_K`, its
//! closedness, potential recovery, gauge freedom, simultaneous corrections
//! for several integrals, Stäckel systems and the conformal obstruction.

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{antiderivative, evaluate, Expr, IntegrationError, Name, Point, Value, ZeroTest, Q};
use crate::geometry::{
    contract_vector, covariant_derivative, exterior_derivative, gradient, indices, lower_index, Chart,
    GeometryError, SymTensor, Variance,
};
use crate::integrability::{
    ck_divergence_flat, momentum, pre_robertson_condition, robertson_condition, IntegrabilityError,
    QuadraticObservable, StackelSystem,
};
use crate::verdict::{Failure, Verdict};
use crate::HBAR;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrectionError {
    #[error("the obstruction one-form is not closed: {0}")]
    NotClosed(Verdict),
    #[error("closedness could not be decided: {0}")]
    Undecided(Verdict),
    #[error("potential recovery along `{coord}` failed: {source}")]
    Integration {
        coord: String,
        #[source]
        source: IntegrationError,
    },
    #[error("recovered potential does not reproduce the one-form: {0}")]
    Verification(Verdict),
    #[error("the full commutation residual does not vanish: {0}")]
    Residual(Verdict),
    #[error("pre-Robertson condition fails: {0}")]
    PreRobertson(Verdict),
    #[error("family constants must be plain symbols not used as coordinates: `{0}`")]
    BadConstant(String),
    #[error(transparent)]
    Integrability(#[from] IntegrabilityError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Corrections `E` of the Hamiltonian and `E_K` of the integral.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionPair {
    pub e: Expr,
    pub e_k: Expr,
}

impl CorrectionPair {
    pub fn new(e: Expr, e_k: Expr) -> CorrectionPair {
        CorrectionPair { e: e.normal(), e_k: e_k.normal() }
    }

    pub fn zero() -> CorrectionPair {
        CorrectionPair { e: Expr::zero(), e_k: Expr::zero() }
    }
}

/// A correction pair depending linearly on named constants.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionFamily {
    pub base: CorrectionPair,
    pub constants: Vec<Name>,
}

impl CorrectionFamily {
    pub fn new(e: Expr, constants: &[&str]) -> CorrectionFamily {
        CorrectionFamily {
            base: CorrectionPair::new(e, Expr::zero()),
            constants: constants.iter().map(|c| Name::from(*c)).collect(),
        }
    }

    /// Member with the given constant values.
    pub fn member(&self, values: &[(Name, Expr)]) -> CorrectionPair {
        let map = values.iter().cloned().collect();
        CorrectionPair::new(self.base.e.subst_all(&map), self.base.e_k.subst_all(&map))
    }
}

impl From<Expr> for CorrectionFamily {
    fn from(e: Expr) -> CorrectionFamily {
        CorrectionFamily { base: CorrectionPair::new(e, Expr::zero()), constants: Vec::new() }
    }
}

/// `(K∇E)^♭`
fn k_grad(chart: &Chart, k: &QuadraticObservable, f: &Expr) -> Result<SymTensor, CorrectionError> {
    let v = contract_vector(k.tensor(), &gradient(chart, f))?;
    Ok(lower_index(chart, &v, 0)?)
}

/// `ω = (K∇E - ⅓ δC_K)^♭`; a solution `E_K` of the correction equation has `dE_K = ω`.
pub fn obstruction_one_form(chart: &Chart, k: &QuadraticObservable, e: &Expr) -> Result<SymTensor, CorrectionError> {
    let kde = k_grad(chart, k, e)?;
    let dck = ck_divergence_flat(chart, k)?;
    Ok(kde.zip_with(&dck, |a, b| (a - b * Expr::rational(1, 3)).normal())?)
}

/// `d ω = 0` for the obstruction one-form.
pub fn compatibility_check(chart: &Chart, k: &QuadraticObservable, e: &Expr) -> Result<Verdict, CorrectionError> {
    let w = obstruction_one_form(chart, k, e)?;
    Ok(exterior_derivative(chart, &w)?.check_zero(chart.zero_test()))
}

/// `F` with `dF = ω`, integrating coordinate by coordinate in chart order
/// with zero constants of integration.
pub fn solve_potential(chart: &Chart, omega: &SymTensor) -> Result<Expr, CorrectionError> {
    if omega.variance() != [Variance::Down] {
        return Err(GeometryError::VarianceMismatch {
            expected: vec![Variance::Down],
            found: omega.variance().to_vec(),
        }
        .into());
    }
    let mut f = Expr::zero();
    for (i, q) in chart.coords().iter().enumerate() {
        let rest = (omega.get(&[i]) - f.diff(q)).normal();
        if rest.is_zero_const() {
            continue;
        }
        let g = antiderivative(&rest, q)
            .map_err(|source| CorrectionError::Integration { coord: q.to_string(), source })?;
        f = (f + g).normal();
    }
    let check = gradient(chart, &f).sub(omega)?.check_zero(chart.zero_test());
    match check {
        Verdict::Holds => Ok(f),
        other => Err(CorrectionError::Verification(other)),
    }
}

fn require_closed(v: Verdict) -> Result<(), CorrectionError> {
    match v {
        Verdict::Holds => Ok(()),
        f @ Verdict::Fails(_) => Err(CorrectionError::NotClosed(f)),
        u => Err(CorrectionError::Undecided(u)),
    }
}

/// Residual of the full commutation condition, as a one-form:
/// `ħ²/6 δC_K + ħ²/2 (∇E_K - K∇E) + K∇V - ∇V_K`.
pub fn commutation_residual(
    chart: &Chart,
    h: &QuadraticObservable,
    k: &QuadraticObservable,
    pair: &CorrectionPair,
) -> Result<SymTensor, CorrectionError> {
    let hb2 = Expr::sym(HBAR).powi(2);
    let dck = ck_divergence_flat(chart, k)?;
    let dek = gradient(chart, &pair.e_k);
    let kde = k_grad(chart, k, &pair.e)?;
    let kdv = k_grad(chart, k, h.potential())?;
    let dvk = gradient(chart, k.potential());
    let n = chart.dim();
    let comps = (0..n)
        .map(|a| {
            let quantum = dck.get(&[a]) * Expr::rational(1, 6) + (dek.get(&[a]) - kde.get(&[a])) * Expr::rational(1, 2);
            (&hb2 * quantum + kdv.get(&[a]) - dvk.get(&[a])).normal()
        })
        .collect();
    Ok(SymTensor::from_vec(Variance::Down, comps))
}

/// `E_K` for the given `E`, checked against the full commutation residual.
pub fn solve_correction_pair(
    chart: &Chart,
    h: &QuadraticObservable,
    k: &QuadraticObservable,
    e: &Expr,
) -> Result<CorrectionPair, CorrectionError> {
    let w = obstruction_one_form(chart, k, e)?;
    require_closed(exterior_derivative(chart, &w)?.check_zero(chart.zero_test()))?;
    let e_k = solve_potential(chart, &w)?;
    let pair = CorrectionPair::new(e.clone(), e_k);
    match commutation_residual(chart, h, k, &pair)?.check_zero(chart.zero_test()) {
        Verdict::Holds => Ok(pair),
        other => Err(CorrectionError::Residual(other)),
    }
}

/// Whether `pair_n - pair_0` solves the homogeneous equation `K∇E_o = ∇E_{Ko}`.
pub fn gauge_space_check(
    chart: &Chart,
    k: &QuadraticObservable,
    pair0: &CorrectionPair,
    pair_n: &CorrectionPair,
) -> Result<Verdict, CorrectionError> {
    let eo = (&pair_n.e - &pair0.e).normal();
    let eko = (&pair_n.e_k - &pair0.e_k).normal();
    let lhs = k_grad(chart, k, &eo)?;
    Ok(lhs.sub(&gradient(chart, &eko))?.check_zero(chart.zero_test()))
}

/// One integral with a known valid correction: `E^{(i)}` for the Hamiltonian
/// and potential `F^{(i)}` for the integral.
#[derive(Clone, Debug)]
pub struct Corrected {
    pub observable: QuadraticObservable,
    pub e: Expr,
    pub f: Expr,
}

/// Linear condition `constant + Σ C_j coefficient_j = 0` on the family constants.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// Position of the integral in the input list.
    pub item: usize,
    /// Component of the two-form.
    pub component: (usize, usize),
    pub constant: Expr,
    pub coefficients: Vec<(Name, Expr)>,
}

impl Constraint {
    pub fn equation(&self) -> Expr {
        let terms = std::iter::once(self.constant.clone())
            .chain(self.coefficients.iter().map(|(c, x)| Expr::sym_named(c.clone()) * x));
        Expr::add_all(terms.collect::<Vec<_>>()).normal()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Simultaneous {
    Compatible {
        constraints: Vec<Constraint>,
        /// Constants fixed by the constraints, in terms of the free ones.
        fixed: Vec<(Name, Expr)>,
        free: Vec<Name>,
        /// Surviving family.
        e: Expr,
        /// `W^{(i)} = F^{(i)} + F̄^{(i)}`.
        potentials: Vec<Expr>,
    },
    Incompatible {
        item: usize,
        constraints: Vec<Constraint>,
        verdict: Verdict,
    },
}

/// Tests a candidate `E` (possibly a family) against every integral:
/// `d(K^{(i)}∇(E - E^{(i)})) = 0`.
pub fn simultaneous_correction(
    chart: &Chart,
    items: &[Corrected],
    candidate: &CorrectionFamily,
) -> Result<Simultaneous, CorrectionError> {
    for c in &candidate.constants {
        if chart.coord_index(c).is_some() {
            return Err(CorrectionError::BadConstant(c.to_string()));
        }
    }
    let zt = chart.zero_test();
    let consts = &candidate.constants;
    let zero_map = consts.iter().map(|c| (c.clone(), Expr::zero())).collect();
    let mut constraints = Vec::new();
    let mut two_forms = Vec::new();
    for (i, it) in items.iter().enumerate() {
        let diff = (&candidate.base.e - &it.e).normal();
        let d = exterior_derivative(chart, &k_grad(chart, &it.observable, &diff)?)?;
        for ix in indices(chart.dim(), 2).filter(|ix| ix[0] < ix[1]) {
            let r = d.get(&ix);
            if r.is_zero_const() {
                continue;
            }
            let constant = r.subst_all(&zero_map).normal();
            let coefficients: Vec<(Name, Expr)> = consts
                .iter()
                .map(|c| (c.clone(), r.diff(c).normal()))
                .filter(|(_, x)| !zt.is_zero(x))
                .collect();
            if coefficients.is_empty() && zt.is_zero(&constant) {
                continue;
            }
            constraints.push(Constraint { item: i, component: (ix[0], ix[1]), constant, coefficients });
        }
        two_forms.push(d);
    }
    let (fixed, free) = match solve_constraints(consts, &constraints, zt) {
        Some(sol) => sol,
        None => {
            let item = constraints.first().map_or(0, |c| c.item);
            let verdict = two_forms[item].check_zero(zt);
            return Ok(Simultaneous::Incompatible { item, constraints, verdict });
        }
    };
    let fixed_map = fixed.iter().cloned().collect();
    let e = candidate.base.e.subst_all(&fixed_map).normal();
    let mut potentials = Vec::new();
    for (i, it) in items.iter().enumerate() {
        let diff = (&e - &it.e).normal();
        let w = k_grad(chart, &it.observable, &diff)?;
        let v = exterior_derivative(chart, &w)?.check_zero(zt);
        if !v.holds() {
            return Ok(Simultaneous::Incompatible { item: i, constraints, verdict: v });
        }
        let fbar = solve_potential(chart, &w)?;
        potentials.push((&it.f + fbar).normal());
    }
    Ok(Simultaneous::Compatible { constraints, fixed, free, e, potentials })
}

/// Exact linear solve of the constraints by sampling their coefficient
/// functions; `None` when inconsistent.
fn solve_constraints(
    consts: &[Name],
    constraints: &[Constraint],
    zt: &ZeroTest,
) -> Option<(Vec<(Name, Expr)>, Vec<Name>)> {
    let m = consts.len();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(zt.seed);
    for c in constraints {
        let exprs: Vec<Expr> = consts
            .iter()
            .map(|k| c.coefficients.iter().find(|(n, _)| n == k).map_or(Expr::zero(), |(_, x)| x.clone()))
            .chain(std::iter::once(c.constant.clone()))
            .collect();
        let probe = Expr::add_all(exprs.clone());
        let mut taken = 0;
        let mut attempts = 0;
        while taken < m + 4 && attempts < zt.max_retries {
            attempts += 1;
            let p = ZeroTest::sample_point(&probe, &mut rng);
            let vals: Option<Vec<Q>> = exprs.iter().map(|x| exact_value(x, &p)).collect();
            if let Some(v) = vals {
                rows.push(v);
                taken += 1;
            }
        }
    }
    let (pivots, consistent) = rref(&mut rows, m);
    if !consistent {
        return None;
    }
    let mut fixed = Vec::new();
    for (r, &col) in pivots.iter().enumerate() {
        // C_col = -rhs - Σ_free a_j C_j
        let mut terms = vec![Expr::num(-rows[r][m].clone())];
        for (j, c) in consts.iter().enumerate() {
            if j != col && !pivots.contains(&j) && !rows[r][j].is_zero() {
                terms.push(Expr::num(-rows[r][j].clone()) * Expr::sym_named(c.clone()));
            }
        }
        fixed.push((consts[col].clone(), Expr::add_all(terms)));
    }
    let free = (0..m).filter(|j| !pivots.contains(j)).map(|j| consts[j].clone()).collect();
    Some((fixed, free))
}

fn exact_value(e: &Expr, p: &Point) -> Option<Q> {
    match evaluate(e, p).ok()? {
        Value::Exact(q) => Some(q),
        Value::Float(_) => None,
    }
}

/// Reduced row echelon form of the augmented matrix `[A | b]` with `m`
/// unknowns. Returns pivot columns and whether `A x + b = 0` is solvable.
fn rref(rows: &mut Vec<Vec<Q>>, m: usize) -> (Vec<usize>, bool) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][col];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..=m {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let consistent = rows[r..].iter().all(|row| row[m].is_zero());
    rows.truncate(r);
    (pivots, consistent)
}

/// Outcome of a Stäckel-system correction.
#[derive(Clone, Debug)]
pub enum StackelOutcome {
    Valid {
        /// `E` for the Hamiltonian followed by `E_i` for each integral.
        corrections: Vec<Expr>,
        /// Separability of `H + E` in the chart coordinates (multiplier form).
        multiplier: Verdict,
        robertson: Verdict,
        /// The corrected system `(H - ħ²E/2, K_i - ħ²E_i/2)`.
        system: StackelSystem,
        pre_robertson: Verdict,
    },
    Invalid {
        item: usize,
        verdict: Verdict,
    },
}

/// Levi-Civita separability conditions of `H = ½g^{ab}p_a p_b + V` in the
/// chart coordinates, one scalar per coordinate pair.
pub fn levi_civita(chart: &Chart, h: &QuadraticObservable) -> Verdict {
    let poly = h.polynomial(chart);
    let n = chart.dim();
    let q: Vec<&str> = chart.coords().iter().map(|c| &**c).collect();
    let p: Vec<String> = q.iter().map(|c| momentum(c)).collect();
    let mut out = Verdict::Holds;
    for i in 0..n {
        for j in i + 1..n {
            let (hqi, hqj, hpi, hpj) = (poly.diff(q[i]), poly.diff(q[j]), poly.diff(&p[i]), poly.diff(&p[j]));
            let l = &hpi * &hpj * hqi.diff(q[j]) - &hpi * &hqj * hqi.diff(&p[j]) - &hqi * &hpj * hpi.diff(q[j])
                + &hqi * &hqj * hpi.diff(&p[j]);
            let l = l.normal();
            let v = chart.zero_test().check(&l);
            out = out.and(match Verdict::scalar(l, v) {
                Verdict::Fails(f) => Verdict::Fails(Failure { index: vec![i, j], ..f }),
                other => other,
            });
        }
    }
    out
}

/// Corrections `E_i` with `dE_i = K_i dE` for a system meeting pre-Robertson.
pub fn stackel_correction(system: &StackelSystem, e: &Expr) -> Result<StackelOutcome, CorrectionError> {
    let chart = system.chart();
    let pre = pre_robertson_condition(system)?;
    if !pre.holds() {
        return Err(CorrectionError::PreRobertson(pre));
    }
    let mut corrections = vec![e.normal()];
    for (i, k) in system.observables().iter().enumerate().skip(1) {
        let w = k_grad(chart, k, e)?;
        let v = exterior_derivative(chart, &w)?.check_zero(chart.zero_test());
        if !v.holds() {
            return Ok(StackelOutcome::Invalid { item: i, verdict: v });
        }
        corrections.push(solve_potential(chart, &w)?);
    }
    let multiplier = if system.separable() {
        levi_civita(chart, &system.hamiltonian().with_potential(e.clone()))
    } else {
        Verdict::Holds
    };
    let robertson = robertson_condition(system)?;
    let half_hb2 = Expr::sym(HBAR).powi(2) * Expr::rational(1, 2);
    let corrected = system
        .observables()
        .iter()
        .zip(&corrections)
        .map(|(o, c)| o.with_potential(o.potential() - &half_hb2 * c))
        .collect();
    let new_system = StackelSystem::new(chart.clone(), corrected, system.separable())?;
    let pre_after = pre_robertson_condition(&new_system)?;
    Ok(StackelOutcome::Valid { corrections, multiplier, robertson, system: new_system, pre_robertson: pre_after })
}

/// `ω_a = C^r{}_{sat} ∇_r K^{st} - 3 A_{sat} K^{st}` from the Weyl and
/// Cotton-York tensors.
pub fn rad_one_form(chart: &Chart, k: &QuadraticObservable) -> Result<SymTensor, CorrectionError> {
    let weyl = chart.weyl()?;
    let cotton = chart.cotton_york()?;
    let n = chart.dim();
    let dk = covariant_derivative(chart, k.tensor()); // (∇K)^{st}_r at [s, t, r]
    let c_up = crate::geometry::raise_index(chart, weyl, 0)?; // C^r_{sat} at [r, s, a, t]
    let kt = k.tensor();
    let comps = (0..n)
        .map(|a| {
            let mut terms = Vec::new();
            for s in 0..n {
                for t in 0..n {
                    let kst = kt.get(&[s, t]);
                    let ast = cotton.get(&[s, a, t]);
                    if !kst.is_zero_const() && !ast.is_zero_const() {
                        terms.push(Expr::int(-3) * ast * kst);
                    }
                    for r in 0..n {
                        let c = c_up.get(&[r, s, a, t]);
                        let d = dk.get(&[s, t, r]);
                        if !c.is_zero_const() && !d.is_zero_const() {
                            terms.push(c * d);
                        }
                    }
                }
            }
            Expr::add_all(terms).normal()
        })
        .collect();
    Ok(SymTensor::from_vec(Variance::Down, comps))
}

/// Closedness of [`rad_one_form`].
pub fn rad_obstruction(chart: &Chart, k: &QuadraticObservable) -> Result<Verdict, CorrectionError> {
    let w = rad_one_form(chart, k)?;
    Ok(exterior_derivative(chart, &w)?.check_zero(chart.zero_test()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn flat3() -> Chart {
        Chart::diagonal(&["x", "y", "z"], vec![e("1"), e("1"), e("1")]).unwrap()
    }

    #[test]
    fn flat_metric_gives_gradient() {
        let c = flat3();
        let g = QuadraticObservable::hamiltonian(&c, "H", Expr::zero());
        let f = e("x^2*y + sin(z)");
        let w = obstruction_one_form(&c, &g, &f).unwrap();
        assert_eq!(w, gradient(&c, &f));
        assert!(compatibility_check(&c, &g, &f).unwrap().holds());
        let back = solve_potential(&c, &w).unwrap();
        assert!(c.zero_test().is_zero(&(back - f)));
    }

    #[test]
    fn zero_form_has_zero_potential() {
        let c = flat3();
        let w = SymTensor::from_vec(Variance::Down, vec![Expr::zero(); 3]);
        assert!(solve_potential(&c, &w).unwrap().is_zero_const());
    }

    #[test]
    fn non_closed_form_is_rejected() {
        let c = flat3();
        let w = SymTensor::from_vec(Variance::Down, vec![e("y"), e("0"), e("0")]);
        assert!(matches!(solve_potential(&c, &w), Err(CorrectionError::Verification(_))));
    }

    #[test]
    fn row_reduction() {
        let q = |n: i64| Q::from_integer(n.into());
        // x + y - 2 = 0, x - y = 0
        let mut rows = vec![vec![q(1), q(1), q(-2)], vec![q(1), q(-1), q(0)], vec![q(2), q(0), q(-2)]];
        let (piv, ok) = rref(&mut rows, 2);
        assert!(ok);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(rows[0][2], q(-1));
        let mut bad = vec![vec![q(1), q(1)], vec![q(1), q(2)]];
        assert!(!rref(&mut bad, 1).1);
    }

    #[test]
    fn flat_rad_obstruction_is_closed() {
        let c = flat3();
        let k = QuadraticObservable::new(
            "L",
            &[vec![e("y^2"), e("-x*y"), e("0")], vec![e("-x*y"), e("x^2"), e("0")], vec![e("0"), e("0"), e("0")]],
            Expr::zero(),
        )
        .unwrap();
        assert!(rad_obstruction(&c, &k).unwrap().holds());
    }
}
