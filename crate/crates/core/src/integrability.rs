//! Killing tensors, Poisson commutation, the tensor `C_K = KR - RK` and the
//! Carter, pre-Robertson and Robertson conditions.

use thiserror::Error;

use crate::expr::Expr;
use crate::geometry::{
    contract_vector, covariant_derivative, divergence, gradient, indices, lower_index, raise_index, Chart,
    GeometryError, SymTensor, Symmetry, Variance,
};
use crate::verdict::Verdict;

use Variance::{Down, Up};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrabilityError {
    #[error("observable `{name}` has dimension {found}, chart has {expected}")]
    Dimension { name: String, expected: usize, found: usize },
    #[error("observable `{name}` must be a contravariant 2-tensor")]
    NotContravariant { name: String },
    #[error("tensor of `{name}` is not symmetric at ({i}, {j})")]
    NotSymmetric { name: String, i: usize, j: usize },
    #[error("`{name}` is not quadratic in the momenta: {reason}")]
    NotQuadratic { name: String, reason: String },
    #[error("`{name}` is not the natural Hamiltonian of the chart (tensor differs from g^ab at ({i}, {j}))")]
    NotNatural { name: String, i: usize, j: usize },
    #[error("a Stäckel system over {dim} coordinates needs {dim} observables, got {found}")]
    SystemSize { dim: usize, found: usize },
    #[error("`{name}` is not diagonal in the separable coordinates")]
    NotDiagonal { name: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `K = ½ K^{ab} p_a p_b + W`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticObservable {
    name: String,
    tensor: SymTensor,
    potential: Expr,
}

/// Momentum conjugate to a coordinate in polynomial form.
pub fn momentum(coord: &str) -> String {
    format!("p_{coord}")
}

impl QuadraticObservable {
    pub fn new(name: &str, rows: &[Vec<Expr>], potential: Expr) -> Result<QuadraticObservable, IntegrabilityError> {
        let tensor = SymTensor::from_matrix([Up, Up], rows)?.normal();
        let n = tensor.dim();
        for i in 0..n {
            for j in i + 1..n {
                if !(tensor.get(&[i, j]) - tensor.get(&[j, i])).normal().is_zero_const() {
                    return Err(IntegrabilityError::NotSymmetric { name: name.to_string(), i, j });
                }
            }
        }
        Ok(QuadraticObservable {
            name: name.to_string(),
            tensor: tensor.with_symmetries(&[Symmetry::Symmetric(0, 1)]),
            potential: potential.normal(),
        })
    }

    /// From a polynomial `½K^{ab}p_a p_b + W` in the named momenta.
    pub fn from_polynomial(name: &str, poly: &Expr, momenta: &[&str]) -> Result<QuadraticObservable, IntegrabilityError> {
        let not_quadratic = |reason: String| IntegrabilityError::NotQuadratic { name: name.to_string(), reason };
        let zero_p = |e: &Expr| momenta.iter().fold(e.clone(), |acc, p| acc.subst(p, &Expr::zero())).normal();
        let n = momenta.len();
        let mut rows = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            let di = poly.diff(momenta[i]);
            if !zero_p(&di).is_zero_const() {
                return Err(not_quadratic(format!("linear term in {}", momenta[i])));
            }
            for j in 0..n {
                let dij = di.diff(momenta[j]).normal();
                if momenta.iter().any(|p| dij.depends_on(p)) {
                    return Err(not_quadratic(format!("term of degree > 2 through {} {}", momenta[i], momenta[j])));
                }
                rows[i][j] = dij;
            }
        }
        QuadraticObservable::new(name, &rows, zero_p(poly))
    }

    /// The metric itself, with potential `V`.
    pub fn hamiltonian(chart: &Chart, name: &str, potential: Expr) -> QuadraticObservable {
        QuadraticObservable {
            name: name.to_string(),
            tensor: chart.inverse_metric().clone(),
            potential: potential.normal(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tensor(&self) -> &SymTensor {
        &self.tensor
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn with_potential(&self, potential: Expr) -> QuadraticObservable {
        QuadraticObservable { potential: potential.normal(), ..self.clone() }
    }

    pub fn with_name(&self, name: &str) -> QuadraticObservable {
        QuadraticObservable { name: name.to_string(), ..self.clone() }
    }

    /// `½ K^{ab} p_a p_b + W` with momenta named by [`momentum`].
    pub fn polynomial(&self, chart: &Chart) -> Expr {
        let p: Vec<Expr> = chart.coords().iter().map(|c| Expr::sym(&momentum(c))).collect();
        let mut terms = vec![self.potential.clone()];
        for ix in indices(self.dim(), 2) {
            let k = self.tensor.get(&ix);
            if !k.is_zero_const() {
                terms.push(Expr::mul_all([Expr::rational(1, 2), k.clone(), p[ix[0]].clone(), p[ix[1]].clone()]));
            }
        }
        Expr::add_all(terms)
    }

    fn fits(&self, chart: &Chart) -> Result<(), IntegrabilityError> {
        if self.dim() != chart.dim() {
            return Err(IntegrabilityError::Dimension {
                name: self.name.clone(),
                expected: chart.dim(),
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// True when the tensor is `g^{ab}` of the chart.
    pub fn is_natural(&self, chart: &Chart) -> bool {
        self.natural_mismatch(chart).is_none()
    }

    fn natural_mismatch(&self, chart: &Chart) -> Option<(usize, usize)> {
        indices(chart.dim(), 2)
            .find(|ix| !chart.zero_test().is_zero(&(self.tensor.get(ix) - chart.inverse_metric().get(ix))))
            .map(|ix| (ix[0], ix[1]))
    }
}

/// `∇^{(a} K^{bc)}`
pub fn killing_residual(chart: &Chart, k: &QuadraticObservable) -> Result<SymTensor, IntegrabilityError> {
    k.fits(chart)?;
    let dk = covariant_derivative(chart, k.tensor());
    let up = raise_index(chart, &dk, 2)?;
    Ok(up.symmetrize())
}

pub fn is_killing(chart: &Chart, k: &QuadraticObservable) -> Result<Verdict, IntegrabilityError> {
    Ok(killing_residual(chart, k)?.check_zero(chart.zero_test()))
}

/// `K ∇W_H - ∇W_K` as a vector.
pub fn potential_residual(
    chart: &Chart,
    h: &QuadraticObservable,
    k: &QuadraticObservable,
) -> Result<SymTensor, IntegrabilityError> {
    let kdv = contract_vector(k.tensor(), &gradient(chart, h.potential()))?;
    let dvk = contract_vector(chart.inverse_metric(), &gradient(chart, k.potential()))?;
    Ok(kdv.sub(&dvk)?)
}

/// `{H, K} = 0` through the Killing equation and `K∇V - ∇V_K = 0`.
pub fn poisson_commutes(
    chart: &Chart,
    h: &QuadraticObservable,
    k: &QuadraticObservable,
) -> Result<Verdict, IntegrabilityError> {
    h.fits(chart)?;
    if let Some((i, j)) = h.natural_mismatch(chart) {
        return Err(IntegrabilityError::NotNatural { name: h.name.clone(), i, j });
    }
    let killing = is_killing(chart, k)?;
    if killing.fails() {
        return Ok(killing);
    }
    Ok(killing.and(potential_residual(chart, h, k)?.check_zero(chart.zero_test())))
}

/// Canonical Poisson bracket of the two polynomials in `q` and `p`.
pub fn poisson_bracket(chart: &Chart, a: &QuadraticObservable, b: &QuadraticObservable) -> Expr {
    let (fa, fb) = (a.polynomial(chart), b.polynomial(chart));
    let terms: Vec<Expr> = chart
        .coords()
        .iter()
        .flat_map(|q| {
            let p = momentum(q);
            [fa.diff(q) * fb.diff(&p), -(fa.diff(&p) * fb.diff(q))]
        })
        .collect();
    Expr::add_all(terms).normal()
}

/// `C_K^{ab} = K^{ac} R_c{}^b - R^a{}_c K^{cb}`, antisymmetric.
pub fn ck_tensor(chart: &Chart, k: &QuadraticObservable) -> Result<SymTensor, IntegrabilityError> {
    k.fits(chart)?;
    let n = chart.dim();
    // R^a_c with the first index raised
    let mixed = raise_index(chart, chart.ricci(), 0)?;
    let kt = k.tensor();
    Ok(SymTensor::from_fn(n, &[Up, Up], &[Symmetry::Antisymmetric(0, 1)], |ix| {
        let (a, b) = (ix[0], ix[1]);
        let terms: Vec<Expr> = (0..n)
            .flat_map(|c| [kt.get(&[a, c]) * mixed.get(&[b, c]), -(mixed.get(&[a, c]) * kt.get(&[c, b]))])
            .collect();
        Expr::add_all(terms).normal()
    }))
}

/// `(δC_K)^a = ∇_b C_K^{ba}`.
pub fn ck_divergence(chart: &Chart, k: &QuadraticObservable) -> Result<SymTensor, IntegrabilityError> {
    let c = ck_tensor(chart, k)?;
    Ok(divergence(chart, &c)?)
}

/// `(δC_K)^♭`
pub fn ck_divergence_flat(chart: &Chart, k: &QuadraticObservable) -> Result<SymTensor, IntegrabilityError> {
    Ok(lower_index(chart, &ck_divergence(chart, k)?, 0)?)
}

pub fn carter_condition(chart: &Chart, k: &QuadraticObservable) -> Result<Verdict, IntegrabilityError> {
    Ok(ck_divergence(chart, k)?.check_zero(chart.zero_test()))
}

/// A Hamiltonian with `N - 1` further quadratic integrals in involution.
#[derive(Clone, Debug)]
pub struct StackelSystem {
    chart: Chart,
    observables: Vec<QuadraticObservable>,
    separable: bool,
}

impl StackelSystem {
    /// The first observable must be the natural Hamiltonian of `chart`.
    /// With `separable`, every tensor must be diagonal.
    pub fn new(
        chart: Chart,
        observables: Vec<QuadraticObservable>,
        separable: bool,
    ) -> Result<StackelSystem, IntegrabilityError> {
        let n = chart.dim();
        if observables.len() != n {
            return Err(IntegrabilityError::SystemSize { dim: n, found: observables.len() });
        }
        for o in &observables {
            o.fits(&chart)?;
        }
        if let Some((i, j)) = observables[0].natural_mismatch(&chart) {
            return Err(IntegrabilityError::NotNatural { name: observables[0].name.clone(), i, j });
        }
        if separable {
            for o in &observables {
                let off = indices(n, 2).any(|ix| ix[0] != ix[1] && !chart.zero_test().is_zero(o.tensor().get(&ix)));
                if off {
                    return Err(IntegrabilityError::NotDiagonal { name: o.name.clone() });
                }
            }
        }
        Ok(StackelSystem { chart, observables, separable })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn observables(&self) -> &[QuadraticObservable] {
        &self.observables
    }

    pub fn hamiltonian(&self) -> &QuadraticObservable {
        &self.observables[0]
    }

    pub fn separable(&self) -> bool {
        self.separable
    }

    /// Pairwise Poisson commutation of all observables, by the bracket.
    pub fn involution(&self) -> Verdict {
        let obs = &self.observables;
        let mut out = Verdict::Holds;
        for i in 0..obs.len() {
            for j in i + 1..obs.len() {
                let br = poisson_bracket(&self.chart, &obs[i], &obs[j]);
                let v = Verdict::scalar(br.clone(), self.chart.zero_test().check(&br));
                out = out.and(match v {
                    Verdict::Fails(mut f) => {
                        f.index = vec![i, j];
                        Verdict::Fails(f)
                    }
                    other => other,
                });
            }
        }
        out
    }
}

/// Carter condition for every tensor of the Killing-Stäckel algebra. The
/// condition is linear in `K`, so the basis suffices.
pub fn pre_robertson_condition(system: &StackelSystem) -> Result<Verdict, IntegrabilityError> {
    let mut out = Verdict::Holds;
    for (i, k) in system.observables.iter().enumerate() {
        out = out.and(tag(carter_condition(&system.chart, k)?, i));
    }
    Ok(out)
}

/// `C_{K_i} = 0` for all `i`; for separable systems also off-diagonal Ricci.
pub fn robertson_condition(system: &StackelSystem) -> Result<Verdict, IntegrabilityError> {
    let chart = &system.chart;
    let mut out = Verdict::Holds;
    for (i, k) in system.observables.iter().enumerate() {
        out = out.and(tag(ck_tensor(chart, k)?.check_zero(chart.zero_test()), i));
    }
    if system.separable {
        let ric = chart.ricci();
        let off = SymTensor::from_fn(chart.dim(), &[Down, Down], &[], |ix| {
            if ix[0] == ix[1] {
                Expr::zero()
            } else {
                ric.get(ix).clone()
            }
        });
        out = out.and(off.check_zero(chart.zero_test()));
    }
    Ok(out)
}

/// Prefixes the failing component with the observable position.
fn tag(v: Verdict, i: usize) -> Verdict {
    match v {
        Verdict::Fails(mut f) => {
            f.index.insert(0, i);
            Verdict::Fails(f)
        }
        Verdict::Undecided { mut index, reason } => {
            index.insert(0, i);
            Verdict::Undecided { index, reason }
        }
        h => h,
    }
}

/// Momenta of every coordinate, in chart order.
pub fn momenta(chart: &Chart) -> Vec<String> {
    chart.coords().iter().map(|c| momentum(c)).collect()
}
