use crate::expr::Expr;

use super::chart::dot;
use super::{Chart, GeometryError, SymTensor, Symmetry, Variance};

use Variance::{Down, Up};

/// `∇T`, with the derivative slot appended last.
pub fn covariant_derivative(chart: &Chart, t: &SymTensor) -> SymTensor {
    let n = chart.dim();
    let gam = chart.christoffel();
    let mut variance = t.variance().to_vec();
    variance.push(Down);
    let rank = t.rank();
    SymTensor::from_fn(n, &variance, t.symmetries(), |ix| {
        let (base, c) = (&ix[..rank], ix[rank]);
        let mut terms = vec![t.get(base).diff(chart.coord(c))];
        let mut moved = base.to_vec();
        for (k, v) in t.variance().iter().enumerate() {
            for e in 0..n {
                moved[k] = e;
                let coeff = match v {
                    Up => gam.get(&[base[k], c, e]).clone(),
                    Down => -gam.get(&[e, c, base[k]]),
                };
                terms.push(dot([(&coeff, t.get(&moved))]));
            }
            moved[k] = base[k];
        }
        Expr::add_all(terms).normal()
    })
}

/// `(δT)^{...} = ∇_b T^{b...}`: the derivative contracted with the first slot.
pub fn divergence(chart: &Chart, t: &SymTensor) -> Result<SymTensor, GeometryError> {
    if t.rank() == 0 || t.variance()[0] != Up {
        return Err(GeometryError::VarianceMismatch {
            expected: vec![Up],
            found: t.variance().to_vec(),
        });
    }
    let d = covariant_derivative(chart, t);
    d.contract(0, t.rank())
}

fn check_slot(t: &SymTensor, slot: usize, want: Variance) -> Result<(), GeometryError> {
    if slot >= t.rank() {
        return Err(GeometryError::SlotOutOfRange { slot, rank: t.rank() });
    }
    if t.variance()[slot] != want {
        return Err(GeometryError::VarianceMismatch { expected: vec![want], found: vec![t.variance()[slot]] });
    }
    Ok(())
}

fn move_index(t: &SymTensor, slot: usize, by: &SymTensor, to: Variance) -> SymTensor {
    let n = t.dim();
    let mut variance = t.variance().to_vec();
    variance[slot] = to;
    let symmetries: Vec<Symmetry> = t
        .symmetries()
        .iter()
        .filter(|s| match **s {
            Symmetry::Symmetric(a, b) | Symmetry::Antisymmetric(a, b) => a != slot && b != slot,
        })
        .copied()
        .collect();
    SymTensor::from_fn(n, &variance, &symmetries, |ix| {
        let cols: Vec<Expr> = (0..n)
            .map(|b| {
                let mut j = ix.to_vec();
                j[slot] = b;
                t.get(&j).clone()
            })
            .collect();
        let row: Vec<&Expr> = (0..n).map(|b| by.get(&[ix[slot], b])).collect();
        dot(row.into_iter().zip(cols.iter())).normal()
    })
}

/// `T^{..a..} = g^{ab} T_{..b..}`
pub fn raise_index(chart: &Chart, t: &SymTensor, slot: usize) -> Result<SymTensor, GeometryError> {
    check_slot(t, slot, Down)?;
    Ok(move_index(t, slot, chart.inverse_metric(), Up))
}

/// `T_{..a..} = g_{ab} T^{..b..}`
pub fn lower_index(chart: &Chart, t: &SymTensor, slot: usize) -> Result<SymTensor, GeometryError> {
    check_slot(t, slot, Up)?;
    Ok(move_index(t, slot, chart.metric(), Down))
}

/// `df_a = ∂_a f`
pub fn gradient(chart: &Chart, f: &Expr) -> SymTensor {
    let comps = chart.coords().iter().map(|c| f.diff(c).normal()).collect();
    SymTensor::from_vec(Down, comps)
}

/// `(dω)_{ab} = ∂_a ω_b - ∂_b ω_a`
pub fn exterior_derivative(chart: &Chart, omega: &SymTensor) -> Result<SymTensor, GeometryError> {
    if omega.variance() != [Down] {
        return Err(GeometryError::VarianceMismatch { expected: vec![Down], found: omega.variance().to_vec() });
    }
    Ok(SymTensor::from_fn(chart.dim(), &[Down, Down], &[Symmetry::Antisymmetric(0, 1)], |ix| {
        let (a, b) = (ix[0], ix[1]);
        (omega.get(&[b]).diff(chart.coord(a)) - omega.get(&[a]).diff(chart.coord(b))).normal()
    }))
}

/// `(T v)^i = T^{ij} v_j` (or any variance pairing of the last slot of `t` with `v`).
pub fn contract_vector(t: &SymTensor, v: &SymTensor) -> Result<SymTensor, GeometryError> {
    if t.rank() != 2 || v.rank() != 1 || t.variance()[1] == v.variance()[0] {
        return Err(GeometryError::VarianceMismatch { expected: t.variance().to_vec(), found: v.variance().to_vec() });
    }
    let n = t.dim();
    let comps = (0..n)
        .map(|i| {
            let row: Vec<&Expr> = (0..n).map(|j| t.get(&[i, j])).collect();
            dot(row.into_iter().zip(v.components())).normal()
        })
        .collect();
    Ok(SymTensor::from_vec(t.variance()[0], comps))
}
