use std::fmt;

use rayon::prelude::*;

use crate::expr::{Expr, ZeroTest, ZeroVerdict};
use crate::verdict::Verdict;

use super::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

/// Declared symmetry between two slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

impl Symmetry {
    fn slots(self) -> (usize, usize) {
        match self {
            Symmetry::Symmetric(i, j) | Symmetry::Antisymmetric(i, j) => (i.min(j), i.max(j)),
        }
    }
}

/// Dense tensor of expressions with a variance signature.
///
/// Components are stored row-major, last index fastest. Only canonical
/// index tuples are computed by [`SymTensor::from_fn`]; the rest are filled
/// from the declared symmetries.
#[derive(Clone, PartialEq)]
pub struct SymTensor {
    dim: usize,
    variance: Vec<Variance>,
    symmetries: Vec<Symmetry>,
    comps: Vec<Expr>,
}

/// Sign and canonical representative of an index tuple, `None` when an
/// antisymmetric pair forces the component to vanish.
///
/// Overlapping pairs are applied until nothing moves (bubble sort for
/// chains of adjacent symmetric pairs).
fn canonical(idx: &mut [usize], symmetries: &[Symmetry]) -> Option<bool> {
    let mut negate = false;
    loop {
        let mut moved = false;
        for s in symmetries {
            let (i, j) = s.slots();
            if let Symmetry::Antisymmetric(..) = s {
                if idx[i] == idx[j] {
                    return None;
                }
            }
            if idx[i] > idx[j] {
                idx.swap(i, j);
                moved = true;
                if let Symmetry::Antisymmetric(..) = s {
                    negate = !negate;
                }
            }
        }
        if !moved {
            return Some(negate);
        }
    }
}

pub struct Indices {
    dim: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Indices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut k = next.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            next[k] += 1;
            if next[k] < self.dim {
                self.current = Some(next);
                break;
            }
            next[k] = 0;
        }
        Some(out)
    }
}

/// All index tuples of length `rank` over `0..dim`, last index fastest.
pub fn indices(dim: usize, rank: usize) -> Indices {
    Indices { dim, current: if dim == 0 && rank > 0 { None } else { Some(vec![0; rank]) } }
}

impl SymTensor {
    pub fn zeros(dim: usize, variance: &[Variance]) -> SymTensor {
        let len = dim.pow(variance.len() as u32);
        SymTensor { dim, variance: variance.to_vec(), symmetries: Vec::new(), comps: vec![Expr::zero(); len] }
    }

    /// Builds a tensor by evaluating `f` on canonical index tuples (in
    /// parallel) and completing the rest by symmetry. `f` should already
    /// return normal forms.
    pub fn from_fn<F>(dim: usize, variance: &[Variance], symmetries: &[Symmetry], f: F) -> SymTensor
    where
        F: Fn(&[usize]) -> Expr + Sync,
    {
        let rank = variance.len();
        let reps: Vec<Vec<usize>> = indices(dim, rank)
            .filter(|idx| {
                let mut c = idx.clone();
                canonical(&mut c, symmetries) == Some(false) && &c == idx
            })
            .collect();
        let values: Vec<Expr> = reps.par_iter().map(|idx| f(idx)).collect();
        let mut t = SymTensor::zeros(dim, variance);
        t.symmetries = symmetries.to_vec();
        for (idx, v) in reps.iter().zip(values) {
            let k = t.offset(idx);
            t.comps[k] = v;
        }
        let all: Vec<Vec<usize>> = indices(dim, rank).collect();
        for idx in all {
            let mut c = idx.clone();
            if let Some(neg) = canonical(&mut c, symmetries) {
                if c != idx {
                    let v = t.comps[t.offset(&c)].clone();
                    let k = t.offset(&idx);
                    t.comps[k] = if neg { -v } else { v };
                }
            }
        }
        t
    }

    /// Scalar as a rank-0 tensor.
    pub fn scalar(dim: usize, value: Expr) -> SymTensor {
        SymTensor { dim, variance: Vec::new(), symmetries: Vec::new(), comps: vec![value] }
    }

    /// Rank-2 tensor from a row-major matrix.
    pub fn from_matrix(variance: [Variance; 2], rows: &[Vec<Expr>]) -> Result<SymTensor, GeometryError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape { expected: n, found: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0) });
        }
        let mut t = SymTensor::zeros(n, &variance);
        for (i, row) in rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                t.comps[i * n + j] = e.clone();
            }
        }
        Ok(t)
    }

    /// One-form or vector from its components.
    pub fn from_vec(variance: Variance, comps: Vec<Expr>) -> SymTensor {
        SymTensor { dim: comps.len(), variance: vec![variance], symmetries: Vec::new(), comps }
    }

    pub fn with_symmetries(mut self, symmetries: &[Symmetry]) -> SymTensor {
        self.symmetries = symmetries.to_vec();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.offset(idx)]
    }

    /// Sets one component without touching its symmetric partners.
    pub fn set(&mut self, idx: &[usize], value: Expr) {
        let k = self.offset(idx);
        self.comps[k] = value;
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn indices(&self) -> Indices {
        indices(self.dim, self.rank())
    }

    /// Component-wise map, keeping variance and symmetries.
    pub fn map<F: Fn(&Expr) -> Expr + Sync + Send>(&self, f: F) -> SymTensor {
        SymTensor {
            dim: self.dim,
            variance: self.variance.clone(),
            symmetries: self.symmetries.clone(),
            comps: self.comps.par_iter().map(f).collect(),
        }
    }

    pub fn normal(&self) -> SymTensor {
        self.map(Expr::normal)
    }

    /// Component-wise combination of two tensors of the same shape.
    pub fn zip_with<F>(&self, other: &SymTensor, f: F) -> Result<SymTensor, GeometryError>
    where
        F: Fn(&Expr, &Expr) -> Expr + Sync + Send,
    {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(GeometryError::VarianceMismatch {
                expected: self.variance.clone(),
                found: other.variance.clone(),
            });
        }
        let comps = self.comps.par_iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect();
        let symmetries = self.symmetries.iter().filter(|s| other.symmetries.contains(s)).copied().collect();
        Ok(SymTensor { dim: self.dim, variance: self.variance.clone(), symmetries, comps })
    }

    pub fn sub(&self, other: &SymTensor) -> Result<SymTensor, GeometryError> {
        self.zip_with(other, |a, b| (a - b).normal())
    }

    pub fn scale(&self, c: &Expr) -> SymTensor {
        self.map(|e| (c * e).normal())
    }

    /// Swaps two slots; both must share a variance.
    pub fn transpose(&self, i: usize, j: usize) -> SymTensor {
        let mut out = self.clone();
        out.variance.swap(i, j);
        for idx in self.indices() {
            let mut t = idx.clone();
            t.swap(i, j);
            let k = out.offset(&t);
            out.comps[k] = self.get(&idx).clone();
        }
        out.symmetries = self
            .symmetries
            .iter()
            .map(|s| {
                let m = |x: usize| if x == i { j } else if x == j { i } else { x };
                match *s {
                    Symmetry::Symmetric(a, b) => Symmetry::Symmetric(m(a), m(b)),
                    Symmetry::Antisymmetric(a, b) => Symmetry::Antisymmetric(m(a), m(b)),
                }
            })
            .collect();
        out
    }

    /// Contraction of an upper slot against a lower one.
    pub fn contract(&self, i: usize, j: usize) -> Result<SymTensor, GeometryError> {
        let rank = self.rank();
        for s in [i, j] {
            if s >= rank {
                return Err(GeometryError::SlotOutOfRange { slot: s, rank });
            }
        }
        if i == j || self.variance[i] == self.variance[j] {
            return Err(GeometryError::VarianceMismatch {
                expected: vec![Variance::Up, Variance::Down],
                found: vec![self.variance[i], self.variance[j]],
            });
        }
        let keep: Vec<usize> = (0..rank).filter(|&s| s != i && s != j).collect();
        let variance: Vec<Variance> = keep.iter().map(|&s| self.variance[s]).collect();
        let dim = self.dim;
        let symmetries = retained(&self.symmetries, &keep);
        Ok(SymTensor::from_fn(dim, &variance, &symmetries, |rest| {
            let mut full = vec![0; rank];
            for (k, &s) in keep.iter().enumerate() {
                full[s] = rest[k];
            }
            let terms = (0..dim).map(|a| {
                full[i] = a;
                full[j] = a;
                self.get(&full).clone()
            });
            Expr::add_all(terms.collect::<Vec<_>>()).normal()
        }))
    }

    /// Checks that every component vanishes.
    pub fn check_zero(&self, zt: &ZeroTest) -> Verdict {
        let idx: Vec<Vec<usize>> = self.indices().filter(|i| !self.get(i).is_zero_const()).collect();
        let verdicts: Vec<ZeroVerdict> = idx.par_iter().map(|i| zt.check(self.get(i))).collect();
        Verdict::from_components(idx.into_iter().zip(verdicts).map(|(i, v)| {
            let e = self.get(&i).clone();
            (i, e, v)
        }))
    }

    /// Checks the declared symmetries componentwise.
    pub fn check_symmetries(&self, zt: &ZeroTest) -> Verdict {
        let mut residuals = SymTensor::zeros(self.dim, &self.variance);
        for idx in self.indices() {
            let mut acc = Vec::new();
            for s in &self.symmetries {
                let (i, j) = s.slots();
                let mut t = idx.clone();
                t.swap(i, j);
                let r = match s {
                    Symmetry::Symmetric(..) => self.get(&idx) - self.get(&t),
                    Symmetry::Antisymmetric(..) => self.get(&idx) + self.get(&t),
                };
                acc.push(r);
            }
            residuals.set(&idx, Expr::add_all(acc).normal());
        }
        residuals.check_zero(zt)
    }

    /// Symmetrized part over all slots (rank ≤ 4).
    pub fn symmetrize(&self) -> SymTensor {
        let rank = self.rank();
        let perms = permutations(rank);
        let n = perms.len() as i64;
        let sym: Vec<Symmetry> = (1..rank).map(|k| Symmetry::Symmetric(k - 1, k)).collect();
        SymTensor::from_fn(self.dim, &self.variance, &sym, |idx| {
            let terms: Vec<Expr> = perms
                .iter()
                .map(|p| {
                    let t: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                    self.get(&t).clone()
                })
                .collect();
            (Expr::add_all(terms) * Expr::rational(1, n)).normal()
        })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Symmetries surviving after slots outside `keep` are removed, renumbered.
pub(crate) fn retained(symmetries: &[Symmetry], keep: &[usize]) -> Vec<Symmetry> {
    let pos = |s: usize| keep.iter().position(|&k| k == s);
    symmetries
        .iter()
        .filter_map(|s| match *s {
            Symmetry::Symmetric(a, b) => Some(Symmetry::Symmetric(pos(a)?, pos(b)?)),
            Symmetry::Antisymmetric(a, b) => Some(Symmetry::Antisymmetric(pos(a)?, pos(b)?)),
        })
        .collect()
}

impl fmt::Debug for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymTensor({:?}, dim {})", self.variance, self.dim)?;
        for idx in self.indices() {
            let e = self.get(&idx);
            if !e.is_zero_const() {
                write!(f, "\n  {idx:?} = {e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
