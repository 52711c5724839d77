use std::sync::OnceLock;

use crate::expr::{Expr, Name, ZeroTest, ZeroVerdict};

use super::calculus::covariant_derivative;
use super::{GeometryError, SymTensor, Symmetry, Variance};

use Variance::{Down, Up};

/// Coordinates plus inverse metric `g^{ab}`.
///
/// Curvature objects are computed on first use and cached.
#[derive(Clone, Debug)]
pub struct Chart {
    coords: Vec<Name>,
    inverse: SymTensor,
    params: Vec<Name>,
    notes: String,
    zero: ZeroTest,
    metric: SymTensor,
    det_inverse: Expr,
    cache: Cache,
}

#[derive(Clone, Debug, Default)]
struct Cache {
    christoffel: OnceLock<SymTensor>,
    riemann: OnceLock<SymTensor>,
    riemann_lower: OnceLock<SymTensor>,
    ricci: OnceLock<SymTensor>,
    scalar: OnceLock<Expr>,
    weyl: OnceLock<SymTensor>,
    weyl_scalar: OnceLock<Expr>,
    schouten: OnceLock<SymTensor>,
    cotton: OnceLock<SymTensor>,
}

/// Sum of products, skipping literal zeros.
pub(crate) fn dot<'a, I>(pairs: I) -> Expr
where
    I: IntoIterator<Item = (&'a Expr, &'a Expr)>,
{
    let terms: Vec<Expr> = pairs
        .into_iter()
        .filter(|(a, b)| !a.is_zero_const() && !b.is_zero_const())
        .map(|(a, b)| a * b)
        .collect();
    Expr::add_all(terms)
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Laplace expansion along the first row, skipping zero entries.
fn det(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => {
            let terms: Vec<Expr> = (0..n)
                .filter(|&j| !m[0][j].is_zero_const())
                .map(|j| {
                    let t = &m[0][j] * det(&minor(m, 0, j));
                    if j % 2 == 1 {
                        -t
                    } else {
                        t
                    }
                })
                .collect();
            Expr::add_all(terms)
        }
    }
}

impl Chart {
    /// Validates symmetry and nondegeneracy of `inverse_metric` and
    /// inverts it through the adjugate.
    pub fn new(coords: &[&str], inverse_metric: Vec<Vec<Expr>>) -> Result<Chart, GeometryError> {
        Chart::with_zero_test(coords, inverse_metric, ZeroTest::default())
    }

    pub fn with_zero_test(
        coords: &[&str],
        inverse_metric: Vec<Vec<Expr>>,
        zero: ZeroTest,
    ) -> Result<Chart, GeometryError> {
        let n = coords.len();
        if n < 2 {
            return Err(GeometryError::TooFewCoordinates(n));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(GeometryError::DuplicateCoordinate(c.to_string()));
            }
        }
        if inverse_metric.len() != n {
            return Err(GeometryError::Shape { expected: n, found: inverse_metric.len() });
        }
        let rows: Vec<Vec<Expr>> =
            inverse_metric.iter().map(|r| r.iter().map(Expr::normal).collect()).collect();
        let inverse = SymTensor::from_matrix([Up, Up], &rows)?.with_symmetries(&[Symmetry::Symmetric(0, 1)]);
        for i in 0..n {
            for j in i + 1..n {
                if !zero.is_zero(&(&rows[i][j] - &rows[j][i])) {
                    return Err(GeometryError::Asymmetric { i, j });
                }
            }
        }
        let d = det(&rows).normal();
        match zero.check(&d) {
            ZeroVerdict::NonZero { .. } => {}
            ZeroVerdict::Zero { .. } => return Err(GeometryError::Degenerate(d.to_string())),
            ZeroVerdict::Undecided { reason } => return Err(GeometryError::Undecided(reason)),
        }
        let inv_det = d.recip();
        let metric = SymTensor::from_fn(n, &[Down, Down], &[Symmetry::Symmetric(0, 1)], |ix| {
            let (i, j) = (ix[0], ix[1]);
            let cof = det(&minor(&rows, j, i));
            let cof = if (i + j) % 2 == 1 { -cof } else { cof };
            (cof * &inv_det).normal()
        });
        Ok(Chart {
            coords: coords.iter().map(|c| Name::from(*c)).collect(),
            inverse,
            params: Vec::new(),
            notes: String::new(),
            zero,
            metric,
            det_inverse: d,
            cache: Cache::default(),
        })
    }

    /// Diagonal inverse metric.
    pub fn diagonal(coords: &[&str], diag: Vec<Expr>) -> Result<Chart, GeometryError> {
        let n = diag.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i].clone() } else { Expr::zero() }).collect())
            .collect();
        Chart::new(coords, rows)
    }

    pub fn with_parameters(mut self, params: &[&str]) -> Chart {
        self.params = params.iter().map(|p| Name::from(*p)).collect();
        self
    }

    pub fn with_notes(mut self, notes: &str) -> Chart {
        self.notes = notes.to_string();
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Name] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| &**c == name)
    }

    pub fn parameters(&self) -> &[Name] {
        &self.params
    }

    pub fn notes(&self) -> &str {
        &self.notes
    }

    pub fn zero_test(&self) -> &ZeroTest {
        &self.zero
    }

    /// `g^{ab}`
    pub fn inverse_metric(&self) -> &SymTensor {
        &self.inverse
    }

    /// `g_{ab}`
    pub fn metric(&self) -> &SymTensor {
        &self.metric
    }

    /// `det(g^{ab})`
    pub fn inverse_determinant(&self) -> &Expr {
        &self.det_inverse
    }

    /// `Γ^a_{bc}`, symmetric in `b, c`.
    pub fn christoffel(&self) -> &SymTensor {
        self.cache.christoffel.get_or_init(|| {
            let n = self.dim();
            let g = &self.metric;
            // dg[d][b][c] = ∂_d g_{bc}
            let dg: Vec<SymTensor> = (0..n).map(|d| g.map(|e| e.diff(self.coord(d)).normal())).collect();
            let lowered = SymTensor::from_fn(n, &[Down, Down, Down], &[Symmetry::Symmetric(1, 2)], |ix| {
                let (d, b, c) = (ix[0], ix[1], ix[2]);
                let s = dg[b].get(&[d, c]) + dg[c].get(&[d, b]) - dg[d].get(&[b, c]);
                (s * Expr::rational(1, 2)).normal()
            });
            SymTensor::from_fn(n, &[Up, Down, Down], &[Symmetry::Symmetric(1, 2)], |ix| {
                let (a, b, c) = (ix[0], ix[1], ix[2]);
                let cols: Vec<Expr> = (0..n).map(|d| lowered.get(&[d, b, c]).clone()).collect();
                let row: Vec<&Expr> = (0..n).map(|d| self.inverse.get(&[a, d])).collect();
                dot(row.into_iter().zip(cols.iter())).normal()
            })
        })
    }

    /// `R^a_{bcd}`, antisymmetric in `c, d`.
    pub fn riemann(&self) -> &SymTensor {
        self.cache.riemann.get_or_init(|| {
            let n = self.dim();
            let gam = self.christoffel();
            SymTensor::from_fn(n, &[Up, Down, Down, Down], &[Symmetry::Antisymmetric(2, 3)], |ix| {
                let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
                let mut terms = vec![gam.get(&[a, c, b]).diff(self.coord(d)), -gam.get(&[a, d, b]).diff(self.coord(c))];
                for e in 0..n {
                    terms.push(dot([(gam.get(&[a, d, e]), gam.get(&[e, c, b]))]));
                    terms.push(-dot([(gam.get(&[a, c, e]), gam.get(&[e, d, b]))]));
                }
                Expr::add_all(terms).normal()
            })
        })
    }

    /// `R_{abcd} = g_{ae} R^e_{bcd}`.
    pub fn riemann_lower(&self) -> &SymTensor {
        self.cache.riemann_lower.get_or_init(|| {
            let n = self.dim();
            let r = self.riemann();
            SymTensor::from_fn(
                n,
                &[Down; 4],
                &[Symmetry::Antisymmetric(0, 1), Symmetry::Antisymmetric(2, 3)],
                |ix| {
                    let col: Vec<&Expr> = (0..n).map(|e| r.get(&[e, ix[1], ix[2], ix[3]])).collect();
                    let row: Vec<&Expr> = (0..n).map(|e| self.metric.get(&[ix[0], e])).collect();
                    dot(row.into_iter().zip(col)).normal()
                },
            )
        })
    }

    /// `R_{bd} = R^a_{bad}`.
    pub fn ricci(&self) -> &SymTensor {
        self.cache.ricci.get_or_init(|| {
            let n = self.dim();
            let r = self.riemann();
            SymTensor::from_fn(n, &[Down, Down], &[Symmetry::Symmetric(0, 1)], |ix| {
                Expr::add_all((0..n).map(|a| r.get(&[a, ix[0], a, ix[1]]).clone()).collect::<Vec<_>>()).normal()
            })
        })
    }

    pub fn scalar_curvature(&self) -> &Expr {
        self.cache.scalar.get_or_init(|| {
            let ric = self.ricci();
            let n = self.dim();
            let pairs: Vec<(&Expr, &Expr)> = super::indices(n, 2)
                .map(|ix| (self.inverse.get(&ix), ric.get(&ix)))
                .collect();
            dot(pairs).normal()
        })
    }

    fn need(&self, what: &'static str, need: usize) -> Result<(), GeometryError> {
        if self.dim() < need {
            Err(GeometryError::Dimension { what, need, found: self.dim() })
        } else {
            Ok(())
        }
    }

    /// Weyl tensor `C_{abcd}`, all indices down.
    pub fn weyl(&self) -> Result<&SymTensor, GeometryError> {
        self.need("the Weyl tensor", 3)?;
        Ok(self.cache.weyl.get_or_init(|| {
            let n = self.dim();
            let nn = n as i64;
            let (r, ric, g, sc) = (self.riemann_lower(), self.ricci(), &self.metric, self.scalar_curvature());
            let k1 = Expr::rational(1, nn - 2);
            let k2 = sc * Expr::rational(1, (nn - 1) * (nn - 2));
            SymTensor::from_fn(
                n,
                &[Down; 4],
                &[Symmetry::Antisymmetric(0, 1), Symmetry::Antisymmetric(2, 3)],
                |ix| {
                    let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
                    let gr = dot([
                        (g.get(&[a, c]), ric.get(&[b, d])),
                        (g.get(&[b, d]), ric.get(&[a, c])),
                    ]) - dot([(g.get(&[a, d]), ric.get(&[b, c])), (g.get(&[b, c]), ric.get(&[a, d]))]);
                    let gg = dot([(g.get(&[a, c]), g.get(&[b, d]))]) - dot([(g.get(&[a, d]), g.get(&[b, c]))]);
                    (r.get(ix) - &k1 * gr + &k2 * gg).normal()
                },
            )
        }))
    }

    /// `sqrt(3 C_{abcd} C^{abcd})`
    pub fn weyl_scalar(&self) -> Result<&Expr, GeometryError> {
        let c = self.weyl()?;
        Ok(self.cache.weyl_scalar.get_or_init(|| {
            let mut up = c.clone();
            for slot in 0..4 {
                up = super::raise_index(self, &up, slot).expect("slot in range");
            }
            let pairs: Vec<(&Expr, &Expr)> = c.components().iter().zip(up.components()).collect();
            let full = (dot(pairs) * Expr::int(3)).normal();
            full.sqrt().normal()
        }))
    }

    /// Schouten tensor `P_{ab} = (R_{ab} - Sc g_{ab} / (2(N-1))) / (N-2)`.
    pub fn schouten(&self) -> Result<&SymTensor, GeometryError> {
        self.need("the Schouten tensor", 3)?;
        Ok(self.cache.schouten.get_or_init(|| {
            let nn = self.dim() as i64;
            let k = self.scalar_curvature() * Expr::rational(1, 2 * (nn - 1));
            let ric = self.ricci();
            ric.zip_with(&self.metric, |r, g| ((r - &k * g) * Expr::rational(1, nn - 2)).normal())
                .expect("same shape")
        }))
    }

    /// Cotton-York tensor `A_{sat} = ∇_t P_{sa} - ∇_a P_{st}`, antisymmetric in `a, t`.
    pub fn cotton_york(&self) -> Result<&SymTensor, GeometryError> {
        let p = self.schouten()?;
        Ok(self.cache.cotton.get_or_init(|| {
            let dp = covariant_derivative(self, p);
            SymTensor::from_fn(self.dim(), &[Down; 3], &[Symmetry::Antisymmetric(1, 2)], |ix| {
                let (s, a, t) = (ix[0], ix[1], ix[2]);
                (dp.get(&[s, a, t]) - dp.get(&[s, t, a])).normal()
            })
        }))
    }

    /// `-(N-2) Sc / (4(N-1))`, the scalar turning `Δ` into the conformal Laplacian.
    pub fn conformal_laplacian_term(&self) -> Expr {
        let n = self.dim() as i64;
        if n == 2 {
            return Expr::zero();
        }
        (self.scalar_curvature() * Expr::rational(-(n - 2), 4 * (n - 1))).normal()
    }
}
