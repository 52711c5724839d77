use std::fmt;

use crate::expr::{Expr, Witness, ZeroVerdict};

/// A component that failed to vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    /// Component index (empty for scalars).
    pub index: Vec<usize>,
    pub residual: Expr,
    pub witness: Option<Witness>,
}

/// Outcome of a componentwise identity check.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Holds,
    Fails(Failure),
    Undecided { index: Vec<usize>, reason: String },
}

impl Verdict {
    /// First nonvanishing component wins over undecided ones.
    pub fn from_components<I>(items: I) -> Verdict
    where
        I: IntoIterator<Item = (Vec<usize>, Expr, ZeroVerdict)>,
    {
        let mut undecided = None;
        for (index, residual, v) in items {
            match v {
                ZeroVerdict::Zero { .. } => {}
                ZeroVerdict::NonZero { witness } => {
                    return Verdict::Fails(Failure { index, residual, witness });
                }
                ZeroVerdict::Undecided { reason } => {
                    undecided.get_or_insert(Verdict::Undecided { index, reason });
                }
            }
        }
        undecided.unwrap_or(Verdict::Holds)
    }

    pub fn scalar(residual: Expr, v: ZeroVerdict) -> Verdict {
        Verdict::from_components([(Vec::new(), residual, v)])
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            Verdict::Fails(f) => Some(f),
            _ => None,
        }
    }

    /// Combines two verdicts: a failure dominates, then undecided.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fails(_), _) | (_, f @ Verdict::Fails(_)) => f,
            (u @ Verdict::Undecided { .. }, _) | (_, u @ Verdict::Undecided { .. }) => u,
            _ => Verdict::Holds,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Fails(x) => {
                write!(f, "fails at {:?}: {}", x.index, x.residual)?;
                if let Some(w) = &x.witness {
                    write!(f, " ({w})")?;
                }
                Ok(())
            }
            Verdict::Undecided { index, reason } => write!(f, "undecided at {index:?}: {reason}"),
        }
    }
}
