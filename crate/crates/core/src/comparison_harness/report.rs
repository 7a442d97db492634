use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::solvers::{solve_l1, solve_mild, Field, ProblemSpec};

/// Positivity and comparison tolerance for fields from the modal solver.
pub const SPECTRAL_TOLERANCE: f64 = 1e-8;
/// Positivity and comparison tolerance for fields from L1 stepping.
pub const L1_TOLERANCE: f64 = 1e-6;

/// Lattice node `(x-index, t-index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub ix: usize,
    pub it: usize,
}

/// Outcome of one check on one instance.
///
/// `worst_violation` is the smallest signed margin over the checked nodes
/// (negative means violated by that much) and `witness` is where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub pass: bool,
    pub worst_violation: f64,
    pub witness: Witness,
    pub tolerance: f64,
    pub fingerprint: String,
    /// False when the instance lies outside the hypotheses of the statement
    /// being probed; such reports are diagnostics only.
    #[serde(default = "yes")]
    pub in_hypothesis: bool,
    /// Sub-checks of a compound certificate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<CheckReport>,
}

fn yes() -> bool {
    true
}

impl CheckReport {
    /// Report over `(ix, it, margin)` triples. A NaN margin is the worst
    /// possible outcome.
    pub fn from_margins(
        name: &str,
        margins: impl IntoIterator<Item = (usize, usize, f64)>,
        tolerance: f64,
        fingerprint: String,
    ) -> Self {
        let mut worst = f64::INFINITY;
        let mut witness = Witness { ix: 0, it: 0 };
        for (ix, it, m) in margins {
            if m.is_nan() {
                worst = f64::NAN;
                witness = Witness { ix, it };
                break;
            }
            if m < worst {
                worst = m;
                witness = Witness { ix, it };
            }
        }
        Self {
            check_name: name.to_string(),
            pass: worst >= -tolerance,
            worst_violation: worst,
            witness,
            tolerance,
            fingerprint,
            in_hypothesis: true,
            components: Vec::new(),
        }
    }

    /// Compound report: passes iff every part passes; worst margin and
    /// witness are those of the worst part.
    pub fn combine(name: &str, parts: Vec<CheckReport>, tolerance: f64, fingerprint: String) -> Self {
        let worst = parts.iter().position(|r| r.worst_violation.is_nan()).or_else(|| {
            (0..parts.len()).min_by(|&i, &j| parts[i].worst_violation.total_cmp(&parts[j].worst_violation))
        });
        let (worst_violation, witness) = match worst {
            Some(i) => (parts[i].worst_violation, parts[i].witness),
            None => (f64::INFINITY, Witness { ix: 0, it: 0 }),
        };
        Self {
            check_name: name.to_string(),
            pass: parts.iter().all(|r| r.pass),
            worst_violation,
            witness,
            tolerance,
            fingerprint,
            in_hypothesis: parts.iter().all(|r| r.in_hypothesis),
            components: parts,
        }
    }
}

/// Margins `values[k·n + p]` as `(p, k, value)`.
pub(crate) fn lattice_margins(values: &[f64], n: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
    values.iter().enumerate().map(move |(i, &v)| (i % n, i / n, v))
}

/// Solver used by checks that solve their own instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverChoice {
    /// Modal solver on the `m_modes` lowest modes (capped at the node count).
    Spectral {
        m_modes: usize,
        tol: f64,
        max_sweeps: usize,
    },
    L1,
}

impl SolverChoice {
    /// All modes, Picard tolerance `1e-12`, at most 1000 sweeps.
    pub fn spectral() -> Self {
        SolverChoice::Spectral { m_modes: usize::MAX, tol: 1e-12, max_sweeps: 1000 }
    }

    pub fn solve(&self, p: &ProblemSpec) -> Result<Field> {
        match *self {
            SolverChoice::Spectral { m_modes, tol, max_sweeps } => solve_mild(p, m_modes.min(p.n()), tol, max_sweeps),
            SolverChoice::L1 => solve_l1(p),
        }
    }

    /// [`SPECTRAL_TOLERANCE`] or [`L1_TOLERANCE`].
    pub fn class_tolerance(&self) -> f64 {
        match self {
            SolverChoice::Spectral { .. } => SPECTRAL_TOLERANCE,
            SolverChoice::L1 => L1_TOLERANCE,
        }
    }
}
