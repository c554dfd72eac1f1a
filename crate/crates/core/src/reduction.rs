//! Iterated sup-means `F⁽ⁿ⁺¹⁾ = M F⁽ⁿ⁾` and the harmonic-majorant test.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::averaging::{default_radii, AveragingOperator, QuadratureBudget};
use crate::envelope::log_lipschitz_envelope;
use crate::error::{param, Result};
use crate::grid::GridFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReduceOptions {
    pub radii: Vec<f64>,
    pub max_iter: usize,
    /// Stop once the largest relative change of a sweep falls below this.
    pub tol: f64,
    /// Divergence is declared when `F⁽ⁿ⁾(0)` exceeds `cap · F⁽⁰⁾(0)`.
    pub cap: f64,
    pub budget: QuadratureBudget,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            max_iter: 500,
            tol: 1e-4,
            cap: 1e6,
            budget: QuadratureBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionStatus {
    Converged,
    Diverged,
    MaxIterations,
}

impl fmt::Display for ReductionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionStatus::Converged => "converged",
            ReductionStatus::Diverged => "diverged",
            ReductionStatus::MaxIterations => "max-iterations",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub iterations: usize,
    pub status: ReductionStatus,
    /// `F⁽ⁿ⁾(0)` for `n = 0..=iterations`.
    pub trace: Vec<f64>,
    /// Largest relative change of the last sweep.
    pub last_change: f64,
    /// Absolute divergence threshold for `F⁽ⁿ⁾(0)`.
    pub cap_value: f64,
    #[serde(skip)]
    pub final_grid: Option<GridFunction>,
}

impl ReductionReport {
    pub fn final_grid(&self) -> &GridFunction {
        self.final_grid.as_ref().expect("reports from `reduce` carry their grid")
    }
}

fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(a, b)| {
            let scale = a.abs().max(b.abs());
            if scale == 0.0 || a == b {
                0.0
            } else {
                (b - a).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Runs the iteration with a prebuilt operator.
pub fn reduce_with(op: &AveragingOperator, phi: &GridFunction, options: &ReduceOptions) -> Result<ReductionReport> {
    if !(options.tol > 0.0) {
        return Err(param("tol", options.tol, "must be positive"));
    }
    if !(options.cap > 1.0) {
        return Err(param("cap", options.cap, "must exceed one"));
    }
    let base = if phi.at_origin() > 0.0 {
        phi.at_origin()
    } else {
        phi.max_finite()
    };
    let cap_value = options.cap * base;
    let mut current = phi.values().to_vec();
    let mut trace = vec![current[0]];
    let mut status = ReductionStatus::MaxIterations;
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;
    while iterations < options.max_iter {
        let next = op.sup_mean(&current)?;
        iterations += 1;
        last_change = relative_change(&current, &next);
        current = next;
        trace.push(current[0]);
        if (base > 0.0 && current[0] > cap_value) || current[0] == f64::INFINITY {
            status = ReductionStatus::Diverged;
            break;
        }
        if last_change < options.tol {
            status = ReductionStatus::Converged;
            break;
        }
    }
    Ok(ReductionReport {
        iterations,
        status,
        trace,
        last_change,
        cap_value,
        final_grid: Some(GridFunction::new(*phi.grid(), current)?),
    })
}

/// `Rφ` as the limit of `φ⁽ⁿ⁺¹⁾ = M φ⁽ⁿ⁾` on the truncated grid.
pub fn reduce(phi: &GridFunction, options: &ReduceOptions) -> Result<ReductionReport> {
    let op = AveragingOperator::new(phi.grid(), &options.radii, &options.budget)?;
    reduce_with(&op, phi, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    NoEvidence,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::NoEvidence => "NO-EVIDENCE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantTest {
    pub verdict: Verdict,
    pub c: f64,
    pub reduction: ReductionReport,
    #[serde(skip)]
    pub envelope: Option<GridFunction>,
}

impl MajorantTest {
    /// The reduced function of `L_C φ`, a superharmonic majorant on the
    /// grid when the verdict is YES.
    pub fn witness(&self) -> Option<&GridFunction> {
        (self.verdict == Verdict::Yes).then(|| self.reduction.final_grid())
    }
}

/// Computes `L_C φ`, reduces it, and reads the verdict off the status.
pub fn harmonic_majorant_test(phi: &GridFunction, c: f64, options: &ReduceOptions) -> Result<MajorantTest> {
    if !(c >= 2.0 && c.is_finite()) {
        return Err(param("C", c, "the test needs C ≥ 2"));
    }
    let envelope = log_lipschitz_envelope(phi, c)?;
    let reduction = reduce(&envelope, options)?;
    let verdict = match reduction.status {
        ReductionStatus::Converged => Verdict::Yes,
        ReductionStatus::Diverged => Verdict::NoEvidence,
        ReductionStatus::MaxIterations => Verdict::Inconclusive,
    };
    Ok(MajorantTest {
        verdict,
        c,
        reduction,
        envelope: Some(envelope),
    })
}
