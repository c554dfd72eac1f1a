use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, MajorantError, Result};
use crate::geometry::{StolzAngle, Vertex};

/// Sampling plan for a truncated Stolz angle.
///
/// Heights run log-spaced from `min_height` up to the truncation; at each
/// height `width_samples` points span the admissible cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzSampling {
    pub height_samples: usize,
    pub width_samples: usize,
    pub min_height: f64,
}

impl Default for StolzSampling {
    fn default() -> Self {
        Self {
            height_samples: 200,
            width_samples: 41,
            min_height: 1e-6,
        }
    }
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| {
        if n == 1 {
            hi
        } else {
            (a + (b - a) * i as f64 / (n - 1) as f64).exp()
        }
    })
}

/// Sample points of the truncated Stolz angle.
pub fn stolz_samples(angle: &StolzAngle, sampling: &StolzSampling) -> Result<Vec<Complex64>> {
    let truncation = angle.truncation.ok_or(MajorantError::InvalidData(
        "sampling a Stolz angle needs a truncation height".into(),
    ))?;
    if !(sampling.min_height > 0.0 && sampling.min_height < truncation) {
        return Err(param(
            "min_height",
            sampling.min_height,
            "must be positive and below the truncation",
        ));
    }
    let alpha = angle.aperture;
    let nw = sampling.width_samples.max(1);
    let mut points = Vec::new();
    for h in log_spaced(sampling.min_height, truncation, sampling.height_samples.max(1)) {
        match angle.vertex {
            Vertex::Line(t) => {
                let half = alpha * h;
                for j in 0..nw {
                    let s = if nw == 1 { 0.0 } else { -1.0 + 2.0 * j as f64 / (nw - 1) as f64 };
                    points.push(Complex64::new(t + s * half, h));
                }
            }
            Vertex::Circle(theta) => {
                let r = 1.0 - h;
                if r <= 0.0 {
                    continue;
                }
                let slack = alpha * (1.0 - r) * (1.0 + r);
                let c = (1.0 + r * r - slack * slack) / (2.0 * r);
                if c > 1.0 {
                    continue;
                }
                let half = c.max(-1.0).acos();
                for j in 0..nw {
                    let s = if nw == 1 { 0.0 } else { -1.0 + 2.0 * j as f64 / (nw - 1) as f64 };
                    points.push(Complex64::from_polar(r, theta + s * half));
                }
            }
        }
    }
    if points.is_empty() {
        return Err(MajorantError::InvalidData(
            "the truncated Stolz angle contains no sample points".into(),
        ));
    }
    Ok(points)
}

/// `sup f` over the truncated Stolz angle, on its samples plus any `extra`
/// candidate points that lie inside the angle.
pub fn nontangential_max<F>(
    f: F,
    angle: &StolzAngle,
    sampling: &StolzSampling,
    extra: &[Complex64],
) -> Result<f64>
where
    F: Fn(Complex64) -> f64,
{
    let mut best = f64::NEG_INFINITY;
    for z in stolz_samples(angle, sampling)? {
        best = best.max(f(z));
    }
    for z in extra {
        if angle.contains_raw(*z) {
            best = best.max(f(*z));
        }
    }
    Ok(best)
}

/// Empirical distribution function of boundary samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakL1Profile {
    /// `(λ, |{g > λ}|)` pairs in the order the thresholds were given.
    pub points: Vec<(f64, f64)>,
    /// Least `C` with `|{g > λ}| ≤ C/λ` at every threshold.
    pub least_constant: f64,
}

/// Distribution function of samples taken on a uniform mesh of spacing
/// `cell`.
pub fn weak_l1_profile(samples: &[f64], cell: f64, thresholds: &[f64]) -> Result<WeakL1Profile> {
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(param("cell", cell, "mesh spacing must be positive"));
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let points: Vec<(f64, f64)> = thresholds
        .iter()
        .map(|&lambda| {
            let above = sorted.len() - sorted.partition_point(|g| *g <= lambda);
            (lambda, above as f64 * cell)
        })
        .collect();
    let least_constant = points
        .iter()
        .map(|(l, m)| l * m)
        .fold(0.0f64, f64::max);
    Ok(WeakL1Profile {
        points,
        least_constant,
    })
}
