//! Sampled sub-mean test: `max (circle mean - center value)`.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, MajorantError, Result};
use crate::geometry::Domain;

/// Where circle centers are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CenterRegion {
    /// `|z| < radius` in the disk.
    Disk { radius: f64 },
    /// `x ∈ [x0, x1]`, `y ∈ [y0, y1]` with `y` log-uniform.
    Box { x: (f64, f64), y: (f64, f64) },
    /// Explicit centers, cycled through.
    Points { centers: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSampling {
    pub trials: usize,
    /// Euclidean radius as a fraction of the distance to the boundary.
    pub radius_range: (f64, f64),
    /// Initial Gauss–Legendre panels on the circle, bisected adaptively.
    pub panels: usize,
    /// Absolute error target for each circle mean.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for CircleSampling {
    fn default() -> Self {
        Self {
            trials: 1000,
            radius_range: (0.05, 0.9),
            panels: 16,
            tolerance: 1e-10,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleDefect {
    pub center: Complex64,
    pub radius: f64,
    pub mean: f64,
    pub center_value: f64,
}

impl CircleDefect {
    pub fn defect(&self) -> f64 {
        self.mean - self.center_value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectSummary {
    pub max_defect: f64,
    pub worst: CircleDefect,
    pub trials: usize,
    pub resampled: usize,
}

fn boundary_distance(domain: Domain, z: Complex64) -> f64 {
    match domain {
        Domain::Disk => 1.0 - z.norm(),
        Domain::HalfPlane => z.im,
    }
}

const GL_NODES: usize = 8;

fn panel<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * rule.iter().map(|(x, w)| w * g(mid + half * x)).sum::<f64>()
}

fn adaptive<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32, rule: &[(f64, f64)]) -> f64 {
    let m = 0.5 * (a + b);
    let left = panel(g, a, m, rule);
    let right = panel(g, m, b, rule);
    if depth == 0 || (left + right - whole).abs() <= tol * (b - a) {
        return left + right;
    }
    adaptive(g, a, m, left, tol, depth - 1, rule) + adaptive(g, m, b, right, tol, depth - 1, rule)
}

/// Mean of `f` over the circle `|z - c| = r`, by adaptive Gauss–Legendre
/// panels with absolute error target `tol`.
pub fn circle_mean<F: Fn(Complex64) -> f64>(f: &F, c: Complex64, r: f64, panels: usize, tol: f64) -> f64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(GL_NODES).expect("positive"));
    let rule = gl.as_node_weight_pairs();
    let g = |t: f64| f(c + Complex64::from_polar(r, t));
    let panels = panels.max(1);
    let step = TAU / panels as f64;
    let total: f64 = (0..panels)
        .map(|k| {
            let (a, b) = (k as f64 * step, (k + 1) as f64 * step);
            adaptive(&g, a, b, panel(&g, a, b, rule), tol, 40, rule)
        })
        .sum();
    total / TAU
}

/// Largest sampled `mean - center` over random circles.
pub fn superharmonic_defect<F>(
    phi: F,
    domain: Domain,
    region: &CenterRegion,
    sampling: &CircleSampling,
) -> Result<DefectSummary>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let (lo, hi) = sampling.radius_range;
    if !(lo > 0.0 && lo <= hi) {
        return Err(param("radius_range", lo, "needs 0 < lo ≤ hi"));
    }
    if sampling.trials == 0 || sampling.panels == 0 || !(sampling.tolerance > 0.0) {
        return Err(param("trials", sampling.trials as f64, "needs trials, panels and a positive tolerance"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut circles = Vec::with_capacity(sampling.trials);
    let mut resampled = 0;
    while circles.len() < sampling.trials {
        let c = match region {
            CenterRegion::Disk { radius } => {
                let r = radius * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, TAU * rng.gen::<f64>())
            }
            CenterRegion::Box { x, y } => {
                let ly = y.0.ln() + (y.1.ln() - y.0.ln()) * rng.gen::<f64>();
                Complex64::new(x.0 + (x.1 - x.0) * rng.gen::<f64>(), ly.exp())
            }
            CenterRegion::Points { centers } => {
                if centers.is_empty() {
                    return Err(MajorantError::InvalidData("no circle centers given".into()));
                }
                centers[circles.len() % centers.len()]
            }
        };
        let room = boundary_distance(domain, c);
        let r = room * (lo + (hi - lo) * rng.gen::<f64>());
        if !(room > 0.0 && r > 0.0 && r < room && r.is_finite()) {
            resampled += 1;
            if resampled > 100 * sampling.trials {
                return Err(MajorantError::InvalidData(
                    "circle sampling keeps leaving the domain".into(),
                ));
            }
            continue;
        }
        circles.push((c, r));
    }
    let results: Vec<CircleDefect> = circles
        .par_iter()
        .map(|&(c, r)| CircleDefect {
            center: c,
            radius: r,
            mean: circle_mean(&phi, c, r, sampling.panels, sampling.tolerance),
            center_value: phi(c),
        })
        .collect();
    let worst = results
        .into_iter()
        .max_by(|a, b| a.defect().total_cmp(&b.defect()))
        .expect("at least one trial");
    Ok(DefectSummary {
        max_defect: worst.defect(),
        worst,
        trials: sampling.trials,
        resampled,
    })
}
