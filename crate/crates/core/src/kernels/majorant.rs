use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poisson::{AtomicMeasure, BoundaryDensity, BoundaryMeasure, Support};
use super::potential::ZeroSet;
use crate::dyadic::{direct_density, whitney_square_of, DyadicData, DyadicIndex};
use crate::error::{param, MajorantError, Result};
use crate::geometry::{disk, Domain, Point};
use crate::grid::DiskGrid;

/// One positive harmonic summand of a [`HarmonicFunctionDescriptor`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HarmonicTerm {
    /// `weight · ∫ P_z f`.
    Density { weight: f64, density: BoundaryDensity },
    /// `weight · Σ m P_z(t)`.
    Atoms { weight: f64, measure: AtomicMeasure },
    /// `C_δ Σ m_k (1-|w_k|²) Re((1 + z w̄_k)/(1 - z w̄_k))` on the disk.
    FarField { c_delta: f64, zeros: ZeroSet },
    /// `c · Im z` on the half-plane.
    Linear { c: f64 },
}

impl HarmonicTerm {
    fn evaluate(&self, z: Complex64) -> f64 {
        match self {
            HarmonicTerm::Density { weight, density } => weight * density.poisson_integral_raw(z),
            HarmonicTerm::Atoms { weight, measure } => weight * measure.poisson_integral_raw(z),
            HarmonicTerm::FarField { c_delta, zeros } => {
                let one = Complex64::new(1.0, 0.0);
                c_delta
                    * zeros
                        .zeros()
                        .iter()
                        .map(|(w, m)| {
                            let a = z * w.conj();
                            m * disk::one_minus_abs2(*w) * ((one + a) / (one - a)).re
                        })
                        .sum::<f64>()
            }
            HarmonicTerm::Linear { c } => c * z.im,
        }
    }
}

/// A positive harmonic function `scale · Σ terms`, evaluable anywhere in its
/// domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFunctionDescriptor {
    pub domain: Domain,
    pub scale: f64,
    pub terms: Vec<HarmonicTerm>,
}

impl HarmonicFunctionDescriptor {
    pub fn new(domain: Domain, scale: f64, terms: Vec<HarmonicTerm>) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(param("scale", scale, "must be finite and nonnegative"));
        }
        Ok(Self { domain, scale, terms })
    }

    /// Value at a raw interior point of the descriptor's domain.
    pub fn evaluate(&self, z: Complex64) -> f64 {
        self.scale * self.terms.iter().map(|t| t.evaluate(z)).sum::<f64>()
    }

    pub fn evaluate_point(&self, z: &Point) -> Result<f64> {
        if z.domain() != self.domain {
            return Err(MajorantError::DomainMismatch {
                left: z.domain(),
                right: self.domain,
            });
        }
        Ok(self.evaluate(z.z()))
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptors serialize")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| MajorantError::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantOptions {
    /// Splitting threshold for `d(z, w)` and shrink distance of the Whitney
    /// squares.
    pub delta: f64,
    pub far_field_samples: usize,
    pub far_field_safety: f64,
    /// Samples per side of each Whitney square.
    pub square_samples: usize,
    /// Hyperbolic radius of the neighborhoods of the zeros left unchecked;
    /// defaults to `δ/8`.
    pub exclusion_radius: Option<f64>,
    pub seed: u64,
}

impl Default for MajorantOptions {
    fn default() -> Self {
        Self {
            delta: 0.125,
            far_field_samples: 100_000,
            far_field_safety: 1.05,
            square_samples: 8,
            exclusion_radius: None,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantConstants {
    pub delta: f64,
    /// Far-field constant used in `h₂`.
    pub c_delta: f64,
    /// Sampled supremum before the safety factor.
    pub c_delta_sampled: f64,
    /// `log(1/δ)/(1-δ²)`, the exact supremum of the far-field ratio.
    pub c_delta_exact: f64,
    /// Multiplier of the dyadic term `h₁`.
    pub dyadic_scale: f64,
    /// Regularity constant `C₁` measured between checked points and their
    /// nearest representative.
    pub regularity: f64,
    /// Covering radius `r₂` of the representatives over the checked points.
    pub covering_radius: f64,
    /// `exp[C₁(1 + r₂)] e^{2 r₂}`.
    pub harnack_slack: f64,
    /// Multiplier actually applied to `h₀ + h₁ + h₂`.
    pub applied_slack: f64,
    pub min_area_fraction: f64,
    pub depth: u32,
    pub representatives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantAudit {
    pub checked_points: usize,
    pub excluded_points: usize,
    /// `min (h - u)/u` over the checked points.
    pub min_relative_margin: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicMajorant {
    pub descriptor: HarmonicFunctionDescriptor,
    pub constants: MajorantConstants,
    pub audit: MajorantAudit,
}

/// Sampled supremum of `log(1/d) |1 - z w̄|² / ((1 - |zw|²)(1 - |w|²))` over
/// pairs with `d(z, w) > δ`.
pub fn far_field_ratio_sup(delta: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..samples {
        let w = Complex64::from_polar(rng.gen_range(0.0..6.0f64).tanh(), rng.gen_range(0.0..TAU));
        let u: f64 = rng.gen();
        let s = delta + (1.0 - delta) * u * u * u;
        if !(s > delta && s < 1.0) {
            continue;
        }
        let z = disk::mobius(w, Complex64::from_polar(s, rng.gen_range(0.0..TAU)));
        let d = disk::pseudo_distance(z, w);
        if !(d > delta) {
            continue;
        }
        let den = (Complex64::new(1.0, 0.0) - z * w.conj()).norm_sqr();
        let zw2 = (z * w).norm_sqr();
        let kernel = (1.0 - zw2) * disk::one_minus_abs2(w) / den;
        if kernel > 0.0 {
            best = best.max(disk::log_inv_pseudo(z, w) / kernel);
        }
    }
    best
}

/// `p_{n,j} = |I_{n,j}|⁻¹ Σ_{w_k ∈ Q_{n,j}} m_k (1 - |w_k|)` up to `depth`.
pub fn riesz_dyadic_data(zeros: &ZeroSet, depth: u32) -> Result<DyadicData<f64>> {
    let mut data = DyadicData::new(depth)?;
    for (w, m) in zeros.zeros() {
        let idx = whitney_square_of(*w).ok_or(MajorantError::Construction(
            "zero too close to the circle for the dyadic model".into(),
        ))?;
        if idx.level() > depth {
            continue;
        }
        let len = TAU * (-(idx.level() as f64)).exp2();
        let current = *data.get(idx.level(), idx.position());
        data.set(idx.level(), idx.position(), current + m * (1.0 - w.norm()) / len)?;
    }
    Ok(data)
}

/// Area-weighted samples of `Q_{n,j}` and of its shrunken core
/// `T_{n,j} = {z ∈ Q : ρ(z, ∂Q) > δ}`.
fn square_core_samples(idx: DyadicIndex, delta: f64, per_side: usize) -> (Vec<Complex64>, f64) {
    let (r0, r1) = idx.whitney_radii();
    let (r0, r1) = if idx.level() == 0 { (0.0, 0.5) } else { (r0, r1) };
    let (t0, t1) = idx.arc();
    let mut core = Vec::new();
    let mut area_all = 0.0;
    let mut area_core = 0.0;
    for a in 0..per_side {
        let r = r0 + (r1 - r0) * (a as f64 + 0.5) / per_side as f64;
        for b in 0..per_side {
            let theta = t0 + (t1 - t0) * (b as f64 + 0.5) / per_side as f64;
            area_all += r;
            let mut dist = r1.atanh() - r.atanh();
            if idx.level() > 0 {
                dist = dist.min(r.atanh() - r0.atanh());
                for edge in [t0, t1] {
                    let s = 2.0 * r * (theta - edge).sin().abs() / ((1.0 - r) * (1.0 + r));
                    dist = dist.min(s.asinh());
                }
            }
            if dist > delta {
                area_core += r;
                core.push(Complex64::from_polar(r, theta));
            }
        }
    }
    (core, area_core / area_all)
}

fn whitney_level(r: f64) -> u32 {
    whitney_square_of(Complex64::new(r.min(1.0 - 1e-16), 0.0)).map_or(60, |i| i.level())
}

/// Harmonic majorant of `u = Σ m_k log(1/d(·, w_k)) + P[h₀]` following the
/// Riesz split at `d = δ`: the far part is dominated by `h₂`, the near part
/// at one representative per Whitney square by a multiple of the Poisson
/// integral of the direct dyadic density, and a Harnack slack transfers the
/// bound from the representatives to every checked grid point.
pub fn build_harmonic_majorant(
    zeros: &ZeroSet,
    h0: &BoundaryDensity,
    grid: &DiskGrid,
    options: &MajorantOptions,
) -> Result<HarmonicMajorant> {
    let delta = options.delta;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(param("delta", delta, "must lie in (0, 1)"));
    }
    if zeros.domain() != Domain::Disk || h0.support() != Support::Circle {
        return Err(MajorantError::InvalidData(
            "the builder works on the disk".into(),
        ));
    }
    let exclusion = options.exclusion_radius.unwrap_or(delta / 8.0);
    let u = |z: Complex64| zeros.potential(z) + h0.poisson_integral_raw(z);
    if exclusion <= 0.0 && u(Complex64::new(0.0, 0.0)) == f64::INFINITY {
        return Err(MajorantError::Construction(
            "u(0) is infinite and no neighborhood of the zeros is excluded".into(),
        ));
    }

    let grid_level = whitney_level(grid.r_max().tanh());
    let zero_level = zeros
        .zeros()
        .iter()
        .map(|(w, _)| whitney_level(w.norm()))
        .max()
        .unwrap_or(0);
    if grid_level > 16 || zero_level > 24 {
        return Err(MajorantError::Construction(format!(
            "dyadic depth too large (grid level {grid_level}, zero level {zero_level})"
        )));
    }
    let depth = grid_level.max(zero_level);
    let data = riesz_dyadic_data(zeros, depth)?;
    let density = direct_density(&data);

    // near part of the potential
    let u1 = |z: Complex64| -> f64 {
        zeros
            .zeros()
            .iter()
            .filter(|(w, _)| disk::pseudo_distance(z, *w) <= delta)
            .map(|(w, m)| m * disk::log_inv_pseudo(z, *w))
            .sum()
    };

    let squares: Vec<DyadicIndex> = (0..=grid_level)
        .flat_map(|n| (0..1u64 << n).map(move |k| DyadicIndex::new(n, k).expect("in range")))
        .collect();
    let cores: Vec<(Vec<Complex64>, f64)> = squares
        .par_iter()
        .map(|idx| square_core_samples(*idx, delta, options.square_samples))
        .collect();
    let min_area_fraction = cores.iter().map(|c| c.1).fold(1.0f64, f64::min);
    if min_area_fraction < 0.1 {
        return Err(MajorantError::Construction(format!(
            "shrunken Whitney squares keep only {min_area_fraction:.3} of their area; decrease δ"
        )));
    }
    let representatives: Vec<Complex64> = cores
        .iter()
        .map(|(samples, _)| {
            let mut best = (f64::INFINITY, samples[0]);
            for z in samples {
                let v = u1(*z);
                if v < best.0 {
                    best = (v, *z);
                }
            }
            best.1
        })
        .collect();

    let h1_base = |z: Complex64| density.poisson_integral_raw(z);
    let dyadic_scale = representatives
        .iter()
        .map(|z| {
            let near = u1(*z);
            if near == 0.0 {
                0.0
            } else {
                near / h1_base(*z)
            }
        })
        .fold(0.0f64, f64::max);
    if !dyadic_scale.is_finite() {
        return Err(MajorantError::Construction(
            "a representative sits on a zero".into(),
        ));
    }

    let c_delta_sampled = far_field_ratio_sup(delta, options.far_field_samples, options.seed);
    let c_delta = c_delta_sampled * options.far_field_safety;
    let c_delta_exact = (1.0 / delta).ln() / ((1.0 - delta) * (1.0 + delta));

    let mut terms = Vec::new();
    if !h0.is_zero() {
        terms.push(HarmonicTerm::Density {
            weight: 1.0,
            density: h0.clone(),
        });
    }
    if dyadic_scale > 0.0 {
        terms.push(HarmonicTerm::Density {
            weight: dyadic_scale,
            density,
        });
    }
    if !zeros.is_empty() {
        terms.push(HarmonicTerm::FarField {
            c_delta,
            zeros: zeros.clone(),
        });
    }
    let base = HarmonicFunctionDescriptor::new(Domain::Disk, 1.0, terms)?;

    // checked points and the Harnack transfer
    let points = grid.points();
    let checked: Vec<Complex64> = points
        .iter()
        .copied()
        .filter(|z| zeros.nearest_distance(*z) > exclusion && u(*z).is_finite())
        .collect();
    let excluded_points = points.len() - checked.len();
    let transfer: Vec<(f64, f64)> = checked
        .par_iter()
        .map(|z| {
            let (rho, rep) = representatives
                .iter()
                .map(|r| (disk::hyperbolic_distance(*z, *r), *r))
                .fold((f64::INFINITY, *z), |a, b| if b.0 < a.0 { b } else { a });
            let (uz, ur) = (u(*z), u(rep));
            let ratio = if uz > 0.0 && ur > 0.0 {
                (uz.ln() - ur.ln()) / (1.0 + rho)
            } else {
                0.0
            };
            (rho, ratio)
        })
        .collect();
    let covering_radius = transfer.iter().map(|t| t.0).fold(0.0f64, f64::max);
    let regularity = transfer.iter().map(|t| t.1).fold(0.0f64, f64::max);
    let harnack_slack = (regularity * (1.0 + covering_radius)).exp() * (2.0 * covering_radius).exp();
    // with no zeros u = P[h₀] is itself harmonic
    let applied_slack = if zeros.is_empty() { 1.0 } else { harnack_slack };
    let descriptor = HarmonicFunctionDescriptor {
        scale: applied_slack,
        ..base
    };

    let margins: Vec<f64> = checked
        .par_iter()
        .map(|z| {
            let uz = u(*z);
            let hz = descriptor.evaluate(*z);
            if uz > 0.0 {
                (hz - uz) / uz
            } else if hz >= 0.0 {
                0.0
            } else {
                -1.0
            }
        })
        .collect();
    let audit = MajorantAudit {
        checked_points: checked.len(),
        excluded_points,
        min_relative_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        violations: margins.iter().filter(|m| **m < 0.0).count(),
    };
    Ok(HarmonicMajorant {
        descriptor,
        constants: MajorantConstants {
            delta,
            c_delta,
            c_delta_sampled,
            c_delta_exact,
            dyadic_scale,
            regularity,
            covering_radius,
            harnack_slack,
            applied_slack,
            min_area_fraction,
            depth,
            representatives: representatives.len(),
        },
        audit,
    })
}
