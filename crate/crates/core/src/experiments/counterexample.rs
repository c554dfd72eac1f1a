//! The glued function `φ = min(log 1/|B₀|, caps)` on the upper half-plane.
//!
//! Along the curve the log-potential of the tail sequence `{a_k, k ≥ k₀}` is
//! capped inside `D_H(a_k, δ)` by the minimum of `φ_σ(x + iy) = σ(|x| + y)`
//! over `D_H(a_k, δ/2)`. The gluing index `k₀` is the first index from which
//! every cap exceeds the bound `C_δ + log(1/tanh ¾δ)` that the potential
//! obeys on `ρ(z, a_k) ≥ ¾δ`, so the min is attained by the potential near
//! each `∂D_H(a_k, δ)` and the result stays superharmonic.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::curve_sequence_to;
use super::rates::{CurveSpec, RateSpec};
use crate::error::{param, MajorantError, Result};
use crate::geometry::{half_plane, Domain};
use crate::kernels::ZeroSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleOptions {
    pub delta: f64,
    pub x_start: f64,
    pub x_min: f64,
    /// Nodes on each `∂D_H(a_k, δ)` for the interpolation constant.
    pub boundary_nodes: usize,
    /// Neighbors summed exactly; the rest enter through a tail bound.
    pub window: usize,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self {
            delta: 0.2,
            x_start: 1.0,
            x_min: 1e-4,
            boundary_nodes: 128,
            window: 64,
        }
    }
}

/// `max (|x| + y)` over the Euclidean disc with center `c` and radius `r`.
pub fn max_abs_x_plus_y(c: Complex64, r: f64) -> f64 {
    c.re.abs() + c.im + SQRT_2 * r
}

/// `min φ_σ` over `D_H(center, r)`; `σ` decreases, so this is `σ` at the
/// largest `|x| + y` of the disc.
pub fn sigma_disc_min(sigma: &RateSpec, center: Complex64, r: f64) -> f64 {
    let (c, radius) = half_plane::disc_euclidean(center, r);
    sigma.value(max_abs_x_plus_y(c, radius))
}

/// `sup_k sup_{D_H(a_k, δ)} Σ_{j≠k} log 1/d(a_j, z)`, sampled on the
/// boundary circles (the sum is harmonic inside), with zeros beyond the
/// window bounded through `log(1 + u) ≤ u`.
pub fn interpolation_constant(points: &[Complex64], delta: f64, nodes: usize, window: usize) -> f64 {
    let n = points.len();
    (0..n)
        .into_par_iter()
        .map(|k| {
            let (c, r) = half_plane::disc_euclidean(points[k], delta);
            let lo = k.saturating_sub(window);
            let hi = (k + window + 1).min(n);
            let near = (0..nodes)
                .map(|m| {
                    let z = c + Complex64::from_polar(r, std::f64::consts::TAU * m as f64 / nodes as f64);
                    (lo..hi)
                        .filter(|j| *j != k)
                        .map(|j| half_plane::log_inv_pseudo(z, points[j]))
                        .sum::<f64>()
                })
                .fold(0.0f64, f64::max);
            let top = c.im + r;
            let tail: f64 = (0..lo)
                .chain(hi..n)
                .map(|j| {
                    let gap = (c - points[j]).norm() - r;
                    if gap > 0.0 {
                        2.0 * top * points[j].im / (gap * gap)
                    } else {
                        f64::INFINITY
                    }
                })
                .sum();
            near + tail
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest `k₀` with `caps[k] > threshold` for every `k ≥ k₀`.
pub fn gluing_index(caps: &[f64], threshold: f64) -> Option<usize> {
    let k0 = caps.iter().rposition(|c| !(*c > threshold)).map_or(0, |k| k + 1);
    (k0 < caps.len()).then_some(k0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub delta: f64,
    pub sigma: RateSpec,
    pub curve: CurveSpec,
    pub points: Vec<Complex64>,
    /// `min φ_σ` over `D_H(a_k, δ/2)`.
    pub caps: Vec<f64>,
    pub k0: usize,
    pub c_delta: f64,
    /// `C_δ + log(1/tanh ¾δ)`.
    pub threshold: f64,
    /// Bound for `φ` off the capped discs, `C_δ + log(1/tanh δ)`.
    pub c1: f64,
}

impl Counterexample {
    pub fn tail(&self) -> &[Complex64] {
        &self.points[self.k0..]
    }

    pub fn zeros(&self) -> Result<ZeroSet> {
        ZeroSet::unit(Domain::HalfPlane, self.tail())
    }

    /// `log 1/|B₀(z)|`.
    pub fn blaschke(&self, z: Complex64) -> f64 {
        self.tail().iter().map(|a| half_plane::log_inv_pseudo(z, *a)).sum()
    }

    /// Index `k ≥ k₀` with `ρ(z, a_k) < δ`, if any.
    pub fn disc_of(&self, z: Complex64) -> Option<usize> {
        let pos = self.points.partition_point(|a| a.re > z.re);
        let lo = pos.saturating_sub(4).max(self.k0);
        let hi = (pos + 4).min(self.points.len());
        (lo..hi).find(|k| half_plane::hyperbolic_distance(z, self.points[*k]) < self.delta)
    }

    pub fn value(&self, z: Complex64) -> f64 {
        let b = self.blaschke(z);
        match self.disc_of(z) {
            Some(k) => b.min(self.caps[k]),
            None => b,
        }
    }

    /// Boundary points whose Stolz angle of aperture `α` meets `D_H(a_k, δ)`.
    pub fn shadow(&self, k: usize, aperture: f64) -> (f64, f64) {
        let (c, r) = half_plane::disc_euclidean(self.points[k], self.delta);
        let spread = aperture * c.im + r * (1.0 + aperture * aperture).sqrt();
        (c.re - spread, c.re + spread)
    }

    /// Upper bound for `Mφ(ξ)`: `φ ≤ c₁` off the capped discs and `φ ≤ cap_k`
    /// on `D_H(a_k, δ)`.
    pub fn maximal_upper(&self, xi: f64, aperture: f64) -> f64 {
        (self.k0..self.points.len())
            .filter(|k| {
                let (a, b) = self.shadow(*k, aperture);
                a <= xi && xi <= b
            })
            .map(|k| self.caps[k])
            .fold(self.c1, f64::max)
    }

    /// Upper bound for `|{Mφ > t}|` from the union of shadows with caps above
    /// `t`; infinite when `t ≤ c₁`.
    pub fn level_set_bound(&self, t: f64, aperture: f64) -> f64 {
        if t <= self.c1 {
            return f64::INFINITY;
        }
        let mut intervals: Vec<(f64, f64)> = (self.k0..self.points.len())
            .filter(|k| self.caps[*k] > t)
            .map(|k| self.shadow(k, aperture))
            .collect();
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = 0.0;
        let mut current: Option<(f64, f64)> = None;
        for (a, b) in intervals {
            current = match current {
                Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
                Some((ca, cb)) => {
                    total += cb - ca;
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((a, b)) = current {
            total += b - a;
        }
        total
    }
}

/// Builds the sequence, the caps, `C_δ` and `k₀`.
pub fn counterexample_phi(sigma: &RateSpec, curve: &CurveSpec, options: &CounterexampleOptions) -> Result<Counterexample> {
    sigma.validate()?;
    let delta = options.delta;
    if options.boundary_nodes < 8 {
        return Err(param("boundary_nodes", options.boundary_nodes as f64, "needs at least 8"));
    }
    let points = curve_sequence_to(curve, delta, options.x_start, options.x_min)?;
    let caps: Vec<f64> = points.iter().map(|a| sigma_disc_min(sigma, *a, 0.5 * delta)).collect();
    let c_delta = interpolation_constant(&points, delta, options.boundary_nodes, options.window);
    let threshold = c_delta + (1.0 / (0.75 * delta).tanh()).ln();
    let k0 = gluing_index(&caps, threshold).ok_or_else(|| {
        MajorantError::RootFinding(format!(
            "gluing threshold {threshold:.6} (C_δ = {c_delta:.6}) not exceeded by the last cap {:.6} \
             at x = {:e} after {} points; lower x_min",
            caps.last().copied().unwrap_or(f64::NAN),
            points.last().map_or(f64::NAN, |a| a.re),
            points.len()
        ))
    })?;
    Ok(Counterexample {
        delta,
        sigma: sigma.clone(),
        curve: curve.clone(),
        c1: c_delta + (1.0 / delta.tanh()).ln(),
        points,
        caps,
        k0,
        c_delta,
        threshold,
    })
}
