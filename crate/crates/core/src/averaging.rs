//! Invariant (β-) averages over hyperbolic discs of grid functions.
//!
//! Nodes for `D_H(0, r)` are Gauss–Legendre in the hyperbolic radius `σ`
//! (weight `½ sinh 2σ`) times a uniform rule in angle, and are carried to
//! `D_H(z, r)` by the involution `φ_z`, which preserves β. Grid values are
//! read back through cubic interpolation unless the budget asks for one of
//! the modes with nonnegative weights. Since all centers on one ring are
//! rotations of each other, one stencil per ring serves the whole ring.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, MajorantError, Result};
use crate::geometry::disk;
use crate::grid::{DiskGrid, GridFunction, Interpolation};

/// Node budget for one disc average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureBudget {
    /// Gauss–Legendre nodes in the hyperbolic radius.
    pub radial_nodes: usize,
    /// Bounds on the angular nodes per radial node.
    pub angular_min: usize,
    pub angular_max: usize,
    /// Target hyperbolic arc length between angular nodes, as a fraction of
    /// the grid's mesh diameter.
    pub spacing: f64,
    pub interpolation: Interpolation,
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        Self {
            radial_nodes: 12,
            angular_min: 16,
            angular_max: 4096,
            spacing: 0.1,
            interpolation: Interpolation::Cubic,
        }
    }
}

impl QuadratureBudget {
    fn validate(&self) -> Result<()> {
        if self.radial_nodes == 0 || self.angular_min == 0 || self.angular_max < self.angular_min {
            return Err(MajorantError::InvalidData(
                "quadrature budget needs positive node counts with min ≤ max".into(),
            ));
        }
        if !(self.spacing > 0.0) {
            return Err(param("spacing", self.spacing, "must be positive"));
        }
        Ok(())
    }
}

/// Polar nodes `(σ, ψ, weight)` for the β-average over `D_H(0, r)`,
/// normalized to total weight one.
pub fn disc_nodes(r: f64, budget: &QuadratureBudget, arc_spacing: f64) -> Vec<(f64, f64, f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(budget.radial_nodes).expect("validated"));
    let mut nodes = Vec::new();
    let mut total = 0.0;
    for (x, w) in gl.as_node_weight_pairs() {
        let sigma = 0.5 * r * (x + 1.0);
        let radial_weight = 0.5 * r * w * 0.5 * (2.0 * sigma).sinh();
        let circumference = TAU * sigma.sinh();
        let n = ((circumference / arc_spacing).ceil() as usize).clamp(budget.angular_min, budget.angular_max);
        let wn = radial_weight * TAU / n as f64;
        for k in 0..n {
            nodes.push((sigma, TAU * (k as f64 + 0.5) / n as f64, wn));
            total += wn;
        }
    }
    for node in &mut nodes {
        node.2 /= total;
    }
    nodes
}

/// Weights of one ring's disc average, with angle offsets relative to the
/// center's angle index.
#[derive(Debug, Clone, Default)]
struct Stencil {
    origin: f64,
    /// `(first index of ring, angle offset, weight)`.
    entries: Vec<(u32, u32, f64)>,
}

impl Stencil {
    fn build(grid: &DiskGrid, ring: usize, nodes: &[(f64, f64, f64)], mode: Interpolation) -> Self {
        let center = Complex64::new(grid.ring_rho(ring).tanh(), 0.0);
        let nt = grid.n_theta();
        let mut acc: Vec<((usize, usize), f64)> = Vec::with_capacity(nodes.len() * 4);
        let mut origin = 0.0;
        for &(sigma, psi, w) in nodes {
            let zeta = Complex64::from_polar(sigma.tanh(), psi);
            let image = disk::mobius(center, zeta);
            let rho = disk::radius(image).min(grid.r_max());
            let theta = image.im.atan2(image.re);
            let mut push = |idx: usize, c: f64| {
                if c == 0.0 {
                    return;
                }
                let (j, k) = grid.ring_and_angle(idx);
                if j == 0 {
                    origin += w * c;
                } else {
                    acc.push(((j, k), w * c));
                }
            };
            match mode {
                Interpolation::Bilinear => {
                    for (idx, c) in grid.bilinear(rho, theta).expect("disc inside the grid") {
                        push(idx, c);
                    }
                }
                Interpolation::Cubic => {
                    for (idx, c) in grid.cubic(rho, theta).expect("disc inside the grid") {
                        push(idx, c);
                    }
                }
                Interpolation::Nearest => {
                    push(grid.nearest(rho, theta).expect("disc inside the grid"), 1.0);
                }
            }
        }
        acc.sort_by_key(|a| a.0);
        let mut entries: Vec<(u32, u32, f64)> = Vec::with_capacity(acc.len());
        let mut last: Option<(usize, usize)> = None;
        for ((j, k), w) in acc {
            if last == Some((j, k)) {
                entries.last_mut().expect("nonempty").2 += w;
            } else {
                entries.push(((1 + (j - 1) * nt) as u32, k as u32, w));
                last = Some((j, k));
            }
        }
        Self { origin, entries }
    }

    #[inline]
    fn apply(&self, values: &[f64], m: usize, nt: usize) -> f64 {
        let mut s = if self.origin != 0.0 { self.origin * values[0] } else { 0.0 };
        for &(base, dk, w) in &self.entries {
            let mut k = m + dk as usize;
            if k >= nt {
                k -= nt;
            }
            s += w * values[base as usize + k];
        }
        s
    }
}

/// Disc averages over a fixed list of radii on a fixed grid.
#[derive(Debug, Clone)]
pub struct AveragingOperator {
    grid: DiskGrid,
    radii: Vec<f64>,
    /// `stencils[r][ring]`, `None` when the disc leaves the grid.
    stencils: Vec<Vec<Option<Stencil>>>,
}

impl AveragingOperator {
    pub fn new(grid: &DiskGrid, radii: &[f64], budget: &QuadratureBudget) -> Result<Self> {
        budget.validate()?;
        for r in radii {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(param("radius", *r, "averaging radii must be positive"));
            }
        }
        let spacing = budget.spacing * grid.h_mesh();
        let stencils = radii
            .iter()
            .map(|&r| {
                let nodes = disc_nodes(r, budget, spacing);
                (0..=grid.n_rho())
                    .into_par_iter()
                    .map(|ring| {
                        (grid.ring_rho(ring) + r <= grid.r_max() * (1.0 + 1e-12))
                            .then(|| Stencil::build(grid, ring, &nodes, budget.interpolation))
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            grid: *grid,
            radii: radii.to_vec(),
            stencils,
        })
    }

    pub fn grid(&self) -> &DiskGrid {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Number of stored weights, a proxy for the cost of one sweep.
    pub fn stencil_size(&self) -> usize {
        self.stencils
            .iter()
            .flatten()
            .flatten()
            .map(|s| s.entries.len() + 1)
            .sum::<usize>()
            * self.grid.n_theta()
    }

    /// Sum of the negative stencil weights, worst over all stencils; zero
    /// means the operator is monotone in `F`.
    pub fn negative_mass(&self) -> f64 {
        self.stencils
            .iter()
            .flatten()
            .flatten()
            .map(|s| s.entries.iter().map(|e| e.2.min(0.0)).sum::<f64>() + s.origin.min(0.0))
            .fold(0.0, f64::min)
    }

    fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.grid.len() {
            return Err(MajorantError::InvalidData(
                "values do not match the operator's grid".into(),
            ));
        }
        Ok(())
    }

    /// Average over `D_H(z, radii[which])` at every grid point; NaN where the
    /// disc leaves the grid.
    pub fn average(&self, values: &[f64], which: usize) -> Result<Vec<f64>> {
        self.check(values)?;
        let nt = self.grid.n_theta();
        let stencils = &self.stencils[which];
        let mut out = vec![f64::NAN; self.grid.len()];
        if let Some(s) = &stencils[0] {
            out[0] = s.apply(values, 0, nt);
        }
        out[1..]
            .par_chunks_mut(nt)
            .enumerate()
            .for_each(|(i, chunk)| {
                if let Some(s) = &stencils[i + 1] {
                    for (m, slot) in chunk.iter_mut().enumerate() {
                        *slot = s.apply(values, m, nt);
                    }
                }
            });
        Ok(out)
    }

    /// `max(F(z), averages of F over the listed discs that fit in the grid)`.
    pub fn sup_mean(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check(values)?;
        let nt = self.grid.n_theta();
        let mut out = values.to_vec();
        let ring_apply = |ring: usize, m: usize, current: f64| -> f64 {
            let mut best = current;
            for per_radius in &self.stencils {
                if let Some(s) = &per_radius[ring] {
                    best = best.max(s.apply(values, m, nt));
                }
            }
            best
        };
        out[0] = ring_apply(0, 0, values[0]);
        out[1..]
            .par_chunks_mut(nt)
            .enumerate()
            .for_each(|(i, chunk)| {
                for (m, slot) in chunk.iter_mut().enumerate() {
                    *slot = ring_apply(i + 1, m, *slot);
                }
            });
        Ok(out)
    }
}

/// `u_δ`: β-average over `D_H(z, δ)` at every grid point, masked (NaN)
/// where the disc leaves the grid.
pub fn invariant_mean(u: &GridFunction, delta: f64, budget: &QuadratureBudget) -> Result<GridFunction> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(param("delta", delta, "must lie in (0, 1/2]"));
    }
    let op = AveragingOperator::new(u.grid(), &[delta], budget)?;
    GridFunction::new(*u.grid(), op.average(u.values(), 0)?)
}

/// `MF = max(F, β-averages of F over D_H(z, r) for the listed r)`.
pub fn hyperbolic_sup_mean(f: &GridFunction, radii: &[f64], budget: &QuadratureBudget) -> Result<GridFunction> {
    let op = AveragingOperator::new(f.grid(), radii, budget)?;
    GridFunction::new(*f.grid(), op.sup_mean(f.values())?)
}

/// β-average of a function given in closed form over `D_H(z, r)`.
pub fn invariant_mean_at<F>(f: F, z: Complex64, r: f64, budget: &QuadratureBudget, arc_spacing: f64) -> f64
where
    F: Fn(Complex64) -> f64,
{
    disc_nodes(r, budget, arc_spacing)
        .into_iter()
        .map(|(sigma, psi, w)| w * f(disk::mobius(z, Complex64::from_polar(sigma.tanh(), psi))))
        .sum()
}

/// Default radii `{2^-m : m = 0..6} ∪ {2, 4}`, decreasing.
pub fn default_radii() -> Vec<f64> {
    let mut radii = vec![4.0, 2.0];
    radii.extend((0..=6).map(|m| (-(m as f64)).exp2()));
    radii
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::poisson::poisson_kernel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nodes_are_normalized_and_exact_for_radial_weight() {
        let budget = QuadratureBudget::default();
        let nodes = disc_nodes(0.8, &budget, 0.05);
        let total: f64 = nodes.iter().map(|n| n.2).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
        // mean of tanh²σ = |ζ|² against β over D(0, t): 1 - log(1/(1-t²))(1-t²)/t²
        let t = 0.8f64.tanh();
        let exact = 1.0 - (1.0 - t * t) / (t * t) * (1.0 / (1.0 - t * t)).ln();
        let mean: f64 = nodes.iter().map(|n| n.2 * n.0.tanh().powi(2)).sum();
        assert_abs_diff_eq!(mean, exact, epsilon = 1e-12);
    }

    #[test]
    fn constants_are_fixed() {
        let grid = DiskGrid::new(0.1, 20, 32).unwrap();
        let c = GridFunction::constant(grid, 2.5).unwrap();
        let mean = invariant_mean(&c, 0.3, &QuadratureBudget::default()).unwrap();
        for (i, v) in mean.values().iter().enumerate() {
            if grid.point_rho(i) + 0.3 <= grid.r_max() {
                assert_abs_diff_eq!(*v, 2.5, epsilon = 1e-12);
            } else {
                assert!(v.is_nan());
            }
        }
        let m = hyperbolic_sup_mean(&c, &[0.5, 0.25], &QuadratureBudget::default()).unwrap();
        assert!(m.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn pointwise_mean_of_harmonic_function() {
        let f = |z: Complex64| poisson_kernel(z, 0.4) * TAU;
        let z = Complex64::new(0.3, 0.5);
        let v = invariant_mean_at(f, z, 0.5, &QuadratureBudget::default(), 0.02);
        assert_abs_diff_eq!(v, f(z), epsilon = 1e-9 * f(z));
    }

    #[test]
    fn radii_default() {
        let r = default_radii();
        assert_eq!(r.len(), 9);
        assert!(r.windows(2).all(|w| w[0] > w[1]));
    }
}
