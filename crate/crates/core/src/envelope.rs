//! Smallest log-Lipschitz majorants on a [`DiskGrid`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::grid::{DiskGrid, GridFunction};

/// Exact hyperbolic distances between grid points, from
/// `sinh²ρ = sinh²(a-b) + sinh 2a sinh 2b sin²(Δθ/2)`.
#[derive(Debug, Clone)]
pub struct GridDistances {
    grid: DiskGrid,
    sinh_ring: Vec<f64>,
    sin2_half: Vec<f64>,
}

impl GridDistances {
    pub fn new(grid: &DiskGrid) -> Self {
        let sinh_ring = (0..=grid.n_rho()).map(|i| (2.0 * grid.ring_rho(i)).sinh()).collect();
        let sin2_half = (0..grid.n_theta())
            .map(|k| (0.5 * k as f64 * grid.d_theta()).sin().powi(2))
            .collect();
        Self {
            grid: *grid,
            sinh_ring,
            sin2_half,
        }
    }

    /// Distance between ring points with angular offset `dk` (in steps).
    #[inline]
    pub fn ring_distance(&self, i: usize, j: usize, dk: usize) -> f64 {
        let d = self.grid.d_rho();
        let radial = ((i as f64 - j as f64) * d).sinh().powi(2);
        let s = radial + self.sinh_ring[i] * self.sinh_ring[j] * self.sin2_half[dk % self.grid.n_theta()];
        s.sqrt().asinh()
    }

    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (i, m) = self.grid.ring_and_angle(a);
        let (j, n) = self.grid.ring_and_angle(b);
        let nt = self.grid.n_theta();
        let dk = (m + nt - n) % nt;
        self.ring_distance(i, j, dk.min(nt - dk))
    }
}

/// `L_C φ(z) = sup_w φ(w) e^{-C ρ(w, z)}` over the grid points.
///
/// Rings are visited in order of radial separation and each ring is scanned
/// outward in angle; both loops stop once the ring maximum times the
/// distance factor cannot beat the current value. Masked (NaN) points are
/// ignored. Any `+∞` value makes the envelope infinite everywhere.
pub fn log_lipschitz_envelope(phi: &GridFunction, c: f64) -> Result<GridFunction> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(param("C", c, "must be positive"));
    }
    let grid = *phi.grid();
    if phi.has_infinite() {
        return GridFunction::constant(grid, f64::INFINITY);
    }
    let values: Vec<f64> = phi.values().iter().map(|v| if v.is_nan() { 0.0 } else { *v }).collect();
    let nt = grid.n_theta();
    let nr = grid.n_rho();
    let ring_max: Vec<f64> = (0..=nr)
        .map(|i| {
            if i == 0 {
                values[0]
            } else {
                values[grid.index(i, 0)..grid.index(i, 0) + nt]
                    .iter()
                    .fold(0.0f64, |a, b| a.max(*b))
            }
        })
        .collect();
    let dist = GridDistances::new(&grid);
    let d = grid.d_rho();

    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|target| {
            let (ti, tm) = grid.ring_and_angle(target);
            let mut best = values[target];
            // rings ordered by |i - ti|
            let mut order: Vec<usize> = (0..=nr).collect();
            order.sort_by_key(|j| (*j as i64 - ti as i64).unsigned_abs());
            for j in order {
                let gap = (j as f64 - ti as f64).abs() * d;
                if ring_max[j] * (-c * gap).exp() <= best {
                    continue;
                }
                if j == 0 {
                    let v = values[0] * (-c * dist.ring_distance(ti, 0, 0)).exp();
                    best = best.max(v);
                    continue;
                }
                if ti == 0 {
                    let factor = (-c * dist.ring_distance(0, j, 0)).exp();
                    best = best.max(ring_max[j] * factor);
                    continue;
                }
                for off in 0..=nt / 2 {
                    let factor = (-c * dist.ring_distance(ti, j, off)).exp();
                    if ring_max[j] * factor <= best {
                        break;
                    }
                    let plus = values[grid.index(j, tm + off)];
                    let minus = values[grid.index(j, tm + nt - off)];
                    best = best.max(plus.max(minus) * factor);
                }
            }
            best
        })
        .collect();
    GridFunction::new(grid, out)
}

/// Pair sample for [`log_lipschitz_defect`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectSampling {
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for DefectSampling {
    fn default() -> Self {
        Self {
            random_pairs: 20_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    /// `max |log F(z) - log F(w)| - C ρ(z, w)` over the sampled pairs.
    pub value: f64,
    /// Pair attaining the maximum.
    pub witness: Option<(usize, usize)>,
    /// Points left out because `F` vanishes, is masked or is infinite there.
    pub excluded: Vec<usize>,
    pub pairs_checked: usize,
}

/// Largest violation of the `C`-log-Lipschitz inequality over all
/// neighboring grid pairs and a seeded random sample of pairs.
pub fn log_lipschitz_defect(f: &GridFunction, c: f64, sampling: &DefectSampling) -> Result<DefectReport> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(param("C", c, "must be nonnegative"));
    }
    let grid = *f.grid();
    let dist = GridDistances::new(&grid);
    let logs: Vec<Option<f64>> = f
        .values()
        .iter()
        .map(|v| (v.is_finite() && *v > 0.0).then(|| v.ln()))
        .collect();
    let excluded: Vec<usize> = logs
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_none())
        .map(|(i, _)| i)
        .collect();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let nt = grid.n_theta();
    for i in 1..=grid.n_rho() {
        for m in 0..nt {
            let a = grid.index(i, m);
            pairs.push((a, grid.index(i, m + 1)));
            pairs.push((a, grid.index(i - 1, m)));
            if i < grid.n_rho() {
                pairs.push((a, grid.index(i + 1, m + 1)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    for _ in 0..sampling.random_pairs {
        pairs.push((rng.gen_range(0..grid.len()), rng.gen_range(0..grid.len())));
    }

    let mut value = f64::NEG_INFINITY;
    let mut witness = None;
    let mut checked = 0;
    for (a, b) in pairs {
        if a == b {
            continue;
        }
        if let (Some(la), Some(lb)) = (logs[a], logs[b]) {
            checked += 1;
            let d = (la - lb).abs() - c * dist.distance(a, b);
            if d > value {
                value = d;
                witness = Some((a, b));
            }
        }
    }
    Ok(DefectReport {
        value,
        witness,
        excluded,
        pairs_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::disk;
    use approx::assert_abs_diff_eq;

    fn grid() -> DiskGrid {
        DiskGrid::new(0.1, 20, 32).unwrap()
    }

    #[test]
    fn distances_match_direct_formula() {
        let g = grid();
        let dist = GridDistances::new(&g);
        for (a, b) in [(0, 5), (3, 400), (100, 101), (640, 33), (17, 17)] {
            let direct = disk::hyperbolic_distance(g.point(a), g.point(b));
            assert_abs_diff_eq!(dist.distance(a, b), direct, epsilon = 1e-9);
        }
    }

    #[test]
    fn single_spike_envelope() {
        let g = grid();
        let w0 = g.index(7, 3);
        let mut values = vec![0.0; g.len()];
        values[w0] = 2.5;
        let phi = GridFunction::new(g, values).unwrap();
        let env = log_lipschitz_envelope(&phi, 1.3).unwrap();
        let dist = GridDistances::new(&g);
        for i in 0..g.len() {
            let expected = 2.5 * (-1.3 * dist.distance(w0, i)).exp();
            assert_abs_diff_eq!(env.get(i), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_and_idempotent() {
        let g = grid();
        let c = GridFunction::constant(g, 3.0).unwrap();
        assert_eq!(log_lipschitz_envelope(&c, 2.0).unwrap(), c);
        let phi = GridFunction::from_fn(g, |z| (5.0 * z.re).sin().abs() + (z.im * 9.0).cos().powi(2)).unwrap();
        let once = log_lipschitz_envelope(&phi, 2.0).unwrap();
        let twice = log_lipschitz_envelope(&once, 2.0).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }

    #[test]
    fn infinite_input_is_flagged() {
        let g = grid();
        let mut values = vec![1.0; g.len()];
        values[10] = f64::INFINITY;
        let env = log_lipschitz_envelope(&GridFunction::new(g, values).unwrap(), 1.0).unwrap();
        assert!(env.values().iter().all(|v| *v == f64::INFINITY));
    }

    #[test]
    fn defect_examples() {
        let g = grid();
        let c = GridFunction::constant(g, 2.0).unwrap();
        assert!(log_lipschitz_defect(&c, 0.5, &DefectSampling::default()).unwrap().value <= 0.0);
        let mut values = vec![1.0; g.len()];
        values[4] = 0.0;
        let f = GridFunction::new(g, values).unwrap();
        let report = log_lipschitz_defect(&f, 1.0, &DefectSampling::default()).unwrap();
        assert_eq!(report.excluded, vec![4]);
    }
}
