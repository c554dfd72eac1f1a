//! Functions sampled on a hyperbolic-polar lattice of the disk.
//!
//! Point `0` is the origin; ring `i = 1..=n_rho` holds `n_theta` points
//! `tanh(i Δρ) e^{2πi m/n_theta}` at indices `1 + (i-1) n_theta + m`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, MajorantError, Result};
use crate::geometry::disk;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    d_rho: f64,
    n_rho: usize,
    n_theta: usize,
    h_mesh: f64,
}

impl DiskGrid {
    pub fn new(d_rho: f64, n_rho: usize, n_theta: usize) -> Result<Self> {
        if !(d_rho > 0.0 && d_rho.is_finite()) {
            return Err(param("d_rho", d_rho, "must be positive"));
        }
        if n_rho == 0 {
            return Err(param("n_rho", 0.0, "needs at least one ring"));
        }
        if n_theta < 4 {
            return Err(param("n_theta", n_theta as f64, "needs at least four angles"));
        }
        let r_max = d_rho * n_rho as f64;
        if r_max > 18.0 {
            return Err(param("r_max", r_max, "rings beyond ρ = 18 are not representable"));
        }
        let outer = r_max.tanh();
        let angular = disk::hyperbolic_distance(
            Complex64::new(outer, 0.0),
            Complex64::from_polar(outer, TAU / n_theta as f64),
        );
        Ok(Self {
            d_rho,
            n_rho,
            n_theta,
            h_mesh: d_rho.max(angular),
        })
    }

    /// Grid covering `ρ ≤ r_max` with radial step close to `d_rho`.
    pub fn covering(r_max: f64, d_rho: f64, n_theta: usize) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(param("r_max", r_max, "must be positive"));
        }
        let n_rho = (r_max / d_rho).round().max(1.0) as usize;
        Self::new(r_max / n_rho as f64, n_rho, n_theta)
    }

    pub fn d_rho(&self) -> f64 {
        self.d_rho
    }

    pub fn n_rho(&self) -> usize {
        self.n_rho
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Largest hyperbolic distance between neighboring points.
    pub fn h_mesh(&self) -> f64 {
        self.h_mesh
    }

    pub fn r_max(&self) -> f64 {
        self.d_rho * self.n_rho as f64
    }

    pub fn len(&self) -> usize {
        1 + self.n_rho * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn d_theta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    #[inline]
    pub fn index(&self, ring: usize, m: usize) -> usize {
        if ring == 0 {
            0
        } else {
            1 + (ring - 1) * self.n_theta + m % self.n_theta
        }
    }

    /// `(ring, angle index)` of a grid index.
    #[inline]
    pub fn ring_and_angle(&self, idx: usize) -> (usize, usize) {
        if idx == 0 {
            (0, 0)
        } else {
            (1 + (idx - 1) / self.n_theta, (idx - 1) % self.n_theta)
        }
    }

    #[inline]
    pub fn ring_rho(&self, ring: usize) -> f64 {
        ring as f64 * self.d_rho
    }

    #[inline]
    pub fn point(&self, idx: usize) -> Complex64 {
        let (ring, m) = self.ring_and_angle(idx);
        if ring == 0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.ring_rho(ring).tanh(), m as f64 * self.d_theta())
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Hyperbolic radius of a grid point.
    #[inline]
    pub fn point_rho(&self, idx: usize) -> f64 {
        self.ring_rho(self.ring_and_angle(idx).0)
    }

    /// Bilinear weights in `(ρ, θ)` for an arbitrary point with
    /// `ρ(0, z) ≤ r_max`, as `(index, weight)` pairs summing to one.
    pub fn bilinear(&self, rho: f64, theta: f64) -> Option<[(usize, f64); 4]> {
        let x = rho / self.d_rho;
        if !(x >= 0.0) || x > self.n_rho as f64 * (1.0 + 1e-12) {
            return None;
        }
        let i0 = (x.floor() as usize).min(self.n_rho - 1);
        let fr = (x - i0 as f64).clamp(0.0, 1.0);
        let a = (theta / self.d_theta()).rem_euclid(self.n_theta as f64);
        let m0 = (a.floor() as usize).min(self.n_theta - 1);
        let fa = (a - m0 as f64).clamp(0.0, 1.0);
        let m1 = (m0 + 1) % self.n_theta;
        let inner = if i0 == 0 {
            [(0, (1.0 - fr) * (1.0 - fa)), (0, (1.0 - fr) * fa)]
        } else {
            [
                (self.index(i0, m0), (1.0 - fr) * (1.0 - fa)),
                (self.index(i0, m1), (1.0 - fr) * fa),
            ]
        };
        Some([
            inner[0],
            inner[1],
            (self.index(i0 + 1, m0), fr * (1.0 - fa)),
            (self.index(i0 + 1, m1), fr * fa),
        ])
    }

    /// Four-point Lagrange weights in `ρ` and in `θ` (sixteen pairs summing
    /// to one). Rings near the origin and the rim use one-sided nodes.
    pub fn cubic(&self, rho: f64, theta: f64) -> Option<[(usize, f64); 16]> {
        let x = rho / self.d_rho;
        if !(x >= 0.0) || x > self.n_rho as f64 * (1.0 + 1e-12) || self.n_rho < 3 || self.n_theta < 4 {
            return None;
        }
        let j0 = (x.floor() as usize).saturating_sub(1).min(self.n_rho - 3);
        let wr = lagrange4(x - j0 as f64);
        let a = (theta / self.d_theta()).rem_euclid(self.n_theta as f64);
        let m0 = (a.floor() as usize).min(self.n_theta - 1);
        let wa = lagrange4(a - m0 as f64 + 1.0);
        let mut out = [(0, 0.0); 16];
        for (p, w_r) in wr.iter().enumerate() {
            for (q, w_a) in wa.iter().enumerate() {
                let m = (m0 + self.n_theta + q - 1) % self.n_theta;
                out[4 * p + q] = (self.index(j0 + p, m), w_r * w_a);
            }
        }
        Some(out)
    }

    /// Index of the nearest grid point in `(ρ, θ)`.
    pub fn nearest(&self, rho: f64, theta: f64) -> Option<usize> {
        let x = rho / self.d_rho;
        if !(x >= 0.0) || x > self.n_rho as f64 + 0.5 {
            return None;
        }
        let ring = (x.round() as usize).min(self.n_rho);
        let m = ((theta / self.d_theta()).round() as i64).rem_euclid(self.n_theta as i64) as usize;
        Some(self.index(ring, m))
    }
}

/// How a [`GridFunction`] is read between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Nearest,
    Bilinear,
    #[default]
    Cubic,
}

/// Lagrange weights of the nodes `0, 1, 2, 3` at `t`.
fn lagrange4(t: f64) -> [f64; 4] {
    let (a, b, c, d) = (t, t - 1.0, t - 2.0, t - 3.0);
    [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0]
}

/// Nonnegative values on a [`DiskGrid`]. `+∞` marks singular points and NaN
/// marks masked points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: DiskGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: DiskGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(MajorantError::InvalidData(format!(
                "grid has {} points, got {} values",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| *v < 0.0) {
            return Err(MajorantError::InvalidData(
                "grid values must be nonnegative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: DiskGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    /// Samples `f` at every grid point; negative results are rejected.
    pub fn from_fn(grid: DiskGrid, f: impl Fn(Complex64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &DiskGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn at_origin(&self) -> f64 {
        self.values[0]
    }

    pub fn has_infinite(&self) -> bool {
        self.values.contains(&f64::INFINITY)
    }

    /// Largest finite, unmasked value.
    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0f64, |a, b| a.max(*b))
    }

    /// Value at an arbitrary interior point inside the grid radius.
    pub fn interpolate(&self, z: Complex64, mode: Interpolation) -> Option<f64> {
        let rho = disk::radius(z);
        let theta = z.im.atan2(z.re);
        match mode {
            Interpolation::Nearest => self.grid.nearest(rho, theta).map(|i| self.values[i]),
            Interpolation::Bilinear => self
                .grid
                .bilinear(rho, theta)
                .map(|w| w.iter().map(|(i, c)| if *c == 0.0 { 0.0 } else { c * self.values[*i] }).sum()),
            Interpolation::Cubic => self
                .grid
                .cubic(rho, theta)
                .map(|w| w.iter().map(|(i, c)| if *c == 0.0 { 0.0 } else { c * self.values[*i] }).sum()),
        }
    }

    /// CSV with a `# d_rho=..,n_rho=..,n_theta=..` header, then `x,y,value`
    /// rows in index order. Values use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# d_rho={:?},n_rho={},n_theta={}\nx,y,value\n",
            self.grid.d_rho, self.grid.n_rho, self.grid.n_theta
        );
        for (i, v) in self.values.iter().enumerate() {
            let z = self.grid.point(i);
            let value = if *v == f64::INFINITY {
                "inf".to_string()
            } else if v.is_nan() {
                "nan".to_string()
            } else {
                format!("{v:?}")
            };
            let _ = writeln!(out, "{:?},{:?},{value}", z.re, z.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(MajorantError::Parse {
            line: 1,
            message: "empty grid file".into(),
        })?;
        let header_err = |message: &str| MajorantError::Parse {
            line: 1,
            message: message.to_string(),
        };
        let body = header
            .strip_prefix('#')
            .ok_or_else(|| header_err("expected a `# d_rho=..` header"))?;
        let (mut d_rho, mut n_rho, mut n_theta) = (None, None, None);
        for field in body.split(',') {
            let (key, value) = field
                .trim()
                .split_once('=')
                .ok_or_else(|| header_err("malformed header field"))?;
            match key.trim() {
                "d_rho" => d_rho = value.trim().parse::<f64>().ok(),
                "n_rho" => n_rho = value.trim().parse::<usize>().ok(),
                "n_theta" => n_theta = value.trim().parse::<usize>().ok(),
                _ => return Err(header_err("unknown header field")),
            }
        }
        let grid = match (d_rho, n_rho, n_theta) {
            (Some(d), Some(n), Some(m)) => DiskGrid::new(d, n, m)?,
            _ => return Err(header_err("header needs d_rho, n_rho and n_theta")),
        };
        let mut values = Vec::with_capacity(grid.len());
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() || line == "x,y,value" {
                continue;
            }
            let token = line.rsplit(',').next().unwrap_or("");
            let v = match token.trim() {
                "inf" => f64::INFINITY,
                "nan" => f64::NAN,
                t => t.parse::<f64>().map_err(|e| MajorantError::Parse {
                    line: lineno + 1,
                    message: e.to_string(),
                })?,
            };
            values.push(v);
        }
        Self::new(grid, values)
    }
}
