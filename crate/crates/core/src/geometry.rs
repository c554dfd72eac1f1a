//! Hyperbolic geometry on the unit disk and on the upper half-plane.
//!
//! Points are double-precision complex numbers tagged with the domain they
//! live in. The raw, unchecked formulas live in [`disk`] and [`half_plane`]
//! and are used by the numerical kernels; the checked API on [`Point`]
//! rejects boundary points and refuses to mix domains.
//!
//! Distances are evaluated through `1 - d²`, which both models give as a
//! product of positive factors. This keeps `ρ = atanh d` accurate when `d` is
//! close to one.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, MajorantError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Disk,
    HalfPlane,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Disk => f.write_str("unit disk"),
            Domain::HalfPlane => f.write_str("upper half-plane"),
        }
    }
}

/// Hyperbolic distance from a pseudohyperbolic distance `d` and `1 - d²`.
#[inline]
pub fn rho_from_pseudo(d: f64, one_minus_d2: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    if one_minus_d2 <= 0.0 {
        return f64::INFINITY;
    }
    d.ln_1p() - 0.5 * one_minus_d2.ln()
}

/// Unchecked formulas on the unit disk.
pub mod disk {
    use super::*;

    /// `1 - |z|²`, computed as `(1 - |z|)(1 + |z|)`.
    #[inline]
    pub fn one_minus_abs2(z: Complex64) -> f64 {
        let r = z.norm();
        (1.0 - r) * (1.0 + r)
    }

    #[inline]
    pub fn pseudo_distance(z: Complex64, w: Complex64) -> f64 {
        let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
        if den == 0.0 {
            return 1.0;
        }
        ((z - w).norm() / den).min(1.0)
    }

    /// `1 - d(z,w)² = (1-|z|²)(1-|w|²) / |1 - z̄w|²`.
    #[inline]
    pub fn one_minus_pseudo2(z: Complex64, w: Complex64) -> f64 {
        let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm_sqr();
        one_minus_abs2(z) * one_minus_abs2(w) / den
    }

    #[inline]
    pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
        rho_from_pseudo(pseudo_distance(z, w), one_minus_pseudo2(z, w))
    }

    /// `log(1/d(z,w))`, computed as `½ log1p((1-|z|²)(1-|w|²) / |z - w|²)`.
    #[inline]
    pub fn log_inv_pseudo(z: Complex64, w: Complex64) -> f64 {
        let num = (z - w).norm_sqr();
        if num == 0.0 {
            return f64::INFINITY;
        }
        0.5 * (one_minus_abs2(z) * one_minus_abs2(w) / num).ln_1p()
    }

    /// Hyperbolic distance from the origin, `atanh |z|`.
    #[inline]
    pub fn radius(z: Complex64) -> f64 {
        let r = z.norm();
        rho_from_pseudo(r, one_minus_abs2(z))
    }

    /// The involutive automorphism `φ_a(z) = (a - z) / (1 - āz)`.
    #[inline]
    pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
        (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
    }

    /// Euclidean center and radius of the hyperbolic disc `D_H(c, r)`.
    #[inline]
    pub fn disc_euclidean(c: Complex64, r: f64) -> (Complex64, f64) {
        let t = r.tanh();
        let c2 = c.norm_sqr();
        let den = 1.0 - t * t * c2;
        (c * ((1.0 - t * t) / den), t * one_minus_abs2(c) / den)
    }
}

/// Unchecked formulas on the upper half-plane.
pub mod half_plane {
    use super::*;

    #[inline]
    pub fn pseudo_distance(z: Complex64, w: Complex64) -> f64 {
        ((z - w).norm() / (z - w.conj()).norm()).min(1.0)
    }

    /// `1 - d(z,w)² = 4 Im z Im w / |z - w̄|²`.
    #[inline]
    pub fn one_minus_pseudo2(z: Complex64, w: Complex64) -> f64 {
        4.0 * z.im * w.im / (z - w.conj()).norm_sqr()
    }

    #[inline]
    pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
        rho_from_pseudo(pseudo_distance(z, w), one_minus_pseudo2(z, w))
    }

    /// `log(1/d(z,w))`, computed as `½ log1p(4 y y' / |z - w|²)`.
    #[inline]
    pub fn log_inv_pseudo(z: Complex64, w: Complex64) -> f64 {
        let num = (z - w).norm_sqr();
        if num == 0.0 {
            return f64::INFINITY;
        }
        0.5 * (4.0 * z.im * w.im / num).ln_1p()
    }

    /// Euclidean center and radius of the hyperbolic disc `D_H(c, r)`.
    #[inline]
    pub fn disc_euclidean(c: Complex64, r: f64) -> (Complex64, f64) {
        let two_r = 2.0 * r;
        (Complex64::new(c.re, c.im * two_r.cosh()), c.im * two_r.sinh())
    }
}

/// A point of the disk or of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    z: Complex64,
    domain: Domain,
}

impl Point {
    pub fn disk(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im), Domain::Disk)
    }

    pub fn half_plane(x: f64, y: f64) -> Result<Self> {
        Self::new(Complex64::new(x, y), Domain::HalfPlane)
    }

    pub fn new(z: Complex64, domain: Domain) -> Result<Self> {
        let inside = z.re.is_finite()
            && z.im.is_finite()
            && match domain {
                Domain::Disk => z.norm_sqr() < 1.0,
                Domain::HalfPlane => z.im > 0.0,
            };
        if !inside {
            return Err(MajorantError::OutsideDomain {
                re: z.re,
                im: z.im,
                domain,
            });
        }
        Ok(Self { z, domain })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    fn same_domain(&self, other: &Point) -> Result<Domain> {
        if self.domain != other.domain {
            return Err(MajorantError::DomainMismatch {
                left: self.domain,
                right: other.domain,
            });
        }
        Ok(self.domain)
    }
}

/// Pseudohyperbolic (Gleason) distance.
pub fn pseudo_distance(z: &Point, w: &Point) -> Result<f64> {
    Ok(match z.same_domain(w)? {
        Domain::Disk => disk::pseudo_distance(z.z, w.z),
        Domain::HalfPlane => half_plane::pseudo_distance(z.z, w.z),
    })
}

/// Hyperbolic distance `ρ = ½ log((1+d)/(1-d))`.
pub fn hyperbolic_distance(z: &Point, w: &Point) -> Result<f64> {
    Ok(match z.same_domain(w)? {
        Domain::Disk => disk::hyperbolic_distance(z.z, w.z),
        Domain::HalfPlane => half_plane::hyperbolic_distance(z.z, w.z),
    })
}

/// A disc for the hyperbolic distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicDisc {
    pub center: Point,
    pub radius: f64,
}

impl HyperbolicDisc {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(param("radius", radius, "must be positive and finite"));
        }
        Ok(Self { center, radius })
    }

    /// Euclidean center and radius of the same set.
    pub fn euclidean(&self) -> (Complex64, f64) {
        match self.center.domain {
            Domain::Disk => disk::disc_euclidean(self.center.z, self.radius),
            Domain::HalfPlane => half_plane::disc_euclidean(self.center.z, self.radius),
        }
    }

    pub fn contains(&self, z: &Point) -> Result<bool> {
        Ok(hyperbolic_distance(&self.center, z)? < self.radius)
    }
}

/// Euclidean image of `D_H(c, r)` for a disk center. A zero radius gives the
/// degenerate disc `(c, 0)`.
pub fn hyperbolic_disc_euclidean(c: &Point, r: f64) -> Result<(Complex64, f64)> {
    if c.domain != Domain::Disk {
        return Err(MajorantError::DomainMismatch {
            left: Domain::Disk,
            right: c.domain,
        });
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(param("r", r, "must be nonnegative and finite"));
    }
    Ok(disk::disc_euclidean(c.z, r))
}

/// The involutive automorphism of the disk exchanging `base` and `0`.
pub fn mobius_involution(base: &Point, z: &Point) -> Result<Point> {
    if base.same_domain(z)? != Domain::Disk {
        return Err(MajorantError::DomainMismatch {
            left: Domain::Disk,
            right: Domain::HalfPlane,
        });
    }
    let image = disk::mobius(base.z, z.z);
    // Rounding can push images of points very close to the circle onto it.
    Point::new(image, Domain::Disk)
}

/// Harnack factors `((1-r)/(1+r), (1+r)/(1-r))` for `h(re^{iθ})/h(0)`.
pub fn harnack_bounds(r: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&r) {
        return Err(param("r", r, "must lie in [0, 1)"));
    }
    Ok(((1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r)))
}

/// Vertex of a Stolz angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Vertex {
    /// `e^{iθ}` on the unit circle.
    Circle(f64),
    /// `t` on the real line.
    Line(f64),
}

impl Vertex {
    pub fn domain(&self) -> Domain {
        match self {
            Vertex::Circle(_) => Domain::Disk,
            Vertex::Line(_) => Domain::HalfPlane,
        }
    }
}

/// Nontangential approach region at a boundary point.
///
/// On the disk `|z - ζ| ≤ α(1 - |z|²)`, optionally restricted to
/// `1 - |z| ≤ h`; on the half-plane `|x - t| ≤ α y`, optionally restricted to
/// `y ≤ h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzAngle {
    pub vertex: Vertex,
    pub aperture: f64,
    pub truncation: Option<f64>,
}

impl StolzAngle {
    pub fn new(vertex: Vertex, aperture: f64, truncation: Option<f64>) -> Result<Self> {
        if !(aperture > 0.0 && aperture.is_finite()) {
            return Err(param("aperture", aperture, "must be positive"));
        }
        if let Some(h) = truncation {
            if !(h > 0.0) {
                return Err(param("truncation", h, "must be positive"));
            }
        }
        Ok(Self {
            vertex,
            aperture,
            truncation,
        })
    }

    /// Membership test on raw coordinates of the vertex's domain.
    #[inline]
    pub fn contains_raw(&self, z: Complex64) -> bool {
        match self.vertex {
            Vertex::Circle(theta) => {
                let zeta = Complex64::from_polar(1.0, theta);
                let inside = (z - zeta).norm() <= self.aperture * disk::one_minus_abs2(z);
                inside && self.truncation.is_none_or(|h| 1.0 - z.norm() <= h)
            }
            Vertex::Line(t) => {
                let inside = (z.re - t).abs() <= self.aperture * z.im;
                inside && self.truncation.is_none_or(|h| z.im <= h)
            }
        }
    }
}

/// Exact membership of `z` in a Stolz angle.
pub fn stolz_contains(angle: &StolzAngle, z: &Point) -> Result<bool> {
    if angle.vertex.domain() != z.domain {
        return Err(MajorantError::DomainMismatch {
            left: angle.vertex.domain(),
            right: z.domain,
        });
    }
    Ok(angle.contains_raw(z.z))
}
