use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poisson::{AtomicMeasure, BoundaryMeasure};
use crate::error::{param, MajorantError, Result};
use crate::geometry::{disk, half_plane, Domain, Point};

/// Value of a logarithmic potential. `Infinite` marks evaluation exactly at
/// a zero and is kept apart from floating-point overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogPotential {
    Finite(f64),
    Infinite,
}

impl LogPotential {
    pub fn from_raw(v: f64) -> Self {
        if v == f64::INFINITY {
            LogPotential::Infinite
        } else {
            LogPotential::Finite(v)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            LogPotential::Finite(v) => v,
            LogPotential::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LogPotential::Infinite)
    }
}

impl fmt::Display for LogPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogPotential::Finite(v) => write!(f, "{v}"),
            LogPotential::Infinite => f.write_str("∞"),
        }
    }
}

/// Point masses `(w_k, m_k)` of a Riesz measure, all in one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    domain: Domain,
    zeros: Vec<(Complex64, f64)>,
}

impl ZeroSet {
    pub fn new(domain: Domain, zeros: Vec<(Complex64, f64)>) -> Result<Self> {
        for (w, m) in &zeros {
            Point::new(*w, domain)?;
            if !(m.is_finite() && *m > 0.0) {
                return Err(param("mass", *m, "zero masses must be finite and positive"));
            }
        }
        Ok(Self { domain, zeros })
    }

    pub fn empty(domain: Domain) -> Self {
        Self {
            domain,
            zeros: Vec::new(),
        }
    }

    /// Unit masses at the given points.
    pub fn unit(domain: Domain, points: &[Complex64]) -> Result<Self> {
        Self::new(domain, points.iter().map(|w| (*w, 1.0)).collect())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn zeros(&self) -> &[(Complex64, f64)] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// `Σ m_k log(1/d(z, w_k))`, unchecked; `+∞` at a zero.
    #[inline]
    pub fn potential(&self, z: Complex64) -> f64 {
        match self.domain {
            Domain::Disk => self
                .zeros
                .iter()
                .map(|(w, m)| m * disk::log_inv_pseudo(z, *w))
                .sum(),
            Domain::HalfPlane => self
                .zeros
                .iter()
                .map(|(w, m)| m * half_plane::log_inv_pseudo(z, *w))
                .sum(),
        }
    }

    /// Potential of the zeros other than `skip`.
    pub fn potential_without(&self, z: Complex64, skip: usize) -> f64 {
        self.zeros
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != skip)
            .map(|(_, (w, m))| {
                m * match self.domain {
                    Domain::Disk => disk::log_inv_pseudo(z, *w),
                    Domain::HalfPlane => half_plane::log_inv_pseudo(z, *w),
                }
            })
            .sum()
    }

    /// Smallest hyperbolic distance from `z` to a zero.
    pub fn nearest_distance(&self, z: Complex64) -> f64 {
        self.zeros
            .iter()
            .map(|(w, _)| match self.domain {
                Domain::Disk => disk::hyperbolic_distance(z, *w),
                Domain::HalfPlane => half_plane::hyperbolic_distance(z, *w),
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// One `re im mass` line per zero.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, m) in &self.zeros {
            out.push_str(&format!("{:?} {:?} {:?}\n", w.re, w.im, m));
        }
        out
    }

    pub fn from_text(domain: Domain, text: &str) -> Result<Self> {
        let mut zeros = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| MajorantError::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|e| parse_err(e.to_string())))
                .collect::<Result<_>>()?;
            match fields.as_slice() {
                [re, im] => zeros.push((Complex64::new(*re, *im), 1.0)),
                [re, im, m] => zeros.push((Complex64::new(*re, *im), *m)),
                _ => return Err(parse_err("expected `re im [mass]`".into())),
            }
        }
        Self::new(domain, zeros)
    }
}

/// The potential of a separated zero set, capped near each zero so that it
/// stays finite and superharmonic.
///
/// Inside `D_H(w_k, δ)` the value is `min(u, c_k)` with
/// `c_k = sup_{∂D_H(w_k, δ)} u_k + m_k log(1/tanh(3δ/4))`, where `u_k` is the
/// potential of the other zeros. `u_k` is harmonic on the disc, so `u ≤ c_k`
/// once `ρ(z, w_k) ≥ 3δ/4` and the cap is inactive near the disc boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct CappedPotential {
    zeros: ZeroSet,
    delta: f64,
    caps: Vec<f64>,
}

impl CappedPotential {
    /// Zeros must be `2δ` apart; `nodes` samples each boundary circle.
    pub fn new(zeros: ZeroSet, delta: f64, nodes: usize) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(param("delta", delta, "must be positive"));
        }
        if nodes < 8 {
            return Err(param("nodes", nodes as f64, "need at least 8 boundary nodes"));
        }
        let dist = |a: Complex64, b: Complex64| match zeros.domain {
            Domain::Disk => disk::hyperbolic_distance(a, b),
            Domain::HalfPlane => half_plane::hyperbolic_distance(a, b),
        };
        for (i, (a, _)) in zeros.zeros.iter().enumerate() {
            for (b, _) in &zeros.zeros[i + 1..] {
                if dist(*a, *b) <= 2.0 * delta {
                    return Err(MajorantError::InvalidData(format!(
                        "zeros {a} and {b} are closer than 2δ = {}",
                        2.0 * delta
                    )));
                }
            }
        }
        let log_cap = (1.0 / (0.75 * delta).tanh()).ln();
        let caps = zeros
            .zeros
            .iter()
            .enumerate()
            .map(|(k, (w, m))| {
                let (c, r) = match zeros.domain {
                    Domain::Disk => disk::disc_euclidean(*w, delta),
                    Domain::HalfPlane => half_plane::disc_euclidean(*w, delta),
                };
                let sup = (0..nodes)
                    .map(|j| zeros.potential_without(c + Complex64::from_polar(r, TAU * j as f64 / nodes as f64), k))
                    .fold(f64::NEG_INFINITY, f64::max);
                sup + m * log_cap
            })
            .collect();
        Ok(Self { zeros, delta, caps })
    }

    pub fn zeros(&self) -> &ZeroSet {
        &self.zeros
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    pub fn value(&self, z: Complex64) -> f64 {
        let u = self.zeros.potential(z);
        for (k, (w, _)) in self.zeros.zeros.iter().enumerate() {
            let d = match self.zeros.domain {
                Domain::Disk => disk::hyperbolic_distance(z, *w),
                Domain::HalfPlane => half_plane::hyperbolic_distance(z, *w),
            };
            if d < self.delta {
                return u.min(self.caps[k]);
            }
        }
        u
    }
}

/// Logarithmic potential `Σ m_k log(1/d(z, w_k))` at a checked point.
pub fn blaschke_log(zeros: &ZeroSet, z: &Point) -> Result<LogPotential> {
    if z.domain() != zeros.domain() {
        return Err(MajorantError::DomainMismatch {
            left: z.domain(),
            right: zeros.domain(),
        });
    }
    Ok(LogPotential::from_raw(zeros.potential(z.z())))
}

/// `G(t) = -t² log t / (2(1-t²)) - ¼ log(1-t²)`, an antiderivative of
/// `-r log r / (1-r²)²`.
fn mean_antiderivative(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let one_minus = (1.0 - t) * (1.0 + t);
    -t * t * t.ln() / (2.0 * one_minus) - 0.25 * one_minus.ln()
}

/// β-average of `log(1/d(·, w))` over `D_H(z, δ)` where `s = d(z, w)`.
///
/// Circle means of `log 1/|φ_s|` about the origin equal `log 1/max(r, s)`;
/// integrating against the radial weight of β gives a closed form.
pub fn log_kernel_invariant_mean(s: f64, delta: f64) -> f64 {
    let t = delta.tanh();
    if s >= t {
        return -s.ln();
    }
    let b = t * t / (2.0 * (1.0 - t) * (1.0 + t));
    let one_minus_s2 = (1.0 - s) * (1.0 + s);
    (mean_antiderivative(t) + 0.25 * one_minus_s2.ln()) / b
}

/// `β(D_H(z, r)) = π sinh² r`.
pub fn beta_disc_mass(r: f64) -> f64 {
    std::f64::consts::PI * r.sinh().powi(2)
}

/// Shrink factor `K` with `D_H(w, Kδ) ⊂ D_H(z, δ)` whenever `d(z, w) ≤ δ/4`.
pub fn lemma_shrink_factor(delta: f64) -> f64 {
    1.0 - (delta / 4.0).atanh() / delta
}

/// `κ = β(D_H(·, δ)) / β(D_H(·, Kδ))`: the ratio bound for averages of
/// positive superharmonic functions at points with `d(z, w) ≤ δ/4`.
pub fn averaging_ratio_bound(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(param("delta", delta, "must lie in (0, 1/2]"));
    }
    let k = lemma_shrink_factor(delta);
    Ok(beta_disc_mass(delta) / beta_disc_mass(k * delta))
}

/// Positive superharmonic function on the disk: a log-potential plus a
/// nonnegative multiple of a Poisson integral of point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperharmonicModel {
    pub zeros: ZeroSet,
    pub harmonic: AtomicMeasure,
    pub constant: f64,
}

impl SuperharmonicModel {
    pub fn new(zeros: ZeroSet, harmonic: AtomicMeasure, constant: f64) -> Result<Self> {
        if zeros.domain() != Domain::Disk || harmonic.domain() != Domain::Disk {
            return Err(MajorantError::InvalidData(
                "superharmonic models live on the disk".into(),
            ));
        }
        if !(constant.is_finite() && constant >= 0.0) {
            return Err(param("constant", constant, "must be finite and nonnegative"));
        }
        Ok(Self {
            zeros,
            harmonic,
            constant,
        })
    }

    pub fn value(&self, z: Complex64) -> f64 {
        self.zeros.potential(z) + self.harmonic.poisson_integral_raw(z) + self.constant
    }

    pub fn harmonic_part(&self, z: Complex64) -> f64 {
        self.harmonic.poisson_integral_raw(z) + self.constant
    }

    /// Exact β-average over `D_H(z, δ)`.
    pub fn invariant_mean(&self, z: Complex64, delta: f64) -> f64 {
        let log_part: f64 = self
            .zeros
            .zeros()
            .iter()
            .map(|(w, m)| m * log_kernel_invariant_mean(disk::pseudo_distance(z, *w), delta))
            .sum();
        log_part + self.harmonic_part(z)
    }
}
