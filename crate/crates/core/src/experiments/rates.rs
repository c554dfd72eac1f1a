//! Profile functions for the half-plane constructions.

use serde::{Deserialize, Serialize};

use crate::error::{param, MajorantError, Result};

/// Strictly monotone tabulated function, interpolated linearly in
/// log-log coordinates and extended by the end slopes.
fn loglog(points: &[(f64, f64)], t: f64) -> f64 {
    let lt = t.ln();
    let n = points.len();
    let seg = match points.iter().position(|p| p.0 >= t) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => n - 2,
    };
    let (t0, v0) = points[seg];
    let (t1, v1) = points[seg + 1];
    let slope = (v1.ln() - v0.ln()) / (t1.ln() - t0.ln());
    (v0.ln() + slope * (lt - t0.ln())).exp()
}

fn check_table(points: &[(f64, f64)], decreasing: bool) -> Result<()> {
    if points.len() < 2 {
        return Err(MajorantError::InvalidData("a table needs at least two points".into()));
    }
    for p in points {
        if !(p.0 > 0.0 && p.1 > 0.0 && p.0.is_finite() && p.1.is_finite()) {
            return Err(MajorantError::InvalidData(format!(
                "table entry ({}, {}) must be positive and finite",
                p.0, p.1
            )));
        }
    }
    for w in points.windows(2) {
        let value_ok = if decreasing { w[1].1 < w[0].1 } else { w[1].1 > w[0].1 };
        if !(w[1].0 > w[0].0 && value_ok) {
            return Err(MajorantError::InvalidData(format!(
                "table must be strictly {} with increasing abscissae",
                if decreasing { "decreasing" } else { "increasing" }
            )));
        }
    }
    Ok(())
}

/// A decreasing rate `t ↦ c tᵖ` (`p < 0`) or a decreasing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateSpec {
    Power { scale: f64, exponent: f64 },
    Table { points: Vec<(f64, f64)> },
}

impl RateSpec {
    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        let spec = RateSpec::Power { scale, exponent };
        spec.validate()?;
        Ok(spec)
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        let spec = RateSpec::Table { points };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RateSpec::Power { scale, exponent } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(param("scale", *scale, "must be positive"));
                }
                if !(*exponent < 0.0 && exponent.is_finite()) {
                    return Err(param("exponent", *exponent, "a decreasing rate needs p < 0"));
                }
                Ok(())
            }
            RateSpec::Table { points } => check_table(points, true),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            RateSpec::Power { scale, exponent } => scale * t.powf(*exponent),
            RateSpec::Table { points } => loglog(points, t),
        }
    }

    /// The inverse function, again a decreasing rate.
    pub fn inverse(&self) -> RateSpec {
        match self {
            RateSpec::Power { scale, exponent } => RateSpec::Power {
                scale: scale.powf(-1.0 / exponent),
                exponent: 1.0 / exponent,
            },
            RateSpec::Table { points } => RateSpec::Table {
                points: points.iter().rev().map(|(t, v)| (*v, *t)).collect(),
            },
        }
    }

    pub fn inverse_value(&self, v: f64) -> f64 {
        self.inverse().value(v)
    }
}

/// Shape of the curve `x ↦ x + i f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveShape {
    /// `f(t) = a tᵐ`.
    Power { scale: f64, exponent: f64 },
    Table { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub shape: CurveShape,
    /// Doubling constant: `f(t/2) ≥ f(t)/C₀` and `f(3t/2) ≤ C₀ f(t)`.
    pub c0: f64,
}

impl CurveSpec {
    /// `f(t) = tᵐ` with `C₀ = 2ᵐ`.
    pub fn power(exponent: f64) -> Result<Self> {
        Self::scaled_power(1.0, exponent)
    }

    pub fn scaled_power(scale: f64, exponent: f64) -> Result<Self> {
        let spec = Self {
            shape: CurveShape::Power { scale, exponent },
            c0: 2f64.powf(exponent).max(1.5f64.powf(exponent)).max(1.0 + 1e-9),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn table(points: Vec<(f64, f64)>, c0: f64) -> Result<Self> {
        check_table(&points, false)?;
        let spec = Self {
            shape: CurveShape::Table { points },
            c0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.shape {
            CurveShape::Power { scale, exponent } => scale * t.powf(*exponent),
            CurveShape::Table { points } => loglog(points, t),
        }
    }

    /// Checks the defining inequalities on the mesh `t = 2^{-j/4}`,
    /// `j = 0..=800`.
    pub fn validate(&self) -> Result<()> {
        if let CurveShape::Power { scale, exponent } = &self.shape {
            if !(*scale > 0.0 && *scale <= 1.0) {
                return Err(param("scale", *scale, "f(t) ≤ t on (0, 1] needs 0 < a ≤ 1"));
            }
            if !(*exponent > 1.0 && exponent.is_finite()) {
                return Err(param("exponent", *exponent, "f(t)/t → 0 needs m > 1"));
            }
        }
        if !(self.c0 > 1.0 && self.c0.is_finite()) {
            return Err(param("c0", self.c0, "must exceed one"));
        }
        let mesh: Vec<f64> = (0..=800).map(|j| 2f64.powf(-(j as f64) / 4.0)).collect();
        let fail = |what: &str, t: f64| {
            Err(MajorantError::InvalidData(format!("curve profile violates {what} at t = {t:e}")))
        };
        for &t in &mesh {
            let f = self.value(t);
            if !(f > 0.0 && f <= t * (1.0 + 1e-12)) {
                return fail("0 < f(t) ≤ t", t);
            }
            if self.value(t / 2.0) * self.c0 < f * (1.0 - 1e-12) {
                return fail("f(t/2) ≥ f(t)/C₀", t);
            }
            if 1.5 * t <= 1.0 && self.value(1.5 * t) > self.c0 * f * (1.0 + 1e-12) {
                return fail("f(3t/2) ≤ C₀ f(t)", t);
            }
        }
        for w in mesh.windows(2) {
            if self.value(w[1]) >= self.value(w[0]) {
                return fail("monotonicity", w[1]);
            }
        }
        let first = self.value(1.0);
        let tail = *mesh.last().expect("nonempty");
        if self.value(tail) / tail > 0.5 * first {
            return fail("f(t)/t → 0", tail);
        }
        Ok(())
    }
}
