//! Points `a_k = x_k + i f(x_k)` spaced `2δ` apart along the curve.

use num_complex::Complex64;

use super::rates::CurveSpec;
use crate::error::{param, MajorantError, Result};
use crate::geometry::half_plane;

pub const DEFAULT_X_MIN: f64 = 1e-6;
const MAX_POINTS: usize = 20_000_000;

fn on_curve(spec: &CurveSpec, x: f64) -> Complex64 {
    Complex64::new(x, spec.value(x))
}

/// Next abscissa below `x` at hyperbolic distance `gap` along the curve.
fn next_abscissa(spec: &CurveSpec, x: f64, gap: f64) -> Result<f64> {
    let a = on_curve(spec, x);
    let g = |t: f64| half_plane::hyperbolic_distance(a, on_curve(spec, t)) - gap;
    let mut step = spec.value(x);
    let mut lo = x - step;
    let mut tries = 0;
    while !(lo > 0.0 && g(lo) > 0.0) {
        tries += 1;
        if tries > 2000 {
            return Err(MajorantError::RootFinding(format!(
                "no bracket for the spacing {gap} below x = {x:e}"
            )));
        }
        step *= 2.0;
        lo = if step < x { x - step } else { x * 0.5f64.powi(tries) };
    }
    let mut hi = x;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = if g(lo).abs() < g(hi).abs() { lo } else { hi };
    let miss = g(root).abs();
    if miss > 1e-10 {
        return Err(MajorantError::RootFinding(format!(
            "spacing below x = {x:e} missed by {miss:e}"
        )));
    }
    Ok(root)
}

/// `a₀ = x_start + i f(x_start)` and successors with `ρ(a_k, a_{k+1}) = 2δ`
/// until the abscissa drops below [`DEFAULT_X_MIN`].
pub fn curve_sequence(spec: &CurveSpec, delta: f64, x_start: f64) -> Result<Vec<Complex64>> {
    curve_sequence_to(spec, delta, x_start, DEFAULT_X_MIN)
}

pub fn curve_sequence_to(spec: &CurveSpec, delta: f64, x_start: f64, x_min: f64) -> Result<Vec<Complex64>> {
    spec.validate()?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(param("delta", delta, "must lie in (0, 1/2)"));
    }
    if !(x_start > 0.0 && x_start <= 1.0) {
        return Err(param("x_start", x_start, "must lie in (0, 1]"));
    }
    if !(x_min > 0.0 && x_min < x_start) {
        return Err(param("x_min", x_min, "must lie in (0, x_start)"));
    }
    let mut points = vec![on_curve(spec, x_start)];
    let mut x = x_start;
    loop {
        let next = next_abscissa(spec, x, 2.0 * delta)?;
        if next < x_min {
            break;
        }
        points.push(on_curve(spec, next));
        x = next;
        if points.len() > MAX_POINTS {
            return Err(param("x_min", x_min, "the sequence would exceed the point budget"));
        }
    }
    Ok(points)
}
