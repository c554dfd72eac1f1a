//! The reduced function of a `γ`-log-Lipschitz `H` need not be
//! `γ`-log-Lipschitz.
//!
//! With `f(z) = Re((1+z)/(1-z))`, `g_ε(z) = f((1-δ)z/(1-ε))` and `h = g_ε` on
//! the circle `|w| = 1-ε`, the function `H(z) = sup_w h(w) e^{-γρ(w,z)}` is
//! its own `γ`-envelope, and its reduction agrees with `g_ε` inside the
//! circle, whose log-gradient at the origin is `2(1-δ)/(1-ε)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Attachment, ExperimentReport};
use crate::envelope::log_lipschitz_envelope;
use crate::error::{param, Result};
use crate::geometry::disk;
use crate::grid::{DiskGrid, GridFunction};
use crate::reduction::{reduce, ReduceOptions, ReductionStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RnotlipOptions {
    /// Upper bound for the radial step; the circle `|w| = 1-ε` is a ring.
    pub d_rho: f64,
    pub n_theta: usize,
    /// Hyperbolic width of the grid beyond the circle.
    pub margin: f64,
    /// Nodes on the circle for the sup defining `H`, before refinement.
    pub circle_nodes: usize,
    pub reduce: ReduceOptions,
}

impl Default for RnotlipOptions {
    fn default() -> Self {
        Self {
            d_rho: 0.02,
            n_theta: 256,
            margin: 0.2,
            circle_nodes: 2048,
            reduce: ReduceOptions::default(),
        }
    }
}

fn poisson_one(z: Complex64) -> f64 {
    disk::one_minus_abs2(z) / (Complex64::new(1.0, 0.0) - z).norm_sqr()
}

/// `sup_{|w| = 1-ε} g_ε(w) e^{-γρ(w, z)}`, maximized over a uniform mesh in
/// angle and refined by golden-section search.
pub fn rnotlip_h(gamma: f64, delta: f64, eps: f64, circle_nodes: usize) -> impl Fn(Complex64) -> f64 + Sync {
    let radius = 1.0 - eps;
    let kappa = 1.0 - delta;
    move |z: Complex64| {
        let value = |theta: f64| {
            let w = Complex64::from_polar(radius, theta);
            poisson_one(Complex64::from_polar(kappa, theta)) * (-gamma * disk::hyperbolic_distance(w, z)).exp()
        };
        let step = TAU / circle_nodes as f64;
        let (mut best_theta, mut best) = (0.0, value(0.0));
        for k in 1..circle_nodes {
            let t = k as f64 * step;
            let v = value(t);
            if v > best {
                best = v;
                best_theta = t;
            }
        }
        let (mut a, mut b) = (best_theta - step, best_theta + step);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
        let (mut fc, mut fd) = (value(c), value(d));
        for _ in 0..60 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = value(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = value(d);
            }
        }
        best.max(fc).max(fd)
    }
}

pub fn run_rnotlip(gamma: f64, delta: f64, eps: f64, options: &RnotlipOptions) -> Result<ExperimentReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(param("delta", delta, "must lie in (0, 1)"));
    }
    if !(eps > 0.0 && eps < 0.5 * delta) {
        return Err(param("eps", eps, "needs 0 < ε < δ/2"));
    }
    let target = 2.0 * (1.0 - delta) / (1.0 - eps);
    if !(gamma > 0.0 && gamma < 2.0 && gamma < target) {
        return Err(param("gamma", gamma, "needs 0 < γ < 2(1-δ)/(1-ε) < 2"));
    }
    if !options.n_theta.is_multiple_of(2) {
        return Err(param("n_theta", options.n_theta as f64, "must be even"));
    }
    let mut report = ExperimentReport::new(
        "rnotlip",
        json!({ "gamma": gamma, "delta": delta, "eps": eps, "options": options }),
    );

    let rho_circle = (1.0 - eps).atanh();
    let rings = (rho_circle / options.d_rho).ceil() as usize;
    let d_rho = rho_circle / rings as f64;
    let extra = (options.margin / d_rho).ceil() as usize;
    let grid = DiskGrid::new(d_rho, rings + extra, options.n_theta)?;
    report.measure("d_rho", d_rho, 0.0);
    report.measure("circle_ring", rings as f64, 0.0);

    let h = rnotlip_h(gamma, delta, eps, options.circle_nodes);
    let values: Vec<f64> = grid.points().par_iter().map(|z| h(*z)).collect();
    let big_h = GridFunction::new(grid, values)?;
    let g_eps = |z: Complex64| poisson_one(z * ((1.0 - delta) / (1.0 - eps)));

    let envelope = log_lipschitz_envelope(&big_h, gamma)?;
    let fixed = big_h
        .values()
        .iter()
        .zip(envelope.values())
        .map(|(a, b)| (b - a).abs() / a)
        .fold(0.0f64, f64::max);
    report.measure("envelope_fixed_point", fixed, 1e-12);
    report.check(
        "envelope_fixed_point",
        fixed <= 1e-3,
        format!("max |L_γ(H) - H|/H = {fixed:.3e}"),
    );

    let points = grid.points();
    let excess = points
        .iter()
        .zip(big_h.values())
        .map(|(z, v)| v / g_eps(*z) - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    report.measure("h_over_g_excess", excess, 1e-9);
    report.check(
        "h_below_g",
        excess <= 1e-9,
        format!("max H/g_ε - 1 = {excess:.4e} on the grid"),
    );

    let reduction = reduce(&big_h, &options.reduce)?;
    report.measure("iterations", reduction.iterations as f64, 0.0);
    report.measure("last_change", reduction.last_change, options.reduce.tol);
    report.check(
        "reduction_converged",
        reduction.status == ReductionStatus::Converged,
        format!("{} after {} sweeps", reduction.status, reduction.iterations),
    );
    let r_h = reduction.final_grid();

    let inner = 1.0 - 2.0 * eps;
    let mut identity = 0.0f64;
    let mut radial = Attachment::new("radial_profile", &["x", "reduced", "g_eps", "h"]);
    for (idx, z) in points.iter().enumerate() {
        if z.norm() <= inner {
            let g = g_eps(*z);
            identity = identity.max((r_h.get(idx) - g).abs() / g);
        }
    }
    for m in [0, options.n_theta / 2] {
        for ring in 0..=grid.n_rho() {
            let idx = grid.index(ring, m);
            let z = grid.point(idx);
            let x = if m == 0 { z.norm() } else { -z.norm() };
            radial.rows.push(vec![x, r_h.get(idx), g_eps(z), big_h.get(idx)]);
        }
    }
    radial.rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    radial.rows.dedup_by(|a, b| a[0] == b[0]);
    report.measure("interior_identity", identity, 1e-2);
    report.check(
        "reduced_equals_g",
        identity <= 1e-2,
        format!("max |R(H) - g_ε|/g_ε = {identity:.4e} on |z| ≤ {inner}"),
    );

    let x1 = d_rho.tanh();
    let right = r_h.get(grid.index(1, 0));
    let left = r_h.get(grid.index(1, options.n_theta / 2));
    let gradient = (right.ln() - left.ln()) / (2.0 * x1);
    let g_gradient = (g_eps(Complex64::new(x1, 0.0)).ln() - g_eps(Complex64::new(-x1, 0.0)).ln()) / (2.0 * x1);
    report.measure("log_gradient", gradient, 0.15);
    report.measure("log_gradient_target", target, 0.0);
    report.measure("log_gradient_of_g_on_grid", g_gradient, x1 * x1);
    report.check(
        "gradient_matches_target",
        (gradient - target).abs() <= 0.15,
        format!("∂ₓ log R(H)(0) ≈ {gradient:.4} against 2(1-δ)/(1-ε) = {target:.4}"),
    );
    report.check(
        "gradient_exceeds_gamma",
        gradient > gamma,
        format!("∂ₓ log R(H)(0) ≈ {gradient:.4} against γ = {gamma}"),
    );
    report.attachments.push(radial);
    let mut trace = Attachment::new("trace", &["iteration", "value_at_origin"]);
    trace.rows = reduction
        .trace
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i as f64, *v])
        .collect();
    report.attachments.push(trace);

    report.verdict = if report.all_passed() {
        format!("reduced function is not {gamma}-log-Lipschitz")
    } else {
        "inconclusive".into()
    };
    Ok(report)
}
