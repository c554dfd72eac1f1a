//! Weak-L¹ sharpness: a superharmonic `φ` with `|{Mφ > t}| ≤ 2σ⁻¹(t)` and no
//! harmonic majorant when `∫₁^∞ s = ∞`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::counterexample::{counterexample_phi, CounterexampleOptions};
use super::rates::{CurveSpec, RateSpec};
use super::{Attachment, ExperimentReport};
use crate::error::{param, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpMaxfOptions {
    pub counterexample: CounterexampleOptions,
    /// Levels `t` of the distribution function.
    pub thresholds: Vec<f64>,
    pub aperture: f64,
    /// Points of the `t`-mesh on `[-2, 2]` for the kernel bound (doubled once).
    pub kernel_mesh: usize,
    /// Dyadic blocks `[2ʲ, 2ʲ⁺¹]` used to probe `∫₁^∞ s`.
    pub tail_blocks: u32,
}

impl Default for SharpMaxfOptions {
    fn default() -> Self {
        Self {
            counterexample: CounterexampleOptions {
                x_min: 5e-5,
                ..Default::default()
            },
            thresholds: (0..=12).map(|j| 10f64.powf(1.0 + j as f64 / 4.0)).collect(),
            aperture: 1.0,
            kernel_mesh: 801,
            tail_blocks: 40,
        }
    }
}

pub fn default_cutoffs() -> Vec<f64> {
    (5..=20).map(|j| 0.5f64.powi(j)).collect()
}

/// `∫₀¹ P_{x²}(x - t) dx` and its error estimate.
pub fn kernel_integral(t: f64) -> (f64, f64) {
    let f = |x: f64| {
        let x2 = x * x;
        x2 / ((x - t) * (x - t) + x2 * x2) / PI
    };
    let mut cuts = vec![0.0, 1.0];
    for c in [t - t * t, t, t + t * t] {
        if c > 0.0 && c < 1.0 {
            cuts.push(c);
        }
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    cuts.windows(2).fold((0.0, 0.0), |(v, e), w| {
        let out = quadrature::integrate(f, w[0], w[1], 1e-12);
        (v + out.integral, e + out.error_estimate)
    })
}

fn kernel_sup(mesh: usize) -> (f64, f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..mesh {
        let t = -2.0 + 4.0 * i as f64 / (mesh - 1) as f64;
        let (v, e) = kernel_integral(t);
        if v > best.0 {
            best = (v, t, e);
        }
    }
    best
}

/// `∫_{a}^{b} g(x) dx` through `x = eᵘ`.
fn log_integral<F: Fn(f64) -> f64>(g: F, a: f64, b: f64) -> (f64, f64) {
    let out = quadrature::integrate(|u: f64| g(u.exp()) * u.exp(), a.ln(), b.ln(), 1e-11);
    (out.integral, out.error_estimate)
}

pub fn run_sharpmaxf(s: &RateSpec, curve: &CurveSpec, cutoffs: &[f64], options: &SharpMaxfOptions) -> Result<ExperimentReport> {
    s.validate()?;
    if cutoffs.len() < 2 || cutoffs.iter().any(|c| !(*c > 0.0 && *c < 0.25)) {
        return Err(param("cutoffs", cutoffs.len() as f64, "need at least two cutoffs in (0, 1/4)"));
    }
    if options.kernel_mesh < 3 {
        return Err(param("kernel_mesh", options.kernel_mesh as f64, "needs at least three points"));
    }
    let sigma = s.inverse();
    let delta = options.counterexample.delta;
    let mut report = ExperimentReport::new(
        "sharpmaxf",
        json!({
            "s": s,
            "curve": curve,
            "cutoffs": cutoffs,
            "options": options,
        }),
    );

    let blocks: Vec<f64> = (0..options.tail_blocks)
        .map(|j| log_integral(|t| s.value(t), 2f64.powi(j as i32), 2f64.powi(j as i32 + 1)).0)
        .collect();
    let tail_ratio = blocks.last().copied().unwrap_or(0.0) / blocks[0];
    report.measure("s_tail_block_ratio", tail_ratio, 1e-9);
    let divergent = report.check(
        "s_integral_diverges",
        tail_ratio >= 0.5,
        format!(
            "∫ s over [2^{}, 2^{}] is {:.4} of the first block",
            options.tail_blocks - 1,
            options.tail_blocks,
            tail_ratio
        ),
    );

    let cx = counterexample_phi(&sigma, curve, &options.counterexample)?;
    report.measure("k0", cx.k0 as f64, 0.0);
    report.measure("points", cx.points.len() as f64, 0.0);
    report.measure("c_delta", cx.c_delta, 1e-6);
    report.measure("c1", cx.c1, 1e-6);

    let mut profile = Attachment::new("weak_l1_profile", &["t", "level_set_bound", "two_sigma_inverse"]);
    let mut worst = 0.0f64;
    for &t in &options.thresholds {
        let m = cx.level_set_bound(t, options.aperture);
        let target = 2.0 * sigma.inverse_value(t);
        worst = worst.max(m / target);
        profile.rows.push(vec![t, m, target]);
    }
    report.measure("weak_l1_ratio", worst, 1e-12);
    report.check(
        "weak_l1_profile",
        worst <= 1.1,
        format!("max |{{Mφ > t}}| / (2σ⁻¹(t)) = {worst:.4} over the thresholds"),
    );
    report.attachments.push(profile);

    let (k_coarse, t_coarse, e_coarse) = kernel_sup(options.kernel_mesh);
    let (k_fine, t_fine, e_fine) = kernel_sup(2 * options.kernel_mesh - 1);
    let drift = (k_fine - k_coarse).abs() / k_fine;
    report.measure("kernel_sup", k_fine, e_fine.max(e_coarse));
    report.measure("kernel_sup_argmax", t_fine, 4.0 / (2 * options.kernel_mesh - 2) as f64);
    report.measure("kernel_mesh_drift", drift, e_fine + e_coarse);
    report.check(
        "kernel_bound",
        k_fine.is_finite() && drift <= 0.05,
        format!("sup ∫₀¹P_(x²)(x-t)dx = {k_fine:.6} at t = {t_fine:.4} (coarse {k_coarse:.6} at {t_coarse:.4})"),
    );

    let harnack = (-4.0 * delta).exp();
    report.measure("harnack_constant", harnack, 0.0);
    let mut cut_sorted: Vec<f64> = cutoffs.to_vec();
    cut_sorted.sort_by(|a, b| b.total_cmp(a));
    let mut masses = Attachment::new("mass_lower_bounds", &["cutoff", "mass", "mu_lower_bound"]);
    let mut previous: Option<f64> = None;
    let mut increments = Vec::new();
    let mut max_err = 0.0f64;
    for &xk in &cut_sorted {
        let (mass, err) = log_integral(|x| sigma.value(4.0 * x), xk, 1.0);
        max_err = max_err.max(err);
        if let Some(p) = previous {
            increments.push(mass - p);
        }
        previous = Some(mass);
        masses.rows.push(vec![xk, mass, harnack * mass / (2.0 * k_fine)]);
    }
    let min_increment = increments.iter().copied().fold(f64::INFINITY, f64::min);
    let per_halving = increments
        .iter()
        .zip(cut_sorted.windows(2))
        .map(|(d, w)| d / (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min);
    report.measure("mass_min_increment", min_increment, max_err);
    report.measure("mass_min_increment_per_halving", per_halving, max_err);
    report.measure("mass_at_last_cutoff", previous.unwrap_or(0.0), max_err);
    let growing = report.check(
        "mass_grows_without_plateau",
        increments.iter().all(|d| *d > 0.0) && per_halving >= 0.9 * LN_2 / 4.0,
        format!(
            "smallest increment per halving {per_halving:.6} against 0.9·log 2/4 = {:.6}",
            0.9 * LN_2 / 4.0
        ),
    );
    report.attachments.push(masses);

    report.verdict = if divergent && growing {
        "no-harmonic-majorant evidence".into()
    } else {
        "inconclusive".into()
    };
    Ok(report)
}
