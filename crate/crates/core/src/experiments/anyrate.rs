//! A superharmonic `φ ≤ s(y)` with no harmonic majorant, for any rate `s`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::counterexample::{counterexample_phi, CounterexampleOptions};
use super::defect::{superharmonic_defect, CenterRegion, CircleSampling};
use super::rates::{CurveSpec, RateSpec};
use super::{Attachment, ExperimentReport};
use crate::error::Result;
use crate::geometry::{half_plane, Domain, StolzAngle, Vertex};
use crate::kernels::{nontangential_max, StolzSampling};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnyRateOptions {
    pub counterexample: CounterexampleOptions,
    pub growth_samples: usize,
    pub defect: CircleSampling,
    pub xi_range: (f64, f64),
    pub xi_samples: usize,
    pub aperture: f64,
    pub seed: u64,
}

impl Default for AnyRateOptions {
    fn default() -> Self {
        Self {
            counterexample: CounterexampleOptions {
                x_min: 8e-4,
                ..Default::default()
            },
            growth_samples: 20_000,
            defect: CircleSampling {
                trials: 1000,
                ..Default::default()
            },
            xi_range: (1e-3, 1e-1),
            xi_samples: 60,
            aperture: 1.0,
            seed: 3,
        }
    }
}

/// Curve with `f(ξ) ≤ e^{-2δ} s⁻¹(ξ⁻²)` and `f(ξ) ≤ ξ²`.
pub fn anyrate_curve(s: &RateSpec, delta: f64) -> Result<CurveSpec> {
    let c = (2.0 * delta).exp();
    match s {
        RateSpec::Power { scale, exponent } => {
            let m = 2f64.max(-2.0 / exponent);
            CurveSpec::scaled_power(scale.powf(-1.0 / exponent).min(1.0) / c, m)
        }
        RateSpec::Table { .. } => {
            let f = |x: f64| (x * x).min(s.inverse_value(1.0 / (x * x))) / c;
            let points: Vec<(f64, f64)> = (0..=240).rev().map(|j| 2f64.powf(-(j as f64) / 4.0)).map(|x| (x, f(x))).collect();
            let c0 = points
                .iter()
                .map(|(x, v)| {
                    let up = if 1.5 * x <= 1.0 { f(1.5 * x) / v } else { 1.0 };
                    (v / f(0.5 * x)).max(up)
                })
                .fold(1.0f64, f64::max);
            CurveSpec::table(points, 1.01 * c0)
        }
    }
}

pub fn run_anyrate(s: &RateSpec, options: &AnyRateOptions) -> Result<ExperimentReport> {
    s.validate()?;
    let delta = options.counterexample.delta;
    let sigma = RateSpec::power(1.0, -2.0)?;
    let curve = anyrate_curve(s, delta)?;
    let mut report = ExperimentReport::new(
        "anyrate",
        json!({ "s": s, "sigma": sigma, "curve": curve, "options": options }),
    );
    let cx = counterexample_phi(&sigma, &curve, &options.counterexample)?;
    report.measure("k0", cx.k0 as f64, 0.0);
    report.measure("points", cx.points.len() as f64, 0.0);
    report.measure("c_delta", cx.c_delta, 1e-6);
    report.measure("c1", cx.c1, 1e-6);

    // growth: near-curve samples in every capped disc plus a boundary strip
    let y_top = 0.1f64.min(s.inverse_value(cx.c1));
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut samples: Vec<Complex64> = Vec::with_capacity(options.growth_samples);
    let tail = cx.tail().to_vec();
    while samples.len() < options.growth_samples {
        if samples.len().is_multiple_of(2) && !tail.is_empty() {
            let a = tail[rng.gen_range(0..tail.len())];
            let (c, r) = half_plane::disc_euclidean(a, delta);
            let z = c + Complex64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>());
            samples.push(z);
        } else {
            let ly = (1e-9f64).ln() + ((y_top).ln() - (1e-9f64).ln()) * rng.gen::<f64>();
            samples.push(Complex64::new(-1.0 + 2.5 * rng.gen::<f64>(), ly.exp()));
        }
    }
    let growth: Vec<(Complex64, f64, f64)> = samples
        .par_iter()
        .filter(|z| z.im <= y_top)
        .map(|z| (*z, cx.value(*z), s.value(z.im)))
        .collect();
    let worst = growth
        .iter()
        .map(|(_, phi, bound)| phi / bound)
        .fold(0.0f64, f64::max);
    report.measure("growth_ratio", worst, 1e-12);
    report.measure("growth_checked", growth.len() as f64, 0.0);
    report.check(
        "growth_bound",
        worst <= 1.0,
        format!("max φ(x+iy)/s(y) = {worst:.6} over {} samples with y ≤ {y_top:.4}", growth.len()),
    );

    // sub-mean property, half the circles centered near the capped discs
    let half = CircleSampling {
        trials: options.defect.trials / 2,
        ..options.defect.clone()
    };
    let near: Vec<Complex64> = (0..half.trials)
        .map(|_| {
            let a = tail[rng.gen_range(0..tail.len())];
            let (c, r) = half_plane::disc_euclidean(a, 1.2 * delta);
            c + Complex64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>())
        })
        .collect();
    let phi = |z: Complex64| cx.value(z);
    let d_near = superharmonic_defect(phi, Domain::HalfPlane, &CenterRegion::Points { centers: near }, &half)?;
    let rest = CircleSampling {
        trials: options.defect.trials - half.trials,
        seed: options.defect.seed + 1,
        ..options.defect.clone()
    };
    let d_box = superharmonic_defect(
        phi,
        Domain::HalfPlane,
        &CenterRegion::Box {
            x: (-0.5, 1.2),
            y: (1e-6, 1.0),
        },
        &rest,
    )?;
    let defect = d_near.max_defect.max(d_box.max_defect);
    report.measure("superharmonic_defect", defect, 1e-12);
    report.check(
        "superharmonic",
        defect <= 1e-6,
        format!("max circle mean - center over {} circles = {defect:.3e}", options.defect.trials),
    );

    // Mφ(ξ) ξ² along the curve abscissae
    let (xi_lo, xi_hi) = options.xi_range;
    let candidates: Vec<usize> = (cx.k0..cx.points.len())
        .filter(|k| (xi_lo..=xi_hi).contains(&cx.points[*k].re))
        .collect();
    let stride = (candidates.len() / options.xi_samples.max(1)).max(1);
    let chosen: Vec<usize> = candidates.iter().copied().step_by(stride).collect();
    let sampling = StolzSampling {
        height_samples: 24,
        width_samples: 5,
        min_height: 1e-9,
    };
    let mut profile = Attachment::new("maximal_profile", &["xi", "maximal_lower", "scaled"]);
    let mut lower = f64::INFINITY;
    for k in &chosen {
        let a = cx.points[*k];
        let angle = StolzAngle::new(Vertex::Line(a.re), options.aperture, Some(1.0))?;
        let m = nontangential_max(phi, &angle, &sampling, &[a])?;
        let scaled = m * a.re * a.re;
        lower = lower.min(scaled);
        profile.rows.push(vec![a.re, m, scaled]);
    }
    report.measure("maximal_scaled_lower", lower, 1e-12);
    report.measure("maximal_samples", chosen.len() as f64, 0.0);
    let covered = chosen.iter().any(|k| cx.points[*k].re <= 2.0 * xi_lo);
    report.check(
        "maximal_lower_bound",
        !chosen.is_empty() && covered && lower > 0.1,
        format!("min Mφ(ξ)ξ² = {lower:.4} over {} abscissae in [{xi_lo:e}, {xi_hi:e}]", chosen.len()),
    );
    report.attachments.push(profile);

    report.verdict = if report.all_passed() {
        "no-harmonic-majorant evidence".into()
    } else {
        "inconclusive".into()
    };
    Ok(report)
}
