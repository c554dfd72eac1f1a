#![allow(dead_code)]

use std::f64::consts::TAU;

use majorant_core::dyadic::DyadicData;
use majorant_core::kernels::{AtomicMeasure, BoundaryDensity, SuperharmonicModel, Support, ZeroSet};
use majorant_core::Domain;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;

/// Random demands in `{0, 1, 2, 3}`, as exact rationals and as floats.
pub fn random_dyadic<R: Rng>(rng: &mut R, depth: u32, density: f64) -> (DyadicData<Rational64>, DyadicData<f64>) {
    let mut exact = DyadicData::<Rational64>::new(depth).unwrap();
    let mut float = DyadicData::<f64>::new(depth).unwrap();
    for n in 0..=depth {
        for k in 0..1u64 << n {
            if rng.gen::<f64>() < density {
                let v: i64 = rng.gen_range(0..=3);
                exact.set(n, k, Rational64::from_integer(v)).unwrap();
                float.set(n, k, v as f64).unwrap();
            }
        }
    }
    (exact, float)
}

/// Every value `Σ p|I|` over antichains below `(n, k)`, arcs in units of `2π`.
/// With `maximal_only` the list covers the maximal antichains (the cuts of
/// the tree) only.
fn antichain_values(data: &DyadicData<Rational64>, n: u32, k: u64, maximal_only: bool) -> Vec<Rational64> {
    let own = *data.get(n, k) * Rational64::new(1, 1i64 << n);
    if n == data.depth() {
        return if maximal_only { vec![own] } else { vec![Rational64::from_integer(0), own] };
    }
    let left = antichain_values(data, n + 1, 2 * k, maximal_only);
    let right = antichain_values(data, n + 1, 2 * k + 1, maximal_only);
    let mut out = Vec::with_capacity(left.len() * right.len() + 1);
    out.push(own);
    for a in &left {
        for b in &right {
            out.push(*a + *b);
        }
    }
    out
}

/// Brute-force packing constant. Every antichain is listed up to depth 4;
/// at larger depths only the cuts are, which suffices since demands are
/// nonnegative and any antichain extends to a cut.
pub fn exhaustive_packing(data: &DyadicData<Rational64>) -> Rational64 {
    let maximal_only = data.depth() > 4;
    antichain_values(data, 0, 0, maximal_only)
        .into_iter()
        .max()
        .expect("root antichain")
}

/// Mass of `I_{n,k}` under a density constant on the leaves at `depth`.
pub fn density_arc_mass(density: &BoundaryDensity, depth: u32, n: u32, k: u64) -> f64 {
    let leaf = TAU * (-(depth as f64)).exp2();
    let span = 1u64 << (depth - n);
    (k * span..(k + 1) * span)
        .map(|j| density.value_at((j as f64 + 0.5) * leaf) * leaf)
        .sum()
}

/// `|I_{n,k}| p_{n,k}` in radians.
pub fn demand(data: &DyadicData<f64>, n: u32, k: u64) -> f64 {
    TAU * (-(n as f64)).exp2() * data.get(n, k)
}

pub fn random_atoms<R: Rng>(rng: &mut R, max_atoms: usize) -> AtomicMeasure {
    let count = rng.gen_range(1..=max_atoms);
    let atoms = (0..count)
        .map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.05..3.0)))
        .collect();
    AtomicMeasure::new(Support::Circle, atoms).unwrap()
}

/// `Σ m_k log(1/d(·, w_k))` plus a Poisson integral of atoms plus a constant.
pub fn random_model<R: Rng>(rng: &mut R) -> SuperharmonicModel {
    let count = rng.gen_range(1..=6);
    let zeros = (0..count)
        .map(|_| {
            let w = Complex64::from_polar(rng.gen_range(0.0..2.5f64).tanh(), rng.gen_range(0.0..TAU));
            (w, rng.gen_range(0.2..2.0))
        })
        .collect();
    let zeros = ZeroSet::new(Domain::Disk, zeros).unwrap();
    SuperharmonicModel::new(zeros, random_atoms(rng, 4), rng.gen_range(0.0..1.0)).unwrap()
}
