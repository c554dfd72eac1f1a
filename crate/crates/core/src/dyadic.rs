//! The dyadic model: demands `p_{n,k}` on the dyadic arcs of the circle, the
//! packing recursion, and the construction of a boundary measure dominating
//! every demand.
//!
//! Arc `I_{n,k}` covers angles `[2πk 2⁻ⁿ, 2π(k+1) 2⁻ⁿ)`; the Whitney square
//! `Q_{n,k}` is the annular sector above it with `1 - 2⁻ⁿ ≤ r < 1 - 2⁻ⁿ⁻¹`.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::ops::{Add, Div, Mul};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MajorantError, Result};
use crate::kernels::BoundaryDensity;

/// Scalars the packing recursion can run on.
///
/// `f64` measures arcs in radians. [`Rational64`] measures arcs in units of
/// `2π`, so data given as rational multiples of `π` stay exact.
pub trait DyadicScalar:
    Clone
    + PartialOrd
    + Zero
    + Add<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn arc_length(level: u32) -> Self;
    fn is_admissible(&self) -> bool;
}

impl DyadicScalar for f64 {
    fn arc_length(level: u32) -> Self {
        TAU * (-(level as f64)).exp2()
    }

    fn is_admissible(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }
}

impl DyadicScalar for Rational64 {
    fn arc_length(level: u32) -> Self {
        Rational64::new(1, 1i64 << level)
    }

    fn is_admissible(&self) -> bool {
        *self >= Rational64::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicIndex {
    level: u32,
    position: u64,
}

impl DyadicIndex {
    pub fn new(level: u32, position: u64) -> Result<Self> {
        if level >= 63 || position >= (1u64 << level) {
            return Err(MajorantError::DyadicIndex { level, position });
        }
        Ok(Self { level, position })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    /// Angular extent `[θ₀, θ₁)` of the arc.
    pub fn arc(&self) -> (f64, f64) {
        let len = f64::arc_length(self.level);
        (self.position as f64 * len, (self.position + 1) as f64 * len)
    }

    /// Radial extent `[1 - 2⁻ⁿ, 1 - 2⁻ⁿ⁻¹)` of the Whitney square.
    pub fn whitney_radii(&self) -> (f64, f64) {
        let n = self.level as f64;
        (1.0 - (-n).exp2(), 1.0 - (-n - 1.0).exp2())
    }

    pub fn whitney_contains(&self, z: Complex64) -> bool {
        whitney_square_of(z) == Some(*self)
    }
}

/// Index of the Whitney square containing an interior point.
pub fn whitney_square_of(z: Complex64) -> Option<DyadicIndex> {
    let r = z.norm();
    if !(r < 1.0) {
        return None;
    }
    // Largest n with 1 - 2^-n <= r, corrected for rounding of the logarithm.
    let mut level = (-(1.0 - r).log2()).floor().max(0.0) as u32;
    while level > 0 && 1.0 - (-(level as f64)).exp2() > r {
        level -= 1;
    }
    while 1.0 - (-(level as f64) - 1.0).exp2() <= r {
        level += 1;
    }
    if level >= 62 {
        return None;
    }
    let theta = z.im.atan2(z.re).rem_euclid(TAU);
    let count = 1u64 << level;
    let position = ((theta / TAU * count as f64).floor() as u64).min(count - 1);
    Some(DyadicIndex { level, position })
}

/// Nonnegative demands `p_{n,k}` for all levels `n ≤ depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicData<T = f64> {
    depth: u32,
    levels: Vec<Vec<T>>,
}

impl<T: DyadicScalar> DyadicData<T> {
    pub fn new(depth: u32) -> Result<Self> {
        if depth > 30 {
            return Err(MajorantError::InvalidData(format!(
                "depth {depth} exceeds the supported maximum of 30"
            )));
        }
        let levels = (0..=depth).map(|n| vec![T::zero(); 1usize << n]).collect();
        Ok(Self { depth, levels })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn get(&self, level: u32, position: u64) -> &T {
        &self.levels[level as usize][position as usize]
    }

    pub fn set(&mut self, level: u32, position: u64, value: T) -> Result<()> {
        let idx = DyadicIndex::new(level, position)?;
        if level > self.depth {
            return Err(MajorantError::DyadicIndex { level, position });
        }
        if !value.is_admissible() {
            return Err(MajorantError::InvalidData(format!(
                "demand at ({level}, {position}) must be finite and nonnegative"
            )));
        }
        self.levels[idx.level as usize][idx.position as usize] = value;
        Ok(())
    }

    pub fn level(&self, level: u32) -> &[T] {
        &self.levels[level as usize]
    }
}

impl DyadicData<f64> {
    /// Parse the text format: a `depth N` line, then `n k p` lines. Blank
    /// lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut data: Option<Self> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| MajorantError::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (&mut data, fields.as_slice()) {
                (None, ["depth", n]) => {
                    let depth = n
                        .parse::<u32>()
                        .map_err(|e| parse_err(format!("bad depth: {e}")))?;
                    data = Some(Self::new(depth).map_err(|e| parse_err(e.to_string()))?);
                }
                (None, _) => return Err(parse_err("expected `depth N` first".into())),
                (Some(d), [n, k, p]) => {
                    let n = n
                        .parse::<u32>()
                        .map_err(|e| parse_err(format!("bad level: {e}")))?;
                    let k = k
                        .parse::<u64>()
                        .map_err(|e| parse_err(format!("bad position: {e}")))?;
                    let p = p
                        .parse::<f64>()
                        .map_err(|e| parse_err(format!("bad value: {e}")))?;
                    d.set(n, k, p).map_err(|e| parse_err(e.to_string()))?;
                }
                (Some(_), _) => return Err(parse_err("expected `n k p`".into())),
            }
        }
        data.ok_or(MajorantError::Parse {
            line: 0,
            message: "empty input".into(),
        })
    }

    /// Text format with nonzero demands only.
    pub fn to_text(&self) -> String {
        let mut out = format!("depth {}\n", self.depth);
        for (n, level) in self.levels.iter().enumerate() {
            for (k, p) in level.iter().enumerate() {
                if *p != 0.0 {
                    let _ = writeln!(out, "{n} {k} {p:?}");
                }
            }
        }
        out
    }
}

/// Result of the packing recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicDP<T = f64> {
    /// `S_{n,k}`: best total `Σ p|I|` over disjoint dyadic subarcs of `I_{n,k}`.
    pub best: Vec<Vec<T>>,
    /// `p̃_{n,k} = S_{n,k} / |I_{n,k}|`.
    pub modified: Vec<Vec<T>>,
}

impl<T: DyadicScalar> DyadicDP<T> {
    pub fn root(&self) -> &T {
        &self.best[0][0]
    }
}

/// Bottom-up packing recursion `S = max(p|I|, S_left + S_right)`.
pub fn packing_dp<T: DyadicScalar>(data: &DyadicData<T>) -> DyadicDP<T> {
    let depth = data.depth as usize;
    let mut best: Vec<Vec<T>> = vec![Vec::new(); depth + 1];
    best[depth] = data.levels[depth]
        .iter()
        .map(|p| p.clone() * T::arc_length(depth as u32))
        .collect();
    for n in (0..depth).rev() {
        let len = T::arc_length(n as u32);
        let below = &best[n + 1];
        let level: Vec<T> = data.levels[n]
            .par_iter()
            .enumerate()
            .map(|(k, p)| {
                let own = p.clone() * len.clone();
                let split = below[2 * k].clone() + below[2 * k + 1].clone();
                if own > split {
                    own
                } else {
                    split
                }
            })
            .collect();
        best[n] = level;
    }
    let modified = best
        .iter()
        .enumerate()
        .map(|(n, level)| {
            let len = T::arc_length(n as u32);
            level.iter().map(|s| s.clone() / len.clone()).collect()
        })
        .collect();
    DyadicDP { best, modified }
}

/// Least `S` with `Σ p|I| ≤ S` over every disjoint family of dyadic arcs.
pub fn packing_condition<T: DyadicScalar>(data: &DyadicData<T>) -> T {
    packing_dp(data).root().clone()
}

/// A positive measure on the circle, uniform on each leaf arc at a fixed depth.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    depth: u32,
    leaves: Vec<f64>,
    cumulative: Vec<f64>,
    uniform: bool,
}

impl CircleMeasure {
    pub fn new(depth: u32, leaves: Vec<f64>) -> Result<Self> {
        if depth > 30 || leaves.len() != 1usize << depth {
            return Err(MajorantError::InvalidData(format!(
                "expected {} leaf masses at depth {depth}, got {}",
                1u64 << depth.min(62),
                leaves.len()
            )));
        }
        if leaves.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(MajorantError::InvalidData(
                "leaf masses must be finite and nonnegative".into(),
            ));
        }
        let uniform = leaves.windows(2).all(|w| w[0] == w[1]);
        let mut cumulative = Vec::with_capacity(leaves.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for m in &leaves {
            acc += m;
            cumulative.push(acc);
        }
        Ok(Self {
            depth,
            leaves,
            cumulative,
            uniform,
        })
    }

    /// Uniform measure of the given total mass.
    pub fn uniform(depth: u32, total: f64) -> Result<Self> {
        let count = 1usize << depth;
        Self::new(depth, vec![total / count as f64; count])
    }

    pub fn zero(depth: u32) -> Result<Self> {
        Self::new(depth, vec![0.0; 1usize << depth])
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn leaves(&self) -> &[f64] {
        &self.leaves
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative[self.leaves.len()]
    }

    pub fn leaf_length(&self) -> f64 {
        f64::arc_length(self.depth)
    }

    /// `μ(I_{n,k})` for `n ≤ depth`.
    pub fn arc_mass(&self, level: u32, position: u64) -> f64 {
        assert!(level <= self.depth);
        let span = 1usize << (self.depth - level);
        let start = position as usize * span;
        self.cumulative[start + span] - self.cumulative[start]
    }

    /// Mass of `[0, θ)` for `θ ∈ [0, 2π]`.
    fn cumulative_at(&self, theta: f64) -> f64 {
        let len = self.leaf_length();
        let x = (theta / len).clamp(0.0, self.leaves.len() as f64);
        let idx = (x.floor() as usize).min(self.leaves.len() - 1);
        self.cumulative[idx] + (x - idx as f64) * self.leaves[idx]
    }

    /// Mass of the counter-clockwise arc from `start` of length `length ≤ 2π`.
    pub fn arc_mass_between(&self, start: f64, length: f64) -> f64 {
        if length >= TAU {
            return self.total_mass();
        }
        if length <= 0.0 {
            return 0.0;
        }
        let a = start.rem_euclid(TAU);
        let b = a + length;
        if b <= TAU {
            self.cumulative_at(b) - self.cumulative_at(a)
        } else {
            self.total_mass() - self.cumulative_at(a) + self.cumulative_at(b - TAU)
        }
    }

    /// CSV `k,mass` over the leaves.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mass\n");
        for (k, m) in self.leaves.iter().enumerate() {
            let _ = writeln!(out, "{k},{m:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut leaves = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line == "k,mass" {
                continue;
            }
            let parse_err = |message: String| MajorantError::Parse {
                line: lineno + 1,
                message,
            };
            let (k, m) = line
                .split_once(',')
                .ok_or_else(|| parse_err("expected `k,mass`".into()))?;
            let k: usize = k.trim().parse().map_err(|e| parse_err(format!("{e}")))?;
            if k != leaves.len() {
                return Err(parse_err(format!("expected leaf {}, got {k}", leaves.len())));
            }
            leaves.push(m.trim().parse::<f64>().map_err(|e| parse_err(format!("{e}")))?);
        }
        if !leaves.len().is_power_of_two() {
            return Err(MajorantError::InvalidData(format!(
                "leaf count {} is not a power of two",
                leaves.len()
            )));
        }
        Self::new(leaves.len().trailing_zeros(), leaves)
    }

    /// The same measure as a step density on the circle.
    pub fn to_density(&self) -> BoundaryDensity {
        let len = self.leaf_length();
        let values = self.leaves.iter().map(|m| m / len).collect();
        BoundaryDensity::circle_steps(self.depth, values)
            .expect("leaf masses were validated on construction")
    }
}

/// Top-down construction of a measure with `μ(I_{n,k}) ≥ |I_{n,k}| p̃_{n,k}`
/// at every node, of total mass `S_{0,0}`.
///
/// Each child first receives its demand `|I| p̃`; whatever the parent holds
/// beyond the two demands is split in proportion to them, or evenly when both
/// demands vanish.
pub fn build_dominating_measure(data: &DyadicData<f64>) -> CircleMeasure {
    let dp = packing_dp(data);
    let mut masses = vec![*dp.root()];
    for n in 0..data.depth as usize {
        let demands = &dp.best[n + 1];
        let mut next = vec![0.0; masses.len() * 2];
        for (j, &held) in masses.iter().enumerate() {
            let a = demands[2 * j];
            let b = demands[2 * j + 1];
            let excess = (held - a - b).max(0.0);
            let (left, right) = if a + b > 0.0 {
                (a + excess * (a / (a + b)), b + excess * (b / (a + b)))
            } else {
                (0.5 * held, 0.5 * held)
            };
            next[2 * j] = left;
            next[2 * j + 1] = right;
        }
        masses = next;
    }
    CircleMeasure::new(data.depth, masses).expect("construction yields valid masses")
}

/// Domination check of a measure against `|I_{n,k}| p_{n,k}` at every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationAudit {
    pub nodes: usize,
    pub violations: usize,
    /// `min (μ(I) - |I| p)` over the nodes.
    pub min_margin: f64,
    pub total_mass: f64,
    /// `S_{0,0}` of the data.
    pub packing: f64,
}

impl DominationAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Audits `μ(I_{n,k}) ≥ |I_{n,k}| p_{n,k}` with relative slack `1e-12`.
pub fn audit_domination(measure: &CircleMeasure, data: &DyadicData<f64>) -> Result<DominationAudit> {
    if measure.depth() < data.depth() {
        return Err(MajorantError::InvalidData(format!(
            "measure depth {} is below the data depth {}",
            measure.depth(),
            data.depth()
        )));
    }
    let mut audit = DominationAudit {
        nodes: 0,
        violations: 0,
        min_margin: f64::INFINITY,
        total_mass: measure.total_mass(),
        packing: packing_condition(data),
    };
    for n in 0..=data.depth() {
        for (k, p) in data.level(n).iter().enumerate() {
            let demand = f64::arc_length(n) * p;
            let mass = measure.arc_mass(n, k as u64);
            audit.nodes += 1;
            audit.min_margin = audit.min_margin.min(mass - demand);
            if mass < demand * (1.0 - 1e-12) - 1e-12 {
                audit.violations += 1;
            }
        }
    }
    Ok(audit)
}

/// Step density `f = Σ_{I_{n,k} ∋ θ} p_{n,k}`, constant on the leaves.
pub fn direct_density(data: &DyadicData<f64>) -> BoundaryDensity {
    let depth = data.depth;
    let mut values = vec![0.0; 1usize << depth];
    for n in 0..=depth {
        let span = 1usize << (depth - n);
        for (k, p) in data.level(n).iter().enumerate() {
            if *p != 0.0 {
                for v in &mut values[k * span..(k + 1) * span] {
                    *v += p;
                }
            }
        }
    }
    BoundaryDensity::circle_steps(depth, values).expect("sums of admissible demands")
}

/// Square-kernel integral `μ(I_z) / |I_z|` with
/// `I_z = {ζ : z ∈ Γ_α(ζ)}`. Returns `None` when `I_z` is empty.
pub fn square_kernel_value(measure: &CircleMeasure, z: Complex64, aperture: f64) -> Option<f64> {
    let r = z.norm();
    if !(r < 1.0) || !(aperture > 0.0) {
        return None;
    }
    let slack = aperture * (1.0 - r) * (1.0 + r);
    let half_width = if r == 0.0 {
        if aperture >= 1.0 {
            std::f64::consts::PI
        } else {
            return None;
        }
    } else {
        // |z - e^{iθ}|² = 1 + r² - 2r cos(θ - ψ) ≤ slack²
        let c = (1.0 + r * r - slack * slack) / (2.0 * r);
        if c >= 1.0 {
            return None;
        }
        c.max(-1.0).acos()
    };
    let psi = z.im.atan2(z.re);
    let length = 2.0 * half_width;
    Some(measure.arc_mass_between(psi - half_width, length) / length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_data_gives_zero_dp() {
        let data = DyadicData::<f64>::new(4).unwrap();
        let dp = packing_dp(&data);
        assert!(dp.best.iter().flatten().all(|s| *s == 0.0));
        assert!(dp.modified.iter().flatten().all(|s| *s == 0.0));
        assert_eq!(packing_condition(&data), 0.0);
        let mu = build_dominating_measure(&data);
        assert_eq!(mu.total_mass(), 0.0);
        assert!(direct_density(&data).values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn depth_one_example() {
        let mut data = DyadicData::new(1).unwrap();
        data.set(0, 0, 1.0).unwrap();
        data.set(1, 0, 3.0).unwrap();
        let dp = packing_dp(&data);
        assert_abs_diff_eq!(*dp.root(), 3.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(dp.modified[0][0], 1.5, epsilon = 1e-14);
        let mu = build_dominating_measure(&data);
        assert_abs_diff_eq!(mu.leaves()[0], 3.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(mu.leaves()[1], 0.0, epsilon = 1e-14);
        let audit = audit_domination(&mu, &data).unwrap();
        assert!(audit.passed());
        assert_eq!(audit.nodes, 3);
        assert_abs_diff_eq!(audit.min_margin, 0.0, epsilon = 1e-14);
        let short = CircleMeasure::new(1, vec![PI, PI]).unwrap();
        assert_eq!(audit_domination(&short, &data).unwrap().violations, 1);
    }

    #[test]
    fn depth_two_example() {
        let mut data = DyadicData::new(2).unwrap();
        data.set(1, 0, 1.0).unwrap();
        data.set(2, 1, 4.0).unwrap();
        let dp = packing_dp(&data);
        assert_abs_diff_eq!(*dp.root(), 2.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(dp.modified[0][0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_demand_packing() {
        let mut data = DyadicData::new(3).unwrap();
        data.set(3, 5, 2.0).unwrap();
        assert_abs_diff_eq!(packing_condition(&data), PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn exact_mode_matches_float_mode() {
        let mut exact = DyadicData::<Rational64>::new(1).unwrap();
        exact.set(0, 0, Rational64::from_integer(1)).unwrap();
        exact.set(1, 0, Rational64::from_integer(3)).unwrap();
        // S = 3π = (3/2)·2π
        assert_eq!(packing_condition(&exact), Rational64::new(3, 2));
    }

    #[test]
    fn even_split_measure() {
        let mut data = DyadicData::new(1).unwrap();
        data.set(1, 0, 1.0).unwrap();
        data.set(1, 1, 1.0).unwrap();
        let mu = build_dominating_measure(&data);
        assert_abs_diff_eq!(mu.leaves()[0], PI, epsilon = 1e-14);
        assert_abs_diff_eq!(mu.leaves()[1], PI, epsilon = 1e-14);
    }

    #[test]
    fn excess_is_split_in_proportion_to_demands() {
        let mut data = DyadicData::new(1).unwrap();
        data.set(0, 0, 4.0).unwrap(); // 8π at the root
        data.set(1, 0, 3.0).unwrap(); // demand 3π
        data.set(1, 1, 1.0).unwrap(); // demand π
        let mu = build_dominating_measure(&data);
        assert_abs_diff_eq!(mu.leaves()[0], 6.0 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(mu.leaves()[1], 2.0 * PI, epsilon = 1e-13);

        let mut data = DyadicData::new(1).unwrap();
        data.set(0, 0, 1.0).unwrap();
        let mu = build_dominating_measure(&data);
        assert_abs_diff_eq!(mu.leaves()[0], PI, epsilon = 1e-14);
        assert_abs_diff_eq!(mu.leaves()[1], PI, epsilon = 1e-14);
    }

    #[test]
    fn direct_density_examples() {
        let mut data = DyadicData::new(1).unwrap();
        data.set(1, 0, 2.0).unwrap();
        let f = direct_density(&data);
        assert_eq!(f.values(), &[2.0, 0.0]);
        assert_abs_diff_eq!(f.integral(), TAU, epsilon = 1e-14);

        let mut data = DyadicData::new(1).unwrap();
        data.set(0, 0, 1.0).unwrap();
        data.set(1, 0, 1.0).unwrap();
        assert_eq!(direct_density(&data).values(), &[2.0, 1.0]);
    }

    #[test]
    fn invalid_demands_are_rejected() {
        let mut data = DyadicData::new(2).unwrap();
        assert!(data.set(1, 2, 1.0).is_err());
        assert!(data.set(3, 0, 1.0).is_err());
        assert!(data.set(0, 0, -1.0).is_err());
        assert!(data.set(0, 0, f64::NAN).is_err());
        assert!(data.set(0, 0, f64::INFINITY).is_err());
    }

    #[test]
    fn text_format_roundtrip() {
        let text = "# demo\ndepth 2\n0 0 1.5\n2 3 0.25\n";
        let data = DyadicData::from_text(text).unwrap();
        assert_eq!(*data.get(0, 0), 1.5);
        assert_eq!(*data.get(2, 3), 0.25);
        assert_eq!(DyadicData::from_text(&data.to_text()).unwrap(), data);
        assert!(DyadicData::from_text("0 0 1\n").is_err());
        assert!(DyadicData::from_text("depth 1\n1 2 1\n").is_err());
        assert!(DyadicData::from_text("depth 1\n1 x 1\n").is_err());
    }

    #[test]
    fn circle_measure_csv_roundtrip() {
        let mu = CircleMeasure::new(2, vec![0.5, 1.0 / 3.0, 0.0, 2.0]).unwrap();
        let back = CircleMeasure::from_csv(&mu.to_csv()).unwrap();
        assert_eq!(back, mu);
        assert!(mu.to_csv().starts_with("k,mass\n"));
        assert!(CircleMeasure::from_csv("k,mass\n0,1\n1,1\n2,1\n").is_err());
    }

    #[test]
    fn arc_masses() {
        let mu = CircleMeasure::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(mu.arc_mass(1, 1), 7.0);
        assert_eq!(mu.arc_mass(0, 0), 10.0);
        assert_abs_diff_eq!(mu.arc_mass_between(0.0, PI / 4.0), 0.5, epsilon = 1e-14);
        // wraps across θ = 0: last half leaf plus first half leaf
        assert_abs_diff_eq!(mu.arc_mass_between(-PI / 4.0, PI / 2.0), 2.5, epsilon = 1e-14);
        assert_eq!(mu.arc_mass_between(1.0, 7.0), 10.0);
    }

    #[test]
    fn whitney_squares_locate_points() {
        let idx = whitney_square_of(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!((idx.level(), idx.position()), (0, 0));
        let idx = whitney_square_of(Complex64::new(0.6, 0.01)).unwrap();
        assert_eq!((idx.level(), idx.position()), (1, 0));
        let idx = whitney_square_of(Complex64::new(-0.8, -0.01)).unwrap();
        assert_eq!((idx.level(), idx.position()), (2, 2));
        // boundary of the radial range belongs to the outer square
        let idx = whitney_square_of(Complex64::new(0.75, 0.0)).unwrap();
        assert_eq!(idx.level(), 2);
        assert!(idx.whitney_contains(Complex64::new(0.75, 0.0)));
        assert!(whitney_square_of(Complex64::new(1.0, 0.0)).is_none());
    }

    #[test]
    fn square_kernel_examples() {
        let uniform = CircleMeasure::uniform(6, TAU).unwrap();
        for z in [Complex64::new(0.5, 0.2), Complex64::new(-0.9, 0.1), Complex64::new(0.0, 0.99)] {
            let v = square_kernel_value(&uniform, z, 2.0).unwrap();
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
        let zero = CircleMeasure::zero(4).unwrap();
        assert_eq!(square_kernel_value(&zero, Complex64::new(0.5, 0.0), 2.0), Some(0.0));
        // near the origin with a small aperture the shadow is empty
        assert_eq!(square_kernel_value(&uniform, Complex64::new(0.1, 0.0), 0.5), None);
        assert_eq!(square_kernel_value(&uniform, Complex64::new(0.0, 0.0), 0.5), None);
    }

    #[test]
    fn square_kernel_single_leaf() {
        // Leaf I_{N,0} = [0, 2π/2^N) carries mass 1; pick z on the ray through
        // the leaf's midpoint with shadow exactly twice the leaf.
        let depth = 5u32;
        let mut leaves = vec![0.0; 1 << depth];
        leaves[0] = 1.0;
        let mu = CircleMeasure::new(depth, leaves).unwrap();
        let leaf = TAU / (1u64 << depth) as f64;
        let half_width = leaf; // |I_z| = 2·leaf
        let alpha = 2.0;
        // Solve 1 + r² - 2r cos(hw) = α²(1-r²)² for r by bisection.
        let g = |r: f64| 1.0 + r * r - 2.0 * r * half_width.cos() - (alpha * (1.0 - r * r)).powi(2);
        let (mut lo, mut hi) = (0.5, 1.0 - 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let r = 0.5 * (lo + hi);
        let z = Complex64::from_polar(r, leaf / 2.0);
        let value = square_kernel_value(&mu, z, alpha).unwrap();
        let expected = (1u64 << (depth - 2)) as f64 / PI;
        assert_abs_diff_eq!(value, expected, epsilon = 1e-6 * expected);
    }
}
