use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::CircleMeasure;
use crate::error::{MajorantError, Result};
use crate::geometry::{disk, Domain, Point};

/// `P_z(e^{iθ}) = (1/2π)(1 - |z|²)/|z - e^{iθ}|²`.
#[inline]
pub fn poisson_kernel(z: Complex64, theta: f64) -> f64 {
    let zeta = Complex64::from_polar(1.0, theta);
    disk::one_minus_abs2(z) / (TAU * (z - zeta).norm_sqr())
}

/// `P_y(t) = (1/π) y/(y² + t²)`.
#[inline]
pub fn half_plane_poisson_kernel(y: f64, t: f64) -> f64 {
    y / (PI * (y * y + t * t))
}

/// Poisson kernel at an interior point of either domain; `boundary` is an
/// angle on the circle or a real abscissa.
pub fn poisson_kernel_at(z: &Point, boundary: f64) -> f64 {
    match z.domain() {
        Domain::Disk => poisson_kernel(z.z(), boundary),
        Domain::HalfPlane => half_plane_poisson_kernel(z.z().im, z.z().re - boundary),
    }
}

/// Harmonic measure at `z` of the counter-clockwise arc from `a` to `b`,
/// `0 ≤ b - a < 2π`.
#[inline]
pub fn arc_harmonic_measure(z: Complex64, a: f64, b: f64) -> f64 {
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    if len >= TAU {
        return 1.0;
    }
    let ea = Complex64::from_polar(1.0, a) - z;
    let eb = Complex64::from_polar(1.0, b) - z;
    let q = eb * ea.conj();
    let mut angle = q.im.atan2(q.re);
    if angle < 0.0 {
        angle += TAU;
    }
    (angle / PI - len / TAU).clamp(0.0, 1.0)
}

/// Harmonic measure at `x + iy` of the interval `[a, b]` of the real line.
#[inline]
pub fn interval_harmonic_measure(z: Complex64, a: f64, b: f64) -> f64 {
    (((b - z.re) / z.im).atan() - ((a - z.re) / z.im).atan()) / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    /// Angles in `[0, 2π]`.
    Circle,
    /// Abscissae on the real line.
    Line,
}

impl Support {
    pub fn domain(self) -> Domain {
        match self {
            Support::Circle => Domain::Disk,
            Support::Line => Domain::HalfPlane,
        }
    }
}

/// Nonnegative step density on the circle or on a bounded part of the line.
///
/// Piece `i` has value `values[i]` on `[breaks[i], breaks[i+1])`. Adjacent
/// pieces with equal values are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDensity {
    support: Support,
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl BoundaryDensity {
    pub fn new(support: Support, breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() + 1 || values.is_empty() {
            return Err(MajorantError::InvalidData(
                "a step density needs one more breakpoint than values".into(),
            ));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MajorantError::InvalidData(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if support == Support::Circle && (breaks[0] < 0.0 || breaks[breaks.len() - 1] > TAU + 1e-12)
        {
            return Err(MajorantError::InvalidData(
                "circle breakpoints must lie in [0, 2π]".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(MajorantError::InvalidData(
                "density values must be finite and nonnegative".into(),
            ));
        }
        let mut merged_breaks = vec![breaks[0]];
        let mut merged_values: Vec<f64> = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            if merged_values.last() == Some(v) {
                *merged_breaks.last_mut().expect("nonempty") = breaks[i + 1];
            } else {
                merged_values.push(*v);
                merged_breaks.push(breaks[i + 1]);
            }
        }
        Ok(Self {
            support,
            breaks: merged_breaks,
            values: merged_values,
        })
    }

    /// Constant on each of the `2^depth` dyadic leaves of the circle.
    pub fn circle_steps(depth: u32, values: Vec<f64>) -> Result<Self> {
        let count = values.len();
        if count != 1usize << depth {
            return Err(MajorantError::InvalidData(format!(
                "expected {} leaf values, got {count}",
                1u64 << depth
            )));
        }
        let breaks = (0..=count).map(|k| TAU * k as f64 / count as f64).collect();
        Self::new(Support::Circle, breaks, values)
    }

    /// Constant density over the whole circle.
    pub fn uniform_circle(value: f64) -> Result<Self> {
        Self::new(Support::Circle, vec![0.0, TAU], vec![value])
    }

    pub fn zero_circle() -> Self {
        Self::uniform_circle(0.0).expect("zero is admissible")
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Value at a boundary point, zero off the support.
    pub fn value_at(&self, t: f64) -> f64 {
        let t = match self.support {
            Support::Circle => t.rem_euclid(TAU),
            Support::Line => t,
        };
        if t < self.breaks[0] || t >= self.breaks[self.breaks.len() - 1] {
            return 0.0;
        }
        let idx = self.breaks.partition_point(|b| *b <= t) - 1;
        self.values[idx.min(self.values.len() - 1)]
    }

    /// `∫ f`.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breaks.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum()
    }

    fn piece_measure(&self, z: Complex64, a: f64, b: f64) -> f64 {
        match self.support {
            Support::Circle => arc_harmonic_measure(z, a, b),
            Support::Line => interval_harmonic_measure(z, a, b),
        }
    }
}

/// Finitely many point masses on the circle (angles) or on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    support: Support,
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    pub fn new(support: Support, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms
            .iter()
            .any(|(t, m)| !t.is_finite() || !(m.is_finite() && *m >= 0.0))
        {
            return Err(MajorantError::InvalidData(
                "atoms need finite positions and finite nonnegative masses".into(),
            ));
        }
        Ok(Self { support, atoms })
    }

    pub fn single(support: Support, position: f64, mass: f64) -> Result<Self> {
        Self::new(support, vec![(position, mass)])
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// A finite positive boundary measure with a Poisson extension.
pub trait BoundaryMeasure {
    fn domain(&self) -> Domain;

    fn total_mass(&self) -> f64;

    /// `∫ P_z dμ` for an interior `z` of [`BoundaryMeasure::domain`]; not
    /// checked.
    fn poisson_integral_raw(&self, z: Complex64) -> f64;

    fn poisson_integral(&self, z: &Point) -> Result<f64> {
        if z.domain() != self.domain() {
            return Err(MajorantError::DomainMismatch {
                left: z.domain(),
                right: self.domain(),
            });
        }
        Ok(self.poisson_integral_raw(z.z()))
    }
}

impl BoundaryMeasure for BoundaryDensity {
    fn domain(&self) -> Domain {
        self.support.domain()
    }

    fn total_mass(&self) -> f64 {
        self.integral()
    }

    fn poisson_integral_raw(&self, z: Complex64) -> f64 {
        // Circle densities are normalized so that dμ = f dθ integrates the
        // kernel with its 1/2π factor; line densities use P_y directly.
        self.values
            .iter()
            .zip(self.breaks.windows(2))
            .filter(|(v, _)| **v != 0.0)
            .map(|(v, w)| v * self.piece_measure(z, w[0], w[1]))
            .sum()
    }
}

impl BoundaryMeasure for AtomicMeasure {
    fn domain(&self) -> Domain {
        self.support.domain()
    }

    fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    fn poisson_integral_raw(&self, z: Complex64) -> f64 {
        match self.support {
            Support::Circle => self.atoms.iter().map(|(t, m)| m * poisson_kernel(z, *t)).sum(),
            Support::Line => self
                .atoms
                .iter()
                .map(|(t, m)| m * half_plane_poisson_kernel(z.im, z.re - t))
                .sum(),
        }
    }
}

impl BoundaryMeasure for CircleMeasure {
    fn domain(&self) -> Domain {
        Domain::Disk
    }

    fn total_mass(&self) -> f64 {
        CircleMeasure::total_mass(self)
    }

    fn poisson_integral_raw(&self, z: Complex64) -> f64 {
        if self.is_uniform() {
            return CircleMeasure::total_mass(self) / TAU;
        }
        let len = self.leaf_length();
        self.leaves()
            .iter()
            .enumerate()
            .filter(|(_, m)| **m != 0.0)
            .map(|(k, m)| {
                let a = k as f64 * len;
                m / len * arc_harmonic_measure(z, a, a + len)
            })
            .sum()
    }
}

/// Poisson integral of a boundary measure at a checked point.
pub fn poisson_integral<M: BoundaryMeasure + ?Sized>(measure: &M, z: &Point) -> Result<f64> {
    measure.poisson_integral(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quad_circle(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        // periodic trapezoid rule, spectrally accurate for smooth periodic f
        (0..n).map(|k| f(TAU * k as f64 / n as f64)).sum::<f64>() * TAU / n as f64
    }

    #[test]
    fn kernel_examples() {
        assert_abs_diff_eq!(poisson_kernel(Complex64::new(0.0, 0.0), 1.3), 1.0 / TAU);
        let r: f64 = 0.6;
        assert_abs_diff_eq!(
            poisson_kernel(Complex64::new(r, 0.0), 0.0),
            (1.0 + r) / (1.0 - r) / TAU,
            epsilon = 1e-14
        );
        let z = Complex64::new(0.0, 0.7);
        assert_abs_diff_eq!(quad_circle(|t| poisson_kernel(z, t), 4096), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(half_plane_poisson_kernel(2.0, 0.0), 1.0 / (2.0 * PI));
    }

    #[test]
    fn arc_measure_matches_quadrature() {
        let z = Complex64::new(0.3, -0.5);
        for (a, b) in [(0.0, 0.4), (1.0, 2.5), (5.0, 6.2), (0.1, 6.0)] {
            let n = 20000;
            let h = (b - a) / n as f64;
            let q: f64 = (0..n)
                .map(|k| poisson_kernel(z, a + (k as f64 + 0.5) * h))
                .sum::<f64>()
                * h;
            assert_abs_diff_eq!(arc_harmonic_measure(z, a, b), q, epsilon = 1e-8);
        }
        // arcs partitioning the circle sum to one
        let total: f64 = (0..7)
            .map(|k| arc_harmonic_measure(z, TAU * k as f64 / 7.0, TAU * (k + 1) as f64 / 7.0))
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn near_boundary_arc_measure() {
        let z = Complex64::from_polar(1.0 - 1e-9, 0.5);
        assert!(arc_harmonic_measure(z, 0.4, 0.6) > 1.0 - 1e-6);
        assert!(arc_harmonic_measure(z, 1.0, 2.0) < 1e-6);
    }

    #[test]
    fn poisson_integral_examples() {
        let uniform = BoundaryDensity::uniform_circle(1.0).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.9, 0.3), Complex64::new(-0.2, 0.1)] {
            assert_abs_diff_eq!(uniform.poisson_integral_raw(z), 1.0, epsilon = 1e-13);
        }
        let atom = AtomicMeasure::single(Support::Circle, 0.7, 1.0).unwrap();
        let z = Point::disk(0.2, 0.4).unwrap();
        assert_abs_diff_eq!(
            poisson_integral(&atom, &z).unwrap(),
            poisson_kernel(z.z(), 0.7),
            epsilon = 1e-15
        );
        let mu = CircleMeasure::new(3, vec![1.0, 0.0, 2.0, 0.5, 0.0, 0.0, 3.0, 1.0]).unwrap();
        let origin = Point::disk(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            poisson_integral(&mu, &origin).unwrap(),
            7.5 / TAU,
            epsilon = 1e-13
        );
        let hp = Point::half_plane(0.0, 1.0).unwrap();
        assert!(poisson_integral(&mu, &hp).is_err());
    }

    #[test]
    fn line_density_integral() {
        let f = BoundaryDensity::new(Support::Line, vec![-1.0, 1.0], vec![2.0]).unwrap();
        let z = Complex64::new(0.0, 1.0);
        assert_abs_diff_eq!(f.poisson_integral_raw(z), 2.0 * 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(f.integral(), 4.0);
    }

    #[test]
    fn density_validation_and_merging() {
        assert!(BoundaryDensity::new(Support::Circle, vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(BoundaryDensity::new(Support::Circle, vec![1.0, 0.5], vec![1.0]).is_err());
        assert!(BoundaryDensity::new(Support::Circle, vec![0.0, 1.0, 2.0], vec![1.0]).is_err());
        let f = BoundaryDensity::circle_steps(2, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.values(), &[1.0, 0.0]);
        assert_eq!(f.breaks().len(), 3);
        assert_eq!(f.value_at(0.1), 1.0);
        assert_eq!(f.value_at(4.0), 0.0);
        assert_eq!(f.value_at(-0.1), 0.0);
    }
}
