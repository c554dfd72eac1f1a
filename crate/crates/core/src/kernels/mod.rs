//! Poisson integrals, logarithmic potentials and the harmonic-majorant
//! builder.

pub mod majorant;
pub mod maximal;
pub mod poisson;
pub mod potential;

pub use majorant::{
    build_harmonic_majorant, far_field_ratio_sup, riesz_dyadic_data, HarmonicFunctionDescriptor,
    HarmonicMajorant, HarmonicTerm, MajorantAudit, MajorantConstants, MajorantOptions,
};
pub use maximal::{nontangential_max, stolz_samples, weak_l1_profile, StolzSampling, WeakL1Profile};
pub use poisson::{
    arc_harmonic_measure, half_plane_poisson_kernel, interval_harmonic_measure, poisson_integral,
    poisson_kernel, poisson_kernel_at, AtomicMeasure, BoundaryDensity, BoundaryMeasure, Support,
};
pub use potential::{
    averaging_ratio_bound, beta_disc_mass, blaschke_log, lemma_shrink_factor,
    log_kernel_invariant_mean, CappedPotential, LogPotential, SuperharmonicModel, ZeroSet,
};
