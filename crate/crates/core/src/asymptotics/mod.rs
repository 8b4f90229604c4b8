//! Scaling (quasi)asymptotics read off ridgelet transforms.

pub mod estimate;
pub mod gallery;
pub mod orbit;
pub mod radial;
pub mod tauberian;

pub use estimate::{estimate_degree, pool_estimates, DegreeEstimate, DegreeVerdict};
pub use gallery::{gallery, gallery_in, sample_named, GalleryEntry, GalleryKind, LimitDescriptor, Regime, SlowlyVaryingKind, SlowlyVaryingModel};
pub use orbit::{scaling_orbit, DirectionWindow, Orbit, OrbitMode, Probe, ProbeSet, ScalingSource};
pub use radial::{riesz_radon_coefficient, wavelet_pairing, RadialRadon};
pub use tauberian::{
    analyze_scaling, boundedness_fit, boundedness_fit_samples, limit_value, tauberian_check, tauberian_check_orbits, BoundFit,
    BoundSample, ProbeReport, ProbeVerdict, ScalingAnalysis, TauberianReport, Verdict,
};
