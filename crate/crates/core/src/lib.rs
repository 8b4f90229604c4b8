//! Continuous ridgelet analysis on the plane: 1-D wavelet transforms, the Radon transform,
//! ridgelet analysis and synthesis, and scaling asymptotics read off the coefficients.

pub mod asymptotics;
pub mod error;
pub mod io;
pub mod numerics;
pub mod radon;
pub mod ridgelet;
pub mod selftest;
pub mod wavelet1d;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{Field2D, Grid1D, LogGrid, SphereGrid};
pub use radon::{RadonMethod, Sinogram};
pub use ridgelet::{Provenance, RidgeletCoefficients, RidgeletGrids, SynthesisOptions};
pub use wavelet1d::{WaveletCoefficients1D, WaveletProfile};
