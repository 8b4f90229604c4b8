//! Shared fixtures for the transform benchmarks.

use ridgelet_core::asymptotics::sample_named;
use ridgelet_core::{Field2D, RidgeletGrids};

/// Gaussian bump on `[-8, 8]²` with `n` nodes per axis.
pub fn gaussian_field(n: usize) -> Field2D {
    let (gx, gy) = Field2D::square_grid(8.0, n).expect("valid grid");
    sample_named("gaussian", gx, gy).expect("gaussian is always available")
}

/// Coarse transform grids that keep one iteration well under a second.
pub fn bench_grids() -> RidgeletGrids {
    RidgeletGrids::new(16, 129, 8.0, 12, 1.0 / 8.0, 8.0).expect("valid grids")
}
