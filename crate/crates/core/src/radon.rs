//! Radon transform of sampled fields on lines, its dual (back-projection) and the
//! dilation identity `Rf_λ(u,p) = λ^{-(n-1)} Rf(u,λp)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{catmull_rom_hat, interpolate_1d, CompensatedSum, Field2D, Grid1D, SphereGrid};

/// Boundary/peak ratio above which a field counts as non-decaying.
pub const DECAY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadonMethod {
    /// Trapezoid along each line through the bicubic interpolant.
    Direct,
    /// Inverse 1-D Fourier transform of the central slice of the sampled spectrum.
    FourierSlice,
}

impl std::str::FromStr for RadonMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "fourier_slice" | "slice" => Ok(Self::FourierSlice),
            other => Err(Error::Unknown { what: "radon method", name: other.into() }),
        }
    }
}

/// `Rf(u_j, p_k)` indexed `[direction * np + offset]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub sphere: SphereGrid,
    pub grid_p: Grid1D,
    pub values: Vec<f64>,
    /// Set when the source field does not decay to 1e-10 of its peak at its boundary.
    pub non_decaying: bool,
}

impl Sinogram {
    pub fn zeros(sphere: SphereGrid, grid_p: Grid1D) -> Self {
        Self { sphere, grid_p, values: vec![0.0; sphere.count * grid_p.count], non_decaying: false }
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.grid_p.count..(j + 1) * self.grid_p.count]
    }

    #[inline]
    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.grid_p.count + k]
    }

    /// Largest `|Rf(θ+π,p) - Rf(θ,-p)|` relative to the largest entry, when the p grid is
    /// symmetric and the direction count even.
    pub fn antipodal_defect(&self) -> Option<f64> {
        let np = self.grid_p.count;
        if (self.grid_p.origin + self.grid_p.last()).abs() > 1e-12 * self.grid_p.step {
            return None;
        }
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for j in 0..self.sphere.count {
            let jj = self.sphere.antipode(j)?;
            for k in 0..np {
                worst = worst.max((self.at(jj, k) - self.at(j, np - 1 - k)).abs());
            }
        }
        Some(if peak == 0.0 { worst } else { worst / peak })
    }

    /// `Σ_j w Σ_k w_k Rf ρ` — the sinogram inner product.
    pub fn inner(&self, other: &Sinogram) -> f64 {
        let wp = self.grid_p.trapezoid_weights();
        let mut s = CompensatedSum::default();
        for (k, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            s.add(a * b * wp[k % self.grid_p.count]);
        }
        s.value() * self.sphere.weight()
    }
}

/// Radon transform of a sampled field.
pub fn radon(f: &Field2D, sphere: &SphereGrid, gp: &Grid1D, method: RadonMethod) -> Result<Sinogram> {
    if f.nx() < 8 || f.ny() < 8 {
        return Err(Error::TooCoarse(format!(
            "field is {}x{}; lines need at least 8 samples",
            f.nx(),
            f.ny()
        )));
    }
    let rows: Vec<Vec<f64>> = match method {
        RadonMethod::Direct => (0..sphere.count).into_par_iter().map(|j| direct_row(f, sphere.direction(j), gp)).collect(),
        RadonMethod::FourierSlice => {
            let plan = SlicePlan::new(f);
            (0..sphere.count).into_par_iter().map(|j| plan.row(f, sphere.direction(j), gp)).collect()
        }
    };
    Ok(Sinogram {
        sphere: *sphere,
        grid_p: *gp,
        values: rows.concat(),
        non_decaying: f.boundary_ratio() > DECAY_THRESHOLD,
    })
}

fn direct_row(f: &Field2D, (c, s): (f64, f64), gp: &Grid1D) -> Vec<f64> {
    let h = f.grid_x.step.min(f.grid_y.step);
    // the interpolant vanishes two cells outside the sampled rectangle
    let (x0, x1) = (f.grid_x.origin - 2.0 * f.grid_x.step, f.grid_x.last() + 2.0 * f.grid_x.step);
    let (y0, y1) = (f.grid_y.origin - 2.0 * f.grid_y.step, f.grid_y.last() + 2.0 * f.grid_y.step);
    (0..gp.count)
        .map(|k| {
            let p = gp.node(k);
            let (fx, fy) = (p * c, p * s);
            // clip x = (fx,fy) + t(-s,c) against the padded rectangle
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (start, dir, a, b) in [(fx, -s, x0, x1), (fy, c, y0, y1)] {
                if dir.abs() < 1e-300 {
                    if start < a || start > b {
                        return 0.0;
                    }
                } else {
                    let (t0, t1) = ((a - start) / dir, (b - start) / dir);
                    lo = lo.max(t0.min(t1));
                    hi = hi.min(t0.max(t1));
                }
            }
            if hi <= lo {
                return 0.0;
            }
            // nodes t = m h symmetric about the foot point, so the antipodal line reuses them
            let m0 = (lo / h).ceil() as i64;
            let m1 = (hi / h).floor() as i64;
            let mut acc = 0.0;
            for m in m0..=m1 {
                let t = m as f64 * h;
                acc += f.interpolate(fx - t * s, fy + t * c);
            }
            acc * h
        })
        .collect()
}

/// Central-slice evaluation: `f̂(ωu)` is the exact spectrum of the zero-extended bicubic
/// interpolant (sample spectrum times the cardinal-function spectrum), summed separably.
/// The inverse transform in ω uses a period of twice the field diameter (the 2× zero
/// padding) and runs to three times the grid Nyquist frequency, where the cardinal
/// spectrum has decayed.
struct SlicePlan {
    dw: f64,
    count: usize,
}

impl SlicePlan {
    fn new(f: &Field2D) -> Self {
        let diameter = 2.0 * f.radius();
        let period = 2.0 * diameter;
        let dw = TAU / period;
        let band = 3.0 * std::f64::consts::PI / f.grid_x.step.min(f.grid_y.step);
        Self { dw, count: (band / dw).floor() as usize }
    }

    fn row(&self, f: &Field2D, (c, s): (f64, f64), gp: &Grid1D) -> Vec<f64> {
        let (nx, ny) = (f.nx(), f.ny());
        let xs = f.grid_x.nodes();
        let ys = f.grid_y.nodes();
        let (hx, hy) = (f.grid_x.step, f.grid_y.step);
        let mut spectrum = Vec::with_capacity(self.count + 1);
        let mut row_sum = vec![Complex64::new(0.0, 0.0); ny];
        for k in 0..=self.count {
            let w = k as f64 * self.dw;
            let ex: Vec<Complex64> = xs.iter().map(|x| Complex64::from_polar(hx, -w * c * x)).collect();
            for (i, slot) in row_sum.iter_mut().enumerate() {
                let vals = &f.values[i * nx..(i + 1) * nx];
                let mut acc = Complex64::new(0.0, 0.0);
                for (v, e) in vals.iter().zip(&ex) {
                    acc += e * *v;
                }
                *slot = acc;
            }
            let mut total = Complex64::new(0.0, 0.0);
            for (i, r) in row_sum.iter().enumerate() {
                total += r * Complex64::from_polar(hy, -w * s * ys[i]);
            }
            spectrum.push(total * (catmull_rom_hat(w * c * hx) * catmull_rom_hat(w * s * hy)));
        }
        (0..gp.count)
            .map(|m| {
                let p = gp.node(m);
                let mut acc = 0.5 * spectrum[0].re;
                for (k, v) in spectrum.iter().enumerate().skip(1) {
                    acc += (v * Complex64::from_polar(1.0, k as f64 * self.dw * p)).re;
                }
                acc * self.dw / std::f64::consts::PI
            })
            .collect()
    }
}

/// Back-projection `R*ρ(x) = ∫ ρ(u, x·u) du` with its coverage metric.
#[derive(Debug, Clone, PartialEq)]
pub struct BackProjection {
    pub field: Field2D,
    /// Fraction of (x, u) pairs whose offset `x·u` fell inside the p grid.
    pub coverage: f64,
}

impl BackProjection {
    pub fn low_coverage(&self) -> bool {
        self.coverage < 0.99
    }
}

pub fn dual_radon(rho: &Sinogram, gx: &Grid1D, gy: &Grid1D) -> Result<BackProjection> {
    if let Some(k) = rho.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sinogram entry at index {k}")));
    }
    let w = rho.sphere.weight();
    let dirs: Vec<(f64, f64)> = (0..rho.sphere.count).map(|j| rho.sphere.direction(j)).collect();
    let rows: Vec<(Vec<f64>, usize)> = (0..gy.count)
        .into_par_iter()
        .map(|i| {
            let y = gy.node(i);
            let mut missed = 0;
            let row = (0..gx.count)
                .map(|jx| {
                    let x = gx.node(jx);
                    let mut acc = 0.0;
                    for (j, (c, s)) in dirs.iter().enumerate() {
                        match interpolate_1d(rho.row(j), &rho.grid_p, x * c + y * s) {
                            Some(v) => acc += v,
                            None => missed += 1,
                        }
                    }
                    acc * w
                })
                .collect();
            (row, missed)
        })
        .collect();
    let total = (gx.count * gy.count * dirs.len()) as f64;
    let missed: usize = rows.iter().map(|r| r.1).sum();
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(BackProjection { field: Field2D::new(*gx, *gy, values)?, coverage: 1.0 - missed as f64 / total })
}

/// Both sides of the dilation identity: `radon(f_λ)` and `λ^{-1} Rf(u, λp)`.
///
/// `f_λ` lives on the dilated grid, so neither side loses support to the window.
pub fn radon_dilation_pair(
    f: &Field2D,
    lambda: f64,
    sphere: &SphereGrid,
    gp: &Grid1D,
    method: RadonMethod,
) -> Result<(Sinogram, Sinogram)> {
    let dilated = radon(&f.dilated(lambda)?, sphere, gp, method)?;
    let base = radon(f, sphere, gp, method)?;
    let mut rescaled = Sinogram::zeros(*sphere, *gp);
    rescaled.non_decaying = base.non_decaying;
    for j in 0..sphere.count {
        for k in 0..gp.count {
            let v = interpolate_1d(base.row(j), gp, lambda * gp.node(k)).unwrap_or(0.0);
            rescaled.values[j * gp.count + k] = v / lambda;
        }
    }
    Ok((dilated, rescaled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{relative_l2, sample_function};
    use std::f64::consts::PI;

    fn gaussian(n: usize) -> Field2D {
        let (gx, gy) = Field2D::square_grid(8.0, n).unwrap();
        sample_function(|x, y| (-x * x - y * y).exp(), gx, gy).unwrap()
    }

    #[test]
    fn gaussian_line_integrals() {
        let f = gaussian(129);
        let sphere = SphereGrid::new(16).unwrap();
        let gp = Grid1D::symmetric(4.0, 65).unwrap();
        let exact: Vec<f64> = (0..16).flat_map(|_| gp.nodes()).map(|p| PI.sqrt() * (-p * p).exp()).collect();
        let slice = radon(&f, &sphere, &gp, RadonMethod::FourierSlice).unwrap();
        let direct = radon(&f, &sphere, &gp, RadonMethod::Direct).unwrap();
        assert!(relative_l2(&slice.values, &exact) < 1e-4);
        assert!(relative_l2(&direct.values, &exact) < 1e-4);
        assert!(relative_l2(&direct.values, &slice.values) < 5e-5);
        assert!((slice.at(3, 32) - PI.sqrt()).abs() < 1e-4);
        assert!(!slice.non_decaying);
    }

    #[test]
    fn zero_and_coarse() {
        let (gx, gy) = Field2D::square_grid(1.0, 16).unwrap();
        let z = Field2D::zeros(gx, gy);
        let s = radon(&z, &SphereGrid::new(8).unwrap(), &Grid1D::symmetric(1.0, 9).unwrap(), RadonMethod::Direct).unwrap();
        assert!(s.values.iter().all(|v| *v == 0.0));
        let (hx, hy) = Field2D::square_grid(1.0, 6).unwrap();
        assert!(matches!(
            radon(&Field2D::zeros(hx, hy), &SphereGrid::new(8).unwrap(), &Grid1D::symmetric(1.0, 9).unwrap(), RadonMethod::Direct),
            Err(Error::TooCoarse(_))
        ));
    }

    #[test]
    fn back_projection_of_constant() {
        let sphere = SphereGrid::new(12).unwrap();
        let gp = Grid1D::symmetric(4.0, 33).unwrap();
        let rho = Sinogram { values: vec![1.0; 12 * 33], ..Sinogram::zeros(sphere, gp) };
        let (gx, gy) = Field2D::square_grid(2.0, 9).unwrap();
        let bp = dual_radon(&rho, &gx, &gy).unwrap();
        assert!(bp.field.values.iter().all(|v| (v - TAU).abs() < 1e-12));
        assert_eq!(bp.coverage, 1.0);
    }
}
