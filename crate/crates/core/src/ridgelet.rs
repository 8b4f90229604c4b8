//! The ridgelet transform `R_ψf(u,b,a) = ∫ f(x)(1/a) conj ψ((x·u-b)/a) dx` by two
//! independent paths, its synthesis operator and the inversion built from them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{catmull_rom_hat, catmull_rom_weights, CompensatedSum, Convolver, Field2D, Grid1D, LogGrid, SphereGrid};
use crate::radon::{radon, RadonMethod};
use crate::wavelet1d::{boundary_flag, cwt, reconstruction_constant, CwtMethod, ReconstructionConstant, WaveletProfile};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Direct,
    ViaRadon,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::ViaRadon => "via_radon",
        }
    }
}

/// Direction × scale × offset sampling of the transform domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeletGrids {
    pub sphere: SphereGrid,
    pub grid_b: Grid1D,
    pub grid_a: LogGrid,
}

impl RidgeletGrids {
    pub fn new(ndir: usize, nb: usize, extent: f64, na: usize, a_min: f64, a_max: f64) -> Result<Self> {
        Ok(Self {
            sphere: SphereGrid::new(ndir)?,
            grid_b: Grid1D::symmetric(extent, nb)?,
            grid_a: LogGrid::new(a_min, a_max, na)?,
        })
    }

    /// 64 directions, 257 offsets on [-8, 8], 48 scales in [2^-4, 2^3].
    pub fn reference() -> Self {
        Self::new(64, 257, 8.0, 48, 1.0 / 16.0, 8.0).expect("reference grids are valid")
    }

    /// Doubles (ndir, nb, na) `level` times, keeping the extents.
    pub fn refined(&self, level: u32) -> Result<Self> {
        let f = 1usize << level;
        Self::new(
            self.sphere.count * f,
            (self.grid_b.count - 1) * f + 1,
            0.5 * (self.grid_b.last() - self.grid_b.origin),
            (self.grid_a.count - 1) * f + 1,
            self.grid_a.a_min,
            self.grid_a.a_max,
        )
    }
}

/// `R_ψf` samples indexed `[(direction * na + scale) * nb + offset]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeletCoefficients {
    pub sphere: SphereGrid,
    pub grid_b: Grid1D,
    pub grid_a: LogGrid,
    pub values: Vec<Complex64>,
    /// Cells whose ridgelet profile has more than 1e-6 of its mass outside the data window.
    pub boundary: Vec<bool>,
    pub provenance: Provenance,
}

impl RidgeletCoefficients {
    pub fn zeros(grids: &RidgeletGrids, provenance: Provenance) -> Self {
        let n = grids.sphere.count * grids.grid_a.count * grids.grid_b.count;
        Self {
            sphere: grids.sphere,
            grid_b: grids.grid_b,
            grid_a: grids.grid_a,
            values: vec![ZERO; n],
            boundary: vec![false; n],
            provenance,
        }
    }

    pub fn grids(&self) -> RidgeletGrids {
        RidgeletGrids { sphere: self.sphere, grid_b: self.grid_b, grid_a: self.grid_a }
    }

    #[inline]
    pub fn index(&self, dir: usize, scale: usize, offset: usize) -> usize {
        (dir * self.grid_a.count + scale) * self.grid_b.count + offset
    }

    #[inline]
    pub fn at(&self, dir: usize, scale: usize, offset: usize) -> Complex64 {
        self.values[self.index(dir, scale, offset)]
    }

    pub fn tile(&self, dir: usize, scale: usize) -> &[Complex64] {
        let i = self.index(dir, scale, 0);
        &self.values[i..i + self.grid_b.count]
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }
}

fn projection_window(f: &Field2D, (c, s): (f64, f64)) -> (f64, f64) {
    let xs = [f.grid_x.origin, f.grid_x.last()];
    let ys = [f.grid_y.origin, f.grid_y.last()];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in xs {
        for y in ys {
            let t = x * c + y * s;
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    (lo, hi)
}

/// `κ(τ) = ∫∫ K_h(x) ψ_a(τ + x·u) dx` — the ridgelet integrated against one cardinal
/// cell of the bicubic interpolant — tabulated with its derivative for Hermite lookup.
struct CellKernel {
    step: f64,
    half: f64,
    nodes: Vec<[f64; 2]>,
}

impl CellKernel {
    fn build(psi: &WaveletProfile, a: f64, (c, s): (f64, f64), hx: f64, hy: f64) -> Self {
        let band = psi.band_limit() / a;
        let step = PI / (32.0 * band);
        let half = psi.radius() * a + 2.0 * (c.abs() * hx + s.abs() * hy);
        let conv = Convolver::new((2.5 * 2.0 * half / step).ceil() as usize);
        let n = conv.len();
        let period = n as f64 * step;
        // κ + iκ' in one transform: both are real, their spectra are G and iωG
        let spec: Vec<Complex64> = (0..n)
            .map(|k| {
                let w = TAU * (if k < n / 2 { k as f64 } else { k as f64 - n as f64 }) / period;
                if w.abs() > band {
                    return ZERO;
                }
                let g = psi.eval_fourier(a * w) * (catmull_rom_hat(c * hx * w) * catmull_rom_hat(s * hy * w));
                g * Complex64::new(1.0, 0.0) + g * Complex64::new(0.0, w) * Complex64::new(0.0, 1.0)
            })
            .collect();
        let z = conv.invert(spec);
        let count = (half / step).ceil() as usize + 3;
        let nodes = (0..2 * count + 1)
            .map(|i| {
                let m = i as isize - count as isize;
                let v = z[m.rem_euclid(n as isize) as usize] / step;
                [v.re, v.im * step]
            })
            .collect();
        Self { step, half: count as f64 * step, nodes }
    }

    #[inline]
    fn eval(&self, tau: f64) -> f64 {
        let p = (tau + self.half) / self.step;
        if p < 0.0 {
            return 0.0;
        }
        let k = p as usize;
        if k + 1 >= self.nodes.len() {
            return 0.0;
        }
        let t = p - k as f64;
        let (t2, t3) = (t * t, t * t * t);
        let ([v0, d0], [v1, d1]) = (self.nodes[k], self.nodes[k + 1]);
        (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * d0 + (3.0 * t2 - 2.0 * t3) * v1 + (t3 - t2) * d1
    }
}

/// Brute-force quadrature over the field nodes: each node contributes its sample times
/// the ridgelet integrated against its bicubic cardinal cell. That is the exact integral
/// of the zero-extended interpolant the Radon path sees, so both paths discretize the
/// same continuum integral even for truncated fields and ridgelets finer than the grid.
pub fn ridgelet_direct(f: &Field2D, psi: &WaveletProfile, grids: &RidgeletGrids) -> Result<RidgeletCoefficients> {
    let (gb, ga) = (grids.grid_b, grids.grid_a);
    let (hx, hy) = (f.grid_x.step, f.grid_y.step);
    // nodes below this magnitude cannot move any coefficient at double precision
    let floor = f.max_abs() * 1e-18;
    let mut nodes: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..f.ny() {
        for j in 0..f.nx() {
            let v = f.at(i, j);
            if v.abs() > floor {
                nodes.push((f.grid_x.node(j), f.grid_y.node(i), v * hx * hy));
            }
        }
    }
    let tiles: Vec<(usize, usize)> =
        (0..grids.sphere.count).flat_map(|d| (0..ga.count).map(move |s| (d, s))).collect();
    let rows: Vec<Vec<Complex64>> = tiles
        .par_iter()
        .map(|&(d, sc)| {
            let (c, s) = grids.sphere.direction(d);
            let kernel = CellKernel::build(psi, ga.node(sc), (c, s), hx, hy);
            let reach = kernel.half;
            let mut acc = vec![0.0f64; gb.count];
            for &(x, y, wv) in &nodes {
                let t = x * c + y * s;
                let k0 = gb.position(t - reach).floor().max(0.0) as usize;
                let k1 = (gb.position(t + reach).ceil() as isize).min(gb.count as isize - 1);
                if k1 < k0 as isize {
                    continue;
                }
                for (k, slot) in acc.iter_mut().enumerate().take(k1 as usize + 1).skip(k0) {
                    *slot += wv * kernel.eval(t - gb.node(k));
                }
            }
            acc.into_iter().map(|v| Complex64::new(v, 0.0)).collect()
        })
        .collect();
    let mut out = RidgeletCoefficients::zeros(grids, Provenance::Direct);
    for (&(d, sc), row) in tiles.iter().zip(rows) {
        let (lo, hi) = projection_window(f, grids.sphere.direction(d));
        let a = ga.node(sc);
        let base = out.index(d, sc, 0);
        out.values[base..base + gb.count].copy_from_slice(&row);
        for k in 0..gb.count {
            out.boundary[base + k] = boundary_flag(psi, lo, hi, gb.node(k), a);
        }
    }
    Ok(out)
}

/// Radon transform followed by a 1-D wavelet transform per direction.
pub fn ridgelet_via_radon(f: &Field2D, psi: &WaveletProfile, grids: &RidgeletGrids) -> Result<RidgeletCoefficients> {
    ridgelet_via_radon_with(f, psi, grids, RadonMethod::Direct)
}

pub fn ridgelet_via_radon_with(
    f: &Field2D,
    psi: &WaveletProfile,
    grids: &RidgeletGrids,
    method: RadonMethod,
) -> Result<RidgeletCoefficients> {
    let gb = grids.grid_b;
    // The trapezoid rule along p aliases once ψ at the finest scale plus the field's band
    // exceed the sampling frequency; refine the offset lattice by an integer factor.
    let field_band = PI / f.grid_x.step.max(f.grid_y.step);
    let needed = gb.step * (psi.band_limit() / grids.grid_a.a_min + field_band) / TAU;
    let refine = needed.ceil().max(1.0) as usize;
    let step = gb.step / refine as f64;
    let fine_b = Grid1D::new(gb.origin, step, (gb.count - 1) * refine + 1)?;
    // offsets on the fine lattice extended to cover every line through the field
    let reach = f.radius() + 2.0 * f.grid_x.step.max(f.grid_y.step);
    let below = ((gb.origin + reach) / step).ceil().max(0.0) as usize;
    let above = ((reach - gb.last()) / step).ceil().max(0.0) as usize;
    let gp = Grid1D::new(gb.origin - below as f64 * step, step, fine_b.count + below + above)?;
    let sino = radon(f, &grids.sphere, &gp, method)?;
    let per_dir: Vec<Result<_>> = (0..grids.sphere.count)
        .into_par_iter()
        .map(|d| cwt(sino.row(d), &gp, psi, &fine_b, &grids.grid_a, CwtMethod::Auto))
        .collect();
    let mut out = RidgeletCoefficients::zeros(grids, Provenance::ViaRadon);
    for (d, w) in per_dir.into_iter().enumerate() {
        let w = w?;
        for sc in 0..grids.grid_a.count {
            let base = out.index(d, sc, 0);
            for k in 0..gb.count {
                let src = sc * fine_b.count + k * refine;
                out.values[base + k] = w.values[src];
                out.boundary[base + k] = w.boundary[src];
            }
        }
    }
    Ok(out)
}

/// Knobs of the synthesis quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    /// Offset oversampling of the intermediate per-direction profiles.
    pub oversample: usize,
    /// Exponent `e` of the scale measure `a^e da` (the identity needs `e = -n = -2`).
    pub measure_exponent: i32,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { oversample: 8, measure_exponent: -2 }
    }
}

/// `R^t_ηΦ(x) = ∫∫∫ Φ(u,b,a) η_{u,b,a}(x) db da du / a²` (real part).
pub fn ridgelet_synthesis(phi: &RidgeletCoefficients, eta: &WaveletProfile, gx: &Grid1D, gy: &Grid1D) -> Result<Field2D> {
    ridgelet_synthesis_with(phi, eta, gx, gy, SynthesisOptions::default())
}

pub fn ridgelet_synthesis_with(
    phi: &RidgeletCoefficients,
    eta: &WaveletProfile,
    gx: &Grid1D,
    gy: &Grid1D,
    opts: SynthesisOptions,
) -> Result<Field2D> {
    let z = synthesis_complex(phi, eta, gx, gy, opts)?;
    Field2D::new(*gx, *gy, z.into_iter().map(|v| v.re).collect())
}

/// For each direction the profile `H_u(p) = Σ_a w_a a^e Σ_b w_b Φ(u,b,a) η_a(p-b)` is built
/// on an oversampled offset lattice by FFT convolution (spectra accumulated over scales),
/// then read at `x·u` with Catmull-Rom interpolation. Directions are reduced in index
/// order with compensated sums, so the result does not depend on the thread count.
fn synthesis_complex(
    phi: &RidgeletCoefficients,
    eta: &WaveletProfile,
    gx: &Grid1D,
    gy: &Grid1D,
    opts: SynthesisOptions,
) -> Result<Vec<Complex64>> {
    if let Some(k) = phi.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidArgument(format!("non-finite coefficient at index {k}")));
    }
    let r = opts.oversample.max(1) as isize;
    let (gb, ga) = (phi.grid_b, phi.grid_a);
    let nb = gb.count as isize;
    let delta = gb.step / r as f64;
    let radius = gx.origin.abs().max(gx.last().abs()).hypot(gy.origin.abs().max(gy.last().abs()));
    let m_lo = ((-radius - gb.origin) / delta).floor() as isize - 3;
    let m_hi = ((radius - gb.origin) / delta).ceil() as isize + 3;
    let up_len = (r * (nb - 1) + 1) as usize;
    let t_lo = m_lo - r * (nb - 1);
    let k_len = (m_hi - t_lo + 1) as usize;
    let conv = Convolver::new(up_len + k_len - 1);
    let wb = gb.trapezoid_weights();
    let wa = ga.log_weights();
    // kernel spectra depend on the scale only
    let kernels: Vec<(Vec<Complex64>, f64)> = (0..ga.count)
        .into_par_iter()
        .map(|j| {
            let a = ga.node(j);
            let reach = eta.radius() * a;
            let taps: Vec<Complex64> = (0..k_len)
                .map(|i| {
                    let s = (t_lo + i as isize) as f64 * delta;
                    if s.abs() > reach {
                        ZERO
                    } else {
                        Complex64::new(eta.space(s / a) / a, 0.0)
                    }
                })
                .collect();
            // da = a d(ln a), so the log-trapezoid weight carries a^{e+1}
            (conv.spectrum(&taps), wa[j] * a.powi(opts.measure_exponent + 1))
        })
        .collect();
    let profiles: Vec<Vec<Complex64>> = (0..phi.sphere.count)
        .into_par_iter()
        .map(|d| {
            let mut acc = vec![ZERO; conv.len()];
            let mut up = vec![ZERO; up_len];
            for (j, (ks, wj)) in kernels.iter().enumerate() {
                let tile = phi.tile(d, j);
                if tile.iter().all(|v| *v == ZERO) {
                    continue;
                }
                for (k, v) in tile.iter().enumerate() {
                    up[k * r as usize] = v * wb[k];
                }
                let us = conv.spectrum(&up);
                for ((slot, u), kk) in acc.iter_mut().zip(&us).zip(ks) {
                    *slot += u * kk * *wj;
                }
            }
            let full = conv.invert(acc);
            (m_lo..=m_hi).map(|m| full[(m - t_lo) as usize]).collect()
        })
        .collect();
    let w_u = phi.sphere.weight();
    let dirs: Vec<(f64, f64)> = (0..phi.sphere.count).map(|d| phi.sphere.direction(d)).collect();
    let out: Vec<Complex64> = (0..gy.count)
        .into_par_iter()
        .flat_map_iter(|i| {
            let y = gy.node(i);
            let dirs = &dirs;
            let profiles = &profiles;
            (0..gx.count).map(move |jx| {
                let x = gx.node(jx);
                let mut re = CompensatedSum::default();
                let mut im = CompensatedSum::default();
                for (d, (c, s)) in dirs.iter().enumerate() {
                    let pos = (x * c + y * s - gb.origin) / delta - m_lo as f64;
                    let k = pos.floor() as isize;
                    let w = catmull_rom_weights(pos - k as f64);
                    let prof = &profiles[d];
                    let mut v = ZERO;
                    for (q, wq) in w.iter().enumerate() {
                        let idx = k - 1 + q as isize;
                        if idx >= 0 && (idx as usize) < prof.len() {
                            v += prof[idx as usize] * *wq;
                        }
                    }
                    re.add(v.re);
                    im.add(v.im);
                }
                Complex64::new(re.value(), im.value()) * w_u
            })
        })
        .collect();
    Ok(out)
}

/// Outcome of a round trip `f → R_ψf → (1/K) R^t_η R_ψf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub field: Field2D,
    pub constant: ReconstructionConstant,
    /// Relative L² error against the input field.
    pub relative_error: f64,
}

/// `(1/K_{ψ,η}) R^t_η(R_ψ f)` on the grid of `f`.
pub fn reconstruct(f: &Field2D, psi: &WaveletProfile, eta: &WaveletProfile, grids: &RidgeletGrids) -> Result<Reconstruction> {
    reconstruct_with(f, psi, eta, grids, SynthesisOptions::default())
}

pub fn reconstruct_with(
    f: &Field2D,
    psi: &WaveletProfile,
    eta: &WaveletProfile,
    grids: &RidgeletGrids,
    opts: SynthesisOptions,
) -> Result<Reconstruction> {
    let constant = reconstruction_constant(psi, eta, 2)?;
    let coeffs = ridgelet_via_radon(f, psi, grids)?;
    let field = invert_coefficients(&coeffs, eta, &constant, &f.grid_x, &f.grid_y, opts)?;
    let relative_error = crate::numerics::relative_l2(&field.values, &f.values);
    Ok(Reconstruction { field, constant, relative_error })
}

/// `(1/K) R^t_η Φ` for precomputed coefficients.
pub fn invert_coefficients(
    phi: &RidgeletCoefficients,
    eta: &WaveletProfile,
    constant: &ReconstructionConstant,
    gx: &Grid1D,
    gy: &Grid1D,
    opts: SynthesisOptions,
) -> Result<Field2D> {
    let z = synthesis_complex(phi, eta, gx, gy, opts)?;
    let k = constant.value;
    Field2D::new(*gx, *gy, z.into_iter().map(|v| (v / k).re).collect())
}

/// `(J_sF)(u,b,a) = a^s F(u,b,a)`.
pub fn scale_multiplier(f: &RidgeletCoefficients, s: f64) -> RidgeletCoefficients {
    let mut out = f.clone();
    for d in 0..f.sphere.count {
        for j in 0..f.grid_a.count {
            let w = f.grid_a.node(j).powf(s);
            let i = f.index(d, j, 0);
            out.values[i..i + f.grid_b.count].iter_mut().for_each(|v| *v *= w);
        }
    }
    out
}

/// `⟨F(u,b,a), φ(u)⟩_u = a^{-1} ∫ F φ du` on the (scale, offset) grid, indexed `[scale * nb + offset]`.
pub fn pair_directions(f: &RidgeletCoefficients, window: &[f64]) -> Result<Vec<Complex64>> {
    if window.len() != f.sphere.count {
        return Err(Error::InvalidArgument(format!(
            "window has {} samples, sphere has {}",
            window.len(),
            f.sphere.count
        )));
    }
    let (na, nb) = (f.grid_a.count, f.grid_b.count);
    let w = f.sphere.weight();
    let mut out = vec![ZERO; na * nb];
    for j in 0..na {
        let a = f.grid_a.node(j);
        for k in 0..nb {
            let mut s = ZERO;
            for (d, phi) in window.iter().enumerate() {
                s += f.at(d, j, k) * *phi;
            }
            out[j * nb + k] = s * (w / a);
        }
    }
    Ok(out)
}

/// Discrete `sup (a+1/a)^s (1+|b|)^r |∂_a^l ∂_b^m Δ_u^k F|` with central differences
/// (`Δ_u = ∂²/∂θ²` on the circle).
pub fn decay_seminorm(f: &RidgeletCoefficients, s: i32, r: i32, l: usize, m: usize, k: usize) -> Result<f64> {
    if l > 2 || m > 2 || k > 1 {
        return Err(Error::InvalidArgument(format!("derivative orders (l,m,k)=({l},{m},{k}) exceed (2,2,1)")));
    }
    let (nd, na, nb) = (f.sphere.count, f.grid_a.count, f.grid_b.count);
    if (l > 0 && na < 3) || (m > 0 && nb < 3) || (k > 0 && nd < 3) {
        return Err(Error::TooCoarse("grid too small for the requested difference order".into()));
    }
    let mut g = f.values.clone();
    if k == 1 {
        let dt = f.sphere.weight();
        let mut h = vec![ZERO; g.len()];
        for d in 0..nd {
            let (dm, dp) = ((d + nd - 1) % nd, (d + 1) % nd);
            for j in 0..na {
                for q in 0..nb {
                    h[f.index(d, j, q)] =
                        (g[f.index(dp, j, q)] - g[f.index(d, j, q)] * 2.0 + g[f.index(dm, j, q)]) / (dt * dt);
                }
            }
        }
        g = h;
    }
    let db = f.grid_b.step;
    let dl = f.grid_a.log_step();
    let mut best = 0.0f64;
    for d in 0..nd {
        for j in (l.min(1))..(na - l.min(1)) {
            let a = f.grid_a.node(j);
            for q in (m.min(1))..(nb - m.min(1)) {
                let at = |jj: usize, qq: usize| g[f.index(d, jj, qq)];
                let bder = |jj: usize| -> Complex64 {
                    match m {
                        0 => at(jj, q),
                        1 => (at(jj, q + 1) - at(jj, q - 1)) / (2.0 * db),
                        _ => (at(jj, q + 1) - at(jj, q) * 2.0 + at(jj, q - 1)) / (db * db),
                    }
                };
                let v = match l {
                    0 => bder(j),
                    1 => (bder(j + 1) - bder(j - 1)) / (2.0 * dl * a),
                    _ => {
                        let d1 = (bder(j + 1) - bder(j - 1)) / (2.0 * dl);
                        let d2 = (bder(j + 1) - bder(j) * 2.0 + bder(j - 1)) / (dl * dl);
                        (d2 - d1) / (a * a)
                    }
                };
                let b = f.grid_b.node(q);
                let w = (a + 1.0 / a).powi(s) * (1.0 + b.abs()).powi(r);
                best = best.max(w * v.norm());
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sample_function;

    fn small() -> RidgeletGrids {
        RidgeletGrids::new(16, 65, 4.0, 10, 0.25, 4.0).unwrap()
    }

    #[test]
    fn zero_field() {
        let (gx, gy) = Field2D::square_grid(4.0, 33).unwrap();
        let f = Field2D::zeros(gx, gy);
        let psi = WaveletProfile::gauss_derivative(2).unwrap();
        let c = ridgelet_via_radon(&f, &psi, &small()).unwrap();
        assert!(c.values.iter().all(|v| *v == ZERO));
        let d = ridgelet_direct(&f, &psi, &small()).unwrap();
        assert!(d.values.iter().all(|v| *v == ZERO));
        let back = ridgelet_synthesis(&c, &psi, &gx, &gy).unwrap();
        assert!(back.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_cell_synthesis() {
        let grids = small();
        let eta = WaveletProfile::gauss_derivative(2).unwrap();
        let mut phi = RidgeletCoefficients::zeros(&grids, Provenance::ViaRadon);
        let (d0, j0, k0) = (3, 5, 30);
        let mass = 2.5;
        let i = phi.index(d0, j0, k0);
        phi.values[i] = Complex64::new(mass, 0.0);
        let (gx, gy) = Field2D::square_grid(4.0, 41).unwrap();
        let out = ridgelet_synthesis(&phi, &eta, &gx, &gy).unwrap();
        let (c, s) = grids.sphere.direction(d0);
        let a = grids.grid_a.node(j0);
        let b = grids.grid_b.node(k0);
        let cell = grids.sphere.weight() * grids.grid_b.step * grids.grid_a.log_step() * a.powi(-1);
        let exact = sample_function(|x, y| mass * eta.space((x * c + y * s - b) / a) / a * cell, gx, gy).unwrap();
        let err = crate::numerics::relative_l2(&out.values, &exact.values);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn multiplier_round_trip() {
        let grids = small();
        let mut phi = RidgeletCoefficients::zeros(&grids, Provenance::Direct);
        for (i, v) in phi.values.iter_mut().enumerate() {
            *v = Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos());
        }
        assert_eq!(scale_multiplier(&phi, 0.0), phi);
        let back = scale_multiplier(&scale_multiplier(&phi, 1.3), -1.3);
        assert!(crate::numerics::relative_l2_complex(&back.values, &phi.values) < 1e-14);
    }

    #[test]
    fn seminorm_of_constants_tracks_the_weight() {
        let grids = small();
        let zero = RidgeletCoefficients::zeros(&grids, Provenance::Direct);
        assert_eq!(decay_seminorm(&zero, 2, 2, 1, 1, 1).unwrap(), 0.0);
        let ones = RidgeletCoefficients { values: vec![Complex64::new(1.0, 0.0); zero.values.len()], ..zero };
        let a_max = grids.grid_a.a_max;
        assert!(decay_seminorm(&ones, 1, 0, 0, 0, 0).unwrap() >= a_max + 1.0 / a_max);
        assert!(decay_seminorm(&ones, 0, 0, 3, 0, 0).is_err());
    }
}
