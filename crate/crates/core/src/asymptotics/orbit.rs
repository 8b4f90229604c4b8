//! Scaling orbits `F(λ) = ⟨R_ψf(u, λb, λa), φ(u)⟩` along rays of the (b, a) half-plane.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gallery::GalleryEntry;
use super::radial::{wavelet_pairing, RadialRadon};
use crate::error::{Error, Result};
use crate::numerics::{catmull_rom_weights, resample_dilated, Field2D, Grid1D, LogGrid, SphereGrid};
use crate::radon::{radon, RadonMethod};
use crate::ridgelet::{pair_directions, ridgelet_via_radon, RidgeletCoefficients, RidgeletGrids};
use crate::wavelet1d::WaveletProfile;

/// Direction weights `φ(u)`, `u = (cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionWindow {
    Constant,
    /// `1 + cos kθ`
    Cos(u32),
    /// `1 + sin kθ`
    Sin(u32),
}

impl DirectionWindow {
    /// `1, 1+cos θ, 1+sin θ, 1+cos 2θ, 1+sin 2θ, …`, truncated to `count`.
    pub fn standard(count: usize) -> Vec<Self> {
        (0..count)
            .map(|i| match i {
                0 => Self::Constant,
                i if i % 2 == 1 => Self::Cos(i.div_ceil(2) as u32),
                i => Self::Sin((i / 2) as u32),
            })
            .collect()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::Cos(k) => 1.0 + (*k as f64 * theta).cos(),
            Self::Sin(k) => 1.0 + (*k as f64 * theta).sin(),
        }
    }

    /// `∫ φ du` over the circle.
    pub fn integral(&self) -> f64 {
        TAU
    }

    pub fn samples(&self, sphere: &SphereGrid) -> Vec<f64> {
        (0..sphere.count).map(|j| self.eval(sphere.angle(j))).collect()
    }

    pub fn name(&self) -> String {
        match self {
            Self::Constant => "1".into(),
            Self::Cos(k) => format!("1+cos({k}θ)"),
            Self::Sin(k) => format!("1+sin({k}θ)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub b: f64,
    pub a: f64,
}

/// Probes on the upper unit semicircle `b² + a² = 1, a > 0`, a λ grid and direction windows.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub probes: Vec<Probe>,
    pub lambdas: LogGrid,
    pub windows: Vec<DirectionWindow>,
}

impl ProbeSet {
    pub fn new(probes: Vec<Probe>, lambdas: LogGrid, windows: Vec<DirectionWindow>) -> Result<Self> {
        if probes.is_empty() {
            return Err(Error::InvalidArgument("empty probe set".into()));
        }
        if windows.is_empty() {
            return Err(Error::InvalidArgument("no direction windows".into()));
        }
        for p in &probes {
            if !(p.a > 0.0) || (p.b.hypot(p.a) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "probe (b={}, a={}) is not on the upper unit semicircle",
                    p.b, p.a
                )));
            }
        }
        Ok(Self { probes, lambdas, windows })
    }

    /// `count` equally spaced angles `θ_k = π(k+½)/count`, dropping those with `a < 0.05`.
    pub fn semicircle(count: usize, lambdas: LogGrid, windows: Vec<DirectionWindow>) -> Result<Self> {
        let probes = (0..count)
            .map(|k| {
                let t = std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
                Probe { b: t.cos(), a: t.sin() }
            })
            .filter(|p| p.a >= 0.05)
            .collect();
        Self::new(probes, lambdas, windows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMode {
    /// Transform `f(λ·)` and pair at `(b, a)`.
    Resample,
    /// Pair the fixed transform of `f` at `(λb, λa)`.
    CoefficientFlow,
}

impl FromStr for OrbitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "resample" => Ok(Self::Resample),
            "coefficient_flow" | "flow" => Ok(Self::CoefficientFlow),
            _ => Err(Error::Unknown { what: "orbit mode", name: s.to_string() }),
        }
    }
}

impl fmt::Display for OrbitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Resample => "resample",
            Self::CoefficientFlow => "coefficient_flow",
        })
    }
}

/// `F(λ_i)`; `valid[i]` is false where `(λb, λa)` left the sampled coefficient domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub lambdas: Vec<f64>,
    pub values: Vec<Complex64>,
    pub valid: Vec<bool>,
}

impl Orbit {
    pub fn valid_points(&self) -> (Vec<f64>, Vec<Complex64>) {
        self.lambdas
            .iter()
            .zip(&self.values)
            .zip(&self.valid)
            .filter(|(_, ok)| **ok)
            .map(|((l, v), _)| (*l, *v))
            .unzip()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().zip(&self.valid).filter(|(_, ok)| **ok).fold(0.0, |m, (v, _)| m.max(v.norm()))
    }
}

#[derive(Debug, Clone)]
enum SourceKind {
    Radial { entry: GalleryEntry, profile: RadialRadon },
    Sampled { field: Field2D, coeffs: RidgeletCoefficients },
}

/// A distribution prepared for orbit sampling: a gallery closed form (evaluated along
/// Radon lines, never sampled near its singularity) or a sampled field.
#[derive(Debug, Clone)]
pub struct ScalingSource {
    kind: SourceKind,
    psi: WaveletProfile,
}

impl ScalingSource {
    /// `lambda_max` bounds the dilations the orbits will reach (it sizes profile tables).
    pub fn gallery(entry: &GalleryEntry, psi: &WaveletProfile, lambda_max: f64) -> Self {
        let p_max = lambda_max.max(1.0) * 8.0 * (1.0 + psi.radius() * 8.0);
        Self { kind: SourceKind::Radial { entry: entry.clone(), profile: RadialRadon::for_entry(entry, p_max) }, psi: psi.clone() }
    }

    pub fn field(field: &Field2D, psi: &WaveletProfile, grids: &RidgeletGrids) -> Result<Self> {
        let coeffs = ridgelet_via_radon(field, psi, grids)?;
        Ok(Self { kind: SourceKind::Sampled { field: field.clone(), coeffs }, psi: psi.clone() })
    }

    pub fn wavelet(&self) -> &WaveletProfile {
        &self.psi
    }

    pub fn entry(&self) -> Option<&GalleryEntry> {
        match &self.kind {
            SourceKind::Radial { entry, .. } => Some(entry),
            SourceKind::Sampled { .. } => None,
        }
    }

    pub fn coefficients(&self) -> Option<&RidgeletCoefficients> {
        match &self.kind {
            SourceKind::Sampled { coeffs, .. } => Some(coeffs),
            SourceKind::Radial { .. } => None,
        }
    }

    /// `⟨R_ψf(u,b,a), φ⟩` from the fixed transform of `f`; `None` outside the sampled domain.
    pub fn pairing_at(&self, b: f64, a: f64, window: DirectionWindow) -> Option<Complex64> {
        match &self.kind {
            SourceKind::Radial { profile, .. } => {
                Some(Complex64::new(window.integral() * wavelet_pairing(profile, &self.psi, b, a) / a, 0.0))
            }
            SourceKind::Sampled { coeffs, .. } => {
                let table = pair_directions(coeffs, &window.samples(&coeffs.sphere)).ok()?;
                interpolate_table(&table, &coeffs.grid_b, &coeffs.grid_a, b, a)
            }
        }
    }

    /// `pairing_at` over many points, building the window's pairing table once.
    pub fn pairings_at(&self, points: &[(f64, f64)], window: DirectionWindow) -> Result<Vec<Option<Complex64>>> {
        match &self.kind {
            SourceKind::Radial { profile, .. } => Ok(points
                .par_iter()
                .map(|&(b, a)| Some(Complex64::new(window.integral() * wavelet_pairing(profile, &self.psi, b, a) / a, 0.0)))
                .collect()),
            SourceKind::Sampled { coeffs, .. } => {
                let table = pair_directions(coeffs, &window.samples(&coeffs.sphere))?;
                Ok(points.iter().map(|&(b, a)| interpolate_table(&table, &coeffs.grid_b, &coeffs.grid_a, b, a)).collect())
            }
        }
    }

    /// True when every window sees the same pairing up to its integral (radial sources).
    pub fn window_independent(&self) -> bool {
        matches!(self.kind, SourceKind::Radial { .. })
    }

    /// Orbits for every (probe, window), indexed `probe * windows + window`.
    pub fn orbits(&self, set: &ProbeSet, mode: OrbitMode) -> Result<Vec<Orbit>> {
        let lambdas = set.lambdas.nodes();
        match (&self.kind, mode) {
            (SourceKind::Radial { profile, .. }, OrbitMode::CoefficientFlow) => {
                let per_probe: Vec<Vec<Complex64>> =
                    set.probes.par_iter().map(|p| self.radial_flow(profile, *p, &lambdas)).collect();
                Ok(spread_windows(&per_probe, set, &lambdas))
            }
            (SourceKind::Radial { entry, .. }, OrbitMode::Resample) => {
                let p_max = 8.0 * (1.0 + self.psi.radius());
                let columns: Vec<Vec<f64>> = lambdas
                    .iter()
                    .map(|&l| {
                        let prof = RadialRadon::for_dilation(entry, l, p_max);
                        set.probes.par_iter().map(|p| wavelet_pairing(&prof, &self.psi, p.b, p.a) / p.a).collect()
                    })
                    .collect();
                let per_probe: Vec<Vec<Complex64>> = (0..set.probes.len())
                    .map(|i| columns.iter().map(|c| Complex64::new(c[i], 0.0)).collect())
                    .collect();
                Ok(spread_windows(&per_probe, set, &lambdas))
            }
            (SourceKind::Sampled { coeffs, .. }, OrbitMode::CoefficientFlow) => {
                let mut out = Vec::new();
                let tables: Vec<Vec<Complex64>> = set
                    .windows
                    .iter()
                    .map(|w| pair_directions(coeffs, &w.samples(&coeffs.sphere)))
                    .collect::<Result<_>>()?;
                for p in &set.probes {
                    for table in &tables {
                        let (values, valid) = lambdas
                            .iter()
                            .map(|l| match interpolate_table(table, &coeffs.grid_b, &coeffs.grid_a, l * p.b, l * p.a) {
                                Some(v) => (v, true),
                                None => (Complex64::new(0.0, 0.0), false),
                            })
                            .unzip();
                        out.push(Orbit { lambdas: lambdas.clone(), values, valid });
                    }
                }
                Ok(out)
            }
            (SourceKind::Sampled { field, coeffs }, OrbitMode::Resample) => {
                let columns: Vec<Vec<Complex64>> = lambdas
                    .iter()
                    .map(|&l| sampled_pairings(&resample_dilated(field, l)?, &self.psi, &coeffs.sphere, set))
                    .collect::<Result<_>>()?;
                let nw = set.windows.len();
                let mut out = Vec::new();
                for i in 0..set.probes.len() * nw {
                    out.push(Orbit {
                        lambdas: lambdas.clone(),
                        values: columns.iter().map(|c| c[i]).collect(),
                        valid: vec![true; lambdas.len()],
                    });
                }
                Ok(out)
            }
        }
    }

    /// Coefficient flow on a closed form: the transform of `f` itself, read at `(λb, λa)`.
    fn radial_flow(&self, profile: &RadialRadon, p: Probe, lambdas: &[f64]) -> Vec<Complex64> {
        lambdas
            .par_iter()
            .map(|l| Complex64::new(wavelet_pairing(profile, &self.psi, l * p.b, l * p.a) / (l * p.a), 0.0))
            .collect()
    }

    /// `W_ψ(Rf_u)(λb, λa)` paired with `φ` but without the `a^{-1}` factor of the ridgelet
    /// pairing: the sinogram-level orbit, of degree α + 1 in the plane.
    pub fn sinogram_orbit(&self, probe: Probe, window: DirectionWindow, lambdas: &[f64]) -> Result<Orbit> {
        let values: Vec<Option<Complex64>> = match &self.kind {
            SourceKind::Radial { profile, .. } => lambdas
                .par_iter()
                .map(|l| Some(Complex64::new(window.integral() * wavelet_pairing(profile, &self.psi, l * probe.b, l * probe.a), 0.0)))
                .collect(),
            SourceKind::Sampled { coeffs, .. } => {
                let table = pair_directions(coeffs, &window.samples(&coeffs.sphere))?;
                lambdas
                    .iter()
                    .map(|l| interpolate_table(&table, &coeffs.grid_b, &coeffs.grid_a, l * probe.b, l * probe.a).map(|v| v * (l * probe.a)))
                    .collect()
            }
        };
        Ok(Orbit {
            lambdas: lambdas.to_vec(),
            valid: values.iter().map(Option::is_some).collect(),
            values: values.into_iter().map(|v| v.unwrap_or_default()).collect(),
        })
    }
}

fn spread_windows(per_probe: &[Vec<Complex64>], set: &ProbeSet, lambdas: &[f64]) -> Vec<Orbit> {
    let mut out = Vec::with_capacity(per_probe.len() * set.windows.len());
    for values in per_probe {
        for w in &set.windows {
            out.push(Orbit {
                lambdas: lambdas.to_vec(),
                values: values.iter().map(|v| v * w.integral()).collect(),
                valid: vec![true; lambdas.len()],
            });
        }
    }
    out
}

/// Bicubic Catmull-Rom read of a `[scale * nb + offset]` table at `(b, ln a)`; `None` when the
/// stencil leaves the grid.
fn interpolate_table(table: &[Complex64], gb: &Grid1D, ga: &LogGrid, b: f64, a: f64) -> Option<Complex64> {
    if !(a > 0.0) {
        return None;
    }
    let pb = gb.position(b);
    let pa = ga.position(a);
    let eps = 1e-9;
    if pb < -eps || pa < -eps || pb > (gb.count - 1) as f64 + eps || pa > (ga.count - 1) as f64 + eps {
        return None;
    }
    let kb = (pb.floor() as isize).clamp(0, gb.count as isize - 2);
    let ka = (pa.floor() as isize).clamp(0, ga.count as isize - 2);
    let wb = catmull_rom_weights(pb - kb as f64);
    let wa = catmull_rom_weights(pa - ka as f64);
    let nb = gb.count as isize;
    let na = ga.count as isize;
    // stencils reaching past the edge use linear extrapolation, as in the 1-D helpers
    let node = |j: isize, k: isize| -> Complex64 {
        let jc = j.clamp(0, na - 1);
        let kc = k.clamp(0, nb - 1);
        let base = table[(jc * nb + kc) as usize];
        let dj = j - jc;
        let dk = k - kc;
        let mut v = base;
        if dj != 0 {
            let inner = (jc - dj.signum()).clamp(0, na - 1);
            v += (base - table[(inner * nb + kc) as usize]) * dj.abs() as f64;
        }
        if dk != 0 {
            let inner = (kc - dk.signum()).clamp(0, nb - 1);
            v += (base - table[(jc * nb + inner) as usize]) * dk.abs() as f64;
        }
        v
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (qa, wqa) in wa.iter().enumerate() {
        for (qb, wqb) in wb.iter().enumerate() {
            acc += node(ka - 1 + qa as isize, kb - 1 + qb as isize) * (wqa * wqb);
        }
    }
    Some(acc)
}

/// `⟨R_ψg(u,b,a), φ⟩` for every (probe, window) of the set, by a sinogram on the field's
/// offset lattice and a direct 1-D wavelet quadrature at each probe.
fn sampled_pairings(g: &Field2D, psi: &WaveletProfile, sphere: &SphereGrid, set: &ProbeSet) -> Result<Vec<Complex64>> {
    let h = g.grid_x.step.min(g.grid_y.step) / 2.0;
    let reach = g.radius() + 2.0 * g.grid_x.step.max(g.grid_y.step);
    let n = (reach / h).ceil() as usize;
    let gp = Grid1D::new(-(n as f64) * h, h, 2 * n + 1)?;
    let sino = radon(g, sphere, &gp, RadonMethod::Direct)?;
    let wp = gp.trapezoid_weights();
    let mut out = Vec::with_capacity(set.probes.len() * set.windows.len());
    for p in &set.probes {
        let per_dir: Vec<f64> = (0..sphere.count)
            .map(|d| {
                let row = sino.row(d);
                (0..gp.count).map(|k| wp[k] * row[k] * psi.space((gp.node(k) - p.b) / p.a)).sum::<f64>() / p.a
            })
            .collect();
        for w in &set.windows {
            let s: f64 = per_dir.iter().enumerate().map(|(d, v)| v * w.eval(sphere.angle(d))).sum();
            out.push(Complex64::new(s * sphere.weight() / p.a, 0.0));
        }
    }
    Ok(out)
}

/// `F(λ) = ⟨R_ψf(u, λb, λa), φ(u)⟩` for one probe and window.
pub fn scaling_orbit(
    source: &ScalingSource,
    probe: Probe,
    window: DirectionWindow,
    lambdas: &LogGrid,
    mode: OrbitMode,
) -> Result<Orbit> {
    let set = ProbeSet::new(vec![probe], *lambdas, vec![window])?;
    Ok(source.orbits(&set, mode)?.remove(0))
}
