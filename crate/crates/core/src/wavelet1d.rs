//! Wavelet profiles, the L¹-normalized continuous wavelet transform, its synthesis
//! operator and the reconstruction constant `K_{ψ,η}`.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Convolver, Grid1D, LogGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Number of certified vanishing moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LizorkinOrder {
    Finite(u32),
    Infinite,
}

impl LizorkinOrder {
    fn plus(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinite,
        }
    }
}

impl fmt::Display for LizorkinOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(k) => write!(f, "{k}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveletKind {
    /// `ψ̂(ω) = exp(-1/(1-((|ω|-center)/half_width)²))` on the band, 0 elsewhere.
    FourierBump { center: f64, half_width: f64 },
    /// k-th derivative of `exp(-x²/2)`.
    GaussDerivative(u32),
    /// `exp(-x²/2)` itself. Not a wavelet; kept as a negative fixture.
    Gaussian,
}

/// Space samples of a band-limited profile plus derivatives, for cubic Hermite lookup.
#[derive(Debug)]
struct SpaceTable {
    step: f64,
    /// `(ψ(x_k), step·ψ'(x_k))` pairs, interleaved for locality.
    nodes: Vec<[f64; 2]>,
}

impl SpaceTable {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        let p = ax / self.step;
        let k = p as usize;
        if k + 1 >= self.nodes.len() {
            return 0.0;
        }
        let t = p - k as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let ([v0, d0], [v1, d1]) = (self.nodes[k], self.nodes[k + 1]);
        h00 * v0 + h10 * d0 + h01 * v1 + h11 * d1
    }

    fn radius(&self) -> f64 {
        (self.nodes.len() - 1) as f64 * self.step
    }
}

/// Cumulative `∫|ψ|` for boundary-mass diagnostics.
#[derive(Debug)]
struct MassTable {
    origin: f64,
    step: f64,
    cumulative: Vec<f64>,
}

impl MassTable {
    fn build(radius: f64, step: f64, f: impl Fn(f64) -> f64) -> Self {
        let n = (2.0 * radius / step).ceil() as usize + 1;
        let origin = -radius;
        let mut cumulative = Vec::with_capacity(n);
        let mut acc = 0.0;
        let mut prev = f(origin).abs();
        cumulative.push(0.0);
        for i in 1..n {
            let v = f(origin + i as f64 * step).abs();
            acc += 0.5 * step * (prev + v);
            cumulative.push(acc);
            prev = v;
        }
        Self { origin, step, cumulative }
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn at(&self, x: f64) -> f64 {
        let p = (x - self.origin) / self.step;
        if p <= 0.0 {
            return 0.0;
        }
        let k = p as usize;
        if k + 1 >= self.cumulative.len() {
            return self.total();
        }
        let t = p - k as f64;
        self.cumulative[k] * (1.0 - t) + self.cumulative[k + 1] * t
    }
}

/// A univariate analyzing/synthesizing profile with space and Fourier evaluators.
#[derive(Debug, Clone)]
pub struct WaveletProfile {
    kind: WaveletKind,
    table: Option<Arc<SpaceTable>>,
    mass: Arc<MassTable>,
    radius: f64,
}

fn bump_table(center: f64, half_width: f64) -> Arc<SpaceTable> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<SpaceTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (center.to_bits(), half_width.to_bits());
    if let Some(t) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return t.clone();
    }
    // ψ(x) = (1/π)∫₀^∞ ψ̂(ω)cos(ωx)dω by the trapezoid rule on a fine ω lattice; the
    // lattice period 2π/dω is far beyond the table range, so aliasing is negligible.
    let m = 1usize << 20;
    let step = (1.0f64 / 128.0).min(1.0 / (16.0 * (center + half_width)));
    let dw = TAU / (m as f64 * step);
    let mut spec: Vec<Complex64> = (0..m)
        .map(|j| Complex64::new(bump_hat(j as f64 * dw, center, half_width), 0.0))
        .collect();
    let mut dspec: Vec<Complex64> = spec.iter().enumerate().map(|(j, v)| v * (j as f64 * dw)).collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut spec);
    fft.process(&mut dspec);
    let scale = dw / PI;
    let mut values: Vec<f64> = spec[..m / 2].iter().map(|v| v.re * scale).collect();
    let mut derivs: Vec<f64> = dspec[..m / 2].iter().map(|v| v.im * scale).collect();
    // the j = 0 node carries half weight in the trapezoid rule
    let half0 = 0.5 * bump_hat(0.0, center, half_width) * scale;
    values.iter_mut().for_each(|v| *v -= half0);
    let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let last = values.iter().rposition(|v| v.abs() > 1e-14 * peak).unwrap_or(1);
    let keep = (last + last / 8 + 2).min(values.len());
    values.truncate(keep);
    derivs.truncate(keep);
    let nodes = values.into_iter().zip(derivs).map(|(v, d)| [v, d * step]).collect();
    let table = Arc::new(SpaceTable { step, nodes });
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, table.clone());
    table
}

#[inline]
fn bump_hat(w: f64, center: f64, half_width: f64) -> f64 {
    let s = (w.abs() - center) / half_width;
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Probabilists' Hermite polynomial `He_k`.
#[inline]
fn hermite_e(k: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return p0;
    }
    for n in 1..k {
        let p2 = x * p1 - n as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

impl WaveletProfile {
    pub fn fourier_bump() -> Self {
        Self::fourier_bump_with(1.5, 1.0).expect("default band is valid")
    }

    /// Bump supported on `center ± half_width`; the band must stay away from ω = 0.
    pub fn fourier_bump_with(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(center - half_width > 0.0) || !(center + half_width).is_finite() {
            return Err(Error::InvalidArgument(format!(
                "fourier_bump band {center}±{half_width} must lie in ω > 0"
            )));
        }
        let table = bump_table(center, half_width);
        let radius = table.radius();
        let mass = Arc::new(MassTable::build(radius, table.step, |x| table.eval(x)));
        Ok(Self { kind: WaveletKind::FourierBump { center, half_width }, table: Some(table), mass, radius })
    }

    pub fn gauss_derivative(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("gauss_derivative needs k >= 1".into()));
        }
        if k > 12 {
            return Err(Error::InvalidArgument(format!("gauss_derivative order {k} is too large")));
        }
        Ok(Self::gaussian_family(WaveletKind::GaussDerivative(k)))
    }

    pub fn gaussian() -> Self {
        Self::gaussian_family(WaveletKind::Gaussian)
    }

    fn gaussian_family(kind: WaveletKind) -> Self {
        let k = match kind {
            WaveletKind::GaussDerivative(k) => k,
            _ => 0,
        };
        // beyond this radius |ψ| < 1e-16 relative to its peak
        let radius = 9.0 + 1.5 * (k as f64).sqrt();
        let proto = Self { kind, table: None, mass: Arc::new(MassTable { origin: 0.0, step: 1.0, cumulative: vec![0.0] }), radius };
        let mass = Arc::new(MassTable::build(radius, 1.0 / 128.0, |x| proto.space(x)));
        Self { mass, ..proto }
    }

    /// Parses `fourier_bump`, `fourier_bump:c:w`, `gauss_derivative:k` or `gauss_derivative(k)`.
    pub fn parse(spec: &str) -> Result<Self> {
        let cleaned = spec.trim().replace(['(', ')'], ":").replace(',', ":");
        let mut parts = cleaned.split(':').filter(|s| !s.is_empty());
        let name = parts.next().unwrap_or("");
        let params: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad wavelet parameter '{p}' in '{spec}'"))))
            .collect::<Result<_>>()?;
        make_wavelet(name, &params)
    }

    pub fn kind(&self) -> WaveletKind {
        self.kind
    }

    pub fn name(&self) -> String {
        match self.kind {
            WaveletKind::FourierBump { center, half_width } if center == 1.5 && half_width == 1.0 => "fourier_bump".into(),
            WaveletKind::FourierBump { center, half_width } => format!("fourier_bump:{center}:{half_width}"),
            WaveletKind::GaussDerivative(k) => format!("gauss_derivative:{k}"),
            WaveletKind::Gaussian => "gaussian".into(),
        }
    }

    pub fn lizorkin_order(&self) -> LizorkinOrder {
        match self.kind {
            WaveletKind::FourierBump { .. } => LizorkinOrder::Infinite,
            WaveletKind::GaussDerivative(k) => LizorkinOrder::Finite(k),
            WaveletKind::Gaussian => LizorkinOrder::Finite(0),
        }
    }

    /// All profiles offered here are real in space.
    pub fn is_real(&self) -> bool {
        true
    }

    /// `ψ(x)` (real part; every profile here is real-valued).
    #[inline]
    pub fn space(&self, x: f64) -> f64 {
        match self.kind {
            WaveletKind::FourierBump { .. } => self.table.as_ref().map_or(0.0, |t| t.eval(x)),
            WaveletKind::GaussDerivative(k) => {
                let g = (-0.5 * x * x).exp();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * hermite_e(k, x) * g
            }
            WaveletKind::Gaussian => (-0.5 * x * x).exp(),
        }
    }

    pub fn eval_space(&self, x: f64) -> Complex64 {
        Complex64::new(self.space(x), 0.0)
    }

    pub fn eval_fourier(&self, w: f64) -> Complex64 {
        match self.kind {
            WaveletKind::FourierBump { center, half_width } => Complex64::new(bump_hat(w, center, half_width), 0.0),
            WaveletKind::GaussDerivative(k) => {
                Complex64::new(0.0, w).powu(k) * ((TAU).sqrt() * (-0.5 * w * w).exp())
            }
            WaveletKind::Gaussian => Complex64::new((TAU).sqrt() * (-0.5 * w * w).exp(), 0.0),
        }
    }

    /// Beyond this radius the profile is negligible (below ~1e-13 of its peak).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Upper end of the Fourier support, or where `ψ̂` is negligible.
    pub fn band_limit(&self) -> f64 {
        match self.kind {
            WaveletKind::FourierBump { center, half_width } => center + half_width,
            WaveletKind::GaussDerivative(k) => 9.0 + (k as f64).sqrt() * 1.5,
            WaveletKind::Gaussian => 9.0,
        }
    }

    /// Fraction of `∫|ψ|` lying outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let total = self.mass.total();
        if total == 0.0 {
            return 0.0;
        }
        let inside = (self.mass.at(hi) - self.mass.at(lo)).max(0.0);
        ((total - inside) / total).max(0.0)
    }
}

/// Wavelet factory by name.
pub fn make_wavelet(kind: &str, params: &[f64]) -> Result<WaveletProfile> {
    match kind {
        "fourier_bump" | "bump" => match params {
            [] => Ok(WaveletProfile::fourier_bump()),
            [c, w] => WaveletProfile::fourier_bump_with(*c, *w),
            _ => Err(Error::InvalidArgument("fourier_bump takes no parameters or (center, half_width)".into())),
        },
        "gauss_derivative" | "gauss" => match params {
            [k] if *k >= 0.0 && k.fract() == 0.0 => WaveletProfile::gauss_derivative(*k as u32),
            _ => Err(Error::InvalidArgument("gauss_derivative takes one integer order k >= 1".into())),
        },
        other => Err(Error::Unknown { what: "wavelet kind", name: other.to_string() }),
    }
}

/// `K_{ψ,η}` with its quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionConstant {
    pub value: Complex64,
    pub error_bound: f64,
}

const OMEGA_MIN: f64 = 1e-6;

/// `K_{ψ,η} = (2π)^{n-1} ∫ conj(ψ̂) η̂ |ω|^{-n} dω` by the trapezoid rule in `ln|ω|`.
pub fn reconstruction_constant(psi: &WaveletProfile, eta: &WaveletProfile, n: u32) -> Result<ReconstructionConstant> {
    reconstruction_constant_with_step(psi, eta, n, 1.0 / 128.0)
}

/// As [`reconstruction_constant`] with an explicit log-frequency step (refinement studies).
pub fn reconstruction_constant_with_step(
    psi: &WaveletProfile,
    eta: &WaveletProfile,
    n: u32,
    log_step: f64,
) -> Result<ReconstructionConstant> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let order = psi.lizorkin_order().plus(eta.lizorkin_order());
    if let LizorkinOrder::Finite(k) = order {
        if i64::from(k) <= i64::from(n) - 1 {
            return Err(Error::UndefinedConstant(format!(
                "conj({})·{} / |ω|^{n} is not integrable at ω = 0 (combined vanishing order {k})",
                psi.name(),
                eta.name()
            )));
        }
    }
    let integrand = |w: f64| -> Complex64 {
        (psi.eval_fourier(w).conj() * eta.eval_fourier(w) + psi.eval_fourier(-w).conj() * eta.eval_fourier(-w))
            * w.powi(-(n as i32))
    };
    let w_max = psi.band_limit().min(eta.band_limit()) * 1.5;
    let (s0, s1) = (OMEGA_MIN.ln(), w_max.ln());
    let trap = |h: f64| -> Complex64 {
        let m = ((s1 - s0) / h).ceil() as usize;
        let h = (s1 - s0) / m as f64;
        let mut acc = ZERO;
        for i in 0..=m {
            let s = s0 + i as f64 * h;
            let w = s.exp();
            let wt = if i == 0 || i == m { 0.5 * h } else { h };
            acc += integrand(w) * (w * wt);
        }
        acc
    };
    let coarse = trap(log_step);
    let fine = trap(0.5 * log_step);
    // ∫₀^{ω_min}: the integrand behaves like ω^{k-n} with k the combined vanishing order
    let (low_tail, low_bound) = match order {
        LizorkinOrder::Finite(k) => {
            let p = f64::from(k) - f64::from(n);
            let t = integrand(OMEGA_MIN) * (OMEGA_MIN / (p + 1.0));
            (t, t.norm() * 1e-6)
        }
        LizorkinOrder::Infinite => (ZERO, integrand(OMEGA_MIN).norm() * OMEGA_MIN),
    };
    let high_bound = integrand(w_max).norm() * w_max;
    let factor = TAU.powi(n as i32 - 1);
    let value = (fine + low_tail) * factor;
    let error_bound = ((fine - coarse).norm() + low_bound + high_bound) * factor;
    if value.norm() < 1e-10 {
        return Err(Error::DegeneratePair(value.norm()));
    }
    Ok(ReconstructionConstant { value, error_bound })
}

/// Constant `c` with `M_η W_ψ f = c·f` in one dimension: `K_{ψ,η}` at n = 1, halved.
/// Exact for real profiles whose product spectrum is even.
pub fn synthesis_constant_1d(psi: &WaveletProfile, eta: &WaveletProfile) -> Result<Complex64> {
    Ok(reconstruction_constant(psi, eta, 1)?.value * 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// `|∫x^m ψ w| / ∫|x|^m |ψ| w` for m = 0..=max_order (w a wide Gaussian taper for
    /// slowly decaying profiles, 1 otherwise).
    pub normalized_moments: Vec<f64>,
    pub max_moment: f64,
    pub first_failure: Option<usize>,
    pub passed: bool,
}

/// Checks the vanishing moments of `ψ` up to `max_order` against `tol`.
pub fn vanishing_moments_check(psi: &WaveletProfile, max_order: usize, tol: f64) -> MomentReport {
    // Band-limited profiles decay only sub-exponentially, so raw high moments are
    // dominated by truncation. A taper of width σ multiplies ψ̂ by a Gaussian of width
    // 1/σ, which leaves the vanishing neighbourhood of ω = 0 intact up to e^{-σ²ω₀²/2}.
    let (taper, extent) = match psi.kind() {
        WaveletKind::FourierBump { center, half_width } => {
            let sigma = 10.0 / (center - half_width);
            (Some(sigma), (12.0 * sigma).min(psi.radius()))
        }
        _ => (None, psi.radius()),
    };
    let h = 1.0 / 64.0;
    let m = (extent / h).ceil() as usize;
    let mut num = vec![0.0f64; max_order + 1];
    let mut den = vec![0.0f64; max_order + 1];
    for i in 0..=2 * m {
        let x = -(m as f64) * h + i as f64 * h;
        let w = taper.map_or(1.0, |s| (-0.5 * (x / s).powi(2)).exp());
        let v = psi.space(x) * w;
        let mut xp = 1.0;
        for k in 0..=max_order {
            num[k] += xp * v;
            den[k] += xp.abs() * v.abs();
            xp *= x;
        }
    }
    let normalized_moments: Vec<f64> =
        num.iter().zip(&den).map(|(a, b)| if *b == 0.0 { 0.0 } else { a.abs() / b }).collect();
    let max_moment = normalized_moments.iter().fold(0.0f64, |a, b| a.max(*b));
    let first_failure = normalized_moments.iter().position(|v| *v > tol);
    MomentReport { normalized_moments, max_moment, first_failure, passed: first_failure.is_none() }
}

/// `W_ψf(b,a)` on a (scale, offset) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients1D {
    pub grid_b: Grid1D,
    pub grid_a: LogGrid,
    /// Indexed `[scale * nb + offset]`.
    pub values: Vec<Complex64>,
    /// Cells whose wavelet has more than 1e-6 of its mass outside the signal window.
    pub boundary: Vec<bool>,
}

impl WaveletCoefficients1D {
    pub fn zeros(grid_b: Grid1D, grid_a: LogGrid) -> Self {
        let n = grid_b.count * grid_a.count;
        Self { grid_b, grid_a, values: vec![ZERO; n], boundary: vec![false; n] }
    }

    #[inline]
    pub fn at(&self, scale: usize, offset: usize) -> Complex64 {
        self.values[scale * self.grid_b.count + offset]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwtMethod {
    /// Independent per-coefficient quadrature.
    Direct,
    /// Zero-padded FFT correlation; needs the offset grid aligned with the signal grid.
    Fft,
    /// FFT when aligned, direct otherwise.
    Auto,
}

pub const BOUNDARY_MASS: f64 = 1e-6;

fn aligned_offset(signal: &Grid1D, gb: &Grid1D) -> Option<isize> {
    if (gb.step - signal.step).abs() > 1e-12 * signal.step {
        return None;
    }
    let o = (gb.origin - signal.origin) / signal.step;
    let r = o.round();
    ((o - r).abs() < 1e-9).then_some(r as isize)
}

pub(crate) fn boundary_flag(psi: &WaveletProfile, lo: f64, hi: f64, b: f64, a: f64) -> bool {
    psi.mass_outside((lo - b) / a, (hi - b) / a) > BOUNDARY_MASS
}

/// `W_ψf(b,a) = ∫ f(x)(1/a) conj ψ((x-b)/a) dx` by the trapezoid rule on the signal grid.
pub fn cwt(
    signal: &[f64],
    grid: &Grid1D,
    psi: &WaveletProfile,
    gb: &Grid1D,
    ga: &LogGrid,
    method: CwtMethod,
) -> Result<WaveletCoefficients1D> {
    if signal.len() != grid.count {
        return Err(Error::InvalidArgument(format!(
            "signal has {} samples, grid has {}",
            signal.len(),
            grid.count
        )));
    }
    if let Some(k) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { x: grid.node(k), y: 0.0, value: signal[k] });
    }
    let offset = aligned_offset(grid, gb);
    let rows: Vec<Vec<Complex64>> = match (method, offset) {
        (CwtMethod::Direct, _) | (CwtMethod::Auto, None) => {
            (0..ga.count).into_par_iter().map(|j| cwt_row_direct(signal, grid, psi, gb, ga.node(j))).collect()
        }
        (CwtMethod::Fft | CwtMethod::Auto, Some(o)) => cwt_rows_fft(signal, grid, psi, gb, ga, o),
        (CwtMethod::Fft, None) => {
            return Err(Error::InvalidArgument("FFT path needs the offset grid aligned with the signal grid".into()))
        }
    };
    let (lo, hi) = (grid.origin, grid.last());
    let mut out = WaveletCoefficients1D::zeros(*gb, *ga);
    for (j, row) in rows.into_iter().enumerate() {
        let a = ga.node(j);
        for (k, v) in row.into_iter().enumerate() {
            out.values[j * gb.count + k] = v;
            out.boundary[j * gb.count + k] = boundary_flag(psi, lo, hi, gb.node(k), a);
        }
    }
    Ok(out)
}

fn cwt_row_direct(signal: &[f64], grid: &Grid1D, psi: &WaveletProfile, gb: &Grid1D, a: f64) -> Vec<Complex64> {
    let w = grid.trapezoid_weights();
    let reach = psi.radius() * a;
    (0..gb.count)
        .map(|k| {
            let b = gb.node(k);
            let i0 = grid.position(b - reach).floor().max(0.0) as usize;
            let i1 = (grid.position(b + reach).ceil().max(-1.0) as isize).min(grid.count as isize - 1);
            let mut acc = 0.0;
            if i1 >= 0 {
                for i in i0..=(i1 as usize) {
                    acc += w[i] * signal[i] * psi.space((grid.node(i) - b) / a);
                }
            }
            Complex64::new(acc / a, 0.0)
        })
        .collect()
}

fn cwt_rows_fft(
    signal: &[f64],
    grid: &Grid1D,
    psi: &WaveletProfile,
    gb: &Grid1D,
    ga: &LogGrid,
    offset: isize,
) -> Vec<Vec<Complex64>> {
    let n = grid.count as isize;
    let nb = gb.count as isize;
    let h = grid.step;
    let weights = grid.trapezoid_weights();
    let g: Vec<Complex64> = signal.iter().zip(&weights).map(|(v, w)| Complex64::new(v * w, 0.0)).collect();
    // taps m = i - s with s = offset + k the signal index of offset node k
    let m_lo_all = -(offset + nb - 1);
    let m_hi_all = n - 1 - offset;
    let conv = Convolver::new((n + (m_hi_all - m_lo_all + 1) - 1).max(2) as usize);
    let gs = conv.spectrum(&g);
    (0..ga.count)
        .into_par_iter()
        .map(|j| {
            let a = ga.node(j);
            let reach = (psi.radius() * a / h).ceil() as isize;
            let m_lo = m_lo_all.max(-reach);
            let m_hi = m_hi_all.min(reach);
            let mut row = vec![ZERO; gb.count];
            if m_lo > m_hi {
                return row;
            }
            let kernel: Vec<Complex64> =
                (0..=(m_hi - m_lo)).map(|q| psi.eval_space((m_hi - q) as f64 * h / a).conj() / a).collect();
            let ks = conv.spectrum(&kernel);
            let prod: Vec<Complex64> = gs.iter().zip(&ks).map(|(x, y)| x * y).collect();
            let full = conv.invert(prod);
            let top = n + kernel.len() as isize - 2;
            for (k, slot) in row.iter_mut().enumerate() {
                let t = offset + k as isize + m_hi;
                if t >= 0 && t <= top {
                    *slot = full[t as usize];
                }
            }
            row
        })
        .collect()
}

/// `M_ηΦ(p) = ∫∫ (1/a) η((p-b)/a) Φ(b,a) db da/a` on the target grid.
pub fn wavelet_synthesis(phi: &WaveletCoefficients1D, eta: &WaveletProfile, target: &Grid1D) -> Result<Vec<Complex64>> {
    if let Some(k) = phi.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidArgument(format!("non-finite coefficient at index {k}")));
    }
    let wb = phi.grid_b.trapezoid_weights();
    let wa = phi.grid_a.log_weights();
    let nb = phi.grid_b.count;
    let out = (0..target.count)
        .into_par_iter()
        .map(|i| {
            let p = target.node(i);
            let mut acc = ZERO;
            for j in 0..phi.grid_a.count {
                let a = phi.grid_a.node(j);
                let reach = eta.radius() * a;
                let k0 = phi.grid_b.position(p - reach).floor().max(0.0) as usize;
                let k1 = (phi.grid_b.position(p + reach).ceil() as isize).min(nb as isize - 1);
                if k1 < k0 as isize {
                    continue;
                }
                let mut row = ZERO;
                for k in k0..=(k1 as usize) {
                    let b = phi.grid_b.node(k);
                    row += phi.values[j * nb + k] * (wb[k] * eta.space((p - b) / a));
                }
                acc += row * (wa[j] / a);
            }
            acc
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bump_spectrum_vanishes_near_zero() {
        let psi = WaveletProfile::fourier_bump();
        assert_eq!(psi.eval_fourier(0.0).norm(), 0.0);
        for w in [0.1, 0.3, 0.5, -0.5, 2.5, 3.0] {
            assert_eq!(psi.eval_fourier(w).norm(), 0.0);
        }
        assert!(psi.eval_fourier(1.5).re > 0.3);
        assert_eq!(psi.lizorkin_order(), LizorkinOrder::Infinite);
    }

    #[test]
    fn bump_table_matches_direct_cosine_quadrature() {
        let psi = WaveletProfile::fourier_bump();
        for x in [0.0, 0.37, 1.0, 2.9, 7.3, 20.0] {
            // independent midpoint quadrature of (1/π)∫ψ̂cos(ωx)
            let n = 20_000;
            let h = 2.0 / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                let w = 0.5 + (i as f64 + 0.5) * h;
                s += psi.eval_fourier(w).re * (w * x).cos();
            }
            let direct = s * h / PI;
            assert!((psi.space(x) - direct).abs() < 1e-9, "x={x}: {} vs {direct}", psi.space(x));
        }
    }

    #[test]
    fn gauss_derivative_closed_forms() {
        let g2 = WaveletProfile::gauss_derivative(2).unwrap();
        for x in [-2.0, 0.0, 0.5, 3.0] {
            assert_relative_eq!(g2.space(x), (x * x - 1.0) * (-0.5 * x * x).exp(), epsilon = 1e-15);
        }
        let g1 = WaveletProfile::gauss_derivative(1).unwrap();
        assert_relative_eq!(g1.space(1.5), -1.5 * (-1.125f64).exp(), epsilon = 1e-15);
        assert!(WaveletProfile::gauss_derivative(0).is_err());
        assert!(matches!(make_wavelet("morlet", &[]), Err(Error::Unknown { .. })));
        assert_eq!(WaveletProfile::parse("gauss_derivative(3)").unwrap().name(), "gauss_derivative:3");
    }

    #[test]
    fn moments() {
        let g2 = WaveletProfile::gauss_derivative(2).unwrap();
        assert!(vanishing_moments_check(&g2, 1, 1e-8).passed);
        let r = vanishing_moments_check(&g2, 2, 1e-8);
        assert_eq!(r.first_failure, Some(2));
        let r = vanishing_moments_check(&WaveletProfile::gaussian(), 0, 1e-8);
        assert_eq!(r.first_failure, Some(0));
        let r = vanishing_moments_check(&WaveletProfile::fourier_bump(), 10, 1e-8);
        assert!(r.passed, "{:?}", r.normalized_moments);
    }

    #[test]
    fn constant_for_gauss_pair_matches_closed_form() {
        // |ψ̂|²/ω² = 2π ω² e^{-ω²}, integral over R is π^{3/2}; times 2π.
        let g2 = WaveletProfile::gauss_derivative(2).unwrap();
        let k = reconstruction_constant(&g2, &g2, 2).unwrap();
        assert_relative_eq!(k.value.re, 2.0 * PI.powf(2.5), max_relative = 1e-10);
        assert!(k.value.im.abs() < 1e-14);
        assert!(k.error_bound < 1e-8);
    }

    #[test]
    fn constant_errors() {
        let bump = WaveletProfile::fourier_bump();
        let far = WaveletProfile::fourier_bump_with(4.0, 1.0).unwrap();
        assert!(matches!(reconstruction_constant(&bump, &far, 2), Err(Error::DegeneratePair(_))));
        let g1 = WaveletProfile::gauss_derivative(1).unwrap();
        assert!(reconstruction_constant(&g1, &g1, 2).is_ok());
        assert!(matches!(
            reconstruction_constant(&g1, &WaveletProfile::gaussian(), 2),
            Err(Error::UndefinedConstant(_))
        ));
        let k = reconstruction_constant(&bump, &bump, 2).unwrap();
        assert!(k.value.re > 0.0 && k.value.im == 0.0);
    }

    #[test]
    fn fft_and_direct_agree() {
        let grid = Grid1D::symmetric(8.0, 257).unwrap();
        let f: Vec<f64> = grid.nodes().iter().map(|x| (-x * x).exp() * (2.0 * x).cos()).collect();
        let ga = LogGrid::new(1.0 / 16.0, 8.0, 12).unwrap();
        for psi in [WaveletProfile::fourier_bump(), WaveletProfile::gauss_derivative(2).unwrap()] {
            let gb = Grid1D::new(-4.0, grid.step, 129).unwrap();
            let slow = cwt(&f, &grid, &psi, &gb, &ga, CwtMethod::Direct).unwrap();
            let fast = cwt(&f, &grid, &psi, &gb, &ga, CwtMethod::Fft).unwrap();
            let err = crate::numerics::relative_l2_complex(&fast.values, &slow.values);
            assert!(err < 1e-12, "{} {err}", psi.name());
        }
    }
}
