//! Radon profiles of radial functions and their wavelet pairings.
//!
//! For radial `f`, `Rf(u,p) = P(|p|)` does not depend on `u`, so `R_ψf(u,b,a)` reduces to
//! the 1-D integral `W(b,a) = ∫ P(p) (1/a) ψ((p-b)/a) dp`. Profiles of non-integrable
//! entries are only defined up to an additive constant, which every wavelet annihilates.

use std::f64::consts::PI;

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use super::gallery::{GalleryEntry, GalleryKind};
use crate::numerics::{catmull_rom_weights, composite_gauss};
use crate::wavelet1d::WaveletProfile;

const TABLE_S_MIN: f64 = -36.0;
const TABLE_PER_UNIT: f64 = 64.0;

#[derive(Debug, Clone)]
pub struct ProfileTable {
    s0: f64,
    ds: f64,
    values: Vec<f64>,
}

impl ProfileTable {
    fn at_node(&self, k: isize) -> f64 {
        let n = self.values.len() as isize;
        if k < 0 {
            self.values[0] + k as f64 * (self.values[1] - self.values[0])
        } else if k >= n {
            self.values[n as usize - 1] + (k - n + 1) as f64 * (self.values[n as usize - 1] - self.values[n as usize - 2])
        } else {
            self.values[k as usize]
        }
    }

    fn eval(&self, p: f64) -> f64 {
        let pos = (p.abs().ln() - self.s0) / self.ds;
        let k = pos.floor();
        let w = catmull_rom_weights(pos - k);
        let k = k as isize;
        (0..4).map(|q| w[q] * self.at_node(k - 1 + q as isize)).sum()
    }
}

/// `P(|p|)` for a radial function, modulo constants.
#[derive(Debug, Clone)]
pub enum RadialRadon {
    /// `exp(-p²/ε²)/(√π ε)`.
    Gaussian { eps: f64 },
    /// `coef·|p|^exponent`.
    Power { coef: f64, exponent: f64 },
    /// `coef·ln|p|`.
    Log { coef: f64 },
    /// Tabulated on a uniform grid in `ln|p|`.
    Table(ProfileTable),
}

/// `B(1/2, -(α+1)/2)`: the Radon profile of `|x|^α` in the plane is `c_α |p|^{α+1}`
/// (a finite-part value when `-1 < α < 0`).
pub fn riesz_radon_coefficient(alpha: f64) -> f64 {
    PI.sqrt() * gamma(-(alpha + 1.0) / 2.0) / gamma(-alpha / 2.0)
}

/// `2 ∫_0^∞ [f(√(p²+t²)) - f(√(1+t²))] dt`: the line integral at offset `p` minus the one
/// at offset 1, which converges whenever `f(r) = o(r)` at infinity.
pub fn radon_difference(f: &(dyn Fn(f64) -> f64 + Sync), p: f64) -> f64 {
    let p = p.abs();
    if p == 1.0 {
        return 0.0;
    }
    let mut breaks = vec![0.0];
    let mut t = p.min(1.0) / 64.0;
    let cap = (1e8 * p).max(1e16);
    while t < cap {
        breaks.push(t);
        t *= 2.0;
    }
    breaks.push(cap);
    for kink in [(1.0 - p * p).max(0.0).sqrt(), p, 1.0] {
        if kink > 0.0 {
            breaks.push(kink);
        }
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    2.0 * composite_gauss(&breaks, 16, |t| f(p.hypot(t)) - f(t.hypot(1.0)))
}

impl RadialRadon {
    pub fn tabulate(f: &(dyn Fn(f64) -> f64 + Sync), p_max: f64) -> Self {
        let s1 = p_max.max(2.0).ln() + 1.0;
        let n = ((s1 - TABLE_S_MIN) * TABLE_PER_UNIT).ceil() as usize + 1;
        let ds = 1.0 / TABLE_PER_UNIT;
        let values = (0..n).into_par_iter().map(|k| radon_difference(f, (TABLE_S_MIN + k as f64 * ds).exp())).collect();
        Self::Table(ProfileTable { s0: TABLE_S_MIN, ds, values })
    }

    /// The profile of the entry's own field; closed forms where they exist.
    pub fn for_entry(entry: &GalleryEntry, p_max: f64) -> Self {
        match entry.kind {
            GalleryKind::GaussianDeltaSurrogate { eps } => Self::Gaussian { eps },
            GalleryKind::Riesz { alpha } if alpha == -1.0 => Self::Log { coef: -2.0 },
            GalleryKind::Riesz { alpha } => Self::Power { coef: riesz_radon_coefficient(alpha), exponent: alpha + 1.0 },
            _ => Self::tabulate(&|r| entry.radial(r), p_max),
        }
    }

    /// The profile of `f(λ·)`, always by numerical line integration of the closed form.
    pub fn for_dilation(entry: &GalleryEntry, lambda: f64, p_max: f64) -> Self {
        Self::tabulate(&|r| entry.radial(lambda * r), p_max)
    }

    pub fn eval(&self, p: f64) -> f64 {
        match self {
            Self::Gaussian { eps } => (-(p * p) / (eps * eps)).exp() / (PI.sqrt() * eps),
            Self::Power { coef, exponent } => coef * p.abs().powf(*exponent),
            Self::Log { coef } => coef * p.abs().ln(),
            Self::Table(t) => t.eval(p),
        }
    }
}

/// `W(b,a) = ∫ P(p) (1/a) ψ((p-b)/a) dp` by composite Gauss-Legendre, with pieces of at
/// most a/2 and geometric grading toward the profile's singular point p = 0.
pub fn wavelet_pairing(profile: &RadialRadon, psi: &WaveletProfile, b: f64, a: f64) -> f64 {
    let reach = psi.radius() * a;
    let (lo, hi) = (b - reach, b + reach);
    let h = 0.5 * a;
    let n = ((hi - lo) / h).ceil() as usize;
    let mut breaks: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let floor = 1e-15 * a.max(1.0);
    let mut d = floor;
    while d < h.max(8.0) {
        for x in [-d, d] {
            if x > lo && x < hi {
                breaks.push(x);
            }
        }
        d *= 2.0;
    }
    if lo < 0.0 && hi > 0.0 {
        breaks.push(0.0);
    }
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup();
    composite_gauss(&breaks, 16, |p| profile.eval(p) * psi.space((p - b) / a)) / a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::gallery::gallery;

    #[test]
    fn difference_integral_matches_riesz_closed_form() {
        for alpha in [-1.5, -0.5] {
            let c = riesz_radon_coefficient(alpha);
            for p in [0.01, 0.3, 2.0, 50.0] {
                let d = radon_difference(&|r: f64| r.powf(alpha), p);
                let exact = c * (p.powf(alpha + 1.0) - 1.0);
                assert!((d - exact).abs() < 1e-9 * (1.0 + exact.abs()), "{alpha} {p}: {d} vs {exact}");
            }
        }
        let d = radon_difference(&|r: f64| 1.0 / r, 0.2);
        assert!((d + 2.0 * 0.2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_pairing_matches_closed_form() {
        // P = e^{-p²}/√π paired with the gauss_derivative(2) profile has a closed form:
        // the convolution of two Gaussians is Gaussian with variance a² + 1/2
        let psi = WaveletProfile::gauss_derivative(2).unwrap();
        let profile = RadialRadon::for_entry(&gallery("gaussian_delta_surrogate").unwrap(), 1.0);
        for (b, a) in [(0.0, 1.0), (0.6, 0.8), (-2.0, 3.0)] {
            let s2: f64 = a * a + 0.5;
            // ψ_a = a ∂² e^{-x²/2a²}, so W = a² (b²/s² - 1) e^{-b²/2s²} / s³
            let exact = a * a * (b * b / s2 - 1.0) * (-(b * b) / (2.0 * s2)).exp() / (s2 * s2.sqrt());
            let w = wavelet_pairing(&profile, &psi, b, a);
            assert!((w - exact).abs() < 1e-10, "{b} {a}: {w} vs {exact}");
        }
    }

    #[test]
    fn table_tracks_closed_form() {
        let entry = gallery("riesz:-1").unwrap();
        let table = RadialRadon::tabulate(&|r| entry.radial(r), 1e3);
        for p in [1e-9, 0.05, 0.7, 3.0, 900.0] {
            assert!((table.eval(p) + 2.0 * p.ln()).abs() < 1e-8, "{p}");
        }
    }
}
