//! Distributions with known scaling behavior.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{sample_function, Field2D, Grid1D, LogGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Origin,
    Infinity,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Origin => "origin",
            Self::Infinity => "infinity",
        }
    }

    /// Default λ range: 24 log-spaced nodes over [1, 64] or [1/64, 1].
    pub fn default_lambdas(&self) -> LogGrid {
        self.lambdas(64.0, 24)
    }

    /// `count` nodes between 1 and `span` (or `1/span`), log-spaced.
    pub fn lambdas(&self, span: f64, count: usize) -> LogGrid {
        let g = match self {
            Self::Infinity => LogGrid::new(1.0, span, count),
            Self::Origin => LogGrid::new(1.0 / span, 1.0, count),
        };
        g.expect("span > 1 and count >= 2")
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "origin" | "zero" | "0" => Ok(Self::Origin),
            "infinity" | "inf" => Ok(Self::Infinity),
            _ => Err(Error::Unknown { what: "regime", name: s.to_string() }),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlowlyVaryingKind {
    Constant,
    LogPower,
}

/// `L(λ) = c` or `L(λ) = c·(shift + |ln λ|)^β`.
///
/// The shift is `e` for the gallery's own models; fitted models estimate it, because the
/// orbit of `|x|^α(e+|ln|x||)^β` behaves like `(κ + |ln λ|)^β` with a κ that depends on
/// the probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowlyVaryingModel {
    pub kind: SlowlyVaryingKind,
    pub c: f64,
    pub beta: f64,
    pub shift: f64,
}

impl SlowlyVaryingModel {
    pub fn constant(c: f64) -> Self {
        Self { kind: SlowlyVaryingKind::Constant, c, beta: 0.0, shift: E }
    }

    pub fn log_power(c: f64, beta: f64) -> Self {
        Self { kind: SlowlyVaryingKind::LogPower, c, beta, shift: E }
    }

    pub fn with_shift(self, shift: f64) -> Self {
        Self { shift, ..self }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.c * self.shape(lambda)
    }

    /// `L(λ)/c`.
    pub fn shape(&self, lambda: f64) -> f64 {
        match self.kind {
            SlowlyVaryingKind::Constant => 1.0,
            SlowlyVaryingKind::LogPower => (self.shift + lambda.ln().abs()).powf(self.beta),
        }
    }

    /// `|L(aλ)/L(λ) - 1|` along the grid; decays toward the regime's limit for slowly varying `L`.
    pub fn ratio_defects(&self, lambdas: &[f64], a: f64) -> Vec<f64> {
        lambdas.iter().map(|&l| (self.eval(a * l) / self.eval(l) - 1.0).abs()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GalleryKind {
    /// `exp(-|x|²/ε²)/(πε²)`.
    GaussianDeltaSurrogate { eps: f64 },
    /// `|x|^α`, `-2 < α < 0`.
    Riesz { alpha: f64 },
    /// `|x|^α (e + |ln|x||)^β`.
    LogRiesz { alpha: f64, beta: f64 },
    /// `|x|^{-1}(1 + ½ sin ln|x|)`; has no quasiasymptotics.
    OscillatoryCounterexample,
}

/// The homogeneous limit `g` of `f(λx)/(λ^α L(λ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitDescriptor {
    /// `mass·δ`, homogeneous of degree -2.
    Dirac { mass: f64 },
    /// `scale·|x|^α`.
    Homogeneous { alpha: f64, scale: f64 },
    /// No limit exists.
    None,
}

impl LimitDescriptor {
    pub fn degree(&self) -> Option<f64> {
        match self {
            Self::Dirac { .. } => Some(-2.0),
            Self::Homogeneous { alpha, .. } => Some(*alpha),
            Self::None => None,
        }
    }

    /// Pointwise value where one exists (`None` for the Dirac mass and at the origin).
    pub fn eval(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            Self::Homogeneous { alpha, scale } => {
                let r = x.hypot(y);
                (r > 0.0).then(|| scale * r.powf(*alpha))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryEntry {
    pub name: String,
    pub kind: GalleryKind,
    pub regime: Regime,
    pub alpha: f64,
    pub slowly_varying: SlowlyVaryingModel,
    pub limit: LimitDescriptor,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -2.0 && alpha < 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "riesz exponent {alpha} is outside (-2, 0), where |x|^α is locally integrable and decays"
        )))
    }
}

/// Looks up `gaussian_delta_surrogate[:eps]`, `riesz:α`, `log_riesz:α:β` or
/// `oscillatory_counterexample` (parentheses and commas also accepted).
pub fn gallery(name: &str) -> Result<GalleryEntry> {
    gallery_in(name, None)
}

pub fn gallery_in(name: &str, regime: Option<Regime>) -> Result<GalleryEntry> {
    let cleaned = name.trim().replace(['(', ')', ','], ":");
    let mut parts = cleaned.split(':').filter(|s| !s.is_empty());
    let key = parts.next().unwrap_or("").to_ascii_lowercase();
    let params: Vec<f64> = parts
        .map(|p| p.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad gallery parameter '{p}' in '{name}'"))))
        .collect::<Result<_>>()?;
    let arity = |n: usize| -> Result<()> {
        if params.len() > n {
            Err(Error::InvalidArgument(format!("'{key}' takes at most {n} parameters")))
        } else {
            Ok(())
        }
    };
    let entry = match key.as_str() {
        "gaussian_delta_surrogate" | "delta" => {
            arity(1)?;
            let eps = params.first().copied().unwrap_or(1.0);
            if !(eps > 0.0) {
                return Err(Error::InvalidArgument(format!("surrogate width {eps} must be positive")));
            }
            if regime == Some(Regime::Origin) {
                return Err(Error::InvalidArgument(
                    "gaussian_delta_surrogate approximates δ only in the regime at infinity".into(),
                ));
            }
            GalleryEntry {
                name: if eps == 1.0 { "gaussian_delta_surrogate".into() } else { format!("gaussian_delta_surrogate:{eps}") },
                kind: GalleryKind::GaussianDeltaSurrogate { eps },
                regime: Regime::Infinity,
                alpha: -2.0,
                slowly_varying: SlowlyVaryingModel::constant(1.0),
                limit: LimitDescriptor::Dirac { mass: 1.0 },
            }
        }
        "riesz" => {
            arity(1)?;
            let alpha = *params.first().ok_or_else(|| Error::InvalidArgument("riesz needs an exponent, e.g. riesz:-1".into()))?;
            check_alpha(alpha)?;
            GalleryEntry {
                name: format!("riesz:{alpha}"),
                kind: GalleryKind::Riesz { alpha },
                regime: regime.unwrap_or(Regime::Infinity),
                alpha,
                slowly_varying: SlowlyVaryingModel::constant(1.0),
                limit: LimitDescriptor::Homogeneous { alpha, scale: 1.0 },
            }
        }
        "log_riesz" => {
            arity(2)?;
            let alpha = params.first().copied().unwrap_or(-1.0);
            let beta = params.get(1).copied().unwrap_or(1.5);
            check_alpha(alpha)?;
            GalleryEntry {
                name: format!("log_riesz:{alpha}:{beta}"),
                kind: GalleryKind::LogRiesz { alpha, beta },
                regime: regime.unwrap_or(Regime::Infinity),
                alpha,
                slowly_varying: SlowlyVaryingModel::log_power(1.0, beta),
                limit: LimitDescriptor::Homogeneous { alpha, scale: 1.0 },
            }
        }
        "oscillatory_counterexample" | "oscillatory" => {
            arity(0)?;
            GalleryEntry {
                name: "oscillatory_counterexample".into(),
                kind: GalleryKind::OscillatoryCounterexample,
                regime: regime.unwrap_or(Regime::Infinity),
                alpha: -1.0,
                slowly_varying: SlowlyVaryingModel::constant(1.0),
                limit: LimitDescriptor::None,
            }
        }
        _ => return Err(Error::Unknown { what: "gallery entry", name: name.to_string() }),
    };
    Ok(entry)
}

impl GalleryEntry {
    /// `f` as a function of `r = |x|`.
    pub fn radial(&self, r: f64) -> f64 {
        match self.kind {
            GalleryKind::GaussianDeltaSurrogate { eps } => (-(r * r) / (eps * eps)).exp() / (PI * eps * eps),
            GalleryKind::Riesz { alpha } => r.powf(alpha),
            GalleryKind::LogRiesz { alpha, beta } => r.powf(alpha) * (E + r.ln().abs()).powf(beta),
            GalleryKind::OscillatoryCounterexample => (1.0 + 0.5 * r.ln().sin()) / r,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.radial(x.hypot(y))
    }

    /// Samples on a grid (fails on a node at a singularity).
    pub fn sample(&self, gx: Grid1D, gy: Grid1D) -> Result<Field2D> {
        sample_function(|x, y| self.eval(x, y), gx, gy)
    }

    pub fn has_quasiasymptotics(&self) -> bool {
        !matches!(self.limit, LimitDescriptor::None)
    }

    /// λ range long enough for the entry's asymptotics to show at the stated tolerances.
    ///
    /// Exact power laws need little; the Gaussian's `λ^{-2}` corrections need a longer range.
    /// Under a logarithmic factor the normalized orbit converges only like `1/|ln λ|`, so
    /// its tail must reach `|ln λ|` in the hundreds. The oscillation has period 2π in ln λ.
    pub fn recommended_lambdas(&self) -> LogGrid {
        let (span, count) = match self.kind {
            GalleryKind::Riesz { .. } => (64.0, 24),
            GalleryKind::GaussianDeltaSurrogate { .. } => (65536.0, 48),
            GalleryKind::LogRiesz { .. } => (256f64.exp(), 64),
            GalleryKind::OscillatoryCounterexample => ((4.0 * PI).exp(), 48),
        };
        self.regime.lambdas(span, count)
    }

    /// `∫ f(x) dx` where it exists.
    pub fn mass(&self) -> Option<f64> {
        match self.kind {
            GalleryKind::GaussianDeltaSurrogate { .. } => Some(1.0),
            _ => None,
        }
    }
}

/// Test fields by name: `gaussian` (`e^{-|x|²}`), `ridge[:θ]` (`e^{-(x·u)² - 0.01(x·u⊥)²}`,
/// `u = (cos θ, sin θ)`), `zero`, or any gallery entry sampled on the grid.
pub fn sample_named(name: &str, gx: Grid1D, gy: Grid1D) -> Result<Field2D> {
    let cleaned = name.trim().replace(['(', ')', ','], ":");
    let mut parts = cleaned.split(':').filter(|s| !s.is_empty());
    match parts.next().unwrap_or("").to_ascii_lowercase().as_str() {
        "gaussian" => sample_function(|x, y| (-(x * x + y * y)).exp(), gx, gy),
        "zero" => Ok(Field2D::zeros(gx, gy)),
        "ridge" => {
            let theta = match parts.next() {
                Some(t) => t.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad ridge angle '{t}'")))?,
                None => 0.0,
            };
            let (c, s) = (theta.cos(), theta.sin());
            sample_function(
                |x, y| {
                    let along = x * c + y * s;
                    let across = -x * s + y * c;
                    (-(along * along) - 0.01 * across * across).exp()
                },
                gx,
                gy,
            )
        }
        _ => gallery(name)?.sample(gx, gy),
    }
}
