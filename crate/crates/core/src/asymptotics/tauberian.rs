//! Tauberian certification: orbits normalized by `λ^α L(λ)` must converge at every probe,
//! and the normalized transforms must obey a uniform polynomial bound in (b, a).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::estimate::{estimate_degree, pool_estimates, significant_sign_changes, DegreeEstimate, DegreeVerdict};
use super::gallery::{SlowlyVaryingKind, SlowlyVaryingModel};
use super::orbit::{DirectionWindow, Orbit, OrbitMode, ProbeSet, ScalingSource};
use crate::error::{Error, Result};
use crate::numerics::{Grid1D, LogGrid};
use crate::ridgelet::{pair_directions, RidgeletCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    Converged,
    Oscillatory,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Quasiasymptotic,
    NotQuasiasymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub b: f64,
    pub a: f64,
    pub window: DirectionWindow,
    pub verdict: ProbeVerdict,
    /// Limit of `F(λ)/(λ^α̂ L̂(λ))`, with `L̂` normalized to `c = 1`.
    pub limit: Complex64,
    /// Largest pairwise spread of the normalized orbit over its tail third.
    pub variation: f64,
}

/// `|normalized transform| ≤ C (a^l + a^{-l}) (1 + |b|)^m` with one `C` per window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFit {
    pub l: u32,
    pub m: u32,
    pub constants: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauberianReport {
    pub alpha_hat: f64,
    pub slowly_varying: SlowlyVaryingModel,
    pub degree_verdict: DegreeVerdict,
    pub probes: Vec<ProbeReport>,
    pub bound: Option<BoundFit>,
    pub verdict: Verdict,
    pub residuals: Vec<f64>,
}

impl TauberianReport {
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self.slowly_varying.kind {
            SlowlyVaryingKind::Constant => "constant",
            SlowlyVaryingKind::LogPower => "log_power",
        };
        json!({
            "alpha_hat": self.alpha_hat,
            "L": {
                "kind": kind,
                "c": self.slowly_varying.c,
                "beta": self.slowly_varying.beta,
                "shift": self.slowly_varying.shift,
            },
            "degree_verdict": self.degree_verdict,
            "probes": self.probes.iter().map(|p| json!({
                "b": p.b,
                "a": p.a,
                "window": p.window.name(),
                "verdict": p.verdict,
                "M_re": p.limit.re,
                "M_im": p.limit.im,
                "variation": p.variation,
            })).collect::<Vec<_>>(),
            "bound": self.bound.as_ref().map(|b| json!({"l": b.l, "m": b.m, "C": b.constants})),
            "verdict": self.verdict,
            "residuals": self.residuals,
        })
    }
}

/// Convergence threshold on the tail spread, relative to the orbit's size.
const CAUCHY_TOLERANCE: f64 = 1e-2;
/// Orbits smaller than this fraction of the largest are judged against the largest.
const RELATIVE_FLOOR: f64 = 1e-3;
/// Growth of the bound constant from the core to the whole sample grid that is still accepted.
const BOUND_SLACK: f64 = 1.25;
const MAX_BOUND_ORDER: u32 = 10;

/// `F/(λ^α shape(λ))` at the valid points, ordered by increasing `|ln λ|`.
fn normalized(orbit: &Orbit, alpha: f64, model: &SlowlyVaryingModel) -> Vec<(f64, Complex64)> {
    let (l, v) = orbit.valid_points();
    let mut g: Vec<(f64, Complex64)> =
        l.iter().zip(&v).map(|(l, v)| (l.ln().abs(), v / (l.powf(alpha) * model.shape(*l)))).collect();
    g.sort_by(|a, b| a.0.total_cmp(&b.0));
    g
}

fn tail(g: &[(f64, Complex64)], fraction: usize) -> &[(f64, Complex64)] {
    let k = (g.len() / fraction).max(3).min(g.len());
    &g[g.len() - k..]
}

/// Extrapolated limit of a normalized orbit: the last value for a constant `L`, a quadratic
/// extrapolation in `1/(shift + |ln λ|)` to zero for a logarithmic one.
pub fn limit_value(g: &[(f64, Complex64)], model: &SlowlyVaryingModel) -> Complex64 {
    let Some(last) = g.last() else { return Complex64::default() };
    if model.kind == SlowlyVaryingKind::Constant || g.len() < 4 {
        return last.1;
    }
    extrapolate(tail(g, 2), model.shift)
}

fn extrapolate(t: &[(f64, Complex64)], shift: f64) -> Complex64 {
    let last = t[t.len() - 1];
    let x: Vec<f64> = t.iter().map(|(l, _)| 1.0 / (shift + l)).collect();
    // normal equations for v ≈ c0 + c1 x + c2 x², solved per component
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [Complex64::default(); 3];
    for (xi, (_, v)) in x.iter().zip(t) {
        let basis = [1.0, *xi, xi * xi];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += v * basis[i];
        }
    }
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return last.1;
    }
    // Cramer's rule for the intercept
    let solve_c0 = |r: [f64; 3]| {
        let mut mm = m;
        for i in 0..3 {
            mm[i][0] = r[i];
        }
        det(&mm) / d
    };
    Complex64::new(solve_c0([rhs[0].re, rhs[1].re, rhs[2].re]), solve_c0([rhs[0].im, rhs[1].im, rhs[2].im]))
}

fn tail_max(g: &[(f64, Complex64)]) -> f64 {
    tail(g, 3).iter().fold(0.0, |m, (_, v)| m.max(v.norm()))
}

fn judge(g: &[(f64, Complex64)], global: f64) -> (ProbeVerdict, f64) {
    if g.len() < 3 {
        return (ProbeVerdict::Divergent, f64::INFINITY);
    }
    let seq: Vec<Complex64> = tail(g, 3).iter().map(|(_, v)| *v).collect();
    let mut variation = 0.0f64;
    for (i, u) in seq.iter().enumerate() {
        for v in &seq[i + 1..] {
            variation = variation.max((u - v).norm());
        }
    }
    let scale = tail_max(g).max(RELATIVE_FLOOR * global);
    if variation <= CAUCHY_TOLERANCE * scale {
        return (ProbeVerdict::Converged, variation);
    }
    // project increments onto the mean direction and look for alternation
    let mean: Complex64 = g.iter().map(|(_, v)| v).sum::<Complex64>() / g.len() as f64;
    let dir = if mean.norm() > 0.0 { mean / mean.norm() } else { Complex64::new(1.0, 0.0) };
    let steps: Vec<f64> = g.windows(2).map(|w| ((w[1].1 - w[0].1) * dir.conj()).re).collect();
    if significant_sign_changes(&steps, 1e-3 * CAUCHY_TOLERANCE * scale) >= 2 {
        (ProbeVerdict::Oscillatory, variation)
    } else {
        (ProbeVerdict::Divergent, variation)
    }
}

/// One point of a bound fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub b: f64,
    pub a: f64,
    pub window: usize,
    pub value: f64,
    /// Inside the interior of the sampled (b, a) region.
    pub core: bool,
}

fn bound_weight(a: f64, b: f64, l: u32, m: u32) -> f64 {
    (a.powi(l as i32) + a.powi(-(l as i32))) * (1.0 + b.abs()).powi(m as i32)
}

/// Smallest `(l, m)` (by `l + m`, then `l`) whose weighted maximum over all samples stays
/// within 25% of the maximum over the core samples; growth toward the edges of the sampled
/// region that no admissible weight absorbs makes the family unbounded.
pub fn boundedness_fit_samples(samples: &[BoundSample], windows: usize) -> Result<BoundFit> {
    if samples.iter().any(|s| !s.value.is_finite()) {
        return Err(Error::Unbounded("non-finite sample".into()));
    }
    if !samples.iter().any(|s| s.core) {
        return Err(Error::InvalidArgument("bound fit needs samples in the core region".into()));
    }
    for total in 0..=2 * MAX_BOUND_ORDER {
        for l in 0..=total.min(MAX_BOUND_ORDER) {
            let m = total - l;
            if m > MAX_BOUND_ORDER {
                continue;
            }
            let mut all = vec![0.0f64; windows];
            let mut core = vec![0.0f64; windows];
            for s in samples {
                let r = s.value / bound_weight(s.a, s.b, l, m);
                all[s.window] = all[s.window].max(r);
                if s.core {
                    core[s.window] = core[s.window].max(r);
                }
            }
            if all.iter().zip(&core).all(|(a, c)| *a <= BOUND_SLACK * c || *a == 0.0) {
                return Ok(BoundFit { l, m, constants: all });
            }
        }
    }
    Err(Error::Unbounded(format!("no weight with l, m ≤ {MAX_BOUND_ORDER} bounds the family")))
}

fn is_core(b: f64, a: f64, b_half: f64, a_min: f64, a_max: f64) -> bool {
    let (lo, hi) = (a_min.ln(), a_max.ln());
    let q = 0.25 * (hi - lo);
    b.abs() <= 0.5 * b_half && a.ln() >= lo + q && a.ln() <= hi - q
}

/// Bound fit over a family of coefficient arrays (e.g. normalized dilations of a field),
/// using every node of each member's (b, a) grid.
pub fn boundedness_fit(family: &[RidgeletCoefficients], windows: &[DirectionWindow]) -> Result<BoundFit> {
    let mut samples = Vec::new();
    for f in family {
        let b_half = f.grid_b.node(0).abs().max(f.grid_b.last().abs());
        let (a_min, a_max) = (f.grid_a.node(0), f.grid_a.node(f.grid_a.count - 1));
        for (w, win) in windows.iter().enumerate() {
            let table = pair_directions(f, &win.samples(&f.sphere))?;
            for j in 0..f.grid_a.count {
                let a = f.grid_a.node(j);
                for k in 0..f.grid_b.count {
                    let b = f.grid_b.node(k);
                    samples.push(BoundSample {
                        b,
                        a,
                        window: w,
                        value: table[j * f.grid_b.count + k].norm(),
                        core: is_core(b, a, b_half, a_min, a_max),
                    });
                }
            }
        }
    }
    boundedness_fit_samples(&samples, windows.len())
}

/// The (b, a) region sampled by the bound fit of `tauberian_check`.
fn bound_grid() -> (Grid1D, LogGrid) {
    (Grid1D::symmetric(8.0, 17).expect("static grid"), LogGrid::new(1.0 / 16.0, 8.0, 13).expect("static grid"))
}

/// Bound fit of `R_ψf(u, λb, λa)/(λ^α L(λ))` over a fixed (b, a) grid and up to six λ.
fn orbit_bound(source: &ScalingSource, set: &ProbeSet, alpha: f64, model: &SlowlyVaryingModel) -> Result<BoundFit> {
    let (gb, ga) = bound_grid();
    let lambdas = set.lambdas.nodes();
    let picks = 6.min(lambdas.len());
    let chosen: Vec<f64> = (0..picks).map(|i| lambdas[(i * (lambdas.len() - 1)) / (picks - 1).max(1)]).collect();
    let b_half = 8.0;
    let (a_min, a_max) = (ga.node(0), ga.node(ga.count - 1));
    let mut samples = Vec::new();
    let mut cached: Option<Vec<Option<Complex64>>> = None;
    for (w, win) in set.windows.iter().enumerate() {
        let mut points = Vec::new();
        let mut meta = Vec::new();
        for &l in &chosen {
            for j in 0..ga.count {
                for k in 0..gb.count {
                    let (b, a) = (gb.node(k), ga.node(j));
                    points.push((l * b, l * a));
                    meta.push((b, a, l.powf(alpha) * model.shape(l)));
                }
            }
        }
        let values = match (&cached, source.window_independent()) {
            (Some(v), true) => v.clone(),
            _ => {
                let v = source.pairings_at(&points, *win)?;
                cached = Some(v.clone());
                v
            }
        };
        for ((b, a, norm), v) in meta.into_iter().zip(values) {
            if let Some(v) = v {
                samples.push(BoundSample { b, a, window: w, value: v.norm() / norm, core: is_core(b, a, b_half, a_min, a_max) });
            }
        }
    }
    boundedness_fit_samples(&samples, set.windows.len())
}

/// Checks the Tauberian conditions for orbits already computed with `set`.
pub fn tauberian_check_orbits(
    source: &ScalingSource,
    set: &ProbeSet,
    orbits: &[Orbit],
    degree: &DegreeEstimate,
) -> Result<TauberianReport> {
    if degree.verdict == DegreeVerdict::Indeterminate {
        return Err(Error::Indeterminate("orbits change sign on the tail".into()));
    }
    let nw = set.windows.len();
    if orbits.len() != set.probes.len() * nw {
        return Err(Error::InvalidArgument(format!("{} orbits for {} probes × {nw} windows", orbits.len(), set.probes.len())));
    }
    let normalized: Vec<Vec<(f64, Complex64)>> = orbits.iter().map(|o| normalized(o, degree.alpha, &degree.model)).collect();
    let global = normalized.iter().fold(0.0f64, |m, g| m.max(tail_max(g)));
    let probes: Vec<ProbeReport> = normalized
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let p = set.probes[i / nw];
            let (verdict, variation) = judge(g, global);
            ProbeReport { b: p.b, a: p.a, window: set.windows[i % nw], verdict, limit: limit_value(g, &degree.model), variation }
        })
        .collect();
    let bound = match orbit_bound(source, set, degree.alpha, &degree.model) {
        Ok(b) => Some(b),
        Err(Error::Unbounded(_)) => None,
        Err(e) => return Err(e),
    };
    let certified = matches!(degree.verdict, DegreeVerdict::Certified | DegreeVerdict::Degenerate);
    let verdict = if certified && bound.is_some() && probes.iter().all(|p| p.verdict == ProbeVerdict::Converged) {
        Verdict::Quasiasymptotic
    } else {
        Verdict::NotQuasiasymptotic
    };
    Ok(TauberianReport {
        alpha_hat: degree.alpha,
        slowly_varying: degree.model,
        degree_verdict: degree.verdict,
        probes,
        bound,
        verdict,
        residuals: degree.residuals.clone(),
    })
}

pub fn tauberian_check(source: &ScalingSource, set: &ProbeSet, degree: &DegreeEstimate, mode: OrbitMode) -> Result<TauberianReport> {
    let orbits = source.orbits(set, mode)?;
    tauberian_check_orbits(source, set, &orbits, degree)
}

/// Everything the scaling analysis produced.
#[derive(Debug, Clone)]
pub struct ScalingAnalysis {
    pub orbits: Vec<Orbit>,
    pub estimates: Vec<DegreeEstimate>,
    pub degree: DegreeEstimate,
    pub report: TauberianReport,
}

fn unusable(n: usize) -> DegreeEstimate {
    DegreeEstimate {
        alpha: 0.0,
        model: SlowlyVaryingModel::constant(0.0),
        verdict: DegreeVerdict::Indeterminate,
        residuals: vec![0.0; n],
        residual_rms: 0.0,
    }
}

/// Orbits, per-orbit and pooled degree estimates, and the Tauberian report.
pub fn analyze_scaling(source: &ScalingSource, set: &ProbeSet, mode: OrbitMode) -> Result<ScalingAnalysis> {
    let orbits = source.orbits(set, mode)?;
    let n = set.lambdas.count;
    let estimates: Vec<DegreeEstimate> = orbits
        .iter()
        .map(|o| {
            if o.valid.iter().all(|v| *v) {
                estimate_degree(&o.lambdas, &o.values)
            } else {
                let (l, v) = o.valid_points();
                if l.len() < 6 {
                    return Ok(unusable(n));
                }
                // residuals are reported on the full grid; invalid points get zero
                let mut e = estimate_degree(&l, &v)?;
                let mut full = vec![0.0; n];
                let mut it = e.residuals.iter();
                for (slot, ok) in full.iter_mut().zip(&o.valid) {
                    if *ok {
                        *slot = *it.next().unwrap_or(&0.0);
                    }
                }
                e.residuals = full;
                Ok(e)
            }
        })
        .collect::<Result<_>>()?;
    let peaks: Vec<f64> = orbits.iter().map(Orbit::max_abs).collect();
    let degree = pool_estimates(&estimates, &peaks);
    if degree.verdict == DegreeVerdict::Indeterminate {
        return Err(Error::Indeterminate("no orbit has a sign-stable tail".into()));
    }
    let report = tauberian_check_orbits(source, set, &orbits, &degree)?;
    Ok(ScalingAnalysis { orbits, estimates, degree, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_fit_finds_inverse_scale_growth() {
        let (gb, ga) = bound_grid();
        let mut samples = Vec::new();
        for j in 0..ga.count {
            for k in 0..gb.count {
                let (b, a) = (gb.node(k), ga.node(j));
                samples.push(BoundSample { b, a, window: 0, value: 1.0 / a, core: is_core(b, a, 8.0, 1.0 / 16.0, 8.0) });
            }
        }
        let fit = boundedness_fit_samples(&samples, 1).unwrap();
        assert_eq!((fit.l, fit.m), (1, 0));
    }

    #[test]
    fn exponential_growth_is_unbounded() {
        let (gb, ga) = bound_grid();
        let mut samples = Vec::new();
        for j in 0..ga.count {
            for k in 0..gb.count {
                let (b, a) = (gb.node(k), ga.node(j));
                samples.push(BoundSample { b, a, window: 0, value: (1.0 / (a * a)).exp(), core: is_core(b, a, 8.0, 1.0 / 16.0, 8.0) });
            }
        }
        assert!(matches!(boundedness_fit_samples(&samples, 1), Err(Error::Unbounded(_))));
    }

    #[test]
    fn log_limit_extrapolation() {
        let model = SlowlyVaryingModel::log_power(1.0, 1.0);
        let g: Vec<(f64, Complex64)> =
            (0..20).map(|i| (i as f64, Complex64::new(2.0 + 3.0 / (model.shift + i as f64), 0.0))).collect();
        assert!((limit_value(&g, &model).re - 2.0).abs() < 1e-9);
    }
}
