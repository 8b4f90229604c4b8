//! Degree and slowly-varying-factor estimation from scaling orbits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gallery::{SlowlyVaryingKind, SlowlyVaryingModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeVerdict {
    Certified,
    /// Local slopes swing around the fitted model: no power law to certify.
    Oscillatory,
    /// `F` changes sign (or vanishes) on the tail.
    Indeterminate,
    /// The orbit is identically zero.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    pub alpha: f64,
    pub model: SlowlyVaryingModel,
    pub verdict: DegreeVerdict,
    /// `ln|F| - model` at every orbit point, in input order.
    pub residuals: Vec<f64>,
    pub residual_rms: f64,
}

/// Significant deviation of a local slope from the model slope.
const SLOPE_TOLERANCE: f64 = 0.02;
/// β̂ below this is reported as a constant `L`.
const BETA_FLOOR: f64 = 0.1;

/// Least squares for `y ≈ Σ_k c_k basis_k` via normal equations (at most 3 unknowns).
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = rows.first()?.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (r, yi) in rows.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += r[i] * r[j];
            }
            a[i][k] += r[i] * yi;
        }
    }
    // Gauss-Jordan with partial pivoting
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for i in 0..k {
            if i != col {
                let f = a[i][col] / a[col][col];
                for j in col..=k {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let ss: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, yi)| {
            let fit: f64 = r.iter().zip(&coef).map(|(b, c)| b * c).sum();
            (yi - fit).powi(2)
        })
        .sum();
    Some((coef, (ss / y.len() as f64).sqrt()))
}

struct JointFit {
    c: f64,
    alpha: f64,
    beta: f64,
    kappa: f64,
    rms: f64,
}

/// `ln|F| = c + α ln λ + β ln(κ + |ln λ|)`: linear in (c, α, β) for fixed κ; κ by a log
/// grid followed by golden-section refinement.
fn joint_fit(x: &[f64], y: &[f64]) -> Option<JointFit> {
    let fit = |kappa: f64| -> Option<JointFit> {
        let rows: Vec<Vec<f64>> = x.iter().map(|&xi| vec![1.0, xi, (kappa + xi.abs()).ln()]).collect();
        let (c, rms) = least_squares(&rows, y)?;
        Some(JointFit { c: c[0], alpha: c[1], beta: c[2], kappa, rms })
    };
    let mut grid: Vec<f64> = (0..=60).map(|i| (0.05f64.ln() + i as f64 * (1000.0f64.ln() / 60.0)).exp()).collect();
    grid.push(std::f64::consts::E);
    let mut best = grid.iter().filter_map(|&k| fit(k)).min_by(|a, b| a.rms.total_cmp(&b.rms))?;
    let step = 1000.0f64.ln() / 60.0;
    let (mut lo, mut hi) = (best.kappa.ln() - step, best.kappa.ln() + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        let (f1, f2) = (fit(m1.exp())?, fit(m2.exp())?);
        if f1.rms <= f2.rms {
            hi = m2;
        } else {
            lo = m1;
        }
        for f in [f1, f2] {
            if f.rms < best.rms {
                best = f;
            }
        }
    }
    Some(best)
}

/// Sign changes among the entries whose magnitude exceeds `tol`.
pub(crate) fn significant_sign_changes(values: &[f64], tol: f64) -> usize {
    let signs: Vec<f64> = values.iter().filter(|v| v.abs() > tol).map(|v| v.signum()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Fits `|F(λ)| ≈ λ^α L(λ)` on the tail of the orbit (large `|ln λ|`).
///
/// α̂ is the least-squares slope of `ln|F|` against `ln λ` over the tail third. A
/// `(κ + |ln λ|)^β` factor is accepted when a joint fit over the tail half finds
/// `|β̂| ≥ 0.1` and cuts the residual fivefold; α̂ then comes from that joint fit, because
/// the plain tail slope of a log-corrected power law is biased by `β/(κ + |ln λ|)`.
pub fn estimate_degree(lambdas: &[f64], orbit: &[Complex64]) -> Result<DegreeEstimate> {
    if lambdas.len() != orbit.len() {
        return Err(Error::InvalidArgument(format!("{} λ nodes but {} orbit values", lambdas.len(), orbit.len())));
    }
    if lambdas.len() < 6 {
        return Err(Error::InvalidArgument("an orbit needs at least 6 points".into()));
    }
    if lambdas.iter().any(|l| !(*l > 0.0)) || orbit.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidArgument("orbit has non-positive λ or non-finite values".into()));
    }
    let n = lambdas.len();
    let peak = orbit.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if peak == 0.0 {
        return Ok(DegreeEstimate {
            alpha: 0.0,
            model: SlowlyVaryingModel::constant(0.0),
            verdict: DegreeVerdict::Degenerate,
            residuals: vec![0.0; n],
            residual_rms: 0.0,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| lambdas[i].ln().abs().total_cmp(&lambdas[j].ln().abs()));
    let third = (n / 3).max(3);
    let half = (n / 2).max(5).min(n);
    let tail3 = &order[n - third..];
    let tail2 = &order[n - half..];

    let reference = tail3.iter().map(|&i| orbit[i]).max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    let sign_flip = tail3.iter().any(|&i| (orbit[i] * reference.conj()).re <= 0.0);

    let x: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = orbit.iter().map(|v| v.norm().max(1e-300).ln()).collect();
    let pick = |idx: &[usize], v: &[f64]| -> Vec<f64> { idx.iter().map(|&i| v[i]).collect() };
    let linear = |idx: &[usize]| least_squares(&pick(idx, &x).iter().map(|&xi| vec![1.0, xi]).collect::<Vec<_>>(), &pick(idx, &y));

    let (a3, _) = linear(tail3).ok_or_else(|| Error::Indeterminate("degenerate λ grid".into()))?;
    let (_, rms_half) = linear(tail2).ok_or_else(|| Error::Indeterminate("degenerate λ grid".into()))?;
    let joint = joint_fit(&pick(tail2, &x), &pick(tail2, &y));

    let (alpha, model) = match joint {
        Some(j) if j.beta.abs() >= BETA_FLOOR && j.rms < 0.2 * rms_half => {
            (j.alpha, SlowlyVaryingModel { kind: SlowlyVaryingKind::LogPower, c: j.c.exp(), beta: j.beta, shift: j.kappa })
        }
        _ => (a3[1], SlowlyVaryingModel::constant(a3[0].exp())),
    };
    let model_log = |xi: f64| alpha * xi + model.eval(xi.exp()).ln();
    let residuals: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi - model_log(*xi)).collect();
    let residual_rms = (tail2.iter().map(|&i| residuals[i].powi(2)).sum::<f64>() / tail2.len() as f64).sqrt();

    // local slopes against the model slope, over the tail half in order of |ln λ|
    let mut devs = Vec::new();
    for w in tail2.windows(2) {
        let (i, j) = (w[0], w[1]);
        if x[j] == x[i] {
            continue;
        }
        let slope = (y[j] - y[i]) / (x[j] - x[i]);
        let mid = 0.5 * (x[i] + x[j]);
        let model_slope = match model.kind {
            SlowlyVaryingKind::Constant => alpha,
            SlowlyVaryingKind::LogPower => alpha + model.beta * mid.signum() / (model.shift + mid.abs()),
        };
        devs.push(slope - model_slope);
    }
    let verdict = if sign_flip {
        DegreeVerdict::Indeterminate
    } else if significant_sign_changes(&devs, SLOPE_TOLERANCE) >= 2 {
        DegreeVerdict::Oscillatory
    } else {
        DegreeVerdict::Certified
    };
    Ok(DegreeEstimate { alpha, model, verdict, residuals, residual_rms })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median of the per-orbit estimates, ignoring orbits whose peak is below 1e-10 of the
/// largest peak and orbits without a sign-stable tail. Any oscillatory orbit makes the
/// pooled verdict oscillatory.
pub fn pool_estimates(estimates: &[DegreeEstimate], peaks: &[f64]) -> DegreeEstimate {
    let top = peaks.iter().fold(0.0f64, |m, p| m.max(*p));
    let used: Vec<&DegreeEstimate> = estimates
        .iter()
        .zip(peaks)
        .filter(|(e, p)| **p >= 1e-10 * top && **p > 0.0 && matches!(e.verdict, DegreeVerdict::Certified | DegreeVerdict::Oscillatory))
        .map(|(e, _)| e)
        .collect();
    let n = estimates.first().map_or(0, |e| e.residuals.len());
    if used.is_empty() {
        let verdict = if top == 0.0 { DegreeVerdict::Degenerate } else { DegreeVerdict::Indeterminate };
        return DegreeEstimate { alpha: 0.0, model: SlowlyVaryingModel::constant(0.0), verdict, residuals: vec![0.0; n], residual_rms: 0.0 };
    }
    let alpha = median(used.iter().map(|e| e.alpha).collect());
    let log_power: Vec<&&DegreeEstimate> = used.iter().filter(|e| e.model.kind == SlowlyVaryingKind::LogPower).collect();
    let model = if 2 * log_power.len() > used.len() {
        SlowlyVaryingModel {
            kind: SlowlyVaryingKind::LogPower,
            c: median(log_power.iter().map(|e| e.model.c).collect()),
            beta: median(log_power.iter().map(|e| e.model.beta).collect()),
            shift: median(log_power.iter().map(|e| e.model.shift).collect()),
        }
    } else {
        SlowlyVaryingModel::constant(median(used.iter().map(|e| e.model.c).collect()))
    };
    let verdict = if used.iter().any(|e| e.verdict == DegreeVerdict::Oscillatory) {
        DegreeVerdict::Oscillatory
    } else {
        DegreeVerdict::Certified
    };
    let residuals = (0..n).map(|i| median(used.iter().map(|e| e.residuals[i]).collect())).collect();
    let residual_rms = median(used.iter().map(|e| e.residual_rms).collect());
    DegreeEstimate { alpha, model, verdict, residuals, residual_rms }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect()
    }

    #[test]
    fn exact_power_law() {
        let l = grid(1.0, 64.0, 24);
        let f: Vec<Complex64> = l.iter().map(|x| Complex64::new(3.0 / x, 0.0)).collect();
        let e = estimate_degree(&l, &f).unwrap();
        assert!((e.alpha + 1.0).abs() < 1e-12);
        assert_eq!(e.model.kind, SlowlyVaryingKind::Constant);
        assert!((e.model.c - 3.0).abs() < 1e-10);
        assert!(e.residual_rms < 1e-12);
        assert_eq!(e.verdict, DegreeVerdict::Certified);
    }

    #[test]
    fn log_corrected_power_law() {
        let l = grid(1.0, 1e3, 40);
        let f: Vec<Complex64> =
            l.iter().map(|x| Complex64::new(x.powi(-2) * (std::f64::consts::E + x.ln()).powf(1.5), 0.0)).collect();
        let e = estimate_degree(&l, &f).unwrap();
        assert!((e.alpha + 2.0).abs() < 0.05, "{}", e.alpha);
        assert_eq!(e.model.kind, SlowlyVaryingKind::LogPower);
        assert!((e.model.beta - 1.5).abs() < 0.1, "{}", e.model.beta);
    }

    #[test]
    fn sign_change_is_indeterminate() {
        let l = grid(1.0, 64.0, 24);
        let f: Vec<Complex64> = l.iter().map(|x| Complex64::new((2.0 * x.ln()).cos() / x, 0.0)).collect();
        assert_eq!(estimate_degree(&l, &f).unwrap().verdict, DegreeVerdict::Indeterminate);
    }

    #[test]
    fn oscillating_slope() {
        let l = grid(1.0, (4.0 * std::f64::consts::PI).exp(), 48);
        let f: Vec<Complex64> = l.iter().map(|x| Complex64::new((1.0 + 0.3 * x.ln().sin()) / x, 0.0)).collect();
        assert_eq!(estimate_degree(&l, &f).unwrap().verdict, DegreeVerdict::Oscillatory);
    }

    #[test]
    fn zero_orbit() {
        let l = grid(1.0, 64.0, 8);
        let e = estimate_degree(&l, &vec![Complex64::default(); 8]).unwrap();
        assert_eq!(e.verdict, DegreeVerdict::Degenerate);
        assert_eq!(e.alpha, 0.0);
    }
}
