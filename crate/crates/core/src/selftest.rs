//! Invariant suite at reduced resolution, with a machine-readable summary.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    analyze_scaling, estimate_degree, gallery, sample_named, DirectionWindow, OrbitMode, ProbeSet, Regime, ScalingSource,
    SlowlyVaryingKind, Verdict,
};
use crate::error::Result;
use crate::io::{decode_coefficients, decode_field, encode_coefficients, encode_field};
use crate::numerics::{relative_l2, relative_l2_complex, Field2D, Grid1D};
use crate::radon::{dual_radon, radon, radon_dilation_pair, RadonMethod, Sinogram};
use crate::ridgelet::{
    reconstruct_with, ridgelet_direct, ridgelet_via_radon, RidgeletCoefficients, RidgeletGrids, SynthesisOptions,
};
use crate::wavelet1d::{reconstruction_constant_with_step, vanishing_moments_check, WaveletProfile};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// A quarter of the reference field samples (64²), with half the directions, offsets and scales.
    Quick,
    /// The reference field and offsets with half the directions and scales.
    Reduced,
}

impl Resolution {
    /// Field nodes per axis, directions, offsets, scales.
    fn sizes(&self) -> (usize, usize, usize, usize) {
        match self {
            Self::Quick => (64, 32, 129, 24),
            Self::Reduced => (128, 32, 257, 24),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    pub resolution: Resolution,
    /// Scale-measure exponent handed to synthesis; anything but -2 must break inversion.
    pub measure_exponent: i32,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self { resolution: Resolution::Reduced, measure_exponent: -2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestSummary {
    pub resolution: Resolution,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SelftestSummary {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    /// Passes when `value ≤ tolerance`; errors count as failures with an infinite value.
    fn at_most(&mut self, name: &str, value: Result<f64>, tolerance: f64) {
        let value = value.unwrap_or(f64::INFINITY);
        self.checks.push(Check { name: name.into(), value, tolerance, passed: value <= tolerance });
    }

    fn holds(&mut self, name: &str, ok: Result<bool>) {
        let ok = ok.unwrap_or(false);
        self.checks.push(Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, tolerance: 1.0, passed: ok });
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn field_integral(f: &Field2D, g: &Field2D) -> f64 {
    f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<f64>() * f.grid_x.step * f.grid_y.step
}

pub fn run_selftest(opts: &SelftestOptions) -> SelftestSummary {
    let (n, ndir, nb, na) = opts.resolution.sizes();
    let mut s = Suite { checks: Vec::new() };
    let psi = WaveletProfile::fourier_bump();
    let (gx, gy) = Field2D::square_grid(8.0, n).expect("static grid");
    let gauss = sample_named("gaussian", gx, gy).expect("gaussian field");
    let ridge = sample_named("ridge:0.5", gx, gy).expect("ridge field");
    let grids = RidgeletGrids::new(ndir, nb, 8.0, na, 1.0 / 16.0, 8.0).expect("static grids");
    let sphere = grids.sphere;

    s.at_most(
        "wavelet.k_refinement",
        (|| {
            let coarse = reconstruction_constant_with_step(&psi, &psi, 2, 1.0 / 64.0)?.value;
            let fine = reconstruction_constant_with_step(&psi, &psi, 2, 1.0 / 128.0)?.value;
            Ok((coarse - fine).norm() / fine.norm())
        })(),
        1e-8,
    );
    s.at_most("wavelet.vanishing_moments", Ok(vanishing_moments_check(&psi, 4, 1e-6).max_moment), 1e-6);

    let gp = Grid1D::symmetric(8.0, n + 1).expect("static grid");
    let sino = radon(&gauss, &sphere, &gp, RadonMethod::Direct);
    s.at_most("radon.antipodal_symmetry", sino.as_ref().map(|r| r.antipodal_defect().unwrap_or(f64::INFINITY)).map_err(clone_err), 1e-8);
    s.at_most(
        "radon.paths",
        (|| {
            let slice = radon(&gauss, &sphere, &gp, RadonMethod::FourierSlice)?;
            Ok(relative_l2(&slice.values, &sino.as_ref().map_err(clone_err)?.values))
        })(),
        1e-3,
    );
    s.at_most(
        "radon.duality",
        (|| {
            let mut rho = Sinogram::zeros(sphere, gp);
            for j in 0..sphere.count {
                let t = sphere.angle(j);
                for k in 0..gp.count {
                    let p = gp.node(k);
                    rho.values[j * gp.count + k] = (-0.5 * p * p).exp() * (1.0 + 0.3 * t.cos());
                }
            }
            let lhs = radon(&ridge, &sphere, &gp, RadonMethod::Direct)?.inner(&rho);
            let rhs = field_integral(&ridge, &dual_radon(&rho, &gx, &gy)?.field);
            Ok(relative_gap(lhs, rhs))
        })(),
        1e-4,
    );
    s.at_most(
        "radon.dilation",
        (|| {
            let (a, b) = radon_dilation_pair(&gauss, 0.5, &sphere, &Grid1D::symmetric(4.0, n + 1)?, RadonMethod::Direct)?;
            Ok(relative_l2(&a.values, &b.values))
        })(),
        1e-3,
    );

    let direct = ridgelet_direct(&gauss, &psi, &grids);
    let via = ridgelet_via_radon(&gauss, &psi, &grids);
    s.at_most(
        "ridgelet.paths",
        (|| Ok(relative_l2_complex(&direct.as_ref().map_err(clone_err)?.values, &via.as_ref().map_err(clone_err)?.values)))(),
        1e-3,
    );
    s.at_most(
        "ridgelet.linearity",
        (|| {
            let (p, q) = (0.75, -1.5);
            let combo = Field2D::new(gx, gy, gauss.values.iter().zip(&ridge.values).map(|(a, b)| p * a + q * b).collect())?;
            let lhs = ridgelet_via_radon(&combo, &psi, &grids)?;
            let rg = ridgelet_via_radon(&ridge, &psi, &grids)?;
            let v = via.as_ref().map_err(clone_err)?;
            let rhs: Vec<Complex64> = v.values.iter().zip(&rg.values).map(|(a, b)| a * p + b * q).collect();
            Ok(relative_l2_complex(&lhs.values, &rhs))
        })(),
        1e-12,
    );
    s.at_most(
        "ridgelet.inversion",
        (|| {
            let o = SynthesisOptions { measure_exponent: opts.measure_exponent, ..SynthesisOptions::default() };
            Ok(reconstruct_with(&gauss, &psi, &psi, &grids, o)?.relative_error)
        })(),
        0.25,
    );

    s.at_most(
        "asymptotics.synthetic_power_law",
        (|| {
            let l: Vec<f64> = (0..24).map(|i| 64f64.powf(i as f64 / 23.0)).collect();
            let f: Vec<Complex64> = l.iter().map(|x| Complex64::new(3.0 / x, 0.0)).collect();
            Ok((estimate_degree(&l, &f)?.alpha + 1.0).abs())
        })(),
        1e-9,
    );
    s.holds(
        "asymptotics.synthetic_log_power",
        (|| {
            let l: Vec<f64> = (0..40).map(|i| 1e3f64.powf(i as f64 / 39.0)).collect();
            let f: Vec<Complex64> =
                l.iter().map(|x| Complex64::new(x.powi(-2) * (std::f64::consts::E + x.ln()).powf(1.5), 0.0)).collect();
            let e = estimate_degree(&l, &f)?;
            Ok((e.alpha + 2.0).abs() <= 0.05 && e.model.kind == SlowlyVaryingKind::LogPower && (e.model.beta - 1.5).abs() <= 0.1)
        })(),
    );
    s.holds(
        "asymptotics.riesz_quasiasymptotic",
        (|| {
            let entry = gallery("riesz:-1")?;
            let lambdas = Regime::Infinity.default_lambdas();
            let src = ScalingSource::gallery(&entry, &psi, 64.0);
            let set = ProbeSet::semicircle(4, lambdas, DirectionWindow::standard(1))?;
            let r = analyze_scaling(&src, &set, OrbitMode::CoefficientFlow)?.report;
            Ok(r.verdict == Verdict::Quasiasymptotic && (r.alpha_hat + 1.0).abs() <= 0.05)
        })(),
    );
    s.holds(
        "asymptotics.oscillatory_rejected",
        (|| {
            let entry = gallery("oscillatory_counterexample")?;
            let lambdas = entry.recommended_lambdas();
            let src = ScalingSource::gallery(&entry, &psi, lambdas.a_max);
            let set = ProbeSet::semicircle(4, lambdas, DirectionWindow::standard(1))?;
            let r = analyze_scaling(&src, &set, OrbitMode::CoefficientFlow)?.report;
            Ok(r.verdict == Verdict::NotQuasiasymptotic && r.bound.is_some())
        })(),
    );

    s.holds(
        "io.round_trip",
        (|| {
            let mut buf = Vec::new();
            encode_field(&mut buf, &ridge)?;
            let f_ok = decode_field(&mut buf.as_slice())? == ridge;
            let c: &RidgeletCoefficients = via.as_ref().map_err(clone_err)?;
            let mut buf = Vec::new();
            encode_coefficients(&mut buf, c)?;
            Ok(f_ok && decode_coefficients(&mut buf.as_slice())? == *c)
        })(),
    );

    let passed = s.checks.iter().all(|c| c.passed);
    SelftestSummary { resolution: opts.resolution, checks: s.checks, passed }
}

fn clone_err(e: &crate::error::Error) -> crate::error::Error {
    crate::error::Error::InvalidArgument(e.to_string())
}

