use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ridgelet_core::asymptotics::{
    analyze_scaling, gallery_in, sample_named, DirectionWindow, OrbitMode, Probe, ProbeSet, Regime, ScalingSource,
    Verdict,
};
use ridgelet_core::io;
use ridgelet_core::numerics::relative_l2_complex;
use ridgelet_core::radon::radon;
use ridgelet_core::ridgelet::{invert_coefficients, ridgelet_direct, ridgelet_via_radon, Provenance};
use ridgelet_core::selftest::{run_selftest, Resolution, SelftestOptions};
use ridgelet_core::wavelet1d::reconstruction_constant;
use ridgelet_core::{
    Error, Field2D, Grid1D, LogGrid, RadonMethod, RidgeletGrids, SphereGrid, SynthesisOptions, WaveletProfile,
};

#[derive(Parser)]
#[command(name = "ridgelet", version, about = "Continuous ridgelet analysis on the plane")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ridgelet coefficients of a field.
    Transform(TransformArgs),
    /// Synthesis from coefficients, normalized by K.
    Reconstruct(ReconstructArgs),
    /// Sinogram of a field.
    Radon(RadonArgs),
    /// Scaling orbits, degree estimate and Tauberian verdict.
    Scaling(ScalingArgs),
    /// Invariant suite; prints a JSON summary.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct Source {
    /// Input `.rfld` field.
    #[arg(long, conflicts_with = "gallery")]
    input: Option<PathBuf>,
    /// Named field: gaussian, ridge[:θ], zero, or a gallery entry (e.g. riesz:-1).
    #[arg(long)]
    gallery: Option<String>,
    /// Nodes per axis when sampling a named field.
    #[arg(long, default_value_t = 128)]
    res: usize,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 64)]
    ndir: usize,
    #[arg(long, default_value_t = 257)]
    nb: usize,
    #[arg(long, default_value_t = 48)]
    na: usize,
    #[arg(long, default_value_t = 0.0625)]
    amin: f64,
    #[arg(long, default_value_t = 8.0)]
    amax: f64,
    /// Half-width of the field square and of the offset range.
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
}

impl GridArgs {
    fn grids(&self) -> ridgelet_core::Result<RidgeletGrids> {
        if self.ndir % 2 == 1 {
            return Err(Error::InvalidGrid(format!("--ndir must be even, got {}", self.ndir)));
        }
        RidgeletGrids::new(self.ndir, self.nb, self.extent, self.na, self.amin, self.amax)
    }
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "fourier_bump")]
    wavelet: String,
    /// direct, via_radon or both.
    #[arg(long, default_value = "via_radon")]
    method: String,
    #[arg(long)]
    out: PathBuf,
    /// Also write `theta,b,a,re,im` lines here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Input `.rcf` coefficients.
    #[arg(long)]
    input: PathBuf,
    /// Analysis wavelet ψ the coefficients were computed with.
    #[arg(long, default_value = "fourier_bump")]
    wavelet: String,
    /// Synthesis wavelet η (default: ψ).
    #[arg(long)]
    eta: Option<String>,
    /// Output grid: nodes per axis on [-extent, extent]².
    #[arg(long, default_value_t = 128)]
    res: usize,
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    /// Field to compare against; takes precedence over --res/--extent for the output grid.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RadonArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 64)]
    ndir: usize,
    /// Offset samples on [-extent, extent].
    #[arg(long, default_value_t = 257)]
    nb: usize,
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    /// direct or fourier_slice.
    #[arg(long, default_value = "direct")]
    method: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "fourier_bump")]
    wavelet: String,
    #[arg(long, default_value = "infinity")]
    regime: String,
    /// Probes on the upper unit semicircle.
    #[arg(long, default_value_t = 8)]
    probes: usize,
    /// Direction windows 1, 1+cos θ, 1+sin θ, …
    #[arg(long, default_value_t = 1)]
    windows: usize,
    /// `lo:hi:count` (default: the gallery entry's range, else 24 nodes over a factor 64).
    #[arg(long)]
    lambdas: Option<String>,
    /// coefficient_flow or resample.
    #[arg(long, default_value = "coefficient_flow")]
    method: String,
    /// Probe angle jitter; 0 keeps the equally spaced probes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Orbit CSV `lambda,probe_index,window_index,re,im`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Smaller grids; finishes well under a minute.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scale-measure exponent used by the inversion check (mutation fixture).
    #[arg(long, default_value_t = -2, hide = true, allow_hyphen_values = true)]
    measure_exponent: i32,
}

/// Exit codes: 2 bad input, 3 numeric failure, 4 degenerate pair, 5 not quasiasymptotic,
/// 6 indeterminate degree.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::DegeneratePair(_)) | Some(Error::UndefinedConstant(_)) => 4,
        Some(Error::Indeterminate(_)) => 6,
        Some(Error::TooCoarse(_)) | Some(Error::Unbounded(_)) => 3,
        _ => 2,
    }
}

fn load_field(src: &Source, extent: f64) -> anyhow::Result<Field2D> {
    match (&src.input, &src.gallery) {
        (Some(path), _) => io::read_field(path).with_context(|| format!("reading {}", path.display())),
        (None, Some(name)) => {
            let (gx, gy) = Field2D::square_grid(extent, src.res)?;
            Ok(sample_named(name, gx, gy).with_context(|| format!("sampling '{name}'"))?)
        }
        (None, None) => bail!(Error::InvalidArgument("give --input or --gallery".into())),
    }
}

fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}{ext}"))
}

fn transform(args: &TransformArgs) -> anyhow::Result<u8> {
    let f = load_field(&args.source, args.grid.extent)?;
    let psi = WaveletProfile::parse(&args.wavelet)?;
    let grids = args.grid.grids()?;
    let (primary, other) = match args.method.as_str() {
        "direct" => (ridgelet_direct(&f, &psi, &grids)?, None),
        "via_radon" | "radon" => (ridgelet_via_radon(&f, &psi, &grids)?, None),
        "both" => (ridgelet_direct(&f, &psi, &grids)?, Some(ridgelet_via_radon(&f, &psi, &grids)?)),
        m => bail!(Error::Unknown { what: "transform method", name: m.into() }),
    };
    io::write_coefficients(&args.out, &primary)?;
    if let Some(via) = other {
        let path = sibling(&args.out, Provenance::ViaRadon.as_str());
        io::write_coefficients(&path, &via)?;
        println!("relative L2 discrepancy (direct vs via_radon): {:e}", relative_l2_complex(&via.values, &primary.values));
        println!("wrote {} and {}", args.out.display(), path.display());
    }
    if let Some(csv) = &args.csv {
        io::write_coefficients_csv(csv, &primary)?;
    }
    let flagged = primary.boundary.iter().filter(|b| **b).count();
    if flagged > 0 {
        eprintln!("note: {flagged} boundary-dominated coefficients");
    }
    Ok(0)
}

fn reconstruct(args: &ReconstructArgs) -> anyhow::Result<u8> {
    let coeffs = io::read_coefficients(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let psi = WaveletProfile::parse(&args.wavelet)?;
    let eta = match &args.eta {
        Some(e) => WaveletProfile::parse(e)?,
        None => psi.clone(),
    };
    let constant = reconstruction_constant(&psi, &eta, 2)?;
    let reference = match &args.reference {
        Some(p) => Some(io::read_field(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let (gx, gy) = match &reference {
        Some(r) => (r.grid_x, r.grid_y),
        None => Field2D::square_grid(args.extent, args.res)?,
    };
    let field = invert_coefficients(&coeffs, &eta, &constant, &gx, &gy, SynthesisOptions::default())?;
    io::write_field(&args.out, &field)?;
    if let Some(csv) = &args.csv {
        io::write_field_csv(csv, &field)?;
    }
    println!("K = {:e} + {:e}i (± {:e})", constant.value.re, constant.value.im, constant.error_bound);
    if let Some(r) = reference {
        println!("relative L2 error: {:e}", ridgelet_core::numerics::relative_l2(&field.values, &r.values));
    }
    Ok(0)
}

fn radon_cmd(args: &RadonArgs) -> anyhow::Result<u8> {
    let f = load_field(&args.source, args.extent)?;
    let method: RadonMethod = args.method.parse()?;
    let sphere = SphereGrid::new(args.ndir)?;
    let gp = Grid1D::symmetric(args.extent, args.nb)?;
    let sino = radon(&f, &sphere, &gp, method)?;
    if sino.non_decaying {
        eprintln!("warning: field does not decay at its boundary; line integrals are truncated");
    }
    io::write_sinogram(&args.out, &sino)?;
    if let Some(csv) = &args.csv {
        io::write_sinogram_csv(csv, &sino)?;
    }
    Ok(0)
}

fn parse_lambdas(spec: &str) -> anyhow::Result<LogGrid> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidArgument(format!("--lambdas expects lo:hi:count, got '{spec}'"));
    if parts.len() != 3 {
        bail!(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(LogGrid::new(lo, hi, count)?)
}

fn probes(count: usize, seed: u64) -> Vec<Probe> {
    let mut rng = (seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed));
    (0..count)
        .map(|k| {
            let jitter = rng.as_mut().map_or(0.0, |r| r.gen_range(-0.25..0.25));
            let t = std::f64::consts::PI * (k as f64 + 0.5 + jitter) / count as f64;
            Probe { b: t.cos(), a: t.sin() }
        })
        .filter(|p| p.a >= 0.05)
        .collect()
}

fn scaling(args: &ScalingArgs) -> anyhow::Result<u8> {
    let regime: Regime = args.regime.parse()?;
    let mode: OrbitMode = args.method.parse()?;
    let psi = WaveletProfile::parse(&args.wavelet)?;
    let windows = DirectionWindow::standard(args.windows);
    if args.probes == 0 {
        bail!(Error::InvalidArgument("empty probe set".into()));
    }
    let entry = match (&args.source.input, &args.source.gallery) {
        // plain field names (gaussian, ridge, …) fall through to sampling
        (None, Some(name)) => match gallery_in(name, Some(regime)) {
            Ok(e) => Some(e),
            Err(Error::Unknown { .. }) => None,
            Err(e) => return Err(e.into()),
        },
        _ => None,
    };
    let lambdas = match (&args.lambdas, &entry) {
        (Some(spec), _) => parse_lambdas(spec)?,
        (None, Some(e)) => e.recommended_lambdas(),
        (None, None) => regime.default_lambdas(),
    };
    let source = match &entry {
        Some(e) => ScalingSource::gallery(e, &psi, lambdas.a_max),
        None => ScalingSource::field(&load_field(&args.source, args.grid.extent)?, &psi, &args.grid.grids()?)?,
    };
    let set = ProbeSet::new(probes(args.probes, args.seed), lambdas, windows)?;
    let analysis = analyze_scaling(&source, &set, mode)?;
    let report = analysis.report.to_json();
    match &args.out {
        Some(path) => io::write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if let Some(csv) = &args.csv {
        io::write_orbits_csv(csv, &set, &analysis.orbits)?;
    }
    Ok(match analysis.report.verdict {
        Verdict::Quasiasymptotic => 0,
        Verdict::NotQuasiasymptotic => 5,
    })
}

fn selftest(args: &SelftestArgs) -> anyhow::Result<u8> {
    let resolution = if args.quick { Resolution::Quick } else { Resolution::Reduced };
    let summary = run_selftest(&SelftestOptions { resolution, measure_exponent: args.measure_exponent });
    let json = serde_json::to_string_pretty(&summary)?;
    match &args.out {
        Some(path) => std::fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    for c in summary.failures() {
        eprintln!("FAIL {}: {:e} > {:e}", c.name, c.value, c.tolerance);
    }
    Ok(if summary.passed { 0 } else { 1 })
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| anyhow!(e))?;
    }
    match &cli.command {
        Command::Transform(a) => transform(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Radon(a) => radon_cmd(a),
        Command::Scaling(a) => scaling(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
