use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use ridgelet_bench::{bench_grids, gaussian_field};
use ridgelet_core::radon::radon;
use ridgelet_core::ridgelet::{ridgelet_direct, ridgelet_synthesis, ridgelet_via_radon};
use ridgelet_core::wavelet1d::{cwt, CwtMethod};
use ridgelet_core::{Grid1D, LogGrid, RadonMethod, SphereGrid, WaveletProfile};

fn bench_cwt(c: &mut Criterion) {
    let psi = WaveletProfile::fourier_bump();
    let grid = Grid1D::symmetric(16.0, 1025).unwrap();
    let signal: Vec<f64> = grid.nodes().iter().map(|x| (-x * x / 2.0).exp() * (3.0 * x).cos()).collect();
    let ga = LogGrid::new(1.0 / 8.0, 8.0, 24).unwrap();
    let mut group = c.benchmark_group("cwt");
    for method in [CwtMethod::Fft, CwtMethod::Direct] {
        group.bench_function(BenchmarkId::from_parameter(format!("{method:?}")), |b| {
            b.iter(|| cwt(black_box(&signal), &grid, &psi, &grid, &ga, method).unwrap())
        });
    }
    group.finish();
}

fn bench_radon(c: &mut Criterion) {
    let f = gaussian_field(64);
    let sphere = SphereGrid::new(32).unwrap();
    let gp = Grid1D::symmetric(8.0, 129).unwrap();
    let mut group = c.benchmark_group("radon");
    for method in [RadonMethod::Direct, RadonMethod::FourierSlice] {
        group.bench_function(BenchmarkId::from_parameter(format!("{method:?}")), |b| {
            b.iter(|| radon(black_box(&f), &sphere, &gp, method).unwrap())
        });
    }
    group.finish();
}

fn bench_ridgelet(c: &mut Criterion) {
    let f = gaussian_field(48);
    let psi = WaveletProfile::fourier_bump();
    let grids = bench_grids();
    let mut group = c.benchmark_group("ridgelet");
    group.sample_size(10);
    group.bench_function("via_radon", |b| b.iter(|| ridgelet_via_radon(black_box(&f), &psi, &grids).unwrap()));
    group.bench_function("direct", |b| b.iter(|| ridgelet_direct(black_box(&f), &psi, &grids).unwrap()));
    group.finish();
}

fn bench_synthesis(c: &mut Criterion) {
    let f = gaussian_field(48);
    let psi = WaveletProfile::fourier_bump();
    let coeffs = ridgelet_via_radon(&f, &psi, &bench_grids()).unwrap();
    let mut group = c.benchmark_group("synthesis");
    group.sample_size(10);
    group.bench_function("gaussian_48", |b| {
        b.iter(|| ridgelet_synthesis(black_box(&coeffs), &psi, &f.grid_x, &f.grid_y).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_cwt, bench_radon, bench_ridgelet, bench_synthesis);
criterion_main!(benches);
