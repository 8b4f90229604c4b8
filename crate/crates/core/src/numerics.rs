//! Grids, quadrature, interpolation and FFT plumbing shared by the transform engines.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1-D grid `origin + i * step`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub origin: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid1D {
    pub fn new(origin: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !origin.is_finite() {
            return Err(Error::InvalidGrid(format!("step must be positive and finite, got {step}")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {count}")));
        }
        Ok(Self { origin, step, count })
    }

    /// `count` nodes spanning `[-half, half]`.
    pub fn symmetric(half: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {count}")));
        }
        Self::new(-half, 2.0 * half / (count - 1) as f64, count)
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    #[inline]
    pub fn last(&self) -> f64 {
        self.node(self.count - 1)
    }

    /// Fractional index of `x`.
    #[inline]
    pub fn position(&self, x: f64) -> f64 {
        (x - self.origin) / self.step
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        x >= self.origin && x <= self.last()
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.count, self.step)
    }
}

/// Geometric grid of scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub a_min: f64,
    pub a_max: f64,
    pub count: usize,
}

impl LogGrid {
    pub fn new(a_min: f64, a_max: f64, count: usize) -> Result<Self> {
        if !(a_min > 0.0) || !(a_max > a_min) || !a_max.is_finite() {
            return Err(Error::InvalidGrid(format!("need 0 < a_min < a_max, got [{a_min}, {a_max}]")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 scales, got {count}")));
        }
        Ok(Self { a_min, a_max, count })
    }

    #[inline]
    pub fn log_step(&self) -> f64 {
        (self.a_max / self.a_min).ln() / (self.count - 1) as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.count {
            return self.a_max;
        }
        self.a_min * (j as f64 * self.log_step()).exp()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.node(j)).collect()
    }

    /// Fractional index of `a` in log coordinates.
    #[inline]
    pub fn position(&self, a: f64) -> f64 {
        (a / self.a_min).ln() / self.log_step()
    }

    /// Trapezoid weights for `∫ g(a) da/a` (= trapezoid in `ln a`).
    pub fn log_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.count, self.log_step())
    }
}

/// Equally spaced directions on the unit circle with equal weights `2π/count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub count: usize,
}

impl SphereGrid {
    pub fn new(count: usize) -> Result<Self> {
        if count < 4 {
            return Err(Error::InvalidGrid(format!("need at least 4 directions, got {count}")));
        }
        Ok(Self { count })
    }

    #[inline]
    pub fn angle(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.count as f64
    }

    /// Unit vector `(cos θ_j, sin θ_j)`. For even counts the second half is the exact
    /// negation of the first, so antipodal identities hold bit for bit.
    #[inline]
    pub fn direction(&self, j: usize) -> (f64, f64) {
        let half = self.count / 2;
        if self.count % 2 == 0 && j >= half {
            let (c, s) = self.direction(j - half);
            return (-c, -s);
        }
        let t = self.angle(j);
        (t.cos(), t.sin())
    }

    #[inline]
    pub fn weight(&self) -> f64 {
        std::f64::consts::TAU / self.count as f64
    }

    /// Index of the antipode of direction `j`, when it is on the grid.
    pub fn antipode(&self, j: usize) -> Option<usize> {
        (self.count % 2 == 0).then(|| (j + self.count / 2) % self.count)
    }
}

/// Samples of a real field on a uniform rectangle. `values[i * nx + j] = f(x_j, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid_x: Grid1D,
    pub grid_y: Grid1D,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn new(grid_x: Grid1D, grid_y: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid_x.count * grid_y.count {
            return Err(Error::InvalidArgument(format!(
                "field has {} values, grid needs {}x{}",
                values.len(),
                grid_x.count,
                grid_y.count
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: grid_x.node(k % grid_x.count),
                y: grid_y.node(k / grid_x.count),
                value: values[k],
            });
        }
        Ok(Self { grid_x, grid_y, values })
    }

    pub fn zeros(grid_x: Grid1D, grid_y: Grid1D) -> Self {
        Self { grid_x, grid_y, values: vec![0.0; grid_x.count * grid_y.count] }
    }

    /// Square field on `[-half, half]²` with `n` nodes per side.
    pub fn square_grid(half: f64, n: usize) -> Result<(Grid1D, Grid1D)> {
        let g = Grid1D::symmetric(half, n)?;
        Ok((g, g))
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.grid_x.count
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.grid_y.count
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid_x.count + j]
    }

    /// Bicubic Catmull-Rom interpolant of the zero-extended samples. It vanishes two cells
    /// beyond the grid and integrates to exactly the Riemann sum of the samples.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let (nx, ny) = (self.nx() as isize, self.ny() as isize);
        let px = self.grid_x.position(x);
        let py = self.grid_y.position(y);
        if !(px > -2.0 && py > -2.0 && px < (nx + 1) as f64 && py < (ny + 1) as f64) {
            return 0.0;
        }
        let jx = px.floor() as isize;
        let iy = py.floor() as isize;
        let wx = catmull_rom_weights(px - jx as f64);
        let wy = catmull_rom_weights(py - iy as f64);
        let mut acc = 0.0;
        for (a, &wyv) in wy.iter().enumerate() {
            let i = iy - 1 + a as isize;
            if i < 0 || i >= ny || wyv == 0.0 {
                continue;
            }
            let row = &self.values[(i as usize) * self.nx()..(i as usize + 1) * self.nx()];
            let mut r = 0.0;
            for (b, &wxv) in wx.iter().enumerate() {
                let j = jx - 1 + b as isize;
                if j >= 0 && j < nx {
                    r += wxv * row[j as usize];
                }
            }
            acc += wyv * r;
        }
        acc
    }

    /// 2-D trapezoid integral.
    pub fn integral(&self) -> f64 {
        let wx = self.grid_x.trapezoid_weights();
        let wy = self.grid_y.trapezoid_weights();
        let mut total = 0.0;
        for (i, wyi) in wy.iter().enumerate() {
            let row = &self.values[i * self.nx()..(i + 1) * self.nx()];
            total += wyi * row.iter().zip(&wx).map(|(v, w)| v * w).sum::<f64>();
        }
        total
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest boundary magnitude relative to the peak (0 for the zero field).
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let (nx, ny) = (self.nx(), self.ny());
        let mut edge: f64 = 0.0;
        for j in 0..nx {
            edge = edge.max(self.at(0, j).abs()).max(self.at(ny - 1, j).abs());
        }
        for i in 0..ny {
            edge = edge.max(self.at(i, 0).abs()).max(self.at(i, nx - 1).abs());
        }
        edge / peak
    }

    /// Largest `|x·u|` over the rectangle, for every unit `u`.
    pub fn radius(&self) -> f64 {
        let xm = self.grid_x.origin.abs().max(self.grid_x.last().abs());
        let ym = self.grid_y.origin.abs().max(self.grid_y.last().abs());
        xm.hypot(ym)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// `f(λ·)` carried exactly: the same samples on the grid divided by `λ`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("dilation must be positive, got {lambda}")));
        }
        let g = |g: Grid1D| Grid1D::new(g.origin / lambda, g.step / lambda, g.count);
        Ok(Self { grid_x: g(self.grid_x)?, grid_y: g(self.grid_y)?, values: self.values.clone() })
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid_x == other.grid_x && self.grid_y == other.grid_y
    }
}

/// Samples `expr(x, y)` on the grid, rejecting the first non-finite value.
pub fn sample_function<F>(expr: F, grid_x: Grid1D, grid_y: Grid1D) -> Result<Field2D>
where
    F: Fn(f64, f64) -> f64,
{
    let mut values = Vec::with_capacity(grid_x.count * grid_y.count);
    for i in 0..grid_y.count {
        let y = grid_y.node(i);
        for j in 0..grid_x.count {
            let x = grid_x.node(j);
            let v = expr(x, y);
            if !v.is_finite() {
                return Err(Error::NonFinite { x, y, value: v });
            }
            values.push(v);
        }
    }
    Ok(Field2D { grid_x, grid_y, values })
}

pub fn trapezoid_weights(count: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; count];
    if count > 0 {
        w[0] *= 0.5;
        w[count - 1] *= 0.5;
    }
    w
}

pub fn trapezoid(values: &[f64], step: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "trapezoid needs at least 2 samples, got {}",
            values.len()
        )));
    }
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    Ok(step * (inner + 0.5 * (values[0] + values[n - 1])))
}

/// `f_λ(x) = f(λx)` on the source grid; nodes whose image leaves the extent are set to 0.
pub fn resample_dilated(f: &Field2D, lambda: f64) -> Result<Field2D> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation must be positive, got {lambda}")));
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let (gx, gy) = (f.grid_x, f.grid_y);
    let mut values = Vec::with_capacity(f.values.len());
    for i in 0..gy.count {
        let y = lambda * gy.node(i);
        for j in 0..gx.count {
            let x = lambda * gx.node(j);
            values.push(if gx.contains(x) && gy.contains(y) { f.interpolate(x, y) } else { 0.0 });
        }
    }
    Ok(Field2D { grid_x: gx, grid_y: gy, values })
}

/// Catmull-Rom weights for nodes `-1, 0, 1, 2` at fractional offset `t ∈ [0,1)`.
#[inline]
pub fn catmull_rom_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Catmull-Rom cardinal function `K` (support [-2, 2]) in frequency: `∫ K(x) e^{-iwx} dx`.
pub fn catmull_rom_hat(w: f64) -> f64 {
    let gl = gauss_legendre(24);
    let mut acc = 0.0;
    for (x, wt) in gl.iter() {
        let t = 0.5 * (x + 1.0);
        let inner = 1.5 * t * t * t - 2.5 * t * t + 1.0;
        let u = t + 1.0;
        let outer = -0.5 * u * u * u + 2.5 * u * u - 4.0 * u + 2.0;
        acc += 0.5 * wt * (inner * (w * t).cos() + outer * (w * u).cos());
    }
    2.0 * acc
}

/// Catmull-Rom interpolation of samples on `grid` (zero-extended), or `None` outside the grid.
pub fn interpolate_1d(values: &[f64], grid: &Grid1D, x: f64) -> Option<f64> {
    let p = grid.position(x);
    let n = values.len() as isize;
    if !(p >= 0.0 && p <= (n - 1) as f64) {
        return None;
    }
    let k = (p.floor() as isize).min(n - 2);
    let w = catmull_rom_weights(p - k as f64);
    let mut acc = 0.0;
    for (d, wv) in w.iter().enumerate() {
        let i = k - 1 + d as isize;
        if i >= 0 && i < n {
            acc += wv * values[i as usize];
        }
    }
    Some(acc)
}

/// Complex variant of [`interpolate_1d`] with ghost nodes extrapolated linearly,
/// used where the samples are not small at the edges.
pub fn interpolate_1d_complex(values: &[Complex64], pos: f64) -> Option<Complex64> {
    let n = values.len() as isize;
    if n < 2 || !(pos >= 0.0 && pos <= (n - 1) as f64) {
        return None;
    }
    let k = (pos.floor() as isize).min(n - 2);
    let w = catmull_rom_weights(pos - k as f64);
    let at = |i: isize| -> Complex64 {
        if i < 0 {
            values[0] * 2.0 - values[1]
        } else if i >= n {
            values[(n - 1) as usize] * 2.0 - values[(n - 2) as usize]
        } else {
            values[i as usize]
        }
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (d, wv) in w.iter().enumerate() {
        acc += at(k - 1 + d as isize) * *wv;
    }
    Some(acc)
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

pub fn relative_l2(approx: &[f64], reference: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, r) in approx.iter().zip(reference) {
        num += (a - r) * (a - r);
        den += r * r;
    }
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

pub fn relative_l2_complex(approx: &[Complex64], reference: &[Complex64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, r) in approx.iter().zip(reference) {
        num += (a - r).norm_sqr();
        den += r.norm_sqr();
    }
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, cached per order.
pub fn gauss_legendre(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(order)
        .or_insert_with(|| {
            let rule = gauss_quad::GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(pairs)
        })
        .clone()
}

/// Composite Gauss-Legendre over consecutive breakpoints.
pub fn composite_gauss<F>(breaks: &[f64], order: usize, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    let rule = gauss_legendre(order);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = 0.0;
        for &(x, wt) in rule.iter() {
            s += wt * f(mid + half * x);
        }
        total += half * s;
    }
    total
}

/// Breakpoints on `[lo, hi]` graded geometrically (ratio 2) towards `at`, with uniform
/// pieces of width at most `h` elsewhere. `floor` is the smallest piece next to `at`.
pub fn graded_breaks(lo: f64, hi: f64, at: f64, h: f64, floor: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    let n = ((hi - lo) / h).ceil().max(1.0) as usize;
    for k in 1..n {
        pts.push(lo + (hi - lo) * k as f64 / n as f64);
    }
    if at > lo && at < hi {
        pts.push(at);
        for side in [-1.0, 1.0] {
            let mut d = h.min(if side < 0.0 { at - lo } else { hi - at });
            while d > floor {
                pts.push(at + side * d);
                d *= 0.5;
            }
        }
    } else if at <= lo || at >= hi {
        // grade towards the nearer end when the singular point sits on it
        let end = if (at - lo).abs() <= (at - hi).abs() { lo } else { hi };
        if (at - end).abs() < floor {
            let side = if end == lo { 1.0 } else { -1.0 };
            let mut d = h.min(hi - lo);
            while d > floor {
                pts.push(end + side * d);
                d *= 0.5;
            }
        }
    }
    pts.retain(|p| *p >= lo && *p <= hi);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    pts
}

/// Linear convolution by zero-padded FFT with a reusable plan.
pub struct Convolver {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Convolver {
    /// Plan for convolutions whose full output has at most `min_len` samples.
    pub fn new(min_len: usize) -> Self {
        let len = min_len.next_power_of_two().max(2);
        let mut planner = FftPlanner::new();
        Self { len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spectrum(&self, data: &[Complex64]) -> Vec<Complex64> {
        assert!(data.len() <= self.len, "convolver too short");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        buf[..data.len()].copy_from_slice(data);
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform, normalized.
    pub fn invert(&self, mut spectrum: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut spectrum);
        let s = 1.0 / self.len as f64;
        spectrum.iter_mut().for_each(|v| *v *= s);
        spectrum
    }

    pub fn convolve(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let out_len = a.len() + b.len() - 1;
        assert!(out_len <= self.len, "convolver too short");
        let sa = self.spectrum(a);
        let sb = self.spectrum(b);
        let prod: Vec<Complex64> = sa.iter().zip(&sb).map(|(x, y)| x * y).collect();
        let mut out = self.invert(prod);
        out.truncate(out_len);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trapezoid_examples() {
        assert_eq!(trapezoid(&[1.0, 1.0, 1.0], 0.5).unwrap(), 1.0);
        assert_eq!(trapezoid(&[0.0, 1.0, 2.0], 1.0).unwrap(), 2.0);
        assert!(trapezoid(&[1.0], 1.0).is_err());
        let n = 100_000;
        let h = std::f64::consts::PI / (n - 1) as f64;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        assert!((trapezoid(&v, h).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn log_grid_is_geometric() {
        let g = LogGrid::new(1.0 / 16.0, 8.0, 48).unwrap();
        let r = g.node(1) / g.node(0);
        for j in 1..g.count {
            assert_relative_eq!(g.node(j) / g.node(j - 1), r, max_relative = 1e-12);
        }
        assert_eq!(g.node(47), 8.0);
    }

    #[test]
    fn sphere_weights_and_antipodes() {
        let s = SphereGrid::new(64).unwrap();
        assert_relative_eq!(s.weight() * s.count as f64, std::f64::consts::TAU, max_relative = 1e-15);
        let (c, d) = s.direction(5);
        let (c2, d2) = s.direction(37);
        assert_eq!((c, d), (-c2, -d2));
        assert!(SphereGrid::new(3).is_err());
    }

    #[test]
    fn sample_function_rejects_singularity() {
        let (gx, gy) = Field2D::square_grid(1.0, 5).unwrap();
        let z = sample_function(|_, _| 0.0, gx, gy).unwrap();
        assert!(z.values.iter().all(|v| *v == 0.0));
        let g = sample_function(|x, y| (-x * x - y * y).exp(), gx, gy).unwrap();
        assert_eq!(g.at(2, 2), 1.0);
        match sample_function(|x: f64, y: f64| 1.0 / x.hypot(y), gx, gy) {
            Err(Error::NonFinite { x, y, .. }) => assert_eq!((x, y), (0.0, 0.0)),
            other => panic!("expected a non-finite error, got {other:?}"),
        }
        let (hx, hy) = Field2D::square_grid(1.0, 4).unwrap();
        assert!(sample_function(|x: f64, y: f64| 1.0 / x.hypot(y), hx, hy).is_ok());
    }

    #[test]
    fn dilation_of_gaussian() {
        let (gx, gy) = Field2D::square_grid(4.0, 257).unwrap();
        let f = sample_function(|x, y| (-x * x - y * y).exp(), gx, gy).unwrap();
        let f2 = resample_dilated(&f, 2.0).unwrap();
        let exact = sample_function(|x, y| (-4.0 * (x * x + y * y)).exp(), gx, gy).unwrap();
        let err = f2.values.iter().zip(&exact.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-6, "max error {err}");
        assert_eq!(resample_dilated(&f, 1.0).unwrap(), f);
        assert!(resample_dilated(&f, 0.0).is_err());
        assert!(resample_dilated(&f, -1.0).is_err());
    }

    #[test]
    fn interpolant_integrates_to_riemann_sum() {
        let (gx, gy) = Field2D::square_grid(1.0, 9).unwrap();
        let f = sample_function(|x, y| 1.0 + x * y + x, gx, gy).unwrap();
        let riemann: f64 = f.values.iter().sum::<f64>() * gx.step * gy.step;
        // fine midpoint integration of the interpolant over its full support
        let m = 400;
        let (lo, hi) = (-1.0 - 2.0 * gx.step, 1.0 + 2.0 * gx.step);
        let h = (hi - lo) / m as f64;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += f.interpolate(lo + (j as f64 + 0.5) * h, lo + (i as f64 + 0.5) * h);
            }
        }
        assert_relative_eq!(s * h * h, riemann, max_relative = 1e-4);
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let v = composite_gauss(&[0.0, 1.0, 3.0], 8, |x| x.powi(7));
        assert_relative_eq!(v, 3f64.powi(8) / 8.0, max_relative = 1e-14);
        let g = graded_breaks(-1.0, 1.0, 0.0, 0.25, 1e-12);
        let v = composite_gauss(&g, 16, |x: f64| x.abs().ln());
        assert_relative_eq!(v, -2.0, max_relative = 1e-10);
    }

    #[test]
    fn fft_convolution_matches_direct() {
        let a: Vec<Complex64> = (0..7).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let b: Vec<Complex64> = (0..5).map(|i| Complex64::new(1.0, -(i as f64))).collect();
        let conv = Convolver::new(a.len() + b.len() - 1);
        let fast = conv.convolve(&a, &b);
        for (k, v) in fast.iter().enumerate() {
            let mut d = Complex64::new(0.0, 0.0);
            for (i, ai) in a.iter().enumerate() {
                if k >= i && k - i < b.len() {
                    d += ai * b[k - i];
                }
            }
            assert!((v - d).norm() < 1e-12);
        }
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
