//! Real sample fields, their Fourier coefficients, and the transforms
//! between them.
//!
//! Coefficients are stored as modal amplitudes: `u(x) = sum_k c_k exp(i xi_k . x)`
//! with `xi_k = 2 pi k / L` and the physical coordinate `x` (not the lattice
//! index), so Fourier multipliers and all derivative algebra read exactly as
//! on the continuum.

use crate::error::{Error, Result};
use crate::grid::{Exponent, Grid};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

/// Real-valued samples of a scalar or vector field on a [`Grid`].
/// Values are stored per component, row-major within each component.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        Field {
            grid,
            components,
            values: vec![0.0; components * grid.points()],
        }
    }

    pub fn from_values(grid: Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != components * grid.points() {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                components * grid.points(),
                values.len()
            )));
        }
        let f = Field {
            grid,
            components,
            values,
        };
        f.check_finite("from_values")?;
        Ok(f)
    }

    /// Build a scalar field by evaluating `f` at every lattice point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; grid.points()];
        let mut x = [0.0f64; 3];
        for (idx, v) in values.iter_mut().enumerate() {
            let ix = grid.unravel(idx);
            for axis in 0..grid.dim() {
                x[axis] = grid.coordinate(ix[axis]);
            }
            *v = f(&x[..grid.dim()]);
        }
        Field {
            grid,
            components: 1,
            values,
        }
    }

    /// Build a vector field (d components) by evaluating `f` at every point.
    pub fn vector_from_fn(grid: Grid, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let d = grid.dim();
        let pts = grid.points();
        let mut values = vec![0.0; d * pts];
        let mut x = [0.0f64; 3];
        for idx in 0..pts {
            let ix = grid.unravel(idx);
            for axis in 0..d {
                x[axis] = grid.coordinate(ix[axis]);
            }
            let u = f(&x[..d]);
            debug_assert_eq!(u.len(), d);
            for (c, &uc) in u.iter().enumerate() {
                values[c * pts + idx] = uc;
            }
        }
        Field {
            grid,
            components: d,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let pts = self.grid.points();
        &self.values[c * pts..(c + 1) * pts]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let pts = self.grid.points();
        &mut self.values[c * pts..(c + 1) * pts]
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                context: context.to_string(),
            })
        }
    }

    /// Pointwise Euclidean magnitude across components (identity for scalars).
    pub fn magnitude(&self) -> Field {
        if self.components == 1 {
            let mut out = self.clone();
            for v in out.values_mut() {
                *v = v.abs();
            }
            return out;
        }
        let pts = self.grid.points();
        let mut values = vec![0.0; pts];
        for c in 0..self.components {
            let comp = self.component(c);
            for (v, &u) in values.iter_mut().zip(comp) {
                *v += u * u;
            }
        }
        for v in values.iter_mut() {
            *v = v.sqrt();
        }
        Field {
            grid: self.grid,
            components: 1,
            values,
        }
    }

    /// Riemann-sum Lebesgue norm: `(sum |f|^p h^d)^(1/p)` for finite `p`,
    /// the sample maximum of the pointwise magnitude for `p = inf`.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        let mag = self.magnitude();
        let vals = mag.component(0);
        if p.is_infinite() {
            return vals.iter().fold(0.0f64, |m, &v| m.max(v));
        }
        let pv = p.value();
        let hd = self.grid.cell_volume();
        if pv == 1.0 {
            vals.iter().sum::<f64>() * hd
        } else if pv == 2.0 {
            (vals.iter().map(|v| v * v).sum::<f64>() * hd).sqrt()
        } else {
            (vals.iter().map(|v| v.powf(pv)).sum::<f64>() * hd).powf(1.0 / pv)
        }
    }

    /// Mean value over the box, per the quadrature measure.
    pub fn mean(&self, component: usize) -> f64 {
        let comp = self.component(component);
        comp.iter().sum::<f64>() / comp.len() as f64
    }

    pub fn scale(&self, factor: f64) -> Field {
        let mut out = self.clone();
        for v in out.values_mut() {
            *v *= factor;
        }
        out
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Shape("field addition shape mismatch".into()));
        }
        let mut out = self.clone();
        for (v, &w) in out.values.iter_mut().zip(&other.values) {
            *v += w;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.add(&other.scale(-1.0))
    }

    /// Translate by whole lattice steps (circular). `shift[axis]` is in
    /// lattice units and may be negative.
    pub fn translate(&self, shift: &[i64]) -> Field {
        let grid = self.grid;
        let n = grid.samples_per_axis() as i64;
        let pts = grid.points();
        let mut out = Field::zeros(grid, self.components);
        for c in 0..self.components {
            let src = self.component(c);
            let dst = out.component_mut(c);
            for idx in 0..pts {
                let ix = grid.unravel(idx);
                let mut jx = [0usize; 3];
                for axis in 0..grid.dim() {
                    jx[axis] = (ix[axis] as i64 - shift[axis]).rem_euclid(n) as usize;
                }
                dst[idx] = src[grid.ravel(&jx[..grid.dim()])];
            }
        }
        out
    }

    pub fn transform(&self) -> Result<SpectralField> {
        self.check_finite("transform input")?;
        let pts = self.grid.points();
        let mut coeffs = Vec::with_capacity(self.components * pts);
        for c in 0..self.components {
            let mut buf: Vec<Complex64> = self
                .component(c)
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            fft_nd(&self.grid, &mut buf, FftDirection::Forward);
            let scale = 1.0 / pts as f64;
            apply_center_phase(&self.grid, &mut buf);
            for v in buf.iter_mut() {
                *v *= scale;
            }
            coeffs.extend_from_slice(&buf);
        }
        Ok(SpectralField {
            grid: self.grid,
            components: self.components,
            coeffs,
        })
    }
}

/// Complex Fourier coefficients of a [`Field`], indexed by integer
/// wavevector in FFT ordering per axis.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        SpectralField {
            grid,
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); components * grid.points()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let pts = self.grid.points();
        &self.coeffs[c * pts..(c + 1) * pts]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let pts = self.grid.points();
        &mut self.coeffs[c * pts..(c + 1) * pts]
    }

    pub fn inverse(&self) -> Result<Field> {
        let pts = self.grid.points();
        let mut values = Vec::with_capacity(self.components * pts);
        for c in 0..self.components {
            let mut buf: Vec<Complex64> = self.component(c).to_vec();
            apply_center_phase(&self.grid, &mut buf);
            fft_nd(&self.grid, &mut buf, FftDirection::Inverse);
            values.extend(buf.iter().map(|v| v.re));
        }
        let f = Field {
            grid: self.grid,
            components: self.components,
            values,
        };
        f.check_finite("inverse transform output")?;
        Ok(f)
    }

    /// Apply a scalar Fourier multiplier `m(kappa)` to every component.
    /// The multiplier sees the integer wavevector (per-axis, FFT ordering).
    pub fn apply_multiplier(&mut self, m: impl Fn(&[i64]) -> Complex64) {
        let grid = self.grid;
        let pts = grid.points();
        let d = grid.dim();
        // Precompute per flat index once, reuse across components.
        let mut table = Vec::with_capacity(pts);
        let mut k = [0i64; 3];
        for idx in 0..pts {
            let ix = grid.unravel(idx);
            for axis in 0..d {
                k[axis] = grid.wavenumber(ix[axis]);
            }
            table.push(m(&k[..d]));
        }
        for c in 0..self.components {
            for (v, &m) in self.component_mut(c).iter_mut().zip(&table) {
                *v *= m;
            }
        }
    }

    /// Apply a radial multiplier `m(|xi|)` with `xi` the physical frequency.
    pub fn apply_radial_multiplier(&mut self, m: impl Fn(f64) -> f64) {
        let two_pi_over_l = 2.0 * std::f64::consts::PI / self.grid.length();
        self.apply_multiplier(|k| {
            let norm2: f64 = k.iter().map(|&ki| (ki * ki) as f64).sum();
            Complex64::new(m(two_pi_over_l * norm2.sqrt()), 0.0)
        });
    }

    /// `L^2` norm computed from coefficients (Parseval route):
    /// `sqrt(L^d sum |c_k|^2)` over all components.
    pub fn l2_norm(&self) -> f64 {
        let ld = self.grid.length().powi(self.grid.dim() as i32);
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * ld).sqrt()
    }

    /// Evaluate the truncated Fourier series at an arbitrary physical point
    /// (component `c`). Exact for band-limited data; O(n^d) per call.
    pub fn evaluate_at(&self, c: usize, x: &[f64]) -> f64 {
        let grid = self.grid;
        let d = grid.dim();
        let mut sum = Complex64::new(0.0, 0.0);
        let comp = self.component(c);
        for (idx, coef) in comp.iter().enumerate() {
            if coef.norm_sqr() == 0.0 {
                continue;
            }
            let ix = grid.unravel(idx);
            let mut phase = 0.0;
            for axis in 0..d {
                phase += grid.frequency(ix[axis]) * x[axis];
            }
            sum += coef * Complex64::new(0.0, phase).exp();
        }
        sum.re
    }
}

#[derive(Clone, Copy, PartialEq)]
enum FftDirection {
    Forward,
    Inverse,
}

static PLAN_CACHE: Lazy<RwLock<BTreeMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| RwLock::new(BTreeMap::new()));

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    if let Some(p) = PLAN_CACHE.read().unwrap().get(&(n, forward)) {
        return p.clone();
    }
    let mut planner = FftPlanner::new();
    let p = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    PLAN_CACHE.write().unwrap().insert((n, forward), p.clone());
    p
}

/// In-place d-dimensional complex FFT over a row-major buffer, one axis at
/// a time. Both directions are unnormalized; the 1/n^d lives in
/// [`Field::transform`] so stored coefficients are modal amplitudes.
fn fft_nd(grid: &Grid, buf: &mut [Complex64], dir: FftDirection) {
    let n = grid.samples_per_axis();
    let d = grid.dim();
    let fft = plan(n, dir == FftDirection::Forward);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..d {
        // stride between consecutive elements along `axis`
        let stride = n.pow((d - 1 - axis) as u32);
        let lines = grid.points() / n;
        for l in 0..lines {
            // Base offset of this line: interleave the non-axis indices.
            let block = l / stride;
            let within = l % stride;
            let base = block * stride * n + within;
            for (i, v) in line.iter_mut().enumerate() {
                *v = buf[base + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                buf[base + i * stride] = *v;
            }
        }
    }
}

/// The grid is centered at the origin while the DFT indexes samples from
/// the box corner; the difference is the real phase `(-1)^(sum kappa)`.
/// Applying it after the forward and before the inverse transform makes
/// stored coefficients true modal amplitudes in the centered coordinates.
fn apply_center_phase(grid: &Grid, buf: &mut [Complex64]) {
    let d = grid.dim();
    for (idx, v) in buf.iter_mut().enumerate() {
        let ix = grid.unravel(idx);
        let mut parity = 0i64;
        for axis in 0..d {
            parity += grid.wavenumber(ix[axis]);
        }
        if parity.rem_euclid(2) == 1 {
            *v = -*v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_transforms_to_zero_mode() {
        let g = Grid::new(1, 32, 4.0).unwrap();
        let f = Field::from_fn(g, |_| 2.5);
        let s = f.transform().unwrap();
        for (idx, c) in s.component(0).iter().enumerate() {
            if idx == 0 {
                assert!((c.re - 2.5).abs() < 1e-13 && c.im.abs() < 1e-13);
            } else {
                assert!(c.norm() < 1e-13, "mode {idx} should vanish, got {c}");
            }
        }
    }

    #[test]
    fn sine_has_two_conjugate_modes() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * PI * x[0] / 8.0).sin());
        let s = f.transform().unwrap();
        let c = s.component(0);
        // sin(xi x) = (e^{i xi x} - e^{-i xi x}) / 2i: modes kappa = +-1.
        assert!((c[1] - Complex64::new(0.0, -0.5)).norm() < 1e-12);
        assert!((c[63] - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        let stray: f64 = c
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 1 && *i != 63)
            .map(|(_, v)| v.norm())
            .sum();
        assert!(stray < 1e-11);
    }

    #[test]
    fn evaluate_at_matches_samples() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, |x| x[0].sin() + 0.3 * (3.0 * x[0]).cos());
        let s = f.transform().unwrap();
        for i in [0usize, 5, 16, 31] {
            let x = [g.coordinate(i)];
            assert!((s.evaluate_at(0, &x) - f.component(0)[i]).abs() < 1e-11);
        }
        // Off-lattice evaluation agrees with the analytic band-limited field.
        let x = 0.3717;
        assert!((s.evaluate_at(0, &[x]) - (x.sin() + 0.3 * (3.0 * x).cos())).abs() < 1e-11);
    }

    #[test]
    fn transform_rejects_non_finite() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let mut f = Field::zeros(g, 1);
        f.values_mut()[3] = f64::NAN;
        assert!(f.transform().is_err());
    }

    #[test]
    fn translate_wraps_circularly() {
        let g = Grid::new(1, 8, 8.0).unwrap();
        let f = Field::from_values(g, 1, (0..8).map(|i| i as f64).collect()).unwrap();
        let t = f.translate(&[3]);
        assert_eq!(t.component(0)[3], 0.0);
        assert_eq!(t.component(0)[0], 5.0);
    }
}
