//! Spectral derivatives and the Leray projection.

use crate::error::{Error, Result};
use crate::field::{Field, SpectralField};
use crate::grid::Exponent;
use num_complex::Complex64;

/// Fraction of derivative energy allowed in the outermost wavenumber shell
/// before the result is flagged as resolution-limited.
pub const NYQUIST_ENERGY_TOL: f64 = 1e-6;

/// A spectrally computed derivative together with a resolution flag: when a
/// non-negligible share of the derivative's energy sits on the Nyquist
/// shell, the order requested is amplifying modes the grid cannot represent
/// faithfully.
#[derive(Debug, Clone)]
pub struct Derivative {
    pub field: Field,
    pub nyquist_energy_fraction: f64,
    pub under_resolved: bool,
}

/// Differentiate by the multi-index `orders` (one entry per axis):
/// multiplication by `(i xi)^orders` in frequency space. Odd derivatives
/// zero the Nyquist mode, the symmetric choice for real data.
pub fn spectral_derivative(f: &Field, orders: &[usize]) -> Result<Derivative> {
    let grid = *f.grid();
    if orders.len() != grid.dim() {
        return Err(Error::Shape(format!(
            "expected {} derivative orders, got {}",
            grid.dim(),
            orders.len()
        )));
    }
    let mut s = f.transform()?;
    let n = grid.samples_per_axis() as i64;
    let two_pi_over_l = 2.0 * std::f64::consts::PI / grid.length();
    let orders: Vec<usize> = orders.to_vec();
    s.apply_multiplier(|k| {
        let mut m = Complex64::new(1.0, 0.0);
        for (axis, &ord) in orders.iter().enumerate() {
            if ord == 0 {
                continue;
            }
            if k[axis] == -n / 2 && ord % 2 == 1 {
                return Complex64::new(0.0, 0.0);
            }
            let xi = two_pi_over_l * k[axis] as f64;
            m *= Complex64::new(0.0, xi).powu(ord as u32);
        }
        m
    });
    let (nyq, total) = nyquist_energy(&s);
    let fraction = if total > 0.0 { nyq / total } else { 0.0 };
    Ok(Derivative {
        field: s.inverse()?,
        nyquist_energy_fraction: fraction,
        under_resolved: fraction > NYQUIST_ENERGY_TOL,
    })
}

/// Energy on the outermost shell (any axis at |kappa| >= n/2 - 1) and total.
fn nyquist_energy(s: &SpectralField) -> (f64, f64) {
    let grid = *s.grid();
    let edge = (grid.samples_per_axis() / 2) as i64 - 1;
    let mut nyq = 0.0;
    let mut total = 0.0;
    for c in 0..s.components() {
        for (idx, v) in s.component(c).iter().enumerate() {
            let e = v.norm_sqr();
            total += e;
            let ix = grid.unravel(idx);
            let on_edge = (0..grid.dim()).any(|a| grid.wavenumber(ix[a]).abs() >= edge);
            if on_edge {
                nyq += e;
            }
        }
    }
    (nyq, total)
}

/// Gradient of a scalar field: d first derivatives assembled as a vector field.
pub fn gradient(f: &Field) -> Result<Field> {
    let grid = *f.grid();
    if f.components() != 1 {
        return Err(Error::Shape("gradient expects a scalar field".into()));
    }
    let d = grid.dim();
    let pts = grid.points();
    let mut out = Field::zeros(grid, d);
    for axis in 0..d {
        let mut orders = vec![0usize; d];
        orders[axis] = 1;
        let da = spectral_derivative(f, &orders)?;
        out.values_mut()[axis * pts..(axis + 1) * pts].copy_from_slice(da.field.component(0));
    }
    Ok(out)
}

/// Pointwise Frobenius magnitude of the full k-th derivative tensor of a
/// scalar field: `sqrt(sum_(|a|=k) multinomial(k,a) (d^a f)^2)`.
pub fn derivative_tensor_magnitude(f: &Field, k: usize) -> Result<Field> {
    let grid = *f.grid();
    if f.components() != 1 {
        return Err(Error::Shape("derivative tensor expects a scalar field".into()));
    }
    if k == 0 {
        return Ok(f.magnitude());
    }
    let d = grid.dim();
    let mut sum_sq = Field::zeros(grid, 1);
    for orders in multi_indices(d, k) {
        let da = spectral_derivative(f, &orders)?;
        let w = multinomial(k, &orders) as f64;
        for (s, &v) in sum_sq.values_mut().iter_mut().zip(da.field.component(0)) {
            *s += w * v * v;
        }
    }
    for v in sum_sq.values_mut() {
        *v = v.sqrt();
    }
    Ok(sum_sq)
}

/// Sup norm of the k-th derivative tensor of each component of `f`,
/// maximized over components. For vector fields the tensor magnitude is
/// computed per component and the pointwise Euclidean sum is taken.
pub fn derivative_sup_norm(f: &Field, k: usize) -> Result<f64> {
    let pts = f.grid().points();
    let mut sum_sq = vec![0.0f64; pts];
    for c in 0..f.components() {
        let comp = Field::from_values(*f.grid(), 1, f.component(c).to_vec())?;
        let mag = derivative_tensor_magnitude(&comp, k)?;
        for (s, &v) in sum_sq.iter_mut().zip(mag.component(0)) {
            *s += v * v;
        }
    }
    Ok(sum_sq.iter().fold(0.0f64, |m, &v| m.max(v.sqrt())))
}

fn multi_indices(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if d == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=k {
            prefix.push(first);
            rec(d - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, k, &mut Vec::new(), &mut out);
    out
}

fn multinomial(k: usize, orders: &[usize]) -> u64 {
    let mut result = 1u64;
    let mut rem = k;
    for &o in orders {
        result *= binomial(rem, o);
        rem -= o;
    }
    result
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// Divergence of a vector field, computed spectrally.
pub fn divergence(u: &Field) -> Result<Field> {
    let grid = *u.grid();
    let d = grid.dim();
    if u.components() != d {
        return Err(Error::Shape(format!(
            "divergence expects {} components, got {}",
            d,
            u.components()
        )));
    }
    let mut out = Field::zeros(grid, 1);
    for axis in 0..d {
        let comp = Field::from_values(grid, 1, u.component(axis).to_vec())?;
        let mut orders = vec![0usize; d];
        orders[axis] = 1;
        let da = spectral_derivative(&comp, &orders)?;
        for (o, &v) in out.values_mut().iter_mut().zip(da.field.component(0)) {
            *o += v;
        }
    }
    Ok(out)
}

/// Relative spectral divergence `||div u||_2 / ||grad u||_2`-style measure:
/// we normalize by `||u||_2` times the largest resolvable frequency, which
/// is what the projector can actually control.
pub fn relative_divergence(u: &Field) -> Result<f64> {
    let div = divergence(u)?;
    let u2 = u.lp_norm(Exponent::TWO);
    if u2 == 0.0 {
        return Ok(0.0);
    }
    let xi_max = std::f64::consts::PI / u.grid().spacing();
    Ok(div.lp_norm(Exponent::TWO) / (u2 * xi_max))
}

/// Apply the Leray projection in place on coefficients:
/// `c(k) -> (I - xi xi^T / |xi|^2) c(k)`, zero mode untouched.
pub fn leray_project_spectral(s: &mut SpectralField) {
    let grid = *s.grid();
    let d = grid.dim();
    debug_assert_eq!(s.components(), d);
    let pts = grid.points();
    for idx in 0..pts {
        let ix = grid.unravel(idx);
        let mut k = [0.0f64; 3];
        let mut k2 = 0.0;
        for axis in 0..d {
            k[axis] = grid.wavenumber(ix[axis]) as f64;
            k2 += k[axis] * k[axis];
        }
        if k2 == 0.0 {
            continue;
        }
        let mut dot = Complex64::new(0.0, 0.0);
        for axis in 0..d {
            dot += s.component(axis)[idx] * k[axis];
        }
        let dot = dot / k2;
        for axis in 0..d {
            s.component_mut(axis)[idx] -= dot * k[axis];
        }
    }
}

/// Project a vector field onto its divergence-free part.
pub fn leray_project(u: &Field) -> Result<Field> {
    let grid = *u.grid();
    if u.components() != grid.dim() {
        return Err(Error::Shape(format!(
            "Leray projection expects {} components, got {}",
            grid.dim(),
            u.components()
        )));
    }
    let mut s = u.transform()?;
    leray_project_spectral(&mut s);
    s.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn sine_derivative_is_cosine() {
        let l = 8.0;
        let g = Grid::new(1, 64, l).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * PI * x[0] / l).sin());
        let df = spectral_derivative(&f, &[1]).unwrap();
        let expected = Field::from_fn(g, |x| (2.0 * PI / l) * (2.0 * PI * x[0] / l).cos());
        let err = df
            .field
            .sub(&expected)
            .unwrap()
            .lp_norm(Exponent::INF);
        assert!(err <= 1e-10, "max error {err}");
        assert!(!df.under_resolved);
    }

    #[test]
    fn constant_derivative_is_zero() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = Field::from_fn(g, |_| 7.0);
        let df = spectral_derivative(&f, &[1, 0]).unwrap();
        assert!(df.field.lp_norm(Exponent::INF) < 1e-13);
    }

    #[test]
    fn gaussian_derivative_agrees_across_resolutions() {
        let l = 16.0;
        let sigma = 1.0;
        let bump = move |x: &[f64]| (-x[0] * x[0] / (2.0 * sigma * sigma)).exp();
        let coarse = Grid::new(1, 64, l).unwrap();
        let fine = Grid::new(1, 128, l).unwrap();
        let dc = spectral_derivative(&Field::from_fn(coarse, bump), &[1]).unwrap();
        let df = spectral_derivative(&Field::from_fn(fine, bump), &[1]).unwrap();
        // Compare on the shared (coarse) lattice: fine index 2i matches coarse i.
        let mut max_err = 0.0f64;
        for i in 0..64 {
            let a = dc.field.component(0)[i];
            let b = df.field.component(0)[2 * i];
            max_err = max_err.max((a - b).abs());
        }
        assert!(max_err <= 1e-8, "refinement disagreement {max_err}");
    }

    #[test]
    fn under_resolved_derivative_is_flagged() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        // Saw-like data with substantial Nyquist content.
        let f = Field::from_values(
            g,
            1,
            (0..32).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        )
        .unwrap();
        let df = spectral_derivative(&f, &[2]).unwrap();
        assert!(df.under_resolved);
    }

    #[test]
    fn gradient_fields_are_annihilated() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        // grad phi with phi = sin x cos y, mean zero.
        let u = Field::vector_from_fn(g, |x| {
            vec![x[0].cos() * x[1].cos(), -x[0].sin() * x[1].sin()]
        });
        let p = leray_project(&u).unwrap();
        assert!(p.lp_norm(Exponent::INF) < 1e-12);
    }

    #[test]
    fn taylor_green_is_fixed_by_projection() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = Field::vector_from_fn(g, |x| {
            vec![x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin()]
        });
        let p = leray_project(&u).unwrap();
        let err = p.sub(&u).unwrap().lp_norm(Exponent::INF);
        assert!(err < 1e-12, "projection moved a divergence-free field by {err}");
    }

    #[test]
    fn divergence_of_taylor_green_vanishes() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = Field::vector_from_fn(g, |x| {
            vec![x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin()]
        });
        assert!(relative_divergence(&u).unwrap() < 1e-12);
    }

    #[test]
    fn multinomial_weights() {
        assert_eq!(multinomial(2, &[1, 1]), 2);
        assert_eq!(multinomial(3, &[2, 1]), 3);
        assert_eq!(multinomial(4, &[2, 2]), 6);
        assert_eq!(multi_indices(2, 2).len(), 3);
        assert_eq!(multi_indices(3, 2).len(), 6);
    }
}
