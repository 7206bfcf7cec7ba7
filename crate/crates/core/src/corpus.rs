//! Deterministic field families used by experiments, calibration, and the
//! command line: bumps, bump arrays, the half-plus-spike indicator,
//! Taylor-Green vortices, and band-limited noise. Everything randomized is
//! seeded with ChaCha so runs reproduce bit for bit.

use crate::error::Result;
use crate::field::Field;
use crate::grid::Grid;
use crate::spectral::leray_project;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Gaussian bump `amp * exp(-|x - center|^2 / (2 sigma^2))` (periodic
/// distance).
pub fn gaussian_bump(grid: Grid, sigma: f64, amp: f64, center: &[f64]) -> Field {
    let l = grid.length();
    let d = grid.dim();
    let center = center.to_vec();
    Field::from_fn(grid, move |x| {
        let mut r2 = 0.0;
        for axis in 0..d {
            let mut dx = (x[axis] - center[axis]).abs() % l;
            if dx > l / 2.0 {
                dx = l - dx;
            }
            r2 += dx * dx;
        }
        amp * (-r2 / (2.0 * sigma * sigma)).exp()
    })
}

/// The running half-plus-spike example `1/2 + 1/2 * 1_(|x| < eps/2)` (d = 1).
pub fn indicator_example(grid: Grid, eps: f64) -> Field {
    Field::from_fn(grid, move |x| {
        if x[0].abs() < eps / 2.0 {
            1.0
        } else {
            0.5
        }
    })
}

/// Several well-separated bumps with seeded centers and mild amplitude
/// variation; the workhorse of sparse corpora.
pub fn bump_array(grid: Grid, sigma: f64, count: usize, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.length();
    let d = grid.dim();
    let mut acc = Field::zeros(grid, 1);
    for _ in 0..count {
        let center: Vec<f64> = (0..d).map(|_| rng.gen_range(-l / 2.0..l / 2.0)).collect();
        let amp = rng.gen_range(0.5..1.0);
        let signed = if rng.gen_bool(0.5) { amp } else { -amp };
        let bump = gaussian_bump(grid, sigma, signed, &center);
        acc = acc.add(&bump).expect("same grid");
    }
    acc
}

/// Real random field supported on dyadic levels `[j_lo, j_hi]`.
pub fn random_band(grid: Grid, j_lo: f64, j_hi: f64, seed: u64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..grid.points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = Field::from_values(grid, 1, noise)?;
    let mut s = f.transform()?;
    let lo = 2f64.powf(j_lo);
    let hi = 2f64.powf(j_hi);
    s.apply_radial_multiplier(|xi| {
        if xi >= lo && xi <= hi {
            1.0
        } else {
            0.0
        }
    });
    s.inverse()
}

/// 2-d Taylor-Green vortex `A (sin x cos y, -cos x sin y)` on a `2 pi`
/// multiple box; an exact decaying Navier-Stokes solution.
pub fn taylor_green(grid: Grid, amp: f64) -> Field {
    assert_eq!(grid.dim(), 2, "Taylor-Green vortex is two-dimensional");
    let k = 2.0 * std::f64::consts::PI / grid.length();
    Field::vector_from_fn(grid, move |x| {
        vec![
            amp * (k * x[0]).sin() * (k * x[1]).cos(),
            -amp * (k * x[0]).cos() * (k * x[1]).sin(),
        ]
    })
}

/// Viscous decay rate of [`taylor_green`]: the exact solution is
/// `u(t) = e^(-2 k^2 t) u_0` with `k = 2 pi / L`.
pub fn taylor_green_rate(grid: &Grid) -> f64 {
    let k = 2.0 * std::f64::consts::PI / grid.length();
    2.0 * k * k
}

/// Divergence-free vector bump: the rotated gradient of a Gaussian stream
/// function in 2-d, or a projected Gaussian jet in 3-d.
pub fn solenoidal_bump(grid: Grid, sigma: f64, amp: f64, center: &[f64]) -> Result<Field> {
    let d = grid.dim();
    let l = grid.length();
    let center = center.to_vec();
    let u = match d {
        2 => Field::vector_from_fn(grid, move |x| {
            let mut dx = [0.0f64; 2];
            for axis in 0..2 {
                let mut v = x[axis] - center[axis];
                while v > l / 2.0 {
                    v -= l;
                }
                while v < -l / 2.0 {
                    v += l;
                }
                dx[axis] = v;
            }
            let s2 = sigma * sigma;
            let psi = amp * (-(dx[0] * dx[0] + dx[1] * dx[1]) / (2.0 * s2)).exp();
            // u = curl(psi e_z) = (d_y psi, -d_x psi)
            vec![-dx[1] / s2 * psi, dx[0] / s2 * psi]
        }),
        3 => {
            let jet = Field::vector_from_fn(grid, move |x| {
                let mut r2 = 0.0;
                for axis in 0..3 {
                    let mut v = x[axis] - center[axis];
                    while v > l / 2.0 {
                        v -= l;
                    }
                    while v < -l / 2.0 {
                        v += l;
                    }
                    r2 += v * v;
                }
                let g = amp * (-r2 / (2.0 * sigma * sigma)).exp();
                vec![g, 0.0, 0.0]
            });
            return leray_project(&jet);
        }
        _ => {
            return Err(crate::error::Error::Grid(
                "solenoidal bumps need d = 2 or 3".into(),
            ))
        }
    };
    Ok(u)
}

/// A named family of initial data, deserializable from experiment configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `1/2 + 1/2 1_(|x| < eps/2)`, d = 1.
    Indicator { eps: f64 },
    Gaussian {
        sigma: f64,
        amp: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    BumpArray {
        sigma: f64,
        count: usize,
        #[serde(default)]
        seed: u64,
    },
    TaylorGreen { amp: f64 },
    SolenoidalBump {
        sigma: f64,
        amp: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    RandomBand {
        j_lo: f64,
        j_hi: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Load from a field file in the SPNS format.
    File { path: String },
}

impl InitialData {
    pub fn build(&self, grid: Grid) -> Result<Field> {
        match self {
            InitialData::Indicator { eps } => Ok(indicator_example(grid, *eps)),
            InitialData::Gaussian { sigma, amp, center } => {
                let mut c = center.clone();
                c.resize(grid.dim(), 0.0);
                Ok(gaussian_bump(grid, *sigma, *amp, &c))
            }
            InitialData::BumpArray { sigma, count, seed } => {
                Ok(bump_array(grid, *sigma, *count, *seed))
            }
            InitialData::TaylorGreen { amp } => Ok(taylor_green(grid, *amp)),
            InitialData::SolenoidalBump { sigma, amp, center } => {
                let mut c = center.clone();
                c.resize(grid.dim(), 0.0);
                solenoidal_bump(grid, *sigma, *amp, &c)
            }
            InitialData::RandomBand { j_lo, j_hi, seed } => random_band(grid, *j_lo, *j_hi, *seed),
            InitialData::File { path } => crate::io::load_field(std::path::Path::new(path)),
        }
    }
}

/// The ten-field sparse corpus used by the caloric decay experiments: bumps
/// and bump pairs at scales that certify comfortably inside the box.
pub fn decay_corpus_1d(seed: u64) -> Vec<Field> {
    let grid = Grid::new(1, 2048, 32.0).unwrap();
    let mut out = Vec::new();
    for (i, sigma) in [0.05, 0.08, 0.12, 0.05, 0.08].iter().enumerate() {
        out.push(gaussian_bump(grid, *sigma, 1.0, &[-3.0 + i as f64]));
    }
    for (i, sigma) in [0.05, 0.07, 0.1].iter().enumerate() {
        out.push(bump_array(grid, *sigma, 2, seed + i as u64));
    }
    out.push(indicator_narrow(grid));
    out.push(
        gaussian_bump(grid, 0.06, 1.0, &[-5.0])
            .add(&gaussian_bump(grid, 0.09, -0.7, &[6.0]))
            .unwrap(),
    );
    out
}

/// A spike on a zero background (sparse in every sense), unlike the
/// half-plus-spike running example which is deliberately borderline.
fn indicator_narrow(grid: Grid) -> Field {
    Field::from_fn(grid, |x| if x[0].abs() < 0.05 { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Exponent;
    use crate::spectral::relative_divergence;

    #[test]
    fn taylor_green_is_divergence_free() {
        let g = Grid::new(2, 64, 2.0 * std::f64::consts::PI).unwrap();
        let u = taylor_green(g, 1.0);
        assert!(relative_divergence(&u).unwrap() < 1e-12);
    }

    #[test]
    fn solenoidal_bumps_are_divergence_free() {
        let g2 = Grid::new(2, 64, 16.0).unwrap();
        let u2 = solenoidal_bump(g2, 1.0, 1.0, &[0.0, 0.0]).unwrap();
        assert!(relative_divergence(&u2).unwrap() < 1e-10);
        let g3 = Grid::new(3, 32, 16.0).unwrap();
        let u3 = solenoidal_bump(g3, 1.5, 1.0, &[0.0, 0.0, 0.0]).unwrap();
        assert!(relative_divergence(&u3).unwrap() < 1e-10);
    }

    #[test]
    fn random_band_is_band_limited() {
        let g = Grid::new(1, 512, 2.0 * std::f64::consts::PI).unwrap();
        let u = random_band(g, 4.0, 6.0, 42).unwrap();
        let d = crate::frequency::DyadicDecomposition::new(g);
        let low = d.low_pass(&u, 2.0).unwrap();
        assert!(low.lp_norm(Exponent::TWO) / u.lp_norm(Exponent::TWO) < 1e-12);
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = decay_corpus_1d(7);
        let b = decay_corpus_1d(7);
        assert_eq!(a.len(), 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.values(), y.values());
        }
    }

    #[test]
    fn initial_data_config_roundtrip() {
        let json = r#"{"kind": "gaussian", "sigma": 0.5, "amp": 1.0}"#;
        let data: InitialData = serde_json::from_str(json).unwrap();
        let g = Grid::new(1, 64, 8.0).unwrap();
        let f = data.build(g).unwrap();
        assert!(f.lp_norm(Exponent::INF) > 0.99);
        // unknown keys rejected
        let bad = r#"{"kind": "gaussian", "sigma": 0.5, "amp": 1.0, "wat": 3}"#;
        assert!(serde_json::from_str::<InitialData>(bad).is_err());
    }
}
