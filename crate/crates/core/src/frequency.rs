//! Littlewood-Paley dyadic decomposition, frequency sparseness, Bernstein
//! ratios, and the `B^{-1}_{inf,inf}` norm.
//!
//! The block profile is the classical smooth-bump construction: a radial
//! cutoff `chi` equal to 1 on `|xi| <= 3/4` and 0 on `|xi| >= 4/3`, with
//! `phi(xi) = chi(xi/2) - chi(xi)` supported on the annulus
//! `3/4 <= |xi| <= 8/3` and `sum_j phi(xi / 2^j) = 1` away from zero.
//! The low-pass `D_{<J}` is the dilated cutoff `chi(|xi| / 2^J)`, which is
//! well defined for non-integer `J`; the mean mode always belongs to it.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Exponent, Grid};
use serde::{Deserialize, Serialize};

/// Lower edge of the block annulus (`c1` in multiplier support `[c1 2^j, c2 2^j]`).
pub const ANNULUS_LOW: f64 = 0.75;
/// Upper edge of the block annulus.
pub const ANNULUS_HIGH: f64 = 8.0 / 3.0;

/// `exp(-1/x)` glued to zero: the standard smooth step ingredient.
fn theta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth transition from 0 at `x <= 0` to 1 at `x >= 1`.
fn smooth_step(x: f64) -> f64 {
    let a = theta(x);
    let b = theta(1.0 - x);
    a / (a + b)
}

/// Radial low-pass profile: 1 on `r <= 3/4`, 0 on `r >= 4/3`.
pub fn chi(r: f64) -> f64 {
    1.0 - smooth_step((r - 0.75) / (4.0 / 3.0 - 0.75))
}

/// Radial block profile `phi(r) = chi(r/2) - chi(r)`, supported on
/// `[3/4, 8/3]`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// The dyadic block family resolvable on a grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DyadicDecomposition {
    pub grid: Grid,
    /// Smallest level whose annulus reaches the first nonzero frequency.
    pub j_min: i32,
    /// Largest level whose annulus stays below the Nyquist frequency.
    pub j_max: i32,
}

impl DyadicDecomposition {
    pub fn new(grid: Grid) -> Self {
        let xi_min = 2.0 * std::f64::consts::PI / grid.length();
        let xi_max = std::f64::consts::PI / grid.spacing();
        let j_min = (xi_min.log2()).ceil() as i32;
        let j_max = (xi_max.log2()).floor() as i32;
        DyadicDecomposition { grid, j_min, j_max }
    }

    pub fn check_level(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            Err(Error::LevelRange {
                j,
                j_min: self.j_min,
                j_max: self.j_max,
            })
        } else {
            Ok(())
        }
    }

    /// Frequencies where the resolvable blocks form an exact partition of
    /// unity: `(4/3) 2^{j_min} <= |xi| <= (3/4) 2^{j_max + 1}`.
    pub fn partition_range(&self) -> (f64, f64) {
        (
            (4.0 / 3.0) * 2f64.powi(self.j_min),
            0.75 * 2f64.powi(self.j_max + 1),
        )
    }

    /// The Littlewood-Paley block at level `j`.
    pub fn block(&self, u: &Field, j: i32) -> Result<Field> {
        self.check_level(j)?;
        let scale = 2f64.powi(j);
        let mut s = u.transform()?;
        s.apply_radial_multiplier(|xi| phi(xi / scale));
        s.inverse()
    }

    /// Low-pass part below (real-valued) level `j_cut`; includes the mean.
    pub fn low_pass(&self, u: &Field, j_cut: f64) -> Result<Field> {
        let scale = 2f64.powf(j_cut);
        let mut s = u.transform()?;
        s.apply_radial_multiplier(|xi| chi(xi / scale));
        s.inverse()
    }

    /// Complement of [`Self::low_pass`].
    pub fn high_pass(&self, u: &Field, j_cut: f64) -> Result<Field> {
        let scale = 2f64.powf(j_cut);
        let mut s = u.transform()?;
        s.apply_radial_multiplier(|xi| 1.0 - chi(xi / scale));
        s.inverse()
    }

    /// Inclusive low-pass `D_{<=J} = D_{< J+1}`.
    pub fn low_pass_inclusive(&self, u: &Field, j_cut: f64) -> Result<Field> {
        self.low_pass(u, j_cut + 1.0)
    }

    /// Per-level norms `(j, ||block_j u||_2, ||block_j u||_inf)` for export.
    pub fn block_spectrum(&self, u: &Field) -> Result<Vec<BlockNorms>> {
        let mut out = Vec::new();
        for j in self.j_min..=self.j_max {
            let b = self.block(u, j)?;
            out.push(BlockNorms {
                level: j,
                l2: b.lp_norm(Exponent::TWO),
                sup: b.lp_norm(Exponent::INF),
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlockNorms {
    pub level: i32,
    pub l2: f64,
    pub sup: f64,
}

/// Parameters of frequency sparseness: the low-pass part below level `j_cut`
/// may carry at most a `beta` fraction of the norm. `j_cut` need not be an
/// integer.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrequencySparsenessParams {
    pub beta: f64,
    pub j_cut: f64,
}

impl FrequencySparsenessParams {
    pub fn new(beta: f64, j_cut: f64) -> Result<Self> {
        if !(0.0 < beta && beta < 1.0) {
            return Err(Error::Contract {
                name: "beta in (0,1)".into(),
                lhs: beta,
                rhs: 1.0,
            });
        }
        Ok(FrequencySparsenessParams { beta, j_cut })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyCertificate {
    pub params: FrequencySparsenessParams,
    pub p: Exponent,
    /// `||D_{<J} u||_p / ||u||_p`.
    pub low_pass_ratio: f64,
    pub verdict: bool,
}

/// Measure the low-pass norm fraction and compare against `beta`.
pub fn certify_frequency(
    u: &Field,
    params: &FrequencySparsenessParams,
    p: Exponent,
) -> Result<FrequencyCertificate> {
    let total = u.lp_norm(p);
    if total == 0.0 {
        return Err(Error::Degenerate(
            "cannot certify the zero field in frequency".into(),
        ));
    }
    let decomp = DyadicDecomposition::new(*u.grid());
    let low = decomp.low_pass(u, params.j_cut)?;
    let ratio = low.lp_norm(p) / total;
    Ok(FrequencyCertificate {
        params: *params,
        p,
        low_pass_ratio: ratio,
        verdict: ratio <= params.beta,
    })
}

/// `||D_{<=J} u||_p / (2^(J d (1/2 - 1/p)) ||u||_2)`: the quantity
/// Bernstein's inequality bounds by an absolute constant.
pub fn bernstein_ratio(u: &Field, j_cut: f64, p: Exponent) -> Result<f64> {
    if p.value() < 2.0 {
        return Err(Error::Exponent(format!(
            "bernstein ratio needs p >= 2, got {}",
            p.value()
        )));
    }
    let l2 = u.lp_norm(Exponent::TWO);
    if l2 == 0.0 {
        return Err(Error::Degenerate("bernstein ratio of the zero field".into()));
    }
    let decomp = DyadicDecomposition::new(*u.grid());
    let low = decomp.low_pass_inclusive(u, j_cut)?;
    let d = u.grid().dim() as f64;
    let growth = 2f64.powf(j_cut * d * (0.5 - p.recip()));
    Ok(low.lp_norm(p) / (growth * l2))
}

/// The `B^{-1}_{inf,inf}` norm estimate `sup_j 2^{-j} ||block_j u||_inf`
/// over resolvable levels, with a flag when the sup sits on the edge of
/// the resolvable range (truncation-dominated).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BesovNorm {
    pub value: f64,
    pub attained_at: i32,
    pub truncation_dominated: bool,
}

pub fn besov_norm(u: &Field) -> Result<BesovNorm> {
    let decomp = DyadicDecomposition::new(*u.grid());
    let mut best = 0.0f64;
    let mut best_j = decomp.j_min;
    for j in decomp.j_min..=decomp.j_max {
        let b = decomp.block(u, j)?;
        let v = 2f64.powi(-j) * b.lp_norm(Exponent::INF);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    Ok(BesovNorm {
        value: best,
        attained_at: best_j,
        truncation_dominated: best > 0.0 && (best_j == decomp.j_min || best_j == decomp.j_max),
    })
}
