//! Periodic grids and the Lebesgue exponent type.
//!
//! The whole-space domain is modeled by a periodic box `[-L/2, L/2)^d`
//! sampled at `n` points per axis. All suprema over centers become maxima
//! over lattice points.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest admissible number of grid points (`n^d`). 16.7M f64 samples is
/// ~134 MB for a single scalar field, which keeps 3-d runs inside the
/// memory budget of a desktop machine.
pub const MAX_POINTS: usize = 1 << 24;

/// A cubic periodic grid: `n` samples per axis on a box of side `L`,
/// centered at the origin so that `x = 0` is a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, length: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::Grid(format!("dimension must be 1, 2, or 3, got {d}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Grid(format!(
                "samples per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Grid(format!("box side must be positive, got {length}")));
        }
        let points = n.checked_pow(d as u32).ok_or_else(|| {
            Error::Grid(format!("n^d overflows: n = {n}, d = {d}"))
        })?;
        if points > MAX_POINTS {
            return Err(Error::Grid(format!(
                "n^d = {points} exceeds the memory budget of {MAX_POINTS} points"
            )));
        }
        Ok(Grid { d, n, length })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn samples_per_axis(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Grid spacing `h = L/n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of lattice points `n^d`.
    pub fn points(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Cell volume `h^d`, the quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Physical coordinate of lattice index `i` along one axis, in `[-L/2, L/2)`.
    pub fn coordinate(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.spacing()
    }

    /// Integer wavevector component for flat index `i` along one axis
    /// (standard FFT ordering: `0, 1, ..., n/2-1, -n/2, ..., -1`).
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical frequency `xi = 2 pi kappa / L` for flat index `i` along one axis.
    pub fn frequency(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.wavenumber(i) as f64 / self.length
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for axis in (0..self.d).rev() {
            out[axis] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    /// Flatten per-axis indices into a row-major index.
    pub fn ravel(&self, ix: &[usize]) -> usize {
        let mut idx = 0;
        for axis in 0..self.d {
            idx = idx * self.n + (ix[axis] % self.n);
        }
        idx
    }

    /// Minimal periodic distance between two lattice points given their
    /// per-axis index offsets.
    pub fn periodic_distance(&self, offset: &[i64]) -> f64 {
        let n = self.n as i64;
        let mut sum = 0.0;
        for axis in 0..self.d {
            let mut o = offset[axis].rem_euclid(n);
            if o > n / 2 {
                o -= n;
            }
            let dx = o as f64 * self.spacing();
            sum += dx * dx;
        }
        sum.sqrt()
    }
}

/// A Lebesgue exponent `p` in `[1, inf]`. Infinity is represented by
/// `f64::INFINITY`; `recip()` then returns 0, which keeps expressions such
/// as `1 - d/p` well defined at the endpoint.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::Exponent(format!("p must be in [1, inf], got {p}")))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, zero for `p = inf`.
    pub fn recip(&self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Human-readable key used in registries and reports ("2", "4", "inf").
    pub fn key(&self) -> String {
        if self.is_infinite() {
            "inf".to_string()
        } else if self.0 == self.0.trunc() {
            format!("{}", self.0 as i64)
        } else {
            format!("{}", self.0)
        }
    }

    pub fn parse_key(s: &str) -> Result<Self> {
        if s == "inf" {
            Ok(Exponent::INF)
        } else {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Exponent(format!("cannot parse exponent {s:?}")))?;
            Exponent::new(v)
        }
    }
}
