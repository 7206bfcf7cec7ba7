//! The frozen constants registry.
//!
//! The decay and continuation statements hold "for suitable constants";
//! making them falsifiable requires pinning those constants. A one-time
//! calibration pass (see [`crate::calibrate`]) produces this registry; it
//! is then versioned, embedded in the crate, and treated as read-only.
//! Entries are keyed by `(kernel kind, dimension, exponent)` for the
//! kernel-side constants and by `(dimension, exponent)` for the
//! Navier-Stokes constants.

use crate::error::{Error, Result};
use crate::grid::Exponent;
use crate::semigroup::KernelKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Constants attached to one `(kernel, d, p)` triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelEntry {
    /// The absolute constant in the sparseness requirements.
    pub c0: f64,
    /// Tabulated minimal `ell_bar` per gamma: pairs `(gamma, f(gamma))`,
    /// decreasing in gamma. Do not extrapolate below the smallest gamma.
    pub f_table: Vec<(f64, f64)>,
    /// Frequency cutoff prefactor: `2^J = k_cal / (gamma sqrt(t))`.
    pub k_cal: f64,
    /// Per-block heat decay `||e^{t Lap} block_j u||_p <= block_big_c *
    /// exp(-block_c t 2^{2j}) ||u||_p`.
    pub block_c: f64,
    pub block_big_c: f64,
    /// Bernstein constant: `||D_{<=J} u||_p <= c_bernstein 2^{J d (1/2 - 1/p)} ||u||_2`.
    pub c_bernstein: f64,
    /// Low-pass boundedness `||D_{<J} u||_p <= c_lowpass ||u||_p`.
    pub c_lowpass: f64,
    /// Half-max drop time prefactor `T = drop_c * ell^2` (heat kernel only).
    pub drop_c: f64,
}

impl KernelEntry {
    /// Look up `f(gamma)` in the table (conservative: the entry for the
    /// largest tabulated gamma that is <= the requested one).
    pub fn f_of_gamma(&self, gamma: f64) -> Result<f64> {
        let mut best: Option<f64> = None;
        for &(g, f) in &self.f_table {
            if g <= gamma {
                best = Some(best.map_or(f, |b: f64| b.min(f)));
            }
        }
        best.ok_or_else(|| {
            Error::Calibration(format!(
                "gamma = {gamma} below the calibrated range; smallest tabulated gamma is {:?}",
                self.f_table.last().map(|x| x.0)
            ))
        })
    }
}

/// Constants attached to one `(d, p)` pair for the Navier-Stokes solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NsEntry {
    /// Local well-posedness smallness constant `c_p` in
    /// `||u_0||_p T^((1/2)(1 - d/p)) = c_p`.
    pub c_p: f64,
    /// Duhamel constant for the decay time scale:
    /// `||Duhamel(t)||_p <= c_duhamel t^((1/2)(1 - d/p)) ||u_0||_p^2`.
    pub c_duhamel: f64,
    /// Supremum over the calibration corpus of the Duhamel norm divided by
    /// `t^(1 - d/p) ||u_0||_p^2` (the normalization the bound-check op uses).
    pub c_duhamel_check: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Registry {
    pub version: u32,
    pub kernel: BTreeMap<String, KernelEntry>,
    pub ns: BTreeMap<String, NsEntry>,
}

pub fn kernel_key(kind: KernelKind, d: usize, p: Exponent) -> String {
    format!("{}:d{}:p{}", kind.key(), d, p.key())
}

pub fn ns_key(d: usize, p: Exponent) -> String {
    format!("d{}:p{}", d, p.key())
}

pub const REGISTRY_VERSION: u32 = 1;

static DEFAULT_REGISTRY_JSON: &str = include_str!("default_registry.json");

impl Registry {
    pub fn empty() -> Registry {
        Registry {
            version: REGISTRY_VERSION,
            kernel: BTreeMap::new(),
            ns: BTreeMap::new(),
        }
    }

    /// The embedded registry produced by the shipped calibration run. An
    /// explicit path in `SPNS_REGISTRY` overrides it.
    pub fn load_default() -> Result<Registry> {
        if let Ok(path) = std::env::var("SPNS_REGISTRY") {
            return Registry::from_path(Path::new(&path));
        }
        serde_json::from_str(DEFAULT_REGISTRY_JSON)
            .map_err(|e| Error::Format(format!("embedded registry is invalid: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Registry> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("registry {path:?}: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn kernel_entry(&self, kind: KernelKind, d: usize, p: Exponent) -> Result<&KernelEntry> {
        let key = kernel_key(kind, d, p);
        self.kernel
            .get(&key)
            .ok_or(Error::RegistryMiss(key))
    }

    pub fn ns_entry(&self, d: usize, p: Exponent) -> Result<&NsEntry> {
        let key = ns_key(d, p);
        self.ns.get(&key).ok_or(Error::RegistryMiss(key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_stable() {
        assert_eq!(
            kernel_key(KernelKind::Heat, 2, Exponent::INF),
            "heat:d2:pinf"
        );
        assert_eq!(
            kernel_key(KernelKind::LowPass, 1, Exponent::new(4.0).unwrap()),
            "lowpass:d1:p4"
        );
        assert_eq!(ns_key(2, Exponent::INF), "d2:pinf");
    }

    #[test]
    fn f_table_lookup_is_conservative() {
        let entry = KernelEntry {
            c0: 4.0,
            f_table: vec![(0.5, 2.0), (0.25, 2.5), (0.125, 3.0)],
            k_cal: 1.0,
            block_c: 0.5,
            block_big_c: 2.0,
            c_bernstein: 2.0,
            c_lowpass: 2.0,
            drop_c: 0.25,
        };
        assert_eq!(entry.f_of_gamma(0.5).unwrap(), 2.0);
        assert_eq!(entry.f_of_gamma(0.3).unwrap(), 2.5);
        assert_eq!(entry.f_of_gamma(0.25).unwrap(), 2.5);
        assert!(entry.f_of_gamma(0.01).is_err());
    }

    #[test]
    fn default_registry_parses() {
        let r = Registry::load_default().unwrap();
        assert_eq!(r.version, REGISTRY_VERSION);
        assert!(r
            .kernel_entry(KernelKind::Heat, 1, Exponent::INF)
            .is_ok());
    }
}
