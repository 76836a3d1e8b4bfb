//! Numeric knobs shared by the verification routines, with one place for
//! every default so runs are reproducible from a printed config.

use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::path::Path;

/// Aberth iteration stops at this relative residual.
pub const ROOT_RESIDUAL: f64 = 1e-12;
/// A candidate parameter must reproduce the relator to this tolerance.
pub const RELATOR_TOL: f64 = 1e-9;
/// Evidence filter: margin around the real interval `(-2, 2)` when testing
/// probe traces for elliptic behavior.
pub const EVIDENCE_MARGIN: f64 = 1e-9;
/// Denominator bound for the evidence filter sample.
pub const EVIDENCE_DEN: u64 = 12;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    /// denominator bound for slope enumeration
    pub max_den: u64,
    /// depth bound for orbit balls and limit-set layers
    pub depth: u32,
    /// subtree pruning threshold for the identity sums
    pub prune_eps: f64,
    pub root_residual: f64,
    pub relator_tol: f64,
    /// tolerance for the identity and modulus comparisons
    pub identity_tol: f64,
    /// tolerance for parabolicity of peripheral loops
    pub peripheral_tol: f64,
    /// a fan of traces must exceed this bound to count as unbounded evidence
    pub trace_bound: f64,
    /// explicit representation parameter override
    pub omega: Option<(f64, f64)>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            max_den: 200,
            depth: 6,
            prune_eps: 1e-8,
            root_residual: ROOT_RESIDUAL,
            relator_tol: RELATOR_TOL,
            identity_tol: 1e-2,
            peripheral_tol: 1e-6,
            trace_bound: 100.0,
            omega: None,
        }
    }
}

impl RunConfig {
    pub fn omega_complex(&self) -> Option<Complex64> {
        self.omega.map(|(re, im)| Complex64::new(re, im))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid {what} value {value:?}"));
        match key {
            "max_den" => self.max_den = value.parse().map_err(|_| bad(key))?,
            "depth" => self.depth = value.parse().map_err(|_| bad(key))?,
            "prune_eps" => self.prune_eps = value.parse().map_err(|_| bad(key))?,
            "root_residual" => self.root_residual = value.parse().map_err(|_| bad(key))?,
            "relator_tol" => self.relator_tol = value.parse().map_err(|_| bad(key))?,
            "identity_tol" => self.identity_tol = value.parse().map_err(|_| bad(key))?,
            "peripheral_tol" => self.peripheral_tol = value.parse().map_err(|_| bad(key))?,
            "trace_bound" => self.trace_bound = value.parse().map_err(|_| bad(key))?,
            "omega" => {
                let (re, im) = value
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("omega wants RE,IM, got {value:?}")))?;
                self.omega = Some((
                    re.trim().parse().map_err(|_| bad(key))?,
                    im.trim().parse().map_err(|_| bad(key))?,
                ));
            }
            _ => return Err(Error::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Apply `key=value` lines from a config file; '#' starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max_den={}", self.max_den)?;
        writeln!(f, "depth={}", self.depth)?;
        writeln!(f, "prune_eps={:e}", self.prune_eps)?;
        writeln!(f, "root_residual={:e}", self.root_residual)?;
        writeln!(f, "relator_tol={:e}", self.relator_tol)?;
        writeln!(f, "identity_tol={:e}", self.identity_tol)?;
        writeln!(f, "peripheral_tol={:e}", self.peripheral_tol)?;
        writeln!(f, "trace_bound={}", self.trace_bound)?;
        match self.omega {
            Some((re, im)) => writeln!(f, "omega={re},{im}"),
            None => writeln!(f, "omega=auto"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.max_den, 200);
        assert_eq!(cfg.depth, 6);
        assert!(cfg.omega.is_none());
        cfg.set("max_den", "500").unwrap();
        cfg.set("omega", "0.5, 0.866").unwrap();
        assert_eq!(cfg.max_den, 500);
        assert_eq!(cfg.omega, Some((0.5, 0.866)));
        assert!(cfg.set("bogus", "1").is_err());
        assert!(cfg.set("depth", "x").is_err());
    }

    #[test]
    fn file_loading() {
        let dir = std::env::temp_dir().join("twobridge-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.txt");
        std::fs::write(&path, "# comment\nmax_den = 64\nprune_eps = 1e-6 # inline\n\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.load_file(&path).unwrap();
        assert_eq!(cfg.max_den, 64);
        assert_eq!(cfg.prune_eps, 1e-6);
        std::fs::write(&path, "max_den\n").unwrap();
        assert!(cfg.load_file(&path).is_err());
    }

    #[test]
    fn display_roundtrip() {
        let cfg = RunConfig::default();
        let shown = cfg.to_string();
        let mut parsed = RunConfig::default();
        parsed.max_den = 1;
        for line in shown.lines() {
            let (k, v) = line.split_once('=').unwrap();
            if v == "auto" {
                continue;
            }
            parsed.set(k, v).unwrap();
        }
        assert_eq!(parsed.max_den, cfg.max_den);
        assert_eq!(parsed.prune_eps, cfg.prune_eps);
    }
}
