//! Declarative configuration for the verification harness: enumeration
//! caps, parameter grids, seeds. A single TOML file with CLI overrides; the
//! environment variable `ELLCHAR_CAP` overrides the enumeration cap.

use serde::{Deserialize, Serialize};

use crate::{is_prime_u64, prime_power, Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    pub enumeration: u64,
    pub group: usize,
    pub field: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: 1_000_000,
            group: 10_000,
            field: 1 << 20,
        }
    }
}

/// Grid specification; unset fields fall back to per-suite defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub qs: Option<Vec<u64>>,
    pub ns: Option<Vec<usize>>,
    pub hs: Option<Vec<usize>>,
    pub ells: Option<Vec<u64>>,
    /// bound on `q^(n h)` for exhaustive grids
    pub qnh_bound: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub caps: Caps,
    pub grid: GridSpec,
    pub seed: u64,
    pub out: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            caps: Caps::default(),
            grid: GridSpec::default(),
            seed: 1,
            out: None,
        }
    }
}

impl Config {
    pub fn load(path: Option<&str>) -> Result<Config> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
            }
            None => Config::default(),
        };
        if let Ok(cap) = std::env::var("ELLCHAR_CAP") {
            cfg.caps.enumeration = cap
                .parse()
                .map_err(|_| Error::Config(format!("bad ELLCHAR_CAP value {cap}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects malformed grids before any computation: every q must be a
    /// prime power, every ell prime, and no explicitly pinned point may have
    /// `ell = p`.
    pub fn validate(&self) -> Result<()> {
        if let Some(qs) = &self.grid.qs {
            for &q in qs {
                if prime_power(q).is_none() {
                    return Err(Error::Config(format!("q = {q} is not a prime power")));
                }
            }
        }
        if let Some(ells) = &self.grid.ells {
            for &l in ells {
                if !is_prime_u64(l) {
                    return Err(Error::Config(format!("ell = {l} is not prime")));
                }
            }
        }
        // a fully pinned (q, ell) pair with ell = p is a configuration error
        if let (Some(qs), Some(ells)) = (&self.grid.qs, &self.grid.ells) {
            if qs.len() == 1 && ells.len() == 1 {
                let p = prime_power(qs[0]).map(|(p, _)| p).unwrap_or(0);
                if ells[0] == p {
                    return Err(Error::Config(format!(
                        "ell = {} equals the residue characteristic of q = {}",
                        ells[0], qs[0]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Grid points `(q, n, h)` with `q^(n h)` within the stated bound,
    /// resolved against per-suite defaults.
    pub fn points(
        &self,
        default_qs: &[u64],
        default_ns: &[usize],
        default_hs: &[usize],
        default_bound: u64,
    ) -> Vec<(u64, usize, usize)> {
        let qs = self.grid.qs.clone().unwrap_or_else(|| default_qs.to_vec());
        let ns = self.grid.ns.clone().unwrap_or_else(|| default_ns.to_vec());
        let hs = self.grid.hs.clone().unwrap_or_else(|| default_hs.to_vec());
        let bound = self.grid.qnh_bound.unwrap_or(default_bound);
        let mut out = Vec::new();
        for &q in &qs {
            for &n in &ns {
                for &h in &hs {
                    let size = (q as f64).powi((n * h) as i32);
                    if size <= bound as f64 {
                        out.push((q, n, h));
                    }
                }
            }
        }
        out
    }

    /// The primes to reduce at for a given residue characteristic, skipping
    /// `ell = p`.
    pub fn ells_for(&self, p: u64, defaults: &[u64]) -> Vec<u64> {
        self.grid
            .ells
            .clone()
            .unwrap_or_else(|| defaults.to_vec())
            .into_iter()
            .filter(|&l| l != p)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_and_validation() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(c.caps.enumeration, 1_000_000);
        // ell = p pinned is rejected
        let mut bad = Config::default();
        bad.grid.qs = Some(vec![4]);
        bad.grid.ells = Some(vec![2]);
        assert!(bad.validate().is_err());
        // non-prime-power q rejected
        let mut bad = Config::default();
        bad.grid.qs = Some(vec![6]);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn point_resolution() {
        let c = Config::default();
        let pts = c.points(&[2, 3], &[1, 2], &[1, 2], 100);
        assert!(pts.contains(&(2, 1, 1)));
        assert!(pts.contains(&(3, 2, 1)));
        assert!(pts.contains(&(3, 2, 2))); // 3^4 = 81 <= 100
        let pts = c.points(&[3], &[2], &[2], 80);
        assert!(pts.is_empty());
        assert_eq!(c.ells_for(2, &[2, 3, 5, 7]), vec![3, 5, 7]);
    }

    #[test]
    fn toml_parsing() {
        let text = r#"
seed = 7
[caps]
enumeration = 5000
[grid]
qs = [2, 3]
ells = [3, 5]
"#;
        let cfg: Config = toml::from_str(text).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.caps.enumeration, 5000);
        assert_eq!(cfg.grid.qs, Some(vec![2, 3]));
        assert_eq!(cfg.grid.hs, None);
    }
}
