//! Synthetic dissolved-gas-analysis decision tables.
//!
//! Each object is healthy or faulty with probability `fault_fraction`. Gas
//! concentrations are log-normal: `ln(ppm) = ln(median) + spread * noise`.
//! For the seven fault gases the median and spread depend on the class and
//! the noise mixes a per-object latent severity shared by all fault gases
//! (weight `latent_correlation`) with independent noise. Nitrogen and oxygen
//! use the same parameters for both classes and independent noise.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data_model::{DecisionTable, Label, Object, FAULTY, HEALTHY};
use crate::error::{Error, Result};

/// Gas attribute names, in column order.
pub const GAS_NAMES: [&str; 9] = ["h2", "ch4", "c2h4", "c2h6", "c2h2", "co", "co2", "n2", "o2"];
/// Gases whose distribution does not depend on the decision class.
pub const NON_FAULT_GASES: [&str; 2] = ["n2", "o2"];
pub const MIN_OBJECTS: usize = 10;

const DEFAULT_PROFILE: &str = include_str!("../profiles/default.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormal {
    /// Median concentration in ppm.
    pub median: f64,
    /// Standard deviation of the natural log.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub name: String,
    pub healthy: LogNormal,
    pub faulty: LogNormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasProfile {
    pub fault_fraction: f64,
    pub latent_correlation: f64,
    pub gases: Vec<GasParams>,
}

impl Default for GasProfile {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_PROFILE).expect("bundled profile parses")
    }
}

impl GasProfile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let profile: Self = serde_json::from_str(s)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        if !(self.fault_fraction > 0.0 && self.fault_fraction < 1.0) {
            return bad(format!(
                "fault_fraction {} not in (0, 1)",
                self.fault_fraction
            ));
        }
        if !(0.0..1.0).contains(&self.latent_correlation) {
            return bad(format!(
                "latent_correlation {} not in [0, 1)",
                self.latent_correlation
            ));
        }
        let names: Vec<&str> = self.gases.iter().map(|g| g.name.as_str()).collect();
        if names != GAS_NAMES {
            return bad(format!(
                "gases must be {GAS_NAMES:?} in that order, got {names:?}"
            ));
        }
        for g in &self.gases {
            for p in [g.healthy, g.faulty] {
                if !(p.median > 0.0
                    && p.median.is_finite()
                    && p.spread > 0.0
                    && p.spread.is_finite())
                {
                    return bad(format!("{}: median and spread must be positive", g.name));
                }
            }
            if NON_FAULT_GASES.contains(&g.name.as_str()) && g.healthy != g.faulty {
                return bad(format!("{} must not depend on the class", g.name));
            }
        }
        Ok(())
    }
}

/// Draws `n` objects from `profile`; identical for identical `(profile, n, seed)`.
pub fn generate(profile: &GasProfile, n: usize, seed: u64) -> Result<DecisionTable> {
    profile.validate()?;
    if n < MIN_OBJECTS {
        return Err(Error::InvalidParams(format!(
            "need at least {MIN_OBJECTS} objects, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = profile.latent_correlation;
    let own = (1.0 - w * w).sqrt();
    let objects = (0..n)
        .map(|_| {
            let decision: Label = if rng.random_bool(profile.fault_fraction) {
                FAULTY
            } else {
                HEALTHY
            };
            let latent: f64 = rng.sample(StandardNormal);
            let values = profile
                .gases
                .iter()
                .map(|g| {
                    let e: f64 = rng.sample(StandardNormal);
                    let (params, noise) = if NON_FAULT_GASES.contains(&g.name.as_str()) {
                        (g.healthy, e)
                    } else if decision == FAULTY {
                        (g.faulty, w * latent + own * e)
                    } else {
                        (g.healthy, w * latent + own * e)
                    };
                    (params.median.ln() + params.spread * noise).exp()
                })
                .collect();
            Object { values, decision }
        })
        .collect();
    DecisionTable::new(GAS_NAMES.iter().map(|s| s.to_string()).collect(), objects)
}
