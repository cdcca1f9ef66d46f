use std::path::PathBuf;

use ffqlat_core::algebra::{Field, FieldConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Everything a sweep depends on. Two runs with equal configs produce
/// byte-identical reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub field: FieldConfig,
    pub rank: usize,
    /// Largest allowed minimum `mu_n`.
    pub max_mu: u32,
    /// Bucketing bound; `None` means `mu_n` of each stratum.
    pub initial_bound: Option<u32>,
    /// Escalation cap; `None` means `mu_1 + ... + mu_n + 2`.
    pub escalation_cap: Option<u32>,
    /// Largest lattice enumeration (vectors) for one spectrum.
    pub spectrum_budget: u128,
    /// Strata with more raw coefficient vectors than this are sampled.
    pub form_budget: u128,
    /// Diagonals drawn per sampled stratum; `0` turns sampling off and makes
    /// oversized strata a budget error.
    pub samples: usize,
    pub seed: u64,
    /// Restrict the sweep to these minima patterns.
    #[serde(default)]
    pub patterns: Option<Vec<Vec<u32>>>,
    #[serde(skip)]
    pub checkpoint: Option<PathBuf>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl SearchConfig {
    pub fn new(q: u32, rank: usize, max_mu: u32) -> Result<SearchConfig> {
        Ok(SearchConfig {
            field: FieldConfig::for_order(q)?,
            rank,
            max_mu,
            initial_bound: None,
            escalation_cap: None,
            spectrum_budget: 1 << 26,
            form_budget: 1 << 21,
            samples: 48,
            seed: 0,
            patterns: None,
            checkpoint: None,
            output: None,
        })
    }

    pub fn field(&self) -> Result<Field> {
        Ok(Field::from_config(&self.field)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.rank) {
            return Err(HarnessError::Config(format!("rank {} outside 1..=4", self.rank)));
        }
        if self.initial_bound == Some(0) || self.escalation_cap == Some(0) {
            return Err(HarnessError::Config("spectrum bounds must be positive".into()));
        }
        if let (Some(a), Some(b)) = (self.initial_bound, self.escalation_cap) {
            if a > b {
                return Err(HarnessError::Config(format!("initial bound {a} exceeds escalation cap {b}")));
            }
        }
        if self.spectrum_budget == 0 || self.form_budget == 0 {
            return Err(HarnessError::Config("budgets must be positive".into()));
        }
        if let Some(ps) = &self.patterns {
            for p in ps {
                if p.len() != self.rank || p.windows(2).any(|w| w[0] > w[1]) {
                    return Err(HarnessError::Config(format!("bad minima pattern {p:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn initial_bound_for(&self, minima: &[u32]) -> u32 {
        self.initial_bound.unwrap_or(*minima.last().unwrap()).max(1)
    }

    pub fn cap_for(&self, minima: &[u32]) -> u32 {
        let cap = self.escalation_cap.unwrap_or(minima.iter().sum::<u32>() + 2);
        cap.max(self.initial_bound_for(minima))
    }
}
