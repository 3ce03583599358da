//! TOML run configuration shared by the command-line tool and the examples.
//!
//! ```toml
//! [sim]
//! n_agents = 10
//! comm_radius = 1.5
//!
//! [policy]
//! mode = "handcrafted"
//! k = 4
//!
//! [train]
//! rounds = 4
//!
//! [sweep]
//! axis = "r"
//! values = [1.0, 1.5, 2.0]
//! ```
//!
//! Every section and field is optional and falls back to its default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controllers::PotentialConfig;
use crate::error::{Error, Result};
use crate::eval::{ExperimentSpec, SweepSettings};
use crate::policy::PolicySpec;
use crate::swarm::SimConfig;
use crate::trainer::{TrainConfig, TrainSchedule};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub potential: PotentialConfig,
    pub policy: PolicySpec,
    pub train: TrainSchedule,
    pub sweep: SweepSettings,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse("run configuration", e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::parse("run configuration", e.to_string()))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            sim: self.sim.clone(),
            potential: self.potential,
            policy: self.policy.clone(),
            schedule: self.train.clone(),
        }
    }

    pub fn experiment_spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            sim: self.sim.clone(),
            potential: self.potential,
            sweep: self.sweep.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::SweepAxis;
    use crate::policy::PolicyMode;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = RunConfig::from_toml_str(
            "[sim]\nn_agents = 12\n[policy]\nmode = \"vision\"\nfeatures = 12\n[sweep]\naxis = \"v-init\"\nvalues = [1.0, 2.0]\n",
        )
        .unwrap();
        assert_eq!(cfg.sim.n_agents, 12);
        assert_eq!(cfg.sim.comm_radius, SimConfig::default().comm_radius);
        assert_eq!(cfg.policy.mode, PolicyMode::Vision);
        assert_eq!(cfg.sweep.axis, SweepAxis::VInit);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::from_toml_str("[sim]\nn_agent = 3\n").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
