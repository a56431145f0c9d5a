//! Run manifests.
//!
//! Every command records its full post-default parameter set and output
//! paths; `uavsp replay --manifest <path>` re-executes the recorded command
//! and reproduces the planner outputs byte-for-byte (measured wallclock in
//! sweep CSVs is the one non-reproducible column). Manifests themselves
//! contain no timing, so they are byte-stable too.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: CommandSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandSpec {
    GenMaps {
        scenario: String,
        snr_out: String,
        target_out: String,
        mask_out: String,
    },
    Plan {
        scenario: String,
        solver: String,
        initial: String,
        dbar_m: f64,
        ri: usize,
        rii: usize,
        seed: u64,
        out: String,
    },
    Sweep {
        scenario: String,
        dbar_list: Vec<f64>,
        solvers: Vec<String>,
        ri: usize,
        rii: usize,
        seed: u64,
        out: String,
    },
    Validate {
        scenario: String,
        trajectory: String,
        n_samples: usize,
        seed: u64,
        dbar_m: f64,
        out: String,
    },
}

impl RunManifest {
    pub fn new(command: CommandSpec) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialization cannot fail")
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read manifest {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("cannot parse manifest: {e}"))
    }
}
