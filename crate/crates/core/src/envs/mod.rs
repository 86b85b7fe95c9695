//! Deterministic seeded environments with labeling functions.
//!
//! Both environments draw all randomness from a `ChaCha8Rng` seeded with a
//! 64-bit integer at reset, so states and trajectories are bit-reproducible
//! across platforms.

pub mod fallout;
pub mod rgbzone;
pub mod scripted;

use std::fmt;

use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::error::Result;
use crate::ltl::{Assignment, PredicateInstance};

pub use fallout::{FalloutAction, FalloutConfig, FalloutState, FalloutWorld};
pub use rgbzone::{at_instance, ColorSpace, RgbZoneConfig, RgbZoneEnv, RgbZoneState};
pub use scripted::{LetterOracle, ScriptedEnv};

/// A labelled transition system the runtime can drive.
pub trait Environment {
    type Action: Clone + fmt::Debug;
    type State: Clone + PartialEq + fmt::Debug;

    fn state(&self) -> &Self::State;

    /// Advances one step of environment time.
    fn step(&mut self, action: &Self::Action) -> Result<()>;

    /// `L(s)` over the instances bound at reset.
    fn label(&self) -> Result<Assignment>;

    /// Instances the labeling function evaluates.
    fn active(&self) -> &[PredicateInstance];

    fn sample_action(&self, rng: &mut ChaCha8Rng) -> Self::Action;

    fn action_json(&self, action: &Self::Action) -> Value;

    /// Compact per-step description for traces.
    fn summary(&self) -> Value;

    /// Full state, restorable where the environment supports it.
    fn snapshot(&self) -> Value;
}

/// Which environment a task targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    RgbZone,
    Fallout,
}

impl std::str::FromStr for EnvKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rgbzone" | "rgb_zone" | "rgb" => Ok(EnvKind::RgbZone),
            "fallout" | "fw" => Ok(EnvKind::Fallout),
            _ => Err(crate::error::Error::InvalidArgument(format!(
                "unknown environment `{s}`"
            ))),
        }
    }
}
