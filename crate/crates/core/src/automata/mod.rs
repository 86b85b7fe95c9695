//! Limit-deterministic Büchi automata: construction, contraction, acceptance
//! checks and HOA interchange.

pub mod accepts;
pub mod alphabet;
pub mod analysis;
pub mod contract;
pub mod hoa;
pub mod ldba;
pub mod samples;
pub mod translate;

pub use accepts::{accepts, EpsilonPolicy};
pub use alphabet::Alphabet;
pub use analysis::{accepting_cycle_states, guaranteed_accepting, rejecting_sinks};
pub use contract::contract;
pub use hoa::{export_hoa, import_hoa, import_hoa_named};
pub use ldba::{infer_components, Component, EpsilonEdge, Ldba, StateId, Transition};
pub use translate::{translate, translate_with};
