//! Staged training-sequence curricula and proposition pools.
//!
//! A curriculum is a list of stages. Each stage mixes reach-avoid and
//! reach-stay entries with fixed probabilities, and the learner moves on once
//! the success rate over the last [`WINDOW`] episodes reaches the stage's
//! threshold.

pub mod regimes;
pub mod sampler;
pub mod tracker;

use serde::{Deserialize, Serialize};

use crate::envs::EnvKind;
use crate::error::{Error, Result};

pub use regimes::{fallout_pool, rgb_pool, sample_pool, PropositionRegime};
pub use sampler::{sample_batch, sample_training_sequence};
pub use tracker::{ProgressTracker, StageChange, WINDOW};

/// Inclusive integer range, written `[lo, hi]` in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub const fn new(lo: usize, hi: usize) -> Self {
        Self { lo, hi }
    }

    pub const fn exactly(n: usize) -> Self {
        Self { lo: n, hi: n }
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.lo..=self.hi).contains(&n)
    }
}

impl From<[usize; 2]> for Span {
    fn from([lo, hi]: [usize; 2]) -> Self {
        Span { lo, hi }
    }
}

impl From<Span> for [usize; 2] {
    fn from(s: Span) -> Self {
        [s.lo, s.hi]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    ReachAvoid,
    ReachStay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub kind: SequenceKind,
    pub p_seq: f64,
    /// Steps, or hold length for reach-stay entries.
    pub n: Span,
    pub reach: Option<Span>,
    pub avoid: Option<Span>,
    pub p_rad: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurriculumStage {
    /// `None` on the final stage.
    pub kappa: Option<f64>,
    pub entries: Vec<StageEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curriculum {
    pub env: EnvKind,
    pub stages: Vec<CurriculumStage>,
}

const fn ra(p_seq: f64, n: Span, reach: Span, avoid: Span, p_rad: Option<f64>) -> StageEntry {
    StageEntry {
        kind: SequenceKind::ReachAvoid,
        p_seq,
        n,
        reach: Some(reach),
        avoid: Some(avoid),
        p_rad,
    }
}

const fn rs(p_seq: f64, hold: usize, avoid: Option<Span>) -> StageEntry {
    StageEntry {
        kind: SequenceKind::ReachStay,
        p_seq,
        n: Span::exactly(hold),
        reach: None,
        avoid,
        p_rad: None,
    }
}

fn stage(kappa: Option<f64>, entries: Vec<StageEntry>) -> CurriculumStage {
    CurriculumStage { kappa, entries }
}

impl Curriculum {
    pub fn rgbzone() -> Self {
        let one = Span::exactly(1);
        let (zero, two) = (Span::exactly(0), Span::exactly(2));
        let (r12, r02, r01) = (Span::new(1, 2), Span::new(0, 2), Span::new(0, 1));
        Curriculum {
            env: EnvKind::RgbZone,
            stages: vec![
                stage(Some(0.9), vec![ra(1.0, one, one, zero, None)]),
                stage(Some(0.95), vec![ra(1.0, two, one, zero, None)]),
                stage(Some(0.95), vec![ra(1.0, one, one, one, None)]),
                stage(Some(0.95), vec![ra(1.0, two, one, one, None)]),
                stage(
                    Some(0.95),
                    vec![ra(0.4, r12, r12, r02, None), rs(0.6, 30, Some(r01))],
                ),
                stage(
                    Some(0.95),
                    vec![ra(0.7, r12, r12, r02, None), rs(0.3, 60, Some(r01))],
                ),
                stage(
                    None,
                    vec![ra(0.8, r12, r12, r02, None), rs(0.2, 60, Some(r02))],
                ),
            ],
        }
    }

    pub fn fallout() -> Self {
        let one = Span::exactly(1);
        let (zero, two) = (Span::exactly(0), Span::exactly(2));
        let (r12, r02) = (Span::new(1, 2), Span::new(0, 2));
        Curriculum {
            env: EnvKind::Fallout,
            stages: vec![
                stage(Some(0.95), vec![ra(1.0, one, one, zero, Some(0.0))]),
                stage(Some(0.9), vec![ra(1.0, two, one, zero, Some(0.0))]),
                stage(Some(0.9), vec![ra(1.0, two, one, zero, Some(0.25))]),
                stage(Some(0.9), vec![ra(1.0, two, one, one, Some(0.5))]),
                stage(Some(0.9), vec![ra(1.0, two, one, one, Some(0.75))]),
                stage(
                    Some(0.9),
                    vec![ra(0.8, r12, r12, r02, Some(0.75)), rs(0.2, 10, None)],
                ),
                stage(
                    None,
                    vec![ra(0.95, r12, r12, r02, Some(0.75)), rs(0.05, 20, None)],
                ),
            ],
        }
    }

    pub fn builtin(env: EnvKind) -> Self {
        match env {
            EnvKind::RgbZone => Self::rgbzone(),
            EnvKind::Fallout => Self::fallout(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Curriculum = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curriculum serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.stages.is_empty() {
            return bad("curriculum has no stages".into());
        }
        for (i, s) in self.stages.iter().enumerate() {
            let last = i + 1 == self.stages.len();
            if last != s.kappa.is_none() {
                return bad(format!(
                    "stage {}: only the final stage has no threshold",
                    i + 1
                ));
            }
            if s.kappa.is_some_and(|k| !(k > 0.0 && k <= 1.0)) {
                return bad(format!("stage {}: threshold outside (0, 1]", i + 1));
            }
            let total: f64 = s.entries.iter().map(|e| e.p_seq).sum();
            if s.entries.is_empty() || (total - 1.0).abs() > 1e-9 {
                return bad(format!(
                    "stage {}: entry probabilities sum to {total}",
                    i + 1
                ));
            }
            for e in &s.entries {
                let spans = [Some(e.n), e.reach, e.avoid];
                if spans.iter().flatten().any(|r| r.lo > r.hi) || e.n.lo == 0 {
                    return bad(format!("stage {}: empty range", i + 1));
                }
                if e.p_rad.is_some()
                    && (self.env != EnvKind::Fallout || e.kind != SequenceKind::ReachAvoid)
                {
                    return bad(format!(
                        "stage {}: P_rad applies to FalloutWorld reach-avoid entries",
                        i + 1
                    ));
                }
                if e.kind == SequenceKind::ReachAvoid && (e.reach.is_none() || e.avoid.is_none()) {
                    return bad(format!(
                        "stage {}: reach-avoid entries need reach and avoid sizes",
                        i + 1
                    ));
                }
                if e.kind == SequenceKind::ReachAvoid && e.reach.is_some_and(|r| r.lo == 0) {
                    return bad(format!("stage {}: reach formulae need an atom", i + 1));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate_and_round_trip() {
        for c in [Curriculum::rgbzone(), Curriculum::fallout()] {
            c.validate().unwrap();
            assert_eq!(c.stages.len(), 7);
            assert_eq!(Curriculum::from_json(&c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn reach_stay_rows() {
        let rgb = Curriculum::rgbzone();
        let holds: Vec<_> = rgb.stages[4..]
            .iter()
            .map(|s| (s.entries[1].n.lo, s.entries[1].p_seq))
            .collect();
        assert_eq!(holds, vec![(30, 0.6), (60, 0.3), (60, 0.2)]);
        let fw = Curriculum::fallout();
        let p_rad: Vec<_> = fw
            .stages
            .iter()
            .map(|s| s.entries[0].p_rad.unwrap())
            .collect();
        assert_eq!(p_rad, vec![0.0, 0.0, 0.25, 0.5, 0.75, 0.75, 0.75]);
    }

    #[test]
    fn rejects_bad_probabilities() {
        let mut c = Curriculum::rgbzone();
        c.stages[4].entries[0].p_seq = 0.5;
        assert!(c.validate().is_err());
        let mut c = Curriculum::rgbzone();
        c.stages[0].entries[0].p_rad = Some(0.1);
        assert!(c.validate().is_err());
    }
}
