use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Curriculum;

/// Episodes in the success window.
pub const WINDOW: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageChange {
    pub from: usize,
    pub to: usize,
}

/// Rolling success window and current stage index (zero-based).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ProgressTracker {
    window: VecDeque<bool>,
    stage: usize,
}

impl ProgressTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn success_rate(&self) -> f64 {
        if self.window.is_empty() {
            return 0.0;
        }
        self.window.iter().filter(|&&s| s).count() as f64 / self.window.len() as f64
    }

    /// Records an episode; advances and clears the window once it is full and
    /// its mean reaches the stage threshold.
    pub fn record(&mut self, curriculum: &Curriculum, success: bool) -> Option<StageChange> {
        if self.window.len() == WINDOW {
            self.window.pop_front();
        }
        self.window.push_back(success);
        let kappa = curriculum.stages.get(self.stage)?.kappa?;
        if self.window.len() < WINDOW {
            return None;
        }
        let hits = self.window.iter().filter(|&&s| s).count();
        // Compare counts so thresholds like 0.95 are not subject to rounding.
        if hits as f64 >= kappa * WINDOW as f64 - 1e-9 {
            let from = self.stage;
            self.stage += 1;
            self.window.clear();
            Some(StageChange {
                from,
                to: self.stage,
            })
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_window_of_successes_advances() {
        let c = Curriculum::rgbzone();
        let mut t = ProgressTracker::new();
        for i in 0..WINDOW - 1 {
            assert_eq!(t.record(&c, true), None, "episode {i}");
        }
        assert_eq!(t.record(&c, true), Some(StageChange { from: 0, to: 1 }));
        assert!(t.is_empty());
    }

    #[test]
    fn threshold_boundary() {
        let c = Curriculum::rgbzone();
        // 0.9 · 128 = 115.2, so 116 successes are needed.
        let mut t = ProgressTracker::new();
        for i in 0..WINDOW {
            let r = t.record(&c, i >= WINDOW - 115);
            assert_eq!(r, None);
        }
        assert!(t.success_rate() < 0.9);
        assert_eq!(t.record(&c, true), Some(StageChange { from: 0, to: 1 }));
    }

    #[test]
    fn final_stage_never_advances() {
        let c = Curriculum::fallout();
        let mut t = ProgressTracker {
            window: VecDeque::new(),
            stage: 6,
        };
        for _ in 0..1000 {
            assert_eq!(t.record(&c, true), None);
        }
        assert_eq!(t.len(), WINDOW);
    }
}
