//! Proposition pools for training, unseen evaluation and continuous sampling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::envs::{at_instance, ColorSpace, EnvKind};
use crate::ltl::predicate::canonical_param;
use crate::ltl::PredicateInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropositionRegime {
    TrainingGrid,
    UnseenGrid,
    Continuous,
}

impl std::str::FromStr for PropositionRegime {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "training" | "training_grid" => Ok(Self::TrainingGrid),
            "unseen" | "unseen_grid" => Ok(Self::UnseenGrid),
            "continuous" => Ok(Self::Continuous),
            _ => Err(crate::error::Error::InvalidArgument(format!(
                "unknown regime `{s}`"
            ))),
        }
    }
}

impl PropositionRegime {
    /// Colour source for RGBZoneEnv resets.
    pub fn color_space(self) -> ColorSpace {
        match self {
            Self::TrainingGrid => ColorSpace::Lattice { offset: 0.0 },
            Self::UnseenGrid => ColorSpace::Lattice { offset: 0.05 },
            Self::Continuous => ColorSpace::Continuous,
        }
    }
}

/// All lattice colours of a grid regime; `None` for the continuous one.
pub fn rgb_pool(regime: PropositionRegime) -> Option<Vec<PredicateInstance>> {
    let ColorSpace::Lattice { offset } = regime.color_space() else {
        return None;
    };
    let vals = ColorSpace::lattice_values(offset);
    let mut out = Vec::with_capacity(vals.len().pow(3));
    for &r in &vals {
        for &g in &vals {
            for &b in &vals {
                out.push(at_instance([r, g, b]));
            }
        }
    }
    Some(out)
}

pub fn loc(x: usize, y: usize) -> PredicateInstance {
    PredicateInstance::parse_free("loc", &[x as f64, y as f64]).expect("loc is a valid predicate")
}

pub fn rad(tol: f64) -> PredicateInstance {
    PredicateInstance::parse_free("rad", &[canonical_param(tol)]).expect("rad is a valid predicate")
}

/// Checkerboard cells with `(x + y)` of the given parity plus the regime's
/// thresholds; `None` for the continuous regime.
pub fn fallout_pool(regime: PropositionRegime, size: usize) -> Option<Vec<PredicateInstance>> {
    let (parity, tols): (usize, Vec<f64>) = match regime {
        PropositionRegime::TrainingGrid => (0, (2..=8).map(|i| i as f64 / 10.0).collect()),
        PropositionRegime::UnseenGrid => (1, (0..6).map(|i| 0.25 + i as f64 / 10.0).collect()),
        PropositionRegime::Continuous => return None,
    };
    let mut out: Vec<PredicateInstance> = (0..size)
        .flat_map(|y| (0..size).map(move |x| (x, y)))
        .filter(|(x, y)| (x + y) % 2 == parity)
        .map(|(x, y)| loc(x, y))
        .collect();
    out.extend(tols.into_iter().map(rad));
    Some(out)
}

/// A pool to draw task atoms from. Grid regimes return their fixed sets; the
/// continuous regime draws `samples` fresh colours (RGBZoneEnv) or every cell
/// plus `samples` thresholds from `tol_range` (FalloutWorld).
pub fn sample_pool(
    regime: PropositionRegime,
    env: EnvKind,
    samples: usize,
    tol_range: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Vec<PredicateInstance> {
    match (env, regime) {
        (EnvKind::RgbZone, PropositionRegime::Continuous) => (0..samples)
            .map(|_| at_instance([0, 1, 2].map(|_| rng.gen_range(0.0..=1.0))))
            .collect(),
        (EnvKind::RgbZone, r) => rgb_pool(r).expect("grid regime"),
        (EnvKind::Fallout, PropositionRegime::Continuous) => {
            let mut out: Vec<_> = (0..21)
                .flat_map(|y| (0..21).map(move |x| loc(x, y)))
                .collect();
            out.extend((0..samples).map(|_| rad(rng.gen_range(tol_range.0..=tol_range.1))));
            out
        }
        (EnvKind::Fallout, r) => fallout_pool(r, 21).expect("grid regime"),
    }
}
