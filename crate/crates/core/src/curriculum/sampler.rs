use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    sample_pool, Curriculum, CurriculumStage, PropositionRegime, SequenceKind, Span, StageEntry,
};
use crate::envs::{EnvKind, FalloutConfig, RgbZoneConfig, RgbZoneEnv};
use crate::error::{Error, Result};
use crate::ltl::{BooleanFormula, PredicateInstance};
use crate::taskseq::{ReachAvoidSequence, SeqStep, StaySequence, TrainingTask};

fn draw(span: Span, rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(span.lo..=span.hi)
}

fn pick(
    from: &[&PredicateInstance],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeSet<PredicateInstance>> {
    if from.len() < n {
        return Err(Error::InsufficientAtoms {
            needed: n,
            available: from.len(),
        });
    }
    Ok(from.choose_multiple(rng, n).map(|p| (*p).clone()).collect())
}

fn choose_entry<'a>(stage: &'a CurriculumStage, rng: &mut ChaCha8Rng) -> (usize, &'a StageEntry) {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, e) in stage.entries.iter().enumerate() {
        acc += e.p_seq;
        if u < acc {
            return (i, e);
        }
    }
    let last = stage.entries.len() - 1;
    (last, &stage.entries[last])
}

/// Samples one training task from `stage`, returning the chosen entry's index.
///
/// Reach and avoid sets are disjunctions of distinct non-`rad` atoms. A
/// step's reach set avoids the previous step's reach set, and its avoid set
/// avoids both when enough atoms remain. FalloutWorld sequences use one `rad`
/// threshold throughout, so at most one `rad` atom is ever true.
pub fn sample_training_sequence(
    env: EnvKind,
    stage: &CurriculumStage,
    available: &[PredicateInstance],
    rng: &mut ChaCha8Rng,
) -> Result<(usize, TrainingTask)> {
    let mut atoms: Vec<&PredicateInstance> =
        available.iter().filter(|p| p.name() != "rad").collect();
    let mut rads: Vec<&PredicateInstance> =
        available.iter().filter(|p| p.name() == "rad").collect();
    atoms.sort();
    atoms.dedup();
    rads.sort();
    rads.dedup();
    let (index, entry) = choose_entry(stage, rng);
    let task = match entry.kind {
        SequenceKind::ReachAvoid => {
            let n = draw(entry.n, rng);
            let tol = match entry.p_rad {
                Some(p) if p > 0.0 => rads.choose(rng).map(|p| (*p).clone()),
                _ => None,
            };
            let mut prev: BTreeSet<PredicateInstance> = BTreeSet::new();
            let mut steps = Vec::with_capacity(n);
            for _ in 0..n {
                let k_reach = draw(entry.reach.expect("validated"), rng);
                let fresh: Vec<_> = atoms
                    .iter()
                    .copied()
                    .filter(|p| !prev.contains(*p))
                    .collect();
                let reach = pick(
                    if fresh.len() >= k_reach {
                        &fresh
                    } else {
                        &atoms
                    },
                    k_reach,
                    rng,
                )?;
                let k_avoid = draw(entry.avoid.expect("validated"), rng);
                let clear: Vec<_> = atoms
                    .iter()
                    .copied()
                    .filter(|p| !reach.contains(*p) && !prev.contains(*p))
                    .collect();
                let other: Vec<_> = atoms
                    .iter()
                    .copied()
                    .filter(|p| !reach.contains(*p))
                    .collect();
                let mut avoid = pick(
                    if clear.len() >= k_avoid {
                        &clear
                    } else {
                        &other
                    },
                    k_avoid,
                    rng,
                )?;
                if let Some(p) = entry.p_rad {
                    if rng.gen_bool(p) {
                        avoid.insert(tol.clone().ok_or(Error::InsufficientAtoms {
                            needed: 1,
                            available: 0,
                        })?);
                    }
                }
                steps.push(SeqStep::formula(
                    BooleanFormula::any_of(reach.iter().cloned()),
                    BooleanFormula::any_of(avoid),
                ));
                prev = reach;
            }
            TrainingTask::ReachAvoid(ReachAvoidSequence::new(steps))
        }
        SequenceKind::ReachStay => {
            let hold_steps = draw(entry.n, rng);
            match env {
                EnvKind::RgbZone => {
                    let hold = pick(&atoms, 1, rng)?.pop_first().expect("one atom");
                    let rest: Vec<_> = atoms.iter().copied().filter(|p| **p != hold).collect();
                    let k = entry.avoid.map_or(0, |s| draw(s, rng));
                    let avoid = pick(&rest, k, rng)?;
                    TrainingTask::ReachStay(StaySequence::new(
                        BooleanFormula::any_of(avoid),
                        BooleanFormula::Atom(hold),
                        hold_steps,
                    )?)
                }
                EnvKind::Fallout => {
                    let tol = pick(&rads, 1, rng)?.pop_first().expect("one atom");
                    TrainingTask::ReachStay(StaySequence::new(
                        BooleanFormula::False,
                        BooleanFormula::Not(Box::new(BooleanFormula::Atom(tol))),
                        hold_steps,
                    )?)
                }
            }
        }
    };
    Ok((index, task))
}

/// Draws `count` tasks from stage `stage` (zero-based) of `curriculum`.
///
/// RGBZoneEnv draws use the colours of a fresh layout per task; FalloutWorld
/// draws use the regime's proposition pool.
pub fn sample_batch(
    curriculum: &Curriculum,
    stage: usize,
    regime: PropositionRegime,
    count: usize,
    seed: u64,
) -> Result<Vec<(usize, TrainingTask)>> {
    let st = curriculum.stages.get(stage).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "stage {} of {}",
            stage + 1,
            curriculum.stages.len()
        ))
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fw = FalloutConfig::default();
    (0..count)
        .map(|i| {
            let available = match curriculum.env {
                EnvKind::RgbZone => {
                    let env = RgbZoneEnv::reset(
                        &RgbZoneConfig::default(),
                        seed.wrapping_add(i as u64),
                        0,
                        &regime.color_space(),
                    )?;
                    env.available().to_vec()
                }
                EnvKind::Fallout => {
                    sample_pool(regime, EnvKind::Fallout, 1, fw.tol_range, &mut rng)
                }
            };
            sample_training_sequence(curriculum.env, st, &available, &mut rng)
        })
        .collect()
}
