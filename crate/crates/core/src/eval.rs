//! Seeded batch evaluation driven by a run manifest.
//!
//! Every episode derives its own seed from the manifest seed and its index,
//! so results do not depend on how episodes are spread over worker threads.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{contract, import_hoa_named, translate, Ldba};
use crate::curriculum::{sample_pool, PropositionRegime};
use crate::envs::{ColorSpace, EnvKind, FalloutConfig, FalloutWorld, RgbZoneConfig, RgbZoneEnv};
use crate::error::{Error, Result};
use crate::ltl::{parse_ltl, LtlFormula, PredicateInstance, Signature};
use crate::policies::{
    fallout_task_feasible, template, FalloutPlanner, FormulaTemplate, Policy, RandomPolicy,
    SteerMode, ZoneSteering,
};
use crate::runtime::{
    classify_outcome, discounted_accepting_return, run_episode, EpisodeConfig, Horizon,
    ShortestSequence, Task, Terminal, Trace,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaSource {
    Template(String),
    Text(String),
    Hoa(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    Oracle,
    Random,
    /// RGBZoneEnv steering from observations only.
    Observation,
}

impl std::str::FromStr for PolicyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" | "bfs" | "greedy" => Ok(PolicyName::Oracle),
            "random" => Ok(PolicyName::Random),
            "observation" | "obs" => Ok(PolicyName::Observation),
            _ => Err(Error::InvalidArgument(format!("unknown policy `{s}`"))),
        }
    }
}

fn default_k() -> usize {
    crate::taskseq::DEFAULT_K
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub env: EnvKind,
    #[serde(default = "default_regime")]
    pub regime: PropositionRegime,
    pub formula: FormulaSource,
    pub policy: PolicyName,
    pub episodes: usize,
    /// Environment steps per episode; defaults to 1000 (RGBZoneEnv) or 300 (FalloutWorld).
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Defaults to the template's horizon, or finite.
    #[serde(default)]
    pub horizon: Option<Horizon>,
    /// Defaults to 0.998 (RGBZoneEnv) or 0.993 (FalloutWorld).
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_true")]
    pub contract: bool,
    #[serde(default)]
    pub rgbzone: RgbZoneConfig,
    #[serde(default)]
    pub fallout: FalloutConfig,
    /// Where the metrics report goes; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_regime() -> PropositionRegime {
    PropositionRegime::TrainingGrid
}

impl RunManifest {
    pub fn new(
        seed: u64,
        env: EnvKind,
        formula: FormulaSource,
        policy: PolicyName,
        episodes: usize,
    ) -> Self {
        Self {
            seed,
            env,
            regime: default_regime(),
            formula,
            policy,
            episodes,
            max_steps: None,
            k: default_k(),
            horizon: None,
            gamma: None,
            contract: true,
            rgbzone: RgbZoneConfig::default(),
            fallout: FalloutConfig::default(),
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: RunManifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::InvalidArgument(
                "episode count must be at least 1".into(),
            ));
        }
        if self.k == 0 || self.max_steps == Some(0) {
            return Err(Error::InvalidArgument(
                "k and max_steps must be positive".into(),
            ));
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(Error::InvalidArgument(format!(
                    "discount {g} outside [0, 1)"
                )));
            }
        }
        match &self.formula {
            FormulaSource::Template(id) => {
                let t = template(id)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown template `{id}`")))?;
                if t.env != self.env {
                    return Err(Error::InvalidArgument(format!(
                        "template `{id}` targets another environment"
                    )));
                }
            }
            FormulaSource::Hoa(p) if !p.exists() => {
                return Err(Error::InvalidArgument(format!(
                    "{} does not exist",
                    p.display()
                )));
            }
            _ => {}
        }
        if self.env == EnvKind::Fallout && self.policy == PolicyName::Observation {
            return Err(Error::InvalidArgument(
                "observation steering is RGBZoneEnv only".into(),
            ));
        }
        Ok(())
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps.unwrap_or(match self.env {
            EnvKind::RgbZone => 1000,
            EnvKind::Fallout => 300,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(match self.env {
            EnvKind::RgbZone => 0.998,
            EnvKind::Fallout => 0.993,
        })
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon.unwrap_or(match &self.formula {
            FormulaSource::Template(id) => template(id).map_or(Horizon::Finite, |t| t.horizon),
            _ => Horizon::Finite,
        })
    }

    /// Seed of episode `i`.
    pub fn episode_seed(&self, i: usize) -> u64 {
        // splitmix64 of the pair keeps neighbouring seeds unrelated.
        let mut z = self.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub index: usize,
    pub seed: u64,
    pub formula: Option<String>,
    /// Reset failed within budget; such episodes are left out of the success rate.
    pub infeasible: bool,
    pub terminal: Option<Terminal>,
    pub success: bool,
    pub steps: Option<usize>,
    pub env_steps: usize,
    pub accepting_visits: usize,
    pub avoid_violations: usize,
    pub discounted_return: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub episodes: usize,
    pub feasible: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean steps over successful episodes.
    pub mean_steps: Option<f64>,
    pub mean_accepting_visits: f64,
    pub mean_discounted_return: f64,
    pub avoid_violations: usize,
    pub records: Vec<EpisodeRecord>,
}

impl Metrics {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}

enum Source {
    Template(&'static FormulaTemplate),
    Formula(LtlFormula),
    Automaton(Ldba),
}

fn load_source(m: &RunManifest) -> Result<Source> {
    Ok(match &m.formula {
        FormulaSource::Template(id) => Source::Template(
            template(id)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown template `{id}`")))?,
        ),
        FormulaSource::Text(t) => Source::Formula(parse_ltl(t, &Signature::environments())?),
        FormulaSource::Hoa(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
            Source::Automaton(import_hoa_named(&text, true)?)
        }
    })
}

fn compile(m: &RunManifest, f: &LtlFormula) -> Result<Ldba> {
    let b = translate(f)?;
    Ok(if m.contract { contract(&b) } else { b })
}

/// One fully prepared episode: its automaton and formula text.
struct Prepared<E> {
    env: E,
    ldba: Ldba,
    formula: Option<String>,
}

fn prepare_rgb(m: &RunManifest, src: &Source, seed: u64) -> Result<Prepared<RgbZoneEnv>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    match src {
        Source::Template(t) => {
            let slots = t.slots().get("at").copied().unwrap_or(0);
            let env = RgbZoneEnv::reset(&m.rgbzone, seed, slots, &m.regime.color_space())?;
            let f = crate::policies::instantiate_template(t, env.available(), &mut rng)?;
            Ok(Prepared {
                ldba: compile(m, &f)?,
                formula: Some(f.to_string()),
                env,
            })
        }
        Source::Formula(f) => {
            let colors = formula_colors(f.atoms().iter())?;
            let env = RgbZoneEnv::reset(
                &m.rgbzone,
                seed,
                colors.len(),
                &pad_palette(m, colors, &mut rng)?,
            )?;
            Ok(Prepared {
                ldba: compile(m, f)?,
                formula: Some(f.to_string()),
                env,
            })
        }
        Source::Automaton(b) => {
            let colors = formula_colors(b.alphabet().aps().iter())?;
            let env = RgbZoneEnv::reset(
                &m.rgbzone,
                seed,
                colors.len(),
                &pad_palette(m, colors, &mut rng)?,
            )?;
            Ok(Prepared {
                ldba: b.clone(),
                formula: None,
                env,
            })
        }
    }
}

fn formula_colors<'a>(atoms: impl Iterator<Item = &'a PredicateInstance>) -> Result<Vec<[f64; 3]>> {
    atoms
        .map(|p| match (p.name(), p.params()) {
            ("at", [r, g, b]) => Ok([*r, *g, *b]),
            _ => Err(Error::InvalidArgument(format!(
                "{p} is not an RGBZoneEnv predicate"
            ))),
        })
        .collect()
}

/// The task's colours followed by regime colours for the remaining pairs.
fn pad_palette(
    m: &RunManifest,
    mut colors: Vec<[f64; 3]>,
    rng: &mut ChaCha8Rng,
) -> Result<ColorSpace> {
    let cfg = &m.rgbzone;
    if colors.len() > cfg.pair_count {
        return Err(Error::InsufficientAtoms {
            needed: colors.len(),
            available: cfg.pair_count,
        });
    }
    let far = |a: [f64; 3], b: [f64; 3]| {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
            >= cfg.min_color_dist
    };
    let pool = crate::curriculum::rgb_pool(m.regime);
    for _ in 0..cfg.reset_budget {
        if colors.len() == cfg.pair_count {
            break;
        }
        let c = match &pool {
            Some(p) => {
                let at = &p[rng.gen_range(0..p.len())];
                [at.params()[0], at.params()[1], at.params()[2]]
            }
            None => [0, 1, 2].map(|_| rng.gen_range(0.0..=1.0)),
        };
        if colors.iter().all(|&o| far(o, c)) {
            colors.push(c);
        }
    }
    if colors.len() < cfg.pair_count {
        return Err(Error::SamplingBudgetExhausted {
            seed: m.seed,
            context: "padding RGBZoneEnv colours".into(),
        });
    }
    Ok(ColorSpace::Fixed(colors))
}

fn prepare_fallout(m: &RunManifest, src: &Source, seed: u64) -> Result<Prepared<FalloutWorld>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let (ldba, formula) = match src {
        Source::Template(t) => {
            let pool = sample_pool(m.regime, EnvKind::Fallout, 1, m.fallout.tol_range, &mut rng);
            let f = crate::policies::instantiate_template(t, &pool, &mut rng)?;
            (compile(m, &f)?, Some(f.to_string()))
        }
        Source::Formula(f) => (compile(m, f)?, Some(f.to_string())),
        Source::Automaton(b) => (b.clone(), None),
    };
    let atoms = ldba.alphabet().aps().to_vec();
    let env = FalloutWorld::reset_with(&m.fallout, seed, &atoms, |w| {
        fallout_task_feasible(w, &ldba)
    })?;
    Ok(Prepared { env, ldba, formula })
}

fn play<E: crate::envs::Environment>(
    m: &RunManifest,
    mut p: Prepared<E>,
    policy: &mut dyn Policy<E>,
) -> Result<(Option<String>, Trace)> {
    let cfg = EpisodeConfig {
        max_steps: m.max_steps(),
        k: m.k,
        horizon: m.horizon(),
    };
    let trace = run_episode(
        &mut p.env,
        Task::Automaton(&p.ldba),
        policy,
        &ShortestSequence,
        &cfg,
    )?;
    Ok((p.formula, trace))
}

/// Runs episode `index` and returns its trace.
pub fn run_single(m: &RunManifest, index: usize) -> Result<(Option<String>, Trace)> {
    m.validate()?;
    let src = load_source(m)?;
    simulate(m, &src, index)
}

fn simulate(m: &RunManifest, src: &Source, index: usize) -> Result<(Option<String>, Trace)> {
    let seed = m.episode_seed(index);
    match m.env {
        EnvKind::RgbZone => {
            let p = prepare_rgb(m, src, seed)?;
            match m.policy {
                PolicyName::Oracle => play(m, p, &mut ZoneSteering::default()),
                PolicyName::Observation => play(
                    m,
                    p,
                    &mut ZoneSteering {
                        mode: SteerMode::Observation,
                    },
                ),
                PolicyName::Random => play(m, p, &mut RandomPolicy::new(seed)),
            }
        }
        EnvKind::Fallout => {
            let p = prepare_fallout(m, src, seed)?;
            match m.policy {
                PolicyName::Oracle => play(m, p, &mut FalloutPlanner),
                PolicyName::Random => play(m, p, &mut RandomPolicy::new(seed)),
                PolicyName::Observation => unreachable!("rejected by validate"),
            }
        }
    }
}

fn record(m: &RunManifest, src: &Source, index: usize) -> Result<EpisodeRecord> {
    let seed = m.episode_seed(index);
    let blank = EpisodeRecord {
        index,
        seed,
        formula: None,
        infeasible: false,
        terminal: None,
        success: false,
        steps: None,
        env_steps: 0,
        accepting_visits: 0,
        avoid_violations: 0,
        discounted_return: 0.0,
        error: None,
    };
    match simulate(m, src, index) {
        Ok((formula, trace)) => {
            let o = classify_outcome(&trace, m.horizon());
            Ok(EpisodeRecord {
                formula,
                terminal: Some(trace.outcome.terminal),
                success: o.success,
                steps: o.steps,
                env_steps: trace.outcome.env_steps,
                accepting_visits: o.accepting_visits,
                avoid_violations: trace.outcome.avoid_violations,
                discounted_return: discounted_accepting_return(&trace, m.gamma())?,
                ..blank
            })
        }
        Err(e @ Error::SamplingBudgetExhausted { .. }) => Ok(EpisodeRecord {
            infeasible: true,
            error: Some(e.to_string()),
            ..blank
        }),
        Err(e) => Err(e),
    }
}

/// Runs every episode of the manifest on `workers` threads (all cores when `None`).
pub fn evaluate(m: &RunManifest, workers: Option<usize>) -> Result<Metrics> {
    m.validate()?;
    let src = load_source(m)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let mut records = pool.install(|| {
        (0..m.episodes)
            .into_par_iter()
            .map(|i| record(m, &src, i))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|r| r.index);
    Ok(summarize(records))
}

fn summarize(records: Vec<EpisodeRecord>) -> Metrics {
    let feasible: Vec<&EpisodeRecord> = records.iter().filter(|r| !r.infeasible).collect();
    let successes = feasible.iter().filter(|r| r.success).count();
    let mean = |xs: Vec<f64>| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    let steps: Vec<f64> = feasible
        .iter()
        .filter_map(|r| r.steps.map(|s| s as f64))
        .collect();
    Metrics {
        episodes: records.len(),
        feasible: feasible.len(),
        successes,
        success_rate: if feasible.is_empty() {
            0.0
        } else {
            successes as f64 / feasible.len() as f64
        },
        mean_steps: (!steps.is_empty()).then(|| mean(steps)),
        mean_accepting_visits: mean(feasible.iter().map(|r| r.accepting_visits as f64).collect()),
        mean_discounted_return: mean(feasible.iter().map(|r| r.discounted_return).collect()),
        avoid_violations: feasible.iter().map(|r| r.avoid_violations).sum(),
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_episodes_is_rejected() {
        let m = RunManifest::new(
            0,
            EnvKind::Fallout,
            FormulaSource::Template("ra_fw1".into()),
            PolicyName::Oracle,
            0,
        );
        assert!(matches!(
            evaluate(&m, Some(1)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn template_must_match_environment() {
        let m = RunManifest::new(
            0,
            EnvKind::Fallout,
            FormulaSource::Template("phi1".into()),
            PolicyName::Oracle,
            1,
        );
        assert!(m.validate().is_err());
    }

    #[test]
    fn oracle_solves_fallout_reach_tasks() {
        let m = RunManifest::new(
            3,
            EnvKind::Fallout,
            FormulaSource::Template("ra_fw3".into()),
            PolicyName::Oracle,
            20,
        );
        let r = evaluate(&m, Some(2)).unwrap();
        assert_eq!(r.feasible, 20);
        assert_eq!(r.successes, 20);
        assert_eq!(r.avoid_violations, 0);
    }

    #[test]
    fn results_do_not_depend_on_workers() {
        let m = RunManifest::new(
            11,
            EnvKind::Fallout,
            FormulaSource::Template("phi7".into()),
            PolicyName::Random,
            12,
        );
        let a = evaluate(&m, Some(1)).unwrap().to_json();
        let b = evaluate(&m, Some(3)).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn manifest_json_round_trip() {
        let m = RunManifest::new(
            1,
            EnvKind::RgbZone,
            FormulaSource::Text("F at(1.0,0.0,0.0)".into()),
            PolicyName::Oracle,
            3,
        );
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(RunManifest::from_json(&text).unwrap(), m);
    }
}
