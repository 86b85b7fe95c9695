//! 21×21 grid with a radiation field.
//!
//! Cells are `(x, y)` with the origin at the bottom-left and `y` pointing up.
//! `loc(x,y)` holds on that cell; `rad(tol)` holds where the field is strictly
//! greater than `tol`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::Environment;
use crate::error::{Error, Result};
use crate::ltl::{Assignment, PredicateInstance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FalloutConfig {
    pub grid_size: usize,
    pub gaussian_count: (usize, usize),
    pub amplitude: (f64, f64),
    pub std: (f64, f64),
    pub truncation_sigmas: f64,
    pub tol_range: (f64, f64),
    pub reset_budget: usize,
}

impl Default for FalloutConfig {
    fn default() -> Self {
        Self {
            grid_size: 21,
            gaussian_count: (3, 8),
            amplitude: (0.4, 1.0),
            std: (1.0, 5.0),
            truncation_sigmas: 3.0,
            tol_range: (0.2, 0.8),
            reset_budget: 1000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FalloutAction {
    Up,
    Down,
    Left,
    Right,
    Stay,
}

impl FalloutAction {
    pub const ALL: [FalloutAction; 5] = [
        FalloutAction::Up,
        FalloutAction::Down,
        FalloutAction::Left,
        FalloutAction::Right,
        FalloutAction::Stay,
    ];

    pub fn delta(self) -> (i64, i64) {
        match self {
            FalloutAction::Up => (0, 1),
            FalloutAction::Down => (0, -1),
            FalloutAction::Left => (-1, 0),
            FalloutAction::Right => (1, 0),
            FalloutAction::Stay => (0, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FalloutState {
    pub size: usize,
    pub agent: (usize, usize),
    /// Row-major by `y`: the value at `(x, y)` is `field[y * size + x]`.
    pub field: Vec<f64>,
}

impl FalloutState {
    pub fn intensity(&self, cell: (usize, usize)) -> f64 {
        self.field[cell.1 * self.size + cell.0]
    }

    /// Cell reached from `cell` by `a`, clamped to the grid.
    pub fn moved(&self, cell: (usize, usize), a: FalloutAction) -> (usize, usize) {
        let (dx, dy) = a.delta();
        let max = self.size as i64 - 1;
        let x = (cell.0 as i64 + dx).clamp(0, max) as usize;
        let y = (cell.1 as i64 + dy).clamp(0, max) as usize;
        (x, y)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |y| (0..self.size).map(move |x| (x, y)))
    }
}

/// A `loc` or `rad` atom in decoded form.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Atom {
    Loc(usize, usize),
    Rad(f64),
}

fn decode(p: &PredicateInstance, size: usize) -> Result<Atom> {
    match (p.name(), p.params()) {
        ("loc", [x, y]) => {
            let ok = |v: f64| v.fract() == 0.0 && v >= 0.0 && (v as usize) < size;
            if ok(*x) && ok(*y) {
                Ok(Atom::Loc(*x as usize, *y as usize))
            } else {
                Err(Error::InvalidArgument(format!("{p} is not a grid cell")))
            }
        }
        ("rad", [t]) => Ok(Atom::Rad(*t)),
        _ => Err(Error::InvalidArgument(format!(
            "{p} is not a FalloutWorld predicate"
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct FalloutWorld {
    config: FalloutConfig,
    state: FalloutState,
    active: Vec<PredicateInstance>,
    decoded: Vec<Atom>,
}

impl FalloutWorld {
    /// Samples a field and start cell until the task-relevant atoms are feasible.
    pub fn reset(config: &FalloutConfig, seed: u64, atoms: &[PredicateInstance]) -> Result<Self> {
        Self::reset_with(config, seed, atoms, |_| true)
    }

    /// As [`FalloutWorld::reset`] with an additional acceptance test on each draw.
    pub fn reset_with(
        config: &FalloutConfig,
        seed: u64,
        atoms: &[PredicateInstance],
        extra: impl Fn(&FalloutWorld) -> bool,
    ) -> Result<Self> {
        let mut active = atoms.to_vec();
        active.sort();
        active.dedup();
        let decoded = active
            .iter()
            .map(|p| decode(p, config.grid_size))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..config.reset_budget {
            let field = sample_field(config, &mut rng);
            let n = config.grid_size;
            let agent = (rng.gen_range(0..n), rng.gen_range(0..n));
            let world = FalloutWorld {
                config: config.clone(),
                state: FalloutState {
                    size: n,
                    agent,
                    field,
                },
                active: active.clone(),
                decoded: decoded.clone(),
            };
            if world.is_valid() && extra(&world) {
                return Ok(world);
            }
        }
        Err(Error::SamplingBudgetExhausted {
            seed,
            context: format!(
                "no valid FalloutWorld layout for [{}]",
                active
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        })
    }

    /// Rebuilds a world from [`Environment::snapshot`] output.
    pub fn restore(config: &FalloutConfig, snapshot: &Value) -> Result<Self> {
        let state: FalloutState = serde_json::from_value(snapshot["state"].clone())?;
        let active: Vec<PredicateInstance> = serde_json::from_value(snapshot["active"].clone())?;
        if state.field.len() != state.size * state.size
            || state.agent.0 >= state.size
            || state.agent.1 >= state.size
        {
            return Err(Error::InvalidArgument(
                "inconsistent FalloutWorld snapshot".into(),
            ));
        }
        let decoded = active
            .iter()
            .map(|p| decode(p, state.size))
            .collect::<Result<Vec<_>>>()?;
        Ok(FalloutWorld {
            config: config.clone(),
            state,
            active,
            decoded,
        })
    }

    pub fn config(&self) -> &FalloutConfig {
        &self.config
    }

    /// Lowest `rad` threshold among the active atoms.
    pub fn min_tol(&self) -> Option<f64> {
        self.decoded
            .iter()
            .filter_map(|a| match a {
                Atom::Rad(t) => Some(*t),
                Atom::Loc(..) => None,
            })
            .reduce(f64::min)
    }

    /// Start and goal cells are safe under every threshold, and every goal is
    /// reachable from the start through safe cells.
    pub fn is_valid(&self) -> bool {
        let st = &self.state;
        let safe = |c: (usize, usize)| self.min_tol().is_none_or(|t| st.intensity(c) <= t);
        let goals: Vec<(usize, usize)> = self
            .decoded
            .iter()
            .filter_map(|a| match a {
                Atom::Loc(x, y) => Some((*x, *y)),
                Atom::Rad(_) => None,
            })
            .collect();
        if !safe(st.agent) || !goals.iter().all(|&g| safe(g)) {
            return false;
        }
        let reach = flood(st, st.agent, safe);
        goals.iter().all(|&(x, y)| reach[y * st.size + x])
    }

    /// Labels of a hypothetical agent cell.
    pub fn label_at(&self, cell: (usize, usize)) -> Assignment {
        self.active
            .iter()
            .zip(&self.decoded)
            .filter(|(_, a)| match a {
                Atom::Loc(x, y) => (*x, *y) == cell,
                Atom::Rad(t) => self.state.intensity(cell) > *t,
            })
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Two channels of `size²` values: one-hot agent cell, then the field.
    pub fn observe(&self) -> Vec<f64> {
        let st = &self.state;
        let mut obs = vec![0.0; 2 * st.field.len()];
        obs[st.agent.1 * st.size + st.agent.0] = 1.0;
        obs[st.field.len()..].copy_from_slice(&st.field);
        obs
    }
}

/// Cells reachable from `start` through cells satisfying `ok`.
pub(crate) fn flood(
    st: &FalloutState,
    start: (usize, usize),
    ok: impl Fn((usize, usize)) -> bool,
) -> Vec<bool> {
    let mut seen = vec![false; st.field.len()];
    if !ok(start) {
        return seen;
    }
    seen[start.1 * st.size + start.0] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for a in FalloutAction::ALL {
            let d = st.moved(c, a);
            let i = d.1 * st.size + d.0;
            if !seen[i] && ok(d) {
                seen[i] = true;
                queue.push_back(d);
            }
        }
    }
    seen
}

/// Clipped sum of truncated, rotated anisotropic Gaussians.
fn sample_field(config: &FalloutConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = config.grid_size;
    let mut field = vec![0.0; n * n];
    let count = rng.gen_range(config.gaussian_count.0..=config.gaussian_count.1);
    let cut = config.truncation_sigmas * config.truncation_sigmas;
    for _ in 0..count {
        let cx = rng.gen_range(0.0..(n - 1) as f64);
        let cy = rng.gen_range(0.0..(n - 1) as f64);
        let amp = rng.gen_range(config.amplitude.0..=config.amplitude.1);
        let sx = rng.gen_range(config.std.0..=config.std.1);
        let sy = rng.gen_range(config.std.0..=config.std.1);
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let (s, c) = theta.sin_cos();
        for y in 0..n {
            for x in 0..n {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let u = (c * dx + s * dy) / sx;
                let v = (-s * dx + c * dy) / sy;
                let m = u * u + v * v;
                if m <= cut {
                    field[y * n + x] += amp * (-0.5 * m).exp();
                }
            }
        }
    }
    for v in &mut field {
        *v = v.clamp(0.0, 1.0);
    }
    field
}

impl Environment for FalloutWorld {
    type Action = FalloutAction;
    type State = FalloutState;

    fn state(&self) -> &FalloutState {
        &self.state
    }

    fn step(&mut self, action: &FalloutAction) -> Result<()> {
        self.state.agent = self.state.moved(self.state.agent, *action);
        Ok(())
    }

    fn label(&self) -> Result<Assignment> {
        let sigma = self.label_at(self.state.agent);
        if sigma.len() > 1 {
            return Err(Error::AlphabetViolation(format!(
                "{sigma} at cell ({}, {})",
                self.state.agent.0, self.state.agent.1
            )));
        }
        Ok(sigma)
    }

    fn active(&self) -> &[PredicateInstance] {
        &self.active
    }

    fn sample_action(&self, rng: &mut ChaCha8Rng) -> FalloutAction {
        FalloutAction::ALL[rng.gen_range(0..FalloutAction::ALL.len())]
    }

    fn action_json(&self, action: &FalloutAction) -> Value {
        json!(action)
    }

    fn summary(&self) -> Value {
        json!({ "agent": [self.state.agent.0, self.state.agent.1] })
    }

    fn snapshot(&self) -> Value {
        json!({ "state": self.state, "active": self.active })
    }
}
