use std::f64::consts::{PI, TAU};

use super::{resolve, Context, Goal, Policy};
use crate::envs::rgbzone::Zone;
use crate::envs::Environment;
use crate::envs::{at_instance, RgbZoneConfig, RgbZoneEnv};
use crate::ltl::BooleanFormula;
use crate::runtime::ProductAction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SteerMode {
    /// Reads zone positions from the state.
    #[default]
    GroundTruth,
    /// Uses only the LiDAR observation.
    Observation,
}

/// Extra clearance kept from avoid zones.
const MARGIN: f64 = 0.35;

fn wrap(a: f64) -> f64 {
    let x = (a + PI).rem_euclid(TAU) - PI;
    if x == -PI {
        PI
    } else {
        x
    }
}

fn brake(env: &RgbZoneEnv) -> [f64; 2] {
    let cfg = env.config();
    let f = -env.state().speed * (1.0 - cfg.drag * cfg.dt) / (cfg.force_gain * cfg.dt);
    [f.clamp(-1.0, 1.0), 0.0]
}

/// Force and turn that point the agent along `desired`.
fn head_towards(cfg: &RgbZoneConfig, heading: f64, desired: f64) -> [f64; 2] {
    let err = wrap(desired - heading);
    let turn = (err / (cfg.max_turn_rate * cfg.dt)).clamp(-1.0, 1.0);
    let force = if err.abs() < PI / 4.0 {
        1.0
    } else if err.abs() < PI / 2.0 {
        0.3
    } else {
        0.0
    };
    [force, turn]
}

fn ground_truth(env: &RgbZoneEnv, reach: &BooleanFormula, avoid: &BooleanFormula) -> [f64; 2] {
    let cfg = env.config();
    let st = env.state();
    let here = env.label_at(st.agent_pos);
    if reach.eval(&here) && !avoid.eval(&here) {
        return brake(env);
    }
    let holds = |z: &Zone, f: &BooleanFormula| f.eval(&env.label_at(z.center));
    let pos = st.agent_pos;
    let d = |z: &Zone| (z.center[0] - pos[0]).hypot(z.center[1] - pos[1]);
    let Some(target) = st
        .zones
        .iter()
        .filter(|z| holds(z, reach) && !holds(z, avoid))
        .min_by(|a, b| d(a).total_cmp(&d(b)))
    else {
        return brake(env);
    };
    let dt = d(target).max(1e-9);
    let mut dir = [
        (target.center[0] - pos[0]) / dt,
        (target.center[1] - pos[1]) / dt,
    ];
    let influence = cfg.zone_radius + MARGIN + 0.5;
    for z in st.zones.iter().filter(|z| holds(z, avoid)) {
        let dz = d(z).max(1e-9);
        if dz >= influence {
            continue;
        }
        let away = [(pos[0] - z.center[0]) / dz, (pos[1] - z.center[1]) / dz];
        let w = 3.0 * (influence - dz) / (influence - cfg.zone_radius).max(1e-9);
        // The tangential part slides around the zone on the side facing the target.
        let tangent = if away[0] * dir[1] - away[1] * dir[0] > 0.0 {
            [away[1], -away[0]]
        } else {
            [-away[1], away[0]]
        };
        dir[0] += w * (away[0] + tangent[0]);
        dir[1] += w * (away[1] + tangent[1]);
    }
    let [force, turn] = head_towards(cfg, st.agent_heading, dir[1].atan2(dir[0]));
    // Close to an avoid zone, drive no faster than the turn allows.
    let near = st
        .zones
        .iter()
        .filter(|z| holds(z, avoid))
        .any(|z| d(z) < cfg.zone_radius + MARGIN);
    [if near { force.min(0.3) } else { force }, turn]
}

fn observation_only(env: &RgbZoneEnv, reach: &BooleanFormula) -> [f64; 2] {
    let cfg = env.config();
    let here = env.label_at(env.state().agent_pos);
    if reach.eval(&here) {
        return brake(env);
    }
    let targets: Vec<[f64; 3]> = reach
        .atoms()
        .iter()
        .filter(|p| p.name() == "at")
        .map(|p| [p.params()[0], p.params()[1], p.params()[2]])
        .collect();
    let obs = env.observe();
    let width = TAU / cfg.lidar_bins as f64;
    let best = (0..cfg.lidar_bins)
        .filter(|b| obs[b * 5 + 4] == 1.0)
        .filter_map(|b| {
            let c = &obs[b * 5..b * 5 + 3];
            targets
                .iter()
                .map(|t| {
                    ((t[0] - c[0]).powi(2) + (t[1] - c[1]).powi(2) + (t[2] - c[2]).powi(2)).sqrt()
                })
                .reduce(f64::min)
                .map(|dist| (b, dist))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match best {
        Some((b, _)) => {
            let bearing = (b as f64 + 0.5) * width;
            let [force, turn] = head_towards(cfg, 0.0, bearing);
            [force, turn]
        }
        None => [0.3, 1.0],
    }
}

/// Scripted controller for the active step.
pub fn steer_rgbzone(
    env: &RgbZoneEnv,
    ctx: &Context<'_>,
    mode: SteerMode,
) -> Option<ProductAction<[f64; 2]>> {
    Some(match resolve(ctx)? {
        Goal::Idle => ProductAction::Env(brake(env)),
        Goal::Epsilon(id) => ProductAction::Epsilon(id),
        Goal::Pursue { reach, avoid } => ProductAction::Env(match mode {
            SteerMode::GroundTruth => ground_truth(env, reach, avoid),
            SteerMode::Observation => observation_only(env, reach),
        }),
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZoneSteering {
    pub mode: SteerMode,
}

impl Policy<RgbZoneEnv> for ZoneSteering {
    fn act(&mut self, env: &RgbZoneEnv, ctx: &Context<'_>) -> Option<ProductAction<[f64; 2]>> {
        steer_rgbzone(env, ctx, self.mode)
    }
}

/// The `at` atom of a zone's colour.
pub fn zone_atom(z: &Zone) -> crate::ltl::PredicateInstance {
    at_instance(z.rgb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::ColorSpace;
    use crate::taskseq::{ReachAvoidSequence, SeqStep};

    fn setup(seed: u64) -> RgbZoneEnv {
        RgbZoneEnv::reset(&RgbZoneConfig::default(), seed, 2, &ColorSpace::Continuous).unwrap()
    }

    fn action(env: &RgbZoneEnv, seq: &ReachAvoidSequence) -> [f64; 2] {
        let label = env.label().unwrap();
        let ctx = Context {
            sequence: seq,
            cursor: 0,
            epsilon: &[],
            label: &label,
        };
        match steer_rgbzone(env, &ctx, SteerMode::GroundTruth).unwrap() {
            ProductAction::Env(a) => a,
            ProductAction::Epsilon(_) => unreachable!(),
        }
    }

    fn place(env: &mut RgbZoneEnv, f: impl FnOnce(&mut crate::envs::RgbZoneState)) {
        let mut snap = env.snapshot();
        let mut st: crate::envs::RgbZoneState =
            serde_json::from_value(snap["state"].clone()).unwrap();
        f(&mut st);
        snap["state"] = serde_json::to_value(st).unwrap();
        *env = RgbZoneEnv::restore(env.config(), &snap).unwrap();
    }

    #[test]
    fn target_ahead_drives_straight() {
        let mut env = setup(1);
        place(&mut env, |st| {
            st.agent_pos = [0.0, 0.0];
            st.agent_heading = 0.0;
            for (i, z) in st.zones.iter_mut().enumerate() {
                z.center = [-2.5 + 0.0 * i as f64, -2.5 + 0.7 * i as f64];
            }
            st.zones[0].center = [2.0, 0.0];
        });
        let target = zone_atom(&env.state().zones[0]);
        let seq = ReachAvoidSequence::new(vec![SeqStep::formula(
            BooleanFormula::Atom(target),
            BooleanFormula::False,
        )]);
        assert_eq!(action(&env, &seq), [1.0, 0.0]);
    }

    #[test]
    fn target_behind_turns_the_short_way() {
        let mut env = setup(2);
        for (y, sign) in [(-0.3, -1.0), (0.3, 1.0)] {
            place(&mut env, |st| {
                st.agent_pos = [0.0, 0.0];
                st.agent_heading = 0.0;
                for (i, z) in st.zones.iter_mut().enumerate() {
                    z.center = [2.5, -2.5 + 0.7 * i as f64];
                }
                st.zones[0].center = [-2.0, y];
            });
            let target = zone_atom(&env.state().zones[0]);
            let seq = ReachAvoidSequence::new(vec![SeqStep::formula(
                BooleanFormula::Atom(target),
                BooleanFormula::False,
            )]);
            let [_, turn] = action(&env, &seq);
            assert_eq!(turn.signum(), sign);
        }
    }
}
