//! Point agent on a bounded plane with eight coloured zones in four pairs.
//!
//! Dynamics are discrete-time unicycle kinematics with linear drag. The
//! action is `(force, turn)` in `[-1, 1]²`; each step the heading advances by
//! `max_turn · turn · dt`, the speed integrates `force_gain · force − drag ·
//! speed`, and the position integrates the speed along the new heading.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::Environment;
use crate::error::{Error, Result};
use crate::ltl::{Assignment, PredicateInstance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RgbZoneConfig {
    pub half_extent: f64,
    pub zone_radius: f64,
    pub pair_count: usize,
    pub lidar_bins: usize,
    pub alpha: f64,
    pub min_agent_zone_dist: f64,
    pub min_zone_zone_dist: f64,
    pub min_color_dist: f64,
    pub max_speed: f64,
    pub drag: f64,
    pub force_gain: f64,
    pub max_turn_rate: f64,
    pub dt: f64,
    pub reset_budget: usize,
}

impl Default for RgbZoneConfig {
    fn default() -> Self {
        Self {
            half_extent: 3.0,
            zone_radius: 0.4,
            pair_count: 4,
            lidar_bins: 32,
            alpha: 0.5,
            min_agent_zone_dist: 0.8,
            min_zone_zone_dist: 1.0,
            min_color_dist: 0.3,
            max_speed: 1.0,
            drag: 0.5,
            force_gain: 0.5,
            max_turn_rate: PI,
            dt: 0.1,
            reset_budget: 1000,
        }
    }
}

impl RgbZoneConfig {
    pub const LIDAR_CHANNELS: usize = 5;

    pub fn zone_count(&self) -> usize {
        2 * self.pair_count
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.half_extent,
            self.zone_radius,
            self.alpha,
            self.min_agent_zone_dist,
            self.min_zone_zone_dist,
            self.min_color_dist,
            self.max_speed,
            self.drag,
            self.force_gain,
            self.max_turn_rate,
            self.dt,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) || self.lidar_bins == 0 || self.pair_count == 0 {
            return Err(Error::InvalidArgument(
                "RGBZoneEnv constants must be positive".into(),
            ));
        }
        if self.min_zone_zone_dist <= 2.0 * self.zone_radius {
            return Err(Error::InvalidArgument(
                "zones must be separated by more than a diameter".into(),
            ));
        }
        Ok(())
    }
}

/// Where zone colours come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorSpace {
    /// `offset + 0.1·i` per channel, up to 1.
    Lattice {
        offset: f64,
    },
    Continuous,
    /// Exactly these colours, one per pair.
    Fixed(Vec<[f64; 3]>),
}

impl ColorSpace {
    pub fn lattice_values(offset: f64) -> Vec<f64> {
        (0..=10)
            .map(|i| crate::ltl::predicate::canonical_param(offset + 0.1 * i as f64))
            .filter(|v| *v <= 1.0)
            .collect()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 3] {
        match self {
            ColorSpace::Lattice { offset } => {
                let vals = Self::lattice_values(*offset);
                [0, 1, 2].map(|_| vals[rng.gen_range(0..vals.len())])
            }
            ColorSpace::Continuous => [0, 1, 2].map(|_| rng.gen_range(0.0..=1.0)),
            ColorSpace::Fixed(_) => unreachable!("fixed colours are not sampled"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub center: [f64; 2],
    pub rgb: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RgbZoneState {
    pub agent_pos: [f64; 2],
    pub agent_heading: f64,
    /// World-frame velocity.
    pub agent_vel: [f64; 2],
    /// Signed speed along the heading.
    pub speed: f64,
    pub accel: f64,
    pub turn_rate: f64,
    pub zones: Vec<Zone>,
}

pub fn at_instance(rgb: [f64; 3]) -> PredicateInstance {
    PredicateInstance::parse_free("at", &rgb).expect("at is a valid predicate")
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn color_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[derive(Clone, Debug)]
pub struct RgbZoneEnv {
    config: RgbZoneConfig,
    state: RgbZoneState,
    active: Vec<PredicateInstance>,
}

impl RgbZoneEnv {
    /// Samples a layout and one colour per zone pair; the returned world labels
    /// every placed colour.
    pub fn reset(
        config: &RgbZoneConfig,
        seed: u64,
        task_atoms: usize,
        colors: &ColorSpace,
    ) -> Result<Self> {
        config.validate()?;
        if task_atoms > config.pair_count {
            return Err(Error::InsufficientAtoms {
                needed: task_atoms,
                available: config.pair_count,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget_err = |what: &str| Error::SamplingBudgetExhausted {
            seed,
            context: format!("RGBZoneEnv {what}"),
        };
        let h = config.half_extent;
        let inner = h - config.zone_radius;
        let (agent, centers) = (0..config.reset_budget)
            .find_map(|_| {
                let agent = [rng.gen_range(-h..=h), rng.gen_range(-h..=h)];
                let mut centers: Vec<[f64; 2]> = Vec::with_capacity(config.zone_count());
                for _ in 0..config.zone_count() {
                    let c = [rng.gen_range(-inner..=inner), rng.gen_range(-inner..=inner)];
                    if dist(c, agent) < config.min_agent_zone_dist
                        || centers
                            .iter()
                            .any(|&o| dist(o, c) < config.min_zone_zone_dist)
                    {
                        return None;
                    }
                    centers.push(c);
                }
                Some((agent, centers))
            })
            .ok_or_else(|| budget_err("layout"))?;
        let heading = rng.gen_range(0.0..TAU);
        let palette = match colors {
            ColorSpace::Fixed(c) => {
                if c.len() != config.pair_count {
                    return Err(Error::InvalidArgument(format!(
                        "expected {} colours, got {}",
                        config.pair_count,
                        c.len()
                    )));
                }
                c.clone()
            }
            space => (0..config.reset_budget)
                .find_map(|_| {
                    let mut out: Vec<[f64; 3]> = Vec::with_capacity(config.pair_count);
                    for _ in 0..config.pair_count {
                        let c = space.sample(&mut rng);
                        if out
                            .iter()
                            .any(|&o| color_dist(o, c) < config.min_color_dist)
                        {
                            return None;
                        }
                        out.push(c);
                    }
                    Some(out)
                })
                .ok_or_else(|| budget_err("colours"))?,
        };
        let zones = centers
            .iter()
            .enumerate()
            .map(|(i, &center)| Zone {
                center,
                rgb: palette[i / 2],
            })
            .collect();
        let mut active: Vec<PredicateInstance> = palette.iter().map(|&c| at_instance(c)).collect();
        active.sort();
        active.dedup();
        Ok(RgbZoneEnv {
            config: config.clone(),
            state: RgbZoneState {
                agent_pos: agent,
                agent_heading: heading,
                agent_vel: [0.0, 0.0],
                speed: 0.0,
                accel: 0.0,
                turn_rate: 0.0,
                zones,
            },
            active,
        })
    }

    pub fn restore(config: &RgbZoneConfig, snapshot: &Value) -> Result<Self> {
        config.validate()?;
        Ok(RgbZoneEnv {
            config: config.clone(),
            state: serde_json::from_value(snapshot["state"].clone())?,
            active: serde_json::from_value(snapshot["active"].clone())?,
        })
    }

    pub fn config(&self) -> &RgbZoneConfig {
        &self.config
    }

    /// Colours of the placed zone pairs, in `active` order.
    pub fn available(&self) -> &[PredicateInstance] {
        &self.active
    }

    /// LiDAR bins, then body-frame velocity, acceleration and angular velocity.
    pub fn observe(&self) -> Vec<f64> {
        let cfg = &self.config;
        let st = &self.state;
        let bins = cfg.lidar_bins;
        let width = TAU / bins as f64;
        let mut nearest: Vec<Option<(f64, usize)>> = vec![None; bins];
        for (i, z) in st.zones.iter().enumerate() {
            let (dx, dy) = (z.center[0] - st.agent_pos[0], z.center[1] - st.agent_pos[1]);
            let d = dx.hypot(dy);
            let bin = if d == 0.0 {
                0
            } else {
                let bearing = (dy.atan2(dx) - st.agent_heading).rem_euclid(TAU);
                ((bearing / width) as usize).min(bins - 1)
            };
            if nearest[bin].is_none_or(|(bd, _)| d < bd) {
                nearest[bin] = Some((d, i));
            }
        }
        let mut obs = Vec::with_capacity(bins * RgbZoneConfig::LIDAR_CHANNELS + 5);
        for slot in nearest {
            match slot {
                Some((d, i)) => {
                    let rgb = st.zones[i].rgb;
                    obs.extend_from_slice(&[rgb[0], rgb[1], rgb[2], (-cfg.alpha * d).exp(), 1.0]);
                }
                None => obs.extend_from_slice(&[0.0; 5]),
            }
        }
        let max_accel = cfg.force_gain + cfg.drag * cfg.max_speed;
        let clip = |v: f64| v.clamp(-1.0, 1.0);
        obs.push(clip(st.speed / cfg.max_speed));
        obs.push(0.0);
        obs.push(clip(st.accel / max_accel));
        obs.push(clip(
            st.speed * st.turn_rate / (cfg.max_speed * cfg.max_turn_rate),
        ));
        obs.push(clip(st.turn_rate / cfg.max_turn_rate));
        obs
    }

    /// Colour of the zone containing `pos`, if any (closed disks).
    pub fn label_at(&self, pos: [f64; 2]) -> Assignment {
        self.state
            .zones
            .iter()
            .filter(|z| dist(z.center, pos) <= self.config.zone_radius)
            .map(|z| at_instance(z.rgb))
            .filter(|p| self.active.contains(p))
            .collect()
    }
}

impl Environment for RgbZoneEnv {
    type Action = [f64; 2];
    type State = RgbZoneState;

    fn state(&self) -> &RgbZoneState {
        &self.state
    }

    fn step(&mut self, action: &[f64; 2]) -> Result<()> {
        let [force, turn] = *action;
        if !(-1.0..=1.0).contains(&force) || !(-1.0..=1.0).contains(&turn) {
            return Err(Error::InvalidAction(format!(
                "({force}, {turn}) outside [-1, 1]²"
            )));
        }
        let cfg = &self.config;
        let st = &mut self.state;
        st.turn_rate = cfg.max_turn_rate * turn;
        st.agent_heading = (st.agent_heading + st.turn_rate * cfg.dt).rem_euclid(TAU);
        let old = st.speed;
        st.speed = (old + (cfg.force_gain * force - cfg.drag * old) * cfg.dt)
            .clamp(-cfg.max_speed, cfg.max_speed);
        st.accel = (st.speed - old) / cfg.dt;
        let (s, c) = st.agent_heading.sin_cos();
        st.agent_vel = [c * st.speed, s * st.speed];
        let h = cfg.half_extent;
        st.agent_pos = [
            (st.agent_pos[0] + st.agent_vel[0] * cfg.dt).clamp(-h, h),
            (st.agent_pos[1] + st.agent_vel[1] * cfg.dt).clamp(-h, h),
        ];
        Ok(())
    }

    fn label(&self) -> Result<Assignment> {
        let sigma = self.label_at(self.state.agent_pos);
        if sigma.len() > 1 {
            return Err(Error::AlphabetViolation(sigma.to_string()));
        }
        Ok(sigma)
    }

    fn active(&self) -> &[PredicateInstance] {
        &self.active
    }

    fn sample_action(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)]
    }

    fn action_json(&self, action: &[f64; 2]) -> Value {
        json!(action)
    }

    fn summary(&self) -> Value {
        json!({ "pos": self.state.agent_pos, "heading": self.state.agent_heading })
    }

    fn snapshot(&self) -> Value {
        json!({ "state": self.state, "active": self.active })
    }
}
