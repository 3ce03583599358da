//! Planar point-mass swarm: state, initialization and double-integrator dynamics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Independent deterministic random stream `stream` derived from `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Minimum neighbor count each agent needs in a valid initial configuration.
pub const MIN_INIT_NEIGHBORS: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_agents: usize,
    /// Communication radius R in meters.
    pub comm_radius: f64,
    /// Sampling interval T_s in seconds.
    pub dt: f64,
    /// Half-width of the per-agent initial velocity interval, m/s.
    pub v_init: f64,
    /// Per-component acceleration bound, m/s².
    pub accel_limit: f64,
    pub min_init_spacing: f64,
    /// Episode length in steps.
    pub steps: usize,
    /// Cap on repair sweeps in [`init_swarm`].
    pub max_init_attempts: usize,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_agents: 50,
            comm_radius: 1.5,
            dt: 0.01,
            v_init: 3.0,
            accel_limit: 30.0,
            min_init_spacing: 0.2,
            steps: 100,
            max_init_attempts: 100,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n_agents < 2 {
            return bad("n_agents must be at least 2");
        }
        if !(self.comm_radius > 0.0) {
            return bad("comm_radius must be positive");
        }
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.v_init >= 0.0) {
            return bad("v_init must be non-negative");
        }
        if !(self.accel_limit > 0.0) {
            return bad("accel_limit must be positive");
        }
        if !(self.min_init_spacing >= 0.0) {
            return bad("min_init_spacing must be non-negative");
        }
        Ok(())
    }
}

/// Positions (m), velocities (m/s) and last applied accelerations (m/s²) at step `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    pub t: usize,
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
    pub accelerations: Vec<Vec2>,
}

impl SwarmState {
    /// Builds a state at `t = 0` with zero accelerations.
    pub fn new(positions: Vec<Vec2>, velocities: Vec<Vec2>) -> Result<Self> {
        if positions.len() != velocities.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} positions vs {} velocities",
                positions.len(),
                velocities.len()
            )));
        }
        if positions.len() < 2 {
            return Err(Error::InvalidConfig(
                "a swarm needs at least 2 agents".into(),
            ));
        }
        let n = positions.len();
        let state = SwarmState {
            t: 0,
            positions,
            velocities,
            accelerations: vec![Vec2::ZERO; n],
        };
        state.check_finite()?;
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn is_finite(&self) -> bool {
        self.positions
            .iter()
            .chain(&self.velocities)
            .chain(&self.accelerations)
            .all(|v| v.is_finite())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(format!("swarm state at t={}", self.t)))
        }
    }

    pub fn mean_velocity(&self) -> Vec2 {
        let mut sum = Vec2::ZERO;
        for v in &self.velocities {
            sum += *v;
        }
        sum * (1.0 / self.n() as f64)
    }

    /// Smallest pairwise distance.
    pub fn min_pair_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                best = best.min((self.positions[i] - self.positions[j]).norm());
            }
        }
        best
    }

    /// Returns a copy with agents reordered so that new agent `k` is old agent `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> SwarmState {
        SwarmState {
            t: self.t,
            positions: perm.iter().map(|&p| self.positions[p]).collect(),
            velocities: perm.iter().map(|&p| self.velocities[p]).collect(),
            accelerations: perm.iter().map(|&p| self.accelerations[p]).collect(),
        }
    }
}

fn sample_in_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vec2 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Vec2::new(r * theta.cos(), r * theta.sin())
}

/// Agents violating the spacing or neighbor-count requirement.
fn violating_agents(positions: &[Vec2], config: &SimConfig) -> Vec<usize> {
    let n = positions.len();
    let mut neighbors = vec![0usize; n];
    let mut crowded = vec![false; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (positions[i] - positions[j]).norm();
            if d <= config.comm_radius {
                neighbors[i] += 1;
                neighbors[j] += 1;
            }
            if d < config.min_init_spacing {
                crowded[i] = true;
                crowded[j] = true;
            }
        }
    }
    (0..n)
        .filter(|&i| crowded[i] || neighbors[i] < MIN_INIT_NEIGHBORS)
        .collect()
}

/// True iff every agent has at least two neighbors within the communication
/// radius and no pair starts closer than the minimum spacing.
pub fn validate_initialization(state: &SwarmState, config: &SimConfig) -> bool {
    violating_agents(&state.positions, config).is_empty()
}

/// Samples a valid initial configuration.
///
/// Positions are uniform on the disc of radius √N. Agents that violate the
/// spacing or neighbor requirement are redrawn from the same distribution,
/// one repair sweep at a time, until the configuration validates or
/// `max_init_attempts` sweeps have run. Velocities are drawn per component
/// from `[-v_init, v_init]` plus one flock-wide bias from
/// `[-0.3 v_init, 0.3 v_init]`.
pub fn init_swarm<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<SwarmState> {
    config.validate()?;
    let n = config.n_agents;
    let radius = (n as f64).sqrt();
    let mut positions: Vec<Vec2> = (0..n).map(|_| sample_in_disc(rng, radius)).collect();

    let mut sweeps = 0;
    loop {
        let bad = violating_agents(&positions, config);
        if bad.is_empty() {
            break;
        }
        if sweeps == config.max_init_attempts {
            return Err(Error::InitializationFailed { attempts: sweeps });
        }
        for i in bad {
            positions[i] = sample_in_disc(rng, radius);
        }
        sweeps += 1;
    }

    let v = config.v_init;
    let bias_half = 0.3 * v;
    let velocities: Vec<Vec2> = (0..n)
        .map(|_| Vec2::new(rng.gen_range(-v..=v), rng.gen_range(-v..=v)))
        .collect();
    let bias = Vec2::new(
        rng.gen_range(-bias_half..=bias_half),
        rng.gen_range(-bias_half..=bias_half),
    );
    let velocities = velocities.into_iter().map(|u| u + bias).collect();
    SwarmState::new(positions, velocities)
}

/// Clamps each acceleration component to `[-limit, limit]`.
pub fn saturate(actions: &[Vec2], limit: f64) -> Vec<Vec2> {
    actions
        .iter()
        .map(|a| Vec2::new(a.x.clamp(-limit, limit), a.y.clamp(-limit, limit)))
        .collect()
}

/// Exact constant-acceleration update over one sampling interval.
pub fn step_dynamics(state: &SwarmState, actions: &[Vec2], dt: f64) -> Result<SwarmState> {
    if actions.len() != state.n() {
        return Err(Error::ShapeMismatch(format!(
            "{} actions for {} agents",
            actions.len(),
            state.n()
        )));
    }
    if !state.is_finite() || !actions.iter().all(|a| a.is_finite()) {
        return Err(Error::NonFinite(format!("dynamics input at t={}", state.t)));
    }
    let half_dt2 = 0.5 * dt * dt;
    let positions = state
        .positions
        .iter()
        .zip(&state.velocities)
        .zip(actions)
        .map(|((&r, &v), &u)| r + v * dt + u * half_dt2)
        .collect();
    let velocities = state
        .velocities
        .iter()
        .zip(actions)
        .map(|(&v, &u)| v + u * dt)
        .collect();
    let next = SwarmState {
        t: state.t + 1,
        positions,
        velocities,
        accelerations: actions.to_vec(),
    };
    next.check_finite()?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize) -> SimConfig {
        SimConfig {
            n_agents: n,
            ..SimConfig::default()
        }
    }

    #[test]
    fn init_respects_disc_and_velocity_bounds() {
        let config = cfg(50);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = init_swarm(&config, &mut rng).unwrap();
        let radius = 50f64.sqrt();
        assert!(s.positions.iter().all(|p| p.norm() <= radius + 1e-12));
        assert!(validate_initialization(&s, &config));
        // Per-agent spread is ±v_init around the shared bias, the bias itself
        // within ±0.3 v_init, so every component lies within ±1.3 v_init and
        // the component-wise spread across agents is at most 2 v_init.
        for c in [|v: &Vec2| v.x, |v: &Vec2| v.y] {
            let vals: Vec<f64> = s.velocities.iter().map(c).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(hi - lo <= 6.0 + 1e-12);
            assert!(lo >= -3.9 - 1e-12 && hi <= 3.9 + 1e-12);
        }
        assert!(s.accelerations.iter().all(|a| *a == Vec2::ZERO));
    }

    #[test]
    fn zero_v_init_gives_zero_velocities() {
        let config = SimConfig {
            v_init: 0.0,
            ..cfg(10)
        };
        let s = init_swarm(&config, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(s.velocities.iter().all(|v| *v == Vec2::ZERO));
    }

    #[test]
    fn init_is_deterministic() {
        let config = cfg(20);
        let a = init_swarm(&config, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = init_swarm(&config, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unsatisfiable_config_errors() {
        // Two agents can never have two neighbors each.
        let config = cfg(2);
        let err = init_swarm(&config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::InitializationFailed { attempts: 100 }));
    }

    #[test]
    fn validation_cases() {
        let config = SimConfig {
            comm_radius: 1.5,
            ..cfg(3)
        };
        let h = 3f64.sqrt() / 2.0;
        let tri = SwarmState::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.5, h)],
            vec![Vec2::ZERO; 3],
        )
        .unwrap();
        assert!(validate_initialization(&tri, &config));

        let pair =
            SwarmState::new(vec![Vec2::ZERO, Vec2::new(0.5, 0.0)], vec![Vec2::ZERO; 2]).unwrap();
        assert!(!validate_initialization(&pair, &config));

        let close = SwarmState::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(0.1, 0.0), Vec2::new(0.5, h)],
            vec![Vec2::ZERO; 3],
        )
        .unwrap();
        assert!(!validate_initialization(&close, &config));
    }

    #[test]
    fn saturation_examples() {
        let out = saturate(
            &[Vec2::new(40.0, -50.0), Vec2::ZERO, Vec2::new(-30.0, 30.0)],
            30.0,
        );
        assert_eq!(
            out,
            vec![Vec2::new(30.0, -30.0), Vec2::ZERO, Vec2::new(-30.0, 30.0)]
        );
    }

    #[test]
    fn dynamics_examples() {
        let s = SwarmState::new(
            vec![Vec2::ZERO, Vec2::new(5.0, 5.0)],
            vec![Vec2::new(1.0, 0.0), Vec2::ZERO],
        )
        .unwrap();
        let next = step_dynamics(&s, &[Vec2::ZERO, Vec2::ZERO], 0.01).unwrap();
        assert_eq!(next.positions[0], Vec2::new(0.01, 0.0));
        assert_eq!(next.positions[1], Vec2::new(5.0, 5.0));
        assert_eq!(next.velocities[1], Vec2::ZERO);
        assert_eq!(next.t, 1);

        let s =
            SwarmState::new(vec![Vec2::ZERO, Vec2::new(5.0, 5.0)], vec![Vec2::ZERO; 2]).unwrap();
        let next = step_dynamics(&s, &[Vec2::new(2.0, 0.0), Vec2::ZERO], 1.0).unwrap();
        assert_eq!(next.positions[0], Vec2::new(1.0, 0.0));
        assert_eq!(next.velocities[0], Vec2::new(2.0, 0.0));
    }

    #[test]
    fn dynamics_rejects_non_finite() {
        let s =
            SwarmState::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)], vec![Vec2::ZERO; 2]).unwrap();
        let err = step_dynamics(&s, &[Vec2::new(f64::NAN, 0.0), Vec2::ZERO], 0.01).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }
}
