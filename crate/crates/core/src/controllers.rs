//! Hand-designed flocking controllers and the velocity-variance cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, CommGraph};
use crate::nn::Tensor;
use crate::swarm::{saturate, step_dynamics, SimConfig, SwarmState};
use crate::vec2::Vec2;

/// Number of handcrafted features per agent.
pub const HANDCRAFTED_FEATURES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    /// Separation below which the collision potential is active, meters.
    pub rho: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig { rho: 1.0 }
    }
}

impl PotentialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rho > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig("rho must be positive".into()))
        }
    }
}

/// `1/d² - ln d²` inside `rho`, constant `1/rho² - ln rho²` outside.
pub fn potential_value(r_i: Vec2, r_j: Vec2, rho: f64) -> Result<f64> {
    let d2 = (r_i - r_j).norm_sq();
    if d2 == 0.0 {
        return Err(Error::SingularPotential);
    }
    let d2 = if d2.sqrt() <= rho { d2 } else { rho * rho };
    Ok(1.0 / d2 - d2.ln())
}

/// Gradient of [`potential_value`] with respect to `r_i`; zero on the constant branch.
pub fn potential_gradient(r_i: Vec2, r_j: Vec2, rho: f64) -> Result<Vec2> {
    let r_ij = r_i - r_j;
    let d2 = r_ij.norm_sq();
    if d2 == 0.0 {
        return Err(Error::SingularPotential);
    }
    if d2.sqrt() > rho {
        return Ok(Vec2::ZERO);
    }
    Ok(r_ij * (-2.0 / (d2 * d2) - 2.0 / d2))
}

fn consensus_action<'a>(
    state: &SwarmState,
    i: usize,
    others: impl Iterator<Item = &'a usize>,
    pot: &PotentialConfig,
) -> Result<Vec2> {
    let (r_i, v_i) = (state.positions[i], state.velocities[i]);
    let mut u = Vec2::ZERO;
    for &j in others {
        if j == i {
            continue;
        }
        u -= v_i - state.velocities[j];
        let grad = potential_gradient(r_i, state.positions[j], pot.rho)
            .map_err(|_| Error::CoincidentAgents { i, j })?;
        u -= grad;
    }
    Ok(u)
}

/// Velocity consensus plus collision avoidance over every other agent.
pub fn centralized_expert(state: &SwarmState, pot: &PotentialConfig) -> Result<Vec<Vec2>> {
    let all: Vec<usize> = (0..state.n()).collect();
    (0..state.n())
        .map(|i| consensus_action(state, i, all.iter(), pot))
        .collect()
}

/// The expert's formula restricted to one-hop neighbors.
pub fn local_heuristic(
    state: &SwarmState,
    graph: &CommGraph,
    pot: &PotentialConfig,
) -> Result<Vec<Vec2>> {
    (0..state.n())
        .map(|i| consensus_action(state, i, graph.neighbors(i).iter(), pot))
        .collect()
}

/// `(1/N) sum_i |v_i - mean(v)|²` at a single step.
pub fn velocity_variance(state: &SwarmState) -> f64 {
    let mean = state.mean_velocity();
    let total: f64 = state.velocities.iter().map(|v| (*v - mean).norm_sq()).sum();
    total / state.n() as f64
}

/// Flocking cost of a trajectory: per-step velocity variance summed over time.
pub fn velocity_variance_cost(trajectory: &[SwarmState]) -> f64 {
    trajectory.iter().map(velocity_variance).sum()
}

/// Controller cost normalized by the expert's cost on the same episode.
pub fn relative_cost(controller_cost: f64, expert_cost: f64) -> Result<f64> {
    if expert_cost > 0.0 {
        Ok(controller_cost / expert_cost)
    } else {
        Err(Error::DegenerateExpertCost)
    }
}

/// Relative costs below this count as successful flocking.
pub const FLOCKING_SUCCESS_THRESHOLD: f64 = 3.0;

/// Per agent: `[sum (v_i - v_j), sum r_ij/|r_ij|⁴, sum r_ij/|r_ij|²]` over neighbors.
pub fn handcrafted_state(state: &SwarmState, graph: &CommGraph) -> Result<Tensor> {
    let n = state.n();
    let mut out = Tensor::zeros(&[n, HANDCRAFTED_FEATURES]);
    for i in 0..n {
        let mut dv = Vec2::ZERO;
        let mut inv4 = Vec2::ZERO;
        let mut inv2 = Vec2::ZERO;
        for &j in graph.neighbors(i) {
            let r_ij = state.positions[i] - state.positions[j];
            let d2 = r_ij.norm_sq();
            if d2 == 0.0 {
                return Err(Error::CoincidentAgents { i, j });
            }
            dv += state.velocities[i] - state.velocities[j];
            inv4 += r_ij * (1.0 / (d2 * d2));
            inv2 += r_ij * (1.0 / d2);
        }
        out.row_mut(i)
            .copy_from_slice(&[dv.x, dv.y, inv4.x, inv4.y, inv2.x, inv2.y]);
    }
    Ok(out)
}

/// Anything that maps the current swarm state to one acceleration per agent.
///
/// Controllers may keep internal memory (the learned policies keep their
/// aggregation history), so `reset` is called at the start of every episode.
pub trait Controller {
    fn reset(&mut self, n_agents: usize) -> Result<()>;
    fn act(&mut self, state: &SwarmState) -> Result<Vec<Vec2>>;
}

#[derive(Clone, Debug)]
pub struct Centralized {
    pub potential: PotentialConfig,
}

impl Controller for Centralized {
    fn reset(&mut self, _n_agents: usize) -> Result<()> {
        Ok(())
    }

    fn act(&mut self, state: &SwarmState) -> Result<Vec<Vec2>> {
        centralized_expert(state, &self.potential)
    }
}

#[derive(Clone, Debug)]
pub struct LocalHeuristic {
    pub potential: PotentialConfig,
    pub comm_radius: f64,
}

impl Controller for LocalHeuristic {
    fn reset(&mut self, _n_agents: usize) -> Result<()> {
        Ok(())
    }

    fn act(&mut self, state: &SwarmState) -> Result<Vec<Vec2>> {
        let graph = build_graph(&state.positions, self.comm_radius);
        local_heuristic(state, &graph, &self.potential)
    }
}

/// A simulated episode: `steps + 1` states and the saturated actions applied between them.
#[derive(Clone, Debug, PartialEq)]
pub struct Rollout {
    pub states: Vec<SwarmState>,
    pub actions: Vec<Vec<Vec2>>,
}

impl Rollout {
    /// Velocity-variance cost over the states at which actions were chosen.
    pub fn cost(&self) -> f64 {
        velocity_variance_cost(&self.states[..self.actions.len()])
    }
}

/// Runs `controller` from `initial` for `steps` steps with saturated actions.
///
/// Fails with [`Error::NonFinite`] as soon as the state stops being finite.
pub fn run_episode(
    controller: &mut dyn Controller,
    initial: &SwarmState,
    sim: &SimConfig,
    steps: usize,
) -> Result<Rollout> {
    controller.reset(initial.n())?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut actions = Vec::with_capacity(steps);
    let mut state = initial.clone();
    for t in 0..steps {
        let raw = controller.act(&state)?;
        let u = saturate(&raw, sim.accel_limit);
        let next = step_dynamics(&state, &u, sim.dt).map_err(|e| match e {
            Error::NonFinite(what) => Error::NonFinite(format!("{what} (episode step {t})")),
            other => other,
        })?;
        states.push(std::mem::replace(&mut state, next));
        actions.push(u);
    }
    states.push(state);
    Ok(Rollout { states, actions })
}
