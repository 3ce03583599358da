//! Runs the delayed aggregation twice on the same swarm: once as a dense
//! `N x KF` buffer and once as agents that only exchange messages with neighbors.
//! Both produce the same `Z(t)`.
//!
//! ```sh
//! cargo run --release --example message_passing
//! ```

use flocknet::controllers::{handcrafted_state, run_episode, Centralized, PotentialConfig};
use flocknet::graph::message_passing::MessagePassingNetwork;
use flocknet::graph::{build_graph, gso, AggregationBuffer, Normalization};
use flocknet::swarm::{init_swarm, seeded_rng, SimConfig};

fn main() -> anyhow::Result<()> {
    let sim = SimConfig {
        n_agents: 12,
        steps: 50,
        ..SimConfig::default()
    };
    let k = 4;
    let initial = init_swarm(&sim, &mut seeded_rng(3, 0))?;
    let rollout = run_episode(
        &mut Centralized {
            potential: PotentialConfig::default(),
        },
        &initial,
        &sim,
        sim.steps,
    )?;

    let mut buffer = AggregationBuffer::new(sim.n_agents, 6, k)?;
    let mut network = MessagePassingNetwork::new(sim.n_agents, 6, k)?;
    let mut worst = 0.0f64;
    for state in &rollout.states {
        let graph = build_graph(&state.positions, sim.comm_radius);
        let s = gso(&graph, Normalization::Degree);
        let x = handcrafted_state(state, &graph)?;
        buffer.update(&s, &x)?;
        network.step(&s, &x)?;
        worst = worst.max(buffer.z().max_abs_diff(&network.z()));
    }
    println!(
        "{} steps, {} exchange rounds, {} messages delivered",
        rollout.states.len(),
        network.rounds_executed(),
        network.messages_delivered()
    );
    println!("max |Z_dense - Z_messages| = {worst:.3e}");
    let z0 = network.node(0).z();
    println!("agent 0 sees {} numbers:", z0.len());
    for (block, chunk) in z0.chunks(6).enumerate() {
        println!("  {block}-hop {chunk:+.3?}");
    }
    Ok(())
}
