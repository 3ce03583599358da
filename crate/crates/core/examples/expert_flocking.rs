//! Flies the same initial swarm under the centralized expert and the local heuristic
//! and prints how fast each drives the velocities into agreement.
//!
//! ```sh
//! cargo run --release --example expert_flocking -- [n_agents] [comm_radius]
//! ```

use flocknet::controllers::{
    run_episode, velocity_variance, Centralized, LocalHeuristic, PotentialConfig,
};
use flocknet::swarm::{init_swarm, seeded_rng, SimConfig};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let sim = SimConfig {
        n_agents: args.first().map_or(Ok(10), |s| s.parse())?,
        comm_radius: args.get(1).map_or(Ok(1.5), |s| s.parse())?,
        steps: 300,
        ..SimConfig::default()
    };
    let potential = PotentialConfig::default();
    let initial = init_swarm(&sim, &mut seeded_rng(sim.rng_seed, 0))?;

    let expert = run_episode(&mut Centralized { potential }, &initial, &sim, sim.steps)?;
    let local = run_episode(
        &mut LocalHeuristic {
            potential,
            comm_radius: sim.comm_radius,
        },
        &initial,
        &sim,
        sim.steps,
    )?;

    println!("{:>5} {:>12} {:>12} {:>10}", "t[s]", "expert", "local", "min dist");
    for t in (0..=sim.steps).step_by(25) {
        println!(
            "{:>5.2} {:>12.5} {:>12.5} {:>10.3}",
            t as f64 * sim.dt,
            velocity_variance(&expert.states[t]),
            velocity_variance(&local.states[t]),
            expert.states[t].min_pair_distance(),
        );
    }
    println!(
        "episode cost: expert {:.4}, local {:.4} ({:.2}x)",
        expert.cost(),
        local.cost(),
        local.cost() / expert.cost()
    );
    Ok(())
}
