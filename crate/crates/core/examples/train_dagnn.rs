//! Trains a state-based delayed-aggregation policy by imitation and compares it
//! with the expert and the local heuristic on held-out initial states.
//!
//! ```sh
//! cargo run --release --example train_dagnn -- [n_agents] [k] [out.ckpt]
//! ```

use std::time::Instant;

use flocknet::config::RunConfig;
use flocknet::eval::{run_experiment, ControllerKind, FixedPolicies, SweepAxis};
use flocknet::graph::Normalization;
use flocknet::trainer::train;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(10), |s| s.parse())?;
    let k: usize = args.get(1).map_or(Ok(4), |s| s.parse())?;

    let mut cfg = RunConfig::default();
    cfg.sim.n_agents = n;
    cfg.policy.k = k;
    cfg.policy.normalization = Normalization::Adjacency;

    let started = Instant::now();
    let outcome = train(&cfg.train_config())?;
    for rec in outcome
        .log
        .iter()
        .filter(|r| r.validation_relative_cost.is_some())
    {
        println!(
            "round {} loss {:.4} validation relative cost {:.3}",
            rec.round,
            rec.loss,
            rec.validation_relative_cost.unwrap()
        );
    }
    println!(
        "trained on {} steps in {:.1}s, kept round {}",
        outcome.dataset_steps,
        started.elapsed().as_secs_f64(),
        outcome.best_round
    );
    if let Some(path) = args.get(2) {
        outcome.params.save(path)?;
        println!("checkpoint written to {path}");
    }

    let mut spec = cfg.experiment_spec();
    spec.sweep.axis = SweepAxis::R;
    spec.sweep.values = vec![cfg.sim.comm_radius];
    spec.sweep.controllers = vec![
        ControllerKind::Centralized,
        ControllerKind::Local,
        ControllerKind::DagnnState,
    ];
    let report = run_experiment(
        &spec,
        &mut FixedPolicies(vec![(ControllerKind::DagnnState, outcome.params)]),
    )?;
    print!("{}", report.to_table());
    Ok(())
}
