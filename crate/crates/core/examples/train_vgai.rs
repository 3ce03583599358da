//! Trains the vision policy end to end: the CNN turns each agent's panorama into
//! features, the features are aggregated over the graph, and a readout maps them to
//! an acceleration. Gradients flow from the imitation loss through all three.
//!
//! ```sh
//! cargo run --release --example train_vgai -- [rounds] [out.ckpt]
//! ```

use flocknet::config::RunConfig;
use flocknet::eval::{run_experiment, ControllerKind, FixedPolicies, SweepAxis};
use flocknet::graph::Normalization;
use flocknet::policy::PolicyMode;
use flocknet::trainer::train;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut cfg = RunConfig::default();
    cfg.sim.n_agents = 6;
    cfg.policy.mode = PolicyMode::Vision;
    cfg.policy.features = 12;
    cfg.policy.k = 3;
    cfg.policy.normalization = Normalization::Adjacency;
    cfg.policy.camera.height = 8;
    cfg.policy.camera.width = 64;
    cfg.train.rounds = args.first().map_or(Ok(4), |s| s.parse())?;
    cfg.train.episodes_per_round = 6;
    cfg.train.epochs_per_round = 4;
    cfg.train.learning_rate = 1e-3;

    let outcome = train(&cfg.train_config())?;
    println!(
        "epoch-1 loss {:.3}, final loss {:.3}",
        outcome.first_epoch_loss().unwrap_or(f64::NAN),
        outcome.final_epoch_loss().unwrap_or(f64::NAN)
    );
    for rec in outcome.log.iter().filter(|r| r.validation_relative_cost.is_some()) {
        println!(
            "round {} validation relative cost {:.3}",
            rec.round,
            rec.validation_relative_cost.unwrap()
        );
    }
    if let Some(path) = args.get(1) {
        outcome.params.save(path)?;
    }

    let mut spec = cfg.experiment_spec();
    spec.sweep.axis = SweepAxis::R;
    spec.sweep.values = vec![cfg.sim.comm_radius];
    spec.sweep.controllers = vec![ControllerKind::Local, ControllerKind::VgaiVision];
    let report = run_experiment(
        &spec,
        &mut FixedPolicies(vec![(ControllerKind::VgaiVision, outcome.params)]),
    )?;
    print!("{}", report.to_table());
    Ok(())
}
