//! Trains a state-based policy on a small team and deploys the same weights on
//! larger teams without retraining. Pass a checkpoint to skip training.
//!
//! ```sh
//! cargo run --release --example team_transfer -- [train_n] [checkpoint]
//! ```

use flocknet::config::RunConfig;
use flocknet::controllers::PotentialConfig;
use flocknet::eval::{transfer_eval, ControllerKind};
use flocknet::graph::Normalization;
use flocknet::policy::PolicyParams;
use flocknet::trainer::train;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(20), |s| s.parse())?;
    let mut cfg = RunConfig::default();
    cfg.sim.n_agents = n;
    cfg.policy.normalization = Normalization::Adjacency;

    let params = match args.get(1) {
        Some(path) if std::path::Path::new(path).exists() => PolicyParams::load(path)?,
        other => {
            let params = train(&cfg.train_config())?.params;
            if let Some(path) = other {
                params.save(path)?;
            }
            params
        }
    };
    let sizes = [n, n * 3 / 2, n * 2];
    let report = transfer_eval(
        &params,
        ControllerKind::DagnnState,
        &cfg.sim,
        &PotentialConfig::default(),
        &sizes,
        10,
        0,
    )?;
    print!("{}", report.to_table());
    Ok(())
}
