//! Exports one local-heuristic episode as CSV and JSON lines, then reads both back.
//!
//! ```sh
//! cargo run --release --example export_trajectory -- [out_dir]
//! ```

use std::path::PathBuf;

use flocknet::controllers::{run_episode, LocalHeuristic, PotentialConfig};
use flocknet::eval::{export_trajectory, import_trajectory, trajectory_records, TrajectoryFormat};
use flocknet::swarm::{init_swarm, seeded_rng, SimConfig};

fn main() -> anyhow::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "trajectory".into())
        .into();
    std::fs::create_dir_all(&out)?;
    let sim = SimConfig {
        n_agents: 5,
        steps: 40,
        ..SimConfig::default()
    };
    let potential = PotentialConfig::default();
    let initial = init_swarm(&sim, &mut seeded_rng(0, 0))?;
    let mut ctl = LocalHeuristic {
        potential,
        comm_radius: sim.comm_radius,
    };
    let rollout = run_episode(&mut ctl, &initial, &sim, sim.steps)?;
    let records = trajectory_records(&rollout, &potential, sim.accel_limit)?;

    for (format, name) in [
        (TrajectoryFormat::Csv, "episode.csv"),
        (TrajectoryFormat::Jsonl, "episode.jsonl"),
    ] {
        let path = out.join(name);
        export_trajectory(&records, &path, format)?;
        let back = import_trajectory(&path, format)?;
        println!(
            "{}: {} rows, identical after reload: {}",
            path.display(),
            back.len(),
            back == records
        );
    }
    let gap = records
        .iter()
        .map(|r| (r.ux - r.ux_expert).hypot(r.uy - r.uy_expert))
        .fold(0.0, f64::max);
    println!("largest gap between applied and expert action: {gap:.3}");
    Ok(())
}
