//! Sweeps the communication radius and reports each controller's cost relative to
//! the centralized expert, as a table and as JSON lines.
//!
//! ```sh
//! cargo run --release --example radius_sweep -- [out_dir]
//! ```

use flocknet::eval::{run_experiment, ControllerKind, ExperimentSpec, SweepAxis, SweepSettings};
use flocknet::swarm::SimConfig;

fn main() -> anyhow::Result<()> {
    let spec = ExperimentSpec {
        sim: SimConfig {
            n_agents: 10,
            ..SimConfig::default()
        },
        sweep: SweepSettings {
            axis: SweepAxis::R,
            values: vec![1.0, 1.5, 2.0],
            controllers: vec![ControllerKind::Centralized, ControllerKind::Local],
            episodes: 10,
            output_dir: std::env::args().nth(1).map(Into::into),
            ..SweepSettings::default()
        },
        ..ExperimentSpec::default()
    };
    let none = |kind: ControllerKind, _: f64| -> flocknet::Result<_> {
        Err(flocknet::Error::MissingCheckpoint(kind.to_string()))
    };
    let report = run_experiment(&spec, &mut { none })?;
    print!("{}", report.to_table());
    if let Some(dir) = &spec.sweep.output_dir {
        report.write_to(dir)?;
        println!("wrote {}", dir.display());
    } else {
        print!("{}", report.to_jsonl()?);
    }
    Ok(())
}
