use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use flocknet::config::RunConfig;
use flocknet::controllers::{run_episode, Centralized, Controller, LocalHeuristic};
use flocknet::controllers::{velocity_variance, relative_cost};
use flocknet::eval::{
    export_trajectory, run_experiment, trajectory_records, CheckpointFiles, ControllerKind,
    SweepAxis, TrajectoryFormat,
};
use flocknet::graph::Normalization;
use flocknet::policy::{LearnedController, PolicyMode, PolicyParams};
use flocknet::swarm::{init_swarm, seeded_rng};
use flocknet::trainer::{streams, train};

/// Decentralized flocking: simulate, train and evaluate graph policies.
#[derive(Parser)]
#[command(name = "flocknet", version)]
struct Cli {
    /// TOML run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fly one episode and print the velocity variance over time.
    Simulate {
        #[command(flatten)]
        sim: SimFlags,
        #[command(flatten)]
        run: EpisodeFlags,
        /// Print a progress line every this many steps.
        #[arg(long, default_value_t = 10)]
        every: usize,
    },
    /// Train a policy with aggregated imitation learning and save the best checkpoint.
    Train {
        #[command(flatten)]
        sim: SimFlags,
        #[command(flatten)]
        policy: PolicyFlags,
        #[command(flatten)]
        train: TrainFlags,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Compare controllers on the configured swarm (a single sweep cell).
    Evaluate {
        #[command(flatten)]
        sim: SimFlags,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Run the configured sweep and print the report.
    Sweep {
        #[command(flatten)]
        sim: SimFlags,
        #[command(flatten)]
        sweep: SweepFlags,
        #[arg(long)]
        axis: Option<SweepAxis>,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Fly one episode and write its trajectory.
    Export {
        #[command(flatten)]
        sim: SimFlags,
        #[command(flatten)]
        run: EpisodeFlags,
        #[arg(long, default_value = "csv")]
        format: TrajectoryFormat,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SimFlags {
    #[arg(long)]
    n_agents: Option<usize>,
    #[arg(long)]
    comm_radius: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    v_init: Option<f64>,
    #[arg(long)]
    accel_limit: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EpisodeFlags {
    /// centralized, local, dagnn-state or vgai-vision.
    #[arg(long, default_value = "centralized")]
    controller: ControllerKind,
    /// Checkpoint for a learned controller.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Episode index within the seed's evaluation stream.
    #[arg(long, default_value_t = 0)]
    episode: u64,
}

#[derive(Args)]
struct PolicyFlags {
    /// handcrafted or vision.
    #[arg(long)]
    mode: Option<PolicyMode>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    normalization: Option<Normalization>,
}

#[derive(Args)]
struct TrainFlags {
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    episodes_per_round: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    train_seed: Option<u64>,
    /// JSON-lines training log.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct SweepFlags {
    /// Comma-separated controller names.
    #[arg(long, value_delimiter = ',')]
    controllers: Option<Vec<ControllerKind>>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    eval_seed: Option<u64>,
    #[arg(long)]
    dagnn_checkpoint: Option<String>,
    #[arg(long)]
    vgai_checkpoint: Option<String>,
    /// Also write report.txt and report.jsonl here.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn set<T>(field: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *field = v;
    }
}

impl SimFlags {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.sim.n_agents, self.n_agents);
        set(&mut cfg.sim.comm_radius, self.comm_radius);
        set(&mut cfg.sim.dt, self.dt);
        set(&mut cfg.sim.v_init, self.v_init);
        set(&mut cfg.sim.accel_limit, self.accel_limit);
        set(&mut cfg.sim.steps, self.steps);
        set(&mut cfg.sim.rng_seed, self.seed);
    }
}

impl PolicyFlags {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.policy.mode, self.mode);
        set(&mut cfg.policy.k, self.k);
        set(&mut cfg.policy.features, self.features);
        set(&mut cfg.policy.normalization, self.normalization);
    }
}

impl TrainFlags {
    fn apply(self, cfg: &mut RunConfig) {
        let t = &mut cfg.train;
        set(&mut t.rounds, self.rounds);
        set(&mut t.episodes_per_round, self.episodes_per_round);
        set(&mut t.epochs_per_round, self.epochs);
        set(&mut t.batch_size, self.batch_size);
        set(&mut t.learning_rate, self.learning_rate);
        set(&mut t.seed, self.train_seed);
        if self.log.is_some() {
            t.log_path = self.log;
        }
    }
}

impl SweepFlags {
    fn apply(self, cfg: &mut RunConfig) {
        let s = &mut cfg.sweep;
        set(&mut s.controllers, self.controllers);
        set(&mut s.episodes, self.episodes);
        set(&mut s.seed, self.eval_seed);
        if self.dagnn_checkpoint.is_some() {
            s.dagnn_checkpoint = self.dagnn_checkpoint;
        }
        if self.vgai_checkpoint.is_some() {
            s.vgai_checkpoint = self.vgai_checkpoint;
        }
        if self.output_dir.is_some() {
            s.output_dir = self.output_dir;
        }
    }
}

fn controller(
    cfg: &RunConfig,
    flags: &EpisodeFlags,
) -> anyhow::Result<Box<dyn Controller>> {
    Ok(match flags.controller {
        ControllerKind::Centralized => Box::new(Centralized {
            potential: cfg.potential,
        }),
        ControllerKind::Local => Box::new(LocalHeuristic {
            potential: cfg.potential,
            comm_radius: cfg.sim.comm_radius,
        }),
        kind => {
            let Some(path) = &flags.checkpoint else {
                bail!("--checkpoint is required for the {kind} controller");
            };
            let params = PolicyParams::load(path)
                .with_context(|| format!("loading {}", path.display()))?;
            Box::new(LearnedController::new(params, cfg.sim.comm_radius))
        }
    })
}

fn fly(cfg: &RunConfig, flags: &EpisodeFlags) -> anyhow::Result<flocknet::controllers::Rollout> {
    let initial = init_swarm(
        &cfg.sim,
        &mut seeded_rng(cfg.sim.rng_seed, streams::EVAL_EPISODE + flags.episode),
    )?;
    let mut ctl = controller(cfg, flags)?;
    Ok(run_episode(ctl.as_mut(), &initial, &cfg.sim, cfg.sim.steps)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Simulate { sim, run, every } => {
            sim.apply(&mut cfg);
            let rollout = fly(&cfg, &run)?;
            println!("{:>6} {:>14} {:>12}", "step", "vel_variance", "min_dist");
            for (t, s) in rollout.states.iter().enumerate() {
                if t % every.max(1) == 0 || t + 1 == rollout.states.len() {
                    println!(
                        "{t:>6} {:>14.6} {:>12.4}",
                        velocity_variance(s),
                        s.min_pair_distance()
                    );
                }
            }
            let expert = fly(
                &cfg,
                &EpisodeFlags {
                    controller: ControllerKind::Centralized,
                    checkpoint: None,
                    episode: run.episode,
                },
            )?;
            println!(
                "cost {:.6}  relative to centralized {:.4}",
                rollout.cost(),
                relative_cost(rollout.cost(), expert.cost())?
            );
        }
        Command::Train {
            sim,
            policy,
            train: flags,
            out,
        } => {
            sim.apply(&mut cfg);
            policy.apply(&mut cfg);
            flags.apply(&mut cfg);
            let outcome = train(&cfg.train_config())?;
            for r in outcome.log.iter().filter(|r| r.validation_relative_cost.is_some()) {
                println!(
                    "round {:>2}  loss {:.4}  validation {:.3}",
                    r.round,
                    r.loss,
                    r.validation_relative_cost.unwrap_or(f64::NAN)
                );
            }
            outcome.params.save(&out)?;
            println!(
                "best round {} (validation {:.3}), saved {}",
                outcome.best_round,
                outcome.best_validation,
                out.display()
            );
        }
        Command::Evaluate { sim, sweep } => {
            sim.apply(&mut cfg);
            sweep.apply(&mut cfg);
            cfg.sweep.axis = SweepAxis::R;
            cfg.sweep.values = vec![cfg.sim.comm_radius];
            report(&cfg)?;
        }
        Command::Sweep {
            sim,
            sweep,
            axis,
            values,
        } => {
            sim.apply(&mut cfg);
            sweep.apply(&mut cfg);
            set(&mut cfg.sweep.axis, axis);
            set(&mut cfg.sweep.values, values);
            report(&cfg)?;
        }
        Command::Export {
            sim,
            run,
            format,
            out,
        } => {
            sim.apply(&mut cfg);
            let rollout = fly(&cfg, &run)?;
            let records = trajectory_records(&rollout, &cfg.potential, cfg.sim.accel_limit)?;
            export_trajectory(&records, &out, format)?;
            println!("wrote {} rows to {}", records.len(), out.display());
        }
    }
    Ok(())
}

fn report(cfg: &RunConfig) -> anyhow::Result<()> {
    let spec = cfg.experiment_spec();
    let report = run_experiment(&spec, &mut CheckpointFiles(&spec.sweep))?;
    print!("{}", report.to_table());
    if let Some(dir) = &spec.sweep.output_dir {
        report.write_to(dir)?;
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let start = Instant::now();
    let result = run(Cli::parse());
    eprintln!("wall time {:.2}s", start.elapsed().as_secs_f64());
    result
}
