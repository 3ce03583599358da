//! Seed-paired controller comparisons, sweeps and trajectory export.
//!
//! Every cell of a sweep flies the same initial states (drawn from the
//! evaluation streams of the sweep seed) under each requested controller and
//! divides each controller's cost by the centralized expert's cost on that same
//! initial state.

use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::controllers::{
    centralized_expert, relative_cost, run_episode, Centralized, Controller, LocalHeuristic,
    PotentialConfig, Rollout, FLOCKING_SUCCESS_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::policy::{LearnedController, PolicyParams};
use crate::swarm::{init_swarm, saturate, seeded_rng, SimConfig};
use crate::trainer::streams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    Centralized,
    Local,
    DagnnState,
    VgaiVision,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 4] = [
        ControllerKind::Centralized,
        ControllerKind::Local,
        ControllerKind::DagnnState,
        ControllerKind::VgaiVision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Centralized => "centralized",
            ControllerKind::Local => "local",
            ControllerKind::DagnnState => "dagnn-state",
            ControllerKind::VgaiVision => "vgai-vision",
        }
    }

    pub fn is_learned(self) -> bool {
        matches!(
            self,
            ControllerKind::DagnnState | ControllerKind::VgaiVision
        )
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ControllerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown controller `{s}`")))
    }
}

/// Quantity varied across the cells of a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Feature width; selects the learned checkpoint.
    F,
    /// Aggregation depth; selects the learned checkpoint.
    K,
    /// Initial velocity spread, m/s.
    VInit,
    /// Communication radius, m.
    #[default]
    R,
    /// Team size at test time, same checkpoint throughout.
    NTransfer,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::F => "f",
            SweepAxis::K => "k",
            SweepAxis::VInit => "v-init",
            SweepAxis::R => "r",
            SweepAxis::NTransfer => "n-transfer",
        }
    }

    /// Simulation settings of the cell at `value`.
    pub fn apply(self, base: &SimConfig, value: f64) -> Result<SimConfig> {
        let mut sim = base.clone();
        match self {
            SweepAxis::VInit => sim.v_init = value,
            SweepAxis::R => sim.comm_radius = value,
            SweepAxis::NTransfer => {
                if value < 2.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "team size {value} is not an integer >= 2"
                    )));
                }
                sim.n_agents = value as usize;
            }
            SweepAxis::F | SweepAxis::K => {}
        }
        sim.validate()?;
        Ok(sim)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepAxis::F,
            SweepAxis::K,
            SweepAxis::VInit,
            SweepAxis::R,
            SweepAxis::NTransfer,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown sweep axis `{s}`")))
    }
}

/// Sweep definition without the swarm settings it perturbs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub controllers: Vec<ControllerKind>,
    pub episodes: usize,
    pub seed: u64,
    /// Steps per evaluation episode; defaults to the simulation's episode length.
    pub steps: Option<usize>,
    /// Checkpoint path for the state-based policy. `{value}` is replaced by the axis value.
    pub dagnn_checkpoint: Option<String>,
    /// Checkpoint path for the vision policy, same substitution rule.
    pub vgai_checkpoint: Option<String>,
    pub output_dir: Option<std::path::PathBuf>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            axis: SweepAxis::R,
            values: vec![1.0, 1.5, 2.0],
            controllers: vec![ControllerKind::Centralized, ControllerKind::Local],
            episodes: 10,
            seed: 0,
            steps: None,
            dagnn_checkpoint: None,
            vgai_checkpoint: None,
            output_dir: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentSpec {
    pub sim: SimConfig,
    pub potential: PotentialConfig,
    pub sweep: SweepSettings,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.potential.validate()?;
        if self.sweep.values.is_empty() {
            return Err(Error::InvalidConfig(
                "sweep needs at least one axis value".into(),
            ));
        }
        if self.sweep.episodes == 0 {
            return Err(Error::InvalidConfig(
                "sweep needs at least one episode per cell".into(),
            ));
        }
        if self.sweep.controllers.is_empty() {
            return Err(Error::InvalidConfig(
                "sweep needs at least one controller".into(),
            ));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        self.sweep.steps.unwrap_or(self.sim.steps)
    }
}

/// Source of trained parameters for the learned controllers of a sweep.
pub trait PolicySource {
    fn policy(&mut self, kind: ControllerKind, axis_value: f64) -> Result<PolicyParams>;
}

/// Looks policies up from the checkpoint paths in [`SweepSettings`].
pub struct CheckpointFiles<'a>(pub &'a SweepSettings);

fn format_value(v: f64) -> String {
    format!("{v}")
}

impl PolicySource for CheckpointFiles<'_> {
    fn policy(&mut self, kind: ControllerKind, axis_value: f64) -> Result<PolicyParams> {
        let template = match kind {
            ControllerKind::DagnnState => self.0.dagnn_checkpoint.as_ref(),
            ControllerKind::VgaiVision => self.0.vgai_checkpoint.as_ref(),
            _ => None,
        }
        .ok_or_else(|| Error::MissingCheckpoint(format!("no checkpoint configured for {kind}")))?;
        PolicyParams::load(template.replace("{value}", &format_value(axis_value)))
    }
}

/// Fixed in-memory policies, one per learned controller, for every axis value.
pub struct FixedPolicies(pub Vec<(ControllerKind, PolicyParams)>);

impl PolicySource for FixedPolicies {
    fn policy(&mut self, kind: ControllerKind, _axis_value: f64) -> Result<PolicyParams> {
        self.0
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, p)| p.clone())
            .ok_or_else(|| Error::MissingCheckpoint(format!("no policy supplied for {kind}")))
    }
}

impl<F> PolicySource for F
where
    F: FnMut(ControllerKind, f64) -> Result<PolicyParams>,
{
    fn policy(&mut self, kind: ControllerKind, axis_value: f64) -> Result<PolicyParams> {
        self(kind, axis_value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub axis_value: f64,
    pub controller: ControllerKind,
    pub mean: f64,
    /// Sample standard deviation (zero for a single episode).
    pub std: f64,
    pub success: bool,
    pub completed: usize,
    pub divergent: usize,
    pub relative_costs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub axis: SweepAxis,
    pub n_agents: usize,
    pub episodes_per_cell: usize,
    pub steps_per_episode: usize,
    pub seed: u64,
    /// Total simulated controller-steps, including expert normalization runs.
    pub simulated_steps: u64,
    pub cells: Vec<CellResult>,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn make_controller(
    kind: ControllerKind,
    sim: &SimConfig,
    potential: &PotentialConfig,
    policy: Option<&PolicyParams>,
) -> Box<dyn Controller> {
    match kind {
        ControllerKind::Centralized => Box::new(Centralized {
            potential: *potential,
        }),
        ControllerKind::Local => Box::new(LocalHeuristic {
            potential: *potential,
            comm_radius: sim.comm_radius,
        }),
        ControllerKind::DagnnState | ControllerKind::VgaiVision => {
            Box::new(LearnedController::new(
                policy
                    .expect("learned controllers are resolved before the episode loop")
                    .clone(),
                sim.comm_radius,
            ))
        }
    }
}

/// Runs every (axis value, controller) cell of `spec` on shared initial states.
pub fn run_experiment(spec: &ExperimentSpec, policies: &mut dyn PolicySource) -> Result<Report> {
    spec.validate()?;
    let steps = spec.steps();
    let mut cells = Vec::new();
    let mut simulated_steps = 0u64;
    for &value in &spec.sweep.values {
        let sim = spec.sweep.axis.apply(&spec.sim, value)?;
        let learned: Vec<(ControllerKind, PolicyParams)> = spec
            .sweep
            .controllers
            .iter()
            .filter(|k| k.is_learned())
            .map(|&k| policies.policy(k, value).map(|p| (k, p)))
            .collect::<Result<_>>()?;
        let mut costs: Vec<(Vec<f64>, usize)> = vec![(Vec::new(), 0); spec.sweep.controllers.len()];
        for e in 0..spec.sweep.episodes {
            let initial = init_swarm(
                &sim,
                &mut seeded_rng(spec.sweep.seed, streams::EVAL_EPISODE + e as u64),
            )?;
            let mut expert = Centralized {
                potential: spec.potential,
            };
            let expert_cost = run_episode(&mut expert, &initial, &sim, steps)?.cost();
            simulated_steps += steps as u64;
            for (slot, &kind) in costs.iter_mut().zip(&spec.sweep.controllers) {
                let policy = learned.iter().find(|(k, _)| *k == kind).map(|(_, p)| p);
                let mut ctl = make_controller(kind, &sim, &spec.potential, policy);
                simulated_steps += steps as u64;
                match run_episode(ctl.as_mut(), &initial, &sim, steps) {
                    Ok(r) => slot.0.push(relative_cost(r.cost(), expert_cost)?),
                    Err(Error::NonFinite(_)) => slot.1 += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        for ((rel, divergent), &kind) in costs.into_iter().zip(&spec.sweep.controllers) {
            let (mean, std) = mean_std(&rel);
            cells.push(CellResult {
                axis_value: value,
                controller: kind,
                mean,
                std,
                success: divergent == 0 && mean < FLOCKING_SUCCESS_THRESHOLD,
                completed: rel.len(),
                divergent,
                relative_costs: rel,
            });
        }
    }
    Ok(Report {
        axis: spec.sweep.axis,
        n_agents: spec.sim.n_agents,
        episodes_per_cell: spec.sweep.episodes,
        steps_per_episode: steps,
        seed: spec.sweep.seed,
        simulated_steps,
        cells,
    })
}

/// Evaluates one trained policy on teams of each size in `test_sizes`.
pub fn transfer_eval(
    policy: &PolicyParams,
    kind: ControllerKind,
    sim: &SimConfig,
    potential: &PotentialConfig,
    test_sizes: &[usize],
    episodes: usize,
    seed: u64,
) -> Result<Report> {
    let spec = ExperimentSpec {
        sim: sim.clone(),
        potential: *potential,
        sweep: SweepSettings {
            axis: SweepAxis::NTransfer,
            values: test_sizes.iter().map(|&n| n as f64).collect(),
            controllers: vec![ControllerKind::Centralized, kind],
            episodes,
            seed,
            ..SweepSettings::default()
        },
    };
    run_experiment(&spec, &mut FixedPolicies(vec![(kind, policy.clone())]))
}

impl Report {
    pub fn cell(&self, axis_value: f64, controller: ControllerKind) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.axis_value == axis_value && c.controller == controller)
    }

    /// Human-readable table: one row per controller, one column per axis value.
    pub fn to_table(&self) -> String {
        let mut values: Vec<f64> = Vec::new();
        let mut kinds: Vec<ControllerKind> = Vec::new();
        for c in &self.cells {
            if !values.contains(&c.axis_value) {
                values.push(c.axis_value);
            }
            if !kinds.contains(&c.controller) {
                kinds.push(c.controller);
            }
        }
        let mut out = String::new();
        writeln!(
            out,
            "relative cost, N={}, {} episodes x {} steps, seed {}",
            self.n_agents, self.episodes_per_cell, self.steps_per_episode, self.seed
        )
        .unwrap();
        write!(out, "{:<14}", self.axis.name()).unwrap();
        for v in &values {
            write!(out, "{:>20}", format_value(*v)).unwrap();
        }
        out.push('\n');
        for k in kinds {
            write!(out, "{:<14}", k.name()).unwrap();
            for &v in &values {
                let text = match self.cell(v, k) {
                    Some(c) if c.completed == 0 => format!("diverged x{}", c.divergent),
                    Some(c) => {
                        let mark = if c.divergent > 0 {
                            format!(" !{}", c.divergent)
                        } else {
                            String::new()
                        };
                        format!("{:.2} ± {:.2}{mark}", c.mean, c.std)
                    }
                    None => "-".into(),
                };
                write!(out, "{text:>20}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// One JSON object per cell.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for c in &self.cells {
            let mut value =
                serde_json::to_value(c).map_err(|e| Error::parse("report", e.to_string()))?;
            value["axis"] = serde_json::Value::String(self.axis.name().into());
            value["n_agents"] = self.n_agents.into();
            value["seed"] = self.seed.into();
            out.push_str(&value.to_string());
            out.push('\n');
        }
        Ok(out)
    }

    /// Writes `report.txt` and `report.jsonl` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let txt = dir.join("report.txt");
        std::fs::write(&txt, self.to_table()).map_err(|e| Error::io(&txt, e))?;
        let jsonl = dir.join("report.jsonl");
        std::fs::write(&jsonl, self.to_jsonl()?).map_err(|e| Error::io(&jsonl, e))
    }
}

/// One exported row: agent state at step `t`, the action applied and the expert's action.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub agent: usize,
    pub rx: f64,
    pub ry: f64,
    pub vx: f64,
    pub vy: f64,
    pub ux: f64,
    pub uy: f64,
    pub ux_expert: f64,
    pub uy_expert: f64,
}

/// Column order of exported trajectories.
pub const TRAJECTORY_COLUMNS: [&str; 10] = [
    "t",
    "agent",
    "rx",
    "ry",
    "vx",
    "vy",
    "ux",
    "uy",
    "ux_expert",
    "uy_expert",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for TrajectoryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TrajectoryFormat::Csv),
            "jsonl" => Ok(TrajectoryFormat::Jsonl),
            other => Err(Error::InvalidConfig(format!(
                "unknown trajectory format `{other}`"
            ))),
        }
    }
}

/// Flattens a rollout into `N x steps` records, labeling each visited state with the expert.
pub fn trajectory_records(
    rollout: &Rollout,
    potential: &PotentialConfig,
    accel_limit: f64,
) -> Result<Vec<TrajectoryRecord>> {
    let mut out = Vec::new();
    for (t, (state, applied)) in rollout.states.iter().zip(&rollout.actions).enumerate() {
        let expert = saturate(&centralized_expert(state, potential)?, accel_limit);
        for i in 0..state.n() {
            out.push(TrajectoryRecord {
                t,
                agent: i,
                rx: state.positions[i].x,
                ry: state.positions[i].y,
                vx: state.velocities[i].x,
                vy: state.velocities[i].y,
                ux: applied[i].x,
                uy: applied[i].y,
                ux_expert: expert[i].x,
                uy_expert: expert[i].y,
            });
        }
    }
    Ok(out)
}

/// Writes records with a header line; floats use shortest round-trip notation.
pub fn export_trajectory(
    records: &[TrajectoryRecord],
    path: impl AsRef<Path>,
    format: TrajectoryFormat,
) -> Result<()> {
    let path = path.as_ref();
    let io = |e: std::io::Error| Error::io(path, e);
    match format {
        TrajectoryFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(path)
                .map_err(|e| csv_error(path, e))?;
            w.write_record(TRAJECTORY_COLUMNS)
                .map_err(|e| csv_error(path, e))?;
            for r in records {
                w.serialize(r).map_err(|e| csv_error(path, e))?;
            }
            w.flush().map_err(io)
        }
        TrajectoryFormat::Jsonl => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
            for r in records {
                let line = serde_json::to_string(r)
                    .map_err(|e| Error::parse("trajectory", e.to_string()))?;
                writeln!(f, "{line}").map_err(io)?;
            }
            f.flush().map_err(io)
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::parse("trajectory csv", e.to_string())
    }
}

pub fn import_trajectory(
    path: impl AsRef<Path>,
    format: TrajectoryFormat,
) -> Result<Vec<TrajectoryRecord>> {
    let path = path.as_ref();
    match format {
        TrajectoryFormat::Csv => {
            let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
            let header: Vec<String> = r
                .headers()
                .map_err(|e| csv_error(path, e))?
                .iter()
                .map(String::from)
                .collect();
            if header != TRAJECTORY_COLUMNS {
                return Err(Error::parse(
                    "trajectory csv",
                    format!("unexpected header {header:?}"),
                ));
            }
            r.deserialize()
                .map(|row| row.map_err(|e| csv_error(path, e)))
                .collect()
        }
        TrajectoryFormat::Jsonl => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            text.lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    serde_json::from_str(l)
                        .map_err(|e| Error::parse("trajectory jsonl", e.to_string()))
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec2::Vec2;

    fn spec(axis: SweepAxis, values: Vec<f64>) -> ExperimentSpec {
        ExperimentSpec {
            sim: SimConfig {
                n_agents: 6,
                steps: 30,
                ..SimConfig::default()
            },
            potential: PotentialConfig::default(),
            sweep: SweepSettings {
                axis,
                values,
                episodes: 3,
                ..SweepSettings::default()
            },
        }
    }

    fn no_policies() -> FixedPolicies {
        FixedPolicies(Vec::new())
    }

    #[test]
    fn centralized_normalizes_to_exactly_one() {
        let report = run_experiment(&spec(SweepAxis::R, vec![1.5]), &mut no_policies()).unwrap();
        let c = report.cell(1.5, ControllerKind::Centralized).unwrap();
        assert_eq!(c.mean, 1.0);
        assert_eq!(c.std, 0.0);
        assert!(c.success);
    }

    #[test]
    fn reports_are_reproducible() {
        let s = spec(SweepAxis::VInit, vec![1.0, 2.0]);
        let a = run_experiment(&s, &mut no_policies()).unwrap();
        let b = run_experiment(&s, &mut no_policies()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_jsonl().unwrap(), b.to_jsonl().unwrap());
        assert_eq!(a.cells.len(), 4);
    }

    #[test]
    fn missing_checkpoint_is_reported() {
        let mut s = spec(SweepAxis::R, vec![1.5]);
        s.sweep.controllers.push(ControllerKind::DagnnState);
        s.sweep.dagnn_checkpoint = Some("/nonexistent/dagnn.ckpt".into());
        let err = run_experiment(&s, &mut CheckpointFiles(&s.sweep.clone())).unwrap_err();
        assert!(matches!(err, Error::MissingCheckpoint(_)));
    }

    #[test]
    fn empty_axis_is_rejected() {
        assert!(run_experiment(&spec(SweepAxis::R, vec![]), &mut no_policies()).is_err());
    }

    #[test]
    fn mean_std_matches_hand_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    fn two_agent_rollout(steps: usize) -> Rollout {
        let sim = SimConfig {
            n_agents: 2,
            ..SimConfig::default()
        };
        let initial = crate::swarm::SwarmState::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(0.7, 0.1)],
            vec![Vec2::new(1.0 / 3.0, 0.0), Vec2::new(0.0, -0.2)],
        )
        .unwrap();
        let mut ctl = Centralized {
            potential: PotentialConfig::default(),
        };
        run_episode(&mut ctl, &initial, &sim, steps).unwrap()
    }

    #[test]
    fn export_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let records =
            trajectory_records(&two_agent_rollout(3), &PotentialConfig::default(), 30.0).unwrap();
        assert_eq!(records.len(), 6);
        for format in [TrajectoryFormat::Csv, TrajectoryFormat::Jsonl] {
            let path = dir.path().join(format!("traj.{format:?}"));
            export_trajectory(&records, &path, format).unwrap();
            assert_eq!(import_trajectory(&path, format).unwrap(), records);
        }
    }

    #[test]
    fn empty_episode_exports_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        export_trajectory(&[], &path, TrajectoryFormat::Csv).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.trim_end(), TRAJECTORY_COLUMNS.join(","));
        assert!(import_trajectory(&path, TrajectoryFormat::Csv)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn axis_names_parse_back() {
        for a in [
            SweepAxis::F,
            SweepAxis::K,
            SweepAxis::VInit,
            SweepAxis::R,
            SweepAxis::NTransfer,
        ] {
            assert_eq!(a.name().parse::<SweepAxis>().unwrap(), a);
        }
        for k in ControllerKind::ALL {
            assert_eq!(k.name().parse::<ControllerKind>().unwrap(), k);
        }
    }
}
