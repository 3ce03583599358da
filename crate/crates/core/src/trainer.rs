//! Imitation learning of decentralized policies.
//!
//! Training follows dataset aggregation: the first round of episodes is flown by
//! the centralized expert, later rounds are flown by the current learner with
//! probability `learner_probability` (drawn once per episode). Every visited state
//! is labeled with the saturated expert action.
//!
//! The optimizer consumes non-overlapping windows of `K` consecutive steps. For
//! each window the aggregation sequence is rebuilt from zero, so the readout at
//! the window's last step sees exactly the history it would see in deployment,
//! and the loss gradient flows back through every shift operator in the window
//! and, in vision mode, through all `K` applications of the visual estimator.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::controllers::{
    centralized_expert, relative_cost, run_episode, Centralized, PotentialConfig,
};
use crate::error::{Error, Result};
use crate::graph::{build_graph, gso, shift_transpose, AggregationBuffer, GsoMatrix};
use crate::nn::{l1_loss, Adam, AdamConfig, Parameters, Tensor};
use crate::policy::{FeatureCache, LearnedController, PolicyMode, PolicyParams, PolicySpec};
use crate::swarm::{init_swarm, saturate, seeded_rng, step_dynamics, SimConfig, SwarmState};
use crate::vec2::Vec2;

/// Random streams used by training. Evaluation uses its own, disjoint streams.
pub mod streams {
    pub const WEIGHTS: u64 = 1;
    pub const MIXING: u64 = 2;
    pub const SHUFFLE: u64 = 3;
    pub const TRAIN_EPISODE: u64 = 1 << 32;
    pub const VALIDATION_EPISODE: u64 = 2 << 32;
    pub const EVAL_EPISODE: u64 = 3 << 32;
}

/// Optimization and data-collection settings, independent of the swarm and architecture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSchedule {
    /// Dataset aggregation rounds; round 1 is pure expert.
    pub rounds: usize,
    pub episodes_per_round: usize,
    pub epochs_per_round: usize,
    /// Windows per optimizer step.
    pub batch_size: usize,
    /// Chance that a round-2+ episode is flown by the learner.
    pub learner_probability: f64,
    pub learning_rate: f64,
    /// Multiplier applied to the learning rate after every round.
    pub lr_decay: f64,
    pub validation_episodes: usize,
    pub seed: u64,
    /// Optional JSON-lines training log.
    pub log_path: Option<PathBuf>,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        TrainSchedule {
            rounds: 6,
            episodes_per_round: 10,
            epochs_per_round: 30,
            batch_size: 16,
            learner_probability: 0.33,
            learning_rate: 5e-4,
            lr_decay: 1.0,
            validation_episodes: 10,
            seed: 0,
            log_path: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainConfig {
    pub sim: SimConfig,
    pub potential: PotentialConfig,
    pub policy: PolicySpec,
    pub schedule: TrainSchedule,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.potential.validate()?;
        self.policy.validate()?;
        let s = &self.schedule;
        if !(0.0..=1.0).contains(&s.learner_probability) {
            return Err(Error::InvalidConfig(
                "learner_probability must lie in [0, 1]".into(),
            ));
        }
        if s.rounds == 0 || s.episodes_per_round == 0 || s.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "rounds, episodes_per_round and batch_size must be positive".into(),
            ));
        }
        if self.sim.steps < self.policy.k {
            return Err(Error::WindowTooShort {
                needed: self.policy.k,
                got: self.sim.steps,
            });
        }
        if !(s.learning_rate > 0.0) || !(s.lr_decay > 0.0) {
            return Err(Error::InvalidConfig(
                "learning_rate and lr_decay must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One recorded episode: visited states, their shift operators and expert labels.
#[derive(Clone, Debug)]
pub struct Episode {
    pub seed_stream: u64,
    pub learner_driven: bool,
    pub states: Vec<SwarmState>,
    pub shifts: Vec<GsoMatrix>,
    /// Handcrafted `X(t)`; empty in vision mode, where observations are rendered on demand.
    pub features: Vec<Tensor>,
    /// Saturated expert actions at each visited state.
    pub labels: Vec<Vec<Vec2>>,
}

impl Episode {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.states.first().map_or(0, SwarmState::n)
    }
}

/// Everything collected so far, plus per-episode provenance.
#[derive(Clone, Debug, Default)]
pub struct RolloutDataset {
    pub episodes: Vec<Episode>,
}

impl RolloutDataset {
    pub fn steps(&self) -> usize {
        self.episodes.iter().map(Episode::len).sum()
    }

    /// Window end steps: `offset + K - 1, offset + 2K - 1, ...` in every episode.
    pub fn windows(&self, k: usize, offsets: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (e, ep) in self.episodes.iter().enumerate() {
            let offset = offsets.get(e).copied().unwrap_or(0);
            let mut end = offset + k - 1;
            while end < ep.len() {
                out.push((e, end));
                end += k;
            }
        }
        out
    }
}

/// Simulates one episode and labels every visited state with the expert.
///
/// When `learner` is given the learner's saturated actions drive the swarm,
/// otherwise the expert's do.
pub fn collect_rollout(
    learner: Option<&PolicyParams>,
    sim: &SimConfig,
    potential: &PotentialConfig,
    spec: &PolicySpec,
    seed: u64,
    stream: u64,
) -> Result<Episode> {
    let mut rng = seeded_rng(seed, stream);
    let mut state = init_swarm(sim, &mut rng)?;
    let mut controller = learner.map(|p| LearnedController::new(p.clone(), sim.comm_radius));
    if let Some(c) = controller.as_mut() {
        crate::controllers::Controller::reset(c, state.n())?;
    }
    let mut ep = Episode {
        seed_stream: stream,
        learner_driven: learner.is_some(),
        states: Vec::with_capacity(sim.steps),
        shifts: Vec::with_capacity(sim.steps),
        features: Vec::new(),
        labels: Vec::with_capacity(sim.steps),
    };
    for t in 0..sim.steps {
        let graph = build_graph(&state.positions, sim.comm_radius);
        let label = saturate(&centralized_expert(&state, potential)?, sim.accel_limit);
        if spec.mode == PolicyMode::Handcrafted {
            ep.features
                .push(crate::controllers::handcrafted_state(&state, &graph)?);
        }
        let applied = match controller.as_mut() {
            Some(c) => saturate(
                &crate::controllers::Controller::act(c, &state)?,
                sim.accel_limit,
            ),
            None => label.clone(),
        };
        let next = step_dynamics(&state, &applied, sim.dt).map_err(|e| match e {
            Error::NonFinite(what) => {
                Error::NonFinite(format!("{what} (rollout stream {stream}, step {t})"))
            }
            other => other,
        })?;
        ep.shifts.push(gso(&graph, spec.normalization));
        ep.labels.push(label);
        ep.states.push(std::mem::replace(&mut state, next));
    }
    Ok(ep)
}

fn step_features(params: &PolicyParams, ep: &Episode, t: usize) -> Result<(Tensor, FeatureCache)> {
    match params.spec.mode {
        PolicyMode::Handcrafted => Ok((ep.features[t].clone(), FeatureCache::Handcrafted)),
        PolicyMode::Vision => params.vision_features(&ep.states[t]),
    }
}

/// Mean absolute error over the `N x 2` actions at the end of the window ending at `end`.
///
/// When `grads` is given, `d loss / d params` is accumulated into it, scaled by `weight`.
pub fn window_loss(
    params: &PolicyParams,
    ep: &Episode,
    end: usize,
    grads: Option<(&mut PolicyParams, f64)>,
) -> Result<f64> {
    let k = params.k();
    if end + 1 < k || end >= ep.len() {
        return Err(Error::WindowTooShort {
            needed: k,
            got: (end + 1).min(ep.len()),
        });
    }
    let n = ep.n_agents();
    let f = params.features();
    let start = end + 1 - k;
    let mut buffer = AggregationBuffer::new(n, f, k)?;
    let mut caches = Vec::with_capacity(k);
    for t in start..=end {
        let (x, cache) = step_features(params, ep, t)?;
        buffer.update(&ep.shifts[t], &x)?;
        caches.push(cache);
    }
    let mut preds = Vec::with_capacity(2 * n);
    let mut readout_caches = Vec::with_capacity(n);
    for i in 0..n {
        let (u, cache) = params.readout.forward(&buffer.row(i))?;
        preds.extend([u.x, u.y]);
        readout_caches.push(cache);
    }
    let target: Vec<f64> = ep.labels[end].iter().flat_map(|u| [u.x, u.y]).collect();
    let (sum, sign) = l1_loss(&preds, &target)?;
    let count = preds.len() as f64;
    let loss = sum / count;
    if !loss.is_finite() {
        return Err(Error::NonFinite(format!(
            "training loss at window ending {end}"
        )));
    }
    let Some((grads, weight)) = grads else {
        return Ok(loss);
    };

    // Gradient of each aggregation block, N x F per block.
    let scale = weight / count;
    let mut block_grads = vec![Tensor::zeros(&[n, f]); k];
    for (i, cache) in readout_caches.iter().enumerate() {
        let g = Vec2::new(sign[2 * i] * scale, sign[2 * i + 1] * scale);
        let gz = params.readout.backward(cache, g, &mut grads.readout);
        for (kk, block) in block_grads.iter_mut().enumerate() {
            block.row_mut(i).copy_from_slice(&gz[kk * f..(kk + 1) * f]);
        }
    }
    let Some(net) = &params.vision else {
        return Ok(loss);
    };
    let gnet = grads
        .vision
        .as_mut()
        .expect("gradient structure mirrors parameters");
    // Block kk holds S(end) ... S(end - kk + 1) X(end - kk); undo the shifts in reverse.
    for (kk, mut g) in block_grads.into_iter().enumerate() {
        for m in 0..kk {
            g = shift_transpose(&ep.shifts[end - m], &g)?;
        }
        let FeatureCache::Vision(vc) = &caches[k - 1 - kk] else {
            unreachable!("vision mode produces vision caches");
        };
        for (i, cache) in vc.iter().enumerate() {
            net.backward(cache, g.row(i), gnet);
        }
    }
    Ok(loss)
}

/// One optimizer step on a batch of windows; returns the batch's mean loss.
pub fn bptt_update(
    params: &mut PolicyParams,
    optimizer: &mut Adam,
    data: &RolloutDataset,
    batch: &[(usize, usize)],
) -> Result<f64> {
    if batch.is_empty() {
        return Ok(0.0);
    }
    let weight = 1.0 / batch.len() as f64;
    let mut grads = params.zeroed();
    let mut total = 0.0;
    for &(e, end) in batch {
        total += window_loss(params, &data.episodes[e], end, Some((&mut grads, weight)))?;
    }
    optimizer.step(params, &grads);
    if !params.is_finite() {
        return Err(Error::NonFinite("policy parameters after update".into()));
    }
    Ok(total * weight)
}

/// Sets the readout's fixed input and output scales from round-one data.
pub fn fit_scales(params: &mut PolicyParams, data: &RolloutDataset) -> Result<()> {
    let mut sq = 0.0;
    let mut count = 0usize;
    for ep in &data.episodes {
        for u in ep.labels.iter().flatten() {
            sq += u.norm_sq();
            count += 2;
        }
    }
    params.readout.output_scale = if count > 0 {
        (sq / count as f64).sqrt().max(1e-3)
    } else {
        1.0
    };

    if params.spec.mode != PolicyMode::Handcrafted {
        return Ok(());
    }
    let k = params.k();
    let kf = k * params.features();
    let mut sum = vec![0.0; kf];
    let mut sum_sq = vec![0.0; kf];
    let mut rows = 0usize;
    for ep in &data.episodes {
        let mut buffer = AggregationBuffer::new(ep.n_agents(), params.features(), k)?;
        for t in 0..ep.len() {
            buffer.update(&ep.shifts[t], &ep.features[t])?;
            if t + 1 < k {
                continue;
            }
            let z = buffer.z();
            for i in 0..z.rows() {
                for (c, v) in z.row(i).iter().enumerate() {
                    sum[c] += v;
                    sum_sq[c] += v * v;
                }
                rows += 1;
            }
        }
    }
    if rows == 0 {
        return Ok(());
    }
    params.readout.input_scale = sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, q)| {
            let mean = s / rows as f64;
            let std = (q / rows as f64 - mean * mean).max(0.0).sqrt();
            if std > 1e-8 {
                1.0 / std
            } else {
                1.0
            }
        })
        .collect();
    Ok(())
}

/// Mean relative cost of `params` against the expert over episodes from `stream_base`.
///
/// A diverging episode counts as an infinite relative cost.
pub fn validation_cost(
    params: &PolicyParams,
    sim: &SimConfig,
    potential: &PotentialConfig,
    seed: u64,
    stream_base: u64,
    episodes: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for e in 0..episodes {
        let initial = init_swarm(sim, &mut seeded_rng(seed, stream_base + e as u64))?;
        let mut expert = Centralized {
            potential: *potential,
        };
        let expert_cost = run_episode(&mut expert, &initial, sim, sim.steps)?.cost();
        let mut learner = LearnedController::new(params.clone(), sim.comm_radius);
        match run_episode(&mut learner, &initial, sim, sim.steps) {
            Ok(r) => total += relative_cost(r.cost(), expert_cost)?,
            Err(Error::NonFinite(_)) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(total / episodes.max(1) as f64)
}

/// One line of the training log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    /// 1-based.
    pub round: usize,
    /// 1-based within the round.
    pub epoch: usize,
    pub loss: f64,
    pub validation_relative_cost: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters with the best validation relative cost seen after any round.
    pub params: PolicyParams,
    pub best_validation: f64,
    /// 1-based round that produced `params`.
    pub best_round: usize,
    pub log: Vec<LogRecord>,
    pub dataset_steps: usize,
}

impl TrainOutcome {
    /// Mean loss of the first epoch of the first round.
    pub fn first_epoch_loss(&self) -> Option<f64> {
        self.log.first().map(|r| r.loss)
    }

    pub fn final_epoch_loss(&self) -> Option<f64> {
        self.log.last().map(|r| r.loss)
    }
}

fn append_log(path: Option<&Path>, record: &LogRecord) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let line =
        serde_json::to_string(record).map_err(|e| Error::parse("log record", e.to_string()))?;
    std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .and_then(|mut f| writeln!(f, "{line}"))
        .map_err(|e| Error::io(path, e))
}

/// Full training run: dataset aggregation rounds, shuffled window epochs, validation.
pub fn train(config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let schedule = &config.schedule;
    if let Some(path) = &schedule.log_path {
        std::fs::write(path, "").map_err(|e| Error::io(path, e))?;
    }
    let mut params = PolicyParams::new(
        &mut seeded_rng(schedule.seed, streams::WEIGHTS),
        config.policy.clone(),
    )?;
    let mut optimizer = Adam::new(AdamConfig {
        lr: schedule.learning_rate,
        ..AdamConfig::default()
    });
    let mut mix_rng = seeded_rng(schedule.seed, streams::MIXING);
    let mut shuffle_rng = seeded_rng(schedule.seed, streams::SHUFFLE);
    let mut data = RolloutDataset::default();
    let mut log = Vec::new();
    let mut best: Option<(f64, usize, PolicyParams)> = None;
    let k = params.k();

    for round in 0..schedule.rounds {
        optimizer.config.lr = schedule.learning_rate * schedule.lr_decay.powi(round as i32);
        for e in 0..schedule.episodes_per_round {
            let stream = streams::TRAIN_EPISODE + (round * schedule.episodes_per_round + e) as u64;
            let use_learner = round > 0 && mix_rng.gen_bool(schedule.learner_probability);
            let learner = use_learner.then_some(&params);
            let ep = match collect_rollout(
                learner,
                &config.sim,
                &config.potential,
                &config.policy,
                schedule.seed,
                stream,
            ) {
                Ok(ep) => ep,
                // A learner that crashes the swarm still deserves expert labels on this seed.
                Err(Error::NonFinite(_)) if use_learner => collect_rollout(
                    None,
                    &config.sim,
                    &config.potential,
                    &config.policy,
                    schedule.seed,
                    stream,
                )?,
                Err(e) => return Err(e),
            };
            data.episodes.push(ep);
        }
        if round == 0 {
            fit_scales(&mut params, &data)?;
        }
        for epoch in 0..schedule.epochs_per_round {
            let offsets: Vec<usize> = (0..data.episodes.len())
                .map(|_| shuffle_rng.gen_range(0..k))
                .collect();
            let mut windows = data.windows(k, &offsets);
            windows.shuffle(&mut shuffle_rng);
            let mut total = 0.0;
            for batch in windows.chunks(schedule.batch_size) {
                total +=
                    bptt_update(&mut params, &mut optimizer, &data, batch)? * batch.len() as f64;
            }
            let loss = total / windows.len().max(1) as f64;
            let last_epoch = epoch + 1 == schedule.epochs_per_round;
            let validation = if last_epoch && schedule.validation_episodes > 0 {
                Some(validation_cost(
                    &params,
                    &config.sim,
                    &config.potential,
                    schedule.seed,
                    streams::VALIDATION_EPISODE,
                    schedule.validation_episodes,
                )?)
            } else {
                None
            };
            let record = LogRecord {
                round: round + 1,
                epoch: epoch + 1,
                loss,
                validation_relative_cost: validation,
            };
            append_log(schedule.log_path.as_deref(), &record)?;
            log.push(record);
            if let Some(v) = validation {
                if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                    best = Some((v, round + 1, params.clone()));
                }
            }
        }
    }
    let (best_validation, best_round, params) = best.unwrap_or((f64::NAN, schedule.rounds, params));
    Ok(TrainOutcome {
        params,
        best_validation,
        best_round,
        log,
        dataset_steps: data.steps(),
    })
}
