//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and a summary.
//!
//! Run alone with `cargo test --release --test acceptance`.

mod common;

use std::time::Instant;

use flocknet::controllers::{
    run_episode, velocity_variance, Centralized, Controller, PotentialConfig,
};
use flocknet::eval::{
    run_experiment, transfer_eval, ControllerKind, ExperimentSpec, FixedPolicies,
    Report, SweepAxis, SweepSettings,
};
use flocknet::graph::message_passing::MessagePassingNetwork;
use flocknet::graph::{gso, AggregationBuffer, GsoMatrix, Normalization};
use flocknet::nn::{
    gradient_check, gradient_check_steps, l1_loss, relu, relu_backward, vertical_avgpool, vertical_avgpool_backward,
    Conv2d, Dense, Parameters, ResidualBlock, Tensor,
};
use flocknet::policy::{LearnedController, PolicyMode, PolicyParams, PolicySpec, Readout};
use flocknet::swarm::{init_swarm, seeded_rng, SimConfig, SwarmState};
use flocknet::trainer::{collect_rollout, train, window_loss, TrainConfig, TrainSchedule};
use flocknet::vision::{CameraConfig, VisionConfig, VisionNet};
use rand::Rng;

use common::{random_graph, random_matrix, random_permutation, random_state};

const EVAL_EPISODES: usize = 10;
const EVAL_SEED: u64 = 0;
const GRAD_TOLERANCE: f64 = 1e-4;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

type Check = anyhow::Result<Verdict>;

fn state_schedule() -> TrainSchedule {
    TrainSchedule {
        rounds: 10,
        episodes_per_round: 10,
        epochs_per_round: 40,
        batch_size: 16,
        learning_rate: 5e-4,
        validation_episodes: 10,
        seed: 0,
        ..TrainSchedule::default()
    }
}

fn state_config(n: usize, k: usize) -> TrainConfig {
    TrainConfig {
        sim: SimConfig {
            n_agents: n,
            ..SimConfig::default()
        },
        policy: PolicySpec {
            k,
            normalization: Normalization::Adjacency,
            ..PolicySpec::default()
        },
        schedule: state_schedule(),
        ..TrainConfig::default()
    }
}

fn vision_config() -> TrainConfig {
    TrainConfig {
        sim: SimConfig {
            n_agents: 6,
            ..SimConfig::default()
        },
        policy: PolicySpec {
            mode: PolicyMode::Vision,
            k: 3,
            features: 12,
            normalization: Normalization::Adjacency,
            camera: CameraConfig {
                height: 8,
                width: 64,
                ..CameraConfig::default()
            },
            ..PolicySpec::default()
        },
        schedule: TrainSchedule {
            rounds: 4,
            episodes_per_round: 6,
            epochs_per_round: 4,
            batch_size: 16,
            learning_rate: 1e-3,
            validation_episodes: 10,
            seed: 0,
            ..TrainSchedule::default()
        },
        ..TrainConfig::default()
    }
}

fn compare(sim: &SimConfig, kinds: &[ControllerKind], policies: Vec<(ControllerKind, PolicyParams)>) -> anyhow::Result<Report> {
    let spec = ExperimentSpec {
        sim: sim.clone(),
        potential: PotentialConfig::default(),
        sweep: SweepSettings {
            axis: SweepAxis::R,
            values: vec![sim.comm_radius],
            controllers: kinds.to_vec(),
            episodes: EVAL_EPISODES,
            seed: EVAL_SEED,
            ..SweepSettings::default()
        },
    };
    Ok(run_experiment(&spec, &mut FixedPolicies(policies))?)
}

fn cell_mean(report: &Report, kind: ControllerKind) -> (f64, f64) {
    let c = report
        .cells
        .iter()
        .find(|c| c.controller == kind)
        .expect("controller was evaluated");
    (c.mean, c.std)
}

// ---------------------------------------------------------------- gradients

fn random_tensor<R: Rng>(rng: &mut R, shape: &[usize]) -> Tensor {
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn jitter<P: Parameters, R: Rng>(p: &mut P, rng: &mut R) {
    for t in p.params_mut() {
        t.data_mut().iter_mut().for_each(|v| *v += rng.gen_range(-0.05..0.05));
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks input and parameter gradients of `layer` under the objective `<probe, forward(x)>`.
fn layer_check<P, F, B>(layer: &P, x: &Tensor, forward: F, backward: B) -> f64
where
    P: Parameters,
    F: Fn(&P, &Tensor) -> Tensor,
    B: Fn(&P, &Tensor, &Tensor, &mut P) -> Tensor,
{
    let mut rng = seeded_rng(99, 0);
    let out = forward(layer, x);
    let probe = random_tensor(&mut rng, out.shape());
    let mut grads = layer.zeroed();
    let gx = backward(layer, x, &probe, &mut grads);
    let wrt_x = gradient_check(
        |v| dot(forward(layer, &Tensor::from_vec(x.shape(), v.to_vec()).unwrap()).data(), probe.data()),
        x.data(),
        gx.data(),
        1e-6,
    );
    let mut probe_layer = layer.clone();
    let wrt_p = gradient_check(
        |p| {
            probe_layer.set_flat(p);
            dot(forward(&probe_layer, x).data(), probe.data())
        },
        &layer.flatten(),
        &grads.flatten(),
        1e-6,
    );
    wrt_x.max_rel_error.max(wrt_p.max_rel_error)
}

fn gradient_correctness() -> Check {
    let mut rng = seeded_rng(2024, 0);
    let mut worst: Vec<(&str, f64)> = Vec::new();

    let dense = {
        let mut d = Dense::new(&mut rng, 7, 5);
        jitter(&mut d, &mut rng);
        d
    };
    let x = random_tensor(&mut rng, &[7]);
    worst.push((
        "dense",
        layer_check(
            &dense,
            &x,
            |d, x| Tensor::from_vec(&[5], d.forward(x.data()).unwrap()).unwrap(),
            |d, x, g, gr| Tensor::from_vec(&[7], d.backward(x.data(), g.data(), gr)).unwrap(),
        ),
    ));

    for stride in [(1, 1), (1, 2)] {
        let mut conv = Conv2d::new(&mut rng, 2, 3, (3, 3), stride, (1, 1));
        jitter(&mut conv, &mut rng);
        let x = random_tensor(&mut rng, &[2, 8, 16]);
        worst.push((
            "conv",
            layer_check(&conv, &x, |c, x| c.forward(x).unwrap(), |c, x, g, gr| c.backward(x, g, gr)),
        ));
    }

    for (cin, cout, stride) in [(4, 4, (1, 1)), (4, 8, (1, 2))] {
        let mut block = ResidualBlock::new(&mut rng, cin, cout, stride);
        jitter(&mut block, &mut rng);
        let x = random_tensor(&mut rng, &[cin, 8, 16]);
        worst.push((
            "residual",
            layer_check(
                &block,
                &x,
                |b, x| b.forward(x).unwrap().0,
                |b, x, g, gr| {
                    let (_, cache) = b.forward(x).unwrap();
                    b.backward(&cache, g, gr)
                },
            ),
        ));
    }

    let x = random_tensor(&mut rng, &[3, 8, 16]);
    let probe = random_tensor(&mut rng, &[3, 1, 16]);
    let g = vertical_avgpool_backward(&probe, 8);
    let pool = gradient_check(
        |v| dot(vertical_avgpool(&Tensor::from_vec(&[3, 8, 16], v.to_vec()).unwrap()).unwrap().data(), probe.data()),
        x.data(),
        g.data(),
        1e-6,
    );
    worst.push(("avgpool", pool.max_rel_error));

    let x: Vec<f64> = (0..20).map(|_| rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let probe: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let relu_report = gradient_check(|v| dot(&relu(v), &probe), &x, &relu_backward(&x, &probe), 1e-6);
    worst.push(("relu", relu_report.max_rel_error));

    let target: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let pred: Vec<f64> = target.iter().map(|t| t + rng.gen_range(0.1..0.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let (_, g) = l1_loss(&pred, &target)?;
    let l1 = gradient_check(|v| l1_loss(v, &target).unwrap().0, &pred, &g, 1e-6);
    worst.push(("l1", l1.max_rel_error));

    let mut readout = Readout::new(&mut rng, 12, &[16, 16]);
    jitter(&mut readout, &mut rng);
    let z = random_tensor(&mut rng, &[12]);
    worst.push((
        "readout",
        layer_check(
            &readout,
            &z,
            |r, z| {
                let (a, _) = r.forward(z.data()).unwrap();
                Tensor::from_vec(&[2], vec![a.x, a.y]).unwrap()
            },
            |r, z, g, gr| {
                let (_, cache) = r.forward(z.data()).unwrap();
                let ga = flocknet::Vec2::new(g.data()[0], g.data()[1]);
                Tensor::from_vec(&[12], r.backward(&cache, ga, gr)).unwrap()
            },
        ),
    ));

    let mut cnn = VisionNet::new(&mut rng, [1, 8, 16], &VisionConfig::default(), 6)?;
    jitter(&mut cnn, &mut rng);
    let img = Tensor::from_vec(&[1, 8, 16], (0..128).map(|_| rng.gen_range(0.0..1.0)).collect())?;
    worst.push((
        "cnn",
        layer_check(
            &cnn,
            &img,
            |c, x| Tensor::from_vec(&[6], c.forward(x).unwrap().0).unwrap(),
            |c, x, g, gr| {
                let (_, cache) = c.forward(x).unwrap();
                c.backward(&cache, g.data(), gr)
            },
        ),
    ));

    let spec = PolicySpec {
        mode: PolicyMode::Vision,
        k: 2,
        features: 6,
        hidden: vec![16],
        camera: CameraConfig {
            width: 16,
            height: 8,
            ..CameraConfig::default()
        },
        ..PolicySpec::default()
    };
    let sim = SimConfig {
        n_agents: 3,
        steps: 2,
        comm_radius: 3.0,
        ..SimConfig::default()
    };
    let mut vgai = 0.0f64;
    let mut checked = 0;
    let mut planted = f64::INFINITY;
    for seed in 0..3 {
        let ep = collect_rollout(None, &sim, &PotentialConfig::default(), &spec, seed, 0)?;
        let mut params = PolicyParams::new(&mut seeded_rng(seed, 1), spec.clone())?;
        jitter(&mut params, &mut rng);
        let mut grads = params.zeroed();
        window_loss(&params, &ep, 1, Some((&mut grads, 1.0)))?;
        let mut probe = params.clone();
        let theta = params.flatten();
        let report = gradient_check_steps(
            |p| {
                probe.set_flat(p);
                window_loss(&probe, &ep, 1, None).unwrap()
            },
            &theta,
            &grads.flatten(),
            &[1e-5, 1e-6, 1e-7],
            0..theta.len(),
        );
        vgai = vgai.max(report.max_rel_error);
        checked += report.checked;

        // The same check must catch a 1% error in the largest gradient entries.
        let mut wrong = grads.flatten();
        let mut order: Vec<usize> = (0..wrong.len()).collect();
        order.sort_by(|&a, &b| wrong[b].abs().total_cmp(&wrong[a].abs()));
        order.truncate(20);
        order.iter().for_each(|&i| wrong[i] *= 1.01);
        let caught = gradient_check_steps(
            |p| {
                probe.set_flat(p);
                window_loss(&probe, &ep, 1, None).unwrap()
            },
            &theta,
            &wrong,
            &[1e-5, 1e-6, 1e-7],
            order.iter().copied(),
        );
        planted = planted.min(caught.max_rel_error);
    }
    worst.push(("vgai-window", vgai));

    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    let detail = worst
        .iter()
        .map(|(n, e)| format!("{n} {e:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(verdict(
        max < GRAD_TOLERANCE && planted > GRAD_TOLERANCE,
        format!(
            "max rel error {max:.1e} ({detail}); vgai window over {checked} coordinates \
             at steps 1e-5/1e-6/1e-7; planted 1% error flagged at {planted:.1e}"
        ),
    ))
}

// ---------------------------------------------------------------- aggregation

/// `Z(t)` straight from the definition: block `k` is `S(t)...S(t-k+1) X(t-k)`, zero before time 0.
fn dense_oracle(shifts: &[GsoMatrix], xs: &[Tensor], k: usize) -> Vec<Vec<f64>> {
    let t = xs.len() - 1;
    let n = xs[0].rows();
    let f = xs[0].cols();
    let mut rows = vec![Vec::with_capacity(k * f); n];
    for block in 0..k {
        let mut m = if block <= t { xs[t - block].clone() } else { Tensor::zeros(&[n, f]) };
        for j in (0..block).rev() {
            if block > t {
                break;
            }
            let s = shifts[t - j].dense();
            let mut next = Tensor::zeros(&[n, f]);
            for a in 0..n {
                for b in 0..n {
                    let w = s.at2(a, b);
                    for c in 0..f {
                        next.set2(a, c, next.at2(a, c) + w * m.at2(b, c));
                    }
                }
            }
            m = next;
        }
        for (a, row) in rows.iter_mut().enumerate() {
            row.extend_from_slice(m.row(a));
        }
    }
    rows
}

fn decentralization_equivalence() -> Check {
    let mut rng = seeded_rng(7, 0);
    let norms = [Normalization::Adjacency, Normalization::Degree, Normalization::Symmetric];
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=10);
        let k = rng.gen_range(1..=4);
        let f = rng.gen_range(1..=4);
        let norm = norms[rng.gen_range(0..3)];
        let steps = rng.gen_range(1..=6);
        let mut buffer = AggregationBuffer::new(n, f, k)?;
        let mut network = MessagePassingNetwork::new(n, f, k)?;
        let (mut shifts, mut xs) = (Vec::new(), Vec::new());
        for _ in 0..steps {
            let p = rng.gen_range(0.1..0.9);
            let s = gso(&random_graph(&mut rng, n, p), norm);
            let x = random_matrix(&mut rng, n, f);
            buffer.update(&s, &x)?;
            network.step(&s, &x)?;
            shifts.push(s);
            xs.push(x);
        }
        let oracle = dense_oracle(&shifts, &xs, k);
        for (i, row) in oracle.iter().enumerate() {
            for (a, b) in row.iter().zip(network.node(i).z()) {
                worst = worst.max((a - b).abs());
            }
            for (a, b) in row.iter().zip(buffer.row(i)) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(verdict(worst < 1e-12, format!("200 instances, max |dz| {worst:.1e}")))
}

fn permutation_equivariance() -> Check {
    let mut rng = seeded_rng(11, 0);
    let handcrafted = PolicyParams::new(&mut rng, PolicySpec { k: 3, ..PolicySpec::default() })?;
    let vision = PolicyParams::new(
        &mut rng,
        PolicySpec {
            mode: PolicyMode::Vision,
            k: 2,
            features: 6,
            camera: CameraConfig { width: 32, height: 4, ..CameraConfig::default() },
            ..PolicySpec::default()
        },
    )?;
    let (mut z_err, mut u_err) = (0.0f64, 0.0f64);
    for trial in 0..50 {
        let n = rng.gen_range(2..=10);
        let perm = random_permutation(&mut rng, n);
        let params = if trial % 5 == 4 { &vision } else { &handcrafted };
        let mut a = LearnedController::new(params.clone(), 1.5);
        let mut b = LearnedController::new(params.clone(), 1.5);
        for _ in 0..3 {
            let state: SwarmState = random_state(&mut rng, n, 2.5, 2.0);
            let ua = a.act(&state)?;
            let ub = b.act(&state.permuted(&perm))?;
            let za = a.aggregation().unwrap().z().permute_rows(&perm);
            z_err = z_err.max(za.max_abs_diff(&b.aggregation().unwrap().z()));
            for (k, &p) in perm.iter().enumerate() {
                u_err = u_err.max((ua[p] - ub[k]).norm());
            }
        }
    }
    Ok(verdict(
        z_err < 1e-12 && u_err < 1e-12,
        format!("50 permutations, max |dZ| {z_err:.1e}, max |du| {u_err:.1e}"),
    ))
}

// ---------------------------------------------------------------- control

fn expert_sanity() -> Check {
    let sim = SimConfig {
        n_agents: 10,
        v_init: 3.0,
        comm_radius: 1.5,
        steps: 500,
        ..SimConfig::default()
    };
    let (mut worst_ratio, mut closest) = (0.0f64, f64::INFINITY);
    for e in 0..EVAL_EPISODES as u64 {
        let initial = init_swarm(&sim, &mut seeded_rng(EVAL_SEED, flocknet::trainer::streams::EVAL_EPISODE + e))?;
        let mut expert = Centralized { potential: PotentialConfig::default() };
        let rollout = run_episode(&mut expert, &initial, &sim, sim.steps)?;
        let ratio = velocity_variance(rollout.states.last().unwrap()) / velocity_variance(&initial);
        worst_ratio = worst_ratio.max(ratio);
        closest = rollout.states.iter().map(SwarmState::min_pair_distance).fold(closest, f64::min);
    }
    Ok(verdict(
        worst_ratio < 0.01 && closest >= 0.05,
        format!("worst final/initial variance {worst_ratio:.2e}, closest pair {closest:.3} m over {EVAL_EPISODES} episodes"),
    ))
}

struct Trained {
    by_k: Vec<(usize, PolicyParams, Report)>,
}

fn train_depths() -> anyhow::Result<Trained> {
    let mut by_k = Vec::new();
    for k in 2..=4 {
        let cfg = state_config(10, k);
        let outcome = train(&cfg)?;
        let report = compare(
            &cfg.sim,
            &[ControllerKind::Centralized, ControllerKind::Local, ControllerKind::DagnnState],
            vec![(ControllerKind::DagnnState, outcome.params.clone())],
        )?;
        by_k.push((k, outcome.params, report));
    }
    Ok(Trained { by_k })
}

fn controller_ordering(trained: &Trained) -> Check {
    let (_, _, report) = trained.by_k.iter().find(|(k, _, _)| *k == 4).unwrap();
    let central = report.cells.iter().find(|c| c.controller == ControllerKind::Centralized).unwrap();
    let exact = central.relative_costs.iter().all(|&r| r == 1.0) && central.mean == 1.0;
    let (local, ls) = cell_mean(report, ControllerKind::Local);
    let (dagnn, ds) = cell_mean(report, ControllerKind::DagnnState);
    Ok(verdict(
        exact && dagnn < local && dagnn < 3.0,
        format!("centralized {:.2}, local {local:.2} ± {ls:.2}, dagnn K=4 {dagnn:.2} ± {ds:.2}", central.mean),
    ))
}

fn depth_trend(trained: &Trained) -> Check {
    let stats: Vec<(usize, f64, f64)> = trained
        .by_k
        .iter()
        .map(|(k, _, r)| {
            let (m, s) = cell_mean(r, ControllerKind::DagnnState);
            (*k, m, s)
        })
        .collect();
    let ok = stats.windows(2).all(|w| {
        let pooled = ((w[0].2.powi(2) + w[1].2.powi(2)) / 2.0).sqrt();
        w[1].1 <= w[0].1 + pooled
    });
    let detail = stats
        .iter()
        .map(|(k, m, s)| format!("K={k} {m:.2} ± {s:.2}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(verdict(ok, detail))
}

fn radius_trend() -> Check {
    let spec = ExperimentSpec {
        sim: SimConfig { n_agents: 10, ..SimConfig::default() },
        potential: PotentialConfig::default(),
        sweep: SweepSettings {
            axis: SweepAxis::R,
            values: vec![1.0, 1.5, 2.0],
            controllers: vec![ControllerKind::Local],
            episodes: EVAL_EPISODES,
            seed: EVAL_SEED,
            ..SweepSettings::default()
        },
    };
    let report = run_experiment(&spec, &mut FixedPolicies(vec![]))?;
    let means: Vec<f64> = report.cells.iter().map(|c| c.mean).collect();
    let diverged: usize = report.cells.iter().map(|c| c.divergent).sum();
    Ok(verdict(
        diverged == 0 && means.windows(2).all(|w| w[1] < w[0]),
        format!(
            "local at R=1.0/1.5/2.0: {}",
            means.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>().join(" / ")
        ),
    ))
}

fn transfer() -> Check {
    let cfg = state_config(20, 4);
    let outcome = train(&cfg)?;
    let report = transfer_eval(
        &outcome.params,
        ControllerKind::DagnnState,
        &cfg.sim,
        &PotentialConfig::default(),
        &[20, 30],
        EVAL_EPISODES,
        EVAL_SEED,
    )?;
    let at = |n: f64| report.cell(n, ControllerKind::DagnnState).unwrap();
    let (small, large) = (at(20.0), at(30.0));
    let degradation = large.mean / small.mean - 1.0;
    Ok(verdict(
        large.divergent == 0 && large.mean < 3.0 && degradation <= 0.6,
        format!(
            "N=20 {:.2} ± {:.2}, N'=30 {:.2} ± {:.2}, degradation {:.0}%",
            small.mean,
            small.std,
            large.mean,
            large.std,
            100.0 * degradation
        ),
    ))
}

fn vision_end_to_end() -> Check {
    let cfg = vision_config();
    let outcome = train(&cfg)?;
    let first = outcome.first_epoch_loss().unwrap();
    let last = outcome.final_epoch_loss().unwrap();
    let report = compare(
        &cfg.sim,
        &[ControllerKind::Local, ControllerKind::VgaiVision],
        vec![(ControllerKind::VgaiVision, outcome.params)],
    )?;
    let (local, ls) = cell_mean(&report, ControllerKind::Local);
    let (vgai, vs) = cell_mean(&report, ControllerKind::VgaiVision);
    Ok(verdict(
        last < 0.5 * first && vgai < local,
        format!(
            "loss {first:.3} -> {last:.3} ({:.0}%), vgai {vgai:.2} ± {vs:.2} vs local {local:.2} ± {ls:.2}",
            100.0 * last / first
        ),
    ))
}

fn determinism(trained: &Trained) -> Check {
    let (_, params, first) = trained.by_k.iter().find(|(k, _, _)| *k == 4).unwrap();
    let sim = SimConfig { n_agents: 10, ..SimConfig::default() };
    let again = compare(
        &sim,
        &[ControllerKind::Centralized, ControllerKind::Local, ControllerKind::DagnnState],
        vec![(ControllerKind::DagnnState, params.clone())],
    )?;
    let same_report = again == *first && again.to_jsonl()? == first.to_jsonl()?;

    let mut short = state_config(8, 3);
    short.schedule = TrainSchedule { rounds: 2, episodes_per_round: 3, epochs_per_round: 3, ..short.schedule };
    let mut vision = vision_config();
    vision.sim.steps = 30;
    vision.schedule = TrainSchedule { rounds: 2, episodes_per_round: 2, epochs_per_round: 1, validation_episodes: 2, ..vision.schedule };
    let mut same_training = true;
    for cfg in [short, vision] {
        let a = train(&cfg)?;
        let b = train(&cfg)?;
        same_training &= a.params.to_checkpoint()?.to_text() == b.params.to_checkpoint()?.to_text()
            && a.log == b.log;
    }
    Ok(verdict(
        same_report && same_training,
        format!("report rerun identical: {same_report}, state and vision training reruns identical: {same_training}"),
    ))
}

fn run(id: usize, name: &str, results: &mut Vec<bool>, check: impl FnOnce() -> Check) {
    let start = Instant::now();
    let (pass, detail) = match check() {
        Ok(v) => (v.pass, v.detail),
        Err(e) => (false, format!("error: {e:#}")),
    };
    println!(
        "{} {id:>2} {name}: {detail} [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    results.push(pass);
}

fn main() {
    let mut results = Vec::new();
    run(1, "gradient correctness", &mut results, gradient_correctness);
    run(2, "decentralization equivalence", &mut results, decentralization_equivalence);
    run(3, "permutation equivariance", &mut results, permutation_equivariance);
    run(4, "expert sanity", &mut results, expert_sanity);
    let start = Instant::now();
    let trained = train_depths();
    println!("     trained K=2,3,4 at N=10 [{:.1}s]", start.elapsed().as_secs_f64());
    match &trained {
        Ok(t) => {
            run(5, "controller ordering", &mut results, || controller_ordering(t));
            run(6, "exchange-depth trend", &mut results, || depth_trend(t));
        }
        Err(e) => {
            for (id, name) in [(5, "controller ordering"), (6, "exchange-depth trend")] {
                run(id, name, &mut results, || Err(anyhow::anyhow!("training failed: {e:#}")));
            }
        }
    }
    run(7, "radius trend", &mut results, radius_trend);
    run(8, "team-size transfer", &mut results, transfer);
    run(9, "vision end to end", &mut results, vision_end_to_end);
    match &trained {
        Ok(t) => run(10, "determinism", &mut results, || determinism(t)),
        Err(_) => run(10, "determinism", &mut results, || Err(anyhow::anyhow!("no trained policy"))),
    }
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
}
