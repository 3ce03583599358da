//! Compares the hand-written backward passes against central finite differences,
//! from a single layer up to the full vision policy unrolled over an aggregation window.
//!
//! ```sh
//! cargo run --release --example gradient_check
//! ```

use flocknet::controllers::PotentialConfig;
use flocknet::nn::{gradient_check, gradient_check_steps, Conv2d, Parameters, Tensor};
use flocknet::policy::{PolicyMode, PolicyParams, PolicySpec};
use flocknet::swarm::{seeded_rng, SimConfig};
use flocknet::trainer::{collect_rollout, window_loss};
use flocknet::vision::CameraConfig;
use rand::Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = seeded_rng(0, 0);

    let conv = Conv2d::new(&mut rng, 1, 4, (3, 3), (1, 2), (1, 1));
    let x = Tensor::from_vec(&[1, 8, 16], (0..128).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    let probe: Vec<f64> = (0..4 * 8 * 8).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let objective = |c: &Conv2d| -> f64 {
        let y = c.forward(&x).unwrap();
        y.data().iter().zip(&probe).map(|(a, b)| a * b).sum()
    };
    let mut grads = conv.zeroed();
    conv.backward(&x, &Tensor::from_vec(&[4, 8, 8], probe.clone())?, &mut grads);
    let mut c = conv.clone();
    let report = gradient_check(
        |p| {
            c.set_flat(p);
            objective(&c)
        },
        &conv.flatten(),
        &grads.flatten(),
        1e-6,
    );
    println!("strided conv: {} coordinates, max relative error {:.2e}", report.checked, report.max_rel_error);

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
    let episode = collect_rollout(None, &sim, &PotentialConfig::default(), &spec, 0, 0)?;
    let mut params = PolicyParams::new(&mut rng, spec)?;
    for t in params.params_mut() {
        t.data_mut().iter_mut().for_each(|v| *v += rng.gen_range(-0.05..0.05));
    }
    let mut grads = params.zeroed();
    let loss = window_loss(&params, &episode, 1, Some((&mut grads, 1.0)))?;
    let mut probe = params.clone();
    let theta = params.flatten();
    // ReLU kinks sit close to some coordinates, so try smaller and one-sided steps too.
    let report = gradient_check_steps(
        |p| {
            probe.set_flat(p);
            window_loss(&probe, &episode, 1, None).unwrap()
        },
        &theta,
        &grads.flatten(),
        &[1e-5, 1e-6, 1e-7],
        0..theta.len(),
    );
    println!(
        "vision policy window (loss {loss:.4}): {} coordinates, max relative error {:.2e}",
        report.checked, report.max_rel_error
    );
    Ok(())
}
