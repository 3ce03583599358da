//! Renders every agent's panoramic view of a swarm and writes each as a PGM image.
//! Moving neighbors appear slanted: lower rows are exposed later.
//!
//! ```sh
//! cargo run --release --example render_panorama -- [out_dir]
//! ```

use std::path::PathBuf;

use flocknet::swarm::{init_swarm, seeded_rng, SimConfig};
use flocknet::vision::{render_all, CameraConfig};

fn main() -> anyhow::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "panoramas".into())
        .into();
    std::fs::create_dir_all(&out)?;
    let sim = SimConfig {
        n_agents: 6,
        ..SimConfig::default()
    };
    let state = init_swarm(&sim, &mut seeded_rng(1, 0))?;
    let cam = CameraConfig::default();
    for (i, obs) in render_all(&state, &cam).iter().enumerate() {
        let path = out.join(format!("agent{i}.pgm"));
        obs.write_pgm(&path)?;
        let lit = obs.image.data().iter().filter(|v| **v > 0.0).count();
        println!("{} ({lit} lit pixels)", path.display());
    }
    let top: String = render_all(&state, &cam)[0].image.data()[..cam.width]
        .iter()
        .map(|v| match *v {
            v if v > 0.66 => '#',
            v if v > 0.33 => '+',
            v if v > 0.0 => '.',
            _ => ' ',
        })
        .collect();
    println!("agent 0, top row: [{top}]");
    Ok(())
}
