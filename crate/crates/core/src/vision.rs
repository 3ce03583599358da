//! Synthetic panoramic camera and the convolutional visual state estimator.
//!
//! Each agent carries a 360° single-channel inverse-depth camera. Every other
//! agent within `max_distance` shows up as a vertical bar at its bearing, with
//! intensity `1 - d / max_distance`; overlapping bars keep the brighter (nearer)
//! value per pixel.
//!
//! Rows are exposed at staggered times: row `y` shows the scene as it was
//! `row_time_span * y / (height - 1)` seconds ago, linearly extrapolated from the
//! current relative velocity. A neighbor moving relative to the camera therefore
//! draws a slanted or fading bar, which is how relative velocity becomes visible
//! in a single frame. With `row_time_span = 0` every row is identical.

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{
    relu, relu_backward, vertical_avgpool, vertical_avgpool_backward, Dense, Parameters,
    ResidualBlock, ResidualCache, Tensor,
};
use crate::swarm::SwarmState;
use crate::vec2::Vec2;

/// Speed below which a velocity-aligned camera falls back to the world x-axis.
pub const HEADING_SPEED_FLOOR: f64 = 1e-6;

/// Orientation of the panorama's center column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CameraFrame {
    /// Center column looks along world +x regardless of motion.
    #[default]
    World,
    /// Center column looks along the agent's own velocity.
    Velocity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraConfig {
    pub width: usize,
    pub height: usize,
    /// Agents farther than this (meters) are not drawn.
    pub max_distance: f64,
    /// Angular half-width of an agent's bar, radians. Bars always cover at least one column.
    pub half_width: f64,
    pub frame: CameraFrame,
    /// Exposure delay between the first and last row, seconds.
    pub row_time_span: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        CameraConfig {
            width: 128,
            height: 32,
            max_distance: 4.0,
            half_width: 0.06,
            frame: CameraFrame::World,
            row_time_span: 0.25,
        }
    }
}

impl CameraConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || !self.width.is_multiple_of(4) {
            return Err(Error::InvalidConfig(format!(
                "panorama width {} must be a positive multiple of 4",
                self.width
            )));
        }
        if self.height == 0 {
            return Err(Error::InvalidConfig(
                "panorama height must be positive".into(),
            ));
        }
        if !(self.max_distance > 0.0) {
            return Err(Error::InvalidConfig("max_distance must be positive".into()));
        }
        if !(self.half_width >= 0.0) || !(self.row_time_span >= 0.0) {
            return Err(Error::InvalidConfig(
                "half_width and row_time_span must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn image_shape(&self) -> [usize; 3] {
        [1, self.height, self.width]
    }

    /// Fractional column at which a bearing (radians, relative to heading) is centered.
    pub fn bearing_to_column(&self, bearing: f64) -> f64 {
        let w = self.width as f64;
        (w / 2.0 + bearing * w / (2.0 * PI)).rem_euclid(w)
    }

    fn row_delay(&self, y: usize) -> f64 {
        if self.height > 1 {
            self.row_time_span * y as f64 / (self.height - 1) as f64
        } else {
            0.0
        }
    }
}

/// One rendered panorama, `1 x height x width`, values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub image: Tensor,
}

impl Observation {
    /// Writes the image as an 8-bit binary PGM (values quantized, for inspection only).
    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let (h, w) = (self.image.shape()[1], self.image.shape()[2]);
        let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
        bytes.extend(
            self.image
                .data()
                .iter()
                .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
        );
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(&bytes))
            .map_err(|e| Error::io(path, e))
    }
}

fn heading(state: &SwarmState, agent: usize, frame: CameraFrame) -> f64 {
    match frame {
        CameraFrame::World => 0.0,
        CameraFrame::Velocity => {
            let v = state.velocities[agent];
            if v.norm() < HEADING_SPEED_FLOOR {
                0.0
            } else {
                v.angle()
            }
        }
    }
}

/// Paints one bar into a single image row.
fn paint_bar(row: &mut [f64], cam: &CameraConfig, rel: Vec2, yaw: f64) {
    let d = rel.norm();
    if d > cam.max_distance || d == 0.0 {
        return;
    }
    let intensity = (1.0 - d / cam.max_distance).clamp(0.0, 1.0);
    let w = cam.width as f64;
    let center = cam.bearing_to_column(rel.angle() - yaw);
    let half_cols = (cam.half_width * w / (2.0 * PI)).max(0.5);
    let lo = (center - half_cols).ceil() as i64;
    let hi = (center + half_cols).floor() as i64;
    let (lo, hi) = if hi < lo {
        let c = center.round() as i64;
        (c, c)
    } else {
        (lo, hi.min(lo + cam.width as i64 - 1))
    };
    for c in lo..=hi {
        let idx = c.rem_euclid(cam.width as i64) as usize;
        row[idx] = row[idx].max(intensity);
    }
}

/// Egocentric panorama seen by `agent`.
pub fn render_observation(state: &SwarmState, agent: usize, cam: &CameraConfig) -> Observation {
    let (h, w) = (cam.height, cam.width);
    let mut image = Tensor::zeros(&[1, h, w]);
    let yaw = heading(state, agent, cam.frame);
    let (r_i, v_i) = (state.positions[agent], state.velocities[agent]);
    let data = image.data_mut();
    for j in (0..state.n()).filter(|&j| j != agent) {
        let r_ji = state.positions[j] - r_i;
        let v_ji = state.velocities[j] - v_i;
        for y in 0..h {
            let rel = r_ji - v_ji * cam.row_delay(y);
            paint_bar(&mut data[y * w..(y + 1) * w], cam, rel, yaw);
        }
    }
    Observation { image }
}

/// Renders every agent's panorama.
pub fn render_all(state: &SwarmState, cam: &CameraConfig) -> Vec<Observation> {
    (0..state.n())
        .map(|i| render_observation(state, i, cam))
        .collect()
}

/// Layer widths of the visual estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VisionConfig {
    /// Output channels of the four residual blocks.
    pub channels: [usize; 4],
    /// Width of the hidden dense layer.
    pub hidden: usize,
}

impl Default for VisionConfig {
    fn default() -> Self {
        VisionConfig {
            channels: [4, 8, 8, 8],
            hidden: 32,
        }
    }
}

/// Strides of the four residual blocks: the width is halved in blocks 2 and 4.
pub const BLOCK_STRIDES: [(usize, usize); 4] = [(1, 1), (1, 2), (1, 1), (1, 2)];

/// `CNN_Ψ`: four residual blocks, vertical average pooling, then dense-ReLU-dense to `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct VisionNet {
    pub blocks: Vec<ResidualBlock>,
    pub fc1: Dense,
    pub fc2: Dense,
    input_shape: [usize; 3],
}

/// Everything [`VisionNet::backward`] needs from one forward pass.
#[derive(Clone, Debug)]
pub struct VisionCache {
    blocks: Vec<ResidualCache>,
    conv_out_height: usize,
    pooled: Vec<f64>,
    pooled_shape: Vec<usize>,
    pre_hidden: Vec<f64>,
    hidden: Vec<f64>,
}

impl VisionNet {
    pub fn new<R: Rng + ?Sized>(
        rng: &mut R,
        input_shape: [usize; 3],
        config: &VisionConfig,
        features: usize,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(4);
        let mut shape = input_shape;
        for (&out_c, &stride) in config.channels.iter().zip(&BLOCK_STRIDES) {
            let block = ResidualBlock::new(rng, shape[0], out_c, stride);
            shape = block.output_shape(&shape)?;
            blocks.push(block);
        }
        let flat = shape[0] * shape[2];
        Ok(VisionNet {
            blocks,
            fc1: Dense::new(rng, flat, config.hidden),
            fc2: Dense::new(rng, config.hidden, features),
            input_shape,
        })
    }

    pub fn input_shape(&self) -> [usize; 3] {
        self.input_shape
    }

    pub fn features(&self) -> usize {
        self.fc2.outputs()
    }

    pub fn forward(&self, image: &Tensor) -> Result<(Vec<f64>, VisionCache)> {
        if image.shape() != self.input_shape {
            return Err(Error::ShapeMismatch(format!(
                "estimator expects image {:?}, got {:?}",
                self.input_shape,
                image.shape()
            )));
        }
        let mut caches = Vec::with_capacity(self.blocks.len());
        let mut x = image.clone();
        for block in &self.blocks {
            let (y, cache) = block.forward(&x)?;
            caches.push(cache);
            x = y;
        }
        let conv_out_height = x.shape()[1];
        let pooled = vertical_avgpool(&x)?;
        let pre_hidden = self.fc1.forward(pooled.data())?;
        let hidden = relu(&pre_hidden);
        let out = self.fc2.forward(&hidden)?;
        Ok((
            out,
            VisionCache {
                blocks: caches,
                conv_out_height,
                pooled_shape: pooled.shape().to_vec(),
                pooled: pooled.into_vec(),
                pre_hidden,
                hidden,
            },
        ))
    }

    pub fn estimate(&self, obs: &Observation) -> Result<Vec<f64>> {
        self.forward(&obs.image).map(|(x, _)| x)
    }

    /// Accumulates parameter gradients into `grads` and returns `dL/dimage`.
    pub fn backward(&self, cache: &VisionCache, grad_out: &[f64], grads: &mut VisionNet) -> Tensor {
        let g_hidden = self.fc2.backward(&cache.hidden, grad_out, &mut grads.fc2);
        let g_pre = relu_backward(&cache.pre_hidden, &g_hidden);
        let g_pooled = self.fc1.backward(&cache.pooled, &g_pre, &mut grads.fc1);
        let g_pooled = Tensor::from_vec(&cache.pooled_shape, g_pooled).expect("pooled shape");
        let mut g = vertical_avgpool_backward(&g_pooled, cache.conv_out_height);
        for ((block, bc), gb) in self
            .blocks
            .iter()
            .zip(&cache.blocks)
            .zip(grads.blocks.iter_mut())
            .rev()
        {
            g = block.backward(bc, &g, gb);
        }
        g
    }
}

impl Parameters for VisionNet {
    fn params(&self) -> Vec<&Tensor> {
        let mut p: Vec<&Tensor> = self.blocks.iter().flat_map(|b| b.params()).collect();
        p.extend(self.fc1.params());
        p.extend(self.fc2.params());
        p
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p: Vec<&mut Tensor> = self
            .blocks
            .iter_mut()
            .flat_map(|b| b.params_mut())
            .collect();
        p.extend(self.fc1.params_mut());
        p.extend(self.fc2.params_mut());
        p
    }
}
