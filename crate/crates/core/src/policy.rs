//! Learned decentralized policies.
//!
//! A policy maps each agent's aggregation row `z_i(t)` to an acceleration with a
//! shared feedforward readout. The per-agent features `x_i(t)` fed into the
//! aggregation come either from [`handcrafted_state`] or from the visual
//! estimator applied to the agent's own panorama.

use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::controllers::{handcrafted_state, Controller, HANDCRAFTED_FEATURES};
use crate::error::{Error, Result};
use crate::graph::{build_graph, gso, AggregationBuffer, CommGraph, Normalization};
use crate::nn::checkpoint::Checkpoint;
use crate::nn::{relu, relu_backward, Dense, Parameters, Tensor};
use crate::swarm::SwarmState;
use crate::vec2::Vec2;
use crate::vision::{render_observation, CameraConfig, VisionCache, VisionConfig, VisionNet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyMode {
    /// Features are exact neighbor velocity and position summaries.
    #[default]
    Handcrafted,
    /// Features come from each agent's camera through the visual estimator.
    Vision,
}

impl FromStr for PolicyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "handcrafted" => Ok(PolicyMode::Handcrafted),
            "vision" => Ok(PolicyMode::Vision),
            other => Err(Error::InvalidConfig(format!(
                "unknown policy mode `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for PolicyMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PolicyMode::Handcrafted => "handcrafted",
            PolicyMode::Vision => "vision",
        })
    }
}

/// Shared readout `NN_Θ`: ReLU MLP from `K F` inputs to a 2D acceleration.
///
/// Inputs are multiplied elementwise by a fixed `input_scale` and outputs by a
/// fixed `output_scale`; both are set once from training data and are not trained.
#[derive(Clone, Debug, PartialEq)]
pub struct Readout {
    pub layers: Vec<Dense>,
    pub input_scale: Vec<f64>,
    pub output_scale: f64,
}

/// Activations kept for [`Readout::backward`].
#[derive(Clone, Debug)]
pub struct ReadoutCache {
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

impl Readout {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, inputs: usize, hidden: &[usize]) -> Self {
        let mut widths = vec![inputs];
        widths.extend_from_slice(hidden);
        widths.push(2);
        Readout {
            layers: widths
                .windows(2)
                .map(|w| Dense::new(rng, w[0], w[1]))
                .collect(),
            input_scale: vec![1.0; inputs],
            output_scale: 1.0,
        }
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn hidden(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(Dense::outputs)
            .collect()
    }

    pub fn forward(&self, z: &[f64]) -> Result<(Vec2, ReadoutCache)> {
        if z.len() != self.inputs() {
            return Err(Error::ShapeMismatch(format!(
                "readout expects {} inputs, got {}",
                self.inputs(),
                z.len()
            )));
        }
        let mut x: Vec<f64> = z
            .iter()
            .zip(&self.input_scale)
            .map(|(a, s)| a * s)
            .collect();
        let mut cache = ReadoutCache {
            inputs: Vec::with_capacity(self.layers.len()),
            pre: Vec::with_capacity(self.layers.len()),
        };
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let pre = layer.forward(&x)?;
            cache.inputs.push(std::mem::take(&mut x));
            x = if l < last { relu(&pre) } else { pre.clone() };
            cache.pre.push(pre);
        }
        Ok((Vec2::new(x[0], x[1]) * self.output_scale, cache))
    }

    pub fn act(&self, z: &[f64]) -> Result<Vec2> {
        self.forward(z).map(|(u, _)| u)
    }

    /// Accumulates parameter gradients and returns `dL/dz`.
    pub fn backward(
        &self,
        cache: &ReadoutCache,
        grad_action: Vec2,
        grads: &mut Readout,
    ) -> Vec<f64> {
        let mut g = vec![
            grad_action.x * self.output_scale,
            grad_action.y * self.output_scale,
        ];
        let last = self.layers.len() - 1;
        for l in (0..self.layers.len()).rev() {
            if l < last {
                g = relu_backward(&cache.pre[l], &g);
            }
            g = self.layers[l].backward(&cache.inputs[l], &g, &mut grads.layers[l]);
        }
        g.iter_mut()
            .zip(&self.input_scale)
            .for_each(|(a, s)| *a *= s);
        g
    }
}

impl Parameters for Readout {
    fn params(&self) -> Vec<&Tensor> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.params_mut())
            .collect()
    }
}

/// `NN_Θ(z_i)`: the learned acceleration for one agent, before saturation.
pub fn dagnn_policy_action(z_i: &[f64], readout: &Readout) -> Result<Vec2> {
    readout.act(z_i)
}

/// Architecture of a learned policy, independent of its trained values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySpec {
    pub mode: PolicyMode,
    /// Aggregation depth, one more than the number of exchanges per step.
    pub k: usize,
    /// Per-agent feature width. Fixed to 6 in handcrafted mode.
    pub features: usize,
    pub hidden: Vec<usize>,
    pub normalization: Normalization,
    pub vision: VisionConfig,
    pub camera: CameraConfig,
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec {
            mode: PolicyMode::Handcrafted,
            k: 4,
            features: HANDCRAFTED_FEATURES,
            hidden: vec![64, 64],
            normalization: Normalization::Degree,
            vision: VisionConfig::default(),
            camera: CameraConfig::default(),
        }
    }
}

impl PolicySpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if self.features == 0 {
            return Err(Error::InvalidConfig(
                "feature width must be positive".into(),
            ));
        }
        if self.mode == PolicyMode::Handcrafted && self.features != HANDCRAFTED_FEATURES {
            return Err(Error::InvalidConfig(format!(
                "handcrafted mode has exactly {HANDCRAFTED_FEATURES} features, got {}",
                self.features
            )));
        }
        if self.mode == PolicyMode::Vision {
            self.camera.validate()?;
        }
        Ok(())
    }
}

/// Trained values plus the architecture they belong to.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParams {
    pub spec: PolicySpec,
    pub readout: Readout,
    pub vision: Option<VisionNet>,
}

/// Per-step intermediate values of the feature stage, kept for backpropagation.
#[derive(Clone, Debug)]
pub enum FeatureCache {
    Handcrafted,
    Vision(Vec<VisionCache>),
}

impl PolicyParams {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, spec: PolicySpec) -> Result<Self> {
        spec.validate()?;
        let vision = match spec.mode {
            PolicyMode::Handcrafted => None,
            PolicyMode::Vision => Some(VisionNet::new(
                rng,
                spec.camera.image_shape(),
                &spec.vision,
                spec.features,
            )?),
        };
        let readout = Readout::new(rng, spec.k * spec.features, &spec.hidden);
        Ok(PolicyParams {
            spec,
            readout,
            vision,
        })
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn features(&self) -> usize {
        self.spec.features
    }

    /// `X(t)`, one feature row per agent.
    pub fn features_of(&self, state: &SwarmState, graph: &CommGraph) -> Result<Tensor> {
        self.features_with_cache(state, graph).map(|(x, _)| x)
    }

    pub fn features_with_cache(
        &self,
        state: &SwarmState,
        graph: &CommGraph,
    ) -> Result<(Tensor, FeatureCache)> {
        match self.spec.mode {
            PolicyMode::Handcrafted => {
                Ok((handcrafted_state(state, graph)?, FeatureCache::Handcrafted))
            }
            PolicyMode::Vision => self.vision_features(state),
        }
    }

    /// Each agent's estimate from its own rendered panorama.
    pub fn vision_features(&self, state: &SwarmState) -> Result<(Tensor, FeatureCache)> {
        let net = self
            .vision
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("policy has no visual estimator".into()))?;
        let mut x = Tensor::zeros(&[state.n(), self.features()]);
        let mut caches = Vec::with_capacity(state.n());
        for i in 0..state.n() {
            let obs = render_observation(state, i, &self.spec.camera);
            let (xi, cache) = net.forward(&obs.image)?;
            x.row_mut(i).copy_from_slice(&xi);
            caches.push(cache);
        }
        Ok((x, FeatureCache::Vision(caches)))
    }

    /// Row-wise readout over a full `Z(t)`.
    pub fn actions(&self, z: &Tensor) -> Result<Vec<Vec2>> {
        (0..z.rows()).map(|i| self.readout.act(z.row(i))).collect()
    }

    pub fn to_checkpoint(&self) -> Result<Checkpoint> {
        let mut ck = Checkpoint::default();
        let spec = serde_json::to_string(&self.spec)
            .map_err(|e| Error::parse("policy spec", e.to_string()))?;
        ck.push_meta("spec", spec);
        ck.push_meta("output_scale", format!("{:e}", self.readout.output_scale));
        ck.tensors.push((
            "readout.input_scale".into(),
            Tensor::from_vec(
                &[self.readout.input_scale.len()],
                self.readout.input_scale.clone(),
            )?,
        ));
        for (idx, t) in self.params().into_iter().enumerate() {
            ck.tensors.push((format!("param.{idx}"), t.clone()));
        }
        Ok(ck)
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        let spec: PolicySpec = serde_json::from_str(ck.require_meta("spec")?)
            .map_err(|e| Error::parse("policy spec", e.to_string()))?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let mut params = PolicyParams::new(&mut rng, spec)?;
        params.readout.output_scale = ck
            .require_meta("output_scale")?
            .parse()
            .map_err(|e| Error::parse("checkpoint", format!("output_scale: {e}")))?;
        let scale = ck.tensor("readout.input_scale")?;
        if scale.len() != params.readout.input_scale.len() {
            return Err(Error::ShapeMismatch("readout input scale width".into()));
        }
        params.readout.input_scale = scale.data().to_vec();
        for (idx, t) in params.params_mut().into_iter().enumerate() {
            let stored = ck.tensor(&format!("param.{idx}"))?;
            if stored.shape() != t.shape() {
                return Err(Error::ShapeMismatch(format!(
                    "parameter {idx}: checkpoint {:?}, architecture {:?}",
                    stored.shape(),
                    t.shape()
                )));
            }
            t.data_mut().copy_from_slice(stored.data());
        }
        Ok(params)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_checkpoint()?.save(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        PolicyParams::from_checkpoint(&Checkpoint::load(path)?)
    }
}

impl Parameters for PolicyParams {
    fn params(&self) -> Vec<&Tensor> {
        let mut p = self.readout.params();
        if let Some(v) = &self.vision {
            p.extend(v.params());
        }
        p
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p = self.readout.params_mut();
        if let Some(v) = &mut self.vision {
            p.extend(v.params_mut());
        }
        p
    }
}

/// A [`PolicyParams`] deployed as a controller with its own aggregation history.
#[derive(Clone, Debug)]
pub struct LearnedController {
    pub params: PolicyParams,
    pub comm_radius: f64,
    buffer: Option<AggregationBuffer>,
}

impl LearnedController {
    pub fn new(params: PolicyParams, comm_radius: f64) -> Self {
        LearnedController {
            params,
            comm_radius,
            buffer: None,
        }
    }

    /// Current `Z(t)`, if at least one step has been taken.
    pub fn aggregation(&self) -> Option<&AggregationBuffer> {
        self.buffer.as_ref()
    }
}

impl Controller for LearnedController {
    fn reset(&mut self, n_agents: usize) -> Result<()> {
        self.buffer = Some(AggregationBuffer::new(
            n_agents,
            self.params.features(),
            self.params.k(),
        )?);
        Ok(())
    }

    fn act(&mut self, state: &SwarmState) -> Result<Vec<Vec2>> {
        if self.buffer.as_ref().map(|b| b.n()) != Some(state.n()) {
            self.reset(state.n())?;
        }
        let graph = build_graph(&state.positions, self.comm_radius);
        let s = gso(&graph, self.params.spec.normalization);
        let x = self.params.features_of(state, &graph)?;
        let buffer = self.buffer.as_mut().expect("initialized above");
        buffer.update(&s, &x)?;
        self.params.actions(&buffer.z())
    }
}
