use rand::Rng;

use super::{he_uniform, Parameters, Tensor};
use crate::error::{Error, Result};

/// Affine layer `y = W x + b` with `W` of shape `out x in`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weight: Tensor,
    pub bias: Tensor,
}

impl Dense {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Self {
        Dense {
            weight: he_uniform(rng, &[outputs, inputs], inputs),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            weight: Tensor::zeros(&[outputs, inputs]),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.rows()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.inputs() {
            return Err(Error::ShapeMismatch(format!(
                "dense layer expects {} inputs, got {}",
                self.inputs(),
                x.len()
            )));
        }
        Ok((0..self.outputs())
            .map(|o| {
                let w = self.weight.row(o);
                self.bias.data()[o] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect())
    }

    /// Accumulates `dL/dW` and `dL/db` into `grads` and returns `dL/dx`.
    pub fn backward(&self, x: &[f64], grad_out: &[f64], grads: &mut Dense) -> Vec<f64> {
        debug_assert_eq!(grad_out.len(), self.outputs());
        let mut grad_x = vec![0.0; self.inputs()];
        for (o, &g) in grad_out.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            grads.bias.data_mut()[o] += g;
            let w = self.weight.row(o);
            let gw = grads.weight.row_mut(o);
            for ((gx, gwi), (&wi, &xi)) in grad_x.iter_mut().zip(gw.iter_mut()).zip(w.iter().zip(x))
            {
                *gx += g * wi;
                *gwi += g * xi;
            }
        }
        grad_x
    }
}

impl Parameters for Dense {
    fn params(&self) -> Vec<&Tensor> {
        vec![&self.weight, &self.bias]
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.weight, &mut self.bias]
    }
}
