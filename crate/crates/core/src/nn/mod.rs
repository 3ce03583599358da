//! Small fixed-topology differentiable compute.
//!
//! Every layer has an explicit `forward` and a `backward` that accumulates parameter
//! gradients into a zeroed copy of the layer (see [`Parameters::zeroed`]). There is
//! no tape: the two architectures in this crate are static, so each model wires its
//! own backward pass.

mod adam;
pub mod checkpoint;
mod conv;
mod dense;
mod gradcheck;
mod ops;
mod residual;
mod tensor;

pub use adam::{Adam, AdamConfig};
pub use conv::Conv2d;
pub use dense::Dense;
pub use gradcheck::{gradient_check, gradient_check_steps, gradient_check_subset, GradCheckReport};
pub use ops::{l1_loss, relu, relu_backward, vertical_avgpool, vertical_avgpool_backward};
pub use residual::{ResidualBlock, ResidualCache};
pub use tensor::Tensor;

use rand::Rng;

/// A model whose trainable state is an ordered list of tensors.
pub trait Parameters: Clone {
    fn params(&self) -> Vec<&Tensor>;
    fn params_mut(&mut self) -> Vec<&mut Tensor>;

    /// Same structure with every value set to zero; used as a gradient accumulator.
    fn zeroed(&self) -> Self {
        let mut out = self.clone();
        out.params_mut().into_iter().for_each(|t| t.fill(0.0));
        out
    }

    fn num_params(&self) -> usize {
        self.params().iter().map(|t| t.len()).sum()
    }

    fn flatten(&self) -> Vec<f64> {
        self.params()
            .iter()
            .flat_map(|t| t.data().iter().copied())
            .collect()
    }

    /// Inverse of [`Parameters::flatten`]. Panics on a length mismatch.
    fn set_flat(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.num_params(), "flat parameter length");
        let mut offset = 0;
        for t in self.params_mut() {
            let n = t.len();
            t.data_mut().copy_from_slice(&values[offset..offset + n]);
            offset += n;
        }
    }

    fn add_scaled(&mut self, other: &Self, k: f64) {
        for (a, b) in self.params_mut().into_iter().zip(other.params()) {
            for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += k * y;
            }
        }
    }

    fn is_finite(&self) -> bool {
        self.params().iter().all(|t| t.is_finite())
    }
}

/// He-style uniform initialization: `U(-sqrt(6/fan_in), sqrt(6/fan_in))`.
pub(crate) fn he_uniform<R: Rng + ?Sized>(rng: &mut R, shape: &[usize], fan_in: usize) -> Tensor {
    let bound = (6.0 / fan_in.max(1) as f64).sqrt();
    let n = shape.iter().product();
    let data = (0..n).map(|_| rng.gen_range(-bound..bound)).collect();
    Tensor::from_vec(shape, data).expect("shape product matches")
}
