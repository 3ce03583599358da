use rand::Rng;

use super::{relu, relu_backward, Conv2d, Parameters, Tensor};
use crate::error::Result;

/// `relu(conv2(relu(conv1(x))) + skip(x))` with 3x3 convolutions.
///
/// The skip path is the identity when shapes already agree, otherwise a strided
/// 1x1 projection.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualBlock {
    pub conv1: Conv2d,
    pub conv2: Conv2d,
    pub skip: Option<Conv2d>,
}

/// Intermediate values from [`ResidualBlock::forward`] needed by the backward pass.
#[derive(Clone, Debug)]
pub struct ResidualCache {
    input: Tensor,
    pre1: Tensor,
    hidden: Tensor,
    pre_out: Tensor,
}

impl ResidualBlock {
    /// `stride` applies to the first convolution (and the projection).
    pub fn new<R: Rng + ?Sized>(
        rng: &mut R,
        in_channels: usize,
        out_channels: usize,
        stride: (usize, usize),
    ) -> Self {
        let conv1 = Conv2d::new(rng, in_channels, out_channels, (3, 3), stride, (1, 1));
        let conv2 = Conv2d::new(rng, out_channels, out_channels, (3, 3), (1, 1), (1, 1));
        let skip = (in_channels != out_channels || stride != (1, 1))
            .then(|| Conv2d::new(rng, in_channels, out_channels, (1, 1), stride, (0, 0)));
        ResidualBlock { conv1, conv2, skip }
    }

    pub fn output_shape(&self, input: &[usize]) -> Result<[usize; 3]> {
        let mid = self.conv1.output_shape(input)?;
        self.conv2.output_shape(&mid)
    }

    pub fn forward(&self, x: &Tensor) -> Result<(Tensor, ResidualCache)> {
        let pre1 = self.conv1.forward(x)?;
        let hidden = Tensor::from_vec(pre1.shape(), relu(pre1.data()))?;
        let mut pre_out = self.conv2.forward(&hidden)?;
        match &self.skip {
            Some(proj) => pre_out.add_assign(&proj.forward(x)?),
            None => {
                if pre_out.shape() != x.shape() {
                    return Err(crate::Error::ShapeMismatch(format!(
                        "identity skip from {:?} to {:?}",
                        x.shape(),
                        pre_out.shape()
                    )));
                }
                pre_out.add_assign(x)
            }
        }
        let out = Tensor::from_vec(pre_out.shape(), relu(pre_out.data()))?;
        Ok((
            out,
            ResidualCache {
                input: x.clone(),
                pre1,
                hidden,
                pre_out,
            },
        ))
    }

    pub fn backward(
        &self,
        cache: &ResidualCache,
        grad_out: &Tensor,
        grads: &mut ResidualBlock,
    ) -> Tensor {
        let shape = cache.pre_out.shape();
        let g_pre = Tensor::from_vec(shape, relu_backward(cache.pre_out.data(), grad_out.data()))
            .expect("same shape as output");
        let g_hidden = self.conv2.backward(&cache.hidden, &g_pre, &mut grads.conv2);
        let g_pre1 = Tensor::from_vec(
            cache.pre1.shape(),
            relu_backward(cache.pre1.data(), g_hidden.data()),
        )
        .expect("same shape as hidden");
        let mut g_x = self.conv1.backward(&cache.input, &g_pre1, &mut grads.conv1);
        match (&self.skip, grads.skip.as_mut()) {
            (Some(proj), Some(gproj)) => {
                g_x.add_assign(&proj.backward(&cache.input, &g_pre, gproj))
            }
            _ => g_x.add_assign(&g_pre),
        }
        g_x
    }
}

impl Parameters for ResidualBlock {
    fn params(&self) -> Vec<&Tensor> {
        let mut p = self.conv1.params();
        p.extend(self.conv2.params());
        if let Some(s) = &self.skip {
            p.extend(s.params());
        }
        p
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p = self.conv1.params_mut();
        p.extend(self.conv2.params_mut());
        if let Some(s) = &mut self.skip {
            p.extend(s.params_mut());
        }
        p
    }
}
