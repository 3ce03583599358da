use super::{shift, GsoMatrix};
use crate::error::{Error, Result};
use crate::nn::Tensor;

/// Rolling delayed aggregation sequence.
///
/// After the update at step `t`, block `k` holds `S(t) S(t-1) ... S(t-k+1) X(t-k)`,
/// with blocks that reach back before the first update left at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregationBuffer {
    n: usize,
    features: usize,
    blocks: Vec<Tensor>,
    updates: usize,
}

impl AggregationBuffer {
    pub fn new(n: usize, features: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig(
                "aggregation depth K must be >= 1".into(),
            ));
        }
        Ok(AggregationBuffer {
            n,
            features,
            blocks: vec![Tensor::zeros(&[n, features]); k],
            updates: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn block(&self, k: usize) -> &Tensor {
        &self.blocks[k]
    }

    /// Pushes `X(t)` and the current shift operator, shifting every older block one hop further.
    pub fn update(&mut self, s: &GsoMatrix, x: &Tensor) -> Result<()> {
        if x.shape() != [self.n, self.features] || s.n() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "aggregation buffer is {}x{}, got X {:?} and a {}-node shift",
                self.n,
                self.features,
                x.shape(),
                s.n()
            )));
        }
        for k in (1..self.blocks.len()).rev() {
            self.blocks[k] = shift(s, &self.blocks[k - 1])?;
        }
        self.blocks[0] = x.clone();
        self.updates += 1;
        Ok(())
    }

    /// `Z(t)`, shape `N x (K F)`, blocks side by side.
    pub fn z(&self) -> Tensor {
        let kf = self.k() * self.features;
        let mut z = Tensor::zeros(&[self.n, kf]);
        for i in 0..self.n {
            z.row_mut(i).copy_from_slice(&self.row(i));
        }
        z
    }

    /// `z_i(t)`, the row agent `i` feeds to the readout.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| b.row(i).iter().copied())
            .collect()
    }
}
