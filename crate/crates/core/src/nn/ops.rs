use super::Tensor;
use crate::error::{Error, Result};

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// Gradient through a rectifier given its pre-activation input; zero at the kink.
pub fn relu_backward(pre: &[f64], grad_out: &[f64]) -> Vec<f64> {
    pre.iter()
        .zip(grad_out)
        .map(|(&p, &g)| if p > 0.0 { g } else { 0.0 })
        .collect()
}

/// Mean over the height axis of a `C x H x W` image, giving `C x 1 x W`.
pub fn vertical_avgpool(x: &Tensor) -> Result<Tensor> {
    let [c, h, w] = image_dims(x)?;
    if h == 0 {
        return Err(Error::ShapeMismatch(
            "vertical pooling over zero height".into(),
        ));
    }
    let mut out = Tensor::zeros(&[c, 1, w]);
    let inv = 1.0 / h as f64;
    let (src, dst) = (x.data(), out.data_mut());
    for ch in 0..c {
        for row in 0..h {
            let base = (ch * h + row) * w;
            for col in 0..w {
                dst[ch * w + col] += src[base + col] * inv;
            }
        }
    }
    Ok(out)
}

/// Spreads a `C x 1 x W` gradient evenly back over `height` rows.
pub fn vertical_avgpool_backward(grad_out: &Tensor, height: usize) -> Tensor {
    let (c, w) = (grad_out.shape()[0], grad_out.shape()[2]);
    let mut out = Tensor::zeros(&[c, height, w]);
    let inv = 1.0 / height as f64;
    let (src, dst) = (grad_out.data(), out.data_mut());
    for ch in 0..c {
        for row in 0..height {
            let base = (ch * height + row) * w;
            for col in 0..w {
                dst[base + col] = src[ch * w + col] * inv;
            }
        }
    }
    out
}

/// `sum |pred - target|` and its subgradient (`sign`, zero at ties).
pub fn l1_loss(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch(format!(
            "L1 loss on {} predictions vs {} targets",
            pred.len(),
            target.len()
        )));
    }
    let mut loss = 0.0;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let d = p - t;
            loss += d.abs();
            if d > 0.0 {
                1.0
            } else if d < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok((loss, grad))
}

pub(crate) fn image_dims(x: &Tensor) -> Result<[usize; 3]> {
    match *x.shape() {
        [c, h, w] => Ok([c, h, w]),
        _ => Err(Error::ShapeMismatch(format!(
            "expected a C x H x W image, got {:?}",
            x.shape()
        ))),
    }
}
