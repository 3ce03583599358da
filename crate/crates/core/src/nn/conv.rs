use rand::Rng;

use super::ops::image_dims;
use super::{he_uniform, Parameters, Tensor};
use crate::error::{Error, Result};

/// 2D cross-correlation over a `C x H x W` image with zero padding.
#[derive(Clone, Debug, PartialEq)]
pub struct Conv2d {
    /// `out_channels x in_channels x kh x kw`.
    pub weight: Tensor,
    pub bias: Tensor,
    pub stride: (usize, usize),
    pub padding: (usize, usize),
}

/// Output indices `o` for which `o * stride + k - pad` lands inside `[0, len)`.
fn valid_range(len: usize, out_len: usize, stride: usize, k: usize, pad: usize) -> (usize, usize) {
    let lo = if pad > k {
        (pad - k).div_ceil(stride)
    } else {
        0
    };
    let hi = if len + pad > k {
        ((len + pad - k - 1) / stride + 1).min(out_len)
    } else {
        0
    };
    (lo, hi.max(lo))
}

impl Conv2d {
    pub fn new<R: Rng + ?Sized>(
        rng: &mut R,
        in_channels: usize,
        out_channels: usize,
        kernel: (usize, usize),
        stride: (usize, usize),
        padding: (usize, usize),
    ) -> Self {
        let fan_in = in_channels * kernel.0 * kernel.1;
        Conv2d {
            weight: he_uniform(
                rng,
                &[out_channels, in_channels, kernel.0, kernel.1],
                fan_in,
            ),
            bias: Tensor::zeros(&[out_channels]),
            stride,
            padding,
        }
    }

    pub fn in_channels(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn out_channels(&self) -> usize {
        self.weight.shape()[0]
    }

    pub fn kernel(&self) -> (usize, usize) {
        (self.weight.shape()[2], self.weight.shape()[3])
    }

    pub fn output_shape(&self, input: &[usize]) -> Result<[usize; 3]> {
        let (kh, kw) = self.kernel();
        let (sh, sw) = self.stride;
        let (ph, pw) = self.padding;
        match *input {
            [c, h, w] if c == self.in_channels() && h + 2 * ph >= kh && w + 2 * pw >= kw => Ok([
                self.out_channels(),
                (h + 2 * ph - kh) / sh + 1,
                (w + 2 * pw - kw) / sw + 1,
            ]),
            _ => Err(Error::ShapeMismatch(format!(
                "conv {}->{} with kernel {:?} cannot take input {:?}",
                self.in_channels(),
                self.out_channels(),
                self.kernel(),
                input
            ))),
        }
    }

    /// Unfolds the input into a `(cin * kh * kw) x (oh * ow)` patch matrix.
    fn im2col(&self, x: &Tensor, out_shape: [usize; 3]) -> Vec<f64> {
        let [cin, h, w] = [x.shape()[0], x.shape()[1], x.shape()[2]];
        let [_, oh, ow] = out_shape;
        let (kh, kw) = self.kernel();
        let (sh, sw) = self.stride;
        let (ph, pw) = self.padding;
        let plane = oh * ow;
        let xd = x.data();
        let mut cols = vec![0.0; cin * kh * kw * plane];
        for ic in 0..cin {
            for ky in 0..kh {
                let (y0, y1) = valid_range(h, oh, sh, ky, ph);
                for kx in 0..kw {
                    let (x0, x1) = valid_range(w, ow, sw, kx, pw);
                    let row = &mut cols[((ic * kh + ky) * kw + kx) * plane..][..plane];
                    for oy in y0..y1 {
                        let in_row = &xd[(ic * h + oy * sh + ky - ph) * w..][..w];
                        let out_row = &mut row[oy * ow..(oy + 1) * ow];
                        for ox in x0..x1 {
                            out_row[ox] = in_row[ox * sw + kx - pw];
                        }
                    }
                }
            }
        }
        cols
    }

    /// Adjoint of [`Conv2d::im2col`]: scatters patch gradients back onto the input.
    fn col2im(&self, cols: &[f64], input: [usize; 3], out_shape: [usize; 3]) -> Tensor {
        let [cin, h, w] = input;
        let [_, oh, ow] = out_shape;
        let (kh, kw) = self.kernel();
        let (sh, sw) = self.stride;
        let (ph, pw) = self.padding;
        let plane = oh * ow;
        let mut grad_x = Tensor::zeros(&input);
        let gxd = grad_x.data_mut();
        for ic in 0..cin {
            for ky in 0..kh {
                let (y0, y1) = valid_range(h, oh, sh, ky, ph);
                for kx in 0..kw {
                    let (x0, x1) = valid_range(w, ow, sw, kx, pw);
                    let row = &cols[((ic * kh + ky) * kw + kx) * plane..][..plane];
                    for oy in y0..y1 {
                        let in_row = &mut gxd[(ic * h + oy * sh + ky - ph) * w..][..w];
                        let g_row = &row[oy * ow..(oy + 1) * ow];
                        for ox in x0..x1 {
                            in_row[ox * sw + kx - pw] += g_row[ox];
                        }
                    }
                }
            }
        }
        grad_x
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        image_dims(x)?;
        let out_shape = self.output_shape(x.shape())?;
        let [cout, oh, ow] = out_shape;
        let plane = oh * ow;
        let cols = self.im2col(x, out_shape);
        let patch = cols.len() / plane.max(1);
        let mut out = Tensor::zeros(&out_shape);
        for (oc, out_plane) in out.data_mut().chunks_exact_mut(plane).enumerate() {
            out_plane.fill(self.bias.data()[oc]);
        }
        gemm(
            (cout, patch, plane),
            (self.weight.data(), patch, 1),
            (&cols, plane, 1),
            1.0,
            (out.data_mut(), plane),
        );
        Ok(out)
    }

    /// Accumulates weight and bias gradients into `grads` and returns `dL/dx`.
    pub fn backward(&self, x: &Tensor, grad_out: &Tensor, grads: &mut Conv2d) -> Tensor {
        let input = image_dims(x).expect("forward accepted this input");
        let out_shape = [grad_out.shape()[0], grad_out.shape()[1], grad_out.shape()[2]];
        let [cout, oh, ow] = out_shape;
        let plane = oh * ow;
        let cols = self.im2col(x, out_shape);
        let patch = cols.len() / plane.max(1);
        let gd = grad_out.data();
        for (oc, g_plane) in gd.chunks_exact(plane).enumerate() {
            grads.bias.data_mut()[oc] += g_plane.iter().sum::<f64>();
        }
        gemm(
            (cout, plane, patch),
            (gd, plane, 1),
            (&cols, 1, plane),
            1.0,
            (grads.weight.data_mut(), patch),
        );
        let mut grad_cols = vec![0.0; cols.len()];
        gemm(
            (patch, cout, plane),
            (self.weight.data(), 1, patch),
            (gd, plane, 1),
            0.0,
            (&mut grad_cols, plane),
        );
        self.col2im(&grad_cols, input, out_shape)
    }
}

/// `C = A B + beta C` for row-major `C` (`m x n`); `A` and `B` are given with
/// explicit row and column strides so transposes need no copy.
fn gemm(
    (m, k, n): (usize, usize, usize),
    (a, rsa, csa): (&[f64], usize, usize),
    (b, rsb, csb): (&[f64], usize, usize),
    beta: f64,
    (c, rsc): (&mut [f64], usize),
) {
    let last = |rows: usize, cols: usize, rs: usize, cs: usize| {
        if rows == 0 || cols == 0 {
            0
        } else {
            (rows - 1) * rs + (cols - 1) * cs + 1
        }
    };
    assert!(a.len() >= last(m, k, rsa, csa), "gemm: A too short");
    assert!(b.len() >= last(k, n, rsb, csb), "gemm: B too short");
    assert!(c.len() >= last(m, n, rsc, 1), "gemm: C too short");
    // SAFETY: the assertions above keep every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            rsc as isize,
            1,
        );
    }
}

impl Parameters for Conv2d {
    fn params(&self) -> Vec<&Tensor> {
        vec![&self.weight, &self.bias]
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.weight, &mut self.bias]
    }
}
