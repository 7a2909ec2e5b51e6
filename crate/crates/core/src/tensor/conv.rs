//! 2-D convolution (cross-correlation) forward and backward passes.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor4;

/// Convolution layer parameters. Weights have shape
/// (out_channels, in_channels, kh, kw).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvParams<T> {
    pub weights: Tensor4<T>,
    pub bias: Vec<T>,
    pub stride: usize,
    pub padding: usize,
}

impl<T: Scalar> ConvParams<T> {
    pub fn zeros(out_ch: usize, in_ch: usize, kh: usize, kw: usize) -> Self {
        ConvParams {
            weights: Tensor4::zeros([out_ch, in_ch, kh, kw]),
            bias: vec![T::zero(); out_ch],
            stride: 1,
            padding: 0,
        }
    }

    pub fn out_channels(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn kernel(&self) -> (usize, usize) {
        let s = self.weights.shape();
        (s[2], s[3])
    }
}

/// Output spatial dims: `floor((dim + 2*padding - kernel) / stride) + 1`.
/// Errors when a dimension would be non-positive.
pub fn conv_output_dims(
    in_h: usize,
    in_w: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    padding: usize,
) -> Result<(usize, usize)> {
    let h = in_h as isize + 2 * padding as isize - kh as isize;
    let w = in_w as isize + 2 * padding as isize - kw as isize;
    if h < 0 || w < 0 || stride == 0 {
        return Err(Error::shape(
            "positive conv output dims",
            format!("input {in_h}x{in_w}, kernel {kh}x{kw}, stride {stride}, padding {padding}"),
        ));
    }
    Ok((h as usize / stride + 1, w as usize / stride + 1))
}

/// Cross-correlation with stride and zero padding.
pub fn conv2d_forward<T: Scalar>(x: &Tensor4<T>, p: &ConvParams<T>) -> Result<Tensor4<T>> {
    let [batch, in_ch, in_h, in_w] = x.shape();
    if in_ch != p.in_channels() {
        return Err(Error::shape(
            format!("{} input channels", p.in_channels()),
            format!("{in_ch}"),
        ));
    }
    let (kh, kw) = p.kernel();
    let (out_h, out_w) = conv_output_dims(in_h, in_w, kh, kw, p.stride, p.padding)?;
    let out_ch = p.out_channels();
    let mut out = Tensor4::zeros([batch, out_ch, out_h, out_w]);

    let pad = p.padding as isize;
    for b in 0..batch {
        for oc in 0..out_ch {
            for oy in 0..out_h {
                for ox in 0..out_w {
                    let mut acc = p.bias[oc];
                    let base_y = (oy * p.stride) as isize - pad;
                    let base_x = (ox * p.stride) as isize - pad;
                    for ic in 0..in_ch {
                        for ky in 0..kh {
                            let iy = base_y + ky as isize;
                            if iy < 0 || iy >= in_h as isize {
                                continue;
                            }
                            for kx in 0..kw {
                                let ix = base_x + kx as isize;
                                if ix < 0 || ix >= in_w as isize {
                                    continue;
                                }
                                acc += x.at(b, ic, iy as usize, ix as usize)
                                    * p.weights.at(oc, ic, ky, kx);
                            }
                        }
                    }
                    *out.at_mut(b, oc, oy, ox) = acc;
                }
            }
        }
    }
    Ok(out)
}

/// Exact gradients of [`conv2d_forward`] with respect to input, weights and
/// bias, given the upstream gradient.
pub fn conv2d_backward<T: Scalar>(
    x: &Tensor4<T>,
    p: &ConvParams<T>,
    upstream: &Tensor4<T>,
) -> Result<(Tensor4<T>, Tensor4<T>, Vec<T>)> {
    let [batch, in_ch, in_h, in_w] = x.shape();
    let (kh, kw) = p.kernel();
    let (out_h, out_w) = conv_output_dims(in_h, in_w, kh, kw, p.stride, p.padding)?;
    let out_ch = p.out_channels();
    if upstream.shape() != [batch, out_ch, out_h, out_w] {
        return Err(Error::shape(
            format!("{:?}", [batch, out_ch, out_h, out_w]),
            format!("{:?}", upstream.shape()),
        ));
    }

    let mut grad_x = Tensor4::zeros(x.shape());
    let mut grad_w = Tensor4::zeros(p.weights.shape());
    let mut grad_b = vec![T::zero(); out_ch];

    let pad = p.padding as isize;
    for b in 0..batch {
        for oc in 0..out_ch {
            for oy in 0..out_h {
                for ox in 0..out_w {
                    let g = upstream.at(b, oc, oy, ox);
                    grad_b[oc] += g;
                    let base_y = (oy * p.stride) as isize - pad;
                    let base_x = (ox * p.stride) as isize - pad;
                    for ic in 0..in_ch {
                        for ky in 0..kh {
                            let iy = base_y + ky as isize;
                            if iy < 0 || iy >= in_h as isize {
                                continue;
                            }
                            for kx in 0..kw {
                                let ix = base_x + kx as isize;
                                if ix < 0 || ix >= in_w as isize {
                                    continue;
                                }
                                let (iy, ix) = (iy as usize, ix as usize);
                                *grad_w.at_mut(oc, ic, ky, kx) += x.at(b, ic, iy, ix) * g;
                                *grad_x.at_mut(b, ic, iy, ix) += p.weights.at(oc, ic, ky, kx) * g;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((grad_x, grad_w, grad_b))
}
