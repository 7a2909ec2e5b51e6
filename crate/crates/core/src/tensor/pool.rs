//! 2x2 max pooling and ReLU, each with its backward pass.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor4;

/// Argmax bookkeeping for the pooling backward pass: for every output cell,
/// the flat input offset of the selected element.
#[derive(Debug, Clone)]
pub struct PoolIndices {
    input_shape: [usize; 4],
    argmax: Vec<usize>,
}

/// 2x downsampling by window max. Requires even spatial dims; ties pick the
/// first element of the window in row-major order.
pub fn maxpool2x2<T: Scalar>(x: &Tensor4<T>) -> Result<(Tensor4<T>, PoolIndices)> {
    let [batch, ch, h, w] = x.shape();
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::shape("even spatial dims", format!("{h}x{w}")));
    }
    let (oh, ow) = (h / 2, w / 2);
    let mut out = Tensor4::zeros([batch, ch, oh, ow]);
    let mut argmax = vec![0usize; batch * ch * oh * ow];
    let mut k = 0;
    for b in 0..batch {
        for c in 0..ch {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut best = x.at(b, c, 2 * oy, 2 * ox);
                    let mut best_off = (((b * ch + c) * h + 2 * oy) * w) + 2 * ox;
                    for dy in 0..2 {
                        for dx in 0..2 {
                            let v = x.at(b, c, 2 * oy + dy, 2 * ox + dx);
                            if v > best {
                                best = v;
                                best_off = (((b * ch + c) * h + 2 * oy + dy) * w) + 2 * ox + dx;
                            }
                        }
                    }
                    *out.at_mut(b, c, oy, ox) = best;
                    argmax[k] = best_off;
                    k += 1;
                }
            }
        }
    }
    Ok((
        out,
        PoolIndices {
            input_shape: x.shape(),
            argmax,
        },
    ))
}

/// Routes the upstream gradient to the argmax positions recorded by the
/// forward pass.
pub fn maxpool2x2_backward<T: Scalar>(
    indices: &PoolIndices,
    upstream: &Tensor4<T>,
) -> Result<Tensor4<T>> {
    if upstream.numel() != indices.argmax.len() {
        return Err(Error::shape(
            format!("{} pooled cells", indices.argmax.len()),
            format!("{}", upstream.numel()),
        ));
    }
    let mut grad = Tensor4::zeros(indices.input_shape);
    for (g, &off) in upstream.data().iter().zip(&indices.argmax) {
        grad.data_mut()[off] += *g;
    }
    Ok(grad)
}

/// Elementwise `max(0, x)`.
pub fn relu<T: Scalar>(x: &Tensor4<T>) -> Tensor4<T> {
    let mut out = x.clone();
    for v in out.data_mut() {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    out
}

/// ReLU backward with subgradient 0 at the kink: gradient passes where the
/// forward input was strictly positive.
pub fn relu_backward<T: Scalar>(x: &Tensor4<T>, upstream: &Tensor4<T>) -> Result<Tensor4<T>> {
    if x.shape() != upstream.shape() {
        return Err(Error::shape(
            format!("{:?}", x.shape()),
            format!("{:?}", upstream.shape()),
        ));
    }
    let mut grad = upstream.clone();
    for (g, &v) in grad.data_mut().iter_mut().zip(x.data()) {
        if v <= T::zero() {
            *g = T::zero();
        }
    }
    Ok(grad)
}
