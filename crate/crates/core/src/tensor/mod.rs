//! Minimal dense numeric kernels with reverse-mode gradients.
//!
//! Just enough for a small convolutional regressor: 4-D tensors, 2-D
//! convolution, 2x2 max pooling, ReLU, the Adam update, bilinear resize and
//! a flat binary parameter container. No autodiff graph; the model chains
//! forward and backward calls by hand.

mod adam;
mod conv;
mod io;
mod pool;
mod resize;

pub use adam::{adam_step, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS, PAPER_LR};
pub use conv::{conv2d_backward, conv2d_forward, conv_output_dims, ConvParams};
pub use io::{read_tensor_container, write_tensor_container, TensorEntry, CONTAINER_MAGIC};
pub use pool::{maxpool2x2, maxpool2x2_backward, relu, relu_backward, PoolIndices};
pub use resize::bilinear_resize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense tensor of shape (batch, channels, height, width), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4<T> {
    shape: [usize; 4],
    data: Vec<T>,
}

impl<T: Scalar> Tensor4<T> {
    pub fn zeros(shape: [usize; 4]) -> Self {
        Tensor4 {
            shape,
            data: vec![T::zero(); shape.iter().product()],
        }
    }

    pub fn from_vec(shape: [usize; 4], data: Vec<T>) -> Result<Self> {
        if data.len() != shape.iter().product::<usize>() {
            return Err(Error::shape(
                format!("{:?}", shape),
                format!("{} values", data.len()),
            ));
        }
        Ok(Tensor4 { shape, data })
    }

    pub fn shape(&self) -> [usize; 4] {
        self.shape
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn offset(&self, b: usize, c: usize, y: usize, x: usize) -> usize {
        ((b * self.shape[1] + c) * self.shape[2] + y) * self.shape[3] + x
    }

    #[inline]
    pub fn at(&self, b: usize, c: usize, y: usize, x: usize) -> T {
        self.data[self.offset(b, c, y, x)]
    }

    #[inline]
    pub fn at_mut(&mut self, b: usize, c: usize, y: usize, x: usize) -> &mut T {
        let i = self.offset(b, c, y, x);
        &mut self.data[i]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Errors when any entry is NaN or infinite.
    pub fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(context.to_string()));
        }
        Ok(())
    }
}
