//! Fully convolutional scanpath regressor.
//!
//! A small VGG-style backbone (conv 3x3 + ReLU blocks, each closed by a 2x2
//! max pool) followed by a readout convolution whose kernel spans the whole
//! final feature map, producing `2 * scanpath_len` channels at 1x1 spatial
//! size: the (x, y) coordinates of the predicted fixations in normalized
//! space. No output activation; coordinates are clamped to the unit square
//! only for evaluation, never inside the loss.

use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{
    conv2d_backward, conv2d_forward, maxpool2x2, maxpool2x2_backward, read_tensor_container,
    relu, relu_backward, write_tensor_container, ConvParams, PoolIndices, Tensor4, TensorEntry,
};

/// Architecture description: input geometry, conv blocks and readout length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// (height, width, channels) of the input image.
    pub input_size: (usize, usize, usize),
    /// Per block: (number of 3x3 conv layers, channel width). Each block
    /// ends with a 2x2 max pool.
    pub blocks: Vec<(usize, usize)>,
    /// Number of predicted fixations.
    pub scanpath_len: usize,
    /// Parameter initialization seed.
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            input_size: (64, 64, 3),
            blocks: vec![(2, 16), (2, 32), (2, 64)],
            scanpath_len: 8,
            seed: 0,
        }
    }
}

impl ModelConfig {
    /// Spatial dims of the feature map entering the readout layer.
    pub fn readout_kernel(&self) -> Result<(usize, usize)> {
        let (mut h, mut w, _) = self.input_size;
        for (convs, _) in &self.blocks {
            if *convs == 0 {
                return Err(Error::InvalidConfig("block with zero conv layers".into()));
            }
            if h < 2 || w < 2 || h % 2 != 0 || w % 2 != 0 {
                return Err(Error::InvalidConfig(format!(
                    "pooling needs even dims >= 2, got {h}x{w}"
                )));
            }
            h /= 2;
            w /= 2;
        }
        if h == 0 || w == 0 {
            return Err(Error::InvalidConfig(
                "blocks reduce spatial dims below 1".into(),
            ));
        }
        Ok((h, w))
    }

    fn validate(&self) -> Result<()> {
        let (h, w, c) = self.input_size;
        if h == 0 || w == 0 || c == 0 {
            return Err(Error::InvalidConfig("input dims must be positive".into()));
        }
        if self.scanpath_len == 0 {
            return Err(Error::InvalidConfig("scanpath_len must be >= 1".into()));
        }
        if self.blocks.iter().any(|&(_, width)| width == 0) {
            return Err(Error::InvalidConfig("block width must be >= 1".into()));
        }
        self.readout_kernel().map(|_| ())
    }
}

/// The regressor: backbone conv layers plus the readout layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub config: ModelConfig,
    /// Backbone convs in forward order (block by block), then the readout
    /// conv as the last element.
    layers: Vec<ConvParams<T>>,
}

/// Raw and clamped predicted fixation coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedScanpath<T> {
    pub points: Vec<(T, T)>,
    pub clamped: Vec<(T, T)>,
}

impl<T: Scalar> PredictedScanpath<T> {
    fn from_raw(points: Vec<(T, T)>) -> Self {
        let clamped = points
            .iter()
            .map(|&(x, y)| {
                (
                    x.max(T::zero()).min(T::one()),
                    y.max(T::zero()).min(T::one()),
                )
            })
            .collect();
        PredictedScanpath { points, clamped }
    }

    /// Clamped points as a scanpath over the given image.
    pub fn to_scanpath(
        &self,
        image_id: impl Into<String>,
        width: u32,
        height: u32,
    ) -> Result<crate::gaze::Scanpath<T>> {
        crate::gaze::Scanpath::new(
            self.clamped
                .iter()
                .map(|&(x, y)| crate::gaze::Fixation::new(x, y))
                .collect(),
            image_id,
            width,
            height,
        )
    }
}

/// All gradients of one backward pass, ordered like `Model::layers`.
#[derive(Debug, Clone)]
pub struct ModelGradients<T> {
    pub weights: Vec<Tensor4<T>>,
    pub biases: Vec<Vec<T>>,
}

impl<T: Scalar> Model<T> {
    /// Builds the model with He-uniform (fan-in) initialized weights and
    /// zero biases, deterministically from `config.seed`.
    pub fn build(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut layers = Vec::new();
        let mut in_ch = config.input_size.2;
        for &(convs, width) in &config.blocks {
            for _ in 0..convs {
                layers.push(init_conv(&mut rng, width, in_ch, 3, 3, 1));
                in_ch = width;
            }
        }
        let (rh, rw) = config.readout_kernel()?;
        layers.push(init_conv(&mut rng, 2 * config.scanpath_len, in_ch, rh, rw, 0));
        Ok(Model { config, layers })
    }

    pub fn layers(&self) -> &[ConvParams<T>] {
        &self.layers
    }

    /// Mutable access to one layer's flat weights.
    pub fn layer_weights_mut(&mut self, idx: usize) -> &mut [T] {
        self.layers[idx].weights.data_mut()
    }

    /// Mutable access to one layer's bias vector.
    pub fn layer_bias_mut(&mut self, idx: usize) -> &mut [T] {
        &mut self.layers[idx].bias
    }

    /// Flat lengths of every parameter tensor, weights and biases
    /// interleaved per layer. Matches the ordering of [`ModelGradients`].
    pub fn param_lens(&self) -> Vec<usize> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.numel(), l.bias.len()])
            .collect()
    }

    /// Applies one optimizer step via the provided closure, which receives
    /// parameter and gradient slices in `param_lens` order.
    pub fn update_params(
        &mut self,
        grads: &ModelGradients<T>,
        mut step: impl FnMut(&mut [&mut [T]], &[&[T]]) -> Result<()>,
    ) -> Result<()> {
        let mut params: Vec<&mut [T]> = Vec::new();
        for layer in &mut self.layers {
            params.push(layer.weights.data_mut());
            params.push(&mut layer.bias);
        }
        let mut grad_slices: Vec<&[T]> = Vec::new();
        for (gw, gb) in grads.weights.iter().zip(&grads.biases) {
            grad_slices.push(gw.data());
            grad_slices.push(gb);
        }
        step(&mut params, &grad_slices)
    }

    fn check_input(&self, image: &Tensor4<T>) -> Result<()> {
        let (h, w, c) = self.config.input_size;
        if image.shape() != [1, c, h, w] {
            return Err(Error::shape(
                format!("[1, {c}, {h}, {w}]"),
                format!("{:?}", image.shape()),
            ));
        }
        Ok(())
    }

    /// Forward pass keeping every intermediate needed by backprop.
    fn forward_trace(&self, image: &Tensor4<T>) -> Result<ForwardTrace<T>> {
        self.check_input(image)?;
        image.ensure_finite("model input")?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pools: Vec<(usize, PoolIndices)> = Vec::new();
        let mut cur = image.clone();
        let mut layer_idx = 0;
        for &(convs, _) in &self.config.blocks {
            for _ in 0..convs {
                inputs.push(cur.clone());
                let z = conv2d_forward(&cur, &self.layers[layer_idx])?;
                cur = relu(&z);
                // relu_backward masks on the conv output, which is what we
                // store as the *next* layer's input; keep z separately.
                inputs.push(z);
                layer_idx += 1;
            }
            let (pooled, idx) = maxpool2x2(&cur)?;
            pools.push((layer_idx, idx));
            cur = pooled;
        }
        inputs.push(cur.clone());
        let out = conv2d_forward(&cur, &self.layers[layer_idx])?;
        out.ensure_finite("model output")?;
        Ok(ForwardTrace {
            inputs,
            pools,
            output: out,
        })
    }

    /// Predicts the fixation coordinates for a single image.
    pub fn predict(&self, image: &Tensor4<T>) -> Result<PredictedScanpath<T>> {
        let trace = self.forward_trace(image)?;
        Ok(PredictedScanpath::from_raw(output_to_points(
            &trace.output,
            self.config.scanpath_len,
        )?))
    }

    /// MSE loss against a target of `scanpath_len` normalized fixations and
    /// the gradients of every parameter.
    ///
    /// The loss averages over all `2 * scanpath_len` scalar coordinates and
    /// is computed on the unclamped output.
    pub fn loss_and_grads(
        &self,
        image: &Tensor4<T>,
        target: &crate::gaze::Scanpath<T>,
    ) -> Result<(T, ModelGradients<T>)> {
        let len = self.config.scanpath_len;
        if target.len() != len {
            return Err(Error::shape(
                format!("target of {len} fixations"),
                format!("{}", target.len()),
            ));
        }
        let trace = self.forward_trace(image)?;
        let n_coords = T::from_f64_lossy((2 * len) as f64);

        // Output is (1, 2*len, 1, 1); channel 2k is x_k, channel 2k+1 is y_k.
        let mut loss = T::zero();
        let mut out_grad = Tensor4::zeros(trace.output.shape());
        for k in 0..len {
            let tx = target.fixations[k].x;
            let ty = target.fixations[k].y;
            let px = trace.output.at(0, 2 * k, 0, 0);
            let py = trace.output.at(0, 2 * k + 1, 0, 0);
            loss += (px - tx) * (px - tx) + (py - ty) * (py - ty);
            let two = T::one() + T::one();
            *out_grad.at_mut(0, 2 * k, 0, 0) = two * (px - tx) / n_coords;
            *out_grad.at_mut(0, 2 * k + 1, 0, 0) = two * (py - ty) / n_coords;
        }
        loss /= n_coords;
        if !loss.is_finite() {
            return Err(Error::NonFinite("training loss".into()));
        }

        let grads = self.backward(&trace, out_grad)?;
        Ok((loss, grads))
    }

    fn backward(&self, trace: &ForwardTrace<T>, out_grad: Tensor4<T>) -> Result<ModelGradients<T>> {
        let n_layers = self.layers.len();
        let mut grad_w: Vec<Option<Tensor4<T>>> = vec![None; n_layers];
        let mut grad_b: Vec<Option<Vec<T>>> = vec![None; n_layers];

        // Readout layer: input is the last stored tensor.
        let readout_idx = n_layers - 1;
        let readout_in = trace.inputs.last().unwrap();
        let (mut upstream, gw, gb) =
            conv2d_backward(readout_in, &self.layers[readout_idx], &out_grad)?;
        grad_w[readout_idx] = Some(gw);
        grad_b[readout_idx] = Some(gb);

        // Walk the blocks in reverse. inputs[2*i] is conv layer i's input,
        // inputs[2*i + 1] its pre-ReLU output.
        let mut pool_iter = trace.pools.iter().rev().peekable();
        for layer_idx in (0..readout_idx).rev() {
            if let Some(&&(pool_after, _)) = pool_iter.peek() {
                if pool_after == layer_idx + 1 {
                    let (_, indices) = pool_iter.next().unwrap();
                    upstream = maxpool2x2_backward(indices, &upstream)?;
                }
            }
            let z = &trace.inputs[2 * layer_idx + 1];
            let masked = relu_backward(z, &upstream)?;
            let layer_in = &trace.inputs[2 * layer_idx];
            let (gx, gw, gb) = conv2d_backward(layer_in, &self.layers[layer_idx], &masked)?;
            grad_w[layer_idx] = Some(gw);
            grad_b[layer_idx] = Some(gb);
            upstream = gx;
        }
        upstream.ensure_finite("input gradient")?;

        Ok(ModelGradients {
            weights: grad_w.into_iter().map(Option::unwrap).collect(),
            biases: grad_b.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// Writes the parameter container plus a `.json` architecture sidecar.
    pub fn save_checkpoint(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut entries = Vec::new();
        for layer in &self.layers {
            let s = layer.weights.shape();
            entries.push(TensorEntry::from_slice(
                s.iter().map(|&d| d as u32).collect(),
                layer.weights.data(),
            )?);
            entries.push(TensorEntry::from_slice(
                vec![layer.bias.len() as u32],
                &layer.bias,
            )?);
        }
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        write_tensor_container(&entries, &mut w)?;
        let sidecar = sidecar_path(path);
        let json = serde_json::to_string_pretty(&self.config)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        std::fs::write(sidecar, json + "\n")?;
        Ok(())
    }

    /// Loads a checkpoint written by [`Model::save_checkpoint`].
    pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let sidecar = sidecar_path(path);
        let json = std::fs::read_to_string(&sidecar)?;
        let config: ModelConfig = serde_json::from_str(&json).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("architecture sidecar: {e}"),
        })?;
        let mut model = Model::build(config)?;
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let entries = read_tensor_container(&mut r)?;
        if entries.len() != model.layers.len() * 2 {
            return Err(Error::shape(
                format!("{} tensors", model.layers.len() * 2),
                format!("{}", entries.len()),
            ));
        }
        for (i, layer) in model.layers.iter_mut().enumerate() {
            let we = &entries[2 * i];
            let be = &entries[2 * i + 1];
            let wshape: Vec<u32> = layer.weights.shape().iter().map(|&d| d as u32).collect();
            if we.dims != wshape || be.dims != vec![layer.bias.len() as u32] {
                return Err(Error::shape(
                    format!("layer {i} dims {:?}", wshape),
                    format!("{:?}", we.dims),
                ));
            }
            for (dst, src) in layer.weights.data_mut().iter_mut().zip(&we.values) {
                *dst = T::from_f64_lossy(*src);
            }
            for (dst, src) in layer.bias.iter_mut().zip(&be.values) {
                *dst = T::from_f64_lossy(*src);
            }
        }
        Ok(model)
    }
}

/// Sidecar lives next to the binary container with `.json` appended.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".json");
    std::path::PathBuf::from(os)
}

struct ForwardTrace<T> {
    /// For conv layer i of the backbone: inputs[2*i] is its input,
    /// inputs[2*i+1] its pre-ReLU output. The final element is the readout
    /// layer's input.
    inputs: Vec<Tensor4<T>>,
    /// (layer index the pool sits after, argmax bookkeeping).
    pools: Vec<(usize, PoolIndices)>,
    output: Tensor4<T>,
}

fn init_conv<T: Scalar>(
    rng: &mut ChaCha8Rng,
    out_ch: usize,
    in_ch: usize,
    kh: usize,
    kw: usize,
    padding: usize,
) -> ConvParams<T> {
    let mut p = ConvParams::zeros(out_ch, in_ch, kh, kw);
    p.padding = padding;
    let fan_in = (in_ch * kh * kw) as f64;
    let limit = (6.0 / fan_in).sqrt();
    for v in p.weights.data_mut() {
        *v = T::from_f64_lossy(rng.random_range(-limit..limit));
    }
    p
}

fn output_to_points<T: Scalar>(out: &Tensor4<T>, len: usize) -> Result<Vec<(T, T)>> {
    if out.shape() != [1, 2 * len, 1, 1] {
        return Err(Error::shape(
            format!("[1, {}, 1, 1]", 2 * len),
            format!("{:?}", out.shape()),
        ));
    }
    Ok((0..len)
        .map(|k| (out.at(0, 2 * k, 0, 0), out.at(0, 2 * k + 1, 0, 0)))
        .collect())
}
