//! Bilinear image resize on (batch, channels, h, w) tensors.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor4;

/// Bilinear resample to `(out_h, out_w)`, sampling at pixel centers and
/// clamping at the borders.
pub fn bilinear_resize<T: Scalar>(x: &Tensor4<T>, out_h: usize, out_w: usize) -> Result<Tensor4<T>> {
    let [batch, ch, in_h, in_w] = x.shape();
    if out_h == 0 || out_w == 0 {
        return Err(Error::shape("positive output dims", format!("{out_h}x{out_w}")));
    }
    if in_h == out_h && in_w == out_w {
        return Ok(x.clone());
    }
    let mut out = Tensor4::zeros([batch, ch, out_h, out_w]);
    let sy = in_h as f64 / out_h as f64;
    let sx = in_w as f64 / out_w as f64;
    for b in 0..batch {
        for c in 0..ch {
            for oy in 0..out_h {
                let fy = ((oy as f64 + 0.5) * sy - 0.5).clamp(0.0, (in_h - 1) as f64);
                let y0 = fy.floor() as usize;
                let y1 = (y0 + 1).min(in_h - 1);
                let wy = T::from_f64_lossy(fy - y0 as f64);
                for ox in 0..out_w {
                    let fx = ((ox as f64 + 0.5) * sx - 0.5).clamp(0.0, (in_w - 1) as f64);
                    let x0 = fx.floor() as usize;
                    let x1 = (x0 + 1).min(in_w - 1);
                    let wx = T::from_f64_lossy(fx - x0 as f64);
                    let one = T::one();
                    let v = x.at(b, c, y0, x0) * (one - wy) * (one - wx)
                        + x.at(b, c, y0, x1) * (one - wy) * wx
                        + x.at(b, c, y1, x0) * wy * (one - wx)
                        + x.at(b, c, y1, x1) * wy * wx;
                    *out.at_mut(b, c, oy, ox) = v;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_when_same_size() {
        let x = Tensor4::from_vec([1, 1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(bilinear_resize(&x, 2, 2).unwrap(), x);
    }

    #[test]
    fn constant_stays_constant() {
        let x = Tensor4::from_vec([1, 2, 3, 3], vec![0.7; 18]).unwrap();
        let y = bilinear_resize(&x, 5, 7).unwrap();
        assert!(y.data().iter().all(|&v: &f64| (v - 0.7).abs() < 1e-12));
    }

    #[test]
    fn downsample_averages() {
        let x: Tensor4<f64> = Tensor4::from_vec([1, 1, 2, 2], vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        let y = bilinear_resize(&x, 1, 1).unwrap();
        assert!((y.data()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upsampled_ramp_is_monotone() {
        let x = Tensor4::from_vec([1, 1, 1, 4], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let y = bilinear_resize(&x, 1, 8).unwrap();
        for w in y.data().windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert_eq!(y.data()[0], 0.0);
        assert_eq!(y.data()[7], 3.0);
    }
}
