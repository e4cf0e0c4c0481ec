//! Minimal n-dimensional FFT driver on flat complex buffers.
//!
//! Transforms are unnormalized in both directions (matching the underlying
//! one-dimensional kernels); callers apply their own scaling. Plans are
//! cached per thread and per (length, direction).

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
                FftPlanner::new().plan_fft(len, dir)
            })
            .clone()
    })
}

/// Unnormalized DFT along every axis of a row-major array of the given
/// shape (axis 0 outermost). `forward` uses the `e^{-i x.xi}` sign.
pub(crate) fn transform_nd(data: &mut [Complex64], shape: &[usize], forward: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "buffer does not match shape");
    let ndim = shape.len();
    for axis in 0..ndim {
        let len = shape[axis];
        if len == 1 {
            continue;
        }
        let fft = plan(len, forward);
        let stride: usize = shape[axis + 1..].iter().product();
        if stride == 1 {
            // Contiguous lanes: transform chunks in place.
            for chunk in data.chunks_exact_mut(len) {
                fft.process(chunk);
            }
        } else {
            let mut lane = vec![Complex64::default(); len];
            let block = stride * len;
            let n_blocks = total / block;
            for b in 0..n_blocks {
                let base = b * block;
                for off in 0..stride {
                    for (k, slot) in lane.iter_mut().enumerate() {
                        *slot = data[base + off + k * stride];
                    }
                    fft.process(&mut lane);
                    for (k, slot) in lane.iter().enumerate() {
                        data[base + off + k * stride] = *slot;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx3(shape: &[usize], i: usize, j: usize, k: usize) -> usize {
        (i * shape[1] + j) * shape[2] + k
    }

    #[test]
    fn matches_direct_dft_in_3d() {
        let shape = [4usize, 2, 3];
        let total: usize = shape.iter().product();
        let mut data: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = data.clone();
        transform_nd(&mut data, &shape, true);
        // Direct triple-loop DFT for one arbitrary output index.
        let (a, b, c) = (3usize, 1usize, 2usize);
        let mut acc = Complex64::default();
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    let phase = -2.0
                        * std::f64::consts::PI
                        * (a as f64 * i as f64 / shape[0] as f64
                            + b as f64 * j as f64 / shape[1] as f64
                            + c as f64 * k as f64 / shape[2] as f64);
                    acc += orig[idx3(&shape, i, j, k)] * Complex64::from_polar(1.0, phase);
                }
            }
        }
        let got = data[idx3(&shape, a, b, c)];
        assert!((got - acc).norm() < 1e-10 * (1.0 + acc.norm()));
    }

    #[test]
    fn forward_then_inverse_is_scaling_by_total() {
        let shape = [8usize, 8];
        let total: usize = shape.iter().product();
        let orig: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new((i as f64).sin(), (2.0 + i as f64).cos()))
            .collect();
        let mut data = orig.clone();
        transform_nd(&mut data, &shape, true);
        transform_nd(&mut data, &shape, false);
        for (x, y) in data.iter().zip(&orig) {
            assert!((x / total as f64 - y).norm() < 1e-12);
        }
    }
}
