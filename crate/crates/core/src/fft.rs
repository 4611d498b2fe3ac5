//! Multi-dimensional FFT plumbing over flat sample arrays.
//!
//! Arrays are row-major over `shape` with `comps` complex components stored
//! innermost at every sample (the `k x k` matrix entries).

use std::f64::consts::PI;

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    // One plan per (length, direction), each from a fresh planner: a shared
    // planner may pick a different recipe for a length depending on what it
    // has already cached, which changes results in the last bit.
    static PLANS: RefCell<BTreeMap<(usize, bool), Arc<dyn Fft<f64>>>> = const { RefCell::new(BTreeMap::new()) };
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry((len, inverse))
            .or_insert_with(|| {
                let direction = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
                FftPlanner::new().plan_fft(len, direction)
            })
            .clone()
    })
}

/// Unnormalised DFT along each of `axes`.
pub fn fft_axes(data: &mut [Complex64], shape: &[usize], comps: usize, axes: &[usize], inverse: bool) {
    for &axis in axes {
        let len = shape[axis];
        let inner: usize = shape[axis + 1..].iter().product::<usize>() * comps;
        let outer: usize = shape[..axis].iter().product();
        let fft = plan(len, inverse);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::default(); len * inner];
        for o in 0..outer {
            let block = &mut data[o * len * inner..(o + 1) * len * inner];
            // transpose the block so each line is contiguous
            for j in 0..len {
                for i in 0..inner {
                    line[i * len + j] = block[j * inner + i];
                }
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for j in 0..len {
                for i in 0..inner {
                    block[j * inner + i] = line[i * len + j];
                }
            }
        }
    }
}

/// Applies `f(axis, index)` as a multiplicative factor along `axes`.
fn scale_axes(data: &mut [Complex64], shape: &[usize], comps: usize, axes: &[usize], f: impl Fn(usize, usize) -> Complex64) {
    for &axis in axes {
        let len = shape[axis];
        let inner: usize = shape[axis + 1..].iter().product::<usize>() * comps;
        let factors: Vec<Complex64> = (0..len).map(|j| f(axis, j)).collect();
        for (chunk_idx, chunk) in data.chunks_mut(inner).enumerate() {
            let c = factors[chunk_idx % len];
            if c != Complex64::new(1.0, 0.0) {
                chunk.iter_mut().for_each(|z| *z *= c);
            }
        }
    }
}

/// Spectral samples below this fraction of the peak are treated as zero by
/// the sparse product and quadrature paths. A sampled plane wave carries
/// roundoff of about 1e-16 of its peak in every other mode.
pub(crate) const SPECTRAL_CUTOFF: f64 = 1e-15;

/// Centred DFT along `axes`:
/// `out[m] = sum_j exp(-+ 2 pi i (j - N/2)(m - N/2) / N) in[j]`, minus sign for
/// the forward direction. No scaling is applied.
///
/// This is the exact sum `sum_j exp(-+ i x_j xi_m) in[j]` for a grid centred on
/// the origin and its dual, and it reduces to an ordinary FFT wrapped in
/// `(-1)^j` and `(-1)^(m + N/2)` sign flips.
pub fn centered_dft(data: &mut [Complex64], shape: &[usize], comps: usize, axes: &[usize], inverse: bool) {
    let sign = |j: usize| if j % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(-1.0, 0.0) };
    scale_axes(data, shape, comps, axes, |_, j| sign(j));
    fft_axes(data, shape, comps, axes, inverse);
    scale_axes(data, shape, comps, axes, |axis, m| sign(m + shape[axis] / 2));
}

/// Signed FFT index: `m` for `m < N/2`, `m - N` otherwise.
#[inline]
pub fn signed_index(m: usize, len: usize) -> i64 {
    if m < len / 2 {
        m as i64
    } else {
        m as i64 - len as i64
    }
}

/// Periodic spectral multiplier: transforms along every axis, multiplies by
/// `symbol(wavenumbers)` where axis `a` has wavenumbers
/// `2 pi m / (N_a h_a)` for signed `m`, and transforms back.
///
/// `symbol` also receives the signed index of each axis, so callers can treat
/// the Nyquist mode (`m = -N/2`) specially.
pub fn spectral_multiply<F>(data: &mut [Complex64], shape: &[usize], comps: usize, spacings: &[f64], symbol: F)
where
    F: Fn(&[f64], &[i64]) -> Complex64,
{
    let axes: Vec<usize> = (0..shape.len()).collect();
    fft_axes(data, shape, comps, &axes, false);
    let total: usize = shape.iter().product();
    let norm = 1.0 / total as f64;
    let dims = shape.len();
    let mut k = vec![0.0; dims];
    let mut m = vec![0i64; dims];
    for (idx, chunk) in data.chunks_mut(comps).enumerate() {
        let mut rem = idx;
        for a in (0..dims).rev() {
            let mi = rem % shape[a];
            rem /= shape[a];
            m[a] = signed_index(mi, shape[a]);
            k[a] = 2.0 * PI * m[a] as f64 / (shape[a] as f64 * spacings[a]);
        }
        let c = symbol(&k, &m) * norm;
        chunk.iter_mut().for_each(|z| *z *= c);
    }
    fft_axes(data, shape, comps, &axes, true);
}
