//! Randomised lower estimates of `sup ||T u||_2 / ||u||_2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, ZERO};
use crate::error::Result;
use crate::families::random_element;
use crate::grid::GridSpec;
use crate::module_space::{module_norm, ModuleFunction};
use crate::operator::OperatorHandle;

use super::symbol_to_kernel;

const POWER_ITERATIONS: usize = 30;
const POWER_TOL: f64 = 1e-8;

/// A lower bound on the operator norm, with the input that attains it.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub estimate: f64,
    pub trials: usize,
    /// Matrix-vector products spent in the scalar refinement.
    pub power_iterations: usize,
    pub witness: ModuleFunction,
}

fn ratio(t: &OperatorHandle, u: &ModuleFunction) -> Result<f64> {
    let nu = module_norm(u);
    if nu == 0.0 {
        return Ok(0.0);
    }
    Ok(module_norm(&t.apply(u)?) / nu)
}

/// Band-limited random trial: random coefficients on the lowest quarter of
/// the modes on each axis, or a narrow Gaussian bump at a random grid point.
fn trial(rng: &mut ChaCha8Rng, grid: &GridSpec, k: usize, index: usize) -> ModuleFunction {
    let n = grid.n();
    if index % 2 == 1 {
        let centre = grid.point(rng.gen_range(0..grid.len()));
        let width = grid.spacing() * rng.gen_range(1.0..4.0);
        let c = random_element(rng, k);
        return ModuleFunction::from_fn(*grid, k, |x| {
            let r2: f64 = x.iter().zip(&centre).map(|(a, b)| (a - b) * (a - b)).sum();
            c.scale(Complex64::new((-0.5 * r2 / (width * width)).exp(), 0.0))
        });
    }
    let band = (grid.points() / 8).max(1) as i64;
    let dual = grid.frequency_spacing();
    let modes: Vec<(Vec<f64>, AlgebraElement)> = (0..6)
        .map(|_| {
            let p = (0..n).map(|_| rng.gen_range(-band..=band) as f64 * dual).collect();
            (p, random_element(rng, k))
        })
        .collect();
    ModuleFunction::from_fn(*grid, k, |x| {
        let mut acc = AlgebraElement::zeros(k);
        for (p, c) in &modes {
            let ph: f64 = p.iter().zip(x).map(|(a, b)| a * b).sum();
            acc = &acc + &c.scale(Complex64::from_polar(1.0, ph));
        }
        acc
    })
}

/// Lower estimate of the operator norm of `t` on `grid`.
///
/// Every run evaluates `trials` seeded random inputs. For scalar functions
/// the best of them seeds a power iteration on `T^* T`: on the dense kernel
/// matrix for a pseudo-differential operator, through `apply` and the
/// adjoint handle otherwise. The returned value is `||T w|| / ||w||` for the
/// reported witness `w`, so it never exceeds the true norm of the discrete
/// operator.
pub fn operator_norm_estimate(
    t: &OperatorHandle,
    grid: &GridSpec,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<NormEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // scalar pseudo-differential operators are applied through their kernel
    // matrix, which is built once
    let kernel = match t {
        OperatorHandle::Pdo(a) if k == 1 => Some(symbol_to_kernel(a, grid)?),
        _ => None,
    };
    let ratio = |u: &ModuleFunction| -> Result<f64> {
        match &kernel {
            Some(kf) => {
                let nu = module_norm(u);
                Ok(if nu == 0.0 { 0.0 } else { module_norm(&dense_apply(kf.data(), grid, u, false)) / nu })
            }
            None => ratio(t, u),
        }
    };
    let mut best = ModuleFunction::constant(*grid, &AlgebraElement::identity(k));
    let mut best_ratio = ratio(&best)?;
    for i in 0..trials {
        let u = trial(&mut rng, grid, k, i);
        let r = ratio(&u)?;
        if r > best_ratio {
            best_ratio = r;
            best = u;
        }
    }
    let mut iterations = 0;
    if let Some(kf) = &kernel {
        let (w, its) = power_iterate(&best, |v| dense_apply(kf.data(), grid, v, false), |v| dense_apply(kf.data(), grid, v, true));
        iterations = its;
        let r = ratio(&w)?;
        if r > best_ratio {
            best_ratio = r;
            best = w;
        }
    } else if k == 1 && t.is_adjointable() {
        let adj = t.adjoint(grid)?;
        let mut err = None;
        let (w, its) = power_iterate(
            &best,
            |v| t.apply(v).unwrap_or_else(|e| { err.get_or_insert(e); v.clone() }),
            |v| adj.apply(v).unwrap_or_else(|_| v.clone()),
        );
        if let Some(e) = err {
            return Err(e);
        }
        iterations = its;
        let r = ratio(&w)?;
        if r > best_ratio {
            best_ratio = r;
            best = w;
        }
    }
    Ok(NormEstimate { estimate: best_ratio, trials, power_iterations: iterations, witness: best })
}

/// `h^n K v` or its conjugate transpose, with `K` the kernel sample matrix.
fn dense_apply(kernel: &[Complex64], grid: &GridSpec, v: &ModuleFunction, adjoint: bool) -> ModuleFunction {
    let np = grid.len();
    let w = grid.cell_volume();
    let mut out = ModuleFunction::zeros(*grid, 1);
    let src = v.data();
    let dst = out.data_mut();
    if adjoint {
        for (ix, row) in kernel.chunks(np).enumerate() {
            let s = src[ix] * w;
            for (d, kv) in dst.iter_mut().zip(row) {
                *d += kv.conj() * s;
            }
        }
    } else {
        for (d, row) in dst.iter_mut().zip(kernel.chunks(np)) {
            let acc: Complex64 = row.iter().zip(src).fold(ZERO, |a, (kv, s)| a + kv * s);
            *d = acc * w;
        }
    }
    out
}

/// Power iteration for the top singular vector of `A`.
fn power_iterate(
    start: &ModuleFunction,
    mut apply: impl FnMut(&ModuleFunction) -> ModuleFunction,
    mut adjoint: impl FnMut(&ModuleFunction) -> ModuleFunction,
) -> (ModuleFunction, usize) {
    let normalise = |v: &ModuleFunction| {
        let s = module_norm(v);
        if s > 0.0 {
            v.scale(Complex64::new(1.0 / s, 0.0))
        } else {
            v.clone()
        }
    };
    let mut v = normalise(start);
    let mut last = 0.0;
    for it in 1..=POWER_ITERATIONS {
        let w = adjoint(&apply(&v));
        let lambda = module_norm(&w);
        if lambda == 0.0 {
            return (v, it);
        }
        v = normalise(&w);
        if (lambda - last).abs() <= POWER_TOL * lambda {
            return (v, it);
        }
        last = lambda;
    }
    (v, POWER_ITERATIONS)
}
