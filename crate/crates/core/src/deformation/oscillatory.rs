//! Cutoff-regularised evaluation of oscillatory integrals
//!
//! ```text
//! int int a(u, v) exp(i u.v) du dv = lim_m int int a(u, v) exp(i u.v) psi_m(u) psi_m(v) du dv
//! ```
//!
//! by brute-force quadrature over a ladder of cutoff radii. This is a slow
//! reference path used to validate the fast deformed product; it never
//! touches FFTs.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{self, AlgebraElement, ZERO};
use crate::error::{Error, Result};

/// `exp(-1/t)` glued smoothly into a step from 0 (at 0) to 1 (at 1).
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

pub fn smooth_step_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let da = a / (t * t);
    let db = -b / ((1.0 - t) * (1.0 - t));
    (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
}

/// One-dimensional plateau profile: 1 on `|t| <= plateau`, 0 on `|t| >= 1`.
pub fn plateau(t: f64, plateau: f64) -> f64 {
    1.0 - smooth_step((t.abs() - plateau) / (1.0 - plateau))
}

pub fn plateau_derivative(t: f64, plateau: f64) -> f64 {
    -t.signum() * smooth_step_derivative((t.abs() - plateau) / (1.0 - plateau)) / (1.0 - plateau)
}

/// `sup |chi'|` of the plateau profile, from a fine sampling of the
/// transition layer (the maximum sits in its interior).
pub fn plateau_derivative_sup(p: f64) -> f64 {
    (0..=20_000).map(|i| plateau_derivative(p + (1.0 - p) * i as f64 / 20_000.0, p).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffShape {
    /// `psi_m(u) = chi(|u| / s_m)`.
    Radial,
    /// `psi_m(u) = prod_a chi(u_a / s_m)`.
    Tensor,
}

/// Cutoffs `psi_m` equal to 1 on the ball of radius `r_m = base_radius 2^m`
/// and supported in the ball (or cube) of radius `r_m / plateau`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffFamily {
    pub shape: CutoffShape,
    pub plateau: f64,
    pub base_radius: f64,
    pub levels: usize,
}

impl CutoffFamily {
    pub fn new(shape: CutoffShape, plateau: f64, base_radius: f64, levels: usize) -> Result<Self> {
        if !(plateau > 0.0 && plateau < 1.0) {
            return Err(Error::Invalid(format!("plateau fraction must lie in (0, 1), got {plateau}")));
        }
        if !(base_radius > 0.0) || levels < 2 {
            return Err(Error::Invalid("cutoff ladder needs a positive radius and at least two levels".into()));
        }
        Ok(Self { shape, plateau, base_radius, levels })
    }

    pub fn radius(&self, level: usize) -> f64 {
        self.base_radius * (1u64 << level) as f64
    }

    pub fn support(&self, level: usize) -> f64 {
        self.radius(level) / self.plateau
    }

    pub fn value(&self, u: &[f64], level: usize) -> f64 {
        let s = self.support(level);
        match self.shape {
            CutoffShape::Radial => plateau(u.iter().map(|v| v * v).sum::<f64>().sqrt() / s, self.plateau),
            CutoffShape::Tensor => u.iter().map(|v| plateau(v / s, self.plateau)).product(),
        }
    }
}

/// The amplitude `a(u, v)` multiplying `exp(i u.v)`.
pub enum Amplitude<'a> {
    /// `a(u, v) = A(u) B(v)` (matrix product in this order). Any dimension.
    Product {
        left: &'a dyn Fn(&[f64], &mut [Complex64]),
        right: &'a dyn Fn(&[f64], &mut [Complex64]),
    },
    /// General amplitude; supported for `n = 1` only because the quadrature
    /// costs `M^(2n)` evaluations.
    General(&'a dyn Fn(&[f64], &[f64], &mut [Complex64])),
}

#[derive(Debug, Clone)]
pub struct OscillatoryResult {
    pub value: AlgebraElement,
    /// `||I_m - I_{m-1}||` at the accepted level.
    pub gap: f64,
    pub level: usize,
    pub radius: f64,
}

/// Cauchy-converged cutoff quadrature of
/// `int int a(u, v) exp(i u.v) psi_m(u) psi_m(v) du dv` (symmetric measures).
/// Stops at the first level whose gap to the previous one is below
/// `tol * max(1, ||I_m||)`.
pub fn oscillatory_integral(n: usize, k: usize, amplitude: &Amplitude, cutoffs: &CutoffFamily, tol: f64) -> Result<OscillatoryResult> {
    if matches!(amplitude, Amplitude::General(_)) && n != 1 {
        return Err(Error::Capability("general amplitudes are evaluated for n = 1 only; factor the amplitude".into()));
    }
    let mut prev: Option<AlgebraElement> = None;
    let mut gap = f64::INFINITY;
    for level in 0..cutoffs.levels {
        let value = level_integral(n, k, amplitude, cutoffs, level);
        if let Some(p) = &prev {
            gap = (&value - p).cnorm();
            if gap <= tol * value.cnorm().max(1.0) {
                return Ok(OscillatoryResult { value, gap, level, radius: cutoffs.radius(level) });
            }
        }
        prev = Some(value);
    }
    Err(Error::Divergence { gap, tol })
}

fn level_integral(n: usize, k: usize, amplitude: &Amplitude, cutoffs: &CutoffFamily, level: usize) -> AlgebraElement {
    let s = cutoffs.support(level);
    // resolves exp(i u v) for |u|, |v| <= s with room for the amplitude's own bandwidth
    let step = PI / (2.0 * s + 4.0);
    let m = (2.0 * s / step).ceil() as usize + 1;
    let step = 2.0 * s / (m - 1) as f64;
    let nodes: Vec<f64> = (0..m).map(|i| -s + i as f64 * step).collect();
    let kk = k * k;
    let weight = (2.0 * PI).powi(-(n as i32)) * step.powi(2 * n as i32);
    let total = m.pow(n as u32);
    let point = |idx: usize, out: &mut [f64]| {
        let mut rem = idx;
        for a in (0..n).rev() {
            out[a] = nodes[rem % m];
            rem /= m;
        }
    };
    let mut acc = vec![ZERO; kk];
    match amplitude {
        Amplitude::Product { left, right } => {
            // X(v) = psi(v) B(v)
            let mut x = vec![ZERO; total * kk];
            let mut v = vec![0.0; n];
            for idx in 0..total {
                point(idx, &mut v);
                let c = cutoffs.value(&v, level);
                if c != 0.0 {
                    right(&v, &mut x[idx * kk..(idx + 1) * kk]);
                    x[idx * kk..(idx + 1) * kk].iter_mut().for_each(|z| *z *= c);
                }
            }
            // B~(u) = sum_v exp(i u.v) X(v), one axis at a time
            let table: Vec<Complex64> =
                (0..m * m).map(|ij| Complex64::from_polar(1.0, nodes[ij / m] * nodes[ij % m])).collect();
            let mut shape_inner = kk;
            for axis in (0..n).rev() {
                let outer = total / m.pow((n - axis) as u32);
                let mut y = vec![ZERO; total * kk];
                for o in 0..outer {
                    let base = o * m * shape_inner;
                    for i in 0..m {
                        let dst = &mut y[base + i * shape_inner..base + (i + 1) * shape_inner];
                        for j in 0..m {
                            let e = table[i * m + j];
                            let src = &x[base + j * shape_inner..base + (j + 1) * shape_inner];
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d += e * s;
                            }
                        }
                    }
                }
                x = y;
                shape_inner *= m;
            }
            let mut u = vec![0.0; n];
            let mut a = vec![ZERO; kk];
            for idx in 0..total {
                point(idx, &mut u);
                let c = cutoffs.value(&u, level);
                if c == 0.0 {
                    continue;
                }
                left(&u, &mut a);
                algebra::matmul_acc(&mut acc, &a, &x[idx * kk..(idx + 1) * kk], k, Complex64::new(c * weight, 0.0));
            }
        }
        Amplitude::General(f) => {
            let mut a = vec![ZERO; kk];
            for (iu, &u) in nodes.iter().enumerate() {
                let cu = cutoffs.value(&[u], level);
                if cu == 0.0 {
                    continue;
                }
                for &v in &nodes[..] {
                    let c = cu * cutoffs.value(&[v], level);
                    if c == 0.0 {
                        continue;
                    }
                    f(&[nodes[iu]], &[v], &mut a);
                    let e = Complex64::from_polar(c * weight, u * v);
                    for (d, s) in acc.iter_mut().zip(&a) {
                        *d += e * s;
                    }
                }
            }
        }
    }
    AlgebraElement::from_entries(k, acc)
}
