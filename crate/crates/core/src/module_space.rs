//! Sampled `M_k`-valued functions on a periodic box, the module inner product
//! `<f, g> = int f(x)^* g(x) dx`, the unitary Fourier transform and Schwartz
//! seminorms.
//!
//! Quadrature is the plain Riemann sum on the periodic grid, which is
//! spectrally accurate for smooth, decayed integrands. The Fourier transform
//! uses the symmetric normalisation
//!
//! ```text
//! u^(xi) = (2 pi)^(-n/2) int exp(-i x.xi) u(x) dx
//! ```
//!
//! realised on the grid as `(2 pi)^(-n/2) h^n sum_j exp(-i x_j.xi_m) u(x_j)`
//! with `x_j = -L + j h` and `xi_m = (pi/L)(m - N/2)`. Its output lives on the
//! dual grid (see [`GridSpec::dual`]); the inverse uses weight `(pi/L)^n` and
//! the opposite sign, so the pair is exactly unitary on the grid.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{self, AlgebraElement, ZERO};
use crate::error::{dim_err, Error, Result};
use crate::fft;
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// How derivatives of sampled data are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiffScheme {
    /// Fourth-order central differences with periodic wrap.
    #[default]
    Central4,
    /// Exact differentiation of the trigonometric interpolant.
    Spectral,
}

/// An `M_k`-valued function sampled on a [`GridSpec`].
///
/// `data` holds `N^n` blocks of `k*k` entries, in row-major grid order with
/// the matrix entries innermost (row-major as well).
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleFunction {
    grid: GridSpec,
    k: usize,
    data: Vec<Complex64>,
}

impl ModuleFunction {
    pub fn zeros(grid: GridSpec, k: usize) -> Self {
        assert!(k > 0);
        Self { grid, k, data: vec![ZERO; grid.len() * k * k] }
    }

    pub fn from_data(grid: GridSpec, k: usize, data: Vec<Complex64>) -> Result<Self> {
        if k == 0 || data.len() != grid.len() * k * k {
            return dim_err(format!(
                "expected {} samples of {k}x{k} blocks, got {} values",
                grid.len(),
                data.len()
            ));
        }
        Ok(Self { grid, k, data })
    }

    pub fn from_fn(grid: GridSpec, k: usize, f: impl Fn(&[f64]) -> AlgebraElement) -> Self {
        let mut out = Self::zeros(grid, k);
        let mut x = vec![0.0; grid.n()];
        let kk = k * k;
        for idx in 0..grid.len() {
            grid.point_into(idx, &mut x);
            let v = f(&x);
            assert_eq!(v.dim(), k, "sample has the wrong algebra dimension");
            out.data[idx * kk..(idx + 1) * kk].copy_from_slice(v.entries());
        }
        out
    }

    /// Scalar-valued (`k = 1`) function.
    pub fn from_scalar_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut out = Self::zeros(grid, 1);
        let mut x = vec![0.0; grid.n()];
        for idx in 0..grid.len() {
            grid.point_into(idx, &mut x);
            out.data[idx] = f(&x);
        }
        out
    }

    /// Constant function `c`.
    pub fn constant(grid: GridSpec, c: &AlgebraElement) -> Self {
        Self::from_fn(grid, c.dim(), |_| c.clone())
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn algebra_dim(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn sample_slice(&self, idx: usize) -> &[Complex64] {
        let kk = self.k * self.k;
        &self.data[idx * kk..(idx + 1) * kk]
    }

    pub fn sample(&self, idx: usize) -> AlgebraElement {
        AlgebraElement::from_entries(self.k, self.sample_slice(idx).to_vec())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return dim_err(format!("grid mismatch: {:?} vs {:?}", self.grid, other.grid));
        }
        if self.k != other.k {
            return dim_err(format!("algebra dimension mismatch: {} vs {}", self.k, other.k));
        }
        Ok(())
    }

    fn map_blocks(&self, mut f: impl FnMut(&[Complex64], &mut [Complex64])) -> Self {
        let kk = self.k * self.k;
        let mut out = Self::zeros(self.grid, self.k);
        for (src, dst) in self.data.chunks(kk).zip(out.data.chunks_mut(kk)) {
            f(src, dst);
        }
        out
    }

    /// Pointwise `f(x) a`.
    pub fn right_mul(&self, a: &AlgebraElement) -> Self {
        assert_eq!(a.dim(), self.k);
        self.map_blocks(|s, d| algebra::matmul_acc(d, s, a.entries(), self.k, algebra::ONE))
    }

    /// Pointwise `a f(x)`.
    pub fn left_mul(&self, a: &AlgebraElement) -> Self {
        assert_eq!(a.dim(), self.k);
        self.map_blocks(|s, d| algebra::matmul_acc(d, a.entries(), s, self.k, algebra::ONE))
    }

    /// Pointwise involution `f^*(x) = f(x)^*`.
    pub fn star(&self) -> Self {
        self.map_blocks(|s, d| algebra::star_into(s, d, self.k))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { grid: self.grid, k: self.k, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            k: self.k,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            k: self.k,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Pointwise product `f(x) g(x)`.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let kk = self.k * self.k;
        let mut out = Self::zeros(self.grid, self.k);
        for idx in 0..self.grid.len() {
            algebra::matmul_acc(
                &mut out.data[idx * kk..(idx + 1) * kk],
                &self.data[idx * kk..(idx + 1) * kk],
                &other.data[idx * kk..(idx + 1) * kk],
                self.k,
                algebra::ONE,
            );
        }
        Ok(out)
    }

    /// Multiplies sample `x` by the scalar `m(x)`.
    pub fn modulate(&self, m: impl Fn(&[f64]) -> Complex64) -> Self {
        let kk = self.k * self.k;
        let mut out = self.clone();
        let mut x = vec![0.0; self.grid.n()];
        for (idx, block) in out.data.chunks_mut(kk).enumerate() {
            self.grid.point_into(idx, &mut x);
            let c = m(&x);
            block.iter_mut().for_each(|z| *z *= c);
        }
        out
    }

    /// `sup_x ||f(x)||`.
    pub fn sup_norm(&self) -> f64 {
        self.data.chunks(self.k * self.k).map(|b| algebra::cnorm_slice(b, self.k)).fold(0.0, f64::max)
    }

    /// Largest `||f(x)||` over the outermost `layer` samples of every axis;
    /// a Schwartz-type input should make this negligible.
    pub fn boundary_mass(&self, layer: usize) -> f64 {
        let n = self.grid.points();
        let mut m = vec![0usize; self.grid.n()];
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            self.grid.unflatten(idx, &mut m);
            if m.iter().any(|&i| i < layer || i + layer >= n) {
                worst = worst.max(algebra::cnorm_slice(self.sample_slice(idx), self.k));
            }
        }
        worst
    }

    /// Module inner product `<self, other> = h^n sum_x self(x)^* other(x)`.
    pub fn inner(&self, other: &Self) -> Result<AlgebraElement> {
        inner_product(self, other)
    }

    pub fn norm(&self) -> f64 {
        module_norm(self)
    }

    /// `(int ||f(x)||^2 dx)^(1/2)`, which dominates the module norm.
    pub fn l2_norm(&self) -> f64 {
        let kk = self.k * self.k;
        let s: f64 = self.data.chunks(kk).map(|b| algebra::cnorm_slice(b, self.k).powi(2)).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn fourier(&self, direction: Direction) -> Self {
        fourier(self, direction)
    }

    /// Translation `x -> f(x - shift)`. Grid-commensurate shifts are exact
    /// periodic rolls; other shifts translate the trigonometric interpolant.
    pub fn translate(&self, shift: &[f64]) -> Self {
        assert_eq!(shift.len(), self.grid.n());
        if shift.iter().all(|&s| s == 0.0) {
            return self.clone();
        }
        if let Some(steps) = self.grid.commensurate_steps(shift) {
            return self.roll(&steps);
        }
        let mut out = self.clone();
        let shape = vec![self.grid.points(); self.grid.n()];
        let spacings = vec![self.grid.spacing(); self.grid.n()];
        fft::spectral_multiply(&mut out.data, &shape, self.k * self.k, &spacings, |kv, _| {
            let phase: f64 = kv.iter().zip(shift).map(|(k, s)| k * s).sum();
            Complex64::from_polar(1.0, -phase)
        });
        out
    }

    fn roll(&self, steps: &[i64]) -> Self {
        let n = self.grid.points() as i64;
        let kk = self.k * self.k;
        let mut out = Self::zeros(self.grid, self.k);
        let mut m = vec![0usize; self.grid.n()];
        let mut src = vec![0usize; self.grid.n()];
        for idx in 0..self.grid.len() {
            self.grid.unflatten(idx, &mut m);
            for a in 0..m.len() {
                src[a] = (m[a] as i64 - steps[a]).rem_euclid(n) as usize;
            }
            let s = self.grid.flatten(&src);
            out.data[idx * kk..(idx + 1) * kk].copy_from_slice(&self.data[s * kk..(s + 1) * kk]);
        }
        out
    }

    /// Partial derivative of multi-order `orders`.
    pub fn derivative(&self, orders: &[u8], scheme: DiffScheme) -> Result<Self> {
        if orders.len() != self.grid.n() {
            return dim_err("derivative order has wrong length");
        }
        match scheme {
            DiffScheme::Spectral => {
                let mut out = self.clone();
                let shape = vec![self.grid.points(); self.grid.n()];
                let spacings = vec![self.grid.spacing(); self.grid.n()];
                let half = self.grid.points() as i64 / 2;
                fft::spectral_multiply(&mut out.data, &shape, self.k * self.k, &spacings, |kv, m| {
                    spectral_derivative_factor(kv, m, orders, half)
                });
                Ok(out)
            }
            DiffScheme::Central4 => {
                let mut out = self.clone();
                for (axis, &o) in orders.iter().enumerate() {
                    if o > 0 {
                        out = out.central_difference(axis, o)?;
                    }
                }
                Ok(out)
            }
        }
    }

    fn central_difference(&self, axis: usize, order: u8) -> Result<Self> {
        let stencil = central4_stencil(order)
            .ok_or_else(|| Error::Capability(format!("central differences support orders up to 4, got {order}")))?;
        let h = self.grid.spacing();
        let scale = 1.0 / h.powi(order as i32);
        let n = self.grid.points() as i64;
        let kk = self.k * self.k;
        let mut out = Self::zeros(self.grid, self.k);
        let mut m = vec![0usize; self.grid.n()];
        let half = (stencil.len() / 2) as i64;
        for idx in 0..self.grid.len() {
            self.grid.unflatten(idx, &mut m);
            let centre = m[axis] as i64;
            let dst = &mut out.data[idx * kk..(idx + 1) * kk];
            for (s, &w) in stencil.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let mut src = m.clone();
                src[axis] = (centre + s as i64 - half).rem_euclid(n) as usize;
                let si = self.grid.flatten(&src);
                for (d, v) in dst.iter_mut().zip(&self.data[si * kk..(si + 1) * kk]) {
                    *d += v * (w * scale);
                }
            }
        }
        Ok(out)
    }

    /// Cached trigonometric interpolant for repeated off-grid evaluation.
    pub fn interpolant(&self) -> Interpolant {
        Interpolant::new(self)
    }
}

pub(crate) fn spectral_derivative_factor(kv: &[f64], m: &[i64], orders: &[u8], half: i64) -> Complex64 {
    let mut c = Complex64::new(1.0, 0.0);
    for ((&k, &mi), &o) in kv.iter().zip(m).zip(orders) {
        if o == 0 {
            continue;
        }
        // The Nyquist mode has no consistent odd derivative.
        if mi == -half && o % 2 == 1 {
            return ZERO;
        }
        c *= Complex64::new(0.0, k).powi(o as i32);
    }
    c
}

/// Fourth-order accurate central stencils, centred, for derivative orders 1..=4.
/// Step for a fourth-order stencil of total derivative order `total`,
/// balancing truncation against roundoff for unit-scale data.
pub(crate) fn central4_step(total: i32) -> f64 {
    f64::EPSILON.powf(1.0 / (4 + total.max(1)) as f64)
}

pub(crate) fn central4_stencil(order: u8) -> Option<&'static [f64]> {
    const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
    const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
    const D3: [f64; 7] = [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0];
    const D4: [f64; 7] = [-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0];
    match order {
        0 => Some(&[1.0]),
        1 => Some(&D1),
        2 => Some(&D2),
        3 => Some(&D3),
        4 => Some(&D4),
        _ => None,
    }
}

/// Evaluates the trigonometric interpolant
/// `f(y) = (2 pi)^(-n/2) (pi/L)^n sum_eta exp(i y.eta) f^(eta)` anywhere.
#[derive(Debug, Clone)]
pub struct Interpolant {
    spectrum: ModuleFunction,
    weight: f64,
}

impl Interpolant {
    fn new(f: &ModuleFunction) -> Self {
        let spectrum = fourier(f, Direction::Forward);
        let n = f.grid.n() as i32;
        let weight = (2.0 * PI).powf(-0.5 * n as f64) * f.grid.frequency_spacing().powi(n);
        Self { spectrum, weight }
    }

    pub fn algebra_dim(&self) -> usize {
        self.spectrum.k
    }

    pub fn eval_into(&self, y: &[f64], out: &mut [Complex64]) {
        let dual = self.spectrum.grid;
        let np = dual.points();
        let kk = self.spectrum.k * self.spectrum.k;
        out.iter_mut().for_each(|z| *z = ZERO);
        let tables: Vec<Vec<Complex64>> = y
            .iter()
            .map(|&ya| (0..np).map(|j| Complex64::from_polar(1.0, ya * dual.coord(j))).collect())
            .collect();
        match dual.n() {
            1 => {
                for j in 0..np {
                    let c = tables[0][j] * self.weight;
                    for (o, v) in out.iter_mut().zip(self.spectrum.sample_slice(j)) {
                        *o += v * c;
                    }
                }
            }
            _ => {
                for j0 in 0..np {
                    let c0 = tables[0][j0] * self.weight;
                    for j1 in 0..np {
                        let c = c0 * tables[1][j1];
                        let base = (j0 * np + j1) * kk;
                        for (o, v) in out.iter_mut().zip(&self.spectrum.data[base..base + kk]) {
                            *o += v * c;
                        }
                    }
                }
            }
        }
    }

    pub fn eval(&self, y: &[f64]) -> AlgebraElement {
        let mut out = vec![ZERO; self.spectrum.k * self.spectrum.k];
        self.eval_into(y, &mut out);
        AlgebraElement::from_entries(self.spectrum.k, out)
    }
}

/// `<f, g> = int f(x)^* g(x) dx`, conjugate-linear in `f`, right-linear in `g`.
pub fn inner_product(f: &ModuleFunction, g: &ModuleFunction) -> Result<AlgebraElement> {
    f.check_compatible(g)?;
    let k = f.k;
    let kk = k * k;
    let mut acc = vec![ZERO; kk];
    for (a, b) in f.data.chunks(kk).zip(g.data.chunks(kk)) {
        algebra::star_matmul_acc(&mut acc, a, b, k, algebra::ONE);
    }
    let w = f.grid.cell_volume();
    acc.iter_mut().for_each(|z| *z *= w);
    Ok(AlgebraElement::from_entries(k, acc))
}

/// `||f||_2 = ||<f, f>||^(1/2)`.
pub fn module_norm(f: &ModuleFunction) -> f64 {
    inner_product(f, f).expect("self inner product").cnorm().sqrt()
}

/// Unitary Fourier transform; the result is sampled on the dual grid.
pub fn fourier(f: &ModuleFunction, direction: Direction) -> ModuleFunction {
    let grid = f.grid;
    let n = grid.n();
    let shape = vec![grid.points(); n];
    let mut data = f.data.clone();
    let inverse = direction == Direction::Inverse;
    let axes: Vec<usize> = (0..n).collect();
    fft::centered_dft(&mut data, &shape, f.k * f.k, &axes, inverse);
    let w = (2.0 * PI).powf(-0.5 * n as f64) * grid.cell_volume();
    data.iter_mut().for_each(|z| *z *= w);
    ModuleFunction { grid: grid.dual(), k: f.k, data }
}

/// `sup_x ||x^alpha D^beta f(x)||` with `|beta| <= 4`.
pub fn schwartz_seminorm(f: &ModuleFunction, alpha: &[u32], beta: &[u8], scheme: DiffScheme) -> Result<f64> {
    let n = f.grid.n();
    if alpha.len() != n || beta.len() != n {
        return dim_err("multi-index length must equal the grid dimension");
    }
    let total: u32 = beta.iter().map(|&b| b as u32).sum();
    if total > 4 {
        return Err(Error::Capability(format!("derivative order |beta| = {total} exceeds 4")));
    }
    let d = f.derivative(beta, scheme)?;
    let mut x = vec![0.0; n];
    let mut sup: f64 = 0.0;
    for idx in 0..f.grid.len() {
        f.grid.point_into(idx, &mut x);
        let weight: f64 = x.iter().zip(alpha).map(|(xi, &a)| xi.abs().powi(a as i32)).product();
        sup = sup.max(weight * algebra::cnorm_slice(d.sample_slice(idx), f.k));
    }
    Ok(sup)
}
