//! Kohn-Nirenberg quantization
//!
//! ```text
//! a(x, D) u(x) = int exp(i x.xi) a(x, xi) u^(xi) dxi
//! ```
//!
//! On a grid with spacing `h` and dual spacing `dxi = pi/L` the operator is
//! the matrix `N^-n sum_xi exp(i (x - y).xi) a(x, xi)`, since
//! `(2 pi)^-n h^n dxi^n = N^-n`. Everything here (kernel, adjoint symbol,
//! seminorm) is written against that discrete operator, so the identities
//! hold to roundoff rather than to discretisation error.

pub mod norm;
pub mod symbols;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{self, AlgebraElement, ZERO};
use crate::error::{dim_err, Error, Result};
use crate::fft;
use crate::grid::{GridSpec, PhaseGrid};
use crate::module_space::{central4_stencil, central4_step, fourier, spectral_derivative_factor, Direction, ModuleFunction};

pub use norm::{operator_norm_estimate, NormEstimate};
pub use symbols::PhaseFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeScheme {
    /// Derivatives supplied by the closed form.
    #[default]
    Analytic,
    /// Exact derivatives of the trigonometric interpolant of the samples.
    Spectral,
    /// Fourth-order central differences of the closed form.
    Central4,
}

/// Symbol samples on a [`PhaseGrid`], `k x k` blocks innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSymbol {
    grid: PhaseGrid,
    k: usize,
    data: Vec<Complex64>,
}

impl SampledSymbol {
    pub fn zeros(grid: PhaseGrid, k: usize) -> Self {
        Self { grid, k, data: vec![ZERO; grid.len() * k * k] }
    }

    pub fn from_data(grid: PhaseGrid, k: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() * k * k {
            return dim_err("symbol sample count does not match the phase grid");
        }
        Ok(Self { grid, k, data })
    }

    pub fn from_closed(f: &dyn PhaseFn, grid: PhaseGrid) -> Self {
        let mut out = Self::zeros(grid, f.algebra_dim());
        let kk = out.k * out.k;
        let n = grid.n();
        let (mut x, mut xi) = (vec![0.0; n], vec![0.0; n]);
        for (idx, block) in out.data.chunks_mut(kk).enumerate() {
            grid.point_into(idx, &mut x, &mut xi);
            f.eval_into(&x, &xi, block);
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> &PhaseGrid {
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
    pub fn block(&self, ix: usize, ixi: usize) -> &[Complex64] {
        let kk = self.k * self.k;
        let idx = ix * self.grid.xi.len() + ixi;
        &self.data[idx * kk..(idx + 1) * kk]
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.chunks(self.k * self.k).map(|b| algebra::cnorm_slice(b, self.k)).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.k != other.k {
            return dim_err("symbols live on different phase grids");
        }
        Ok(Self { grid: self.grid, k: self.k, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { grid: self.grid, k: self.k, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// Largest `||a||` over the outermost `layer` samples of any phase axis.
    pub fn boundary_mass(&self, layer: usize) -> f64 {
        let shape = self.grid.shape();
        let kk = self.k * self.k;
        let mut worst: f64 = 0.0;
        for (idx, b) in self.data.chunks(kk).enumerate() {
            let mut rem = idx;
            let mut edge = false;
            for &len in shape.iter().rev() {
                let i = rem % len;
                rem /= len;
                edge |= i < layer || i + layer >= len;
            }
            if edge {
                worst = worst.max(algebra::cnorm_slice(b, self.k));
            }
        }
        worst
    }

    /// Spectral derivative `d_x^dx d_xi^dxi` of the periodic interpolant.
    pub fn derivative(&self, dx: &[u8], dxi: &[u8]) -> Self {
        let orders: Vec<u8> = dx.iter().chain(dxi).copied().collect();
        let mut out = self.clone();
        if orders.iter().all(|&o| o == 0) {
            return out;
        }
        let shape = self.grid.shape();
        fft::spectral_multiply(&mut out.data, &shape, self.k * self.k, &self.grid.spacings(), |kv, m| {
            let mut c = Complex64::new(1.0, 0.0);
            for a in 0..shape.len() {
                c *= spectral_derivative_factor(&kv[a..=a], &m[a..=a], &orders[a..=a], shape[a] as i64 / 2);
            }
            c
        });
        out
    }

    /// Applies a periodic spectral multiplier over all `2n` phase axes.
    pub fn spectral_map(&self, symbol: impl Fn(&[f64], &[i64]) -> Complex64) -> Self {
        let mut out = self.clone();
        fft::spectral_multiply(&mut out.data, &self.grid.shape(), self.k * self.k, &self.grid.spacings(), symbol);
        out
    }

    /// `(x, xi) -> a(x + z, xi + zeta)` on the same grid. Exact rolls for
    /// commensurate shifts, spectral translation otherwise.
    pub fn shifted(&self, z: &[f64], zeta: &[f64]) -> Self {
        let n = self.grid.n();
        let steps_x = self.grid.x.commensurate_steps(z);
        let steps_xi = self.grid.xi.commensurate_steps(zeta);
        if let (Some(sx), Some(sxi)) = (steps_x, steps_xi) {
            let steps: Vec<i64> = sx.into_iter().chain(sxi).collect();
            return self.roll(&steps);
        }
        let shift: Vec<f64> = z.iter().chain(zeta).copied().collect();
        let mut out = self.clone();
        fft::spectral_multiply(&mut out.data, &self.grid.shape(), self.k * self.k, &self.grid.spacings(), |kv, _| {
            let ph: f64 = kv.iter().zip(&shift).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, ph)
        });
        debug_assert_eq!(shift.len(), 2 * n);
        out
    }

    /// `out[i] = in[i + steps]` cyclically on every phase axis.
    fn roll(&self, steps: &[i64]) -> Self {
        let shape = self.grid.shape();
        let kk = self.k * self.k;
        let mut out = Self::zeros(self.grid, self.k);
        let dims = shape.len();
        let mut m = vec![0usize; dims];
        for idx in 0..self.grid.len() {
            let mut rem = idx;
            for a in (0..dims).rev() {
                m[a] = rem % shape[a];
                rem /= shape[a];
            }
            let src = (0..dims).fold(0usize, |acc, a| {
                acc * shape[a] + (m[a] as i64 + steps[a]).rem_euclid(shape[a] as i64) as usize
            });
            out.data[idx * kk..(idx + 1) * kk].copy_from_slice(&self.data[src * kk..(src + 1) * kk]);
        }
        out
    }

    /// The samples at a fixed frequency index, as a function of `x`.
    pub fn slice_at_frequency(&self, ixi: usize) -> ModuleFunction {
        let kk = self.k * self.k;
        let mut data = Vec::with_capacity(self.grid.x.len() * kk);
        for ix in 0..self.grid.x.len() {
            data.extend_from_slice(self.block(ix, ixi));
        }
        ModuleFunction::from_data(self.grid.x, self.k, data).expect("slice size")
    }
}

/// A symbol in closed form or as samples.
#[derive(Clone)]
pub enum PhaseSymbol {
    Closed { f: Arc<dyn PhaseFn>, scheme: DerivativeScheme },
    Sampled(SampledSymbol),
}

impl fmt::Debug for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseSymbol::Closed { f: c, scheme } => {
                write!(f, "Closed(n = {}, k = {}, {:?})", c.n(), c.algebra_dim(), scheme)
            }
            PhaseSymbol::Sampled(s) => write!(f, "Sampled({:?}, k = {})", s.grid, s.k),
        }
    }
}

impl From<SampledSymbol> for PhaseSymbol {
    fn from(s: SampledSymbol) -> Self {
        PhaseSymbol::Sampled(s)
    }
}

impl PhaseSymbol {
    /// Closed form with analytic derivatives.
    pub fn closed(f: impl PhaseFn + 'static) -> Self {
        PhaseSymbol::Closed { f: Arc::new(f), scheme: DerivativeScheme::Analytic }
    }

    pub fn closed_with(f: impl PhaseFn + 'static, scheme: DerivativeScheme) -> Self {
        PhaseSymbol::Closed { f: Arc::new(f), scheme }
    }

    pub fn n(&self) -> usize {
        match self {
            PhaseSymbol::Closed { f, .. } => f.n(),
            PhaseSymbol::Sampled(s) => s.grid.n(),
        }
    }

    pub fn algebra_dim(&self) -> usize {
        match self {
            PhaseSymbol::Closed { f, .. } => f.algebra_dim(),
            PhaseSymbol::Sampled(s) => s.k,
        }
    }

    pub fn scheme(&self) -> DerivativeScheme {
        match self {
            PhaseSymbol::Closed { scheme, .. } => *scheme,
            PhaseSymbol::Sampled(_) => DerivativeScheme::Spectral,
        }
    }

    /// Samples on `grid`; a sampled symbol must already live there.
    pub fn sample(&self, grid: &PhaseGrid) -> Result<SampledSymbol> {
        match self {
            PhaseSymbol::Closed { f, .. } => {
                if f.n() != grid.n() {
                    return dim_err("symbol and phase grid dimensions differ");
                }
                Ok(SampledSymbol::from_closed(f.as_ref(), *grid))
            }
            PhaseSymbol::Sampled(s) => {
                if s.grid != *grid {
                    return dim_err(format!("symbol sampled on {:?}, requested {:?}", s.grid, grid));
                }
                Ok(s.clone())
            }
        }
    }

    /// `d_x^dx d_xi^dxi a` sampled on `grid`, with this symbol's scheme.
    pub fn sample_derivative(&self, grid: &PhaseGrid, dx: &[u8], dxi: &[u8]) -> Result<SampledSymbol> {
        let n = grid.n();
        if dx.len() != n || dxi.len() != n {
            return dim_err("derivative orders must have length n");
        }
        match self {
            PhaseSymbol::Sampled(_) => Ok(self.sample(grid)?.derivative(dx, dxi)),
            PhaseSymbol::Closed { f, scheme } => match scheme {
                DerivativeScheme::Spectral => Ok(self.sample(grid)?.derivative(dx, dxi)),
                DerivativeScheme::Analytic | DerivativeScheme::Central4 => {
                    let mut out = SampledSymbol::zeros(*grid, f.algebra_dim());
                    let kk = out.k * out.k;
                    let (mut x, mut xi) = (vec![0.0; n], vec![0.0; n]);
                    for (idx, block) in out.data.chunks_mut(kk).enumerate() {
                        grid.point_into(idx, &mut x, &mut xi);
                        closed_partial(f.as_ref(), *scheme, &x, &xi, dx, dxi, block)?;
                    }
                    Ok(out)
                }
            },
        }
    }

    /// `(x, xi) -> a(x + z, xi + zeta)`.
    pub fn shifted(&self, z: &[f64], zeta: &[f64]) -> PhaseSymbol {
        if z.iter().chain(zeta).all(|&v| v == 0.0) {
            return self.clone();
        }
        match self {
            PhaseSymbol::Closed { f, scheme } => PhaseSymbol::Closed {
                f: Arc::new(symbols::ShiftedSymbol { inner: f.clone(), z: z.to_vec(), zeta: zeta.to_vec() }),
                scheme: *scheme,
            },
            PhaseSymbol::Sampled(s) => PhaseSymbol::Sampled(s.shifted(z, zeta)),
        }
    }
}

/// Pointwise derivative of a closed form, analytically or by central
/// differences.
pub fn closed_partial(
    f: &dyn PhaseFn,
    scheme: DerivativeScheme,
    x: &[f64],
    xi: &[f64],
    dx: &[u8],
    dxi: &[u8],
    out: &mut [Complex64],
) -> Result<()> {
    let n = x.len();
    if dx.iter().chain(dxi).all(|&o| o == 0) {
        f.eval_into(x, xi, out);
        return Ok(());
    }
    if scheme == DerivativeScheme::Analytic {
        if f.partial_into(x, xi, dx, dxi, out) {
            return Ok(());
        }
        return Err(Error::Capability("closed-form symbol supplies no analytic derivatives".into()));
    }
    let vars: Vec<(usize, &'static [f64])> = dx
        .iter()
        .chain(dxi)
        .enumerate()
        .filter(|(_, &o)| o > 0)
        .map(|(v, &o)| {
            central4_stencil(o)
                .map(|s| (v, s))
                .ok_or_else(|| Error::Capability(format!("central differences support orders up to 4, got {o}")))
        })
        .collect::<Result<_>>()?;
    let total: i32 = dx.iter().chain(dxi).map(|&o| o as i32).sum();
    let step = central4_step(total);
    let scale = step.powi(-total);
    out.iter_mut().for_each(|z| *z = ZERO);
    let mut centre = vec![ZERO; out.len()];
    f.eval_into(x, xi, &mut centre);
    let mut tmp = vec![ZERO; out.len()];
    let mut counter = vec![0usize; vars.len()];
    let mut y: Vec<f64> = x.iter().chain(xi).copied().collect();
    loop {
        let mut w = scale;
        for (c, (v, s)) in counter.iter().zip(&vars) {
            w *= s[*c];
            let half = (s.len() / 2) as f64;
            let base = if *v < n { x[*v] } else { xi[*v - n] };
            y[*v] = base + (*c as f64 - half) * step;
        }
        if w != 0.0 {
            f.eval_into(&y[..n], &y[n..], &mut tmp);
            for ((o, t), c0) in out.iter_mut().zip(&tmp).zip(&centre) {
                *o += (t - c0) * w;
            }
        }
        // advance the mixed-radix counter
        let mut i = 0;
        loop {
            if i == vars.len() {
                return Ok(());
            }
            counter[i] += 1;
            if counter[i] < vars[i].1.len() {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

fn check_operator_grid(a: &PhaseSymbol, u: &ModuleFunction) -> Result<PhaseGrid> {
    if a.n() != u.grid().n() {
        return dim_err("symbol and function dimensions differ");
    }
    if a.algebra_dim() != u.algebra_dim() {
        return dim_err(format!("symbol has k = {}, function has k = {}", a.algebra_dim(), u.algebra_dim()));
    }
    let pg = PhaseGrid::operator(*u.grid());
    if let PhaseSymbol::Sampled(s) = a {
        if s.grid != pg {
            return dim_err("sampled symbol must live on the operator grid of the input function");
        }
    }
    Ok(pg)
}

/// `a(x, D) u`, summed over the dual grid. Right-A-linear in `u`.
pub fn pdo_apply(a: &PhaseSymbol, u: &ModuleFunction) -> Result<ModuleFunction> {
    let pg = check_operator_grid(a, u)?;
    let grid = pg.x;
    let n = grid.n();
    let k = u.algebra_dim();
    let kk = k * k;
    let uh = fourier(u, Direction::Forward);
    let dual = *uh.grid();
    let weight = (2.0 * PI).powf(-0.5 * n as f64) * dual.spacing().powi(n as i32);
    let peak = uh.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let modes: Vec<usize> = (0..dual.len())
        .filter(|&i| uh.sample_slice(i).iter().any(|z| z.norm() > peak * crate::fft::SPECTRAL_CUTOFF))
        .collect();
    let mut out = ModuleFunction::zeros(grid, k);
    let (mut x, mut xi) = (vec![0.0; n], vec![0.0; n]);
    let mut av = vec![ZERO; kk];
    for ix in 0..grid.len() {
        grid.point_into(ix, &mut x);
        let mut acc = vec![ZERO; kk];
        for &j in &modes {
            dual.point_into(j, &mut xi);
            let ph: f64 = x.iter().zip(&xi).map(|(p, q)| p * q).sum();
            let c = Complex64::from_polar(weight, ph);
            match a {
                PhaseSymbol::Closed { f, .. } => {
                    f.eval_into(&x, &xi, &mut av);
                    algebra::matmul_acc(&mut acc, &av, uh.sample_slice(j), k, c);
                }
                PhaseSymbol::Sampled(s) => algebra::matmul_acc(&mut acc, s.block(ix, j), uh.sample_slice(j), k, c),
            }
        }
        out.data_mut()[ix * kk..(ix + 1) * kk].copy_from_slice(&acc);
    }
    Ok(out)
}

/// `pi(a) = max_{beta, gamma <= (1,...,1)} sup ||d_x^beta d_xi^gamma a||` over `grid`.
pub fn pi_seminorm(a: &PhaseSymbol, grid: &PhaseGrid) -> Result<f64> {
    let n = grid.n();
    let mut best: f64 = 0.0;
    for mask in 0..(1usize << (2 * n)) {
        let orders: Vec<u8> = (0..2 * n).map(|i| ((mask >> i) & 1) as u8).collect();
        let d = a.sample_derivative(grid, &orders[..n], &orders[n..])?;
        best = best.max(d.sup_norm());
    }
    Ok(best)
}

/// `c_1 = (1 + sup|chi'| / s)^(2n)`: the factor by which multiplying a
/// symbol with the tensor cutoff `prod chi(eps y_i / s)`, `0 < eps <= 1`, can
/// raise `pi`, for the plateau profile with the given plateau fraction.
pub fn cutoff_constant(n: usize, plateau: f64, support: f64) -> f64 {
    let d = crate::deformation::oscillatory::plateau_derivative_sup(plateau) / support;
    (1.0 + d).powi(2 * n as i32)
}

/// Symbol of the adjoint of the discrete operator `a(x, D)`:
///
/// ```text
/// p(y, xi) = exp(-i y.xi) N^-n sum_{x, tau} exp(i y.tau) exp(i x.xi) exp(-i x.tau) a(x, tau)^*
/// ```
///
/// the grid form of `(2 pi)^-n int int exp(-i (y - w).(xi - tau)) a(w, tau)^* dw dtau`.
/// Closed forms are first sampled on the operator grid of `grid`.
pub fn adjoint_symbol(a: &PhaseSymbol, grid: &GridSpec) -> Result<SampledSymbol> {
    let pg = PhaseGrid::operator(*grid);
    let s = a.sample(&pg)?;
    let n = grid.n();
    let k = s.k;
    let kk = k * k;
    let np = grid.len();
    let mut b = vec![ZERO; s.data.len()];
    let (mut x, mut tau) = (vec![0.0; n], vec![0.0; n]);
    for idx in 0..pg.len() {
        pg.point_into(idx, &mut x, &mut tau);
        let ph: f64 = x.iter().zip(&tau).map(|(p, q)| p * q).sum();
        let c = Complex64::from_polar(1.0, -ph);
        algebra::star_into(&s.data[idx * kk..(idx + 1) * kk], &mut b[idx * kk..(idx + 1) * kk], k);
        b[idx * kk..(idx + 1) * kk].iter_mut().for_each(|z| *z *= c);
    }
    // x-axes become xi, tau-axes become y
    let axes: Vec<usize> = (0..2 * n).collect();
    fft::centered_dft(&mut b, &pg.shape(), kk, &axes, true);
    let mut out = SampledSymbol::zeros(pg, k);
    let norm = 1.0 / np as f64;
    let (mut y, mut xi) = (vec![0.0; n], vec![0.0; n]);
    for iy in 0..np {
        grid.point_into(iy, &mut y);
        for ixi in 0..np {
            pg.xi.point_into(ixi, &mut xi);
            let ph: f64 = y.iter().zip(&xi).map(|(p, q)| p * q).sum();
            let c = Complex64::from_polar(norm, -ph);
            let src = (ixi * np + iy) * kk;
            let dst = (iy * np + ixi) * kk;
            for e in 0..kk {
                out.data[dst + e] = b[src + e] * c;
            }
        }
    }
    Ok(out)
}

/// Schwartz kernel samples `K(x, y)` with `a(x, D) u(x) = h^n sum_y K(x, y) u(y)`.
#[derive(Debug, Clone)]
pub struct KernelField {
    grid: GridSpec,
    k: usize,
    data: Vec<Complex64>,
}

impl KernelField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn algebra_dim(&self) -> usize {
        self.k
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn block(&self, ix: usize, iy: usize) -> &[Complex64] {
        let kk = self.k * self.k;
        let idx = ix * self.grid.len() + iy;
        &self.data[idx * kk..(idx + 1) * kk]
    }

    pub fn apply(&self, u: &ModuleFunction) -> Result<ModuleFunction> {
        if u.grid() != &self.grid || u.algebra_dim() != self.k {
            return dim_err("kernel and function live on different grids");
        }
        let kk = self.k * self.k;
        let w = Complex64::new(self.grid.cell_volume(), 0.0);
        let mut out = ModuleFunction::zeros(self.grid, self.k);
        for ix in 0..self.grid.len() {
            let mut acc = vec![ZERO; kk];
            for iy in 0..self.grid.len() {
                algebra::matmul_acc(&mut acc, self.block(ix, iy), u.sample_slice(iy), self.k, w);
            }
            out.data_mut()[ix * kk..(ix + 1) * kk].copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// `h^2n sum_{x,y} u(x) K(x, y) v(y)`, the pairing of the kernel with `u (x) v`.
    pub fn pairing(&self, u: &ModuleFunction, v: &ModuleFunction) -> Result<AlgebraElement> {
        let av = self.apply(v)?;
        let kk = self.k * self.k;
        let mut acc = vec![ZERO; kk];
        let w = Complex64::new(self.grid.cell_volume(), 0.0);
        for ix in 0..self.grid.len() {
            algebra::matmul_acc(&mut acc, u.sample_slice(ix), av.sample_slice(ix), self.k, w);
        }
        Ok(AlgebraElement::from_entries(self.k, acc))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `K(x, y) = (2 pi)^-n dxi^n sum_xi exp(i (x - y).xi) a(x, xi)`: an inverse
/// transform of each frequency row followed by the shear `(x, d) -> (x, x - d)`.
pub fn symbol_to_kernel(a: &PhaseSymbol, grid: &GridSpec) -> Result<KernelField> {
    let pg = PhaseGrid::operator(*grid);
    let s = a.sample(&pg)?;
    let n = grid.n();
    let k = s.k;
    let kk = k * k;
    let np = grid.len();
    let points = grid.points();
    let shape = vec![points; n];
    let axes: Vec<usize> = (0..n).collect();
    let weight = (2.0 * PI).powi(-(n as i32)) * pg.xi.spacing().powi(n as i32);
    let mut data = vec![ZERO; np * np * kk];
    let mut row = vec![ZERO; np * kk];
    let (mut mx, mut my, mut md) = (vec![0usize; n], vec![0usize; n], vec![0usize; n]);
    for ix in 0..np {
        row.copy_from_slice(&s.data[ix * np * kk..(ix + 1) * np * kk]);
        fft::centered_dft(&mut row, &shape, kk, &axes, true);
        grid.unflatten(ix, &mut mx);
        for iy in 0..np {
            grid.unflatten(iy, &mut my);
            for a in 0..n {
                md[a] = (mx[a] + points + points / 2 - my[a]) % points;
            }
            let id = grid.flatten(&md);
            let dst = (ix * np + iy) * kk;
            for e in 0..kk {
                data[dst + e] = row[id * kk + e] * weight;
            }
        }
    }
    Ok(KernelField { grid: *grid, k, data })
}

#[cfg(test)]
mod tests {
    use super::symbols::*;
    use super::*;
    use crate::families::{MatrixGaussian, TrigPolynomial};
    use crate::field::FieldFn;

    fn gaussian(grid: GridSpec, k: usize) -> ModuleFunction {
        ModuleFunction::from_fn(grid, k, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let mut e = AlgebraElement::identity(k).scale(Complex64::new((-0.5 * r2).exp(), 0.0));
            if k > 1 {
                e.entries_mut()[1] = Complex64::new(0.0, x[0] * (-r2).exp());
            }
            e
        })
    }

    #[test]
    fn identity_symbol_is_identity() {
        let g = GridSpec::new(2, 16, 5.0).unwrap();
        let u = gaussian(g, 2);
        let a = PhaseSymbol::closed(ConstantSymbol { n: 2, value: AlgebraElement::identity(2) });
        assert!(pdo_apply(&a, &u).unwrap().sub(&u).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn multiplication_symbol_multiplies() {
        let g = GridSpec::new(1, 64, 8.0).unwrap();
        let u = gaussian(g, 1);
        let m: Arc<dyn FieldFn> = Arc::new(TrigPolynomial::new(
            1,
            1,
            vec![(vec![0.5], AlgebraElement::scalar(1, Complex64::new(1.0, 0.0))), (vec![0.0], AlgebraElement::scalar(1, Complex64::new(2.0, 0.0)))],
        ));
        let a = PhaseSymbol::closed(MultiplicationSymbol(m.clone()));
        let expected = u.modulate(|x| Complex64::from_polar(1.0, 0.5 * x[0]) + 2.0);
        assert!(pdo_apply(&a, &u).unwrap().sub(&expected).unwrap().sup_norm() < 1e-10);
    }

    #[test]
    fn pi_seminorm_examples() {
        let pg = PhaseGrid::operator(GridSpec::new(2, 16, 8.0).unwrap());
        let c = AlgebraElement::from_real_rows(&[&[1.0, 2.0], &[0.0, -1.0]]);
        let a = PhaseSymbol::closed(ConstantSymbol { n: 2, value: c.clone() });
        assert!((pi_seminorm(&a, &pg).unwrap() - c.cnorm()).abs() < 1e-14);
        let s = PhaseSymbol::closed(TrigSymbol::sin_sin(2, 0, 0));
        // the box contains 0 and pi/2, where sin and cos reach 1
        let box_grid = GridSpec::new(2, 8, 2.0 * PI).unwrap();
        let quarter = PhaseGrid::new(box_grid, box_grid).unwrap();
        let v = pi_seminorm(&s, &quarter).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let cd = PhaseSymbol::closed_with(TrigSymbol::sin_sin(2, 0, 0), DerivativeScheme::Central4);
        let w = pi_seminorm(&cd, &quarter).unwrap();
        assert!((w - 1.0).abs() < 1e-6, "{w}");
    }

    #[test]
    fn adjoint_of_constant_and_multiplication() {
        let g = GridSpec::new(2, 16, 5.0).unwrap();
        let c = AlgebraElement::from_rows(&[&[Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)], &[ZERO, Complex64::new(3.0, -1.0)]]);
        let p = adjoint_symbol(&PhaseSymbol::closed(ConstantSymbol { n: 2, value: c.clone() }), &g).unwrap();
        let expected = SampledSymbol::from_closed(&ConstantSymbol { n: 2, value: c.star() }, PhaseGrid::operator(g));
        assert!(p.sub(&expected).unwrap().sup_norm() < 1e-12);
        let m: Arc<dyn FieldFn> = Arc::new(MatrixGaussian::centered(2, c.clone(), 1.0));
        let pm = adjoint_symbol(&PhaseSymbol::closed(MultiplicationSymbol(m.clone())), &g).unwrap();
        let em = SampledSymbol::from_closed(&MultiplicationSymbol(Arc::new(MatrixGaussian::centered(2, c.star(), 1.0))), PhaseGrid::operator(g));
        assert!(pm.sub(&em).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn adjoint_pairing_for_general_symbol() {
        let g = GridSpec::new(2, 16, 5.0).unwrap();
        let f: Arc<dyn FieldFn> = Arc::new(MatrixGaussian::centered(2, AlgebraElement::from_real_rows(&[&[1.0, 2.0], &[0.5, -1.0]]), 1.2));
        let a = PhaseSymbol::closed(TranslationSymbol::left(f, crate::deformation::SkewForm::standard(0.5)));
        let p = PhaseSymbol::Sampled(adjoint_symbol(&a, &g).unwrap());
        let u = gaussian(g, 2);
        let v = gaussian(g, 2).translate(&[0.5, -0.3]);
        let lhs = pdo_apply(&a, &u).unwrap().inner(&v).unwrap();
        let rhs = u.inner(&pdo_apply(&p, &v).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12, "{}", lhs.max_abs_diff(&rhs));
    }

    #[test]
    fn kernel_reproduces_operator() {
        let g = GridSpec::new(1, 32, 6.0).unwrap();
        let a = PhaseSymbol::closed(FnSymbol::new(1, 1, |x: &[f64], xi: &[f64]| {
            AlgebraElement::scalar(1, Complex64::new((-(x[0] * x[0]) - 0.1 * xi[0] * xi[0]).exp(), xi[0].sin()))
        }));
        let kf = symbol_to_kernel(&a, &g).unwrap();
        let u = gaussian(g, 1);
        let direct = pdo_apply(&a, &u).unwrap();
        assert!(kf.apply(&u).unwrap().sub(&direct).unwrap().sup_norm() < 1e-12);
        // constant symbol: discrete delta with weight 1/h^n
        let one = PhaseSymbol::closed(ConstantSymbol { n: 1, value: AlgebraElement::identity(1) });
        let k1 = symbol_to_kernel(&one, &g).unwrap();
        let h = g.spacing();
        for ix in [0usize, 7, 31] {
            for iy in 0..32 {
                let expected = if ix == iy { 1.0 / h } else { 0.0 };
                assert!((k1.block(ix, iy)[0] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sampled_derivative_and_shift() {
        let pg = PhaseGrid::operator(GridSpec::new(1, 16, 2.0 * PI).unwrap());
        let a = TrigSymbol::new(1, 1, vec![(vec![1.0], vec![0.0], AlgebraElement::identity(1))]);
        let s = SampledSymbol::from_closed(&a, pg);
        let d = s.derivative(&[1], &[0]);
        let exact = SampledSymbol::from_closed(&a, pg).scale(Complex64::new(0.0, 1.0));
        assert!(d.sub(&exact).unwrap().sup_norm() < 1e-12);
        let sh = s.shifted(&[0.3], &[0.0]);
        let e2 = SampledSymbol::from_closed(&ShiftedSymbol { inner: Arc::new(a), z: vec![0.3], zeta: vec![0.0] }, pg);
        assert!(sh.sub(&e2).unwrap().sup_norm() < 1e-12);
    }
}
