//! Poisson brackets, the `gamma` kernel identities and recovery of
//! translation-type symbols `a(x, xi) = F(x - J xi)`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::algebra::{self, AlgebraElement, ZERO};
use crate::deformation::SkewForm;
use crate::error::{dim_err, Error, Result};
use crate::field::FieldFn;
use crate::grid::PhaseGrid;
use crate::module_space::{central4_stencil, central4_step, ModuleFunction};
use crate::operator::OperatorHandle;
use crate::quantization::{DerivativeScheme, PhaseSymbol, SampledSymbol};

/// `{a, b} = sum_j (d_xj a d_xij b - d_xij a d_xj b)`, sampled on `grid`.
/// Matrix values multiply in the written order. Both symbols must use the
/// same derivative scheme.
pub fn poisson_bracket(a: &PhaseSymbol, b: &PhaseSymbol, grid: &PhaseGrid) -> Result<SampledSymbol> {
    if a.algebra_dim() != b.algebra_dim() || a.n() != b.n() || a.n() != grid.n() {
        return dim_err("bracket operands differ in dimension");
    }
    if a.scheme() != b.scheme() {
        return Err(Error::Invalid(format!(
            "mixed derivative schemes {:?} and {:?} in one bracket",
            a.scheme(),
            b.scheme()
        )));
    }
    let n = grid.n();
    let k = a.algebra_dim();
    let kk = k * k;
    let mut out = SampledSymbol::zeros(*grid, k);
    let zero = vec![0u8; n];
    for j in 0..n {
        let mut e = zero.clone();
        e[j] = 1;
        let ax = a.sample_derivative(grid, &e, &zero)?;
        let axi = a.sample_derivative(grid, &zero, &e)?;
        let bx = b.sample_derivative(grid, &e, &zero)?;
        let bxi = b.sample_derivative(grid, &zero, &e)?;
        let one = Complex64::new(1.0, 0.0);
        for idx in 0..grid.len() {
            let r = idx * kk..(idx + 1) * kk;
            let dst = &mut out.data_mut()[r.clone()];
            algebra::matmul_acc(dst, &ax.data()[r.clone()], &bxi.data()[r.clone()], k, one);
            algebra::matmul_acc(dst, &axi.data()[r.clone()], &bx.data()[r], k, -one);
        }
    }
    Ok(out)
}

/// `gamma(t) = t exp(-t)` on `[0, t_max]`, integrated by composite
/// Gauss-Legendre quadrature with `nodes_per_panel` nodes on each unit
/// panel.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaKernel {
    t_max: f64,
    nodes_per_panel: usize,
    nodes: Vec<(f64, f64)>,
}

impl Default for GammaKernel {
    fn default() -> Self {
        Self::new(40.0, 10).expect("default kernel")
    }
}

pub fn gamma(t: f64) -> f64 {
    if t >= 0.0 {
        t * (-t).exp()
    } else {
        0.0
    }
}

impl GammaKernel {
    pub fn new(t_max: f64, nodes_per_panel: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max >= 1.0) || nodes_per_panel == 0 {
            return Err(Error::Invalid("gamma kernel needs t_max >= 1 and at least one node per panel".into()));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(nodes_per_panel).expect("nonzero"));
        let panels = t_max.ceil() as usize;
        let width = t_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels * nodes_per_panel);
        for p in 0..panels {
            let a = p as f64 * width;
            for &(x, w) in rule.as_node_weight_pairs() {
                let t = a + 0.5 * width * (x + 1.0);
                nodes.push((t, 0.5 * width * w));
            }
        }
        Ok(Self { t_max, nodes_per_panel, nodes })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    /// Quadrature nodes and weights on `[0, t_max]`.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// `int_{t_max}^inf gamma = (t_max + 1) exp(-t_max)`.
    pub fn tail_bound(&self) -> f64 {
        (self.t_max + 1.0) * (-self.t_max).exp()
    }

    /// `int gamma(t) exp(-i kappa t) dt` by the rule; `1 / (1 + i kappa)^2` in
    /// exact arithmetic.
    pub fn laplace(&self, kappa: f64) -> Complex64 {
        self.nodes.iter().map(|&(t, w)| Complex64::from_polar(w * gamma(t), -kappa * t)).sum()
    }
}

/// `int gamma(x) prod_j (1 - d_j)^2 f(x) dx` over `[0, t_max]^n`, which
/// reproduces `f(0)`. Derivatives are analytic when `f` supplies them and
/// fourth-order central differences otherwise.
pub fn gamma_reproduce(f: &dyn FieldFn, kernel: &GammaKernel) -> Result<AlgebraElement> {
    let n = f.n();
    let k = f.algebra_dim();
    let kk = k * k;
    let nodes = kernel.nodes();
    let mut acc = vec![ZERO; kk];
    let mut tmp = vec![ZERO; kk];
    let mut x = vec![0.0; n];
    let mut idx = vec![0usize; n];
    let coef = [1.0, -2.0, 1.0];
    let total = nodes.len().pow(n as u32);
    let analytic = {
        let probe = vec![1u8; n];
        f.partial_into(&vec![0.0; n], &probe, &mut tmp)
    };
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        for a in 0..n {
            idx[a] = rem % nodes.len();
            rem /= nodes.len();
            let (t, wt) = nodes[idx[a]];
            x[a] = t;
            w *= wt * gamma(t);
        }
        // expand prod_j (1 - d_j)^2 over orders in {0, 1, 2}^n
        for mask in 0..3usize.pow(n as u32) {
            let mut m = mask;
            let mut orders = vec![0u8; n];
            let mut c = w;
            for o in orders.iter_mut() {
                *o = (m % 3) as u8;
                m /= 3;
                c *= coef[*o as usize];
            }
            field_partial(f, analytic, &x, &orders, &mut tmp)?;
            for (a, t) in acc.iter_mut().zip(&tmp) {
                *a += t * c;
            }
        }
    }
    Ok(AlgebraElement::from_entries(k, acc))
}

fn field_partial(f: &dyn FieldFn, analytic: bool, x: &[f64], orders: &[u8], out: &mut [Complex64]) -> Result<()> {
    if orders.iter().all(|&o| o == 0) {
        f.eval_into(x, out);
        return Ok(());
    }
    if analytic && f.partial_into(x, orders, out) {
        return Ok(());
    }
    let mut result = vec![ZERO; out.len()];
    let mut tmp = vec![ZERO; out.len()];
    let stencils: Vec<&[f64]> = orders
        .iter()
        .map(|&o| central4_stencil(o).ok_or_else(|| Error::Capability(format!("derivative order {o} unsupported"))))
        .collect::<Result<_>>()?;
    let total: usize = stencils.iter().map(|s| s.len()).product();
    let total_order: i32 = orders.iter().map(|&o| o as i32).sum();
    let step = central4_step(total_order);
    let scale = step.powi(-total_order);
    // stencils sum to zero, so differencing against f(x) loses nothing and
    // keeps constants exact
    let mut centre = vec![ZERO; out.len()];
    f.eval_into(x, &mut centre);
    let mut y = x.to_vec();
    for flat in 0..total {
        let mut rem = flat;
        let mut w = scale;
        for (a, s) in stencils.iter().enumerate() {
            let i = rem % s.len();
            rem /= s.len();
            w *= s[i];
            y[a] = x[a] + (i as f64 - (s.len() / 2) as f64) * step;
        }
        if w != 0.0 {
            f.eval_into(&y, &mut tmp);
            for ((r, t), c) in result.iter_mut().zip(&tmp).zip(&centre) {
                *r += (t - c) * w;
            }
        }
    }
    out.copy_from_slice(&result);
    Ok(())
}

/// `b = prod_j (1 + d_xj)^2 (1 + d_xij)^2 a` on `grid`.
///
/// Sampled symbols and closed forms with the spectral scheme use the exact
/// multiplier `prod (1 + i kappa)^2`; other closed forms expand the product
/// into derivatives of order at most 2 per variable.
pub fn b_transform(a: &PhaseSymbol, grid: &PhaseGrid) -> Result<SampledSymbol> {
    if a.scheme() == DerivativeScheme::Spectral {
        let s = a.sample(grid)?;
        let shape = grid.shape();
        return Ok(s.spectral_map(|kv, m| {
            let mut c = Complex64::new(1.0, 0.0);
            for ax in 0..kv.len() {
                // the Nyquist mode drops the odd term
                let odd = if m[ax] == -(shape[ax] as i64 / 2) { 0.0 } else { 2.0 * kv[ax] };
                c *= Complex64::new(1.0 - kv[ax] * kv[ax], odd);
            }
            c
        }));
    }
    let n = grid.n();
    let coef = [1.0, 2.0, 1.0];
    let mut out = SampledSymbol::zeros(*grid, a.algebra_dim());
    for mask in 0..3usize.pow(2 * n as u32) {
        let mut m = mask;
        let mut orders = vec![0u8; 2 * n];
        let mut c = 1.0;
        for o in orders.iter_mut() {
            *o = (m % 3) as u8;
            m /= 3;
            c *= coef[*o as usize];
        }
        let d = a.sample_derivative(grid, &orders[..n], &orders[n..])?;
        for (o, v) in out.data_mut().iter_mut().zip(d.data()) {
            *o += v * c;
        }
    }
    Ok(out)
}

/// `a(x, xi) = int gamma(y) gamma(eta) b(x - y, xi - eta) dy deta` over the
/// truncated quadrant, with `gamma` the product kernel on all `2n` phase
/// coordinates.
///
/// The convolution is applied as the Fourier multiplier
/// `prod sum_i w_i gamma(t_i) exp(-i kappa t_i)`, which is the quadrature
/// rule applied to the trigonometric interpolant of `b`. It is therefore only
/// meaningful for symbols that are periodic on the sampled box, such as
/// trigonometric polynomials with frequencies on the dual lattice.
pub fn gamma_reconstruct(b: &PhaseSymbol, grid: &PhaseGrid, kernel: &GammaKernel) -> Result<SampledSymbol> {
    let s = b.sample(grid)?;
    let spacings = grid.spacings();
    let shape = grid.shape();
    // one table per axis, indexed by signed mode
    let tables: Vec<Vec<Complex64>> = shape
        .iter()
        .zip(&spacings)
        .map(|(&len, &h)| {
            let dk = 2.0 * std::f64::consts::PI / (len as f64 * h);
            (0..len)
                .map(|i| {
                    let m = crate::fft::signed_index(i, len);
                    kernel.laplace(m as f64 * dk)
                })
                .collect()
        })
        .collect();
    Ok(s.spectral_map(|_, m| {
        let mut c = Complex64::new(1.0, 0.0);
        for (ax, &mi) in m.iter().enumerate() {
            c *= tables[ax][mi.rem_euclid(shape[ax] as i64) as usize];
        }
        c
    }))
}

/// Result of testing `a(x, xi) = F(x - J xi)` with `F(z) = a(z, 0)`.
#[derive(Debug, Clone)]
pub struct TranslationRecovery {
    pub f: ModuleFunction,
    /// `sup ||a(z, zeta) - F(z - J zeta)||` over the sampled box.
    pub residual: f64,
    /// `sup ||a||`, for relative reading of the residual.
    pub scale: f64,
}

impl TranslationRecovery {
    /// Whether the translation form is accepted at relative tolerance `tol`.
    pub fn accepted(&self, tol: f64) -> bool {
        self.residual <= tol * self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Extracts `F(z) = a(z, 0)` on the position grid and measures how far `a`
/// is from `F(x - J xi)`. Closed forms are compared against `a(x - J xi, 0)`
/// evaluated exactly; sampled symbols translate the samples of `F`, exactly
/// when `J xi` is a multiple of the grid spacing and spectrally otherwise.
pub fn recover_translation_symbol(a: &PhaseSymbol, j: &SkewForm, grid: &PhaseGrid) -> Result<TranslationRecovery> {
    if j.n() != grid.n() || a.n() != grid.n() {
        return dim_err("J, symbol and phase grid dimensions differ");
    }
    if !grid.xi.contains(&vec![0.0; grid.n()]) {
        return dim_err("frequency grid does not contain xi = 0");
    }
    let n = grid.n();
    let k = a.algebra_dim();
    let kk = k * k;
    let np = grid.x.len();
    let zero = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut xi = vec![0.0; n];
    match a {
        PhaseSymbol::Closed { f, .. } => {
            let fz = ModuleFunction::from_fn(grid.x, k, |z| {
                let mut v = vec![ZERO; kk];
                f.eval_into(z, &zero, &mut v);
                AlgebraElement::from_entries(k, v)
            });
            let mut residual: f64 = 0.0;
            let mut scale: f64 = 0.0;
            let (mut va, mut vf) = (vec![ZERO; kk], vec![ZERO; kk]);
            for idx in 0..grid.len() {
                grid.point_into(idx, &mut x, &mut xi);
                f.eval_into(&x, &xi, &mut va);
                let jx = j.apply(&xi);
                let y: Vec<f64> = x.iter().zip(&jx).map(|(p, q)| p - q).collect();
                f.eval_into(&y, &zero, &mut vf);
                scale = scale.max(algebra::cnorm_slice(&va, k));
                let diff: Vec<Complex64> = va.iter().zip(&vf).map(|(p, q)| p - q).collect();
                residual = residual.max(algebra::cnorm_slice(&diff, k));
            }
            Ok(TranslationRecovery { f: fz, residual, scale })
        }
        PhaseSymbol::Sampled(s) => {
            if s.grid() != grid {
                return dim_err("sampled symbol lives on a different phase grid");
            }
            let origin = grid.xi.origin_index();
            let fz = s.slice_at_frequency(origin);
            let mut residual: f64 = 0.0;
            for ixi in 0..grid.xi.len() {
                grid.xi.point_into(ixi, &mut xi);
                let moved = fz.translate(&j.apply(&xi));
                for ix in 0..np {
                    let d: Vec<Complex64> = s.block(ix, ixi).iter().zip(moved.sample_slice(ix)).map(|(p, q)| p - q).collect();
                    residual = residual.max(algebra::cnorm_slice(&d, k));
                }
            }
            Ok(TranslationRecovery { f: fz, residual, scale: s.sup_norm() })
        }
    }
}

/// `max_i sup ||d_xi_i a - sum_j J_ij d_xj a||`, zero for translation-type
/// symbols.
pub fn translation_certificate(a: &PhaseSymbol, j: &SkewForm, grid: &PhaseGrid) -> Result<f64> {
    let n = grid.n();
    if j.n() != n {
        return dim_err("J and phase grid dimensions differ");
    }
    let zero = vec![0u8; n];
    let dx: Vec<SampledSymbol> = (0..n)
        .map(|c| {
            let mut e = zero.clone();
            e[c] = 1;
            a.sample_derivative(grid, &e, &zero)
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut e = zero.clone();
        e[i] = 1;
        let mut r = a.sample_derivative(grid, &zero, &e)?;
        for (c, d) in dx.iter().enumerate() {
            let w = j.get(i, c);
            if w != 0.0 {
                for (o, v) in r.data_mut().iter_mut().zip(d.data()) {
                    *o -= v * w;
                }
            }
        }
        worst = worst.max(r.sup_norm());
    }
    Ok(worst)
}

/// Every intermediate of the recovery chain for an operator `T`.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    /// Symbol read off from `T` by plane-wave probing.
    pub symbol: SampledSymbol,
    pub b: SampledSymbol,
    /// `sup ||b(x + z, xi + zeta) - b(x + z - J zeta, xi)||` over the probe shifts.
    pub shift_invariance: f64,
    /// `sup ||gamma_reconstruct(b) - symbol||`.
    pub reconstruction_error: f64,
    pub recovery: TranslationRecovery,
}

/// Symbol of `T`, its `b` transform, the shift invariance of `b`, the
/// reconstruction of the symbol from `b` and the extraction of `F`.
pub fn rieffel_pipeline(
    t: &OperatorHandle,
    k: usize,
    j: &SkewForm,
    grid: &PhaseGrid,
    shifts: &[(Vec<f64>, Vec<f64>)],
    kernel: &GammaKernel,
) -> Result<PipelineReport> {
    if grid.xi != grid.x.dual() {
        return dim_err("the pipeline runs on the operator phase grid of its position grid");
    }
    let symbol = t.probe_symbol(&grid.x, k)?;
    let b = b_transform(&PhaseSymbol::Sampled(symbol.clone()), grid)?;
    let mut shift_invariance: f64 = 0.0;
    for (z, zeta) in shifts {
        let jz = j.apply(zeta);
        let reduced: Vec<f64> = z.iter().zip(&jz).map(|(p, q)| p - q).collect();
        let lhs = b.shifted(z, zeta);
        let rhs = b.shifted(&reduced, &vec![0.0; z.len()]);
        shift_invariance = shift_invariance.max(lhs.sub(&rhs)?.sup_norm());
    }
    let rebuilt = gamma_reconstruct(&PhaseSymbol::Sampled(b.clone()), grid, kernel)?;
    let reconstruction_error = rebuilt.sub(&symbol)?.sup_norm();
    let recovery = recover_translation_symbol(&PhaseSymbol::Sampled(rebuilt), j, grid)?;
    Ok(PipelineReport { symbol, b, shift_invariance, reconstruction_error, recovery })
}
