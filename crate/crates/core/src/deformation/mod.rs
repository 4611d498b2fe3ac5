//! The deformed product
//!
//! ```text
//! (F x_J G)(x) = int int F(x + J u) G(x + v) exp(i u.v) du dv   (du = (2 pi)^(-n/2) du)
//!              = int exp(i u.x) F(x - J u) G^(u) du
//! ```
//!
//! and the left and right actions `L_F g = F x_J g`, `R_G f = f x_J G`.
//!
//! F-values always multiply G-values from the left. The fast path for two
//! sampled factors is the twisted convolution of their spectra
//!
//! ```text
//! H^(kappa) = (2 pi)^(-n/2) (pi/L)^n sum_{eta + xi = kappa} exp(-i eta.J xi) F^(eta) G^(xi)
//! ```
//!
//! with `eta + xi` wrapped into the dual box. On grid samples this is
//! identical to evaluating the single-Fourier form with `F(x - J u)` taken
//! from the trigonometric interpolant of `F`, so it is exact for band-limited
//! data. When one factor is a closed form, the single-Fourier form is summed
//! directly with that factor evaluated exactly.

pub mod oscillatory;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{self, ZERO};
use crate::error::{dim_err, Error, Result};
use crate::field::{Field, FieldFn};
use crate::grid::GridSpec;
use crate::module_space::{fourier, Direction, ModuleFunction};

pub use oscillatory::{oscillatory_integral, Amplitude, CutoffFamily, CutoffShape, OscillatoryResult};

/// A real antisymmetric `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewForm {
    n: usize,
    entries: Vec<f64>,
}

impl SkewForm {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return dim_err(format!("skew form needs {} entries, got {}", n * n, entries.len()));
        }
        for i in 0..n {
            for j in 0..n {
                if entries[i * n + j] != -entries[j * n + i] {
                    return Err(Error::Invalid("J must be antisymmetric".into()));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![0.0; n * n] }
    }

    /// `[[0, theta], [-theta, 0]]`.
    pub fn standard(theta: f64) -> Self {
        Self { n: 2, entries: vec![0.0, theta, -theta, 0.0] }
    }

    /// Converts a matrix given in the convention `x_{2 pi J}` used by Rieffel
    /// into this crate's convention.
    pub fn from_rieffel(n: usize, entries: Vec<f64>) -> Result<Self> {
        let s = Self::new(n, entries)?;
        Ok(Self { n, entries: s.entries.iter().map(|v| v / (2.0 * PI)).collect() })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// `J v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_into(v, &mut out);
        out
    }

    #[inline]
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = (0..self.n).map(|j| self.entries[i * self.n + j] * v[j]).sum();
        }
    }

    /// `u . J v`.
    pub fn pairing(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += u[i] * self.entries[i * self.n + j] * v[j];
            }
        }
        s
    }
}

fn check_inputs(f: &Field, g: &Field, j: &SkewForm, grid: &GridSpec) -> Result<()> {
    if j.n() != grid.n() {
        return dim_err(format!("J is {0}x{0} but the grid has n = {1}", j.n(), grid.n()));
    }
    if f.n() != grid.n() || g.n() != grid.n() {
        return dim_err("factor dimension differs from the grid dimension");
    }
    if f.algebra_dim() != g.algebra_dim() {
        return dim_err(format!("algebra dimensions {} and {} differ", f.algebra_dim(), g.algebra_dim()));
    }
    for fld in [f, g] {
        if let Field::Sampled(m) = fld {
            if m.grid() != grid {
                return dim_err(format!("factor sampled on {:?}, product requested on {:?}", m.grid(), grid));
            }
        }
    }
    Ok(())
}

/// `F x_J G` sampled on `grid`.
pub fn deformed_product(f: &Field, g: &Field, j: &SkewForm, grid: &GridSpec) -> Result<ModuleFunction> {
    check_inputs(f, g, j, grid)?;
    match (f, g) {
        (Field::Sampled(a), Field::Sampled(b)) => Ok(twisted_product(a, b, j)),
        (Field::Closed(a), _) => Ok(closed_left_product(a.as_ref(), &g.sample(grid)?, j)),
        (Field::Sampled(a), Field::Closed(b)) => Ok(closed_right_product(a, b.as_ref(), j)),
    }
}

/// `L_F g = F x_J g`.
pub fn left_action(f: &Field, g: &ModuleFunction, j: &SkewForm) -> Result<ModuleFunction> {
    deformed_product(f, &Field::Sampled(g.clone()), j, g.grid())
}

/// `R_G f = f x_J G = int exp(i x.xi) f^(xi) G(x + J xi) dxi`.
pub fn right_action(g: &Field, f: &ModuleFunction, j: &SkewForm) -> Result<ModuleFunction> {
    deformed_product(&Field::Sampled(f.clone()), g, j, f.grid())
}

/// Spectral samples whose block has a non-negligible entry, as
/// (signed multi-index, flat index).
fn significant_modes(spec: &ModuleFunction) -> Vec<(Vec<i64>, usize)> {
    let grid = spec.grid();
    let kk = spec.algebra_dim().pow(2);
    let peak = spec.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = peak * crate::fft::SPECTRAL_CUTOFF;
    let half = grid.points() as i64 / 2;
    let mut m = vec![0usize; grid.n()];
    let mut out = Vec::new();
    for idx in 0..grid.len() {
        if spec.data()[idx * kk..(idx + 1) * kk].iter().any(|z| z.norm() > cut) {
            grid.unflatten(idx, &mut m);
            out.push((m.iter().map(|&i| i as i64 - half).collect(), idx));
        }
    }
    out
}

/// Phase tables `exp(-i dxi^2 J_ab s t)` for signed indices `s, t`.
struct PhaseTables {
    half: i64,
    points: usize,
    tables: Vec<(usize, usize, Vec<Complex64>)>,
}

impl PhaseTables {
    fn new(j: &SkewForm, points: usize, dxi: f64) -> Self {
        let half = points as i64 / 2;
        let mut tables = Vec::new();
        for a in 0..j.n() {
            for b in 0..j.n() {
                let jab = j.get(a, b);
                if jab == 0.0 {
                    continue;
                }
                let mut t = vec![ZERO; points * points];
                for s in 0..points {
                    for r in 0..points {
                        let ph = -dxi * dxi * jab * ((s as i64 - half) * (r as i64 - half)) as f64;
                        t[s * points + r] = Complex64::from_polar(1.0, ph);
                    }
                }
                tables.push((a, b, t));
            }
        }
        Self { half, points, tables }
    }

    #[inline]
    fn phase(&self, eta: &[i64], xi: &[i64]) -> Complex64 {
        let mut c = Complex64::new(1.0, 0.0);
        for (a, b, t) in &self.tables {
            c *= t[(eta[*a] + self.half) as usize * self.points + (xi[*b] + self.half) as usize];
        }
        c
    }
}

fn twisted_product(f: &ModuleFunction, g: &ModuleFunction, j: &SkewForm) -> ModuleFunction {
    let grid = *f.grid();
    let k = f.algebra_dim();
    let kk = k * k;
    let n = grid.n();
    let fh = fourier(f, Direction::Forward);
    let gh = fourier(g, Direction::Forward);
    let dual = *fh.grid();
    let dxi = dual.spacing();
    let weight = (2.0 * PI).powf(-0.5 * n as f64) * dxi.powi(n as i32);
    let np = grid.points() as i64;
    let half = np / 2;
    let tables = PhaseTables::new(j, grid.points(), dxi);
    let fm = significant_modes(&fh);
    let gm = significant_modes(&gh);
    let mut out = ModuleFunction::zeros(dual, k);
    let mut target = vec![0usize; n];
    for (eta, ie) in &fm {
        let fb = &fh.data()[ie * kk..(ie + 1) * kk];
        for (xi, ix) in &gm {
            for a in 0..n {
                target[a] = ((eta[a] + xi[a] + half).rem_euclid(np)) as usize;
            }
            let c = tables.phase(eta, xi) * weight;
            let t = dual.flatten(&target);
            algebra::matmul_acc(&mut out.data_mut()[t * kk..(t + 1) * kk], fb, &gh.data()[ix * kk..(ix + 1) * kk], k, c);
        }
    }
    fourier(&out, Direction::Inverse)
}

fn closed_left_product(f: &dyn FieldFn, g: &ModuleFunction, j: &SkewForm) -> ModuleFunction {
    let grid = *g.grid();
    let k = g.algebra_dim();
    let kk = k * k;
    let n = grid.n();
    let gh = fourier(g, Direction::Forward);
    let dual = *gh.grid();
    let weight = (2.0 * PI).powf(-0.5 * n as f64) * dual.spacing().powi(n as i32);
    let modes = significant_modes(&gh);
    let mut out = ModuleFunction::zeros(grid, k);
    let mut x = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut ju = vec![0.0; n];
    let mut arg = vec![0.0; n];
    let mut fv = vec![ZERO; kk];
    for idx in 0..grid.len() {
        grid.point_into(idx, &mut x);
        let mut acc = vec![ZERO; kk];
        for (_, iu) in &modes {
            dual.point_into(*iu, &mut u);
            j.apply_into(&u, &mut ju);
            for a in 0..n {
                arg[a] = x[a] - ju[a];
            }
            f.eval_into(&arg, &mut fv);
            let ph: f64 = x.iter().zip(&u).map(|(p, q)| p * q).sum();
            algebra::matmul_acc(&mut acc, &fv, &gh.data()[iu * kk..(iu + 1) * kk], k, Complex64::from_polar(weight, ph));
        }
        out.data_mut()[idx * kk..(idx + 1) * kk].copy_from_slice(&acc);
    }
    out
}

fn closed_right_product(f: &ModuleFunction, g: &dyn FieldFn, j: &SkewForm) -> ModuleFunction {
    let grid = *f.grid();
    let k = f.algebra_dim();
    let kk = k * k;
    let n = grid.n();
    let fh = fourier(f, Direction::Forward);
    let dual = *fh.grid();
    let weight = (2.0 * PI).powf(-0.5 * n as f64) * dual.spacing().powi(n as i32);
    let modes = significant_modes(&fh);
    let mut out = ModuleFunction::zeros(grid, k);
    let mut x = vec![0.0; n];
    let mut xi = vec![0.0; n];
    let mut jxi = vec![0.0; n];
    let mut arg = vec![0.0; n];
    let mut gv = vec![ZERO; kk];
    for idx in 0..grid.len() {
        grid.point_into(idx, &mut x);
        let mut acc = vec![ZERO; kk];
        for (_, ix) in &modes {
            dual.point_into(*ix, &mut xi);
            j.apply_into(&xi, &mut jxi);
            for a in 0..n {
                arg[a] = x[a] + jxi[a];
            }
            g.eval_into(&arg, &mut gv);
            let ph: f64 = x.iter().zip(&xi).map(|(p, q)| p * q).sum();
            algebra::matmul_acc(&mut acc, &fh.data()[ix * kk..(ix + 1) * kk], &gv, k, Complex64::from_polar(weight, ph));
        }
        out.data_mut()[idx * kk..(idx + 1) * kk].copy_from_slice(&acc);
    }
    out
}

/// Radial mollifier `psi(xi) = exp(1 - 1/(1 - |xi|^2))` on the unit ball.
pub fn bump(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

/// `phi_k^ = psi_k I` on the dual grid of `grid`, where
/// `psi_k(xi) = index^n psi(index xi)` is normalised to unit discrete mass.
pub fn mollifier_spectrum(index: u32, k: usize, grid: &GridSpec) -> Result<ModuleFunction> {
    if index == 0 {
        return Err(Error::Invalid("approximate identity index must be >= 1".into()));
    }
    let dual = grid.dual();
    let radius = 1.0 / index as f64;
    if radius <= dual.spacing() {
        return Err(Error::Resolution(format!(
            "mollifier radius {radius} does not exceed the frequency spacing {}; enlarge the box",
            dual.spacing()
        )));
    }
    let scale = index as f64;
    let profile = ModuleFunction::from_scalar_fn(dual, |xi| {
        let r2: f64 = xi.iter().map(|v| (v * scale).powi(2)).sum();
        Complex64::new(bump(r2), 0.0)
    });
    let mass: f64 = profile.data().iter().map(|z| z.re).sum::<f64>() * dual.cell_volume();
    let id = crate::algebra::AlgebraElement::identity(k);
    Ok(ModuleFunction::from_fn(dual, k, |xi| {
        let r2: f64 = xi.iter().map(|v| (v * scale).powi(2)).sum();
        id.scale(Complex64::new(bump(r2) / mass, 0.0))
    }))
}

/// `e_k = (2 pi)^(n/2) phi_k`, so that `L_{e_k} f(x) = int exp(i x.xi) psi_k(xi) f(x + J xi) dxi -> f(x)`.
///
/// The factor `(2 pi)^(n/2)` is what makes `e_k` tend to the unit: the
/// inverse transform of a unit-mass `psi_k` tends to `(2 pi)^(-n/2)`.
pub fn approximate_identity(index: u32, k: usize, j: &SkewForm, grid: &GridSpec) -> Result<ModuleFunction> {
    if j.n() != grid.n() {
        return dim_err("J and grid dimensions differ");
    }
    let spec = mollifier_spectrum(index, k, grid)?;
    let n = grid.n() as f64;
    Ok(fourier(&spec, Direction::Inverse).scale(Complex64::new((2.0 * PI).powf(0.5 * n), 0.0)))
}
