//! Functions `R^n -> M_k` that are either sampled on a grid or available in
//! closed form.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{self, AlgebraElement, ZERO};
use crate::error::{dim_err, Result};
use crate::grid::GridSpec;
use crate::module_space::{Interpolant, ModuleFunction};

/// A closed-form `M_k`-valued function on `R^n`.
pub trait FieldFn: Send + Sync {
    fn n(&self) -> usize;
    fn algebra_dim(&self) -> usize;
    /// Writes `f(x)` (row-major `k x k`) into `out`.
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]);
    /// Writes `d^orders f(x)` into `out`, or returns `false` if no analytic
    /// derivative is available.
    fn partial_into(&self, _x: &[f64], _orders: &[u8], _out: &mut [Complex64]) -> bool {
        false
    }
}

/// Grid-backed or closed-form function.
#[derive(Clone)]
pub enum Field {
    Sampled(ModuleFunction),
    Closed(Arc<dyn FieldFn>),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Sampled(m) => f.debug_tuple("Sampled").field(m.grid()).field(&m.algebra_dim()).finish(),
            Field::Closed(c) => write!(f, "Closed(n = {}, k = {})", c.n(), c.algebra_dim()),
        }
    }
}

impl From<ModuleFunction> for Field {
    fn from(m: ModuleFunction) -> Self {
        Field::Sampled(m)
    }
}

impl Field {
    pub fn closed(f: impl FieldFn + 'static) -> Self {
        Field::Closed(Arc::new(f))
    }

    pub fn n(&self) -> usize {
        match self {
            Field::Sampled(m) => m.grid().n(),
            Field::Closed(c) => c.n(),
        }
    }

    pub fn algebra_dim(&self) -> usize {
        match self {
            Field::Sampled(m) => m.algebra_dim(),
            Field::Closed(c) => c.algebra_dim(),
        }
    }

    /// Samples on `grid`. A sampled field must already live on `grid`.
    pub fn sample(&self, grid: &GridSpec) -> Result<ModuleFunction> {
        match self {
            Field::Sampled(m) => {
                if m.grid() != grid {
                    return dim_err(format!("field sampled on {:?}, requested {:?}", m.grid(), grid));
                }
                Ok(m.clone())
            }
            Field::Closed(c) => {
                if c.n() != grid.n() {
                    return dim_err("field dimension differs from grid dimension");
                }
                Ok(sample_closed(c.as_ref(), grid))
            }
        }
    }

    /// Pointwise involution `F^*(x) = F(x)^*`.
    pub fn star(&self) -> Field {
        match self {
            Field::Sampled(m) => Field::Sampled(m.star()),
            Field::Closed(c) => Field::Closed(Arc::new(StarField(c.clone()))),
        }
    }

    /// Evaluator valid anywhere: exact for closed forms, trigonometric
    /// interpolation for samples.
    pub fn evaluator(&self) -> FieldEval {
        match self {
            Field::Sampled(m) => FieldEval::Interp(m.interpolant()),
            Field::Closed(c) => FieldEval::Closed(c.clone()),
        }
    }
}

pub fn sample_closed(f: &dyn FieldFn, grid: &GridSpec) -> ModuleFunction {
    let k = f.algebra_dim();
    let kk = k * k;
    let mut out = ModuleFunction::zeros(*grid, k);
    let mut x = vec![0.0; grid.n()];
    for (idx, block) in out.data_mut().chunks_mut(kk).enumerate() {
        grid.point_into(idx, &mut x);
        f.eval_into(&x, block);
    }
    out
}

pub enum FieldEval {
    Interp(Interpolant),
    Closed(Arc<dyn FieldFn>),
}

impl FieldEval {
    pub fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        match self {
            FieldEval::Interp(i) => i.eval_into(x, out),
            FieldEval::Closed(c) => c.eval_into(x, out),
        }
    }

    pub fn eval(&self, x: &[f64]) -> AlgebraElement {
        let k = match self {
            FieldEval::Interp(i) => i.algebra_dim(),
            FieldEval::Closed(c) => c.algebra_dim(),
        };
        let mut out = vec![ZERO; k * k];
        self.eval_into(x, &mut out);
        AlgebraElement::from_entries(k, out)
    }
}

struct StarField(Arc<dyn FieldFn>);

impl FieldFn for StarField {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn algebra_dim(&self) -> usize {
        self.0.algebra_dim()
    }
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        let k = self.algebra_dim();
        let mut tmp = vec![ZERO; k * k];
        self.0.eval_into(x, &mut tmp);
        algebra::star_into(&tmp, out, k);
    }
    fn partial_into(&self, x: &[f64], orders: &[u8], out: &mut [Complex64]) -> bool {
        let k = self.algebra_dim();
        let mut tmp = vec![ZERO; k * k];
        if !self.0.partial_into(x, orders, &mut tmp) {
            return false;
        }
        algebra::star_into(&tmp, out, k);
        true
    }
}

/// `x -> f(x - shift)`.
pub struct Translated {
    inner: Arc<dyn FieldFn>,
    shift: Vec<f64>,
}

impl Translated {
    pub fn new(inner: Arc<dyn FieldFn>, shift: Vec<f64>) -> Self {
        assert_eq!(inner.n(), shift.len());
        Self { inner, shift }
    }

    fn shifted(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).map(|(a, s)| a - s).collect()
    }
}

impl FieldFn for Translated {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn algebra_dim(&self) -> usize {
        self.inner.algebra_dim()
    }
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        self.inner.eval_into(&self.shifted(x), out)
    }
    fn partial_into(&self, x: &[f64], orders: &[u8], out: &mut [Complex64]) -> bool {
        self.inner.partial_into(&self.shifted(x), orders, out)
    }
}

/// The analytic partial derivative `d^orders f` of a closed form that
/// supplies its derivatives.
pub struct PartialField {
    inner: Arc<dyn FieldFn>,
    orders: Vec<u8>,
}

impl PartialField {
    pub fn new(inner: Arc<dyn FieldFn>, orders: Vec<u8>) -> Self {
        assert_eq!(inner.n(), orders.len());
        Self { inner, orders }
    }
}

impl FieldFn for PartialField {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn algebra_dim(&self) -> usize {
        self.inner.algebra_dim()
    }
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        assert!(self.inner.partial_into(x, &self.orders, out), "inner field has no analytic derivatives");
    }
    fn partial_into(&self, x: &[f64], orders: &[u8], out: &mut [Complex64]) -> bool {
        let total: Vec<u8> = orders.iter().zip(&self.orders).map(|(a, b)| a + b).collect();
        self.inner.partial_into(x, &total, out)
    }
}

/// Closed form backed by a closure, without analytic derivatives.
pub struct FnField<F> {
    n: usize,
    k: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64]) -> AlgebraElement + Send + Sync,
{
    pub fn new(n: usize, k: usize, f: F) -> Self {
        Self { n, k, f }
    }
}

impl<F> FieldFn for FnField<F>
where
    F: Fn(&[f64]) -> AlgebraElement + Send + Sync,
{
    fn n(&self) -> usize {
        self.n
    }
    fn algebra_dim(&self) -> usize {
        self.k
    }
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        out.copy_from_slice((self.f)(x).entries());
    }
}
