//! Closed-form phase-space symbols with analytic derivatives.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, ZERO};
use crate::deformation::oscillatory::{plateau, plateau_derivative};
use crate::deformation::SkewForm;
use crate::field::FieldFn;

/// A closed-form symbol `a: R^n x R^n -> M_k`.
pub trait PhaseFn: Send + Sync {
    fn n(&self) -> usize;
    fn algebra_dim(&self) -> usize;
    fn eval_into(&self, x: &[f64], xi: &[f64], out: &mut [Complex64]);
    /// `d_x^dx d_xi^dxi a`, or `false` when not supplied.
    fn partial_into(&self, _x: &[f64], _xi: &[f64], _dx: &[u8], _dxi: &[u8], _out: &mut [Complex64]) -> bool {
        false
    }
}

fn zero_orders(o: &[u8]) -> bool {
    o.iter().all(|&v| v == 0)
}

/// `a(x, xi) = c`.
pub struct ConstantSymbol {
    pub n: usize,
    pub value: AlgebraElement,
}

impl PhaseFn for ConstantSymbol {
    fn n(&self) -> usize {
        self.n
    }
    fn algebra_dim(&self) -> usize {
        self.value.dim()
    }
    fn eval_into(&self, _x: &[f64], _xi: &[f64], out: &mut [Complex64]) {
        out.copy_from_slice(self.value.entries());
    }
    fn partial_into(&self, x: &[f64], xi: &[f64], dx: &[u8], dxi: &[u8], out: &mut [Complex64]) -> bool {
        if zero_orders(dx) && zero_orders(dxi) {
            self.eval_into(x, xi, out);
        } else {
            out.iter_mut().for_each(|z| *z = ZERO);
        }
        true
    }
}

/// `a(x, xi) = m(x)`.
pub struct MultiplicationSymbol(pub Arc<dyn FieldFn>);

impl PhaseFn for MultiplicationSymbol {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn algebra_dim(&self) -> usize {
        self.0.algebra_dim()
    }
    fn eval_into(&self, x: &[f64], _xi: &[f64], out: &mut [Complex64]) {
        self.0.eval_into(x, out)
    }
    fn partial_into(&self, x: &[f64], _xi: &[f64], dx: &[u8], dxi: &[u8], out: &mut [Complex64]) -> bool {
        if !zero_orders(dxi) {
            out.iter_mut().for_each(|z| *z = ZERO);
            return true;
        }
        self.0.partial_into(x, dx, out)
    }
}

/// `a(x, xi) = F(x - s J xi)` with `s = +1` (the symbol of `L_F`) or
/// `s = -1` (the companion `G(x + J xi)`).
pub struct TranslationSymbol {
    f: Arc<dyn FieldFn>,
    j: SkewForm,
    sign: f64,
}

impl TranslationSymbol {
    pub fn left(f: Arc<dyn FieldFn>, j: SkewForm) -> Self {
        assert_eq!(f.n(), j.n());
        Self { f, j, sign: 1.0 }
    }

    pub fn right(f: Arc<dyn FieldFn>, j: SkewForm) -> Self {
        assert_eq!(f.n(), j.n());
        Self { f, j, sign: -1.0 }
    }

    fn arg(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        let jx = self.j.apply(xi);
        x.iter().zip(&jx).map(|(a, b)| a - self.sign * b).collect()
    }

    /// Chain rule: `d/dxi_i = -s sum_j J_ji d_j` acting on `F`.
    fn expand(&self, dx: &[u8], dxi: &[u8]) -> BTreeMap<Vec<u8>, f64> {
        let n = self.j.n();
        let mut terms = BTreeMap::new();
        terms.insert(dx.to_vec(), 1.0);
        for (i, &g) in dxi.iter().enumerate() {
            for _ in 0..g {
                let mut next = BTreeMap::new();
                for (ord, c) in &terms {
                    for jj in 0..n {
                        let coef = -self.sign * self.j.get(jj, i);
                        if coef == 0.0 {
                            continue;
                        }
                        let mut o = ord.clone();
                        o[jj] += 1;
                        *next.entry(o).or_insert(0.0) += c * coef;
                    }
                }
                terms = next;
            }
        }
        terms
    }
}

impl PhaseFn for TranslationSymbol {
    fn n(&self) -> usize {
        self.f.n()
    }
    fn algebra_dim(&self) -> usize {
        self.f.algebra_dim()
    }
    fn eval_into(&self, x: &[f64], xi: &[f64], out: &mut [Complex64]) {
        self.f.eval_into(&self.arg(x, xi), out)
    }
    fn partial_into(&self, x: &[f64], xi: &[f64], dx: &[u8], dxi: &[u8], out: &mut [Complex64]) -> bool {
        let y = self.arg(x, xi);
        out.iter_mut().for_each(|z| *z = ZERO);
        let mut tmp = vec![ZERO; out.len()];
        for (ord, c) in self.expand(dx, dxi) {
            if !self.f.partial_into(&y, &ord, &mut tmp) {
                return false;
            }
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += t * c;
            }
        }
        true
    }
}

/// `sum_t c_t exp(i (p_t.x + q_t.xi))`.
#[derive(Debug, Clone)]
pub struct TrigSymbol {
    n: usize,
    k: usize,
    modes: Vec<(Vec<f64>, Vec<f64>, AlgebraElement)>,
}

impl TrigSymbol {
    pub fn new(n: usize, k: usize, modes: Vec<(Vec<f64>, Vec<f64>, AlgebraElement)>) -> Self {
        for (p, q, c) in &modes {
            assert!(p.len() == n && q.len() == n && c.dim() == k);
        }
        Self { n, k, modes }
    }

    /// Scalar `sin(x_a) sin(xi_b)`.
    pub fn sin_sin(n: usize, a: usize, b: usize) -> Self {
        let mut modes = Vec::new();
        for (sp, sq, c) in [(1.0, 1.0, -0.25), (1.0, -1.0, 0.25), (-1.0, 1.0, 0.25), (-1.0, -1.0, -0.25)] {
            let mut p = vec![0.0; n];
            let mut q = vec![0.0; n];
            p[a] = sp;
            q[b] = sq;
            modes.push((p, q, AlgebraElement::scalar(1, Complex64::new(c, 0.0))));
        }
        Self::new(n, 1, modes)
    }

    pub fn modes(&self) -> &[(Vec<f64>, Vec<f64>, AlgebraElement)] {
        &self.modes
    }

    pub fn scaled(&self, s: f64) -> Self {
        let modes = self.modes.iter().map(|(p, q, c)| (p.clone(), q.clone(), c.scale(Complex64::new(s, 0.0)))).collect();
        Self { n: self.n, k: self.k, modes }
    }
}

impl PhaseFn for TrigSymbol {
    fn n(&self) -> usize {
        self.n
    }
    fn algebra_dim(&self) -> usize {
        self.k
    }
    fn eval_into(&self, x: &[f64], xi: &[f64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|z| *z = ZERO);
        for (p, q, c) in &self.modes {
            let ph: f64 = p.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + q.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
            let s = Complex64::from_polar(1.0, ph);
            for (o, v) in out.iter_mut().zip(c.entries()) {
                *o += v * s;
            }
        }
    }
    fn partial_into(&self, x: &[f64], xi: &[f64], dx: &[u8], dxi: &[u8], out: &mut [Complex64]) -> bool {
        out.iter_mut().for_each(|z| *z = ZERO);
        for (p, q, c) in &self.modes {
            let ph: f64 = p.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + q.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
            let mut s = Complex64::from_polar(1.0, ph);
            for a in 0..self.n {
                s *= Complex64::new(0.0, p[a]).powi(dx[a] as i32) * Complex64::new(0.0, q[a]).powi(dxi[a] as i32);
            }
            for (o, v) in out.iter_mut().zip(c.entries()) {
                *o += v * s;
            }
        }
        true
    }
}

/// The coordinate function `b_i(x, xi) = x_i + sum_k J_ik xi_k` (scalar).
pub struct CoordinateSymbol {
    pub j: SkewForm,
    pub index: usize,
}

impl PhaseFn for CoordinateSymbol {
    fn n(&self) -> usize {
        self.j.n()
    }
    fn algebra_dim(&self) -> usize {
        1
    }
    fn eval_into(&self, x: &[f64], xi: &[f64], out: &mut [Complex64]) {
        let i = self.index;
        out[0] = Complex64::new(x[i] + (0..self.n()).map(|k| self.j.get(i, k) * xi[k]).sum::<f64>(), 0.0);
    }
    fn partial_into(&self, x: &[f64], xi: &[f64], dx: &[u8], dxi: &[u8], out: &mut [Complex64]) -> bool {
        let total: u32 = dx.iter().chain(dxi).map(|&v| v as u32).sum();
        out[0] = match total {
            0 => {
                self.eval_into(x, xi, out);
                return true;
            }
            1 => {
                if let Some(a) = dx.iter().position(|&v| v == 1) {
                    Complex64::new(if a == self.index { 1.0 } else { 0.0 }, 0.0)
                } else {
                    let b = dxi.iter().position(|&v| v == 1).unwrap();
                    Complex64::new(self.j.get(self.index, b), 0.0)
                }
            }
            _ => ZERO,
        };
        true
    }
}

/// `(x, xi) -> a(x + z, xi + zeta)`.
pub struct ShiftedSymbol {
    pub inner: Arc<dyn PhaseFn>,
    pub z: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl ShiftedSymbol {
    fn args(&self, x: &[f64], xi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (
            x.iter().zip(&self.z).map(|(a, b)| a + b).collect(),
            xi.iter().zip(&self.zeta).map(|(a, b)| a + b).collect(),
        )
    }
}

impl PhaseFn for ShiftedSymbol {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn algebra_dim(&self) -> usize {
        self.inner.algebra_dim()
    }
    fn eval_into(&self, x: &[f64], xi: &[f64], out: &mut [Complex64]) {
        let (y, eta) = self.args(x, xi);
        self.inner.eval_into(&y, &eta, out)
    }
    fn partial_into(&self, x: &[f64], xi: &[f64], dx: &[u8], dxi: &[u8], out: &mut [Complex64]) -> bool {
        let (y, eta) = self.args(x, xi);
        self.inner.partial_into(&y, &eta, dx, dxi, out)
    }
}

/// `a_eps(x, xi) = a(x, xi) prod_i chi(eps y_i / s)` over all `2n` phase
/// coordinates `y = (x, xi)`, with `chi` the plateau profile. Derivatives are
/// supplied up to order one in each variable, which is what the seminorm
/// needs.
pub struct CutoffSymbol {
    pub inner: Arc<dyn PhaseFn>,
    pub eps: f64,
    pub support: f64,
    pub plateau: f64,
}

impl CutoffSymbol {
    fn factor(&self, y: f64, order: u8) -> f64 {
        let t = self.eps * y / self.support;
        match order {
            0 => plateau(t, self.plateau),
            _ => plateau_derivative(t, self.plateau) * self.eps / self.support,
        }
    }
}

impl PhaseFn for CutoffSymbol {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn algebra_dim(&self) -> usize {
        self.inner.algebra_dim()
    }
    fn eval_into(&self, x: &[f64], xi: &[f64], out: &mut [Complex64]) {
        self.inner.eval_into(x, xi, out);
        let c: f64 = x.iter().chain(xi).map(|&y| self.factor(y, 0)).product();
        out.iter_mut().for_each(|z| *z *= c);
    }
    fn partial_into(&self, x: &[f64], xi: &[f64], dx: &[u8], dxi: &[u8], out: &mut [Complex64]) -> bool {
        let n = self.n();
        let orders: Vec<u8> = dx.iter().chain(dxi).copied().collect();
        if orders.iter().any(|&o| o > 1) {
            return false;
        }
        let coords: Vec<f64> = x.iter().chain(xi).copied().collect();
        let vars: Vec<usize> = (0..2 * n).filter(|&i| orders[i] == 1).collect();
        out.iter_mut().for_each(|z| *z = ZERO);
        let mut tmp = vec![ZERO; out.len()];
        // Leibniz over which differentiated variables fall on the cutoff
        for mask in 0..(1usize << vars.len()) {
            let mut inner_orders = orders.clone();
            let mut c = 1.0;
            for (bit, &v) in vars.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    inner_orders[v] = 0;
                }
            }
            for i in 0..2 * n {
                let on_cutoff = orders[i] == 1 && inner_orders[i] == 0;
                c *= self.factor(coords[i], on_cutoff as u8);
            }
            if c == 0.0 {
                continue;
            }
            if !self.inner.partial_into(x, xi, &inner_orders[..n], &inner_orders[n..], &mut tmp) {
                return false;
            }
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += t * c;
            }
        }
        true
    }
}

/// Closure-backed symbol without analytic derivatives.
pub struct FnSymbol<F> {
    n: usize,
    k: usize,
    f: F,
}

impl<F> FnSymbol<F>
where
    F: Fn(&[f64], &[f64]) -> AlgebraElement + Send + Sync,
{
    pub fn new(n: usize, k: usize, f: F) -> Self {
        Self { n, k, f }
    }
}

impl<F> PhaseFn for FnSymbol<F>
where
    F: Fn(&[f64], &[f64]) -> AlgebraElement + Send + Sync,
{
    fn n(&self) -> usize {
        self.n
    }
    fn algebra_dim(&self) -> usize {
        self.k
    }
    fn eval_into(&self, x: &[f64], xi: &[f64], out: &mut [Complex64]) {
        out.copy_from_slice((self.f)(x, xi).entries());
    }
}
