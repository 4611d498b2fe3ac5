//! Closed-form test functions with analytic derivatives, and seeded random
//! generators for them.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraElement, ZERO};
use crate::field::FieldFn;

/// One term `c * exp(-|x - center|^2 / (2 sigma^2) + i wave.x)`.
#[derive(Debug, Clone)]
pub struct GaussTerm {
    pub coef: AlgebraElement,
    pub center: Vec<f64>,
    pub sigma: f64,
    pub wave: Vec<f64>,
}

/// Sum of modulated Gaussians with matrix coefficients. Distinct terms with
/// non-commuting coefficients make the function genuinely matrix valued.
#[derive(Debug, Clone)]
pub struct MatrixGaussian {
    n: usize,
    k: usize,
    terms: Vec<GaussTerm>,
}

impl MatrixGaussian {
    pub fn new(n: usize, k: usize, terms: Vec<GaussTerm>) -> Self {
        for t in &terms {
            assert_eq!(t.coef.dim(), k);
            assert_eq!(t.center.len(), n);
            assert_eq!(t.wave.len(), n);
            assert!(t.sigma > 0.0);
        }
        Self { n, k, terms }
    }

    /// `c * exp(-|x|^2 / (2 sigma^2))`.
    pub fn centered(n: usize, coef: AlgebraElement, sigma: f64) -> Self {
        let k = coef.dim();
        Self::new(n, k, vec![GaussTerm { coef, center: vec![0.0; n], sigma, wave: vec![0.0; n] }])
    }

    pub fn terms(&self) -> &[GaussTerm] {
        &self.terms
    }

    /// Scalar factor `d^orders` of one term at `x`.
    fn term_factor(t: &GaussTerm, x: &[f64], orders: &[u8]) -> Complex64 {
        let mut c = Complex64::new(1.0, 0.0);
        let s2 = t.sigma * t.sigma;
        let mut expo = Complex64::new(0.0, 0.0);
        for a in 0..x.len() {
            let y = x[a] - t.center[a];
            expo += Complex64::new(-0.5 * y * y / s2, t.wave[a] * x[a]);
            let o = orders.get(a).copied().unwrap_or(0);
            if o > 0 {
                c *= hermite_like(y, s2, t.wave[a], o);
            }
        }
        c * expo.exp()
    }
}

/// `P_m(y)` with `d^m/dx^m g = P_m g` for `g = exp(-y^2/(2 s2) + i w x)`,
/// `y = x - c`, from `P_{m+1} = P_m' + (-y/s2 + i w) P_m`.
fn hermite_like(y: f64, s2: f64, w: f64, m: u8) -> Complex64 {
    // polynomial coefficients in y
    let mut p: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let iw = Complex64::new(0.0, w);
    for _ in 0..m {
        let mut next = vec![ZERO; p.len() + 1];
        for (d, &c) in p.iter().enumerate() {
            if d > 0 {
                next[d - 1] += c * d as f64;
            }
            next[d] += c * iw;
            next[d + 1] += c * (-1.0 / s2);
        }
        p = next;
    }
    p.iter().rev().fold(ZERO, |acc, &c| acc * y + c)
}

impl FieldFn for MatrixGaussian {
    fn n(&self) -> usize {
        self.n
    }
    fn algebra_dim(&self) -> usize {
        self.k
    }
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        self.partial_into(x, &[], out);
    }
    fn partial_into(&self, x: &[f64], orders: &[u8], out: &mut [Complex64]) -> bool {
        out.iter_mut().for_each(|z| *z = ZERO);
        for t in &self.terms {
            let s = Self::term_factor(t, x, orders);
            for (o, c) in out.iter_mut().zip(t.coef.entries()) {
                *o += c * s;
            }
        }
        true
    }
}

/// Trigonometric polynomial `sum_t c_t exp(i p_t.x)`.
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    n: usize,
    k: usize,
    modes: Vec<(Vec<f64>, AlgebraElement)>,
}

impl TrigPolynomial {
    pub fn new(n: usize, k: usize, modes: Vec<(Vec<f64>, AlgebraElement)>) -> Self {
        for (p, c) in &modes {
            assert_eq!(p.len(), n);
            assert_eq!(c.dim(), k);
        }
        Self { n, k, modes }
    }

    /// Scalar plane wave `exp(i p.x)`.
    pub fn plane_wave(p: Vec<f64>) -> Self {
        let n = p.len();
        Self::new(n, 1, vec![(p, AlgebraElement::identity(1))])
    }

    pub fn modes(&self) -> &[(Vec<f64>, AlgebraElement)] {
        &self.modes
    }
}

impl FieldFn for TrigPolynomial {
    fn n(&self) -> usize {
        self.n
    }
    fn algebra_dim(&self) -> usize {
        self.k
    }
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        self.partial_into(x, &[], out);
    }
    fn partial_into(&self, x: &[f64], orders: &[u8], out: &mut [Complex64]) -> bool {
        out.iter_mut().for_each(|z| *z = ZERO);
        for (p, c) in &self.modes {
            let phase: f64 = p.iter().zip(x).map(|(a, b)| a * b).sum();
            let mut s = Complex64::from_polar(1.0, phase);
            for (a, &o) in orders.iter().enumerate() {
                s *= Complex64::new(0.0, p[a]).powi(o as i32);
            }
            for (o, v) in out.iter_mut().zip(c.entries()) {
                *o += v * s;
            }
        }
        true
    }
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_element(rng: &mut impl Rng, k: usize) -> AlgebraElement {
    AlgebraElement::from_entries(k, (0..k * k).map(|_| random_complex(rng)).collect())
}

/// Random matrix Gaussian with `terms` terms, widths in `sigma`, centres in
/// `[-spread, spread]^n` and no modulation.
pub fn random_matrix_gaussian(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    terms: usize,
    sigma: (f64, f64),
    spread: f64,
) -> MatrixGaussian {
    let terms = (0..terms)
        .map(|_| GaussTerm {
            coef: random_element(rng, k),
            center: (0..n).map(|_| rng.gen_range(-spread..=spread)).collect(),
            sigma: rng.gen_range(sigma.0..=sigma.1),
            wave: vec![0.0; n],
        })
        .collect();
    MatrixGaussian::new(n, k, terms)
}

/// Random trigonometric polynomial whose frequencies are integer multiples
/// of `step` with indices in `[-max_index, max_index]`.
pub fn random_trig(rng: &mut impl Rng, n: usize, k: usize, modes: usize, step: f64, max_index: i64) -> TrigPolynomial {
    let modes = (0..modes)
        .map(|_| {
            let p = (0..n).map(|_| rng.gen_range(-max_index..=max_index) as f64 * step).collect();
            (p, random_element(rng, k).scale(Complex64::new(0.5, 0.0)))
        })
        .collect();
    TrigPolynomial::new(n, k, modes)
}
