//! The coefficient algebra `M_k(C)`.
//!
//! Elements are dense `k x k` complex matrices stored row-major. The involution
//! is the conjugate transpose and the C*-norm is the spectral norm. Because the
//! algebra is unital, every approximate unit can be taken to be the identity.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct AlgebraElement {
    k: usize,
    entries: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn zeros(k: usize) -> Self {
        assert!(k > 0, "algebra dimension must be positive");
        Self { k, entries: vec![ZERO; k * k] }
    }

    pub fn identity(k: usize) -> Self {
        Self::scalar(k, ONE)
    }

    /// `c` times the identity.
    pub fn scalar(k: usize, c: Complex64) -> Self {
        let mut a = Self::zeros(k);
        for i in 0..k {
            a.entries[i * k + i] = c;
        }
        a
    }

    /// Builds an element from its row-major entries.
    ///
    /// Panics if `entries.len()` is not `k * k`.
    pub fn from_entries(k: usize, entries: Vec<Complex64>) -> Self {
        assert!(k > 0 && entries.len() == k * k, "entries must form a k x k array");
        Self { k, entries }
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for r in rows {
            assert_eq!(r.len(), k, "rows must form a square array");
            entries.extend_from_slice(r);
        }
        Self::from_entries(k, entries)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for r in rows {
            assert_eq!(r.len(), k, "rows must form a square array");
            entries.extend(r.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_entries(k, entries)
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let k = values.len();
        let mut a = Self::zeros(k);
        for (i, v) in values.iter().enumerate() {
            a.entries[i * k + i] = *v;
        }
        a
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.k + col]
    }

    /// Conjugate transpose.
    pub fn star(&self) -> Self {
        let mut out = Self::zeros(self.k);
        star_into(&self.entries, &mut out.entries, self.k);
        out
    }

    /// Spectral norm, i.e. the largest singular value.
    pub fn cnorm(&self) -> f64 {
        cnorm_slice(&self.entries, self.k)
    }

    /// Distance from the positive cone: `max(0, -lambda_min(H)) + ||a - a*||`
    /// where `H` is the Hermitian part of `a`. Zero exactly for positive
    /// semidefinite Hermitian elements.
    pub fn positivity_defect(&self) -> f64 {
        let k = self.k;
        let herm = (self + &self.star()).scale(Complex64::new(0.5, 0.0));
        let skew = (self - &self.star()).cnorm();
        let lmin = hermitian_min_eigenvalue(&herm.entries, k);
        (-lmin).max(0.0) + skew
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { k: self.k, entries: self.entries.iter().map(|&e| e * c).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.k).map(|i| self.entries[i * self.k + i]).sum()
    }

    /// Largest absolute entry difference; handy for exact-equality style checks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.k, other.k);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.entries.chunks(self.k).collect();
        f.debug_struct("AlgebraElement").field("k", &self.k).field("rows", &rows).finish()
    }
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.k, rhs.k, "algebra dimension mismatch");
        AlgebraElement {
            k: self.k,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.k, rhs.k, "algebra dimension mismatch");
        AlgebraElement {
            k: self.k,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.k, rhs.k, "algebra dimension mismatch");
        let mut out = AlgebraElement::zeros(self.k);
        matmul_acc(&mut out.entries, &self.entries, &rhs.entries, self.k, ONE);
        out
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Mul for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: AlgebraElement) -> AlgebraElement {
        &self * &rhs
    }
}

// Slice kernels used by the grid loops, where allocating an element per
// sample point would dominate the cost.

/// `out += c * a * b` for row-major `k x k` blocks.
#[inline]
pub fn matmul_acc(out: &mut [Complex64], a: &[Complex64], b: &[Complex64], k: usize, c: Complex64) {
    match k {
        1 => out[0] += c * a[0] * b[0],
        2 => {
            let (a0, a1, a2, a3) = (a[0] * c, a[1] * c, a[2] * c, a[3] * c);
            out[0] += a0 * b[0] + a1 * b[2];
            out[1] += a0 * b[1] + a1 * b[3];
            out[2] += a2 * b[0] + a3 * b[2];
            out[3] += a2 * b[1] + a3 * b[3];
        }
        _ => {
            for i in 0..k {
                for l in 0..k {
                    let ail = a[i * k + l] * c;
                    if ail == ZERO {
                        continue;
                    }
                    for j in 0..k {
                        out[i * k + j] += ail * b[l * k + j];
                    }
                }
            }
        }
    }
}

/// `out += c * a^* * b`.
#[inline]
pub fn star_matmul_acc(out: &mut [Complex64], a: &[Complex64], b: &[Complex64], k: usize, c: Complex64) {
    for i in 0..k {
        for l in 0..k {
            let ali = a[l * k + i].conj() * c;
            for j in 0..k {
                out[i * k + j] += ali * b[l * k + j];
            }
        }
    }
}

#[inline]
pub fn star_into(a: &[Complex64], out: &mut [Complex64], k: usize) {
    for i in 0..k {
        for j in 0..k {
            out[j * k + i] = a[i * k + j].conj();
        }
    }
}

/// Spectral norm of a row-major `k x k` block.
pub fn cnorm_slice(a: &[Complex64], k: usize) -> f64 {
    match k {
        1 => a[0].norm(),
        2 => {
            // Largest eigenvalue of the 2x2 Gram matrix a^* a.
            let p = a[0].norm_sqr() + a[2].norm_sqr();
            let r = a[1].norm_sqr() + a[3].norm_sqr();
            let q = a[0].conj() * a[1] + a[2].conj() * a[3];
            let half = 0.5 * (p - r);
            let lmax = 0.5 * (p + r) + (half * half + q.norm_sqr()).sqrt();
            lmax.max(0.0).sqrt()
        }
        _ => {
            let m = DMatrix::from_row_slice(k, k, a);
            m.singular_values().iter().cloned().fold(0.0, f64::max)
        }
    }
}

fn hermitian_min_eigenvalue(h: &[Complex64], k: usize) -> f64 {
    match k {
        1 => h[0].re,
        2 => {
            let (p, r, q) = (h[0].re, h[3].re, h[1]);
            let half = 0.5 * (p - r);
            0.5 * (p + r) - (half * half + q.norm_sqr()).sqrt()
        }
        _ => {
            let m = DMatrix::from_row_slice(k, k, h);
            m.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn star_examples() {
        assert_eq!(AlgebraElement::identity(2).star(), AlgebraElement::identity(2));
        let a = AlgebraElement::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(a.star(), AlgebraElement::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]));
        let i = AlgebraElement::from_entries(1, vec![c(0.0, 1.0)]);
        assert_eq!(i.star().get(0, 0), c(0.0, -1.0));
    }

    #[test]
    fn cnorm_examples() {
        assert!((AlgebraElement::identity(2).cnorm() - 1.0).abs() < 1e-15);
        assert!((AlgebraElement::diag(&[c(3.0, 0.0), c(-4.0, 0.0)]).cnorm() - 4.0).abs() < 1e-14);
        // a*a = diag(0, 4), so the largest singular value is 2.
        let a = AlgebraElement::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((a.cnorm() - 2.0).abs() < 1e-14);
        assert_eq!(AlgebraElement::zeros(3).cnorm(), 0.0);
    }

    #[test]
    fn cnorm_closed_form_matches_svd() {
        let a = AlgebraElement::from_rows(&[&[c(1.0, 2.0), c(-0.3, 0.5)], &[c(0.7, -1.1), c(0.2, 0.0)]]);
        let svd = DMatrix::from_row_slice(2, 2, a.entries()).singular_values().max();
        assert!((a.cnorm() - svd).abs() < 1e-12);
    }

    #[test]
    fn positivity_examples() {
        assert_eq!(AlgebraElement::diag(&[c(1.0, 0.0), c(2.0, 0.0)]).positivity_defect(), 0.0);
        let d = AlgebraElement::diag(&[c(1.0, 0.0), c(-0.5, 0.0)]);
        assert!((d.positivity_defect() - 0.5).abs() < 1e-15);
        let n = AlgebraElement::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(n.positivity_defect() > 0.5);
    }

    #[test]
    fn general_k_uses_dense_path() {
        let mut a = AlgebraElement::zeros(3);
        a.entries_mut()[2] = c(0.0, 5.0);
        a.entries_mut()[4] = c(1.0, 0.0);
        assert!((a.cnorm() - 5.0).abs() < 1e-12);
        let p = &a.star() * &a;
        assert!(p.positivity_defect() < 1e-12);
        assert!((p.cnorm() - 25.0).abs() < 1e-10);
    }
}
