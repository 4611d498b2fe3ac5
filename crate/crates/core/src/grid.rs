//! Uniform periodic grids on boxes `[-L, L)^n` and their phase-space products.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A uniform grid with `points` samples per axis on `[-half_width, half_width)^n`.
///
/// The Fourier-dual grid of `GridSpec(n, N, L)` is `GridSpec(n, N, N*pi/(2L))`:
/// its samples are `xi_j = (pi/L) j` for `j = -N/2, ..., N/2 - 1`. Taking the
/// dual twice returns the original grid.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    n: usize,
    points: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, points: usize, half_width: f64) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::Invalid(format!("spatial dimension must be 1 or 2, got {n}")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::Invalid(format!("points per axis must be even and >= 8, got {points}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Invalid(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { n, points, half_width })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Sample spacing `h = 2L/N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Spacing of the dual grid, `pi/L`.
    #[inline]
    pub fn frequency_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Quadrature weight `h^n`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Total number of samples, `N^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dual(&self) -> GridSpec {
        GridSpec {
            n: self.n,
            points: self.points,
            half_width: self.points as f64 * PI / (2.0 * self.half_width),
        }
    }

    /// Coordinate of sample `i` along any axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    /// Row-major multi-index of a flat sample index.
    #[inline]
    pub fn unflatten(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.n).rev() {
            out[a] = idx % self.points;
            idx /= self.points;
        }
    }

    #[inline]
    pub fn flatten(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Coordinates of a flat sample index.
    #[inline]
    pub fn point_into(&self, idx: usize, out: &mut [f64]) {
        let mut rem = idx;
        for a in (0..self.n).rev() {
            out[a] = self.coord(rem % self.points);
            rem /= self.points;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        self.point_into(idx, &mut p);
        p
    }

    /// Flat index of the sample nearest the origin (which is always a sample).
    pub fn origin_index(&self) -> usize {
        let c = vec![self.points / 2; self.n];
        self.flatten(&c)
    }

    /// If `shift` is an integer multiple of the spacing along every axis,
    /// returns those integers.
    pub fn commensurate_steps(&self, shift: &[f64]) -> Option<Vec<i64>> {
        let h = self.spacing();
        shift
            .iter()
            .map(|&s| {
                let m = (s / h).round();
                ((s - m * h).abs() <= 1e-12 * h.max(s.abs())).then_some(m as i64)
            })
            .collect()
    }

    /// Whether `x` lies in the closed box `[-L, L]^n`.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().all(|c| c.abs() <= self.half_width)
    }
}

// Half widths are compared to a relative 1e-12 so that a grid and the dual
// of its dual compare equal despite rounding in the round trip.
impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.points == other.points
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width.max(other.half_width)
    }
}

/// Product grid on phase space: positions on `x`, frequencies on `xi`.
///
/// Sample order is x-major: the flat index is `ix * xi.len() + ixi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub x: GridSpec,
    pub xi: GridSpec,
}

impl PhaseGrid {
    pub fn new(x: GridSpec, xi: GridSpec) -> Result<Self> {
        if x.n() != xi.n() {
            return Err(Error::Dimension(format!(
                "position grid has n = {} but frequency grid has n = {}",
                x.n(),
                xi.n()
            )));
        }
        Ok(Self { x, xi })
    }

    /// Positions on `x`, frequencies on the dual grid of `x`: the sampling at
    /// which a Kohn-Nirenberg operator on `x` actually reads its symbol.
    pub fn operator(x: GridSpec) -> Self {
        Self { x, xi: x.dual() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.n()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.x.len() * self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Axis lengths of the `2n`-dimensional sample array.
    pub fn shape(&self) -> Vec<usize> {
        let n = self.n();
        let mut s = vec![self.x.points(); n];
        s.extend(std::iter::repeat(self.xi.points()).take(n));
        s
    }

    /// Axis spacings of the `2n`-dimensional sample array.
    pub fn spacings(&self) -> Vec<f64> {
        let n = self.n();
        let mut s = vec![self.x.spacing(); n];
        s.extend(std::iter::repeat(self.xi.spacing()).take(n));
        s
    }

    /// Axis half widths of the `2n`-dimensional sample array.
    pub fn half_widths(&self) -> Vec<f64> {
        let n = self.n();
        let mut s = vec![self.x.half_width(); n];
        s.extend(std::iter::repeat(self.xi.half_width()).take(n));
        s
    }

    pub fn point_into(&self, idx: usize, x: &mut [f64], xi: &mut [f64]) {
        self.x.point_into(idx / self.xi.len(), x);
        self.xi.point_into(idx % self.xi.len(), xi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GridSpec::new(1, 7, 1.0).is_err());
        assert!(GridSpec::new(1, 6, 1.0).is_err());
        assert!(GridSpec::new(3, 8, 1.0).is_err());
        assert!(GridSpec::new(2, 8, 0.0).is_err());
        assert!(GridSpec::new(2, 8, 1.0).is_ok());
    }

    #[test]
    fn dual_is_involutive_and_matches_frequency_spacing() {
        let g = GridSpec::new(2, 64, 10.0).unwrap();
        let d = g.dual();
        assert!((d.spacing() - g.frequency_spacing()).abs() < 1e-15);
        assert!((d.dual().half_width() - 10.0).abs() < 1e-12);
        // h * dxi * N = 2 pi
        assert!((g.spacing() * d.spacing() * 64.0 - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn indexing_round_trip() {
        let g = GridSpec::new(2, 8, 4.0).unwrap();
        let mut m = [0usize; 2];
        for idx in 0..g.len() {
            g.unflatten(idx, &mut m);
            assert_eq!(g.flatten(&m), idx);
        }
        assert_eq!(g.point(g.origin_index()), vec![0.0, 0.0]);
    }

    #[test]
    fn commensurate_detection() {
        let g = GridSpec::new(1, 16, 4.0).unwrap();
        assert_eq!(g.commensurate_steps(&[1.5]), Some(vec![3]));
        assert_eq!(g.commensurate_steps(&[0.2]), None);
    }
}
