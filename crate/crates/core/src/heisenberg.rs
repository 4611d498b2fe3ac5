//! Heisenberg group action `E_{z, zeta, phi} = exp(i phi) M_zeta T_z`,
//! operator conjugation and the identities that tie it to the deformed
//! product.
//!
//! Shifts that are integer multiples of the grid spacing (translations) or
//! of the dual spacing (modulations on the frequency side) act exactly.
//! Other shifts translate the trigonometric interpolant, which is exact only
//! for band-limited periodic data.

use num_complex::Complex64;

use crate::deformation::{right_action, SkewForm};
use crate::error::{dim_err, Error, Result};
use crate::field::Field;
use crate::module_space::{fourier, module_norm, Direction, ModuleFunction};
use crate::operator::OperatorHandle;
use crate::quantization::PhaseSymbol;

#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergPoint {
    pub z: Vec<f64>,
    pub zeta: Vec<f64>,
    pub phi: f64,
}

impl HeisenbergPoint {
    pub fn new(z: Vec<f64>, zeta: Vec<f64>, phi: f64) -> Result<Self> {
        if z.len() != zeta.len() {
            return dim_err("z and zeta must have the same length");
        }
        Ok(Self { z, zeta, phi })
    }

    pub fn origin(n: usize) -> Self {
        Self { z: vec![0.0; n], zeta: vec![0.0; n], phi: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn is_origin(&self) -> bool {
        self.phi == 0.0 && self.z.iter().chain(&self.zeta).all(|&v| v == 0.0)
    }
}

fn check_point(f: &ModuleFunction, g: &HeisenbergPoint) -> Result<()> {
    if g.n() != f.grid().n() {
        return dim_err(format!("Heisenberg point has n = {}, function has n = {}", g.n(), f.grid().n()));
    }
    Ok(())
}

/// `exp(i phi) exp(i zeta.x) f(x - z)`.
pub fn weyl_shift(f: &ModuleFunction, g: &HeisenbergPoint) -> Result<ModuleFunction> {
    check_point(f, g)?;
    if g.is_origin() {
        return Ok(f.clone());
    }
    let phi = g.phi;
    let zeta = &g.zeta;
    Ok(f.translate(&g.z).modulate(|x| {
        let ph: f64 = x.iter().zip(zeta).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, phi + ph)
    }))
}

/// `exp(-i phi) exp(-i zeta.(x + z)) f(x + z)`.
pub fn weyl_shift_inverse(f: &ModuleFunction, g: &HeisenbergPoint) -> Result<ModuleFunction> {
    check_point(f, g)?;
    if g.is_origin() {
        return Ok(f.clone());
    }
    let phi = g.phi;
    let zeta = &g.zeta;
    let z = &g.z;
    let back: Vec<f64> = z.iter().map(|v| -v).collect();
    Ok(f.translate(&back).modulate(|x| {
        let ph: f64 = x.iter().zip(z).zip(zeta).map(|((a, s), b)| (a + s) * b).sum();
        Complex64::from_polar(1.0, -phi - ph)
    }))
}

/// `T_{z, zeta} = E^-1 T E` with `E = E_{z, zeta, phi}`; the result does not
/// depend on `phi`. At `z = zeta = 0` this is `T` itself.
pub fn conjugate_operator(t: &OperatorHandle, z: &[f64], zeta: &[f64], phi: f64) -> Result<OperatorHandle> {
    let p = HeisenbergPoint::new(z.to_vec(), zeta.to_vec(), phi)?;
    if z.iter().chain(zeta).all(|&v| v == 0.0) {
        return Ok(t.clone());
    }
    OperatorHandle::compose(vec![OperatorHandle::WeylInverse(p.clone()), t.clone(), OperatorHandle::Weyl(p)])
}

/// `(x, xi) -> a(x + z, xi + zeta)`, the symbol of `a(x, D)` conjugated by
/// `E_{z, zeta}`.
pub fn shifted_symbol(a: &PhaseSymbol, z: &[f64], zeta: &[f64]) -> Result<PhaseSymbol> {
    if z.len() != a.n() || zeta.len() != a.n() {
        return dim_err("shift dimension differs from the symbol dimension");
    }
    Ok(a.shifted(z, zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferenceScheme {
    Forward,
    Centered,
}

/// Difference quotients of `(z, zeta) -> T_{z, zeta} u` against a claimed
/// derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Fitted slope of `log error` against `log t`; `None` when every error
    /// sits at the roundoff floor, which is the case for an exact derivative.
    pub order: Option<f64>,
    pub converged: bool,
    /// `||D u||`, the scale the errors should be read against.
    pub scale: f64,
}

/// Quotients `(T_{p + t d} u - T_p u) / t` (forward) or
/// `(T_{p + t d} u - T_{p - t d} u) / (2t)` (centred) for each `t` in
/// `steps`, compared with `derivative u`.
///
/// `family(z, zeta)` returns `T_{z, zeta}`, `base` is `p = (z, zeta)` and
/// `direction` has length `2n`. Only finitely many quotients are examined, so
/// a converged report is evidence of first- or second-order differentiability
/// along one direction, not a proof of smoothness.
pub fn smoothness_probe(
    family: &dyn Fn(&[f64], &[f64]) -> Result<OperatorHandle>,
    base: (&[f64], &[f64]),
    direction: &[f64],
    steps: &[f64],
    derivative: &OperatorHandle,
    u: &ModuleFunction,
    scheme: DifferenceScheme,
) -> Result<SmoothnessReport> {
    let n = u.grid().n();
    if base.0.len() != n || base.1.len() != n || direction.len() != 2 * n {
        return dim_err("probe base and direction must match the grid dimension");
    }
    if steps.len() < 3 || steps.windows(2).any(|w| !(w[1] < w[0])) || steps.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Invalid("probe steps must be positive, strictly decreasing and at least 3".into()));
    }
    let at = |t: f64| -> Result<ModuleFunction> {
        let z: Vec<f64> = (0..n).map(|i| base.0[i] + t * direction[i]).collect();
        let zeta: Vec<f64> = (0..n).map(|i| base.1[i] + t * direction[n + i]).collect();
        family(&z, &zeta)?.apply(u)
    };
    let du = derivative.apply(u)?;
    let scale = module_norm(&du).max(module_norm(u));
    let centre = if scheme == DifferenceScheme::Forward { Some(at(0.0)?) } else { None };
    let mut errors = Vec::with_capacity(steps.len());
    for &t in steps {
        let q = match &centre {
            Some(c) => at(t)?.sub(c)?.scale(Complex64::new(1.0 / t, 0.0)),
            None => at(t)?.sub(&at(-t)?)?.scale(Complex64::new(0.5 / t, 0.0)),
        };
        errors.push(module_norm(&q.sub(&du)?));
    }
    let floor = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let pts: Vec<(f64, f64)> = steps.iter().zip(&errors).filter(|(_, &e)| e > floor).map(|(&t, &e)| (t.ln(), e.ln())).collect();
    let order = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    let converged = match order {
        Some(o) => o >= 0.5,
        None => true,
    };
    Ok(SmoothnessReport { steps: steps.to_vec(), errors, order, converged, scale })
}

/// Residuals of the Fourier and right-action intertwining identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntertwineResiduals {
    /// `||F E_{z,zeta} u - E_{-zeta,z}^-1 F u||`.
    pub fourier_forward: f64,
    /// `||F E_{z,zeta}^-1 u - E_{-zeta,z} F u||`.
    pub fourier_inverse: f64,
    /// `||E_{z,zeta} R_g u - R_{T_{z + J zeta} g} E_{z,zeta} u||`.
    pub right_action: f64,
}

pub fn intertwine_check(
    z: &[f64],
    zeta: &[f64],
    g: &ModuleFunction,
    j: &SkewForm,
    u: &ModuleFunction,
) -> Result<IntertwineResiduals> {
    let e = HeisenbergPoint::new(z.to_vec(), zeta.to_vec(), 0.0)?;
    let swapped = HeisenbergPoint::new(zeta.iter().map(|v| -v).collect(), z.to_vec(), 0.0)?;
    let fu = fourier(u, Direction::Forward);
    let lhs = fourier(&weyl_shift(u, &e)?, Direction::Forward);
    let fourier_forward = module_norm(&lhs.sub(&weyl_shift_inverse(&fu, &swapped)?)?);
    let lhs = fourier(&weyl_shift_inverse(u, &e)?, Direction::Forward);
    let fourier_inverse = module_norm(&lhs.sub(&weyl_shift(&fu, &swapped)?)?);

    let jz = j.apply(zeta);
    let total: Vec<f64> = z.iter().zip(&jz).map(|(a, b)| a + b).collect();
    let moved = Field::Sampled(g.translate(&total));
    let lhs = weyl_shift(&right_action(&Field::Sampled(g.clone()), u, j)?, &e)?;
    let rhs = right_action(&moved, &weyl_shift(u, &e)?, j)?;
    let right = module_norm(&lhs.sub(&rhs)?);
    Ok(IntertwineResiduals { fourier_forward, fourier_inverse, right_action: right })
}

/// `||T R_g u - R_g T u||`.
pub fn commutation_residual(t: &OperatorHandle, g: &Field, j: &SkewForm, u: &ModuleFunction) -> Result<f64> {
    let a = t.apply(&right_action(g, u, j)?)?;
    let b = right_action(g, &t.apply(u)?, j)?;
    Ok(module_norm(&a.sub(&b)?))
}

/// `||T_{z,zeta} u - T_{z - J zeta, 0} u||`, zero for every operator that
/// commutes with all right actions.
pub fn translation_reduction_residual(
    t: &OperatorHandle,
    z: &[f64],
    zeta: &[f64],
    j: &SkewForm,
    u: &ModuleFunction,
) -> Result<f64> {
    let jz = j.apply(zeta);
    let reduced: Vec<f64> = z.iter().zip(&jz).map(|(a, b)| a - b).collect();
    let a = conjugate_operator(t, z, zeta, 0.0)?.apply(u)?;
    let b = conjugate_operator(t, &reduced, &vec![0.0; z.len()], 0.0)?.apply(u)?;
    Ok(module_norm(&a.sub(&b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraElement;
    use crate::grid::GridSpec;

    fn test_fn(grid: GridSpec) -> ModuleFunction {
        ModuleFunction::from_fn(grid, 2, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let g = (-0.5 * r2).exp();
            AlgebraElement::from_rows(&[
                &[Complex64::new(g, 0.0), Complex64::new(0.0, x[0] * g)],
                &[Complex64::new(x[1] * g, 0.0), Complex64::new(g * g, 0.0)],
            ])
        })
    }

    #[test]
    fn origin_is_identity_and_shift_is_unitary() {
        let grid = GridSpec::new(2, 32, 8.0).unwrap();
        let f = test_fn(grid);
        let o = HeisenbergPoint::origin(2);
        assert_eq!(weyl_shift(&f, &o).unwrap(), f);
        let (h, dxi) = (grid.spacing(), grid.frequency_spacing());
        // modulations by multiples of the dual spacing stay periodic
        let p = HeisenbergPoint::new(vec![3.0 * h, -2.0 * h], vec![dxi, -3.0 * dxi], 0.7).unwrap();
        let g = f.translate(&[0.5, 0.0]);
        let a = weyl_shift(&f, &p).unwrap().inner(&weyl_shift(&g, &p).unwrap()).unwrap();
        assert!(a.max_abs_diff(&f.inner(&g).unwrap()) < 1e-10);
        let back = weyl_shift_inverse(&weyl_shift(&f, &p).unwrap(), &p).unwrap();
        let d = back.sub(&f).unwrap().sup_norm();
        assert!(d < 1e-14, "{d}");
    }

    #[test]
    fn group_law() {
        let grid = GridSpec::new(2, 32, 8.0).unwrap();
        let f = test_fn(grid);
        let (h, dxi) = (grid.spacing(), grid.frequency_spacing());
        let (z1, s1) = (vec![h, 2.0 * h], vec![dxi, -2.0 * dxi]);
        let (z2, s2) = (vec![-3.0 * h, h], vec![4.0 * dxi, dxi]);
        let e1 = HeisenbergPoint::new(z1.clone(), s1.clone(), 0.0).unwrap();
        let e2 = HeisenbergPoint::new(z2.clone(), s2.clone(), 0.0).unwrap();
        let lhs = weyl_shift(&weyl_shift(&f, &e2).unwrap(), &e1).unwrap();
        let sum = HeisenbergPoint::new(vec![z1[0] + z2[0], z1[1] + z2[1]], vec![s1[0] + s2[0], s1[1] + s2[1]], 0.0).unwrap();
        let ph: f64 = s2.iter().zip(&z1).map(|(a, b)| a * b).sum();
        let rhs = weyl_shift(&f, &sum).unwrap().scale(Complex64::from_polar(1.0, -ph));
        let d = lhs.sub(&rhs).unwrap().sup_norm();
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn conjugation_ignores_phase_and_origin_is_trivial() {
        let grid = GridSpec::new(2, 16, 6.0).unwrap();
        let u = test_fn(grid);
        let t = OperatorHandle::Identity;
        assert!(matches!(conjugate_operator(&t, &[0.0; 2], &[0.0; 2], 2.0).unwrap(), OperatorHandle::Identity));
        let f = ModuleFunction::from_fn(grid, 2, |x| {
            AlgebraElement::from_real_rows(&[&[1.0, 0.5], &[0.0, 2.0]]).scale(Complex64::new((-0.5 * x[0] * x[0] - x[1] * x[1]).exp(), 0.0))
        });
        let t = OperatorHandle::left(f, SkewForm::standard(0.5));
        let h = grid.spacing();
        let a = conjugate_operator(&t, &[h, 0.0], &[0.2, 0.0], 0.0).unwrap().apply(&u).unwrap();
        let b = conjugate_operator(&t, &[h, 0.0], &[0.2, 0.0], 1.3).unwrap().apply(&u).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn intertwining_at_origin() {
        let grid = GridSpec::new(2, 16, 6.0).unwrap();
        let u = test_fn(grid);
        let g = ModuleFunction::from_fn(grid, 2, |x| AlgebraElement::identity(2).scale(Complex64::new((-x[0] * x[0] - x[1] * x[1]).exp(), 0.0)));
        let r = intertwine_check(&[0.0; 2], &[0.0; 2], &g, &SkewForm::standard(0.5), &u).unwrap();
        assert!(r.fourier_forward < 1e-12 && r.fourier_inverse < 1e-12 && r.right_action < 1e-12);
    }

    #[test]
    fn probe_rejects_bad_ladders() {
        let grid = GridSpec::new(1, 16, 6.0).unwrap();
        let u = ModuleFunction::from_scalar_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let fam = |_: &[f64], _: &[f64]| Ok(OperatorHandle::Identity);
        let d = OperatorHandle::Identity;
        for steps in [vec![0.1, 0.05], vec![0.1, 0.2, 0.05], vec![0.1, 0.0, -0.1]] {
            assert!(smoothness_probe(&fam, (&[0.0], &[0.0]), &[1.0, 0.0], &steps, &d, &u, DifferenceScheme::Centered).is_err());
        }
    }
}
