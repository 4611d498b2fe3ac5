//! Operators on module functions, built from the library's primitives.

use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::deformation::{left_action, right_action, SkewForm};
use crate::error::{dim_err, Error, Result};
use crate::field::Field;
use crate::grid::{GridSpec, PhaseGrid};
use crate::heisenberg::{weyl_shift, weyl_shift_inverse, HeisenbergPoint};
use crate::module_space::ModuleFunction;
use crate::quantization::{adjoint_symbol, pdo_apply, PhaseSymbol, SampledSymbol};

/// An adjointable operator on the module, applied lazily.
#[derive(Debug, Clone)]
pub enum OperatorHandle {
    Identity,
    /// `u -> F x_J u`.
    LeftAction { f: Field, j: SkewForm },
    /// `u -> u x_J G`.
    RightAction { g: Field, j: SkewForm },
    /// `a(x, D)`.
    Pdo(PhaseSymbol),
    /// `E_{z, zeta, phi}`.
    Weyl(HeisenbergPoint),
    /// `E_{z, zeta, phi}^-1`.
    WeylInverse(HeisenbergPoint),
    /// `[A, B, C]` is `A B C`: the last factor acts first.
    Compose(Vec<OperatorHandle>),
    /// The adjoint of the wrapped operator, resolved on the input grid.
    Adjoint(Box<OperatorHandle>),
}

impl OperatorHandle {
    pub fn left(f: impl Into<Field>, j: SkewForm) -> Self {
        OperatorHandle::LeftAction { f: f.into(), j }
    }

    pub fn right(g: impl Into<Field>, j: SkewForm) -> Self {
        OperatorHandle::RightAction { g: g.into(), j }
    }

    pub fn compose(parts: Vec<OperatorHandle>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Invalid("composition list must be nonempty".into()));
        }
        Ok(OperatorHandle::Compose(parts))
    }

    pub fn apply(&self, u: &ModuleFunction) -> Result<ModuleFunction> {
        match self {
            OperatorHandle::Identity => Ok(u.clone()),
            OperatorHandle::LeftAction { f, j } => left_action(f, u, j),
            OperatorHandle::RightAction { g, j } => right_action(g, u, j),
            OperatorHandle::Pdo(a) => pdo_apply(a, u),
            OperatorHandle::Weyl(p) => weyl_shift(u, p),
            OperatorHandle::WeylInverse(p) => weyl_shift_inverse(u, p),
            OperatorHandle::Compose(parts) => {
                if parts.is_empty() {
                    return Err(Error::Invalid("composition list must be nonempty".into()));
                }
                let mut v = u.clone();
                for p in parts.iter().rev() {
                    v = p.apply(&v)?;
                }
                Ok(v)
            }
            OperatorHandle::Adjoint(t) => t.adjoint(u.grid())?.apply(u),
        }
    }

    /// The adjoint for `<., .>` on `grid`. Right actions are adjointable in
    /// this form only for scalar functions, where `R_G^* = R_{G^*}`.
    pub fn adjoint(&self, grid: &GridSpec) -> Result<OperatorHandle> {
        Ok(match self {
            OperatorHandle::Identity => OperatorHandle::Identity,
            OperatorHandle::LeftAction { f, j } => OperatorHandle::LeftAction { f: f.star(), j: j.clone() },
            OperatorHandle::RightAction { g, j } => {
                if g.algebra_dim() != 1 {
                    return Err(Error::Capability("adjoint of a matrix-valued right action".into()));
                }
                OperatorHandle::RightAction { g: g.star(), j: j.clone() }
            }
            OperatorHandle::Pdo(a) => OperatorHandle::Pdo(PhaseSymbol::Sampled(adjoint_symbol(a, grid)?)),
            OperatorHandle::Weyl(p) => OperatorHandle::WeylInverse(p.clone()),
            OperatorHandle::WeylInverse(p) => OperatorHandle::Weyl(p.clone()),
            OperatorHandle::Compose(parts) => {
                OperatorHandle::Compose(parts.iter().rev().map(|p| p.adjoint(grid)).collect::<Result<_>>()?)
            }
            OperatorHandle::Adjoint(t) => (**t).clone(),
        })
    }

    /// Whether [`OperatorHandle::adjoint`] can succeed.
    pub fn is_adjointable(&self) -> bool {
        match self {
            OperatorHandle::RightAction { g, .. } => g.algebra_dim() == 1,
            OperatorHandle::Compose(parts) => parts.iter().all(|p| p.is_adjointable()),
            OperatorHandle::Adjoint(t) => t.is_adjointable(),
            _ => true,
        }
    }

    /// Recovers the Kohn-Nirenberg symbol of the operator on `grid` from its
    /// action on plane waves: `a(x, xi) = exp(-i x.xi) T(exp(i . xi) 1)(x)`,
    /// for every `xi` on the dual grid.
    pub fn probe_symbol(&self, grid: &GridSpec, k: usize) -> Result<SampledSymbol> {
        let pg = PhaseGrid::operator(*grid);
        let n = grid.n();
        let kk = k * k;
        let np = grid.len();
        let mut out = SampledSymbol::zeros(pg, k);
        let id = AlgebraElement::identity(k);
        let mut x = vec![0.0; n];
        for ixi in 0..pg.xi.len() {
            let xi = pg.xi.point(ixi);
            let wave = ModuleFunction::from_fn(*grid, k, |y| {
                let ph: f64 = y.iter().zip(&xi).map(|(a, b)| a * b).sum();
                id.scale(Complex64::from_polar(1.0, ph))
            });
            let tw = self.apply(&wave)?;
            if tw.grid() != grid || tw.algebra_dim() != k {
                return dim_err("operator changed the grid or algebra dimension");
            }
            for ix in 0..np {
                grid.point_into(ix, &mut x);
                let ph: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
                let c = Complex64::from_polar(1.0, -ph);
                let dst = (ix * np + ixi) * kk;
                for (e, v) in tw.sample_slice(ix).iter().enumerate() {
                    out.data_mut()[dst + e] = v * c;
                }
            }
        }
        Ok(out)
    }
}
