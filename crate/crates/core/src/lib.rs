//! Deformed products, Kohn-Nirenberg pseudodifferential operators and symbol
//! recovery for `M_k`-valued functions on `R^n` (`n = 1, 2`), sampled on
//! periodic grids.

pub mod algebra;
pub mod calculus;
pub mod deformation;
pub mod error;
pub mod families;
pub mod field;
pub mod fft;
pub mod grid;
pub mod heisenberg;
pub mod module_space;
pub mod operator;
pub mod quantization;

pub use algebra::AlgebraElement;
pub use deformation::{deformed_product, left_action, right_action, SkewForm};
pub use error::{Error, Result};
pub use field::{Field, FieldFn};
pub use grid::{GridSpec, PhaseGrid};
pub use heisenberg::{conjugate_operator, intertwine_check, shifted_symbol, smoothness_probe, weyl_shift, weyl_shift_inverse, HeisenbergPoint};
pub use module_space::{fourier, inner_product, module_norm, schwartz_seminorm, DiffScheme, Direction, ModuleFunction};
pub use num_complex::Complex64;
pub use operator::OperatorHandle;
pub use quantization::{adjoint_symbol, operator_norm_estimate, pdo_apply, pi_seminorm, symbol_to_kernel, DerivativeScheme, KernelField, NormEstimate, PhaseSymbol, SampledSymbol};
pub use calculus::{b_transform, gamma_reconstruct, gamma_reproduce, poisson_bracket, recover_translation_symbol, GammaKernel};
