use std::f64::consts::PI;
use std::sync::Arc;

use opcalc::families::{random_trig, MatrixGaussian};
use opcalc::field::{FieldFn, PartialField};
use opcalc::heisenberg::{commutation_residual, translation_reduction_residual, DifferenceScheme};
use opcalc::quantization::symbols::{ConstantSymbol, FnSymbol};
use opcalc::{
    conjugate_operator, inner_product, intertwine_check, module_norm, pdo_apply, shifted_symbol, smoothness_probe, weyl_shift, weyl_shift_inverse, AlgebraElement,
    Complex64, Field, GridSpec, HeisenbergPoint, ModuleFunction, OperatorHandle, PhaseSymbol, SkewForm,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const THETA: f64 = 0.5;

fn self_dual(points: usize) -> GridSpec {
    GridSpec::new(2, points, (points as f64 * PI * THETA / 2.0).sqrt()).unwrap()
}

/// Matrix Gaussian in closed form, narrow enough to be periodic on the boxes used here.
fn closed_u(x: &[f64], centre: [f64; 2]) -> AlgebraElement {
    let r2 = (x[0] - centre[0]).powi(2) + (x[1] - centre[1]).powi(2);
    let g = (-r2 / 0.72).exp();
    AlgebraElement::from_rows(&[&[Complex64::new(g, 0.0), Complex64::new(0.0, 0.5 * g)], &[Complex64::new(-g, 0.0), Complex64::new(2.0 * g, g)]])
}

fn u_on(grid: GridSpec) -> ModuleFunction {
    ModuleFunction::from_fn(grid, 2, |x| closed_u(x, [0.2, -0.1]))
}

#[test]
fn origin_shift_is_the_identity() {
    let u = u_on(self_dual(16));
    assert_eq!(weyl_shift(&u, &HeisenbergPoint::origin(2)).unwrap(), u);
}

#[test]
fn weyl_shift_matches_closed_form_and_is_unitary() {
    let grid = self_dual(32);
    let (h, d) = (grid.spacing(), grid.frequency_spacing());
    let (z, zeta, phi) = ([2.0 * h, -3.0 * h], [d, 2.0 * d], 0.3);
    let p = HeisenbergPoint::new(z.to_vec(), zeta.to_vec(), phi).unwrap();
    let u = u_on(grid);
    // exp(i phi) exp(i zeta.x) u(x - z), evaluated directly
    let oracle = ModuleFunction::from_fn(grid, 2, |x| {
        closed_u(&[x[0] - z[0], x[1] - z[1]], [0.2, -0.1]).scale(Complex64::from_polar(1.0, phi + zeta[0] * x[0] + zeta[1] * x[1]))
    });
    let shifted = weyl_shift(&u, &p).unwrap();
    assert!(shifted.sub(&oracle).unwrap().sup_norm() <= 1e-10);

    let v = ModuleFunction::from_fn(grid, 2, |x| closed_u(x, [-0.5, 0.4]).star());
    let moved = inner_product(&shifted, &weyl_shift(&v, &p).unwrap()).unwrap();
    assert!(moved.max_abs_diff(&inner_product(&u, &v).unwrap()) <= 1e-10);
    assert!(weyl_shift_inverse(&shifted, &p).unwrap().sub(&u).unwrap().sup_norm() <= 1e-13);
}

#[test]
fn group_law_against_direct_composition() {
    let grid = self_dual(32);
    let (h, d) = (grid.spacing(), grid.frequency_spacing());
    let (z1, s1) = ([h, -h], [2.0 * d, 0.0]);
    let (z2, s2) = ([-2.0 * h, 3.0 * h], [-d, d]);
    let u = u_on(grid);
    let e = |z: [f64; 2], s: [f64; 2]| HeisenbergPoint::new(z.to_vec(), s.to_vec(), 0.0).unwrap();
    let lhs = weyl_shift(&weyl_shift(&u, &e(z2, s2)).unwrap(), &e(z1, s1)).unwrap();
    // E1 E2 u(x) = exp(i s1.x) exp(i s2.(x - z1)) u(x - z1 - z2)
    let oracle = ModuleFunction::from_fn(grid, 2, |x| {
        let ph = s1[0] * x[0] + s1[1] * x[1] + s2[0] * (x[0] - z1[0]) + s2[1] * (x[1] - z1[1]);
        closed_u(&[x[0] - z1[0] - z2[0], x[1] - z1[1] - z2[1]], [0.2, -0.1]).scale(Complex64::from_polar(1.0, ph))
    });
    assert!(lhs.sub(&oracle).unwrap().sup_norm() <= 1e-10);
    let twist = Complex64::from_polar(1.0, -(s2[0] * z1[0] + s2[1] * z1[1]));
    let rhs = weyl_shift(&u, &e([z1[0] + z2[0], z1[1] + z2[1]], [s1[0] + s2[0], s1[1] + s2[1]])).unwrap().scale(twist);
    assert!(lhs.sub(&rhs).unwrap().sup_norm() <= 1e-10);
}

#[test]
fn conjugated_left_action_has_the_shifted_translation_symbol() {
    let grid = self_dual(32);
    let j = SkewForm::standard(THETA);
    let (h, d) = (grid.spacing(), grid.frequency_spacing());
    let (z, zeta) = ([h, -2.0 * h], [-d, d]);
    let f = MatrixGaussian::centered(2, AlgebraElement::from_real_rows(&[&[1.0, 0.5], &[-0.5, 2.0]]), 0.6);
    let u = u_on(grid);
    let t = OperatorHandle::left(Field::closed(f.clone()), j.clone());
    let a = conjugate_operator(&t, &z, &zeta, 0.0).unwrap().apply(&u).unwrap();
    let b = conjugate_operator(&t, &z, &zeta, 1.3).unwrap().apply(&u).unwrap();
    assert!(a.sub(&b).unwrap().sup_norm() <= 1e-12 * a.sup_norm());

    // F(x + z - J(xi + zeta)) evaluated directly
    let jj = j.clone();
    let fe = Field::closed(f).evaluator();
    let sym = PhaseSymbol::closed(FnSymbol::new(2, 2, move |x: &[f64], xi: &[f64]| {
        let s = jj.apply(&[xi[0] + zeta[0], xi[1] + zeta[1]]);
        fe.eval(&[x[0] + z[0] - s[0], x[1] + z[1] - s[1]])
    }));
    let direct = pdo_apply(&sym, &u).unwrap();
    assert!(a.sub(&direct).unwrap().sup_norm() <= 1e-6 * direct.sup_norm());
}

#[test]
fn shifted_symbol_examples() {
    let grid = self_dual(32);
    let (h, d) = (grid.spacing(), grid.frequency_spacing());
    let a = PhaseSymbol::closed(FnSymbol::new(2, 2, |x: &[f64], xi: &[f64]| {
        closed_u(x, [0.0, 0.3]).scale(Complex64::new(1.0 / (1.0 + 0.1 * (xi[0] * xi[0] + xi[1] * xi[1])), 0.0))
    }));
    let u = u_on(grid);
    let same = shifted_symbol(&a, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert!(pdo_apply(&same, &u).unwrap().sub(&pdo_apply(&a, &u).unwrap()).unwrap().sup_norm() == 0.0);
    let (z, zeta) = ([2.0 * h, h], [d, -d]);
    let conj = conjugate_operator(&OperatorHandle::Pdo(a.clone()), &z, &zeta, 0.0).unwrap().apply(&u).unwrap();
    let direct = pdo_apply(&shifted_symbol(&a, &z, &zeta).unwrap(), &u).unwrap();
    assert!(conj.sub(&direct).unwrap().sup_norm() <= 1e-6 * direct.sup_norm());
}

#[test]
fn constant_symbols_do_not_move() {
    let grid = self_dual(16);
    let u = u_on(grid);
    let c = AlgebraElement::from_real_rows(&[&[2.0, 1.0], &[0.0, -1.0]]);
    let t = OperatorHandle::Pdo(PhaseSymbol::closed(ConstantSymbol { n: 2, value: c }));
    let zero = OperatorHandle::Pdo(PhaseSymbol::closed(ConstantSymbol { n: 2, value: AlgebraElement::zeros(2) }));
    let family = |z: &[f64], zeta: &[f64]| conjugate_operator(&t, z, zeta, 0.0);
    let h = grid.spacing();
    let steps: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|s| s * h).collect();
    let r = smoothness_probe(&family, (&[0.0, 0.0], &[0.0, 0.0]), &[0.0, 0.0, 1.0, 0.0], &steps, &zero, &u, DifferenceScheme::Forward).unwrap();
    for (t, e) in r.steps.iter().zip(&r.errors) {
        assert!(*e <= t * 1e-6 * r.scale, "{r:?}");
    }
    assert!(r.converged);
}

#[test]
fn left_action_derivative_converges_at_second_order() {
    let grid = self_dual(32);
    let j = SkewForm::standard(THETA);
    let d = grid.frequency_spacing();
    // lattice frequencies keep every shifted product periodic
    let f: Arc<dyn FieldFn> = Arc::new(random_trig(&mut ChaCha8Rng::seed_from_u64(8), 2, 2, 3, d, 2));
    let t = OperatorHandle::left(Field::Closed(f.clone()), j.clone());
    let deriv = OperatorHandle::left(Field::closed(PartialField::new(f, vec![1, 0])), j);
    let family = |z: &[f64], zeta: &[f64]| conjugate_operator(&t, z, zeta, 0.0);
    let u = u_on(grid);
    let h = grid.spacing();
    let steps: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|s| s * h).collect();
    let r = smoothness_probe(&family, (&[0.0, 0.0], &[0.0, 0.0]), &[1.0, 0.0, 0.0, 0.0], &steps, &deriv, &u, DifferenceScheme::Centered).unwrap();
    let order = r.order.expect("errors above roundoff");
    assert!(r.converged && (order - 2.0).abs() < 0.3, "{r:?}");
    assert!(r.errors.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn intertwining_identities_hold_on_commensurate_shifts() {
    let grid = self_dual(32);
    let j = SkewForm::standard(THETA);
    let (h, d) = (grid.spacing(), grid.frequency_spacing());
    let u = u_on(grid);
    // scalar Gaussian times the unit
    let g2 = ModuleFunction::from_fn(grid, 2, |x| AlgebraElement::identity(2).scale(Complex64::new((-(x[0] - 0.3).powi(2) - x[1] * x[1]).exp(), 0.0)));
    let zero = intertwine_check(&[0.0, 0.0], &[0.0, 0.0], &g2, &j, &u).unwrap();
    assert!(zero.fourier_forward.max(zero.fourier_inverse).max(zero.right_action) <= 1e-12);
    let r = intertwine_check(&[2.0 * h, -h], &[d, 3.0 * d], &g2, &j, &u).unwrap();
    assert!(r.fourier_forward.max(r.fourier_inverse).max(r.right_action) <= 1e-8 * module_norm(&u), "{r:?}");
}

#[test]
fn conjugation_keeps_commutation_and_reduces_to_translations() {
    let grid = self_dual(32);
    let j = SkewForm::standard(THETA);
    let (h, d) = (grid.spacing(), grid.frequency_spacing());
    let f = MatrixGaussian::centered(2, AlgebraElement::from_real_rows(&[&[1.0, 0.0], &[0.5, 1.0]]), 0.6);
    let t = OperatorHandle::left(Field::Sampled(Field::closed(f).sample(&grid).unwrap()), j.clone());
    let g = Field::Sampled(ModuleFunction::from_fn(grid, 2, |x| closed_u(x, [0.4, 0.0])));
    let u = u_on(grid);
    let (z, zeta) = ([h, 2.0 * h], [-d, 2.0 * d]);
    let eps = commutation_residual(&t, &g, &j, &u).unwrap();
    let conj = conjugate_operator(&t, &z, &zeta, 0.0).unwrap();
    let eps_conj = commutation_residual(&conj, &g, &j, &u).unwrap();
    assert!(eps_conj <= 10.0 * eps.max(1e-13 * module_norm(&u)), "{eps:e} {eps_conj:e}");
    let red = translation_reduction_residual(&t, &z, &zeta, &j, &u).unwrap();
    assert!(red <= 1e-9 * module_norm(&u), "{red:e}");

    // the reduction fails for operators that do not commute with right actions
    let m = OperatorHandle::Pdo(PhaseSymbol::closed(FnSymbol::new(2, 2, |x: &[f64], xi: &[f64]| {
        AlgebraElement::identity(2).scale(Complex64::new(x[0].sin() * xi[1].sin(), 0.0))
    })));
    assert!(translation_reduction_residual(&m, &z, &zeta, &j, &u).unwrap() > 1e-3 * module_norm(&u));
}
