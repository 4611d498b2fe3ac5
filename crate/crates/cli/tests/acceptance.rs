//! Acceptance run at desk scale: n = 2, N = 64, k = 2, J = [[0, 0.5], [-0.5, 0]].
//!
//! One line per criterion. Grids over phase space (2n = 4 axes) use N = 32
//! per axis, because a sampled k = 2 symbol at N = 64 needs about a gigabyte.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use opcalc::calculus::{gamma_reconstruct, gamma_reproduce, poisson_bracket, recover_translation_symbol, rieffel_pipeline, GammaKernel};
use opcalc::deformation::{approximate_identity, deformed_product, left_action, right_action};
use opcalc::families::{random_element, random_matrix_gaussian, random_trig, GaussTerm, MatrixGaussian, TrigPolynomial};
use opcalc::field::{FieldFn, PartialField};
use opcalc::heisenberg::{conjugate_operator, intertwine_check, shifted_symbol, smoothness_probe, weyl_shift, DifferenceScheme, HeisenbergPoint};
use opcalc::module_space::{fourier, module_norm, Direction};
use opcalc::quantization::symbols::{ConstantSymbol, FnSymbol, TranslationSymbol, TrigSymbol};
use opcalc::quantization::{adjoint_symbol, operator_norm_estimate, pdo_apply, pi_seminorm, DerivativeScheme};
use opcalc::{AlgebraElement, Complex64, Field, GridSpec, ModuleFunction, OperatorHandle, PhaseGrid, PhaseSymbol, SampledSymbol, SkewForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use opcalc_cli::grid_io::{decode, encode};
use opcalc_cli::{run_suite, SuiteConfig};

const N: usize = 64;
const K: usize = 2;
const THETA: f64 = 0.5;
const SEED: u64 = 20_240_917;

fn j() -> SkewForm {
    SkewForm::standard(THETA)
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

/// Grid on which `J` maps the dual lattice onto the position lattice:
/// `L^2 = N pi theta / 2`, so `theta * pi / L = 2L / N`.
fn self_dual(points: usize) -> GridSpec {
    GridSpec::new(2, points, (points as f64 * PI * THETA / 2.0).sqrt()).unwrap()
}

fn sup_diff(a: &ModuleFunction, b: &ModuleFunction) -> f64 {
    a.sub(b).unwrap().sup_norm()
}

fn rel_diff(a: &ModuleFunction, b: &ModuleFunction) -> f64 {
    sup_diff(a, b) / b.sup_norm().max(f64::MIN_POSITIVE)
}

fn gaussian(grid: GridSpec, coef: AlgebraElement, centre: [f64; 2], sigma: f64) -> ModuleFunction {
    ModuleFunction::from_fn(grid, coef.dim(), |x| {
        let r2 = (x[0] - centre[0]).powi(2) + (x[1] - centre[1]).powi(2);
        coef.scale(Complex64::new((-0.5 * r2 / (sigma * sigma)).exp(), 0.0))
    })
}

fn random_gaussian_fn(r: &mut ChaCha8Rng, grid: GridSpec, sigma: (f64, f64)) -> ModuleFunction {
    let f = random_matrix_gaussian(r, 2, K, 2, sigma, 1.5);
    Field::closed(f).sample(&grid).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn module_axioms() -> Outcome {
    let grid = GridSpec::new(2, N, 10.0).unwrap();
    let mut r = rng(1);
    let (mut herm, mut pos, mut lin, mut cs): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, f64::INFINITY);
    for _ in 0..50 {
        let f = random_gaussian_fn(&mut r, grid, (0.5, 2.0));
        let g = random_gaussian_fn(&mut r, grid, (0.5, 2.0));
        let a = random_element(&mut r, K);
        let (nf, ng) = (module_norm(&f), module_norm(&g));
        let scale = nf * ng;
        let fg = f.inner(&g).unwrap();
        herm = herm.max(fg.star().max_abs_diff(&g.inner(&f).unwrap()) / scale);
        pos = pos.max(f.inner(&f).unwrap().positivity_defect() / (nf * nf));
        let lhs = f.inner(&g.right_mul(&a)).unwrap();
        lin = lin.max(lhs.max_abs_diff(&(&fg * &a)) / (scale * a.cnorm()));
        cs = cs.min(nf * ng + 1e-10 - fg.cnorm());
    }
    // right-linearity is exact algebraically; floating point reorders the sums
    let pass = herm <= 1e-12 && pos <= 1e-10 && lin <= 1e-13 && cs >= 0.0;
    outcome(pass, format!("hermitian {herm:.1e}, positivity {pos:.1e}, right-linearity {lin:.1e}, Cauchy-Schwarz slack {cs:.1e}"))
}

fn fourier_checks() -> Outcome {
    let grid = GridSpec::new(2, N, 10.0).unwrap();
    let g = gaussian(grid, AlgebraElement::identity(K), [0.0, 0.0], 1.0);
    let fixed = sup_diff(&fourier(&g, Direction::Forward), &gaussian(grid.dual(), AlgebraElement::identity(K), [0.0, 0.0], 1.0));
    let mut r = rng(2);
    let (mut unit, mut trip): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let u = random_gaussian_fn(&mut r, grid, (0.5, 2.0));
        let v = random_gaussian_fn(&mut r, grid, (0.5, 2.0));
        let (fu, fv) = (fourier(&u, Direction::Forward), fourier(&v, Direction::Forward));
        let scale = module_norm(&u) * module_norm(&v);
        unit = unit.max(fu.inner(&fv).unwrap().max_abs_diff(&u.inner(&v).unwrap()) / scale);
        trip = trip.max(sup_diff(&fourier(&fu, Direction::Inverse), &u));
    }
    outcome(
        fixed <= 1e-6 && unit <= 1e-10 && trip <= 1e-12,
        format!("Gaussian fixed point {fixed:.1e}, unitarity {unit:.1e}, round trip {trip:.1e}"),
    )
}

fn plane_waves() -> Outcome {
    let grid = GridSpec::new(2, N, 10.0).unwrap();
    let d = grid.frequency_spacing();
    let jj = j();
    let mut r = rng(3);
    let wave = |p: &[f64]| Field::closed(TrigPolynomial::plane_wave(p.to_vec())).sample(&grid).unwrap();
    let (mut worst, mut exchange): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let p: Vec<f64> = (0..2).map(|_| r.gen_range(-8i32..=8) as f64 * d).collect();
        let q: Vec<f64> = (0..2).map(|_| r.gen_range(-8i32..=8) as f64 * d).collect();
        let pq: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a + b).collect();
        let expected = wave(&pq).scale(Complex64::from_polar(1.0, -jj.pairing(&p, &q)));
        let sampled = deformed_product(&Field::Sampled(wave(&p)), &Field::Sampled(wave(&q)), &jj, &grid).unwrap();
        let closed = deformed_product(&Field::closed(TrigPolynomial::plane_wave(p.clone())), &Field::Sampled(wave(&q)), &jj, &grid).unwrap();
        worst = worst.max(rel_diff(&sampled, &expected)).max(rel_diff(&closed, &expected));
        // e_p x e_q = exp(-2i p.Jq) e_q x e_p
        let swapped = deformed_product(&Field::Sampled(wave(&q)), &Field::Sampled(wave(&p)), &jj, &grid).unwrap();
        let rotated = swapped.scale(Complex64::from_polar(1.0, -2.0 * jj.pairing(&p, &q)));
        exchange = exchange.max(rel_diff(&sampled, &rotated));
    }
    outcome(worst <= 1e-9 && exchange <= 1e-9, format!("20 pairs: product {worst:.1e}, exchange {exchange:.1e}"))
}

fn collapse() -> Outcome {
    let grid = GridSpec::new(2, N, 10.0).unwrap();
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let f = random_gaussian_fn(&mut r, grid, (0.7, 2.0));
        let g = random_gaussian_fn(&mut r, grid, (0.7, 2.0));
        let p = deformed_product(&Field::Sampled(f.clone()), &Field::Sampled(g.clone()), &SkewForm::zero(2), &grid).unwrap();
        worst = worst.max(rel_diff(&p, &f.pointwise_mul(&g).unwrap()));
    }
    outcome(worst <= 1e-10, format!("J = 0 against pointwise product {worst:.1e}"))
}

fn associativity_at(points: usize, r: &mut ChaCha8Rng) -> (f64, f64) {
    // box wide enough that N = 64 is aliasing-limited rather than at roundoff
    let grid = GridSpec::new(2, points, 12.0).unwrap();
    let jj = j();
    let f = Field::Sampled(random_gaussian_fn(r, grid, (0.5, 0.7)));
    let g = Field::Sampled(random_gaussian_fn(r, grid, (0.5, 0.7)));
    let h = Field::Sampled(random_gaussian_fn(r, grid, (0.5, 0.7)));
    let fg = Field::Sampled(deformed_product(&f, &g, &jj, &grid).unwrap());
    let gh = Field::Sampled(deformed_product(&g, &h, &jj, &grid).unwrap());
    let left = deformed_product(&fg, &h, &jj, &grid).unwrap();
    let right = deformed_product(&f, &gh, &jj, &grid).unwrap();
    let assoc = rel_diff(&left, &right);
    let u = random_gaussian_fn(r, grid, (0.5, 0.7));
    let lr = left_action(&f, &right_action(&h, &u, &jj).unwrap(), &jj).unwrap();
    let rl = right_action(&h, &left_action(&f, &u, &jj).unwrap(), &jj).unwrap();
    let comm = rel_diff(&lr, &rl);
    (assoc, comm)
}

fn associativity() -> Outcome {
    let (a64, c64) = associativity_at(N, &mut rng(5));
    let (a128, c128) = associativity_at(2 * N, &mut rng(5));
    let pass = a64 <= 1e-3 && c64 <= 1e-3 && a128 * 2.0 <= a64 && c128 * 2.0 <= c64;
    outcome(pass, format!("associativity {a64:.1e} -> {a128:.1e}, commutation {c64:.1e} -> {c128:.1e} (N = 64 -> 128)"))
}

fn adjointness() -> Outcome {
    let grid = GridSpec::new(2, N, 10.0).unwrap();
    let jj = j();
    let mut r = rng(6);
    let f = Field::closed(random_matrix_gaussian(&mut r, 2, K, 2, (0.6, 1.2), 1.0));
    let u = random_gaussian_fn(&mut r, grid, (0.8, 1.5));
    let v = random_gaussian_fn(&mut r, grid, (0.8, 1.5));
    let scale = module_norm(&u) * module_norm(&v);
    let lhs = left_action(&f, &u, &jj).unwrap().inner(&v).unwrap();
    let rhs = u.inner(&left_action(&f.star(), &v, &jj).unwrap()).unwrap();
    let left = lhs.max_abs_diff(&rhs) / scale;

    let small = GridSpec::new(2, 32, 6.0).unwrap();
    let (c1, c2) = (random_element(&mut r, K), random_element(&mut r, K));
    let a = PhaseSymbol::closed(FnSymbol::new(2, K, move |x: &[f64], xi: &[f64]| {
        let gx = (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp();
        let gxi = (-0.25 * ((xi[0] - 0.5).powi(2) + xi[1] * xi[1])).exp();
        let s = (-((x[0] - 1.0).powi(2) + x[1] * x[1]) - 0.5 * (xi[0] * xi[0] + (xi[1] + 1.0).powi(2))).exp();
        &c1.scale(Complex64::new(gx * gxi, 0.0)) + &c2.scale(Complex64::new(s, 0.0))
    }));
    let p = PhaseSymbol::Sampled(adjoint_symbol(&a, &small).unwrap());
    let u = random_gaussian_fn(&mut r, small, (0.8, 1.5));
    let v = random_gaussian_fn(&mut r, small, (0.8, 1.5));
    let scale = module_norm(&u) * module_norm(&v);
    let lhs = pdo_apply(&a, &u).unwrap().inner(&v).unwrap();
    let rhs = u.inner(&pdo_apply(&p, &v).unwrap()).unwrap();
    let pdo = lhs.max_abs_diff(&rhs) / scale;
    outcome(left <= 1e-5 && pdo <= 1e-5, format!("(L_F)^* = L_F* {left:.1e}, symbol adjoint pairing {pdo:.1e}"))
}

fn calderon_vaillancourt() -> Outcome {
    let coarse = GridSpec::new(2, 32, 8.0).unwrap();
    let fine = GridSpec::new(2, 64, 8.0).unwrap();
    let (dx, dxi) = (coarse.frequency_spacing(), coarse.spacing());
    let box_grid = PhaseGrid::operator(coarse);
    let mut r = rng(7);
    let one = PhaseSymbol::closed(ConstantSymbol { n: 2, value: AlgebraElement::identity(1) });
    let id = operator_norm_estimate(&OperatorHandle::Pdo(one), &fine, 1, 4, SEED).unwrap().estimate;
    let (mut c32, mut c64): (f64, f64) = (0.0, 0.0);
    for s in 0..10 {
        // periodic on the coarse phase grid, so pi is read off one full period
        let modes = (0..3)
            .map(|_| {
                let p = (0..2).map(|_| r.gen_range(-3i32..=3) as f64 * dx).collect();
                let q = (0..2).map(|_| r.gen_range(-3i32..=3) as f64 * dxi).collect();
                (p, q, random_element(&mut r, 1))
            })
            .collect();
        let t = TrigSymbol::new(2, 1, modes);
        let pi = pi_seminorm(&PhaseSymbol::closed(t.clone()), &box_grid).unwrap();
        let a = OperatorHandle::Pdo(PhaseSymbol::closed(t.scaled(1.0 / pi)));
        c32 = c32.max(operator_norm_estimate(&a, &coarse, 1, 6, SEED + s).unwrap().estimate);
        c64 = c64.max(operator_norm_estimate(&a, &fine, 1, 6, SEED + s).unwrap().estimate);
    }
    let drift = (c64 / c32 - 1.0).abs();
    outcome(
        (id - 1.0).abs() <= 1e-10 && drift <= 0.1,
        format!("identity {id:.12}, bound C = {c32:.4} (N = 32), {c64:.4} (N = 64), drift {:.1}%", 100.0 * drift),
    )
}

fn bracket_nullity() -> Outcome {
    let grid = self_dual(32);
    let pg = PhaseGrid::operator(grid);
    let jj = j();
    let mut r = rng(8);
    let d = grid.frequency_spacing();
    let f: Arc<dyn FieldFn> = Arc::new(random_trig(&mut r, 2, K, 4, d, 3));
    let g: Arc<dyn FieldFn> = Arc::new(random_trig(&mut r, 2, K, 4, d, 3));
    let a = PhaseSymbol::Sampled(SampledSymbol::from_closed(&TranslationSymbol::left(f, jj.clone()), pg));
    let b = PhaseSymbol::Sampled(SampledSymbol::from_closed(&TranslationSymbol::right(g, jj), pg));
    let scale = pi_seminorm(&a, &pg).unwrap() * pi_seminorm(&b, &pg).unwrap();
    let br = poisson_bracket(&a, &b, &pg).unwrap().sup_norm();
    outcome(br <= 1e-6 * scale, format!("sup ||{{a, b}}|| = {br:.1e} at scale {scale:.2}"))
}

fn gamma_calculus() -> Outcome {
    let kernel = GammaKernel::default();
    let c = AlgebraElement::from_real_rows(&[&[1.0, -2.0], &[0.5, 3.0]]);
    let cc = c.clone();
    let constant = opcalc::field::FnField::new(2, K, move |_: &[f64]| cc.clone());
    let e0 = gamma_reproduce(&constant, &kernel).unwrap().max_abs_diff(&c);
    let wave = TrigPolynomial::plane_wave(vec![1.0]);
    let e1 = (gamma_reproduce(&wave, &kernel).unwrap().get(0, 0) - Complex64::new(1.0, 0.0)).norm();
    let gauss = MatrixGaussian::new(
        2,
        K,
        vec![
            GaussTerm { coef: c.clone(), center: vec![0.3, -0.2], sigma: 0.9, wave: vec![0.0, 0.0] },
            GaussTerm { coef: AlgebraElement::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), center: vec![-0.4, 0.1], sigma: 1.3, wave: vec![0.7, 0.0] },
        ],
    );
    let g0 = opcalc::field::Field::closed(gauss.clone()).evaluator().eval(&[0.0, 0.0]);
    let e2 = gamma_reproduce(&gauss, &kernel).unwrap().max_abs_diff(&g0);

    let grid = self_dual(32);
    let pg = PhaseGrid::operator(grid);
    let mut r = rng(9);
    let d = grid.frequency_spacing();
    let modes = (0..4)
        .map(|_| {
            let p = (0..2).map(|_| r.gen_range(-3i32..=3) as f64 * d).collect();
            let q = (0..2).map(|_| r.gen_range(-3i32..=3) as f64 * d).collect();
            (p, q, random_element(&mut r, K))
        })
        .collect();
    let a = PhaseSymbol::closed_with(TrigSymbol::new(2, K, modes), DerivativeScheme::Spectral);
    let truth = a.sample(&pg).unwrap();
    let b = PhaseSymbol::Sampled(opcalc::calculus::b_transform(&a, &pg).unwrap());
    let errors: Vec<f64> = [3, 5, 10]
        .iter()
        .map(|&m| gamma_reconstruct(&b, &pg, &GammaKernel::new(40.0, m).unwrap()).unwrap().sub(&truth).unwrap().sup_norm())
        .collect();
    let floor = 1e-13 * truth.sup_norm();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0] || w[1] <= floor);
    let last = *errors.last().unwrap();
    outcome(
        e0 <= 1e-6 && e1 <= 1e-6 && e2 <= 1e-6 && last <= 1e-5 && decreasing,
        format!("reproduce {e0:.1e} / {e1:.1e} / {e2:.1e}; round trip {:.1e} -> {:.1e} -> {:.1e} (3, 5, 10 nodes per panel)", errors[0], errors[1], errors[2]),
    )
}

fn heisenberg_laws() -> Outcome {
    let grid = self_dual(N);
    let (h, d) = (grid.spacing(), grid.frequency_spacing());
    let jj = j();
    let mut r = rng(10);
    let u = random_gaussian_fn(&mut r, grid, (0.8, 1.2));
    let v = random_gaussian_fn(&mut r, grid, (0.8, 1.2));
    let (z, zeta) = (vec![3.0 * h, -2.0 * h], vec![2.0 * d, d]);
    let e = HeisenbergPoint::new(z.clone(), zeta.clone(), 0.9).unwrap();
    let scale = module_norm(&u) * module_norm(&v);
    let unitary = weyl_shift(&u, &e).unwrap().inner(&weyl_shift(&v, &e).unwrap()).unwrap().max_abs_diff(&u.inner(&v).unwrap()) / scale;

    // conjugation shifts the symbol
    let (c1, c2) = (random_element(&mut r, K), random_element(&mut r, K));
    let a = PhaseSymbol::closed(FnSymbol::new(2, K, move |x: &[f64], xi: &[f64]| {
        let gx = (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp();
        let w = 1.0 / (1.0 + 0.1 * (xi[0] * xi[0] + xi[1] * xi[1]));
        &c1.scale(Complex64::new(gx * w, 0.0)) + &c2.scale(Complex64::new(xi[0].cos() * (-0.25 * (x[0] - 1.0).powi(2) - 0.25 * x[1] * x[1]).exp(), 0.0))
    }));
    let conj = conjugate_operator(&OperatorHandle::Pdo(a.clone()), &z, &zeta, 0.4).unwrap().apply(&u).unwrap();
    let direct = pdo_apply(&shifted_symbol(&a, &z, &zeta).unwrap(), &u).unwrap();
    let shift_law = rel_diff(&conj, &direct);

    // translation symbols: (L_h)_{z, zeta} = (L_h)_{z - J zeta, 0}
    let f: Arc<dyn FieldFn> = Arc::new(random_matrix_gaussian(&mut r, 2, K, 2, (0.7, 1.2), 1.0));
    let lf = PhaseSymbol::closed(TranslationSymbol::left(f.clone(), jj.clone()));
    let pg = PhaseGrid::operator(self_dual(32));
    let (zo, zetao) = (vec![0.37, -1.1], vec![0.8, 0.45]);
    let jz = jj.apply(&zetao);
    let reduced: Vec<f64> = zo.iter().zip(&jz).map(|(p, q)| p - q).collect();
    let s1 = shifted_symbol(&lf, &zo, &zetao).unwrap().sample(&pg).unwrap();
    let s2 = shifted_symbol(&lf, &reduced, &[0.0, 0.0]).unwrap().sample(&pg).unwrap();
    let lemma = s1.sub(&s2).unwrap().sup_norm();

    let g = gaussian(grid, AlgebraElement::identity(K), [0.3, -0.2], 1.0);
    let it = intertwine_check(&z, &zeta, &g, &jj, &u).unwrap();
    let nu = module_norm(&u);
    let inter = it.fourier_forward.max(it.fourier_inverse).max(it.right_action) / nu;

    let op = OperatorHandle::left(Field::Closed(f.clone()), jj.clone());
    let family = |z: &[f64], zeta: &[f64]| conjugate_operator(&op, z, zeta, 0.0);
    let deriv = OperatorHandle::left(Field::closed(PartialField::new(f.clone(), vec![1, 0])), jj.clone());
    let steps: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|s| s * h).collect();
    let probe = smoothness_probe(&family, (&[0.0, 0.0], &[0.0, 0.0]), &[1.0, 0.0, 0.0, 0.0], &steps, &deriv, &u, DifferenceScheme::Centered).unwrap();
    let order = probe.order.unwrap_or(f64::INFINITY);

    let pass = unitary <= 1e-10 && shift_law <= 1e-6 && lemma <= 1e-9 && inter <= 1e-8 && probe.converged && order >= 1.0;
    outcome(
        pass,
        format!("unitarity {unitary:.1e}, symbol shift {shift_law:.1e}, translation reduction {lemma:.1e}, intertwining {inter:.1e}, probe order {order:.2}"),
    )
}

fn rieffel() -> Outcome {
    let grid = self_dual(32);
    let pg = PhaseGrid::operator(grid);
    let jj = j();
    let mut r = rng(11);
    let d = grid.frequency_spacing();
    let f = random_trig(&mut r, 2, K, 5, d, 3);
    let truth = Field::closed(f.clone()).sample(&grid).unwrap();
    let t = OperatorHandle::left(Field::closed(f), jj.clone());
    let h = grid.spacing();
    let shifts = vec![(vec![2.0 * h, -h], vec![d, 3.0 * d]), (vec![0.0, 5.0 * h], vec![-2.0 * d, 0.0])];
    let report = rieffel_pipeline(&t, K, &jj, &pg, &shifts, &GammaKernel::default()).unwrap();
    let err = sup_diff(&report.recovery.f, &truth);
    let counter = PhaseSymbol::closed(FnSymbol::new(2, 1, |x: &[f64], xi: &[f64]| AlgebraElement::scalar(1, Complex64::new(x[0].sin() * xi[1].sin(), 0.0))));
    let rej = recover_translation_symbol(&counter, &jj, &PhaseGrid::operator(GridSpec::new(2, 32, 8.0).unwrap())).unwrap();
    let ratio = rej.residual / rej.scale;
    outcome(
        err <= 1e-5 && ratio > 0.1,
        format!(
            "recovered F error {err:.1e} (b shift invariance {:.1e}, reconstruction {:.1e}); counterexample residual {ratio:.2} of scale",
            report.shift_invariance, report.reconstruction_error
        ),
    )
}

fn approximate_unit() -> Outcome {
    let grid = GridSpec::new(2, N, 50.0).unwrap();
    let jj = j();
    let c = AlgebraElement::from_real_rows(&[&[1.0, 0.5], &[-0.25, 2.0]]);
    let f = gaussian(grid, c, [1.0, -2.0], 4.0);
    let res: Vec<f64> = [1u32, 2, 4, 8]
        .iter()
        .map(|&idx| {
            let e = approximate_identity(idx, K, &jj, &grid).unwrap();
            module_norm(&left_action(&Field::Sampled(e), &f, &jj).unwrap().sub(&f).unwrap())
        })
        .collect();
    let decreasing = res.windows(2).all(|w| w[1] < w[0]);
    outcome(
        decreasing && res[3] * 4.0 <= res[0],
        format!("||L_e f - f|| = {:.2e}, {:.2e}, {:.2e}, {:.2e} for index 1, 2, 4, 8", res[0], res[1], res[2], res[3]),
    )
}

fn determinism_and_io() -> Outcome {
    let config = SuiteConfig { suite: "deformation".into(), ..SuiteConfig::default() };
    let runs: Vec<String> = (0..2).map(|_| run_suite(&config).unwrap().payload()).collect();
    let identical = runs[0] == runs[1];

    let grid = GridSpec::new(2, N, 8.0).unwrap();
    let mut r = rng(13);
    let data = (0..grid.len()).flat_map(|_| random_element(&mut r, K).entries().to_vec()).collect();
    let f = ModuleFunction::from_data(grid, K, data).unwrap();
    let bytes = encode(&f);
    let back = decode(&bytes, Some(K)).unwrap();
    let lossless = back.grid() == f.grid()
        && f.data().iter().zip(back.data()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    let truncated = decode(&bytes[..bytes.len() - 16], Some(K)).is_err();
    outcome(
        identical && lossless && truncated,
        format!("payloads identical: {identical}, MGF1 bit-exact: {lossless}, truncation rejected: {truncated}"),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("module axioms", module_axioms),
        ("Fourier transform", fourier_checks),
        ("plane-wave products", plane_waves),
        ("J = 0 collapse", collapse),
        ("associativity and commutation", associativity),
        ("adjointness", adjointness),
        ("Calderon-Vaillancourt bound", calderon_vaillancourt),
        ("Poisson bracket nullity", bracket_nullity),
        ("gamma calculus", gamma_calculus),
        ("Heisenberg laws", heisenberg_laws),
        ("translation symbol recovery", rieffel),
        ("approximate identity", approximate_unit),
        ("determinism and I/O", determinism_and_io),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if let Some(f) = &filter {
            if !name.contains(f.as_str()) {
                continue;
            }
        }
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("[{status}] {:>2} {name}: {} ({:.1} s)", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
