//! The verification suites. Each check returns a residual compared against
//! its tolerance; every check draws from its own random stream, keyed by its
//! id, so results do not depend on which other checks ran.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use opcalc::calculus::{b_transform, gamma_reconstruct, gamma_reproduce, poisson_bracket, recover_translation_symbol, rieffel_pipeline, GammaKernel};
use opcalc::deformation::{approximate_identity, deformed_product, left_action, right_action};
use opcalc::families::{random_element, random_matrix_gaussian, random_trig, MatrixGaussian, TrigPolynomial};
use opcalc::heisenberg::{conjugate_operator, intertwine_check, shifted_symbol, translation_reduction_residual, weyl_shift, weyl_shift_inverse, HeisenbergPoint};
use opcalc::module_space::{fourier, module_norm, Direction};
use opcalc::quantization::symbols::{ConstantSymbol, FnSymbol, MultiplicationSymbol, TranslationSymbol, TrigSymbol};
use opcalc::quantization::{adjoint_symbol, operator_norm_estimate, pdo_apply, pi_seminorm, symbol_to_kernel, DerivativeScheme};
use opcalc::{AlgebraElement, Complex64, Field, FieldFn, GridSpec, ModuleFunction, OperatorHandle, PhaseGrid, PhaseSymbol, SampledSymbol, SkewForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SuiteConfig;
use crate::report::{Bound, CheckRecord, Environment, VerificationReport};
use crate::Result;

pub const SUITES: [&str; 8] = ["module_axioms", "fourier", "deformation", "quantization", "heisenberg", "calculus", "rieffel_pipeline", "all"];

type CheckFn = fn(&Ctx, &mut ChaCha8Rng) -> opcalc::Result<f64>;

struct Check {
    suite: &'static str,
    id: &'static str,
    anchor: &'static str,
    tolerance: f64,
    bound: Bound,
    run: CheckFn,
}

const fn at_most(suite: &'static str, id: &'static str, anchor: &'static str, tolerance: f64, run: CheckFn) -> Check {
    Check { suite, id, anchor, tolerance, bound: Bound::AtMost, run }
}

const CHECKS: &[Check] = &[
    at_most("module_axioms", "module.hermitian", "the inner product satisfies <f, g>* = <g, f>", 1e-12, module_hermitian),
    at_most("module_axioms", "module.positivity", "<f, f> is a positive matrix", 1e-10, module_positivity),
    at_most("module_axioms", "module.right_linearity", "<f, g a> = <f, g> a", 1e-13, module_right_linearity),
    at_most("module_axioms", "module.cauchy_schwarz", "||<f, g>|| <= ||f|| ||g||", 1e-10, module_cauchy_schwarz),
    at_most("module_axioms", "module.norm_comparison", "the module norm is dominated by the L2 norm", 1e-12, module_norm_comparison),
    at_most("fourier", "fourier.gaussian_fixed_point", "the unit Gaussian is fixed by the Fourier transform", 1e-6, fourier_fixed_point),
    at_most("fourier", "fourier.unitarity", "the Fourier transform preserves the module inner product", 1e-10, fourier_unitarity),
    at_most("fourier", "fourier.plancherel", "the Fourier transform preserves the module norm", 1e-10, fourier_plancherel),
    at_most("fourier", "fourier.round_trip", "the inverse transform undoes the forward transform", 1e-12, fourier_round_trip),
    at_most("deformation", "deformation.plane_waves", "e_p x e_q = exp(-i p.Jq) e_(p+q)", 1e-9, deformation_plane_waves),
    at_most("deformation", "deformation.exchange", "e_p x e_q = exp(-2i p.Jq) e_q x e_p", 1e-9, deformation_exchange),
    at_most("deformation", "deformation.zero_form", "with J = 0 the product is pointwise", 1e-10, deformation_zero_form),
    at_most("deformation", "deformation.associativity", "the deformed product is associative", 1e-3, deformation_associativity),
    at_most("deformation", "deformation.actions_commute", "left and right actions commute", 1e-3, deformation_actions_commute),
    at_most("deformation", "deformation.left_adjoint", "the adjoint of L_F is L_F*", 1e-8, deformation_left_adjoint),
    at_most("deformation", "deformation.approximate_identity", "L_e f approaches f along the approximate identity", 0.5, deformation_approximate_identity),
    at_most("quantization", "quantization.identity_symbol", "the constant symbol I quantizes to the identity", 1e-12, quantization_identity),
    at_most("quantization", "quantization.multiplication_symbol", "a symbol independent of xi quantizes to multiplication", 1e-12, quantization_multiplication),
    at_most("quantization", "quantization.adjoint_symbol", "<a(x, D) u, v> = <u, a*(x, D) v> for the adjoint symbol", 1e-10, quantization_adjoint),
    at_most("quantization", "quantization.kernel", "the kernel integral reproduces a(x, D)", 1e-10, quantization_kernel),
    at_most("quantization", "quantization.identity_norm", "the identity has operator norm one", 1e-10, quantization_identity_norm),
    at_most("heisenberg", "heisenberg.unitarity", "Weyl shifts preserve the inner product", 1e-10, heisenberg_unitarity),
    at_most("heisenberg", "heisenberg.inverse", "the inverse shift undoes the shift", 1e-12, heisenberg_inverse),
    at_most("heisenberg", "heisenberg.intertwining", "Fourier and right actions intertwine Weyl shifts", 1e-8, heisenberg_intertwining),
    at_most("heisenberg", "heisenberg.symbol_shift", "conjugating a(x, D) by a Weyl shift translates its symbol", 1e-6, heisenberg_symbol_shift),
    at_most("heisenberg", "heisenberg.translation_reduction", "for L_F the shift (z, zeta) acts as (z - J zeta, 0)", 1e-8, heisenberg_translation_reduction),
    at_most("calculus", "calculus.poisson_nullity", "left and right translation symbols have vanishing Poisson bracket", 1e-6, calculus_poisson),
    at_most("calculus", "calculus.gamma_reproduce", "the gamma kernel reproduces f(0) from (1 - d)^2 f", 1e-6, calculus_gamma_reproduce),
    at_most("calculus", "calculus.gamma_round_trip", "gamma reconstruction inverts the b transform", 1e-5, calculus_gamma_round_trip),
    at_most("rieffel_pipeline", "rieffel.recovery", "the translation symbol of L_F recovers F", 1e-5, rieffel_recovery),
    at_most("rieffel_pipeline", "rieffel.shift_invariance", "b(x + z, xi + zeta) = b(x + z - J zeta, xi) for L_F", 1e-6, rieffel_shift_invariance),
    Check {
        suite: "rieffel_pipeline",
        id: "rieffel.counterexample",
        anchor: "sin(x_1) sin(xi_n) is not a translation symbol",
        tolerance: 0.1,
        bound: Bound::AtLeast,
        run: rieffel_counterexample,
    },
];

pub fn default_tolerance(id: &str) -> Option<f64> {
    CHECKS.iter().find(|c| c.id == id).map(|c| c.tolerance)
}

/// `(suite, id, statement, default tolerance)` for every registered check.
pub fn catalogue() -> Vec<(&'static str, &'static str, &'static str, f64)> {
    CHECKS.iter().map(|c| (c.suite, c.id, c.anchor, c.tolerance)).collect()
}

/// Runs the configured suite and writes the report files it names.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let ctx = Ctx::new(config);
    let records = CHECKS
        .iter()
        .filter(|c| config.suite == "all" || c.suite == config.suite)
        .map(|c| run_check(&ctx, c))
        .collect();
    let report = VerificationReport::new(&config.suite, Environment::from(config), records);
    report.write(config.report.as_deref(), config.csv.as_deref())?;
    Ok(report)
}

fn run_check(ctx: &Ctx, c: &Check) -> CheckRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
    rng.set_stream(stream_id(c.id));
    let tolerance = ctx.config.tolerance(c.id);
    let start = Instant::now();
    let outcome = (c.run)(ctx, &mut rng);
    let runtime_ms = Some(start.elapsed().as_millis() as u64);
    let (residual, error) = match outcome {
        Ok(r) if r.is_finite() => (Some(r), None),
        Ok(r) => (None, Some(format!("non-finite residual {r}"))),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = residual.is_some_and(|r| match c.bound {
        Bound::AtMost => r <= tolerance,
        Bound::AtLeast => r >= tolerance,
    });
    CheckRecord { id: c.id.into(), anchor: c.anchor.into(), residual, tolerance, bound: c.bound, pass, error, runtime_ms }
}

/// FNV-1a: a fixed, platform-independent stream per check id.
fn stream_id(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

struct Ctx<'a> {
    config: &'a SuiteConfig,
    grid: GridSpec,
    j: SkewForm,
    k: usize,
    /// Position grid whose operator phase grid is affordable.
    small: GridSpec,
    /// Like `small`, but with `theta pi / L = h`, so that `J` maps the dual
    /// lattice onto the position lattice and translation symbols stay
    /// periodic in `xi`.
    self_dual: GridSpec,
}

impl<'a> Ctx<'a> {
    fn new(config: &'a SuiteConfig) -> Self {
        let grid = config.grid();
        let j = config.skew_form();
        let small = GridSpec::new(config.n, config.phase_points, config.half_width).expect("validated grid");
        let theta = if config.n == 2 { j.get(0, 1).abs() } else { 0.0 };
        let self_dual = if theta > 0.0 {
            GridSpec::new(config.n, config.phase_points, (config.phase_points as f64 * PI * theta / 2.0).sqrt()).expect("positive width")
        } else {
            small
        };
        Self { config, grid, j, k: config.k, small, self_dual }
    }

    fn n(&self) -> usize {
        self.grid.n()
    }

    /// Random matrix Gaussian sampled on `grid`, centred well inside the box.
    /// Widths are widened on coarse grids so the narrowest spans at least
    /// 2.1 samples, enough for 1e-8 accuracy under trigonometric interpolation.
    fn random_fn(&self, r: &mut ChaCha8Rng, grid: GridSpec, sigma: (f64, f64)) -> ModuleFunction {
        let sigma = widths(&grid, sigma);
        let spread = (grid.half_width() / 6.0).min(1.5);
        Field::closed(random_matrix_gaussian(r, self.n(), self.k, 2, sigma, spread)).sample(&grid).expect("matching grid")
    }

    /// Shifts that are whole multiples of the spacing and frequency spacing
    /// of `grid`.
    fn lattice_shift(&self, grid: &GridSpec, z: [i32; 2], zeta: [i32; 2]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let zs = (0..n).map(|a| z[a] as f64 * grid.spacing()).collect();
        let zetas = (0..n).map(|a| zeta[a] as f64 * grid.frequency_spacing()).collect();
        (zs, zetas)
    }
}

fn widths(grid: &GridSpec, sigma: (f64, f64)) -> (f64, f64) {
    let widen = (2.1 * grid.spacing() / sigma.0).max(1.0);
    (sigma.0 * widen, sigma.1 * widen)
}

fn rel_diff(a: &ModuleFunction, b: &ModuleFunction) -> opcalc::Result<f64> {
    Ok(a.sub(b)?.sup_norm() / b.sup_norm().max(f64::MIN_POSITIVE))
}

fn module_pairs(ctx: &Ctx, r: &mut ChaCha8Rng, count: usize) -> Vec<(ModuleFunction, ModuleFunction)> {
    (0..count).map(|_| (ctx.random_fn(r, ctx.grid, (0.5, 2.0)), ctx.random_fn(r, ctx.grid, (0.5, 2.0)))).collect()
}

fn module_hermitian(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (f, g) in module_pairs(ctx, r, 10) {
        let scale = module_norm(&f) * module_norm(&g);
        worst = worst.max(f.inner(&g)?.star().max_abs_diff(&g.inner(&f)?) / scale);
    }
    Ok(worst)
}

fn module_positivity(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (f, _) in module_pairs(ctx, r, 10) {
        worst = worst.max(f.inner(&f)?.positivity_defect() / module_norm(&f).powi(2));
    }
    Ok(worst)
}

fn module_right_linearity(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (f, g) in module_pairs(ctx, r, 10) {
        let a = random_element(r, ctx.k);
        let lhs = f.inner(&g.right_mul(&a))?;
        let rhs = &f.inner(&g)? * &a;
        worst = worst.max(lhs.max_abs_diff(&rhs) / (module_norm(&f) * module_norm(&g) * a.cnorm()));
    }
    Ok(worst)
}

/// Largest excess of `||<f, g>||` over `||f|| ||g||`, zero when the
/// inequality holds.
fn module_cauchy_schwarz(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (f, g) in module_pairs(ctx, r, 10) {
        worst = worst.max(f.inner(&g)?.cnorm() - module_norm(&f) * module_norm(&g));
    }
    Ok(worst)
}

fn module_norm_comparison(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (f, _) in module_pairs(ctx, r, 10) {
        worst = worst.max((f.norm() - f.l2_norm()) / f.l2_norm());
    }
    Ok(worst)
}

fn unit_gaussian(grid: GridSpec, k: usize) -> ModuleFunction {
    Field::closed(MatrixGaussian::centered(grid.n(), AlgebraElement::identity(k), 1.0)).sample(&grid).expect("matching grid")
}

fn fourier_fixed_point(ctx: &Ctx, _: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let g = unit_gaussian(ctx.grid, ctx.k);
    Ok(fourier(&g, Direction::Forward).sub(&unit_gaussian(ctx.grid.dual(), ctx.k))?.sup_norm())
}

fn fourier_unitarity(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (u, v) in module_pairs(ctx, r, 5) {
        let (fu, fv) = (fourier(&u, Direction::Forward), fourier(&v, Direction::Forward));
        worst = worst.max(fu.inner(&fv)?.max_abs_diff(&u.inner(&v)?) / (module_norm(&u) * module_norm(&v)));
    }
    Ok(worst)
}

fn fourier_plancherel(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (u, _) in module_pairs(ctx, r, 5) {
        let nu = module_norm(&u);
        worst = worst.max((module_norm(&fourier(&u, Direction::Forward)) - nu).abs() / nu);
    }
    Ok(worst)
}

fn fourier_round_trip(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (u, _) in module_pairs(ctx, r, 5) {
        worst = worst.max(fourier(&fourier(&u, Direction::Forward), Direction::Inverse).sub(&u)?.sup_norm());
    }
    Ok(worst)
}

/// Random lattice frequencies well below Nyquist.
fn lattice_frequency(ctx: &Ctx, r: &mut ChaCha8Rng) -> Vec<f64> {
    let reach = (ctx.grid.points() as i32 / 8).min(8);
    (0..ctx.n()).map(|_| r.gen_range(-reach..=reach) as f64 * ctx.grid.frequency_spacing()).collect()
}

fn plane_wave(ctx: &Ctx, p: &[f64]) -> ModuleFunction {
    Field::closed(TrigPolynomial::plane_wave(p.to_vec())).sample(&ctx.grid).expect("matching grid")
}

fn deformation_plane_waves(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (p, q) = (lattice_frequency(ctx, r), lattice_frequency(ctx, r));
        let pq: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a + b).collect();
        let expected = plane_wave(ctx, &pq).scale(Complex64::from_polar(1.0, -ctx.j.pairing(&p, &q)));
        let product = deformed_product(&Field::Sampled(plane_wave(ctx, &p)), &Field::Sampled(plane_wave(ctx, &q)), &ctx.j, &ctx.grid)?;
        worst = worst.max(rel_diff(&product, &expected)?);
    }
    Ok(worst)
}

fn deformation_exchange(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (p, q) = (lattice_frequency(ctx, r), lattice_frequency(ctx, r));
        let (ep, eq) = (Field::Sampled(plane_wave(ctx, &p)), Field::Sampled(plane_wave(ctx, &q)));
        let pq = deformed_product(&ep, &eq, &ctx.j, &ctx.grid)?;
        let qp = deformed_product(&eq, &ep, &ctx.j, &ctx.grid)?.scale(Complex64::from_polar(1.0, -2.0 * ctx.j.pairing(&p, &q)));
        worst = worst.max(rel_diff(&pq, &qp)?);
    }
    Ok(worst)
}

fn deformation_zero_form(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let mut worst: f64 = 0.0;
    for (f, g) in module_pairs(ctx, r, 3) {
        let p = deformed_product(&Field::Sampled(f.clone()), &Field::Sampled(g.clone()), &SkewForm::zero(ctx.n()), &ctx.grid)?;
        worst = worst.max(rel_diff(&p, &f.pointwise_mul(&g)?)?);
    }
    Ok(worst)
}

fn deformation_associativity(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let [f, g, h] = [(); 3].map(|_| Field::Sampled(ctx.random_fn(r, ctx.grid, (0.5, 0.7))));
    let fg = Field::Sampled(deformed_product(&f, &g, &ctx.j, &ctx.grid)?);
    let gh = Field::Sampled(deformed_product(&g, &h, &ctx.j, &ctx.grid)?);
    rel_diff(&deformed_product(&fg, &h, &ctx.j, &ctx.grid)?, &deformed_product(&f, &gh, &ctx.j, &ctx.grid)?)
}

fn deformation_actions_commute(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let [f, h] = [(); 2].map(|_| Field::Sampled(ctx.random_fn(r, ctx.grid, (0.5, 0.7))));
    let u = ctx.random_fn(r, ctx.grid, (0.5, 0.7));
    let lr = left_action(&f, &right_action(&h, &u, &ctx.j)?, &ctx.j)?;
    let rl = right_action(&h, &left_action(&f, &u, &ctx.j)?, &ctx.j)?;
    rel_diff(&lr, &rl)
}

fn deformation_left_adjoint(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let f = Field::closed(random_matrix_gaussian(r, ctx.n(), ctx.k, 2, widths(&ctx.grid, (0.6, 1.2)), 1.0));
    let (u, v) = (ctx.random_fn(r, ctx.grid, (0.8, 1.5)), ctx.random_fn(r, ctx.grid, (0.8, 1.5)));
    let lhs = left_action(&f, &u, &ctx.j)?.inner(&v)?;
    let rhs = u.inner(&left_action(&f.star(), &v, &ctx.j)?)?;
    Ok(lhs.max_abs_diff(&rhs) / (module_norm(&u) * module_norm(&v)))
}

/// `||L_em f - f|| / ||L_e1 f - f||` for a Gaussian that is wide on the box,
/// with `m <= 8` the largest power of two whose mollifier the grid resolves.
fn deformation_approximate_identity(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let last = [8u32, 4, 2]
        .into_iter()
        .find(|&m| 1.0 / m as f64 > ctx.grid.frequency_spacing())
        .ok_or_else(|| opcalc::Error::Resolution("the box is too small to resolve index 2 of the approximate identity".into()))?;
    let sigma = ctx.grid.half_width() / 10.0;
    let f = Field::closed(MatrixGaussian::centered(ctx.n(), random_element(r, ctx.k), sigma)).sample(&ctx.grid)?;
    let gap = |index: u32| -> opcalc::Result<f64> {
        let e = approximate_identity(index, ctx.k, &ctx.j, &ctx.grid)?;
        Ok(module_norm(&left_action(&Field::Sampled(e), &f, &ctx.j)?.sub(&f)?))
    };
    let first = gap(1)?;
    Ok(if first == 0.0 { 0.0 } else { gap(last)? / first })
}

/// A smooth symbol with genuine `x`-`xi` coupling.
fn coupled_symbol(ctx: &Ctx, r: &mut ChaCha8Rng) -> PhaseSymbol {
    let (c1, c2) = (random_element(r, ctx.k), random_element(r, ctx.k));
    PhaseSymbol::closed(FnSymbol::new(ctx.n(), ctx.k, move |x: &[f64], xi: &[f64]| {
        let x2: f64 = x.iter().map(|v| v * v).sum();
        let xi2: f64 = xi.iter().map(|v| v * v).sum();
        let w = 1.0 / (1.0 + 0.1 * xi2);
        let s = (-0.25 * (x[0] - 1.0).powi(2) - 0.25 * (x2 - x[0] * x[0])).exp() * xi[0].cos();
        &c1.scale(Complex64::new((-0.5 * x2).exp() * w, 0.0)) + &c2.scale(Complex64::new(s, 0.0))
    }))
}

fn quantization_identity(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let a = PhaseSymbol::closed(ConstantSymbol { n: ctx.n(), value: AlgebraElement::identity(ctx.k) });
    let u = ctx.random_fn(r, ctx.small, (1.5, 2.5));
    rel_diff(&pdo_apply(&a, &u)?, &u)
}

fn quantization_multiplication(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let m: Arc<dyn FieldFn> = Arc::new(random_matrix_gaussian(r, ctx.n(), ctx.k, 2, (1.5, 2.5), 1.0));
    let u = ctx.random_fn(r, ctx.small, (1.5, 2.5));
    let expected = Field::Closed(m.clone()).sample(&ctx.small)?.pointwise_mul(&u)?;
    rel_diff(&pdo_apply(&PhaseSymbol::closed(MultiplicationSymbol(m)), &u)?, &expected)
}

fn quantization_adjoint(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let a = coupled_symbol(ctx, r);
    let p = PhaseSymbol::Sampled(adjoint_symbol(&a, &ctx.small)?);
    let (u, v) = (ctx.random_fn(r, ctx.small, (1.0, 2.0)), ctx.random_fn(r, ctx.small, (1.0, 2.0)));
    let lhs = pdo_apply(&a, &u)?.inner(&v)?;
    let rhs = u.inner(&pdo_apply(&p, &v)?)?;
    Ok(lhs.max_abs_diff(&rhs) / (module_norm(&u) * module_norm(&v)))
}

fn quantization_kernel(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let a = coupled_symbol(ctx, r);
    let u = ctx.random_fn(r, ctx.small, (1.0, 2.0));
    rel_diff(&symbol_to_kernel(&a, &ctx.small)?.apply(&u)?, &pdo_apply(&a, &u)?)
}

fn quantization_identity_norm(ctx: &Ctx, _: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let one = PhaseSymbol::closed(ConstantSymbol { n: ctx.n(), value: AlgebraElement::identity(1) });
    let e = operator_norm_estimate(&OperatorHandle::Pdo(one), &ctx.small, 1, 4, ctx.config.seed)?;
    Ok((e.estimate - 1.0).abs())
}

fn heisenberg_unitarity(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let (z, zeta) = ctx.lattice_shift(&ctx.grid, [3, -2], [2, 1]);
    let e = HeisenbergPoint::new(z, zeta, 0.9)?;
    let (u, v) = (ctx.random_fn(r, ctx.grid, (0.8, 1.2)), ctx.random_fn(r, ctx.grid, (0.8, 1.2)));
    let moved = weyl_shift(&u, &e)?.inner(&weyl_shift(&v, &e)?)?;
    Ok(moved.max_abs_diff(&u.inner(&v)?) / (module_norm(&u) * module_norm(&v)))
}

fn heisenberg_inverse(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let (z, zeta) = ctx.lattice_shift(&ctx.grid, [-1, 4], [3, -2]);
    let e = HeisenbergPoint::new(z, zeta, -0.3)?;
    let u = ctx.random_fn(r, ctx.grid, (0.8, 1.2));
    rel_diff(&weyl_shift_inverse(&weyl_shift(&u, &e)?, &e)?, &u)
}

fn heisenberg_intertwining(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let (z, zeta) = ctx.lattice_shift(&ctx.grid, [3, -2], [2, 1]);
    let g = ctx.random_fn(r, ctx.grid, (0.8, 1.2));
    let u = ctx.random_fn(r, ctx.grid, (0.8, 1.2));
    let it = intertwine_check(&z, &zeta, &g, &ctx.j, &u)?;
    Ok(it.fourier_forward.max(it.fourier_inverse).max(it.right_action) / module_norm(&u))
}

/// Uses a symbol periodic on the phase grid, so that shifting `xi` past the
/// edge of the dual box agrees with the periodic wrap of the discrete
/// operator.
fn heisenberg_symbol_shift(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let (dx, dxi) = (ctx.small.frequency_spacing(), ctx.small.spacing());
    let reach = (ctx.small.points() as i32 / 8).min(3);
    let modes = (0..4)
        .map(|_| {
            let p = (0..ctx.n()).map(|_| r.gen_range(-reach..=reach) as f64 * dx).collect();
            let q = (0..ctx.n()).map(|_| r.gen_range(-reach..=reach) as f64 * dxi).collect();
            (p, q, random_element(r, ctx.k))
        })
        .collect();
    let a = PhaseSymbol::closed(TrigSymbol::new(ctx.n(), ctx.k, modes));
    let (z, zeta) = ctx.lattice_shift(&ctx.small, [2, -1], [1, 2]);
    let u = ctx.random_fn(r, ctx.small, (1.0, 2.0));
    let conj = conjugate_operator(&OperatorHandle::Pdo(a.clone()), &z, &zeta, 0.4)?.apply(&u)?;
    rel_diff(&conj, &pdo_apply(&shifted_symbol(&a, &z, &zeta)?, &u)?)
}

fn heisenberg_translation_reduction(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let f = Field::closed(random_matrix_gaussian(r, ctx.n(), ctx.k, 2, widths(&ctx.grid, (0.7, 1.2)), 1.0));
    let t = OperatorHandle::left(f, ctx.j.clone());
    let (z, zeta) = ctx.lattice_shift(&ctx.grid, [2, 1], [1, -1]);
    let u = ctx.random_fn(r, ctx.grid, (0.8, 1.2));
    Ok(translation_reduction_residual(&t, &z, &zeta, &ctx.j, &u)? / module_norm(&u))
}

/// Band-limited field whose frequencies lie on the lattice of `grid`.
fn lattice_trig(ctx: &Ctx, r: &mut ChaCha8Rng, grid: &GridSpec, modes: usize) -> opcalc::families::TrigPolynomial {
    let reach = (grid.points() as i64 / 8).min(3);
    random_trig(r, ctx.n(), ctx.k, modes, grid.frequency_spacing(), reach)
}

fn calculus_poisson(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let pg = PhaseGrid::operator(ctx.self_dual);
    let f: Arc<dyn FieldFn> = Arc::new(lattice_trig(ctx, r, &ctx.self_dual, 4));
    let g: Arc<dyn FieldFn> = Arc::new(lattice_trig(ctx, r, &ctx.self_dual, 4));
    let a = PhaseSymbol::Sampled(SampledSymbol::from_closed(&TranslationSymbol::left(f, ctx.j.clone()), pg));
    let b = PhaseSymbol::Sampled(SampledSymbol::from_closed(&TranslationSymbol::right(g, ctx.j.clone()), pg));
    let scale = pi_seminorm(&a, &pg)? * pi_seminorm(&b, &pg)?;
    Ok(poisson_bracket(&a, &b, &pg)?.sup_norm() / scale)
}

fn calculus_gamma_reproduce(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let kernel = GammaKernel::default();
    let g = random_matrix_gaussian(r, ctx.n(), ctx.k, 2, (0.8, 1.5), 0.5);
    let at_origin = Field::closed(g.clone()).evaluator().eval(&vec![0.0; ctx.n()]);
    let gauss = gamma_reproduce(&g, &kernel)?.max_abs_diff(&at_origin);
    let mut p = vec![0.0; ctx.n()];
    p[0] = 1.0;
    let wave = (gamma_reproduce(&TrigPolynomial::plane_wave(p), &kernel)?.get(0, 0) - Complex64::new(1.0, 0.0)).norm();
    Ok(gauss.max(wave))
}

fn calculus_gamma_round_trip(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let pg = PhaseGrid::operator(ctx.self_dual);
    let (dx, dxi) = (ctx.self_dual.frequency_spacing(), ctx.self_dual.spacing());
    let reach = (ctx.self_dual.points() as i32 / 8).min(3);
    let modes = (0..4)
        .map(|_| {
            let p = (0..ctx.n()).map(|_| r.gen_range(-reach..=reach) as f64 * dx).collect();
            let q = (0..ctx.n()).map(|_| r.gen_range(-reach..=reach) as f64 * dxi).collect();
            (p, q, random_element(r, ctx.k))
        })
        .collect();
    let a = PhaseSymbol::closed_with(TrigSymbol::new(ctx.n(), ctx.k, modes), DerivativeScheme::Spectral);
    let truth = a.sample(&pg)?;
    let b = PhaseSymbol::Sampled(b_transform(&a, &pg)?);
    let rebuilt = gamma_reconstruct(&b, &pg, &GammaKernel::default())?;
    Ok(rebuilt.sub(&truth)?.sup_norm() / truth.sup_norm())
}

fn pipeline(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<(opcalc::calculus::PipelineReport, ModuleFunction)> {
    let grid = ctx.self_dual;
    let f = lattice_trig(ctx, r, &grid, 5);
    let truth = Field::closed(f.clone()).sample(&grid)?;
    let t = OperatorHandle::left(Field::closed(f), ctx.j.clone());
    let shifts = vec![ctx.lattice_shift(&grid, [2, -1], [1, 3]), ctx.lattice_shift(&grid, [0, 5], [-2, 0])];
    let report = rieffel_pipeline(&t, ctx.k, &ctx.j, &PhaseGrid::operator(grid), &shifts, &GammaKernel::default())?;
    Ok((report, truth))
}

fn rieffel_recovery(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let (report, truth) = pipeline(ctx, r)?;
    Ok(report.recovery.f.sub(&truth)?.sup_norm())
}

fn rieffel_shift_invariance(ctx: &Ctx, r: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    Ok(pipeline(ctx, r)?.0.shift_invariance)
}

/// Residual of the best translation-symbol fit, as a fraction of the
/// symbol's size: bounded away from zero when the symbol is rejected.
fn rieffel_counterexample(ctx: &Ctx, _: &mut ChaCha8Rng) -> opcalc::Result<f64> {
    let a = PhaseSymbol::closed(TrigSymbol::sin_sin(ctx.n(), 0, ctx.n() - 1));
    let fit = recover_translation_symbol(&a, &ctx.j, &PhaseGrid::operator(ctx.small))?;
    Ok(fit.residual / fit.scale)
}
