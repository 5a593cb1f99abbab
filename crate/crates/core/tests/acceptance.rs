//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line with the
//! measured quantities before asserting.

use std::f64::consts::TAU;
use std::time::Instant;

use circlefol::bootstrap::{continue_family, initial_guess, BootstrapConfig, ContinuationConfig, RegistryFamily};
use circlefol::cohomology::{
    cocycle_product, cohomological_residual, dynamical_average, partial_sum_doubling,
    reduce_lambda_rotation, regularity_bound, solve_cohomological, solve_cohomological_with,
    CohomologyOptions,
};
use circlefol::models::{ForcedOscillatorModel, LinearModel, MapModel, SkewModel, GOLDEN_MEAN};
use circlefol::newton::{compute_corrections, compute_error, newton_step, residual_norm};
use circlefol::{solve, CircleMap, ConjugacyTriple, ModelRegistry, Params, PeriodicFunction, SolverConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {id:>2} {name}: {detail}");
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn random_trig(rng: &mut ChaCha8Rng, n: usize, degree: usize, amp: f64) -> PeriodicFunction {
    let coefs: Vec<(f64, f64)> = (0..=degree).map(|_| (rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))).collect();
    PeriodicFunction::from_fn(n, move |t| {
        coefs
            .iter()
            .enumerate()
            .map(|(k, (c, s))| c * (TAU * k as f64 * t).cos() + if k > 0 { s * (TAU * k as f64 * t).sin() } else { 0.0 })
            .sum()
    })
}

fn random_circle_map(rng: &mut ChaCha8Rng, n: usize) -> CircleMap {
    let omega = rng.gen_range(0.0..1.0);
    let amp = rng.gen_range(0.0..0.03);
    let phase = rng.gen_range(0.0..1.0);
    CircleMap::new(PeriodicFunction::from_fn(n, move |t| omega + amp * (TAU * (t + phase)).sin()))
}

/// `l` with `0 < l < 0.95` on the circle.
fn random_twist(rng: &mut ChaCha8Rng, n: usize) -> PeriodicFunction {
    let base = rng.gen_range(0.1..0.8);
    let amp = rng.gen_range(0.0..0.15f64).min(0.94 - base);
    let phase = rng.gen_range(0.0..1.0);
    PeriodicFunction::from_fn(n, move |t| base + amp * (TAU * (t + phase)).cos())
}

#[test]
fn criterion_01_exactness() {
    let start = Instant::now();
    let f = LinearModel::new(0.3, 0.5);
    let u = ConjugacyTriple::linear_exact(64, 8, 0.3, 0.5, 0.3);
    let e = compute_error(&f, &u).unwrap();
    let res = e.norm(0.0, u.delta).unwrap();
    let c = compute_corrections(&u, &e, &SolverConfig::default()).unwrap();
    let corr = c.delta_w.norm(0.0, u.delta).unwrap().max(c.delta_a.sup_norm()).max(c.delta_lambda.sup_norm());
    let (_, diag) = newton_step(&f, &u, &SolverConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = res < 1e-13 && corr < 1e-12 && diag.delta_w_norm < 1e-12 && secs < 1.0;
    verdict(1, "exactness", ok, format!("residual {res:.2e}, corrections {corr:.2e}, {secs:.3}s"));
}

#[test]
fn criterion_02_quadratic_convergence() {
    let f = LinearModel::new(0.3, 0.5);
    let n = 32;
    let cfg = SolverConfig::default();
    let mut pairs = Vec::new();
    for h in [1e-2, 1e-3, 1e-4] {
        // W₂ = h·cos 2πθ + (1 + h·sin 2πθ)s + h·cos 2πθ·s²
        let mut u = ConjugacyTriple::linear_exact(n, 6, 0.3, 0.5, 0.3);
        u.w.0[1].set_coeff(0, PeriodicFunction::cos_mode(n, 1, h));
        u.w.0[1].set_coeff(1, PeriodicFunction::sin_mode(n, 1, h).add_constant(1.0));
        u.w.0[1].set_coeff(2, PeriodicFunction::cos_mode(n, 1, h));
        let mut prev = residual_norm(&f, &u).unwrap();
        for _ in 0..6 {
            u = newton_step(&f, &u, &cfg).unwrap().0;
            let next = residual_norm(&f, &u).unwrap();
            if next < 1e-13 {
                break;
            }
            pairs.push((prev.ln(), next.ln()));
            prev = next;
        }
    }
    let m = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let ok = pairs.len() >= 3 && (1.7..=2.3).contains(&slope);
    verdict(2, "quadratic convergence", ok, format!("slope {slope:.3} from {} step pairs", pairs.len()));
}

#[test]
fn criterion_03_cohomology_solver() {
    let n = 32;
    let l = PeriodicFunction::from_fn(n, |t| 0.7 + 0.1 * (TAU * t).cos());
    let a = CircleMap::new(PeriodicFunction::from_fn(n, |t| GOLDEN_MEAN + 0.02 * (TAU * t).sin()));
    let eta = PeriodicFunction::from_fn(n, |t| (TAU * t).sin() + 0.3 * (2.0 * TAU * t).cos());
    let (s, rounds) = partial_sum_doubling(&l, &a, &eta, 64).unwrap();
    let mut naive = PeriodicFunction::zeros(n);
    let mut lj = PeriodicFunction::constant(n, 1.0);
    let mut aj = CircleMap::identity(n);
    for _ in 0..64 {
        naive = &naive + &(&lj * &eta.compose(&aj));
        lj = &lj * &l.compose(&aj);
        aj = a.after(&aj);
    }
    let doubling_err = (&s - &naive).sup_norm();

    let omega = 0.234;
    let phi = solve_cohomological(
        &PeriodicFunction::constant(n, 0.5),
        &CircleMap::rotation(n, omega),
        &PeriodicFunction::cos_mode(n, 1, 1.0),
        1e-12,
    )
    .unwrap();
    let z = Complex64::new(1.0, 0.0) - Complex64::from_polar(0.5, TAU * omega);
    let closed_err = (0..200)
        .map(|i| {
            let t = i as f64 / 200.0;
            (phi.eval(t) - (Complex64::from_polar(1.0, TAU * t) / z).re).abs()
        })
        .fold(0.0, f64::max);

    // 32 modes do not resolve φ∘a for the random maps; 64 do
    let tol = 1e-12;
    let opts = CohomologyOptions { tol, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let l = random_twist(&mut rng, 64);
        let a = random_circle_map(&mut rng, 64);
        let eta = random_trig(&mut rng, 64, 4, 1.0);
        let sol = solve_cohomological_with(&l, &a, &eta, &opts).unwrap();
        worst = worst.max(cohomological_residual(&l, &a, &eta, &sol.phi));
    }
    let ok = doubling_err < 1e-12 && rounds <= 7 && closed_err < 1e-12 && worst <= tol;
    verdict(
        3,
        "cohomology solver",
        ok,
        format!(
            "doubling vs naive {doubling_err:.2e} in {rounds} rounds, closed form {closed_err:.2e}, worst random residual {worst:.2e}"
        ),
    );
}

#[test]
fn criterion_04_cocycle_laws() {
    let n = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let l = random_twist(&mut rng, n);
        let a = random_circle_map(&mut rng, n);
        for (j, k) in [(1, 1), (3, 5), (8, 8)] {
            let lhs = cocycle_product(&l, &a, j + k);
            let rhs = &cocycle_product(&l, &a, j).compose(&a.iterate(k)) * &cocycle_product(&l, &a, k);
            worst = worst.max((&lhs - &rhs).sup_norm());
        }
    }
    verdict(4, "cocycle laws", worst < 1e-11, format!("max deviation {worst:.2e}"));
}

#[test]
fn criterion_05_skew_product_end_to_end() {
    let start = Instant::now();
    let n = 256;
    // ‖Dα‖ = 1 + 2πc = 2^{1/3}, so −ln l / ln‖Dα‖ = 3
    let c = (2f64.powf(1.0 / 3.0) - 1.0) / TAU;
    let f = SkewModel::new(GOLDEN_MEAN, c, 0.5, 0.1, 0.05);
    let cfg = BootstrapConfig { n_modes: n, order: 10, ..Default::default() };
    let u0 = initial_guess(&f, &cfg).unwrap();
    let out = solve(&f, &u0, &SolverConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();

    // invariant graph y = φ(x): φ = l·φ∘α⁻¹ + η∘α⁻¹
    let alpha = CircleMap::new(PeriodicFunction::from_fn(n, |x| f.alpha(x) - x));
    let alpha_inv = alpha.invert().unwrap();
    let eta = PeriodicFunction::from_fn(n, |x| f.eta(x));
    let phi = solve_cohomological(&PeriodicFunction::constant(n, 0.5), &alpha_inv, &eta.compose(&alpha_inv), 1e-14)
        .unwrap();
    let u = &out.triple;
    let (k1, k2) = (u.w.0[0].coeff(0), u.w.0[1].coeff(0));
    let err = (0..2048)
        .map(|i| {
            let t = i as f64 / 2048.0;
            (k2.eval(t) - phi.eval(t + k1.eval(t))).abs()
        })
        .fold(0.0, f64::max);
    let r_max = regularity_bound(&PeriodicFunction::constant(n, 0.5), &alpha).unwrap();
    let ok = err < 1e-8 && secs < 10.0 && (r_max - 3.0).abs() < 0.05;
    verdict(
        5,
        "skew product end to end",
        ok,
        format!(
            "graph error {err:.2e}, r_max {r_max:.3}, {} iterations, residual {:.2e}, {secs:.2}s",
            out.iterations(),
            out.residual
        ),
    );
}

#[test]
fn criterion_06_isochron_contraction() {
    let f = ForcedOscillatorModel::new(GOLDEN_MEAN, 0.5, 0.02, 0.1, 0.1);
    let cfg = BootstrapConfig { n_modes: 64, order: 8, ..Default::default() };
    let u0 = initial_guess(&f, &cfg).unwrap();
    let out = solve(&f, &u0, &SolverConfig::default()).unwrap();
    let u = &out.triple;
    let lambda_star = dynamical_average(&u.lambda, &u.a, 64).unwrap();
    let rate = lambda_star + 0.05;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut c_fit = 0.0f64;
    for _ in 0..100 {
        let theta = rng.gen_range(0.0..1.0);
        let s = rng.gen_range(0.01..u.delta) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut p = u.w.eval(theta, s);
        let mut q = u.w.eval(theta, 0.0);
        for n in 1..=20 {
            let (px, py) = f.eval(p[0], p[1]).unwrap();
            let (qx, qy) = f.eval(q[0], q[1]).unwrap();
            p = [px, py];
            q = [qx, qy];
            let dist = (px - qx).hypot(py - qy);
            c_fit = c_fit.max(dist / (rate.powi(n) * s.abs()));
        }
    }
    verdict(
        6,
        "isochron contraction",
        c_fit < 10.0,
        format!("fitted C {c_fit:.3} with lambda* {lambda_star:.4}, residual {:.2e}", out.residual),
    );
}

#[test]
fn criterion_07_aposteriori_distance() {
    let f = LinearModel::new(0.3, 0.5);
    let n = 32;
    let mut ratios = Vec::new();
    for shape in 0..5 {
        for h in [1e-2, 1e-3, 1e-4] {
            let mut u0 = ConjugacyTriple::linear_exact(n, 6, 0.3, 0.5, 0.3);
            match shape {
                0 => u0.w.0[1].set_coeff(0, PeriodicFunction::cos_mode(n, 1, h)),
                1 => {
                    u0.w.0[1].set_coeff(0, PeriodicFunction::cos_mode(n, 1, h));
                    u0.w.0[1].set_coeff(1, PeriodicFunction::sin_mode(n, 1, h).add_constant(1.0));
                    u0.w.0[1].set_coeff(2, PeriodicFunction::cos_mode(n, 1, h));
                }
                2 => u0.lambda = &u0.lambda + &PeriodicFunction::cos_mode(n, 1, h),
                3 => u0.w.0[0].set_coeff(0, PeriodicFunction::sin_mode(n, 1, h)),
                _ => u0.a = CircleMap::new(u0.a.periodic_part() + &PeriodicFunction::cos_mode(n, 1, h)),
            }
            let e0 = residual_norm(&f, &u0).unwrap();
            let out = solve(&f, &u0, &SolverConfig::default()).unwrap();
            ratios.push(out.triple.distance(&u0, 2.0).unwrap() / e0);
        }
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    verdict(
        7,
        "a-posteriori distance bound",
        max / min < 10.0,
        format!("C in [{min:.2}, {max:.2}] over {} guesses, spread {:.2}", ratios.len(), max / min),
    );
}

#[test]
fn criterion_08_lambda_reduction() {
    let n = 64;
    let g = |t: f64| 0.2 * (TAU * t).sin();
    let lambda = PeriodicFunction::from_fn(n, |t| 0.5 * (g(t) - g(t + GOLDEN_MEAN)).exp());
    let (bar, r) = reduce_lambda_rotation(&lambda, GOLDEN_MEAN, 1e-10).unwrap();
    let residual = (0..1000)
        .map(|i| {
            let t = i as f64 / 1000.0;
            (r.eval(t + GOLDEN_MEAN) * lambda.eval(t) / r.eval(t) - bar).abs()
        })
        .fold(0.0, f64::max);
    let ok = residual < 1e-10 && (bar - 0.5).abs() < 1e-12;
    verdict(8, "lambda reduction", ok, format!("lambda_bar {bar:.15}, conjugation residual {residual:.2e}"));
}

#[test]
fn criterion_09_reparameterization_invariance() {
    let f = ForcedOscillatorModel::new(GOLDEN_MEAN, 0.5, 0.02, 0.1, 0.1);
    let cfg = BootstrapConfig { n_modes: 64, order: 8, ..Default::default() };
    let out = solve(&f, &initial_guess(&f, &cfg).unwrap(), &SolverConfig::default()).unwrap();
    let r0 = residual_norm(&f, &out.triple).unwrap();
    let mut worst = 0.0f64;
    for c in [0.137, -0.41, 0.5, GOLDEN_MEAN] {
        let r = residual_norm(&f, &out.triple.shifted(c)).unwrap();
        worst = worst.max((r - r0).abs());
    }
    verdict(
        9,
        "reparameterization invariance",
        worst < 1e-10,
        format!("residual {r0:.2e}, max change under shifts {worst:.2e}"),
    );
}

#[test]
fn criterion_10_continuation_sweep() {
    let start = Instant::now();
    let family = RegistryFamily {
        registry: ModelRegistry::builtin(),
        model: "linear".into(),
        base: Params::new().with("omega", 0.3),
        parameter: "b".into(),
    };
    let f0 = LinearModel::new(0.3, 0.3);
    let u0 = initial_guess(&f0, &BootstrapConfig::default()).unwrap();
    let cfg = ContinuationConfig { step: 0.05, ..Default::default() };
    let points = continue_family(&family, &u0, 0.3, 0.8, &cfg, &SolverConfig::default(), |_| Ok(())).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let max_iters = points.iter().map(|p| p.outcome.iterations()).max().unwrap();
    let last = points.last().unwrap().parameter;
    let ok = points.len() == 11 && max_iters <= 4 && (last - 0.8).abs() < 1e-12 && secs < 30.0;
    verdict(
        10,
        "continuation sweep",
        ok,
        format!("{} points up to b = {last:.2}, max {max_iters} iterations, {secs:.2}s", points.len()),
    );
}

