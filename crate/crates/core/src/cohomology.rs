//! Twisted cohomological equations `φ = l·(φ∘a) + η` over circle maps.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{CircleMap, PeriodicFunction};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_K_MAX: usize = 64;
const DEFAULT_MAX_ROUNDS: usize = 60;
const SMALL_DIVISOR: f64 = 1e-10;

/// `l^{[k]}(θ) = l(θ)·l(a(θ))···l(a^{∘(k−1)}(θ))`, with `l^{[0]} = 1`.
///
/// Built by binary doubling from the cocycle law
/// `l^{[j+k]} = l^{[j]}∘a^{∘k} · l^{[k]}`.
pub fn cocycle_product(l: &PeriodicFunction, a: &CircleMap, k: usize) -> PeriodicFunction {
    let n = l.n_modes();
    let mut prod = PeriodicFunction::constant(n, 1.0);
    let mut shift = CircleMap::identity(n);
    let mut base = l.clone();
    let mut base_map = a.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            prod = &base.compose(&shift) * &prod;
            shift = base_map.after(&shift);
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base.compose(&base_map);
            base_map = base_map.after(&base_map);
        }
    }
    prod
}

/// `(‖λ^{[n]}‖_{C⁰})^{1/n}`.
pub fn dynamical_average(lambda: &PeriodicFunction, a: &CircleMap, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("dynamical average needs n >= 1".into()));
    }
    Ok(cocycle_product(lambda, a, n).sup_norm().powf(1.0 / n as f64))
}

/// Doubling state: `l^{[k]}`, `a^{∘k}` and `S_k = Σ_{j<k} l^{[j]}·η∘a^{∘j}`.
#[derive(Debug, Clone)]
pub struct CocycleState {
    pub l_k: PeriodicFunction,
    pub a_k: CircleMap,
    pub s_k: PeriodicFunction,
    pub k: usize,
}

impl CocycleState {
    pub fn new(l: &PeriodicFunction, a: &CircleMap, eta: &PeriodicFunction) -> Self {
        Self { l_k: l.clone(), a_k: a.clone(), s_k: eta.clone(), k: 1 }
    }

    /// `k → 2k`.
    pub fn double(&mut self) {
        let s_shift = self.s_k.compose(&self.a_k);
        let l_shift = self.l_k.compose(&self.a_k);
        self.s_k = &self.s_k + &(&self.l_k * &s_shift);
        self.l_k = &self.l_k * &l_shift;
        self.a_k = self.a_k.after(&self.a_k);
        self.k *= 2;
    }
}

/// Partial sum `S_M` for `M` a power of two, returning the number of
/// doubling rounds used.
pub fn partial_sum_doubling(
    l: &PeriodicFunction,
    a: &CircleMap,
    eta: &PeriodicFunction,
    m: usize,
) -> Result<(PeriodicFunction, usize)> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::InvalidInput(format!("term count {m} is not a power of two")));
    }
    let mut st = CocycleState::new(l, a, eta);
    let mut rounds = 0;
    while st.k < m {
        st.double();
        rounds += 1;
    }
    Ok((st.s_k, rounds))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohomologyOptions {
    /// Target for the C⁰ residual.
    pub tol: f64,
    /// Largest `k` tried when looking for `‖l^{[k]}‖ < 1`.
    pub k_max: usize,
    pub max_rounds: usize,
}

impl Default for CohomologyOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, k_max: DEFAULT_K_MAX, max_rounds: DEFAULT_MAX_ROUNDS }
    }
}

#[derive(Debug, Clone)]
pub struct CohomologySolution {
    pub phi: PeriodicFunction,
    /// Doubling rounds performed.
    pub rounds: usize,
    /// Number of terms summed.
    pub terms: usize,
    /// Grid sup of `φ − l·(φ∘a) − η`.
    pub residual: f64,
}

/// Solves `φ = l·(φ∘a) + η` by summing `Σ_j l^{[j]}·η∘a^{∘j}` with doubling.
///
/// Summation stops once `‖l^{[K]}‖·‖η‖/(1 − ‖l^{[K]}‖)` falls below the
/// tolerance; the residual of `S_K` is exactly `−l^{[K]}·η∘a^{∘K}`.
pub fn solve_cohomological_with(
    l: &PeriodicFunction,
    a: &CircleMap,
    eta: &PeriodicFunction,
    opts: &CohomologyOptions,
) -> Result<CohomologySolution> {
    let eta_norm = eta.sup_norm();
    let mut st = CocycleState::new(l, a, eta);
    let mut rounds = 0;
    let mut contracting = false;
    let mut best = f64::INFINITY;
    let target = 0.25 * opts.tol;
    loop {
        let lk = st.l_k.sup_norm();
        best = best.min(lk);
        if lk < 1.0 {
            contracting = true;
            let tail = lk * eta_norm / (1.0 - lk);
            if tail < target || eta_norm == 0.0 {
                break;
            }
        } else if !contracting && st.k >= opts.k_max {
            return Err(Error::NotContracting { norm: best });
        }
        if !lk.is_finite() {
            return Err(Error::NoConvergence("cocycle product overflowed".into()));
        }
        if rounds >= opts.max_rounds {
            return Err(Error::NoConvergence(format!(
                "cohomological sum: tail bound {:.3e} after {rounds} doubling rounds",
                lk * eta_norm / (1.0 - lk).max(f64::MIN_POSITIVE)
            )));
        }
        st.double();
        rounds += 1;
    }
    let phi = st.s_k;
    let residual = cohomological_residual(l, a, eta, &phi);
    Ok(CohomologySolution { phi, rounds, terms: st.k, residual })
}

pub fn solve_cohomological(
    l: &PeriodicFunction,
    a: &CircleMap,
    eta: &PeriodicFunction,
    tol: f64,
) -> Result<PeriodicFunction> {
    let opts = CohomologyOptions { tol, ..Default::default() };
    Ok(solve_cohomological_with(l, a, eta, &opts)?.phi)
}

/// Grid sup of `φ − l·(φ∘a) − η`.
pub fn cohomological_residual(
    l: &PeriodicFunction,
    a: &CircleMap,
    eta: &PeriodicFunction,
    phi: &PeriodicFunction,
) -> f64 {
    let r = &(phi - &(l * &phi.compose(a))) - eta;
    r.sup_norm()
}

/// Reduces `λ` over the rotation `θ ↦ θ + ω` to the constant
/// `λ̄ = exp ∫ log λ`: returns `(λ̄, r)` with `r(θ+ω)·λ(θ)/r(θ) = λ̄`.
///
/// `log r` solves `log r(θ+ω) − log r(θ) = log λ̄ − log λ(θ)` by Fourier
/// division, normalized to zero mean.
pub fn reduce_lambda_rotation(
    lambda: &PeriodicFunction,
    omega: f64,
    tol: f64,
) -> Result<(f64, PeriodicFunction)> {
    let min = lambda.grid_min();
    if !(min > 0.0) {
        return Err(Error::NonPositiveLambda { min });
    }
    let n = lambda.n_modes();
    let log_l = lambda.map_grid(f64::ln);
    let lambda_bar = log_l.mean().exp();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    for (k, (c, lk)) in coeffs.iter_mut().zip(log_l.coeffs()).enumerate().skip(1) {
        let divisor = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, TAU * k as f64 * omega);
        if divisor.norm() < SMALL_DIVISOR {
            return Err(Error::SmallDivisorOverflow { mode: k, divisor: divisor.norm() });
        }
        *c = lk / divisor;
    }
    let r = PeriodicFunction::from_coeffs(coeffs)?.map_grid(f64::exp);
    let rot = CircleMap::rotation(n, omega);
    let check = r.compose(&rot).zip_grid(lambda, |x, y| x * y).zip_grid(&r, |x, y| x / y);
    let residual = check.add_constant(-lambda_bar).sup_norm();
    if !(residual < tol) {
        return Err(Error::NoConvergence(format!(
            "lambda reduction residual {residual:.3e} exceeds {tol:.1e}"
        )));
    }
    Ok((lambda_bar, r))
}

/// `−ln‖l‖ / ln‖Da‖` from precomputed C⁰ norms; `+∞` when `‖Da‖ ≤ 1`.
pub fn regularity_bound_from_norms(l_norm: f64, da_norm: f64) -> Result<f64> {
    if !(l_norm < 1.0) {
        return Err(Error::NotContracting { norm: l_norm });
    }
    if da_norm <= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-l_norm.ln() / da_norm.ln())
}

/// Largest `r` with `‖Da‖^r‖l‖ < 1`.
pub fn regularity_bound(l: &PeriodicFunction, a: &CircleMap) -> Result<f64> {
    regularity_bound_from_norms(l.sup_norm(), a.derivative().sup_norm())
}
