//! Quasi-Newton solver for `f∘W(θ, s) = W(a(θ), λ(θ)s)`.
//!
//! Each step writes the correction in the frame `DW`, `Δ_W = DW·Γ`, and
//! solves the resulting triangular hierarchy of cohomological equations
//! order by order in `s`, with the graph-style gauge `Γ₁⁽⁰⁾ = 0`, `Γ₂⁽¹⁾ = 0`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{solve_cohomological_with, CohomologyOptions};
use crate::error::{Error, Result};
use crate::fourier::{CircleMap, PeriodicFunction};
use crate::models::{apply_map_jet, MapModel};
use crate::taylor::{FourierTaylor, FtPair};

pub const DEFAULT_FRAME_THRESHOLD: f64 = 1e-8;
pub const DIVISION_FLOOR: f64 = 1e-10;

/// The unknown `u = (W, a, λ)` plus the radius `δ` of the `s`-disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyTriple {
    pub w: FtPair,
    pub a: CircleMap,
    pub lambda: PeriodicFunction,
    pub delta: f64,
}

impl ConjugacyTriple {
    /// Builds a triple and checks it is admissible.
    pub fn new(w: FtPair, a: CircleMap, lambda: PeriodicFunction, delta: f64) -> Result<Self> {
        let u = Self { w, a, lambda, delta };
        u.check_structure()?;
        u.check_admissible()?;
        Ok(u)
    }

    /// `W = (θ, s)`, `a = θ + ω`, `λ ≡ b`: the exact solution of the linear model.
    pub fn linear_exact(n_modes: usize, order: usize, omega: f64, b: f64, delta: f64) -> Self {
        Self {
            w: FtPair([FourierTaylor::angle(n_modes, order), FourierTaylor::variable(n_modes, order)]),
            a: CircleMap::rotation(n_modes, omega),
            lambda: PeriodicFunction::constant(n_modes, b),
            delta,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.w.n_modes()
    }

    pub fn order(&self) -> usize {
        self.w.order()
    }

    /// Windings, matching orders and mode counts.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.n_modes();
        if self.w.0[0].winding() != 1 || self.w.0[1].winding() != 0 {
            return Err(Error::InvalidInput(
                "embedding must have windings (1, 0)".into(),
            ));
        }
        if self.w.0[1].order() != self.w.0[0].order() {
            return Err(Error::OrderMismatch { left: self.w.0[0].order(), right: self.w.0[1].order() });
        }
        for m in [self.w.0[1].n_modes(), self.a.n_modes(), self.lambda.n_modes()] {
            if m != n {
                return Err(Error::ModeMismatch { left: n, right: m });
            }
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidInput(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }

    /// `‖λ‖ < 1` and `a` a diffeomorphism.
    pub fn check_admissible(&self) -> Result<()> {
        let min_da = self.a.min_derivative();
        if !(min_da > 0.0) {
            return Err(Error::NotADiffeomorphism { min_derivative: min_da });
        }
        let lam = self.lambda.sup_norm();
        if !(lam < 1.0) {
            return Err(Error::NotContracting { norm: lam });
        }
        Ok(())
    }

    /// The triple reparameterized by `θ ↦ θ + c`:
    /// `W(θ + c, s)`, `a(θ + c) − c`, `λ(θ + c)`.
    pub fn shifted(&self, c: f64) -> Self {
        let shift = |u: &FourierTaylor| {
            let mut coeffs: Vec<PeriodicFunction> = u.coeffs().iter().map(|f| f.translate(c)).collect();
            coeffs[0] = coeffs[0].add_constant(u.winding() as f64 * c);
            FourierTaylor::new(coeffs, u.winding()).expect("shift keeps structure")
        };
        Self {
            w: FtPair([shift(&self.w.0[0]), shift(&self.w.0[1])]),
            a: CircleMap::new(self.a.periodic_part().translate(c)),
            lambda: self.lambda.translate(c),
            delta: self.delta,
        }
    }

    /// `X^{r,δ}` distance summed over `W₁, W₂, a, λ` (periodic parts).
    pub fn distance(&self, other: &Self, r: f64) -> Result<f64> {
        let dw = (&self.w - &other.w).norm(r, self.delta)?;
        let da = (self.a.periodic_part() - other.a.periodic_part()).holder_norm(r)?;
        let dl = (&self.lambda - &other.lambda).holder_norm(r)?;
        Ok(dw + da + dl)
    }
}

/// Smoothing cutoffs applied to the corrections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Schedule {
    None,
    /// Keep the lowest `fraction·N` modes at every step.
    Fixed { fraction: f64 },
    /// `t_n = exp(β κ^{n−1})`, capped at `N`. `beta = None` picks `β` so
    /// that `t_1 = N/4`.
    NashMoser { beta: Option<f64>, kappa: f64 },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::NashMoser { beta: None, kappa: 1.75 }
    }
}

impl Schedule {
    pub fn fixed() -> Self {
        Schedule::Fixed { fraction: 2.0 / 3.0 }
    }

    /// Cutoff for step `n ≥ 1`; `None` means no smoothing.
    pub fn cutoff(&self, n: usize, n_modes: usize) -> Option<f64> {
        let cap = n_modes as f64;
        match *self {
            Schedule::None => None,
            Schedule::Fixed { fraction } => Some((fraction * cap).max(1.0)),
            Schedule::NashMoser { beta, kappa } => {
                let beta = beta.unwrap_or_else(|| (cap / 4.0).max(1.0).ln());
                let t = (beta * kappa.powi(n as i32 - 1)).exp();
                if t >= cap {
                    None
                } else {
                    Some(t.max(1.0))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once `‖e‖_{X^{0,δ}} < tol`.
    pub tol: f64,
    pub max_iters: usize,
    pub schedule: Schedule,
    pub cohomology: CohomologyOptions,
    /// Smallest admissible `|det DW⁽⁰⁾|`.
    pub frame_threshold: f64,
    /// Regularity index `m` for the residual diagnostics at `r ∈ {0, m−2, m}`.
    pub regularity: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 20,
            schedule: Schedule::default(),
            cohomology: CohomologyOptions { tol: 1e-14, ..Default::default() },
            frame_threshold: DEFAULT_FRAME_THRESHOLD,
            regularity: 2.0,
        }
    }
}

/// Per-step record of the solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub iteration: usize,
    /// `‖e‖_{X^{r,δ}}` before the step for `r = 0, m−2, m`.
    pub residual_r0: f64,
    pub residual_m_minus_2: f64,
    pub residual_m: f64,
    pub delta_w_norm: f64,
    pub delta_a_norm: f64,
    pub delta_lambda_norm: f64,
    pub frame_det_min: f64,
    pub cohomology_rounds: usize,
    pub cutoff: Option<f64>,
    pub seconds: f64,
}

/// Everything a single step solves for, before smoothing.
#[derive(Debug, Clone)]
pub struct Corrections {
    /// `ẽ = −(DW∘(a, λs))⁻¹ e`.
    pub e_tilde: FtPair,
    /// `M = ẽ₂ − Dλ·s·Γ₁`.
    pub m: FourierTaylor,
    pub gamma: FtPair,
    pub delta_w: FtPair,
    pub delta_a: PeriodicFunction,
    pub delta_lambda: PeriodicFunction,
    pub frame_det_min: f64,
    pub cohomology_rounds: usize,
}

/// `e = f∘W − W∘(a, λs)`; the windings cancel.
pub fn compute_error(f: &dyn MapModel, u: &ConjugacyTriple) -> Result<FtPair> {
    let fw = apply_map_jet(f, &u.w)?;
    let wa = u.w.compose_inner(&u.a, &u.lambda);
    Ok(&fw - &wa)
}

/// `‖e‖_{X^{0,δ}}`.
pub fn residual_norm(f: &dyn MapModel, u: &ConjugacyTriple) -> Result<f64> {
    compute_error(f, u)?.norm(0.0, u.delta)
}

/// Rejects division by `g` when `|g|` dips below the floor anywhere on the grid.
fn floor_check(g: &PeriodicFunction) -> Result<()> {
    let min_abs = g.grid().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(min_abs >= DIVISION_FLOOR) {
        return Err(Error::NotContracting { norm: min_abs });
    }
    Ok(())
}

/// Solves the linearized equations at `u` given its error `e`.
pub fn compute_corrections(
    u: &ConjugacyTriple,
    e: &FtPair,
    cfg: &SolverConfig,
) -> Result<Corrections> {
    let n = u.n_modes();
    let l = u.order();
    let dw = u.w.jacobian();
    let dw_shift = dw.compose_inner(&u.a, &u.lambda);
    let frame_det_min = dw_shift.min_abs_det0();
    let inv = dw_shift.inverse(cfg.frame_threshold)?;
    let e_tilde = inv.mul_pair(e)?.scale(-1.0);

    let da = u.a.derivative();
    floor_check(&da)?;
    floor_check(&u.lambda)?;
    let inv_da = da.map_grid(|v| 1.0 / v);
    let inv_lambda = u.lambda.map_grid(|v| 1.0 / v);

    // First component: Da·Γ₁⁽ʲ⁾ − λʲ·Γ₁⁽ʲ⁾∘a = ẽ₁⁽ʲ⁾ for j ≥ 1.
    let delta_a = e_tilde.0[0].coeff(0).scale(-1.0);
    let first: Vec<(usize, Result<(PeriodicFunction, usize)>)> = (1..=l)
        .into_par_iter()
        .map(|j| {
            let twist = &u.lambda.powi(j as i32) * &inv_da;
            let forcing = e_tilde.0[0].coeff(j) * &inv_da;
            let sol = solve_cohomological_with(&twist, &u.a, &forcing, &cfg.cohomology)
                .map(|s| (s.phi, s.rounds));
            (j, sol)
        })
        .collect();
    let mut rounds = 0;
    let mut gamma1 = FourierTaylor::zeros(n, l);
    for (j, sol) in first {
        let (phi, r) = sol?;
        rounds += r;
        gamma1.set_coeff(j, phi);
    }

    let dlambda = u.lambda.differentiate();
    let m = &e_tilde.0[1] - &gamma1.shift_up()?.mul_periodic(&dlambda)?;
    let delta_lambda = m.coeff(1).scale(-1.0);

    // Second component: λ·Γ₂⁽ʲ⁾ − λʲ·Γ₂⁽ʲ⁾∘a = M⁽ʲ⁾ for j ≠ 1.
    let a_inv = u.a.invert()?;
    let second: Vec<(usize, Result<(PeriodicFunction, usize)>)> = (0..=l)
        .into_par_iter()
        .filter(|&j| j != 1)
        .map(|j| {
            let sol = if j == 0 {
                let twist = u.lambda.compose(&a_inv);
                let forcing = m.coeff(0).compose(&a_inv).scale(-1.0);
                solve_cohomological_with(&twist, &a_inv, &forcing, &cfg.cohomology)
            } else {
                let twist = u.lambda.powi(j as i32 - 1);
                let forcing = m.coeff(j) * &inv_lambda;
                solve_cohomological_with(&twist, &u.a, &forcing, &cfg.cohomology)
            };
            (j, sol.map(|s| (s.phi, s.rounds)))
        })
        .collect();
    let mut gamma2 = FourierTaylor::zeros(n, l);
    for (j, sol) in second {
        let (phi, r) = sol?;
        rounds += r;
        gamma2.set_coeff(j, phi);
    }

    let gamma = FtPair([gamma1, gamma2]);
    let delta_w = dw.mul_pair(&gamma)?;
    Ok(Corrections {
        e_tilde,
        m,
        gamma,
        delta_w,
        delta_a,
        delta_lambda,
        frame_det_min,
        cohomology_rounds: rounds,
    })
}

/// X^{0,δ} norms of the two linearized residuals
/// `Da·Γ₁ − Δ_a − Γ₁∘(a, λs) − ẽ₁` and `Dλ·s·Γ₁ + λ·Γ₂ − Δ_λ·s − Γ₂∘(a, λs) − ẽ₂`.
pub fn step_consistency(u: &ConjugacyTriple, c: &Corrections) -> Result<(f64, f64)> {
    let n = u.n_modes();
    let l = u.order();
    let g1 = &c.gamma.0[0];
    let g2 = &c.gamma.0[1];
    let r1 = &(&g1.mul_periodic(&u.a.derivative())? - &FourierTaylor::monomial(c.delta_a.clone(), 0, l))
        - &(&g1.compose_inner(&u.a, &u.lambda) + &c.e_tilde.0[0]);
    let lhs2 = &g2.mul_periodic(&u.lambda)? - &FourierTaylor::monomial(c.delta_lambda.clone(), 1.min(l), l);
    let r2 = &(&lhs2 - &g2.compose_inner(&u.a, &u.lambda)) - &c.m;
    debug_assert_eq!(r1.n_modes(), n);
    Ok((r1.norm(0.0, u.delta)?, r2.norm(0.0, u.delta)?))
}

/// Applies (optionally smoothed) corrections.
pub fn apply_corrections(
    u: &ConjugacyTriple,
    c: &Corrections,
    cutoff: Option<f64>,
) -> Result<ConjugacyTriple> {
    let (dw, da, dl) = match cutoff {
        Some(t) => (c.delta_w.smooth(t), c.delta_a.smooth(t), c.delta_lambda.smooth(t)),
        None => (c.delta_w.clone(), c.delta_a.clone(), c.delta_lambda.clone()),
    };
    let next = ConjugacyTriple {
        w: &u.w + &dw,
        a: CircleMap::new(u.a.periodic_part() + &da),
        lambda: &u.lambda + &dl,
        delta: u.delta,
    };
    let min_da = next.a.min_derivative();
    if !(min_da > 0.0) {
        return Err(Error::NotADiffeomorphism { min_derivative: min_da });
    }
    Ok(next)
}

/// One unsmoothed quasi-Newton step.
pub fn newton_step(
    f: &dyn MapModel,
    u: &ConjugacyTriple,
    cfg: &SolverConfig,
) -> Result<(ConjugacyTriple, StepDiagnostics)> {
    step_with_cutoff(f, u, cfg, 1, None)
}

fn step_with_cutoff(
    f: &dyn MapModel,
    u: &ConjugacyTriple,
    cfg: &SolverConfig,
    iteration: usize,
    cutoff: Option<f64>,
) -> Result<(ConjugacyTriple, StepDiagnostics)> {
    let start = Instant::now();
    let e = compute_error(f, u)?;
    let m = cfg.regularity;
    let residual_r0 = e.norm(0.0, u.delta)?;
    let residual_m_minus_2 = e.norm((m - 2.0).max(0.0), u.delta)?;
    let residual_m = e.norm(m, u.delta)?;
    let c = compute_corrections(u, &e, cfg)?;
    let next = apply_corrections(u, &c, cutoff)?;
    let diag = StepDiagnostics {
        iteration,
        residual_r0,
        residual_m_minus_2,
        residual_m,
        delta_w_norm: c.delta_w.norm(0.0, u.delta)?,
        delta_a_norm: c.delta_a.sup_norm(),
        delta_lambda_norm: c.delta_lambda.sup_norm(),
        frame_det_min: c.frame_det_min,
        cohomology_rounds: c.cohomology_rounds,
        cutoff,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((next, diag))
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub triple: ConjugacyTriple,
    pub history: Vec<StepDiagnostics>,
    /// `‖e‖_{X^{0,δ}}` at the returned triple.
    pub residual: f64,
}

impl SolveOutcome {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

/// Iterates smoothed quasi-Newton steps until `‖e‖_{X^{0,δ}} < cfg.tol`.
pub fn solve(f: &dyn MapModel, u0: &ConjugacyTriple, cfg: &SolverConfig) -> Result<SolveOutcome> {
    u0.check_structure()?;
    u0.check_admissible()?;
    let mut u = u0.clone();
    let mut history = Vec::new();
    let mut residual = residual_norm(f, &u)?;
    for n in 1..=cfg.max_iters {
        if residual < cfg.tol {
            break;
        }
        if !residual.is_finite() {
            return Err(Error::NoConvergence("residual is not finite".into()));
        }
        let cutoff = cfg.schedule.cutoff(n, u.n_modes());
        let (next, diag) = step_with_cutoff(f, &u, cfg, n, cutoff)?;
        history.push(diag);
        u = next;
        residual = residual_norm(f, &u)?;
    }
    if !(residual < cfg.tol) {
        return Err(Error::MaxItersExceeded { iters: history.len(), residual });
    }
    Ok(SolveOutcome { triple: u, history, residual })
}
