//! Initial guesses from forward orbits, and zeroth-order parameter continuation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{grid_len, grid_points, CircleMap, PeriodicFunction};
use crate::models::{MapModel, ModelRegistry, Params};
use crate::newton::{solve, ConjugacyTriple, SolveOutcome, SolverConfig};
use crate::taylor::{FourierTaylor, FtPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub n_modes: usize,
    pub order: usize,
    pub delta: f64,
    /// Orbits start at `(k/n_seeds, seed_y)`.
    pub seed_y: f64,
    pub n_seeds: usize,
    /// Iterates discarded per seed.
    pub burn_in: usize,
    /// Total recorded points over all seeds.
    pub samples: usize,
    /// Largest tolerated gap between consecutive sorted angles.
    pub max_gap: f64,
    /// Orbits leaving `|y| < escape` count as divergent.
    pub escape: f64,
    pub bundle_max_iters: usize,
    pub bundle_tol: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n_modes: 64,
            order: 8,
            delta: 0.3,
            seed_y: 0.0,
            n_seeds: 16,
            burn_in: 2000,
            samples: 20000,
            max_gap: 0.05,
            escape: 1e6,
            bundle_max_iters: 1000,
            bundle_tol: 1e-13,
        }
    }
}

/// Samples the attractor as `(x mod 1, y)` pairs sorted by angle.
pub fn sample_attractor(f: &dyn MapModel, cfg: &BootstrapConfig) -> Result<Vec<(f64, f64)>> {
    let seeds = cfg.n_seeds.max(1);
    let per_seed = (cfg.samples / seeds).max(1);
    let orbits: Result<Vec<Vec<(f64, f64)>>> = (0..seeds)
        .into_par_iter()
        .map(|k| {
            let (mut x, mut y) = (k as f64 / seeds as f64, cfg.seed_y);
            let mut out = Vec::with_capacity(per_seed);
            for i in 0..cfg.burn_in + per_seed {
                let (nx, ny) = f.eval(x, y)?;
                if !(ny.abs() < cfg.escape) || !nx.is_finite() {
                    return Err(Error::NoAttractorFound(format!(
                        "orbit from seed {k} diverged after {i} iterates"
                    )));
                }
                // keep the lift bounded without changing the point on the cylinder
                x = nx - nx.floor();
                y = ny;
                if i >= cfg.burn_in {
                    out.push((x, y));
                }
            }
            Ok(out)
        })
        .collect();
    let mut pts: Vec<(f64, f64)> = orbits?.into_iter().flatten().collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut max_gap = 1.0 - pts.last().unwrap().0 + pts[0].0;
    for w in pts.windows(2) {
        max_gap = max_gap.max(w[1].0 - w[0].0);
    }
    if max_gap > cfg.max_gap {
        return Err(Error::NoAttractorFound(format!(
            "orbit cloud leaves an angular gap of {max_gap:.4} (allowed {})",
            cfg.max_gap
        )));
    }
    Ok(pts)
}

/// Periodic piecewise-linear interpolation of sorted `(x, y)` samples onto `thetas`.
fn interpolate_periodic(pts: &[(f64, f64)], thetas: &[f64]) -> Vec<f64> {
    let m = pts.len();
    thetas
        .iter()
        .map(|&t| {
            let idx = pts.partition_point(|p| p.0 <= t);
            let (x0, y0) = if idx == 0 { (pts[m - 1].0 - 1.0, pts[m - 1].1) } else { pts[idx - 1] };
            let (x1, y1) = if idx == m { (pts[0].0 + 1.0, pts[0].1) } else { pts[idx] };
            if x1 - x0 <= 0.0 {
                y0
            } else {
                y0 + (y1 - y0) * (t - x0) / (x1 - x0)
            }
        })
        .collect()
}

fn invert2(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

/// Builds `(W, a, λ)` from the attractor: `K(θ) = (θ, g(θ))` fitted to the
/// orbit cloud, `a(θ) = f₁(K(θ))`, and the stable bundle `V` with rate `λ`
/// from backward iteration of the derivative cocycle,
/// `V ← normalize(Df(K)⁻¹ · V∘a)`. Orders above one start at zero.
pub fn initial_guess(f: &dyn MapModel, cfg: &BootstrapConfig) -> Result<ConjugacyTriple> {
    let n = cfg.n_modes;
    let g_len = grid_len(n);
    let thetas = grid_points(g_len);
    let pts = sample_attractor(f, cfg)?;
    // interpolation leaves broadband noise; only the lower half of the spectrum is kept
    let band = (n / 2).max(1) as f64;
    let g = PeriodicFunction::from_grid(n, &interpolate_periodic(&pts, &thetas)).smooth(band);

    let gv = g.grid();
    let images: Result<Vec<(f64, f64)>> = thetas.iter().zip(gv).map(|(&t, &y)| f.eval(t, y)).collect();
    let images = images?;
    let a_per: Vec<f64> = images.iter().zip(&thetas).map(|(im, t)| im.0 - t).collect();
    let a = CircleMap::new(PeriodicFunction::from_grid(n, &a_per).smooth(band));
    if !a.is_diffeomorphism() {
        return Err(Error::NotADiffeomorphism { min_derivative: a.min_derivative() });
    }

    let dfs: Result<Vec<[[f64; 2]; 2]>> = thetas.iter().zip(gv).map(|(&t, &y)| f.dmap(t, y)).collect();
    let dfs = dfs?;
    let inv: Vec<[[f64; 2]; 2]> = dfs
        .iter()
        .map(|m| invert2(*m).ok_or_else(|| Error::DomainError("Df is singular on the attractor".into())))
        .collect::<Result<_>>()?;

    let mut v1 = PeriodicFunction::zeros(n);
    let mut v2 = PeriodicFunction::constant(n, 1.0);
    let mut change = f64::INFINITY;
    let mut converged = false;
    for _ in 0..cfg.bundle_max_iters {
        let va1 = v1.compose(&a);
        let va2 = v2.compose(&a);
        let (o1, o2) = (v1.grid(), v2.grid());
        let mut n1 = vec![0.0; g_len];
        let mut n2 = vec![0.0; g_len];
        change = 0.0;
        for i in 0..g_len {
            let m = inv[i];
            let (p, q) = (va1.grid()[i], va2.grid()[i]);
            let mut x = m[0][0] * p + m[0][1] * q;
            let mut y = m[1][0] * p + m[1][1] * q;
            let norm = x.hypot(y);
            x /= norm;
            y /= norm;
            if x * o1[i] + y * o2[i] < 0.0 {
                x = -x;
                y = -y;
            }
            change = f64::max(change, (x - o1[i]).abs().max((y - o2[i]).abs()));
            n1[i] = x;
            n2[i] = y;
        }
        if !change.is_finite() {
            break;
        }
        v1 = PeriodicFunction::from_grid(n, &n1);
        v2 = PeriodicFunction::from_grid(n, &n2);
        if change < cfg.bundle_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::BundleIterationStalled { iters: cfg.bundle_max_iters, change });
    }

    let va1 = v1.compose(&a);
    let va2 = v2.compose(&a);
    let lam: Vec<f64> = (0..g_len)
        .map(|i| {
            let m = dfs[i];
            let (p, q) = (v1.grid()[i], v2.grid()[i]);
            (m[0][0] * p + m[0][1] * q) * va1.grid()[i] + (m[1][0] * p + m[1][1] * q) * va2.grid()[i]
        })
        .collect();
    let lambda = PeriodicFunction::from_grid(n, &lam).smooth(band);

    let mut w1 = FourierTaylor::angle(n, cfg.order);
    let mut w2 = FourierTaylor::zeros(n, cfg.order);
    w2.set_coeff(0, g);
    if cfg.order >= 1 {
        w1.set_coeff(1, v1.smooth(band));
        w2.set_coeff(1, v2.smooth(band));
    }
    ConjugacyTriple::new(FtPair([w1, w2]), a, lambda, cfg.delta)
}

/// A one-parameter family of models.
pub trait ModelFamily {
    fn at(&self, epsilon: f64) -> Result<Box<dyn MapModel>>;
}

/// Family obtained by varying one named parameter of a registered model.
#[derive(Debug, Clone)]
pub struct RegistryFamily {
    pub registry: ModelRegistry,
    pub model: String,
    pub base: Params,
    pub parameter: String,
}

impl ModelFamily for RegistryFamily {
    fn at(&self, epsilon: f64) -> Result<Box<dyn MapModel>> {
        let mut p = self.base.clone();
        p.set(&self.parameter, epsilon);
        self.registry.create(&self.model, &p)
    }
}

/// Initial guess at the next parameter: the previous solution as is.
pub fn continuation_step(u_prev: &ConjugacyTriple) -> ConjugacyTriple {
    u_prev.clone()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationConfig {
    /// Nominal (and largest) parameter step.
    pub step: f64,
    pub min_step: f64,
    /// Steps solved in at most this many iterations let the step grow.
    pub fast_iters: usize,
    pub grow: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self { step: 0.05, min_step: 1e-4, fast_iters: 2, grow: 1.5 }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationPoint {
    pub parameter: f64,
    pub outcome: SolveOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationSummary {
    pub parameter: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Follows the solution from `start` (where `u0` is the initial guess) to
/// `end`, halving the step when a solve fails. Each converged point is
/// passed to `on_point` as soon as it is found.
pub fn continue_family(
    family: &dyn ModelFamily,
    u0: &ConjugacyTriple,
    start: f64,
    end: f64,
    cfg: &ContinuationConfig,
    solver: &SolverConfig,
    mut on_point: impl FnMut(&ContinuationPoint) -> Result<()>,
) -> Result<Vec<ContinuationPoint>> {
    if !(cfg.step > 0.0 && cfg.min_step > 0.0) {
        return Err(Error::InvalidInput("continuation steps must be positive".into()));
    }
    let dir = if end >= start { 1.0 } else { -1.0 };
    let first = solve(family.at(start)?.as_ref(), u0, solver)?;
    let mut points = vec![ContinuationPoint { parameter: start, outcome: first }];
    on_point(&points[0])?;
    let mut eps = start;
    let mut step = cfg.step;
    let scale = 1.0 + start.abs().max(end.abs());
    while dir * (end - eps) > 1e-12 * scale {
        let next = if dir * (end - eps) <= step * (1.0 + 1e-9) { end } else { eps + dir * step };
        let guess = continuation_step(&points.last().unwrap().outcome.triple);
        match family.at(next).and_then(|f| solve(f.as_ref(), &guess, solver)) {
            Ok(outcome) => {
                let fast = outcome.iterations() <= cfg.fast_iters;
                let pt = ContinuationPoint { parameter: next, outcome };
                on_point(&pt)?;
                points.push(pt);
                eps = next;
                if fast {
                    step = (step * cfg.grow).min(cfg.step);
                }
            }
            Err(_) => {
                step *= 0.5;
                if step < cfg.min_step {
                    return Err(Error::StepTooSmall { step, at: eps });
                }
            }
        }
    }
    Ok(points)
}
