use rayon::prelude::*;

use super::periodic::{grid_len, grid_points, PeriodicFunction};
use crate::error::{Error, Result};

const INVERSION_MAX_ITERS: usize = 50;
const INVERSION_TOL: f64 = 1e-15;

/// Degree-one circle map given by its lift `ℓ(θ) = θ + p(θ)`.
///
/// `ℓ(θ + 1) = ℓ(θ) + 1` holds by construction since `p` is periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    periodic: PeriodicFunction,
}

impl CircleMap {
    pub fn new(periodic: PeriodicFunction) -> Self {
        Self { periodic }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::new(PeriodicFunction::zeros(n_modes))
    }

    /// Rigid rotation `θ ↦ θ + ω`.
    pub fn rotation(n_modes: usize, omega: f64) -> Self {
        Self::new(PeriodicFunction::constant(n_modes, omega))
    }

    pub fn periodic_part(&self) -> &PeriodicFunction {
        &self.periodic
    }

    pub fn into_periodic_part(self) -> PeriodicFunction {
        self.periodic
    }

    pub fn n_modes(&self) -> usize {
        self.periodic.n_modes()
    }

    pub fn degree(&self) -> i32 {
        1
    }

    /// Lift evaluation `θ + p(θ)`.
    pub fn eval(&self, theta: f64) -> f64 {
        theta + self.periodic.eval(theta)
    }

    /// Images of the standard grid points under the lift.
    pub fn grid_images(&self) -> Vec<f64> {
        let g = grid_len(self.n_modes());
        grid_points(g)
            .into_iter()
            .zip(self.periodic.grid())
            .map(|(t, p)| t + p)
            .collect()
    }

    /// `Dℓ = 1 + p'`.
    pub fn derivative(&self) -> PeriodicFunction {
        self.periodic.differentiate().add_constant(1.0)
    }

    pub fn min_derivative(&self) -> f64 {
        self.derivative().grid_min()
    }

    pub fn is_diffeomorphism(&self) -> bool {
        self.min_derivative() > 0.0
    }

    /// `self ∘ inner`, as lifts.
    pub fn after(&self, inner: &CircleMap) -> CircleMap {
        let outer_p = self.periodic.compose(inner);
        CircleMap::new(&inner.periodic + &outer_p)
    }

    /// `k`-fold iterate `a^{∘k}` by repeated squaring.
    pub fn iterate(&self, k: usize) -> CircleMap {
        let mut result = CircleMap::identity(self.n_modes());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = base.after(&result);
            }
            k >>= 1;
            if k > 0 {
                base = base.after(&base);
            }
        }
        result
    }

    /// Shifts the lift by `c`: `θ ↦ ℓ(θ) + c`.
    pub fn shifted_by(&self, c: f64) -> CircleMap {
        CircleMap::new(self.periodic.add_constant(c))
    }

    /// Inverse map, computed pointwise on the grid by safeguarded Newton on
    /// the lift and refit as a Fourier series.
    pub fn invert(&self) -> Result<CircleMap> {
        let min_d = self.min_derivative();
        if !(min_d > 0.0) {
            return Err(Error::NotADiffeomorphism { min_derivative: min_d });
        }
        let n = self.n_modes();
        let dp = self.periodic.differentiate();
        let p_bound = self.periodic.sup_norm() + 1e-12;
        let targets = grid_points(grid_len(n));
        let solved: Result<Vec<f64>> = targets
            .par_iter()
            .map(|&target| self.solve_preimage(&dp, target, p_bound).map(|x| x - target))
            .collect();
        Ok(CircleMap::new(PeriodicFunction::from_grid(n, &solved?)))
    }

    fn solve_preimage(&self, dp: &PeriodicFunction, target: f64, p_bound: f64) -> Result<f64> {
        // ℓ is increasing, so x ∈ [target - max|p|, target + max|p|] brackets the root.
        let mut lo = target - p_bound;
        let mut hi = target + p_bound;
        let mut x = target - self.periodic.eval(target);
        for _ in 0..INVERSION_MAX_ITERS {
            let fx = self.eval(x) - target;
            if fx.abs() <= INVERSION_TOL {
                return Ok(x);
            }
            if fx > 0.0 {
                hi = hi.min(x);
            } else {
                lo = lo.max(x);
            }
            let slope = 1.0 + dp.eval(x);
            let mut next = x - fx / slope;
            if !(next > lo && next < hi) || !slope.is_finite() || slope <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= INVERSION_TOL * (1.0 + x.abs()) {
                return Ok(next);
            }
            x = next;
        }
        let fx = self.eval(x) - target;
        if fx.abs() < 1e-13 {
            Ok(x)
        } else {
            Err(Error::NoConvergence(format!(
                "circle map inversion at θ={target:.6} (residual {fx:.3e})"
            )))
        }
    }
}

impl PeriodicFunction {
    /// `θ ↦ f(ℓ_a(θ))`, evaluated at the images of the grid and projected back
    /// onto the same number of modes.
    pub fn compose(&self, a: &CircleMap) -> PeriodicFunction {
        self.check_modes(a.periodic_part());
        let pts = a.grid_images();
        PeriodicFunction::from_grid(self.n_modes(), &self.eval_many(&pts))
    }
}
