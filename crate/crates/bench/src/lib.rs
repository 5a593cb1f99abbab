//! Benchmark fixtures.

use std::f64::consts::TAU;

use circlefol::models::{ForcedOscillatorModel, GOLDEN_MEAN};
use circlefol::{initial_guess, BootstrapConfig, CircleMap, ConjugacyTriple, FourierTaylor, PeriodicFunction};

pub fn forced_oscillator() -> ForcedOscillatorModel {
    ForcedOscillatorModel::new(GOLDEN_MEAN, 0.5, 0.02, 0.1, 0.1)
}

/// Bootstrap guess for the forced oscillator at `n` modes, order `order`.
pub fn forced_guess(n: usize, order: usize) -> ConjugacyTriple {
    let cfg = BootstrapConfig { n_modes: n, order, ..Default::default() };
    initial_guess(&forced_oscillator(), &cfg).expect("bootstrap converges")
}

/// A smooth expansion of order `order` with decaying coefficients.
pub fn smooth_expansion(n: usize, order: usize) -> FourierTaylor {
    let coeffs = (0..=order)
        .map(|j| PeriodicFunction::from_fn(n, move |t| (TAU * t + j as f64).sin().exp() / (j + 1) as f64))
        .collect();
    FourierTaylor::new(coeffs, 0).expect("consistent coefficients")
}

pub fn perturbed_rotation(n: usize) -> CircleMap {
    CircleMap::new(PeriodicFunction::from_fn(n, |t| GOLDEN_MEAN + 0.02 * (TAU * t).sin()))
}

pub fn twist(n: usize) -> PeriodicFunction {
    PeriodicFunction::from_fn(n, |t| 0.5 + 0.1 * (TAU * t).cos())
}
