use std::cell::RefCell;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Evaluation grid length used for a function with `n_modes` Fourier modes.
///
/// Twice the Nyquist minimum: products of two band-limited functions and
/// compositions alias only into modes above `n_modes`.
pub fn grid_len(n_modes: usize) -> usize {
    4 * n_modes
}

/// Equispaced grid points `i / len` on one period.
pub fn grid_points(len: usize) -> Vec<f64> {
    (0..len).map(|i| i as f64 / len as f64).collect()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_fft(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

fn inverse_fft(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

/// A real trigonometric polynomial on the circle `T = R/Z`,
///
/// `f(θ) = Σ_{|k| ≤ N} c_k e^{2πikθ}` with `c_{-k} = conj(c_k)`.
///
/// Only `c_0..=c_N` are stored, so Hermitian symmetry holds by construction;
/// `c_0` is forced real.
#[derive(Clone)]
pub struct PeriodicFunction {
    coeffs: Vec<Complex64>,
    grid: OnceLock<Vec<f64>>,
}

impl fmt::Debug for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFunction")
            .field("n_modes", &self.n_modes())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for PeriodicFunction {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl PeriodicFunction {
    /// Builds a function from `c_0..=c_N`. The imaginary part of `c_0` is dropped.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput(
                "a periodic function needs at least one non-constant mode".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite Fourier coefficient".into()));
        }
        coeffs[0].im = 0.0;
        Ok(Self::from_coeffs_unchecked(coeffs))
    }

    fn from_coeffs_unchecked(coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs,
            grid: OnceLock::new(),
        }
    }

    pub fn zeros(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "n_modes must be positive");
        Self::from_coeffs_unchecked(vec![Complex64::new(0.0, 0.0); n_modes + 1])
    }

    pub fn constant(n_modes: usize, value: f64) -> Self {
        let mut f = Self::zeros(n_modes);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// `amp · cos(2πkθ)`.
    pub fn cos_mode(n_modes: usize, k: usize, amp: f64) -> Self {
        assert!(k <= n_modes);
        let mut f = Self::zeros(n_modes);
        if k == 0 {
            f.coeffs[0] = Complex64::new(amp, 0.0);
        } else {
            f.coeffs[k] = Complex64::new(0.5 * amp, 0.0);
        }
        f
    }

    /// `amp · sin(2πkθ)`.
    pub fn sin_mode(n_modes: usize, k: usize, amp: f64) -> Self {
        assert!(k >= 1 && k <= n_modes);
        let mut f = Self::zeros(n_modes);
        f.coeffs[k] = Complex64::new(0.0, -0.5 * amp);
        f
    }

    /// Samples `func` on the standard grid and projects onto `n_modes` modes.
    pub fn from_fn(n_modes: usize, func: impl Fn(f64) -> f64) -> Self {
        let g = grid_len(n_modes);
        let samples: Vec<f64> = grid_points(g).into_iter().map(func).collect();
        Self::from_grid(n_modes, &samples)
    }

    /// Projects equispaced samples `samples[i] = f(i / len)` onto `n_modes` modes.
    ///
    /// Panics if `samples.len() <= 2 * n_modes`.
    pub fn from_grid(n_modes: usize, samples: &[f64]) -> Self {
        let g = samples.len();
        assert!(n_modes >= 1 && g > 2 * n_modes, "grid too coarse for {n_modes} modes");
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        forward_fft(&mut buf);
        let scale = 1.0 / g as f64;
        let mut coeffs: Vec<Complex64> = buf[..=n_modes].iter().map(|c| c * scale).collect();
        coeffs[0].im = 0.0;
        let f = Self::from_coeffs_unchecked(coeffs);
        if g == grid_len(n_modes) {
            let _ = f.grid.set(samples.to_vec());
        }
        f
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mean value `c_0`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Values on the standard grid of [`grid_len`] points (cached).
    pub fn grid(&self) -> &[f64] {
        self.grid
            .get_or_init(|| self.sample(grid_len(self.n_modes())))
    }

    /// Values on an equispaced grid of `len > 2N` points.
    pub fn sample(&self, len: usize) -> Vec<f64> {
        let n = self.n_modes();
        assert!(len > 2 * n, "grid too coarse for {n} modes");
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        buf[0] = self.coeffs[0];
        for k in 1..=n {
            buf[k] = self.coeffs[k];
            buf[len - k] = self.coeffs[k].conj();
        }
        inverse_fft(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Point evaluation; `theta` may be any real (period 1).
    pub fn eval(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, TAU * theta.rem_euclid(1.0));
        let n = self.n_modes();
        let mut acc = self.coeffs[n];
        for k in (1..n).rev() {
            acc = acc * z + self.coeffs[k];
        }
        self.coeffs[0].re + 2.0 * (acc * z).re
    }

    pub fn eval_many(&self, points: &[f64]) -> Vec<f64> {
        points
            .par_iter()
            .with_min_len(64)
            .map(|&t| self.eval(t))
            .collect()
    }

    /// `c_k ↦ 2πik c_k`.
    pub fn differentiate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::new(0.0, TAU * k as f64))
            .collect();
        Self::from_coeffs_unchecked(coeffs)
    }

    /// `θ ↦ f(θ + c)`.
    pub fn translate(&self, c: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * Complex64::from_polar(1.0, TAU * k as f64 * c))
            .collect();
        Self::from_coeffs_unchecked(coeffs)
    }

    /// Sharp low-pass filter: keeps modes `|k| <= t`.
    pub fn smooth(&self, t: f64) -> Self {
        assert!(t > 0.0, "smoothing cutoff must be positive");
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k as f64 <= t { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self::from_coeffs_unchecked(coeffs)
    }

    /// Re-truncates or zero-pads to `n_modes`.
    pub fn resample(&self, n_modes: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_modes + 1];
        for (dst, src) in coeffs.iter_mut().zip(&self.coeffs) {
            *dst = *src;
        }
        Self::from_coeffs_unchecked(coeffs)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_coeffs_unchecked(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn add_constant(&self, value: f64) -> Self {
        let mut out = Self::from_coeffs_unchecked(self.coeffs.clone());
        out.coeffs[0].re += value;
        out
    }

    /// Applies `op` pointwise on the standard grid and projects back.
    pub fn map_grid(&self, op: impl Fn(f64) -> f64) -> Self {
        let vals: Vec<f64> = self.grid().iter().map(|&v| op(v)).collect();
        Self::from_grid(self.n_modes(), &vals)
    }

    /// Combines two functions pointwise on the standard grid.
    pub fn zip_grid(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        self.check_modes(other);
        let vals: Vec<f64> = self
            .grid()
            .iter()
            .zip(other.grid())
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self::from_grid(self.n_modes(), &vals)
    }

    /// Integer power computed pointwise on the grid.
    pub fn powi(&self, exp: i32) -> Self {
        self.map_grid(|v| v.powi(exp))
    }

    /// Grid maximum of `|f|`.
    pub fn sup_norm(&self) -> f64 {
        self.grid().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn grid_min(&self) -> f64 {
        self.grid().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Grid lower-bound estimator of the `C^r` norm.
    ///
    /// With `r = n + α`, returns `max(max_{p<=n} sup|D^p f|, Ĥ_α(D^n f))`, where
    /// `Ĥ_α` maximizes the Hölder quotient over grid pairs at dyadic separations
    /// `2^-m`. It never exceeds the true norm.
    pub fn holder_norm(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidRegularity(r));
        }
        let n = r.floor() as usize;
        let alpha = r - n as f64;
        let mut best = self.sup_norm();
        let mut deriv = self.clone();
        for _ in 0..n {
            deriv = deriv.differentiate();
            best = best.max(deriv.sup_norm());
        }
        if alpha > 0.0 {
            best = best.max(holder_seminorm_estimate(deriv.grid(), alpha));
        }
        Ok(best)
    }

    /// Fraction of `Σ|c_k|` carried by the upper half of the spectrum.
    pub fn spectral_tail_ratio(&self) -> f64 {
        let n = self.n_modes();
        let total: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = self.coeffs[(n / 2 + 1)..].iter().map(|c| c.norm()).sum();
        tail / total
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.check_modes(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub(crate) fn check_modes(&self, other: &Self) {
        assert_eq!(
            self.n_modes(),
            other.n_modes(),
            "periodic functions with different mode counts"
        );
    }

    /// Coefficients as `[re, im]` pairs, the persisted representation.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::from_coeffs(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

/// Hölder quotient estimate over grid pairs `(θ_i, θ_i + 2^-m)`.
fn holder_seminorm_estimate(values: &[f64], alpha: f64) -> f64 {
    let g = values.len();
    let mut best = 0.0f64;
    let mut m = 1u32;
    loop {
        let step = g >> m;
        if step == 0 {
            break;
        }
        let h = step as f64 / g as f64;
        let denom = h.powf(alpha);
        for i in 0..g {
            let d = (values[(i + step) % g] - values[i]).abs();
            best = best.max(d / denom);
        }
        m += 1;
    }
    best
}

impl Add for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn add(self, rhs: &PeriodicFunction) -> PeriodicFunction {
        self.check_modes(rhs);
        PeriodicFunction::from_coeffs_unchecked(
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn sub(self, rhs: &PeriodicFunction) -> PeriodicFunction {
        self.check_modes(rhs);
        PeriodicFunction::from_coeffs_unchecked(
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        )
    }
}

impl Neg for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn neg(self) -> PeriodicFunction {
        self.scale(-1.0)
    }
}

/// Pointwise product on the oversampled grid, truncated to `N` modes.
impl Mul for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn mul(self, rhs: &PeriodicFunction) -> PeriodicFunction {
        self.zip_grid(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn mul(self, rhs: f64) -> PeriodicFunction {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos1(n: usize) -> PeriodicFunction {
        PeriodicFunction::cos_mode(n, 1, 1.0)
    }

    #[test]
    fn eval_constant() {
        let f = PeriodicFunction::constant(8, 1.0);
        assert_eq!(f.eval(0.37), 1.0);
    }

    #[test]
    fn eval_cosine() {
        let f = cos1(8);
        assert!((f.eval(0.0) - 1.0).abs() < 1e-15);
        assert!(f.eval(0.25).abs() < 1e-14);
        // period-1 wrap on the lift
        assert!((f.eval(3.0) - 1.0).abs() < 1e-14);
        assert!((f.eval(-0.75)).abs() < 1e-14);
    }

    #[test]
    fn grid_roundtrip() {
        let f = PeriodicFunction::from_fn(16, |t| (TAU * t).sin().exp());
        let g = PeriodicFunction::from_grid(16, &f.sample(grid_len(16)));
        let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(f.max_coeff_diff(&g) / scale < 1e-13);
    }

    #[test]
    fn hermitian_constant_term_real() {
        let f = PeriodicFunction::from_coeffs(vec![
            Complex64::new(1.0, 5.0),
            Complex64::new(0.2, 0.1),
        ])
        .unwrap();
        assert_eq!(f.coeffs()[0].im, 0.0);
        assert!(PeriodicFunction::from_coeffs(vec![Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn differentiate_examples() {
        let c = PeriodicFunction::constant(4, 3.0).differentiate();
        assert_eq!(c.sup_norm(), 0.0);
        let d = cos1(4).differentiate();
        assert!((d.eval(0.25) + TAU).abs() < 1e-13);
        let s2 = PeriodicFunction::sin_mode(4, 2, 1.0).differentiate();
        assert!((s2.eval(0.0) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn holder_norm_examples() {
        let one = PeriodicFunction::constant(8, 1.0);
        for r in [0.0, 0.5, 1.0, 2.7] {
            assert!((one.holder_norm(r).unwrap() - 1.0).abs() < 1e-15);
        }
        let f = cos1(8);
        assert!((f.holder_norm(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((f.holder_norm(1.0).unwrap() - TAU).abs() < 1e-12);
        assert_eq!(f.holder_norm(-0.1), Err(Error::InvalidRegularity(-0.1)));
    }

    #[test]
    fn holder_norm_zero_is_grid_max() {
        let f = PeriodicFunction::from_fn(12, |t| (TAU * t).sin() + 0.3 * (3.0 * TAU * t).cos());
        let max = f.grid().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(f.holder_norm(0.0).unwrap(), max);
    }

    #[test]
    fn holder_fractional_is_lower_bound_of_lipschitz() {
        // For α in (0,1): H_α(f) <= sup|f'| · max(h^{1-α}) <= sup|f'|.
        let f = cos1(16);
        let est = f.holder_norm(0.5).unwrap();
        assert!(est >= 1.0);
        assert!(est <= TAU);
    }

    #[test]
    fn smoothing_examples() {
        let f = cos1(16);
        assert_eq!(f.smooth(8.0), f);
        assert_eq!(f.smooth(0.5).sup_norm(), 0.0);
    }

    #[test]
    fn smoothing_is_projection() {
        let f = PeriodicFunction::from_fn(32, |t| 1.0 / (1.2 - (TAU * t).cos()));
        let once = f.smooth(7.5);
        assert_eq!(once.smooth(7.5), once);
    }

    #[test]
    fn smoothing_tail_decay_sweep() {
        let n = 64;
        let coeffs = (0..=n)
            .map(|k| Complex64::new((1.0 + k as f64).powi(-3), 0.0))
            .collect();
        let f = PeriodicFunction::from_coeffs(coeffs).unwrap();
        let c2 = f.holder_norm(2.0).unwrap();
        for t in [4.0, 8.0, 16.0, 32.0] {
            let diff = &f.smooth(t) - &f;
            let c = diff.sup_norm() * t * t / c2;
            assert!(c <= 4.0, "t={t}: fitted constant {c}");
        }
    }

    #[test]
    fn translate_shifts_argument() {
        let f = PeriodicFunction::from_fn(8, |t| (TAU * t).cos() + 0.5 * (2.0 * TAU * t).sin());
        let g = f.translate(0.13);
        for t in [0.0, 0.21, 0.77] {
            assert!((g.eval(t) - f.eval(t + 0.13)).abs() < 1e-14);
        }
    }

    #[test]
    fn product_matches_pointwise() {
        let f = PeriodicFunction::from_fn(8, |t| (TAU * t).cos());
        let g = PeriodicFunction::from_fn(8, |t| (2.0 * TAU * t).sin());
        let p = &f * &g;
        for t in [0.1, 0.45, 0.9] {
            assert!((p.eval(t) - f.eval(t) * g.eval(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn differentiate_is_linear() {
        let f = PeriodicFunction::from_fn(8, |t| (TAU * t).cos().exp());
        let g = PeriodicFunction::from_fn(8, |t| (3.0 * TAU * t).sin());
        let lhs = (&f.scale(2.0) + &g.scale(-0.5)).differentiate();
        let rhs = &f.differentiate().scale(2.0) + &g.differentiate().scale(-0.5);
        assert!(lhs.max_coeff_diff(&rhs) < 1e-13);
    }
}
