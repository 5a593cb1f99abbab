//! Fourier–Taylor expansions `u(θ, s) = w·θ + Σ_{j≤L} u⁽ʲ⁾(θ) sʲ`.

use std::ops::{Add, Neg, Sub};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{grid_len, grid_points, CircleMap, PeriodicFunction};
use crate::jet::TaylorJet;

/// Truncated power series in `s` whose coefficients are periodic functions
/// of `θ`, plus an optional winding term `θ` (winding 1 is used for the
/// angular component of a non-contractible embedding).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTaylor {
    coeffs: Vec<PeriodicFunction>,
    winding: i32,
}

impl FourierTaylor {
    pub fn new(coeffs: Vec<PeriodicFunction>, winding: i32) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty Fourier–Taylor expansion".into()));
        }
        if !(winding == 0 || winding == 1) {
            return Err(Error::InvalidInput(format!("winding must be 0 or 1, got {winding}")));
        }
        let n = coeffs[0].n_modes();
        if let Some(bad) = coeffs.iter().find(|c| c.n_modes() != n) {
            return Err(Error::ModeMismatch { left: n, right: bad.n_modes() });
        }
        Ok(Self { coeffs, winding })
    }

    pub fn zeros(n_modes: usize, order: usize) -> Self {
        Self {
            coeffs: vec![PeriodicFunction::zeros(n_modes); order + 1],
            winding: 0,
        }
    }

    /// The function `value` (constant in both variables).
    pub fn constant(n_modes: usize, order: usize, value: f64) -> Self {
        let mut u = Self::zeros(n_modes, order);
        u.coeffs[0] = PeriodicFunction::constant(n_modes, value);
        u
    }

    /// `θ`, the winding-one identity component.
    pub fn angle(n_modes: usize, order: usize) -> Self {
        let mut u = Self::zeros(n_modes, order);
        u.winding = 1;
        u
    }

    /// `s`.
    pub fn variable(n_modes: usize, order: usize) -> Self {
        let mut u = Self::zeros(n_modes, order);
        if order >= 1 {
            u.coeffs[1] = PeriodicFunction::constant(n_modes, 1.0);
        }
        u
    }

    /// `f(θ)·sʲ`.
    pub fn monomial(f: PeriodicFunction, j: usize, order: usize) -> Self {
        let mut u = Self::zeros(f.n_modes(), order);
        u.coeffs[j] = f;
        u
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs[0].n_modes()
    }

    pub fn winding(&self) -> i32 {
        self.winding
    }

    pub fn coeffs(&self) -> &[PeriodicFunction] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &PeriodicFunction {
        &self.coeffs[j]
    }

    pub fn set_coeff(&mut self, j: usize, f: PeriodicFunction) {
        assert_eq!(f.n_modes(), self.n_modes());
        self.coeffs[j] = f;
    }

    /// The same expansion with the winding term dropped.
    pub fn periodic_part(&self) -> Self {
        Self { coeffs: self.coeffs.clone(), winding: 0 }
    }

    pub fn with_winding(mut self, winding: i32) -> Self {
        self.winding = winding;
        self
    }

    pub fn eval(&self, theta: f64, s: f64) -> f64 {
        let series = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c.eval(theta));
        self.winding as f64 * theta + series
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        if self.n_modes() != other.n_modes() {
            return Err(Error::ModeMismatch { left: self.n_modes(), right: other.n_modes() });
        }
        Ok(())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect(),
            winding: self.winding,
        }
    }

    /// Cauchy product in `s`, coefficient products taken on the oversampled grid.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.winding != 0 || other.winding != 0 {
            return Err(Error::WindingMismatch);
        }
        let l = self.order();
        let g = grid_len(self.n_modes());
        let a: Vec<&[f64]> = self.coeffs.iter().map(|c| c.grid()).collect();
        let b: Vec<&[f64]> = other.coeffs.iter().map(|c| c.grid()).collect();
        let coeffs = (0..=l)
            .into_par_iter()
            .map(|k| {
                let mut vals = vec![0.0; g];
                for i in 0..=k {
                    let (ai, bk) = (a[i], b[k - i]);
                    for (v, (x, y)) in vals.iter_mut().zip(ai.iter().zip(bk)) {
                        *v += x * y;
                    }
                }
                PeriodicFunction::from_grid(self.n_modes(), &vals)
            })
            .collect();
        Ok(Self { coeffs, winding: 0 })
    }

    /// Product with a function of `θ` alone.
    pub fn mul_periodic(&self, f: &PeriodicFunction) -> Result<Self> {
        if self.winding != 0 {
            return Err(Error::WindingMismatch);
        }
        Ok(Self {
            coeffs: self.coeffs.par_iter().map(|c| c * f).collect(),
            winding: 0,
        })
    }

    /// Multiplies by `s`, dropping the top coefficient.
    pub fn shift_up(&self) -> Result<Self> {
        if self.winding != 0 {
            return Err(Error::WindingMismatch);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(PeriodicFunction::zeros(self.n_modes()));
        coeffs.extend(self.coeffs[..self.order()].iter().cloned());
        Ok(Self { coeffs, winding: 0 })
    }

    /// `∂u/∂θ`; the winding term contributes the constant `w`.
    pub fn d_theta(&self) -> Self {
        let mut coeffs: Vec<PeriodicFunction> =
            self.coeffs.iter().map(|c| c.differentiate()).collect();
        if self.winding != 0 {
            coeffs[0] = coeffs[0].add_constant(self.winding as f64);
        }
        Self { coeffs, winding: 0 }
    }

    /// `∂u/∂s`; the top coefficient becomes zero.
    pub fn d_s(&self) -> Self {
        let l = self.order();
        let mut coeffs: Vec<PeriodicFunction> =
            (1..=l).map(|j| self.coeffs[j].scale(j as f64)).collect();
        coeffs.push(PeriodicFunction::zeros(self.n_modes()));
        Self { coeffs, winding: 0 }
    }

    /// `u(a(θ), λ(θ)s) = w·a(θ) + Σ u⁽ʲ⁾(a(θ)) λ(θ)ʲ sʲ`.
    pub fn compose_inner(&self, a: &CircleMap, lambda: &PeriodicFunction) -> Self {
        let n = self.n_modes();
        assert_eq!(a.n_modes(), n);
        assert_eq!(lambda.n_modes(), n);
        let pts = a.grid_images();
        let lam = lambda.grid();
        let mut coeffs: Vec<PeriodicFunction> = self
            .coeffs
            .par_iter()
            .enumerate()
            .map(|(j, c)| {
                let vals: Vec<f64> = c
                    .eval_many(&pts)
                    .into_iter()
                    .zip(lam)
                    .map(|(v, l)| v * l.powi(j as i32))
                    .collect();
                PeriodicFunction::from_grid(n, &vals)
            })
            .collect();
        if self.winding != 0 {
            coeffs[0] = &coeffs[0] + &a.periodic_part().scale(self.winding as f64);
        }
        Self { coeffs, winding: self.winding }
    }

    /// Estimator of `Σ_j ‖u⁽ʲ⁾‖_{C^r} δʲ` (periodic part only).
    pub fn norm(&self, r: f64, delta: f64) -> Result<f64> {
        if !(delta > 0.0) {
            return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
        }
        let mut total = 0.0;
        let mut dj = 1.0;
        for c in &self.coeffs {
            total += c.holder_norm(r)? * dj;
            dj *= delta;
        }
        Ok(total)
    }

    /// Sharp low-pass filter in `θ` applied to every `s`-coefficient.
    pub fn smooth(&self, t: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.smooth(t)).collect(),
            winding: self.winding,
        }
    }

    /// `‖u⁽ᴸ⁾‖δᴸ / Σ_j ‖u⁽ʲ⁾‖δʲ` with grid sup norms.
    pub fn tail_ratio(&self, delta: f64) -> f64 {
        let mut total = 0.0;
        let mut dj = 1.0;
        let mut last = 0.0;
        for c in &self.coeffs {
            last = c.sup_norm() * dj;
            total += last;
            dj *= delta;
        }
        if total == 0.0 {
            0.0
        } else {
            last / total
        }
    }

    /// Radius of convergence in `s` from a log-linear least-squares fit of
    /// `ln ‖u⁽ʲ⁾‖_{C⁰}` over the upper half of the orders.
    ///
    /// Returns `+∞` when the top coefficient vanishes (the expansion is a
    /// polynomial below the truncation order) or fewer than two nonzero
    /// coefficients remain to fit.
    pub fn analyticity_radius(&self) -> Result<f64> {
        let l = self.order();
        if l < 4 {
            return Err(Error::InvalidInput(format!(
                "analyticity radius needs order >= 4, got {l}"
            )));
        }
        if self.coeffs[l].sup_norm() == 0.0 {
            return Ok(f64::INFINITY);
        }
        let pts: Vec<(f64, f64)> = (l / 2..=l)
            .filter_map(|j| {
                let n = self.coeffs[j].sup_norm();
                (n > 0.0).then(|| (j as f64, n.ln()))
            })
            .collect();
        if pts.len() < 2 {
            return Ok(f64::INFINITY);
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        Ok((-slope).exp())
    }

    /// Per-grid-point Taylor jets in `s`; the winding term is included so the
    /// jets hold actual lift coordinates.
    pub fn point_jets(&self) -> Vec<TaylorJet> {
        let g = grid_len(self.n_modes());
        let grids: Vec<&[f64]> = self.coeffs.iter().map(|c| c.grid()).collect();
        let thetas = grid_points(g);
        (0..g)
            .map(|i| {
                let mut c: Vec<f64> = grids.iter().map(|gr| gr[i]).collect();
                c[0] += self.winding as f64 * thetas[i];
                TaylorJet::new(c)
            })
            .collect()
    }

    /// Inverse of [`point_jets`](Self::point_jets): `winding·θ_i` is removed
    /// from each constant term before projecting.
    pub fn from_point_jets(n_modes: usize, winding: i32, jets: &[TaylorJet]) -> Result<Self> {
        let g = grid_len(n_modes);
        if jets.len() != g {
            return Err(Error::InvalidInput(format!(
                "expected {g} point jets, got {}",
                jets.len()
            )));
        }
        let order = jets[0].order();
        let thetas = grid_points(g);
        let coeffs = (0..=order)
            .map(|j| {
                let vals: Vec<f64> = jets
                    .iter()
                    .zip(&thetas)
                    .map(|(jet, t)| {
                        let v = jet.coeffs()[j];
                        if j == 0 {
                            v - winding as f64 * t
                        } else {
                            v
                        }
                    })
                    .collect();
                PeriodicFunction::from_grid(n_modes, &vals)
            })
            .collect();
        Self::new(coeffs, winding)
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.max_coeff_diff(b))
            .fold(0.0, f64::max)
    }

    fn zip_coeffs(&self, other: &Self, op: impl Fn(&PeriodicFunction, &PeriodicFunction) -> PeriodicFunction) -> Self {
        self.check(other).expect("incompatible Fourier–Taylor operands");
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(a, b)).collect(),
            winding: 0,
        }
    }
}

impl Add for &FourierTaylor {
    type Output = FourierTaylor;
    fn add(self, rhs: &FourierTaylor) -> FourierTaylor {
        let mut out = self.zip_coeffs(rhs, |a, b| a + b);
        out.winding = self.winding + rhs.winding;
        out
    }
}

impl Sub for &FourierTaylor {
    type Output = FourierTaylor;
    fn sub(self, rhs: &FourierTaylor) -> FourierTaylor {
        let mut out = self.zip_coeffs(rhs, |a, b| a - b);
        out.winding = self.winding - rhs.winding;
        out
    }
}

impl Neg for &FourierTaylor {
    type Output = FourierTaylor;
    fn neg(self) -> FourierTaylor {
        self.scale(-1.0)
    }
}

/// Two-component Fourier–Taylor vector (embeddings, errors, frame coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct FtPair(pub [FourierTaylor; 2]);

impl FtPair {
    pub fn new(first: FourierTaylor, second: FourierTaylor) -> Result<Self> {
        first.check(&second)?;
        Ok(Self([first, second]))
    }

    pub fn zeros(n_modes: usize, order: usize) -> Self {
        Self([FourierTaylor::zeros(n_modes, order), FourierTaylor::zeros(n_modes, order)])
    }

    pub fn order(&self) -> usize {
        self.0[0].order()
    }

    pub fn n_modes(&self) -> usize {
        self.0[0].n_modes()
    }

    pub fn eval(&self, theta: f64, s: f64) -> [f64; 2] {
        [self.0[0].eval(theta, s), self.0[1].eval(theta, s)]
    }

    /// `Σ_i ‖u_i‖_{X^{r,δ}}` (product-space norm).
    pub fn norm(&self, r: f64, delta: f64) -> Result<f64> {
        Ok(self.0[0].norm(r, delta)? + self.0[1].norm(r, delta)?)
    }

    pub fn compose_inner(&self, a: &CircleMap, lambda: &PeriodicFunction) -> Self {
        Self([self.0[0].compose_inner(a, lambda), self.0[1].compose_inner(a, lambda)])
    }

    pub fn smooth(&self, t: f64) -> Self {
        Self([self.0[0].smooth(t), self.0[1].smooth(t)])
    }

    pub fn scale(&self, k: f64) -> Self {
        Self([self.0[0].scale(k), self.0[1].scale(k)])
    }

    /// Derivative matrix `[[∂θu₁, ∂s u₁], [∂θu₂, ∂s u₂]]`.
    pub fn jacobian(&self) -> FtMatrix {
        FtMatrix([
            [self.0[0].d_theta(), self.0[0].d_s()],
            [self.0[1].d_theta(), self.0[1].d_s()],
        ])
    }
}

impl Add for &FtPair {
    type Output = FtPair;
    fn add(self, rhs: &FtPair) -> FtPair {
        FtPair([&self.0[0] + &rhs.0[0], &self.0[1] + &rhs.0[1]])
    }
}

impl Sub for &FtPair {
    type Output = FtPair;
    fn sub(self, rhs: &FtPair) -> FtPair {
        FtPair([&self.0[0] - &rhs.0[0], &self.0[1] - &rhs.0[1]])
    }
}

/// 2×2 matrix of winding-zero Fourier–Taylor expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct FtMatrix(pub [[FourierTaylor; 2]; 2]);

impl FtMatrix {
    pub fn identity(n_modes: usize, order: usize) -> Self {
        let one = FourierTaylor::constant(n_modes, order, 1.0);
        let zero = FourierTaylor::zeros(n_modes, order);
        Self([[one.clone(), zero.clone()], [zero, one]])
    }

    pub fn from_constant(n_modes: usize, order: usize, m: [[f64; 2]; 2]) -> Self {
        let c = |v| FourierTaylor::constant(n_modes, order, v);
        Self([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn order(&self) -> usize {
        self.0[0][0].order()
    }

    pub fn n_modes(&self) -> usize {
        self.0[0][0].n_modes()
    }

    pub fn entry(&self, i: usize, j: usize) -> &FourierTaylor {
        &self.0[i][j]
    }

    pub fn mul_pair(&self, v: &FtPair) -> Result<FtPair> {
        let row = |i: usize| -> Result<FourierTaylor> {
            Ok(&self.0[i][0].mul(&v.0[0])? + &self.0[i][1].mul(&v.0[1])?)
        };
        Ok(FtPair([row(0)?, row(1)?]))
    }

    pub fn mul(&self, other: &FtMatrix) -> Result<FtMatrix> {
        let entry = |i: usize, j: usize| -> Result<FourierTaylor> {
            Ok(&self.0[i][0].mul(&other.0[0][j])? + &self.0[i][1].mul(&other.0[1][j])?)
        };
        Ok(FtMatrix([[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]]))
    }

    pub fn compose_inner(&self, a: &CircleMap, lambda: &PeriodicFunction) -> FtMatrix {
        let c = |i: usize, j: usize| self.0[i][j].compose_inner(a, lambda);
        FtMatrix([[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]])
    }

    /// Sum of the `X^{r,δ}` norms of all four entries.
    pub fn norm(&self, r: f64, delta: f64) -> Result<f64> {
        let mut total = 0.0;
        for row in &self.0 {
            for e in row {
                total += e.norm(r, delta)?;
            }
        }
        Ok(total)
    }

    /// Grid minimum of `|det M⁽⁰⁾(θ)|`.
    pub fn min_abs_det0(&self) -> f64 {
        let [[a, b], [c, d]] = &self.0;
        let (a, b, c, d) = (a.coeff(0).grid(), b.coeff(0).grid(), c.coeff(0).grid(), d.coeff(0).grid());
        (0..a.len())
            .map(|i| (a[i] * d[i] - b[i] * c[i]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Inverse to truncation order: adjugate over determinant, with the
    /// determinant's reciprocal taken as a power series at every grid point.
    ///
    /// Fails with [`Error::SingularFrame`] if `|det M⁽⁰⁾| < threshold` anywhere.
    pub fn inverse(&self, threshold: f64) -> Result<FtMatrix> {
        let n = self.n_modes();
        let min_det = self.min_abs_det0();
        if !(min_det >= threshold) {
            return Err(Error::SingularFrame { min_det });
        }
        let jets: Vec<Vec<TaylorJet>> = self
            .0
            .iter()
            .flat_map(|row| row.iter().map(|e| e.point_jets()))
            .collect();
        let g = jets[0].len();
        let inv: Vec<[TaylorJet; 4]> = (0..g)
            .into_par_iter()
            .map(|i| {
                let (a, b, c, d) = (&jets[0][i], &jets[1][i], &jets[2][i], &jets[3][i]);
                let det = &(a * d) - &(b * c);
                let r = det.recip().expect("determinant checked nonzero");
                [d * &r, -&(b * &r), -&(c * &r), a * &r]
            })
            .collect();
        let entry = |k: usize| {
            let col: Vec<TaylorJet> = inv.iter().map(|m| m[k].clone()).collect();
            FourierTaylor::from_point_jets(n, 0, &col)
        };
        Ok(FtMatrix([[entry(0)?, entry(1)?], [entry(2)?, entry(3)?]]))
    }
}

impl Sub for &FtMatrix {
    type Output = FtMatrix;
    fn sub(self, rhs: &FtMatrix) -> FtMatrix {
        let e = |i: usize, j: usize| &self.0[i][j] - &rhs.0[i][j];
        FtMatrix([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    const N: usize = 16;

    fn poly(coeffs: &[f64]) -> FourierTaylor {
        let l = coeffs.len() - 1;
        let mut u = FourierTaylor::zeros(N, l);
        for (j, &c) in coeffs.iter().enumerate() {
            u.set_coeff(j, PeriodicFunction::constant(N, c));
        }
        u
    }

    #[test]
    fn mul_polynomial_identity() {
        let p = poly(&[1.0, 1.0, 0.0, 0.0]).mul(&poly(&[1.0, -1.0, 0.0, 0.0])).unwrap();
        let want = [1.0, 0.0, -1.0, 0.0];
        for j in 0..4 {
            assert!((p.coeff(j).mean() - want[j]).abs() < 1e-15);
            assert!(p.coeff(j).differentiate().sup_norm() < 1e-13);
        }
        let six = FourierTaylor::constant(N, 3, 2.0)
            .mul(&FourierTaylor::constant(N, 3, 3.0))
            .unwrap();
        assert!((six.eval(0.3, 0.2) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn mul_rejects_mismatch() {
        let a = FourierTaylor::zeros(N, 3);
        let b = FourierTaylor::zeros(N, 4);
        assert_eq!(a.mul(&b), Err(Error::OrderMismatch { left: 3, right: 4 }));
        assert_eq!(
            FourierTaylor::angle(N, 3).mul(&a),
            Err(Error::WindingMismatch)
        );
    }

    #[test]
    fn compose_inner_scaling() {
        let a = CircleMap::new(PeriodicFunction::from_fn(N, |t| 0.3 + 0.05 * (TAU * t).sin()));
        let half = PeriodicFunction::constant(N, 0.5);
        let s = FourierTaylor::variable(N, 4);
        let out = s.compose_inner(&a, &half);
        assert!((out.coeff(1).mean() - 0.5).abs() < 1e-15);
        assert!(out.coeff(1).differentiate().sup_norm() < 1e-12);
        let s2 = FourierTaylor::monomial(PeriodicFunction::constant(N, 1.0), 2, 4);
        let out2 = s2.compose_inner(&a, &half);
        assert!((out2.eval(0.77, 1.0) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn compose_inner_identity_is_noop() {
        let u = FourierTaylor::new(
            (0..5)
                .map(|j| PeriodicFunction::from_fn(N, move |t| (TAU * (t + j as f64 * 0.1)).cos() / (1 + j) as f64))
                .collect(),
            1,
        )
        .unwrap();
        let out = u.compose_inner(&CircleMap::identity(N), &PeriodicFunction::constant(N, 1.0));
        assert!(u.max_coeff_diff(&out) < 1e-13);
        assert_eq!(out.winding(), 1);
    }

    #[test]
    fn norm_examples() {
        assert!((FourierTaylor::constant(N, 3, 1.0).norm(1.5, 0.3).unwrap() - 1.0).abs() < 1e-15);
        assert!((FourierTaylor::variable(N, 3).norm(0.0, 0.2).unwrap() - 0.2).abs() < 1e-15);
        let u = FourierTaylor::monomial(PeriodicFunction::cos_mode(N, 1, 1.0), 2, 3);
        let v = u.norm(1.0, 0.5).unwrap();
        assert!((v - TAU * 0.25).abs() < 1e-12, "{v}");
        assert!(u.norm(-1.0, 0.5).is_err());
    }

    #[test]
    fn smooth_examples() {
        let c = FourierTaylor::constant(N, 3, 2.5);
        assert_eq!(c.smooth(0.5), c);
        let u = FourierTaylor::monomial(PeriodicFunction::cos_mode(N, 1, 1.0), 1, 3);
        assert_eq!(u.smooth(0.5).norm(0.0, 1.0).unwrap(), 0.0);
        let mixed = FourierTaylor::new(
            (0..4).map(|j| PeriodicFunction::from_fn(N, move |t| (TAU * (j + 1) as f64 * t).sin() + (TAU * 7.0 * t).cos())).collect(),
            0,
        )
        .unwrap();
        let sm = mixed.smooth(3.0);
        for j in 0..4 {
            assert_eq!(sm.coeff(j), &mixed.coeff(j).smooth(3.0));
        }
    }

    #[test]
    fn matrix_inverse_examples() {
        let id = FtMatrix::identity(N, 4);
        let inv = id.inverse(1e-8).unwrap();
        assert!((&inv - &id).norm(0.0, 1.0).unwrap() < 1e-15);

        let d = FtMatrix::from_constant(N, 4, [[2.0, 0.0], [0.0, 4.0]]);
        let inv = d.inverse(1e-8).unwrap();
        assert!((inv.entry(0, 0).eval(0.1, 0.0) - 0.5).abs() < 1e-15);
        assert!((inv.entry(1, 1).eval(0.1, 0.0) - 0.25).abs() < 1e-15);

        // I + s·N with N nilpotent: inverse is I − s·N.
        let mut m = FtMatrix::identity(N, 4);
        m.0[0][1] = FourierTaylor::variable(N, 4);
        let inv = m.inverse(1e-8).unwrap();
        assert!((inv.entry(0, 1).coeff(1).mean() + 1.0).abs() < 1e-15);
        let prod = m.mul(&inv).unwrap();
        assert!((&prod - &id).norm(0.0, 1.0).unwrap() < 1e-14);
    }

    #[test]
    fn matrix_inverse_singular() {
        let m = FtMatrix::from_constant(N, 2, [[1.0, 2.0], [0.5, 1.0]]);
        assert!(matches!(m.inverse(1e-8), Err(Error::SingularFrame { .. })));
    }

    #[test]
    fn analyticity_radius_examples() {
        let geo: Vec<f64> = (0..=12).map(|j| 0.5f64.powi(j)).collect();
        let r = poly(&geo).analyticity_radius().unwrap();
        assert!((r - 2.0).abs() < 0.1, "{r}");
        let p = poly(&[1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.analyticity_radius().unwrap(), f64::INFINITY);
        assert!(poly(&[1.0, 1.0, 1.0]).analyticity_radius().is_err());
        let jw: Vec<f64> = (0..=48)
            .map(|j| if j == 0 { 1.0 } else { (j as f64).powi(-2) * 3f64.powi(-j) })
            .collect();
        let r = poly(&jw).analyticity_radius().unwrap();
        assert!((r - 3.0).abs() < 0.3, "{r}");
    }

    #[test]
    fn point_jets_roundtrip_with_winding() {
        let u = FourierTaylor::new(
            vec![
                PeriodicFunction::from_fn(N, |t| 0.1 * (TAU * t).sin()),
                PeriodicFunction::from_fn(N, |t| (TAU * t).cos()),
                PeriodicFunction::constant(N, 0.3),
            ],
            1,
        )
        .unwrap();
        let jets = u.point_jets();
        let g = grid_len(N);
        let t = 5.0 / g as f64;
        assert!((jets[5].eval(0.2) - u.eval(t, 0.2)).abs() < 1e-14);
        let back = FourierTaylor::from_point_jets(N, 1, &jets).unwrap();
        assert!(back.max_coeff_diff(&u) < 1e-15);
    }
}
