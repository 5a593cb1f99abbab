//! Truncated power series in one variable over `f64`.
//!
//! Used per grid point while pushing a Fourier–Taylor expansion through a
//! map. All operations truncate at the order of the operands.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    c: Vec<f64>,
}

impl TaylorJet {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant term");
        Self { c: coeffs }
    }

    pub fn constant(order: usize, value: f64) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Self { c }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(order, 0.0)
    }

    /// `value + s`.
    pub fn variable(order: usize, value: f64) -> Self {
        let mut j = Self::constant(order, value);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &ci| acc * s + ci)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { c: self.c.iter().map(|v| v * k).collect() }
    }

    pub fn add_const(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += k;
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.order(), other.order(), "jet orders differ");
    }

    /// `(sin u, cos u)` by the coupled recurrences
    /// `k s_k = Σ j u_j c_{k-j}`, `k c_k = -Σ j u_j s_{k-j}`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                let ju = j as f64 * self.c[j];
                ss += ju * c[k - j];
                cc -= ju * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Self { c: s }, Self { c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// `exp u` via `k e_k = Σ j u_j e_{k-j}`.
    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Self { c: e }
    }

    /// Series reciprocal by Newton iteration `r ← r(2 − u r)`; the number of
    /// correct coefficients doubles per pass. Returns `None` when `u_0 = 0`.
    pub fn recip(&self) -> Option<Self> {
        if self.c[0] == 0.0 || !self.c[0].is_finite() {
            return None;
        }
        let order = self.order();
        let mut r = Self::constant(order, 1.0 / self.c[0]);
        let mut correct = 1usize;
        while correct <= order {
            let ur = self * &r;
            let two_minus = (-&ur).add_const(2.0);
            r = &r * &two_minus;
            correct *= 2;
        }
        Some(r)
    }
}

impl Add for &TaylorJet {
    type Output = TaylorJet;
    fn add(self, rhs: &TaylorJet) -> TaylorJet {
        self.check(rhs);
        TaylorJet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &TaylorJet {
    type Output = TaylorJet;
    fn sub(self, rhs: &TaylorJet) -> TaylorJet {
        self.check(rhs);
        TaylorJet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &TaylorJet {
    type Output = TaylorJet;
    fn neg(self) -> TaylorJet {
        self.scale(-1.0)
    }
}

/// Cauchy product truncated at the common order.
impl Mul for &TaylorJet {
    type Output = TaylorJet;
    fn mul(self, rhs: &TaylorJet) -> TaylorJet {
        self.check(rhs);
        let n = self.c.len();
        let mut out = vec![0.0; n];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.c[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TaylorJet { c: out }
    }
}
