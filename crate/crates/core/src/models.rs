//! Maps of the cylinder `T × ℝ` evaluated on Taylor jets.
//!
//! The first coordinate is a lift: every model satisfies
//! `f₁(x + 1, y) = f₁(x, y) + 1` and `f₂(x + 1, y) = f₂(x, y)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::TaylorJet;
use crate::taylor::{FourierTaylor, FtMatrix, FtPair};

/// Named real parameters of a model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn require(&self, name: &str) -> Result<f64> {
        let v = self
            .get(name)
            .ok_or_else(|| Error::InvalidParameter(format!("missing parameter '{name}'")))?;
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("parameter '{name}' is not finite")));
        }
        Ok(v)
    }
}

/// Jacobian as four jets, row-major.
pub type JetMatrix = [[TaylorJet; 2]; 2];

/// An analytic map of the cylinder.
pub trait MapModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn params(&self) -> &Params;

    /// Image of the jet pair `(x(s), y(s))`.
    fn eval_jet(&self, x: &TaylorJet, y: &TaylorJet) -> Result<(TaylorJet, TaylorJet)>;

    /// `Df(x(s), y(s))` entrywise.
    fn dmap_jet(&self, x: &TaylorJet, y: &TaylorJet) -> Result<JetMatrix>;

    fn eval(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (u, v) = self.eval_jet(&TaylorJet::constant(0, x), &TaylorJet::constant(0, y))?;
        Ok((u.value(), v.value()))
    }

    fn dmap(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        let m = self.dmap_jet(&TaylorJet::constant(0, x), &TaylorJet::constant(0, y))?;
        Ok([
            [m[0][0].value(), m[0][1].value()],
            [m[1][0].value(), m[1][1].value()],
        ])
    }
}

fn finite_or_domain(name: &str, jets: &[&TaylorJet]) -> Result<()> {
    if jets.iter().all(|j| j.is_finite()) {
        Ok(())
    } else {
        Err(Error::DomainError(format!("{name}: non-finite value")))
    }
}

/// `f(x, y) = (x + ω, b·y)`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub omega: f64,
    pub b: f64,
    params: Params,
}

impl LinearModel {
    pub fn new(omega: f64, b: f64) -> Self {
        let params = Params::new().with("omega", omega).with("b", b);
        Self { omega, b, params }
    }

    fn from_params(p: &Params) -> Result<Self> {
        Ok(Self::new(p.require("omega")?, p.require("b")?))
    }
}

impl MapModel for LinearModel {
    fn name(&self) -> &str {
        "linear"
    }

    fn params(&self) -> &Params {
        &self.params
    }

    fn eval_jet(&self, x: &TaylorJet, y: &TaylorJet) -> Result<(TaylorJet, TaylorJet)> {
        finite_or_domain("linear", &[x, y])?;
        Ok((x.add_const(self.omega), y.scale(self.b)))
    }

    fn dmap_jet(&self, x: &TaylorJet, _y: &TaylorJet) -> Result<JetMatrix> {
        let l = x.order();
        Ok([
            [TaylorJet::constant(l, 1.0), TaylorJet::zero(l)],
            [TaylorJet::zero(l), TaylorJet::constant(l, self.b)],
        ])
    }
}

/// Skew product `f(x, y) = (α(x), l·y + η(x))` with
/// `α(x) = x + ω + c·sin 2πx` and `η(x) = η₁ cos 2πx + η₂ sin 4πx`.
#[derive(Debug, Clone)]
pub struct SkewModel {
    pub omega: f64,
    pub c: f64,
    pub l: f64,
    pub eta1: f64,
    pub eta2: f64,
    params: Params,
}

impl SkewModel {
    pub fn new(omega: f64, c: f64, l: f64, eta1: f64, eta2: f64) -> Self {
        let params = Params::new()
            .with("omega", omega)
            .with("c", c)
            .with("l", l)
            .with("eta1", eta1)
            .with("eta2", eta2);
        Self { omega, c, l, eta1, eta2, params }
    }

    fn from_params(p: &Params) -> Result<Self> {
        Ok(Self::new(
            p.require("omega")?,
            p.require("c")?,
            p.require("l")?,
            p.require("eta1")?,
            p.require("eta2")?,
        ))
    }

    pub fn alpha(&self, x: f64) -> f64 {
        x + self.omega + self.c * (TAU * x).sin()
    }

    pub fn eta(&self, x: f64) -> f64 {
        self.eta1 * (TAU * x).cos() + self.eta2 * (2.0 * TAU * x).sin()
    }
}

impl MapModel for SkewModel {
    fn name(&self) -> &str {
        "skew"
    }

    fn params(&self) -> &Params {
        &self.params
    }

    fn eval_jet(&self, x: &TaylorJet, y: &TaylorJet) -> Result<(TaylorJet, TaylorJet)> {
        finite_or_domain("skew", &[x, y])?;
        let (s1, c1) = x.scale(TAU).sin_cos();
        let s2 = x.scale(2.0 * TAU).sin();
        let u = &x.add_const(self.omega) + &s1.scale(self.c);
        let v = &(&y.scale(self.l) + &c1.scale(self.eta1)) + &s2.scale(self.eta2);
        Ok((u, v))
    }

    fn dmap_jet(&self, x: &TaylorJet, _y: &TaylorJet) -> Result<JetMatrix> {
        let l = x.order();
        let (s1, c1) = x.scale(TAU).sin_cos();
        let c2 = x.scale(2.0 * TAU).cos();
        let da = c1.scale(self.c * TAU).add_const(1.0);
        let deta = &s1.scale(-self.eta1 * TAU) + &c2.scale(2.0 * TAU * self.eta2);
        Ok([
            [da, TaylorJet::zero(l)],
            [deta, TaylorJet::constant(l, self.l)],
        ])
    }
}

/// Dissipative standard-map-like family
/// `f(x, y) = (x + ω + ε₁y + c·sin 2πx, b·y + ε₂ sin 2πx)`.
#[derive(Debug, Clone)]
pub struct ForcedOscillatorModel {
    pub omega: f64,
    pub b: f64,
    pub c: f64,
    pub eps1: f64,
    pub eps2: f64,
    params: Params,
}

impl ForcedOscillatorModel {
    pub fn new(omega: f64, b: f64, c: f64, eps1: f64, eps2: f64) -> Self {
        let params = Params::new()
            .with("omega", omega)
            .with("b", b)
            .with("c", c)
            .with("eps1", eps1)
            .with("eps2", eps2);
        Self { omega, b, c, eps1, eps2, params }
    }

    fn from_params(p: &Params) -> Result<Self> {
        Ok(Self::new(
            p.require("omega")?,
            p.require("b")?,
            p.require("c")?,
            p.require("eps1")?,
            p.require("eps2")?,
        ))
    }
}

impl MapModel for ForcedOscillatorModel {
    fn name(&self) -> &str {
        "forced_oscillator"
    }

    fn params(&self) -> &Params {
        &self.params
    }

    fn eval_jet(&self, x: &TaylorJet, y: &TaylorJet) -> Result<(TaylorJet, TaylorJet)> {
        finite_or_domain("forced_oscillator", &[x, y])?;
        let s1 = x.scale(TAU).sin();
        let u = &(&x.add_const(self.omega) + &y.scale(self.eps1)) + &s1.scale(self.c);
        let v = &y.scale(self.b) + &s1.scale(self.eps2);
        Ok((u, v))
    }

    fn dmap_jet(&self, x: &TaylorJet, _y: &TaylorJet) -> Result<JetMatrix> {
        let l = x.order();
        let c1 = x.scale(TAU).cos();
        Ok([
            [c1.scale(self.c * TAU).add_const(1.0), TaylorJet::constant(l, self.eps1)],
            [c1.scale(self.eps2 * TAU), TaylorJet::constant(l, self.b)],
        ])
    }
}

/// One entry of a model's parameter schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub doc: &'static str,
}

pub type ModelConstructor = Arc<dyn Fn(&Params) -> Result<Box<dyn MapModel>> + Send + Sync>;

#[derive(Clone)]
struct Entry {
    schema: Vec<ParamSpec>,
    build: ModelConstructor,
}

/// Name → (schema, constructor) table. Additional models can be registered
/// at runtime alongside the built-ins.
#[derive(Clone, Default)]
pub struct ModelRegistry {
    entries: BTreeMap<String, Entry>,
}

impl fmt::Debug for ModelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

pub const GOLDEN_MEAN: f64 = 0.618_033_988_749_894_9;

impl ModelRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding `linear`, `skew` and `forced_oscillator`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(
            "linear",
            vec![
                ParamSpec { name: "omega", default: 0.3, doc: "rotation" },
                ParamSpec { name: "b", default: 0.5, doc: "normal contraction" },
            ],
            |p| Ok(Box::new(LinearModel::from_params(p)?)),
        );
        r.register(
            "skew",
            vec![
                ParamSpec { name: "omega", default: GOLDEN_MEAN, doc: "rotation" },
                ParamSpec { name: "c", default: 0.0413, doc: "amplitude of sin 2πx in α" },
                ParamSpec { name: "l", default: 0.5, doc: "normal contraction" },
                ParamSpec { name: "eta1", default: 0.1, doc: "cos 2πx forcing" },
                ParamSpec { name: "eta2", default: 0.05, doc: "sin 4πx forcing" },
            ],
            |p| Ok(Box::new(SkewModel::from_params(p)?)),
        );
        r.register(
            "forced_oscillator",
            vec![
                ParamSpec { name: "omega", default: GOLDEN_MEAN, doc: "rotation" },
                ParamSpec { name: "b", default: 0.5, doc: "normal contraction" },
                ParamSpec { name: "c", default: 0.02, doc: "amplitude of sin 2πx in x" },
                ParamSpec { name: "eps1", default: 0.1, doc: "y → x coupling" },
                ParamSpec { name: "eps2", default: 0.1, doc: "x → y forcing" },
            ],
            |p| Ok(Box::new(ForcedOscillatorModel::from_params(p)?)),
        );
        r
    }

    pub fn register(
        &mut self,
        name: &str,
        schema: Vec<ParamSpec>,
        build: impl Fn(&Params) -> Result<Box<dyn MapModel>> + Send + Sync + 'static,
    ) {
        self.entries
            .insert(name.to_string(), Entry { schema, build: Arc::new(build) });
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    pub fn schema(&self, name: &str) -> Result<&[ParamSpec]> {
        self.entries
            .get(name)
            .map(|e| e.schema.as_slice())
            .ok_or_else(|| Error::UnknownModel(name.to_string()))
    }

    /// Builds `name` with schema defaults overridden by `overrides`.
    /// Unknown parameter names are rejected.
    pub fn create(&self, name: &str, overrides: &Params) -> Result<Box<dyn MapModel>> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))?;
        let mut params = Params::new();
        for spec in &entry.schema {
            params.set(spec.name, spec.default);
        }
        for (k, v) in overrides.iter() {
            if !entry.schema.iter().any(|s| s.name == k) {
                return Err(Error::InvalidParameter(format!(
                    "model '{name}' has no parameter '{k}'"
                )));
            }
            params.set(k, v);
        }
        (entry.build)(&params)
    }
}

/// `f∘W`, computed pointwise on the grid with jets in `s`. The angular
/// component keeps the winding of `W₁`.
pub fn apply_map_jet(f: &dyn MapModel, w: &FtPair) -> Result<FtPair> {
    let n = w.n_modes();
    let xs = w.0[0].point_jets();
    let ys = w.0[1].point_jets();
    let images: Result<Vec<(TaylorJet, TaylorJet)>> = xs
        .par_iter()
        .zip(&ys)
        .map(|(x, y)| f.eval_jet(x, y))
        .collect();
    let (us, vs): (Vec<TaylorJet>, Vec<TaylorJet>) = images?.into_iter().unzip();
    Ok(FtPair([
        FourierTaylor::from_point_jets(n, w.0[0].winding(), &us)?,
        FourierTaylor::from_point_jets(n, w.0[1].winding(), &vs)?,
    ]))
}

/// `Df∘W` as a matrix of winding-zero expansions.
pub fn apply_dmap_jet(f: &dyn MapModel, w: &FtPair) -> Result<FtMatrix> {
    let n = w.n_modes();
    let xs = w.0[0].point_jets();
    let ys = w.0[1].point_jets();
    let mats: Result<Vec<JetMatrix>> = xs
        .par_iter()
        .zip(&ys)
        .map(|(x, y)| f.dmap_jet(x, y))
        .collect();
    let mats = mats?;
    let entry = |i: usize, j: usize| {
        let col: Vec<TaylorJet> = mats.iter().map(|m| m[i][j].clone()).collect();
        FourierTaylor::from_point_jets(n, 0, &col)
    };
    Ok(FtMatrix([[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]]))
}
