//! JSON persistence of solutions.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aposteriori::ConditionReport;
use crate::error::{Error, Result};
use crate::fourier::{CircleMap, PeriodicFunction};
use crate::models::Params;
use crate::newton::ConjugacyTriple;
use crate::taylor::{FourierTaylor, FtPair};

pub const FORMAT_VERSION: u32 = 1;

/// Serde adapter writing non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub ntheta: usize,
    pub order: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub winding: i32,
    /// `coeffs[j][k] = [re, im]` of the `k`-th Fourier mode of `u⁽ʲ⁾`.
    pub coeffs: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMapRecord {
    pub periodic_coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicRecord {
    pub coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format_version: u32,
    pub model: ModelSpec,
    pub discretization: Discretization,
    #[serde(rename = "W")]
    pub w: [ComponentRecord; 2],
    pub a: CircleMapRecord,
    pub lambda: PeriodicRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ConditionReport>,
}

fn component(u: &FourierTaylor) -> ComponentRecord {
    ComponentRecord {
        winding: u.winding(),
        coeffs: u.coeffs().iter().map(|c| c.to_pairs()).collect(),
    }
}

fn from_component(r: &ComponentRecord) -> Result<FourierTaylor> {
    let coeffs = r
        .coeffs
        .iter()
        .map(|c| PeriodicFunction::from_pairs(c))
        .collect::<Result<Vec<_>>>()?;
    FourierTaylor::new(coeffs, r.winding)
}

impl SolutionFile {
    pub fn new(
        model: &str,
        params: &Params,
        u: &ConjugacyTriple,
        report: Option<ConditionReport>,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            model: ModelSpec { name: model.to_string(), params: params.clone() },
            discretization: Discretization { ntheta: u.n_modes(), order: u.order(), delta: u.delta },
            w: [component(&u.w.0[0]), component(&u.w.0[1])],
            a: CircleMapRecord { periodic_coeffs: u.a.periodic_part().to_pairs() },
            lambda: PeriodicRecord { coeffs: u.lambda.to_pairs() },
            report,
        }
    }

    /// Rebuilds the triple, checking it against the recorded discretization.
    pub fn triple(&self) -> Result<ConjugacyTriple> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        let u = ConjugacyTriple {
            w: FtPair([from_component(&self.w[0])?, from_component(&self.w[1])?]),
            a: CircleMap::new(PeriodicFunction::from_pairs(&self.a.periodic_coeffs)?),
            lambda: PeriodicFunction::from_pairs(&self.lambda.coeffs)?,
            delta: self.discretization.delta,
        };
        u.check_structure()?;
        let d = self.discretization;
        if u.n_modes() != d.ntheta {
            return Err(Error::ModeMismatch { left: d.ntheta, right: u.n_modes() });
        }
        if u.order() != d.order {
            return Err(Error::OrderMismatch { left: d.order, right: u.order() });
        }
        Ok(u)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("malformed solution file: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&s)
    }
}
