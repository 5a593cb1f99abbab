//! Condition numbers of an approximate solution and a pass/fail verdict.
//!
//! All norms are grid estimators evaluated at the given triple only.

use serde::{Deserialize, Serialize};

use crate::cohomology::{dynamical_average, regularity_bound_from_norms};
use crate::io::float;
use crate::models::MapModel;
use crate::newton::{compute_error, ConjugacyTriple};

/// Threshold below which a log-norm counts as zero (rigid-rotation-like `a`).
const LOG_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `residual_small` requires `‖e‖_{X^{0,δ}}` below this.
    pub residual: f64,
    /// `frame_ok` requires `min |det DW⁽⁰⁾|` above this.
    pub frame_det: f64,
    /// `regularity_ok` requires `m_max ≥ min_m`.
    pub min_m: f64,
    /// Orbit length for the dynamical average.
    pub average_n: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { residual: 1e-8, frame_det: 1e-8, min_m: 2.0, average_n: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub contraction_ok: bool,
    pub regularity_ok: bool,
    pub frame_ok: bool,
    pub residual_small: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    #[serde(with = "float")]
    pub lambda_c0: f64,
    #[serde(with = "float")]
    pub lambda_star: f64,
    pub lambda_star_n: usize,
    #[serde(with = "float")]
    pub da_c0: f64,
    /// `‖(Da)⁻¹‖`.
    #[serde(with = "float")]
    pub da_inv_c0: f64,
    /// `‖D(a⁻¹)‖`.
    #[serde(with = "float")]
    pub dainv_c0: f64,
    /// Largest admissible regularity index, evaluated at the triple only
    /// (not minimized over a neighbourhood).
    #[serde(with = "float")]
    pub m_max: f64,
    /// `−ln‖λ‖ / ln‖Da‖` for the cohomological equations.
    #[serde(with = "float")]
    pub regularity_bound: f64,
    #[serde(with = "float")]
    pub residual_r0: f64,
    #[serde(with = "float")]
    pub residual_r1: f64,
    #[serde(with = "float")]
    pub residual_r2: f64,
    #[serde(with = "float")]
    pub frame_det_min: f64,
    /// Largest `‖u⁽ᴸ⁾‖δᴸ / Σ‖u⁽ʲ⁾‖δʲ` over the components of `W`.
    #[serde(with = "float")]
    pub taylor_tail_ratio: f64,
    /// Largest share of coefficient mass in the upper half of the Fourier
    /// spectrum, over all stored functions.
    #[serde(with = "float")]
    pub spectral_tail_ratio: f64,
    /// Smallest estimate over the components of `W`.
    #[serde(with = "float")]
    pub analyticity_radius: f64,
    #[serde(with = "float")]
    pub delta: f64,
    pub thresholds: Thresholds,
    pub flags: Flags,
    pub warnings: Vec<String>,
}

/// `min(−ln(λ‖Da⁻¹‖)/ln‖Da‖, −ln λ/ln‖D(a⁻¹)‖, −ln λ/ln‖Da‖) − 2`.
///
/// A term whose denominator is not positive is `+∞` if its numerator is
/// positive and `−∞` otherwise.
pub fn m_max_from_norms(lambda: f64, da: f64, da_inv: f64, dainv: f64) -> f64 {
    let term = |num: f64, den: f64| {
        if den > LOG_EPS {
            num / den
        } else if num > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    };
    let t1 = term(-(lambda * da_inv).ln(), da.ln());
    let t2 = term(-lambda.ln(), dainv.ln());
    let t3 = term(-lambda.ln(), da.ln());
    t1.min(t2).min(t3) - 2.0
}

fn nan_to_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Evaluates every diagnostic at `u`. Never fails: quantities that cannot be
/// computed are reported as `+∞` (or `0` for the frame) and flagged.
pub fn condition_report(f: &dyn MapModel, u: &ConjugacyTriple, th: &Thresholds) -> ConditionReport {
    let mut warnings = Vec::new();
    let lambda_c0 = u.lambda.sup_norm();
    let n_avg = th.average_n.max(1);
    let lambda_star = dynamical_average(&u.lambda, &u.a, n_avg).unwrap_or(f64::INFINITY);
    let da = u.a.derivative();
    let da_c0 = da.sup_norm();
    let da_min = da.grid_min();
    let da_inv_c0 = if da_min > 0.0 {
        da.map_grid(|v| 1.0 / v).sup_norm()
    } else {
        f64::INFINITY
    };
    let dainv_c0 = match u.a.invert() {
        Ok(inv) => inv.derivative().sup_norm(),
        Err(e) => {
            warnings.push(format!("a could not be inverted: {e}"));
            f64::INFINITY
        }
    };
    let m_max = nan_to_inf(m_max_from_norms(lambda_c0, da_c0, da_inv_c0, dainv_c0));
    let regularity_bound = regularity_bound_from_norms(lambda_c0, da_c0).unwrap_or(0.0);

    let (residual_r0, residual_r1, residual_r2) = match compute_error(f, u) {
        Ok(e) => {
            let norm = |r: f64| e.norm(r, u.delta).unwrap_or(f64::INFINITY);
            (norm(0.0), norm(1.0), norm(2.0))
        }
        Err(err) => {
            warnings.push(format!("error evaluation failed: {err}"));
            (f64::INFINITY, f64::INFINITY, f64::INFINITY)
        }
    };

    let frame_det_min = u.w.jacobian().compose_inner(&u.a, &u.lambda).min_abs_det0();
    let taylor_tail_ratio = u.w.0.iter().map(|c| c.tail_ratio(u.delta)).fold(0.0, f64::max);
    let spectral_tail_ratio = u
        .w
        .0
        .iter()
        .flat_map(|c| c.coeffs().iter())
        .chain([u.a.periodic_part(), &u.lambda])
        .map(|p| p.spectral_tail_ratio())
        .fold(0.0, f64::max);
    let analyticity_radius = if u.order() >= 4 {
        u.w.0
            .iter()
            .filter_map(|c| c.analyticity_radius().ok())
            .fold(f64::INFINITY, f64::min)
    } else {
        f64::INFINITY
    };
    if analyticity_radius < u.delta {
        warnings.push(format!(
            "analyticity radius estimate {analyticity_radius:.3e} is below delta {:.3e}",
            u.delta
        ));
    }

    let flags = Flags {
        contraction_ok: lambda_c0 < 1.0 || lambda_star < 1.0,
        regularity_ok: m_max >= th.min_m,
        frame_ok: frame_det_min > th.frame_det,
        residual_small: residual_r0 < th.residual,
    };
    ConditionReport {
        lambda_c0,
        lambda_star,
        lambda_star_n: n_avg,
        da_c0,
        da_inv_c0,
        dainv_c0,
        m_max,
        regularity_bound,
        residual_r0,
        residual_r1,
        residual_r2,
        frame_det_min,
        taylor_tail_ratio,
        spectral_tail_ratio,
        analyticity_radius,
        delta: u.delta,
        thresholds: *th,
        flags,
        warnings,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagResult {
    pub name: &'static str,
    pub ok: bool,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub flags: Vec<FlagResult>,
}

/// Re-evaluates the four flags of `report` against `th`.
pub fn verify_aposteriori(report: &ConditionReport, th: &Thresholds) -> Verdict {
    let r = report;
    let contraction = r.lambda_c0 < 1.0 || r.lambda_star < 1.0;
    let regularity = r.m_max >= th.min_m;
    let frame = r.frame_det_min > th.frame_det;
    let residual = r.residual_r0 < th.residual;
    let flags = vec![
        FlagResult {
            name: "contraction_ok",
            ok: contraction,
            explanation: format!(
                "lambda_c0 = {:.6}, lambda_star = {:.6} (need one of them < 1)",
                r.lambda_c0, r.lambda_star
            ),
        },
        FlagResult {
            name: "regularity_ok",
            ok: regularity,
            explanation: format!("m_max = {:.4} (need >= {})", r.m_max, th.min_m),
        },
        FlagResult {
            name: "frame_ok",
            ok: frame,
            explanation: format!("min |det DW| = {:.3e} (need > {:.1e})", r.frame_det_min, th.frame_det),
        },
        FlagResult {
            name: "residual_small",
            ok: residual,
            explanation: format!("residual = {:.3e} (need < {:.1e})", r.residual_r0, th.residual),
        },
    ];
    Verdict { passed: flags.iter().all(|f| f.ok), flags }
}
