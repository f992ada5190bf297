//! Key-rate analysis, amplitude optimization, and the noisy-channel fidelity.

use serde::{Deserialize, Serialize};

use crate::channels::{pure_loss, thermal_loss};
use crate::error::{check_range, check_unit, HybridError, Result};
use crate::fock::PurifiedState;
use crate::hybrid::he_state;
use crate::numerics::grid_then_golden;
use crate::swap::{analytic_final_state, shared_logneg, Link, ProtocolParams};

const MAX_DISTANCE_KM: f64 = 1000.0;
const DISTANCE_TOL_KM: f64 = 0.01;

/// x log2 x with 0 log 0 = 0.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Detector-efficiency term (2-eta) log2(2-eta) - (1-eta) log2(1-eta).
fn detector_term(eta_d: f64) -> f64 {
    xlog2x(2.0 - eta_d) - xlog2x(1.0 - eta_d)
}

/// I(A:B) = (2 - eta_d) - [(2-eta_d) log2(2-eta_d) - (1-eta_d) log2(1-eta_d)].
pub fn mutual_information(eta_d: f64) -> f64 {
    (2.0 - eta_d) - detector_term(eta_d)
}

/// chi(A:E) = 1 - S_h/2 - detector_term/2, S_h = (1+h) log2(1+h) + (1-h) log2(1-h).
pub fn holevo_bound(h: f64, eta_d: f64) -> f64 {
    1.0 - 0.5 * (xlog2x(1.0 + h) + xlog2x(1.0 - h)) - 0.5 * detector_term(eta_d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRateBreakdown {
    pub i_ab: f64,
    pub chi_ae: f64,
    pub p0: f64,
    pub h: f64,
    /// P0 (I - chi) before clamping.
    pub raw: f64,
    /// max(0, raw), bits per pulse.
    pub r: f64,
}

pub fn key_rate(params: &ProtocolParams) -> Result<KeyRateBreakdown> {
    let s = analytic_final_state(params)?;
    let i_ab = mutual_information(params.eta_d);
    let chi_ae = holevo_bound(s.h, params.eta_d);
    let raw = s.p0 * (i_ab - chi_ae);
    Ok(KeyRateBreakdown {
        i_ab,
        chi_ae,
        p0: s.p0,
        h: s.h,
        raw,
        r: raw.max(0.0),
    })
}

/// Per-link transmittance with the station midway: 10^{-l (L/2) / 10}.
pub fn distance_to_transmittance(total_km: f64, loss_db_per_km: f64) -> Result<f64> {
    check_range("distance", total_km, 0.0, f64::MAX, "[0, inf)")?;
    check_range("loss rate", loss_db_per_km, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
    Ok(10f64.powf(-loss_db_per_km * (total_km / 2.0) / 10.0))
}

pub fn transmittance_to_distance(t: f64, loss_db_per_km: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(HybridError::Domain {
            name: "transmittance",
            value: t,
            domain: "(0, 1]",
        });
    }
    check_range("loss rate", loss_db_per_km, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
    Ok(-20.0 * t.log10() / loss_db_per_km)
}

/// Quantity maximized by [`optimize_alpha`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    KeyRate,
    EffectiveLogneg,
    /// Largest distance at which the key rate still reaches `r_target`.
    MaxDistance {
        r_target: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub value: f64,
}

/// Coarse 0.01 grid then golden-section refinement to 1e-4 in alpha.
pub fn optimize_alpha(objective: Objective, fixed: &ProtocolParams, range: (f64, f64)) -> Result<AlphaOptimum> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi <= 2.0 && lo <= hi) {
        return Err(HybridError::Domain {
            name: "alpha range",
            value: if lo > 0.0 { hi } else { lo },
            domain: "(0, 2]",
        });
    }
    let mut failure: Option<HybridError> = None;
    let f = |alpha: f64| -> f64 {
        let params = fixed.with_alpha(alpha);
        let value = match objective {
            Objective::KeyRate => key_rate(&params).map(|k| k.r),
            Objective::EffectiveLogneg => analytic_final_state(&params).map(|s| s.p0 * shared_logneg(s.h)),
            Objective::MaxDistance { r_target } => match max_distance(r_target, alpha, fixed) {
                Err(HybridError::NoSolution(_)) => Ok(0.0),
                other => other,
            },
        };
        value.unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::NEG_INFINITY
        })
    };
    let (alpha, value) = grid_then_golden(f, lo, hi, 0.01, 1e-4)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(AlphaOptimum { alpha, value }),
    }
}

/// Total distance in km at which the key rate falls to `r_target`, by bisection on [0, 1000] km.
///
/// The loss rate comes from `fixed.link`, which must be distance-specified.
pub fn max_distance(r_target: f64, alpha: f64, fixed: &ProtocolParams) -> Result<f64> {
    check_range("r_target", r_target, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
    let l = fixed
        .link
        .loss_rate()
        .ok_or_else(|| HybridError::Unsupported("max_distance needs a distance-specified link".into()))?;
    let rate = |km: f64| -> Result<f64> {
        let p = fixed.with_alpha(alpha).with_link(Link::Distance {
            total_km: km,
            loss_db_per_km: l,
        });
        Ok(key_rate(&p)?.r)
    };
    let (mut lo, mut hi) = (0.0, MAX_DISTANCE_KM);
    let (mut r_lo, mut r_hi) = (rate(lo)?, rate(hi)?);
    if r_lo <= r_target {
        return Err(HybridError::NoSolution(format!(
            "key rate {r_lo:e} at zero distance does not exceed {r_target:e}"
        )));
    }
    if r_hi > r_target {
        return Err(HybridError::NoSolution(format!(
            "key rate stays above {r_target:e} beyond {MAX_DISTANCE_KM} km"
        )));
    }
    while hi - lo > DISTANCE_TOL_KM {
        let mid = 0.5 * (lo + hi);
        let r_mid = rate(mid)?;
        if r_mid > r_lo || r_mid < r_hi {
            return Err(HybridError::NonMonotone { at: mid });
        }
        if r_mid > r_target {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// e^{-2 T x (1-T) alpha^2 / (1 - T x)} ((1 - x)/(1 - T x))^2 with x = n/(1+n).
pub fn channel_fidelity(t: f64, n_bar: f64, alpha: f64) -> Result<f64> {
    check_unit("transmittance", t)?;
    check_range("n_bar", n_bar, 0.0, f64::MAX, "[0, inf)")?;
    let x = n_bar / (1.0 + n_bar);
    let denom = 1.0 - t * x;
    Ok((-2.0 * t * x * (1.0 - t) * alpha * alpha / denom).exp() * ((1.0 - x) / denom).powi(2))
}

/// One point of the noisy-channel fidelity curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseFidelityPoint {
    pub t: f64,
    pub x: f64,
    pub alpha: f64,
    pub f: f64,
}

impl NoiseFidelityPoint {
    pub fn evaluate(t: f64, n_bar: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            t,
            x: n_bar / (1.0 + n_bar),
            alpha,
            f: channel_fidelity(t, n_bar, alpha)?,
        })
    }
}

/// Overlaps between the loss-only and loss-plus-noise four-mode states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityComparison {
    /// tr[rho_loss rho_noisy].
    pub raw: f64,
    /// raw / sqrt(tr rho_loss^2 tr rho_noisy^2).
    pub normalized: f64,
    pub purity_loss: f64,
    pub purity_noisy: f64,
}

/// Both HE pairs sent through pure loss and through thermal loss, compared numerically.
pub fn channel_fidelity_oracle(t: f64, n_bar: f64, alpha: f64, cv_dim: usize) -> Result<FidelityComparison> {
    check_unit("transmittance", t)?;
    let pair = PurifiedState::from_pure(&he_state(alpha, "a1", "a2", cv_dim)?);
    let loss = pure_loss(&pair, "a2", t)?;
    let noisy = thermal_loss(&pair, "a2", t, n_bar)?;
    let both = |s: &PurifiedState| -> Result<PurifiedState> {
        let bob = s.relabeled(|l| l.replace('a', "b"))?;
        PurifiedState::tensor(&[s, &bob])
    };
    let (r1, r2) = (both(&loss)?, both(&noisy)?);
    let raw = r1.overlap(&r2)?;
    let (p1, p2) = (r1.purity(), r2.purity());
    Ok(FidelityComparison {
        raw,
        normalized: raw / (p1 * p2).sqrt(),
        purity_loss: p1,
        purity_noisy: p2,
    })
}
