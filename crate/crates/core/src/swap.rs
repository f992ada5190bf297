//! Entanglement swapping between two hybrid pairs: closed form and Fock-space oracle.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{click_click_element, homodyne_project, pure_loss};
use crate::error::{check_range, check_unit, HybridError, Result};
use crate::fock::operator::beamsplitter;
use crate::fock::{
    apply_povm_element, coherent_tail, DensityOperator, FockRegister, MixedState, PurifiedState, StateVector,
};
use crate::hybrid::he_state;
use crate::qkd::distance_to_transmittance;

const TRUNCATION_TOL: f64 = 1e-10;

/// How the two links to the midpoint station are specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Link {
    /// Both links share one transmittance.
    Symmetric { transmittance: f64 },
    /// Alice's and Bob's links differ.
    Asymmetric { t_a: f64, t_b: f64 },
    /// Total distance in km with the station midway, loss rate in dB/km.
    Distance { total_km: f64, loss_db_per_km: f64 },
}

impl Link {
    pub fn transmittances(&self) -> Result<(f64, f64)> {
        match *self {
            Link::Symmetric { transmittance } => {
                check_unit("transmittance", transmittance)?;
                Ok((transmittance, transmittance))
            }
            Link::Asymmetric { t_a, t_b } => {
                check_unit("t_a", t_a)?;
                check_unit("t_b", t_b)?;
                Ok((t_a, t_b))
            }
            Link::Distance {
                total_km,
                loss_db_per_km,
            } => {
                let t = distance_to_transmittance(total_km, loss_db_per_km)?;
                Ok((t, t))
            }
        }
    }

    /// The common per-link transmittance; asymmetric links have none.
    pub fn symmetric_transmittance(&self) -> Result<f64> {
        match self {
            Link::Asymmetric { t_a, t_b } if t_a != t_b => Err(HybridError::Unsupported(
                "closed forms cover symmetric links only".into(),
            )),
            _ => Ok(self.transmittances()?.0),
        }
    }

    pub fn loss_rate(&self) -> Option<f64> {
        match *self {
            Link::Distance { loss_db_per_km, .. } => Some(loss_db_per_km),
            _ => None,
        }
    }
}

/// Protocol operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub alpha: f64,
    pub link: Link,
    pub eta_h: f64,
    pub eta_o: f64,
    pub eta_d: f64,
    /// Homodyne outcome.
    pub p: f64,
}

impl ProtocolParams {
    /// Defaults: eta_h = 0.55, eta_o = 0.8, eta_d = 1, p = pi/2.
    pub fn new(alpha: f64, link: Link) -> Self {
        Self {
            alpha,
            link,
            eta_h: 0.55,
            eta_o: 0.8,
            eta_d: 1.0,
            p: FRAC_PI_2,
        }
    }

    pub fn with_eta_h(mut self, eta_h: f64) -> Self {
        self.eta_h = eta_h;
        self
    }

    pub fn with_eta_o(mut self, eta_o: f64) -> Self {
        self.eta_o = eta_o;
        self
    }

    pub fn with_eta_d(mut self, eta_d: f64) -> Self {
        self.eta_d = eta_d;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_link(mut self, link: Link) -> Self {
        self.link = link;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_range("alpha", self.alpha, 0.0, f64::MAX, "[0, inf)")?;
        check_unit("eta_h", self.eta_h)?;
        check_unit("eta_o", self.eta_o)?;
        check_unit("eta_d", self.eta_d)?;
        check_range("p", self.p, f64::MIN, f64::MAX, "finite reals")?;
        self.link.transmittances()?;
        Ok(())
    }
}

/// Closed-form heralded state and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSwapResult {
    /// Coherence damping e^{-4(1 - T eta_h) alpha^2}.
    pub h: f64,
    /// Phase of g in radians, 4 sqrt(T eta_h) alpha p.
    pub g_phase: f64,
    /// Click-click probability (1 - e^{-eta_o T alpha^2})^2 / 2.
    pub p0: f64,
    /// State on ("a1", "b1").
    pub rho_shared: DensityOperator,
}

impl AnalyticSwapResult {
    pub fn g(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.g_phase)
    }
}

/// 1/2 [|01><01| + |10><10| + h (g |01><10| + g* |10><01|)] on ("a1", "b1").
pub fn shared_state(h: f64, g_phase: f64) -> DensityOperator {
    let g = Complex64::from_polar(1.0, g_phase);
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    m[(1, 1)] = Complex64::new(0.5, 0.0);
    m[(2, 2)] = Complex64::new(0.5, 0.0);
    m[(1, 2)] = g * (0.5 * h);
    m[(2, 1)] = g.conj() * (0.5 * h);
    let reg = FockRegister::new([("a1", 2), ("b1", 2)]).expect("static register");
    DensityOperator::new(reg, m).expect("4x4 matches register")
}

pub fn analytic_final_state(params: &ProtocolParams) -> Result<AnalyticSwapResult> {
    params.validate()?;
    let t = params.link.symmetric_transmittance()?;
    let a = params.alpha;
    let h = (-4.0 * (1.0 - t * params.eta_h) * a * a).exp();
    let g_phase = 4.0 * (t * params.eta_h).sqrt() * a * params.p;
    let p0 = (1.0 - (-params.eta_o * t * a * a).exp()).powi(2) / 2.0;
    Ok(AnalyticSwapResult {
        h,
        g_phase,
        p0,
        rho_shared: shared_state(h, g_phase),
    })
}

/// Result of the brute-force simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSwapResult {
    /// Normalized heralded state on ("a1", "b1").
    pub rho: DensityOperator,
    /// Click-click probability.
    pub p0: f64,
    /// Homodyne weight of the normalized post-click state.
    pub homodyne_weight: f64,
}

fn check_truncation(params: &ProtocolParams, cv_dim: usize) -> Result<()> {
    let (ta, tb) = params.link.transmittances()?;
    let peak = 2.0 * ta.max(tb).sqrt() * params.alpha;
    let tail = coherent_tail(Complex64::new(peak, 0.0), cv_dim);
    if tail > TRUNCATION_TOL {
        return Err(HybridError::Truncation(format!(
            "amplitude {peak} leaves weight {tail:e} beyond {cv_dim} levels"
        )));
    }
    Ok(())
}

/// Modes (a1, a2, b1, b2, c) as they arrive at the station: both pairs after their
/// links, plus Bob's reference |sqrt(2 t_b) alpha> in c.
pub fn oracle_input_state(params: &ProtocolParams, cv_dim: usize) -> Result<PurifiedState> {
    params.validate()?;
    check_truncation(params, cv_dim)?;
    let (ta, tb) = params.link.transmittances()?;
    let alice = pure_loss(
        &PurifiedState::from_pure(&he_state(params.alpha, "a1", "a2", cv_dim)?),
        "a2",
        ta,
    )?;
    let bob = pure_loss(
        &PurifiedState::from_pure(&he_state(params.alpha, "b1", "b2", cv_dim)?),
        "b2",
        tb,
    )?;
    let reference = PurifiedState::from_pure(&StateVector::coherent_ket(
        "c",
        Complex64::new((2.0 * tb).sqrt() * params.alpha, 0.0),
        cv_dim,
    )?);
    PurifiedState::tensor(&[&alice, &bob, &reference])
}

/// After the two balanced beam splitters on (a2, b2) and (a2, c).
pub fn oracle_mixed_state(params: &ProtocolParams, cv_dim: usize) -> Result<PurifiedState> {
    let input = oracle_input_state(params, cv_dim)?;
    let d = cv_dim;
    input
        .conjugate(&beamsplitter(0.5, ("a2", d), ("b2", d)))?
        .conjugate(&beamsplitter(0.5, ("a2", d), ("c", d)))
}

pub fn oracle_final_state(params: &ProtocolParams, cv_dim: usize) -> Result<OracleSwapResult> {
    let mixed = oracle_mixed_state(params, cv_dim)?;
    let click = click_click_element(params.eta_o, ("a2", cv_dim), ("c", cv_dim))?;
    let heralded = apply_povm_element(&mixed, &click)?;
    if heralded.degenerate {
        return Err(HybridError::NoSolution(
            "click-click outcome has zero probability".into(),
        ));
    }
    let post = heralded.state.trace_out(&["a2", "c"])?.normalized()?;
    let (un, weight) = homodyne_project(&post, "b2", params.p, params.eta_h)?;
    Ok(OracleSwapResult {
        rho: un.normalized()?.to_density(),
        p0: heralded.probability,
        homodyne_weight: weight,
    })
}

/// log2(1 + h).
pub fn shared_logneg(h: f64) -> f64 {
    (1.0 + h).log2()
}

/// P0 log2(1 + h).
pub fn effective_logneg(params: &ProtocolParams) -> Result<f64> {
    let r = analytic_final_state(params)?;
    Ok(r.p0 * shared_logneg(r.h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Total distance in km; the fixed link supplies the loss rate.
    Distance,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub shared_logneg: f64,
    pub effective_logneg: f64,
    pub p0: f64,
    pub h: f64,
}

pub fn sweep_entanglement(axis: SweepAxis, grid: &[f64], fixed: &ProtocolParams) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(HybridError::Shape("empty sweep grid".into()));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(HybridError::Shape("sweep grid must be strictly monotone".into()));
    }
    let loss = match axis {
        SweepAxis::Distance => Some(
            fixed
                .link
                .loss_rate()
                .ok_or_else(|| HybridError::Unsupported("distance sweep needs a distance-specified link".into()))?,
        ),
        SweepAxis::Alpha => None,
    };
    grid.par_iter()
        .map(|&x| {
            let params = match loss {
                Some(l) => fixed.with_link(Link::Distance {
                    total_km: x,
                    loss_db_per_km: l,
                }),
                None => fixed.with_alpha(x),
            };
            let r = analytic_final_state(&params)?;
            let shared = shared_logneg(r.h);
            Ok(SweepRow {
                x,
                shared_logneg: shared,
                effective_logneg: r.p0 * shared,
                p0: r.p0,
                h: r.h,
            })
        })
        .collect()
}
