//! Hybrid entangled states: construction, generation circuit, and the lossy two-mode state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::pure_loss;
use crate::error::{check_range, check_unit, HybridError, Result};
use crate::fock::operator::beamsplitter;
use crate::fock::{
    coherent_tail, displacement_op, log_negativity, DensityOperator, FockRegister, MixedState, ModeSplit,
    PurifiedState, StateVector,
};
use crate::numerics::grid_then_golden;

pub const DV_DIM: usize = 2;
pub const DEFAULT_CV_DIM: usize = 24;
const TRUNCATION_TOL: f64 = 1e-10;

/// (|0>|alpha> + |1>|-alpha>)/sqrt2 with a truncated coherent mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HEStateSpec {
    pub alpha: f64,
    pub cv_dim: usize,
}

impl HEStateSpec {
    pub fn new(alpha: f64, cv_dim: usize) -> Result<Self> {
        check_range("alpha", alpha, 0.0, f64::MAX, "[0, inf)")?;
        if cv_dim < 2 {
            return Err(HybridError::InvalidDimension(format!(
                "cv_dim must be >= 2, got {cv_dim}"
            )));
        }
        Ok(Self { alpha, cv_dim })
    }
}

/// HE state on modes ("dv", "cv").
pub fn make_he_state(spec: &HEStateSpec) -> Result<StateVector> {
    he_state(spec.alpha, "dv", "cv", spec.cv_dim)
}

/// HE state on the given labels.
pub fn he_state(alpha: f64, dv: &str, cv: &str, cv_dim: usize) -> Result<StateVector> {
    let zero = StateVector::tensor(&[
        &StateVector::fock_ket(dv, 0, DV_DIM)?,
        &StateVector::coherent_ket(cv, Complex64::new(alpha, 0.0), cv_dim)?,
    ])?;
    let one = StateVector::tensor(&[
        &StateVector::fock_ket(dv, 1, DV_DIM)?,
        &StateVector::coherent_ket(cv, Complex64::new(-alpha, 0.0), cv_dim)?,
    ])?;
    let amps = (zero.amplitudes() + one.amplitudes()) * Complex64::new(0.5f64.sqrt(), 0.0);
    StateVector::new(zero.register().clone(), amps)?.normalized()
}

/// E_N of the lossless HE state from its Schmidt coefficients (1 +- e^{-2 alpha^2})/2.
pub fn he_logneg_schmidt(alpha: f64) -> f64 {
    let s = (-2.0 * alpha * alpha).exp();
    let (lp, lm) = ((1.0 + s) / 2.0, (1.0 - s) / 2.0);
    ((lp.sqrt() + lm.sqrt()).powi(2)).log2()
}

/// HE state after loss R on its coherent mode, in a 2x2 orthonormal coherent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LossyHEState {
    pub alpha: f64,
    pub loss: f64,
    state: DensityOperator,
}

impl LossyHEState {
    /// 4x4 matrix on ("dv", "cv"), cv spanned by the even/odd combinations of |+-beta>.
    pub fn gram_matrix(&self) -> &DensityOperator {
        &self.state
    }

    pub fn logneg(&self) -> Result<f64> {
        let split = ModeSplit::bipartition(self.state.register(), &["dv"])?;
        log_negativity(&self.state, &split)
    }
}

pub fn lossy_he_analytic(alpha: f64, r: f64) -> Result<LossyHEState> {
    check_range("alpha", alpha, 0.0, f64::MAX, "[0, inf)")?;
    check_unit("R", r)?;
    let beta2 = (1.0 - r) * alpha * alpha;
    let s = (-2.0 * beta2).exp();
    let damp = (-2.0 * r * alpha * alpha).exp();
    let (cp, cm) = (((1.0 + s) / 2.0).sqrt(), ((1.0 - s) / 2.0).max(0.0).sqrt());
    // |+-beta> = cp |even> +- cm |odd>
    let v = [[cp, cm], [cp, -cm]];
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let w = if i == j { 0.5 } else { 0.5 * damp };
            for k in 0..2 {
                for l in 0..2 {
                    m[(2 * i + k, 2 * j + l)] = Complex64::new(w * v[i][k] * v[j][l], 0.0);
                }
            }
        }
    }
    let state = DensityOperator::new(FockRegister::new([("dv", 2), ("cv", 2)])?, m)?;
    Ok(LossyHEState { alpha, loss: r, state })
}

pub fn lossy_he_logneg(alpha: f64, r: f64) -> Result<f64> {
    lossy_he_analytic(alpha, r)?.logneg()
}

/// The same quantity by simulating the loss beam splitter in the Fock basis.
pub fn lossy_he_logneg_oracle(alpha: f64, r: f64, cv_dim: usize) -> Result<f64> {
    check_unit("R", r)?;
    let psi = make_he_state(&HEStateSpec::new(alpha, cv_dim)?)?;
    let rho = pure_loss(&PurifiedState::from_pure(&psi), "cv", 1.0 - r)?.to_density();
    let split = ModeSplit::bipartition(rho.register(), &["dv"])?;
    log_negativity(&rho.normalized()?, &split)
}

/// Gain g maximizing |<g alpha| b^dag |alpha>|^2 / <alpha| b b^dag |alpha>.
pub fn amplification_factor(alpha: f64) -> Result<f64> {
    check_range("alpha", alpha, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
    let a2 = alpha * alpha;
    let q = |g: f64| g * g * a2 * (-(g - 1.0).powi(2) * a2).exp() / (1.0 + a2);
    let hi = 2.0 + 2.0 / alpha;
    let (g, _) = grid_then_golden(q, 1.0, hi, (hi - 1.0) / 1000.0, 1e-6)?;
    Ok(g)
}

/// Output of the photon-addition generation circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationResult {
    /// Heralded, displaced state on ("a", "b").
    pub output_state: DensityOperator,
    /// Probability of the D1-click / D2-no-click pattern per attempt.
    pub success_prob: f64,
    /// Same pattern conditioned on exactly one of the two heralding patterns firing.
    pub heralding_fraction: f64,
    /// |<HE(alpha_f)|out>|^2.
    pub fidelity_ideal: f64,
    pub alpha_f: f64,
    pub gain: f64,
}

/// Exact simulation of the generation circuit.
///
/// Modes: DV `a`, coherent input `b`, photon-addition ports `c`, `d`. Single photons
/// enter `c` and `d`; beam splitters with transmittance `t_add` mix (a, c) and (b, d);
/// c and d meet on a tau beam splitter, tau = (1+alpha^2)/(2+alpha^2); the heralding
/// pattern is one photon in c and vacuum in d; finally b is displaced by -(1+g) alpha/2.
pub fn generate_he_pipeline(alpha: f64, t_add: f64, cv_dim: usize) -> Result<GenerationResult> {
    if !(t_add > 0.0 && t_add < 1.0) {
        return Err(HybridError::Domain {
            name: "T_add",
            value: t_add,
            domain: "(0, 1)",
        });
    }
    let gain = amplification_factor(alpha)?;
    let shift = (1.0 + gain) * alpha / 2.0;
    let alpha_f = (gain - 1.0) * alpha / 2.0;
    for (what, amp) in [("input", alpha), ("displacement", shift), ("target", alpha_f)] {
        let tail = coherent_tail(Complex64::new(amp, 0.0), cv_dim);
        if tail > TRUNCATION_TOL {
            return Err(HybridError::Truncation(format!(
                "{what} amplitude {amp} leaves weight {tail:e} beyond {cv_dim} levels"
            )));
        }
    }
    let d = cv_dim;
    let ac = StateVector::tensor(&[
        &StateVector::fock_ket("a", 0, DV_DIM)?,
        &StateVector::fock_ket("c", 1, d)?,
    ])?
    .apply(&beamsplitter(t_add, ("a", DV_DIM), ("c", d)))?;
    let bd = StateVector::tensor(&[
        &StateVector::coherent_ket("b", Complex64::new(alpha, 0.0), d)?,
        &StateVector::fock_ket("d", 1, d)?,
    ])?
    .apply(&beamsplitter(t_add, ("b", d), ("d", d)))?;
    let tau = (1.0 + alpha * alpha) / (2.0 + alpha * alpha);
    let mixed = StateVector::tensor(&[&ac, &bd])?.apply(&beamsplitter(tau, ("c", d), ("d", d)))?;
    let joint = PurifiedState::from_pure(&mixed);

    let fock = |n: usize| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[n] = Complex64::new(1.0, 0.0);
        v
    };
    let herald = joint.contract("c", &fock(1))?.contract("d", &fock(0))?;
    let other = joint.contract("c", &fock(0))?.contract("d", &fock(1))?;
    let success_prob = herald.trace();
    let other_prob = other.trace();
    if success_prob.is_nan() || success_prob <= 0.0 {
        return Err(HybridError::NoSolution("heralding pattern has zero probability".into()));
    }
    let out = herald
        .normalized()?
        .conjugate(&displacement_op("b", Complex64::new(-shift, 0.0), d)?)?;
    let target = PurifiedState::from_pure(&he_state(alpha_f, "a", "b", d)?);
    let output_state = out.to_density();
    Ok(GenerationResult {
        fidelity_ideal: target.overlap(&out)? / out.trace(),
        output_state: output_state.normalized()?,
        success_prob,
        heralding_fraction: success_prob / (success_prob + other_prob),
        alpha_f,
        gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dv_split(rho: &DensityOperator) -> ModeSplit {
        ModeSplit::bipartition(rho.register(), &["dv"]).unwrap()
    }

    #[test]
    fn zero_amplitude_is_product() {
        let psi = make_he_state(&HEStateSpec::new(0.0, 8).unwrap()).unwrap();
        assert!((psi.amplitude(&[0, 0]).unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((psi.amplitude(&[1, 0]).unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);
        let rho = DensityOperator::from_pure(&psi);
        assert!(log_negativity(&rho, &dv_split(&rho)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn he_state_logneg_matches_schmidt_form() {
        let rho = DensityOperator::from_pure(&make_he_state(&HEStateSpec::new(0.5, 24).unwrap()).unwrap());
        let en = log_negativity(&rho, &dv_split(&rho)).unwrap();
        assert!((en - he_logneg_schmidt(0.5)).abs() < 1e-10);
        assert!((en - 0.844031).abs() < 2e-6);
    }

    #[test]
    fn he_states_are_normalized() {
        for k in 1..=8 {
            let psi = make_he_state(&HEStateSpec::new(0.1 * k as f64, 24).unwrap()).unwrap();
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(HEStateSpec::new(-0.1, 24).is_err());
        assert!(HEStateSpec::new(0.5, 1).is_err());
    }

    #[test]
    fn lossy_state_limits() {
        let r0 = lossy_he_logneg(0.5, 0.0).unwrap();
        assert!((r0 - he_logneg_schmidt(0.5)).abs() < 1e-9);
        assert!(lossy_he_logneg(0.0, 0.4).unwrap().abs() < 1e-12);
        assert!(lossy_he_logneg(0.0, 1.0).unwrap().abs() < 1e-12);
        assert!(lossy_he_logneg(1.5, 1.0).unwrap().abs() < 1e-12);
        assert!(lossy_he_logneg(3.0, 0.0).unwrap() > 0.999);
    }

    #[test]
    fn lossy_state_is_valid_and_damped() {
        let s = lossy_he_analytic(0.6, 0.3).unwrap();
        let rho = s.gram_matrix();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-12);
        // DV coherence = damping x pure-state coherence
        let dv = rho.partial_trace(&["dv"]).unwrap();
        let expected = 0.5 * (-2.0 * 0.3 * 0.36f64).exp() * (-2.0 * 0.7 * 0.36f64).exp();
        assert!((dv.matrix()[(0, 1)].re - expected).abs() < 1e-12);
    }

    #[test]
    fn pure_loss_damping_factor() {
        // off-diagonal block weight e^{-2 R alpha^2} at alpha=0.5, R=0.5
        let psi = make_he_state(&HEStateSpec::new(0.5, 24).unwrap()).unwrap();
        let rho = pure_loss(&DensityOperator::from_pure(&psi), "cv", 0.5).unwrap();
        let dv = rho.partial_trace(&["dv"]).unwrap();
        let beta_overlap = (-2.0 * 0.5 * 0.25f64).exp();
        assert!((dv.matrix()[(0, 1)].re / (0.5 * beta_overlap) - 0.778801).abs() < 1e-6);
        assert!((dv.matrix()[(0, 1)].re / (0.5 * beta_overlap) - (-0.25f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn analytic_matches_oracle() {
        let a = lossy_he_logneg(0.5, 0.5).unwrap();
        let o = lossy_he_logneg_oracle(0.5, 0.5, 24).unwrap();
        assert!((a - o).abs() < 1e-8, "{a} vs {o}");
        assert!((a - 0.5399339).abs() < 1e-6);
    }

    #[test]
    fn amplification_factor_closed_form() {
        for &a in &[0.1, 0.3, 0.5, 1.0] {
            let g = amplification_factor(a).unwrap();
            let closed = (1.0 + (1.0 + 4.0 / (a * a)).sqrt()) / 2.0;
            assert_relative_eq!(g, closed, max_relative = 1e-5);
        }
        assert!(amplification_factor(0.0).is_err());
    }

    #[test]
    fn generation_ranges() {
        let r = generate_he_pipeline(0.5, 0.5, 24).unwrap();
        assert!(r.success_prob > 0.0 && r.success_prob < 1.0);
        assert!(r.fidelity_ideal > 0.0 && r.fidelity_ideal <= 1.0);
        assert!(r.heralding_fraction > 0.0 && r.heralding_fraction < 1.0);
        let rho = &r.output_state;
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        assert!(rho.hermiticity_defect() < 1e-10);
        assert!(rho.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn generation_small_amplitude_fixture() {
        let r = generate_he_pipeline(0.1, 0.5, 24).unwrap();
        assert!(
            (r.fidelity_ideal - 0.673_743_579_5).abs() < 1e-6,
            "{}",
            r.fidelity_ideal
        );
        assert!((r.success_prob - 0.248_762_401_6).abs() < 1e-6, "{}", r.success_prob);
        let wider = generate_he_pipeline(0.1, 0.5, 30).unwrap();
        assert!((wider.fidelity_ideal - r.fidelity_ideal).abs() < 1e-8);
    }

    #[test]
    fn generation_vanishes_without_photon_addition() {
        let p1 = generate_he_pipeline(0.3, 1.0 - 1e-3, 24).unwrap().success_prob;
        let p2 = generate_he_pipeline(0.3, 1.0 - 1e-4, 24).unwrap().success_prob;
        assert!(p1 < 5e-3);
        assert!((p1 / p2 - 10.0).abs() < 0.1, "{}", p1 / p2);
    }

    #[test]
    fn generation_domain() {
        assert!(generate_he_pipeline(0.5, 0.0, 24).is_err());
        assert!(generate_he_pipeline(0.5, 1.0, 24).is_err());
        assert!(matches!(
            generate_he_pipeline(3.0, 0.5, 8),
            Err(HybridError::Truncation(_))
        ));
    }
}
