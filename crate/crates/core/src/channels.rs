//! Bosonic channels and detector models.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, check_unit, Result};
use crate::fock::operator::beamsplitter;
use crate::fock::{MixedState, PovmElement};

/// A lossy channel, optionally with thermal noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub transmittance: f64,
    pub n_bar: f64,
}

impl ChannelSpec {
    pub fn new(transmittance: f64, n_bar: f64) -> Result<Self> {
        check_unit("transmittance", transmittance)?;
        check_range("n_bar", n_bar, 0.0, f64::MAX, "[0, inf)")?;
        Ok(Self { transmittance, n_bar })
    }

    pub fn pure(transmittance: f64) -> Result<Self> {
        Self::new(transmittance, 0.0)
    }

    /// x = n/(1+n).
    pub fn x(&self) -> f64 {
        self.n_bar / (1.0 + self.n_bar)
    }

    /// Loss fraction R = 1 - T.
    pub fn loss(&self) -> f64 {
        1.0 - self.transmittance
    }

    pub fn apply<S: MixedState>(&self, rho: &S, mode: &str) -> Result<S> {
        thermal_loss(rho, mode, self.transmittance, self.n_bar)
    }
}

/// Efficiencies of the on-off, homodyne and qubit detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub eta_onoff: f64,
    pub eta_homodyne: f64,
    pub eta_dv: f64,
}

impl DetectorSpec {
    pub fn new(eta_onoff: f64, eta_homodyne: f64, eta_dv: f64) -> Result<Self> {
        check_unit("eta_o", eta_onoff)?;
        check_unit("eta_h", eta_homodyne)?;
        check_unit("eta_d", eta_dv)?;
        Ok(Self {
            eta_onoff,
            eta_homodyne,
            eta_dv,
        })
    }

    pub fn ideal() -> Self {
        Self {
            eta_onoff: 1.0,
            eta_homodyne: 1.0,
            eta_dv: 1.0,
        }
    }
}

/// Factor of the vacuum: a single column |0>.
pub fn vacuum_factor(dim: usize) -> DMatrix<Complex64> {
    let mut f = DMatrix::zeros(dim, 1);
    f[(0, 0)] = Complex64::new(1.0, 0.0);
    f
}

/// Factor of a thermal state truncated at `dim`: columns sqrt(p_n)|n>, renormalized.
pub fn thermal_factor(n_bar: f64, dim: usize) -> Result<DMatrix<Complex64>> {
    check_range("n_bar", n_bar, 0.0, f64::MAX, "[0, inf)")?;
    if n_bar == 0.0 {
        return Ok(vacuum_factor(dim));
    }
    let x = n_bar / (1.0 + n_bar);
    let tail = x.powi(dim as i32);
    if tail > 1e-12 {
        log::warn!("thermal state with n_bar = {n_bar} truncated at {dim} levels drops weight {tail:e}");
    }
    let mut probs: Vec<f64> = (0..dim).map(|n| (1.0 - x) * x.powi(n as i32)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    let mut f = DMatrix::zeros(dim, dim);
    for (n, p) in probs.iter().enumerate() {
        f[(n, n)] = Complex64::new(p.sqrt(), 0.0);
    }
    Ok(f)
}

fn loss_with_ancilla<S: MixedState>(rho: &S, mode: &str, t: f64, ancilla: &DMatrix<Complex64>) -> Result<S> {
    check_unit("transmittance", t)?;
    let dim = rho.register().dim_of(mode)?;
    let env = rho.register().fresh_label(mode);
    let joint = rho.attach(&env, ancilla)?;
    let u = beamsplitter(t, (mode, dim), (&env, ancilla.nrows()));
    joint.conjugate(&u)?.trace_out(&[&env])
}

/// Beam splitter with a vacuum environment mode, environment discarded.
pub fn pure_loss<S: MixedState>(rho: &S, mode: &str, t: f64) -> Result<S> {
    let dim = rho.register().dim_of(mode)?;
    loss_with_ancilla(rho, mode, t, &vacuum_factor(dim))
}

/// Beam splitter with a thermal environment mode of mean occupation `n_bar`.
pub fn thermal_loss<S: MixedState>(rho: &S, mode: &str, t: f64, n_bar: f64) -> Result<S> {
    let dim = rho.register().dim_of(mode)?;
    loss_with_ancilla(rho, mode, t, &thermal_factor(n_bar, dim)?)
}

/// Diagonal weights of an inefficient on-off detector.
#[derive(Debug, Clone, PartialEq)]
pub struct OnOffPovm {
    /// (1 - eta)^n
    pub no_click: Vec<f64>,
    /// 1 - (1 - eta)^n
    pub click: Vec<f64>,
}

impl OnOffPovm {
    pub fn no_click_element(&self, label: &str) -> Result<PovmElement> {
        PovmElement::diagonal(&[label], &[self.no_click.len()], &self.no_click)
    }

    pub fn click_element(&self, label: &str) -> Result<PovmElement> {
        PovmElement::diagonal(&[label], &[self.click.len()], &self.click)
    }
}

pub fn onoff_povm(eta: f64, dim: usize) -> Result<OnOffPovm> {
    check_unit("eta_o", eta)?;
    let no_click: Vec<f64> = (0..dim).map(|n| (1.0 - eta).powi(n as i32)).collect();
    let click = no_click.iter().map(|p| 1.0 - p).collect();
    Ok(OnOffPovm { no_click, click })
}

/// Joint click on two modes, E_click (x) E_click.
pub fn click_click_element(eta: f64, (la, da): (&str, usize), (lb, db): (&str, usize)) -> Result<PovmElement> {
    let a = onoff_povm(eta, da)?.click;
    let b = onoff_povm(eta, db)?.click;
    let weights: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    PovmElement::diagonal(&[la, lb], &[da, db], &weights)
}

/// Fock-basis coefficients <P=p|n> of the quadrature kernel
/// <P|alpha> = pi^{-1/4} e^{-p^2/2} e^{-alpha^2 - i sqrt2 alpha p}.
pub fn homodyne_kernel(p: f64, dim: usize) -> Vec<Complex64> {
    let x = Complex64::new(0.0, -p);
    let pre = PI.powf(-0.25) * (-p * p / 2.0).exp();
    let mut u = Vec::with_capacity(dim);
    for n in 0..dim {
        let next = match n {
            0 => Complex64::new(1.0, 0.0),
            1 => x * 2f64.sqrt(),
            _ => {
                let k = (n - 1) as f64;
                x * (2.0 / (k + 1.0)).sqrt() * u[n - 1] - (k / (k + 1.0)).sqrt() * u[n - 2]
            }
        };
        u.push(next);
    }
    u.into_iter().map(|v| v * pre).collect()
}

/// Inefficient P-quadrature measurement with outcome `p` on `mode`.
///
/// Returns the unnormalized conditional state on the remaining modes and its weight.
pub fn homodyne_project<S: MixedState>(rho: &S, mode: &str, p: f64, eta: f64) -> Result<(S, f64)> {
    check_unit("eta_h", eta)?;
    let dim = rho.register().dim_of(mode)?;
    let lossy = if eta < 1.0 {
        pure_loss(rho, mode, eta)?
    } else {
        rho.trace_out(&[])?
    };
    let out = lossy.contract(mode, &homodyne_kernel(p, dim))?;
    let w = out.trace();
    Ok((out, w))
}
