use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operator::LocalOperator;
use super::register::FockRegister;
use crate::error::{HybridError, Result};

/// A ket over a truncated multimode Fock register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    register: FockRegister,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(register: FockRegister, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != register.total_dim() {
            return Err(HybridError::Shape(format!(
                "{} amplitudes for register dimension {}",
                amplitudes.len(),
                register.total_dim()
            )));
        }
        Ok(Self { register, amplitudes })
    }

    /// Truncated coherent state, renormalized after truncation.
    pub fn coherent_ket(label: &str, alpha: Complex64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(HybridError::InvalidDimension(format!(
                "coherent state needs dim >= 2, got {dim}"
            )));
        }
        let mut amps = DVector::<Complex64>::zeros(dim);
        amps[0] = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for n in 1..dim {
            amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
        }
        let norm = amps.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(HybridError::Truncation(format!(
                "coherent amplitude {alpha} cannot be represented in {dim} levels"
            )));
        }
        amps /= Complex64::new(norm, 0.0);
        Self::new(FockRegister::single(label, dim)?, amps)
    }

    pub fn fock_ket(label: &str, n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(HybridError::OutOfRange { index: n, dim });
        }
        let mut amps = DVector::<Complex64>::zeros(dim);
        amps[n] = Complex64::new(1.0, 0.0);
        Self::new(FockRegister::single(label, dim)?, amps)
    }

    /// Kronecker product; registers concatenated in argument order.
    pub fn tensor(states: &[&StateVector]) -> Result<Self> {
        let mut iter = states.iter();
        let first = iter
            .next()
            .ok_or_else(|| HybridError::Shape("tensor of an empty list".into()))?;
        let mut out = (*first).clone();
        for s in iter {
            let register = out.register.concat(&s.register)?;
            let amplitudes = out.amplitudes.kronecker(&s.amplitudes);
            out = Self { register, amplitudes };
        }
        Ok(out)
    }

    pub fn register(&self) -> &FockRegister {
        &self.register
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Amplitude at the given per-mode occupation numbers.
    pub fn amplitude(&self, occupation: &[usize]) -> Result<Complex64> {
        let modes = self.register.modes();
        if occupation.len() != modes.len() {
            return Err(HybridError::Shape("occupation length differs from mode count".into()));
        }
        let mut idx = 0;
        for (n, m) in occupation.iter().zip(modes) {
            if *n >= m.dim {
                return Err(HybridError::OutOfRange { index: *n, dim: m.dim });
            }
            idx = idx * m.dim + n;
        }
        Ok(self.amplitudes[idx])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(HybridError::NotNormalized(0.0));
        }
        Ok(Self {
            register: self.register.clone(),
            amplitudes: &self.amplitudes / Complex64::new(n, 0.0),
        })
    }

    /// Inner product <self|other>; registers must have identical shape.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        let same_shape = self.register.len() == other.register.len()
            && self
                .register
                .modes()
                .iter()
                .zip(other.register.modes())
                .all(|(a, b)| a.dim == b.dim);
        if !same_shape {
            return Err(HybridError::Shape("overlap of states with different shapes".into()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn apply(&self, op: &LocalOperator) -> Result<Self> {
        let mut data = DMatrix::from_column_slice(self.amplitudes.len(), 1, self.amplitudes.as_slice());
        op.apply_to_columns(&self.register, &mut data)?;
        Ok(Self {
            register: self.register.clone(),
            amplitudes: data.column(0).into_owned(),
        })
    }

    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        Ok(Self {
            register: self.register.relabeled(f)?,
            amplitudes: self.amplitudes.clone(),
        })
    }
}

/// Poisson weight beyond the truncation: sum over n >= dim of e^{-m} m^n / n!, m = |alpha|^2.
pub fn coherent_tail(alpha: Complex64, dim: usize) -> f64 {
    let m = alpha.norm_sqr();
    if m == 0.0 {
        return 0.0;
    }
    let ln_m = m.ln();
    let mut ln_term = -m;
    for n in 1..=dim {
        ln_term += ln_m - (n as f64).ln();
    }
    let mut sum = 0.0;
    let mut n = dim;
    loop {
        let term = ln_term.exp();
        sum += term;
        n += 1;
        ln_term += ln_m - (n as f64).ln();
        if (n as f64) > m && (term <= sum * 1e-17 || term == 0.0) {
            break;
        }
    }
    sum
}
