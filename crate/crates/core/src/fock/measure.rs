use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::{hermitian_eigen, hermitian_eigenvalues, DensityOperator};
use super::operator::LocalOperator;
use super::register::ModeSplit;
use super::MixedState;
use crate::error::{HybridError, Result};

const POVM_TOL: f64 = 1e-9;

/// A positive operator 0 <= E <= I on a few modes, with its square root.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    element: LocalOperator,
    sqrt: LocalOperator,
}

impl PovmElement {
    pub fn from_hermitian(labels: &[&str], dims: &[usize], matrix: &DMatrix<Complex64>) -> Result<Self> {
        let defect = (matrix - matrix.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if defect > POVM_TOL {
            return Err(HybridError::InvalidPovm(format!("not Hermitian (defect {defect:e})")));
        }
        let eig = hermitian_eigen(matrix);
        for &v in eig.eigenvalues.iter() {
            check_eigenvalue(v)?;
        }
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(v.clamp(0.0, 1.0).sqrt(), 0.0)));
        let sqrt = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
        Ok(Self {
            element: LocalOperator::from_dense(labels, dims, matrix)?,
            sqrt: LocalOperator::from_dense(labels, dims, &sqrt)?,
        })
    }

    /// Element diagonal in the joint Fock basis of `labels`.
    pub fn diagonal(labels: &[&str], dims: &[usize], weights: &[f64]) -> Result<Self> {
        for &w in weights {
            check_eigenvalue(w)?;
        }
        let e: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        let s: Vec<Complex64> = weights
            .iter()
            .map(|&w| Complex64::new(w.clamp(0.0, 1.0).sqrt(), 0.0))
            .collect();
        Ok(Self {
            element: LocalOperator::diagonal(labels, dims, &e)?,
            sqrt: LocalOperator::diagonal(labels, dims, &s)?,
        })
    }

    pub fn element(&self) -> &LocalOperator {
        &self.element
    }

    pub fn sqrt(&self) -> &LocalOperator {
        &self.sqrt
    }
}

fn check_eigenvalue(v: f64) -> Result<()> {
    if !(-POVM_TOL..=1.0 + POVM_TOL).contains(&v) {
        return Err(HybridError::InvalidPovm(format!("eigenvalue {v} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct PovmOutcome<S> {
    /// sqrt(E) rho sqrt(E), not renormalized.
    pub state: S,
    pub probability: f64,
    /// Outcome has zero probability; `state` is the zero operator.
    pub degenerate: bool,
}

pub fn apply_povm_element<S: MixedState>(rho: &S, element: &PovmElement) -> Result<PovmOutcome<S>> {
    let state = rho.conjugate(&element.sqrt)?;
    let probability = state.trace();
    Ok(PovmOutcome {
        degenerate: probability.is_nan() || probability <= 0.0,
        state,
        probability,
    })
}

/// log2 of the trace norm of the partial transpose over `split.subsystem_b`.
pub fn log_negativity(rho: &DensityOperator, split: &ModeSplit) -> Result<f64> {
    let t = rho.trace().re;
    if (t - 1.0).abs() > 1e-9 {
        return Err(HybridError::NotNormalized(t));
    }
    let pt = rho.partial_transpose(split)?;
    let norm: f64 = hermitian_eigenvalues(&pt).iter().map(|v| v.abs()).sum();
    let en = norm.log2();
    Ok(if en < 0.0 && en > -1e-9 { 0.0 } else { en })
}

/// Shannon entropy in bits, with 0 log 0 = 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}
