//! Truncated Fock-space linear algebra.

pub mod density;
pub mod measure;
pub mod operator;
pub mod purified;
pub mod register;
pub mod state;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use density::{hermitian_eigen, hermitian_eigenvalues, DensityOperator};
pub use measure::{apply_povm_element, log_negativity, shannon_entropy, von_neumann_entropy, PovmElement, PovmOutcome};
pub use operator::{beamsplitter_unitary, displacement_op, phase_rotation, LocalOperator};
pub use purified::PurifiedState;
pub use register::{FockRegister, Mode, ModeSplit};
pub use state::{coherent_tail, StateVector};

use crate::error::{HybridError, Result};

/// Operations shared by the dense and factored mixed-state representations.
pub trait MixedState: Sized {
    fn register(&self) -> &FockRegister;

    /// O rho O^dag for an operator on a subset of modes.
    fn conjugate(&self, op: &LocalOperator) -> Result<Self>;

    /// Appends a single-mode ancilla given by its factor (dim x k, rho_anc = A A^dag).
    fn attach(&self, label: &str, ancilla: &DMatrix<Complex64>) -> Result<Self>;

    fn trace_out(&self, labels: &[&str]) -> Result<Self>;

    /// <phi| rho |phi> on one mode, with bra[n] = <phi|n>; the mode is removed.
    fn contract(&self, label: &str, bra: &[Complex64]) -> Result<Self>;

    fn trace(&self) -> f64;

    fn scaled(&self, s: f64) -> Self;

    fn to_density(&self) -> DensityOperator;

    fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0 && t.is_finite()) {
            return Err(HybridError::NotNormalized(t));
        }
        Ok(self.scaled(1.0 / t))
    }
}

impl MixedState for DensityOperator {
    fn register(&self) -> &FockRegister {
        DensityOperator::register(self)
    }

    fn conjugate(&self, op: &LocalOperator) -> Result<Self> {
        let reg = DensityOperator::register(self);
        let mut m = self.matrix().clone();
        op.apply_to_columns(reg, &mut m)?;
        let mut m = m.adjoint();
        op.apply_to_columns(reg, &mut m)?;
        DensityOperator::new(reg.clone(), m.adjoint())
    }

    fn attach(&self, label: &str, ancilla: &DMatrix<Complex64>) -> Result<Self> {
        let anc = DensityOperator::new(
            FockRegister::single(label, ancilla.nrows())?,
            ancilla * ancilla.adjoint(),
        )?;
        DensityOperator::tensor_rho(&[self, &anc])
    }

    fn trace_out(&self, labels: &[&str]) -> Result<Self> {
        let reg = DensityOperator::register(self);
        let kept = reg.without(labels)?;
        let keep: Vec<&str> = kept.labels().collect();
        self.partial_trace(&keep)
    }

    fn contract(&self, label: &str, bra: &[Complex64]) -> Result<Self> {
        let reg = DensityOperator::register(self);
        let dim = reg.dim_of(label)?;
        if bra.len() != dim {
            return Err(HybridError::Shape(format!(
                "bra has {} entries, mode `{label}` has {dim}",
                bra.len()
            )));
        }
        let kept = reg.without(&[label])?;
        let offs = reg.split_offsets(&[label])?;
        let m = self.matrix();
        let n = offs.rest.len();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (r, &br) in offs.rest.iter().enumerate() {
            for (c, &bc) in offs.rest.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, &oi) in offs.local.iter().enumerate() {
                    for (j, &oj) in offs.local.iter().enumerate() {
                        acc += bra[i] * m[(br + oi, bc + oj)] * bra[j].conj();
                    }
                }
                out[(r, c)] = acc;
            }
        }
        DensityOperator::new(kept, out)
    }

    fn trace(&self) -> f64 {
        DensityOperator::trace(self).re
    }

    fn scaled(&self, s: f64) -> Self {
        DensityOperator::scaled(self, s)
    }

    fn to_density(&self) -> DensityOperator {
        self.clone()
    }
}
