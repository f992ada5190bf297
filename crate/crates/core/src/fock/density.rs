use nalgebra::{DMatrix, Dyn, SymmetricEigen};
use num_complex::Complex64;

use super::register::{FockRegister, ModeSplit};
use super::state::StateVector;
use crate::error::{HybridError, Result};

/// A (possibly unnormalized) density matrix over a Fock register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    register: FockRegister,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(register: FockRegister, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = register.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(HybridError::Shape(format!(
                "matrix is {}x{}, register dimension is {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { register, matrix })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = state.amplitudes();
        Self {
            register: state.register().clone(),
            matrix: v * v.adjoint(),
        }
    }

    /// Kronecker product; registers concatenated in argument order.
    pub fn tensor_rho(ops: &[&DensityOperator]) -> Result<Self> {
        let mut iter = ops.iter();
        let first = iter
            .next()
            .ok_or_else(|| HybridError::Shape("tensor of an empty list".into()))?;
        let mut out = (*first).clone();
        for op in iter {
            out = Self {
                register: out.register.concat(&op.register)?,
                matrix: out.matrix.kronecker(&op.matrix),
            };
        }
        Ok(out)
    }

    pub fn register(&self) -> &FockRegister {
        &self.register
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            register: self.register.clone(),
            matrix: &self.matrix * Complex64::new(s, 0.0),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace().re;
        if !(t > 0.0 && t.is_finite()) {
            return Err(HybridError::NotNormalized(t));
        }
        Ok(self.scaled(1.0 / t))
    }

    /// max |M - M^dag| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.matrix[(r, c)] - self.matrix[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = hermitian_eigenvalues(&self.matrix);
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm_sqr()).sum()
    }

    /// tr[self * other].
    pub fn overlap(&self, other: &DensityOperator) -> Result<Complex64> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(HybridError::Shape("overlap of operators with different shapes".into()));
        }
        // tr(AB) = sum_ij A_ij B_ji
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.transpose().iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Reduced operator on `keep` (register order preserved).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(HybridError::Shape("partial trace must keep at least one mode".into()));
        }
        let kept = self.register.restricted(keep)?;
        let kept_labels: Vec<&str> = kept.labels().collect();
        let split = self.register.split_offsets(&kept_labels)?;
        let n = split.local.len();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for &t in &split.rest {
            for (c, &oc) in split.local.iter().enumerate() {
                for (r, &or) in split.local.iter().enumerate() {
                    out[(r, c)] += self.matrix[(t + or, t + oc)];
                }
            }
        }
        Ok(Self {
            register: kept,
            matrix: out,
        })
    }

    /// Partial transpose over `split.subsystem_b`, as a bare matrix in the register basis.
    pub fn partial_transpose(&self, split: &ModeSplit) -> Result<DMatrix<Complex64>> {
        let b: Vec<&str> = self
            .register
            .labels()
            .filter(|l| split.subsystem_b().contains(*l))
            .collect();
        for l in split.subsystem_a().iter().chain(split.subsystem_b()) {
            self.register.index_of(l)?;
        }
        if split.subsystem_a().len() + split.subsystem_b().len() != self.register.len() {
            return Err(HybridError::Shape("split does not cover the register".into()));
        }
        let offs = self.register.split_offsets(&b)?;
        let mut out = DMatrix::<Complex64>::zeros(self.matrix.nrows(), self.matrix.ncols());
        for &a1 in &offs.rest {
            for &a2 in &offs.rest {
                for &b1 in &offs.local {
                    for &b2 in &offs.local {
                        out[(a1 + b1, a2 + b2)] = self.matrix[(a1 + b2, a2 + b1)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// <n> on one mode.
    pub fn mean_photon_number(&self, label: &str) -> Result<f64> {
        let k = self.register.index_of(label)?;
        Ok((0..self.matrix.nrows())
            .map(|i| self.register.digits(i)[k] as f64 * self.matrix[(i, i)].re)
            .sum())
    }
}

const FLUSH_RTOL: f64 = 1e-20;

/// Eigendecomposition of the Hermitian part of `m`.
///
/// Entries below 1e-20 of the largest are zeroed first: strongly graded
/// matrices otherwise drive the QR sweep into overflow.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> SymmetricEigen<Complex64, Dyn> {
    let mut h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let scale = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = scale * FLUSH_RTOL;
    h.iter_mut()
        .filter(|v| v.norm() < floor)
        .for_each(|v| *v = Complex64::new(0.0, 0.0));
    SymmetricEigen::new(h)
}

pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    hermitian_eigen(m).eigenvalues.iter().copied().collect()
}
