use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::{hermitian_eigen, DensityOperator};
use super::operator::LocalOperator;
use super::register::FockRegister;
use super::state::StateVector;
use crate::error::{HybridError, Result};

const COMPRESS_RTOL: f64 = 1e-14;

/// A mixed state held as rho = F F^dag with a tall, thin factor F.
///
/// Rows are indexed by the register; columns are purifying (environment) indices.
/// Tracing out a mode moves its index from rows to columns, so large ancilla-heavy
/// registers never need a dense density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PurifiedState {
    register: FockRegister,
    factor: DMatrix<Complex64>,
}

impl PurifiedState {
    pub fn new(register: FockRegister, factor: DMatrix<Complex64>) -> Result<Self> {
        if factor.nrows() != register.total_dim() {
            return Err(HybridError::Shape(format!(
                "factor has {} rows, register dimension is {}",
                factor.nrows(),
                register.total_dim()
            )));
        }
        Ok(Self { register, factor })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = state.amplitudes();
        Self {
            register: state.register().clone(),
            factor: DMatrix::from_column_slice(v.len(), 1, v.as_slice()),
        }
    }

    /// Factor of a density operator via its eigendecomposition.
    pub fn from_density(rho: &DensityOperator) -> Self {
        let eig = hermitian_eigen(rho.matrix());
        Self {
            register: rho.register().clone(),
            factor: scaled_columns(&eig.eigenvectors, &eig.eigenvalues.iter().copied().collect::<Vec<_>>()),
        }
    }

    pub fn tensor(states: &[&PurifiedState]) -> Result<Self> {
        let mut iter = states.iter();
        let first = iter
            .next()
            .ok_or_else(|| HybridError::Shape("tensor of an empty list".into()))?;
        let mut out = (*first).clone();
        for s in iter {
            out = Self {
                register: out.register.concat(&s.register)?,
                factor: out.factor.kronecker(&s.factor),
            };
        }
        Ok(out)
    }

    pub fn register(&self) -> &FockRegister {
        &self.register
    }

    pub fn factor(&self) -> &DMatrix<Complex64> {
        &self.factor
    }

    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        Ok(Self {
            register: self.register.relabeled(f)?,
            factor: self.factor.clone(),
        })
    }

    pub fn rank(&self) -> usize {
        self.factor.ncols()
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::new(self.register.clone(), &self.factor * self.factor.adjoint())
            .expect("factor rows match register")
    }

    /// Minimal factor with the same F F^dag, dropping directions with relative weight below 1e-14.
    pub fn compressed(&self) -> Self {
        let (rows, cols) = self.factor.shape();
        if cols == 0 {
            return self.clone();
        }
        let factor = if rows >= cols {
            let gram = self.factor.adjoint() * &self.factor;
            let eig = hermitian_eigen(&gram);
            let keep = kept_indices(&eig.eigenvalues.iter().copied().collect::<Vec<_>>());
            let v = eig.eigenvectors.select_columns(&keep);
            &self.factor * v
        } else {
            let gram = &self.factor * self.factor.adjoint();
            let eig = hermitian_eigen(&gram);
            let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let keep = kept_indices(&vals);
            let u = eig.eigenvectors.select_columns(&keep);
            let kept: Vec<f64> = keep.iter().map(|&k| vals[k]).collect();
            scaled_columns(&u, &kept)
        };
        Self {
            register: self.register.clone(),
            factor,
        }
    }

    /// tr[rho sigma] = ||F^dag G||_F^2.
    pub fn overlap(&self, other: &PurifiedState) -> Result<f64> {
        if self.factor.nrows() != other.factor.nrows() {
            return Err(HybridError::Shape("overlap of states with different shapes".into()));
        }
        Ok((self.factor.adjoint() * &other.factor).norm_squared())
    }

    pub fn purity(&self) -> f64 {
        (self.factor.adjoint() * &self.factor).norm_squared()
    }

    pub fn mean_photon_number(&self, label: &str) -> Result<f64> {
        let k = self.register.index_of(label)?;
        Ok((0..self.factor.nrows())
            .map(|i| self.register.digits(i)[k] as f64 * self.factor.row(i).norm_squared())
            .sum())
    }
}

fn kept_indices(vals: &[f64]) -> Vec<usize> {
    let max = vals.iter().copied().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    (0..vals.len()).filter(|&k| vals[k] > max * COMPRESS_RTOL).collect()
}

fn scaled_columns(vectors: &DMatrix<Complex64>, values: &[f64]) -> DMatrix<Complex64> {
    let keep = kept_indices(values);
    let mut out = vectors.select_columns(&keep);
    for (j, &k) in keep.iter().enumerate() {
        let s = values[k].max(0.0).sqrt();
        out.column_mut(j).scale_mut(s);
    }
    out
}

impl super::MixedState for PurifiedState {
    fn register(&self) -> &FockRegister {
        &self.register
    }

    fn conjugate(&self, op: &LocalOperator) -> Result<Self> {
        let mut factor = self.factor.clone();
        op.apply_to_columns(&self.register, &mut factor)?;
        Ok(Self {
            register: self.register.clone(),
            factor,
        })
    }

    fn attach(&self, label: &str, ancilla: &DMatrix<Complex64>) -> Result<Self> {
        let register = self.register.concat(&FockRegister::single(label, ancilla.nrows())?)?;
        Ok(Self {
            register,
            factor: self.factor.kronecker(ancilla),
        })
    }

    fn trace_out(&self, labels: &[&str]) -> Result<Self> {
        let kept = self.register.without(labels)?;
        let offs = self.register.split_offsets(labels)?;
        let cols = self.factor.ncols();
        let mut factor = DMatrix::<Complex64>::zeros(offs.rest.len(), offs.local.len() * cols);
        for (r, &base) in offs.rest.iter().enumerate() {
            for (t, &off) in offs.local.iter().enumerate() {
                for j in 0..cols {
                    factor[(r, t * cols + j)] = self.factor[(base + off, j)];
                }
            }
        }
        Ok(Self { register: kept, factor }.compressed())
    }

    fn contract(&self, label: &str, bra: &[Complex64]) -> Result<Self> {
        let dim = self.register.dim_of(label)?;
        if bra.len() != dim {
            return Err(HybridError::Shape(format!(
                "bra has {} entries, mode `{label}` has {dim}",
                bra.len()
            )));
        }
        let kept = self.register.without(&[label])?;
        let offs = self.register.split_offsets(&[label])?;
        let cols = self.factor.ncols();
        let mut factor = DMatrix::<Complex64>::zeros(offs.rest.len(), cols);
        for (r, &base) in offs.rest.iter().enumerate() {
            for (n, &off) in offs.local.iter().enumerate() {
                if bra[n] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..cols {
                    factor[(r, j)] += bra[n] * self.factor[(base + off, j)];
                }
            }
        }
        Ok(Self { register: kept, factor })
    }

    fn trace(&self) -> f64 {
        self.factor.norm_squared()
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            register: self.register.clone(),
            factor: &self.factor * Complex64::new(s.sqrt(), 0.0),
        }
    }

    fn to_density(&self) -> DensityOperator {
        PurifiedState::to_density(self)
    }
}
