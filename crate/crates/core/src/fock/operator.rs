use nalgebra::DMatrix;
use num_complex::Complex64;

use super::register::FockRegister;
use crate::error::{check_unit, HybridError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// An operator acting on a few named modes, stored as sparse triplets over the
/// joint local index (row-major in `labels` order).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    labels: Vec<String>,
    dims: Vec<usize>,
    entries: Vec<(usize, usize, Complex64)>,
}

impl LocalOperator {
    pub fn from_dense(labels: &[&str], dims: &[usize], matrix: &DMatrix<Complex64>) -> Result<Self> {
        let side = check_local_shape(labels, dims)?;
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(HybridError::Shape(format!(
                "expected {side}x{side} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut entries = Vec::new();
        for c in 0..side {
            for r in 0..side {
                let v = matrix[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        Ok(Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            dims: dims.to_vec(),
            entries,
        })
    }

    pub fn diagonal(labels: &[&str], dims: &[usize], diag: &[Complex64]) -> Result<Self> {
        let side = check_local_shape(labels, dims)?;
        if diag.len() != side {
            return Err(HybridError::Shape(format!(
                "expected {side} diagonal entries, got {}",
                diag.len()
            )));
        }
        Ok(Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            dims: dims.to_vec(),
            entries: diag
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != ZERO)
                .map(|(k, v)| (k, k, *v))
                .collect(),
        })
    }

    pub fn identity(labels: &[&str], dims: &[usize]) -> Result<Self> {
        let side = check_local_shape(labels, dims)?;
        Self::diagonal(labels, dims, &vec![Complex64::new(1.0, 0.0); side])
    }

    pub fn labels(&self) -> Vec<&str> {
        self.labels.iter().map(String::as_str).collect()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.side();
        let mut m = DMatrix::zeros(n, n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect(),
        }
    }

    /// Rename the modes this operator acts on (dimensions unchanged).
    pub fn on(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(HybridError::Shape("label count differs".into()));
        }
        check_local_shape(labels, &self.dims)?;
        Ok(Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            ..self.clone()
        })
    }

    /// Left-multiplies every column of `data` (rows indexed by `register`) in place.
    pub fn apply_to_columns(&self, register: &FockRegister, data: &mut DMatrix<Complex64>) -> Result<()> {
        if data.nrows() != register.total_dim() {
            return Err(HybridError::Shape(format!(
                "data has {} rows, register dimension is {}",
                data.nrows(),
                register.total_dim()
            )));
        }
        for (l, &d) in self.labels.iter().zip(&self.dims) {
            let rd = register.dim_of(l)?;
            if rd != d {
                return Err(HybridError::InvalidDimension(format!(
                    "operator expects dim {d} on `{l}`, register has {rd}"
                )));
            }
        }
        let split = register.split_offsets(&self.labels())?;
        let side = split.local.len();
        let mut x = vec![ZERO; side];
        let mut y = vec![ZERO; side];
        for col in 0..data.ncols() {
            let mut column = data.column_mut(col);
            for &base in &split.rest {
                for (k, &off) in split.local.iter().enumerate() {
                    x[k] = column[base + off];
                }
                if x.iter().all(|v| *v == ZERO) {
                    continue;
                }
                y.iter_mut().for_each(|v| *v = ZERO);
                for &(r, c, v) in &self.entries {
                    y[r] += v * x[c];
                }
                for (k, &off) in split.local.iter().enumerate() {
                    column[base + off] = y[k];
                }
            }
        }
        Ok(())
    }
}

fn check_local_shape(labels: &[&str], dims: &[usize]) -> Result<usize> {
    if labels.is_empty() || labels.len() != dims.len() {
        return Err(HybridError::Shape(
            "labels and dims must be nonempty and equal length".into(),
        ));
    }
    for (k, l) in labels.iter().enumerate() {
        if labels[..k].contains(l) {
            return Err(HybridError::LabelCollision(l.to_string()));
        }
    }
    if dims.contains(&0) {
        return Err(HybridError::InvalidDimension("zero-dimensional mode".into()));
    }
    Ok(dims.iter().product())
}

/// Beam splitter with transmittance `t` on `(mode_i, mode_j)`.
///
/// Acts on amplitudes as a -> sqrt(t) a + sqrt(1-t) b, b -> -sqrt(1-t) a + sqrt(t) b,
/// so |x>|y> maps to |sqrt(t) x + sqrt(1-t) y>|-sqrt(1-t) x + sqrt(t) y>.
/// Built as exp(theta (a^dag b - a b^dag)), cos(theta) = sqrt(t), one total-photon
/// block at a time; exactly unitary on the truncated space.
pub fn beamsplitter_unitary(t: f64, mode_i: &str, mode_j: &str, register: &FockRegister) -> Result<LocalOperator> {
    check_unit("transmittance", t)?;
    if mode_i == mode_j {
        return Err(HybridError::LabelCollision(mode_i.to_string()));
    }
    let di = register.dim_of(mode_i)?;
    let dj = register.dim_of(mode_j)?;
    Ok(beamsplitter(t, (mode_i, di), (mode_j, dj)))
}

pub(crate) fn beamsplitter(t: f64, (li, di): (&str, usize), (lj, dj): (&str, usize)) -> LocalOperator {
    let theta = t.sqrt().clamp(0.0, 1.0).acos();
    let mut entries = Vec::new();
    for total in 0..(di + dj - 1) {
        let lo = total.saturating_sub(dj - 1);
        let hi = total.min(di - 1);
        let size = hi - lo + 1;
        // basis n = lo..=hi of mode i, m = total - n of mode j
        let mut gen = DMatrix::<f64>::zeros(size, size);
        for k in 0..size - 1 {
            let n = lo + k;
            let m = total - n;
            // a^dag b |n, m> = sqrt(n+1) sqrt(m) |n+1, m-1>
            let v = theta * ((n + 1) as f64).sqrt() * (m as f64).sqrt();
            gen[(k + 1, k)] = v;
            gen[(k, k + 1)] = -v;
        }
        let u = if size == 1 { DMatrix::identity(1, 1) } else { gen.exp() };
        for r in 0..size {
            for c in 0..size {
                let v = u[(r, c)];
                if v != 0.0 {
                    let (nr, nc) = (lo + r, lo + c);
                    entries.push((
                        (nr * dj) + (total - nr),
                        (nc * dj) + (total - nc),
                        Complex64::new(v, 0.0),
                    ));
                }
            }
        }
    }
    LocalOperator {
        labels: vec![li.to_string(), lj.to_string()],
        dims: vec![di, dj],
        entries,
    }
}

/// Truncated displacement exp(beta a^dag - conj(beta) a) on one mode.
pub fn displacement_op(label: &str, beta: Complex64, dim: usize) -> Result<LocalOperator> {
    if dim < 2 {
        return Err(HybridError::InvalidDimension(format!(
            "displacement needs dim >= 2, got {dim}"
        )));
    }
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..dim - 1 {
        let s = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] += beta * s;
        gen[(n, n + 1)] -= beta.conj() * s;
    }
    LocalOperator::from_dense(&[label], &[dim], &gen.exp())
}

/// Phase rotation exp(i phi n) on one mode.
pub fn phase_rotation(label: &str, phi: f64, dim: usize) -> Result<LocalOperator> {
    let diag: Vec<Complex64> = (0..dim).map(|n| Complex64::from_polar(1.0, phi * n as f64)).collect();
    LocalOperator::diagonal(&[label], &[dim], &diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::StateVector;

    fn max_dev_from_identity(u: &DMatrix<Complex64>) -> f64 {
        let p = u.adjoint() * u;
        let n = p.nrows();
        (p - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn beamsplitter_maps_coherent_states() {
        let (alpha, t, dim) = (0.5, 0.3, 24);
        let reg = FockRegister::new([("a", dim), ("b", dim)]).unwrap();
        let input = StateVector::tensor(&[
            &StateVector::coherent_ket("a", Complex64::new(alpha, 0.0), dim).unwrap(),
            &StateVector::fock_ket("b", 0, dim).unwrap(),
        ])
        .unwrap();
        let u = beamsplitter_unitary(t, "a", "b", &reg).unwrap();
        let out = input.apply(&u).unwrap();
        let expected = StateVector::tensor(&[
            &StateVector::coherent_ket("a", Complex64::new(t.sqrt() * alpha, 0.0), dim).unwrap(),
            &StateVector::coherent_ket("b", Complex64::new(-(1.0 - t).sqrt() * alpha, 0.0), dim).unwrap(),
        ])
        .unwrap();
        let f = expected.overlap(&out).unwrap().norm_sqr();
        assert!(f >= 1.0 - 1e-8, "fidelity {f}");
    }

    #[test]
    fn beamsplitter_full_transmission_is_identity() {
        let reg = FockRegister::new([("a", 6), ("b", 6)]).unwrap();
        let u = beamsplitter_unitary(1.0, "a", "b", &reg).unwrap().to_dense();
        assert!((u - DMatrix::<Complex64>::identity(36, 36))
            .iter()
            .all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn beamsplitter_is_unitary() {
        for &t in &[0.0, 0.1, 0.5, 0.77] {
            for &(di, dj) in &[(16, 16), (2, 9), (7, 3)] {
                let reg = FockRegister::new([("a", di), ("b", dj)]).unwrap();
                let u = beamsplitter_unitary(t, "a", "b", &reg).unwrap().to_dense();
                assert!(max_dev_from_identity(&u) < 1e-10);
            }
        }
    }

    #[test]
    fn beamsplitter_rejects_bad_input() {
        let reg = FockRegister::new([("a", 3), ("b", 3)]).unwrap();
        assert!(matches!(
            beamsplitter_unitary(1.5, "a", "b", &reg),
            Err(HybridError::Domain { .. })
        ));
        assert!(beamsplitter_unitary(0.5, "a", "a", &reg).is_err());
        assert!(matches!(
            beamsplitter_unitary(0.5, "a", "q", &reg),
            Err(HybridError::UnknownLabel(_))
        ));
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let beta = Complex64::new(0.5, 0.0);
        let d = displacement_op("a", beta, 24).unwrap();
        let out = StateVector::fock_ket("a", 0, 24).unwrap().apply(&d).unwrap();
        let target = StateVector::coherent_ket("a", beta, 24).unwrap();
        assert!(target.overlap(&out).unwrap().norm_sqr() >= 1.0 - 1e-6);
    }

    #[test]
    fn displacement_zero_and_inverse() {
        let d0 = displacement_op("a", Complex64::new(0.0, 0.0), 8).unwrap().to_dense();
        assert!((d0 - DMatrix::<Complex64>::identity(8, 8))
            .iter()
            .all(|v| v.norm() < 1e-15));
        let beta = Complex64::new(0.5, 0.0);
        let p =
            displacement_op("a", beta, 24).unwrap().to_dense() * displacement_op("a", -beta, 24).unwrap().to_dense();
        let dev = (p - DMatrix::<Complex64>::identity(24, 24))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-6, "{dev}");
        assert!(displacement_op("a", beta, 1).is_err());
    }

    #[test]
    fn sparse_application_matches_dense() {
        let reg = FockRegister::new([("x", 2), ("a", 4), ("b", 3)]).unwrap();
        let u = beamsplitter_unitary(0.4, "b", "a", &reg).unwrap();
        let mut data =
            DMatrix::<Complex64>::from_fn(24, 2, |r, c| Complex64::new((r * 3 + c) as f64, (r as f64).sin()));
        let orig = data.clone();
        u.apply_to_columns(&reg, &mut data).unwrap();
        // reference: permute to (x, b, a) ordering, apply kron(I_x, U) densely
        let dense = u.to_dense();
        for col in 0..2 {
            for x in 0..2 {
                for bo in 0..3 {
                    for ao in 0..4 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for bi in 0..3 {
                            for ai in 0..4 {
                                acc += dense[(bo * 4 + ao, bi * 4 + ai)] * orig[(x * 12 + ai * 3 + bi, col)];
                            }
                        }
                        assert!((acc - data[(x * 12 + ao * 3 + bo, col)]).norm() < 1e-12);
                    }
                }
            }
        }
    }
}
