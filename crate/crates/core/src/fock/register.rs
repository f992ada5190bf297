use std::collections::BTreeSet;

use crate::error::{HybridError, Result};

/// One bosonic mode of a register, truncated to `dim` Fock levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mode {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labelled modes. Basis index is row-major: the last mode varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FockRegister {
    modes: Vec<Mode>,
}

impl FockRegister {
    pub fn new<I, S>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for (label, dim) in modes {
            let label = label.into();
            if dim == 0 {
                return Err(HybridError::InvalidDimension(format!("mode `{label}` has dimension 0")));
            }
            if !seen.insert(label.clone()) {
                return Err(HybridError::LabelCollision(label));
            }
            out.push(Mode { label, dim });
        }
        Ok(Self { modes: out })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.modes.iter().map(|m| m.label.as_str())
    }

    pub fn total_dim(&self) -> usize {
        self.modes.iter().map(|m| m.dim).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.modes.iter().any(|m| m.label == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| HybridError::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.modes[self.index_of(label)?].dim)
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.modes.len()];
        for k in (0..self.modes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.modes[k + 1].dim;
        }
        strides
    }

    /// Per-mode occupation numbers of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.modes.len()];
        for (k, m) in self.modes.iter().enumerate().rev() {
            out[k] = index % m.dim;
            index /= m.dim;
        }
        out
    }

    /// Registers appended in order; labels must stay unique.
    pub fn concat(&self, other: &FockRegister) -> Result<Self> {
        Self::new(
            self.modes
                .iter()
                .chain(other.modes.iter())
                .map(|m| (m.label.clone(), m.dim)),
        )
    }

    /// The register with `labels` removed, order otherwise unchanged.
    pub fn without(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.index_of(l)?;
        }
        Ok(Self {
            modes: self
                .modes
                .iter()
                .filter(|m| !labels.contains(&m.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// The register restricted to `labels`, in register order.
    pub fn restricted(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.index_of(l)?;
        }
        Ok(Self {
            modes: self
                .modes
                .iter()
                .filter(|m| labels.contains(&m.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Same modes with every label renamed through `f`.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        Self::new(self.modes.iter().map(|m| (f(&m.label), m.dim)))
    }

    /// A label not yet present, derived from `base`.
    pub fn fresh_label(&self, base: &str) -> String {
        let mut candidate = format!("{base}~anc");
        let mut k = 1;
        while self.contains(&candidate) {
            candidate = format!("{base}~anc{k}");
            k += 1;
        }
        candidate
    }

    /// Offsets for addressing a subset of modes.
    ///
    /// `local` enumerates the joint index of `labels` (row-major in the given order);
    /// `rest` enumerates every other mode in register order. Each basis index is
    /// exactly one `local[i] + rest[j]`.
    pub fn split_offsets(&self, labels: &[&str]) -> Result<SplitOffsets> {
        let strides = self.strides();
        let mut picked = Vec::with_capacity(labels.len());
        for l in labels {
            let k = self.index_of(l)?;
            if picked.contains(&k) {
                return Err(HybridError::LabelCollision(l.to_string()));
            }
            picked.push(k);
        }
        let local = offsets(picked.iter().map(|&k| (self.modes[k].dim, strides[k])));
        let rest = offsets(
            (0..self.modes.len())
                .filter(|k| !picked.contains(k))
                .map(|k| (self.modes[k].dim, strides[k])),
        );
        Ok(SplitOffsets { local, rest })
    }
}

#[derive(Debug, Clone)]
pub struct SplitOffsets {
    pub local: Vec<usize>,
    pub rest: Vec<usize>,
}

fn offsets(modes: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut out = vec![0usize];
    for (dim, stride) in modes {
        let mut next = Vec::with_capacity(out.len() * dim);
        for &base in &out {
            for n in 0..dim {
                next.push(base + n * stride);
            }
        }
        out = next;
    }
    out
}

/// A bipartition of a register's labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSplit {
    subsystem_a: BTreeSet<String>,
    subsystem_b: BTreeSet<String>,
}

impl ModeSplit {
    pub fn new(register: &FockRegister, subsystem_a: &[&str], subsystem_b: &[&str]) -> Result<Self> {
        let a: BTreeSet<String> = subsystem_a.iter().map(|s| s.to_string()).collect();
        let b: BTreeSet<String> = subsystem_b.iter().map(|s| s.to_string()).collect();
        if let Some(dup) = a.intersection(&b).next() {
            return Err(HybridError::LabelCollision(dup.clone()));
        }
        for l in a.iter().chain(b.iter()) {
            register.index_of(l)?;
        }
        if let Some(missing) = register.labels().find(|l| !a.contains(*l) && !b.contains(*l)) {
            return Err(HybridError::InvalidDimension(format!(
                "mode `{missing}` is in neither subsystem"
            )));
        }
        Ok(Self {
            subsystem_a: a,
            subsystem_b: b,
        })
    }

    /// `subsystem_a` as given, everything else in `subsystem_b`.
    pub fn bipartition(register: &FockRegister, subsystem_a: &[&str]) -> Result<Self> {
        let b: Vec<&str> = register.labels().filter(|l| !subsystem_a.contains(l)).collect();
        Self::new(register, subsystem_a, &b)
    }

    pub fn subsystem_a(&self) -> &BTreeSet<String> {
        &self.subsystem_a
    }

    pub fn subsystem_b(&self) -> &BTreeSet<String> {
        &self.subsystem_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_dim_is_product() {
        let r = FockRegister::new([("a", 2), ("b", 3), ("c", 4)]).unwrap();
        assert_eq!(r.total_dim(), 24);
        assert_eq!(r.strides(), vec![12, 4, 1]);
        assert_eq!(r.digits(12 + 8 + 3), vec![1, 2, 3]);
    }

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(matches!(
            FockRegister::new([("a", 2), ("a", 3)]),
            Err(HybridError::LabelCollision(_))
        ));
        assert!(matches!(
            FockRegister::new([("a", 0)]),
            Err(HybridError::InvalidDimension(_))
        ));
    }

    #[test]
    fn label_index_bijection() {
        let r = FockRegister::new([("x", 2), ("y", 5)]).unwrap();
        for (k, l) in r.labels().enumerate() {
            assert_eq!(r.index_of(l).unwrap(), k);
        }
        assert!(matches!(r.index_of("z"), Err(HybridError::UnknownLabel(_))));
    }

    #[test]
    fn split_offsets_cover_every_index_once() {
        let r = FockRegister::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let s = r.split_offsets(&["c", "a"]).unwrap();
        let mut all: Vec<usize> = s
            .rest
            .iter()
            .flat_map(|&b| s.local.iter().map(move |&l| b + l))
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
        // local order follows the requested label order: c slowest, a fastest
        assert_eq!(s.local, vec![0, 6, 1, 7]);
    }

    #[test]
    fn mode_split_must_partition() {
        let r = FockRegister::new([("a", 2), ("b", 2), ("c", 2)]).unwrap();
        assert!(ModeSplit::new(&r, &["a"], &["b"]).is_err());
        assert!(ModeSplit::new(&r, &["a", "b"], &["b", "c"]).is_err());
        let s = ModeSplit::bipartition(&r, &["b"]).unwrap();
        assert_eq!(s.subsystem_b().len(), 2);
    }

    #[test]
    fn fresh_label_avoids_existing() {
        let r = FockRegister::new([("a", 2), ("a~anc", 2)]).unwrap();
        assert_eq!(r.fresh_label("a"), "a~anc1");
    }
}
