use std::fmt;

use super::{rref_in_place, FMat};
use crate::field::FieldSpec;

/// Which construction a [`Subspace`] came from. Purely informational: two
/// subspaces compare equal whenever they have the same span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    RowSpace,
    LeftNull,
    RightNull,
}

/// A subspace of `F^n` held as a canonical reduced-echelon basis.
#[derive(Clone)]
pub struct Subspace {
    spec: FieldSpec,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    orientation: Orientation,
}

impl Subspace {
    /// Span of arbitrary vectors.
    pub fn span(spec: &FieldSpec, ambient: usize, vectors: Vec<Vec<u32>>, orientation: Orientation) -> Self {
        let rows = vectors.len();
        let mut data: Vec<u32> = vectors.into_iter().flatten().collect();
        assert_eq!(data.len(), rows * ambient, "vector length must match the ambient dimension");
        let pivots = rref_in_place(spec, &mut data, rows, ambient);
        let basis = (0..pivots.len()).map(|i| data[i * ambient..(i + 1) * ambient].to_vec()).collect();
        Subspace { spec: spec.clone(), ambient, basis, orientation }
    }

    pub(super) fn from_echelon(
        spec: &FieldSpec,
        ambient: usize,
        basis: Vec<Vec<u32>>,
        orientation: Orientation,
    ) -> Self {
        Subspace { spec: spec.clone(), ambient, basis, orientation }
    }

    pub fn zero(spec: &FieldSpec, ambient: usize) -> Self {
        Subspace { spec: spec.clone(), ambient, basis: Vec::new(), orientation: Orientation::RowSpace }
    }

    pub(super) fn set_orientation(&mut self, o: Orientation) {
        self.orientation = o;
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        Subspace::span(&self.spec, self.ambient, vs, self.orientation).dim() == self.dim()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let vs = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(&self.spec, self.ambient, vs, Orientation::RowSpace)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(&self.spec, self.ambient);
        }
        // (a, b) with a*U = b*W  <=>  (a, -b) in the left nullspace of [U; W]
        let stacked: Vec<u32> = self.basis.iter().chain(&other.basis).flatten().copied().collect();
        let m = FMat::from_raw(&self.spec, self.dim() + other.dim(), self.ambient, stacked);
        let u = FMat::from_raw(&self.spec, self.dim(), self.ambient, self.basis.concat());
        let vs = m
            .left_nullspace()
            .basis()
            .iter()
            .map(|n| u.left_apply(&n[..self.dim()]))
            .collect();
        Subspace::span(&self.spec, self.ambient, vs, Orientation::RowSpace)
    }

    /// Image under `v -> v * m`.
    pub fn image(&self, m: &FMat) -> Subspace {
        let vs = self.basis.iter().map(|v| m.left_apply(v)).collect();
        Subspace::span(&self.spec, m.cols(), vs, Orientation::RowSpace)
    }

    /// Image of column vectors under `w -> m * w`.
    pub fn image_right(&self, m: &FMat) -> Subspace {
        let vs = self.basis.iter().map(|w| m.right_apply(w)).collect();
        Subspace::span(&self.spec, m.rows(), vs, Orientation::RightNull)
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.ambient == other.ambient && self.basis == other.basis
    }
}

impl Eq for Subspace {}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace({:?}, dim {} of {}, {:?})", self.orientation, self.dim(), self.ambient, self.basis)
    }
}
