//! Dense exact linear algebra over a [`FieldSpec`].
//!
//! Vectors are row vectors throughout, so the left nullspace of `A` is
//! `{v : vA = 0}`. Echelon forms pick the first nonzero pivot in column
//! order, scale pivots to 1 and reduce fully, which makes every [`Subspace`]
//! basis canonical.

mod subspace;

pub use subspace::{Orientation, Subspace};

use std::cmp::Ordering;
use std::fmt;
use std::ops;

use serde::{Serialize, Serializer};

use crate::error::{bad_input, Error, Result};
use crate::field::{FieldElem, FieldSpec, UPoly};

/// A dense matrix of field element codes, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FMat {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Result of [`rank_det_inv`].
#[derive(Debug, Clone)]
pub struct RankDetInv {
    pub rank: usize,
    pub det: FieldElem,
    pub inverse: Option<FMat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatOp {
    Add,
    Sub,
    Mul,
}

/// In-place reduced row echelon form; returns pivot columns.
pub(crate) fn rref_in_place(f: &FieldSpec, data: &mut [u32], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(data[r * cols + c]);
        if inv != 1 {
            for j in c..cols {
                data[r * cols + j] = f.mul(data[r * cols + j], inv);
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let t = data[i * cols + c];
            if t == 0 {
                continue;
            }
            for j in c..cols {
                let x = f.mul(t, data[r * cols + j]);
                data[i * cols + j] = f.sub(data[i * cols + j], x);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank by forward elimination only.
fn rank_in_place(f: &FieldSpec, data: &mut [u32], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(data[r * cols + c]);
        for i in r + 1..rows {
            let t = data[i * cols + c];
            if t == 0 {
                continue;
            }
            let t = f.mul(t, inv);
            for j in c..cols {
                let x = f.mul(t, data[r * cols + j]);
                data[i * cols + j] = f.sub(data[i * cols + j], x);
            }
        }
        r += 1;
    }
    r
}

impl FMat {
    pub fn new(spec: &FieldSpec, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(c) = data.iter().find(|&&c| c >= spec.order()) {
            return Err(bad_input(format!("entry code {c} out of range for {}", spec.label())));
        }
        Ok(FMat { spec: spec.clone(), rows, cols, data })
    }

    /// Square matrix from row-major codes.
    pub fn square(spec: &FieldSpec, codes: &[u32]) -> Result<Self> {
        let n = (codes.len() as f64).sqrt() as usize;
        if n * n != codes.len() {
            return Err(Error::DimensionMismatch(format!("{} entries is not a square count", codes.len())));
        }
        Self::new(spec, n, n, codes.to_vec())
    }

    pub(crate) fn from_raw(spec: &FieldSpec, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FMat { spec: spec.clone(), rows, cols, data }
    }

    pub fn zeros(spec: &FieldSpec, rows: usize, cols: usize) -> Self {
        Self::from_raw(spec, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(spec: &FieldSpec, n: usize) -> Self {
        Self::scalar(spec, n, 1)
    }

    pub fn scalar(spec: &FieldSpec, n: usize, lambda: u32) -> Self {
        let mut m = Self::zeros(spec, n, n);
        for i in 0..n {
            m.data[i * n + i] = lambda;
        }
        m
    }

    pub fn diag(spec: &FieldSpec, entries: &[u32]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(spec, n, n);
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn row_vector(spec: &FieldSpec, v: &[u32]) -> Self {
        Self::from_raw(spec, 1, v.len(), v.to_vec())
    }

    /// Matrix unit `E_ij`.
    pub fn unit(spec: &FieldSpec, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(spec, n, n);
        m.data[i * n + j] = 1;
        m
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry codes.
    pub fn codes(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &FMat) -> Result<()> {
        if self.spec != other.spec {
            Err(Error::SpecMismatch)
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &FMat) -> Result<FMat> {
        mat_arith(self, other, MatOp::Add)
    }

    pub fn try_sub(&self, other: &FMat) -> Result<FMat> {
        mat_arith(self, other, MatOp::Sub)
    }

    pub fn try_mul(&self, other: &FMat) -> Result<FMat> {
        mat_arith(self, other, MatOp::Mul)
    }

    fn zip(&self, other: &FMat, op: impl Fn(u32, u32) -> u32) -> FMat {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Self::from_raw(&self.spec, self.rows, self.cols, data)
    }

    fn product(&self, other: &FMat) -> FMat {
        let f = &self.spec;
        let (n, m, k) = (self.rows, other.cols, self.cols);
        let mut out = vec![0u32; n * m];
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == 0 {
                    continue;
                }
                let orow = &other.data[l * m..(l + 1) * m];
                let dst = &mut out[i * m..(i + 1) * m];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = f.add(*d, f.mul(a, b));
                }
            }
        }
        Self::from_raw(f, n, m, out)
    }

    pub fn scale(&self, c: u32) -> FMat {
        let f = &self.spec;
        Self::from_raw(f, self.rows, self.cols, self.data.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// `self + c*I`.
    pub fn add_scalar(&self, c: u32) -> FMat {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m.data[i * self.cols + i] = self.spec.add(m.data[i * self.cols + i], c);
        }
        m
    }

    pub fn transpose(&self) -> FMat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self::from_raw(&self.spec, self.cols, self.rows, data)
    }

    pub fn pow(&self, k: u64) -> FMat {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Self::identity(&self.spec, self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        result
    }

    /// Additive commutator `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &FMat) -> FMat {
        &(self * other) - &(other * self)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let f = &self.spec;
        let mut out = vec![0u32; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(i)) {
                *o = f.add(*o, f.mul(a, b));
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_apply(&self, w: &[u32]) -> Vec<u32> {
        assert_eq!(w.len(), self.cols);
        let f = &self.spec;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(w).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (FMat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&self.spec, &mut m.data, self.rows, self.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut d = self.data.clone();
        rank_in_place(&self.spec, &mut d, self.rows, self.cols)
    }

    pub fn det(&self) -> u32 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let f = &self.spec;
        let d = &self.data;
        match self.rows {
            0 => 1,
            1 => d[0],
            2 => f.sub(f.mul(d[0], d[3]), f.mul(d[1], d[2])),
            3 => {
                let t1 = f.mul(d[0], f.sub(f.mul(d[4], d[8]), f.mul(d[5], d[7])));
                let t2 = f.mul(d[1], f.sub(f.mul(d[3], d[8]), f.mul(d[5], d[6])));
                let t3 = f.mul(d[2], f.sub(f.mul(d[3], d[7]), f.mul(d[4], d[6])));
                f.add(f.sub(t1, t2), t3)
            }
            n => {
                let mut m = d.clone();
                let mut det = 1u32;
                for c in 0..n {
                    let Some(pr) = (c..n).find(|&i| m[i * n + c] != 0) else {
                        return 0;
                    };
                    if pr != c {
                        for j in 0..n {
                            m.swap(pr * n + j, c * n + j);
                        }
                        det = f.neg(det);
                    }
                    let piv = m[c * n + c];
                    det = f.mul(det, piv);
                    let inv = f.inv(piv);
                    for i in c + 1..n {
                        let t = f.mul(m[i * n + c], inv);
                        if t == 0 {
                            continue;
                        }
                        for j in c..n {
                            let x = f.mul(t, m[c * n + j]);
                            m[i * n + j] = f.sub(m[i * n + j], x);
                        }
                    }
                }
                det
            }
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.det() != 0
    }

    pub fn inverse(&self) -> Option<FMat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let w = 2 * n;
        let mut aug = vec![0u32; n * w];
        for i in 0..n {
            aug[i * w..i * w + n].copy_from_slice(self.row(i));
            aug[i * w + n + i] = 1;
        }
        let pivots = rref_in_place(&self.spec, &mut aug, n, w);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let data = (0..n).flat_map(|i| aug[i * w + n..(i + 1) * w].to_vec()).collect();
        Some(Self::from_raw(&self.spec, n, n, data))
    }

    /// `{w : self * w = 0}`, stored as row vectors.
    pub fn right_nullspace(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let f = &self.spec;
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut w = vec![0u32; self.cols];
            w[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                w[pc] = f.neg(r.get(i, free));
            }
            basis.push(w);
        }
        Subspace::span(f, self.cols, basis, Orientation::RightNull)
    }

    /// `{v : v * self = 0}`.
    pub fn left_nullspace(&self) -> Subspace {
        let mut s = self.transpose().right_nullspace();
        s.set_orientation(Orientation::LeftNull);
        s
    }

    pub fn row_space(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace::from_echelon(&self.spec, self.cols, basis, Orientation::RowSpace)
    }

    pub fn is_scalar(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j) == self.get(0, 0) } else { self.get(i, j) == 0 })
            })
    }

    pub fn trace(&self) -> u32 {
        (0..self.rows.min(self.cols)).fold(0, |acc, i| self.spec.add(acc, self.get(i, i)))
    }

    /// The same matrix viewed over an extension field.
    pub fn embed(&self, k: &FieldSpec) -> Result<FMat> {
        if !self.spec.is_subfield_of(k) {
            return Err(Error::SpecMismatch);
        }
        Ok(Self::from_raw(k, self.rows, self.cols, self.data.clone()))
    }

    /// Applies `op` entrywise (e.g. a Frobenius power).
    pub fn map(&self, op: impl Fn(u32) -> u32) -> FMat {
        Self::from_raw(&self.spec, self.rows, self.cols, self.data.iter().map(|&c| op(c)).collect())
    }

    /// Characteristic polynomial of a 3x3 matrix.
    pub fn char_poly3(&self) -> Result<UPoly> {
        char_poly3(self)
    }

    pub fn min_poly(&self) -> Result<UPoly> {
        min_poly(self)
    }
}

impl PartialOrd for FMat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: shape first, then entry codes lexicographically.
impl Ord for FMat {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols, &self.data).cmp(&(other.rows, other.cols, &other.data))
    }
}

impl fmt::Debug for FMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FMat[{}]{self}", self.spec.label())
    }
}

impl fmt::Display for FMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Serialized as the row-major code list; the field travels separately.
impl Serialize for FMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.data.serialize(s)
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $op:expr) => {
        impl ops::$trait<&FMat> for &FMat {
            type Output = FMat;
            fn $method(self, rhs: &FMat) -> FMat {
                mat_arith(self, rhs, $op).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

panicking_op!(Add, add, MatOp::Add);
panicking_op!(Sub, sub, MatOp::Sub);
panicking_op!(Mul, mul, MatOp::Mul);

impl ops::Neg for &FMat {
    type Output = FMat;
    fn neg(self) -> FMat {
        self.map(|c| self.spec.neg(c))
    }
}

/// Exact sum, difference or product.
pub fn mat_arith(a: &FMat, b: &FMat, op: MatOp) -> Result<FMat> {
    a.check(b)?;
    let f = &a.spec;
    match op {
        MatOp::Add | MatOp::Sub => {
            if (a.rows, a.cols) != (b.rows, b.cols) {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} vs {}x{}",
                    a.rows, a.cols, b.rows, b.cols
                )));
            }
            Ok(if op == MatOp::Add { a.zip(b, |x, y| f.add(x, y)) } else { a.zip(b, |x, y| f.sub(x, y)) })
        }
        MatOp::Mul => {
            if a.cols != b.rows {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} times {}x{}",
                    a.rows, a.cols, b.rows, b.cols
                )));
            }
            Ok(a.product(b))
        }
    }
}

pub fn mat_pow(a: &FMat, k: u64) -> Result<FMat> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
    }
    Ok(a.pow(k))
}

pub fn rank_det_inv(a: &FMat) -> Result<RankDetInv> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("expected a square matrix".into()));
    }
    let det = a.det();
    let inverse = if det != 0 { a.inverse() } else { None };
    if let Some(inv) = &inverse {
        debug_assert_eq!(a * inv, FMat::identity(&a.spec, a.rows));
    }
    Ok(RankDetInv { rank: a.rank(), det: a.spec.elem(det)?, inverse })
}

/// Left and right nullspaces.
pub fn nullspaces(a: &FMat) -> (Subspace, Subspace) {
    (a.left_nullspace(), a.right_nullspace())
}

/// `x^3 - tr(A) x^2 + c2(A) x - det(A)`, `c2` the sum of principal 2x2 minors.
pub fn char_poly3(a: &FMat) -> Result<UPoly> {
    if a.rows != 3 || a.cols != 3 {
        return Err(bad_input("char_poly3 needs a 3x3 matrix"));
    }
    let f = &a.spec;
    let m = |i: usize, j: usize| a.get(i, j);
    let minor = |i: usize, j: usize| f.sub(f.mul(m(i, i), m(j, j)), f.mul(m(i, j), m(j, i)));
    let c2 = f.add(f.add(minor(0, 1), minor(0, 2)), minor(1, 2));
    Ok(UPoly::new(f, vec![f.neg(a.det()), c2, f.neg(a.trace()), 1]))
}

/// Least-degree monic annihilator, from the first linear dependence among
/// `I, A, A^2, ...`.
pub fn min_poly(a: &FMat) -> Result<UPoly> {
    if !a.is_square() {
        return Err(bad_input("minimal polynomial of a non-square matrix"));
    }
    let f = &a.spec;
    let n = a.rows;
    let mut powers: Vec<Vec<u32>> = vec![FMat::identity(f, n).data];
    let mut current = FMat::identity(f, n);
    for k in 1..=n {
        current = &current * a;
        powers.push(current.data.clone());
        let krylov = FMat::from_raw(f, k + 1, n * n, powers.concat());
        let null = krylov.left_nullspace();
        if let Some(v) = null.basis().first() {
            let lead = v[k];
            debug_assert_ne!(lead, 0);
            let inv = f.inv(lead);
            return Ok(UPoly::new(f, v.iter().map(|&c| f.mul(c, inv)).collect()));
        }
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

/// Companion matrix `[[0,0,-c],[1,0,-b],[0,1,-a]]` of `x^3 + a x^2 + b x + c`.
pub fn companion(m: &UPoly) -> Result<FMat> {
    if m.degree() != Some(3) || !m.is_monic() {
        return Err(bad_input(format!("companion needs a monic cubic, got {m}")));
    }
    let f = m.spec();
    let (c, b, a) = (m.coeff(0), m.coeff(1), m.coeff(2));
    Ok(FMat::from_raw(f, 3, 3, vec![0, 0, f.neg(c), 1, 0, f.neg(b), 0, 1, f.neg(a)]))
}

pub fn is_scalar(a: &FMat) -> bool {
    a.is_scalar()
}

/// Block matrix from a grid of equally-sized blocks.
pub fn block_matrix(spec: &FieldSpec, blocks: &[Vec<&FMat>]) -> Result<FMat> {
    let br = blocks.len();
    let bc = blocks.first().map_or(0, |r| r.len());
    if br == 0 || bc == 0 {
        return Ok(FMat::zeros(spec, 0, 0));
    }
    let (h, w) = (blocks[0][0].rows, blocks[0][0].cols);
    let cols = bc * w;
    let mut data = vec![0u32; br * h * cols];
    for (bi, row) in blocks.iter().enumerate() {
        if row.len() != bc {
            return Err(Error::DimensionMismatch("ragged block grid".into()));
        }
        for (bj, blk) in row.iter().enumerate() {
            if blk.spec != *spec {
                return Err(Error::SpecMismatch);
            }
            if (blk.rows, blk.cols) != (h, w) {
                return Err(Error::DimensionMismatch("unequal block shapes".into()));
            }
            for i in 0..h {
                let dst = (bi * h + i) * cols + bj * w;
                data[dst..dst + w].copy_from_slice(blk.row(i));
            }
        }
    }
    Ok(FMat::from_raw(spec, br * h, cols, data))
}
