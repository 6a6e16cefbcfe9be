//! Matrix-coefficient polynomials and the core decision.
//!
//! A polynomial `f = sum a_i x^i` with `a_i` in `M_n(F)` is evaluated on the
//! right: `f(A) = sum a_i A^i`. Stacking the coefficients as the block row
//! `[a_0 .. a_{d-1}]` turns evaluation on a set `S` into one product with the
//! block Vandermonde matrix whose column block for `A` is `[I; A; ..; A^{d-1}]`.
//! With `d = deg phi_S`, the set is core exactly when no nonzero polynomial of
//! degree below `d` vanishes on `S`, i.e. when that stacked matrix has full
//! row rank `n*d`.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{bad_input, violation, Error, Result};
use crate::field::{FieldSpec, UPoly};
use crate::linalg::FMat;

/// Invertible-tuple search stops after this many candidate tuples.
pub const TUPLE_SEARCH_LIMIT: usize = 4096;

/// Polynomial with `n x n` matrix coefficients, ascending by power.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatPoly {
    spec: FieldSpec,
    n: usize,
    coeffs: Vec<FMat>,
}

impl MatPoly {
    pub fn new(spec: &FieldSpec, n: usize, coeffs: Vec<FMat>) -> Result<Self> {
        for c in &coeffs {
            if c.spec() != spec {
                return Err(Error::SpecMismatch);
            }
            if c.rows() != n || c.cols() != n {
                return Err(Error::DimensionMismatch(format!("coefficient is {}x{}, expected {n}x{n}", c.rows(), c.cols())));
            }
        }
        let mut p = MatPoly { spec: spec.clone(), n, coeffs };
        p.trim();
        Ok(p)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// `p(x)` with scalar coefficients `c_i I`.
    pub fn from_scalar(p: &UPoly, n: usize) -> Self {
        let coeffs = p.codes().iter().map(|&c| FMat::scalar(p.spec(), n, c)).collect();
        MatPoly { spec: p.spec().clone(), n, coeffs }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[FMat] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn right_evaluate(&self, a: &FMat) -> Result<FMat> {
        right_evaluate(self, a)
    }
}

impl Serialize for MatPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

/// `sum a_i A^i`, powers multiplied on the right of the coefficients.
pub fn right_evaluate(f: &MatPoly, a: &FMat) -> Result<FMat> {
    if a.spec() != &f.spec {
        return Err(Error::SpecMismatch);
    }
    if a.rows() != f.n || a.cols() != f.n {
        return Err(Error::DimensionMismatch("evaluation point has the wrong size".into()));
    }
    let mut acc = FMat::zeros(&f.spec, f.n, f.n);
    let mut power = FMat::identity(&f.spec, f.n);
    for (i, c) in f.coeffs.iter().enumerate() {
        if i > 0 {
            power = &power * a;
        }
        if !c.is_zero() {
            acc = &acc + &(c * &power);
        }
    }
    Ok(acc)
}

/// Common field and size of a nonempty set of square matrices.
fn validate_set(set: &[FMat]) -> Result<(FieldSpec, usize)> {
    let first = set.first().ok_or_else(|| bad_input("empty matrix set"))?;
    if !first.is_square() {
        return Err(bad_input("matrices must be square"));
    }
    for a in set {
        if a.spec() != first.spec() {
            return Err(Error::SpecMismatch);
        }
        if a.rows() != first.rows() || a.cols() != first.cols() {
            return Err(bad_input("matrices of different sizes"));
        }
    }
    Ok((first.spec().clone(), first.rows()))
}

/// Sorted, deduplicated copy of a matrix set.
pub fn canonical_set(set: &[FMat]) -> Vec<FMat> {
    let mut s = set.to_vec();
    s.sort();
    s.dedup();
    s
}

/// Monic lcm of the minimal polynomials of the members.
pub fn phi_of(set: &[FMat]) -> Result<UPoly> {
    let (spec, _) = validate_set(set)?;
    let mut phi = UPoly::one(&spec);
    for a in set {
        phi = phi.lcm(&a.min_poly()?)?;
    }
    Ok(phi)
}

/// The `n*d x n*|S|` matrix whose column block `j` is `[I; A_j; ..; A_j^{d-1}]`.
pub fn stacked_vandermonde(set: &[FMat], d: usize) -> Result<FMat> {
    let (spec, n) = validate_set(set)?;
    if d == 0 {
        return Err(bad_input("Vandermonde depth must be at least 1"));
    }
    let cols = n * set.len();
    let mut data = vec![0u32; n * d * cols];
    for (j, a) in set.iter().enumerate() {
        let mut power = FMat::identity(&spec, n);
        for i in 0..d {
            if i > 0 {
                power = &power * a;
            }
            for r in 0..n {
                let dst = (i * n + r) * cols + j * n;
                data[dst..dst + n].copy_from_slice(power.row(r));
            }
        }
    }
    FMat::new(&spec, n * d, cols, data)
}

/// A left null vector of the stacked Vandermonde, as a polynomial whose
/// coefficients carry the vector's blocks in their first row.
fn null_vector_poly(spec: &FieldSpec, n: usize, d: usize, v: &[u32]) -> MatPoly {
    let coeffs = (0..d)
        .map(|i| {
            let mut c = FMat::zeros(spec, n, n);
            for j in 0..n {
                c.set(0, j, v[i * n + j]);
            }
            c
        })
        .collect();
    let mut p = MatPoly { spec: spec.clone(), n, coeffs };
    p.trim();
    p
}

/// A basis of the polynomials of degree `< deg phi_S` vanishing on `S`
/// (one per left null vector of the stacked Vandermonde). Empty exactly when
/// `S` is core.
pub fn low_degree_null_basis(set: &[FMat]) -> Result<Vec<MatPoly>> {
    let (spec, n) = validate_set(set)?;
    let d = phi_of(set)?.degree().expect("phi is nonzero");
    let v = stacked_vandermonde(set, d)?;
    let basis: Vec<MatPoly> =
        v.left_nullspace().basis().iter().map(|w| null_vector_poly(&spec, n, d, w)).collect();
    for f in &basis {
        for a in set {
            if !right_evaluate(f, a)?.is_zero() {
                return Err(violation(format!("null polynomial does not vanish at {a}")));
            }
        }
    }
    Ok(basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Core,
    NonCore,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Members whose block Vandermonde is square and invertible.
    InvertibleTuple { indices: Vec<usize>, members: Vec<FMat> },
    /// Full row rank of the stacked matrix, certified by pivot columns, when
    /// the bounded tuple search finds no invertible square sub-Vandermonde.
    FullRank { pivot_columns: Vec<usize> },
    /// A nonzero polynomial of degree below `deg phi_S` vanishing on `S`.
    NullPolynomial { polynomial: MatPoly },
}

/// Outcome of [`is_core`]. Member indices refer to the canonical (sorted,
/// deduplicated) order of the input set.
#[derive(Debug, Clone, Serialize)]
pub struct CoreReport {
    pub digest: String,
    pub size: usize,
    pub phi: UPoly,
    pub degree: usize,
    pub rank: usize,
    pub verdict: Verdict,
    pub witness: Witness,
}

impl CoreReport {
    pub fn is_core(&self) -> bool {
        self.verdict == Verdict::Core
    }
}

/// SHA-256 over the field description and the canonical code sequence.
pub fn set_digest(set: &[FMat]) -> String {
    let mut h = Sha256::new();
    if let Some(a) = set.first() {
        h.update(a.spec().p().to_le_bytes());
        for m in a.spec().tower() {
            h.update((m.len() as u32).to_le_bytes());
            for c in m {
                h.update(c.to_le_bytes());
            }
        }
        h.update((a.rows() as u32).to_le_bytes());
    }
    for a in set {
        for c in a.codes() {
            h.update(c.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Rank-only verdict, for campaigns that test many sets.
pub fn core_verdict(set: &[FMat]) -> Result<bool> {
    let (_, n) = validate_set(set)?;
    let d = phi_of(set)?.degree().expect("phi is nonzero");
    Ok(stacked_vandermonde(set, d)?.rank() == n * d)
}

/// Lexicographically first `d`-subset with an invertible block Vandermonde.
fn find_invertible_tuple(set: &[FMat], d: usize) -> Option<Vec<usize>> {
    let s = set.len();
    if d > s {
        return None;
    }
    let n = set[0].rows();
    let mut idx: Vec<usize> = (0..d).collect();
    for _ in 0..TUPLE_SEARCH_LIMIT {
        let tuple: Vec<FMat> = idx.iter().map(|&i| set[i].clone()).collect();
        if stacked_vandermonde(&tuple, d).map(|v| v.rank() == n * d).unwrap_or(false) {
            return Some(idx);
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < s - d + i {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
    None
}

/// Decides whether `S` is core and returns a checkable witness either way.
pub fn is_core(set: &[FMat]) -> Result<CoreReport> {
    validate_set(set)?;
    let set = canonical_set(set);
    let (spec, n) = validate_set(&set)?;
    let phi = phi_of(&set)?;
    let d = phi.degree().expect("phi is nonzero");
    let v = stacked_vandermonde(&set, d)?;
    let (_, pivots) = v.rref();
    let rank = pivots.len();
    let (verdict, witness) = if rank == n * d {
        let witness = match find_invertible_tuple(&set, d) {
            Some(indices) => {
                let members = indices.iter().map(|&i| set[i].clone()).collect();
                Witness::InvertibleTuple { indices, members }
            }
            None => Witness::FullRank { pivot_columns: pivots },
        };
        (Verdict::Core, witness)
    } else {
        let w = v.left_nullspace();
        let first = w.basis().first().ok_or_else(|| violation("rank deficit without a null vector"))?;
        let polynomial = null_vector_poly(&spec, n, d, first);
        for a in &set {
            if !right_evaluate(&polynomial, a)?.is_zero() {
                return Err(violation("non-core witness does not vanish on the set"));
            }
        }
        (Verdict::NonCore, Witness::NullPolynomial { polynomial })
    };
    Ok(CoreReport { digest: set_digest(&set), size: set.len(), phi, degree: d, rank, verdict, witness })
}

/// A polynomial of degree at most 2 vanishing at both `A` and `B`.
///
/// With `B - A` invertible and `U = (B - A)^{-1}` this is the monic quadratic
/// `x^2 - (B^2 - A^2) U x + ((B^2 - A^2) U A - A^2)` from block row reduction
/// of `[I I; A B; A^2 B^2]`. Otherwise it is `a_1 x - a_1 A` where `a_1` has a
/// left null vector of `B - A` as its first row and zeros elsewhere.
pub fn pair_annihilator(a: &FMat, b: &FMat) -> Result<MatPoly> {
    let (spec, n) = validate_set(&[a.clone(), b.clone()])?;
    if a == b {
        return Err(bad_input("pair_annihilator needs distinct matrices"));
    }
    let diff = b - a;
    let f = match diff.inverse() {
        Some(u) => {
            let a2 = a * a;
            let sq_diff = &(b * b) - &a2;
            let t = &sq_diff * &u;
            let alpha0 = &(&t * a) - &a2;
            let alpha1 = -&t;
            MatPoly::new(&spec, n, vec![alpha0, alpha1, FMat::identity(&spec, n)])?
        }
        None => {
            let null = diff.left_nullspace();
            let v = null.basis().first().ok_or_else(|| violation("singular difference with no left null vector"))?;
            let mut alpha1 = FMat::zeros(&spec, n, n);
            for (j, &c) in v.iter().enumerate() {
                alpha1.set(0, j, c);
            }
            let alpha0 = -&(&alpha1 * a);
            MatPoly::new(&spec, n, vec![alpha0, alpha1])?
        }
    };
    for x in [a, b] {
        if !right_evaluate(&f, x)?.is_zero() {
            return Err(violation(format!("pair annihilator does not vanish at {x}")));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::companion;

    fn first_row_family(c: &FMat) -> Vec<FMat> {
        let inv = crate::classes::enumerate_class(&c.min_poly().unwrap()).unwrap();
        inv.e_set(c, &[1, 0, 0]).unwrap()
    }

    fn setup() -> (FieldSpec, UPoly, FMat) {
        let f = FieldSpec::prime(2).unwrap();
        let m = UPoly::new(&f, vec![1, 1, 0, 1]);
        let c = companion(&m).unwrap();
        (f, m, c)
    }

    #[test]
    fn evaluation_examples() {
        let (f, m, c) = setup();
        assert!(right_evaluate(&MatPoly::from_scalar(&m, 3), &c).unwrap().is_zero());
        let x = MatPoly::new(&f, 3, vec![FMat::zeros(&f, 3, 3), FMat::identity(&f, 3)]).unwrap();
        assert_eq!(right_evaluate(&x, &c).unwrap(), c);
        // E11 x - E11 C kills anything sharing C's first row
        let e11 = FMat::unit(&f, 3, 0, 0);
        let g = MatPoly::new(&f, 3, vec![-&(&e11 * &c), e11]).unwrap();
        for b in first_row_family(&c) {
            assert!(right_evaluate(&g, &b).unwrap().is_zero());
        }
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(right_evaluate(&x, &FMat::identity(&f3, 3)), Err(Error::SpecMismatch));
    }

    #[test]
    fn phi_examples() {
        let (f, m, c) = setup();
        assert_eq!(phi_of(&[c.clone(), &c * &c]).unwrap(), m);
        assert_eq!(phi_of(&[FMat::scalar(&f, 3, 1)]).unwrap(), UPoly::linear(&f, 1));
        let phi = phi_of(&[c.clone(), FMat::identity(&f, 3)]).unwrap();
        assert_eq!(phi, m.mul(&UPoly::linear(&f, 1)).unwrap());
        assert_eq!(phi.degree(), Some(4));
        assert!(phi_of(&[]).is_err());
    }

    #[test]
    fn vandermonde_shape() {
        let (f, _, c) = setup();
        let v = stacked_vandermonde(std::slice::from_ref(&c), 1).unwrap();
        assert_eq!(v, FMat::identity(&f, 3));
        let c2 = &c * &c;
        let set = [c.clone(), c2.clone(), &c2 + &c];
        let v = stacked_vandermonde(&set, 3).unwrap();
        assert_eq!((v.rows(), v.cols()), (9, 9));
        assert_eq!(v.rank(), 9);
        // block (2, 1) is (C^2)^2
        for r in 0..3 {
            for col in 0..3 {
                assert_eq!(v.get(6 + r, 3 + col), c2.pow(2).get(r, col));
            }
        }
    }

    #[test]
    fn derived_triangle_is_core() {
        let (_, _, c) = setup();
        let c2 = &c * &c;
        let report = is_core(&[c.clone(), c2.clone(), &c2 + &c]).unwrap();
        assert!(report.is_core());
        assert_eq!(report.rank, 9);
        assert!(matches!(report.witness, Witness::InvertibleTuple { .. }));
    }

    #[test]
    fn first_row_family_null_basis() {
        let (f, _, c) = setup();
        let family = first_row_family(&c);
        assert_eq!(family.len(), 4);
        let basis = low_degree_null_basis(&family).unwrap();
        assert!(!basis.is_empty());
        // E11 x - E11 C as a flattened coefficient vector lies in the span
        let mut target = vec![0u32; 27];
        let e1c = c.row(0);
        for j in 0..3 {
            target[j] = f.neg(e1c[j]);
        }
        target[9] = 1;
        let flat: Vec<Vec<u32>> =
            basis.iter().map(|p| (0..3).flat_map(|i| p.coeffs().get(i).map(|m| m.codes().to_vec()).unwrap_or(vec![0; 9])).collect()).collect();
        let span = crate::linalg::Subspace::span(&f, 27, flat, crate::linalg::Orientation::RowSpace);
        assert!(span.contains(&target));
        assert!(!is_core(&family).unwrap().is_core());
    }

    #[test]
    fn singletons() {
        let (f, _, c) = setup();
        assert!(!is_core(std::slice::from_ref(&c)).unwrap().is_core());
        assert!(!low_degree_null_basis(&[c]).unwrap().is_empty());
        assert!(is_core(&[FMat::identity(&f, 3)]).unwrap().is_core());
        assert!(is_core(&[]).is_err());
    }

    #[test]
    fn pair_annihilator_cases() {
        let (_, _, c) = setup();
        let c2 = &c * &c;
        let f = pair_annihilator(&c, &c2).unwrap();
        assert_eq!(f.degree(), Some(2));
        assert!(f.coeffs()[2].is_scalar() && f.coeffs()[2].get(0, 0) == 1);
        // shares the first row with C, so B - C is singular with left kernel e1
        let b = first_row_family(&c).into_iter().find(|b| *b != c).unwrap();
        let g = pair_annihilator(&c, &b).unwrap();
        assert_eq!(g.degree(), Some(1));
        assert_eq!(g.coeffs()[1].rank(), 1);
        assert_eq!(g.coeffs()[1].row(0), &[1, 0, 0]);
        assert!(pair_annihilator(&c, &c).is_err());
    }

    #[test]
    fn digest_is_order_independent() {
        let (_, _, c) = setup();
        let c2 = &c * &c;
        let a = is_core(&[c.clone(), c2.clone()]).unwrap();
        let b = is_core(&[c2, c.clone(), c]).unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.size, 2);
    }
}
