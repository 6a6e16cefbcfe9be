use serde::Serialize;

use crate::error::{bad_input, violation, Error, Result};
use crate::linalg::{FMat, Subspace};

/// Nullspace data for a pair `A != B` of one class.
#[derive(Debug, Clone)]
pub struct PairAnalysis {
    pub a: FMat,
    pub b: FMat,
    pub singular: bool,
    /// `n(B - A)`
    pub null_diff: Subspace,
    /// `n(B^2 - A^2)`
    pub null_sq_diff: Subspace,
    /// `N_AB = n(B - A) + n(B^2 - A^2)`, when `B - A` is singular.
    pub n_ab: Option<Subspace>,
    /// `row(B - A) ∩ row(B^2 - A^2)`, when `B - A` is singular.
    pub row_meet: Option<Subspace>,
}

/// The `x^2` coefficient of the common minimal polynomial of `a` and `b`.
pub(crate) fn shared_cubic_a(a: &FMat, b: &FMat) -> Result<u32> {
    if a.spec() != b.spec() {
        return Err(Error::SpecMismatch);
    }
    let m = a.min_poly()?;
    if m.degree() != Some(3) || !m.is_irreducible() {
        return Err(bad_input(format!("{a} does not have an irreducible cubic minimal polynomial")));
    }
    if b.min_poly()? != m {
        return Err(bad_input("matrices lie in different classes"));
    }
    Ok(m.coeff(2))
}

fn check(cond: bool, claim: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(violation(claim.to_string()))
    }
}

/// Builds the pair data and, when `B - A` is singular, checks every nullspace
/// and row-space relation for every scalar `λ`.
pub fn pair_analysis(a: &FMat, b: &FMat) -> Result<PairAnalysis> {
    let coef_a = shared_cubic_a(a, b)?;
    pair_analysis_with(coef_a, a, b)
}

pub(crate) fn pair_analysis_with(coef_a: u32, a: &FMat, b: &FMat) -> Result<PairAnalysis> {
    if a == b {
        return Err(bad_input("pair analysis needs A != B"));
    }
    let f = a.spec();
    let diff = b - a;
    let sq = &(b * b) - &(a * a);
    let null_diff = diff.left_nullspace();
    let null_sq_diff = sq.left_nullspace();
    let singular = !null_diff.is_zero();
    if !singular {
        check(null_sq_diff.is_zero(), "B - A invertible but B^2 - A^2 singular")?;
        return Ok(PairAnalysis { a: a.clone(), b: b.clone(), singular, null_diff, null_sq_diff, n_ab: None, row_meet: None });
    }

    check(null_diff.dim() == 1, "n(B - A) is not 1-dimensional")?;
    let rnull_diff = diff.right_nullspace();
    for lambda in 0..f.order() {
        let m_lambda = &sq - &diff.scale(lambda);
        let shift = f.add(coef_a, lambda);
        let left = m_lambda.left_nullspace();
        check(left.dim() == 1, "n(B^2 - A^2 - λ(B - A)) is not 1-dimensional")?;
        check(null_diff.image(&a.add_scalar(shift)) == left, "n(B - A)(A + a + λ) != n(B^2 - A^2 - λ(B - A))")?;
        let right = m_lambda.right_nullspace();
        check(
            rnull_diff.image_right(&b.add_scalar(shift)) == right,
            "(B + a + λ) n_r(B - A) != n_r(B^2 - A^2 - λ(B - A))",
        )?;
    }
    check(null_diff.intersect(&null_sq_diff).is_zero(), "left nullspaces of B - A and B^2 - A^2 meet")?;
    check(rnull_diff.intersect(&sq.right_nullspace()).is_zero(), "right nullspaces of B - A and B^2 - A^2 meet")?;

    let n_ab = null_diff.sum(&null_sq_diff);
    check(n_ab.dim() == 2, "dim N_AB != 2")?;
    let v = &null_diff.basis()[0];
    let pair_basis = Subspace::span(f, 3, vec![v.clone(), a.add_scalar(coef_a).left_apply(v)], crate::linalg::Orientation::RowSpace);
    check(pair_basis == n_ab, "{v, v(A + a)} does not span N_AB")?;

    let row_meet = diff.row_space().intersect(&sq.row_space());
    check(row_meet.dim() == 1, "dim R != 1")?;
    check(n_ab.image(&diff) == row_meet, "N_AB (B - A) != R")?;
    check(n_ab.image(&sq) == row_meet, "N_AB (B^2 - A^2) != R")?;
    // v(B - A) in row(B^2 - A^2)  =>  v in N_AB, and symmetrically
    for (x, y) in [(&diff, &sq), (&sq, &diff)] {
        let stacked = crate::linalg::block_matrix(f, &[vec![x], vec![&-y]])?;
        for w in stacked.left_nullspace().basis() {
            check(n_ab.contains(&w[..3]), "preimage of R escapes N_AB")?;
        }
    }
    Ok(PairAnalysis { a: a.clone(), b: b.clone(), singular, null_diff, null_sq_diff, n_ab: Some(n_ab), row_meet: Some(row_meet) })
}

/// Whether "B - A singular", "B^2 - A^2 - λ(B - A) singular for all λ" and
/// "... for some λ" agree.
pub fn inv_diff_equivalence(a: &FMat, b: &FMat) -> Result<bool> {
    if a.spec() != b.spec() {
        return Err(Error::SpecMismatch);
    }
    let diff = b - a;
    let sq = &(b * b) - &(a * a);
    let singular = diff.det() == 0;
    let scan: Vec<bool> = (0..a.spec().order()).map(|l| (&sq - &diff.scale(l)).det() == 0).collect();
    let all = scan.iter().all(|&s| s);
    let any = scan.iter().any(|&s| s);
    Ok(singular == all && all == any)
}

/// `M = a1 (B - A) + a2 (A + a)(B - A) - a2 (B^2 - A^2) + a3 (A + a)(B^2 - A^2)`,
/// checked against the factorization `(B - A) M0` and the invertible-or-zero
/// dichotomy.
pub fn mixed_m(a: &FMat, b: &FMat, a1: u32, a2: u32, a3: u32) -> Result<FMat> {
    let f = a.spec();
    if [a1, a2, a3].iter().any(|&c| c >= f.order()) {
        return Err(bad_input("coefficient code out of range"));
    }
    let m = a.min_poly()?;
    shared_cubic_a(a, b)?;
    let (cb, ca) = (m.coeff(1), m.coeff(2));
    let diff = b - a;
    if diff.det() == 0 {
        return Err(bad_input("B - A must be invertible"));
    }
    let sq = &(b * b) - &(a * a);
    let shifted = a.add_scalar(ca);
    let mm = &(&(&diff.scale(a1) + &(&shifted * &diff).scale(a2)) - &sq.scale(a2)) + &(&shifted * &sq).scale(a3);
    // M0 = -a3 B^2 - a2 B + (a1 + a a2 - b a3)
    let c0 = f.sub(f.add(a1, f.mul(ca, a2)), f.mul(cb, a3));
    let m0 = (&(b * b).scale(f.neg(a3)) + &b.scale(f.neg(a2))).add_scalar(c0);
    check(&diff * &m0 == mm, "M != (B - A) M0")?;
    let all_zero = a1 == 0 && a2 == 0 && a3 == 0;
    let ok = if all_zero { mm.is_zero() } else { mm.det() != 0 };
    check(ok, "M is neither invertible nor zero as predicted")?;
    Ok(mm)
}

/// `(B - A) B (B - A)^{-1}`.
pub fn q_of(a: &FMat, b: &FMat) -> Result<FMat> {
    if a.spec() != b.spec() {
        return Err(Error::SpecMismatch);
    }
    let diff = b - a;
    let inv = diff.inverse().ok_or_else(|| bad_input("B - A is singular"))?;
    Ok(&(&diff * b) * &inv)
}

/// Whether every difference of distinct members is invertible.
pub fn idp_check(set: &[FMat]) -> bool {
    set.iter().enumerate().all(|(i, x)| set[i + 1..].iter().all(|y| x == y || (x - y).det() != 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum TripleCase {
    BothSingular { same_nullspace: bool },
    Mixed,
    BothInvertible { q_b: FMat, q_c: FMat, equal: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleClassification {
    #[serde(flatten)]
    pub case: TripleCase,
    /// Invertibility of `V(A, B, C)` from the case criterion.
    pub predicted: bool,
    /// Invertibility of `V(A, B, C)` from its rank.
    pub direct: bool,
}

impl TripleClassification {
    pub fn v_invertible(&self) -> bool {
        self.direct
    }
}

/// Classifies `(A, B, C)` relative to the base point `A` and checks the
/// predicted invertibility of `V(A, B, C)` against a direct rank computation.
pub fn classify_triple(a: &FMat, b: &FMat, c: &FMat) -> Result<TripleClassification> {
    if a == b || a == c || b == c {
        return Err(bad_input("classify_triple needs distinct matrices"));
    }
    shared_cubic_a(a, b)?;
    shared_cubic_a(a, c)?;
    classify_triple_unchecked(a, b, c)
}

/// [`classify_triple`] without the class-membership checks; inputs must be
/// distinct members of one class.
pub fn classify_triple_unchecked(a: &FMat, b: &FMat, c: &FMat) -> Result<TripleClassification> {
    let f = a.spec();
    let db = b - a;
    let dc = c - a;
    let (inv_b, inv_c) = (db.inverse(), dc.inverse());
    let (case, predicted) = match (&inv_b, &inv_c) {
        (None, None) => {
            let nb = db.left_nullspace();
            let nc = dc.left_nullspace();
            let same = nb == nc;
            let n_ab = nb.sum(&(&(b * b) - &(a * a)).left_nullspace());
            let n_ac = nc.sum(&(&(c * c) - &(a * a)).left_nullspace());
            check((n_ab == n_ac) == same, "N_AB = N_AC disagrees with n(B - A) = n(C - A)")?;
            let joint = crate::linalg::block_matrix(f, &[vec![&db, &dc]])?;
            let common = !joint.left_nullspace().is_zero();
            check(common == same, "common left eigenvector disagrees with n(B - A) = n(C - A)")?;
            (TripleCase::BothSingular { same_nullspace: same }, !same)
        }
        (Some(_), None) | (None, Some(_)) => (TripleCase::Mixed, true),
        (Some(ib), Some(ic)) => {
            let q_b = &(&db * b) * ib;
            let q_c = &(&dc * c) * ic;
            let equal = q_b == q_c;
            (TripleCase::BothInvertible { q_b, q_c, equal }, !equal)
        }
    };
    let v = crate::matpoly::stacked_vandermonde(&[a.clone(), b.clone(), c.clone()], 3)?;
    let direct = v.rank() == 9;
    if direct != predicted {
        return Err(violation(format!("triple ({a}, {b}, {c}): predicted {predicted}, rank says {direct}")));
    }
    Ok(TripleClassification { case, predicted, direct })
}
