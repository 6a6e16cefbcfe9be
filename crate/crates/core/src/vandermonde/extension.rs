use serde::Serialize;

use crate::classes::validate_cubic;
use crate::error::{bad_input, violation, Error, Result};
use crate::field::{FieldSpec, UPoly};
use crate::linalg::{companion, FMat};

/// The splitting field `K = F_q[x]/(m)` with the root Vandermonde `P`
/// diagonalizing the companion matrix.
#[derive(Debug, Clone)]
pub struct ExtensionContext {
    pub base: FieldSpec,
    pub m: UPoly,
    pub k: FieldSpec,
    /// `α, σ(α), σ^2(α)` as codes of `K`.
    pub roots: [u32; 3],
    /// Rows `(1, σ^i α, σ^i α^2)`.
    pub p: FMat,
    pub p_inv: FMat,
    /// `diag(α, σα, σ^2 α)`.
    pub d: FMat,
    /// `(σα - α)(σ^2 α - σα)(α - σ^2 α)`.
    pub delta: u32,
    /// Companion of `m` over the base field.
    pub companion: FMat,
}

pub fn extension_context(m: &UPoly) -> Result<ExtensionContext> {
    validate_cubic(m)?;
    let base = m.spec().clone();
    let k = base.extend(m.codes())?;
    let alpha = k.generator();
    let roots = [alpha, k.frobenius(alpha, 1), k.frobenius(alpha, 2)];
    if roots[0] == roots[1] || roots[1] == roots[2] || roots[0] == roots[2] {
        return Err(Error::Unsupported(format!("{m} has repeated roots")));
    }
    let rows: Vec<u32> = roots.iter().flat_map(|&r| [1, r, k.mul(r, r)]).collect();
    let p = FMat::new(&k, 3, 3, rows)?;
    let p_inv = p.inverse().ok_or_else(|| violation("root Vandermonde P is singular"))?;
    let d = FMat::diag(&k, &roots);
    let companion = companion(m)?;
    if &(&p * &companion.embed(&k)?) * &p_inv != d {
        return Err(violation("P C P^{-1} != diag(α, σα, σ^2 α)"));
    }
    let [r0, r1, r2] = roots;
    let delta = k.mul(k.mul(k.sub(r1, r0), k.sub(r2, r1)), k.sub(r0, r2));
    if delta == 0 {
        return Err(violation("δ vanishes for distinct roots"));
    }
    let det_p = p.det();
    if k.frobenius(det_p, 1) != det_p || k.frobenius(delta, 1) != delta {
        return Err(violation("det P or δ is not fixed by σ"));
    }
    Ok(ExtensionContext { base, m: m.clone(), k, roots, p, p_inv, d, delta, companion })
}

impl ExtensionContext {
    pub fn sigma(&self, z: u32, i: u32) -> u32 {
        self.k.frobenius(z, i)
    }

    /// `P U P^{-1}` for `U` over the base field.
    pub fn conjugate(&self, u: &FMat) -> Result<FMat> {
        if u.spec() != &self.base {
            return Err(Error::SpecMismatch);
        }
        Ok(&(&self.p * &u.embed(&self.k)?) * &self.p_inv)
    }
}

/// Checks the six Frobenius relations among the entries of `P U P^{-1}`.
pub fn xentries_check(u: &FMat, ctx: &ExtensionContext) -> Result<bool> {
    let x = ctx.conjugate(u)?;
    let s = |z: u32, i: u32| ctx.sigma(z, i);
    let e = |i: usize, j: usize| x.get(i, j);
    Ok(e(1, 1) == s(e(0, 0), 1)
        && e(2, 2) == s(e(0, 0), 2)
        && e(1, 2) == s(e(0, 1), 1)
        && e(2, 0) == s(e(0, 1), 2)
        && e(1, 0) == s(e(0, 2), 1)
        && e(2, 1) == s(e(0, 2), 2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormTag {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalForm {
    pub form: FormTag,
    /// `x` for form III, as a code of `K`.
    pub parameter: Option<u32>,
    /// The reduced matrix over `K`.
    pub x: FMat,
    /// `Q = [U, C] C [U, C]^{-1}` over the base field.
    pub q: FMat,
}

/// `[X, D] D [X, D]^{-1}`, or `None` when the commutator is singular.
fn conjugate_by_commutator(x: &FMat, d: &FMat) -> Option<FMat> {
    let c = x.commutator(d);
    let ci = c.inverse()?;
    Some(&(&c * d) * &ci)
}

/// Reduces `P U P^{-1}` to one of the three canonical shapes by subtracting a
/// diagonal and rescaling columns, then checks the shape and that
/// `[X, D] D [X, D]^{-1} = P Q P^{-1}` is unchanged.
pub fn canonical_form(u: &FMat, ctx: &ExtensionContext) -> Result<CanonicalForm> {
    let k = &ctx.k;
    let comm = u.commutator(&ctx.companion);
    let comm_inv = comm.inverse().ok_or_else(|| bad_input("[U, C] is singular"))?;
    let q = &(&comm * &ctx.companion) * &comm_inv;
    let x1 = ctx.conjugate(u)?;
    let (x11, x12, x13) = (x1.get(0, 0), x1.get(0, 1), x1.get(0, 2));
    let s = |z: u32, i: u32| ctx.sigma(z, i);
    let z = FMat::diag(k, &[x11, s(x11, 1), s(x11, 2)]);
    let y = &x1 - &z;
    let (form, r, parameter) = match (x12 != 0, x13 != 0) {
        (true, false) => {
            let t = k.inv(x12);
            (FormTag::I, [s(t, 2), t, s(t, 1)], None)
        }
        (false, true) => {
            let t = k.inv(x13);
            (FormTag::II, [s(t, 1), s(t, 2), t], None)
        }
        (true, true) => {
            let t = k.inv(x13);
            (FormTag::III, [s(t, 1), k.inv(x12), t], Some(k.mul(s(x12, 1), t)))
        }
        (false, false) => return Err(violation("x12 = x13 = 0 with an invertible commutator")),
    };
    let x = &y * &FMat::diag(k, &r);
    let expected: Vec<u32> = match (form, parameter) {
        (FormTag::I, _) => vec![0, 1, 0, 0, 0, 1, 1, 0, 0],
        (FormTag::II, _) => vec![0, 0, 1, 1, 0, 0, 0, 1, 0],
        (FormTag::III, Some(p)) => {
            if p == 0 {
                return Err(violation("form III parameter is zero"));
            }
            vec![0, 1, 1, 1, 0, p, s(p, 1), s(k.inv(p), 2), 0]
        }
        (FormTag::III, None) => unreachable!(),
    };
    if x.codes() != expected.as_slice() {
        return Err(violation(format!("reduced matrix {x} does not have form {form:?}")));
    }
    let lhs = conjugate_by_commutator(&x, &ctx.d).ok_or_else(|| violation("[X, D] singular after reduction"))?;
    if lhs != ctx.conjugate(&q)? {
        return Err(violation("[X, D] D [X, D]^{-1} != P Q P^{-1}"));
    }
    Ok(CanonicalForm { form, parameter, x, q })
}

fn triple_term(x: &FMat, k: &FieldSpec) -> u32 {
    let e = |i: usize, j: usize| x.get(i, j);
    let a = k.mul(k.mul(e(0, 1), e(1, 2)), e(2, 0));
    let b = k.mul(k.mul(e(0, 2), e(1, 0)), e(2, 1));
    k.sub(a, b)
}

/// Checks `det [X, D] = δ (x12 x23 x31 - x13 x21 x32)`.
pub fn commutator_det_check(x: &FMat, ctx: &ExtensionContext) -> Result<bool> {
    if x.spec() != &ctx.k {
        return Err(Error::SpecMismatch);
    }
    Ok(x.commutator(&ctx.d).det() == ctx.k.mul(ctx.delta, triple_term(x, &ctx.k)))
}

/// `det([X,D] D [X,D]^{-1} - [Y,D] D [Y,D]^{-1})` from the closed form,
/// checked against the direct determinant.
///
/// The closed form is
/// `-δ (x23 y13 - x13 y23)(x31 y21 - x21 y31)(x32 y12 - x12 y32) / (t(X) t(Y))`
/// with `t(X) = x12 x23 x31 - x13 x21 x32`. Without the leading minus the
/// same expression is the determinant of the difference taken as `Q_Y - Q_X`;
/// the two agree only in characteristic 2.
pub fn sdiff_det(x: &FMat, y: &FMat, ctx: &ExtensionContext) -> Result<u32> {
    let k = &ctx.k;
    if x.spec() != k || y.spec() != k {
        return Err(Error::SpecMismatch);
    }
    let den = k.mul(triple_term(x, k), triple_term(y, k));
    if den == 0 {
        return Err(bad_input("[X, D] or [Y, D] is singular"));
    }
    let (xe, ye) = (|i: usize, j: usize| x.get(i, j), |i: usize, j: usize| y.get(i, j));
    let cross = |(i1, j1): (usize, usize), (i2, j2): (usize, usize)| {
        k.sub(k.mul(xe(i1, j1), ye(i2, j2)), k.mul(xe(i2, j2), ye(i1, j1)))
    };
    let num = k.mul(
        k.mul(ctx.delta, cross((1, 2), (0, 2))),
        k.mul(cross((2, 0), (1, 0)), cross((2, 1), (0, 1))),
    );
    let formula = k.neg(k.div(num, den).expect("nonzero denominator"));
    let qx = conjugate_by_commutator(x, &ctx.d).ok_or_else(|| violation("[X, D] singular with nonzero determinant formula"))?;
    let qy = conjugate_by_commutator(y, &ctx.d).ok_or_else(|| violation("[Y, D] singular with nonzero determinant formula"))?;
    let direct = (&qx - &qy).det();
    if direct != formula {
        return Err(violation(format!("difference determinant formula {formula} != direct {direct}")));
    }
    Ok(formula)
}
