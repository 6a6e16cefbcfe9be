//! The class `C(m)` of an irreducible cubic and the sets derived from it.

use std::collections::{HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{bad_input, Error, Result};
use crate::field::{FieldSpec, UPoly};
use crate::linalg::{companion, FMat, Orientation, Subspace};

/// `GL(3, q)` is materialized by filtering only up to this field order.
pub const MAX_GL_ORDER: u32 = 5;

/// Orbit closure refuses classes larger than this.
pub const MAX_CLASS_SIZE: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassMethod {
    /// Filter all `q^9` matrices by characteristic polynomial.
    Filter,
    /// Close the conjugation orbit of the companion matrix.
    Orbit,
}

/// Checks that `m` is a monic irreducible cubic.
pub fn validate_cubic(m: &UPoly) -> Result<()> {
    if m.degree() != Some(3) || !m.is_monic() {
        return Err(bad_input(format!("{m} is not a monic cubic")));
    }
    if !m.is_irreducible() {
        return Err(bad_input(format!("{m} is reducible")));
    }
    Ok(())
}

/// The `idx`-th `n x n` matrix in code order (last entry least significant).
fn matrix_from_index(spec: &FieldSpec, n: usize, mut idx: u64) -> FMat {
    let q = spec.order() as u64;
    let mut data = vec![0u32; n * n];
    for d in data.iter_mut().rev() {
        *d = (idx % q) as u32;
        idx /= q;
    }
    FMat::from_raw(spec, n, n, data)
}

fn matrix_count(spec: &FieldSpec, n: usize) -> Result<u64> {
    (spec.order() as u64)
        .checked_pow((n * n) as u32)
        .ok_or_else(|| Error::SizeGuard("matrix space too large to enumerate".into()))
}

/// Every `n x n` matrix over `spec`, sorted.
pub fn all_matrices(spec: &FieldSpec, n: usize) -> impl Iterator<Item = FMat> + '_ {
    let total = matrix_count(spec, n).unwrap_or(0);
    (0..total).map(move |i| matrix_from_index(spec, n, i))
}

/// `GL(3, q)` in sorted order.
pub fn general_linear(spec: &FieldSpec) -> Result<Vec<FMat>> {
    if spec.order() > MAX_GL_ORDER {
        return Err(Error::SizeGuard(format!("GL(3,{}) is above the enumeration limit q <= {MAX_GL_ORDER}", spec.order())));
    }
    let total = matrix_count(spec, 3)?;
    Ok((0..total)
        .into_par_iter()
        .map(|i| matrix_from_index(spec, 3, i))
        .filter(|a| a.det() != 0)
        .collect())
}

pub fn gl_order(q: u64) -> u64 {
    (q.pow(3) - 1) * (q.pow(3) - q) * (q.pow(3) - q * q)
}

/// Lines of `F^3`, each represented by its vector with first nonzero entry 1.
pub fn projective_points(spec: &FieldSpec) -> Vec<Vec<u32>> {
    let q = spec.order();
    let mut out = Vec::new();
    for lead in 0..3 {
        let free = 2 - lead;
        for idx in 0..q.pow(free as u32) {
            let mut v = vec![0u32; 3];
            v[lead] = 1;
            let mut k = idx;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = k % q;
                k /= q;
            }
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Scales a nonzero vector so its first nonzero entry is 1.
pub fn normalize_projective(spec: &FieldSpec, v: &[u32]) -> Option<Vec<u32>> {
    let lead = *v.iter().find(|&&c| c != 0)?;
    let inv = spec.inv(lead);
    Some(v.iter().map(|&c| spec.mul(c, inv)).collect())
}

/// `C(m)` in canonical (sorted) order.
#[derive(Clone)]
pub struct ClassInventory {
    m: UPoly,
    members: Vec<FMat>,
    gl: OnceLock<Arc<Vec<FMat>>>,
}

impl std::fmt::Debug for ClassInventory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClassInventory({}, {} members)", self.m, self.members.len())
    }
}

/// Filter for `q <= 3`, orbit closure above.
pub fn enumerate_class(m: &UPoly) -> Result<ClassInventory> {
    let method = if m.spec().order() <= 3 { ClassMethod::Filter } else { ClassMethod::Orbit };
    enumerate_class_with(m, method)
}

pub fn enumerate_class_with(m: &UPoly, method: ClassMethod) -> Result<ClassInventory> {
    validate_cubic(m)?;
    let spec = m.spec();
    let q = spec.order() as u64;
    let expected = class_size(q);
    if expected > MAX_CLASS_SIZE {
        return Err(Error::SizeGuard(format!("|C(m)| = {expected} exceeds {MAX_CLASS_SIZE}")));
    }
    let members = match method {
        ClassMethod::Filter => {
            let total = matrix_count(spec, 3)?;
            if total > 1 << 24 {
                return Err(Error::SizeGuard(format!("filtering {total} matrices")));
            }
            (0..total)
                .into_par_iter()
                .map(|i| matrix_from_index(spec, 3, i))
                .filter(|a| a.char_poly3().map(|c| &c == m).unwrap_or(false))
                .collect()
        }
        ClassMethod::Orbit => orbit_closure(m)?,
    };
    Ok(ClassInventory { m: m.clone(), members, gl: OnceLock::new() })
}

/// Generators of `GL(3, q)` with their inverses: transvections `I + E_ij`
/// and `diag(g, 1, 1)` for a primitive `g`.
fn gl_generators(spec: &FieldSpec) -> Vec<(FMat, FMat)> {
    let mut gens = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let e = FMat::unit(spec, 3, i, j);
                let id = FMat::identity(spec, 3);
                gens.push((&id + &e, &id - &e));
            }
        }
    }
    let g = spec.primitive_element();
    if g != 1 {
        gens.push((FMat::diag(spec, &[g, 1, 1]), FMat::diag(spec, &[spec.inv(g), 1, 1])));
    }
    gens
}

fn orbit_closure(m: &UPoly) -> Result<Vec<FMat>> {
    let spec = m.spec();
    let start = companion(m)?;
    let gens = gl_generators(spec);
    let mut seen: HashSet<FMat> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(a) = queue.pop_front() {
        for (g, g_inv) in &gens {
            let b = &(g * &a) * g_inv;
            if seen.insert(b.clone()) {
                queue.push_back(b);
            }
        }
    }
    let mut members: Vec<FMat> = seen.into_iter().collect();
    members.sort();
    Ok(members)
}

pub fn class_size(q: u64) -> u64 {
    (q.pow(3) - q) * (q.pow(3) - q * q)
}

impl ClassInventory {
    pub fn m(&self) -> &UPoly {
        &self.m
    }

    pub fn spec(&self) -> &FieldSpec {
        self.m.spec()
    }

    pub fn q(&self) -> u64 {
        self.spec().order() as u64
    }

    pub fn members(&self) -> &[FMat] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, a: &FMat) -> Option<usize> {
        self.members.binary_search(a).ok()
    }

    pub fn contains(&self, a: &FMat) -> bool {
        self.position(a).is_some()
    }

    pub fn companion(&self) -> FMat {
        companion(&self.m).expect("validated cubic")
    }

    /// `GL(3, q)`, built on first use and shared afterwards.
    pub fn general_linear(&self) -> Result<Arc<Vec<FMat>>> {
        if let Some(gl) = self.gl.get() {
            return Ok(gl.clone());
        }
        let gl = Arc::new(general_linear(self.spec())?);
        Ok(self.gl.get_or_init(|| gl).clone())
    }

    fn require_member(&self, a: &FMat) -> Result<()> {
        if a.spec() != self.spec() {
            return Err(Error::SpecMismatch);
        }
        if !self.contains(a) {
            return Err(bad_input(format!("{a} is not in C({})", self.m)));
        }
        Ok(())
    }

    /// `E_{A,v} = {B in C(m) : vB = vA}`.
    pub fn e_set(&self, a: &FMat, v: &[u32]) -> Result<Vec<FMat>> {
        self.require_member(a)?;
        if v.len() != 3 || v.iter().any(|&c| c >= self.spec().order()) {
            return Err(bad_input("v must be a vector of 3 field codes"));
        }
        if v.iter().all(|&c| c == 0) {
            return Err(bad_input("v must be nonzero"));
        }
        let va = a.left_apply(v);
        Ok(self.members.iter().filter(|b| b.left_apply(v) == va).cloned().collect())
    }

    /// `D_A`: members at invertible distance from `A`.
    pub fn d_set(&self, a: &FMat) -> Result<Vec<FMat>> {
        self.require_member(a)?;
        Ok(self.members.iter().filter(|b| (*b - a).det() != 0).cloned().collect())
    }

    pub fn derived_sets(&self, a: &FMat) -> Result<DerivedSets> {
        self.require_member(a)?;
        let e_sets = projective_points(self.spec())
            .into_iter()
            .map(|v| {
                let e = self.e_set(a, &v)?;
                Ok((v, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let d = self.d_set(a)?;
        let gl = self.general_linear()?;
        let u = u_set(&gl, a);
        let mut b: Vec<FMat> = u.par_iter().map(|x| x.commutator(a)).collect();
        b.sort();
        b.dedup();
        let mut s: Vec<FMat> = b
            .par_iter()
            .map(|c| &(c * a) * &c.inverse().expect("commutator in B_A is invertible"))
            .collect();
        s.sort();
        s.dedup();
        Ok(DerivedSets { base: a.clone(), e_sets, d, u, b, s })
    }

    /// Checks `U_B = U_A` by enumeration. `B` must be a nonscalar polynomial in `A`.
    pub fn ua_equals_ub(&self, a: &FMat, b: &FMat) -> Result<bool> {
        self.require_member(a)?;
        if b.spec() != a.spec() {
            return Err(Error::SpecMismatch);
        }
        if b.is_scalar() {
            return Err(bad_input("B must not be scalar"));
        }
        if !in_algebra(a, b) {
            return Err(bad_input("B is not a polynomial in A"));
        }
        let gl = self.general_linear()?;
        Ok(u_set(&gl, a) == u_set(&gl, b))
    }

    /// Recomputes every class count by enumeration and compares it with the closed form.
    pub fn verify_counts(&self) -> Result<CountReport> {
        let q = self.q();
        let a = self.companion();
        let sets = self.derived_sets(&a)?;
        let gl = self.general_linear()?;
        let r = q.pow(3) - q * q - q;
        let mut e_sizes: Vec<u64> = sets.e_sets.iter().map(|(_, e)| e.len() as u64).collect();
        e_sizes.sort();
        e_sizes.dedup();
        let e_formula = q.pow(3) - q * q;
        let e_enumerated = if e_sizes.len() == 1 { e_sizes[0] } else { *e_sizes.iter().find(|&&s| s != e_formula).unwrap() };
        let entries = vec![
            CountEntry::new("GL(3,q)", gl.len() as u64, gl_order(q)),
            CountEntry::new("C(m)", self.len() as u64, class_size(q)),
            CountEntry::new("E_{A,v}", e_enumerated, e_formula),
            CountEntry::new("D_A", sets.d.len() as u64, r * (r - 1)),
            CountEntry::new("U_A", sets.u.len() as u64, (q.pow(3) - 1) * r * (r - 1)),
            CountEntry::new("B_A", sets.b.len() as u64, (q.pow(3) - 1) * r),
            CountEntry::new("S_A", sets.s.len() as u64, r),
        ];
        let all_match = entries.iter().all(|e| e.matches);
        Ok(CountReport { q, m: self.m.clone(), entries, all_match })
    }
}

/// `{U in gl : [U, X] invertible}`.
pub fn u_set(gl: &[FMat], x: &FMat) -> Vec<FMat> {
    gl.par_iter().filter(|u| u.commutator(x).det() != 0).cloned().collect()
}

/// Whether `b` lies in `F[a] = span{I, a, a^2}` (3x3 only).
pub fn in_algebra(a: &FMat, b: &FMat) -> bool {
    let spec = a.spec();
    let basis = vec![FMat::identity(spec, 3).codes().to_vec(), a.codes().to_vec(), (a * a).codes().to_vec()];
    Subspace::span(spec, 9, basis, Orientation::RowSpace).contains(b.codes())
}

/// All `c0 + c1 a + c2 a^2`.
pub fn algebra_elements(a: &FMat) -> Vec<FMat> {
    let spec = a.spec();
    let a2 = a * a;
    let q = spec.order();
    let mut out = Vec::new();
    for c0 in 0..q {
        for c1 in 0..q {
            for c2 in 0..q {
                out.push((&a.scale(c1) + &a2.scale(c2)).add_scalar(c0));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone)]
pub struct DerivedSets {
    pub base: FMat,
    /// One `E_{A,v}` per projective point `v`, in point order.
    pub e_sets: Vec<(Vec<u32>, Vec<FMat>)>,
    pub d: Vec<FMat>,
    pub u: Vec<FMat>,
    pub b: Vec<FMat>,
    pub s: Vec<FMat>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountEntry {
    pub name: String,
    pub enumerated: u64,
    pub formula: u64,
    pub matches: bool,
}

impl CountEntry {
    fn new(name: &str, enumerated: u64, formula: u64) -> Self {
        CountEntry { name: name.into(), enumerated, formula, matches: enumerated == formula }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub q: u64,
    pub m: UPoly,
    pub entries: Vec<CountEntry>,
    pub all_match: bool,
}

impl CountReport {
    pub fn get(&self, name: &str) -> Option<&CountEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Builds the inventory for `m` and runs [`ClassInventory::verify_counts`].
pub fn verify_counts(m: &UPoly) -> Result<CountReport> {
    enumerate_class(m)?.verify_counts()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2_class() -> ClassInventory {
        let f = FieldSpec::prime(2).unwrap();
        enumerate_class(&UPoly::new(&f, vec![1, 1, 0, 1])).unwrap()
    }

    #[test]
    fn class_sizes_and_methods_agree() {
        for q in [2u32, 3] {
            let f = FieldSpec::gf(q).unwrap();
            let m = crate::field::irreducible_cubics(&f)[0].clone();
            let a = enumerate_class_with(&m, ClassMethod::Filter).unwrap();
            let b = enumerate_class_with(&m, ClassMethod::Orbit).unwrap();
            assert_eq!(a.members(), b.members());
            assert_eq!(a.len() as u64, class_size(q as u64));
            assert!(a.contains(&a.companion()));
            for x in a.members() {
                assert_eq!(x.min_poly().unwrap(), m);
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        let f = FieldSpec::prime(2).unwrap();
        assert!(matches!(enumerate_class(&UPoly::new(&f, vec![1, 1, 1, 1])), Err(Error::BadInput(_))));
    }

    #[test]
    fn projective_points_count() {
        for q in [2u32, 3, 4] {
            let f = FieldSpec::gf(q).unwrap();
            let pts = projective_points(&f);
            assert_eq!(pts.len() as u32, q * q + q + 1);
            for p in &pts {
                assert_eq!(normalize_projective(&f, p).as_ref(), Some(p));
            }
        }
    }

    /// `E_{C,e1}` from the explicit parametrization by `(x2, x4, x5)`, `x5 != 0`.
    fn first_row_family(spec: &FieldSpec, m: &UPoly) -> Vec<FMat> {
        let (c, b, a) = (m.coeff(0), m.coeff(1), m.coeff(2));
        let f = spec;
        let mut out = Vec::new();
        for x2 in 0..f.order() {
            for x4 in 0..f.order() {
                for x5 in 1..f.order() {
                    let inv5 = f.inv(x5);
                    let x1 = f.mul(inv5, f.add(1, f.mul(x2, x4)));
                    let t = f.sub(f.add(f.neg(f.mul(x2, x2)), f.mul(c, x4)), f.add(f.mul(a, x2), b));
                    let x3 = f.mul(inv5, t);
                    let x6 = f.sub(f.neg(x2), a);
                    let data = vec![0, 0, f.neg(c), x1, x2, x3, x4, x5, x6];
                    out.push(FMat::new(f, 3, 3, data).unwrap());
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn e_set_matches_parametrization() {
        for q in [2u32, 3] {
            let f = FieldSpec::gf(q).unwrap();
            for m in crate::field::irreducible_cubics(&f).into_iter().take(3) {
                let inv = enumerate_class(&m).unwrap();
                let c = inv.companion();
                let e = inv.e_set(&c, &[1, 0, 0]).unwrap();
                assert_eq!(e.len() as u32, q * q * q - q * q);
                assert_eq!(e, first_row_family(&f, &m));
            }
        }
    }

    #[test]
    fn e_set_errors() {
        let inv = f2_class();
        let c = inv.companion();
        assert!(inv.e_set(&c, &[0, 0, 0]).is_err());
        assert!(inv.e_set(&FMat::identity(c.spec(), 3), &[1, 0, 0]).is_err());
    }

    #[test]
    fn e_sets_partition_complement_of_d() {
        for q in [2u32, 3] {
            let f = FieldSpec::gf(q).unwrap();
            let m = crate::field::irreducible_cubics(&f)[0].clone();
            let inv = enumerate_class(&m).unwrap();
            let a = inv.companion();
            let sets = inv.derived_sets(&a).unwrap();
            assert!(!sets.d.contains(&a));
            let mut union: Vec<FMat> = Vec::new();
            for (i, (_, e)) in sets.e_sets.iter().enumerate() {
                for (_, e2) in &sets.e_sets[i + 1..] {
                    let common: Vec<_> = e.iter().filter(|x| e2.contains(x)).collect();
                    assert_eq!(common, vec![&a]);
                }
                union.extend(e.iter().filter(|x| **x != a).cloned());
            }
            union.sort();
            let complement: Vec<FMat> =
                inv.members().iter().filter(|x| **x != a && !sets.d.contains(x)).cloned().collect();
            assert_eq!(union, complement);
        }
    }

    #[test]
    fn derived_sets_at_q2() {
        let inv = f2_class();
        let c = inv.companion();
        let c2 = &c * &c;
        let sets = inv.derived_sets(&c).unwrap();
        let mut expected = vec![c2.clone(), &c2 + &c];
        expected.sort();
        assert_eq!(sets.d, expected);
        assert_eq!(sets.s, expected);
        assert_eq!((sets.u.len(), sets.b.len()), (14, 14));
    }

    #[test]
    fn counts_q2() {
        let report = f2_class().verify_counts().unwrap();
        assert!(report.all_match, "{report:?}");
        assert_eq!(report.get("S_A").unwrap().enumerated, 2);
    }

    #[test]
    fn ua_equals_ub_q2() {
        let inv = f2_class();
        let c = inv.companion();
        let nonscalar: Vec<FMat> = algebra_elements(&c).into_iter().filter(|b| !b.is_scalar()).collect();
        assert_eq!(nonscalar.len(), 6);
        for b in &nonscalar {
            assert!(inv.ua_equals_ub(&c, b).unwrap());
        }
        assert!(inv.ua_equals_ub(&c, &FMat::identity(c.spec(), 3)).is_err());
        let outside = FMat::unit(c.spec(), 3, 0, 1);
        assert!(inv.ua_equals_ub(&c, &outside).is_err());
    }

    #[test]
    fn derived_sets_are_conjugation_equivariant() {
        let inv = f2_class();
        let c = inv.companion();
        let sets = inv.derived_sets(&c).unwrap();
        let gl = inv.general_linear().unwrap();
        for u in gl.iter().step_by(17) {
            let ui = u.inverse().unwrap();
            let conj = |x: &FMat| &(u * x) * &ui;
            let a2 = conj(&c);
            let sets2 = inv.derived_sets(&a2).unwrap();
            let mut d: Vec<FMat> = sets.d.iter().map(conj).collect();
            d.sort();
            let mut s: Vec<FMat> = sets.s.iter().map(conj).collect();
            s.sort();
            let mut uu: Vec<FMat> = sets.u.iter().map(conj).collect();
            uu.sort();
            assert_eq!(d, sets2.d);
            assert_eq!(s, sets2.s);
            assert_eq!(uu, sets2.u);
            // U^{-1} E_{A,v} U = E_{U^{-1} A U, vU}
            let a3 = &(&ui * &c) * u;
            for (v, e) in &sets.e_sets {
                let mut lhs: Vec<FMat> = e.iter().map(|x| &(&ui * x) * u).collect();
                lhs.sort();
                assert_eq!(lhs, inv.e_set(&a3, &u.left_apply(v)).unwrap());
            }
        }
    }
}
