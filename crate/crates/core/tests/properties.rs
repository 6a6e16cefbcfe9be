use std::sync::OnceLock;

use proptest::prelude::*;

use nullcore::classes::{enumerate_class, projective_points, ClassInventory};
use nullcore::field::{irreducible_cubics, FieldSpec};
use nullcore::linalg::FMat;
use nullcore::matpoly::{core_verdict, is_core, low_degree_null_basis, phi_of, right_evaluate, stacked_vandermonde, MatPoly};
use nullcore::vandermonde::{commutator_det_check, extension_context, ExtensionContext};

fn inventory(q: u32) -> &'static ClassInventory {
    static Q2: OnceLock<ClassInventory> = OnceLock::new();
    static Q3: OnceLock<ClassInventory> = OnceLock::new();
    let cell = if q == 2 { &Q2 } else { &Q3 };
    cell.get_or_init(|| {
        let f = FieldSpec::gf(q).unwrap();
        enumerate_class(&irreducible_cubics(&f)[0]).unwrap()
    })
}

fn extension(q: u32) -> &'static ExtensionContext {
    static Q2: OnceLock<ExtensionContext> = OnceLock::new();
    static Q3: OnceLock<ExtensionContext> = OnceLock::new();
    let cell = if q == 2 { &Q2 } else { &Q3 };
    cell.get_or_init(|| extension_context(inventory(q).m()).unwrap())
}

fn conj(u: &FMat, a: &FMat) -> FMat {
    &(u * a) * &u.inverse().unwrap()
}

fn small_field() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27])
}

fn matrix(q: u32) -> impl Strategy<Value = FMat> {
    prop::collection::vec(0..q, 9).prop_map(move |codes| FMat::new(&FieldSpec::gf(q).unwrap(), 3, 3, codes).unwrap())
}

fn invertible(q: u32) -> impl Strategy<Value = FMat> {
    matrix(q).prop_filter("singular", |u| u.det() != 0)
}

/// `(q, members)`: either a random subset of `C(m)` or a subset of an `E` family.
fn class_subset() -> impl Strategy<Value = (u32, Vec<FMat>)> {
    (prop::sample::select(vec![2u32, 3]), any::<bool>(), any::<prop::sample::Index>(), any::<prop::sample::Index>(), prop::collection::vec(any::<prop::sample::Index>(), 1..8))
        .prop_map(|(q, from_e, a, v, picks)| {
            let inv = inventory(q);
            let pool: Vec<FMat> = if from_e {
                let points = projective_points(inv.spec());
                inv.e_set(a.get(inv.members()), v.get(&points)).unwrap()
            } else {
                inv.members().to_vec()
            };
            let mut set: Vec<FMat> = picks.iter().map(|i| i.get(&pool).clone()).collect();
            set.sort();
            set.dedup();
            (q, set)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fermat(q in small_field(), z in 1u32..1000) {
        let f = FieldSpec::gf(q).unwrap();
        let z = 1 + z % (q - 1);
        prop_assert_eq!(f.pow(z, u64::from(q) - 1), 1);
    }

    #[test]
    fn frobenius_is_a_field_map(q in small_field(), a in 0u32..1000, b in 0u32..1000) {
        let f = FieldSpec::gf(q).unwrap();
        let (a, b) = (a % q, b % q);
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
    }

    #[test]
    fn rank_nullity(a in prop::sample::select(vec![2u32, 3, 5]).prop_flat_map(matrix)) {
        prop_assert_eq!(a.rank() + a.left_nullspace().dim(), 3);
        prop_assert_eq!(a.rank() + a.right_nullspace().dim(), 3);
    }

    #[test]
    fn char_poly_conjugation_invariant(
        (a, u) in prop::sample::select(vec![2u32, 3]).prop_flat_map(|q| (matrix(q), invertible(q)))
    ) {
        prop_assert_eq!(conj(&u, &a).char_poly3().unwrap(), a.char_poly3().unwrap());
    }

    #[test]
    fn cayley_hamilton(a in prop::sample::select(vec![2u32, 3, 4, 5]).prop_flat_map(matrix)) {
        let chi = MatPoly::from_scalar(&a.char_poly3().unwrap(), 3);
        prop_assert!(right_evaluate(&chi, &a).unwrap().is_zero());
    }

    #[test]
    fn null_basis_vanishes((_, set) in class_subset()) {
        for f in low_degree_null_basis(&set).unwrap() {
            for a in &set {
                prop_assert!(right_evaluate(&f, a).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn core_verdict_conjugation_invariant(
        ((q, set), seed) in (class_subset(), any::<u64>())
    ) {
        let gl = inventory(q).general_linear().unwrap();
        let u = &gl[(seed % gl.len() as u64) as usize];
        let moved: Vec<FMat> = set.iter().map(|a| conj(u, a)).collect();
        prop_assert_eq!(is_core(&set).unwrap().verdict, is_core(&moved).unwrap().verdict);
    }

    #[test]
    fn rank_monotone((q, set) in class_subset(), extra in any::<prop::sample::Index>()) {
        let inv = inventory(q);
        let d = phi_of(&set).unwrap().degree().unwrap();
        let mut bigger = set.clone();
        bigger.push(extra.get(inv.members()).clone());
        let r0 = stacked_vandermonde(&set, d).unwrap().rank();
        let r1 = stacked_vandermonde(&bigger, d).unwrap().rank();
        prop_assert!(r1 >= r0);
        if core_verdict(&set).unwrap() {
            prop_assert!(core_verdict(&bigger).unwrap());
        }
    }

    #[test]
    fn derived_sets_equivariant(
        (q, a, seed) in (prop::sample::select(vec![2u32, 3]), any::<prop::sample::Index>(), any::<u64>())
    ) {
        let inv = inventory(q);
        let gl = inv.general_linear().unwrap();
        let u = &gl[(seed % gl.len() as u64) as usize];
        let a = a.get(inv.members());
        let mut moved: Vec<FMat> = inv.d_set(a).unwrap().iter().map(|b| conj(u, b)).collect();
        moved.sort();
        prop_assert_eq!(moved, inv.d_set(&conj(u, a)).unwrap());
    }

    #[test]
    fn commutator_determinant(
        (q, codes) in prop::sample::select(vec![2u32, 3]).prop_flat_map(|q| (Just(q), prop::collection::vec(0..q * q * q, 9)))
    ) {
        let ctx = extension(q);
        let x = FMat::new(&ctx.k, 3, 3, codes).unwrap();
        prop_assert!(commutator_det_check(&x, ctx).unwrap());
    }
}

#[test]
fn rank_nullity_exhaustive_q2() {
    let f = FieldSpec::gf(2).unwrap();
    for a in nullcore::classes::all_matrices(&f, 3) {
        assert_eq!(a.rank() + a.left_nullspace().dim(), 3);
        let chi = MatPoly::from_scalar(&a.char_poly3().unwrap(), 3);
        assert!(right_evaluate(&chi, &a).unwrap().is_zero());
    }
}

#[test]
fn small_subsets_non_core_q2() {
    let ms = inventory(2).members();
    for (i, a) in ms.iter().enumerate() {
        assert!(!core_verdict(std::slice::from_ref(a)).unwrap());
        for b in &ms[i + 1..] {
            assert!(!core_verdict(&[a.clone(), b.clone()]).unwrap());
        }
    }
}

#[test]
fn commutator_bridge_q2() {
    let inv = inventory(2);
    let a = inv.companion();
    for u in inv.general_linear().unwrap().iter() {
        assert_eq!((&conj(u, &a) - &a).det() != 0, u.commutator(&a).det() != 0);
    }
}

#[test]
fn edge_criterion_symmetric_q2() {
    let ms = inventory(2).members();
    for a in ms {
        for b in ms {
            assert_eq!((b - a).det() != 0, (a - b).det() != 0);
        }
    }
}
