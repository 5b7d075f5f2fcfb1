mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::zn_add;
use fibra_core::algebra::{
    enumerate_automorphisms, groups, product_algebra, AlgebraMap, FiniteAlgebra, MixedRadix,
    Signature,
};
use fibra_core::Caps;

/// Arbitrary valid algebra: size 1..=5, a binary and a unary operation with
/// random total tables.
fn arb_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (1usize..=5).prop_flat_map(|size| {
        let binary = proptest::collection::vec(0..size, size * size);
        let unary = proptest::collection::vec(0..size, size);
        (binary, unary).prop_map(move |(b, u)| {
            let signature = Signature::new(vec![("f", 2), ("g", 1)]).unwrap();
            FiniteAlgebra::new(
                signature,
                size,
                vec![("f".to_string(), b), ("g".to_string(), u)],
            )
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn evaluation_never_leaves_the_carrier(alg in arb_algebra()) {
        for (symbol, arity) in alg.signature().ops().to_vec() {
            for args in alg.tuples(arity) {
                let value = alg.evaluate(&symbol, &args).unwrap();
                prop_assert!(value < alg.size());
            }
        }
    }
}

#[test]
fn automorphism_sets_are_groups() {
    let fixtures: Vec<FiniteAlgebra> = vec![
        zn_add(3),
        zn_add(4),
        zn_add(5),
        groups::klein_four().algebra().clone(),
        groups::symmetric_3().algebra().clone(),
        FiniteAlgebra::new(Signature::empty(), 4, vec![]).unwrap(),
    ];
    for alg in fixtures {
        let autos = enumerate_automorphisms(&alg, &Caps::default()).unwrap();
        let tables: BTreeSet<Vec<usize>> =
            autos.iter().map(|a| a.mapping().to_vec()).collect();
        assert!(tables.contains(&(0..alg.size()).collect::<Vec<_>>()));
        for a in &autos {
            assert!(tables.contains(a.inverse().unwrap().mapping()));
            for b in &autos {
                let composed = a.compose(b).unwrap();
                assert!(tables.contains(composed.mapping()));
            }
        }
    }
}

#[test]
fn homomorphisms_compose() {
    // Exhaustive over all maps Z4 -> Z2 and Z2 -> Z2.
    let z4 = zn_add(4);
    let z2 = zn_add(2);
    let all_z4_z2: Vec<AlgebraMap> = (0..16)
        .map(|bits: usize| {
            let mapping = (0..4).map(|i| (bits >> i) & 1).collect();
            AlgebraMap::new(z4.clone(), z2.clone(), mapping).unwrap()
        })
        .collect();
    let all_z2_z2: Vec<AlgebraMap> = (0..4)
        .map(|bits: usize| {
            let mapping = (0..2).map(|i| (bits >> i) & 1).collect();
            AlgebraMap::new(z2.clone(), z2.clone(), mapping).unwrap()
        })
        .collect();
    let mut checked = 0;
    for a in &all_z4_z2 {
        if !a.is_homomorphism().unwrap() {
            continue;
        }
        for b in &all_z2_z2 {
            if !b.is_homomorphism().unwrap() {
                continue;
            }
            assert!(b.compose(a).unwrap().is_homomorphism().unwrap());
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn opposite_is_an_involution() {
    for group in [
        groups::cyclic(3),
        groups::cyclic(6),
        groups::klein_four(),
        groups::symmetric_3(),
    ] {
        assert_eq!(group.opposite().opposite().algebra(), group.algebra());
    }
}

#[test]
fn product_projections_are_homomorphisms() {
    let factors = vec![zn_add(2), zn_add(3), zn_add(4)];
    let product = product_algebra(&factors).unwrap();
    let radix = MixedRadix::new(vec![2, 3, 4]);
    for (i, factor) in factors.iter().enumerate() {
        let mapping: Vec<usize> = (0..product.size())
            .map(|v| radix.decode(v)[i])
            .collect();
        let projection = AlgebraMap::new(product.clone(), factor.clone(), mapping).unwrap();
        assert!(projection.is_homomorphism().unwrap());
    }
}
