mod common;

use proptest::prelude::*;

use common::{cycle_base, zn_add};
use fibra_core::algebra::{enumerate_automorphisms, groups, FiniteAlgebra};
use fibra_core::bundle::{BundleAtlas, FiberedMap, TransitionSpec};
use fibra_core::fibered::{is_fibered_homomorphism, FiberedAlgebra, FiberedError};
use fibra_core::perm::Perm;
use fibra_core::Caps;

fn fibers() -> Vec<FiniteAlgebra> {
    vec![
        zn_add(3),
        zn_add(4),
        zn_add(5),
        groups::klein_four().algebra().clone(),
    ]
}

fn automorphism_perms(fiber: &FiniteAlgebra) -> Vec<Perm> {
    enumerate_automorphisms(fiber, &Caps::default())
        .unwrap()
        .into_iter()
        .map(|a| Perm::from_images(a.mapping().to_vec()).unwrap())
        .collect()
}

/// A bijection of the fiber carrier that is not a homomorphism; `pick`
/// selects deterministically among all of them.
fn non_homomorphism(fiber: &FiniteAlgebra, pick: usize) -> Perm {
    use itertools::Itertools;
    let autos: std::collections::BTreeSet<Vec<usize>> = automorphism_perms(fiber)
        .into_iter()
        .map(Perm::into_images)
        .collect();
    let pool: Vec<Vec<usize>> = (0..fiber.size())
        .permutations(fiber.size())
        .filter(|p| !autos.contains(p))
        .collect();
    assert!(!pool.is_empty(), "small fibers have non-automorphic bijections");
    Perm::from_images(pool[pick % pool.len()].clone()).unwrap()
}

proptest! {
    /// Transitions sampled independently from the automorphism group always
    /// validate (the cycle cover has no triple overlaps, so any edge choice
    /// yields a lawful atlas).
    #[test]
    fn automorphism_transitions_validate(
        fiber_index in 0usize..4,
        picks in proptest::collection::vec(any::<usize>(), 3),
    ) {
        let fiber = fibers()[fiber_index].clone();
        let autos = automorphism_perms(&fiber);
        let edge = |i: usize| autos[picks[i] % autos.len()].clone().into_images();
        let atlas = BundleAtlas::new(
            cycle_base(),
            fiber.size(),
            vec![
                TransitionSpec { from: 0, to: 1, map: edge(0) },
                TransitionSpec { from: 1, to: 2, map: edge(1) },
                TransitionSpec { from: 2, to: 0, map: edge(2) },
            ],
        )
        .unwrap();
        prop_assert!(FiberedAlgebra::new(atlas, fiber).is_ok());
    }

    /// One non-homomorphism transition is rejected, naming the chart pair.
    #[test]
    fn non_homomorphism_transition_is_rejected(
        fiber_index in 0usize..4,
        skip in 0usize..10,
        victim in 0usize..3,
    ) {
        let fiber = fibers()[fiber_index].clone();
        let bad = non_homomorphism(&fiber, skip);
        let identity: Vec<usize> = (0..fiber.size()).collect();
        let mut maps = [identity.clone(), identity.clone(), identity];
        maps[victim] = bad.into_images();
        let atlas = BundleAtlas::new(
            cycle_base(),
            fiber.size(),
            vec![
                TransitionSpec { from: 0, to: 1, map: maps[0].clone() },
                TransitionSpec { from: 1, to: 2, map: maps[1].clone() },
                TransitionSpec { from: 2, to: 0, map: maps[2].clone() },
            ],
        )
        .unwrap();
        let expected = [("U0", "U1"), ("U1", "U2"), ("U0", "U2")][victim];
        match FiberedAlgebra::new(atlas, fiber) {
            Err(FiberedError::TransitionNotHomomorphism { from, to }) => {
                let pair = (from.as_str(), to.as_str());
                prop_assert!(
                    pair == expected || pair == (expected.1, expected.0),
                    "reported pair {:?} differs from injected {:?}",
                    pair,
                    expected
                );
            }
            other => prop_assert!(false, "expected rejection, got {:?}", other.is_ok()),
        }
    }
}

/// Operations map section tuples to sections, exhaustively at desk scale.
#[test]
fn operations_map_sections_to_sections() {
    for fiber in [zn_add(2), zn_add(3)] {
        let atlas = BundleAtlas::trivial(vec!["p".into(), "q".into()], "U", fiber.size());
        let fa = FiberedAlgebra::new(atlas, fiber.clone()).unwrap();
        let sections: Vec<_> = fa
            .atlas()
            .enumerate_sections(&Caps::default())
            .unwrap()
            .collect();
        for (symbol, arity) in fiber.signature().ops().to_vec() {
            assert_eq!(arity, 2);
            for s in &sections {
                for t in &sections {
                    let out = fa.apply_operation(&symbol, &[s.clone(), t.clone()]).unwrap();
                    assert!(out.values().iter().all(|&v| v < fiber.size()));
                    // Pointwise agreement with the fiber operation.
                    for x in 0..2 {
                        assert_eq!(
                            out.value_at(x),
                            fiber
                                .evaluate(&symbol, &[s.value_at(x), t.value_at(x)])
                                .unwrap()
                        );
                    }
                }
            }
        }
    }
}

/// Evaluating then transporting agrees with transporting then evaluating,
/// for every chart containing the point. Exhaustive over fiber Z3, two
/// charts, two points.
#[test]
fn chart_independence_of_operations() {
    let base = fibra_core::bundle::BaseSpace::new(
        vec!["p", "q"],
        vec![("U0", vec!["p", "q"]), ("U1", vec!["p", "q"])],
    )
    .unwrap();
    let doubling: Vec<usize> = (0..3).map(|x| (2 * x) % 3).collect();
    let atlas = BundleAtlas::new(
        base,
        3,
        vec![TransitionSpec { from: 0, to: 1, map: doubling }],
    )
    .unwrap();
    let fiber = groups::cyclic(3).algebra().clone();
    let fa = FiberedAlgebra::new(atlas, fiber.clone()).unwrap();
    let sections: Vec<_> = fa
        .atlas()
        .enumerate_sections(&Caps::default())
        .unwrap()
        .collect();

    for s in &sections {
        for t in &sections {
            let out = fa.apply_operation("*", &[s.clone(), t.clone()]).unwrap();
            for x in 0..2 {
                for chart in 0..2 {
                    let lhs = fa.atlas().section_value(&out, x, chart).unwrap();
                    let rhs = fiber
                        .evaluate(
                            "*",
                            &[
                                fa.atlas().section_value(s, x, chart).unwrap(),
                                fa.atlas().section_value(t, x, chart).unwrap(),
                            ],
                        )
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
    // Unary and nullary operations, same exhaustive sweep.
    for s in &sections {
        let out = fa.apply_operation("inv", std::slice::from_ref(s)).unwrap();
        for x in 0..2 {
            for chart in 0..2 {
                let lhs = fa.atlas().section_value(&out, x, chart).unwrap();
                let rhs = fiber
                    .evaluate("inv", &[fa.atlas().section_value(s, x, chart).unwrap()])
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
    let unit = fa.apply_operation("e", &[]).unwrap();
    for x in 0..2 {
        for chart in 0..2 {
            let read = fa.atlas().section_value(&unit, x, chart).unwrap();
            assert_eq!(read, fiber.evaluate("e", &[]).unwrap());
        }
    }
}

#[test]
fn fibered_homomorphisms_compose() {
    let atlas = BundleAtlas::trivial(vec!["p".into(), "q".into()], "U", 5);
    let fa = FiberedAlgebra::new(atlas, zn_add(5)).unwrap();
    let doubling: Vec<usize> = (0..5).map(|x| (2 * x) % 5).collect();
    let tripling: Vec<usize> = (0..5).map(|x| (3 * x) % 5).collect();
    let f = FiberedMap::new(
        fa.atlas(),
        fa.atlas(),
        vec![0, 1],
        vec![doubling.clone(), tripling.clone()],
    )
    .unwrap();
    let g = FiberedMap::new(
        fa.atlas(),
        fa.atlas(),
        vec![1, 0],
        vec![tripling, doubling],
    )
    .unwrap();
    assert!(is_fibered_homomorphism(&fa, &fa, &f).unwrap());
    assert!(is_fibered_homomorphism(&fa, &fa, &g).unwrap());
    let composed = f.then(&g).unwrap();
    assert!(is_fibered_homomorphism(&fa, &fa, &composed).unwrap());
}
