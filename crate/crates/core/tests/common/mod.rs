//! Shared fixtures for the integration suites.
//!
//! Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use fibra_core::algebra::{FiniteAlgebra, GroupStructure, Signature};
use fibra_core::bundle::{BaseSpace, BundleAtlas, TransitionSpec};
use fibra_core::perm::Perm;
use fibra_core::representation::FiberedGroup;

pub fn zn_add(n: usize) -> FiniteAlgebra {
    let signature = Signature::new(vec![("+", 2)]).unwrap();
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            table.push((a + b) % n);
        }
    }
    FiniteAlgebra::new(signature, n, vec![("+".to_string(), table)]).unwrap()
}

/// Three charts in a cycle over three points; no triple overlap, so loops
/// through the cycle can carry net transport.
pub fn cycle_base() -> BaseSpace {
    BaseSpace::new(
        vec!["a", "b", "c"],
        vec![
            ("U0", vec!["a", "b"]),
            ("U1", vec!["b", "c"]),
            ("U2", vec!["c", "a"]),
        ],
    )
    .unwrap()
}

/// Three charts all containing a shared point, so the cocycle law is active.
pub fn triple_base() -> BaseSpace {
    BaseSpace::new(
        vec!["a", "b", "c"],
        vec![
            ("U0", vec!["a", "b", "c"]),
            ("U1", vec!["a", "b"]),
            ("U2", vec!["a", "c"]),
        ],
    )
    .unwrap()
}

/// Full transition data derived from one gauge permutation per chart:
/// `transport(a, b) = g_b ∘ g_a⁻¹`. The cocycle law holds by construction,
/// whatever the gauges are.
pub fn gauge_transitions(base: &BaseSpace, gauges: &[Perm]) -> Vec<TransitionSpec> {
    let mut specs = Vec::new();
    for a in 0..base.charts().len() {
        for b in 0..base.charts().len() {
            if a == b || !base.overlap(a, b) {
                continue;
            }
            let map = gauges[b].compose(&gauges[a].inverse());
            specs.push(TransitionSpec {
                from: a,
                to: b,
                map: map.into_images(),
            });
        }
    }
    specs
}

pub fn trivial_group_bundle(group: GroupStructure, points: &[&str]) -> FiberedGroup {
    let atlas = BundleAtlas::trivial(
        points.iter().map(|p| p.to_string()).collect(),
        "U",
        group.size(),
    );
    FiberedGroup::new(atlas, group).unwrap()
}
