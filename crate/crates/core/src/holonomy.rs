//! Holonomy of an atlas, computed on the nerve of its chart cover.
//!
//! The nerve has one edge per overlapping chart pair, so transport
//! granularity is per overlap: a two-chart circle cover whose intersection
//! has two components cannot exhibit holonomy here. Model circle-like bases
//! with three or more charts arranged in a cycle.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraMap, FiniteAlgebra};
use crate::bundle::{BundleAtlas, BundleError};
use crate::caps::Caps;
use crate::perm::Perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HolonomyError {
    #[error("chart sequence does not close up into a loop")]
    NotALoop,
    #[error("consecutive charts {from} and {to} do not overlap")]
    NonOverlappingStep { from: String, to: String },
    #[error("nerve is disconnected: chart `{0}` is unreachable from the base chart")]
    NerveDisconnected(String),
    #[error("holonomy closure exceeds cap {cap}")]
    CapExceeded { cap: usize },
    #[error("chart index {0} out of range")]
    UnknownChart(usize),
    #[error("fiber algebra has size {fiber} but the atlas fiber has size {atlas}")]
    SizeMismatch { fiber: usize, atlas: usize },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A closed chart walk `c0, c1, ..., ck = c0`; the empty and singleton walks
/// are the trivial loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartLoop {
    charts: Vec<usize>,
}

impl ChartLoop {
    pub fn new(charts: Vec<usize>) -> Self {
        ChartLoop { charts }
    }

    pub fn charts(&self) -> &[usize] {
        &self.charts
    }

    /// Concatenation of two loops based at the same chart.
    pub fn concat(&self, other: &ChartLoop) -> ChartLoop {
        if self.charts.is_empty() {
            return other.clone();
        }
        if other.charts.is_empty() {
            return self.clone();
        }
        let mut charts = self.charts.clone();
        charts.extend_from_slice(&other.charts[1..]);
        ChartLoop { charts }
    }
}

/// Composite transport around a loop, in the coordinates of its first chart.
/// The empty loop transports by the identity.
pub fn loop_transport(atlas: &BundleAtlas, lp: &ChartLoop) -> Result<Perm, HolonomyError> {
    let charts = &lp.charts;
    if let Some(&c) = charts.iter().find(|&&c| c >= atlas.base().charts().len()) {
        return Err(HolonomyError::UnknownChart(c));
    }
    if charts.len() >= 2 && charts.first() != charts.last() {
        return Err(HolonomyError::NotALoop);
    }
    let mut transport = Perm::identity(atlas.fiber_size());
    for step in charts.windows(2) {
        let (from, to) = (step[0], step[1]);
        if !atlas.base().overlap(from, to) {
            return Err(HolonomyError::NonOverlappingStep {
                from: atlas.base().charts()[from].name().to_string(),
                to: atlas.base().charts()[to].name().to_string(),
            });
        }
        transport = atlas.transport(from, to)?.compose(&transport);
    }
    Ok(transport)
}

/// Generators and closure of the holonomy group based at one chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolonomyGroup {
    pub base_chart: usize,
    /// One loop per non-tree nerve edge: out along the spanning tree, across
    /// the edge, and back.
    pub generator_loops: Vec<ChartLoop>,
    pub generators: Vec<Perm>,
    /// Closure of the generators under composition and inverse; always
    /// contains the identity.
    pub elements: Vec<Perm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holonomic,
    Anholonomic,
}

/// Classification of a fiber algebra against the holonomy of an atlas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolonomyReport {
    pub group: HolonomyGroup,
    pub verdict: Verdict,
    /// Index into `group.generators` of a generator that fails the
    /// automorphism test, when anholonomic.
    pub witness: Option<usize>,
}

/// Breadth-first spanning tree of the nerve from `base_chart`, visiting
/// neighbors in lexicographic chart-name order. Returns the parent of each
/// chart (the base is its own parent) or the first unreachable chart.
fn spanning_tree(atlas: &BundleAtlas, base_chart: usize) -> Result<Vec<usize>, HolonomyError> {
    let charts = atlas.base().charts();
    let mut parent = vec![usize::MAX; charts.len()];
    parent[base_chart] = base_chart;
    let mut queue = VecDeque::from([base_chart]);
    while let Some(current) = queue.pop_front() {
        let mut neighbors: Vec<usize> = (0..charts.len())
            .filter(|&c| c != current && parent[c] == usize::MAX && atlas.base().overlap(current, c))
            .collect();
        neighbors.sort_by(|&a, &b| charts[a].name().cmp(charts[b].name()));
        for n in neighbors {
            parent[n] = current;
            queue.push_back(n);
        }
    }
    if let Some(unreached) = (0..charts.len()).find(|&c| parent[c] == usize::MAX) {
        return Err(HolonomyError::NerveDisconnected(
            charts[unreached].name().to_string(),
        ));
    }
    Ok(parent)
}

fn tree_path(parent: &[usize], base: usize, chart: usize) -> Vec<usize> {
    let mut path = vec![chart];
    let mut current = chart;
    while current != base {
        current = parent[current];
        path.push(current);
    }
    path.reverse();
    path
}

/// Holonomy group of the atlas based at `base_chart`: one generator per
/// non-tree edge of the nerve, closed under composition and inverse.
pub fn holonomy_group(
    atlas: &BundleAtlas,
    base_chart: usize,
    caps: &Caps,
) -> Result<HolonomyGroup, HolonomyError> {
    let charts = atlas.base().charts();
    if base_chart >= charts.len() {
        return Err(HolonomyError::UnknownChart(base_chart));
    }
    let parent = spanning_tree(atlas, base_chart)?;
    let mut extra_edges: Vec<(usize, usize)> = Vec::new();
    for a in 0..charts.len() {
        for b in (a + 1)..charts.len() {
            if atlas.base().overlap(a, b) && parent[a] != b && parent[b] != a {
                extra_edges.push((a, b));
            }
        }
    }
    extra_edges.sort_by(|&(a1, b1), &(a2, b2)| {
        (charts[a1].name(), charts[b1].name()).cmp(&(charts[a2].name(), charts[b2].name()))
    });

    let mut generator_loops = Vec::with_capacity(extra_edges.len());
    let mut generators = Vec::with_capacity(extra_edges.len());
    for (a, b) in extra_edges {
        let mut walk = tree_path(&parent, base_chart, a);
        walk.push(b);
        let mut back = tree_path(&parent, base_chart, b);
        back.reverse();
        walk.extend_from_slice(&back[1..]);
        let lp = ChartLoop::new(walk);
        generators.push(loop_transport(atlas, &lp)?);
        generator_loops.push(lp);
    }

    let mut elements: BTreeSet<Perm> = BTreeSet::new();
    elements.insert(Perm::identity(atlas.fiber_size()));
    for g in &generators {
        elements.insert(g.clone());
        elements.insert(g.inverse());
    }
    loop {
        let snapshot: Vec<Perm> = elements.iter().cloned().collect();
        for f in &snapshot {
            for g in &snapshot {
                elements.insert(f.compose(g));
            }
            elements.insert(f.inverse());
        }
        if elements.len() > caps.max_group_elements {
            return Err(HolonomyError::CapExceeded {
                cap: caps.max_group_elements,
            });
        }
        if elements.len() == snapshot.len() {
            break;
        }
    }

    Ok(HolonomyGroup {
        base_chart,
        generator_loops,
        generators,
        elements: elements.into_iter().collect(),
    })
}

/// Holonomic iff every generator transport is an automorphism of the fiber
/// algebra. Checking generators suffices: automorphisms are closed under
/// composition and inverse, so a generated group lies in the automorphism
/// group exactly when its generators do.
pub fn classify_holonomic(
    atlas: &BundleAtlas,
    fiber: &FiniteAlgebra,
    base_chart: usize,
    caps: &Caps,
) -> Result<HolonomyReport, HolonomyError> {
    if fiber.size() != atlas.fiber_size() {
        return Err(HolonomyError::SizeMismatch {
            fiber: fiber.size(),
            atlas: atlas.fiber_size(),
        });
    }
    let group = holonomy_group(atlas, base_chart, caps)?;
    let mut witness = None;
    for (index, g) in group.generators.iter().enumerate() {
        let map = AlgebraMap::new(fiber.clone(), fiber.clone(), g.images().to_vec())?;
        if !map.is_homomorphism()? {
            witness = Some(index);
            break;
        }
    }
    Ok(HolonomyReport {
        group,
        verdict: if witness.is_none() {
            Verdict::Holonomic
        } else {
            Verdict::Anholonomic
        },
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::groups;
    use crate::bundle::{BaseSpace, TransitionSpec};

    /// Three charts in a cycle over three points, with no triple overlap, so
    /// the cocycle law is vacuous and the cycle can carry net transport.
    pub(crate) fn cycle_base() -> BaseSpace {
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

    fn z5_cycle(t10: usize, t21: usize, t02: usize) -> BundleAtlas {
        let plus = |k: usize| -> Vec<usize> { (0..5).map(|x| (x + k) % 5).collect() };
        BundleAtlas::new(
            cycle_base(),
            5,
            vec![
                TransitionSpec { from: 0, to: 1, map: plus(t10) },
                TransitionSpec { from: 1, to: 2, map: plus(t21) },
                TransitionSpec { from: 2, to: 0, map: plus(t02) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_and_backtracking_loops_are_identity() {
        let atlas = z5_cycle(1, 1, 1);
        assert!(loop_transport(&atlas, &ChartLoop::new(vec![])).unwrap().is_identity());
        assert!(loop_transport(&atlas, &ChartLoop::new(vec![0])).unwrap().is_identity());
        assert!(loop_transport(&atlas, &ChartLoop::new(vec![0, 1, 0]))
            .unwrap()
            .is_identity());
    }

    #[test]
    fn cycle_of_three_shifts_composes_to_shift_by_three() {
        // Oracle: +1 three times is +3 mod 5.
        let atlas = z5_cycle(1, 1, 1);
        let t = loop_transport(&atlas, &ChartLoop::new(vec![0, 1, 2, 0])).unwrap();
        for x in 0..5 {
            assert_eq!(t.apply(x), (x + 3) % 5);
        }
    }

    #[test]
    fn loop_errors() {
        let atlas = z5_cycle(1, 1, 1);
        assert!(matches!(
            loop_transport(&atlas, &ChartLoop::new(vec![0, 1, 2])),
            Err(HolonomyError::NotALoop)
        ));
        let base = BaseSpace::new(
            vec!["a", "b"],
            vec![("U0", vec!["a"]), ("U1", vec!["b"]), ("U2", vec!["a", "b"])],
        )
        .unwrap();
        let atlas = BundleAtlas::new(
            base,
            2,
            vec![
                TransitionSpec { from: 0, to: 2, map: vec![0, 1] },
                TransitionSpec { from: 1, to: 2, map: vec![0, 1] },
            ],
        )
        .unwrap();
        assert!(matches!(
            loop_transport(&atlas, &ChartLoop::new(vec![0, 1, 0])),
            Err(HolonomyError::NonOverlappingStep { .. })
        ));
    }

    #[test]
    fn single_and_tree_covers_have_trivial_holonomy() {
        let atlas = BundleAtlas::trivial(vec!["a".into(), "b".into()], "U", 4);
        let group = holonomy_group(&atlas, 0, &Caps::default()).unwrap();
        assert!(group.generators.is_empty());
        assert_eq!(group.elements.len(), 1);

        let base = BaseSpace::new(
            vec!["a", "b", "c"],
            vec![("U0", vec!["a", "b"]), ("U1", vec!["b", "c"])],
        )
        .unwrap();
        let atlas = BundleAtlas::new(
            base,
            3,
            vec![TransitionSpec { from: 0, to: 1, map: vec![1, 2, 0] }],
        )
        .unwrap();
        let group = holonomy_group(&atlas, 0, &Caps::default()).unwrap();
        assert!(group.generators.is_empty());
        assert_eq!(group.elements.len(), 1);
    }

    #[test]
    fn net_shift_generates_cyclic_group_of_order_five() {
        let atlas = z5_cycle(1, 0, 0);
        let group = holonomy_group(&atlas, 0, &Caps::default()).unwrap();
        assert_eq!(group.generators.len(), 1);
        assert_eq!(group.elements.len(), 5);
    }

    #[test]
    fn shift_cycle_is_anholonomic_with_witness() {
        let atlas = z5_cycle(1, 0, 0);
        let z5 = groups::cyclic(5);
        let report = classify_holonomic(&atlas, z5.algebra(), 0, &Caps::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Anholonomic);
        assert_eq!(report.witness, Some(0));
        assert_eq!(report.group.elements.len(), 5);
    }

    #[test]
    fn multiplicative_cycle_is_holonomic() {
        let times = |k: usize| -> Vec<usize> { (0..5).map(|x| (k * x) % 5).collect() };
        let atlas = BundleAtlas::new(
            cycle_base(),
            5,
            vec![
                TransitionSpec { from: 0, to: 1, map: times(2) },
                TransitionSpec { from: 1, to: 2, map: times(1) },
                TransitionSpec { from: 2, to: 0, map: times(1) },
            ],
        )
        .unwrap();
        let z5 = groups::cyclic(5);
        let report = classify_holonomic(&atlas, z5.algebra(), 0, &Caps::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Holonomic);
        // Net transport x -> 2x generates the full automorphism group of Z5.
        assert_eq!(report.group.elements.len(), 4);
    }

    #[test]
    fn trivial_transitions_are_holonomic() {
        let atlas = BundleAtlas::new(
            cycle_base(),
            5,
            vec![
                TransitionSpec { from: 0, to: 1, map: (0..5).collect() },
                TransitionSpec { from: 1, to: 2, map: (0..5).collect() },
                TransitionSpec { from: 2, to: 0, map: (0..5).collect() },
            ],
        )
        .unwrap();
        let z5 = groups::cyclic(5);
        let report = classify_holonomic(&atlas, z5.algebra(), 0, &Caps::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Holonomic);
        assert_eq!(report.group.elements.len(), 1);
    }

    #[test]
    fn disconnected_nerve_is_an_error() {
        let base = BaseSpace::new(
            vec!["a", "b"],
            vec![("U0", vec!["a"]), ("U1", vec!["b"])],
        )
        .unwrap();
        let atlas = BundleAtlas::new(base, 2, vec![]).unwrap();
        assert!(matches!(
            holonomy_group(&atlas, 0, &Caps::default()),
            Err(HolonomyError::NerveDisconnected(_))
        ));
    }

    #[test]
    fn loop_concatenation_composes_transports() {
        let atlas = z5_cycle(1, 2, 0);
        let lp = ChartLoop::new(vec![0, 1, 2, 0]);
        let twice = lp.concat(&lp);
        let once = loop_transport(&atlas, &lp).unwrap();
        let composed = loop_transport(&atlas, &twice).unwrap();
        assert_eq!(composed, once.compose(&once));
    }
}
