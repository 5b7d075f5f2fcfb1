//! Finite bundles: a base point set with a chart cover, a fiber carrier, and
//! one transition bijection per ordered pair of overlapping charts.
//!
//! Transitions are constant per overlap. `transport(a, b)` is the bijection
//! taking chart-`a` fiber coordinates to chart-`b` coordinates; validation
//! enforces the identity, inverse, and cocycle laws exhaustively. The
//! canonical chart of a point is the least-index chart containing it, and all
//! stored section and map data lives in canonical coordinates.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::MixedRadix;
use crate::caps::Caps;
use crate::perm::Perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("name `{0}` is duplicated among points and charts")]
    DuplicateName(String),
    #[error("chart `{chart}` lists unknown point `{point}`")]
    UnknownPoint { chart: String, point: String },
    #[error("point `{0}` is not covered by any chart")]
    NotACover(String),
    #[error("fiber size must be positive")]
    EmptyFiber,
    #[error("transition {from} -> {to}: charts do not overlap")]
    TransitionWithoutOverlap { from: String, to: String },
    #[error("transition {from} -> {to} given more than once")]
    DuplicateTransition { from: String, to: String },
    #[error("transition {from} -> {to} is not a bijection of the fiber")]
    NotABijection { from: String, to: String },
    #[error("transition {chart} -> {chart} must be the identity")]
    DiagonalNotIdentity { chart: String },
    #[error("no transition supplied for overlapping charts {from} -> {to}")]
    MissingTransition { from: String, to: String },
    #[error("transitions {a} -> {b} and {b} -> {a} are not mutually inverse")]
    InverseLawViolated { a: String, b: String },
    #[error("cocycle violated on triple ({a}, {b}, {c}): {b}->{c} after {a}->{b} differs from {a}->{c}")]
    CocycleViolated { a: String, b: String, c: String },
    #[error("point `{point}` does not lie in chart `{chart}`")]
    PointNotInChart { point: String, chart: String },
    #[error("element {value} is outside fiber 0..{size}")]
    ElementOutOfRange { value: usize, size: usize },
    #[error("section has {got} values, expected one per point ({expected})")]
    SectionMismatch { expected: usize, got: usize },
    #[error("{count} sections exceed enumeration cap {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("empty bundle list")]
    EmptyList,
    #[error("bundles are not over the same base")]
    BaseMismatch,
    #[error("base map is not a bijection")]
    BaseMapNotBijective,
    #[error("fibered map shape does not match the bundles")]
    MapMismatch,
    #[error("chart index {0} out of range")]
    UnknownChart(usize),
}

/// A named chart: a subset of base points, kept as indices into the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    name: String,
    members: BTreeSet<usize>,
}

impl Chart {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, point: usize) -> bool {
        self.members.contains(&point)
    }
}

/// An ordered finite point set together with a chart cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseSpace {
    points: Vec<String>,
    charts: Vec<Chart>,
}

impl BaseSpace {
    pub fn new<S: Into<String>>(
        points: Vec<S>,
        charts: Vec<(S, Vec<S>)>,
    ) -> Result<Self, BundleError> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        let mut names = BTreeSet::new();
        for p in &points {
            if !names.insert(p.clone()) {
                return Err(BundleError::DuplicateName(p.clone()));
            }
        }
        let mut resolved = Vec::with_capacity(charts.len());
        for (name, member_names) in charts {
            let name: String = name.into();
            if !names.insert(name.clone()) {
                return Err(BundleError::DuplicateName(name));
            }
            let mut members = BTreeSet::new();
            for m in member_names {
                let m: String = m.into();
                let idx = points
                    .iter()
                    .position(|p| *p == m)
                    .ok_or_else(|| BundleError::UnknownPoint {
                        chart: name.clone(),
                        point: m.clone(),
                    })?;
                members.insert(idx);
            }
            resolved.push(Chart { name, members });
        }
        for (idx, p) in points.iter().enumerate() {
            if !resolved.iter().any(|c| c.contains(idx)) {
                return Err(BundleError::NotACover(p.clone()));
            }
        }
        Ok(BaseSpace {
            points,
            charts: resolved,
        })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    /// Least-index chart containing the point; total because charts cover.
    pub fn canonical_chart(&self, point: usize) -> usize {
        self.charts
            .iter()
            .position(|c| c.contains(point))
            .expect("charts cover every point")
    }

    pub fn overlap(&self, a: usize, b: usize) -> bool {
        self.charts[a]
            .members
            .intersection(&self.charts[b].members)
            .next()
            .is_some()
    }

    fn triple_overlap(&self, a: usize, b: usize, c: usize) -> bool {
        self.charts[a]
            .members
            .iter()
            .any(|p| self.charts[b].contains(*p) && self.charts[c].contains(*p))
    }
}

/// Raw transition datum: the bijection taking chart-`from` fiber coordinates
/// to chart-`to` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSpec {
    pub from: usize,
    pub to: usize,
    pub map: Vec<usize>,
}

/// A point of the total space: a base point, a chart containing it, and the
/// fiber value in that chart's coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotalPoint {
    pub point: usize,
    pub chart: usize,
    pub value: usize,
}

/// A section: one fiber value per base point, stored in each point's
/// canonical chart.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section {
    values: Vec<usize>,
}

impl Section {
    /// Trusted constructor for values already known to be in range.
    pub(crate) fn from_values(values: Vec<usize>) -> Self {
        Section { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value_at(&self, point: usize) -> usize {
        self.values[point]
    }
}

/// A validated atlas: base, fiber carrier size, and transitions satisfying
/// the identity, inverse, and cocycle laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleAtlas {
    base: BaseSpace,
    fiber_size: usize,
    transitions: BTreeMap<(usize, usize), Perm>,
}

impl BundleAtlas {
    /// Validates raw gluing data. Diagonal transitions default to the
    /// identity; a missing reverse transition is completed from the inverse
    /// law. Every law is then checked exhaustively, including the cocycle on
    /// all chart triples with nonempty triple intersection.
    pub fn new(
        base: BaseSpace,
        fiber_size: usize,
        specs: Vec<TransitionSpec>,
    ) -> Result<Self, BundleError> {
        if fiber_size == 0 {
            return Err(BundleError::EmptyFiber);
        }
        let chart_name = |i: usize| base.charts[i].name.clone();
        let mut transitions: BTreeMap<(usize, usize), Perm> = BTreeMap::new();
        for spec in specs {
            if spec.from >= base.charts.len() {
                return Err(BundleError::UnknownChart(spec.from));
            }
            if spec.to >= base.charts.len() {
                return Err(BundleError::UnknownChart(spec.to));
            }
            if !base.overlap(spec.from, spec.to) {
                return Err(BundleError::TransitionWithoutOverlap {
                    from: chart_name(spec.from),
                    to: chart_name(spec.to),
                });
            }
            if spec.map.len() != fiber_size {
                return Err(BundleError::NotABijection {
                    from: chart_name(spec.from),
                    to: chart_name(spec.to),
                });
            }
            let perm = Perm::from_images(spec.map).ok_or(BundleError::NotABijection {
                from: chart_name(spec.from),
                to: chart_name(spec.to),
            })?;
            if spec.from == spec.to && !perm.is_identity() {
                return Err(BundleError::DiagonalNotIdentity {
                    chart: chart_name(spec.from),
                });
            }
            if transitions.insert((spec.from, spec.to), perm).is_some() {
                return Err(BundleError::DuplicateTransition {
                    from: chart_name(spec.from),
                    to: chart_name(spec.to),
                });
            }
        }
        let chart_count = base.charts.len();
        for a in 0..chart_count {
            transitions.insert((a, a), Perm::identity(fiber_size));
            for b in (a + 1)..chart_count {
                if !base.overlap(a, b) {
                    continue;
                }
                let forward = transitions.get(&(a, b)).cloned();
                let backward = transitions.get(&(b, a)).cloned();
                match (forward, backward) {
                    (None, None) => {
                        return Err(BundleError::MissingTransition {
                            from: chart_name(a),
                            to: chart_name(b),
                        })
                    }
                    (Some(f), None) => {
                        transitions.insert((b, a), f.inverse());
                    }
                    (None, Some(g)) => {
                        transitions.insert((a, b), g.inverse());
                    }
                    (Some(f), Some(g)) => {
                        if !f.compose(&g).is_identity() || !g.compose(&f).is_identity() {
                            return Err(BundleError::InverseLawViolated {
                                a: chart_name(a),
                                b: chart_name(b),
                            });
                        }
                    }
                }
            }
        }
        // Cocycle on ordered triples of distinct charts with common points.
        for a in 0..chart_count {
            for b in 0..chart_count {
                for c in 0..chart_count {
                    if a == b || b == c || a == c || !base.triple_overlap(a, b, c) {
                        continue;
                    }
                    let ab = &transitions[&(a, b)];
                    let bc = &transitions[&(b, c)];
                    let ac = &transitions[&(a, c)];
                    if bc.compose(ab) != *ac {
                        return Err(BundleError::CocycleViolated {
                            a: chart_name(a),
                            b: chart_name(b),
                            c: chart_name(c),
                        });
                    }
                }
            }
        }
        Ok(BundleAtlas {
            base,
            fiber_size,
            transitions,
        })
    }

    /// An atlas with a single chart covering every point.
    pub fn trivial(points: Vec<String>, chart_name: &str, fiber_size: usize) -> Self {
        let all: Vec<String> = points.clone();
        let base = BaseSpace::new(points, vec![(chart_name.to_string(), all)])
            .expect("one chart covering all points is a valid base");
        BundleAtlas::new(base, fiber_size, Vec::new()).expect("trivial atlas is valid")
    }

    pub fn base(&self) -> &BaseSpace {
        &self.base
    }

    pub fn fiber_size(&self) -> usize {
        self.fiber_size
    }

    /// The bijection taking chart-`from` coordinates to chart-`to` coordinates.
    pub fn transport(&self, from: usize, to: usize) -> Result<&Perm, BundleError> {
        self.transitions
            .get(&(from, to))
            .ok_or(BundleError::MissingTransition {
                from: self.base.charts[from].name.clone(),
                to: self.base.charts[to].name.clone(),
            })
    }

    /// Rewrites a total point in its canonical chart. Idempotent, and constant
    /// on chart-equivalence classes.
    pub fn normalize_point(&self, p: TotalPoint) -> Result<TotalPoint, BundleError> {
        if p.chart >= self.base.charts.len() {
            return Err(BundleError::UnknownChart(p.chart));
        }
        if !self.base.charts[p.chart].contains(p.point) {
            return Err(BundleError::PointNotInChart {
                point: self.base.points[p.point].clone(),
                chart: self.base.charts[p.chart].name.clone(),
            });
        }
        if p.value >= self.fiber_size {
            return Err(BundleError::ElementOutOfRange {
                value: p.value,
                size: self.fiber_size,
            });
        }
        let canonical = self.base.canonical_chart(p.point);
        let value = self.transport(p.chart, canonical)?.apply(p.value);
        Ok(TotalPoint {
            point: p.point,
            chart: canonical,
            value,
        })
    }

    /// Builds a section from canonical-chart values, one per base point.
    pub fn section(&self, values: Vec<usize>) -> Result<Section, BundleError> {
        if values.len() != self.base.points.len() {
            return Err(BundleError::SectionMismatch {
                expected: self.base.points.len(),
                got: values.len(),
            });
        }
        if let Some(&value) = values.iter().find(|&&v| v >= self.fiber_size) {
            return Err(BundleError::ElementOutOfRange {
                value,
                size: self.fiber_size,
            });
        }
        Ok(Section { values })
    }

    pub fn constant_section(&self, value: usize) -> Result<Section, BundleError> {
        self.section(vec![value; self.base.points.len()])
    }

    /// Reads a section at `point` in the coordinates of `chart`.
    pub fn section_value(
        &self,
        s: &Section,
        point: usize,
        chart: usize,
    ) -> Result<usize, BundleError> {
        if s.values.len() != self.base.points.len() {
            return Err(BundleError::SectionMismatch {
                expected: self.base.points.len(),
                got: s.values.len(),
            });
        }
        if !self.base.charts[chart].contains(point) {
            return Err(BundleError::PointNotInChart {
                point: self.base.points[point].clone(),
                chart: self.base.charts[chart].name.clone(),
            });
        }
        let canonical = self.base.canonical_chart(point);
        Ok(self.transport(canonical, chart)?.apply(s.values[point]))
    }

    /// All `fiber_size^|points|` sections in mixed-radix order (first point
    /// most significant).
    pub fn enumerate_sections(&self, caps: &Caps) -> Result<SectionIter, BundleError> {
        let count = self
            .fiber_size
            .checked_pow(self.base.points.len() as u32)
            .unwrap_or(usize::MAX);
        if count > caps.max_sections {
            return Err(BundleError::CapExceeded {
                count,
                cap: caps.max_sections,
            });
        }
        Ok(SectionIter {
            radix: MixedRadix::new(vec![self.fiber_size; self.base.points.len()]),
            next: 0,
            count,
        })
    }
}

/// Deterministic section enumeration; see [`BundleAtlas::enumerate_sections`].
pub struct SectionIter {
    radix: MixedRadix,
    next: usize,
    count: usize,
}

impl Iterator for SectionIter {
    type Item = Section;

    fn next(&mut self) -> Option<Section> {
        if self.next >= self.count {
            return None;
        }
        let values = self.radix.decode(self.next);
        self.next += 1;
        Some(Section { values })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.count - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SectionIter {}

/// A fibered map: a base map plus one fiber map per source point, expressed in
/// the canonical charts of the source point and of its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedMap {
    base_map: Vec<usize>,
    fiber_maps: Vec<Vec<usize>>,
}

impl FiberedMap {
    pub fn new(
        source: &BundleAtlas,
        target: &BundleAtlas,
        base_map: Vec<usize>,
        fiber_maps: Vec<Vec<usize>>,
    ) -> Result<Self, BundleError> {
        if base_map.len() != source.base.points.len()
            || fiber_maps.len() != source.base.points.len()
        {
            return Err(BundleError::MapMismatch);
        }
        if base_map.iter().any(|&y| y >= target.base.points.len()) {
            return Err(BundleError::MapMismatch);
        }
        for maps in &fiber_maps {
            if maps.len() != source.fiber_size {
                return Err(BundleError::MapMismatch);
            }
            if maps.iter().any(|&v| v >= target.fiber_size) {
                return Err(BundleError::ElementOutOfRange {
                    value: *maps.iter().max().unwrap(),
                    size: target.fiber_size,
                });
            }
        }
        Ok(FiberedMap {
            base_map,
            fiber_maps,
        })
    }

    pub fn identity(atlas: &BundleAtlas) -> Self {
        FiberedMap {
            base_map: (0..atlas.base.points.len()).collect(),
            fiber_maps: vec![(0..atlas.fiber_size).collect(); atlas.base.points.len()],
        }
    }

    pub fn base_map(&self) -> &[usize] {
        &self.base_map
    }

    pub fn fiber_map(&self, point: usize) -> &[usize] {
        &self.fiber_maps[point]
    }

    /// `self.then(&g)`: apply `self` first, then `g`.
    pub fn then(&self, g: &FiberedMap) -> Result<FiberedMap, BundleError> {
        if self
            .base_map
            .iter()
            .any(|&y| y >= g.base_map.len())
        {
            return Err(BundleError::MapMismatch);
        }
        let base_map: Vec<usize> = self.base_map.iter().map(|&y| g.base_map[y]).collect();
        let fiber_maps: Vec<Vec<usize>> = self
            .fiber_maps
            .iter()
            .enumerate()
            .map(|(x, fm)| {
                let next = &g.fiber_maps[self.base_map[x]];
                fm.iter().map(|&v| next[v]).collect()
            })
            .collect();
        Ok(FiberedMap {
            base_map,
            fiber_maps,
        })
    }
}

/// Pushes a section forward along a fibered map whose base map is a bijection:
/// the result at `y` is the fiber map applied to `u` at the preimage of `y`.
pub fn pushforward_section(
    source: &BundleAtlas,
    target: &BundleAtlas,
    map: &FiberedMap,
    u: &Section,
) -> Result<Section, BundleError> {
    if !crate::perm::is_bijection(&map.base_map, target.base.points.len())
        || source.base.points.len() != target.base.points.len()
    {
        return Err(BundleError::BaseMapNotBijective);
    }
    if u.values.len() != source.base.points.len() {
        return Err(BundleError::SectionMismatch {
            expected: source.base.points.len(),
            got: u.values.len(),
        });
    }
    let mut values = vec![0; target.base.points.len()];
    for (x, &y) in map.base_map.iter().enumerate() {
        values[y] = map.fiber_maps[x][u.values[x]];
    }
    target.section(values)
}

fn tuple_name(parts: &[&str]) -> String {
    format!("({})", parts.join(","))
}

/// Cartesian product of bundles over distinct bases: base points are tuples of
/// base points, charts are tuples of charts, the fiber is the mixed-radix
/// product carrier, and transitions act componentwise.
pub fn cartesian_product_bundles(bundles: &[BundleAtlas]) -> Result<BundleAtlas, BundleError> {
    if bundles.is_empty() {
        return Err(BundleError::EmptyList);
    }
    let point_radix = MixedRadix::new(bundles.iter().map(|b| b.base.points.len()).collect());
    let fiber_radix = MixedRadix::new(bundles.iter().map(|b| b.fiber_size).collect());
    let mut points = Vec::with_capacity(point_radix.total());
    for index in 0..point_radix.total() {
        let tuple = point_radix.decode(index);
        let names: Vec<&str> = tuple
            .iter()
            .enumerate()
            .map(|(i, &p)| bundles[i].base.points[p].as_str())
            .collect();
        points.push(tuple_name(&names));
    }
    let chart_radix = MixedRadix::new(bundles.iter().map(|b| b.base.charts.len()).collect());
    let mut charts: Vec<(String, Vec<String>)> = Vec::new();
    let mut chart_tuples: Vec<Vec<usize>> = Vec::new();
    for index in 0..chart_radix.total() {
        let tuple = chart_radix.decode(index);
        let names: Vec<&str> = tuple
            .iter()
            .enumerate()
            .map(|(i, &c)| bundles[i].base.charts[c].name())
            .collect();
        let mut members = Vec::new();
        for (p, name) in points.iter().enumerate() {
            let pt = point_radix.decode(p);
            if pt
                .iter()
                .enumerate()
                .all(|(i, &x)| bundles[i].base.charts[tuple[i]].contains(x))
            {
                members.push(name.clone());
            }
        }
        if members.is_empty() {
            continue;
        }
        charts.push((tuple_name(&names), members));
        chart_tuples.push(tuple);
    }
    let base = BaseSpace::new(points, charts)?;
    let specs = componentwise_transitions(bundles, &base, &chart_tuples, &fiber_radix)?;
    BundleAtlas::new(base, fiber_radix.total(), specs)
}

/// Reduced Cartesian product: all factors share one base (points and cover);
/// the chart family becomes the tuples of charts with nonempty intersection,
/// pairing fibers over each point.
pub fn reduced_product_bundles(bundles: &[BundleAtlas]) -> Result<BundleAtlas, BundleError> {
    let first = bundles.first().ok_or(BundleError::EmptyList)?;
    if bundles.iter().any(|b| b.base != first.base) {
        return Err(BundleError::BaseMismatch);
    }
    let fiber_radix = MixedRadix::new(bundles.iter().map(|b| b.fiber_size).collect());
    let chart_radix = MixedRadix::new(vec![first.base.charts.len(); bundles.len()]);
    let mut charts: Vec<(String, Vec<String>)> = Vec::new();
    let mut chart_tuples: Vec<Vec<usize>> = Vec::new();
    for index in 0..chart_radix.total() {
        let tuple = chart_radix.decode(index);
        let members: Vec<String> = (0..first.base.points.len())
            .filter(|&p| tuple.iter().all(|&c| first.base.charts[c].contains(p)))
            .map(|p| first.base.points[p].clone())
            .collect();
        if members.is_empty() {
            continue;
        }
        let names: Vec<&str> = tuple
            .iter()
            .map(|&c| first.base.charts[c].name())
            .collect();
        charts.push((tuple_name(&names), members));
        chart_tuples.push(tuple);
    }
    let base = BaseSpace::new(first.base.points.clone(), charts)?;
    let specs = componentwise_transitions(bundles, &base, &chart_tuples, &fiber_radix)?;
    BundleAtlas::new(base, fiber_radix.total(), specs)
}

fn componentwise_transitions(
    bundles: &[BundleAtlas],
    base: &BaseSpace,
    chart_tuples: &[Vec<usize>],
    fiber_radix: &MixedRadix,
) -> Result<Vec<TransitionSpec>, BundleError> {
    let mut specs = Vec::new();
    for (a, ta) in chart_tuples.iter().enumerate() {
        for (b, tb) in chart_tuples.iter().enumerate() {
            if a == b || !base.overlap(a, b) {
                continue;
            }
            let components: Vec<&Perm> = (0..bundles.len())
                .map(|i| bundles[i].transport(ta[i], tb[i]))
                .collect::<Result<_, _>>()?;
            let map: Vec<usize> = (0..fiber_radix.total())
                .map(|value| {
                    let digits = fiber_radix.decode(value);
                    let image: Vec<usize> = digits
                        .iter()
                        .zip(&components)
                        .map(|(&d, perm)| perm.apply(d))
                        .collect();
                    fiber_radix.encode(&image)
                })
                .collect();
            specs.push(TransitionSpec { from: a, to: b, map });
        }
    }
    Ok(specs)
}

/// Cartesian power of a bundle over its own base. Power zero is the identity
/// bundle: the same points under a single full chart with a one-element fiber.
pub fn bundle_power(bundle: &BundleAtlas, n: usize) -> Result<BundleAtlas, BundleError> {
    match n {
        0 => {
            let points = bundle.base.points.clone();
            let base = BaseSpace::new(
                points.clone(),
                vec![("()".to_string(), points)],
            )?;
            BundleAtlas::new(base, 1, Vec::new())
        }
        1 => Ok(bundle.clone()),
        _ => reduced_product_bundles(&vec![bundle.clone(); n]),
    }
}
