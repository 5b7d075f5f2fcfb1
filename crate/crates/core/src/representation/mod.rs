//! Bundle transformations and representations of fibered groups.
//!
//! A representation assigns to each base point an action of the group fiber
//! by bijections of the target fiber, validated against the unit law, the
//! composition law of the declared variance, and chart equivariance. The
//! covariant law is `ρ(ab) = ρ(a) ∘ ρ(b)`; the contravariant law is
//! `ρ(ab) = ρ(b) ∘ ρ(a)`, which is how a right shift acts. Chart equivariance
//! requires the action, re-expressed in any pair of group/target charts, to
//! be constant across the points they share — exactly what makes the
//! per-point tables one well-defined bundle map rather than an unrelated
//! family of fiber actions.

mod orbits;
mod twin;

pub use orbits::{OrbitPartition, TransitivityReport};

use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraMap, FiniteAlgebra, GroupStructure, MixedRadix};
use crate::bundle::{reduced_product_bundles, BundleAtlas, BundleError, Section};
use crate::fibered::{FiberedAlgebra, FiberedError};
use crate::perm::Perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("group and target bundles are not over the same base points")]
    BaseMismatch,
    #[error("action table shape does not match the group and target")]
    ActionShape,
    #[error("action of element {element} at point `{point}` is not a bijection")]
    NotBijective { point: String, element: usize },
    #[error("unit acts nontrivially at point `{point}`")]
    UnitLawViolated { point: String },
    #[error("composition law fails at point `{point}` for elements ({a}, {b}) on fiber value {witness}")]
    CompositionLawViolated {
        point: String,
        a: usize,
        b: usize,
        witness: usize,
    },
    #[error("action is not chart-equivariant: charts ({group_chart}, {target_chart}) disagree at point `{point}`")]
    EquivarianceViolated {
        group_chart: String,
        target_chart: String,
        point: String,
    },
    #[error("representations are over different fibered groups")]
    GroupMismatch,
    #[error("representations have different variances")]
    VarianceMismatch,
    #[error("representation is not single transitive")]
    NotSingleTransitive,
    #[error("representation is not covariant")]
    NotCovariant,
    #[error("internal consistency check failed: {0}")]
    MismatchDetected(String),
    #[error("section-level and fiberwise single-transitivity criteria disagree")]
    CriterionDisagreement,
    #[error("transformation list is not a consistent carrier: {0}")]
    NotClosed(String),
    #[error(transparent)]
    Fibered(#[from] FiberedError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which composition law the action satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn flipped(self) -> Variance {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

/// A transformation of a bundle: one fiber bijection per base point, in
/// canonical coordinates. Bijectivity is the finite reading of "nonsingular".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BundleTransformation {
    maps: Vec<Perm>,
}

impl BundleTransformation {
    pub fn new(atlas: &BundleAtlas, maps: Vec<Vec<usize>>) -> Result<Self, RepError> {
        if maps.len() != atlas.base().points().len() {
            return Err(RepError::ActionShape);
        }
        let mut perms = Vec::with_capacity(maps.len());
        for (x, images) in maps.into_iter().enumerate() {
            if images.len() != atlas.fiber_size() {
                return Err(RepError::ActionShape);
            }
            let perm = Perm::from_images(images).ok_or_else(|| RepError::NotBijective {
                point: atlas.base().points()[x].clone(),
                element: 0,
            })?;
            perms.push(perm);
        }
        Ok(BundleTransformation { maps: perms })
    }

    pub fn identity(atlas: &BundleAtlas) -> Self {
        BundleTransformation {
            maps: vec![Perm::identity(atlas.fiber_size()); atlas.base().points().len()],
        }
    }

    pub fn map_at(&self, point: usize) -> &Perm {
        &self.maps[point]
    }

    pub fn is_identity(&self) -> bool {
        self.maps.iter().all(Perm::is_identity)
    }

    /// `self.compose(&t)` applies `t` first.
    pub fn compose(&self, t: &BundleTransformation) -> BundleTransformation {
        BundleTransformation {
            maps: self
                .maps
                .iter()
                .zip(&t.maps)
                .map(|(s, t)| s.compose(t))
                .collect(),
        }
    }

    pub fn inverse(&self) -> BundleTransformation {
        BundleTransformation {
            maps: self.maps.iter().map(Perm::inverse).collect(),
        }
    }
}

/// Applies the transformation to a section pointwise in canonical charts.
pub fn apply_transformation(
    t: &BundleTransformation,
    u: &Section,
) -> Result<Section, RepError> {
    if t.maps.len() != u.values().len()
        || u.values()
            .iter()
            .zip(&t.maps)
            .any(|(&v, m)| v >= m.degree())
    {
        return Err(RepError::ActionShape);
    }
    let values = u
        .values()
        .iter()
        .zip(&t.maps)
        .map(|(&v, m)| m.apply(v))
        .collect();
    Ok(Section::from_values(values))
}

/// A bundle whose fiber carries a validated group structure and whose
/// transitions are group automorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedGroup {
    fa: FiberedAlgebra,
    group: GroupStructure,
}

impl FiberedGroup {
    pub fn new(atlas: BundleAtlas, group: GroupStructure) -> Result<Self, RepError> {
        let fa = FiberedAlgebra::new(atlas, group.algebra().clone())?;
        Ok(FiberedGroup { fa, group })
    }

    pub fn atlas(&self) -> &BundleAtlas {
        self.fa.atlas()
    }

    pub fn group(&self) -> &GroupStructure {
        &self.group
    }

    pub fn fibered_algebra(&self) -> &FiberedAlgebra {
        &self.fa
    }

    /// The same bundle with the opposite group in the fiber. Transitions stay
    /// automorphisms: a homomorphism for `ab` is one for `ba`.
    pub fn opposite(&self) -> FiberedGroup {
        let group = self.group.opposite();
        let fa = FiberedAlgebra::new(self.fa.atlas().clone(), group.algebra().clone())
            .expect("automorphisms of a group are automorphisms of its opposite");
        FiberedGroup { fa, group }
    }

    /// Pointwise product of group sections.
    pub fn mul_sections(&self, a: &Section, b: &Section) -> Section {
        let values = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(&x, &y)| self.group.mul(x, y))
            .collect();
        Section::from_values(values)
    }

    pub fn inv_section(&self, a: &Section) -> Section {
        Section::from_values(a.values().iter().map(|&x| self.group.inv(x)).collect())
    }

    pub fn unit_section(&self) -> Section {
        Section::from_values(vec![self.group.unit(); self.atlas().base().points().len()])
    }
}

/// A validated representation of a fibered group on a bundle over the same
/// base points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRepresentation {
    group: FiberedGroup,
    target: BundleAtlas,
    variance: Variance,
    action: Vec<Vec<Perm>>,
}

impl GroupRepresentation {
    pub fn group(&self) -> &FiberedGroup {
        &self.group
    }

    pub fn target(&self) -> &BundleAtlas {
        &self.target
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    /// The action of a group element at a point, in canonical coordinates.
    pub fn act(&self, point: usize, element: usize) -> &Perm {
        &self.action[point][element]
    }

    /// The transformation induced by a single group element across all fibers.
    pub fn element_transformation(&self, element: usize) -> BundleTransformation {
        BundleTransformation {
            maps: self.action.iter().map(|row| row[element].clone()).collect(),
        }
    }

    /// The transformation `f(g)` induced by a group section: at each point the
    /// action of the section's value there. This bridges the fiber-level
    /// action and the section-level orbit and kernel notions.
    pub fn section_transformation(&self, g: &Section) -> Result<BundleTransformation, RepError> {
        if g.values().len() != self.action.len() {
            return Err(RepError::ActionShape);
        }
        let maps = self
            .action
            .iter()
            .zip(g.values())
            .map(|(row, &e)| {
                row.get(e)
                    .cloned()
                    .ok_or(RepError::ActionShape)
            })
            .collect::<Result<_, _>>()?;
        Ok(BundleTransformation { maps })
    }

    /// `ρ_x(a⁻¹)`, asserting it equals `ρ_x(a)⁻¹` as every valid
    /// representation must.
    pub fn inverse_image(&self, element: usize, point: usize) -> Result<Perm, RepError> {
        let via_group = self.action[point][self.group.group().inv(element)].clone();
        let via_perm = self.action[point][element].inverse();
        if via_group != via_perm {
            return Err(RepError::MismatchDetected(format!(
                "inverse of element {element} disagrees with inverted action at point {point}"
            )));
        }
        Ok(via_group)
    }
}

/// Validates raw per-point action tables (point, then group element, then
/// fiber images) into a representation.
pub fn make_representation(
    group: &FiberedGroup,
    target: &BundleAtlas,
    variance: Variance,
    action: Vec<Vec<Vec<usize>>>,
) -> Result<GroupRepresentation, RepError> {
    let points = target.base().points().len();
    if action.len() != points {
        return Err(RepError::ActionShape);
    }
    let mut perms = Vec::with_capacity(points);
    for (x, row) in action.into_iter().enumerate() {
        if row.len() != group.group().size() {
            return Err(RepError::ActionShape);
        }
        let mut perm_row = Vec::with_capacity(row.len());
        for (element, images) in row.into_iter().enumerate() {
            if images.len() != target.fiber_size() {
                return Err(RepError::ActionShape);
            }
            let perm = Perm::from_images(images).ok_or_else(|| RepError::NotBijective {
                point: target.base().points()[x].clone(),
                element,
            })?;
            perm_row.push(perm);
        }
        perms.push(perm_row);
    }
    validate_representation(group, target, variance, perms)
}

/// Shared validation path for all representation constructors.
pub(crate) fn validate_representation(
    group: &FiberedGroup,
    target: &BundleAtlas,
    variance: Variance,
    action: Vec<Vec<Perm>>,
) -> Result<GroupRepresentation, RepError> {
    if group.atlas().base().points() != target.base().points() {
        return Err(RepError::BaseMismatch);
    }
    let gs = group.group();
    let point_name = |x: usize| target.base().points()[x].clone();

    for (x, row) in action.iter().enumerate() {
        if !row[gs.unit()].is_identity() {
            return Err(RepError::UnitLawViolated {
                point: point_name(x),
            });
        }
        for a in 0..gs.size() {
            for b in 0..gs.size() {
                let composed = match variance {
                    Variance::Covariant => row[a].compose(&row[b]),
                    Variance::Contravariant => row[b].compose(&row[a]),
                };
                let product = &row[gs.mul(a, b)];
                if *product != composed {
                    let witness = (0..target.fiber_size())
                        .find(|&v| product.apply(v) != composed.apply(v))
                        .unwrap();
                    return Err(RepError::CompositionLawViolated {
                        point: point_name(x),
                        a,
                        b,
                        witness,
                    });
                }
            }
        }
    }
    check_equivariance(group, target, &action)?;
    Ok(GroupRepresentation {
        group: group.clone(),
        target: target.clone(),
        variance,
        action,
    })
}

/// The action at point `x`, re-expressed with group elements in the
/// coordinates of `group_chart` and transformations in the coordinates of
/// `target_chart`.
fn expressed_table(
    group: &FiberedGroup,
    target: &BundleAtlas,
    action: &[Vec<Perm>],
    x: usize,
    group_chart: usize,
    target_chart: usize,
) -> Result<Vec<Perm>, RepError> {
    let cg = group.atlas().base().canonical_chart(x);
    let ca = target.base().canonical_chart(x);
    let g_to_canonical = group.atlas().transport(group_chart, cg)?;
    let a_to_canonical = target.transport(target_chart, ca)?;
    let a_from_canonical = target.transport(ca, target_chart)?;
    Ok((0..group.group().size())
        .map(|g| {
            let rho = &action[x][g_to_canonical.apply(g)];
            a_from_canonical.compose(&rho.compose(a_to_canonical))
        })
        .collect())
}

/// The per-point tables describe one bundle map only if, read in any pair of
/// charts, they agree across all points the charts share.
fn check_equivariance(
    group: &FiberedGroup,
    target: &BundleAtlas,
    action: &[Vec<Perm>],
) -> Result<(), RepError> {
    for (gi, gchart) in group.atlas().base().charts().iter().enumerate() {
        for (ti, tchart) in target.base().charts().iter().enumerate() {
            let shared: Vec<usize> = gchart
                .members()
                .iter()
                .copied()
                .filter(|p| tchart.contains(*p))
                .collect();
            if shared.len() < 2 {
                continue;
            }
            let reference = expressed_table(group, target, action, shared[0], gi, ti)?;
            for &x in &shared[1..] {
                if expressed_table(group, target, action, x, gi, ti)? != reference {
                    return Err(RepError::EquivarianceViolated {
                        group_chart: gchart.name().to_string(),
                        target_chart: tchart.name().to_string(),
                        point: target.base().points()[x].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSide {
    Left,
    Right,
}

/// The shift representations of a fibered group on its own bundle: the left
/// shift `b ↦ ab` is covariant, the right shift `b ↦ ba` is contravariant.
pub fn shift_representation(group: &FiberedGroup, side: ShiftSide) -> GroupRepresentation {
    let gs = group.group();
    let n = gs.size();
    let table_for = |a: usize| -> Perm {
        let images: Vec<usize> = (0..n)
            .map(|b| match side {
                ShiftSide::Left => gs.mul(a, b),
                ShiftSide::Right => gs.mul(b, a),
            })
            .collect();
        Perm::from_images(images).expect("group multiplication by a fixed element is a bijection")
    };
    let row: Vec<Perm> = (0..n).map(table_for).collect();
    let action = vec![row; group.atlas().base().points().len()];
    let variance = match side {
        ShiftSide::Left => Variance::Covariant,
        ShiftSide::Right => Variance::Contravariant,
    };
    validate_representation(group, &group.atlas().clone(), variance, action)
        .expect("shifts satisfy the representation laws")
}

/// Reinterprets a representation over the opposite fibered group with the
/// variance flipped, keeping the action tables. Applying this twice restores
/// the original representation.
pub fn to_star_t(rep: &GroupRepresentation) -> GroupRepresentation {
    let opposite = rep.group.opposite();
    validate_representation(
        &opposite,
        &rep.target,
        rep.variance.flipped(),
        rep.action.clone(),
    )
    .expect("duality preserves the representation laws")
}

/// Componentwise action of one fibered group on the reduced product of two
/// target bundles: `f(g) = (f1(g), f2(g))` on mixed-radix encoded pairs.
pub fn direct_product_representations(
    r1: &GroupRepresentation,
    r2: &GroupRepresentation,
) -> Result<GroupRepresentation, RepError> {
    if r1.group != r2.group {
        return Err(RepError::GroupMismatch);
    }
    if r1.variance != r2.variance {
        return Err(RepError::VarianceMismatch);
    }
    let target = reduced_product_bundles(&[r1.target.clone(), r2.target.clone()])
        .map_err(|e| match e {
            BundleError::BaseMismatch => RepError::BaseMismatch,
            other => RepError::Bundle(other),
        })?;
    let radix = MixedRadix::new(vec![r1.target.fiber_size(), r2.target.fiber_size()]);
    let points = target.base().points().len();
    let size = r1.group.group().size();
    let mut action = Vec::with_capacity(points);
    for x in 0..points {
        let mut row = Vec::with_capacity(size);
        for g in 0..size {
            let images: Vec<usize> = (0..radix.total())
                .map(|value| {
                    let pair = radix.decode(value);
                    radix.encode(&[
                        r1.action[x][g].apply(pair[0]),
                        r2.action[x][g].apply(pair[1]),
                    ])
                })
                .collect();
            row.push(Perm::from_images(images).expect("componentwise bijections are bijections"));
        }
        action.push(row);
    }
    validate_representation(&r1.group, &target, r1.variance, action)
}

/// The generic representation check: a per-point assignment of fiber elements
/// to listed bundle transformations is a representation exactly when each
/// per-point map is a homomorphism into the abstract algebra structure given
/// on the transformation list.
pub fn general_representation_validate(
    source: &FiberedAlgebra,
    transformation_algebra: &FiniteAlgebra,
    transformations: &[BundleTransformation],
    assignment: &[Vec<usize>],
) -> Result<bool, RepError> {
    if source.fiber().signature() != transformation_algebra.signature() {
        return Err(AlgebraError::SignatureMismatch.into());
    }
    if transformations.len() != transformation_algebra.size() {
        return Err(RepError::NotClosed(format!(
            "{} transformations listed for a carrier of size {}",
            transformations.len(),
            transformation_algebra.size()
        )));
    }
    for (i, t) in transformations.iter().enumerate() {
        if transformations[..i].contains(t) {
            return Err(RepError::NotClosed(format!(
                "transformation {i} duplicates an earlier entry"
            )));
        }
    }
    let points = source.atlas().base().points().len();
    if assignment.len() != points {
        return Err(RepError::ActionShape);
    }
    for per_point in assignment {
        let map = AlgebraMap::new(
            source.fiber().clone(),
            transformation_algebra.clone(),
            per_point.clone(),
        )?;
        if !map.is_homomorphism()? {
            return Ok(false);
        }
    }
    Ok(true)
}
