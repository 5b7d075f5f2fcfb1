//! Bundles whose fiber carries a finite algebra, with operations applied
//! fiberwise to sections.
//!
//! Construction enforces that every transition bijection is an automorphism of
//! the fiber algebra; that is exactly what makes pointwise evaluation
//! independent of the chart it is read in.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraMap, FiniteAlgebra};
use crate::bundle::{BundleAtlas, BundleError, FiberedMap, Section};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiberedError {
    #[error("fiber algebra has size {fiber} but the atlas fiber has size {atlas}")]
    SizeMismatch { fiber: usize, atlas: usize },
    #[error("transition {from} -> {to} is not a homomorphism of the fiber algebra")]
    TransitionNotHomomorphism { from: String, to: String },
    #[error("operation `{symbol}` takes {expected} arguments, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("argument does not belong to this bundle")]
    BundleMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

/// A validated fibered algebra: an atlas whose transitions are all
/// automorphisms of the fiber algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedAlgebra {
    atlas: BundleAtlas,
    fiber: FiniteAlgebra,
}

impl FiberedAlgebra {
    /// Succeeds iff every transition passes the homomorphism check; the error
    /// names the first offending chart pair.
    pub fn new(atlas: BundleAtlas, fiber: FiniteAlgebra) -> Result<Self, FiberedError> {
        if fiber.size() != atlas.fiber_size() {
            return Err(FiberedError::SizeMismatch {
                fiber: fiber.size(),
                atlas: atlas.fiber_size(),
            });
        }
        let charts = atlas.base().charts().len();
        for from in 0..charts {
            for to in 0..charts {
                if from == to || !atlas.base().overlap(from, to) {
                    continue;
                }
                let images = atlas.transport(from, to)?.images().to_vec();
                let map = AlgebraMap::new(fiber.clone(), fiber.clone(), images)?;
                if !map.is_homomorphism()? {
                    return Err(FiberedError::TransitionNotHomomorphism {
                        from: atlas.base().charts()[from].name().to_string(),
                        to: atlas.base().charts()[to].name().to_string(),
                    });
                }
            }
        }
        Ok(FiberedAlgebra { atlas, fiber })
    }

    pub fn atlas(&self) -> &BundleAtlas {
        &self.atlas
    }

    pub fn fiber(&self) -> &FiniteAlgebra {
        &self.fiber
    }

    /// Applies an operation to sections pointwise in canonical coordinates.
    /// An arity-0 operation yields the constant designated-element section.
    /// The result is chart-consistent because transitions are automorphisms.
    pub fn apply_operation(&self, op: &str, args: &[Section]) -> Result<Section, FiberedError> {
        let arity = self
            .fiber
            .signature()
            .arity(op)
            .ok_or_else(|| AlgebraError::UnknownSymbol(op.to_string()))?;
        if args.len() != arity {
            return Err(FiberedError::ArityMismatch {
                symbol: op.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        let points = self.atlas.base().points().len();
        if args.iter().any(|s| s.values().len() != points) {
            return Err(FiberedError::BundleMismatch);
        }
        let op_index = self.fiber.signature().index_of(op).unwrap();
        let mut values = Vec::with_capacity(points);
        for x in 0..points {
            let tuple: Vec<usize> = args.iter().map(|s| s.value_at(x)).collect();
            values.push(self.fiber.evaluate_indexed(op_index, &tuple)?);
        }
        Ok(self.atlas.section(values)?)
    }
}

/// A fibered map whose fiber maps are all homomorphisms of the fiber algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedAlgebraMap {
    map: FiberedMap,
}

impl FiberedAlgebraMap {
    pub fn new(
        source: &FiberedAlgebra,
        target: &FiberedAlgebra,
        map: FiberedMap,
    ) -> Result<Self, FiberedError> {
        if is_fibered_homomorphism(source, target, &map)? {
            Ok(FiberedAlgebraMap { map })
        } else {
            Err(FiberedError::BundleMismatch)
        }
    }

    pub fn map(&self) -> &FiberedMap {
        &self.map
    }
}

/// True iff every per-point fiber map is a homomorphism of the fiber algebras.
pub fn is_fibered_homomorphism(
    source: &FiberedAlgebra,
    target: &FiberedAlgebra,
    map: &FiberedMap,
) -> Result<bool, FiberedError> {
    let points = source.atlas.base().points().len();
    if map.base_map().len() != points {
        return Err(FiberedError::BundleMismatch);
    }
    if source.fiber.signature() != target.fiber.signature() {
        return Err(AlgebraError::SignatureMismatch.into());
    }
    for x in 0..points {
        let fiber_map = AlgebraMap::new(
            source.fiber.clone(),
            target.fiber.clone(),
            map.fiber_map(x).to_vec(),
        )?;
        if !fiber_map.is_homomorphism()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the map is a fibered homomorphism with bijective fiber maps.
pub fn is_fibered_isomorphism(
    source: &FiberedAlgebra,
    target: &FiberedAlgebra,
    map: &FiberedMap,
) -> Result<bool, FiberedError> {
    if !is_fibered_homomorphism(source, target, map)? {
        return Ok(false);
    }
    let bijective = (0..source.atlas.base().points().len()).all(|x| {
        crate::perm::is_bijection(map.fiber_map(x), target.fiber.size())
            && source.fiber.size() == target.fiber.size()
    });
    Ok(bijective)
}

/// True iff `sub` is a closed subalgebra of the fiber and every transition
/// maps it onto itself, so the same sub-carrier cut out in every chart forms a
/// well-defined sub-bundle whose inclusion is a fibered homomorphism.
pub fn is_fibered_subalgebra(
    sub: &BTreeSet<usize>,
    fa: &FiberedAlgebra,
) -> Result<bool, FiberedError> {
    if !fa.fiber.subalgebra_closed(sub)? {
        return Ok(false);
    }
    let charts = fa.atlas.base().charts().len();
    for from in 0..charts {
        for to in 0..charts {
            if from == to || !fa.atlas.base().overlap(from, to) {
                continue;
            }
            let t = fa.atlas.transport(from, to)?;
            if sub.iter().any(|&s| !sub.contains(&t.apply(s))) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
