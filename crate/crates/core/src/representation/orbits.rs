//! Section-level consequences of a representation: kernel of inefficiency,
//! orbits, transitivity, and torsor coordinates.

use std::collections::{BTreeMap, BTreeSet};

use crate::bundle::Section;
use crate::caps::Caps;

use super::{apply_transformation, GroupRepresentation, RepError};

/// The orbits of a representation: disjoint blocks covering all sections of
/// the target bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    blocks: Vec<BTreeSet<Section>>,
}

impl OrbitPartition {
    pub fn blocks(&self) -> &[BTreeSet<Section>] {
        &self.blocks
    }

    pub fn block_of(&self, u: &Section) -> Option<&BTreeSet<Section>> {
        self.blocks.iter().find(|b| b.contains(u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitivityReport {
    pub transitive: bool,
    pub single_transitive: bool,
    pub effective: bool,
}

impl GroupRepresentation {
    /// The group sections acting as the identity transformation. The result
    /// is checked to be a subgroup under pointwise products, which is what
    /// makes "kernel" the right word for it.
    pub fn kernel_of_inefficiency(&self, caps: &Caps) -> Result<Vec<Section>, RepError> {
        let mut kernel = Vec::new();
        for g in self.group().atlas().enumerate_sections(caps)? {
            if self.section_transformation(&g)?.is_identity() {
                kernel.push(g);
            }
        }
        let members: BTreeSet<Section> = kernel.iter().cloned().collect();
        let group = self.group();
        assert!(
            members.contains(&group.unit_section()),
            "kernel must contain the unit section"
        );
        for a in &kernel {
            assert!(
                members.contains(&group.inv_section(a)),
                "kernel must be closed under inverses"
            );
            for b in &kernel {
                assert!(
                    members.contains(&group.mul_sections(a, b)),
                    "kernel must be closed under products"
                );
            }
        }
        Ok(kernel)
    }

    /// True iff only the constant-unit section acts trivially.
    pub fn is_effective(&self, caps: &Caps) -> Result<bool, RepError> {
        let kernel = self.kernel_of_inefficiency(caps)?;
        Ok(kernel.len() == 1)
    }

    /// All images of `u` under section transformations; always contains `u`.
    pub fn orbit(&self, u: &Section, caps: &Caps) -> Result<BTreeSet<Section>, RepError> {
        let mut orbit = BTreeSet::new();
        for g in self.group().atlas().enumerate_sections(caps)? {
            orbit.insert(apply_transformation(&self.section_transformation(&g)?, u)?);
        }
        Ok(orbit)
    }

    /// Partitions all sections of the target into orbits and verifies that
    /// the blocks are pairwise disjoint and cover everything.
    pub fn orbit_partition(&self, caps: &Caps) -> Result<OrbitPartition, RepError> {
        let all: Vec<Section> = self.target().enumerate_sections(caps)?.collect();
        let mut assigned: BTreeSet<Section> = BTreeSet::new();
        let mut blocks = Vec::new();
        for u in &all {
            if assigned.contains(u) {
                continue;
            }
            let orbit = self.orbit(u, caps)?;
            for v in &orbit {
                let fresh = assigned.insert(v.clone());
                assert!(fresh, "orbits of a validated representation are disjoint");
            }
            blocks.push(orbit);
        }
        assert_eq!(
            assigned.len(),
            all.len(),
            "orbits must cover all sections"
        );
        Ok(OrbitPartition { blocks })
    }

    /// Transitivity, single transitivity, and effectiveness in one pass.
    ///
    /// Single transitivity is decided at the section level (exactly one group
    /// section carries `b` to `a`, for every pair) and cross-checked against
    /// the fiberwise criterion; a disagreement would mean a bug, not a
    /// property of the data.
    pub fn transitivity_report(&self, caps: &Caps) -> Result<TransitivityReport, RepError> {
        let target_sections: Vec<Section> = self.target().enumerate_sections(caps)?.collect();
        let group_sections: Vec<Section> = self.group().atlas().enumerate_sections(caps)?.collect();

        let mut section_level = true;
        'sections: for b in &target_sections {
            let mut hits: BTreeMap<Section, usize> = BTreeMap::new();
            for g in &group_sections {
                let image = apply_transformation(&self.section_transformation(g)?, b)?;
                *hits.entry(image).or_insert(0) += 1;
            }
            if hits.len() != target_sections.len() || hits.values().any(|&c| c != 1) {
                section_level = false;
                break 'sections;
            }
        }

        let fiber = self.target().fiber_size();
        let group_size = self.group().group().size();
        let points = self.target().base().points().len();
        let mut fiberwise = true;
        'fibers: for x in 0..points {
            for value in 0..fiber {
                let mut hits = vec![0usize; fiber];
                for g in 0..group_size {
                    hits[self.act(x, g).apply(value)] += 1;
                }
                if hits.iter().any(|&c| c != 1) {
                    fiberwise = false;
                    break 'fibers;
                }
            }
        }
        if section_level != fiberwise {
            return Err(RepError::CriterionDisagreement);
        }

        let transitive = self.orbit_partition(caps)?.blocks().len() == 1;
        let effective = self.is_effective(caps)?;
        Ok(TransitivityReport {
            transitive,
            single_transitive: section_level,
            effective,
        })
    }

    /// For a single-transitive representation, the unique group section `g`
    /// with `w = f(g)v`, found pointwise. `coordinates(v, v)` is the constant
    /// unit section, and applying `f(g)` to `v` returns `w`.
    pub fn coordinates(
        &self,
        reference: &Section,
        w: &Section,
        caps: &Caps,
    ) -> Result<Section, RepError> {
        if !self.transitivity_report(caps)?.single_transitive {
            return Err(RepError::NotSingleTransitive);
        }
        let points = self.target().base().points().len();
        if reference.values().len() != points || w.values().len() != points {
            return Err(RepError::ActionShape);
        }
        let group_size = self.group().group().size();
        let mut values = Vec::with_capacity(points);
        for x in 0..points {
            let g = (0..group_size)
                .find(|&g| self.act(x, g).apply(reference.value_at(x)) == w.value_at(x))
                .expect("single transitivity provides a carrier element per point");
            values.push(g);
        }
        Ok(Section::from_values(values))
    }
}
