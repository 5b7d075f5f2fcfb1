//! The commuting counterpart of a single-transitive covariant representation.

use crate::bundle::Section;
use crate::caps::Caps;
use crate::perm::Perm;

use super::{validate_representation, GroupRepresentation, RepError, Variance};

impl GroupRepresentation {
    /// Builds the twin of a single-transitive covariant representation with
    /// respect to a reference section.
    ///
    /// At each point, `φ(g) = ρ(g)(reference)` identifies the group carrier
    /// with the fiber; the twin conjugates right multiplication through that
    /// identification: `h(a) = φ ∘ (·a) ∘ φ⁻¹`. The result is a validated
    /// contravariant representation whose action commutes elementwise with
    /// the original, and it is pinned among all such counterparts by the
    /// value `h(a)(reference) = ρ(a)(reference)`. Different references yield
    /// twins that differ by an inner conjugation of the group argument.
    pub fn twin(&self, reference: &Section, caps: &Caps) -> Result<GroupRepresentation, RepError> {
        if self.variance() != Variance::Covariant {
            return Err(RepError::NotCovariant);
        }
        if !self.transitivity_report(caps)?.single_transitive {
            return Err(RepError::NotSingleTransitive);
        }
        let gs = self.group().group().clone();
        let n = gs.size();
        let points = self.target().base().points().len();
        if reference.values().len() != points {
            return Err(RepError::ActionShape);
        }
        // Single transitivity forces the fiber and group carriers to have the
        // same size, so the identification below really is a permutation.
        if self.target().fiber_size() != n {
            return Err(RepError::MismatchDetected(
                "single-transitive target fiber must match the group size".into(),
            ));
        }

        let mut action = Vec::with_capacity(points);
        for x in 0..points {
            let images: Vec<usize> = (0..n)
                .map(|g| self.act(x, g).apply(reference.value_at(x)))
                .collect();
            let phi = Perm::from_images(images).ok_or_else(|| {
                RepError::MismatchDetected(
                    "orbit map of a single-transitive representation must be bijective".into(),
                )
            })?;
            let phi_inv = phi.inverse();
            let row: Vec<Perm> = (0..n)
                .map(|a| {
                    let right = Perm::from_images((0..n).map(|g| gs.mul(g, a)).collect())
                        .expect("right multiplication is a bijection");
                    phi.compose(&right.compose(&phi_inv))
                })
                .collect();
            action.push(row);
        }
        let twin = validate_representation(
            self.group(),
            self.target(),
            Variance::Contravariant,
            action,
        )?;

        for x in 0..points {
            for a in 0..n {
                for b in 0..n {
                    let fa = self.act(x, a);
                    let hb = twin.act(x, b);
                    if hb.compose(fa) != fa.compose(hb) {
                        return Err(RepError::MismatchDetected(format!(
                            "twin fails to commute at point {x} for elements ({a}, {b})"
                        )));
                    }
                }
            }
        }
        Ok(twin)
    }
}
