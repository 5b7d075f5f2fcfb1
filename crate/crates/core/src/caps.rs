//! Enumeration limits for the exhaustive searches.

/// Budget for operations that enumerate sections, group elements, or bijections.
/// Exceeding a cap yields an explicit error instead of an unbounded search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest number of sections `fiber_size^|points|` that may be enumerated.
    pub max_sections: usize,
    /// Largest closure (e.g. holonomy group) that may be generated.
    pub max_group_elements: usize,
    /// Largest carrier size for which automorphisms are enumerated (`n!` bijections).
    pub max_automorphism_degree: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_sections: 100_000,
            max_group_elements: 10_000,
            max_automorphism_degree: 8,
        }
    }
}

impl Caps {
    /// Overrides the section and closure caps with a single budget, as the
    /// `--cap` flag and `FIBRA_CAP` environment variable do.
    pub fn with_budget(budget: usize) -> Self {
        Caps {
            max_sections: budget,
            max_group_elements: budget,
            ..Caps::default()
        }
    }
}
