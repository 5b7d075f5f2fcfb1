//! Finite models of bundles with algebraic structure in the fiber.
//!
//! Everything here is exact and exhaustively checkable: bases are finite
//! point sets with chart covers, fibers are finite algebras given by
//! operation tables, transitions are bijections constant per overlap, and
//! each structural law (gluing cocycles, fiberwise operations, holonomy
//! classification, group representations on bundles) is validated by full
//! enumeration at construction time.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so shared use across threads is safe; enumeration orders are
//! deterministic.

pub mod algebra;
pub mod bundle;
pub mod caps;
pub mod fibered;
pub mod holonomy;
pub mod perm;
pub mod representation;

pub use caps::Caps;
