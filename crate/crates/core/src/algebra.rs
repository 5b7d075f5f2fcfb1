//! Finite universal algebras presented by total operation tables.
//!
//! A carrier is always the integer range `{0..n-1}`; all semantics live in the
//! tables, which keeps equality decidable and tests bit-exact.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::caps::Caps;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("signature symbol `{0}` is empty or duplicated")]
    BadSymbol(String),
    #[error("no table supplied for operation `{symbol}`")]
    MissingTable { symbol: String },
    #[error("table for `{symbol}` names no signature operation")]
    UnknownTable { symbol: String },
    #[error("operation `{symbol}`: expected {expected} table entries, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("operation `{symbol}`: entry {value} at index {index} is outside carrier 0..{size}")]
    OutOfRangeEntry {
        symbol: String,
        index: usize,
        value: usize,
        size: usize,
    },
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("element {value} is outside carrier 0..{size}")]
    ElementOutOfRange { value: usize, size: usize },
    #[error("carrier size must be positive")]
    EmptyCarrier,
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("mapping has {got} entries, expected {expected}")]
    MappingSizeMismatch { expected: usize, got: usize },
    #[error("empty factor list")]
    EmptyList,
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("carrier size {size} exceeds enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
}

/// An ordered list of operation symbols with arities. Arity 0 is permitted;
/// a 0-ary operation designates a single carrier element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(ops: Vec<(S, usize)>) -> Result<Self, AlgebraError> {
        let ops: Vec<(String, usize)> = ops.into_iter().map(|(s, k)| (s.into(), k)).collect();
        let mut seen = BTreeSet::new();
        for (symbol, _) in &ops {
            if symbol.is_empty() || !seen.insert(symbol.clone()) {
                return Err(AlgebraError::BadSymbol(symbol.clone()));
            }
        }
        Ok(Signature { ops })
    }

    /// The empty signature: no operations, so every map is a homomorphism.
    pub fn empty() -> Self {
        Signature { ops: Vec::new() }
    }

    pub fn ops(&self) -> &[(String, usize)] {
        &self.ops
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.ops.iter().position(|(s, _)| s == symbol)
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.ops
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|&(_, k)| k)
    }
}

/// Row-major index of an argument tuple in a flat table over carrier `size`;
/// `args[0]` is the most significant digit.
fn table_index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// A finite algebra: carrier `{0..size-1}` plus one total table per signature
/// operation. The table for an arity-`k` symbol holds `size^k` entries in
/// row-major order (first argument most significant); an arity-0 table is a
/// single designated element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    signature: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    /// Validates closure and totality of the supplied tables, keyed by symbol.
    pub fn new(
        signature: Signature,
        size: usize,
        tables: Vec<(String, Vec<usize>)>,
    ) -> Result<Self, AlgebraError> {
        if size == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        for (symbol, _) in &tables {
            if signature.index_of(symbol).is_none() {
                return Err(AlgebraError::UnknownTable {
                    symbol: symbol.clone(),
                });
            }
        }
        let mut ordered = Vec::with_capacity(signature.ops.len());
        for (symbol, arity) in &signature.ops {
            let table = tables
                .iter()
                .find(|(s, _)| s == symbol)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| AlgebraError::MissingTable {
                    symbol: symbol.clone(),
                })?;
            let expected = size.pow(*arity as u32);
            if table.len() != expected {
                return Err(AlgebraError::ArityMismatch {
                    symbol: symbol.clone(),
                    expected,
                    got: table.len(),
                });
            }
            if let Some((index, &value)) = table.iter().find_position(|&&v| v >= size) {
                return Err(AlgebraError::OutOfRangeEntry {
                    symbol: symbol.clone(),
                    index,
                    value,
                    size,
                });
            }
            ordered.push(table);
        }
        Ok(FiniteAlgebra {
            signature,
            size,
            tables: ordered,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.size
    }

    pub fn table(&self, op_index: usize) -> &[usize] {
        &self.tables[op_index]
    }

    /// Table lookup for `op(args)`.
    pub fn evaluate(&self, op: &str, args: &[usize]) -> Result<usize, AlgebraError> {
        let idx = self
            .signature
            .index_of(op)
            .ok_or_else(|| AlgebraError::UnknownSymbol(op.to_string()))?;
        self.evaluate_indexed(idx, args)
    }

    /// Same as [`evaluate`](Self::evaluate) with the operation pre-resolved.
    pub fn evaluate_indexed(&self, op_index: usize, args: &[usize]) -> Result<usize, AlgebraError> {
        let (symbol, arity) = &self.signature.ops[op_index];
        if args.len() != *arity {
            return Err(AlgebraError::ArityMismatch {
                symbol: symbol.clone(),
                expected: *arity,
                got: args.len(),
            });
        }
        for &a in args {
            if a >= self.size {
                return Err(AlgebraError::ElementOutOfRange {
                    value: a,
                    size: self.size,
                });
            }
        }
        Ok(self.tables[op_index][table_index(self.size, args)])
    }

    /// All argument tuples of the given arity, in row-major order.
    pub fn tuples(&self, arity: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
        let size = self.size;
        (0..size.pow(arity as u32)).map(move |mut idx| {
            let mut tuple = vec![0; arity];
            for slot in tuple.iter_mut().rev() {
                *slot = idx % size;
                idx /= size;
            }
            tuple
        })
    }

    /// True iff `subset` contains every designated element and is closed under
    /// every operation.
    pub fn subalgebra_closed(&self, subset: &BTreeSet<usize>) -> Result<bool, AlgebraError> {
        for &s in subset {
            if s >= self.size {
                return Err(AlgebraError::ElementOutOfRange {
                    value: s,
                    size: self.size,
                });
            }
        }
        let members: Vec<usize> = subset.iter().copied().collect();
        for (op_index, (_, arity)) in self.signature.ops.iter().enumerate() {
            for args in tuples_over(&members, *arity) {
                let value = self.tables[op_index][table_index(self.size, &args)];
                if !subset.contains(&value) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// All `arity`-tuples drawn from `members`.
fn tuples_over(members: &[usize], arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                members.iter().map(move |&m| {
                    let mut next = prefix.clone();
                    next.push(m);
                    next
                })
            })
            .collect();
    }
    out
}

/// A total map between carriers of two algebras over one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraMap {
    source: FiniteAlgebra,
    target: FiniteAlgebra,
    mapping: Vec<usize>,
}

impl AlgebraMap {
    pub fn new(
        source: FiniteAlgebra,
        target: FiniteAlgebra,
        mapping: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        if mapping.len() != source.size {
            return Err(AlgebraError::MappingSizeMismatch {
                expected: source.size,
                got: mapping.len(),
            });
        }
        if let Some(&value) = mapping.iter().find(|&&v| v >= target.size) {
            return Err(AlgebraError::ElementOutOfRange {
                value,
                size: target.size,
            });
        }
        Ok(AlgebraMap {
            source,
            target,
            mapping,
        })
    }

    pub fn identity(alg: &FiniteAlgebra) -> Self {
        AlgebraMap {
            source: alg.clone(),
            target: alg.clone(),
            mapping: (0..alg.size).collect(),
        }
    }

    pub fn source(&self) -> &FiniteAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FiniteAlgebra {
        &self.target
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, element: usize) -> usize {
        self.mapping[element]
    }

    pub fn is_bijective(&self) -> bool {
        self.source.size == self.target.size
            && crate::perm::is_bijection(&self.mapping, self.target.size)
    }

    /// True iff the map commutes with every operation on every argument tuple.
    /// Arity-0 operations require the designated elements to correspond.
    pub fn is_homomorphism(&self) -> Result<bool, AlgebraError> {
        if self.source.signature != self.target.signature {
            return Err(AlgebraError::SignatureMismatch);
        }
        for (op_index, (_, arity)) in self.source.signature.ops.iter().enumerate() {
            for args in self.source.tuples(*arity) {
                let through_source =
                    self.mapping[self.source.tables[op_index][table_index(self.source.size, &args)]];
                let mapped: Vec<usize> = args.iter().map(|&a| self.mapping[a]).collect();
                let through_target =
                    self.target.tables[op_index][table_index(self.target.size, &mapped)];
                if through_source != through_target {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `self.compose(&g)` applies `g` first; requires `g.target == self.source`.
    pub fn compose(&self, g: &AlgebraMap) -> Result<AlgebraMap, AlgebraError> {
        if g.target != self.source {
            return Err(AlgebraError::SignatureMismatch);
        }
        Ok(AlgebraMap {
            source: g.source.clone(),
            target: self.target.clone(),
            mapping: g.mapping.iter().map(|&v| self.mapping[v]).collect(),
        })
    }

    /// Inverse of a bijective map.
    pub fn inverse(&self) -> Option<AlgebraMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut mapping = vec![0; self.mapping.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            mapping[j] = i;
        }
        Some(AlgebraMap {
            source: self.target.clone(),
            target: self.source.clone(),
            mapping,
        })
    }
}

/// All bijective self-maps of `alg` that are homomorphisms, in lexicographic
/// order of their image tables. The result always forms a group.
///
/// Exhausts all `n!` bijections, so carriers above
/// `caps.max_automorphism_degree` are refused with `CapExceeded`.
pub fn enumerate_automorphisms(
    alg: &FiniteAlgebra,
    caps: &Caps,
) -> Result<Vec<AlgebraMap>, AlgebraError> {
    if alg.size > caps.max_automorphism_degree {
        return Err(AlgebraError::CapExceeded {
            size: alg.size,
            cap: caps.max_automorphism_degree,
        });
    }
    let mut found = Vec::new();
    for images in (0..alg.size).permutations(alg.size) {
        let candidate = AlgebraMap {
            source: alg.clone(),
            target: alg.clone(),
            mapping: images,
        };
        if candidate.is_homomorphism()? {
            found.push(candidate);
        }
    }
    Ok(found)
}

/// Mixed-radix encoding of tuples: `index = Σ x_i · Π_{j>i} n_j`, so the first
/// digit is the most significant. Used for product carriers and product bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadix {
    sizes: Vec<usize>,
}

impl MixedRadix {
    pub fn new(sizes: Vec<usize>) -> Self {
        MixedRadix { sizes }
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.sizes.len());
        digits
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&d, &n)| acc * n + d)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.sizes.len()];
        for (slot, &n) in digits.iter_mut().zip(&self.sizes).rev() {
            *slot = index % n;
            index /= n;
        }
        digits
    }
}

/// Componentwise product of algebras over one shared signature. The carrier is
/// the mixed-radix encoding of tuples (see [`MixedRadix`]).
pub fn product_algebra(factors: &[FiniteAlgebra]) -> Result<FiniteAlgebra, AlgebraError> {
    let first = factors.first().ok_or(AlgebraError::EmptyList)?;
    if factors.iter().any(|f| f.signature != first.signature) {
        return Err(AlgebraError::SignatureMismatch);
    }
    let radix = MixedRadix::new(factors.iter().map(|f| f.size).collect());
    let size = radix.total();
    let mut tables = Vec::with_capacity(first.signature.ops.len());
    for (op_index, (symbol, arity)) in first.signature.ops.iter().enumerate() {
        let mut table = Vec::with_capacity(size.pow(*arity as u32));
        let product = FiniteAlgebra {
            signature: Signature::empty(),
            size,
            tables: Vec::new(),
        };
        for args in product.tuples(*arity) {
            let decoded: Vec<Vec<usize>> = args.iter().map(|&a| radix.decode(a)).collect();
            let mut digits = Vec::with_capacity(factors.len());
            for (i, factor) in factors.iter().enumerate() {
                let component: Vec<usize> = decoded.iter().map(|tuple| tuple[i]).collect();
                digits.push(factor.tables[op_index][table_index(factor.size, &component)]);
            }
            table.push(radix.encode(&digits));
        }
        tables.push((symbol.clone(), table));
    }
    FiniteAlgebra::new(first.signature.clone(), size, tables)
}

/// A finite algebra together with designated group operations, validated to
/// satisfy the group axioms by full enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupStructure {
    algebra: FiniteAlgebra,
    mul: usize,
    inv: usize,
    unit: usize,
}

/// True iff the named operations satisfy associativity and the two-sided unit
/// and inverse laws, checked over all elements.
pub fn is_group(
    alg: &FiniteAlgebra,
    mul: &str,
    inv: &str,
    unit: &str,
) -> Result<bool, AlgebraError> {
    let (m, i, u) = resolve_group_symbols(alg, mul, inv, unit)?;
    Ok(group_axiom_failure(alg, m, i, u).is_none())
}

fn resolve_group_symbols(
    alg: &FiniteAlgebra,
    mul: &str,
    inv: &str,
    unit: &str,
) -> Result<(usize, usize, usize), AlgebraError> {
    let mut resolved = [0usize; 3];
    for (slot, (symbol, arity)) in [(mul, 2), (inv, 1), (unit, 0)].iter().enumerate() {
        let idx = alg
            .signature
            .index_of(symbol)
            .ok_or_else(|| AlgebraError::UnknownSymbol(symbol.to_string()))?;
        let declared = alg.signature.ops[idx].1;
        if declared != *arity {
            return Err(AlgebraError::ArityMismatch {
                symbol: symbol.to_string(),
                expected: *arity,
                got: declared,
            });
        }
        resolved[slot] = idx;
    }
    Ok((resolved[0], resolved[1], resolved[2]))
}

fn group_axiom_failure(alg: &FiniteAlgebra, mul: usize, inv: usize, unit: usize) -> Option<String> {
    let n = alg.size;
    let m = |a: usize, b: usize| alg.tables[mul][a * n + b];
    let e = alg.tables[unit][0];
    for a in 0..n {
        if m(e, a) != a || m(a, e) != a {
            return Some(format!("unit law fails at element {a}"));
        }
        let ai = alg.tables[inv][a];
        if m(a, ai) != e || m(ai, a) != e {
            return Some(format!("inverse law fails at element {a}"));
        }
        for b in 0..n {
            for c in 0..n {
                if m(m(a, b), c) != m(a, m(b, c)) {
                    return Some(format!("associativity fails at ({a}, {b}, {c})"));
                }
            }
        }
    }
    None
}

impl GroupStructure {
    pub fn new(
        algebra: FiniteAlgebra,
        mul: &str,
        inv: &str,
        unit: &str,
    ) -> Result<Self, AlgebraError> {
        let (m, i, u) = resolve_group_symbols(&algebra, mul, inv, unit)?;
        if let Some(reason) = group_axiom_failure(&algebra, m, i, u) {
            return Err(AlgebraError::NotAGroup(reason));
        }
        Ok(GroupStructure {
            algebra,
            mul: m,
            inv: i,
            unit: u,
        })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn size(&self) -> usize {
        self.algebra.size
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.algebra.tables[self.mul][a * self.algebra.size + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.algebra.tables[self.inv][a]
    }

    pub fn unit(&self) -> usize {
        self.algebra.tables[self.unit][0]
    }

    pub fn symbols(&self) -> (&str, &str, &str) {
        (
            &self.algebra.signature.ops[self.mul].0,
            &self.algebra.signature.ops[self.inv].0,
            &self.algebra.signature.ops[self.unit].0,
        )
    }

    /// The group with the multiplication table transposed (`a ∘ᵒᵖ b = b ∘ a`);
    /// unit and inverses are unchanged. Applying this twice restores the
    /// original tables.
    pub fn opposite(&self) -> GroupStructure {
        let n = self.algebra.size;
        let mut tables = self.algebra.tables.clone();
        let mut transposed = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                transposed[a * n + b] = self.algebra.tables[self.mul][b * n + a];
            }
        }
        tables[self.mul] = transposed;
        let algebra = FiniteAlgebra {
            signature: self.algebra.signature.clone(),
            size: n,
            tables,
        };
        debug_assert!(group_axiom_failure(&algebra, self.mul, self.inv, self.unit).is_none());
        GroupStructure {
            algebra,
            mul: self.mul,
            inv: self.inv,
            unit: self.unit,
        }
    }
}

/// Stock groups used throughout the test suites and fixtures. All carry the
/// signature `[("*", 2), ("inv", 1), ("e", 0)]`.
pub mod groups {
    use super::{FiniteAlgebra, GroupStructure, Signature};

    fn group_signature() -> Signature {
        Signature::new(vec![("*", 2), ("inv", 1), ("e", 0)]).unwrap()
    }

    /// Builds a group from a multiplication function on `{0..n-1}`; the unit
    /// and inverses are derived from the table.
    pub fn from_mul(n: usize, mul: impl Fn(usize, usize) -> usize) -> GroupStructure {
        let mut mul_table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mul_table.push(mul(a, b));
            }
        }
        let unit = (0..n)
            .find(|&e| (0..n).all(|a| mul(e, a) == a && mul(a, e) == a))
            .expect("multiplication has a unit");
        let inv_table: Vec<usize> = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| mul(a, b) == unit && mul(b, a) == unit)
                    .expect("every element has an inverse")
            })
            .collect();
        let algebra = FiniteAlgebra::new(
            group_signature(),
            n,
            vec![
                ("*".to_string(), mul_table),
                ("inv".to_string(), inv_table),
                ("e".to_string(), vec![unit]),
            ],
        )
        .expect("derived tables are total and closed");
        GroupStructure::new(algebra, "*", "inv", "e").expect("construction satisfies group axioms")
    }

    /// The cyclic group of order `n` under addition mod `n`.
    pub fn cyclic(n: usize) -> GroupStructure {
        assert!(n > 0);
        from_mul(n, |a, b| (a + b) % n)
    }

    /// The Klein four-group, encoded as pairs `(a1, a0) ↦ 2·a1 + a0` with
    /// componentwise addition mod 2.
    pub fn klein_four() -> GroupStructure {
        from_mul(4, |a, b| (a ^ b) & 0b11)
    }

    /// The symmetric group on three letters. Elements are the permutations of
    /// `{0,1,2}` in lexicographic order of their image tables, and `a * b`
    /// applies `b` first.
    pub fn symmetric_3() -> GroupStructure {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index_of = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        from_mul(6, |a, b| {
            let (pa, pb) = (perms[a], perms[b]);
            index_of([pa[pb[0]], pa[pb[1]], pa[pb[2]]])
        })
    }
}
