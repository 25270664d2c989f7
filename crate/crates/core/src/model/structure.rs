use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// A relation symbol with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of relation symbols with unique names and positive arities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let symbols: Vec<Symbol> = symbols
            .into_iter()
            .map(|(name, arity)| Symbol {
                name: name.into(),
                arity,
            })
            .collect();
        let violations = signature_violations(&symbols);
        if violations.is_empty() {
            Ok(Signature { symbols })
        } else {
            Err(Error::Invalid(violations))
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.symbols[rel].arity
    }

    pub fn name(&self, rel: usize) -> &str {
        &self.symbols[rel].name
    }

    /// Largest relation arity, or 0 for the empty signature.
    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }
}

fn signature_violations(symbols: &[Symbol]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for s in symbols {
        if !is_identifier(&s.name) {
            out.push(Violation {
                symbol: Some(s.name.clone()),
                tuple_index: None,
                message: "name is not an identifier".into(),
            });
        }
        if !seen.insert(s.name.as_str()) {
            out.push(Violation {
                symbol: Some(s.name.clone()),
                tuple_index: None,
                message: "duplicate symbol".into(),
            });
        }
        if s.arity == 0 {
            out.push(Violation {
                symbol: Some(s.name.clone()),
                tuple_index: None,
                message: "arity must be at least 1".into(),
            });
        }
    }
    out
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
}

/// An unvalidated structure description, as produced by the parser or by hand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawStructure {
    pub name: String,
    pub size: usize,
    pub relations: Vec<RawRelation>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawRelation {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl RawStructure {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        RawStructure {
            name: name.into(),
            size,
            relations: Vec::new(),
        }
    }

    pub fn relation(
        mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Self {
        self.relations.push(RawRelation {
            name: name.into(),
            arity,
            tuples: tuples.into_iter().collect(),
        });
        self
    }
}

/// Element-indexed view of one relation: for each position, the ids of the
/// tuples carrying a given element there.
type PositionIndex = Vec<Vec<Vec<u32>>>;

/// A finitary relation on `0..carrier`, kept sorted and duplicate-free.
#[derive(Debug)]
pub struct Relation {
    arity: usize,
    carrier: usize,
    tuples: Vec<Vec<usize>>,
    /// Arity 1: a single mask. Arity 2: one successor mask per element.
    /// Present only when the carrier fits in 64 bits.
    bits: Option<Vec<u64>>,
    by_position: OnceLock<PositionIndex>,
}

impl Clone for Relation {
    fn clone(&self) -> Self {
        Relation {
            arity: self.arity,
            carrier: self.carrier,
            tuples: self.tuples.clone(),
            bits: self.bits.clone(),
            by_position: OnceLock::new(),
        }
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.carrier == other.carrier && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

impl Relation {
    /// Builds a relation from tuples already known to be in range and of the right length.
    pub(crate) fn from_checked(arity: usize, carrier: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        let bits = if arity <= 2 && carrier <= 64 {
            let mut bits = vec![0u64; if arity == 1 { 1 } else { carrier }];
            for t in &tuples {
                if arity == 1 {
                    bits[0] |= 1 << t[0];
                } else {
                    bits[t[0]] |= 1 << t[1];
                }
            }
            Some(bits)
        } else {
            None
        };
        Relation {
            arity,
            carrier,
            tuples,
            bits,
            by_position: OnceLock::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    /// True when the relation is all of `A^arity`.
    pub fn is_full(&self) -> bool {
        u32::try_from(self.arity)
            .ok()
            .and_then(|a| self.carrier.checked_pow(a))
            .is_some_and(|total| total == self.tuples.len())
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        if tuple.len() != self.arity || tuple.iter().any(|&e| e >= self.carrier) {
            return false;
        }
        match (&self.bits, self.arity) {
            (Some(bits), 1) => bits[0] >> tuple[0] & 1 == 1,
            (Some(bits), 2) => bits[tuple[0]] >> tuple[1] & 1 == 1,
            _ => self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok(),
        }
    }

    /// True when some tuple starts with `prefix`.
    pub fn has_prefix(&self, prefix: &[usize]) -> bool {
        let i = self.tuples.partition_point(|t| t.as_slice() < prefix);
        self.tuples.get(i).is_some_and(|t| t.starts_with(prefix))
    }

    /// Ids of the tuples that carry `elem` at `pos`.
    pub fn tuple_ids_through(&self, pos: usize, elem: usize) -> &[u32] {
        let index = self.by_position.get_or_init(|| {
            let mut index = vec![vec![Vec::new(); self.carrier]; self.arity];
            for (id, t) in self.tuples.iter().enumerate() {
                for (p, &e) in t.iter().enumerate() {
                    index[p][e].push(id as u32);
                }
            }
            index
        });
        &index[pos][elem]
    }

    pub(crate) fn tuple(&self, id: u32) -> &[usize] {
        &self.tuples[id as usize]
    }
}

/// A finite relational structure on the carrier `0..size`.
///
/// Equality compares carrier, signature and relations; the name is a label only.
#[derive(Clone, Debug)]
pub struct FiniteStructure {
    name: String,
    size: usize,
    signature: Signature,
    relations: Vec<Relation>,
}

impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.signature == other.signature && self.relations == other.relations
    }
}

impl Eq for FiniteStructure {}

/// Canonicalizes a raw description, collecting every violation instead of stopping at the first.
pub fn validate_structure(raw: &RawStructure) -> Result<FiniteStructure> {
    let symbols: Vec<Symbol> = raw
        .relations
        .iter()
        .map(|r| Symbol {
            name: r.name.clone(),
            arity: r.arity,
        })
        .collect();
    let mut violations = signature_violations(&symbols);
    if raw.size == 0 {
        violations.push(Violation {
            symbol: None,
            tuple_index: None,
            message: "carrier must have at least one element".into(),
        });
    }
    if !raw.name.is_empty() && !is_identifier(&raw.name) {
        violations.push(Violation {
            symbol: None,
            tuple_index: None,
            message: format!("structure name `{}` is not an identifier", raw.name),
        });
    }
    for r in &raw.relations {
        for (i, t) in r.tuples.iter().enumerate() {
            if t.len() != r.arity {
                violations.push(Violation {
                    symbol: Some(r.name.clone()),
                    tuple_index: Some(i),
                    message: format!("arity mismatch: tuple has {} entries, expected {}", t.len(), r.arity),
                });
            }
            for &e in t {
                if e >= raw.size {
                    violations.push(Violation {
                        symbol: Some(r.name.clone()),
                        tuple_index: Some(i),
                        message: format!("entry {e} out of range"),
                    });
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let relations = raw
        .relations
        .iter()
        .map(|r| Relation::from_checked(r.arity, raw.size, r.tuples.clone()))
        .collect();
    Ok(FiniteStructure {
        name: if raw.name.is_empty() {
            "A".into()
        } else {
            raw.name.clone()
        },
        size: raw.size,
        signature: Signature { symbols },
        relations,
    })
}

impl FiniteStructure {
    pub(crate) fn from_parts(name: String, size: usize, signature: Signature, relations: Vec<Relation>) -> Self {
        FiniteStructure {
            name,
            size,
            signature,
            relations,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, rel: usize) -> &Relation {
        &self.relations[rel]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&Relation> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    pub fn contains(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple)
    }

    /// Largest arity among the relations, at least `floor`.
    pub fn max_arity_at_least(&self, floor: usize) -> usize {
        self.signature.max_arity().max(floor)
    }

    pub fn to_raw(&self) -> RawStructure {
        RawStructure {
            name: self.name.clone(),
            size: self.size,
            relations: self
                .signature
                .symbols()
                .iter()
                .zip(&self.relations)
                .map(|(s, r)| RawRelation {
                    name: s.name.clone(),
                    arity: s.arity,
                    tuples: r.tuples.clone(),
                })
                .collect(),
        }
    }
}

/// Read access shared by explicit structures and lazy powers.
pub trait RelSource: Sync {
    fn size(&self) -> usize;

    fn signature(&self) -> &Signature;

    fn contains(&self, rel: usize, tuple: &[usize]) -> bool;

    /// Visits every tuple of `rel` carrying `elem` at `pos`.
    fn for_each_tuple_through(
        &self,
        rel: usize,
        pos: usize,
        elem: usize,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()>;

    /// Visits every tuple of `rel`.
    fn for_each_tuple(&self, rel: usize, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()>;
}

impl RelSource for FiniteStructure {
    fn size(&self) -> usize {
        self.size
    }

    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn contains(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple)
    }

    fn for_each_tuple_through(
        &self,
        rel: usize,
        pos: usize,
        elem: usize,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let r = &self.relations[rel];
        for &id in r.tuple_ids_through(pos, elem) {
            visit(r.tuple(id))?;
        }
        ControlFlow::Continue(())
    }

    fn for_each_tuple(&self, rel: usize, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        for t in &self.relations[rel].tuples {
            visit(t)?;
        }
        ControlFlow::Continue(())
    }
}

/// Result of restricting a structure to a subset of its carrier.
#[derive(Clone, Debug)]
pub struct Induced {
    pub structure: FiniteStructure,
    /// `embedding[i]` is the source element that became element `i`.
    pub embedding: Vec<usize>,
}

/// Largest carrier that is ever materialized from a power.
pub const MATERIALIZE_LIMIT: usize = 1 << 20;

/// Restricts `source` to `subset`, re-indexing the kept elements in ascending order.
pub fn induced_substructure(source: &dyn RelSource, subset: &[usize]) -> Result<Induced> {
    let mut embedding: Vec<usize> = subset.to_vec();
    embedding.sort_unstable();
    embedding.dedup();
    if embedding.is_empty() {
        return Err(Error::InvalidArgument(
            "induced substructure needs a nonempty subset".into(),
        ));
    }
    if let Some(&bad) = embedding.iter().find(|&&e| e >= source.size()) {
        return Err(Error::InvalidArgument(format!("element {bad} outside the carrier")));
    }
    if embedding.len() > MATERIALIZE_LIMIT {
        return Err(Error::TooLarge {
            what: "induced substructure",
            size: embedding.len(),
            limit: MATERIALIZE_LIMIT,
        });
    }
    let mut new_index = vec![u32::MAX; source.size()];
    for (i, &e) in embedding.iter().enumerate() {
        new_index[e] = i as u32;
    }
    let sig = source.signature().clone();
    let mut relations = Vec::with_capacity(sig.len());
    for rel in 0..sig.len() {
        let mut tuples = Vec::new();
        // every kept tuple starts inside the subset
        for &first in &embedding {
            let _ = source.for_each_tuple_through(rel, 0, first, &mut |t| {
                if t.iter().all(|&e| new_index[e] != u32::MAX) {
                    tuples.push(t.iter().map(|&e| new_index[e] as usize).collect());
                }
                ControlFlow::Continue(())
            });
        }
        relations.push(Relation::from_checked(sig.arity(rel), embedding.len(), tuples));
    }
    Ok(Induced {
        structure: FiniteStructure::from_parts("induced".into(), embedding.len(), sig, relations),
        embedding,
    })
}
