//! Canonical structures of graphs, posets, strict posets and lattices of
//! equivalence relations, with axiom checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::partition::Partition;
use crate::model::structure::{validate_structure, FiniteStructure, RawStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Graph,
    Poset,
    StrictPoset,
    EqLattice,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Graph => "graph",
            Family::Poset => "poset",
            Family::StrictPoset => "strict_poset",
            Family::EqLattice => "eq_lattice",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph" | "graphs" => Ok(Family::Graph),
            "poset" | "posets" => Ok(Family::Poset),
            "strict" | "strict_poset" | "strict-poset" | "strict-posets" => Ok(Family::StrictPoset),
            "eqlattice" | "eq_lattice" | "eq-lattice" => Ok(Family::EqLattice),
            _ => Err(Error::InvalidArgument(format!("unknown family `{s}`"))),
        }
    }
}

/// Input for [`canonical_structure`].
#[derive(Clone, Debug)]
pub enum FamilyData {
    /// Undirected edges; each `{a, b}` becomes both `(a, b)` and `(b, a)`.
    Graph { n: usize, edges: Vec<(usize, usize)> },
    /// The full order relation, reflexive pairs included.
    Poset { n: usize, le: Vec<(usize, usize)> },
    /// The strict order relation.
    StrictPoset { n: usize, lt: Vec<(usize, usize)> },
    /// One binary relation `eq{i}` per partition, in the given order.
    EqLattice { n: usize, partitions: Vec<Partition> },
}

fn family_error(family: Family, rule: &'static str, witness: Vec<usize>) -> Error {
    Error::Family {
        family: family.as_str(),
        rule,
        witness,
    }
}

pub fn canonical_structure(data: &FamilyData) -> Result<FiniteStructure> {
    let (family, raw) = match data {
        FamilyData::Graph { n, edges } => {
            let mut tuples = Vec::new();
            for &(a, b) in edges {
                tuples.push(vec![a, b]);
                tuples.push(vec![b, a]);
            }
            (Family::Graph, RawStructure::new("G", *n).relation("edge", 2, tuples))
        }
        FamilyData::Poset { n, le } => (
            Family::Poset,
            RawStructure::new("P", *n).relation("le", 2, le.iter().map(|&(a, b)| vec![a, b])),
        ),
        FamilyData::StrictPoset { n, lt } => (
            Family::StrictPoset,
            RawStructure::new("S", *n).relation("lt", 2, lt.iter().map(|&(a, b)| vec![a, b])),
        ),
        FamilyData::EqLattice { n, partitions } => {
            if let Some(p) = partitions.iter().find(|p| p.size() != *n) {
                return Err(Error::InvalidArgument(format!(
                    "partition {p} is not a partition of {n} points"
                )));
            }
            let mut raw = RawStructure::new("L", *n);
            for (i, p) in partitions.iter().enumerate() {
                raw = raw.relation(format!("eq{i}"), 2, p.pairs());
            }
            (Family::EqLattice, raw)
        }
    };
    let a = validate_structure(&raw)?;
    verify_family(&a, family)?;
    Ok(a)
}

/// Checks the family axioms on an arbitrary structure, returning a witness on failure.
///
/// Graphs, posets and strict posets need exactly one binary relation; an
/// equivalence lattice needs every relation to be a binary equivalence relation.
pub fn verify_family(a: &FiniteStructure, family: Family) -> Result<()> {
    let sig = a.signature();
    if family == Family::EqLattice {
        for rel in 0..sig.len() {
            if sig.arity(rel) != 2 {
                return Err(family_error(family, "binary relations only", vec![rel]));
            }
            check_equivalence(a, rel)?;
        }
        return Ok(());
    }
    if sig.len() != 1 || sig.arity(0) != 2 {
        return Err(family_error(family, "exactly one binary relation", vec![]));
    }
    let n = a.size();
    let r = |x: usize, y: usize| a.contains(0, &[x, y]);
    match family {
        Family::Graph => {
            if let Some(x) = (0..n).find(|&x| r(x, x)) {
                return Err(family_error(family, "irreflexive", vec![x, x]));
            }
            if let Some((x, y)) = pairs(n).find(|&(x, y)| r(x, y) && !r(y, x)) {
                return Err(family_error(family, "symmetric", vec![x, y]));
            }
        }
        Family::Poset => {
            if let Some(x) = (0..n).find(|&x| !r(x, x)) {
                return Err(family_error(family, "reflexive", vec![x, x]));
            }
            if let Some((x, y)) = pairs(n).find(|&(x, y)| x != y && r(x, y) && r(y, x)) {
                return Err(family_error(family, "antisymmetric", vec![x, y]));
            }
            check_transitive(a, family)?;
        }
        Family::StrictPoset => {
            if let Some((x, y)) = pairs(n).find(|&(x, y)| r(x, y) && r(y, x)) {
                return Err(family_error(family, "asymmetric", vec![x, y]));
            }
            check_transitive(a, family)?;
        }
        Family::EqLattice => unreachable!(),
    }
    Ok(())
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

fn check_transitive(a: &FiniteStructure, family: Family) -> Result<()> {
    let n = a.size();
    for (x, y) in pairs(n) {
        if !a.contains(0, &[x, y]) {
            continue;
        }
        if let Some(z) = (0..n).find(|&z| a.contains(0, &[y, z]) && !a.contains(0, &[x, z])) {
            return Err(family_error(family, "transitive", vec![x, y, z]));
        }
    }
    Ok(())
}

fn check_equivalence(a: &FiniteStructure, rel: usize) -> Result<()> {
    let family = Family::EqLattice;
    let n = a.size();
    let r = |x: usize, y: usize| a.contains(rel, &[x, y]);
    if let Some(x) = (0..n).find(|&x| !r(x, x)) {
        return Err(family_error(family, "reflexive", vec![x, x]));
    }
    if let Some((x, y)) = pairs(n).find(|&(x, y)| r(x, y) && !r(y, x)) {
        return Err(family_error(family, "symmetric", vec![x, y]));
    }
    for (x, y) in pairs(n) {
        if r(x, y) {
            if let Some(z) = (0..n).find(|&z| r(y, z) && !r(x, z)) {
                return Err(family_error(family, "transitive", vec![x, y, z]));
            }
        }
    }
    Ok(())
}

/// The partitions named by an equivalence-lattice structure, in relation order.
pub fn partitions_of(a: &FiniteStructure) -> Result<Vec<Partition>> {
    verify_family(a, Family::EqLattice)?;
    Ok(a.relations()
        .iter()
        .map(|r| Partition::from_pairs(a.size(), r.tuples()).expect("verified equivalence"))
        .collect())
}

/// Reflexive-transitive closure of `covers` on `0..n`, as a poset order relation.
pub fn order_from_covers(n: usize, covers: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut le = vec![vec![false; n]; n];
    for (x, row) in le.iter_mut().enumerate() {
        row[x] = true;
    }
    for &(a, b) in covers {
        le[a][b] = true;
    }
    for k in 0..n {
        let through = le[k].clone();
        for row in le.iter_mut().filter(|row| row[k]) {
            for (slot, &t) in row.iter_mut().zip(&through) {
                *slot |= t;
            }
        }
    }
    pairs(n).filter(|&(x, y)| le[x][y]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_edges() {
        let g = canonical_structure(&FamilyData::Graph {
            n: 4,
            edges: vec![(0, 1), (2, 3)],
        })
        .unwrap();
        assert_eq!(g.relation(0).len(), 4);
        assert!(g.contains(0, &[1, 0]));
    }

    #[test]
    fn antisymmetry_witness() {
        let err = canonical_structure(&FamilyData::Poset {
            n: 2,
            le: vec![(0, 0), (1, 1), (0, 1), (1, 0)],
        })
        .unwrap_err();
        let Error::Family { rule, witness, .. } = err else {
            panic!()
        };
        assert_eq!(rule, "antisymmetric");
        assert_eq!(witness, vec![0, 1]);
    }

    #[test]
    fn m3_relations_have_eight_pairs() {
        let parts = [[0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0]]
            .iter()
            .map(|l| Partition::from_labels(l).unwrap())
            .collect();
        let l = canonical_structure(&FamilyData::EqLattice {
            n: 4,
            partitions: parts,
        })
        .unwrap();
        assert_eq!(l.signature().len(), 3);
        for r in l.relations() {
            // 2 blocks of size 2 give 2 * 2 * 2 pairs
            assert_eq!(r.len(), 8);
        }
        assert_eq!(partitions_of(&l).unwrap().len(), 3);
    }

    #[test]
    fn loops_rejected_in_graphs() {
        let err = canonical_structure(&FamilyData::Graph {
            n: 2,
            edges: vec![(1, 1)],
        })
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Family {
                rule: "irreflexive",
                ..
            }
        ));
    }

    #[test]
    fn intransitive_strict_order() {
        let err = canonical_structure(&FamilyData::StrictPoset {
            n: 3,
            lt: vec![(0, 1), (1, 2)],
        })
        .unwrap_err();
        let Error::Family { rule, witness, .. } = err else {
            panic!()
        };
        assert_eq!(rule, "transitive");
        assert_eq!(witness, vec![0, 1, 2]);
    }

    #[test]
    fn covers_closure() {
        let le = order_from_covers(3, &[(0, 1), (1, 2)]);
        assert_eq!(le.len(), 6);
        assert!(le.contains(&(0, 2)));
    }
}
