//! Homomorphism-homogeneity, k-polymorphism-homogeneity, near-unanimity
//! polymorphisms and the certified decision procedure for polymorphism-homogeneity.

pub(crate) mod decide;
mod onepoint;

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::engine::{solve, ExtensionProblem, SearchLimits, SearchOutcome, SearchStats, SearchStatus};
use crate::error::{Error, Result};
use crate::model::{induced_substructure, power, reduce_columns, FiniteStructure, FunctionTable, PartialOpMap};

pub use decide::{
    decide_ph, decide_ph_with, envelope_allows, verify_certificate, BpCounts, Certificate, CertificateCheck,
    DecideOptions, Inconclusive, PhStatus, PipelineTrace, Stage, Verdict,
};
pub use onepoint::{
    is_hom_homogeneous, is_k_ph, is_k_ph_via_power, one_point_counterexample, HhOutcome, KphOutcome, OnePointOutcome,
};

/// A selection of domain rows whose columns lie in a relation but whose image does not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpViolation {
    pub symbol: String,
    pub rows: Vec<Vec<usize>>,
    pub image: Vec<usize>,
}

/// Matrix criterion: for every relation `ρ` and every choice of `ar(ρ)` domain
/// rows whose columns all lie in `ρ`, the image tuple lies in `ρ`.
///
/// Returns the first violation in lexicographic order of row selections.
pub fn is_partial_polymorphism(a: &FiniteStructure, f: &PartialOpMap) -> Result<Option<PpViolation>> {
    if f.carrier() != a.size() {
        return Err(Error::InvalidArgument(format!(
            "map is over {} points, structure has {}",
            f.carrier(),
            a.size()
        )));
    }
    let rows = f.rows();
    let values: Vec<usize> = f.entries().map(|(_, v)| v).collect();
    let k = f.arity();
    let sig = a.signature();
    for rel in 0..sig.len() {
        let relation = a.relation(rel);
        if relation.is_full() {
            continue;
        }
        let r = sig.arity(rel);
        // DFS over row selections, pruning on column prefixes absent from ρ
        let mut chosen: Vec<usize> = Vec::with_capacity(r);
        let mut next = vec![0usize; r + 1];
        let mut prefix = vec![0usize; r];
        loop {
            let depth = chosen.len();
            if depth == r {
                let image: Vec<usize> = chosen.iter().map(|&i| values[i]).collect();
                if !relation.contains(&image) {
                    return Ok(Some(PpViolation {
                        symbol: sig.name(rel).to_string(),
                        rows: chosen.iter().map(|&i| rows[i].to_vec()).collect(),
                        image,
                    }));
                }
                chosen.pop();
                continue;
            }
            if next[depth] == rows.len() {
                if depth == 0 {
                    break;
                }
                next[depth] = 0;
                chosen.pop();
                continue;
            }
            let cand = next[depth];
            next[depth] += 1;
            let fits = (0..k).all(|j| {
                for (slot, &i) in prefix.iter_mut().zip(&chosen) {
                    *slot = rows[i][j];
                }
                prefix[depth] = rows[cand][j];
                relation.has_prefix(&prefix[..=depth])
            });
            if fits {
                chosen.push(cand);
                next[depth + 1] = 0;
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    /// A total polymorphism agreeing with the partial map.
    Found(FunctionTable),
    Unsat,
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct ExtensionOutcome {
    pub status: Extension,
    pub stats: SearchStats,
}

/// Searches for a polymorphism `A^k → A` extending `f`.
pub fn extendable(a: &FiniteStructure, f: &PartialOpMap, limits: SearchLimits) -> Result<ExtensionOutcome> {
    if let Some(v) = is_partial_polymorphism(a, f)? {
        return Err(Error::NotPartialPolymorphism {
            symbol: v.symbol,
            rows: v.rows,
        });
    }
    let p = power(a, f.arity())?;
    let pins: Vec<(usize, usize)> = f.entries().map(|(args, v)| (p.encode(args), v)).collect();
    let out = solve(&ExtensionProblem::new(&p, a).pins(&pins).limits(limits))?;
    let status = match out.status {
        SearchStatus::Found(map) => Extension::Found(FunctionTable::new(f.arity(), a.size(), map)?),
        SearchStatus::Unsat => Extension::Unsat,
        SearchStatus::Exhausted => Extension::Exhausted,
    };
    Ok(ExtensionOutcome {
        status,
        stats: out.stats,
    })
}

/// Like [`extendable`], after removing duplicate columns of `f`'s domain matrix.
pub fn extendable_reduced(a: &FiniteStructure, f: &PartialOpMap, limits: SearchLimits) -> Result<ExtensionOutcome> {
    let (g, _) = reduce_columns(f)?;
    extendable(a, &g, limits)
}

/// Searches for an extension of `f` to the substructure of `A^k` induced on
/// `dom f` plus `extra`. `Unsat` here implies `f` has no total extension,
/// since every polymorphism restricts to that substructure.
pub fn extendable_within(
    a: &FiniteStructure,
    f: &PartialOpMap,
    extra: &[Vec<usize>],
    limits: SearchLimits,
) -> Result<SearchOutcome> {
    if let Some(v) = is_partial_polymorphism(a, f)? {
        return Err(Error::NotPartialPolymorphism {
            symbol: v.symbol,
            rows: v.rows,
        });
    }
    let p = power(a, f.arity())?;
    let mut support: Vec<usize> = f.rows().iter().map(|r| p.encode(r)).collect();
    for t in extra {
        if t.len() != f.arity() || t.iter().any(|&e| e >= a.size()) {
            return Err(Error::InvalidArgument(format!(
                "support tuple {t:?} is not in A^{}",
                f.arity()
            )));
        }
        support.push(p.encode(t));
    }
    support.sort_unstable();
    support.dedup();
    let induced = induced_substructure(&p, &support)?;
    let pins: Vec<(usize, usize)> = f
        .entries()
        .map(|(args, v)| {
            let e = p.encode(args);
            (support.binary_search(&e).expect("row in support"), v)
        })
        .collect();
    solve(&ExtensionProblem::new(&induced.structure, a).pins(&pins).limits(limits))
}

/// The near-unanimity map on every `r`-tuple with at most one deviant coordinate.
pub fn canonical_partial_nu(a: &FiniteStructure, r: usize) -> Result<PartialOpMap> {
    if r < 3 {
        return Err(Error::InvalidArgument(format!(
            "near-unanimity arity must be at least 3, got {r}"
        )));
    }
    let n = a.size();
    let mut f = PartialOpMap::new(r, n)?;
    for x in 0..n {
        f.insert(vec![x; r], x)?;
        for i in 0..r {
            for y in (0..n).filter(|&y| y != x) {
                let mut t = vec![x; r];
                t[i] = y;
                f.insert(t, x)?;
            }
        }
    }
    if let Some(v) = is_partial_polymorphism(a, &f)? {
        return Err(Error::NotPartialPolymorphism {
            symbol: v.symbol,
            rows: v.rows,
        });
    }
    Ok(f)
}

pub fn find_nu_polymorphism(a: &FiniteStructure, r: usize, limits: SearchLimits) -> Result<ExtensionOutcome> {
    extendable(a, &canonical_partial_nu(a, r)?, limits)
}

/// True when `g` satisfies the near-unanimity identities.
pub fn is_near_unanimity(g: &FunctionTable) -> bool {
    let (r, n) = (g.arity(), g.carrier());
    (0..n).all(|x| {
        (0..r).all(|i| {
            (0..n).all(|y| {
                let mut t = vec![x; r];
                t[i] = y;
                g.eval(&t) == x
            })
        })
    })
}

/// Checks that a total operation preserves every relation.
pub fn is_polymorphism(a: &FiniteStructure, g: &FunctionTable) -> Result<bool> {
    let p = power(a, g.arity())?;
    Ok(crate::engine::check_is_homomorphism(&p, a, g.table())?.is_none())
}

pub(crate) fn visit_tuples_through(
    a: &dyn crate::model::RelSource,
    rel: usize,
    x: usize,
    visit: &mut dyn FnMut(&[usize]),
) {
    let arity = a.signature().arity(rel);
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for pos in 0..arity {
        let _ = a.for_each_tuple_through(rel, pos, x, &mut |t| {
            // a tuple through `x` at several positions is reported once
            if t[..pos].contains(&x) {
                return ControlFlow::Continue(());
            }
            seen.push(t.to_vec());
            ControlFlow::Continue(())
        });
    }
    for t in &seen {
        visit(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_structure, RawStructure};

    pub(crate) fn c2() -> FiniteStructure {
        validate_structure(&RawStructure::new("C2", 2).relation("le", 2, [vec![0, 0], vec![0, 1], vec![1, 1]])).unwrap()
    }

    pub(crate) fn bowtie() -> FiniteStructure {
        let mut le: Vec<Vec<usize>> = (0..4).map(|x| vec![x, x]).collect();
        for lo in [0, 1] {
            for hi in [2, 3] {
                le.push(vec![lo, hi]);
            }
        }
        validate_structure(&RawStructure::new("bowtie", 4).relation("le", 2, le)).unwrap()
    }

    fn op(k: usize, n: usize, entries: &[(&[usize], usize)]) -> PartialOpMap {
        PartialOpMap::from_entries(k, n, entries.iter().map(|(a, v)| (a.to_vec(), *v))).unwrap()
    }

    #[test]
    fn partial_polymorphism_examples() {
        let a = c2();
        assert!(is_partial_polymorphism(&a, &op(1, 2, &[(&[0], 1)])).unwrap().is_none());
        let v = is_partial_polymorphism(&a, &op(1, 2, &[(&[0], 1), (&[1], 0)]))
            .unwrap()
            .unwrap();
        assert_eq!(v.rows, vec![vec![0], vec![1]]);
        assert_eq!(v.image, vec![1, 0]);
        let f = op(2, 2, &[(&[0, 1], 0), (&[1, 0], 1)]);
        assert!(is_partial_polymorphism(&a, &f).unwrap().is_none());
    }

    #[test]
    fn extension_examples() {
        let a = c2();
        let f = op(2, 2, &[(&[0, 1], 0), (&[1, 0], 1)]);
        assert!(matches!(
            extendable(&a, &f, SearchLimits::default()).unwrap().status,
            Extension::Found(_)
        ));
        let b = bowtie();
        let f = op(1, 4, &[(&[0], 2), (&[1], 3)]);
        assert_eq!(
            extendable(&b, &f, SearchLimits::default()).unwrap().status,
            Extension::Unsat
        );
        let bad = op(1, 2, &[(&[0], 1), (&[1], 0)]);
        assert!(extendable(&a, &bad, SearchLimits::default()).is_err());
    }

    #[test]
    fn canonical_nu_sizes() {
        let a = c2();
        assert_eq!(canonical_partial_nu(&a, 3).unwrap().len(), 8);
        let three = validate_structure(&RawStructure::new("E3", 3)).unwrap();
        assert_eq!(canonical_partial_nu(&three, 3).unwrap().len(), 3 + 3 * 2 * 3);
        let one = validate_structure(&RawStructure::new("pt", 1)).unwrap();
        assert_eq!(canonical_partial_nu(&one, 3).unwrap().len(), 1);
        assert!(canonical_partial_nu(&a, 2).is_err());
    }

    #[test]
    fn nu_found_for_chain_is_majority() {
        let a = c2();
        let Extension::Found(g) = find_nu_polymorphism(&a, 3, SearchLimits::default()).unwrap().status else {
            panic!()
        };
        assert!(is_near_unanimity(&g));
        assert!(is_polymorphism(&a, &g).unwrap());
    }
}
