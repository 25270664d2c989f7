//! The finite Pol/Inv Galois connection.
//!
//! For a finite structure `A` and a relation `τ ⊆ A^m`, the Γ-closure of `τ`
//! is the set of tuples `b` such that the map sending the rows of `τ`'s
//! matrix to the entries of `b` extends to a polymorphism; it is the least
//! relation containing `τ` that all polymorphisms preserve, which on a finite
//! carrier is also the least pp-definable one. The quantifier-free type
//! closure is the cheap superset cut out by atomic formulas alone.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::engine::{enumerate_solutions, EnumerationEnd, ExtensionProblem, SearchLimits};
use crate::error::{Error, Result};
use crate::homogeneity::decide::{scan_column_sets, BpCounts, DecideOptions, Pool, ScanEnd, Stage};
use crate::homogeneity::{extendable, Extension};
use crate::model::relset::{decode_tuple, tuple_count};
use crate::model::{power, FiniteStructure, FunctionTable, PartialOpMap, RelationSet, MATERIALIZE_LIMIT};

/// Conventions the theory leaves open, each reversible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    /// Equality is an atomic formula, so identical coordinates force equal entries.
    pub equality_atoms: bool,
    /// The empty relation counts as pp-definable and as invariant.
    pub empty_definable: bool,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            equality_atoms: true,
            empty_definable: true,
        }
    }
}

/// All `m`-ary relations of one family, e.g. the invariant relations of a set of operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFamily {
    pub arity: usize,
    pub members: BTreeSet<RelationSet>,
}

impl RelationFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, r: &RelationSet) -> bool {
        self.members.contains(r)
    }

    pub fn is_subset(&self, other: &RelationFamily) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// The elements of `A^m` in encoding order.
pub(crate) struct PowerIndex {
    tuples: Vec<Vec<usize>>,
}

impl PowerIndex {
    pub(crate) fn new(n: usize, m: usize) -> Result<Self> {
        let count = tuple_count(m, n)?;
        if count > MATERIALIZE_LIMIT {
            return Err(Error::TooLarge {
                what: "A^m",
                size: count,
                limit: MATERIALIZE_LIMIT,
            });
        }
        Ok(PowerIndex {
            tuples: (0..count).map(|i| decode_tuple(i, m, n)).collect(),
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.tuples.len()
    }

    pub(crate) fn tuple(&self, i: usize) -> &[usize] {
        &self.tuples[i]
    }
}

/// One atomic formula over coordinate positions: `ρ(x_{p_1}, …, x_{p_r})`.
struct Atom {
    rel: usize,
    positions: Vec<usize>,
    /// Largest position, the point at which the atom becomes checkable.
    last: usize,
}

/// The atoms (and equalities) holding on every tuple of `tau`.
fn binding_atoms(a: &FiniteStructure, m: usize, tau: &[&[usize]], equality: bool) -> (Vec<Atom>, Vec<(usize, usize)>) {
    let sig = a.signature();
    let mut atoms = Vec::new();
    for rel in 0..sig.len() {
        let relation = a.relation(rel);
        if relation.is_full() {
            continue;
        }
        let r = sig.arity(rel);
        let Ok(count) = tuple_count(r, m) else { continue };
        for sel in 0..count {
            let positions = decode_tuple(sel, r, m);
            let holds = tau.iter().all(|t| {
                let image: Vec<usize> = positions.iter().map(|&p| t[p]).collect();
                relation.contains(&image)
            });
            if holds {
                let last = *positions.iter().max().expect("arity at least 1");
                atoms.push(Atom { rel, positions, last });
            }
        }
    }
    let mut equalities = Vec::new();
    if equality {
        for i in 0..m {
            for j in 0..i {
                if tau.iter().all(|t| t[i] == t[j]) {
                    equalities.push((j, i));
                }
            }
        }
    }
    (atoms, equalities)
}

/// Enumerates `A^m` depth-first, pruning on atoms whose positions are all assigned.
fn realize(
    a: &FiniteStructure,
    m: usize,
    atoms: &[Atom],
    equalities: &[(usize, usize)],
    visit: &mut dyn FnMut(&[usize]),
) {
    let n = a.size();
    let mut b = vec![0usize; m];
    let mut image = Vec::new();
    let mut depth = 0usize;
    let mut started = vec![false; m];
    loop {
        if started[depth] {
            b[depth] += 1;
        } else {
            started[depth] = true;
            b[depth] = 0;
        }
        if b[depth] == n {
            started[depth] = false;
            if depth == 0 {
                return;
            }
            depth -= 1;
            continue;
        }
        let ok = equalities.iter().all(|&(j, i)| i != depth || b[i] == b[j])
            && atoms.iter().filter(|at| at.last == depth).all(|at| {
                image.clear();
                image.extend(at.positions.iter().map(|&p| b[p]));
                a.contains(at.rel, &image)
            });
        if !ok {
            continue;
        }
        if depth + 1 == m {
            visit(&b);
        } else {
            depth += 1;
        }
    }
}

/// Tuples satisfying every atomic formula that holds throughout `tau`.
pub fn qf_type_closure(a: &FiniteStructure, tau: &RelationSet) -> Result<RelationSet> {
    qf_type_closure_with(a, tau, Conventions::default())
}

pub fn qf_type_closure_with(a: &FiniteStructure, tau: &RelationSet, conventions: Conventions) -> Result<RelationSet> {
    check_relation(a, tau)?;
    if tau.is_empty() {
        return Err(Error::InvalidArgument("type closure of the empty relation".into()));
    }
    let m = tau.arity();
    tuple_count(m, a.size()).and_then(|c| {
        if c > MATERIALIZE_LIMIT {
            Err(Error::TooLarge {
                what: "A^m",
                size: c,
                limit: MATERIALIZE_LIMIT,
            })
        } else {
            Ok(c)
        }
    })?;
    let rows: Vec<&[usize]> = tau.iter().map(|t| t.as_slice()).collect();
    let (atoms, equalities) = binding_atoms(a, m, &rows, conventions.equality_atoms);
    let mut out = RelationSet::empty(m, a.size())?;
    realize(a, m, &atoms, &equalities, &mut |b| {
        out.insert(b.to_vec()).expect("in range");
    });
    Ok(out)
}

/// Mask form over a small [`PowerIndex`]; `cols` are indices of `τ`'s tuples.
pub(crate) fn qf_type_closure_mask(a: &FiniteStructure, index: &PowerIndex, cols: &[usize], equality: bool) -> u32 {
    let m = index.tuple(0).len();
    let rows: Vec<&[usize]> = cols.iter().map(|&c| index.tuple(c)).collect();
    let (atoms, equalities) = binding_atoms(a, m, &rows, equality);
    let mut mask = 0u32;
    let n = a.size();
    realize(a, m, &atoms, &equalities, &mut |b| {
        let i = b.iter().fold(0, |acc, &e| acc * n + e);
        mask |= 1 << i;
    });
    mask
}

fn check_relation(a: &FiniteStructure, tau: &RelationSet) -> Result<()> {
    if tau.carrier() != a.size() {
        return Err(Error::InvalidArgument(format!(
            "relation is over {} points, structure has {}",
            tau.carrier(),
            a.size()
        )));
    }
    Ok(())
}

/// The local map sending row `i` of `τ`'s matrix to `b_i`, or `None` when two
/// equal rows would need different values.
pub fn column_map(tau: &RelationSet, b: &[usize]) -> Result<Option<PartialOpMap>> {
    let cols: Vec<&Vec<usize>> = tau.iter().collect();
    let mut f = PartialOpMap::new(cols.len(), tau.carrier())?;
    for (i, &bi) in b.iter().enumerate() {
        let row: Vec<usize> = cols.iter().map(|c| c[i]).collect();
        if f.get(&row).is_some_and(|v| v != bi) {
            return Ok(None);
        }
        f.insert(row, bi)?;
    }
    Ok(Some(f))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GammaOutcome {
    Closed {
        relation: RelationSet,
    },
    /// The extension search for `b` ran out of budget.
    Inconclusive {
        b: Vec<usize>,
    },
}

/// Γ-closure by one extension search per candidate of the type closure.
pub fn gamma_closure(a: &FiniteStructure, tau: &RelationSet, limits: SearchLimits) -> Result<GammaOutcome> {
    gamma_closure_with(a, tau, limits, Conventions::default())
}

pub fn gamma_closure_with(
    a: &FiniteStructure,
    tau: &RelationSet,
    limits: SearchLimits,
    conventions: Conventions,
) -> Result<GammaOutcome> {
    let candidates = qf_type_closure_with(a, tau, conventions)?;
    let mut out = RelationSet::empty(tau.arity(), a.size())?;
    let mut found: Vec<FunctionTable> = Vec::new();
    for b in candidates.iter() {
        if tau.contains(b) || out.contains(b) {
            out.insert(b.clone())?;
            continue;
        }
        let Some(f) = column_map(tau, b)? else { continue };
        // every polymorphism found also reaches the images of τ it produces
        if found.iter().any(|g| g.extends(&f)) {
            out.insert(b.clone())?;
            continue;
        }
        match extendable(a, &f, limits)?.status {
            Extension::Found(g) => {
                out.insert(b.clone())?;
                found.push(g);
            }
            Extension::Unsat => {}
            Extension::Exhausted => return Ok(GammaOutcome::Inconclusive { b: b.clone() }),
        }
    }
    for t in tau.iter() {
        out.insert(t.clone())?;
    }
    Ok(GammaOutcome::Closed { relation: out })
}

/// Γ-closure as the images of `τ`'s rows under every `|τ|`-ary polymorphism.
pub fn gamma_closure_by_polymorphisms(
    a: &FiniteStructure,
    tau: &RelationSet,
    cap: usize,
) -> Result<Option<RelationSet>> {
    check_relation(a, tau)?;
    let list = enumerate_polymorphisms(a, tau.len(), cap)?;
    if list.end != EnumerationEnd::Complete {
        return Ok(None);
    }
    let cols: Vec<&Vec<usize>> = tau.iter().collect();
    let rows: Vec<Vec<usize>> = (0..tau.arity()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let mut out = RelationSet::empty(tau.arity(), a.size())?;
    for g in &list.tables {
        out.insert(rows.iter().map(|r| g.eval(r)).collect())?;
    }
    Ok(Some(out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolymorphismList {
    pub arity: usize,
    pub tables: Vec<FunctionTable>,
    pub end: EnumerationEnd,
}

/// The `k`-ary polymorphisms in search order, at most `cap` of them.
pub fn enumerate_polymorphisms(a: &FiniteStructure, k: usize, cap: usize) -> Result<PolymorphismList> {
    let p = power(a, k)?;
    if p.size() > MATERIALIZE_LIMIT {
        return Err(Error::TooLarge {
            what: "polymorphism table",
            size: p.size(),
            limit: MATERIALIZE_LIMIT,
        });
    }
    let limits = SearchLimits::default().with_nodes(u64::MAX);
    let e = enumerate_solutions(&ExtensionProblem::new(&p, a).limits(limits), cap)?;
    let tables = e
        .solutions
        .into_iter()
        .map(|t| FunctionTable::new(k, a.size(), t))
        .collect::<Result<_>>()?;
    Ok(PolymorphismList {
        arity: k,
        tables,
        end: e.end,
    })
}

/// Every polymorphism of arity `1..=k`; `None` if some arity exceeds `cap`.
pub fn polymorphisms_up_to(a: &FiniteStructure, k: usize, cap: usize) -> Result<Option<Vec<FunctionTable>>> {
    let mut all = Vec::new();
    for j in 1..=k {
        let list = enumerate_polymorphisms(a, j, cap)?;
        if list.end != EnumerationEnd::Complete {
            return Ok(None);
        }
        all.extend(list.tables);
    }
    Ok(Some(all))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum PpAnswer {
    Yes,
    /// `witness` lies in the Γ-closure but not in the relation; absent for the
    /// empty relation when it is not treated as definable.
    No {
        witness: Option<Vec<usize>>,
    },
    Inconclusive {
        b: Vec<usize>,
    },
}

pub fn is_pp_definable(a: &FiniteStructure, sigma: &RelationSet, limits: SearchLimits) -> Result<PpAnswer> {
    is_pp_definable_with(a, sigma, limits, Conventions::default())
}

pub fn is_pp_definable_with(
    a: &FiniteStructure,
    sigma: &RelationSet,
    limits: SearchLimits,
    conventions: Conventions,
) -> Result<PpAnswer> {
    check_relation(a, sigma)?;
    if sigma.is_empty() {
        return Ok(if conventions.empty_definable {
            PpAnswer::Yes
        } else {
            PpAnswer::No { witness: None }
        });
    }
    Ok(match gamma_closure_with(a, sigma, limits, conventions)? {
        GammaOutcome::Inconclusive { b } => PpAnswer::Inconclusive { b },
        GammaOutcome::Closed { relation } => match relation.iter().find(|b| !sigma.contains(b)) {
            None => PpAnswer::Yes,
            Some(b) => PpAnswer::No {
                witness: Some(b.clone()),
            },
        },
    })
}

/// How [`invariant_relations`] covers `A^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvMode {
    /// Every closed subset; needs `n^m ≤ 24`.
    Exhaustive,
    /// The closed subsets generated by the given seeds.
    Generated(Vec<RelationSet>),
}

/// Largest `n^m` for exhaustive invariant-relation enumeration.
pub const INV_EXHAUSTIVE_LIMIT: usize = 24;

/// The `m`-ary relations on `0..n` preserved by every operation of `ops`,
/// i.e. the subuniverses of the algebra `(A, ops)^m`.
pub fn invariant_relations(
    ops: &[FunctionTable],
    n: usize,
    m: usize,
    mode: &InvMode,
    conventions: Conventions,
) -> Result<RelationFamily> {
    if let Some(g) = ops.iter().find(|g| g.carrier() != n) {
        return Err(Error::InvalidArgument(format!(
            "operation over {} points, expected {n}",
            g.carrier()
        )));
    }
    let index = PowerIndex::new(n, m)?;
    let mut members = BTreeSet::new();
    let to_set = |mask: u64| -> Result<RelationSet> {
        RelationSet::new(
            m,
            n,
            (0..index.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| index.tuple(i).to_vec()),
        )
    };
    match mode {
        InvMode::Exhaustive => {
            if index.len() > INV_EXHAUSTIVE_LIMIT {
                return Err(Error::TooLarge {
                    what: "exhaustive invariant enumeration over A^m",
                    size: index.len(),
                    limit: INV_EXHAUSTIVE_LIMIT,
                });
            }
            let closure = |s: u64| subuniverse_mask(ops, &index, n, s);
            for mask in next_closure_all(index.len(), &closure) {
                members.insert(to_set(mask)?);
            }
        }
        InvMode::Generated(seeds) => {
            if index.len() > 64 {
                return Err(Error::TooLarge {
                    what: "generated invariant closure over A^m",
                    size: index.len(),
                    limit: 64,
                });
            }
            for seed in seeds {
                if seed.arity() != m || seed.carrier() != n {
                    return Err(Error::InvalidArgument("seed of the wrong shape".into()));
                }
                let mask = seed
                    .iter()
                    .fold(0u64, |acc, t| acc | 1 << t.iter().fold(0, |x, &e| x * n + e));
                members.insert(to_set(subuniverse_mask(ops, &index, n, mask))?);
            }
        }
    }
    if !conventions.empty_definable {
        members.retain(|r| !r.is_empty());
    }
    Ok(RelationFamily { arity: m, members })
}

/// Closes a set of `m`-tuples under coordinatewise application of `ops`.
fn subuniverse_mask(ops: &[FunctionTable], index: &PowerIndex, n: usize, mut set: u64) -> u64 {
    let m = index.tuple(0).len();
    loop {
        let before = set;
        let members: Vec<usize> = (0..index.len()).filter(|&i| set >> i & 1 == 1).collect();
        if members.is_empty() {
            return set;
        }
        for g in ops {
            let k = g.arity();
            let mut pick = vec![0usize; k];
            let mut args = vec![0usize; k];
            'tuples: loop {
                let mut out = 0usize;
                for i in 0..m {
                    for (slot, &p) in args.iter_mut().zip(&pick) {
                        *slot = index.tuple(members[p])[i];
                    }
                    out = out * n + g.eval(&args);
                }
                set |= 1 << out;
                let mut j = k;
                loop {
                    if j == 0 {
                        break 'tuples;
                    }
                    j -= 1;
                    pick[j] += 1;
                    if pick[j] < members.len() {
                        break;
                    }
                    pick[j] = 0;
                }
            }
        }
        if set == before {
            return set;
        }
    }
}

/// All closed sets of a closure operator on `0..size`, in lectic order.
fn next_closure_all(size: usize, closure: &dyn Fn(u64) -> u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut current = closure(0);
    out.push(current);
    let full = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
    while current != full {
        let mut next = None;
        // lower indices are more significant
        for i in (0..size).rev() {
            if current >> i & 1 == 1 {
                continue;
            }
            let below = (1u64 << i) - 1;
            let candidate = closure((current & below) | 1 << i);
            if (candidate & !current) & below == 0 {
                next = Some(candidate);
                break;
            }
        }
        match next {
            Some(c) => {
                current = c;
                out.push(c);
            }
            None => break,
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PolylocalOutcome {
    Holds,
    /// `b` is in the type closure of `tau` but not in its Γ-closure.
    Fails {
        tau: Vec<Vec<usize>>,
        b: Vec<usize>,
        map: PartialOpMap,
    },
    Inconclusive {
        tau: Vec<Vec<usize>>,
        b: Vec<usize>,
    },
}

/// Whether Γ-closure and type closure agree on every nonempty `τ ⊆ A^m`.
pub fn check_finite_polylocal(a: &FiniteStructure, m: usize, limits: SearchLimits) -> Result<PolylocalOutcome> {
    if m == 0 {
        return Err(Error::InvalidArgument("arity must be at least 1".into()));
    }
    let options = DecideOptions {
        limits,
        shortcuts: true,
    };
    let mut counts = BpCounts::default();
    let mut stats = Default::default();
    let end = scan_column_sets(a, m, options, &mut Pool::default(), &mut counts, &mut stats)?;
    let split = |stage: Stage| match stage {
        Stage::BakerPixley { tau, b, .. } => (tau, b),
        _ => unreachable!("column scans report column-set stages"),
    };
    Ok(match end {
        ScanEnd::Holds => PolylocalOutcome::Holds,
        ScanEnd::Fails { stage, map, .. } => {
            let (tau, b) = split(stage);
            PolylocalOutcome::Fails { tau, b, map }
        }
        ScanEnd::Exhausted { stage } => {
            let (tau, b) = split(stage);
            PolylocalOutcome::Inconclusive { tau, b }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvPolReport {
    pub m: usize,
    pub k: usize,
    /// Number of invariant relations of `Pol^(≤j)` for `j = 1..=k`.
    pub inv_sizes: Vec<usize>,
    /// Least `j` from which the invariant family no longer shrinks up to `k`.
    pub k_star: usize,
    pub invariant: RelationFamily,
    pub gamma_closed: RelationFamily,
    pub gamma_subset_of_invariant: bool,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CrossCheck {
    Done(InvPolReport),
    Inconclusive { reason: String },
}

/// Compares `Inv(Pol^(≤k)(A))` with the Γ-closed relations, both of arity `m`.
pub fn cross_check_inv_pol(a: &FiniteStructure, m: usize, k: usize, limits: SearchLimits) -> Result<CrossCheck> {
    const POL_CAP: usize = 1 << 20;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "polymorphism arity bound must be at least 1".into(),
        ));
    }
    let conventions = Conventions::default();
    let n = a.size();
    let mut families = Vec::with_capacity(k);
    for j in 1..=k {
        let Some(ops) = polymorphisms_up_to(a, j, POL_CAP)? else {
            return Ok(CrossCheck::Inconclusive {
                reason: format!("more than {POL_CAP} polymorphisms of arity ≤ {j}"),
            });
        };
        families.push(invariant_relations(&ops, n, m, &InvMode::Exhaustive, conventions)?);
    }
    let invariant = families.last().expect("k ≥ 1").clone();
    let k_star = families.iter().position(|f| *f == invariant).expect("present") + 1;

    let index = PowerIndex::new(n, m)?;
    if index.len() > INV_EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            what: "Γ-closed family over A^m",
            size: index.len(),
            limit: INV_EXHAUSTIVE_LIMIT,
        });
    }
    // the Γ-closed sets are exactly the Γ-closures, found by the same lectic walk
    let mut failure = None;
    let gamma = |mask: u64| -> u64 {
        if mask == 0 || failure.is_some() {
            return mask;
        }
        let tau = RelationSet::new(
            m,
            n,
            (0..index.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| index.tuple(i).to_vec()),
        )
        .expect("in range");
        match gamma_closure_with(a, &tau, limits, conventions) {
            Ok(GammaOutcome::Closed { relation }) => relation
                .iter()
                .fold(0u64, |acc, t| acc | 1 << t.iter().fold(0, |x, &e| x * n + e)),
            _ => {
                failure = Some(tau);
                mask
            }
        }
    };
    let closed = {
        let cell = std::cell::RefCell::new(gamma);
        next_closure_all(index.len(), &|s| (cell.borrow_mut())(s))
    };
    if let Some(tau) = failure {
        return Ok(CrossCheck::Inconclusive {
            reason: format!("Γ-closure of {:?} did not finish", tau.iter().collect::<Vec<_>>()),
        });
    }
    let mut members = BTreeSet::new();
    for mask in closed {
        if mask == 0 && !conventions.empty_definable {
            continue;
        }
        members.insert(RelationSet::new(
            m,
            n,
            (0..index.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| index.tuple(i).to_vec()),
        )?);
    }
    let gamma_closed = RelationFamily { arity: m, members };
    Ok(CrossCheck::Done(InvPolReport {
        m,
        k,
        inv_sizes: families.iter().map(|f| f.len()).collect(),
        k_star,
        gamma_subset_of_invariant: gamma_closed.is_subset(&invariant),
        equal: gamma_closed == invariant,
        invariant,
        gamma_closed,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_structure, RawStructure};

    fn c2() -> FiniteStructure {
        validate_structure(&RawStructure::new("C2", 2).relation("le", 2, [vec![0, 0], vec![0, 1], vec![1, 1]])).unwrap()
    }

    fn k2() -> FiniteStructure {
        validate_structure(&RawStructure::new("K2", 2).relation("edge", 2, [vec![0, 1], vec![1, 0]])).unwrap()
    }

    fn rel(m: usize, n: usize, tuples: &[&[usize]]) -> RelationSet {
        RelationSet::new(m, n, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    #[test]
    fn type_closures() {
        let tau = rel(2, 2, &[&[0, 1]]);
        assert_eq!(
            qf_type_closure(&c2(), &tau).unwrap(),
            rel(2, 2, &[&[0, 0], &[0, 1], &[1, 1]])
        );
        assert_eq!(qf_type_closure(&k2(), &tau).unwrap(), rel(2, 2, &[&[0, 1], &[1, 0]]));
        let full = RelationSet::full(2, 2).unwrap();
        assert_eq!(qf_type_closure(&c2(), &full).unwrap(), full);
    }

    #[test]
    fn gamma_examples() {
        let tau = rel(2, 2, &[&[0, 1]]);
        let closed = |a: &FiniteStructure, t: &RelationSet| match gamma_closure(a, t, SearchLimits::default()).unwrap()
        {
            GammaOutcome::Closed { relation } => relation,
            other => panic!("{other:?}"),
        };
        assert_eq!(closed(&c2(), &tau), rel(2, 2, &[&[0, 0], &[0, 1], &[1, 1]]));
        assert_eq!(closed(&k2(), &tau), rel(2, 2, &[&[0, 1], &[1, 0]]));
        assert_eq!(closed(&c2(), &rel(2, 2, &[&[0, 0]])), rel(2, 2, &[&[0, 0], &[1, 1]]));
    }

    #[test]
    fn pp_examples() {
        let a = c2();
        let lim = SearchLimits::default();
        assert_eq!(
            is_pp_definable(&a, &rel(2, 2, &[&[0, 0], &[0, 1], &[1, 1]]), lim).unwrap(),
            PpAnswer::Yes
        );
        let PpAnswer::No { witness } = is_pp_definable(&a, &rel(2, 2, &[&[1, 0]]), lim).unwrap() else {
            panic!()
        };
        assert_eq!(witness, Some(vec![0, 0]));
        assert_eq!(
            is_pp_definable(&a, &RelationSet::diagonal(2, 2).unwrap(), lim).unwrap(),
            PpAnswer::Yes
        );
        assert_eq!(
            is_pp_definable(&a, &RelationSet::empty(2, 2).unwrap(), lim).unwrap(),
            PpAnswer::Yes
        );
    }

    #[test]
    fn polymorphism_counts() {
        assert_eq!(enumerate_polymorphisms(&c2(), 1, 100).unwrap().tables.len(), 3);
        assert_eq!(enumerate_polymorphisms(&c2(), 2, 100).unwrap().tables.len(), 6);
        let e2 = validate_structure(&RawStructure::new("E2", 2).relation("edge", 2, [])).unwrap();
        assert_eq!(enumerate_polymorphisms(&e2, 2, 100).unwrap().tables.len(), 16);
        let capped = enumerate_polymorphisms(&e2, 2, 5).unwrap();
        assert_eq!(capped.end, EnumerationEnd::CapReached);
    }

    #[test]
    fn invariant_relation_examples() {
        let c = Conventions::default();
        let all_unary: Vec<FunctionTable> = (0..4)
            .map(|i| FunctionTable::new(1, 2, vec![i / 2, i % 2]).unwrap())
            .collect();
        let fam = invariant_relations(&all_unary, 2, 1, &InvMode::Exhaustive, c).unwrap();
        assert_eq!(fam.len(), 2);
        let fam = invariant_relations(&[], 3, 1, &InvMode::Exhaustive, c).unwrap();
        assert_eq!(fam.len(), 8);
        let pol = polymorphisms_up_to(&c2(), 2, 100).unwrap().unwrap();
        let fam = invariant_relations(&pol, 2, 2, &InvMode::Exhaustive, c).unwrap();
        assert!(fam.contains(&rel(2, 2, &[&[0, 0], &[0, 1], &[1, 1]])));
        assert!(fam.contains(&RelationSet::diagonal(2, 2).unwrap()));
        assert!(fam.contains(&RelationSet::empty(2, 2).unwrap()));
        assert!(fam.contains(&RelationSet::full(2, 2).unwrap()));
        assert!(!fam.contains(&rel(2, 2, &[&[1, 0]])));
    }

    #[test]
    fn next_closure_lists_every_subset_without_constraints() {
        let all = next_closure_all(4, &|s| s);
        assert_eq!(all.len(), 16);
        let set: BTreeSet<u64> = all.into_iter().collect();
        assert_eq!(set.len(), 16);
    }

    #[test]
    fn chain_cross_check() {
        let CrossCheck::Done(r) = cross_check_inv_pol(&c2(), 2, 2, SearchLimits::default()).unwrap() else {
            panic!()
        };
        assert!(r.equal && r.gamma_subset_of_invariant);
    }

    #[test]
    fn polylocality() {
        assert_eq!(
            check_finite_polylocal(&c2(), 2, SearchLimits::default()).unwrap(),
            PolylocalOutcome::Holds
        );
    }
}
