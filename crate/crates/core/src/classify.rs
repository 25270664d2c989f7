//! Family-specific PH classification of finite graphs, posets, strict posets
//! and meet-complete lattices of equivalence relations.
//!
//! The finite cases of the classification theorems:
//! a graph is PH iff it is edgeless or a disjoint union of copies of `K2`;
//! a poset iff it is an antichain or a lattice; a strict poset iff it is an
//! antichain; a meet-complete lattice of equivalences iff it is arithmetical.
//! Refuted instances carry a verified non-extendable local polymorphism
//! whenever a bounded search finds one.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::engine::{SearchLimits, SearchStatus};
use crate::error::{Error, Result};
use crate::homogeneity::{decide_ph, extendable, extendable_within, is_k_ph, Extension, KphOutcome, PhStatus};
use crate::model::families::partitions_of;
use crate::model::{verify_family, Family, FiniteStructure, PartialOpMap, Partition};

/// Node budget for the witness searches run during classification.
pub const WITNESS_NODE_BUDGET: u64 = 1_000_000;

/// One named predicate and its outcome, with an element tuple where one exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reason {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Reason {
    fn new(name: &str, holds: bool, witness: Option<Vec<usize>>) -> Self {
        Reason {
            name: name.to_string(),
            holds,
            witness,
        }
    }
}

/// Where the non-extendability of a witness map was refuted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "over", rename_all = "snake_case")]
pub enum RefutedOn {
    /// The full power `A^k`.
    Power,
    /// The substructure of `A^k` on the map's domain plus these points.
    Support { extra: Vec<Vec<usize>> },
}

/// A partial polymorphism shown to have no total extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub map: PartialOpMap,
    pub refuted_on: RefutedOn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub family: Family,
    /// Never `Inconclusive`.
    pub verdict: PhStatus,
    pub reasons: Vec<Reason>,
    /// Connected components, for graphs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<usize>>>,
    pub witness: Option<Witness>,
}

impl ClassReport {
    pub fn reason(&self, name: &str) -> Option<&Reason> {
        self.reasons.iter().find(|r| r.name == name)
    }
}

fn witness_limits() -> SearchLimits {
    SearchLimits::default().with_nodes(WITNESS_NODE_BUDGET)
}

/// Re-checks a witness: it must be a partial polymorphism with an `Unsat` extension search.
pub fn verify_witness(a: &FiniteStructure, w: &Witness, limits: SearchLimits) -> Result<bool> {
    Ok(match &w.refuted_on {
        RefutedOn::Power => extendable(a, &w.map, limits)?.status == Extension::Unsat,
        RefutedOn::Support { extra } => extendable_within(a, &w.map, extra, limits)?.status == SearchStatus::Unsat,
    })
}

/// The first bounded one-point refutation at arity 1, then 2.
fn searched_witness(a: &FiniteStructure) -> Result<Option<Witness>> {
    for k in 1..=2 {
        if let KphOutcome::Counterexample { map, .. } = is_k_ph(a, k, witness_limits())? {
            return Ok(Some(Witness {
                map,
                refuted_on: RefutedOn::Power,
            }));
        }
    }
    Ok(None)
}

fn binary_matrix(a: &FiniteStructure) -> Vec<Vec<bool>> {
    let n = a.size();
    let mut m = vec![vec![false; n]; n];
    for t in a.relation(0).tuples() {
        m[t[0]][t[1]] = true;
    }
    m
}

// ---------------------------------------------------------------- graphs

/// First `(a, b, c)` with `a ~ b ~ c` and `a ≠ c`, i.e. a failure of property (⋆).
fn star_violation(adj: &[Vec<bool>]) -> Option<[usize; 3]> {
    for (a, row) in adj.iter().enumerate() {
        for (b, _) in row.iter().enumerate().filter(|(_, &e)| e) {
            if let Some(c) = (0..adj.len()).find(|&c| c != a && adj[b][c]) {
                return Some([a, b, c]);
            }
        }
    }
    None
}

fn components(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            for w in 0..n {
                if adj[v][w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn classify_graph(g: &FiniteStructure) -> Result<ClassReport> {
    verify_family(g, Family::Graph)?;
    let adj = binary_matrix(g);
    let edgeless = g.relation(0).is_empty();
    let comps = components(&adj);
    let non_k2 = comps.iter().find(|c| c.len() != 2).cloned();
    let k2_union = non_k2.is_none();
    let violation = star_violation(&adj);
    let ph = edgeless || k2_union;
    let reasons = vec![
        Reason::new("property_star", violation.is_none(), violation.map(|v| v.to_vec())),
        Reason::new("edgeless", edgeless, g.relation(0).tuples().first().cloned()),
        Reason::new("is_k2_union", k2_union, non_k2),
    ];
    let witness = if ph {
        None
    } else {
        match graph_star_witness(g)? {
            Some(star) => Some(star.witness),
            None => searched_witness(g)?,
        }
    };
    Ok(ClassReport {
        family: Family::Graph,
        verdict: if ph { PhStatus::Ph } else { PhStatus::NotPh },
        reasons,
        components: Some(comps),
        witness,
    })
}

/// A non-extendable local polymorphism built from an induced star in a power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarWitness {
    /// Number of leaves; the map has arity `k + 1`.
    pub k: usize,
    /// Path `a ~ b ~ c` with `a ≠ c`.
    pub path: [usize; 3],
    /// Vertices without a common neighbour, the images of the leaves.
    pub neighborless: Vec<usize>,
    /// The common neighbour `(b, …, b)` of the leaves.
    pub centre: Vec<usize>,
    pub witness: Witness,
}

/// Least vertex set (by size, then lexicographically) of at least two vertices
/// with no common neighbour.
fn neighborless_set(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = adj.len();
    for size in 2..=n {
        let mut set: Vec<usize> = (0..size).collect();
        loop {
            if !(0..n).any(|w| set.iter().all(|&v| adj[v][w])) {
                return Some(set);
            }
            // next combination in lexicographic order
            let Some(i) = (0..size).rev().find(|&i| set[i] < n - size + i) else {
                break;
            };
            set[i] += 1;
            for j in i + 1..size {
                set[j] = set[j - 1] + 1;
            }
        }
    }
    None
}

/// For a graph without property (⋆): leaves `(a,…,c at position i,…,a)` of an
/// induced star in `G^(k+1)` are sent to a set of `k` vertices with no common
/// neighbour, so the star's centre has nowhere to go.
pub fn graph_star_witness(g: &FiniteStructure) -> Result<Option<StarWitness>> {
    verify_family(g, Family::Graph)?;
    let adj = binary_matrix(g);
    let Some(path) = star_violation(&adj) else {
        return Ok(None);
    };
    let Some(neighborless) = neighborless_set(&adj) else {
        return Ok(None);
    };
    let [a, b, c] = path;
    let k = neighborless.len();
    let arity = k + 1;
    let mut map = PartialOpMap::new(arity, g.size())?;
    for (i, &v) in neighborless.iter().enumerate() {
        let mut leaf = vec![a; arity];
        leaf[i + 1] = c;
        map.insert(leaf, v)?;
    }
    let centre = vec![b; arity];
    let witness = Witness {
        map,
        refuted_on: RefutedOn::Support {
            extra: vec![centre.clone()],
        },
    };
    if !verify_witness(g, &witness, SearchLimits::default())? {
        return Err(Error::Internal("star witness failed verification".into()));
    }
    Ok(Some(StarWitness {
        k,
        path,
        neighborless,
        centre,
        witness,
    }))
}

// ---------------------------------------------------------------- posets

fn is_lattice(le: &[Vec<bool>]) -> (bool, Option<Vec<usize>>) {
    let n = le.len();
    let extreme = |x: usize, y: usize, upper: bool| -> bool {
        let bound = |z: usize| {
            if upper {
                le[x][z] && le[y][z]
            } else {
                le[z][x] && le[z][y]
            }
        };
        let bounds: Vec<usize> = (0..n).filter(|&z| bound(z)).collect();
        bounds
            .iter()
            .any(|&z| bounds.iter().all(|&w| if upper { le[z][w] } else { le[w][z] }))
    };
    for x in 0..n {
        for y in x + 1..n {
            if !extreme(x, y, true) || !extreme(x, y, false) {
                return (false, Some(vec![x, y]));
            }
        }
    }
    (true, None)
}

/// First `(a1, a2, a3, a4)` of distinct elements with `{a1,a2} ≤ {a3,a4}` and no midpoint.
fn x5_violation(le: &[Vec<bool>], strict: bool) -> Option<[usize; 4]> {
    let n = le.len();
    let below = |x: usize, y: usize| le[x][y] && (!strict || x != y);
    for a1 in 0..n {
        for a2 in 0..n {
            for a3 in 0..n {
                for a4 in 0..n {
                    let q = [a1, a2, a3, a4];
                    if (0..4).any(|i| (0..i).any(|j| q[i] == q[j])) {
                        continue;
                    }
                    if !(below(a1, a3) && below(a1, a4) && below(a2, a3) && below(a2, a4)) {
                        continue;
                    }
                    let mid = (0..n).any(|c| below(a1, c) && below(a2, c) && below(c, a3) && below(c, a4));
                    if !mid {
                        return Some(q);
                    }
                }
            }
        }
    }
    None
}

pub fn classify_poset(p: &FiniteStructure) -> Result<ClassReport> {
    verify_family(p, Family::Poset)?;
    let le = binary_matrix(p);
    let n = p.size();
    let comparable = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| x != y && le[x][y]);
    let antichain = comparable.is_none();
    let (lattice, lattice_witness) = is_lattice(&le);
    let x5 = x5_violation(&le, false);
    let min = (0..n).find(|&c| (0..n).all(|x| le[c][x]));
    let max = (0..n).find(|&d| (0..n).all(|x| le[x][d]));
    let bounded = min.is_some() && max.is_some();
    let reasons = vec![
        Reason::new("is_antichain", antichain, comparable.map(|(x, y)| vec![x, y])),
        Reason::new("is_lattice", lattice, lattice_witness),
        Reason::new("is_x5_dense", x5.is_none(), x5.map(|q| q.to_vec())),
        Reason::new(
            "locally_bounded",
            bounded,
            if bounded {
                Some(vec![min.unwrap(), max.unwrap()])
            } else {
                None
            },
        ),
    ];
    let ph = antichain || lattice;
    let witness = if ph { None } else { poset_witness(p, x5)? };
    Ok(ClassReport {
        family: Family::Poset,
        verdict: if ph { PhStatus::Ph } else { PhStatus::NotPh },
        reasons,
        components: None,
        witness,
    })
}

/// A bow-tie `{a1,a2} ≤ {a3,a4}` without midpoint suggests `a1 ↦ a3, a2 ↦ a4`;
/// otherwise fall back to a bounded search.
fn poset_witness(p: &FiniteStructure, x5: Option<[usize; 4]>) -> Result<Option<Witness>> {
    if let Some([a1, a2, a3, a4]) = x5 {
        let map = PartialOpMap::from_entries(1, p.size(), [(vec![a1], a3), (vec![a2], a4)])?;
        if extendable(p, &map, witness_limits())?.status == Extension::Unsat {
            return Ok(Some(Witness {
                map,
                refuted_on: RefutedOn::Power,
            }));
        }
    }
    searched_witness(p)
}

/// Linear extensions whose intersection is the order of `p`.
///
/// Starts from the extensions that always take the least and the greatest
/// minimal element, then adds one forced extension for every ordered
/// incomparable pair not yet realized.
pub fn realizer(p: &FiniteStructure) -> Result<Vec<Vec<usize>>> {
    verify_family(p, Family::Poset)?;
    let le = binary_matrix(p);
    let n = p.size();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let push = |out: &mut Vec<Vec<usize>>, ext: Vec<usize>| {
        if !out.contains(&ext) {
            out.push(ext);
        }
    };
    push(&mut out, linear_extension(&le, false));
    push(&mut out, linear_extension(&le, true));
    for x in 0..n {
        for y in 0..n {
            if x == y || le[x][y] || le[y][x] {
                continue;
            }
            let realized = out.iter().any(|ext| position(ext, x) < position(ext, y));
            if !realized {
                let mut forced = le.clone();
                forced[x][y] = true;
                close_transitively(&mut forced);
                push(&mut out, linear_extension(&forced, false));
            }
        }
    }
    Ok(out)
}

fn position(ext: &[usize], x: usize) -> usize {
    ext.iter().position(|&e| e == x).expect("extension is a permutation")
}

fn close_transitively(m: &mut [Vec<bool>]) {
    for k in 0..m.len() {
        let through = m[k].clone();
        for row in m.iter_mut().filter(|row| row[k]) {
            for (slot, &t) in row.iter_mut().zip(&through) {
                *slot |= t;
            }
        }
    }
}

/// Topological order, listing elements bottom-up and taking the least (or,
/// with `largest`, the greatest) minimal element at each step.
fn linear_extension(le: &[Vec<bool>], largest: bool) -> Vec<usize> {
    let n = le.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut available = (0..n)
            .filter(|&x| !placed[x])
            .filter(|&x| (0..n).all(|y| y == x || placed[y] || !le[y][x]));
        let pick = if largest { available.max() } else { available.next() }.expect("orders are acyclic");
        placed[pick] = true;
        order.push(pick);
    }
    order
}

// ---------------------------------------------------------------- strict posets

pub fn classify_strict_poset(s: &FiniteStructure) -> Result<ClassReport> {
    verify_family(s, Family::StrictPoset)?;
    let lt = binary_matrix(s);
    let antichain = s.relation(0).is_empty();
    let x5 = x5_violation(&lt, true);
    let reasons = vec![
        Reason::new("is_antichain", antichain, s.relation(0).tuples().first().cloned()),
        // taking X = A, no element lies strictly below all of a finite nonempty carrier
        Reason::new("strictly_locally_bounded", false, None),
        Reason::new("is_x5_dense", x5.is_none(), x5.map(|q| q.to_vec())),
    ];
    let witness = if antichain { None } else { searched_witness(s)? };
    Ok(ClassReport {
        family: Family::StrictPoset,
        verdict: if antichain { PhStatus::Ph } else { PhStatus::NotPh },
        reasons,
        components: None,
        witness,
    })
}

// ---------------------------------------------------------------- equivalence lattices

/// All partitions of `0..n` in lexicographic order of their label vectors.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    loop {
        out.push(Partition::from_labels(&labels).expect("restricted growth string"));
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let ceiling = labels[..i].iter().max().copied().unwrap_or(0) + 1;
            if labels[i] < ceiling {
                labels[i] += 1;
                for l in &mut labels[i + 1..] {
                    *l = 0;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeList {
    pub n: usize,
    pub families: Vec<Vec<Partition>>,
    /// False when `cap` stopped the enumeration.
    pub complete: bool,
}

/// Largest carrier for [`enumerate_meet_complete_sublattices`].
pub const SUBLATTICE_LIMIT: usize = 4;

/// Nonempty families of partitions closed under pairwise meets and joins.
pub fn enumerate_meet_complete_sublattices(n: usize, cap: usize) -> Result<SublatticeList> {
    enumerate_meet_complete_sublattices_with(n, cap, false)
}

/// With `empty_meet`, the intersection of the empty family, the full
/// relation, is also required.
pub fn enumerate_meet_complete_sublattices_with(n: usize, cap: usize, empty_meet: bool) -> Result<SublatticeList> {
    if n == 0 {
        return Err(Error::InvalidArgument("carrier must be nonempty".into()));
    }
    if n > SUBLATTICE_LIMIT {
        return Err(Error::TooLarge {
            what: "sublattice enumeration carrier",
            size: n,
            limit: SUBLATTICE_LIMIT,
        });
    }
    let all = all_partitions(n);
    let index: BTreeMap<&Partition, usize> = all.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let meet: Vec<Vec<usize>> = all
        .iter()
        .map(|p| all.iter().map(|q| index[&p.meet(q)]).collect())
        .collect();
    let join: Vec<Vec<usize>> = all
        .iter()
        .map(|p| all.iter().map(|q| index[&p.join(q)]).collect())
        .collect();
    let full = index[&Partition::full(n)];
    let mut families = Vec::new();
    for mask in 1u32..1 << all.len() {
        if empty_meet && mask >> full & 1 == 0 {
            continue;
        }
        let members: Vec<usize> = (0..all.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let closed = members.iter().all(|&i| {
            members
                .iter()
                .all(|&j| mask >> meet[i][j] & 1 == 1 && mask >> join[i][j] & 1 == 1)
        });
        if closed {
            if families.len() == cap {
                return Ok(SublatticeList {
                    n,
                    families,
                    complete: false,
                });
            }
            families.push(members.iter().map(|&i| all[i].clone()).collect());
        }
    }
    Ok(SublatticeList {
        n,
        families,
        complete: true,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum Arithmetical {
    Yes,
    /// `θ_i ∘ θ_j ≠ θ_j ∘ θ_i`, witnessed by a pair in one composition only.
    NotPermutable {
        pair: [usize; 2],
        witness: [usize; 2],
    },
    /// `θ_i ∧ (θ_j ∨ θ_k) ≠ (θ_i ∧ θ_j) ∨ (θ_i ∧ θ_k)`.
    NotDistributive {
        triple: [usize; 3],
    },
}

impl Arithmetical {
    pub fn holds(&self) -> bool {
        *self == Arithmetical::Yes
    }
}

/// Indices in the answer refer to positions in `family`.
pub fn is_arithmetical(family: &[Partition]) -> Arithmetical {
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if let Some((x, y)) = a.permutation_witness(b) {
                return Arithmetical::NotPermutable {
                    pair: [i, j],
                    witness: [x, y],
                };
            }
        }
    }
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            for (k, c) in family.iter().enumerate() {
                if a.meet(&b.join(c)) != a.meet(b).join(&a.meet(c)) {
                    return Arithmetical::NotDistributive { triple: [i, j, k] };
                }
            }
        }
    }
    Arithmetical::Yes
}

/// Rejects families not closed under meets and joins, naming the offending pair.
pub fn check_sublattice(family: &[Partition]) -> Result<()> {
    let set: BTreeSet<&Partition> = family.iter().collect();
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            if !set.contains(&a.meet(b)) {
                return Err(Error::Family {
                    family: Family::EqLattice.as_str(),
                    rule: "closed under meets",
                    witness: vec![i, j],
                });
            }
            if !set.contains(&a.join(b)) {
                return Err(Error::Family {
                    family: Family::EqLattice.as_str(),
                    rule: "closed under joins",
                    witness: vec![i, j],
                });
            }
        }
    }
    Ok(())
}

pub fn classify_eq_lattice(a: &FiniteStructure) -> Result<ClassReport> {
    verify_family(a, Family::EqLattice)?;
    let family = partitions_of(a)?;
    check_sublattice(&family)?;
    let answer = is_arithmetical(&family);
    let (permutable, distributive) = match &answer {
        Arithmetical::Yes => (
            Reason::new("permutable", true, None),
            Reason::new("distributive", true, None),
        ),
        Arithmetical::NotPermutable { pair, witness } => (
            Reason::new(
                "permutable",
                false,
                Some(vec![pair[0], pair[1], witness[0], witness[1]]),
            ),
            Reason::new("distributive", true, None),
        ),
        Arithmetical::NotDistributive { triple } => (
            Reason::new("permutable", true, None),
            Reason::new("distributive", false, Some(triple.to_vec())),
        ),
    };
    let ph = answer.holds();
    let reasons = vec![Reason::new("is_arithmetical", ph, None), permutable, distributive];
    let witness = if ph { None } else { searched_witness(a)? };
    Ok(ClassReport {
        family: Family::EqLattice,
        verdict: if ph { PhStatus::Ph } else { PhStatus::NotPh },
        reasons,
        components: None,
        witness,
    })
}

pub fn classify(a: &FiniteStructure, family: Family) -> Result<ClassReport> {
    match family {
        Family::Graph => classify_graph(a),
        Family::Poset => classify_poset(a),
        Family::StrictPoset => classify_strict_poset(a),
        Family::EqLattice => classify_eq_lattice(a),
    }
}

// ---------------------------------------------------------------- Kaarli cross-check

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Escalation {
    /// A non-extendable local polymorphism of arity `k`, missing point included.
    Found {
        k: usize,
        map: PartialOpMap,
        missing: Vec<usize>,
    },
    /// Every arity up to `max_k` was searched completely without a counterexample.
    Open { max_k: usize },
    /// The search at arity `k` ran out of budget.
    Exhausted { k: usize },
}

/// One-point counterexample searches at `k = 1, 2, …, max_k`.
pub fn escalate_counterexample(a: &FiniteStructure, max_k: usize, limits: SearchLimits) -> Result<Escalation> {
    for k in 1..=max_k {
        match is_k_ph(a, k, limits)? {
            KphOutcome::Holds => {}
            KphOutcome::Counterexample { map, missing } => return Ok(Escalation::Found { k, map, missing }),
            KphOutcome::Exhausted => return Ok(Escalation::Exhausted { k }),
        }
    }
    Ok(Escalation::Open { max_k })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KaarliEntry {
    pub partitions: Vec<Partition>,
    pub arithmetical: Arithmetical,
    /// `decide_ph` on the canonical structure, for carriers of at most 3 points.
    pub decided: Option<PhStatus>,
    /// Counterexample search, for non-arithmetical families on 4 points.
    pub escalation: Option<Escalation>,
    /// `None` when neither check reached a verdict.
    pub agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KaarliReport {
    pub n: usize,
    pub entries: Vec<KaarliEntry>,
    pub agreements: usize,
    pub disagreements: usize,
    pub unresolved: usize,
}

/// Largest arity tried by the escalating search.
pub const ESCALATION_MAX_K: usize = 4;

pub fn kaarli_entry(n: usize, partitions: Vec<Partition>, limits: SearchLimits) -> Result<KaarliEntry> {
    let arithmetical = is_arithmetical(&partitions);
    let a = crate::model::canonical_structure(&crate::model::FamilyData::EqLattice {
        n,
        partitions: partitions.clone(),
    })?;
    let mut entry = KaarliEntry {
        partitions,
        arithmetical,
        decided: None,
        escalation: None,
        agrees: None,
    };
    if n <= 3 {
        let status = decide_ph(&a, limits)?.status;
        entry.decided = Some(status);
        if status != PhStatus::Inconclusive {
            entry.agrees = Some((status == PhStatus::Ph) == entry.arithmetical.holds());
        }
    } else if !entry.arithmetical.holds() {
        let e = escalate_counterexample(&a, ESCALATION_MAX_K, limits)?;
        entry.agrees = match e {
            Escalation::Found { .. } => Some(true),
            Escalation::Open { .. } | Escalation::Exhausted { .. } => None,
        };
        entry.escalation = Some(e);
    }
    Ok(entry)
}

/// Kaarli's theorem checked on every meet-complete sublattice over `0..n`.
pub fn kaarli_cross_check(n: usize, limits: SearchLimits) -> Result<KaarliReport> {
    let list = enumerate_meet_complete_sublattices(n, usize::MAX)?;
    let entries = list
        .families
        .into_iter()
        .map(|p| kaarli_entry(n, p, limits))
        .collect::<Result<Vec<_>>>()?;
    Ok(kaarli_report(n, entries))
}

pub fn kaarli_report(n: usize, entries: Vec<KaarliEntry>) -> KaarliReport {
    let count = |v: Option<bool>| entries.iter().filter(|e| e.agrees == v).count();
    KaarliReport {
        n,
        agreements: count(Some(true)),
        disagreements: count(Some(false)),
        unresolved: count(None),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::order_from_covers;
    use crate::model::{canonical_structure, FamilyData};

    fn graph(n: usize, edges: &[(usize, usize)]) -> FiniteStructure {
        canonical_structure(&FamilyData::Graph {
            n,
            edges: edges.to_vec(),
        })
        .unwrap()
    }

    fn poset(n: usize, covers: &[(usize, usize)]) -> FiniteStructure {
        canonical_structure(&FamilyData::Poset {
            n,
            le: order_from_covers(n, covers),
        })
        .unwrap()
    }

    fn part(blocks: &str) -> Partition {
        let n = blocks.chars().filter(|c| c.is_ascii_digit()).count();
        let blocks: Vec<Vec<usize>> = blocks
            .split('|')
            .map(|b| b.chars().map(|c| c.to_digit(10).unwrap() as usize).collect())
            .collect();
        Partition::from_blocks(n, &blocks).unwrap()
    }

    #[test]
    fn graph_examples() {
        assert_eq!(
            classify_graph(&graph(4, &[(0, 1), (2, 3)])).unwrap().verdict,
            PhStatus::Ph
        );
        assert_eq!(classify_graph(&graph(5, &[])).unwrap().verdict, PhStatus::Ph);
        let p3 = classify_graph(&graph(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(p3.verdict, PhStatus::NotPh);
        assert!(!p3.reason("property_star").unwrap().holds);
        let k2k1 = classify_graph(&graph(3, &[(0, 1)])).unwrap();
        assert_eq!(k2k1.verdict, PhStatus::NotPh);
        assert!(k2k1.reason("property_star").unwrap().holds);
        assert!(k2k1.witness.is_some());
    }

    #[test]
    fn star_witnesses() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let s = graph_star_witness(&p3).unwrap().unwrap();
        assert_eq!((s.k, s.neighborless.clone(), s.path), (2, vec![0, 1], [0, 1, 2]));
        assert_eq!(s.witness.map.arity(), 3);
        assert_eq!(
            extendable(&p3, &s.witness.map, SearchLimits::default()).unwrap().status,
            Extension::Unsat
        );
        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let s = graph_star_witness(&k3).unwrap().unwrap();
        assert_eq!((s.k, s.witness.map.arity()), (3, 4));
        assert_eq!(
            extendable(&k3, &s.witness.map, SearchLimits::default()).unwrap().status,
            Extension::Unsat
        );
        assert!(graph_star_witness(&graph(4, &[(0, 1), (2, 3)])).unwrap().is_none());
    }

    #[test]
    fn poset_examples() {
        assert_eq!(classify_poset(&poset(2, &[(0, 1)])).unwrap().verdict, PhStatus::Ph);
        assert_eq!(classify_poset(&poset(3, &[])).unwrap().verdict, PhStatus::Ph);
        let bowtie = poset(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        let r = classify_poset(&bowtie).unwrap();
        assert_eq!(r.verdict, PhStatus::NotPh);
        assert_eq!(r.reason("is_x5_dense").unwrap().witness, Some(vec![0, 1, 2, 3]));
        let w = r.witness.unwrap();
        assert_eq!(
            w.map,
            PartialOpMap::from_entries(1, 4, [(vec![0], 2), (vec![1], 3)]).unwrap()
        );
        assert!(verify_witness(&bowtie, &w, SearchLimits::default()).unwrap());
    }

    #[test]
    fn realizers() {
        assert_eq!(realizer(&poset(3, &[(0, 1), (1, 2)])).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(realizer(&poset(2, &[])).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(realizer(&poset(4, &[(0, 2), (0, 3), (1, 2), (1, 3)])).unwrap().len(), 2);
    }

    #[test]
    fn strict_examples() {
        let s =
            |n, lt: &[(usize, usize)]| canonical_structure(&FamilyData::StrictPoset { n, lt: lt.to_vec() }).unwrap();
        let r = classify_strict_poset(&s(2, &[(0, 1)])).unwrap();
        assert_eq!(r.verdict, PhStatus::NotPh);
        assert!(r.witness.is_some());
        assert_eq!(classify_strict_poset(&s(4, &[])).unwrap().verdict, PhStatus::Ph);
        let bow = s(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(classify_strict_poset(&bow).unwrap().verdict, PhStatus::NotPh);
    }

    #[test]
    fn partition_enumeration() {
        assert_eq!(all_partitions(1).len(), 1);
        assert_eq!(all_partitions(3).len(), 5);
        assert_eq!(all_partitions(4).len(), 15);
        assert_eq!(enumerate_meet_complete_sublattices(1, 10).unwrap().families.len(), 1);
        assert_eq!(enumerate_meet_complete_sublattices(2, 10).unwrap().families.len(), 3);
        let capped = enumerate_meet_complete_sublattices(3, 2).unwrap();
        assert!(!capped.complete && capped.families.len() == 2);
    }

    #[test]
    fn arithmetical_examples() {
        assert!(is_arithmetical(&[Partition::discrete(3), Partition::full(3)]).holds());
        assert!(is_arithmetical(&[Partition::full(3), part("01|2"), Partition::discrete(3)]).holds());
        let m3 = [
            Partition::full(4),
            part("01|23"),
            part("02|13"),
            part("03|12"),
            Partition::discrete(4),
        ];
        assert!(matches!(is_arithmetical(&m3), Arithmetical::NotDistributive { .. }));
        let not_perm = [Partition::full(3), part("01|2"), part("0|12"), Partition::discrete(3)];
        assert!(matches!(is_arithmetical(&not_perm), Arithmetical::NotPermutable { .. }));
    }

    #[test]
    fn kaarli_small() {
        let r = kaarli_cross_check(2, SearchLimits::default()).unwrap();
        assert_eq!((r.agreements, r.disagreements, r.unresolved), (3, 0, 0));
        assert!(r.entries.iter().all(|e| e.arithmetical.holds()));
    }
}
