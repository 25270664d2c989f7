//! Budgeted backtracking search for homomorphisms extending a partial assignment.
//!
//! Variables are source elements, values are target elements held in `u64`
//! bitset domains, so targets are limited to 64 elements. Binary relations are
//! propagated to arc consistency through support masks; higher arities use
//! forward checking. Sources may be implicit powers: constraints are read per
//! variable through [`RelSource::for_each_tuple_through`] and never stored.

use std::collections::{BTreeSet, VecDeque};
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FiniteStructure, RelSource};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Largest target carrier the bitset domains can hold.
pub const MAX_TARGET_SIZE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    /// Every relation is only checked once all but one of a tuple's variables are fixed.
    ForwardCheck,
    /// Arc consistency on binary relations, forward checking on the rest.
    ArcConsistency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub node_budget: u64,
    /// `None` means no wall-clock limit.
    pub wall_budget: Option<Duration>,
    pub propagation: Propagation,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_budget: DEFAULT_NODE_BUDGET,
            wall_budget: None,
            propagation: Propagation::ArcConsistency,
        }
    }
}

impl SearchLimits {
    pub fn with_nodes(mut self, node_budget: u64) -> Self {
        self.node_budget = node_budget;
        self
    }

    pub fn with_wall(mut self, wall: Duration) -> Self {
        self.wall_budget = Some(wall);
        self
    }

    pub fn with_propagation(mut self, propagation: Propagation) -> Self {
        self.propagation = propagation;
        self
    }
}

/// Find a homomorphism `source → target` that agrees with `pins`.
#[derive(Clone, Copy)]
pub struct ExtensionProblem<'a> {
    pub source: &'a dyn RelSource,
    pub target: &'a FiniteStructure,
    pub pins: &'a [(usize, usize)],
    pub limits: SearchLimits,
}

impl<'a> ExtensionProblem<'a> {
    pub fn new(source: &'a dyn RelSource, target: &'a FiniteStructure) -> Self {
        ExtensionProblem {
            source,
            target,
            pins: &[],
            limits: SearchLimits::default(),
        }
    }

    pub fn pins(mut self, pins: &'a [(usize, usize)]) -> Self {
        self.pins = pins;
        self
    }

    pub fn limits(mut self, limits: SearchLimits) -> Self {
        self.limits = limits;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub propagations: u64,
    pub elapsed: Duration,
}

impl SearchStats {
    pub fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.propagations += other.propagations;
        self.elapsed += other.elapsed;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// A verified homomorphism; `map[x]` is the image of source element `x`.
    Found(Vec<usize>),
    /// The search space was refuted exhaustively.
    Unsat,
    /// A budget ran out first.
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub stats: SearchStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationEnd {
    /// Every solution was listed.
    Complete,
    /// The cap was reached; more solutions may exist.
    CapReached,
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub solutions: Vec<Vec<usize>>,
    pub end: EnumerationEnd,
    pub stats: SearchStats,
}

/// A source tuple whose image leaves the target relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomViolation {
    pub symbol: String,
    pub tuple: Vec<usize>,
    pub image: Vec<usize>,
}

/// Checks a total map tuple by tuple. `Ok(None)` means it is a homomorphism.
pub fn check_is_homomorphism(
    source: &dyn RelSource,
    target: &FiniteStructure,
    map: &[usize],
) -> Result<Option<HomViolation>> {
    if source.signature() != target.signature() {
        return Err(Error::SignatureMismatch);
    }
    if map.len() != source.size() {
        return Err(Error::InvalidArgument(format!(
            "map has {} entries for a source of {} elements",
            map.len(),
            source.size()
        )));
    }
    if let Some(&v) = map.iter().find(|&&v| v >= target.size()) {
        return Err(Error::InvalidArgument(format!("image {v} outside the target")));
    }
    let sig = target.signature();
    for rel in 0..sig.len() {
        if target.relation(rel).is_full() {
            continue;
        }
        let mut image = vec![0; sig.arity(rel)];
        let mut violation = None;
        let _ = source.for_each_tuple(rel, &mut |t| {
            for (slot, &e) in image.iter_mut().zip(t) {
                *slot = map[e];
            }
            if target.contains(rel, &image) {
                ControlFlow::Continue(())
            } else {
                violation = Some(HomViolation {
                    symbol: sig.name(rel).to_string(),
                    tuple: t.to_vec(),
                    image: image.clone(),
                });
                ControlFlow::Break(())
            }
        });
        if violation.is_some() {
            return Ok(violation);
        }
    }
    Ok(None)
}

pub fn solve(problem: &ExtensionProblem) -> Result<SearchOutcome> {
    let mut solver = Solver::new(problem)?;
    let mut found = None;
    let end = solver.run(&mut |map| {
        found = Some(map.to_vec());
        ControlFlow::Break(())
    });
    let stats = solver.finish();
    let status = match (end, found) {
        (_, Some(map)) => {
            if let Some(v) = check_is_homomorphism(problem.source, problem.target, &map)? {
                return Err(Error::Internal(format!(
                    "search returned a map violating `{}` on {:?}",
                    v.symbol, v.tuple
                )));
            }
            if let Some(&(x, v)) = problem.pins.iter().find(|&&(x, v)| map[x] != v) {
                return Err(Error::Internal(format!("search ignored the pin {x} ↦ {v}")));
            }
            SearchStatus::Found(map)
        }
        (RunEnd::Exhausted, None) => SearchStatus::Exhausted,
        (_, None) => SearchStatus::Unsat,
    };
    Ok(SearchOutcome { status, stats })
}

/// Lists solutions in the search's deterministic order, at most `cap` of them.
pub fn enumerate_solutions(problem: &ExtensionProblem, cap: usize) -> Result<Enumeration> {
    if cap == 0 {
        return Err(Error::InvalidArgument("enumeration cap must be at least 1".into()));
    }
    let mut solver = Solver::new(problem)?;
    let mut solutions: Vec<Vec<usize>> = Vec::new();
    let end = solver.run(&mut |map| {
        solutions.push(map.to_vec());
        if solutions.len() >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let stats = solver.finish();
    for map in &solutions {
        if let Some(v) = check_is_homomorphism(problem.source, problem.target, map)? {
            return Err(Error::Internal(format!(
                "enumeration returned a map violating `{}` on {:?}",
                v.symbol, v.tuple
            )));
        }
    }
    let end = match end {
        RunEnd::Stopped => EnumerationEnd::CapReached,
        RunEnd::Exhausted => EnumerationEnd::Exhausted,
        RunEnd::Done => EnumerationEnd::Complete,
    };
    Ok(Enumeration { solutions, end, stats })
}

enum RelTable {
    Unary(u64),
    Binary {
        succ: Vec<u64>,
        pred: Vec<u64>,
        loops: u64,
        has_succ: u64,
        has_pred: u64,
    },
    /// Values occurring at each position.
    Nary(Vec<u64>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RunEnd {
    /// Search space exhausted.
    Done,
    /// The solution callback asked to stop.
    Stopped,
    /// Node or wall budget ran out.
    Exhausted,
}

struct Frame {
    var: u32,
    remaining: u64,
    mark: usize,
}

struct Solver<'a> {
    source: &'a dyn RelSource,
    target: &'a FiniteStructure,
    limits: SearchLimits,
    tables: Vec<RelTable>,
    /// Relations that are not all of `target^arity`.
    active: Vec<usize>,
    dom: Vec<u64>,
    trail: Vec<(u32, u64)>,
    /// Unfixed variables bucketed by domain size.
    buckets: Vec<BTreeSet<u32>>,
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    scratch: Vec<usize>,
    stats: SearchStats,
    start: Instant,
    /// Set when initial propagation already refuted the problem.
    root_failed: bool,
}

impl<'a> Solver<'a> {
    fn new(problem: &ExtensionProblem<'a>) -> Result<Self> {
        let (source, target) = (problem.source, problem.target);
        if source.signature() != target.signature() {
            return Err(Error::SignatureMismatch);
        }
        let n = target.size();
        if n > MAX_TARGET_SIZE {
            return Err(Error::TooLarge {
                what: "search target",
                size: n,
                limit: MAX_TARGET_SIZE,
            });
        }
        if problem.limits.node_budget == 0 {
            return Err(Error::InvalidArgument("node budget must be positive".into()));
        }
        let pin_of = check_pins(source, target, problem.pins)?;
        let sig = target.signature();
        let tables = (0..sig.len()).map(|rel| rel_table(target, rel)).collect();
        let active = (0..sig.len()).filter(|&rel| !target.relation(rel).is_full()).collect();
        let size = source.size();
        let mut solver = Solver {
            source,
            target,
            limits: problem.limits,
            tables,
            active,
            dom: vec![full_mask(n); size],
            trail: Vec::new(),
            buckets: vec![BTreeSet::new(); n + 1],
            queue: VecDeque::new(),
            queued: vec![false; size],
            scratch: Vec::new(),
            stats: SearchStats::default(),
            start: Instant::now(),
            root_failed: false,
        };
        solver.root_failed = !solver.initialize(&pin_of);
        Ok(solver)
    }

    /// Unary filters and pins, then propagation from every narrowed variable.
    fn initialize(&mut self, pin_of: &[Option<usize>]) -> bool {
        let full = full_mask(self.target.size());
        for x in 0..self.dom.len() {
            let mut d = self.node_filter(x);
            if let Some(v) = pin_of.get(x).copied().flatten() {
                d &= 1 << v;
            }
            if d == 0 {
                return false;
            }
            self.dom[x] = d;
            let c = d.count_ones() as usize;
            if c >= 2 {
                self.buckets[c].insert(x as u32);
            }
            if d != full || pin_of.get(x).copied().flatten().is_some() {
                self.enqueue(x);
            }
        }
        self.propagate()
    }

    fn node_filter(&self, x: usize) -> u64 {
        let mut d = full_mask(self.target.size());
        for &rel in &self.active {
            match &self.tables[rel] {
                RelTable::Unary(mask) => {
                    if self.source.contains(rel, &[x]) {
                        d &= mask;
                    }
                }
                RelTable::Binary {
                    loops,
                    has_succ,
                    has_pred,
                    ..
                } => {
                    if self.source.contains(rel, &[x, x]) {
                        d &= loops;
                    }
                    if self.has_other_neighbor(rel, 0, x) {
                        d &= has_succ;
                    }
                    if self.has_other_neighbor(rel, 1, x) {
                        d &= has_pred;
                    }
                }
                RelTable::Nary(pos_vals) => {
                    for (p, &vals) in pos_vals.iter().enumerate() {
                        let occurs = self
                            .source
                            .for_each_tuple_through(rel, p, x, &mut |_| ControlFlow::Break(()))
                            .is_break();
                        if occurs {
                            d &= vals;
                        }
                    }
                }
            }
        }
        d
    }

    fn has_other_neighbor(&self, rel: usize, pos: usize, x: usize) -> bool {
        self.source
            .for_each_tuple_through(rel, pos, x, &mut |t| {
                if t[1 - pos] != x {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })
            .is_break()
    }

    fn enqueue(&mut self, x: usize) {
        if !self.queued[x] {
            self.queued[x] = true;
            self.queue.push_back(x as u32);
        }
    }

    /// Narrows `D(x)` to `D(x) & mask`; false on wipe-out.
    fn restrict(&mut self, x: usize, mask: u64) -> bool {
        let old = self.dom[x];
        let new = old & mask;
        if new == old {
            return true;
        }
        if new == 0 {
            return false;
        }
        self.set_domain(x, new);
        true
    }

    fn set_domain(&mut self, x: usize, new: u64) {
        let old = self.dom[x];
        self.trail.push((x as u32, old));
        self.move_bucket(x, old, new);
        self.dom[x] = new;
        self.enqueue(x);
    }

    fn move_bucket(&mut self, x: usize, old: u64, new: u64) {
        let (co, cn) = (old.count_ones() as usize, new.count_ones() as usize);
        if co == cn {
            return;
        }
        if co >= 2 {
            self.buckets[co].remove(&(x as u32));
        }
        if cn >= 2 {
            self.buckets[cn].insert(x as u32);
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (x, old) = self.trail.pop().expect("nonempty trail");
            let x = x as usize;
            let cur = self.dom[x];
            self.move_bucket(x, cur, old);
            self.dom[x] = old;
        }
    }

    fn clear_queue(&mut self) {
        for x in self.queue.drain(..) {
            self.queued[x as usize] = false;
        }
    }

    fn propagate(&mut self) -> bool {
        while let Some(x) = self.queue.pop_front() {
            let x = x as usize;
            self.queued[x] = false;
            self.stats.propagations += 1;
            if !self.revise(x) {
                self.clear_queue();
                return false;
            }
        }
        true
    }

    /// Propagates the current domain of `x` to every constraint through it.
    fn revise(&mut self, x: usize) -> bool {
        let arc = self.limits.propagation == Propagation::ArcConsistency;
        for i in 0..self.active.len() {
            let rel = self.active[i];
            let ok = match &self.tables[rel] {
                RelTable::Unary(_) => true,
                RelTable::Binary { succ, pred, .. } if arc => {
                    let dx = self.dom[x];
                    let (out_mask, in_mask) = (union_over(succ, dx), union_over(pred, dx));
                    self.revise_binary(rel, x, out_mask, in_mask)
                }
                _ => self.dom[x].count_ones() != 1 || self.forward_check(rel, x),
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn revise_binary(&mut self, rel: usize, x: usize, out_mask: u64, in_mask: u64) -> bool {
        for (pos, mask) in [(0, out_mask), (1, in_mask)] {
            let mut scratch = std::mem::take(&mut self.scratch);
            scratch.clear();
            let _ = self.source.for_each_tuple_through(rel, pos, x, &mut |t| {
                scratch.push(t[1 - pos]);
                ControlFlow::Continue(())
            });
            let ok = scratch.iter().all(|&y| y == x || self.restrict(y, mask));
            self.scratch = scratch;
            if !ok {
                return false;
            }
        }
        true
    }

    /// Checks or narrows every tuple through the fixed variable `x`.
    fn forward_check(&mut self, rel: usize, x: usize) -> bool {
        let arity = self.target.signature().arity(rel);
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.clear();
        for pos in 0..arity {
            let _ = self.source.for_each_tuple_through(rel, pos, x, &mut |t| {
                scratch.extend_from_slice(t);
                ControlFlow::Continue(())
            });
        }
        let mut image = vec![0; arity];
        let ok = scratch.chunks(arity).all(|t| self.check_tuple(rel, t, &mut image));
        self.scratch = scratch;
        ok
    }

    fn check_tuple(&mut self, rel: usize, t: &[usize], image: &mut [usize]) -> bool {
        let mut open = None;
        for &e in t {
            if self.dom[e].count_ones() != 1 {
                match open {
                    None => open = Some(e),
                    Some(z) if z == e => {}
                    Some(_) => return true,
                }
            }
        }
        let fill = |image: &mut [usize], dom: &[u64], z: usize, v: usize| {
            for (slot, &e) in image.iter_mut().zip(t) {
                *slot = if e == z { v } else { dom[e].trailing_zeros() as usize };
            }
        };
        match open {
            None => {
                fill(image, &self.dom, usize::MAX, 0);
                self.target.contains(rel, image)
            }
            Some(z) => {
                let mut keep = 0u64;
                let mut d = self.dom[z];
                while d != 0 {
                    let v = d.trailing_zeros() as usize;
                    d &= d - 1;
                    fill(image, &self.dom, z, v);
                    if self.target.contains(rel, image) {
                        keep |= 1 << v;
                    }
                }
                self.restrict(z, keep)
            }
        }
    }

    fn pick_var(&self) -> Option<usize> {
        self.buckets[2..].iter().find_map(|b| b.first()).map(|&x| x as usize)
    }

    fn over_budget(&self) -> bool {
        if self.stats.nodes >= self.limits.node_budget {
            return true;
        }
        match self.limits.wall_budget {
            Some(w) if self.stats.nodes.is_multiple_of(256) => self.start.elapsed() >= w,
            _ => false,
        }
    }

    /// Depth-first search; `emit` sees each solution and may stop the run.
    fn run(&mut self, emit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> RunEnd {
        if self.root_failed {
            return RunEnd::Done;
        }
        let mut frames: Vec<Frame> = Vec::new();
        let mut map = vec![0usize; self.dom.len()];
        loop {
            match self.pick_var() {
                None => {
                    for (slot, &d) in map.iter_mut().zip(&self.dom) {
                        *slot = d.trailing_zeros() as usize;
                    }
                    if emit(&map).is_break() {
                        return RunEnd::Stopped;
                    }
                }
                Some(x) => frames.push(Frame {
                    var: x as u32,
                    remaining: self.dom[x],
                    mark: self.trail.len(),
                }),
            }
            // advance to the next consistent child, backtracking as needed
            loop {
                let Some(top) = frames.last_mut() else {
                    return RunEnd::Done;
                };
                let (x, mark) = (top.var as usize, top.mark);
                if top.remaining == 0 {
                    frames.pop();
                    self.undo_to(mark);
                    continue;
                }
                let v = top.remaining.trailing_zeros();
                top.remaining &= top.remaining - 1;
                self.undo_to(mark);
                if self.over_budget() {
                    return RunEnd::Exhausted;
                }
                self.stats.nodes += 1;
                self.set_domain(x, 1 << v);
                if self.propagate() {
                    break;
                }
            }
        }
    }

    fn finish(mut self) -> SearchStats {
        self.stats.elapsed = self.start.elapsed();
        self.stats
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn union_over(masks: &[u64], mut d: u64) -> u64 {
    let mut out = 0;
    while d != 0 {
        out |= masks[d.trailing_zeros() as usize];
        d &= d - 1;
    }
    out
}

fn rel_table(target: &FiniteStructure, rel: usize) -> RelTable {
    let r = target.relation(rel);
    let n = target.size();
    match r.arity() {
        1 => RelTable::Unary(r.tuples().iter().fold(0, |m, t| m | 1 << t[0])),
        2 => {
            let (mut succ, mut pred) = (vec![0u64; n], vec![0u64; n]);
            let mut loops = 0;
            for t in r.tuples() {
                succ[t[0]] |= 1 << t[1];
                pred[t[1]] |= 1 << t[0];
                if t[0] == t[1] {
                    loops |= 1 << t[0];
                }
            }
            let nonempty = |m: &[u64]| (0..n).filter(|&v| m[v] != 0).fold(0, |a, v| a | 1 << v);
            RelTable::Binary {
                has_succ: nonempty(&succ),
                has_pred: nonempty(&pred),
                succ,
                pred,
                loops,
            }
        }
        a => {
            let mut pos_vals = vec![0u64; a];
            for t in r.tuples() {
                for (p, &e) in t.iter().enumerate() {
                    pos_vals[p] |= 1 << e;
                }
            }
            RelTable::Nary(pos_vals)
        }
    }
}

/// Validates pins and returns them indexed by source element.
fn check_pins(source: &dyn RelSource, target: &FiniteStructure, pins: &[(usize, usize)]) -> Result<Vec<Option<usize>>> {
    let mut pin_of: Vec<Option<usize>> = Vec::new();
    if pins.is_empty() {
        return Ok(pin_of);
    }
    pin_of = vec![None; source.size()];
    for &(x, v) in pins {
        if x >= source.size() || v >= target.size() {
            return Err(Error::InvalidArgument(format!("pin {x} ↦ {v} out of range")));
        }
        match pin_of[x] {
            Some(w) if w != v => {
                return Err(Error::InvalidArgument(format!(
                    "element {x} pinned to both {w} and {v}"
                )))
            }
            _ => pin_of[x] = Some(v),
        }
    }
    let sig = target.signature();
    for &(x, _) in pins {
        for rel in 0..sig.len() {
            let arity = sig.arity(rel);
            for pos in 0..arity {
                let mut bad = None;
                let _ = source.for_each_tuple_through(rel, pos, x, &mut |t| {
                    let image: Option<Vec<usize>> = t.iter().map(|&e| pin_of[e]).collect();
                    match image {
                        Some(image) if !target.contains(rel, &image) => {
                            bad = Some(t.to_vec());
                            ControlFlow::Break(())
                        }
                        _ => ControlFlow::Continue(()),
                    }
                });
                if let Some(tuple) = bad {
                    return Err(Error::InconsistentPins {
                        symbol: sig.name(rel).to_string(),
                        tuple,
                    });
                }
            }
        }
    }
    Ok(pin_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{power, validate_structure, RawStructure};

    fn graph(n: usize, edges: &[(usize, usize)]) -> FiniteStructure {
        let tuples = edges.iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]);
        validate_structure(&RawStructure::new("G", n).relation("edge", 2, tuples)).unwrap()
    }

    fn c2() -> FiniteStructure {
        validate_structure(&RawStructure::new("C2", 2).relation("le", 2, [vec![0, 0], vec![0, 1], vec![1, 1]])).unwrap()
    }

    #[test]
    fn homomorphism_checks() {
        let a = c2();
        assert_eq!(check_is_homomorphism(&a, &a, &[0, 1]).unwrap(), None);
        assert_eq!(check_is_homomorphism(&a, &a, &[0, 0]).unwrap(), None);
        let v = check_is_homomorphism(&a, &a, &[1, 0]).unwrap().unwrap();
        assert_eq!(v.tuple, vec![0, 1]);
        assert_eq!(v.image, vec![1, 0]);
    }

    #[test]
    fn pinned_chain_finds_identity() {
        let a = c2();
        let out = solve(&ExtensionProblem::new(&a, &a).pins(&[(0, 0)])).unwrap();
        assert!(matches!(out.status, SearchStatus::Found(_)));
    }

    #[test]
    fn edge_into_edgeless_is_unsat() {
        let k2 = graph(2, &[(0, 1)]);
        let e2 = graph(2, &[]);
        let out = solve(&ExtensionProblem::new(&k2, &e2)).unwrap();
        assert_eq!(out.status, SearchStatus::Unsat);
    }

    #[test]
    fn chain_square_with_projection_pins() {
        let a = c2();
        let p = power(&a, 2).unwrap();
        let pins = [(p.encode(&[0, 1]), 0), (p.encode(&[1, 0]), 1)];
        let out = solve(&ExtensionProblem::new(&p, &a).pins(&pins)).unwrap();
        let SearchStatus::Found(map) = out.status else { panic!() };
        assert_eq!(check_is_homomorphism(&p, &a, &map).unwrap(), None);
    }

    #[test]
    fn enumeration_counts() {
        let point = validate_structure(&RawStructure::new("pt", 1)).unwrap();
        let a = c2();
        let none = validate_structure(&RawStructure::new("C2", 2)).unwrap();
        let e = enumerate_solutions(&ExtensionProblem::new(&point, &none), 10).unwrap();
        assert_eq!(e.solutions.len(), 2);
        let e = enumerate_solutions(&ExtensionProblem::new(&a, &a), 10).unwrap();
        assert_eq!(e.solutions, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(e.end, EnumerationEnd::Complete);
        let k2 = graph(2, &[(0, 1)]);
        let e = enumerate_solutions(&ExtensionProblem::new(&k2, &k2), 10).unwrap();
        assert_eq!(e.solutions, vec![vec![0, 1], vec![1, 0]]);
        let e = enumerate_solutions(&ExtensionProblem::new(&a, &a), 2).unwrap();
        assert_eq!(e.end, EnumerationEnd::CapReached);
    }

    #[test]
    fn inconsistent_pins_rejected() {
        let a = c2();
        let err = solve(&ExtensionProblem::new(&a, &a).pins(&[(0, 1), (1, 0)])).unwrap_err();
        assert!(matches!(err, Error::InconsistentPins { .. }));
    }

    #[test]
    fn budget_exhaustion_is_not_unsat() {
        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let k4 = graph(4, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3)]);
        // K4 → K3 has no solution but needs more than one node to refute
        let limits = SearchLimits::default().with_nodes(1);
        let out = solve(&ExtensionProblem::new(&k4, &k3).limits(limits)).unwrap();
        assert_eq!(out.status, SearchStatus::Exhausted);
        let out = solve(&ExtensionProblem::new(&k4, &k3)).unwrap();
        assert_eq!(out.status, SearchStatus::Unsat);
    }

    #[test]
    fn ternary_relation_forward_checked() {
        let t =
            validate_structure(&RawStructure::new("T", 2).relation("r", 3, [vec![0, 0, 1], vec![1, 1, 0]])).unwrap();
        let e = enumerate_solutions(&ExtensionProblem::new(&t, &t), 10).unwrap();
        assert_eq!(e.solutions, vec![vec![0, 1], vec![1, 0]]);
    }
}
