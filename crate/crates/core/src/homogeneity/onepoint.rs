//! Counterexample search by one-point extensions.
//!
//! On a finite source, every partial homomorphism `f: S ⇀ T` extends to a
//! total one iff every such `f` admits every one-point extension: extend one
//! point at a time for one direction, restrict a total extension for the
//! other. A counterexample is therefore a point `x` and a partial
//! homomorphism `f` on other points such that every candidate image `v` of
//! `x` is *killed*: some tuple through `x`, with its other entries in the
//! domain of `f`, leaves the target relation once `x ↦ v`. Restricting `f` to
//! one killer tuple per value keeps it a partial homomorphism, so the search
//! only assigns entries of killer tuples and its domain never exceeds
//! `|T|·(r−1)` points for maximum arity `r`.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{solve, ExtensionProblem, SearchLimits, SearchStats, SearchStatus, MAX_TARGET_SIZE};
use crate::error::{Error, Result};
use crate::model::{induced_substructure, power, FiniteStructure, PartialOpMap, RelSource};

use super::{extendable, visit_tuples_through, Extension};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OnePointOutcome {
    Holds,
    /// `pins` is a partial homomorphism with no extension to `missing`.
    Counterexample {
        pins: Vec<(usize, usize)>,
        missing: usize,
    },
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HhOutcome {
    Homogeneous,
    Counterexample { local: Vec<(usize, usize)>, missing: usize },
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KphOutcome {
    Holds,
    /// A local polymorphism with no extension to the argument tuple `missing`.
    Counterexample {
        map: PartialOpMap,
        missing: Vec<usize>,
    },
    Exhausted,
}

/// Searches every source point in ascending order for a one-point counterexample.
///
/// A counterexample is re-verified by refuting its full extension problem.
pub fn one_point_counterexample(
    source: &dyn RelSource,
    target: &FiniteStructure,
    limits: SearchLimits,
) -> Result<(OnePointOutcome, SearchStats)> {
    if source.signature() != target.signature() {
        return Err(Error::SignatureMismatch);
    }
    if target.size() > MAX_TARGET_SIZE {
        return Err(Error::TooLarge {
            what: "search target",
            size: target.size(),
            limit: MAX_TARGET_SIZE,
        });
    }
    let start = Instant::now();
    let mut search = PointSearch::new(source, target, limits, start);
    for x in 0..source.size() {
        match search.run(x) {
            Step::Found => {
                let pins = search.pins();
                let check = solve(&ExtensionProblem::new(source, target).pins(&pins).limits(limits))?;
                search.stats.absorb(&check.stats);
                match check.status {
                    SearchStatus::Unsat => {}
                    SearchStatus::Exhausted => return Ok((OnePointOutcome::Exhausted, search.finish())),
                    SearchStatus::Found(_) => {
                        return Err(Error::Internal(format!(
                            "one-point counterexample at {x} extends after all"
                        )))
                    }
                }
                return Ok((OnePointOutcome::Counterexample { pins, missing: x }, search.finish()));
            }
            Step::Exhausted => return Ok((OnePointOutcome::Exhausted, search.finish())),
            Step::NotFound => {}
        }
    }
    Ok((OnePointOutcome::Holds, search.finish()))
}

/// Whether every local homomorphism of `a` extends to an endomorphism.
///
/// Implicit sources are materialized; at most [`MAX_TARGET_SIZE`] elements.
pub fn is_hom_homogeneous(a: &dyn RelSource, limits: SearchLimits) -> Result<HhOutcome> {
    if a.size() > MAX_TARGET_SIZE {
        return Err(Error::TooLarge {
            what: "structure",
            size: a.size(),
            limit: MAX_TARGET_SIZE,
        });
    }
    let all: Vec<usize> = (0..a.size()).collect();
    let m = induced_substructure(a, &all)?.structure;
    Ok(match one_point_counterexample(&m, &m, limits)?.0 {
        OnePointOutcome::Holds => HhOutcome::Homogeneous,
        OnePointOutcome::Counterexample { pins, missing } => HhOutcome::Counterexample { local: pins, missing },
        OnePointOutcome::Exhausted => HhOutcome::Exhausted,
    })
}

/// Whether every `k`-ary local polymorphism of `a` extends to a polymorphism.
pub fn is_k_ph(a: &FiniteStructure, k: usize, limits: SearchLimits) -> Result<KphOutcome> {
    let p = power(a, k)?;
    let (outcome, _) = one_point_counterexample(&p, a, limits)?;
    Ok(match outcome {
        OnePointOutcome::Holds => KphOutcome::Holds,
        OnePointOutcome::Exhausted => KphOutcome::Exhausted,
        OnePointOutcome::Counterexample { pins, missing } => {
            let map = PartialOpMap::from_entries(k, a.size(), pins.iter().map(|&(e, v)| (p.decode(e), v)))?;
            match extendable(a, &map, limits)?.status {
                Extension::Unsat => {}
                Extension::Exhausted => return Ok(KphOutcome::Exhausted),
                Extension::Found(_) => return Err(Error::Internal("k-ary counterexample extends after all".into())),
            }
            KphOutcome::Counterexample {
                map,
                missing: p.decode(missing),
            }
        }
    })
}

/// The same question answered as homomorphism-homogeneity of `a^k`.
pub fn is_k_ph_via_power(a: &FiniteStructure, k: usize, limits: SearchLimits) -> Result<HhOutcome> {
    is_hom_homogeneous(&power(a, k)?, limits)
}

enum Step {
    Found,
    NotFound,
    Exhausted,
}

const UNSET: u32 = u32::MAX;

struct PointSearch<'a> {
    source: &'a dyn RelSource,
    target: &'a FiniteStructure,
    limits: SearchLimits,
    start: Instant,
    stats: SearchStats,
    x: usize,
    /// Tuples through `x`, each with its relation.
    killers: Vec<(usize, Vec<usize>)>,
    assign: Vec<u32>,
    assigned: Vec<usize>,
    /// Assignments already shown not to lead to a counterexample for `x`.
    refuted: HashSet<Vec<(usize, u32)>>,
}

impl<'a> PointSearch<'a> {
    fn new(source: &'a dyn RelSource, target: &'a FiniteStructure, limits: SearchLimits, start: Instant) -> Self {
        PointSearch {
            source,
            target,
            limits,
            start,
            stats: SearchStats::default(),
            x: 0,
            killers: Vec::new(),
            assign: vec![UNSET; source.size()],
            assigned: Vec::new(),
            refuted: HashSet::new(),
        }
    }

    fn finish(mut self) -> SearchStats {
        self.stats.elapsed = self.start.elapsed();
        self.stats
    }

    fn pins(&self) -> Vec<(usize, usize)> {
        let mut pins: Vec<(usize, usize)> = self.assigned.iter().map(|&y| (y, self.assign[y] as usize)).collect();
        pins.sort_unstable();
        pins
    }

    fn run(&mut self, x: usize) -> Step {
        for &y in &self.assigned {
            self.assign[y] = UNSET;
        }
        self.assigned.clear();
        self.refuted.clear();
        self.x = x;
        self.killers.clear();
        let sig = self.source.signature();
        for rel in 0..sig.len() {
            if self.target.relation(rel).is_full() {
                continue;
            }
            let killers = &mut self.killers;
            visit_tuples_through(self.source, rel, x, &mut |t| killers.push((rel, t.to_vec())));
        }
        // a value that no tuple can kill rules out every counterexample at x
        let n = self.target.size();
        if (0..n).any(|v| !self.killers.iter().any(|(rel, t)| self.can_kill(*rel, t, v))) {
            return Step::NotFound;
        }
        self.dfs()
    }

    /// Whether some values of `t`'s other entries send `t` outside the relation once `x ↦ v`.
    fn can_kill(&self, rel: usize, t: &[usize], v: usize) -> bool {
        let open = self.open_entries(t);
        let mut hit = false;
        self.for_each_completion(rel, t, v, &open, &mut |_| {
            hit = true;
            false
        });
        hit
    }

    fn open_entries(&self, t: &[usize]) -> Vec<usize> {
        let mut open: Vec<usize> = t
            .iter()
            .copied()
            .filter(|&e| e != self.x && self.assign[e] == UNSET)
            .collect();
        open.sort_unstable();
        open.dedup();
        open
    }

    /// Visits every assignment of `open` (ascending, last entry fastest) that
    /// sends `t` outside the relation when `x ↦ v`; the visitor returns false to stop.
    fn for_each_completion(
        &self,
        rel: usize,
        t: &[usize],
        v: usize,
        open: &[usize],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) {
        let n = self.target.size();
        let mut values = vec![0usize; open.len()];
        let mut image = vec![0usize; t.len()];
        loop {
            for (slot, &e) in image.iter_mut().zip(t) {
                *slot = if e == self.x {
                    v
                } else if self.assign[e] != UNSET {
                    self.assign[e] as usize
                } else {
                    values[open.binary_search(&e).expect("open entry")]
                };
            }
            if !self.target.contains(rel, &image) && !visit(&values) {
                return;
            }
            let mut i = open.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                values[i] += 1;
                if values[i] < n {
                    break;
                }
                values[i] = 0;
            }
        }
    }

    fn alive(&self) -> u64 {
        let n = self.target.size();
        let mut alive = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut image = Vec::new();
        for (rel, t) in &self.killers {
            if t.iter().any(|&e| e != self.x && self.assign[e] == UNSET) {
                continue;
            }
            let mut d = alive;
            while d != 0 {
                let v = d.trailing_zeros() as usize;
                d &= d - 1;
                image.clear();
                image.extend(t.iter().map(|&e| if e == self.x { v } else { self.assign[e] as usize }));
                if !self.target.contains(*rel, &image) {
                    alive &= !(1 << v);
                }
            }
        }
        alive
    }

    /// Whether every fully assigned tuple through the new points maps into the target.
    fn consistent(&self, new: &[usize]) -> bool {
        let sig = self.source.signature();
        for &y in new {
            for rel in 0..sig.len() {
                if self.target.relation(rel).is_full() {
                    continue;
                }
                let mut ok = true;
                visit_tuples_through(self.source, rel, y, &mut |t| {
                    if !ok || t.iter().any(|&e| self.assign[e] == UNSET) {
                        return;
                    }
                    let image: Vec<usize> = t.iter().map(|&e| self.assign[e] as usize).collect();
                    ok = self.target.contains(rel, &image);
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn state_key(&self) -> Vec<(usize, u32)> {
        let mut key: Vec<(usize, u32)> = self.assigned.iter().map(|&y| (y, self.assign[y])).collect();
        key.sort_unstable();
        key
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

    fn dfs(&mut self) -> Step {
        if self.over_budget() {
            return Step::Exhausted;
        }
        self.stats.nodes += 1;
        let alive = self.alive();
        if alive == 0 {
            return Step::Found;
        }
        let key = self.state_key();
        if self.refuted.contains(&key) {
            return Step::NotFound;
        }
        let v = alive.trailing_zeros() as usize;
        for ti in 0..self.killers.len() {
            let (rel, t) = self.killers[ti].clone();
            let open = self.open_entries(&t);
            if open.is_empty() {
                continue;
            }
            let mut completions: Vec<Vec<usize>> = Vec::new();
            self.for_each_completion(rel, &t, v, &open, &mut |vals| {
                completions.push(vals.to_vec());
                true
            });
            for vals in completions {
                for (&e, &w) in open.iter().zip(&vals) {
                    self.assign[e] = w as u32;
                    self.assigned.push(e);
                }
                self.stats.propagations += 1;
                let step = if self.consistent(&open) {
                    self.dfs()
                } else {
                    Step::NotFound
                };
                match step {
                    Step::Found => return Step::Found,
                    Step::Exhausted => return Step::Exhausted,
                    Step::NotFound => {}
                }
                for &e in &open {
                    self.assign[e] = UNSET;
                }
                self.assigned.truncate(self.assigned.len() - open.len());
            }
        }
        self.refuted.insert(key);
        Step::NotFound
    }
}
