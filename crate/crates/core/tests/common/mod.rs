//! Brute-force oracles sharing no code with the library beyond reading
//! a structure's tuples. Elements of `A^k` are base-`n` numbers with the
//! first coordinate most significant.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use polyhom::model::{FiniteStructure, PartialOpMap, RawStructure};

/// Arity, tuples in order, and the same tuples for lookup.
pub type BruteRelation = (usize, Vec<Vec<usize>>, HashSet<Vec<usize>>);

#[derive(Clone, Debug)]
pub struct Brute {
    pub n: usize,
    pub rels: Vec<BruteRelation>,
}

pub fn encode(t: &[usize], n: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * n + x)
}

pub fn decode(mut e: usize, k: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    for slot in t.iter_mut().rev() {
        *slot = e % n;
        e /= n;
    }
    t
}

/// Calls `visit` on every tuple of `0..n` of length `len`, lexicographically.
pub fn for_each_tuple(n: usize, len: usize, visit: &mut dyn FnMut(&[usize])) {
    if n == 0 && len > 0 {
        return;
    }
    let mut t = vec![0; len];
    loop {
        visit(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

impl Brute {
    pub fn of(a: &FiniteStructure) -> Self {
        let rels = a
            .relations()
            .iter()
            .map(|r| {
                let list: Vec<Vec<usize>> = r.tuples().to_vec();
                let set = list.iter().cloned().collect();
                (r.arity(), list, set)
            })
            .collect();
        Brute { n: a.size(), rels }
    }

    pub fn from_relations(n: usize, rels: &[(usize, Vec<Vec<usize>>)]) -> Self {
        Brute {
            n,
            rels: rels
                .iter()
                .map(|(r, t)| (*r, t.clone(), t.iter().cloned().collect()))
                .collect(),
        }
    }

    /// `A^k` with its relations listed tuple by tuple.
    pub fn power(&self, k: usize) -> Brute {
        let size = self.n.pow(k as u32);
        let rels = self
            .rels
            .iter()
            .map(|(r, list, _)| {
                let mut out = Vec::new();
                // one relation tuple per coordinate of A^k
                for_each_tuple(list.len(), k, &mut |pick| {
                    let t: Vec<usize> = (0..*r)
                        .map(|i| pick.iter().fold(0, |acc, &c| acc * self.n + list[c][i]))
                        .collect();
                    out.push(t);
                });
                (*r, out)
            })
            .collect::<Vec<_>>();
        Brute::from_relations(size, &rels)
    }

    pub fn is_homomorphism_to(&self, target: &Brute, map: &[usize]) -> bool {
        self.rels.iter().zip(&target.rels).all(|((_, list, _), (_, _, set))| {
            list.iter()
                .all(|t| set.contains(&t.iter().map(|&e| map[e]).collect::<Vec<_>>()))
        })
    }

    /// Partial homomorphism from `self` into `target`, for `map[x] = None` undefined.
    pub fn is_partial_hom_to(&self, target: &Brute, map: &[Option<usize>]) -> bool {
        self.rels.iter().zip(&target.rels).all(|((_, list, _), (_, _, set))| {
            list.iter().all(|t| {
                let image: Option<Vec<usize>> = t.iter().map(|&e| map[e]).collect();
                image.is_none_or(|i| set.contains(&i))
            })
        })
    }

    /// Every polymorphism `A^k → A` as a table over the encoded power.
    pub fn polymorphisms(&self, k: usize) -> Vec<Vec<usize>> {
        let p = self.power(k);
        let mut out = Vec::new();
        for_each_tuple(self.n, p.n, &mut |table| {
            if p.is_homomorphism_to(self, table) {
                out.push(table.to_vec());
            }
        });
        out
    }

    /// Every matrix of domain rows whose columns lie in a relation maps into it.
    pub fn is_partial_polymorphism(&self, f: &PartialOpMap) -> bool {
        let k = f.arity();
        let rows: Vec<(&[usize], usize)> = f.entries().collect();
        if rows.is_empty() {
            return true;
        }
        let mut ok = true;
        for (r, _, set) in &self.rels {
            for_each_tuple(rows.len(), *r, &mut |pick| {
                if !ok {
                    return;
                }
                let columns_in = (0..k).all(|j| set.contains(&pick.iter().map(|&p| rows[p].0[j]).collect::<Vec<_>>()));
                if columns_in && !set.contains(&pick.iter().map(|&p| rows[p].1).collect::<Vec<_>>()) {
                    ok = false;
                }
            });
        }
        ok
    }

    /// Whether every partial homomorphism `self ⇀ self` extends to an endomorphism.
    pub fn is_hom_homogeneous(&self) -> bool {
        self.hh_into(self)
    }

    /// Whether every `k`-ary partial polymorphism extends.
    pub fn is_k_ph(&self, k: usize) -> bool {
        self.power(k).hh_into(self)
    }

    /// Like [`Brute::is_hom_homogeneous`] for maps from `self` into `target`.
    pub fn hh_into(&self, target: &Brute) -> bool {
        let (size, n) = (self.n, target.n);
        let mut restrictions: HashSet<Vec<usize>> = HashSet::new();
        for_each_tuple(n, size, &mut |g| {
            if !self.is_homomorphism_to(target, g) {
                return;
            }
            for mask in 0u32..1 << size {
                restrictions.insert((0..size).map(|x| if mask >> x & 1 == 1 { g[x] } else { n }).collect());
            }
        });
        let mut ok = true;
        for_each_tuple(n + 1, size, &mut |f| {
            if !ok || restrictions.contains(f) {
                return;
            }
            let map: Vec<Option<usize>> = f.iter().map(|&v| (v < n).then_some(v)).collect();
            if self.is_partial_hom_to(target, &map) {
                ok = false;
            }
        });
        ok
    }

    /// Backtracking with forward checking for a homomorphism `self → target`
    /// agreeing with `pins`; the unassigned element with fewest values goes next.
    pub fn extends_to(&self, target: &Brute, pins: &[(usize, usize)]) -> bool {
        let size = self.n;
        let mut through: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); size];
        for (rel, (_, list, _)) in self.rels.iter().enumerate() {
            for t in list {
                let mut seen: Vec<usize> = t.clone();
                seen.sort_unstable();
                seen.dedup();
                for e in seen {
                    through[e].push((rel, t));
                }
            }
        }
        let mut domains: Vec<Vec<usize>> = vec![(0..target.n).collect(); size];
        for &(x, v) in pins {
            if !domains[x].contains(&v) {
                return false;
            }
            domains[x] = vec![v];
        }
        let mut assign: Vec<Option<usize>> = vec![None; size];
        search(&through, target, &mut domains, &mut assign)
    }

    /// Whether `f` extends to a polymorphism, by backtracking over `A^k`.
    pub fn extends(&self, f: &PartialOpMap) -> bool {
        let pins: Vec<(usize, usize)> = f.entries().map(|(args, v)| (encode(args, self.n), v)).collect();
        self.power(f.arity()).extends_to(self, &pins)
    }

    /// `f` is a partial polymorphism and no value at `missing` keeps it one.
    pub fn one_point_refutes(&self, f: &PartialOpMap, missing: &[usize]) -> bool {
        if !self.is_partial_polymorphism(f) || f.get(missing).is_some() {
            return false;
        }
        (0..self.n).all(|v| {
            let mut g = f.clone();
            g.insert(missing.to_vec(), v).expect("in range");
            !self.is_partial_polymorphism(&g)
        })
    }

    /// `f` has no extension to the substructure of `A^k` on its domain plus `extra`.
    pub fn refutes_on_support(&self, f: &PartialOpMap, extra: &[Vec<usize>]) -> bool {
        if !self.is_partial_polymorphism(f) {
            return false;
        }
        let free: Vec<&Vec<usize>> = extra.iter().filter(|t| f.get(t).is_none()).collect();
        let mut found = false;
        for_each_tuple(self.n, free.len(), &mut |values| {
            if found {
                return;
            }
            let mut g = f.clone();
            for (t, &v) in free.iter().zip(values) {
                g.insert((*t).clone(), v).expect("in range");
            }
            found = self.is_partial_polymorphism(&g);
        });
        !found
    }

    /// Tuples of `A^m` satisfying every atom that all of `tau` satisfies,
    /// equality atoms included.
    pub fn qf_type_closure(&self, m: usize, tau: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
        let mut atoms: Vec<(Option<usize>, Vec<usize>)> = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if tau.iter().all(|t| t[i] == t[j]) {
                    atoms.push((None, vec![i, j]));
                }
            }
        }
        for (rel, (r, _, set)) in self.rels.iter().enumerate() {
            for_each_tuple(m, *r, &mut |vars| {
                if tau
                    .iter()
                    .all(|t| set.contains(&vars.iter().map(|&v| t[v]).collect::<Vec<_>>()))
                {
                    atoms.push((Some(rel), vars.to_vec()));
                }
            });
        }
        let mut out = BTreeSet::new();
        for_each_tuple(self.n, m, &mut |b| {
            let ok = atoms.iter().all(|(rel, vars)| match rel {
                None => b[vars[0]] == b[vars[1]],
                Some(rel) => self.rels[*rel]
                    .2
                    .contains(&vars.iter().map(|&v| b[v]).collect::<Vec<_>>()),
            });
            if ok {
                out.insert(b.to_vec());
            }
        });
        out
    }

    /// Images of `tau` under its column maps that extend to polymorphisms.
    pub fn gamma_closure(&self, m: usize, tau: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        if tau.is_empty() {
            return out;
        }
        let k = tau.len();
        for_each_tuple(self.n, m, &mut |b| {
            let mut f = PartialOpMap::new(k, self.n).expect("valid");
            let mut consistent = true;
            for (i, &bi) in b.iter().enumerate() {
                let row: Vec<usize> = tau.iter().map(|t| t[i]).collect();
                match f.get(&row) {
                    Some(v) if v != bi => consistent = false,
                    Some(_) => {}
                    None => f.insert(row, bi).expect("in range"),
                }
            }
            if consistent && self.is_partial_polymorphism(&f) && self.extends(&f) {
                out.insert(b.to_vec());
            }
        });
        out
    }
}

pub fn structure(name: &str, n: usize, rels: &[(&str, usize, Vec<Vec<usize>>)]) -> FiniteStructure {
    let mut raw = RawStructure::new(name, n);
    for (r, arity, tuples) in rels {
        raw = raw.relation(*r, *arity, tuples.clone());
    }
    polyhom::model::validate_structure(&raw).expect("valid structure")
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> FiniteStructure {
    let mut t = Vec::new();
    for &(a, b) in edges {
        t.push(vec![a, b]);
        t.push(vec![b, a]);
    }
    structure("g", n, &[("e", 2, t)])
}

/// The order relation generated by `covers`, reflexive pairs included.
pub fn poset(n: usize, covers: &[(usize, usize)]) -> FiniteStructure {
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in covers {
        le[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let t = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| le[i][j])
        .map(|(i, j)| vec![i, j])
        .collect();
    structure("p", n, &[("le", 2, t)])
}

pub fn bowtie() -> FiniteStructure {
    poset(4, &[(0, 2), (0, 3), (1, 2), (1, 3)])
}

pub fn adjacency(a: &FiniteStructure) -> Vec<Vec<bool>> {
    let n = a.size();
    let mut m = vec![vec![false; n]; n];
    for t in a.relation(0).tuples() {
        m[t[0]][t[1]] = true;
    }
    m
}

/// All labeled graphs on `n` vertices, by edge mask over pairs `i < j`.
pub fn all_graphs(n: usize) -> Vec<FiniteStructure> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            graph(n, &edges)
        })
        .collect()
}

/// All binary relations on `0..n` that are reflexive (or irreflexive when
/// `strict`), antisymmetric and transitive.
pub fn all_orders(n: usize, strict: bool) -> Vec<FiniteStructure> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut r = vec![vec![false; n]; n];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            r[a][b] = mask >> i & 1 == 1;
        }
        let antisymmetric = (0..n).all(|a| (0..n).all(|b| !(r[a][b] && r[b][a])));
        let transitive = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(r[a][b] && r[b][c]) || r[a][c])));
        if !(antisymmetric && transitive) {
            continue;
        }
        if !strict {
            for (i, row) in r.iter_mut().enumerate() {
                row[i] = true;
            }
        }
        let t = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| r[i][j])
            .map(|(i, j)| vec![i, j])
            .collect();
        out.push(structure(
            if strict { "s" } else { "p" },
            n,
            &[(if strict { "lt" } else { "le" }, 2, t)],
        ));
    }
    out
}

pub fn is_antichain(le: &[Vec<bool>]) -> bool {
    (0..le.len()).all(|a| (0..le.len()).all(|b| a == b || !le[a][b]))
}

/// Every pair has a least upper and a greatest lower bound.
pub fn is_lattice(le: &[Vec<bool>]) -> bool {
    let n = le.len();
    let least = |set: Vec<usize>| set.iter().any(|&x| set.iter().all(|&y| le[x][y]));
    let greatest = |set: Vec<usize>| set.iter().any(|&x| set.iter().all(|&y| le[y][x]));
    (0..n).all(|a| {
        (0..n).all(|b| {
            let upper: Vec<usize> = (0..n).filter(|&c| le[a][c] && le[b][c]).collect();
            let lower: Vec<usize> = (0..n).filter(|&c| le[c][a] && le[c][b]).collect();
            least(upper) && greatest(lower)
        })
    })
}

/// Edgeless, or every vertex has exactly one neighbour and no loops.
pub fn is_edgeless_or_matching(adj: &[Vec<bool>]) -> bool {
    let degrees: Vec<usize> = adj.iter().map(|row| row.iter().filter(|&&x| x).count()).collect();
    let loops = (0..adj.len()).any(|i| adj[i][i]);
    !loops && (degrees.iter().all(|&d| d == 0) || degrees.iter().all(|&d| d == 1))
}

/// Values of `t`'s single open element that keep `t` in the relation,
/// or `None` when `t` has zero or several open elements.
fn supported(
    t: &[usize],
    rel: usize,
    target: &Brute,
    domains: &[Vec<usize>],
    assign: &[Option<usize>],
) -> Option<(usize, Vec<usize>)> {
    let mut open = t.iter().filter(|&&e| assign[e].is_none());
    let y = *open.next()?;
    if open.any(|&e| e != y) {
        return None;
    }
    let keep = domains[y]
        .iter()
        .copied()
        .filter(|&v| {
            let image: Vec<usize> = t.iter().map(|&e| assign[e].unwrap_or(v)).collect();
            target.rels[rel].2.contains(&image)
        })
        .collect();
    Some((y, keep))
}

/// Assigns `v` to `x` and forward-checks the tuples through `x`; every
/// overwritten domain goes on `trail`.
fn assign_and_check(
    x: usize,
    v: usize,
    through: &[Vec<(usize, &Vec<usize>)>],
    target: &Brute,
    domains: &mut [Vec<usize>],
    assign: &mut [Option<usize>],
    trail: &mut Vec<(usize, Vec<usize>)>,
) -> bool {
    assign[x] = Some(v);
    trail.push((x, std::mem::replace(&mut domains[x], vec![v])));
    for (rel, t) in &through[x] {
        if t.iter().all(|e| assign[*e].is_some()) {
            let image: Vec<usize> = t.iter().map(|e| assign[*e].expect("assigned")).collect();
            if !target.rels[*rel].2.contains(&image) {
                return false;
            }
        } else if let Some((y, keep)) = supported(t, *rel, target, domains, assign) {
            if keep.is_empty() {
                return false;
            }
            trail.push((y, std::mem::replace(&mut domains[y], keep)));
        }
    }
    true
}

/// Depth-first search with an explicit stack; sources may have tens of
/// thousands of elements.
fn search(
    through: &[Vec<(usize, &Vec<usize>)>],
    target: &Brute,
    domains: &mut [Vec<usize>],
    assign: &mut [Option<usize>],
) -> bool {
    // each frame: variable, values still to try, trail length before the variable was set
    let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    let mut trail: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut descend = true;
    loop {
        if descend {
            let Some(x) = (0..assign.len())
                .filter(|&x| assign[x].is_none())
                .min_by_key(|&x| domains[x].len())
            else {
                return true;
            };
            let mut values = domains[x].clone();
            values.reverse();
            stack.push((x, values, trail.len()));
        }
        let Some((x, values, mark)) = stack.last_mut() else {
            return false;
        };
        assign[*x] = None;
        while trail.len() > *mark {
            let (y, old) = trail.pop().expect("above mark");
            domains[y] = old;
        }
        match values.pop() {
            Some(v) => descend = assign_and_check(*x, v, through, target, domains, assign, &mut trail),
            None => {
                stack.pop();
                descend = false;
            }
        }
    }
}
