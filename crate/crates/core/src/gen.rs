//! Exhaustive and seeded random generation of labeled test structures.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::enumerate_meet_complete_sublattices;
use crate::error::{Error, Result};
use crate::model::families::order_from_covers;
use crate::model::{canonical_structure, FamilyData, FiniteStructure, Partition, RawStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenFamily {
    Graph,
    Poset,
    StrictPoset,
    EqLattice,
    /// One binary relation on two points.
    N2Binary,
}

impl GenFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            GenFamily::Graph => "graph",
            GenFamily::Poset => "poset",
            GenFamily::StrictPoset => "strict_poset",
            GenFamily::EqLattice => "eq_lattice",
            GenFamily::N2Binary => "n2_binary",
        }
    }

    /// Largest size for exhaustive generation.
    pub fn exhaustive_limit(self) -> usize {
        match self {
            GenFamily::Graph => 5,
            GenFamily::Poset | GenFamily::StrictPoset | GenFamily::EqLattice => 4,
            GenFamily::N2Binary => 2,
        }
    }

    /// Largest size for random generation.
    pub fn random_limit(self) -> usize {
        match self {
            GenFamily::Graph | GenFamily::Poset | GenFamily::StrictPoset => 64,
            GenFamily::EqLattice => 12,
            GenFamily::N2Binary => 2,
        }
    }
}

impl fmt::Display for GenFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n2-binary" | "n2_binary" | "n2binary" => Ok(GenFamily::N2Binary),
            _ => Ok(match s.parse::<crate::model::Family>()? {
                crate::model::Family::Graph => GenFamily::Graph,
                crate::model::Family::Poset => GenFamily::Poset,
                crate::model::Family::StrictPoset => GenFamily::StrictPoset,
                crate::model::Family::EqLattice => GenFamily::EqLattice,
            }),
        }
    }
}

fn too_large(what: &'static str, size: usize, limit: usize) -> Error {
    Error::TooLarge { what, size, limit }
}

/// Every labeled instance of size `n`, each once, in ascending order of its
/// defining bitmask.
pub fn exhaustive(family: GenFamily, n: usize) -> Result<Vec<FiniteStructure>> {
    if n == 0 {
        return Err(Error::InvalidArgument("size must be at least 1".into()));
    }
    let limit = family.exhaustive_limit();
    if n > limit {
        return Err(too_large("exhaustive generation size", n, limit));
    }
    let name = |i: usize| format!("{}{n}_{i}", family.as_str());
    let mut out = Vec::new();
    match family {
        GenFamily::Graph => {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            for mask in 0u64..1 << pairs.len() {
                let edges = select(&pairs, mask);
                out.push(canonical_structure(&FamilyData::Graph { n, edges })?.with_name(name(out.len())));
            }
        }
        GenFamily::Poset | GenFamily::StrictPoset => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
                .collect();
            for mask in 0u64..1 << pairs.len() {
                let lt = select(&pairs, mask);
                if !is_strict_order(n, &lt) {
                    continue;
                }
                let s = strict_to_structure(family, n, lt)?;
                out.push(s.with_name(name(out.len())));
            }
        }
        GenFamily::EqLattice => {
            let list = enumerate_meet_complete_sublattices(n, usize::MAX)?;
            for partitions in list.families {
                let s = canonical_structure(&FamilyData::EqLattice { n, partitions })?;
                out.push(s.with_name(name(out.len())));
            }
        }
        GenFamily::N2Binary => {
            if n != 2 {
                return Err(Error::InvalidArgument(
                    "n2-binary structures have exactly 2 points".into(),
                ));
            }
            let all = [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
            for mask in 0u64..16 {
                let tuples = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone());
                let raw = RawStructure::new(name(mask as usize), 2).relation("r", 2, tuples);
                out.push(crate::model::validate_structure(&raw)?);
            }
        }
    }
    Ok(out)
}

fn select(pairs: &[(usize, usize)], mask: u64) -> Vec<(usize, usize)> {
    pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .collect()
}

fn is_strict_order(n: usize, lt: &[(usize, usize)]) -> bool {
    let mut m = vec![vec![false; n]; n];
    for &(a, b) in lt {
        m[a][b] = true;
    }
    (0..n).all(|a| (0..n).all(|b| !(m[a][b] && m[b][a]) && (0..n).all(|c| !(m[a][b] && m[b][c]) || m[a][c])))
}

fn strict_to_structure(family: GenFamily, n: usize, lt: Vec<(usize, usize)>) -> Result<FiniteStructure> {
    if family == GenFamily::StrictPoset {
        return canonical_structure(&FamilyData::StrictPoset { n, lt });
    }
    let mut le = lt;
    le.extend((0..n).map(|a| (a, a)));
    canonical_structure(&FamilyData::Poset { n, le })
}

/// `count` instances drawn from a generator seeded with `seed`; the same
/// arguments always produce the same structures.
pub fn random(family: GenFamily, n: usize, count: usize, seed: u64) -> Result<Vec<FiniteStructure>> {
    if n == 0 {
        return Err(Error::InvalidArgument("size must be at least 1".into()));
    }
    let limit = family.random_limit();
    if n > limit {
        return Err(too_large("random generation size", n, limit));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let name = format!("{}{n}_r{seed}_{i}", family.as_str());
        let s = match family {
            GenFamily::Graph => {
                let edges = (0..n)
                    .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                canonical_structure(&FamilyData::Graph { n, edges })?
            }
            GenFamily::Poset | GenFamily::StrictPoset => {
                // a random DAG on a random labeling, closed transitively
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let covers: Vec<(usize, usize)> = (0..n)
                    .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                    .filter(|_| rng.gen_bool(0.3))
                    .map(|(a, b)| (perm[a], perm[b]))
                    .collect();
                let lt = order_from_covers(n, &covers)
                    .into_iter()
                    .filter(|(a, b)| a != b)
                    .collect();
                strict_to_structure(family, n, lt)?
            }
            GenFamily::EqLattice => {
                let seeds: Vec<Partition> = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                        Partition::from_labels(&labels).expect("labels in range")
                    })
                    .collect();
                let partitions = generated_sublattice(seeds);
                canonical_structure(&FamilyData::EqLattice { n, partitions })?
            }
            GenFamily::N2Binary => {
                let all = [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
                let mask: u8 = rng.gen_range(0..16);
                let tuples = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone());
                crate::model::validate_structure(&RawStructure::new(name.clone(), 2).relation("r", 2, tuples))?
            }
        };
        out.push(s.with_name(name));
    }
    Ok(out)
}

/// Closes a set of partitions under pairwise meets and joins.
pub fn generated_sublattice(seeds: Vec<Partition>) -> Vec<Partition> {
    let mut set: std::collections::BTreeSet<Partition> = seeds.into_iter().collect();
    loop {
        let items: Vec<Partition> = set.iter().cloned().collect();
        let before = set.len();
        for a in &items {
            for b in &items {
                set.insert(a.meet(b));
                set.insert(a.join(b));
            }
        }
        if set.len() == before {
            return set.into_iter().collect();
        }
    }
}
