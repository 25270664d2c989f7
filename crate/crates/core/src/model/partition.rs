use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `0..n`, stored as block labels normalized so that labels
/// appear in order of first occurrence. Two partitions are equal iff their
/// label vectors are.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    labels: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(labels: Vec<usize>) -> Result<Self> {
        Partition::from_labels(&labels)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.labels
    }
}

impl Partition {
    /// Any labeling; labels are renumbered.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("partition of an empty set".into()));
        }
        let mut map = std::collections::HashMap::new();
        let labels = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Ok(Partition { labels })
    }

    /// Blocks must cover `0..n` exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= n || labels[e] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "element {e} is out of range or appears in two blocks"
                    )));
                }
                labels[e] = b;
            }
        }
        if let Some(e) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidArgument(format!("element {e} is in no block")));
        }
        Partition::from_labels(&labels)
    }

    /// Reads an equivalence relation given as a pair list; `None` if it is not one.
    pub fn from_pairs(n: usize, pairs: &[Vec<usize>]) -> Option<Self> {
        let mut rel = vec![vec![false; n]; n];
        for p in pairs {
            rel[p[0]][p[1]] = true;
        }
        let labels: Vec<usize> = (0..n)
            .map(|a| (0..n).find(|&b| rel[a][b]).unwrap_or(usize::MAX))
            .collect();
        if labels.contains(&usize::MAX) {
            return None;
        }
        let p = Partition::from_labels(&labels).ok()?;
        (p.pairs() == sorted_pairs(pairs)).then_some(p)
    }

    /// The partition into singletons.
    pub fn discrete(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
        }
    }

    /// The one-block partition.
    pub fn full(n: usize) -> Self {
        Partition { labels: vec![0; n] }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (e, &l) in self.labels.iter().enumerate() {
            out[l].push(e);
        }
        out
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// The equivalence relation as sorted pairs.
    pub fn pairs(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.related(a, b) {
                    out.push(vec![a, b]);
                }
            }
        }
        out
    }

    /// True when every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let n = self.size();
        (0..n).all(|a| (0..n).all(|b| !self.related(a, b) || other.related(a, b)))
    }

    /// Intersection of the equivalence relations.
    pub fn meet(&self, other: &Partition) -> Partition {
        let n = self.size();
        let mut labels = Vec::with_capacity(n);
        let mut seen: Vec<(usize, usize)> = Vec::new();
        for e in 0..n {
            let key = (self.labels[e], other.labels[e]);
            let l = match seen.iter().position(|&k| k == key) {
                Some(i) => i,
                None => {
                    seen.push(key);
                    seen.len() - 1
                }
            };
            labels.push(l);
        }
        Partition { labels }
    }

    /// Transitive closure of the union.
    pub fn join(&self, other: &Partition) -> Partition {
        let n = self.size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for p in [self, other] {
            let mut first = vec![usize::MAX; n];
            for e in 0..n {
                let l = p.labels[e];
                if first[l] == usize::MAX {
                    first[l] = e;
                } else {
                    let (a, b) = (find(&mut parent, first[l]), find(&mut parent, e));
                    parent[a] = b;
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|e| find(&mut parent, e)).collect();
        Partition::from_labels(&roots).expect("nonempty")
    }

    /// Relational composition `self ∘ other` as a boolean matrix:
    /// `(a, c)` is in it iff `a self b` and `b other c` for some `b`.
    pub fn compose(&self, other: &Partition) -> Vec<Vec<bool>> {
        let n = self.size();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|c| (0..n).any(|b| self.related(a, b) && other.related(b, c)))
                    .collect()
            })
            .collect()
    }

    /// A pair `(a, c)` in one composition order but not the other, if any.
    pub fn permutation_witness(&self, other: &Partition) -> Option<(usize, usize)> {
        let (x, y) = (self.compose(other), other.compose(self));
        let n = self.size();
        (0..n)
            .flat_map(|a| (0..n).map(move |c| (a, c)))
            .find(|&(a, c)| x[a][c] != y[a][c])
    }
}

impl fmt::Display for Partition {
    /// Blocks separated by `|`, e.g. `01|23`; elements comma-separated above 9.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.size() > 10 { "," } else { "" };
        let text: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| b.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(sep))
            .collect();
        f.write_str(&text.join("|"))
    }
}

fn sorted_pairs(pairs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut v = pairs.to_vec();
    v.sort();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(blocks: &[&[usize]]) -> Partition {
        let n = blocks.iter().map(|b| b.len()).sum();
        Partition::from_blocks(n, &blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn labels_are_normalized() {
        let a = Partition::from_labels(&[5, 5, 2, 2]).unwrap();
        assert_eq!(a.labels(), &[0, 0, 1, 1]);
        assert_eq!(a, p(&[&[0, 1], &[2, 3]]));
        assert_eq!(a.to_string(), "01|23");
    }

    #[test]
    fn meet_and_join_of_m3_atoms() {
        let x = p(&[&[0, 1], &[2, 3]]);
        let y = p(&[&[0, 2], &[1, 3]]);
        assert_eq!(x.meet(&y), Partition::discrete(4));
        assert_eq!(x.join(&y), Partition::full(4));
        assert!(x.permutation_witness(&y).is_none());
    }

    #[test]
    fn non_permuting_pair() {
        let x = p(&[&[0, 1], &[2]]);
        let y = p(&[&[0], &[1, 2]]);
        assert!(x.permutation_witness(&y).is_some());
    }

    #[test]
    fn pair_round_trip() {
        let x = p(&[&[0, 3], &[1], &[2]]);
        assert_eq!(Partition::from_pairs(4, &x.pairs()), Some(x.clone()));
        assert_eq!(x.pairs().len(), 6);
        assert!(Partition::from_pairs(2, &[vec![0, 1]]).is_none());
    }

    #[test]
    fn refinement() {
        let d = Partition::discrete(3);
        let c = p(&[&[0, 1], &[2]]);
        assert!(d.refines(&c));
        assert!(c.refines(&Partition::full(3)));
        assert!(!c.refines(&d));
    }
}
