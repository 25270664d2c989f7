use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An explicit `m`-ary relation over `0..carrier`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationSet {
    arity: usize,
    carrier: usize,
    tuples: BTreeSet<Vec<usize>>,
}

impl RelationSet {
    pub fn new(arity: usize, carrier: usize, tuples: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut set = RelationSet::empty(arity, carrier)?;
        for t in tuples {
            set.insert(t)?;
        }
        Ok(set)
    }

    pub fn empty(arity: usize, carrier: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("relation arity must be at least 1".into()));
        }
        Ok(RelationSet {
            arity,
            carrier,
            tuples: BTreeSet::new(),
        })
    }

    /// All of `A^arity`.
    pub fn full(arity: usize, carrier: usize) -> Result<Self> {
        let count = tuple_count(arity, carrier)?;
        RelationSet::new(arity, carrier, (0..count).map(|i| decode_tuple(i, arity, carrier)))
    }

    /// `{(a, …, a)}` for every element `a`.
    pub fn diagonal(arity: usize, carrier: usize) -> Result<Self> {
        RelationSet::new(arity, carrier, (0..carrier).map(|a| vec![a; arity]))
    }

    pub fn insert(&mut self, tuple: Vec<usize>) -> Result<bool> {
        if tuple.len() != self.arity {
            return Err(Error::InvalidArgument(format!(
                "tuple {tuple:?} has length {}, expected {}",
                tuple.len(),
                self.arity
            )));
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= self.carrier) {
            return Err(Error::InvalidArgument(format!("entry {e} out of range")));
        }
        Ok(self.tuples.insert(tuple))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples.iter()
    }

    pub fn is_subset(&self, other: &RelationSet) -> bool {
        self.arity == other.arity && self.tuples.is_subset(&other.tuples)
    }

    /// Bitmask over `A^arity` in encoding order; only for `carrier^arity <= 64`.
    pub fn to_mask(&self) -> Option<u64> {
        let count = tuple_count(self.arity, self.carrier).ok()?;
        if count > 64 {
            return None;
        }
        Some(
            self.tuples
                .iter()
                .fold(0u64, |m, t| m | 1 << encode_tuple(t, self.carrier)),
        )
    }

    pub fn from_mask(arity: usize, carrier: usize, mask: u64) -> Result<Self> {
        let count = tuple_count(arity, carrier)?;
        RelationSet::new(
            arity,
            carrier,
            (0..count.min(64))
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| decode_tuple(i, arity, carrier)),
        )
    }
}

/// `carrier^arity`, or an overflow error.
pub fn tuple_count(arity: usize, carrier: usize) -> Result<usize> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| carrier.checked_pow(a))
        .ok_or(Error::Overflow {
            base: carrier,
            exponent: arity,
        })
}

/// Base-`carrier` index of a tuple, most significant entry first.
pub fn encode_tuple(tuple: &[usize], carrier: usize) -> usize {
    tuple.iter().fold(0, |acc, &c| acc * carrier + c)
}

pub fn decode_tuple(mut index: usize, arity: usize, carrier: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % carrier;
        index /= carrier;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_diagonal() {
        let f = RelationSet::full(2, 3).unwrap();
        assert_eq!(f.len(), 9);
        let d = RelationSet::diagonal(2, 3).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.is_subset(&f));
    }

    #[test]
    fn mask_round_trip() {
        let r = RelationSet::new(2, 2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let m = r.to_mask().unwrap();
        assert_eq!(m, 0b1011);
        assert_eq!(RelationSet::from_mask(2, 2, m).unwrap(), r);
    }

    #[test]
    fn rejects_bad_tuples() {
        let mut r = RelationSet::empty(2, 2).unwrap();
        assert!(r.insert(vec![0, 2]).is_err());
        assert!(r.insert(vec![0]).is_err());
        assert!(RelationSet::empty(0, 2).is_err());
    }
}
