use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::relset::{decode_tuple, encode_tuple, tuple_count};

/// A finite partial `k`-ary operation on `0..carrier`.
///
/// Keys are argument tuples (rows of the domain matrix); iteration is in
/// lexicographic key order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "OpMapRepr", try_from = "OpMapRepr")]
pub struct PartialOpMap {
    arity: usize,
    carrier: usize,
    entries: BTreeMap<Vec<usize>, usize>,
}

#[derive(Serialize, Deserialize)]
struct OpMapRepr {
    arity: usize,
    carrier: usize,
    entries: Vec<OpEntry>,
}

#[derive(Serialize, Deserialize)]
struct OpEntry {
    args: Vec<usize>,
    value: usize,
}

impl From<PartialOpMap> for OpMapRepr {
    fn from(f: PartialOpMap) -> Self {
        OpMapRepr {
            arity: f.arity,
            carrier: f.carrier,
            entries: f
                .entries
                .into_iter()
                .map(|(args, value)| OpEntry { args, value })
                .collect(),
        }
    }
}

impl TryFrom<OpMapRepr> for PartialOpMap {
    type Error = Error;

    fn try_from(r: OpMapRepr) -> Result<Self> {
        PartialOpMap::from_entries(r.arity, r.carrier, r.entries.into_iter().map(|e| (e.args, e.value)))
    }
}

impl PartialOpMap {
    pub fn new(arity: usize, carrier: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("operation arity must be at least 1".into()));
        }
        Ok(PartialOpMap {
            arity,
            carrier,
            entries: BTreeMap::new(),
        })
    }

    pub fn from_entries(
        arity: usize,
        carrier: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, usize)>,
    ) -> Result<Self> {
        let mut f = PartialOpMap::new(arity, carrier)?;
        for (k, v) in entries {
            f.insert(k, v)?;
        }
        Ok(f)
    }

    /// Adds `args ↦ value`. Re-inserting the same pair is a no-op; a different value is an error.
    pub fn insert(&mut self, args: Vec<usize>, value: usize) -> Result<()> {
        if args.len() != self.arity {
            return Err(Error::InvalidArgument(format!(
                "argument tuple {args:?} has length {}, expected {}",
                args.len(),
                self.arity
            )));
        }
        if let Some(&e) = args.iter().chain([&value]).find(|&&e| e >= self.carrier) {
            return Err(Error::InvalidArgument(format!("entry {e} out of range")));
        }
        match self.entries.get(&args) {
            Some(&old) if old != value => Err(Error::InvalidArgument(format!(
                "conflicting values {old} and {value} for {args:?}"
            ))),
            _ => {
                self.entries.insert(args, value);
                Ok(())
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, args: &[usize]) -> Option<usize> {
        self.entries.get(args).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize], usize)> {
        self.entries.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn rows(&self) -> Vec<&[usize]> {
        self.entries.keys().map(|k| k.as_slice()).collect()
    }
}

/// Removes duplicate columns of the domain matrix.
///
/// Returns `g` whose arity is the number of distinct columns (kept in order of
/// first appearance) and the map from each original coordinate to its kept
/// column, so that `f(x) = g(x[kept_0], x[kept_1], …)` on the domain of `f`.
pub fn reduce_columns(f: &PartialOpMap) -> Result<(PartialOpMap, Vec<usize>)> {
    if f.is_empty() {
        return Err(Error::InvalidArgument("cannot reduce an empty partial map".into()));
    }
    let rows = f.rows();
    let column = |j: usize| -> Vec<usize> { rows.iter().map(|r| r[j]).collect() };
    let mut kept: Vec<Vec<usize>> = Vec::new();
    let mut kept_coord: Vec<usize> = Vec::new();
    let mut column_map = Vec::with_capacity(f.arity());
    for j in 0..f.arity() {
        let c = column(j);
        match kept.iter().position(|k| *k == c) {
            Some(i) => column_map.push(i),
            None => {
                column_map.push(kept.len());
                kept.push(c);
                kept_coord.push(j);
            }
        }
    }
    let g = PartialOpMap::from_entries(
        kept.len(),
        f.carrier(),
        f.entries()
            .map(|(args, v)| (kept_coord.iter().map(|&j| args[j]).collect(), v)),
    )?;
    Ok((g, column_map))
}

/// A total operation `A^k → A`, stored as a table in power-element encoding order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionTable {
    arity: usize,
    carrier: usize,
    table: Vec<usize>,
}

impl FunctionTable {
    pub fn new(arity: usize, carrier: usize, table: Vec<usize>) -> Result<Self> {
        let expected = tuple_count(arity, carrier)?;
        if arity == 0 || table.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "table of length {} does not describe an operation of arity {arity} on {carrier} points",
                table.len()
            )));
        }
        if let Some(&e) = table.iter().find(|&&e| e >= carrier) {
            return Err(Error::InvalidArgument(format!("value {e} out of range")));
        }
        Ok(FunctionTable { arity, carrier, table })
    }

    /// The `i`-th projection of arity `arity`.
    pub fn projection(arity: usize, carrier: usize, i: usize) -> Result<Self> {
        let count = tuple_count(arity, carrier)?;
        FunctionTable::new(
            arity,
            carrier,
            (0..count).map(|x| decode_tuple(x, arity, carrier)[i]).collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn eval(&self, args: &[usize]) -> usize {
        self.table[encode_tuple(args, self.carrier)]
    }

    pub fn eval_index(&self, index: usize) -> usize {
        self.table[index]
    }

    pub fn extends(&self, f: &PartialOpMap) -> bool {
        f.arity() == self.arity && f.entries().all(|(args, v)| self.eval(args) == v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_columns_collapse() {
        let f = PartialOpMap::from_entries(3, 2, [(vec![0, 0, 1], 0), (vec![1, 1, 0], 1)]).unwrap();
        let (g, map) = reduce_columns(&f).unwrap();
        assert_eq!(g.arity(), 2);
        assert_eq!(map, vec![0, 0, 1]);
        assert_eq!(g.get(&[0, 1]), Some(0));
        assert_eq!(g.get(&[1, 0]), Some(1));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn unary_is_unchanged() {
        let f = PartialOpMap::from_entries(1, 3, [(vec![0], 2), (vec![2], 1)]).unwrap();
        let (g, map) = reduce_columns(&f).unwrap();
        assert_eq!(g, f);
        assert_eq!(map, vec![0]);
    }

    #[test]
    fn equal_columns_give_unary() {
        let f = PartialOpMap::from_entries(4, 3, [(vec![1; 4], 0), (vec![2; 4], 2)]).unwrap();
        let (g, map) = reduce_columns(&f).unwrap();
        assert_eq!(g.arity(), 1);
        assert_eq!(map, vec![0; 4]);
    }

    #[test]
    fn empty_map_rejected() {
        let f = PartialOpMap::new(2, 2).unwrap();
        assert!(reduce_columns(&f).is_err());
    }

    #[test]
    fn conflicting_insert_rejected() {
        let mut f = PartialOpMap::new(1, 2).unwrap();
        f.insert(vec![0], 1).unwrap();
        f.insert(vec![0], 1).unwrap();
        assert!(f.insert(vec![0], 0).is_err());
        assert!(f.insert(vec![2], 0).is_err());
    }

    #[test]
    fn json_shape() {
        let f = PartialOpMap::from_entries(1, 2, [(vec![0], 1)]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"arity":1,"carrier":2,"entries":[{"args":[0],"value":1}]}"#);
        let back: PartialOpMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    proptest::proptest! {
        #[test]
        fn recomposition_reproduces_f(
            arity in 1usize..6,
            rows in proptest::collection::btree_map(
                proptest::collection::vec(0usize..3, 5), 0usize..3, 1..6),
        ) {
            let f = PartialOpMap::from_entries(
                arity, 3, rows.into_iter().map(|(k, v)| (k[..arity].to_vec(), v)),
            );
            // truncation may merge keys with different values
            let Ok(f) = f else { return Ok(()); };
            let (g, map) = reduce_columns(&f).unwrap();
            for (args, v) in f.entries() {
                let mut reduced = vec![usize::MAX; g.arity()];
                for (j, &c) in map.iter().enumerate() {
                    reduced[c] = args[j];
                }
                proptest::prop_assert_eq!(g.get(&reduced), Some(v));
            }
            proptest::prop_assert_eq!(g.len(), f.len());
        }
    }
}
