use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::structure::{induced_substructure, FiniteStructure, RelSource, Signature};

/// Lazy view of the direct power `A^k`.
///
/// An element is an index vector `(x_0, …, x_{k-1})` over the base carrier,
/// encoded as the base-`n` integer `x_0·n^{k-1} + … + x_{k-1}`. Integer order
/// is therefore lexicographic order of the vectors. A tuple of power elements
/// lies in a relation iff every coordinate projection lies in the base relation.
#[derive(Clone, Copy, Debug)]
pub struct PowerHandle<'a> {
    base: &'a FiniteStructure,
    exponent: usize,
    size: usize,
}

pub fn power(base: &FiniteStructure, exponent: usize) -> Result<PowerHandle<'_>> {
    if exponent == 0 {
        return Err(Error::InvalidArgument("power exponent must be at least 1".into()));
    }
    let size = u32::try_from(exponent)
        .ok()
        .and_then(|k| base.size().checked_pow(k))
        .ok_or(Error::Overflow {
            base: base.size(),
            exponent,
        })?;
    Ok(PowerHandle { base, exponent, size })
}

impl<'a> PowerHandle<'a> {
    pub fn base(&self) -> &'a FiniteStructure {
        self.base
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.exponent);
        let n = self.base.size();
        coords.iter().fold(0, |acc, &c| acc * n + c)
    }

    pub fn decode(&self, mut elem: usize) -> Vec<usize> {
        let n = self.base.size();
        let mut out = vec![0; self.exponent];
        for slot in out.iter_mut().rev() {
            *slot = elem % n;
            elem /= n;
        }
        out
    }

    /// Coordinate `j` of `elem`.
    pub fn coordinate(&self, elem: usize, j: usize) -> usize {
        let n = self.base.size();
        let shift = self.exponent - 1 - j;
        (elem / n.pow(shift as u32)) % n
    }

    /// Writes the power as an explicit structure; refused above [`MATERIALIZE_LIMIT`](crate::model::MATERIALIZE_LIMIT).
    pub fn materialize(&self) -> Result<FiniteStructure> {
        if self.size > super::MATERIALIZE_LIMIT {
            return Err(Error::TooLarge {
                what: "power",
                size: self.size,
                limit: super::MATERIALIZE_LIMIT,
            });
        }
        let all: Vec<usize> = (0..self.size).collect();
        let induced = induced_substructure(self, &all)?;
        Ok(induced
            .structure
            .with_name(format!("{}^{}", self.base.name(), self.exponent)))
    }

    /// Odometer over one base tuple per coordinate, emitting the power tuple
    /// assembled coordinatewise. `lists[j]` holds candidate base tuple ids.
    fn combine(
        &self,
        rel: usize,
        lists: &[&[u32]],
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if lists.iter().any(|l| l.is_empty()) {
            return ControlFlow::Continue(());
        }
        let relation = self.base.relation(rel);
        let arity = relation.arity();
        let k = self.exponent;
        let n = self.base.size();
        let weights: Vec<usize> = (0..k).map(|j| n.pow((k - 1 - j) as u32)).collect();
        let mut idx = vec![0usize; k];
        let mut out = vec![0usize; arity];
        for (j, list) in lists.iter().enumerate() {
            let t = relation.tuple(list[0]);
            for i in 0..arity {
                out[i] += t[i] * weights[j];
            }
        }
        loop {
            visit(&out)?;
            // advance the odometer, last coordinate fastest
            let mut j = k;
            loop {
                if j == 0 {
                    return ControlFlow::Continue(());
                }
                j -= 1;
                let old = relation.tuple(lists[j][idx[j]]);
                idx[j] += 1;
                let wrapped = idx[j] == lists[j].len();
                if wrapped {
                    idx[j] = 0;
                }
                let new = relation.tuple(lists[j][idx[j]]);
                for i in 0..arity {
                    out[i] = out[i] + new[i] * weights[j] - old[i] * weights[j];
                }
                if !wrapped {
                    break;
                }
            }
        }
    }
}

impl RelSource for PowerHandle<'_> {
    fn size(&self) -> usize {
        self.size
    }

    fn signature(&self) -> &Signature {
        self.base.signature()
    }

    fn contains(&self, rel: usize, tuple: &[usize]) -> bool {
        let relation = self.base.relation(rel);
        if tuple.len() != relation.arity() || tuple.iter().any(|&e| e >= self.size) {
            return false;
        }
        let mut column = vec![0; tuple.len()];
        (0..self.exponent).all(|j| {
            for (c, &e) in column.iter_mut().zip(tuple) {
                *c = self.coordinate(e, j);
            }
            relation.contains(&column)
        })
    }

    fn for_each_tuple_through(
        &self,
        rel: usize,
        pos: usize,
        elem: usize,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let relation = self.base.relation(rel);
        let coords = self.decode(elem);
        let lists: Vec<&[u32]> = coords.iter().map(|&c| relation.tuple_ids_through(pos, c)).collect();
        self.combine(rel, &lists, visit)
    }

    fn for_each_tuple(&self, rel: usize, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        let relation = self.base.relation(rel);
        let ids: Vec<u32> = (0..relation.len() as u32).collect();
        let lists: Vec<&[u32]> = vec![&ids; self.exponent];
        self.combine(rel, &lists, visit)
    }
}
