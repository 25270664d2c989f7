mod common;

use std::collections::BTreeSet;

use common::{structure, Brute};
use polyhom::classify::classify;
use polyhom::engine::SearchLimits;
use polyhom::galois::{gamma_closure, qf_type_closure, GammaOutcome};
use polyhom::homogeneity::{decide_ph, PhStatus};
use polyhom::model::relfile::{parse_structure, serialize_structure};
use polyhom::model::{Family, FiniteStructure, RelationSet};
use proptest::prelude::*;

fn binary_structure(n: usize, mask: u32) -> FiniteStructure {
    let tuples = (0..n * n)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| vec![i / n, i % n])
        .collect();
    structure("a", n, &[("r", 2, tuples)])
}

fn relabel(a: &FiniteStructure, perm: &[usize]) -> FiniteStructure {
    let rels: Vec<(String, usize, Vec<Vec<usize>>)> = a
        .relations()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let tuples = r
                .tuples()
                .iter()
                .map(|t| t.iter().map(|&e| perm[e]).collect())
                .collect();
            (a.signature().name(i).to_string(), r.arity(), tuples)
        })
        .collect();
    let borrowed: Vec<(&str, usize, Vec<Vec<usize>>)> =
        rels.iter().map(|(n, r, t)| (n.as_str(), *r, t.clone())).collect();
    structure(a.name(), a.size(), &borrowed)
}

fn closed(a: &FiniteStructure, tau: &RelationSet) -> BTreeSet<Vec<usize>> {
    match gamma_closure(a, tau, SearchLimits::default()).unwrap() {
        GammaOutcome::Closed { relation } => relation.iter().cloned().collect(),
        GammaOutcome::Inconclusive { b } => panic!("inconclusive at {b:?}"),
    }
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_sits_between_tau_and_its_type(n in 2usize..=3, mask in any::<u32>(), tmask in 1u32..512) {
        let a = binary_structure(n, mask & ((1 << (n * n)) - 1));
        let tuples: Vec<Vec<usize>> = (0..n * n)
            .filter(|i| tmask >> i & 1 == 1)
            .map(|i| vec![i / n, i % n])
            .collect();
        prop_assume!(!tuples.is_empty());
        let tau = RelationSet::new(2, n, tuples.clone()).unwrap();
        let gamma = closed(&a, &tau);
        let qf: BTreeSet<Vec<usize>> = qf_type_closure(&a, &tau).unwrap().iter().cloned().collect();
        let taus: BTreeSet<Vec<usize>> = tuples.iter().cloned().collect();
        prop_assert!(taus.is_subset(&gamma));
        prop_assert!(gamma.is_subset(&qf));
        // the oracle searches A^|τ| naively
        if n.pow(tuples.len() as u32) <= 729 {
            let brute = Brute::of(&a);
            prop_assert_eq!(&gamma, &brute.gamma_closure(2, &tuples));
            prop_assert_eq!(&qf, &brute.qf_type_closure(2, &tuples));
        }
        let again = closed(&a, &RelationSet::new(2, n, gamma.iter().cloned()).unwrap());
        prop_assert_eq!(gamma, again);
    }

    #[test]
    fn decision_is_invariant_under_relabeling(mask in 0u32..512, perm in permutation(3)) {
        let a = binary_structure(3, mask);
        let b = relabel(&a, &perm);
        let (va, vb) = (
            decide_ph(&a, SearchLimits::default()).unwrap(),
            decide_ph(&b, SearchLimits::default()).unwrap(),
        );
        prop_assert_ne!(va.status, PhStatus::Inconclusive);
        prop_assert_eq!(va.status, vb.status);
    }

    #[test]
    fn graph_classification_is_invariant_under_relabeling(mask in 0u32..1024, perm in permutation(5)) {
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let g = common::graph(5, &edges);
        let h = relabel(&g, &perm);
        let (rg, rh) = (classify(&g, Family::Graph).unwrap(), classify(&h, Family::Graph).unwrap());
        prop_assert_eq!(rg.verdict, rh.verdict);
        let sizes = |r: &polyhom::classify::ClassReport| {
            let mut s: Vec<usize> = r.components.as_ref().unwrap().iter().map(Vec::len).collect();
            s.sort_unstable();
            s
        };
        prop_assert_eq!(sizes(&rg), sizes(&rh));
    }

    #[test]
    fn relfile_round_trips(n in 1usize..=4, mask in any::<u32>(), ternary in any::<u64>()) {
        let binary: Vec<Vec<usize>> = (0..n * n).filter(|i| mask >> (i % 32) & 1 == 1).map(|i| vec![i / n, i % n]).collect();
        let triples: Vec<Vec<usize>> = (0..n * n * n)
            .filter(|i| ternary >> (i % 64) & 1 == 1)
            .map(|i| vec![i / (n * n), i / n % n, i % n])
            .collect();
        let a = structure("rt", n, &[("r", 2, binary), ("s", 3, triples)]);
        let text = serialize_structure(&a);
        let b = parse_structure(&text).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(text, serialize_structure(&b));
    }
}

#[test]
fn poset_classification_is_invariant_under_relabeling() {
    let bowtie = common::bowtie();
    let diamond = common::poset(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
    for p in [bowtie, diamond] {
        let base = classify(&p, Family::Poset).unwrap();
        for perm in [[1, 0, 3, 2], [3, 2, 1, 0], [2, 0, 3, 1]] {
            let q = relabel(&p, &perm);
            let r = classify(&q, Family::Poset).unwrap();
            assert_eq!(base.verdict, r.verdict);
            for reason in &base.reasons {
                assert_eq!(
                    Some(reason.holds),
                    r.reason(&reason.name).map(|x| x.holds),
                    "{}",
                    reason.name
                );
            }
        }
    }
}
