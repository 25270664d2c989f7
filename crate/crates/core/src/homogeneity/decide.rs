//! Certified decision of polymorphism-homogeneity.
//!
//! With `d = max(2, max arity)`, a structure is polymorphism-homogeneous iff it
//! has a `(d+1)`-ary near-unanimity polymorphism and, for every `m ≤ d` and
//! every column set `τ ⊆ A^m`, every `b` realizing the quantifier-free type of
//! `τ` is reached by a `|τ|`-ary polymorphism applied to `τ`'s rows. The first
//! condition is necessary because the canonical partial near-unanimity map is a
//! local polymorphism; with it, a polymorphism is determined up to extension by
//! its restrictions to `d`-element sets, and a restriction is a column set once
//! duplicate columns are dropped.

use serde::{Deserialize, Serialize};

use crate::engine::{SearchLimits, SearchStats};
use crate::error::{Error, Result};
use crate::galois::{qf_type_closure_mask, PowerIndex};
use crate::model::{reduce_columns, FiniteStructure, FunctionTable, PartialOpMap, RelationSet};

use super::{canonical_partial_nu, extendable, is_k_ph, is_partial_polymorphism, Extension, KphOutcome};

/// Largest `n^(n^d)` for which the pipeline runs; this admits `n = 3, d = 2`
/// and `n = 2, d ≤ 3`.
pub const ENVELOPE_LIMIT: u64 = 19_683;

/// Largest power searched for a near-unanimity polymorphism outside the envelope.
const NU_OUTSIDE_LIMIT: usize = 1 << 16;

/// Node budget of each refutation attempt outside the envelope.
const OUTSIDE_NODE_BUDGET: u64 = 200_000;

/// Most polymorphisms kept per arity for shortcutting later candidates.
const POOL_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhStatus {
    #[serde(rename = "PH")]
    Ph,
    #[serde(rename = "NotPH")]
    NotPh,
    Inconclusive,
}

impl std::fmt::Display for PhStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PhStatus::Ph => "PH",
            PhStatus::NotPh => "NotPH",
            PhStatus::Inconclusive => "Inconclusive",
        })
    }
}

/// Where in the pipeline a map was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Stage {
    NearUnanimity {
        arity: usize,
    },
    BakerPixley {
        m: usize,
        tau: Vec<Vec<usize>>,
        b: Vec<usize>,
    },
    /// Bounded one-point counterexample search, used outside the envelope.
    OnePoint {
        k: usize,
        missing: Vec<usize>,
    },
}

/// A local polymorphism with a refuted extension problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub stage: Stage,
    pub map: PartialOpMap,
    pub search: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inconclusive {
    pub reason: String,
    pub blocking: Option<Stage>,
    pub limits: SearchLimits,
}

/// How the candidates `(τ, b)` of the column-set scan were settled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpCounts {
    pub column_sets: u64,
    pub candidates: u64,
    /// `b` is a column of `τ`, reached by a projection.
    pub projections: u64,
    /// `b` lies in the type closure of `τ` minus one column, already settled.
    pub inherited: u64,
    /// `b` is the image of `τ` under a polymorphism found earlier.
    pub pooled: u64,
    /// `b` needed its own extension search.
    pub searched: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub n: usize,
    pub d: usize,
    pub nu_arity: Option<usize>,
    pub column_scan: BpCounts,
    pub search: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: PhStatus,
    /// Present exactly when the status is `NotPH`.
    pub certificate: Option<Certificate>,
    /// The near-unanimity polymorphism found on the way to `PH`.
    pub nu_witness: Option<FunctionTable>,
    pub inconclusive: Option<Inconclusive>,
    pub trace: PipelineTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub limits: SearchLimits,
    /// Settle candidates by projections, inherited closures and found polymorphisms.
    pub shortcuts: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            limits: SearchLimits::default(),
            shortcuts: true,
        }
    }
}

/// The `d` of the pipeline and whether `n^(n^d)` is within [`ENVELOPE_LIMIT`].
pub fn envelope_allows(a: &FiniteStructure) -> (usize, bool) {
    let d = a.max_arity_at_least(2);
    let n = a.size() as u64;
    let inner = u32::try_from(d).ok().and_then(|d| n.checked_pow(d));
    let total = inner.and_then(|i| u32::try_from(i).ok()).and_then(|i| n.checked_pow(i));
    (d, n <= 1 || total.is_some_and(|t| t <= ENVELOPE_LIMIT))
}

pub fn decide_ph(a: &FiniteStructure, limits: SearchLimits) -> Result<Verdict> {
    decide_ph_with(
        a,
        DecideOptions {
            limits,
            ..DecideOptions::default()
        },
    )
}

pub fn decide_ph_with(a: &FiniteStructure, options: DecideOptions) -> Result<Verdict> {
    let limits = options.limits;
    let (d, inside) = envelope_allows(a);
    let mut trace = PipelineTrace {
        n: a.size(),
        d,
        ..PipelineTrace::default()
    };
    let verdict = |status, certificate, nu_witness, inconclusive, trace| Verdict {
        status,
        certificate,
        nu_witness,
        inconclusive,
        trace,
    };
    if a.size() == 1 {
        return Ok(verdict(PhStatus::Ph, None, None, None, trace));
    }
    if !inside {
        return refute_outside_envelope(a, d, limits, trace);
    }

    let nu_arity = d + 1;
    trace.nu_arity = Some(nu_arity);
    let nu = canonical_partial_nu(a, nu_arity)?;
    let out = extendable(a, &nu, limits)?;
    trace.search.absorb(&out.stats);
    let nu_witness = match out.status {
        Extension::Found(g) => g,
        Extension::Unsat => {
            let certificate = Certificate {
                stage: Stage::NearUnanimity { arity: nu_arity },
                map: nu,
                search: out.stats,
            };
            return Ok(verdict(PhStatus::NotPh, Some(certificate), None, None, trace));
        }
        Extension::Exhausted => {
            let inc = Inconclusive {
                reason: "near-unanimity search exhausted its budget".into(),
                blocking: Some(Stage::NearUnanimity { arity: nu_arity }),
                limits,
            };
            return Ok(verdict(PhStatus::Inconclusive, None, None, Some(inc), trace));
        }
    };

    let mut pool = Pool::default();
    for m in 1..=d {
        let end = scan_column_sets(a, m, options, &mut pool, &mut trace.column_scan, &mut trace.search)?;
        match end {
            ScanEnd::Holds => {}
            ScanEnd::Fails { stage, map, stats } => {
                let certificate = Certificate {
                    stage,
                    map,
                    search: stats,
                };
                return Ok(verdict(PhStatus::NotPh, Some(certificate), None, None, trace));
            }
            ScanEnd::Exhausted { stage } => {
                let inc = Inconclusive {
                    reason: "an extension search exhausted its budget".into(),
                    blocking: Some(stage),
                    limits,
                };
                return Ok(verdict(PhStatus::Inconclusive, None, None, Some(inc), trace));
            }
        }
    }
    Ok(verdict(PhStatus::Ph, None, Some(nu_witness), None, trace))
}

/// Outside the envelope only `NotPH` can be certified: by a missing
/// near-unanimity polymorphism or by a small non-extendable local polymorphism.
fn refute_outside_envelope(
    a: &FiniteStructure,
    d: usize,
    limits: SearchLimits,
    mut trace: PipelineTrace,
) -> Result<Verdict> {
    let n = a.size();
    let nu_arity = d + 1;
    let nu_fits = u32::try_from(nu_arity)
        .ok()
        .and_then(|r| n.checked_pow(r))
        .is_some_and(|size| size <= NU_OUTSIDE_LIMIT);
    let bounded = limits.with_nodes(limits.node_budget.min(OUTSIDE_NODE_BUDGET));
    let one_point = |k: usize, trace: &mut PipelineTrace| -> Result<Option<Certificate>> {
        let KphOutcome::Counterexample { map, missing } = is_k_ph(a, k, bounded)? else {
            return Ok(None);
        };
        let out = extendable(a, &map, limits)?;
        trace.search.absorb(&out.stats);
        Ok(Some(Certificate {
            stage: Stage::OnePoint { k, missing },
            map,
            search: out.stats,
        }))
    };
    // smallest certificates first
    if let Some(certificate) = one_point(1, &mut trace)? {
        return Ok(not_ph(certificate, trace));
    }
    if nu_fits {
        trace.nu_arity = Some(nu_arity);
        let nu = canonical_partial_nu(a, nu_arity)?;
        let out = extendable(a, &nu, limits)?;
        trace.search.absorb(&out.stats);
        if out.status == Extension::Unsat {
            let certificate = Certificate {
                stage: Stage::NearUnanimity { arity: nu_arity },
                map: nu,
                search: out.stats,
            };
            return Ok(not_ph(certificate, trace));
        }
    }
    if let Some(certificate) = one_point(2, &mut trace)? {
        return Ok(not_ph(certificate, trace));
    }
    let reason = format!(
        "outside the certified envelope: {n}^({n}^{d}) exceeds {ENVELOPE_LIMIT} and no refutation \
         was found; use `classify` if the structure is a graph, poset, strict poset or equivalence lattice"
    );
    Ok(Verdict {
        status: PhStatus::Inconclusive,
        certificate: None,
        nu_witness: None,
        inconclusive: Some(Inconclusive {
            reason,
            blocking: None,
            limits,
        }),
        trace,
    })
}

fn not_ph(certificate: Certificate, trace: PipelineTrace) -> Verdict {
    Verdict {
        status: PhStatus::NotPh,
        certificate: Some(certificate),
        nu_witness: None,
        inconclusive: None,
        trace,
    }
}

/// Polymorphisms found so far, by arity.
#[derive(Default)]
pub(crate) struct Pool {
    by_arity: std::collections::BTreeMap<usize, Vec<FunctionTable>>,
}

impl Pool {
    fn reaches(&self, rows: &[Vec<usize>], b: &[usize]) -> bool {
        let Some(gs) = self.by_arity.get(&rows[0].len()) else {
            return false;
        };
        gs.iter()
            .any(|g| rows.iter().zip(b).all(|(row, &bi)| g.eval(row) == bi))
    }

    fn add(&mut self, g: FunctionTable) {
        let gs = self.by_arity.entry(g.arity()).or_default();
        if gs.len() < POOL_CAP {
            gs.push(g);
        }
    }
}

pub(crate) enum ScanEnd {
    Holds,
    Fails {
        stage: Stage,
        map: PartialOpMap,
        stats: SearchStats,
    },
    Exhausted {
        stage: Stage,
    },
}

/// Largest `n^m` whose column sets are enumerated.
pub(crate) const SCAN_LIMIT: usize = 16;

/// For every nonempty `τ ⊆ A^m` (by size, then lexicographically) and every `b`
/// in its quantifier-free type closure, checks that `τ`'s rows extend to a
/// polymorphism sending them to `b`. Stops at the first failure.
pub(crate) fn scan_column_sets(
    a: &FiniteStructure,
    m: usize,
    options: DecideOptions,
    pool: &mut Pool,
    counts: &mut BpCounts,
    stats: &mut SearchStats,
) -> Result<ScanEnd> {
    let index = PowerIndex::new(a.size(), m)?;
    let total = index.len();
    if total > SCAN_LIMIT {
        return Err(Error::TooLarge {
            what: "column-set scan over A^m",
            size: total,
            limit: SCAN_LIMIT,
        });
    }
    let mut order: Vec<u32> = (1..1u32 << total).collect();
    order.sort_by_key(|&mask| (mask.count_ones(), bits(mask)));
    let mut closure = vec![0u32; 1 << total];
    for &tau in &order {
        counts.column_sets += 1;
        let cols: Vec<usize> = bits(tau);
        let gamma = qf_type_closure_mask(a, &index, &cols, true);
        closure[tau as usize] = gamma;
        // rows of the m × |τ| matrix whose columns are τ's tuples
        let rows: Vec<Vec<usize>> = (0..m)
            .map(|i| cols.iter().map(|&c| index.tuple(c)[i]).collect())
            .collect();
        for b_idx in bits(gamma) {
            counts.candidates += 1;
            let b = index.tuple(b_idx).to_vec();
            if options.shortcuts {
                if tau >> b_idx & 1 == 1 {
                    counts.projections += 1;
                    continue;
                }
                let inherited = cols.len() > 1
                    && cols
                        .iter()
                        .any(|&c| closure[(tau & !(1 << c)) as usize] >> b_idx & 1 == 1);
                if inherited {
                    counts.inherited += 1;
                    continue;
                }
                if pool.reaches(&rows, &b) {
                    counts.pooled += 1;
                    continue;
                }
            }
            counts.searched += 1;
            let stage = Stage::BakerPixley {
                m,
                tau: cols.iter().map(|&c| index.tuple(c).to_vec()).collect(),
                b: b.clone(),
            };
            let map = PartialOpMap::from_entries(cols.len(), a.size(), rows.iter().cloned().zip(b.iter().copied()))?;
            if let Some(v) = is_partial_polymorphism(a, &map)? {
                return Err(Error::Internal(format!(
                    "type-closure candidate is not a partial polymorphism (relation `{}`)",
                    v.symbol
                )));
            }
            let out = extendable(a, &map, options.limits)?;
            stats.absorb(&out.stats);
            match out.status {
                Extension::Found(g) => pool.add(g),
                Extension::Unsat => {
                    return Ok(ScanEnd::Fails {
                        stage,
                        map,
                        stats: out.stats,
                    })
                }
                Extension::Exhausted => return Ok(ScanEnd::Exhausted { stage }),
            }
        }
    }
    Ok(ScanEnd::Holds)
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Outcome of re-checking a certificate from scratch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub partial_polymorphism: bool,
    /// The extension problem of the map was refuted.
    pub unsat: bool,
    /// The extension problem after dropping duplicate columns was refuted too.
    pub reduced_unsat: bool,
}

impl CertificateCheck {
    pub fn valid(&self) -> bool {
        self.partial_polymorphism && self.unsat && self.reduced_unsat
    }
}

/// Re-verifies that `map` is a local polymorphism of `a` with no extension.
pub fn verify_certificate(a: &FiniteStructure, map: &PartialOpMap, limits: SearchLimits) -> Result<CertificateCheck> {
    let partial_polymorphism = is_partial_polymorphism(a, map)?.is_none();
    if !partial_polymorphism {
        return Ok(CertificateCheck {
            partial_polymorphism,
            unsat: false,
            reduced_unsat: false,
        });
    }
    let unsat = extendable(a, map, limits)?.status == Extension::Unsat;
    let (g, _) = reduce_columns(map)?;
    let reduced_unsat = extendable(a, &g, limits)?.status == Extension::Unsat;
    Ok(CertificateCheck {
        partial_polymorphism,
        unsat,
        reduced_unsat,
    })
}

impl Verdict {
    /// The relation set `τ` of a column-scan certificate, if any.
    pub fn certificate_tau(&self, carrier: usize) -> Option<RelationSet> {
        match &self.certificate.as_ref()?.stage {
            Stage::BakerPixley { m, tau, .. } => RelationSet::new(*m, carrier, tau.iter().cloned()).ok(),
            _ => None,
        }
    }
}
