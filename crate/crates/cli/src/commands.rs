//! The single-structure subcommands.

use std::fmt::Write as _;
use std::path::Path;

use polyhom::classify::{classify as classify_family, ClassReport, RefutedOn};
use polyhom::engine::EnumerationEnd;
use polyhom::galois::{
    enumerate_polymorphisms, gamma_closure, invariant_relations, is_pp_definable, polymorphisms_up_to, Conventions,
    GammaOutcome, InvMode, PpAnswer,
};
use polyhom::gen::{exhaustive, random, GenFamily};
use polyhom::homogeneity::{
    decide_ph, find_nu_polymorphism, is_hom_homogeneous, is_k_ph, is_near_unanimity, Extension, HhOutcome, KphOutcome,
    PhStatus, Stage, Verdict,
};
use polyhom::model::relfile::{parse_relation, parse_structure, serialize_relation, serialize_structure};
use polyhom::model::{Family, FiniteStructure, RelationSet};
use serde_json::json;

use crate::report::{map_lines, tuple, CliError, Outcome};
use crate::Global;

/// Largest number of polymorphisms `inv` collects before giving up.
const INV_POL_CAP: usize = 1 << 16;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(path: &Path) -> Result<FiniteStructure, CliError> {
    Ok(parse_structure(&read(path)?)?)
}

fn load_relation(path: &Path, a: &FiniteStructure) -> Result<RelationSet, CliError> {
    Ok(parse_relation(&read(path)?, a.size())?)
}

fn check_k(k: usize, g: &Global, what: &str) -> Result<(), CliError> {
    if k == 0 {
        return Err(CliError::Usage(format!("{what} must be at least 1")));
    }
    if k > g.max_k {
        return Err(CliError::Usage(format!("{what} {k} exceeds --max-k {}", g.max_k)));
    }
    Ok(())
}

fn header(a: &FiniteStructure) -> String {
    format!("structure {} (n = {})\n", a.name(), a.size())
}

pub fn check_hh(path: &Path, g: &Global) -> Result<Outcome, CliError> {
    let a = load(path)?;
    let out = is_hom_homogeneous(&a, g.limits())?;
    let mut text = header(&a);
    match &out {
        HhOutcome::Homogeneous => text.push_str("homomorphism-homogeneous\n"),
        HhOutcome::Counterexample { local, missing } => {
            let pairs: Vec<String> = local.iter().map(|(x, y)| format!("{x} -> {y}")).collect();
            let _ = writeln!(text, "not homomorphism-homogeneous");
            let _ = writeln!(
                text,
                "local homomorphism {{{}}} has no extension to {missing}",
                pairs.join(", ")
            );
        }
        HhOutcome::Exhausted => text.push_str("inconclusive: search budget exhausted\n"),
    }
    let inconclusive = out == HhOutcome::Exhausted;
    Ok(Outcome::new(out, text).input(path, &a).inconclusive(inconclusive))
}

pub fn check_kph(path: &Path, k: usize, g: &Global) -> Result<Outcome, CliError> {
    check_k(k, g, "k")?;
    let a = load(path)?;
    let out = is_k_ph(&a, k, g.limits())?;
    let mut text = header(&a);
    match &out {
        KphOutcome::Holds => {
            let _ = writeln!(text, "{k}-polymorphism-homogeneous");
        }
        KphOutcome::Counterexample { map, missing } => {
            let _ = writeln!(text, "not {k}-polymorphism-homogeneous");
            let _ = writeln!(text, "local polymorphism with no extension to {}:", tuple(missing));
            text.push_str(&map_lines(map));
        }
        KphOutcome::Exhausted => text.push_str("inconclusive: search budget exhausted\n"),
    }
    let inconclusive = out == KphOutcome::Exhausted;
    Ok(Outcome::new(json!({ "k": k, "outcome": out }), text)
        .input(path, &a)
        .inconclusive(inconclusive))
}

pub fn verdict_text(a: &FiniteStructure, v: &Verdict) -> String {
    let mut text = header(a);
    let _ = writeln!(text, "status: {}", v.status);
    match v.status {
        PhStatus::Ph => {
            if let Some(nu) = &v.nu_witness {
                let _ = writeln!(text, "near-unanimity polymorphism of arity {}", nu.arity());
            }
            let c = &v.trace.column_scan;
            let _ = writeln!(
                text,
                "column sets scanned: {} ({} candidates, {} searched)",
                c.column_sets, c.candidates, c.searched
            );
        }
        PhStatus::NotPh => {
            let cert = v.certificate.as_ref().expect("NotPH carries a certificate");
            match &cert.stage {
                Stage::NearUnanimity { arity } => {
                    let _ = writeln!(text, "no near-unanimity polymorphism of arity {arity}");
                }
                Stage::BakerPixley { tau, b, .. } => {
                    let cols: Vec<String> = tau.iter().map(|t| tuple(t)).collect();
                    let _ = writeln!(
                        text,
                        "{} lies in the type closure of {{{}}} but not in its polymorphism closure",
                        tuple(b),
                        cols.join(", ")
                    );
                }
                Stage::OnePoint { k, missing } => {
                    let _ = writeln!(
                        text,
                        "{k}-ary local polymorphism with no extension to {}",
                        tuple(missing)
                    );
                }
            }
            let _ = writeln!(
                text,
                "certificate (arity {}, {} entries):",
                cert.map.arity(),
                cert.map.len()
            );
            text.push_str(&map_lines(&cert.map));
        }
        PhStatus::Inconclusive => {
            let inc = v.inconclusive.as_ref().expect("Inconclusive carries a reason");
            let _ = writeln!(text, "{}", inc.reason);
        }
    }
    text
}

pub fn decide(path: &Path, g: &Global) -> Result<Outcome, CliError> {
    let a = load(path)?;
    let v = decide_ph(&a, g.limits())?;
    let text = verdict_text(&a, &v);
    let inconclusive = v.status == PhStatus::Inconclusive;
    Ok(Outcome::new(&v, text).input(path, &a).inconclusive(inconclusive))
}

pub fn nu(path: &Path, arity: usize, g: &Global) -> Result<Outcome, CliError> {
    let a = load(path)?;
    let out = find_nu_polymorphism(&a, arity, g.limits())?;
    let mut text = header(&a);
    let result = match &out.status {
        Extension::Found(table) => {
            debug_assert!(is_near_unanimity(table));
            let _ = writeln!(text, "near-unanimity polymorphism of arity {arity} found");
            let _ = writeln!(text, "table: {}", join(table.table()));
            json!({ "arity": arity, "status": "found", "table": table, "search": out.stats })
        }
        Extension::Unsat => {
            let _ = writeln!(text, "no near-unanimity polymorphism of arity {arity}");
            json!({ "arity": arity, "status": "none", "search": out.stats })
        }
        Extension::Exhausted => {
            text.push_str("inconclusive: search budget exhausted\n");
            json!({ "arity": arity, "status": "exhausted", "search": out.stats })
        }
    };
    let inconclusive = out.status == Extension::Exhausted;
    Ok(Outcome::new(result, text).input(path, &a).inconclusive(inconclusive))
}

fn join(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn pol(path: &Path, k: usize, cap: usize, g: &Global) -> Result<Outcome, CliError> {
    check_k(k, g, "k")?;
    let a = load(path)?;
    let list = enumerate_polymorphisms(&a, k, cap)?;
    let mut text = header(&a);
    let qualifier = match list.end {
        EnumerationEnd::Complete => "",
        EnumerationEnd::CapReached => " (cap reached)",
        EnumerationEnd::Exhausted => " (budget exhausted)",
    };
    let _ = writeln!(text, "{} polymorphisms of arity {k}{qualifier}", list.tables.len());
    for t in &list.tables {
        let _ = writeln!(text, "  {}", join(t.table()));
    }
    let inconclusive = list.end == EnumerationEnd::Exhausted;
    Ok(Outcome::new(
        json!({ "arity": k, "count": list.tables.len(), "end": list.end, "tables": list.tables }),
        text,
    )
    .input(path, &a)
    .inconclusive(inconclusive))
}

pub fn inv(path: &Path, m: usize, k: usize, g: &Global) -> Result<Outcome, CliError> {
    check_k(k, g, "k")?;
    if m == 0 || m > g.max_m {
        return Err(CliError::Usage(format!("m must lie in 1..={}", g.max_m)));
    }
    let a = load(path)?;
    let Some(ops) = polymorphisms_up_to(&a, k, INV_POL_CAP)? else {
        let text = format!(
            "{}inconclusive: more than {INV_POL_CAP} polymorphisms of some arity ≤ {k}\n",
            header(&a)
        );
        return Ok(
            Outcome::new(json!({ "m": m, "k": k, "status": "too_many_polymorphisms" }), text)
                .input(path, &a)
                .inconclusive(true),
        );
    };
    let family = invariant_relations(&ops, a.size(), m, &InvMode::Exhaustive, Conventions::default())?;
    let mut text = header(&a);
    let _ = writeln!(
        text,
        "{} invariant relations of arity {m} under {} polymorphisms of arity ≤ {k}",
        family.len(),
        ops.len()
    );
    for (i, r) in family.members.iter().enumerate() {
        text.push_str(&serialize_relation(&format!("inv{i}"), r));
    }
    Ok(Outcome::new(
        json!({ "m": m, "k": k, "polymorphisms": ops.len(), "family": family }),
        text,
    )
    .input(path, &a))
}

pub fn gamma(path: &Path, tuples: &Path, g: &Global) -> Result<Outcome, CliError> {
    let a = load(path)?;
    let tau = load_relation(tuples, &a)?;
    let out = gamma_closure(&a, &tau, g.limits())?;
    let mut text = header(&a);
    let inconclusive = match &out {
        GammaOutcome::Closed { relation } => {
            let _ = writeln!(text, "closure has {} tuples", relation.len());
            text.push_str(&serialize_relation("gamma", relation));
            false
        }
        GammaOutcome::Inconclusive { b } => {
            let _ = writeln!(
                text,
                "inconclusive: the extension search for {} exhausted its budget",
                tuple(b)
            );
            true
        }
    };
    Ok(Outcome::new(json!({ "tau": tau, "outcome": out }), text)
        .input(path, &a)
        .inconclusive(inconclusive))
}

pub fn pp(path: &Path, relation: &Path, g: &Global) -> Result<Outcome, CliError> {
    let a = load(path)?;
    let sigma = load_relation(relation, &a)?;
    let out = is_pp_definable(&a, &sigma, g.limits())?;
    let mut text = header(&a);
    let inconclusive = match &out {
        PpAnswer::Yes => {
            text.push_str("pp-definable\n");
            false
        }
        PpAnswer::No { witness } => {
            text.push_str("not pp-definable\n");
            if let Some(b) = witness {
                let _ = writeln!(text, "{} is forced by the polymorphisms but missing", tuple(b));
            }
            false
        }
        PpAnswer::Inconclusive { b } => {
            let _ = writeln!(
                text,
                "inconclusive: the extension search for {} exhausted its budget",
                tuple(b)
            );
            true
        }
    };
    Ok(Outcome::new(json!({ "relation": sigma, "answer": out }), text)
        .input(path, &a)
        .inconclusive(inconclusive))
}

pub fn class_text(a: &FiniteStructure, r: &ClassReport) -> String {
    let mut text = header(a);
    let _ = writeln!(text, "family: {}", r.family);
    let _ = writeln!(text, "verdict: {}", r.verdict);
    for reason in &r.reasons {
        let _ = write!(text, "  {}: {}", reason.name, reason.holds);
        if let Some(w) = &reason.witness {
            let _ = write!(text, " {}", tuple(w));
        }
        text.push('\n');
    }
    if let Some(comps) = &r.components {
        let sizes: Vec<String> = comps.iter().map(|c| c.len().to_string()).collect();
        let _ = writeln!(text, "  component sizes: {}", sizes.join(" "));
    }
    if let Some(w) = &r.witness {
        let over = match &w.refuted_on {
            RefutedOn::Power => String::new(),
            RefutedOn::Support { extra } => {
                let pts: Vec<String> = extra.iter().map(|t| tuple(t)).collect();
                format!(", refuted on its domain plus {}", pts.join(" "))
            }
        };
        let _ = writeln!(text, "witness (arity {}{over}):", w.map.arity());
        text.push_str(&map_lines(&w.map));
    }
    text
}

pub fn classify(path: &Path, family: Family, _g: &Global) -> Result<Outcome, CliError> {
    let a = load(path)?;
    let r = classify_family(&a, family)?;
    let text = class_text(&a, &r);
    Ok(Outcome::new(&r, text).input(path, &a))
}

pub fn generate(
    family: GenFamily,
    size: usize,
    count: Option<usize>,
    seed: u64,
    _g: &Global,
) -> Result<Outcome, CliError> {
    let (mode, structures) = match count {
        None => ("all", exhaustive(family, size)?),
        Some(c) => ("random", random(family, size, c, seed)?),
    };
    let texts: Vec<String> = structures.iter().map(serialize_structure).collect();
    let mut outcome = Outcome::new(
        json!({
            "family": family.as_str(),
            "size": size,
            "mode": mode,
            "seed": count.map(|_| seed),
            "count": texts.len(),
            "structures": texts,
        }),
        texts.join("\n"),
    );
    outcome.raw = true;
    Ok(outcome)
}
