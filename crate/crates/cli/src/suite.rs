//! `crosscheck`: generic decision against classification over generated
//! suites, and re-verification of certificates stored in JSON reports.

use std::fmt::Write as _;
use std::path::Path;

use polyhom::classify::{classify, verify_witness, Witness};
use polyhom::gen::{exhaustive, GenFamily};
use polyhom::homogeneity::{decide_ph, is_k_ph, verify_certificate, Certificate, KphOutcome, PhStatus};
use polyhom::model::relfile::{parse_structure, serialize_structure};
use polyhom::model::{Family, FiniteStructure, PartialOpMap};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{CliError, Outcome};
use crate::Global;

/// Largest `k` used as the reference on two-point structures.
const N2_MAX_K: usize = 4;

#[derive(Serialize)]
struct Entry {
    name: String,
    structure: String,
    decided: PhStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
    reference: Option<PhStatus>,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
    agrees: Option<bool>,
}

fn family_of(g: GenFamily) -> Option<Family> {
    match g {
        GenFamily::Graph => Some(Family::Graph),
        GenFamily::Poset => Some(Family::Poset),
        GenFamily::StrictPoset => Some(Family::StrictPoset),
        GenFamily::EqLattice => Some(Family::EqLattice),
        GenFamily::N2Binary => None,
    }
}

fn check_one(a: &FiniteStructure, family: GenFamily, g: &Global) -> polyhom::Result<Entry> {
    let limits = g.limits();
    let v = decide_ph(a, limits)?;
    let (reference, method, witness) = match family_of(family) {
        Some(f) => {
            let r = classify(a, f)?;
            (Some(r.verdict), "classify", r.witness)
        }
        None => {
            let mut status = Some(PhStatus::Ph);
            for k in 1..=N2_MAX_K {
                match is_k_ph(a, k, limits)? {
                    KphOutcome::Holds => {}
                    KphOutcome::Counterexample { .. } => {
                        status = Some(PhStatus::NotPh);
                        break;
                    }
                    KphOutcome::Exhausted => {
                        status = None;
                        break;
                    }
                }
            }
            (status, "k-ph up to 4", None)
        }
    };
    let agrees = match (v.status, reference) {
        (PhStatus::Inconclusive, _) | (_, None) => None,
        (d, Some(r)) => Some(d == r),
    };
    Ok(Entry {
        name: a.name().to_string(),
        structure: serialize_structure(a),
        decided: v.status,
        certificate: v.certificate,
        reference,
        method,
        witness,
        agrees,
    })
}

pub fn run_suite(family: GenFamily, size: usize, g: &Global) -> Result<Outcome, CliError> {
    let structures = exhaustive(family, size)?;
    // collecting an indexed parallel iterator keeps the input order
    let entries = structures
        .par_iter()
        .map(|a| check_one(a, family, g))
        .collect::<polyhom::Result<Vec<Entry>>>()?;
    let count = |v: Option<bool>| entries.iter().filter(|e| e.agrees == v).count();
    let (agreements, disagreements, unresolved) = (count(Some(true)), count(Some(false)), count(None));
    let status = if disagreements > 0 {
        "disagree"
    } else if unresolved > 0 {
        "Inconclusive"
    } else {
        "agree"
    };
    let mut text = format!("suite {} size {size}: {} structures\n", family.as_str(), entries.len());
    for e in &entries {
        let reference = e.reference.map_or("-".to_string(), |r| r.to_string());
        let mark = match e.agrees {
            Some(true) => "ok",
            Some(false) => "MISMATCH",
            None => "unresolved",
        };
        let _ = writeln!(
            text,
            "  {:<20} decide-ph {:<12} {} {:<6} {mark}",
            e.name, e.decided, e.method, reference
        );
    }
    let _ = writeln!(
        text,
        "{status}: {agreements} agree, {disagreements} disagree, {unresolved} unresolved"
    );
    let result = json!({
        "suite": family.as_str(),
        "size": size,
        "status": status,
        "agreements": agreements,
        "disagreements": disagreements,
        "unresolved": unresolved,
        "entries": entries,
    });
    Ok(Outcome::new(result, text).inconclusive(status == "Inconclusive"))
}

#[derive(Serialize)]
struct Check {
    name: String,
    kind: &'static str,
    valid: bool,
    detail: String,
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key)
        .ok_or_else(|| CliError::Report(format!("missing field `{key}`")))
}

fn structure_of(v: &Value) -> Result<FiniteStructure, CliError> {
    let text = field(v, "structure")?
        .as_str()
        .ok_or_else(|| CliError::Report("`structure` is not a string".into()))?;
    Ok(parse_structure(text)?)
}

fn decode<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Report(format!("malformed {what}: {e}")))
}

fn check_certificate(name: &str, a: &FiniteStructure, cert: &Value, g: &Global) -> Result<Check, CliError> {
    let map: PartialOpMap = decode(field(cert, "map")?, "certificate map")?;
    let check = verify_certificate(a, &map, g.limits())?;
    Ok(Check {
        name: name.to_string(),
        kind: "certificate",
        valid: check.valid(),
        detail: format!(
            "partial polymorphism {}, unsat {}, unsat after column reduction {}",
            check.partial_polymorphism, check.unsat, check.reduced_unsat
        ),
    })
}

fn check_witness(name: &str, a: &FiniteStructure, w: &Value, g: &Global) -> Result<Check, CliError> {
    let w: Witness = decode(w, "witness")?;
    let (valid, detail) = match verify_witness(a, &w, g.limits()) {
        Ok(true) => (true, "unsat".to_string()),
        Ok(false) => (false, "an extension exists or the search was cut short".to_string()),
        Err(polyhom::Error::NotPartialPolymorphism { symbol, rows }) => (
            false,
            format!("not a partial polymorphism: `{symbol}` fails on {rows:?}"),
        ),
        Err(e) => return Err(e.into()),
    };
    Ok(Check {
        name: name.to_string(),
        kind: "witness",
        valid,
        detail,
    })
}

pub fn verify_report(path: &Path, g: &Global) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let report: Value = serde_json::from_str(&text).map_err(|e| CliError::Report(format!("not JSON: {e}")))?;
    let command = field(&report, "command")?.as_str().unwrap_or_default();
    let result = field(&report, "result")?;
    let mut checks = Vec::new();
    match command {
        "decide-ph" | "classify" => {
            let input = field(&report, "input")?;
            let a = structure_of(input)?;
            if let Some(c) = result.get("certificate").filter(|c| !c.is_null()) {
                checks.push(check_certificate(a.name(), &a, c, g)?);
            }
            if let Some(w) = result.get("witness").filter(|w| !w.is_null()) {
                checks.push(check_witness(a.name(), &a, w, g)?);
            }
        }
        "crosscheck" => {
            let entries = field(result, "entries")?
                .as_array()
                .ok_or_else(|| CliError::Report("`entries` is not an array".into()))?;
            for e in entries {
                let a = structure_of(e)?;
                if let Some(c) = e.get("certificate").filter(|c| !c.is_null()) {
                    checks.push(check_certificate(a.name(), &a, c, g)?);
                }
                if let Some(w) = e.get("witness").filter(|w| !w.is_null()) {
                    checks.push(check_witness(a.name(), &a, w, g)?);
                }
            }
        }
        other => {
            return Err(CliError::Report(format!("reports of `{other}` carry no certificates")));
        }
    }
    let invalid = checks.iter().filter(|c| !c.valid).count();
    let mut out = format!("{} certificates checked, {invalid} invalid\n", checks.len());
    for c in checks.iter().filter(|c| !c.valid) {
        let _ = writeln!(out, "  invalid {} of {}: {}", c.kind, c.name, c.detail);
    }
    Ok(Outcome::new(
        json!({ "checked": checks.len(), "invalid": invalid, "checks": checks }),
        out,
    )
    .failed(invalid > 0))
}
