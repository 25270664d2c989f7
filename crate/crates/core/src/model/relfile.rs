//! The `.rel` text format.
//!
//! ```text
//! # comment
//! structure C2 2
//! relation le 2
//! 0 0
//! 0 1
//! 1 1
//! ```
//!
//! A file may hold several structures. Relation-only files (no `structure`
//! line) describe free-standing relations such as the argument of `gamma`.
//! Canonical output sorts tuples lexicographically and ends with a newline.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::relset::RelationSet;
use crate::model::structure::{validate_structure, FiniteStructure, RawRelation, RawStructure};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected {what}, found `{tok}`"),
    })
}

/// Parses every `structure` block in `text` without validating it.
pub fn parse_raw_structures(text: &str) -> Result<Vec<RawStructure>> {
    let mut out: Vec<RawStructure> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks: Vec<&str> = strip_comment(line).split_whitespace().collect();
        match toks.first().copied() {
            None => {}
            Some("structure") => {
                let [_, name, n] = toks[..] else {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "expected `structure <name> <n>`".into(),
                    });
                };
                out.push(RawStructure::new(name, parse_usize(n, lineno, "carrier size")?));
            }
            Some("relation") => {
                let [_, name, arity] = toks[..] else {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "expected `relation <name> <arity>`".into(),
                    });
                };
                let Some(current) = out.last_mut() else {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "relation before any `structure` line".into(),
                    });
                };
                current.relations.push(RawRelation {
                    name: name.into(),
                    arity: parse_usize(arity, lineno, "arity")?,
                    tuples: Vec::new(),
                });
            }
            Some(_) => {
                let Some(rel) = out.last_mut().and_then(|s| s.relations.last_mut()) else {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "tuple outside a relation block".into(),
                    });
                };
                let tuple = toks
                    .iter()
                    .map(|t| parse_usize(t, lineno, "an element"))
                    .collect::<Result<Vec<_>>>()?;
                rel.tuples.push(tuple);
            }
        }
    }
    Ok(out)
}

pub fn parse_structures(text: &str) -> Result<Vec<FiniteStructure>> {
    parse_raw_structures(text)?.iter().map(validate_structure).collect()
}

/// Parses a file holding exactly one structure.
pub fn parse_structure(text: &str) -> Result<FiniteStructure> {
    let mut all = parse_structures(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(Error::Parse {
            line: 1,
            message: "no `structure` line found".into(),
        }),
        k => Err(Error::Parse {
            line: 1,
            message: format!("expected one structure, found {k}"),
        }),
    }
}

/// Parses the first `relation` block of a relation-only file over the given carrier.
pub fn parse_relation(text: &str, carrier: usize) -> Result<RelationSet> {
    let mut arity = None;
    let mut tuples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks: Vec<&str> = strip_comment(line).split_whitespace().collect();
        match toks.first().copied() {
            None => {}
            Some("relation") => {
                if arity.is_some() {
                    break;
                }
                let [_, _, a] = toks[..] else {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "expected `relation <name> <arity>`".into(),
                    });
                };
                arity = Some(parse_usize(a, lineno, "arity")?);
            }
            Some("structure") => {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected a relation-only file".into(),
                })
            }
            Some(_) => {
                let Some(a) = arity else {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "tuple outside a relation block".into(),
                    });
                };
                let tuple = toks
                    .iter()
                    .map(|t| parse_usize(t, lineno, "an element"))
                    .collect::<Result<Vec<_>>>()?;
                if tuple.len() != a {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("tuple has {} entries, expected {a}", tuple.len()),
                    });
                }
                tuples.push(tuple);
            }
        }
    }
    let arity = arity.ok_or(Error::Parse {
        line: 1,
        message: "no `relation` line found".into(),
    })?;
    RelationSet::new(arity, carrier, tuples)
}

pub fn serialize_structure(a: &FiniteStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "structure {} {}", a.name(), a.size());
    for (sym, rel) in a.signature().symbols().iter().zip(a.relations()) {
        let _ = writeln!(out, "relation {} {}", sym.name, sym.arity);
        for t in rel.tuples() {
            out.push_str(&join(t));
            out.push('\n');
        }
    }
    out
}

pub fn serialize_relation(name: &str, r: &RelationSet) -> String {
    let mut out = format!("relation {name} {}\n", r.arity());
    for t in r.iter() {
        out.push_str(&join(t));
        out.push('\n');
    }
    out
}

fn join(t: &[usize]) -> String {
    t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CHAIN: &str = "structure C2 2\nrelation le 2\n0 0\n0 1\n1 1\n";

    #[test]
    fn chain_round_trips() {
        let a = parse_structure(CHAIN).unwrap();
        assert_eq!(serialize_structure(&a), CHAIN);
    }

    #[test]
    fn comments_and_order_are_normalized() {
        let text = "# a poset\nstructure C2 2 # two points\n\nrelation le 2\n1 1\n0 1\n0 0\n0 0\n";
        let a = parse_structure(text).unwrap();
        assert_eq!(serialize_structure(&a), CHAIN);
    }

    #[test]
    fn out_of_range_reported_through_validation() {
        let err = parse_structure("structure G 2\nrelation e 2\n0 2\n").unwrap_err();
        assert!(err.to_string().contains("entry 2 out of range"));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_structure("relation e 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_structure("structure G 2\nrelation e 2\n0 x\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_structure("").is_err());
    }

    #[test]
    fn several_structures() {
        let text = format!("{CHAIN}structure P 1\n");
        let all = parse_structures(&text).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].size(), 1);
    }

    #[test]
    fn relation_file() {
        let r = parse_relation("relation tau 2\n0 1\n", 2).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(serialize_relation("tau", &r), "relation tau 2\n0 1\n");
        assert!(parse_relation("relation tau 2\n0 1 1\n", 2).is_err());
    }

    proptest! {
        #[test]
        fn serialize_parse_is_identity(
            n in 1usize..5,
            rels in proptest::collection::vec(
                (1usize..4, proptest::collection::vec(proptest::collection::vec(0usize..5, 3), 0..12)),
                0..3,
            ),
        ) {
            let mut raw = RawStructure::new("S", n);
            for (i, (arity, tuples)) in rels.into_iter().enumerate() {
                let tuples = tuples.into_iter().map(|t| t[..arity].iter().map(|e| e % n).collect());
                raw = raw.relation(format!("r{i}"), arity, tuples);
            }
            let a = validate_structure(&raw).unwrap();
            let text = serialize_structure(&a);
            let b = parse_structure(&text).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(serialize_structure(&b), text);
        }
    }
}
