//! Canonical JSON code files.
//!
//! ```text
//! { "k": 1, "n": 2, "p": 2, "q": 2,
//!   "edge_rules":   [ { "edge": "u1->u3", "inputs": [ { "ref": "a1->u1", "matrix": [[1,0],[0,1]] } ] } ],
//!   "decode_rules": [ { "terminal": "Ta:a1", "inputs": [ { "ref": "u14->Ta:a1", "matrix": [[1,0]] } ] } ] }
//! ```
//!
//! Symbolic files omit `"p"` and may use `"INV_Q"` / `"<c>*INV_Q"` entries.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::symbolic::{SymEntry, SymMatrix, SymbolicCode};
use super::{CodeError, FractionalCode, InputRef, Rule};
use crate::canonical_json;
use crate::field::PrimeModulus;
use crate::matrix::FieldMatrix;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeDoc<E> {
    k: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    edge_rules: Vec<EdgeRuleDoc<E>>,
    decode_rules: Vec<DecodeRuleDoc<E>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRuleDoc<E> {
    edge: String,
    inputs: Vec<InputDoc<E>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecodeRuleDoc<E> {
    terminal: String,
    inputs: Vec<InputDoc<E>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputDoc<E> {
    #[serde(rename = "ref")]
    reference: String,
    matrix: Vec<Vec<E>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SymEntryDoc {
    Int(i64),
    Text(String),
}

fn rules_to_docs<M, E>(rules: &BTreeMap<String, Rule<M>>, to_rows: impl Fn(&M) -> Vec<Vec<E>>) -> RuleDocs<E> {
    rules
        .iter()
        .map(|(id, rule)| {
            let inputs = rule
                .iter()
                .map(|(input, m)| InputDoc {
                    reference: input.to_string(),
                    matrix: to_rows(m),
                })
                .collect();
            (id.clone(), inputs)
        })
        .collect()
}

fn docs_to_rules<M, E>(
    what: &str,
    docs: RuleDocs<E>,
    mut convert: impl FnMut(&str, Vec<Vec<E>>) -> Result<M, CodeError>,
) -> Result<BTreeMap<String, Rule<M>>, CodeError> {
    let mut out = BTreeMap::new();
    for (id, inputs) in docs {
        let mut rule = Rule::new();
        for input in inputs {
            let key = InputRef::parse(&input.reference);
            let where_ = format!("{what} {id}, input {}", input.reference);
            let m = convert(&where_, input.matrix)?;
            if rule.insert(key, m).is_some() {
                return Err(CodeError::Parse(format!("{where_}: duplicate input")));
            }
        }
        if out.insert(id.clone(), rule).is_some() {
            return Err(CodeError::Parse(format!("duplicate {what} {id}")));
        }
    }
    Ok(out)
}

fn parse_doc<E: DeserializeOwned>(text: &str) -> Result<CodeDoc<E>, CodeError> {
    serde_json::from_str(text).map_err(|e| CodeError::Parse(e.to_string()))
}

type RuleDocs<E> = Vec<(String, Vec<InputDoc<E>>)>;

fn split<E>(doc_edges: Vec<EdgeRuleDoc<E>>, doc_decodes: Vec<DecodeRuleDoc<E>>) -> (RuleDocs<E>, RuleDocs<E>) {
    (
        doc_edges.into_iter().map(|r| (r.edge, r.inputs)).collect(),
        doc_decodes.into_iter().map(|r| (r.terminal, r.inputs)).collect(),
    )
}

fn check_rect<E>(where_: &str, rows: &[Vec<E>]) -> Result<(), CodeError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(CodeError::Parse(format!("{where_}: empty matrix")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(CodeError::Parse(format!("{where_}: row {i} is ragged")));
    }
    Ok(())
}

pub(super) fn save_fractional(code: &FractionalCode) -> String {
    let rows = |m: &FieldMatrix| m.to_rows();
    let doc = CodeDoc {
        k: code.k,
        n: code.n,
        p: Some(code.modulus.get()),
        q: code.q,
        edge_rules: rules_to_docs(&code.edge_rules, rows)
            .into_iter()
            .map(|(edge, inputs)| EdgeRuleDoc { edge, inputs })
            .collect(),
        decode_rules: rules_to_docs(&code.decode_rules, rows)
            .into_iter()
            .map(|(terminal, inputs)| DecodeRuleDoc { terminal, inputs })
            .collect(),
    };
    canonical_json(&doc)
}

pub(super) fn load_fractional(text: &str) -> Result<FractionalCode, CodeError> {
    let doc: CodeDoc<u64> = parse_doc(text)?;
    let p = doc.p.ok_or_else(|| CodeError::Parse("missing field `p`".into()))?;
    let modulus = PrimeModulus::new(p)?;
    if doc.k == 0 || doc.n == 0 {
        return Err(CodeError::BadDimensions { k: doc.k, n: doc.n });
    }
    let convert = |where_: &str, rows: Vec<Vec<u64>>| {
        check_rect(where_, &rows)?;
        FieldMatrix::from_residue_rows(&rows, modulus).map_err(|e| CodeError::Parse(format!("{where_}: {e}")))
    };
    let (edges, decodes) = split(doc.edge_rules, doc.decode_rules);
    Ok(FractionalCode {
        k: doc.k,
        n: doc.n,
        modulus,
        q: doc.q,
        edge_rules: docs_to_rules("edge", edges, convert)?,
        decode_rules: docs_to_rules("terminal", decodes, convert)?,
    })
}

pub(super) fn save_symbolic(code: &SymbolicCode) -> String {
    let rows = |m: &SymMatrix| -> Vec<Vec<SymEntryDoc>> {
        m.to_rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| match e {
                        SymEntry::Int(v) => SymEntryDoc::Int(v),
                        SymEntry::InvQ(0) => SymEntryDoc::Int(0),
                        other => SymEntryDoc::Text(other.to_string()),
                    })
                    .collect()
            })
            .collect()
    };
    let doc = CodeDoc {
        k: code.k,
        n: code.n,
        p: None,
        q: Some(code.q),
        edge_rules: rules_to_docs(&code.edge_rules, rows)
            .into_iter()
            .map(|(edge, inputs)| EdgeRuleDoc { edge, inputs })
            .collect(),
        decode_rules: rules_to_docs(&code.decode_rules, rows)
            .into_iter()
            .map(|(terminal, inputs)| DecodeRuleDoc { terminal, inputs })
            .collect(),
    };
    canonical_json(&doc)
}

pub(super) fn load_symbolic(text: &str) -> Result<SymbolicCode, CodeError> {
    let doc: CodeDoc<SymEntryDoc> = parse_doc(text)?;
    let q = doc.q.ok_or_else(|| CodeError::Parse("missing field `q`".into()))?;
    if doc.p.is_some() {
        return Err(CodeError::Parse("symbolic code must not carry `p`".into()));
    }
    if doc.k == 0 || doc.n == 0 {
        return Err(CodeError::BadDimensions { k: doc.k, n: doc.n });
    }
    let convert = |where_: &str, rows: Vec<Vec<SymEntryDoc>>| {
        check_rect(where_, &rows)?;
        let rows = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| match e {
                        SymEntryDoc::Int(v) => Ok(SymEntry::Int(v)),
                        SymEntryDoc::Text(s) => {
                            SymEntry::parse(&s).ok_or_else(|| CodeError::Parse(format!("{where_}: bad entry {s:?}")))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        SymMatrix::from_rows(rows)
    };
    let (edges, decodes) = split(doc.edge_rules, doc.decode_rules);
    Ok(SymbolicCode {
        k: doc.k,
        n: doc.n,
        q,
        edge_rules: docs_to_rules("edge", edges, convert)?,
        decode_rules: docs_to_rules("terminal", decodes, convert)?,
    })
}
