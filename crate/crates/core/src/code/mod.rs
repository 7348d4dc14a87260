//! `(k, n)` fractional linear network codes: representation, transfer
//! evaluation over the network, and the terminal-demand verifier.
//!
//! A code assigns to every edge `e` a set of local coding matrices, one per
//! input: an `n x k` matrix for the message generated at `tail(e)` when the
//! tail is a source, or an `n x n` matrix for each in-edge of `tail(e)`.
//! Terminals carry `k x n` decode matrices over their in-edges. Inputs left
//! out of a rule are weighted zero.

mod io;
mod symbolic;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, PrimeModulus};
use crate::matrix::{FieldMatrix, LinalgError};
use crate::network::{CodedNetwork, MessageId, NetworkError, Role, TieBreak};

pub use symbolic::{SymEntry, SymMatrix, SymbolicCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("rule for unknown edge {0}")]
    UnknownEdge(String),
    #[error("edge {0} has no coding rule")]
    MissingEdgeRule(String),
    #[error("decode rule for {0}, which is not a terminal")]
    UnknownTerminal(String),
    #[error("terminal {0} has no decode rule")]
    MissingDecodeRule(String),
    #[error("{owner}: input {input} is not an in-edge of its tail")]
    NotAParent { owner: String, input: String },
    #[error("{owner}: message {message} is not generated at its tail")]
    SourceNotAtTail { owner: String, message: String },
    #[error("{owner}/{input}: expected {expected:?} matrix, found {found:?}")]
    Shape {
        owner: String,
        input: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("{owner}/{input}: matrix over GF({found}), code is over GF({expected})")]
    Modulus {
        owner: String,
        input: String,
        expected: u64,
        found: u64,
    },
    #[error("block sizes must be positive (k={k}, n={n})")]
    BadDimensions { k: usize, n: usize },
    #[error("q={q} is not invertible modulo {p}: the characteristic divides q")]
    QNotInvertible { q: u64, p: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// What a local coding matrix multiplies: a message generated at the tail,
/// or the symbols carried by an in-edge of the tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InputRef {
    Source(MessageId),
    Edge(String),
}

impl InputRef {
    pub fn edge(id: impl Into<String>) -> Self {
        InputRef::Edge(id.into())
    }

    pub fn source(m: impl Into<MessageId>) -> Self {
        InputRef::Source(m.into())
    }

    /// Parses `"src:<message>"` or a bare edge id.
    pub fn parse(s: &str) -> Self {
        match s.strip_prefix("src:") {
            Some(m) => InputRef::Source(MessageId::new(m)),
            None => InputRef::Edge(s.to_string()),
        }
    }
}

impl fmt::Display for InputRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputRef::Source(m) => write!(f, "src:{m}"),
            InputRef::Edge(e) => f.write_str(e),
        }
    }
}

/// Local coding matrices of one edge or terminal, keyed by input.
pub type Rule<M> = BTreeMap<InputRef, M>;

/// Anything with a matrix shape; lets structural checks run on both
/// numeric and symbolic codes.
pub trait Shaped {
    fn shape(&self) -> (usize, usize);
}

impl Shaped for FieldMatrix {
    fn shape(&self) -> (usize, usize) {
        FieldMatrix::shape(self)
    }
}

/// A `(k, n)` fractional linear network code over GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalCode {
    pub k: usize,
    pub n: usize,
    pub modulus: PrimeModulus,
    /// Construction parameter carried over from a symbolic code, if any.
    pub q: Option<u64>,
    pub edge_rules: BTreeMap<String, Rule<FieldMatrix>>,
    pub decode_rules: BTreeMap<String, Rule<FieldMatrix>>,
}

/// Rate `k/n` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rate {
    pub num: usize,
    pub den: usize,
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub fn rate(k: usize, n: usize) -> Rate {
    let g = k.gcd(&n).max(1);
    Rate { num: k / g, den: n / g }
}

impl FractionalCode {
    pub fn new(k: usize, n: usize, modulus: PrimeModulus) -> Self {
        FractionalCode {
            k,
            n,
            modulus,
            q: None,
            edge_rules: BTreeMap::new(),
            decode_rules: BTreeMap::new(),
        }
    }

    pub fn rate(&self) -> Rate {
        rate(self.k, self.n)
    }

    /// Checks the code against `net`: every edge and terminal has a rule,
    /// every input is admissible, every matrix has the right shape and field.
    pub fn check(&self, net: &CodedNetwork) -> Result<(), CodeError> {
        check_rules(net, self.k, self.n, &self.edge_rules, &self.decode_rules)?;
        let p = self.modulus.get();
        for (owner, rule) in self.edge_rules.iter().chain(&self.decode_rules) {
            for (input, m) in rule {
                if m.modulus() != self.modulus {
                    return Err(CodeError::Modulus {
                        owner: owner.clone(),
                        input: input.to_string(),
                        expected: p,
                        found: m.modulus().get(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn save(&self) -> String {
        io::save_fractional(self)
    }

    /// Parses a code file without checking it against a network.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        io::load_fractional(text)
    }

    /// Parses a code file and checks it against `net`.
    pub fn load(text: &str, net: &CodedNetwork) -> Result<Self, CodeError> {
        let code = io::load_fractional(text)?;
        code.check(net)?;
        Ok(code)
    }
}

pub(crate) fn check_rules<M: Shaped>(
    net: &CodedNetwork,
    k: usize,
    n: usize,
    edge_rules: &BTreeMap<String, Rule<M>>,
    decode_rules: &BTreeMap<String, Rule<M>>,
) -> Result<(), CodeError> {
    if k == 0 || n == 0 {
        return Err(CodeError::BadDimensions { k, n });
    }
    for id in edge_rules.keys() {
        if net.edge(id).is_none() {
            return Err(CodeError::UnknownEdge(id.clone()));
        }
    }
    for e in net.edges() {
        let rule = edge_rules.get(&e.id).ok_or_else(|| CodeError::MissingEdgeRule(e.id.clone()))?;
        let tail = net.node(&e.tail);
        for (input, m) in rule {
            let expected = match input {
                InputRef::Source(msg) => {
                    if tail.and_then(|t| t.generates()) != Some(msg) {
                        return Err(CodeError::SourceNotAtTail {
                            owner: e.id.clone(),
                            message: msg.to_string(),
                        });
                    }
                    (n, k)
                }
                InputRef::Edge(parent) => {
                    if !net.in_edges(&e.tail).any(|pe| &pe.id == parent) {
                        return Err(CodeError::NotAParent {
                            owner: e.id.clone(),
                            input: parent.clone(),
                        });
                    }
                    (n, n)
                }
            };
            if m.shape() != expected {
                return Err(CodeError::Shape {
                    owner: e.id.clone(),
                    input: input.to_string(),
                    expected,
                    found: m.shape(),
                });
            }
        }
    }
    for id in decode_rules.keys() {
        if net.node(id).map(|n| n.role()) != Some(Role::Terminal) {
            return Err(CodeError::UnknownTerminal(id.clone()));
        }
    }
    for t in net.terminals() {
        let rule = decode_rules.get(&t.id).ok_or_else(|| CodeError::MissingDecodeRule(t.id.clone()))?;
        for (input, m) in rule {
            match input {
                InputRef::Source(msg) => {
                    return Err(CodeError::SourceNotAtTail {
                        owner: t.id.clone(),
                        message: msg.to_string(),
                    })
                }
                InputRef::Edge(parent) => {
                    if !net.in_edges(&t.id).any(|pe| &pe.id == parent) {
                        return Err(CodeError::NotAParent {
                            owner: t.id.clone(),
                            input: parent.clone(),
                        });
                    }
                }
            }
            if m.shape() != (k, n) {
                return Err(CodeError::Shape {
                    owner: t.id.clone(),
                    input: input.to_string(),
                    expected: (k, n),
                    found: m.shape(),
                });
            }
        }
    }
    Ok(())
}

/// Global transfer blocks: for each edge and message, the `n x k` matrix
/// mapping that message's `k` symbols into the edge's `n` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMap {
    blocks: BTreeMap<String, BTreeMap<MessageId, FieldMatrix>>,
}

impl TransferMap {
    pub fn block(&self, edge: &str, message: &MessageId) -> Option<&FieldMatrix> {
        self.blocks.get(edge).and_then(|m| m.get(message))
    }

    pub fn edge_blocks(&self, edge: &str) -> Option<&BTreeMap<MessageId, FieldMatrix>> {
        self.blocks.get(edge)
    }

    pub fn edges(&self) -> impl Iterator<Item = &String> + '_ {
        self.blocks.keys()
    }
}

pub fn eval_transfer(net: &CodedNetwork, code: &FractionalCode) -> Result<TransferMap, CodeError> {
    eval_transfer_with(net, code, TieBreak::Lexicographic)
}

/// Evaluates `Y_e` edge by edge in the topological order produced by `tie`.
pub fn eval_transfer_with(net: &CodedNetwork, code: &FractionalCode, tie: TieBreak) -> Result<TransferMap, CodeError> {
    code.check(net)?;
    let p = code.modulus;
    let zero = FieldMatrix::zeros(code.n, code.k, p);
    let mut blocks: BTreeMap<String, BTreeMap<MessageId, FieldMatrix>> = BTreeMap::new();
    for e in net.edge_order_with(tie)? {
        let rule = &code.edge_rules[&e.id];
        let mut y: BTreeMap<MessageId, FieldMatrix> = net.messages().iter().map(|m| (m.clone(), zero.clone())).collect();
        for (input, a) in rule {
            match input {
                InputRef::Source(msg) => {
                    if let Some(b) = y.get_mut(msg) {
                        b.add_assign(a)?;
                    }
                }
                InputRef::Edge(parent) => {
                    let parent_blocks = &blocks[parent];
                    for (msg, acc) in y.iter_mut() {
                        let pb = &parent_blocks[msg];
                        if !pb.is_zero() {
                            acc.add_assign(&a.mul(pb)?)?;
                        }
                    }
                }
            }
        }
        blocks.insert(e.id.clone(), y);
    }
    Ok(TransferMap { blocks })
}

/// Per-terminal outcome of decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalReport {
    pub terminal: String,
    pub demands: MessageId,
    pub pass: bool,
    /// `k x k` block applied to the demanded message.
    pub decoded: FieldMatrix,
    /// Other messages whose block at this terminal is nonzero.
    pub interference: BTreeMap<MessageId, FieldMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub pass: bool,
    pub terminals: Vec<TerminalReport>,
}

impl VerificationReport {
    pub fn failing(&self) -> impl Iterator<Item = &TerminalReport> + '_ {
        self.terminals.iter().filter(|t| !t.pass)
    }

    pub fn failing_ids(&self) -> Vec<String> {
        self.failing().map(|t| t.terminal.clone()).collect()
    }

    pub fn terminal(&self, id: &str) -> Option<&TerminalReport> {
        self.terminals.iter().find(|t| t.terminal == id)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terminals: Vec<serde_json::Value> = self
            .terminals
            .iter()
            .map(|t| {
                serde_json::json!({
                    "terminal": t.terminal,
                    "demands": t.demands.as_str(),
                    "pass": t.pass,
                    "decoded": t.decoded.to_rows(),
                    "interfering": t.interference.keys().map(MessageId::as_str).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "pass": self.pass, "terminals": terminals })
    }
}

/// Decodes at every terminal and checks identity on the demanded message
/// and zero on every other message.
pub fn verify(net: &CodedNetwork, code: &FractionalCode) -> Result<VerificationReport, CodeError> {
    let transfer = eval_transfer(net, code)?;
    verify_with_transfer(net, code, &transfer)
}

pub fn verify_with_transfer(net: &CodedNetwork, code: &FractionalCode, transfer: &TransferMap) -> Result<VerificationReport, CodeError> {
    let p = code.modulus;
    let mut terminals = Vec::new();
    for t in net.terminals() {
        let demand = t.demands().expect("terminal has a demand").clone();
        let rule = &code.decode_rules[&t.id];
        let mut decoded: BTreeMap<&MessageId, FieldMatrix> = BTreeMap::new();
        for msg in net.messages() {
            let mut acc = FieldMatrix::zeros(code.k, code.k, p);
            for (input, d) in rule {
                if let InputRef::Edge(e) = input {
                    let y = transfer.block(e, msg).expect("transfer covers every edge");
                    if !y.is_zero() {
                        acc.add_assign(&d.mul(y)?)?;
                    }
                }
            }
            decoded.insert(msg, acc);
        }
        let own = decoded
            .remove(&demand)
            .unwrap_or_else(|| FieldMatrix::zeros(code.k, code.k, p));
        let interference: BTreeMap<MessageId, FieldMatrix> = decoded
            .into_iter()
            .filter(|(_, b)| !b.is_zero())
            .map(|(m, b)| (m.clone(), b))
            .collect();
        let pass = own.is_identity() && interference.is_empty();
        terminals.push(TerminalReport {
            terminal: t.id.clone(),
            demands: demand,
            pass,
            decoded: own,
            interference,
        });
    }
    terminals.sort_by(|a, b| a.terminal.cmp(&b.terminal));
    Ok(VerificationReport {
        pass: terminals.iter().all(|t| t.pass),
        terminals,
    })
}
