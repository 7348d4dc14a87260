//! Characteristic-agnostic codes: small integer entries plus multiples of
//! `q^{-1}`, instantiated into a [`FractionalCode`] for a chosen prime.

use std::collections::BTreeMap;
use std::fmt;

use super::{check_rules, io, CodeError, FractionalCode, InputRef, Rule, Shaped};
use crate::field::PrimeModulus;
use crate::matrix::FieldMatrix;
use crate::network::CodedNetwork;

/// One entry of a symbolic matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymEntry {
    Int(i64),
    /// `c * q^{-1}`
    InvQ(i64),
}

impl SymEntry {
    pub const ZERO: SymEntry = SymEntry::Int(0);
    pub const ONE: SymEntry = SymEntry::Int(1);

    pub fn is_zero(self) -> bool {
        matches!(self, SymEntry::Int(0) | SymEntry::InvQ(0))
    }

    fn eval(self, p: PrimeModulus, q_inv: Option<u64>) -> Option<u64> {
        match self {
            SymEntry::Int(v) => Some(p.reduce(v)),
            SymEntry::InvQ(0) => Some(0),
            SymEntry::InvQ(c) => q_inv.map(|qi| p.mul(p.reduce(c), qi)),
        }
    }

    /// Text form used in code files: plain integers, `"INV_Q"`, or
    /// `"<c>*INV_Q"`.
    pub fn parse(s: &str) -> Option<SymEntry> {
        if s == "INV_Q" {
            return Some(SymEntry::InvQ(1));
        }
        if let Some(c) = s.strip_suffix("*INV_Q") {
            return c.parse().ok().map(SymEntry::InvQ);
        }
        s.parse().ok().map(SymEntry::Int)
    }
}

impl fmt::Display for SymEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymEntry::Int(v) => write!(f, "{v}"),
            SymEntry::InvQ(1) => f.write_str("INV_Q"),
            SymEntry::InvQ(c) => write!(f, "{c}*INV_Q"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<SymEntry>,
}

impl Shaped for SymMatrix {
    fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

impl SymMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymMatrix {
            rows,
            cols,
            entries: vec![SymEntry::ZERO; rows * cols],
        }
    }

    /// `value * I_dim`.
    pub fn diagonal(dim: usize, value: SymEntry) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, value);
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(dim, SymEntry::ONE)
    }

    /// `n x 1` column with a one at `pos` (the embedding `x -> x e_pos`).
    pub fn unit_col(n: usize, pos: usize) -> Self {
        let mut m = Self::zeros(n, 1);
        m.set(pos, 0, SymEntry::ONE);
        m
    }

    /// `1 x n` row selecting coordinate `pos`.
    pub fn unit_row(n: usize, pos: usize) -> Self {
        let mut m = Self::zeros(1, n);
        m.set(0, pos, SymEntry::ONE);
        m
    }

    pub fn from_rows(rows: Vec<Vec<SymEntry>>) -> Result<Self, CodeError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some((i, bad)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
            return Err(CodeError::Parse(format!("row {i} has {} entries, expected {c}", bad.len())));
        }
        Ok(SymMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self, CodeError> {
        Self::from_rows(rows.iter().map(|r| r.iter().copied().map(SymEntry::Int).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> SymEntry {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: SymEntry) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<SymEntry>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(<[SymEntry]>::to_vec).collect()
    }

    pub fn uses_inv_q(&self) -> bool {
        self.entries.iter().any(|e| matches!(e, SymEntry::InvQ(c) if *c != 0))
    }

    /// A `rows x cols` zero matrix with `block` copied in at `(row, col)`.
    pub fn embed(rows: usize, cols: usize, row: usize, col: usize, block: &SymMatrix) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                m.set(row + r, col + c, block.get(r, c));
            }
        }
        m
    }

    pub fn instantiate(&self, p: PrimeModulus, q_inv: Option<u64>) -> Option<FieldMatrix> {
        let entries = self.entries.iter().map(|e| e.eval(p, q_inv)).collect::<Option<Vec<u64>>>()?;
        Some(FieldMatrix::from_flat(self.rows, self.cols, entries, p))
    }
}

/// Same layout as [`FractionalCode`] but with symbolic entries, plus the
/// construction parameter `q` that `INV_Q` refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicCode {
    pub k: usize,
    pub n: usize,
    pub q: u64,
    pub edge_rules: BTreeMap<String, Rule<SymMatrix>>,
    pub decode_rules: BTreeMap<String, Rule<SymMatrix>>,
}

impl SymbolicCode {
    pub fn new(k: usize, n: usize, q: u64) -> Self {
        SymbolicCode {
            k,
            n,
            q,
            edge_rules: BTreeMap::new(),
            decode_rules: BTreeMap::new(),
        }
    }

    /// Adds `matrix` as the weight of `input` on `edge`, creating the rule
    /// if needed.
    pub fn set_edge_input(&mut self, edge: impl Into<String>, input: InputRef, matrix: SymMatrix) {
        self.edge_rules.entry(edge.into()).or_default().insert(input, matrix);
    }

    pub fn set_decode_input(&mut self, terminal: impl Into<String>, input: InputRef, matrix: SymMatrix) {
        self.decode_rules.entry(terminal.into()).or_default().insert(input, matrix);
    }

    pub fn uses_inv_q(&self) -> bool {
        self.edge_rules
            .values()
            .chain(self.decode_rules.values())
            .flat_map(|r| r.values())
            .any(SymMatrix::uses_inv_q)
    }

    pub fn check(&self, net: &CodedNetwork) -> Result<(), CodeError> {
        check_rules(net, self.k, self.n, &self.edge_rules, &self.decode_rules)
    }

    /// Reduces integer entries mod `p` and replaces `q^{-1}` by the inverse
    /// of `q` mod `p`. Fails when `p | q` and the code needs `q^{-1}`.
    pub fn instantiate(&self, p: PrimeModulus) -> Result<FractionalCode, CodeError> {
        let q_inv = p.inv_int(self.q as i64).ok();
        if q_inv.is_none() && self.uses_inv_q() {
            return Err(CodeError::QNotInvertible { q: self.q, p: p.get() });
        }
        let convert = |rules: &BTreeMap<String, Rule<SymMatrix>>| -> BTreeMap<String, Rule<FieldMatrix>> {
            rules
                .iter()
                .map(|(id, rule)| {
                    let rule = rule
                        .iter()
                        .map(|(input, m)| (input.clone(), m.instantiate(p, q_inv).expect("q^-1 available")))
                        .collect();
                    (id.clone(), rule)
                })
                .collect()
        };
        Ok(FractionalCode {
            k: self.k,
            n: self.n,
            modulus: p,
            q: Some(self.q),
            edge_rules: convert(&self.edge_rules),
            decode_rules: convert(&self.decode_rules),
        })
    }

    pub fn save(&self) -> String {
        io::save_symbolic(self)
    }

    pub fn parse(text: &str) -> Result<Self, CodeError> {
        io::load_symbolic(text)
    }
}
