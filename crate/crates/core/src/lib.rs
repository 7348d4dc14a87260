//! Fractional linear network coding over prime fields, with the
//! characteristic-dependent networks N1(q, n) and N2(q, n), their explicit
//! codes, and an exhaustive search that certifies unsolvability at small
//! scale.
//!
//! * [`field`] / [`matrix`]: exact GF(p) arithmetic and dense matrices.
//! * [`network`]: DAG model with sources, terminals and demands.
//! * [`code`]: `(k, n)` codes, transfer evaluation and the verifier.
//! * [`constructions`]: network generators, k-copy unions, the
//!   multiple-unicast gadget.
//! * [`solutions`]: the explicit achievability codes and their lifts.
//! * [`solver`]: backtracking search over global coding subspaces.

pub mod code;
pub mod constructions;
pub mod field;
pub mod matrix;
pub mod network;
pub mod solutions;
pub mod solver;

pub use code::{FractionalCode, SymbolicCode, VerificationReport};
pub use field::PrimeModulus;
pub use matrix::FieldMatrix;
pub use network::{CodedNetwork, MessageId};

use serde::Serialize;

/// Pretty JSON with sorted keys, two-space indent and a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // Round-tripping through `Value` sorts object keys (BTreeMap-backed).
    let value = serde_json::to_value(value).expect("serializable document");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable value");
    s.push('\n');
    s
}
