//! JSON formats.
//!
//! Matrices are lists of rows whose entries are `[re, im]` pairs or plain
//! real numbers:
//!
//! ```json
//! {"dim": 2, "states": [{"p": 0.5, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
//!                       {"p": 0.5, "bloch": [1, 0, 0]}]}
//! {"dim": 2, "elements": [[[1,0],[0,0]], [[0,0],[0,1]]]}
//! {"depth": 1, "nodes": [{"path": "", "b0": [[1,0],[0,0]], "b1": [[0,0],[0,1]]}]}
//! ```
//!
//! A `bloch` entry `v` stands for the qubit state `(1 + v·σ)/2`. Written
//! numbers are rounded to 12 significant digits.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::discrimination::WeightedEnsemble;
use crate::error::{Error, Result};
use crate::operator::{BlochOperator, HermitianOperator, C64};
use crate::povm::{BitPath, NestedPovm, Povm};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type MatrixJson = Vec<Vec<Entry>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    pub dim: usize,
    pub states: Vec<StateJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub dim: usize,
    pub elements: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub path: String,
    pub b0: MatrixJson,
    pub b1: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NestedJson {
    pub depth: usize,
    pub nodes: Vec<NodeJson>,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every number in a JSON tree to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round12(x)))
            .map(Value::Number)
            .unwrap_or(Value::Number(n)),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn matrix_from_json(m: &MatrixJson, dim: usize) -> Result<HermitianOperator> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(Error::WrongDimension {
            expected: dim,
            found: m.len(),
        });
    }
    let raw = DMatrix::from_fn(dim, dim, |i, j| match m[i][j] {
        Entry::Real(re) => C64::new(re, 0.0),
        Entry::Complex([re, im]) => C64::new(re, im),
    });
    HermitianOperator::new(raw)
}

pub fn matrix_to_json(x: &HermitianOperator) -> MatrixJson {
    let m = x.matrix();
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| Entry::Complex([round12(m[(i, j)].re), round12(m[(i, j)].im)]))
                .collect()
        })
        .collect()
}

impl EnsembleJson {
    pub fn to_ensemble(&self) -> Result<WeightedEnsemble> {
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let rho = match (&s.matrix, &s.bloch) {
                    (Some(m), None) => matrix_from_json(m, self.dim)?,
                    (None, Some(v)) if self.dim == 2 => BlochOperator::state(*v).to_operator(),
                    (None, Some(_)) => {
                        return Err(Error::Parse(format!("state {j}: Bloch vectors need dim 2")))
                    }
                    _ => {
                        return Err(Error::Parse(format!(
                            "state {j} needs exactly one of \"matrix\" or \"bloch\""
                        )))
                    }
                };
                Ok((s.p, rho))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightedEnsemble::new(states)
    }

    pub fn from_ensemble(e: &WeightedEnsemble) -> Self {
        Self {
            dim: e.dim(),
            states: e
                .states()
                .iter()
                .map(|s| StateJson {
                    p: round12(s.p),
                    matrix: Some(matrix_to_json(&s.rho)),
                    bloch: None,
                })
                .collect(),
        }
    }
}

impl PovmJson {
    pub fn to_povm(&self) -> Result<Povm> {
        let elements = self
            .elements
            .iter()
            .map(|m| matrix_from_json(m, self.dim))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(elements)
    }

    pub fn from_povm(p: &Povm) -> Self {
        Self {
            dim: p.dim(),
            elements: p.elements().iter().map(matrix_to_json).collect(),
        }
    }
}

impl NestedJson {
    pub fn to_nested(&self) -> Result<NestedPovm> {
        let dim = self
            .nodes
            .first()
            .map(|n| n.b0.len())
            .ok_or_else(|| Error::Parse("tree has no nodes".into()))?;
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let path: BitPath = n.path.parse()?;
                Ok((
                    path,
                    matrix_from_json(&n.b0, dim)?,
                    matrix_from_json(&n.b1, dim)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        NestedPovm::new(self.depth, nodes)
    }

    pub fn from_nested(n: &NestedPovm) -> Self {
        Self {
            depth: n.depth(),
            nodes: n
                .nodes()
                .map(|(path, node)| NodeJson {
                    path: path.to_string(),
                    b0: matrix_to_json(&node.b0),
                    b1: matrix_to_json(&node.b1),
                })
                .collect(),
        }
    }
}

pub fn parse_ensemble(text: &str) -> Result<WeightedEnsemble> {
    serde_json::from_str::<EnsembleJson>(text)
        .map_err(parse_err)?
        .to_ensemble()
}

pub fn parse_povm(text: &str) -> Result<Povm> {
    serde_json::from_str::<PovmJson>(text)
        .map_err(parse_err)?
        .to_povm()
}

pub fn parse_nested(text: &str) -> Result<NestedPovm> {
    serde_json::from_str::<NestedJson>(text)
        .map_err(parse_err)?
        .to_nested()
}
