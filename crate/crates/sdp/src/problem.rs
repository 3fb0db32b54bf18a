//! Standard-form conic programs.
//!
//! A problem optimizes `<C, X> + offset` subject to `<A_i, X> = b_i`, where
//! `X` is block diagonal. Each block is either a PSD matrix, a vector of
//! nonnegative scalars, or a vector of free scalars.
//!
//! Matrix coefficients are stored as sparse symmetric triplets `(i, j, v)`
//! with `i <= j`. An off-diagonal triplet stands for the value `v` at both
//! `(i, j)` and `(j, i)`, so it contributes `2 v X_ij` to an inner product.
//! Scalar blocks only use diagonal triplets `(k, k, v)`.

use serde::{Deserialize, Serialize};

use crate::SdpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Psd,
    Nonneg,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub entries: Vec<Entry>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub name: String,
    #[serde(default)]
    pub digest: String,
    pub sense: Sense,
    pub blocks: Vec<Block>,
    pub objective: Vec<Entry>,
    #[serde(default)]
    pub offset: f64,
    pub constraints: Vec<Constraint>,
    /// Free-form description of how the program was rewritten into this form.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl SdpProblem {
    pub fn new(name: impl Into<String>, sense: Sense) -> Self {
        SdpProblem {
            name: name.into(),
            digest: String::new(),
            sense,
            blocks: Vec::new(),
            objective: Vec::new(),
            offset: 0.0,
            constraints: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Appends a block and returns its index.
    pub fn add_block(&mut self, kind: BlockKind, dim: usize) -> usize {
        self.blocks.push(Block { kind, dim });
        self.blocks.len() - 1
    }

    /// Adds `v` to the objective coefficient at `(i, j)` of `block`.
    pub fn obj(&mut self, block: usize, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.objective.push(Entry { block, i, j, v });
    }

    pub fn add_constraint(&mut self, entries: Vec<Entry>, rhs: f64) -> usize {
        let entries = entries
            .into_iter()
            .map(|e| if e.i <= e.j { e } else { Entry { i: e.j, j: e.i, ..e } })
            .collect();
        self.constraints.push(Constraint { entries, rhs });
        self.constraints.len() - 1
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn psd_dimension(&self) -> usize {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Psd).map(|b| b.dim).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SdpError> {
        let p: SdpProblem =
            serde_json::from_str(text).map_err(|e| SdpError::Malformed(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    /// Checks index ranges, finiteness and scalar-block shapes.
    pub fn validate(&self) -> Result<(), SdpError> {
        let check = |e: &Entry, what: &str| -> Result<(), SdpError> {
            let b = self.blocks.get(e.block).ok_or_else(|| {
                SdpError::Malformed(format!("{what}: block {} out of range", e.block))
            })?;
            if e.i > e.j || e.j >= b.dim {
                return Err(SdpError::Malformed(format!(
                    "{what}: entry ({}, {}) outside block {} of dimension {}",
                    e.i, e.j, e.block, b.dim
                )));
            }
            if b.kind != BlockKind::Psd && e.i != e.j {
                return Err(SdpError::Malformed(format!(
                    "{what}: scalar block {} has off-diagonal entry",
                    e.block
                )));
            }
            if !e.v.is_finite() {
                return Err(SdpError::Malformed(format!("{what}: non-finite coefficient")));
            }
            Ok(())
        };
        if self.blocks.iter().any(|b| b.dim == 0) {
            return Err(SdpError::Malformed("empty block".into()));
        }
        for e in &self.objective {
            check(e, "objective")?;
        }
        for (k, c) in self.constraints.iter().enumerate() {
            for e in &c.entries {
                check(e, &format!("constraint {k}"))?;
            }
            if !c.rhs.is_finite() {
                return Err(SdpError::Malformed(format!("constraint {k}: non-finite rhs")));
            }
        }
        if !self.offset.is_finite() {
            return Err(SdpError::Malformed("non-finite offset".into()));
        }
        Ok(())
    }
}

/// Shorthand for building an [`Entry`].
pub fn entry(block: usize, i: usize, j: usize, v: f64) -> Entry {
    Entry { block, i, j, v }
}
