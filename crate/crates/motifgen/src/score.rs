//! Symmetric sparse score matrices counting edge occurrences in walks.

use crate::graph::{NodeId, NodeIdMap};
use crate::walk::WalkSet;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("node id {id} out of range for {n} nodes")]
    NodeOutOfRange { id: NodeId, n: usize },
    #[error("diagonal entry at node {0}")]
    Diagonal(NodeId),
    #[error("score must be nonnegative, got {0}")]
    NegativeScore(f64),
    #[error("score file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown external node id {0} in score file")]
    UnknownExternalId(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Symmetric nonnegative sparse matrix over `n` nodes. Each unordered pair
/// is stored once with `i < j`; zero entries are not stored; the diagonal is
/// empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n: usize,
    entries: BTreeMap<(NodeId, NodeId), f64>,
}

impl ScoreMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    /// Builds the score matrix of a walk set: every consecutive pair {u,v}
    /// in every walk adds 1 to the entry, accumulated undirected.
    pub fn from_walks(walks: &WalkSet, n: usize) -> Result<Self, ScoreError> {
        let mut matrix = Self::zeros(n);
        for walk in walks.iter() {
            for pair in walk.windows(2) {
                matrix.add(pair[0], pair[1], 1.0)?;
            }
        }
        Ok(matrix)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (positive) entries.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> f64 {
        self.entries
            .get(&(u.min(v), u.max(v)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn add(&mut self, u: NodeId, v: NodeId, amount: f64) -> Result<(), ScoreError> {
        for id in [u, v] {
            if id as usize >= self.n {
                return Err(ScoreError::NodeOutOfRange { id, n: self.n });
            }
        }
        if u == v {
            return Err(ScoreError::Diagonal(u));
        }
        if amount < 0.0 {
            return Err(ScoreError::NegativeScore(amount));
        }
        if amount > 0.0 {
            *self.entries.entry((u.min(v), u.max(v))).or_insert(0.0) += amount;
        }
        Ok(())
    }

    /// Entries in ascending `(i, j)` order with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (&(NodeId, NodeId), &f64)> {
        self.entries.iter()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Per-node rows of `(neighbor, score)` in ascending neighbor order.
    pub fn rows(&self) -> Vec<Vec<(NodeId, f64)>> {
        let mut rows = vec![Vec::new(); self.n];
        for (&(u, v), &s) in &self.entries {
            rows[u as usize].push((v, s));
            rows[v as usize].push((u, s));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(v, _)| v);
        }
        rows
    }

    /// Writes triplet lines "i j score" in external ids with `i < j`, sorted.
    pub fn write<W: Write>(&self, ids: &NodeIdMap, mut writer: W) -> Result<(), ScoreError> {
        let mut lines: Vec<(u64, u64, f64)> = self
            .entries
            .iter()
            .map(|(&(u, v), &s)| {
                let (a, b) = (ids.external(u), ids.external(v));
                (a.min(b), a.max(b), s)
            })
            .collect();
        lines.sort_unstable_by_key(|&(a, b, _)| (a, b));
        for (a, b, s) in lines {
            writeln!(writer, "{a} {b} {s}")?;
        }
        Ok(())
    }

    /// Reads a triplet file written by [`ScoreMatrix::write`].
    pub fn read<R: BufRead>(reader: R, ids: &NodeIdMap) -> Result<Self, ScoreError> {
        let mut matrix = Self::zeros(ids.len());
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let (a, b, s) = match (tokens.next(), tokens.next(), tokens.next(), tokens.next()) {
                (Some(a), Some(b), Some(s), None) => (a, b, s),
                _ => {
                    return Err(ScoreError::Parse {
                        line: idx + 1,
                        msg: format!("expected \"i j score\", got {trimmed:?}"),
                    })
                }
            };
            let parse_id = |tok: &str| {
                tok.parse::<u64>().map_err(|_| ScoreError::Parse {
                    line: idx + 1,
                    msg: format!("malformed node id {tok:?}"),
                })
            };
            let (ea, eb) = (parse_id(a)?, parse_id(b)?);
            let score = s.parse::<f64>().map_err(|_| ScoreError::Parse {
                line: idx + 1,
                msg: format!("malformed score {s:?}"),
            })?;
            let u = ids.internal(ea).ok_or(ScoreError::UnknownExternalId(ea))?;
            let v = ids.internal(eb).ok_or(ScoreError::UnknownExternalId(eb))?;
            matrix.add(u, v, score)?;
        }
        Ok(matrix)
    }
}
