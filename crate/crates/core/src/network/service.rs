use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Upper bound of the seeded uniform range when none is given.
pub const DEFAULT_SEEDED_MAX: i64 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("service time at node {node}, customer {k} must be positive, got {value}")]
    NonPositive { node: usize, k: usize, value: i64 },
    #[error("seeded service range [1, {max}] is empty")]
    EmptyRange { max: i64 },
    #[error("customer index must be at least 1")]
    ZeroIndex,
    #[error("service table has {rows} rows, network has {nodes} nodes")]
    TableShape { rows: usize, nodes: usize },
    #[error("node {node} out of range for the service table")]
    UnknownNode { node: usize },
    #[error("service table exhausted at node {node}: customer {k} requested, {len} available")]
    Exhausted { node: usize, k: usize, len: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Source {
    Table(Vec<Vec<i64>>),
    Seeded { seed: u64, max: i64 },
}

/// Provider of the service times `τ_ik > 0`.
///
/// Seeded sources are a pure function of `(seed, i, k)`: no stream state,
/// so queries in any order or from any thread agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServiceTimeSource(Source);

impl ServiceTimeSource {
    /// One row per node, one column per customer. Node and customer numbers
    /// in errors are 1-based.
    pub fn table(rows: Vec<Vec<i64>>) -> Result<Self, ServiceError> {
        for (i, row) in rows.iter().enumerate() {
            if let Some((k, &value)) = row.iter().enumerate().find(|(_, &t)| t <= 0) {
                return Err(ServiceError::NonPositive {
                    node: i + 1,
                    k: k + 1,
                    value,
                });
            }
        }
        Ok(ServiceTimeSource(Source::Table(rows)))
    }

    /// Uniform integers in `[1, max]`.
    pub fn seeded(seed: u64, max: i64) -> Result<Self, ServiceError> {
        if max < 1 {
            return Err(ServiceError::EmptyRange { max });
        }
        Ok(ServiceTimeSource(Source::Seeded { seed, max }))
    }

    pub fn is_seeded(&self) -> bool {
        matches!(self.0, Source::Seeded { .. })
    }

    /// Replaces the seed of a seeded source; `None` for a table.
    pub fn reseeded(&self, seed: u64) -> Option<Self> {
        match self.0 {
            Source::Seeded { max, .. } => Some(ServiceTimeSource(Source::Seeded { seed, max })),
            Source::Table(_) => None,
        }
    }

    /// Checks that a table has one row per node. Seeded sources always pass.
    pub fn check_nodes(&self, nodes: usize) -> Result<(), ServiceError> {
        match &self.0 {
            Source::Table(rows) if rows.len() != nodes => Err(ServiceError::TableShape {
                rows: rows.len(),
                nodes,
            }),
            _ => Ok(()),
        }
    }

    /// `τ_ik` for 0-based node `i` and 1-based customer `k`.
    pub fn service_time(&self, i: usize, k: usize) -> Result<i64, ServiceError> {
        if k == 0 {
            return Err(ServiceError::ZeroIndex);
        }
        match &self.0 {
            Source::Table(rows) => {
                let row = rows
                    .get(i)
                    .ok_or(ServiceError::UnknownNode { node: i + 1 })?;
                row.get(k - 1).copied().ok_or(ServiceError::Exhausted {
                    node: i + 1,
                    k,
                    len: row.len(),
                })
            }
            Source::Seeded { seed, max } => {
                let mut key = [0u8; 32];
                key[..8].copy_from_slice(&seed.to_le_bytes());
                key[8..16].copy_from_slice(&(i as u64).to_le_bytes());
                key[16..24].copy_from_slice(&(k as u64).to_le_bytes());
                let mut rng = ChaCha8Rng::from_seed(key);
                Ok(rng.gen_range(1..=*max))
            }
        }
    }
}
