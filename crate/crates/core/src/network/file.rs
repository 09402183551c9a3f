use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use super::service::{ServiceError, ServiceTimeSource, DEFAULT_SEEDED_MAX};
use super::{Blocking, Count, Network, NetworkSpec, ValidationErrors};

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Count::Finite(x) => serializer.serialize_u32(*x),
            Count::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CountVisitor;

        impl Visitor<'_> for CountVisitor {
            type Value = Count;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer or the string \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Count, E> {
                u32::try_from(v)
                    .map(Count::Finite)
                    .map_err(|_| E::custom("count too large"))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Count, E> {
                u64::try_from(v)
                    .map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Count, E> {
                match v {
                    "inf" => Ok(Count::Infinite),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        deserializer.deserialize_any(CountVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ServiceSpec {
    /// One row of service times per node.
    Table(Vec<Vec<i64>>),
    Seeded {
        seed: u64,
        #[serde(default = "default_max")]
        max: i64,
    },
}

fn default_max() -> i64 {
    DEFAULT_SEEDED_MAX
}

/// JSON network description. Node numbers in `arcs` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    /// Free-form note; ignored by the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub nodes: usize,
    pub arcs: Vec<[usize; 2]>,
    pub r: Vec<Count>,
    pub s: Vec<Count>,
    pub blocking: Blocking,
    pub service: ServiceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed network file")]
    Json(#[from] serde_json::Error),
    #[error("arc {0:?} uses node 0; nodes are numbered from 1")]
    ZeroNode([usize; 2]),
    #[error("invalid network")]
    Invalid(#[from] ValidationErrors),
    #[error("invalid service times")]
    Service(#[from] ServiceError),
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn spec(&self) -> Result<NetworkSpec, FileError> {
        let arcs = self
            .arcs
            .iter()
            .map(|&[i, j]| {
                if i == 0 || j == 0 {
                    Err(FileError::ZeroNode([i, j]))
                } else {
                    Ok((i - 1, j - 1))
                }
            })
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(NetworkSpec {
            node_count: self.nodes,
            arcs,
            initial: self.r.clone(),
            capacity: self.s.clone(),
            blocking: self.blocking,
        })
    }

    pub fn service_source(&self) -> Result<ServiceTimeSource, FileError> {
        let src = match &self.service {
            ServiceSpec::Table(rows) => ServiceTimeSource::table(rows.clone())?,
            ServiceSpec::Seeded { seed, max } => ServiceTimeSource::seeded(*seed, *max)?,
        };
        src.check_nodes(self.nodes)?;
        Ok(src)
    }

    /// Validated network plus its service source.
    pub fn load(&self) -> Result<(Network, ServiceTimeSource), FileError> {
        let network = self.spec()?.validate()?;
        let source = self.service_source()?;
        Ok((network, source))
    }

    pub fn from_network(network: &Network, service: ServiceSpec, steps: Option<usize>) -> Self {
        let spec = network.spec();
        NetworkFile {
            description: None,
            nodes: spec.node_count,
            arcs: spec.arcs.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            r: spec.initial.clone(),
            s: spec.capacity.clone(),
            blocking: spec.blocking,
            service,
            steps,
        }
    }
}
