//! Multi-commodity flow instances: commodities, source groups and readers.

mod native;
mod random;
mod tntp;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{dijkstra, EdgeWeights, GraphError, Network, NodeId};
use crate::scalar::Scalar;

pub use native::{parse_native, write_native};
pub use random::{generate_random, generate_with, CapacityMode, RandomSpec};
pub use tntp::{parse_tntp, parse_tntp_detailed, tntp_coefficient, TntpImport, TNTP_COEFFICIENTS};

pub type CommodityId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("no commodities")]
    NoCommodities,
    #[error("commodity {index}: {message}")]
    InvalidCommodity { index: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("random generation failed: {0}")]
    Generation(String),
    #[error("io error: {0}")]
    Io(String),
}

impl InstanceError {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        InstanceError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commodity<T> {
    pub source: NodeId,
    pub sink: NodeId,
    pub demand: T,
}

/// All commodities that share one source node.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceGroup<T> {
    pub source: NodeId,
    /// Commodity ids, ordered by sink.
    pub members: Vec<CommodityId>,
    /// `(sink, demand)` pairs, ordered by sink; one entry per member.
    pub sink_demands: Vec<(NodeId, T)>,
    pub total_demand: T,
}

impl<T: Scalar> SourceGroup<T> {
    pub fn sinks(&self) -> Vec<NodeId> {
        self.sink_demands.iter().map(|&(t, _)| t).collect()
    }
}

/// Merges duplicate `(source, sink)` pairs and sorts by `(source, sink)`.
pub fn canonical_commodities<T: Scalar>(commodities: &[Commodity<T>]) -> Vec<Commodity<T>> {
    let mut merged: BTreeMap<(NodeId, NodeId), T> = BTreeMap::new();
    for c in commodities {
        let d = merged.entry((c.source, c.sink)).or_insert_with(T::zero);
        *d = *d + c.demand;
    }
    merged
        .into_iter()
        .map(|((source, sink), demand)| Commodity {
            source,
            sink,
            demand,
        })
        .collect()
}

/// One group per distinct source, ordered by source id; duplicate
/// `(source, sink)` pairs are merged by summing demand. Member ids index the
/// input slice (the first occurrence of a merged pair).
pub fn group_by_source<T: Scalar>(commodities: &[Commodity<T>]) -> Vec<SourceGroup<T>> {
    let mut by_source: BTreeMap<NodeId, BTreeMap<NodeId, (CommodityId, T)>> = BTreeMap::new();
    for (id, c) in commodities.iter().enumerate() {
        let sinks = by_source.entry(c.source).or_default();
        let slot = sinks.entry(c.sink).or_insert((id, T::zero()));
        slot.1 = slot.1 + c.demand;
    }
    by_source
        .into_iter()
        .map(|(source, sinks)| {
            let members = sinks.values().map(|&(id, _)| id).collect();
            let sink_demands: Vec<(NodeId, T)> = sinks.iter().map(|(&t, &(_, d))| (t, d)).collect();
            let total_demand = sink_demands.iter().map(|&(_, d)| d).sum();
            SourceGroup {
                source,
                members,
                sink_demands,
                total_demand,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub name: String,
    pub network: Network<T>,
    /// Canonical: distinct `(source, sink)` pairs sorted by source then sink.
    pub commodities: Vec<Commodity<T>>,
    pub groups: Vec<SourceGroup<T>>,
}

impl<T: Scalar> Instance<T> {
    /// Validates the commodities, merges duplicate pairs and derives the
    /// source groups.
    pub fn new(
        name: impl Into<String>,
        network: Network<T>,
        commodities: Vec<Commodity<T>>,
    ) -> Result<Self, InstanceError> {
        if commodities.is_empty() {
            return Err(InstanceError::NoCommodities);
        }
        for (index, c) in commodities.iter().enumerate() {
            network.check_node(c.source)?;
            network.check_node(c.sink)?;
            if c.source == c.sink {
                return Err(InstanceError::InvalidCommodity {
                    index,
                    message: format!("source equals sink ({})", c.source),
                });
            }
            if !(c.demand.is_finite() && c.demand > T::zero()) {
                return Err(InstanceError::InvalidCommodity {
                    index,
                    message: format!("demand must be positive, got {}", c.demand),
                });
            }
        }
        let commodities = canonical_commodities(&commodities);
        let groups = group_by_source(&commodities);
        Ok(Instance {
            name: name.into(),
            network,
            commodities,
            groups,
        })
    }

    pub fn source_count(&self) -> usize {
        self.groups.len()
    }

    pub fn total_demand(&self) -> T {
        self.commodities.iter().map(|c| c.demand).sum()
    }

    /// Commodity id of `(source, sink)`, if present.
    pub fn commodity_index(&self, source: NodeId, sink: NodeId) -> Option<CommodityId> {
        self.commodities
            .binary_search_by(|c| (c.source, c.sink).cmp(&(source, sink)))
            .ok()
    }

    /// Commodities whose sink is unreachable from their source.
    pub fn unreachable_commodities(&self) -> Vec<CommodityId> {
        let w = EdgeWeights::zeros(self.network.edge_count());
        let mut bad = Vec::new();
        for g in &self.groups {
            let spt = dijkstra(&self.network, &w, g.source, None).expect("valid source");
            for (&id, &(t, _)) in g.members.iter().zip(&g.sink_demands) {
                if !spt.dist[t].is_finite() {
                    bad.push(id);
                }
            }
        }
        bad.sort_unstable();
        bad
    }
}
