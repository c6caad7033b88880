//! From solution columns to per-source edge flows, and from per-source edge
//! flows back to per-commodity path flows.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{EdgeId, Network, NodeId};
use crate::instance::{CommodityId, Instance, SourceGroup};
use crate::master::{Column, ColumnKind};
use crate::pricing::commodity_groups;
use crate::scalar::Scalar;

/// Total flow per edge originating at one source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceEdgeFlow<T> {
    pub group: usize,
    pub source: NodeId,
    /// Dense, indexed by edge id.
    pub flow: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathFlow<T> {
    pub edges: Vec<EdgeId>,
    pub amount: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommodityPathFlow<T> {
    pub commodity: CommodityId,
    pub paths: Vec<PathFlow<T>>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("source {origin}: no positive inflow at node {node} (balance {balance})")]
    Imbalance { origin: NodeId, node: NodeId, balance: f64 },
    #[error("source {origin}: {residual} units of flow left after all demand was routed")]
    Residual { origin: NodeId, residual: f64 },
}

fn empty_flows<T: Scalar>(instance: &Instance<T>) -> Vec<SourceEdgeFlow<T>> {
    instance
        .groups
        .iter()
        .enumerate()
        .map(|(g, grp)| SourceEdgeFlow {
            group: g,
            source: grp.source,
            flow: vec![T::zero(); instance.network.edge_count()],
        })
        .collect()
}

/// `f^s_e = sum over columns of s of coefficient * x`.
pub fn columns_to_source_flows<T: Scalar>(instance: &Instance<T>, columns: &[(Column<T>, T)]) -> Vec<SourceEdgeFlow<T>> {
    let group_of = commodity_groups(instance);
    let mut out = empty_flows(instance);
    for (col, x) in columns {
        let g = match col.kind {
            ColumnKind::Path => group_of[col.owner],
            ColumnKind::Tree => col.owner,
        };
        for &(e, f) in &col.edge_flows {
            out[g].flow[e] = out[g].flow[e] + f * *x;
        }
    }
    out
}

/// Aggregates dense per-commodity edge flows by source.
pub fn commodity_flows_to_source_flows<T: Scalar>(instance: &Instance<T>, flows: &[Vec<T>]) -> Vec<SourceEdgeFlow<T>> {
    let group_of = commodity_groups(instance);
    let mut out = empty_flows(instance);
    for (k, f) in flows.iter().enumerate() {
        let g = group_of[k];
        for (acc, &v) in out[g].flow.iter_mut().zip(f) {
            *acc = *acc + v;
        }
    }
    out
}

/// Largest absolute violation of flow conservation over all sources and nodes.
pub fn conservation_error<T: Scalar>(instance: &Instance<T>, flows: &[SourceEdgeFlow<T>]) -> T {
    let net = &instance.network;
    let mut worst = T::zero();
    for (sf, group) in flows.iter().zip(&instance.groups) {
        let mut bal = vec![T::zero(); net.node_count()];
        bal[group.source] = bal[group.source] - group.total_demand;
        for &(t, d) in &group.sink_demands {
            bal[t] = bal[t] + d;
        }
        for (e, &f) in sf.flow.iter().enumerate() {
            let edge = net.edge(e);
            bal[edge.tail] = bal[edge.tail] + f;
            bal[edge.head] = bal[edge.head] - f;
        }
        worst = bal.iter().fold(worst, |w, &b| w.max(b.abs()));
    }
    worst
}

/// Finds a directed cycle among edges with `flow > 0`.
fn find_cycle<T: Scalar>(net: &Network<T>, flow: &[T]) -> Option<Vec<EdgeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = net.node_count();
    let mut mark = vec![Mark::New; n];
    let mut via: Vec<Option<EdgeId>> = vec![None; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, next out-edge position)
        let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
        mark[root] = Mark::Open;
        while let Some(top) = stack.last_mut() {
            let v = top.0;
            let outs = net.out_edges(v);
            if top.1 == outs.len() {
                mark[v] = Mark::Done;
                stack.pop();
                continue;
            }
            let e = outs[top.1];
            top.1 += 1;
            if flow[e] <= T::zero() {
                continue;
            }
            let w = net.edge(e).head;
            match mark[w] {
                Mark::New => {
                    mark[w] = Mark::Open;
                    via[w] = Some(e);
                    stack.push((w, 0));
                }
                Mark::Open => {
                    let mut cycle = vec![e];
                    let mut cur = v;
                    while cur != w {
                        let pe = via[cur].expect("open node has a tree edge");
                        cycle.push(pe);
                        cur = net.edge(pe).tail;
                    }
                    return Some(cycle);
                }
                Mark::Done => {}
            }
        }
    }
    None
}

/// Splits one source's edge flow into paths per commodity of `group`.
///
/// Circulations are cancelled first. Each path is then traced backwards from
/// its sink along the smallest-id positive in-edge; the amount is the smaller
/// of the bottleneck and the remaining demand, so every extraction but the
/// last for a pair empties an edge.
pub fn decompose<T: Scalar>(
    net: &Network<T>,
    flow: &SourceEdgeFlow<T>,
    group: &SourceGroup<T>,
) -> Result<Vec<CommodityPathFlow<T>>, DecomposeError> {
    let eps = T::of(1e-9) * group.total_demand.max(T::one());
    let mut f: Vec<T> = flow.flow.iter().map(|&v| if v > eps { v } else { T::zero() }).collect();
    while let Some(cycle) = find_cycle(net, &f) {
        let delta = cycle.iter().map(|&e| f[e]).fold(T::infinity(), T::min);
        for &e in &cycle {
            f[e] = f[e] - delta;
            if f[e] <= eps {
                f[e] = T::zero();
            }
        }
    }
    let mut out = Vec::with_capacity(group.members.len());
    for (&k, &(t, d)) in group.members.iter().zip(&group.sink_demands) {
        let mut remaining = d;
        let mut paths = Vec::new();
        while remaining > eps {
            let mut edges = Vec::new();
            let mut cur = t;
            while cur != group.source {
                let Some(&e) = net.in_edges(cur).iter().filter(|&&e| f[e] > T::zero()).min() else {
                    return Err(DecomposeError::Imbalance {
                        origin: group.source,
                        node: cur,
                        balance: remaining.as_f64(),
                    });
                };
                edges.push(e);
                cur = net.edge(e).tail;
                if edges.len() > net.edge_count() {
                    return Err(DecomposeError::Imbalance {
                        origin: group.source,
                        node: cur,
                        balance: remaining.as_f64(),
                    });
                }
            }
            edges.reverse();
            let amount = edges.iter().map(|&e| f[e]).fold(remaining, T::min);
            for &e in &edges {
                f[e] = f[e] - amount;
                if f[e] <= eps {
                    f[e] = T::zero();
                }
            }
            remaining = remaining - amount;
            paths.push(PathFlow { edges, amount });
        }
        out.push(CommodityPathFlow { commodity: k, paths });
    }
    let residual: T = f.iter().copied().sum();
    if residual > T::of(1e-7) * group.total_demand.max(T::one()) {
        return Err(DecomposeError::Residual {
            origin: group.source,
            residual: residual.as_f64(),
        });
    }
    Ok(out)
}

/// Decomposes every source in parallel; the result is ordered by commodity.
pub fn decompose_all<T: Scalar>(
    instance: &Instance<T>,
    flows: &[SourceEdgeFlow<T>],
) -> Result<Vec<CommodityPathFlow<T>>, DecomposeError> {
    let per_group: Vec<Result<Vec<CommodityPathFlow<T>>, DecomposeError>> = flows
        .par_iter()
        .map(|sf| decompose(&instance.network, sf, &instance.groups[sf.group]))
        .collect();
    let mut out = Vec::with_capacity(instance.commodities.len());
    for r in per_group {
        out.extend(r?);
    }
    out.sort_by_key(|c| c.commodity);
    Ok(out)
}

/// One line per path: `<source> <sink> <amount> : <node> <node> ...` with
/// 1-based node ids.
pub fn write_path_flows<T: Scalar>(instance: &Instance<T>, paths: &[CommodityPathFlow<T>]) -> String {
    let net = &instance.network;
    let mut out = String::from("# source sink amount : nodes\n");
    for cp in paths {
        let c = &instance.commodities[cp.commodity];
        for p in &cp.paths {
            let _ = write!(out, "{} {} {} :", c.source + 1, c.sink + 1, p.amount);
            let _ = write!(out, " {}", c.source + 1);
            for &e in &p.edges {
                let _ = write!(out, " {}", net.edge(e).head + 1);
            }
            out.push('\n');
        }
    }
    out
}
