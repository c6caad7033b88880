//! Directed network storage and the shortest-path kernels used by pricing.
//!
//! The network is immutable once built. Every search owns its own label
//! arrays, so any number of searches may run concurrently over one network.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::scalar::Scalar;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} out of range (network has {node_count} nodes)")]
    InvalidNode { node: NodeId, node_count: usize },
    #[error("edge {edge}: {what} must be finite and nonnegative, got {value}")]
    InvalidEdgeData {
        edge: EdgeId,
        what: &'static str,
        value: f64,
    },
    #[error("expected {expected} edge weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("destination set is empty")]
    EmptyDestinations,
    #[error("heuristic is inconsistent on edge {edge} ({tail} -> {head})")]
    InconsistentHeuristic {
        edge: EdgeId,
        tail: NodeId,
        head: NodeId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: T,
    pub capacity: T,
}

/// Directed graph with per-edge cost and capacity and compressed forward and
/// reverse adjacency. Parallel edges and self-loops are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    node_count: usize,
    edges: Vec<Edge<T>>,
    out_start: Vec<usize>,
    out_edges: Vec<EdgeId>,
    in_start: Vec<usize>,
    in_edges: Vec<EdgeId>,
}

impl<T: Scalar> Network<T> {
    pub fn new(node_count: usize, edges: Vec<Edge<T>>) -> Result<Self, GraphError> {
        for (id, e) in edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node >= node_count {
                    return Err(GraphError::InvalidNode { node, node_count });
                }
            }
            for (what, value) in [("cost", e.cost), ("capacity", e.capacity)] {
                if !(value.is_finite() && value >= T::zero()) {
                    return Err(GraphError::InvalidEdgeData {
                        edge: id,
                        what,
                        value: value.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        let (out_start, out_edges) = compress(node_count, edges.iter().map(|e| e.tail));
        let (in_start, in_edges) = compress(node_count, edges.iter().map(|e| e.head));
        Ok(Network {
            node_count,
            edges,
            out_start,
            out_edges,
            in_start,
            in_edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge<T> {
        &self.edges[e]
    }

    /// Outgoing edge ids of `v`, ascending.
    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[self.out_start[v]..self.out_start[v + 1]]
    }

    /// Incoming edge ids of `v`, ascending.
    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[self.in_start[v]..self.in_start[v + 1]]
    }

    pub fn costs(&self) -> Vec<T> {
        self.edges.iter().map(|e| e.cost).collect()
    }

    pub fn capacities(&self) -> Vec<T> {
        self.edges.iter().map(|e| e.capacity).collect()
    }

    pub fn total_cost(&self) -> T {
        self.edges.iter().map(|e| e.cost).sum()
    }

    pub fn check_node(&self, node: NodeId) -> Result<(), GraphError> {
        if node < self.node_count {
            Ok(())
        } else {
            Err(GraphError::InvalidNode {
                node,
                node_count: self.node_count,
            })
        }
    }
}

fn compress(node_count: usize, keys: impl Iterator<Item = NodeId> + Clone) -> (Vec<usize>, Vec<EdgeId>) {
    let mut start = vec![0usize; node_count + 1];
    for k in keys.clone() {
        start[k + 1] += 1;
    }
    for i in 0..node_count {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut list = vec![0; start[node_count]];
    for (e, k) in keys.enumerate() {
        list[fill[k]] = e;
        fill[k] += 1;
    }
    (start, list)
}

/// Shortest-path distance label. `Infinite` marks an unreached node; no
/// arithmetic is defined on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist<T> {
    Finite(T),
    Infinite,
}

impl<T: Copy> Dist<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    /// The finite value. Panics on `Infinite`.
    pub fn value(self) -> T {
        match self {
            Dist::Finite(d) => d,
            Dist::Infinite => panic!("arithmetic on an infinite distance"),
        }
    }
}

/// Nonnegative per-edge search weights, normally `c_e - mu_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights<T>(Vec<T>);

impl<T: Scalar> EdgeWeights<T> {
    pub fn new(values: Vec<T>) -> Result<Self, GraphError> {
        for (edge, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(GraphError::InvalidEdgeData {
                    edge,
                    what: "weight",
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(EdgeWeights(values))
    }

    /// `c_e - mu_e` for every edge. `mu` must be nonpositive.
    pub fn adjusted(costs: &[T], mu: &[T]) -> Result<Self, GraphError> {
        if costs.len() != mu.len() {
            return Err(GraphError::WeightCount {
                expected: costs.len(),
                got: mu.len(),
            });
        }
        Self::new(costs.iter().zip(mu).map(|(&c, &m)| c - m).collect())
    }

    pub fn zeros(edge_count: usize) -> Self {
        EdgeWeights(vec![T::zero(); edge_count])
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T> std::ops::Index<EdgeId> for EdgeWeights<T> {
    type Output = T;
    fn index(&self, e: EdgeId) -> &T {
        &self.0[e]
    }
}

/// Labels produced by one single-source search.
#[derive(Debug, Clone, PartialEq)]
pub struct SptResult<T> {
    pub source: NodeId,
    /// Final for settled nodes, tentative for reached but unsettled ones.
    pub dist: Vec<Dist<T>>,
    pub parent_edge: Vec<Option<EdgeId>>,
    pub settled: Vec<bool>,
    /// Settled nodes in settle order; a node's parent tail always precedes it.
    pub order: Vec<NodeId>,
    /// True when the search ended on the dual stop test.
    pub stopped_early: bool,
    pub relaxations: usize,
}

impl<T: Scalar> SptResult<T> {
    pub fn is_settled(&self, v: NodeId) -> bool {
        self.settled[v]
    }

    pub fn settled_count(&self) -> usize {
        self.order.len()
    }

    /// Edge ids from the source to `v` along parent edges, or `None` when `v`
    /// is not settled.
    pub fn path_to<W>(&self, net: &Network<W>, v: NodeId) -> Option<Vec<EdgeId>> {
        if !self.settled[v] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = v;
        while cur != self.source {
            let e = self.parent_edge[cur]?;
            path.push(e);
            cur = net.edges[e].tail;
            if path.len() > net.edges.len() {
                return None;
            }
        }
        path.reverse();
        Some(path)
    }
}

/// Per-node lower bounds on the distance to the nearest destination.
/// `Infinite` means no destination is reachable from that node.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicBounds<T> {
    pub h: Vec<Dist<T>>,
}

impl<T: Scalar> HeuristicBounds<T> {
    pub fn zero(node_count: usize) -> Self {
        HeuristicBounds {
            h: vec![Dist::Finite(T::zero()); node_count],
        }
    }

    pub fn get(&self, v: NodeId) -> Dist<T> {
        self.h[v]
    }
}

struct HeapItem<T> {
    key: T,
    node: NodeId,
}

impl<T: PartialOrd> PartialEq for HeapItem<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for HeapItem<T> {}

impl<T: PartialOrd> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for HeapItem<T> {
    // reversed: BinaryHeap is a max-heap; smaller key, then smaller node id, pops first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .partial_cmp(&self.key)
            .expect("NaN key in shortest-path heap")
            .then_with(|| other.node.cmp(&self.node))
    }
}

struct SearchSpec<'a, T> {
    source: NodeId,
    targets: Option<&'a [NodeId]>,
    stop_at: Option<T>,
    heuristic: Option<&'a HeuristicBounds<T>>,
}

fn check_weights<T: Scalar>(net: &Network<T>, w: &EdgeWeights<T>) -> Result<(), GraphError> {
    if w.len() != net.edge_count() {
        return Err(GraphError::WeightCount {
            expected: net.edge_count(),
            got: w.len(),
        });
    }
    Ok(())
}

fn search<T: Scalar>(
    net: &Network<T>,
    w: &EdgeWeights<T>,
    spec: SearchSpec<'_, T>,
) -> Result<SptResult<T>, GraphError> {
    check_weights(net, w)?;
    net.check_node(spec.source)?;
    let n = net.node_count();
    let mut out = SptResult {
        source: spec.source,
        dist: vec![Dist::Infinite; n],
        parent_edge: vec![None; n],
        settled: vec![false; n],
        order: Vec::new(),
        stopped_early: false,
        relaxations: 0,
    };
    let mut is_target = Vec::new();
    let mut remaining = 0usize;
    if let Some(targets) = spec.targets {
        is_target = vec![false; n];
        for &t in targets {
            net.check_node(t)?;
            if !is_target[t] {
                is_target[t] = true;
                remaining += 1;
            }
        }
        if remaining == 0 {
            out.dist[spec.source] = Dist::Finite(T::zero());
            return Ok(out);
        }
    }
    let h = |v: NodeId| -> Dist<T> {
        match spec.heuristic {
            Some(hb) => hb.h[v],
            None => Dist::Finite(T::zero()),
        }
    };

    out.dist[spec.source] = Dist::Finite(T::zero());
    let mut heap = BinaryHeap::new();
    if let Dist::Finite(h0) = h(spec.source) {
        heap.push(HeapItem {
            key: h0,
            node: spec.source,
        });
    }
    let tol = T::of(T::CONSISTENCY_TOL);

    while let Some(HeapItem { key, node: v }) = heap.pop() {
        if out.settled[v] {
            continue;
        }
        let g = out.dist[v].value();
        // stale entry: the label improved after this push
        if let Dist::Finite(hv) = h(v) {
            if key > g + hv {
                continue;
            }
        }
        if let Some(bound) = spec.stop_at {
            if key >= bound {
                out.stopped_early = true;
                break;
            }
        }
        out.settled[v] = true;
        out.order.push(v);
        if spec.targets.is_some() && is_target[v] {
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        for &e in net.out_edges(v) {
            let edge = &net.edges[e];
            let u = edge.head;
            if u == v || out.settled[u] {
                continue;
            }
            let hu = h(u);
            if spec.heuristic.is_some() {
                if let (Dist::Finite(hv), Dist::Finite(hu)) = (h(v), hu) {
                    if hv > w[e] + hu + tol * (T::one() + hv.abs()) {
                        return Err(GraphError::InconsistentHeuristic {
                            edge: e,
                            tail: v,
                            head: u,
                        });
                    }
                }
            }
            let Dist::Finite(hu) = hu else { continue };
            out.relaxations += 1;
            let cand = g + w[e];
            match out.dist[u] {
                Dist::Finite(du) if cand > du => {}
                Dist::Finite(du) if cand == du => {
                    if out.parent_edge[u].map_or(true, |p| e < p) {
                        out.parent_edge[u] = Some(e);
                    }
                }
                _ => {
                    out.dist[u] = Dist::Finite(cand);
                    out.parent_edge[u] = Some(e);
                    heap.push(HeapItem {
                        key: cand + hu,
                        node: u,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Plain Dijkstra from `source`. With `targets`, stops once every target is
/// settled.
pub fn dijkstra<T: Scalar>(
    net: &Network<T>,
    w: &EdgeWeights<T>,
    source: NodeId,
    targets: Option<&[NodeId]>,
) -> Result<SptResult<T>, GraphError> {
    search(
        net,
        w,
        SearchSpec {
            source,
            targets,
            stop_at: None,
            heuristic: None,
        },
    )
}

fn stop_bound<T: Scalar>(dest_duals: &[(NodeId, T)]) -> Result<T, GraphError> {
    dest_duals
        .iter()
        .map(|&(_, pi)| pi)
        .fold(None, |acc: Option<T>, pi| Some(acc.map_or(pi, |a| a.max(pi))))
        .ok_or(GraphError::EmptyDestinations)
}

/// Dijkstra that stops as soon as the extracted key reaches the largest
/// destination dual. Sinks settled with `dist < pi` are exactly the sinks
/// with a negative reduced-cost path.
pub fn dijkstra_bounded<T: Scalar>(
    net: &Network<T>,
    w: &EdgeWeights<T>,
    source: NodeId,
    dest_duals: &[(NodeId, T)],
) -> Result<SptResult<T>, GraphError> {
    let bound = stop_bound(dest_duals)?;
    let targets: Vec<NodeId> = dest_duals.iter().map(|&(t, _)| t).collect();
    search(
        net,
        w,
        SearchSpec {
            source,
            targets: Some(&targets),
            stop_at: Some(bound),
            heuristic: None,
        },
    )
}

/// A* with keys `g + h` and the same global stop test as
/// [`dijkstra_bounded`]. `h` must be admissible and consistent for `w`; an
/// inconsistency met during relaxation is reported as an error.
pub fn astar<T: Scalar>(
    net: &Network<T>,
    w: &EdgeWeights<T>,
    source: NodeId,
    dest_duals: &[(NodeId, T)],
    h: &HeuristicBounds<T>,
) -> Result<SptResult<T>, GraphError> {
    let bound = stop_bound(dest_duals)?;
    let targets: Vec<NodeId> = dest_duals.iter().map(|&(t, _)| t).collect();
    if h.h.len() != net.node_count() {
        return Err(GraphError::WeightCount {
            expected: net.node_count(),
            got: h.h.len(),
        });
    }
    search(
        net,
        w,
        SearchSpec {
            source,
            targets: Some(&targets),
            stop_at: Some(bound),
            heuristic: Some(h),
        },
    )
}

/// `h(v) = min_t dist(v, t)` over `destinations`, by one multi-source
/// Dijkstra on the reversed graph.
pub fn reverse_multi_target_bounds<T: Scalar>(
    net: &Network<T>,
    w: &EdgeWeights<T>,
    destinations: &[NodeId],
) -> Result<HeuristicBounds<T>, GraphError> {
    check_weights(net, w)?;
    if destinations.is_empty() {
        return Err(GraphError::EmptyDestinations);
    }
    let n = net.node_count();
    let mut h = vec![Dist::Infinite; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &t in destinations {
        net.check_node(t)?;
        h[t] = Dist::Finite(T::zero());
        heap.push(HeapItem {
            key: T::zero(),
            node: t,
        });
    }
    while let Some(HeapItem { key, node: v }) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &e in net.in_edges(v) {
            let u = net.edges[e].tail;
            if u == v || done[u] {
                continue;
            }
            let cand = key + w[e];
            if h[u].finite().map_or(true, |hu| cand < hu) {
                h[u] = Dist::Finite(cand);
                heap.push(HeapItem { key: cand, node: u });
            }
        }
    }
    Ok(HeuristicBounds { h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(tail: NodeId, head: NodeId, cost: f64) -> Edge<f64> {
        Edge {
            tail,
            head,
            cost,
            capacity: 10.0,
        }
    }

    // a=0, b=1, c=2; e0 a->b (1), e1 b->c (1), e2 a->c (3)
    fn triangle() -> Network<f64> {
        Network::new(3, vec![edge(0, 1, 1.0), edge(1, 2, 1.0), edge(0, 2, 3.0)]).unwrap()
    }

    fn line() -> Network<f64> {
        Network::new(3, vec![edge(0, 1, 1.0), edge(1, 2, 1.0)]).unwrap()
    }

    fn costs(net: &Network<f64>) -> EdgeWeights<f64> {
        EdgeWeights::new(net.costs()).unwrap()
    }

    fn finite(r: &SptResult<f64>) -> Vec<Option<f64>> {
        r.dist.iter().map(|d| d.finite()).collect()
    }

    #[test]
    fn adjacency_lists_cover_every_edge_once() {
        let net = triangle();
        let mut outs: Vec<_> = (0..3).flat_map(|v| net.out_edges(v).to_vec()).collect();
        let mut ins: Vec<_> = (0..3).flat_map(|v| net.in_edges(v).to_vec()).collect();
        outs.sort();
        ins.sort();
        assert_eq!(outs, vec![0, 1, 2]);
        assert_eq!(ins, vec![0, 1, 2]);
        assert_eq!(net.out_edges(0), &[0, 2]);
        assert_eq!(net.in_edges(2), &[1, 2]);
    }

    #[test]
    fn rejects_bad_edges() {
        let err = Network::new(3, vec![edge(0, 99, 1.0)]).unwrap_err();
        assert_eq!(
            err,
            GraphError::InvalidNode {
                node: 99,
                node_count: 3
            }
        );
        assert!(matches!(
            Network::new(2, vec![edge(0, 1, -1.0)]),
            Err(GraphError::InvalidEdgeData { what: "cost", .. })
        ));
    }

    #[test]
    fn dijkstra_on_line() {
        let net = line();
        let r = dijkstra(&net, &costs(&net), 0, None).unwrap();
        assert_eq!(finite(&r), vec![Some(0.0), Some(1.0), Some(2.0)]);
        assert_eq!(r.parent_edge, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn dijkstra_zero_weights() {
        let net = triangle();
        let r = dijkstra(&net, &EdgeWeights::zeros(3), 1, None).unwrap();
        assert_eq!(finite(&r), vec![None, Some(0.0), Some(0.0)]);
    }

    #[test]
    fn dijkstra_triangle_target() {
        let net = triangle();
        let r = dijkstra(&net, &costs(&net), 0, Some(&[2])).unwrap();
        assert_eq!(r.dist[2], Dist::Finite(2.0));
        assert_eq!(r.path_to(&net, 2), Some(vec![0, 1]));
    }

    #[test]
    fn dijkstra_invalid_source() {
        let net = triangle();
        assert!(matches!(
            dijkstra(&net, &costs(&net), 7, None),
            Err(GraphError::InvalidNode { node: 7, .. })
        ));
    }

    #[test]
    fn equal_distance_prefers_smaller_edge_id() {
        // two parallel routes of equal length into node 2
        let net = Network::new(
            4,
            vec![edge(0, 3, 1.0), edge(0, 1, 1.0), edge(1, 2, 1.0), edge(3, 2, 1.0)],
        )
        .unwrap();
        let r = dijkstra(&net, &costs(&net), 0, None).unwrap();
        assert_eq!(r.dist[2], Dist::Finite(2.0));
        assert_eq!(r.parent_edge[2], Some(2));
    }

    #[test]
    fn self_loops_are_ignored() {
        let net = Network::new(2, vec![edge(0, 0, 0.0), edge(0, 1, 2.0)]).unwrap();
        let r = dijkstra(&net, &costs(&net), 0, None).unwrap();
        assert_eq!(r.parent_edge[0], None);
        assert_eq!(r.dist[1], Dist::Finite(2.0));
    }

    #[test]
    fn bounded_settles_sink_below_dual() {
        let net = triangle();
        let r = dijkstra_bounded(&net, &costs(&net), 0, &[(2, 5.0)]).unwrap();
        assert!(r.is_settled(2));
        assert_eq!(r.dist[2], Dist::Finite(2.0));
        assert!(2.0 - 5.0 < 0.0);
    }

    #[test]
    fn bounded_zero_dual_stops_at_first_extraction() {
        let net = triangle();
        let r = dijkstra_bounded(&net, &costs(&net), 0, &[(2, 0.0)]).unwrap();
        assert!(r.stopped_early);
        assert_eq!(r.settled_count(), 0);
        assert_eq!(r.relaxations, 0);
        assert_eq!(r.dist[0], Dist::Finite(0.0));
    }

    #[test]
    fn bounded_line_trace() {
        let net = line();
        let r = dijkstra_bounded(&net, &costs(&net), 0, &[(1, 1.5), (2, 1.5)]).unwrap();
        assert!(r.is_settled(1));
        assert!(!r.is_settled(2));
        assert!(r.stopped_early);
    }

    #[test]
    fn bounded_requires_destinations() {
        let net = line();
        assert_eq!(
            dijkstra_bounded(&net, &costs(&net), 0, &[]).unwrap_err(),
            GraphError::EmptyDestinations
        );
    }

    #[test]
    fn astar_with_zero_heuristic_matches_bounded() {
        let net = triangle();
        let w = costs(&net);
        let a = astar(&net, &w, 0, &[(2, 5.0)], &HeuristicBounds::zero(3)).unwrap();
        let b = dijkstra_bounded(&net, &w, 0, &[(2, 5.0)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn astar_with_exact_heuristic() {
        let net = triangle();
        let w = costs(&net);
        let h = reverse_multi_target_bounds(&net, &w, &[2]).unwrap();
        let r = astar(&net, &w, 0, &[(2, 5.0)], &h).unwrap();
        assert_eq!(r.dist[2], Dist::Finite(2.0));
        assert_eq!(r.order, vec![0, 1, 2]);

        let r = astar(&net, &w, 0, &[(2, 1.0)], &h).unwrap();
        assert!(r.stopped_early);
        assert_eq!(r.relaxations, 0);
        assert!(!r.is_settled(2));
    }

    #[test]
    fn astar_reports_inconsistent_heuristic() {
        let net = line();
        let h = HeuristicBounds {
            h: vec![Dist::Finite(0.0), Dist::Finite(0.0), Dist::Finite(0.0)],
        };
        let mut bad = h.clone();
        bad.h[0] = Dist::Finite(5.0);
        let err = astar(&net, &costs(&net), 0, &[(2, 100.0)], &bad).unwrap_err();
        assert_eq!(
            err,
            GraphError::InconsistentHeuristic {
                edge: 0,
                tail: 0,
                head: 1
            }
        );
        assert!(astar(&net, &costs(&net), 0, &[(2, 100.0)], &h).is_ok());
    }

    #[test]
    fn reverse_bounds_examples() {
        let net = triangle();
        let h = reverse_multi_target_bounds(&net, &costs(&net), &[2]).unwrap();
        let vals: Vec<_> = h.h.iter().map(|d| d.finite()).collect();
        assert_eq!(vals, vec![Some(2.0), Some(1.0), Some(0.0)]);

        let all = reverse_multi_target_bounds(&net, &costs(&net), &[0, 1, 2]).unwrap();
        assert!(all.h.iter().all(|d| *d == Dist::Finite(0.0)));

        let net = line();
        let h = reverse_multi_target_bounds(&net, &costs(&net), &[1, 2]).unwrap();
        let vals: Vec<_> = h.h.iter().map(|d| d.finite()).collect();
        assert_eq!(vals, vec![Some(1.0), Some(0.0), Some(0.0)]);
    }

    #[test]
    fn f32_dijkstra() {
        let net = Network::<f32>::new(
            3,
            vec![
                Edge { tail: 0, head: 1, cost: 1.0, capacity: 1.0 },
                Edge { tail: 1, head: 2, cost: 1.0, capacity: 1.0 },
                Edge { tail: 0, head: 2, cost: 3.0, capacity: 1.0 },
            ],
        )
        .unwrap();
        let w = EdgeWeights::new(net.costs()).unwrap();
        let r = dijkstra(&net, &w, 0, None).unwrap();
        assert_eq!(r.dist[2], Dist::Finite(2.0f32));
    }
}
