//! Column generation pricing: shortest paths per commodity and shortest-path
//! trees per source under the dual-adjusted weights `c - mu`.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{astar, dijkstra, dijkstra_bounded, EdgeId, EdgeWeights, GraphError, HeuristicBounds, Network, NodeId, SptResult};
use crate::instance::{CommodityId, Instance, SourceGroup};
use crate::master::{Column, ColumnError, Mode};
use crate::scalar::Scalar;

pub use crate::master::DualSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PricingStrategy {
    #[default]
    Full,
    /// Stop once the search key reaches the largest sink dual.
    Bounded,
    /// Bounded search guided by distance-to-sink lower bounds.
    AStar,
}

/// Most negative reduced cost found for one owner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinReducedCost<T> {
    Exact(T),
    /// The search stopped before reaching the sink, which proves `>= 0`.
    NonNegative,
    /// Not priced this round.
    Unknown,
}

impl<T: Scalar> MinReducedCost<T> {
    /// Contribution `min(0, c)`, or `None` when unknown.
    pub fn negative_part(self) -> Option<T> {
        match self {
            MinReducedCost::Exact(v) => Some(v.min(T::zero())),
            MinReducedCost::NonNegative => Some(T::zero()),
            MinReducedCost::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PricingStats {
    pub runs: usize,
    pub settled: usize,
    pub relaxations: usize,
    pub early_stops: usize,
}

impl PricingStats {
    pub fn absorb(&mut self, other: PricingStats) {
        self.runs += other.runs;
        self.settled += other.settled;
        self.relaxations += other.relaxations;
        self.early_stops += other.early_stops;
    }

    fn record<T: Scalar>(&mut self, spt: &SptResult<T>) {
        self.runs += 1;
        self.settled += spt.settled_count();
        self.relaxations += spt.relaxations;
        self.early_stops += spt.stopped_early as usize;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricedColumn<T> {
    pub column: Column<T>,
    pub reduced_cost: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingOutcome<T> {
    /// Columns with reduced cost below `-tolerance`.
    pub columns: Vec<PricedColumn<T>>,
    /// `(owner, value)` for every owner examined.
    pub min_reduced_cost: Vec<(usize, MinReducedCost<T>)>,
    /// Owners whose sink cannot be reached.
    pub unreachable: Vec<usize>,
    pub stats: PricingStats,
}

impl<T> PricingOutcome<T> {
    fn empty() -> Self {
        PricingOutcome {
            columns: Vec::new(),
            min_reduced_cost: Vec::new(),
            unreachable: Vec::new(),
            stats: PricingStats::default(),
        }
    }

    pub fn merge(&mut self, other: PricingOutcome<T>) {
        self.columns.extend(other.columns);
        self.min_reduced_cost.extend(other.min_reduced_cost);
        self.unreachable.extend(other.unreachable);
        self.stats.absorb(other.stats);
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PricingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Column(#[from] ColumnError),
    #[error("sink {0} not settled by the shortest-path tree")]
    UnsettledSink(NodeId),
}

/// Everything a pricing call reads; shared by all workers.
#[derive(Debug, Clone, Copy)]
pub struct PricingInput<'a, T> {
    pub instance: &'a Instance<T>,
    /// Edge costs of the current phase (true costs, or zeros in phase 1).
    pub costs: &'a [T],
    /// `costs - mu`.
    pub weights: &'a EdgeWeights<T>,
    pub duals: &'a DualSnapshot<T>,
    /// A column prices out when its reduced cost is below `-tolerance`.
    pub tolerance: T,
}

/// Adjusted weights `c_e - mu_e`.
pub fn adjusted_weights<T: Scalar>(costs: &[T], duals: &DualSnapshot<T>) -> Result<EdgeWeights<T>, GraphError> {
    EdgeWeights::adjusted(costs, &duals.mu)
}

/// Prices every commodity of `group` with one search from its source.
pub fn price_paths<T: Scalar>(
    input: &PricingInput<'_, T>,
    group: &SourceGroup<T>,
    strategy: PricingStrategy,
    h: Option<&HeuristicBounds<T>>,
) -> Result<PricingOutcome<T>, PricingError> {
    let net = &input.instance.network;
    let dest_duals: Vec<(NodeId, T)> = group
        .members
        .iter()
        .map(|&k| (input.instance.commodities[k].sink, input.duals.pi[k]))
        .collect();
    let sinks: Vec<NodeId> = dest_duals.iter().map(|&(t, _)| t).collect();
    let spt = match (strategy, h) {
        (PricingStrategy::Full, _) => dijkstra(net, input.weights, group.source, Some(&sinks))?,
        (PricingStrategy::Bounded, _) | (PricingStrategy::AStar, None) => {
            dijkstra_bounded(net, input.weights, group.source, &dest_duals)?
        }
        (PricingStrategy::AStar, Some(h)) => astar(net, input.weights, group.source, &dest_duals, h)?,
    };
    let mut out = PricingOutcome::empty();
    out.stats.record(&spt);
    for (&k, &(t, pi)) in group.members.iter().zip(&dest_duals) {
        if !spt.is_settled(t) {
            if spt.stopped_early {
                out.min_reduced_cost.push((k, MinReducedCost::NonNegative));
            } else {
                out.unreachable.push(k);
                out.min_reduced_cost.push((k, MinReducedCost::Unknown));
            }
            continue;
        }
        let rc = spt.dist[t].value() - pi;
        out.min_reduced_cost.push((k, MinReducedCost::Exact(rc)));
        if rc < -input.tolerance {
            let edges = spt.path_to(net, t).expect("settled sink has a path");
            let column = Column::path(net, k, group.source, t, &edges)?;
            out.columns.push(PricedColumn { column, reduced_cost: rc });
        }
    }
    Ok(out)
}

/// Accumulated demand per tree edge, sorted by edge id. Sinks are processed
/// in reverse settle order so every child is pushed before its parent.
pub fn compute_tree_flows<T: Scalar>(
    net: &Network<T>,
    spt: &SptResult<T>,
    sink_demands: &[(NodeId, T)],
) -> Result<Vec<(EdgeId, T)>, PricingError> {
    let n = spt.dist.len();
    let mut acc = vec![T::zero(); n];
    for &(t, d) in sink_demands {
        if !spt.settled[t] {
            return Err(PricingError::UnsettledSink(t));
        }
        acc[t] = acc[t] + d;
    }
    let mut flows: Vec<(EdgeId, T)> = Vec::new();
    for &v in spt.order.iter().rev() {
        if v == spt.source || acc[v] <= T::zero() {
            continue;
        }
        let e = spt.parent_edge[v].expect("settled non-root node has a parent");
        flows.push((e, acc[v]));
        let tail = net.edge(e).tail;
        acc[tail] = acc[tail] + acc[v];
    }
    flows.sort_by_key(|&(e, _)| e);
    Ok(flows)
}

/// Prices the shortest-path tree of one source group (`owner` is the group
/// index).
pub fn price_tree<T: Scalar>(
    input: &PricingInput<'_, T>,
    owner: usize,
    group: &SourceGroup<T>,
) -> Result<PricingOutcome<T>, PricingError> {
    let net = &input.instance.network;
    let sinks = group.sinks();
    let spt = dijkstra(net, input.weights, group.source, Some(&sinks))?;
    let mut out = PricingOutcome::empty();
    out.stats.record(&spt);
    if sinks.iter().any(|&t| !spt.is_settled(t)) {
        out.unreachable.push(owner);
        out.min_reduced_cost.push((owner, MinReducedCost::Unknown));
        return Ok(out);
    }
    let flows = compute_tree_flows(net, &spt, &group.sink_demands)?;
    // equal to sum_e f_e (c_e - mu_e) - pi, summed per sink so that a
    // single-sink tree prices bit-identically to the corresponding path
    let pi = input.duals.pi[owner];
    let rc = group
        .sink_demands
        .iter()
        .map(|&(t, d)| d * spt.dist[t].value())
        .sum::<T>()
        - pi;
    out.min_reduced_cost.push((owner, MinReducedCost::Exact(rc)));
    if rc < -input.tolerance {
        let column = Column::tree(net, owner, group.source, flows)?;
        out.columns.push(PricedColumn { column, reduced_cost: rc });
    }
    Ok(out)
}

/// Distance-to-sink lower bounds used by A*.
#[derive(Debug, Clone)]
pub enum Heuristics<T> {
    None,
    /// One table towards the union of all sinks.
    Global(HeuristicBounds<T>),
    /// One table per source group towards that group's sinks.
    PerSource(Vec<HeuristicBounds<T>>),
}

impl<T> Heuristics<T> {
    pub fn for_group(&self, g: usize) -> Option<&HeuristicBounds<T>> {
        match self {
            Heuristics::None => None,
            Heuristics::Global(h) => Some(h),
            Heuristics::PerSource(hs) => hs.get(g),
        }
    }
}

/// Prices the given source groups in parallel and merges the outcomes in
/// group order. In path mode owners are commodity ids, in tree mode group
/// indices.
pub fn price_groups<T: Scalar>(
    input: &PricingInput<'_, T>,
    mode: Mode,
    groups: &[usize],
    strategy: PricingStrategy,
    heuristics: &Heuristics<T>,
) -> Result<PricingOutcome<T>, PricingError> {
    let results: Vec<Result<PricingOutcome<T>, PricingError>> = groups
        .par_iter()
        .map(|&g| {
            let group = &input.instance.groups[g];
            match mode {
                Mode::Path => price_paths(input, group, strategy, heuristics.for_group(g)),
                Mode::Tree => price_tree(input, g, group),
            }
        })
        .collect();
    let mut out = PricingOutcome::empty();
    for r in results {
        out.merge(r?);
    }
    Ok(out)
}

/// `z + sum_k d_k min(0, c_k)` in path mode, `z + sum_s min(0, c_s)` in tree
/// mode; `None` if some owner lacks a known value.
pub fn lagrangian_bound<T: Scalar>(
    rmp_objective: T,
    min_reduced_costs: &[MinReducedCost<T>],
    owner_weights: &[T],
) -> Option<T> {
    let mut lb = rmp_objective;
    for (rc, &w) in min_reduced_costs.iter().zip(owner_weights) {
        lb = lb + w * rc.negative_part()?;
    }
    Some(lb)
}

/// Weights of the owners in [`lagrangian_bound`]: demands in path mode, ones
/// in tree mode.
pub fn owner_weights<T: Scalar>(instance: &Instance<T>, mode: Mode) -> Vec<T> {
    match mode {
        Mode::Path => instance.commodities.iter().map(|c| c.demand).collect(),
        Mode::Tree => vec![T::one(); instance.groups.len()],
    }
}

/// Group index owning each path-mode commodity.
pub fn commodity_groups<T: Scalar>(instance: &Instance<T>) -> Vec<usize> {
    let mut out: Vec<usize> = vec![0; instance.commodities.len()];
    for (g, group) in instance.groups.iter().enumerate() {
        for &k in &group.members {
            out[k] = g;
        }
    }
    out
}

/// Commodity ids belonging to an owner.
pub fn owner_commodities<T: Scalar>(instance: &Instance<T>, mode: Mode, owner: usize) -> Vec<CommodityId> {
    match mode {
        Mode::Path => vec![owner],
        Mode::Tree => instance.groups[owner].members.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::instance::Commodity;

    // a=0, b=1, c=2; e0 a->b (1), e1 b->c (1), e2 a->c (3)
    // canonical commodities: k0 = (a,b,1), k1 = (a,c,2)
    fn triangle() -> Instance<f64> {
        let e = |tail, head, cost| Edge {
            tail,
            head,
            cost,
            capacity: 10.0,
        };
        let net = Network::new(3, vec![e(0, 1, 1.0), e(1, 2, 1.0), e(0, 2, 3.0)]).unwrap();
        Instance::new(
            "triangle",
            net,
            vec![
                Commodity {
                    source: 0,
                    sink: 2,
                    demand: 2.0,
                },
                Commodity {
                    source: 0,
                    sink: 1,
                    demand: 1.0,
                },
            ],
        )
        .unwrap()
    }

    fn with_input<R>(inst: &Instance<f64>, duals: &DualSnapshot<f64>, f: impl FnOnce(&PricingInput<'_, f64>) -> R) -> R {
        let costs = inst.network.costs();
        let w = adjusted_weights(&costs, duals).unwrap();
        let input = PricingInput {
            instance: inst,
            costs: &costs,
            weights: &w,
            duals,
            tolerance: 1e-9,
        };
        f(&input)
    }

    #[test]
    fn path_pricing_classifies_sinks() {
        let inst = triangle();
        let duals = DualSnapshot {
            pi: vec![0.5, 5.0],
            mu: vec![0.0; 3],
        };
        for strategy in [PricingStrategy::Full, PricingStrategy::Bounded, PricingStrategy::AStar] {
            let out = with_input(&inst, &duals, |inp| price_paths(inp, &inst.groups[0], strategy, None)).unwrap();
            assert_eq!(out.columns.len(), 1, "{strategy:?}");
            let col = &out.columns[0];
            assert_eq!(col.column.owner, 1);
            assert_eq!(col.column.support(), vec![0, 1]);
            assert_eq!(col.reduced_cost, -3.0);
            assert_eq!(out.min_reduced_cost[0], (0, MinReducedCost::Exact(0.5)));
        }
    }

    #[test]
    fn path_pricing_with_capacity_dual() {
        let inst = triangle();
        let duals = DualSnapshot {
            pi: vec![0.0, 5.0],
            mu: vec![-10.0, 0.0, 0.0],
        };
        let out = with_input(&inst, &duals, |inp| price_paths(inp, &inst.groups[0], PricingStrategy::Full, None)).unwrap();
        assert_eq!(out.columns.len(), 1);
        assert_eq!(out.columns[0].column.support(), vec![2]);
        assert_eq!(out.columns[0].reduced_cost, -2.0);
    }

    #[test]
    fn zero_duals_price_nothing() {
        let inst = triangle();
        let duals = DualSnapshot::zero(2, 3);
        for strategy in [PricingStrategy::Full, PricingStrategy::Bounded] {
            let out = with_input(&inst, &duals, |inp| price_paths(inp, &inst.groups[0], strategy, None)).unwrap();
            assert!(out.columns.is_empty());
            assert!(out.min_reduced_cost.iter().all(|(_, rc)| rc.negative_part() == Some(0.0)));
        }
    }

    #[test]
    fn tree_pricing_examples() {
        let inst = triangle();
        let mut duals = DualSnapshot {
            pi: vec![6.0],
            mu: vec![0.0; 3],
        };
        let out = with_input(&inst, &duals, |inp| price_tree(inp, 0, &inst.groups[0])).unwrap();
        assert_eq!(out.columns.len(), 1);
        let col = &out.columns[0].column;
        assert_eq!(col.edge_flows, vec![(0, 3.0), (1, 2.0)]);
        assert_eq!(col.cost, 5.0);
        assert_eq!(out.columns[0].reduced_cost, -1.0);

        duals.pi[0] = 5.0;
        let out = with_input(&inst, &duals, |inp| price_tree(inp, 0, &inst.groups[0])).unwrap();
        assert!(out.columns.is_empty());
        assert_eq!(out.min_reduced_cost, vec![(0, MinReducedCost::Exact(0.0))]);

        duals.pi[0] = 6.0;
        duals.mu[1] = -2.0;
        let out = with_input(&inst, &duals, |inp| price_tree(inp, 0, &inst.groups[0])).unwrap();
        assert!(out.columns.is_empty());
        assert_eq!(out.min_reduced_cost, vec![(0, MinReducedCost::Exact(1.0))]);
    }

    #[test]
    fn tree_flows() {
        let e = |tail, head| Edge {
            tail,
            head,
            cost: 1.0,
            capacity: 1.0,
        };
        let line = Network::new(3, vec![e(0, 1), e(1, 2)]).unwrap();
        let w = EdgeWeights::new(line.costs()).unwrap();
        let spt = dijkstra(&line, &w, 0, None).unwrap();
        assert_eq!(
            compute_tree_flows(&line, &spt, &[(1, 1.0), (2, 2.0)]).unwrap(),
            vec![(0, 3.0), (1, 2.0)]
        );
        assert_eq!(compute_tree_flows(&line, &spt, &[(2, 2.0)]).unwrap(), vec![(0, 2.0), (1, 2.0)]);

        let star = Network::new(4, vec![e(0, 1), e(0, 2), e(0, 3)]).unwrap();
        let w = EdgeWeights::new(star.costs()).unwrap();
        let spt = dijkstra(&star, &w, 0, None).unwrap();
        assert_eq!(
            compute_tree_flows(&star, &spt, &[(1, 1.0), (2, 1.0), (3, 1.0)]).unwrap(),
            vec![(0, 1.0), (1, 1.0), (2, 1.0)]
        );

        let partial = dijkstra(&line, &w_line(&line), 0, Some(&[1])).unwrap();
        assert_eq!(
            compute_tree_flows(&line, &partial, &[(2, 1.0)]),
            Err(PricingError::UnsettledSink(2))
        );
    }

    fn w_line(net: &Network<f64>) -> EdgeWeights<f64> {
        EdgeWeights::new(net.costs()).unwrap()
    }

    #[test]
    fn bounds() {
        use MinReducedCost::*;
        assert_eq!(lagrangian_bound(5.0, &[NonNegative, Exact(0.3)], &[1.0, 1.0]), Some(5.0));
        assert_eq!(lagrangian_bound(5.0, &[Exact(-1.0)], &[1.0]), Some(4.0));
        assert_eq!(lagrangian_bound(6.0, &[Exact(-0.5), Exact(0.3)], &[2.0, 1.0]), Some(5.0));
        assert_eq!(lagrangian_bound(6.0, &[Exact(-0.5), Unknown], &[2.0, 1.0]), None);
    }

    #[test]
    fn parallel_merge_is_ordered() {
        let inst = triangle();
        let duals = DualSnapshot {
            pi: vec![2.0, 5.0],
            mu: vec![0.0; 3],
        };
        let out = with_input(&inst, &duals, |inp| {
            price_groups(inp, Mode::Path, &[0], PricingStrategy::Full, &Heuristics::None)
        })
        .unwrap();
        let owners: Vec<usize> = out.columns.iter().map(|c| c.column.owner).collect();
        assert_eq!(owners, vec![0, 1]);
    }
}
