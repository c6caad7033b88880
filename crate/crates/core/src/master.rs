//! Restricted master problem shared by the path and tree decompositions.
//!
//! Demand rows are always present: one per commodity (`sum x = d_k`) in path
//! mode, one convexity row per source (`sum x = 1`) in tree mode. Capacity
//! rows `sum f x <= u_e` are added lazily once an edge is overloaded. Slack
//! columns keep every restriction feasible; they are priced at a big-M cost
//! in phase 2 and at unit cost in phase 1.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{EdgeId, Network, NodeId};
use crate::instance::{CommodityId, Instance};
use crate::lp::{LpBackend, LpError, LpProblem, RowSense, WarmStart};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Path,
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Path,
    Tree,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColumnError {
    #[error("path column: {0}")]
    NotAPath(String),
    #[error("tree column: {0}")]
    NotATree(String),
    #[error("edge {edge} carries non-positive flow {value}")]
    NonPositiveFlow { edge: EdgeId, value: f64 },
    #[error("column owner {owner} has no demand row ({rows} rows)")]
    UnknownOwner { owner: usize, rows: usize },
    #[error("{0:?} column offered to a {1:?} master")]
    WrongKind(ColumnKind, Mode),
}

/// A path (owner = commodity id) or a shortest-path tree (owner = source
/// group index).
#[derive(Debug, Clone, PartialEq)]
pub struct Column<T> {
    pub owner: usize,
    pub kind: ColumnKind,
    /// `(edge, coefficient)` sorted by edge id.
    pub edge_flows: Vec<(EdgeId, T)>,
    pub cost: T,
}

fn dot_costs<T: Scalar>(net: &Network<T>, flows: &[(EdgeId, T)]) -> T {
    flows.iter().map(|&(e, f)| f * net.edge(e).cost).sum()
}

impl<T: Scalar> Column<T> {
    /// Path column from an ordered edge sequence `source -> sink`.
    pub fn path(
        net: &Network<T>,
        owner: CommodityId,
        source: NodeId,
        sink: NodeId,
        edges: &[EdgeId],
    ) -> Result<Self, ColumnError> {
        if edges.is_empty() {
            return Err(ColumnError::NotAPath("empty edge list".into()));
        }
        let mut seen = vec![false; net.node_count()];
        let mut cur = source;
        seen[cur] = true;
        for &e in edges {
            if e >= net.edge_count() {
                return Err(ColumnError::NotAPath(format!("edge {e} does not exist")));
            }
            let edge = net.edge(e);
            if edge.tail != cur {
                return Err(ColumnError::NotAPath(format!("edge {e} does not start at node {cur}")));
            }
            cur = edge.head;
            if seen[cur] {
                return Err(ColumnError::NotAPath(format!("node {cur} visited twice")));
            }
            seen[cur] = true;
        }
        if cur != sink {
            return Err(ColumnError::NotAPath(format!("ends at {cur}, expected {sink}")));
        }
        let mut edge_flows: Vec<(EdgeId, T)> = edges.iter().map(|&e| (e, T::one())).collect();
        edge_flows.sort_by_key(|&(e, _)| e);
        let cost = dot_costs(net, &edge_flows);
        Ok(Column {
            owner,
            kind: ColumnKind::Path,
            edge_flows,
            cost,
        })
    }

    /// Tree column rooted at `root` with accumulated flows per support edge.
    pub fn tree(net: &Network<T>, owner: usize, root: NodeId, flows: Vec<(EdgeId, T)>) -> Result<Self, ColumnError> {
        let mut edge_flows = flows;
        edge_flows.sort_by_key(|&(e, _)| e);
        if edge_flows.is_empty() {
            return Err(ColumnError::NotATree("empty support".into()));
        }
        let mut parent: HashMap<NodeId, EdgeId> = HashMap::new();
        for w in edge_flows.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ColumnError::NotATree(format!("edge {} listed twice", w[0].0)));
            }
        }
        for &(e, f) in &edge_flows {
            if e >= net.edge_count() {
                return Err(ColumnError::NotATree(format!("edge {e} does not exist")));
            }
            if !(f > T::zero()) {
                return Err(ColumnError::NonPositiveFlow {
                    edge: e,
                    value: f.as_f64(),
                });
            }
            let head = net.edge(e).head;
            if head == root {
                return Err(ColumnError::NotATree(format!("edge {e} enters the root")));
            }
            if parent.insert(head, e).is_some() {
                return Err(ColumnError::NotATree(format!("node {head} has in-degree above one")));
            }
        }
        // every support node must reach the root through parent edges
        for &start in parent.keys() {
            let mut cur = start;
            let mut steps = 0;
            while cur != root {
                let Some(&e) = parent.get(&cur) else {
                    return Err(ColumnError::NotATree(format!("node {start} is not connected to the root")));
                };
                cur = net.edge(e).tail;
                steps += 1;
                if steps > parent.len() {
                    return Err(ColumnError::NotATree("support contains a cycle".into()));
                }
            }
        }
        let cost = dot_costs(net, &edge_flows);
        Ok(Column {
            owner,
            kind: ColumnKind::Tree,
            edge_flows,
            cost,
        })
    }

    pub fn support(&self) -> Vec<EdgeId> {
        self.edge_flows.iter().map(|&(e, _)| e).collect()
    }

    pub fn flow_on(&self, e: EdgeId) -> T {
        self.edge_flows
            .binary_search_by_key(&e, |&(id, _)| id)
            .map(|i| self.edge_flows[i].1)
            .unwrap_or_else(|_| T::zero())
    }

    /// `sum_e f_e (c_e - mu_e) - pi`.
    pub fn reduced_cost(&self, costs: &[T], mu: &[T], pi: T) -> T {
        self.edge_flows
            .iter()
            .map(|&(e, f)| f * (costs[e] - mu[e]))
            .sum::<T>()
            - pi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlackPolicy {
    /// One slack per demand row.
    Demand,
    /// One slack per active capacity row.
    Edge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterConfig {
    /// `None` picks demand slacks when there are fewer demand rows than edges.
    pub slack_policy: Option<SlackPolicy>,
    pub initial_rows: Vec<EdgeId>,
    pub violation_abs: f64,
    pub violation_rel: f64,
}

impl Default for MasterConfig {
    fn default() -> Self {
        MasterConfig {
            slack_policy: None,
            initial_rows: Vec::new(),
            violation_abs: 1e-6,
            violation_rel: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Minimise total slack; structural columns are free.
    One,
    /// Minimise true cost with big-M slacks.
    Two,
}

/// Dual values in the sign convention pricing expects: `mu <= 0`, and zero on
/// inactive edges.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSnapshot<T> {
    /// One entry per demand row (commodity in path mode, group in tree mode).
    pub pi: Vec<T>,
    pub mu: Vec<T>,
}

impl<T: Scalar> DualSnapshot<T> {
    pub fn zero(rows: usize, edges: usize) -> Self {
        DualSnapshot {
            pi: vec![T::zero(); rows],
            mu: vec![T::zero(); edges],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmpSolution<T> {
    pub objective: T,
    /// One value per pooled column.
    pub primal: Vec<T>,
    pub duals: DualSnapshot<T>,
    /// Slack (and artificial) value per demand row; edge slacks are charged
    /// to no row and only appear in `slack_total`.
    pub row_slack: Vec<T>,
    pub edge_slack: Vec<(EdgeId, T)>,
    pub slack_total: T,
    pub lp_iterations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MasterError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Column(#[from] ColumnError),
}

#[derive(Debug, Clone)]
pub struct RestrictedMaster<T> {
    mode: Mode,
    costs: Vec<T>,
    capacities: Vec<T>,
    row_rhs: Vec<T>,
    /// Big-M per demand row (demand slacks) and per unit of capacity overflow
    /// (edge slacks).
    row_big_m: Vec<T>,
    edge_big_m: T,
    slack_policy: SlackPolicy,
    slacks_enabled: bool,
    artificials: bool,
    phase: Phase,
    columns: Vec<Column<T>>,
    index: HashMap<(usize, Vec<EdgeId>), usize>,
    active_rows: Vec<EdgeId>,
    row_of_edge: Vec<Option<usize>>,
    violation_abs: T,
    violation_rel: T,
    /// Final basis of the last solve, for warm-starting the next one.
    basis: Option<SavedBasis>,
}

/// A non-logical LP variable, identified independently of its LP position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpVar {
    Column(usize),
    DemandSlack(usize),
    EdgeSlack(EdgeId),
    Artificial(usize),
}

#[derive(Debug, Clone)]
struct SavedBasis {
    vars: Vec<LpVar>,
    /// Capacity rows whose logical was basic.
    logicals: Vec<EdgeId>,
    /// Number of capacity rows at the time; rows added later start with their
    /// logical basic.
    cap_rows: usize,
}

impl<T: Scalar> RestrictedMaster<T> {
    pub fn new(instance: &Instance<T>, mode: Mode, config: &MasterConfig) -> Self {
        let net = &instance.network;
        let sum_costs = net.total_cost();
        let (row_rhs, row_big_m, edge_big_m) = match mode {
            Mode::Path => (
                instance.commodities.iter().map(|c| c.demand).collect::<Vec<_>>(),
                vec![sum_costs; instance.commodities.len()],
                sum_costs,
            ),
            Mode::Tree => (
                vec![T::one(); instance.groups.len()],
                instance.groups.iter().map(|g| sum_costs * g.total_demand).collect(),
                sum_costs * instance.total_demand(),
            ),
        };
        let rows = row_rhs.len();
        let slack_policy = config.slack_policy.unwrap_or(if rows < net.edge_count() {
            SlackPolicy::Demand
        } else {
            SlackPolicy::Edge
        });
        let mut master = RestrictedMaster {
            mode,
            costs: net.costs(),
            capacities: net.capacities(),
            row_rhs,
            row_big_m,
            edge_big_m,
            slack_policy,
            slacks_enabled: true,
            artificials: false,
            phase: Phase::Two,
            columns: Vec::new(),
            index: HashMap::new(),
            active_rows: Vec::new(),
            row_of_edge: vec![None; net.edge_count()],
            violation_abs: T::of(config.violation_abs),
            violation_rel: T::of(config.violation_rel),
            basis: None,
        };
        master.add_capacity_rows(&config.initial_rows);
        master
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn demand_rows(&self) -> usize {
        self.row_rhs.len()
    }

    pub fn slack_policy(&self) -> SlackPolicy {
        self.slack_policy
    }

    pub fn slacks_enabled(&self) -> bool {
        self.slacks_enabled
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    /// Drops slack columns from subsequent solves.
    pub fn remove_slacks(&mut self) {
        self.slacks_enabled = false;
    }

    pub fn columns(&self) -> &[Column<T>] {
        &self.columns
    }

    pub fn active_rows(&self) -> &[EdgeId] {
        &self.active_rows
    }

    pub fn is_active(&self, e: EdgeId) -> bool {
        self.row_of_edge[e].is_some()
    }

    /// Adds `col` unless an identical one (same owner and support) is pooled.
    /// Returns the column id and whether it was new.
    pub fn add_column(&mut self, col: Column<T>) -> Result<(usize, bool), ColumnError> {
        let expected = match self.mode {
            Mode::Path => ColumnKind::Path,
            Mode::Tree => ColumnKind::Tree,
        };
        if col.kind != expected {
            return Err(ColumnError::WrongKind(col.kind, self.mode));
        }
        if col.owner >= self.row_rhs.len() {
            return Err(ColumnError::UnknownOwner {
                owner: col.owner,
                rows: self.row_rhs.len(),
            });
        }
        let key = (col.owner, col.support());
        if let Some(&id) = self.index.get(&key) {
            return Ok((id, false));
        }
        let id = self.columns.len();
        self.index.insert(key, id);
        self.columns.push(col);
        Ok((id, true))
    }

    /// Activates capacity rows for `edges`; already active edges are skipped.
    /// Returns the number of rows actually added.
    pub fn add_capacity_rows(&mut self, edges: &[EdgeId]) -> usize {
        let mut added = 0;
        for &e in edges {
            if self.row_of_edge[e].is_none() {
                self.row_of_edge[e] = Some(self.active_rows.len());
                self.active_rows.push(e);
                added += 1;
            }
        }
        added
    }

    /// Aggregate flow per edge under `primal`.
    pub fn edge_loads(&self, primal: &[T]) -> Vec<T> {
        let mut load = vec![T::zero(); self.costs.len()];
        for (col, &x) in self.columns.iter().zip(primal) {
            if x > T::zero() {
                for &(e, f) in &col.edge_flows {
                    load[e] = load[e] + f * x;
                }
            }
        }
        load
    }

    fn violation_tol(&self, e: EdgeId) -> T {
        self.violation_abs + self.violation_rel * self.capacities[e]
    }

    /// Inactive edges loaded beyond capacity, most violated first.
    pub fn violated_capacities(&self, primal: &[T]) -> Vec<EdgeId> {
        let load = self.edge_loads(primal);
        let mut out: Vec<(EdgeId, T)> = load
            .iter()
            .enumerate()
            .filter(|&(e, &l)| self.row_of_edge[e].is_none() && l - self.capacities[e] > self.violation_tol(e))
            .map(|(e, &l)| (e, l - self.capacities[e]))
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        out.into_iter().map(|(e, _)| e).collect()
    }

    /// Every edge, active or not, loaded beyond capacity.
    pub fn all_violations(&self, primal: &[T]) -> Vec<EdgeId> {
        self.edge_loads(primal)
            .iter()
            .enumerate()
            .filter(|&(e, &l)| l - self.capacities[e] > self.violation_tol(e))
            .map(|(e, _)| e)
            .collect()
    }

    fn structural_cost(&self, col: &Column<T>) -> T {
        match self.phase {
            Phase::One => T::zero(),
            Phase::Two => col.cost,
        }
    }

    fn penalty(&self, big_m: T) -> T {
        match self.phase {
            Phase::One => T::one(),
            Phase::Two => big_m,
        }
    }

    /// Builds the LP for the current restriction.
    fn warm_start(&self, saved: &SavedBasis, layout: &LpLayout) -> Option<WarmStart> {
        let n = self.columns.len();
        let extra: HashMap<LpVar, usize> = layout.extra.iter().enumerate().map(|(i, &v)| (v, n + i)).collect();
        let basic_columns = saved
            .vars
            .iter()
            .map(|v| match *v {
                LpVar::Column(c) => (c < n).then_some(c),
                other => extra.get(&other).copied(),
            })
            .collect::<Option<Vec<usize>>>()?;
        let rows = self.row_rhs.len();
        let basic_logicals = saved
            .logicals
            .iter()
            .map(|&e| self.row_of_edge[e].map(|r| rows + r))
            .chain((saved.cap_rows..self.active_rows.len()).map(|r| Some(rows + r)))
            .collect::<Option<Vec<usize>>>()?;
        Some(WarmStart {
            basic_columns,
            basic_logicals,
        })
    }

    fn save_basis(&self, basis: &WarmStart, layout: &LpLayout) -> SavedBasis {
        let n = self.columns.len();
        let rows = self.row_rhs.len();
        SavedBasis {
            vars: basis
                .basic_columns
                .iter()
                .map(|&j| if j < n { LpVar::Column(j) } else { layout.extra[j - n] })
                .collect(),
            logicals: basis
                .basic_logicals
                .iter()
                .filter(|&&i| i >= rows)
                .map(|&i| self.active_rows[i - rows])
                .collect(),
            cap_rows: self.active_rows.len(),
        }
    }

    pub fn build_lp(&self) -> (LpProblem<T>, LpLayout) {
        let rows = self.row_rhs.len();
        let mut lp = LpProblem::new();
        for &d in &self.row_rhs {
            lp.add_row(RowSense::Eq, d);
        }
        for &e in &self.active_rows {
            lp.add_row(RowSense::Le, self.capacities[e]);
        }
        for col in &self.columns {
            let mut entries = Vec::with_capacity(col.edge_flows.len() + 1);
            entries.push((col.owner, T::one()));
            for &(e, f) in &col.edge_flows {
                if let Some(r) = self.row_of_edge[e] {
                    entries.push((rows + r, f));
                }
            }
            lp.add_column(self.structural_cost(col), entries);
        }
        let mut layout = LpLayout {
            row_slacks: Vec::new(),
            edge_slacks: Vec::new(),
            extra: Vec::new(),
        };
        if self.slacks_enabled {
            match self.slack_policy {
                SlackPolicy::Demand => {
                    for r in 0..rows {
                        let j = lp.add_column(self.penalty(self.row_big_m[r]), vec![(r, T::one())]);
                        layout.row_slacks.push((r, j));
                        layout.extra.push(LpVar::DemandSlack(r));
                    }
                }
                SlackPolicy::Edge => {
                    for (r, &e) in self.active_rows.iter().enumerate() {
                        let j = lp.add_column(self.penalty(self.edge_big_m), vec![(rows + r, -T::one())]);
                        layout.edge_slacks.push((e, j));
                        layout.extra.push(LpVar::EdgeSlack(e));
                    }
                }
            }
        }
        if self.artificials {
            for r in 0..rows {
                let m = self.row_big_m[r] * T::of(10.0) + T::one();
                let j = lp.add_column(self.penalty(m), vec![(r, T::one())]);
                layout.row_slacks.push((r, j));
                layout.extra.push(LpVar::Artificial(r));
            }
        }
        (lp, layout)
    }

    /// Solves the restriction. An infeasible restriction gets artificial
    /// variables on its demand rows and is solved again.
    pub fn solve<B: LpBackend<T> + ?Sized>(&mut self, backend: &B) -> Result<RmpSolution<T>, MasterError> {
        let (lp, layout) = self.build_lp();
        let start = self.basis.as_ref().and_then(|b| self.warm_start(b, &layout));
        log::trace!("rmp warm start: {}", start.is_some());
        let (sol, basis) = match backend.solve_warm(&lp, start.as_ref()) {
            Err(LpError::Infeasible) if !self.artificials => {
                log::warn!("restricted master infeasible; adding artificial variables");
                self.artificials = true;
                return self.solve(backend);
            }
            other => other?,
        };
        self.basis = basis.map(|b| self.save_basis(&b, &layout));
        let rows = self.row_rhs.len();
        let pi = sol.duals[..rows].to_vec();
        let mut mu = vec![T::zero(); self.costs.len()];
        for (r, &e) in self.active_rows.iter().enumerate() {
            mu[e] = sol.duals[rows + r].min(T::zero());
        }
        let mut row_slack = vec![T::zero(); rows];
        let mut slack_total = T::zero();
        for &(r, j) in &layout.row_slacks {
            row_slack[r] = row_slack[r] + sol.primal[j];
            slack_total = slack_total + sol.primal[j];
        }
        let mut edge_slack = Vec::new();
        for &(e, j) in &layout.edge_slacks {
            if sol.primal[j] > T::zero() {
                edge_slack.push((e, sol.primal[j]));
                slack_total = slack_total + sol.primal[j];
            }
        }
        Ok(RmpSolution {
            objective: sol.objective,
            primal: sol.primal[..self.columns.len()].to_vec(),
            duals: DualSnapshot { pi, mu },
            row_slack,
            edge_slack,
            slack_total,
            lp_iterations: sol.iterations,
        })
    }
}

/// Where the slack columns of a built LP live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpLayout {
    /// `(demand row, lp column)`, artificials included
    pub row_slacks: Vec<(usize, usize)>,
    /// `(edge, lp column)`
    pub edge_slacks: Vec<(EdgeId, usize)>,
    /// Identity of every LP column after the structural ones.
    pub extra: Vec<LpVar>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::lp::BuiltinSimplex;

    // a=0, b=1, c=2; e0 a->b (1), e1 b->c (1), e2 a->c (3); k0 = (a,b,1), k1 = (a,c,2)
    fn triangle(cap_bc: f64) -> Instance<f64> {
        let e = |tail, head, cost, capacity| Edge {
            tail,
            head,
            cost,
            capacity,
        };
        let net = Network::new(3, vec![e(0, 1, 1.0, 10.0), e(1, 2, 1.0, cap_bc), e(0, 2, 3.0, 10.0)]).unwrap();
        let commodities = vec![
            crate::instance::Commodity {
                source: 0,
                sink: 2,
                demand: 2.0,
            },
            crate::instance::Commodity {
                source: 0,
                sink: 1,
                demand: 1.0,
            },
        ];
        Instance::new("triangle", net, commodities).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-7
    }

    #[test]
    fn row_counts() {
        let inst = triangle(10.0);
        let tree = RestrictedMaster::new(&inst, Mode::Tree, &MasterConfig::default());
        assert_eq!(tree.demand_rows(), 1);
        assert!(tree.active_rows().is_empty());
        let path = RestrictedMaster::new(&inst, Mode::Path, &MasterConfig::default());
        assert_eq!(path.demand_rows(), 2);
    }

    #[test]
    fn column_validation() {
        let inst = triangle(10.0);
        let net = &inst.network;
        let p = Column::path(net, 1, 0, 2, &[0, 1]).unwrap();
        assert_eq!(p.cost, 2.0);
        assert!(Column::path(net, 1, 0, 2, &[1, 0]).is_err());
        assert!(Column::path(net, 1, 0, 1, &[0, 1]).is_err());
        let t = Column::tree(net, 0, 0, vec![(1, 2.0), (0, 3.0)]).unwrap();
        assert_eq!(t.cost, 5.0);
        assert_eq!(t.edge_flows, vec![(0, 3.0), (1, 2.0)]);
        // two parents for c
        assert!(Column::tree(net, 0, 0, vec![(0, 1.0), (1, 2.0), (2, 1.0)]).is_err());
        assert!(Column::tree(net, 0, 0, vec![(0, 0.0)]).is_err());
        // b->c without a path from the root
        assert!(Column::tree(net, 0, 0, vec![(1, 1.0)]).is_err());
    }

    #[test]
    fn cyclic_tree_support_rejected() {
        let e = |tail, head| Edge {
            tail,
            head,
            cost: 1.0,
            capacity: 1.0,
        };
        let net = Network::new(3, vec![e(0, 1), e(1, 2), e(2, 1)]).unwrap();
        let err = Column::tree(&net, 0, 0, vec![(1, 1.0), (2, 1.0)]).unwrap_err();
        assert!(matches!(err, ColumnError::NotATree(_)), "{err}");
    }

    #[test]
    fn dedup() {
        let inst = triangle(10.0);
        let mut m = RestrictedMaster::new(&inst, Mode::Path, &MasterConfig::default());
        let col = Column::path(&inst.network, 1, 0, 2, &[0, 1]).unwrap();
        assert_eq!(m.add_column(col.clone()).unwrap(), (0, true));
        assert_eq!(m.add_column(col).unwrap(), (0, false));
        assert_eq!(m.columns().len(), 1);
        let tree = Column::tree(&inst.network, 0, 0, vec![(0, 3.0)]).unwrap();
        assert!(m.add_column(tree).is_err());
    }

    #[test]
    fn single_tree_column() {
        let inst = triangle(10.0);
        let mut m = RestrictedMaster::new(&inst, Mode::Tree, &MasterConfig::default());
        m.add_column(Column::tree(&inst.network, 0, 0, vec![(0, 3.0), (1, 2.0)]).unwrap())
            .unwrap();
        let s = m.solve(&BuiltinSimplex::default()).unwrap();
        assert!(close(s.objective, 5.0));
        assert!(close(s.duals.pi[0], 5.0));
        assert!(s.duals.mu.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slack_only_master() {
        let inst = triangle(10.0);
        let mut m = RestrictedMaster::new(&inst, Mode::Path, &MasterConfig::default());
        let s = m.solve(&BuiltinSimplex::default()).unwrap();
        let big_m = 5.0;
        assert!(close(s.objective, big_m * 3.0), "{}", s.objective);
        assert!(s.duals.pi.iter().all(|&p| close(p, big_m)));
        assert!(close(s.slack_total, 3.0));
    }

    #[test]
    fn capacity_rows_raise_objective() {
        let inst = triangle(1.0);
        let net = &inst.network;
        let mut m = RestrictedMaster::new(&inst, Mode::Path, &MasterConfig::default());
        m.add_column(Column::path(net, 1, 0, 2, &[0, 1]).unwrap()).unwrap();
        m.add_column(Column::path(net, 0, 0, 1, &[0]).unwrap()).unwrap();
        m.add_column(Column::path(net, 1, 0, 2, &[2]).unwrap()).unwrap();
        let backend = BuiltinSimplex::default();
        let s = m.solve(&backend).unwrap();
        assert!(close(s.objective, 5.0));
        assert_eq!(m.violated_capacities(&s.primal), vec![1]);
        assert_eq!(m.add_capacity_rows(&[1]), 1);
        assert_eq!(m.add_capacity_rows(&[1]), 0);
        let s = m.solve(&backend).unwrap();
        assert!(close(s.objective, 6.0));
        assert!(m.edge_loads(&s.primal)[1] <= 1.0 + 1e-9);
        assert!(close(s.duals.mu[1], -1.0));
        assert!(m.violated_capacities(&s.primal).is_empty());
        assert!(m.all_violations(&s.primal).is_empty());
    }

    #[test]
    fn violation_detection_is_strict() {
        let inst = triangle(2.0);
        let mut m = RestrictedMaster::new(&inst, Mode::Tree, &MasterConfig::default());
        m.add_column(Column::tree(&inst.network, 0, 0, vec![(0, 3.0), (1, 2.0)]).unwrap())
            .unwrap();
        assert!(m.violated_capacities(&[1.0]).is_empty());
        let inst = triangle(1.0);
        let mut m = RestrictedMaster::new(&inst, Mode::Tree, &MasterConfig::default());
        m.add_column(Column::tree(&inst.network, 0, 0, vec![(0, 3.0), (1, 2.0)]).unwrap())
            .unwrap();
        assert_eq!(m.violated_capacities(&[1.0]), vec![1]);
    }

    #[test]
    fn vacuous_row() {
        let inst = triangle(10.0);
        let mut m = RestrictedMaster::new(&inst, Mode::Tree, &MasterConfig::default());
        m.add_column(Column::tree(&inst.network, 0, 0, vec![(0, 3.0), (1, 2.0)]).unwrap())
            .unwrap();
        m.add_capacity_rows(&[2]);
        let s = m.solve(&BuiltinSimplex::default()).unwrap();
        assert!(close(s.objective, 5.0));
        assert_eq!(s.duals.mu[2], 0.0);
    }

    #[test]
    fn phase_one_objective_counts_slack() {
        let inst = triangle(10.0);
        let mut m = RestrictedMaster::new(&inst, Mode::Tree, &MasterConfig::default());
        m.set_phase(Phase::One);
        let s = m.solve(&BuiltinSimplex::default()).unwrap();
        assert!(close(s.objective, 1.0));
        m.add_column(Column::tree(&inst.network, 0, 0, vec![(0, 3.0), (1, 2.0)]).unwrap())
            .unwrap();
        let s = m.solve(&BuiltinSimplex::default()).unwrap();
        assert!(close(s.objective, 0.0));
        m.set_phase(Phase::Two);
        m.remove_slacks();
        let s = m.solve(&BuiltinSimplex::default()).unwrap();
        assert!(close(s.objective, 5.0));
    }

    #[test]
    fn edge_slack_policy() {
        let inst = triangle(1.0);
        let cfg = MasterConfig {
            slack_policy: Some(SlackPolicy::Edge),
            ..MasterConfig::default()
        };
        let mut m = RestrictedMaster::new(&inst, Mode::Tree, &cfg);
        m.add_column(Column::tree(&inst.network, 0, 0, vec![(0, 3.0), (1, 2.0)]).unwrap())
            .unwrap();
        m.add_capacity_rows(&[1]);
        let s = m.solve(&BuiltinSimplex::default()).unwrap();
        // the only column overloads b->c by 1, paid at (5 * 3) per unit
        assert!(close(s.objective, 5.0 + 15.0));
        assert_eq!(s.edge_slack.len(), 1);
        assert!(close(s.slack_total, 1.0));
    }
}
