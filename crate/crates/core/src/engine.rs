//! The column generation loop and the direct-LP driver behind one `solve`.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::baseline::{build_edge_lp, build_source_lp, solve_direct};
use crate::decompose::{columns_to_source_flows, commodity_flows_to_source_flows, SourceEdgeFlow};
use crate::graph::{dijkstra, reverse_multi_target_bounds, EdgeId, EdgeWeights, GraphError, NodeId};
use crate::instance::{CommodityId, Instance};
use crate::lp::{AutoBackend, BackendChoice, LpError};
use crate::master::{Column, MasterConfig, MasterError, Mode, Phase, RestrictedMaster, SlackPolicy};
use crate::pricing::{
    adjusted_weights, owner_commodities, owner_weights, price_groups, commodity_groups, Heuristics, MinReducedCost,
    PricingError, PricingInput, PricingOutcome, PricingStats, PricingStrategy,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Tree,
    Path,
    SourceLp,
    EdgeLp,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::Tree => "tree",
            Formulation::Path => "path",
            Formulation::SourceLp => "source-lp",
            Formulation::EdgeLp => "edge-lp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Auto,
    /// Re-solve the master after every row addition; filter pricing to owners
    /// touched by new rows.
    MasterEasy,
    /// Separate and price in every iteration; stop pricing after `N` columns.
    PricingEasy,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::MasterEasy => "master-easy",
            Strategy::PricingEasy => "pricing-easy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeuristicScope {
    #[default]
    Global,
    PerSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub formulation: Formulation,
    pub rel_tol: f64,
    pub timeout: Option<Duration>,
    pub strategy: Strategy,
    /// Column threshold of the pricing-easy strategy; default `max(|S|, 100)`.
    pub column_limit: Option<usize>,
    /// Filter removal threshold of the master-easy strategy; default
    /// `max(|S| / 100, 1)`.
    pub filter_threshold: Option<f64>,
    pub pricing: PricingStrategy,
    pub heuristic_scope: HeuristicScope,
    /// Recorded in reports; the solver itself draws no random numbers.
    pub seed: u64,
    /// Pricing worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub backend: BackendChoice,
    pub master: MasterConfig,
    pub max_iterations: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            formulation: Formulation::Tree,
            rel_tol: 1e-4,
            timeout: Some(Duration::from_secs(7200)),
            strategy: Strategy::Auto,
            column_limit: None,
            filter_threshold: None,
            pricing: PricingStrategy::Full,
            heuristic_scope: HeuristicScope::Global,
            seed: 0,
            threads: None,
            backend: BackendChoice::Auto,
            master: MasterConfig::default(),
            max_iterations: None,
        }
    }
}

impl SolverConfig {
    pub fn new(formulation: Formulation) -> Self {
        SolverConfig {
            formulation,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Timeout,
    Infeasible,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Timeout => "timeout",
            Status::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub phase: Phase,
    pub rmp_objective: T,
    /// Bound computed in this iteration, if all owners were priced exactly.
    pub lower_bound: Option<T>,
    /// Best bound known after this iteration.
    pub best_lower_bound: Option<T>,
    pub columns_added: usize,
    pub rows_added: usize,
    pub pricing_runs: usize,
    pub filtered: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub instance: String,
    pub formulation: Formulation,
    /// Strategy actually run (`Auto` resolved); `None` for direct LPs.
    pub strategy: Option<Strategy>,
    pub status: Status,
    /// Best capacity-feasible, slack-free objective found.
    pub objective: Option<T>,
    pub lower_bound: Option<T>,
    pub gap: Option<T>,
    pub iterations: Vec<IterationRecord<T>>,
    pub demand_rows: usize,
    pub peak_columns: usize,
    pub active_rows: Vec<EdgeId>,
    pub slack_policy: Option<SlackPolicy>,
    pub phase_one: bool,
    /// Pooled columns with positive value in the final solution.
    pub solution: Vec<(Column<T>, T)>,
    /// Per-source edge flows of the final solution (empty unless optimal).
    pub source_flows: Vec<SourceEdgeFlow<T>>,
    pub infeasible_commodities: Vec<CommodityId>,
    pub pricing: PricingStats,
    pub elapsed: Duration,
}

impl<T: Scalar> SolveReport<T> {
    fn new(instance: &Instance<T>, formulation: Formulation) -> Self {
        SolveReport {
            instance: instance.name.clone(),
            formulation,
            strategy: None,
            status: Status::Timeout,
            objective: None,
            lower_bound: None,
            gap: None,
            iterations: Vec::new(),
            demand_rows: 0,
            peak_columns: 0,
            active_rows: Vec::new(),
            slack_policy: None,
            phase_one: false,
            solution: Vec::new(),
            source_flows: Vec::new(),
            infeasible_commodities: Vec::new(),
            pricing: PricingStats::default(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn columns_generated(&self) -> usize {
        self.peak_columns
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Master(#[from] MasterError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical trouble: {0}")]
    Numerical(String),
}

/// `(UB - LB) / max(1, |UB|)`.
pub fn relative_gap<T: Scalar>(ub: T, lb: T) -> T {
    (ub - lb) / ub.abs().max(T::one())
}

/// Pricing-easy when the instance has more commodities than nodes.
pub fn choose_strategy<T: Scalar>(instance: &Instance<T>, requested: Strategy) -> Strategy {
    match requested {
        Strategy::Auto => {
            if instance.commodities.len() > instance.network.node_count() {
                Strategy::PricingEasy
            } else {
                Strategy::MasterEasy
            }
        }
        s => s,
    }
}

pub fn solve<T: Scalar>(instance: &Instance<T>, config: &SolverConfig) -> Result<SolveReport<T>, SolveError> {
    if !(config.rel_tol > 0.0) {
        return Err(SolveError::Config(format!("rel_tol must be positive, got {}", config.rel_tol)));
    }
    if config.column_limit == Some(0) {
        return Err(SolveError::Config("column limit must be at least 1".into()));
    }
    if config.filter_threshold.is_some_and(|e| !(e >= 0.0)) {
        return Err(SolveError::Config("filter threshold must be nonnegative".into()));
    }
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| SolveError::Config(e.to_string()))?;
            pool.install(|| dispatch(instance, config))
        }
        None => dispatch(instance, config),
    }
}

fn dispatch<T: Scalar>(instance: &Instance<T>, config: &SolverConfig) -> Result<SolveReport<T>, SolveError> {
    match config.formulation {
        Formulation::Tree => ColGen::new(instance, config, Mode::Tree)?.run(),
        Formulation::Path => ColGen::new(instance, config, Mode::Path)?.run(),
        Formulation::SourceLp | Formulation::EdgeLp => solve_direct_formulation(instance, config),
    }
}

fn solve_direct_formulation<T: Scalar>(instance: &Instance<T>, config: &SolverConfig) -> Result<SolveReport<T>, SolveError> {
    let start = Instant::now();
    let mut report = SolveReport::new(instance, config.formulation);
    let lp = match config.formulation {
        Formulation::EdgeLp => build_edge_lp(instance),
        _ => build_source_lp(instance),
    };
    report.demand_rows = lp.constraints() - instance.network.edge_count();
    let backend = AutoBackend::new(config.backend);
    match solve_direct(&lp, &backend) {
        Ok(sol) => {
            report.status = Status::Optimal;
            report.objective = Some(sol.objective);
            report.lower_bound = Some(sol.objective);
            report.gap = Some(T::zero());
            report.source_flows = match config.formulation {
                Formulation::EdgeLp => commodity_flows_to_source_flows(instance, &sol.flows),
                _ => sol
                    .flows
                    .into_iter()
                    .enumerate()
                    .map(|(g, flow)| SourceEdgeFlow {
                        group: g,
                        source: instance.groups[g].source,
                        flow,
                    })
                    .collect(),
            };
            report.iterations.push(IterationRecord {
                phase: Phase::Two,
                rmp_objective: sol.objective,
                lower_bound: Some(sol.objective),
                best_lower_bound: Some(sol.objective),
                columns_added: 0,
                rows_added: 0,
                pricing_runs: 0,
                filtered: false,
                elapsed: start.elapsed(),
            });
        }
        Err(LpError::Infeasible) => {
            report.status = Status::Infeasible;
            report.infeasible_commodities = instance.unreachable_commodities();
        }
        Err(e) => return Err(e.into()),
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

const CHUNK: usize = 32;

struct ColGen<'a, T: Scalar> {
    instance: &'a Instance<T>,
    config: &'a SolverConfig,
    mode: Mode,
    strategy: Strategy,
    column_limit: usize,
    filter_threshold: f64,
    master: RestrictedMaster<T>,
    backend: AutoBackend,
    heuristics: Heuristics<T>,
    weights: Vec<T>,
    commodity_group: Vec<usize>,
    costs: Vec<T>,
    zero_costs: Vec<T>,
    start: Instant,
    report: SolveReport<T>,
}

impl<'a, T: Scalar> ColGen<'a, T> {
    fn new(instance: &'a Instance<T>, config: &'a SolverConfig, mode: Mode) -> Result<Self, SolveError> {
        let start = Instant::now();
        let net = &instance.network;
        let master = RestrictedMaster::new(instance, mode, &config.master);
        let s = instance.source_count();
        let heuristics = if mode == Mode::Path && config.pricing == PricingStrategy::AStar {
            let raw = EdgeWeights::new(net.costs())?;
            match config.heuristic_scope {
                HeuristicScope::Global => {
                    let mut sinks: Vec<NodeId> = instance.commodities.iter().map(|c| c.sink).collect();
                    sinks.sort_unstable();
                    sinks.dedup();
                    Heuristics::Global(reverse_multi_target_bounds(net, &raw, &sinks)?)
                }
                HeuristicScope::PerSource => Heuristics::PerSource(
                    instance
                        .groups
                        .iter()
                        .map(|g| reverse_multi_target_bounds(net, &raw, &g.sinks()))
                        .collect::<Result<_, _>>()?,
                ),
            }
        } else {
            Heuristics::None
        };
        let mut report = SolveReport::new(instance, config.formulation);
        let strategy = choose_strategy(instance, config.strategy);
        report.strategy = Some(strategy);
        report.demand_rows = master.demand_rows();
        report.slack_policy = Some(master.slack_policy());
        Ok(ColGen {
            instance,
            config,
            mode,
            strategy,
            column_limit: config.column_limit.unwrap_or(s.max(100)),
            filter_threshold: config.filter_threshold.unwrap_or((s as f64 / 100.0).max(1.0)),
            master,
            backend: AutoBackend::new(config.backend),
            heuristics,
            weights: owner_weights(instance, mode),
            commodity_group: commodity_groups(instance),
            costs: net.costs(),
            zero_costs: vec![T::zero(); net.edge_count()],
            start,
            report,
        })
    }

    fn owners(&self) -> usize {
        self.master.demand_rows()
    }

    fn group_of_owner(&self, owner: usize) -> usize {
        match self.mode {
            Mode::Path => self.commodity_group[owner],
            Mode::Tree => owner,
        }
    }

    /// Shortest paths (or trees) under the true costs, one per owner.
    fn seed(&mut self) -> Result<bool, SolveError> {
        let unreachable = self.instance.unreachable_commodities();
        if !unreachable.is_empty() {
            self.report.status = Status::Infeasible;
            self.report.infeasible_commodities = unreachable;
            return Ok(false);
        }
        let net = &self.instance.network;
        let raw = EdgeWeights::new(self.costs.clone())?;
        for (g, group) in self.instance.groups.iter().enumerate() {
            let spt = dijkstra(net, &raw, group.source, Some(&group.sinks()))?;
            match self.mode {
                Mode::Path => {
                    for (&k, &(t, _)) in group.members.iter().zip(&group.sink_demands) {
                        let edges = spt.path_to(net, t).expect("reachable sink");
                        let col = Column::path(net, k, group.source, t, &edges).map_err(MasterError::from)?;
                        self.master.add_column(col).map_err(MasterError::from)?;
                    }
                }
                Mode::Tree => {
                    let flows = crate::pricing::compute_tree_flows(net, &spt, &group.sink_demands)?;
                    let col = Column::tree(net, g, group.source, flows).map_err(MasterError::from)?;
                    self.master.add_column(col).map_err(MasterError::from)?;
                }
            }
        }
        Ok(true)
    }

    fn price(
        &self,
        duals: &crate::master::DualSnapshot<T>,
        tolerance: T,
        groups: &[usize],
        strategy: PricingStrategy,
    ) -> Result<PricingOutcome<T>, SolveError> {
        let phase_one = self.master.phase() == Phase::One;
        let costs: &[T] = if phase_one { &self.zero_costs } else { &self.costs };
        let weights = adjusted_weights(costs, duals)?;
        let input = PricingInput {
            instance: self.instance,
            costs,
            weights: &weights,
            duals,
            tolerance,
        };
        let (strategy, heuristics) = if phase_one {
            (PricingStrategy::Full, &Heuristics::None)
        } else {
            (strategy, &self.heuristics)
        };
        Ok(price_groups(&input, self.mode, groups, strategy, heuristics)?)
    }

    /// Adds the priced columns; returns how many were new.
    fn add_columns(&mut self, outcome: &PricingOutcome<T>) -> Result<usize, SolveError> {
        let mut added = 0;
        for pc in &outcome.columns {
            let (_, new) = self.master.add_column(pc.column.clone()).map_err(MasterError::from)?;
            added += new as usize;
        }
        Ok(added)
    }

    fn bound(&self, z: T, outcome: &PricingOutcome<T>) -> Option<T> {
        let mut rc = vec![MinReducedCost::Unknown; self.owners()];
        for &(o, v) in &outcome.min_reduced_cost {
            rc[o] = v;
        }
        crate::pricing::lagrangian_bound(z, &rc, &self.weights)
    }

    fn timed_out(&self) -> bool {
        self.config.timeout.is_some_and(|t| self.start.elapsed() >= t)
            || self.config.max_iterations.is_some_and(|m| self.report.iterations.len() >= m)
    }

    fn run(mut self) -> Result<SolveReport<T>, SolveError> {
        if !self.seed()? {
            self.report.elapsed = self.start.elapsed();
            return Ok(self.report);
        }
        let all_groups: Vec<usize> = (0..self.instance.groups.len()).collect();
        let mut best_lb: Option<T> = None;
        let mut filter_on = true;
        let mut new_rows: Vec<EdgeId> = Vec::new();
        let mut cursor = 0usize;
        let slack_tol = T::of(1e-6) * self.instance.total_demand().max(T::one());
        let rel_tol = T::of(self.config.rel_tol);

        loop {
            if self.timed_out() {
                self.report.status = Status::Timeout;
                break;
            }
            let lp_start = Instant::now();
            let sol = self.master.solve(&self.backend)?;
            log::trace!(
                "rmp: {} columns, {} rows, {} pivots, {:?}",
                self.master.columns().len(),
                self.master.active_rows().len(),
                sol.lp_iterations,
                lp_start.elapsed()
            );
            self.report.peak_columns = self.report.peak_columns.max(self.master.columns().len());
            let z = sol.objective;
            let phase = self.master.phase();
            let violated = self.master.violated_capacities(&sol.primal);
            let tolerance = T::of(1e-9) * (T::one() + z.abs());
            let mut rec = IterationRecord {
                phase,
                rmp_objective: z,
                lower_bound: None,
                best_lower_bound: None,
                columns_added: 0,
                rows_added: 0,
                pricing_runs: 0,
                filtered: false,
                elapsed: Duration::ZERO,
            };
            let slack_free = sol.slack_total <= slack_tol;
            if phase == Phase::Two && slack_free && violated.is_empty() && self.master.all_violations(&sol.primal).is_empty() {
                self.report.objective = Some(self.report.objective.map_or(z, |ub: T| ub.min(z)));
            }

            let converged;
            if phase == Phase::One || self.strategy == Strategy::MasterEasy {
                if !violated.is_empty() {
                    rec.rows_added = self.master.add_capacity_rows(&violated);
                    new_rows.extend(&violated);
                    rec.best_lower_bound = best_lb;
                    self.finish_iteration(rec);
                    continue;
                }
                let filtered = phase == Phase::Two && filter_on && !new_rows.is_empty();
                let (groups, owner_filter) = if filtered {
                    let mut owners = vec![false; self.owners()];
                    for col in self.master.columns() {
                        if col.edge_flows.iter().any(|&(e, _)| new_rows.contains(&e)) {
                            owners[col.owner] = true;
                        }
                    }
                    let mut gs: Vec<usize> = (0..self.owners())
                        .filter(|&o| owners[o])
                        .map(|o| self.group_of_owner(o))
                        .collect();
                    gs.dedup();
                    (gs, Some(owners))
                } else {
                    (all_groups.clone(), None)
                };
                let mut outcome = self.price(&sol.duals, tolerance, &groups, self.config.pricing)?;
                if let Some(owners) = &owner_filter {
                    outcome.columns.retain(|pc| owners[pc.column.owner]);
                }
                self.check_unreachable(&outcome)?;
                rec.pricing_runs = outcome.stats.runs;
                rec.filtered = filtered;
                let added = self.add_columns(&outcome)?;
                rec.columns_added = added;
                self.report.pricing.absorb(outcome.stats);
                if filtered {
                    if (added as f64) < self.filter_threshold {
                        filter_on = false;
                    }
                    converged = false;
                } else {
                    if phase == Phase::Two {
                        rec.lower_bound = self.bound(z, &outcome);
                        new_rows.clear();
                        filter_on = true;
                    }
                    let gap_closed = phase == Phase::Two && self.gap_closed(&mut best_lb, rec.lower_bound, z, rel_tol);
                    converged = added == 0 || gap_closed;
                }
            } else {
                rec.rows_added = self.master.add_capacity_rows(&violated);
                let (outcome, complete) = self.price_round_robin(&sol.duals, tolerance, &mut cursor)?;
                self.check_unreachable(&outcome)?;
                rec.pricing_runs = outcome.stats.runs;
                let added = self.add_columns(&outcome)?;
                rec.columns_added = added;
                self.report.pricing.absorb(outcome.stats);
                if complete {
                    rec.lower_bound = self.bound(z, &outcome);
                }
                let gap_closed = self.gap_closed(&mut best_lb, rec.lower_bound, z, rel_tol);
                converged = violated.is_empty() && (added == 0 || gap_closed);
            }
            rec.best_lower_bound = best_lb;
            self.finish_iteration(rec);
            self.report.lower_bound = best_lb;

            if !converged {
                continue;
            }
            match phase {
                Phase::One => {
                    if z > slack_tol {
                        self.report.status = Status::Infeasible;
                        self.report.infeasible_commodities = self.blame(&sol);
                        break;
                    }
                    log::info!("phase 1 found a slack-free restriction; resuming phase 2");
                    self.master.remove_slacks();
                    self.master.set_phase(Phase::Two);
                    filter_on = true;
                    new_rows.clear();
                }
                Phase::Two => {
                    if !slack_free {
                        if !self.master.slacks_enabled() || self.report.phase_one {
                            return Err(SolveError::Numerical(
                                "artificial variables stay positive after phase 1".into(),
                            ));
                        }
                        log::info!("slack remains at convergence; starting phase 1");
                        self.report.phase_one = true;
                        self.master.set_phase(Phase::One);
                        continue;
                    }
                    self.report.status = Status::Optimal;
                    self.report.objective = Some(z);
                    self.report.solution = self
                        .master
                        .columns()
                        .iter()
                        .zip(&sol.primal)
                        .filter(|(_, &x)| x > T::zero())
                        .map(|(c, &x)| (c.clone(), x))
                        .collect();
                    self.report.source_flows = columns_to_source_flows(self.instance, &self.report.solution);
                    break;
                }
            }
        }
        self.report.lower_bound = best_lb;
        self.report.gap = match (self.report.objective, best_lb) {
            (Some(ub), Some(lb)) => Some(relative_gap(ub, lb).max(T::zero())),
            _ => None,
        };
        self.report.active_rows = self.master.active_rows().to_vec();
        self.report.elapsed = self.start.elapsed();
        Ok(self.report)
    }

    fn gap_closed(&self, best_lb: &mut Option<T>, lb: Option<T>, z: T, rel_tol: T) -> bool {
        if let Some(lb) = lb {
            *best_lb = Some(best_lb.map_or(lb, |b: T| b.max(lb)));
        }
        best_lb.is_some_and(|lb| relative_gap(z, lb) <= rel_tol)
    }

    fn finish_iteration(&mut self, mut rec: IterationRecord<T>) {
        rec.elapsed = self.start.elapsed();
        log::debug!(
            "iter {} phase {:?} z={} lb={:?} +cols {} +rows {}",
            self.report.iterations.len(),
            rec.phase,
            rec.rmp_objective,
            rec.lower_bound,
            rec.columns_added,
            rec.rows_added
        );
        self.report.iterations.push(rec);
    }

    /// Prices groups from `cursor` onwards, a fixed-size chunk at a time,
    /// until the column limit is reached or every group was priced. Returns
    /// whether all owners were priced exactly.
    fn price_round_robin(
        &self,
        duals: &crate::master::DualSnapshot<T>,
        tolerance: T,
        cursor: &mut usize,
    ) -> Result<(PricingOutcome<T>, bool), SolveError> {
        let n_groups = self.instance.groups.len();
        let mut outcome: Option<PricingOutcome<T>> = None;
        let mut done = 0;
        while done < n_groups {
            let take = CHUNK.min(n_groups - done);
            let chunk: Vec<usize> = (0..take).map(|i| (*cursor + done + i) % n_groups).collect();
            let part = self.price(duals, tolerance, &chunk, self.config.pricing)?;
            done += take;
            match &mut outcome {
                None => outcome = Some(part),
                Some(o) => o.merge(part),
            }
            let o = outcome.as_mut().expect("set above");
            if o.columns.len() >= self.column_limit {
                o.columns.truncate(self.column_limit);
                *cursor = (*cursor + done) % n_groups;
                return Ok((outcome.expect("set above"), false));
            }
        }
        *cursor = (*cursor + done) % n_groups.max(1);
        Ok((outcome.expect("at least one group"), true))
    }

    fn check_unreachable(&self, outcome: &PricingOutcome<T>) -> Result<(), SolveError> {
        if outcome.unreachable.is_empty() {
            Ok(())
        } else {
            // the seed already proved every sink reachable
            Err(SolveError::Numerical(format!(
                "pricing could not reach the sinks of owners {:?}",
                outcome.unreachable
            )))
        }
    }

    /// Commodities that cannot be routed: owners with slack on their demand
    /// row, plus owners using edges whose capacity slack is positive.
    fn blame(&self, sol: &crate::master::RmpSolution<T>) -> Vec<CommodityId> {
        let tol = T::of(1e-9);
        let mut owners = vec![false; self.owners()];
        for (o, &s) in sol.row_slack.iter().enumerate() {
            if s > tol {
                owners[o] = true;
            }
        }
        let overloaded: Vec<EdgeId> = sol.edge_slack.iter().filter(|&&(_, s)| s > tol).map(|&(e, _)| e).collect();
        for (col, &x) in self.master.columns().iter().zip(&sol.primal) {
            if x > tol && col.edge_flows.iter().any(|(e, _)| overloaded.contains(e)) {
                owners[col.owner] = true;
            }
        }
        let mut out: Vec<CommodityId> = (0..owners.len())
            .filter(|&o| owners[o])
            .flat_map(|o| owner_commodities(self.instance, self.mode, o))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Network};
    use crate::instance::{generate_random, Commodity};

    fn triangle(cap_bc: f64) -> Instance<f64> {
        let e = |tail, head, cost, capacity| Edge {
            tail,
            head,
            cost,
            capacity,
        };
        let net = Network::new(3, vec![e(0, 1, 1.0, 10.0), e(1, 2, 1.0, cap_bc), e(0, 2, 3.0, 10.0)]).unwrap();
        let c = |source, sink, demand| Commodity { source, sink, demand };
        Instance::new("triangle", net, vec![c(0, 2, 2.0), c(0, 1, 1.0)]).unwrap()
    }

    fn all_formulations() -> [Formulation; 4] {
        [Formulation::Tree, Formulation::Path, Formulation::SourceLp, Formulation::EdgeLp]
    }

    #[test]
    fn triangle_objectives() {
        for cap in [10.0, 1.0] {
            let want = if cap == 10.0 { 5.0 } else { 6.0 };
            for f in all_formulations() {
                for strategy in [Strategy::MasterEasy, Strategy::PricingEasy] {
                    let cfg = SolverConfig {
                        strategy,
                        ..SolverConfig::new(f)
                    };
                    let r = solve(&triangle(cap), &cfg).unwrap();
                    assert_eq!(r.status, Status::Optimal, "{f:?}");
                    assert!((r.objective.unwrap() - want).abs() < 1e-6, "{f:?} {:?}", r.objective);
                }
            }
        }
    }

    #[test]
    fn infeasible_cut() {
        let net = Network::new(
            2,
            vec![Edge {
                tail: 0,
                head: 1,
                cost: 1.0,
                capacity: 1.0,
            }],
        )
        .unwrap();
        let inst = Instance::new(
            "cut",
            net,
            vec![Commodity {
                source: 0,
                sink: 1,
                demand: 5.0,
            }],
        )
        .unwrap();
        for f in all_formulations() {
            let r = solve(&inst, &SolverConfig::new(f)).unwrap();
            assert_eq!(r.status, Status::Infeasible, "{f:?}");
            if matches!(f, Formulation::Tree | Formulation::Path) {
                assert_eq!(r.infeasible_commodities, vec![0]);
            }
        }
    }

    #[test]
    fn unreachable_sink_is_infeasible() {
        let net = Network::new(
            3,
            vec![Edge {
                tail: 0,
                head: 1,
                cost: 1.0,
                capacity: 1.0,
            }],
        )
        .unwrap();
        let c = |source, sink| Commodity {
            source,
            sink,
            demand: 1.0,
        };
        let inst = Instance::new("u", net, vec![c(0, 1), c(0, 2)]).unwrap();
        let r = solve(&inst, &SolverConfig::new(Formulation::Tree)).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert_eq!(r.infeasible_commodities, vec![1]);
    }

    #[test]
    fn strategy_choice() {
        let inst = triangle(10.0);
        assert_eq!(choose_strategy(&inst, Strategy::Auto), Strategy::MasterEasy);
        assert_eq!(choose_strategy(&inst, Strategy::PricingEasy), Strategy::PricingEasy);
        let dense: Instance<f64> = generate_random(5, 20, 12, 3, 1).unwrap();
        assert_eq!(choose_strategy(&dense, Strategy::Auto), Strategy::PricingEasy);
    }

    #[test]
    fn column_limit_of_one() {
        let inst: Instance<f64> = generate_random(12, 40, 30, 6, 5).unwrap();
        let cfg = SolverConfig {
            strategy: Strategy::PricingEasy,
            column_limit: Some(1),
            ..SolverConfig::new(Formulation::Path)
        };
        let r = solve(&inst, &cfg).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!(r.iterations.iter().all(|it| it.columns_added <= 1));
        assert!(r
            .iterations
            .iter()
            .any(|it| it.columns_added == 1 && it.lower_bound.is_none()));
    }

    #[test]
    fn uncapacitated_is_shortest_paths() {
        use crate::instance::{generate_with, CapacityMode, RandomSpec};
        let mut spec = RandomSpec::new(15, 45, 20, 4, 11);
        spec.capacity = CapacityMode::Uncapacitated;
        let inst: Instance<f64> = generate_with(&spec).unwrap();
        let w = EdgeWeights::new(inst.network.costs()).unwrap();
        let want: f64 = inst
            .commodities
            .iter()
            .map(|c| c.demand * dijkstra(&inst.network, &w, c.source, None).unwrap().dist[c.sink].value())
            .sum();
        for f in [Formulation::Tree, Formulation::Path] {
            let r = solve(&inst, &SolverConfig::new(f)).unwrap();
            assert!((r.objective.unwrap() - want).abs() < 1e-6 * want);
            assert!(r.active_rows.is_empty());
        }
    }

    #[test]
    fn timeout_reports_bounds() {
        let inst: Instance<f64> = generate_random(15, 45, 20, 4, 3).unwrap();
        let cfg = SolverConfig {
            timeout: Some(Duration::ZERO),
            ..SolverConfig::new(Formulation::Path)
        };
        let r = solve(&inst, &cfg).unwrap();
        assert_eq!(r.status, Status::Timeout);
    }

    #[test]
    fn deterministic_trace() {
        let inst: Instance<f64> = generate_random(14, 50, 25, 5, 8).unwrap();
        let cfg = SolverConfig::new(Formulation::Tree);
        let a = solve(&inst, &cfg).unwrap();
        let b = solve(&inst, &SolverConfig { threads: Some(3), ..cfg }).unwrap();
        let trace = |r: &SolveReport<f64>| -> Vec<(f64, usize, usize)> {
            r.iterations
                .iter()
                .map(|i| (i.rmp_objective, i.columns_added, i.rows_added))
                .collect()
        };
        assert_eq!(trace(&a), trace(&b));
    }
}
