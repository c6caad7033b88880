//! Direct LPs: the edge-based formulation with one flow variable per
//! (commodity, edge) and the source-aggregated one with one per (source, edge).

use std::fmt::Write as _;

use crate::graph::EdgeId;
use crate::instance::Instance;
use crate::lp::{LpBackend, LpError, LpProblem, RowSense};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectKind {
    /// Owners are commodities.
    Edge,
    /// Owners are source groups.
    Source,
}

/// Variable `owner * |E| + e` is the flow of `owner` on edge `e`. Row
/// `owner * |V| + v` balances node `v` for `owner`; capacity rows follow.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectLp<T> {
    pub kind: DirectKind,
    pub lp: LpProblem<T>,
    pub owners: usize,
    pub node_count: usize,
    pub edge_count: usize,
}

impl<T: Scalar> DirectLp<T> {
    pub fn variables(&self) -> usize {
        self.lp.num_cols()
    }

    pub fn constraints(&self) -> usize {
        self.lp.num_rows()
    }

    pub fn matrix_nonzeros(&self) -> usize {
        self.lp.nnz()
    }

    /// Matrix nonzeros plus nonzero balance right-hand sides (supplies and
    /// demands), the accounting used in published instance tables.
    pub fn nonzeros(&self) -> usize {
        let balance_rows = self.owners * self.node_count;
        self.lp.nnz() + self.lp.rhs[..balance_rows].iter().filter(|&&b| b != T::zero()).count()
    }

    pub fn variable(&self, owner: usize, e: EdgeId) -> usize {
        owner * self.edge_count + e
    }

    pub fn balance_row(&self, owner: usize, node: usize) -> usize {
        owner * self.node_count + node
    }

    pub fn capacity_row(&self, e: EdgeId) -> usize {
        self.owners * self.node_count + e
    }
}

fn build<T: Scalar>(instance: &Instance<T>, kind: DirectKind, supplies: Vec<Vec<(usize, T)>>) -> DirectLp<T> {
    let net = &instance.network;
    let (n, m) = (net.node_count(), net.edge_count());
    let owners = supplies.len();
    let mut lp = LpProblem::new();
    let mut balance = vec![T::zero(); n];
    for supply in &supplies {
        balance.iter_mut().for_each(|b| *b = T::zero());
        for &(v, b) in supply {
            balance[v] = balance[v] + b;
        }
        for &b in &balance {
            lp.add_row(RowSense::Eq, b);
        }
    }
    for e in net.edges() {
        lp.add_row(RowSense::Le, e.capacity);
    }
    for o in 0..owners {
        for (id, e) in net.edges().iter().enumerate() {
            let mut entries = Vec::with_capacity(3);
            if e.tail != e.head {
                entries.push((o * n + e.tail, T::one()));
                entries.push((o * n + e.head, -T::one()));
            }
            entries.push((owners * n + id, T::one()));
            lp.add_column(e.cost, entries);
        }
    }
    debug_assert_eq!(lp.num_cols(), owners * m);
    DirectLp {
        kind,
        lp,
        owners,
        node_count: n,
        edge_count: m,
    }
}

/// One flow variable per commodity and edge.
pub fn build_edge_lp<T: Scalar>(instance: &Instance<T>) -> DirectLp<T> {
    let supplies = instance
        .commodities
        .iter()
        .map(|c| vec![(c.source, c.demand), (c.sink, -c.demand)])
        .collect();
    build(instance, DirectKind::Edge, supplies)
}

/// One flow variable per source and edge; sinks of a source share its rows.
pub fn build_source_lp<T: Scalar>(instance: &Instance<T>) -> DirectLp<T> {
    let supplies = instance
        .groups
        .iter()
        .map(|g| {
            let mut s = vec![(g.source, g.total_demand)];
            s.extend(g.sink_demands.iter().map(|&(t, d)| (t, -d)));
            s
        })
        .collect();
    build(instance, DirectKind::Source, supplies)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSolution<T> {
    pub objective: T,
    /// Dense edge flows per owner (commodity or source group).
    pub flows: Vec<Vec<T>>,
    pub lp_iterations: usize,
}

pub fn solve_direct<T: Scalar, B: LpBackend<T> + ?Sized>(
    lp: &DirectLp<T>,
    backend: &B,
) -> Result<DirectSolution<T>, LpError> {
    let sol = backend.solve(&lp.lp)?;
    let flows = sol
        .primal
        .chunks(lp.edge_count.max(1))
        .take(lp.owners)
        .map(|c| c.to_vec())
        .collect();
    Ok(DirectSolution {
        objective: sol.objective,
        flows,
        lp_iterations: sol.iterations,
    })
}

/// CPLEX-style LP text. Variables are `f_<edge>_<owner>`, rows
/// `bal_<node>_<owner>` and `cap_<edge>`; ids are 0-based.
pub fn export_lp_text<T: Scalar>(lp: &DirectLp<T>) -> String {
    let var = |j: usize| format!("f_{}_{}", j % lp.edge_count, j / lp.edge_count);
    let row_name = |i: usize| {
        if i < lp.owners * lp.node_count {
            format!("bal_{}_{}", i % lp.node_count, i / lp.node_count)
        } else {
            format!("cap_{}", i - lp.owners * lp.node_count)
        }
    };
    let term = |out: &mut String, first: bool, coef: T, name: &str| {
        let c = coef.as_f64();
        let sign = if c < 0.0 { " -" } else if first { "" } else { " +" };
        let _ = write!(out, "{sign} {} {name}", c.abs());
    };
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); lp.lp.num_rows()];
    for (i, j, v) in lp.lp.triplets() {
        rows[i].push((j, v));
    }
    let mut out = String::from("\\ ");
    out.push_str(match lp.kind {
        DirectKind::Edge => "edge-based multi-commodity flow\n",
        DirectKind::Source => "source-based multi-commodity flow\n",
    });
    out.push_str("Minimize\n obj:");
    for (j, &c) in lp.lp.objective.iter().enumerate() {
        term(&mut out, j == 0, c, &var(j));
    }
    out.push_str("\nSubject To\n");
    for (i, row) in rows.iter().enumerate() {
        let _ = write!(out, " {}:", row_name(i));
        if row.is_empty() {
            let _ = write!(out, " 0 {}", var(0));
        }
        for (pos, &(j, v)) in row.iter().enumerate() {
            term(&mut out, pos == 0, v, &var(j));
        }
        let _ = writeln!(out, " {} {}", lp.lp.senses[i], lp.lp.rhs[i].as_f64());
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Network};
    use crate::instance::Commodity;
    use crate::lp::{BuiltinSimplex, ClarabelBackend};

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

    #[test]
    fn counts() {
        let inst = triangle(10.0);
        let edge = build_edge_lp(&inst);
        assert_eq!(edge.variables(), 6);
        assert_eq!(edge.constraints(), 6 + 3);
        let src = build_source_lp(&inst);
        assert_eq!(src.variables(), 3);
        assert_eq!(src.constraints(), 3 + 3);
        assert_eq!(src.matrix_nonzeros(), 9);
        // supply at a, demand at b and c
        assert_eq!(src.nonzeros(), 9 + 3);
    }

    #[test]
    fn forced_single_edge() {
        let net = Network::new(
            2,
            vec![Edge {
                tail: 0,
                head: 1,
                cost: 2.0,
                capacity: 5.0,
            }],
        )
        .unwrap();
        let inst: Instance<f64> = Instance::new(
            "one",
            net,
            vec![Commodity {
                source: 0,
                sink: 1,
                demand: 3.0,
            }],
        )
        .unwrap();
        let s = solve_direct(&build_edge_lp(&inst), &BuiltinSimplex::default()).unwrap();
        assert_eq!(s.flows, vec![vec![3.0]]);
        assert!((s.objective - 6.0).abs() < 1e-9);
    }

    #[test]
    fn capacitated_triangle() {
        let inst = triangle(1.0);
        for lp in [build_edge_lp(&inst), build_source_lp(&inst)] {
            let s = solve_direct(&lp, &BuiltinSimplex::default()).unwrap();
            assert!((s.objective - 6.0).abs() < 1e-9, "{:?}", lp.kind);
            let c = solve_direct(&lp, &ClarabelBackend::default()).unwrap();
            assert!((c.objective - 6.0).abs() < 1e-6);
        }
        let src = solve_direct(&build_source_lp(&inst), &BuiltinSimplex::default()).unwrap();
        let f = &src.flows[0];
        assert!((f[0] - 2.0).abs() < 1e-9 && (f[1] - 1.0).abs() < 1e-9 && (f[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uncapacitated_is_shortest_paths() {
        let inst = triangle(10.0);
        let s = solve_direct(&build_source_lp(&inst), &BuiltinSimplex::default()).unwrap();
        assert!((s.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn cut_too_small() {
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
        assert_eq!(
            solve_direct(&build_edge_lp(&inst), &BuiltinSimplex::default()),
            Err(LpError::Infeasible)
        );
    }

    #[test]
    fn unique_sources_match_edge_lp_size() {
        let net = Network::new(
            3,
            vec![
                Edge {
                    tail: 0,
                    head: 1,
                    cost: 1.0,
                    capacity: 1.0,
                },
                Edge {
                    tail: 1,
                    head: 2,
                    cost: 1.0,
                    capacity: 1.0,
                },
            ],
        )
        .unwrap();
        let c = |source, sink| Commodity {
            source,
            sink,
            demand: 1.0,
        };
        let inst = Instance::new("u", net, vec![c(0, 1), c(1, 2)]).unwrap();
        assert_eq!(build_edge_lp(&inst).variables(), build_source_lp(&inst).variables());
    }

    #[test]
    fn text_export_names() {
        let text = export_lp_text(&build_source_lp(&triangle(1.0)));
        assert!(text.contains("bal_0_0:"));
        assert!(text.contains("cap_1: 1 f_1_0 <= 1"), "{text}");
        assert!(text.contains("Subject To"));
        assert!(text.ends_with("End\n"));
    }
}
