//! Seeded random instances for oracle tests.
//!
//! Every instance is feasible by construction: a random routing of all
//! commodities is drawn first and tight capacities are set at or above its
//! edge loads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Commodity, Instance, InstanceError};
use crate::graph::{dijkstra, Edge, EdgeWeights, Network, NodeId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapacityMode {
    /// Every capacity exceeds the total demand.
    Uncapacitated,
    /// Each edge is tight with probability `p`, loose otherwise.
    Tight(f64),
    /// Like `Tight`, with `p` drawn per instance from `[0.2, 1.0]`.
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub nodes: usize,
    pub edges: usize,
    pub commodities: usize,
    pub sources: usize,
    pub seed: u64,
    pub capacity: CapacityMode,
    pub max_cost: u32,
    pub max_demand: u32,
}

impl RandomSpec {
    pub fn new(nodes: usize, edges: usize, commodities: usize, sources: usize, seed: u64) -> Self {
        RandomSpec {
            nodes,
            edges,
            commodities,
            sources,
            seed,
            capacity: CapacityMode::Mixed,
            max_cost: 20,
            max_demand: 10,
        }
    }
}

const MAX_ATTEMPTS: usize = 64;

pub fn generate_random<T: Scalar>(
    nodes: usize,
    edges: usize,
    commodities: usize,
    sources: usize,
    seed: u64,
) -> Result<Instance<T>, InstanceError> {
    generate_with(&RandomSpec::new(nodes, edges, commodities, sources, seed))
}

pub fn generate_with<T: Scalar>(spec: &RandomSpec) -> Result<Instance<T>, InstanceError> {
    let &RandomSpec {
        nodes: n,
        edges: m,
        commodities: k,
        sources: s,
        ..
    } = spec;
    if n < 2 || s == 0 || s > k || m + 1 < n || spec.max_cost == 0 || spec.max_demand == 0 {
        return Err(InstanceError::Generation(format!(
            "unsatisfiable parameters n={n} m={m} k={k} s={s}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(inst) = attempt(spec, &mut rng)? {
            return Ok(inst);
        }
    }
    Err(InstanceError::Generation(format!(
        "no valid instance after {MAX_ATTEMPTS} attempts (n={n} m={m} k={k} s={s})"
    )))
}

fn attempt<T: Scalar>(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> Result<Option<Instance<T>>, InstanceError> {
    let (n, m, k, s) = (spec.nodes, spec.edges, spec.commodities, spec.sources);
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(rng);
    let mut arcs: Vec<(NodeId, NodeId)> = Vec::with_capacity(m);
    if m >= n {
        for i in 0..n {
            arcs.push((perm[i], perm[(i + 1) % n]));
        }
    } else {
        for i in 0..n - 1 {
            arcs.push((perm[i], perm[i + 1]));
        }
    }
    while arcs.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            arcs.push((u, v));
        }
    }
    arcs.shuffle(rng);
    let costs: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=spec.max_cost)).collect();
    let probe = Network::new(
        n,
        arcs.iter()
            .map(|&(tail, head)| Edge {
                tail,
                head,
                cost: T::zero(),
                capacity: T::zero(),
            })
            .collect(),
    )?;
    let zero = EdgeWeights::zeros(m);

    // reachable sink candidates per node
    let mut reach: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    for v in 0..n {
        let spt = dijkstra(&probe, &zero, v, None)?;
        reach.push((0..n).filter(|&u| u != v && spt.dist[u].is_finite()).collect());
    }
    let mut candidates: Vec<NodeId> = (0..n).filter(|&v| !reach[v].is_empty()).collect();
    if candidates.len() < s {
        return Ok(None);
    }
    candidates.shuffle(rng);
    let chosen: Vec<NodeId> = candidates[..s].to_vec();
    if chosen.iter().map(|&v| reach[v].len()).sum::<usize>() < k {
        return Ok(None);
    }
    let mut pools: Vec<Vec<NodeId>> = chosen
        .iter()
        .map(|&v| {
            let mut p = reach[v].clone();
            p.shuffle(rng);
            p
        })
        .collect();
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::with_capacity(k);
    for (i, &src) in chosen.iter().enumerate() {
        pairs.push((src, pools[i].pop().expect("nonempty pool")));
    }
    while pairs.len() < k {
        let open: Vec<usize> = (0..s).filter(|&i| !pools[i].is_empty()).collect();
        let i = *open.choose(rng).expect("enough sinks remain");
        pairs.push((chosen[i], pools[i].pop().expect("nonempty pool")));
    }
    let demands: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=spec.max_demand)).collect();

    // a random feasible routing decides the tight capacities
    let route_w = EdgeWeights::new((0..m).map(|_| T::of(rng.gen_range(1..=100) as f64)).collect())?;
    let mut load = vec![0.0f64; m];
    for (&(src, dst), &d) in pairs.iter().zip(&demands) {
        let spt = dijkstra(&probe, &route_w, src, Some(&[dst]))?;
        for e in spt.path_to(&probe, dst).expect("sink reachable") {
            load[e] += d as f64;
        }
    }
    let total: f64 = demands.iter().map(|&d| d as f64).sum();
    let p_tight = match spec.capacity {
        CapacityMode::Uncapacitated => 0.0,
        CapacityMode::Tight(p) => p,
        CapacityMode::Mixed => rng.gen_range(0.2..=1.0),
    };
    let edges: Vec<Edge<T>> = arcs
        .iter()
        .enumerate()
        .map(|(e, &(tail, head))| {
            let tight = rng.gen_bool(p_tight.clamp(0.0, 1.0));
            let cap = if tight {
                (load[e] * rng.gen_range(1.0..1.3)).ceil()
            } else {
                total + 1.0
            };
            Edge {
                tail,
                head,
                cost: T::of(costs[e] as f64),
                capacity: T::of(cap),
            }
        })
        .collect();
    let commodities = pairs
        .iter()
        .zip(&demands)
        .map(|(&(source, sink), &d)| Commodity {
            source,
            sink,
            demand: T::of(d as f64),
        })
        .collect();
    let name = format!(
        "random-n{}-m{}-k{}-s{}-seed{}",
        spec.nodes, spec.edges, spec.commodities, spec.sources, spec.seed
    );
    Ok(Some(Instance::new(name, Network::new(n, edges)?, commodities)?))
}
