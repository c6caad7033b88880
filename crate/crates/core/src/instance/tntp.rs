//! Reader for the TNTP `_net` / `_trips` files of the transportation
//! networks benchmark.
//!
//! Edge cost is the free-flow time and edge capacity the capacity field; the
//! remaining link fields (length, B, power, speed, toll, type) are ignored.
//! Trip demands are divided by a problem-specific coefficient.

use std::collections::HashMap;
use std::io::BufRead;

use log::warn;

use super::{Commodity, Instance, InstanceError};
use crate::graph::{Edge, Network};
use crate::scalar::Scalar;

/// Demand coefficients for the transportation instances.
pub const TNTP_COEFFICIENTS: &[(&str, f64)] = &[
    ("Austin", 6.0),
    ("Barcelona", 5050.0),
    ("BerlinCenter", 0.5),
    ("Birmingham", 0.9),
    ("ChicagoRegional", 4.1),
    ("ChicagoSketch", 2.4),
    ("Philadelphia", 7.0),
    ("Sydney", 1.9),
    ("Winnipeg", 2000.0),
];

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Bundled coefficient for an instance or file name such as
/// `Winnipeg_net.tntp`.
pub fn tntp_coefficient(name: &str) -> Option<f64> {
    let base = std::path::Path::new(name)
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or(name);
    let key = normalize(base);
    TNTP_COEFFICIENTS
        .iter()
        .find(|(n, _)| key.starts_with(&normalize(n)))
        .map(|&(_, c)| c)
}

#[derive(Debug, Clone)]
pub struct TntpImport<T> {
    pub instance: Instance<T>,
    pub zones: Option<usize>,
    pub first_thru_node: Option<usize>,
    pub dropped_zero_demand: usize,
    pub dropped_self_pairs: usize,
    pub dropped_unreachable: usize,
}

struct Metadata {
    tags: HashMap<String, String>,
}

impl Metadata {
    fn count(&self, key: &str, line: usize) -> Result<Option<usize>, InstanceError> {
        match self.tags.get(key) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| *x >= 0.0 && x.fract() == 0.0)
                .map(|x| Some(x as usize))
                .ok_or_else(|| InstanceError::parse(line, 1, format!("<{key}>: expected a count, got '{v}'"))),
        }
    }
}

/// Reads the `<TAG> value` block. Returns the metadata and the line number
/// of `<END OF METADATA>` (0 when the file has no metadata block).
fn read_metadata(lines: &[String]) -> Result<(Metadata, usize), InstanceError> {
    let mut tags = HashMap::new();
    for (idx, raw) in lines.iter().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('~') {
            continue;
        }
        if !line.starts_with('<') {
            if tags.is_empty() {
                return Ok((Metadata { tags }, 0));
            }
            return Err(InstanceError::parse(idx + 1, 1, "missing <END OF METADATA> tag"));
        }
        let Some(close) = line.find('>') else {
            return Err(InstanceError::parse(idx + 1, 1, "unterminated metadata tag"));
        };
        let key = line[1..close].trim().to_ascii_uppercase();
        if key == "END OF METADATA" {
            return Ok((Metadata { tags }, idx + 1));
        }
        tags.insert(key, line[close + 1..].trim().to_string());
    }
    if tags.is_empty() {
        Ok((Metadata { tags }, 0))
    } else {
        Err(InstanceError::parse(lines.len().max(1), 1, "missing <END OF METADATA> tag"))
    }
}

fn read_lines<R: BufRead>(r: R) -> Result<Vec<String>, InstanceError> {
    r.lines()
        .collect::<Result<_, _>>()
        .map_err(|e| InstanceError::Io(e.to_string()))
}

fn number(field: &str, line: usize, column: usize, what: &str) -> Result<f64, InstanceError> {
    let v: f64 = field
        .parse()
        .map_err(|_| InstanceError::parse(line, column, format!("{what}: expected a number, got '{field}'")))?;
    if !v.is_finite() {
        return Err(InstanceError::parse(line, column, format!("{what} is not finite")));
    }
    Ok(v)
}

fn node_id(field: &str, line: usize, column: usize) -> Result<usize, InstanceError> {
    match field.parse::<usize>() {
        Ok(id) if id >= 1 => Ok(id),
        _ => Err(InstanceError::parse(line, column, format!("bad node id '{field}'"))),
    }
}

struct NetFile<T> {
    nodes: usize,
    zones: Option<usize>,
    first_thru_node: Option<usize>,
    edges: Vec<Edge<T>>,
}

fn parse_net<T: Scalar>(lines: &[String]) -> Result<NetFile<T>, InstanceError> {
    let (meta, body_start) = read_metadata(lines)?;
    let declared_nodes = meta.count("NUMBER OF NODES", body_start)?;
    let declared_links = meta.count("NUMBER OF LINKS", body_start)?;
    let zones = meta.count("NUMBER OF ZONES", body_start)?;
    let first_thru_node = meta.count("FIRST THRU NODE", body_start)?;

    let mut edges = Vec::new();
    let mut max_node = 0;
    for (idx, raw) in lines.iter().enumerate().skip(body_start) {
        let lineno = idx + 1;
        let line = raw.split('~').next().unwrap_or("");
        let line = line.split(';').next().unwrap_or("");
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 5 {
            return Err(InstanceError::parse(
                lineno,
                1,
                format!("link line needs at least 5 fields, found {}", fields.len()),
            ));
        }
        let tail = node_id(fields[0], lineno, 1)?;
        let head = node_id(fields[1], lineno, 2)?;
        let capacity = number(fields[2], lineno, 3, "capacity")?;
        let fft = number(fields[4], lineno, 5, "free flow time")?;
        if capacity < 0.0 || fft < 0.0 {
            return Err(InstanceError::parse(lineno, 1, "negative capacity or free flow time"));
        }
        max_node = max_node.max(tail).max(head);
        edges.push(Edge {
            tail: tail - 1,
            head: head - 1,
            cost: T::of(fft),
            capacity: T::of(capacity),
        });
    }
    let nodes = match declared_nodes {
        Some(n) if max_node > n => {
            return Err(InstanceError::parse(
                body_start.max(1),
                1,
                format!("link references node {max_node} but <NUMBER OF NODES> is {n}"),
            ))
        }
        Some(n) => n,
        None => max_node,
    };
    if let Some(l) = declared_links {
        if l != edges.len() {
            return Err(InstanceError::parse(
                body_start.max(1),
                1,
                format!("<NUMBER OF LINKS> is {l} but {} links were read", edges.len()),
            ));
        }
    }
    if let Some(ftn) = first_thru_node {
        if ftn > nodes.max(1) {
            warn!("first thru node {ftn} exceeds node count {nodes}");
        }
    }
    Ok(NetFile {
        nodes,
        zones,
        first_thru_node,
        edges,
    })
}

struct Trip {
    origin: usize,
    dest: usize,
    flow: f64,
}

fn parse_trips(lines: &[String], nodes: usize, net_zones: Option<usize>) -> Result<Vec<Trip>, InstanceError> {
    let (meta, body_start) = read_metadata(lines)?;
    let zones = meta.count("NUMBER OF ZONES", body_start)?;
    if let (Some(a), Some(b)) = (zones, net_zones) {
        if a != b {
            return Err(InstanceError::parse(
                body_start.max(1),
                1,
                format!("trips file has {a} zones but network has {b}"),
            ));
        }
    }
    let limit = zones.unwrap_or(nodes).min(nodes);
    let mut trips = Vec::new();
    let mut origin: Option<usize> = None;
    for (idx, raw) in lines.iter().enumerate().skip(body_start) {
        let lineno = idx + 1;
        let line = raw.split('~').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("Origin") {
            let o = node_id(rest.trim(), lineno, 8)?;
            if o > limit {
                return Err(InstanceError::parse(
                    lineno,
                    8,
                    format!("origin {o} exceeds zone/node count {limit}"),
                ));
            }
            origin = Some(o);
            continue;
        }
        let Some(o) = origin else {
            return Err(InstanceError::parse(lineno, 1, "trip entries before any 'Origin' line"));
        };
        for entry in line.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let column = raw.find(entry).map_or(1, |c| c + 1);
            let Some((d, v)) = entry.split_once(':') else {
                return Err(InstanceError::parse(lineno, column, format!("malformed trip entry '{entry}'")));
            };
            let d = node_id(d.trim(), lineno, column)?;
            if d > limit {
                return Err(InstanceError::parse(
                    lineno,
                    column,
                    format!("destination {d} exceeds zone/node count {limit}"),
                ));
            }
            let flow = number(v.trim(), lineno, column, "demand")?;
            if flow < 0.0 {
                return Err(InstanceError::parse(lineno, column, "negative demand"));
            }
            trips.push(Trip { origin: o, dest: d, flow });
        }
    }
    Ok(trips)
}

/// Reads a TNTP network/trips pair and divides every demand by
/// `coefficient`. Zero-demand pairs, `o = d` pairs and pairs whose sink is
/// unreachable are dropped (the latter with a warning).
pub fn parse_tntp_detailed<T: Scalar, N: BufRead, D: BufRead>(
    net: N,
    trips: D,
    coefficient: f64,
    name: &str,
) -> Result<TntpImport<T>, InstanceError> {
    if !(coefficient.is_finite() && coefficient > 0.0) {
        return Err(InstanceError::parse(0, 0, format!("coefficient must be positive, got {coefficient}")));
    }
    let net_lines = read_lines(net)?;
    let trip_lines = read_lines(trips)?;
    let nf: NetFile<T> = parse_net(&net_lines)?;
    let raw = parse_trips(&trip_lines, nf.nodes, nf.zones)?;

    let mut dropped_zero_demand = 0;
    let mut dropped_self_pairs = 0;
    let mut commodities = Vec::new();
    for t in raw {
        if t.origin == t.dest {
            if t.flow > 0.0 {
                dropped_self_pairs += 1;
            }
            continue;
        }
        if t.flow <= 0.0 {
            dropped_zero_demand += 1;
            continue;
        }
        commodities.push(Commodity {
            source: t.origin - 1,
            sink: t.dest - 1,
            demand: T::of(t.flow / coefficient),
        });
    }
    let network = Network::new(nf.nodes, nf.edges)?;
    let mut instance = Instance::new(name, network, commodities)?;
    let unreachable = instance.unreachable_commodities();
    if !unreachable.is_empty() {
        warn!(
            "{name}: dropping {} OD pairs whose destination is unreachable",
            unreachable.len()
        );
        let keep: Vec<_> = instance
            .commodities
            .iter()
            .enumerate()
            .filter(|(i, _)| unreachable.binary_search(i).is_err())
            .map(|(_, c)| *c)
            .collect();
        instance = Instance::new(name, instance.network, keep)?;
    }
    Ok(TntpImport {
        instance,
        zones: nf.zones,
        first_thru_node: nf.first_thru_node,
        dropped_zero_demand,
        dropped_self_pairs,
        dropped_unreachable: unreachable.len(),
    })
}

pub fn parse_tntp<T: Scalar, N: BufRead, D: BufRead>(
    net: N,
    trips: D,
    coefficient: f64,
    name: &str,
) -> Result<Instance<T>, InstanceError> {
    parse_tntp_detailed(net, trips, coefficient, name).map(|i| i.instance)
}
