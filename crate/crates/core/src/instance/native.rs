//! Line-oriented native format.
//!
//! ```text
//! # comment
//! p mcf <nodes> <edges> <commodities>
//! a <tail> <head> <cost> <capacity>     (edges lines)
//! d <source> <sink> <demand>            (commodities lines)
//! ```
//!
//! Node ids are 1-based. Anything after `#` is ignored.

use std::fmt::Write as _;
use std::io::BufRead;

use super::{Commodity, Instance, InstanceError};
use crate::graph::{Edge, Network};
use crate::scalar::Scalar;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    column: s + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &body[s..],
            column: s + 1,
        });
    }
    out
}

fn int(tok: &Token<'_>, line: usize, what: &str) -> Result<usize, InstanceError> {
    tok.text
        .parse::<usize>()
        .map_err(|_| InstanceError::parse(line, tok.column, format!("{what}: expected an integer, got '{}'", tok.text)))
}

fn node(tok: &Token<'_>, line: usize, nodes: usize) -> Result<usize, InstanceError> {
    let id = int(tok, line, "node id")?;
    if id == 0 || id > nodes {
        return Err(InstanceError::parse(
            line,
            tok.column,
            format!("node {id} out of range 1..={nodes}"),
        ));
    }
    Ok(id - 1)
}

fn nonneg<T: Scalar>(tok: &Token<'_>, line: usize, what: &str) -> Result<T, InstanceError> {
    let v: f64 = tok.text.parse().map_err(|_| {
        InstanceError::parse(line, tok.column, format!("{what}: expected a number, got '{}'", tok.text))
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(InstanceError::parse(
            line,
            tok.column,
            format!("{what} must be finite and nonnegative, got {v}"),
        ));
    }
    Ok(T::of(v))
}

/// Reads an instance in the native format.
pub fn parse_native<T: Scalar, R: BufRead>(reader: R, name: &str) -> Result<Instance<T>, InstanceError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut commodities = Vec::new();
    let mut last_line = 0;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.map_err(|e| InstanceError::Io(e.to_string()))?;
        let toks = tokens(&line);
        let Some(first) = toks.first() else { continue };
        let expect = |n: usize| -> Result<(), InstanceError> {
            if toks.len() != n {
                Err(InstanceError::parse(
                    lineno,
                    first.column,
                    format!("'{}' line needs {} fields, found {}", first.text, n, toks.len()),
                ))
            } else {
                Ok(())
            }
        };
        match first.text {
            "p" => {
                if header.is_some() {
                    return Err(InstanceError::parse(lineno, first.column, "duplicate header"));
                }
                expect(5)?;
                if toks[1].text != "mcf" {
                    return Err(InstanceError::parse(
                        lineno,
                        toks[1].column,
                        format!("unknown problem type '{}'", toks[1].text),
                    ));
                }
                header = Some((
                    int(&toks[2], lineno, "node count")?,
                    int(&toks[3], lineno, "edge count")?,
                    int(&toks[4], lineno, "commodity count")?,
                ));
            }
            "a" | "d" => {
                let Some((nodes, _, _)) = header else {
                    return Err(InstanceError::parse(lineno, first.column, "data line before 'p mcf' header"));
                };
                if first.text == "a" {
                    expect(5)?;
                    if !commodities.is_empty() {
                        return Err(InstanceError::parse(lineno, first.column, "edge line after commodity lines"));
                    }
                    edges.push(Edge {
                        tail: node(&toks[1], lineno, nodes)?,
                        head: node(&toks[2], lineno, nodes)?,
                        cost: nonneg(&toks[3], lineno, "cost")?,
                        capacity: nonneg(&toks[4], lineno, "capacity")?,
                    });
                } else {
                    expect(4)?;
                    let source = node(&toks[1], lineno, nodes)?;
                    let sink = node(&toks[2], lineno, nodes)?;
                    let demand: T = nonneg(&toks[3], lineno, "demand")?;
                    if demand <= T::zero() {
                        return Err(InstanceError::parse(lineno, toks[3].column, "demand must be positive"));
                    }
                    if source == sink {
                        return Err(InstanceError::parse(lineno, toks[2].column, "source equals sink"));
                    }
                    commodities.push(Commodity { source, sink, demand });
                }
            }
            other => {
                return Err(InstanceError::parse(
                    lineno,
                    first.column,
                    format!("unknown line type '{other}'"),
                ))
            }
        }
    }

    let Some((nodes, edge_count, commodity_count)) = header else {
        return Err(InstanceError::parse(last_line.max(1), 1, "missing 'p mcf' header"));
    };
    if edges.len() != edge_count {
        return Err(InstanceError::parse(
            last_line,
            1,
            format!("header declares {edge_count} edges, found {}", edges.len()),
        ));
    }
    if commodities.is_empty() {
        return Err(InstanceError::NoCommodities);
    }
    if commodities.len() != commodity_count {
        return Err(InstanceError::parse(
            last_line,
            1,
            format!("header declares {commodity_count} commodities, found {}", commodities.len()),
        ));
    }
    let network = Network::new(nodes, edges)?;
    Instance::new(name, network, commodities)
}

/// Writes `instance` in the native format.
pub fn write_native<T: Scalar>(instance: &Instance<T>) -> String {
    let net = &instance.network;
    let mut out = String::new();
    if !instance.name.is_empty() {
        let _ = writeln!(out, "# {}", instance.name);
    }
    let _ = writeln!(
        out,
        "p mcf {} {} {}",
        net.node_count(),
        net.edge_count(),
        instance.commodities.len()
    );
    for e in net.edges() {
        let _ = writeln!(out, "a {} {} {} {}", e.tail + 1, e.head + 1, e.cost, e.capacity);
    }
    for c in &instance.commodities {
        let _ = writeln!(out, "d {} {} {}", c.source + 1, c.sink + 1, c.demand);
    }
    out
}
