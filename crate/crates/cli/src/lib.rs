//! Run records, instance loading and the benchmark CSV derivations behind the
//! `mcftree` binary.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use mcftree::decompose::{decompose_all, write_path_flows};
use mcftree::instance::{generate_with, parse_native, parse_tntp, tntp_coefficient, CapacityMode, RandomSpec};
use mcftree::{solve, Formulation, Instance, SolveReport, SolverConfig, Status};

/// One solver run. `wall_time_s` covers the solve only; flow decomposition is
/// timed separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub formulation: String,
    pub strategy: String,
    pub status: String,
    pub objective: Option<f64>,
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
    pub wall_time_s: f64,
    /// Process peak RSS; not comparable across machines or LP backends.
    pub peak_memory_bytes: Option<u64>,
    pub iterations: usize,
    pub columns_generated: usize,
    pub rows_activated: usize,
    pub nodes: usize,
    pub edges: usize,
    pub commodities: usize,
    pub sources: usize,
    pub decompose_time_s: Option<f64>,
}

pub const CSV_HEADER: &str = "instance,formulation,strategy,status,objective,lower_bound,gap,wall_time_s,\
peak_memory_bytes,iterations,columns_generated,rows_activated,nodes,edges,commodities,sources,decompose_time_s";

impl RunRecord {
    pub fn from_report(instance: &Instance, report: &SolveReport) -> Self {
        RunRecord {
            instance: report.instance.clone(),
            formulation: report.formulation.name().to_string(),
            strategy: report.strategy.map_or("-", |s| s.name()).to_string(),
            status: report.status.name().to_string(),
            objective: report.objective,
            lower_bound: report.lower_bound,
            gap: report.gap,
            wall_time_s: report.elapsed.as_secs_f64(),
            peak_memory_bytes: peak_memory_bytes(),
            iterations: report.iterations.len(),
            columns_generated: report.columns_generated(),
            rows_activated: report.active_rows.len(),
            nodes: instance.network.node_count(),
            edges: instance.network.edge_count(),
            commodities: instance.commodities.len(),
            sources: instance.source_count(),
            decompose_time_s: None,
        }
    }

    pub fn solved(&self) -> bool {
        self.status == Status::Optimal.name()
    }

    pub fn summary(&self) -> String {
        let num = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6e}"));
        let mut s = format!(
            "{} [{}] {}: objective {} lower bound {} gap {}\n  {:.3}s, {} iterations, {} columns, {} capacity rows",
            self.instance,
            self.formulation,
            self.status,
            num(self.objective),
            num(self.lower_bound),
            self.gap.map_or("-".to_string(), |g| format!("{g:.2e}")),
            self.wall_time_s,
            self.iterations,
            self.columns_generated,
            self.rows_activated,
        );
        if let Some(m) = self.peak_memory_bytes {
            s.push_str(&format!(", peak RSS {:.1} MiB", m as f64 / (1024.0 * 1024.0)));
        }
        if let Some(t) = self.decompose_time_s {
            s.push_str(&format!(", decomposition {t:.3}s"));
        }
        s
    }
}

/// `VmHWM` from `/proc/self/status`; `None` where unavailable.
pub fn peak_memory_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord], header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize().map(|rec| rec.map_err(Into::into)).collect()
}

/// Appends to a CSV file, writing the header if the file is new or empty.
pub fn append_record(path: &Path, record: &RunRecord) -> Result<()> {
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    write_records(file, std::slice::from_ref(record), fresh)
}

/// Parses `random:nodes=..,edges=..,commodities=..,sources=..[,seed=..][,capacity=..]`.
/// `capacity` is `mixed` (default), `none` or `tight:<p>`.
pub fn parse_random_spec(spec: &str) -> Result<RandomSpec> {
    let body = spec.strip_prefix("random:").ok_or_else(|| anyhow!("not a random spec: {spec}"))?;
    let mut fields = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| anyhow!("expected key=value, got `{part}`"))?;
        fields.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut take = |key: &str, default: Option<u64>| -> Result<u64> {
        match fields.remove(key) {
            Some(v) => v.parse().with_context(|| format!("bad value for {key}")),
            None => default.ok_or_else(|| anyhow!("random spec needs {key}=")),
        }
    };
    let nodes = take("nodes", None)? as usize;
    let edges = take("edges", None)? as usize;
    let commodities = take("commodities", None)? as usize;
    let sources = take("sources", Some(commodities.min(nodes) as u64))? as usize;
    let seed = take("seed", Some(0))?;
    let mut rs = RandomSpec::new(nodes, edges, commodities, sources, seed);
    if let Some(v) = fields.remove("max-demand") {
        rs.max_demand = v.parse().context("bad value for max-demand")?;
    }
    if let Some(cap) = fields.remove("capacity") {
        rs.capacity = match cap.as_str() {
            "mixed" => CapacityMode::Mixed,
            "none" => CapacityMode::Uncapacitated,
            t => match t.strip_prefix("tight:").map(str::parse::<f64>) {
                Some(Ok(p)) if (0.0..=1.0).contains(&p) => CapacityMode::Tight(p),
                _ => bail!("capacity must be mixed, none or tight:<p>, got `{cap}`"),
            },
        };
    }
    if let Some(k) = fields.keys().next() {
        bail!("unknown random spec key `{k}`");
    }
    Ok(rs)
}

/// The trips file next to a TNTP network file: `X_net.tntp` → `X_trips.tntp`.
pub fn tntp_trips_path(net: &Path) -> Option<PathBuf> {
    let name = net.file_name()?.to_str()?;
    let idx = name.rfind("_net")?;
    let trips = format!("{}_trips{}", &name[..idx], &name[idx + 4..]);
    Some(net.with_file_name(trips))
}

fn stem(path: &Path) -> String {
    let s = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    s.strip_suffix("_net").unwrap_or(s).to_string()
}

/// Loads a native `.mcf` file, a TNTP `_net.tntp` file (its `_trips.tntp`
/// sibling is found automatically) or a `random:` spec.
pub fn load_instance(spec: &str, coefficient: Option<f64>) -> Result<Instance> {
    if spec.starts_with("random:") {
        let rs = parse_random_spec(spec)?;
        let name = format!(
            "random-{}-{}-{}-{}-{}",
            rs.nodes, rs.edges, rs.commodities, rs.sources, rs.seed
        );
        let mut inst = generate_with(&rs)?;
        inst.name = name;
        return Ok(inst);
    }
    let path = Path::new(spec);
    let open = |p: &Path| File::open(p).map(BufReader::new).with_context(|| format!("opening {}", p.display()));
    if path.extension().is_some_and(|e| e == "tntp") {
        let trips = tntp_trips_path(path).ok_or_else(|| anyhow!("{spec}: expected a *_net.tntp file"))?;
        let name = stem(path);
        let coefficient = coefficient
            .or_else(|| tntp_coefficient(&name))
            .ok_or_else(|| anyhow!("{name}: no bundled coefficient, pass --coefficient"))?;
        return Ok(parse_tntp(open(path)?, open(&trips)?, coefficient, &name)?);
    }
    Ok(parse_native(open(path)?, &stem(path))?)
}

/// Solves and optionally writes the path decomposition of the final flow.
pub fn run(
    instance: &Instance,
    config: &SolverConfig,
    decompose_to: Option<&Path>,
) -> Result<(RunRecord, SolveReport)> {
    let report = solve(instance, config)?;
    let mut record = RunRecord::from_report(instance, &report);
    if let Some(path) = decompose_to {
        if report.source_flows.is_empty() {
            bail!("no flow to decompose ({})", report.status.name());
        }
        let start = Instant::now();
        let paths = decompose_all(instance, &report.source_flows)?;
        record.decompose_time_s = Some(start.elapsed().as_secs_f64());
        std::fs::write(path, write_path_flows(instance, &paths)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok((record, report))
}

pub fn parse_formulation(s: &str) -> Result<Formulation> {
    Ok(match s {
        "tree" => Formulation::Tree,
        "path" => Formulation::Path,
        "source-lp" => Formulation::SourceLp,
        "edge-lp" => Formulation::EdgeLp,
        _ => bail!("unknown formulation `{s}`"),
    })
}

/// Benchmark manifest (TOML). Instance paths are relative to the manifest.
///
/// ```toml
/// formulations = ["tree", "path"]
/// timeout = 600
/// tol = 1e-4
///
/// [[instance]]
/// path = "grid1.mcf"
///
/// [[instance]]
/// path = "Winnipeg_net.tntp"
/// coefficient = 2000.0
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub formulations: Vec<String>,
    pub timeout: Option<f64>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(rename = "instance", default)]
    pub instances: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub path: String,
    pub coefficient: Option<f64>,
    #[serde(default)]
    pub args: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let m: Manifest = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        for f in &m.formulations {
            parse_formulation(f)?;
        }
        Ok(m)
    }

    /// Instance path resolved against the manifest directory; `random:` specs
    /// pass through.
    pub fn resolve(&self, manifest: &Path, entry: &ManifestEntry) -> String {
        if entry.path.starts_with("random:") || Path::new(&entry.path).is_absolute() {
            return entry.path.clone();
        }
        let dir = manifest.parent().unwrap_or(Path::new("."));
        dir.join(&entry.path).to_string_lossy().into_owned()
    }
}

/// Time used for ranking: wall time if solved, otherwise the cap.
fn effective_time(r: &RunRecord, cap: f64) -> f64 {
    if r.solved() {
        r.wall_time_s
    } else {
        cap
    }
}

fn solvers(records: &[RunRecord]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in records {
        if !out.contains(&r.formulation) {
            out.push(r.formulation.clone());
        }
    }
    out
}

fn by_instance(records: &[RunRecord]) -> BTreeMap<&str, BTreeMap<&str, &RunRecord>> {
    let mut map: BTreeMap<&str, BTreeMap<&str, &RunRecord>> = BTreeMap::new();
    for r in records {
        map.entry(&r.instance).or_default().insert(&r.formulation, r);
    }
    map
}

/// Performance profile: for every breakpoint `tau`, the fraction of instances
/// each solver solves within `tau` times the best solver's time. Unsolved
/// runs never count.
pub fn performance_profile(records: &[RunRecord]) -> Vec<(f64, Vec<f64>)> {
    let names = solvers(records);
    let table = by_instance(records);
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for runs in table.values() {
        let best = runs
            .values()
            .filter(|r| r.solved())
            .map(|r| r.wall_time_s.max(1e-9))
            .fold(f64::INFINITY, f64::min);
        for (i, name) in names.iter().enumerate() {
            let ratio = match runs.get(name.as_str()) {
                Some(r) if r.solved() => r.wall_time_s.max(1e-9) / best,
                _ => f64::INFINITY,
            };
            ratios[i].push(ratio);
        }
    }
    let total = table.len().max(1) as f64;
    let mut taus: Vec<f64> = ratios.iter().flatten().copied().filter(|r| r.is_finite()).collect();
    taus.push(1.0);
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    taus.into_iter()
        .map(|tau| {
            let fracs = ratios
                .iter()
                .map(|rs| rs.iter().filter(|&&r| r <= tau).count() as f64 / total)
                .collect();
            (tau, fracs)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CactusPoint {
    pub formulation: String,
    pub rank: usize,
    pub time_s: f64,
    pub solved: bool,
}

/// Per-solver times sorted ascending; unsolved runs sit at `cap`.
pub fn cactus(records: &[RunRecord], cap: f64) -> Vec<CactusPoint> {
    let mut out = Vec::new();
    for name in solvers(records) {
        let mut pts: Vec<(f64, bool)> = records
            .iter()
            .filter(|r| r.formulation == name)
            .map(|r| (effective_time(r, cap), r.solved()))
            .collect();
        pts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
        out.extend(pts.into_iter().enumerate().map(|(i, (t, solved))| CactusPoint {
            formulation: name.clone(),
            rank: i + 1,
            time_s: t,
            solved,
        }));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub instance: String,
    pub tree_time_s: f64,
    pub path_time_s: f64,
}

/// Tree vs path time per instance with both runs present.
pub fn scatter(records: &[RunRecord], cap: f64) -> Vec<ScatterPoint> {
    by_instance(records)
        .into_iter()
        .filter_map(|(inst, runs)| {
            let (t, p) = (runs.get("tree")?, runs.get("path")?);
            Some(ScatterPoint {
                instance: inst.to_string(),
                tree_time_s: effective_time(t, cap),
                path_time_s: effective_time(p, cap),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell {
    pub instance: String,
    pub commodities: usize,
    pub shared_source_fraction: f64,
    /// Path time over tree time.
    pub speedup: f64,
}

pub fn heatmap(records: &[RunRecord], cap: f64) -> Vec<HeatmapCell> {
    by_instance(records)
        .into_iter()
        .filter_map(|(inst, runs)| {
            let (t, p) = (runs.get("tree")?, runs.get("path")?);
            let k = t.commodities.max(1);
            Some(HeatmapCell {
                instance: inst.to_string(),
                commodities: t.commodities,
                shared_source_fraction: 1.0 - t.sources as f64 / k as f64,
                speedup: effective_time(p, cap) / effective_time(t, cap).max(1e-9),
            })
        })
        .collect()
}

fn write_csv<S: Serialize>(path: &Path, rows: &[S]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `runs.csv`, `profile.csv`, `cactus.csv`, `scatter.csv` and
/// `heatmap.csv` into `dir`.
pub fn write_bench_outputs(dir: &Path, records: &[RunRecord], cap: f64) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_records(File::create(dir.join("runs.csv"))?, records, true)?;

    let names = solvers(records);
    let mut w = csv::Writer::from_path(dir.join("profile.csv"))?;
    w.write_record(std::iter::once("tau".to_string()).chain(names.iter().cloned()))?;
    for (tau, fracs) in performance_profile(records) {
        w.write_record(std::iter::once(tau).chain(fracs).map(|v| v.to_string()))?;
    }
    w.flush()?;

    write_csv(&dir.join("cactus.csv"), &cactus(records, cap))?;
    write_csv(&dir.join("scatter.csv"), &scatter(records, cap))?;
    write_csv(&dir.join("heatmap.csv"), &heatmap(records, cap))?;
    Ok(())
}
