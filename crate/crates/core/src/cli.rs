//! Command-line experiment harness.
//!
//! Machine-readable output is one JSON record per line with the fixed keys
//! `kind`, `seed`, `config`, `graph` (path and SHA-256 of the canonical
//! edge list) and `result`. Tables go to stdout as aligned text and figure
//! data as two-column CSV.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, RngCore};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    compression_epsilon, fit_inverse_sqrt, improvable_count, magic_angle_state, sample_deviation,
    small_angle_condition, thermal_bound, thermality_coefficient, CompressionInputs,
};
use crate::error::{Error, Result};
use crate::optimizer::{
    improvement_report, optimize, small_beta_optimize, warm_layers, Backend, Bounds, OptimizeConfig,
    SmallBetaConfig, IMPROVEMENT_TOL,
};
use crate::localsim::LocalSimulator;
use crate::problems::{
    density_of_states, format_graph, generate_regular_graph, read_graph, write_graph, BitString, Convention, Cost,
    CostKind, Graph,
};
use crate::statevector::{QaoaParams, Schedule, Simulator, Start};
use crate::warmstart::{
    goemans_williamson, greedy_mis, metropolis_samples, stream_rng, GwConfig, MoveSet, StringBatch, ThermalSpec,
};

#[derive(Debug, Parser)]
#[command(name = "qaoa-lab", version, about = "Warm-start QAOA experiments")]
pub struct Cli {
    /// Base seed; every task derives its own stream from (seed, task).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Add a wall-clock timestamp to every record.
    #[arg(long, global = true)]
    pub timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph and write it as an edge list.
    GenGraph(GenGraphArgs),
    /// Produce a batch of classical warm-start strings.
    Warmstart(WarmstartArgs),
    /// Run or optimize the standard or warm-start QAOA.
    Qaoa(QaoaArgs),
    /// Improvement tables over every string at fixed cost levels.
    SweepTable(SweepArgs),
    /// Thermality coefficients, or the sample deviation sweep and fit.
    Thermality(ThermalityArgs),
    /// Small-angle improvement condition at p = 3/2.
    SmallAngle(SmallAngleArgs),
    /// Magic-angle cat states on SK instances.
    MagicAngle(MagicAngleArgs),
    /// Compression or thermal bounds.
    Bounds(BoundsArgs),
    /// Number of strings at each cost value, as CSV.
    DensityOfStates(DosArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Regular,
    Sk,
    Decoupled,
    Cycle,
    Complete,
}

#[derive(Debug, Args, Serialize)]
pub struct GenGraphArgs {
    #[arg(long, value_enum, default_value_t = Family::Regular)]
    pub family: Family,
    /// Vertex count (pair count for the decoupled family).
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long, default_value_t = 3)]
    pub degree: usize,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Sa,
    Gw,
    GreedyMis,
}

#[derive(Debug, Args, Serialize)]
pub struct WarmstartArgs {
    #[arg(value_enum)]
    pub method: Generator,
    #[arg(short, long)]
    pub graph: PathBuf,
    #[arg(short, long, default_value_t = 1)]
    pub count: usize,
    /// Sampling temperature for `sa`.
    #[arg(short = 'T', long, default_value_t = 1.75)]
    pub temperature: f64,
    /// Metropolis updates per vertex for `sa`.
    #[arg(long, default_value_t = crate::warmstart::UPDATES_PER_VERTEX)]
    pub updates_per_vertex: usize,
    /// Use Wolff cluster moves for `sa`.
    #[arg(long)]
    pub cluster: bool,
    /// Cost sampled by `sa`: maxcut, ising, sk or mis.
    #[arg(long, default_value = "maxcut")]
    pub cost: String,
    /// Batch file to write; strings go to stdout without it.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Standard,
    Warm,
}

#[derive(Debug, Args, Serialize)]
pub struct QaoaArgs {
    #[arg(value_enum)]
    pub mode: Mode,
    #[arg(short, long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "maxcut")]
    pub cost: String,
    /// Depth: an integer for standard runs, a half-integer for warm starts.
    #[arg(short, long)]
    pub p: f64,
    /// statevector or localsim (warm starts only).
    #[arg(long, default_value = "statevector")]
    pub backend: String,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Comma-separated angles to evaluate instead of optimizing; `pi`
    /// expressions such as `pi/8` are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_angle, allow_hyphen_values = true)]
    pub angles: Option<Vec<f64>>,
    /// A single warm-start string.
    #[arg(long, allow_hyphen_values = true)]
    pub string: Option<String>,
    /// A batch file of warm-start strings.
    #[arg(long)]
    pub strings: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Edge-list file; a seeded random regular graph is used without it.
    #[arg(short, long)]
    pub graph: Option<PathBuf>,
    #[arg(short, long, default_value_t = 12)]
    pub n: usize,
    #[arg(short, long, default_value_t = 3)]
    pub degree: usize,
    /// MaxCut values whose strings are warm-started.
    #[arg(long, value_delimiter = ',', default_values_t = [11, 13])]
    pub levels: Vec<i64>,
    /// Warm-start depths.
    #[arg(long, value_delimiter = ',', default_values_t = [1.5, 2.5])]
    pub depths: Vec<f64>,
    /// Standard QAOA depths for the comparison row.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4])]
    pub standard_depths: Vec<usize>,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Use only the first strings of each level, in basis order.
    #[arg(long)]
    pub max_strings: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ThermalityArgs {
    /// Run the sample deviation sweep over `--sizes` and fit `E = c n^{-1/2}`.
    #[arg(long)]
    pub fit: bool,
    #[arg(short, long)]
    pub graph: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub string: Option<String>,
    #[arg(long)]
    pub strings: Option<PathBuf>,
    #[arg(short, long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1000, 2000, 5000, 10000, 20000])]
    pub sizes: Vec<usize>,
    #[arg(short, long, default_value_t = 3)]
    pub degree: usize,
    #[arg(short = 'k', long, default_value_t = 10)]
    pub samples: usize,
    #[arg(short = 'T', long, default_value_t = 1.75)]
    pub temperature: f64,
    /// Write the (n, E) CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SmallAngleArgs {
    #[arg(short, long)]
    pub graph: PathBuf,
    /// Check every string with this MaxCut value.
    #[arg(long)]
    pub level: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub string: Option<String>,
    #[arg(long)]
    pub strings: Option<PathBuf>,
    /// Also optimize with |β| ≤ β_max and compare the verdict.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_BETA_MAX)]
    pub beta_max: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct MagicAngleArgs {
    /// SK edge list; a seeded instance on `n` vertices is used without it.
    #[arg(short, long)]
    pub graph: Option<PathBuf>,
    #[arg(short, long, default_value_t = 8)]
    pub n: usize,
    /// Number of random starting strings.
    #[arg(short, long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub string: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Compression,
    Thermal,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(value_enum)]
    pub kind: BoundKind,
    #[arg(short, long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value = "maxcut")]
    pub cost: String,
    /// Strings in the starting window (instead of `--graph`).
    #[arg(long)]
    pub d0: Option<u64>,
    /// Strings at or above the target (instead of `--graph`).
    #[arg(long)]
    pub d1: Option<u64>,
    /// Starting cost window `C0,C0'`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<i64>>,
    /// Target cost `C1`.
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<i64>,
    #[arg(short, long, default_value_t = 1.0)]
    pub p: f64,
    /// Qubit count (defaults to the graph's).
    #[arg(short, long)]
    pub n: Option<usize>,
    /// Selection probability for the count bound (defaults to ε).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(short, long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub string: Option<String>,
    #[arg(long)]
    pub strings: Option<PathBuf>,
    /// Also optimize the warm start at p = r + 1/2 and compare.
    #[arg(long)]
    pub optimize: bool,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DosArgs {
    #[arg(short, long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "maxcut")]
    pub cost: String,
}

/// Parses `0.3`, `pi`, `-pi/4`, `3pi/8` or `2*pi`.
pub fn parse_angle(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    let Some((coef, rest)) = t.split_once("pi") else {
        return t.parse().map_err(|e| format!("bad angle '{text}': {e}"));
    };
    let coef = coef.trim_end_matches('*');
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse().map_err(|e| format!("bad angle '{text}': {e}"))?,
    };
    let d = match rest.strip_prefix('/') {
        Some(d) => d.parse().map_err(|e| format!("bad angle '{text}': {e}"))?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("bad angle '{text}'")),
    };
    Ok(c * std::f64::consts::PI / d)
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Seed of task `task`, drawn from stream `(seed, task)`.
pub fn task_seed(seed: u64, task: u64) -> u64 {
    stream_rng(seed, task).next_u64()
}

/// SHA-256 of the canonical edge-list text.
pub fn graph_hash(graph: &Graph) -> String {
    hex::encode(Sha256::digest(format_graph(graph).as_bytes()))
}

fn parse_cost(name: &str) -> Result<CostKind> {
    name.parse()
}

fn parse_backend(name: &str) -> Result<Backend> {
    name.parse()
}

struct Records {
    out: Box<dyn Write>,
    kind: &'static str,
    seed: u64,
    config: Value,
    graph: Value,
    timestamp: bool,
}

impl Records {
    fn new(cli: &Cli, kind: &'static str, config: &impl Serialize) -> Result<Self> {
        let out: Box<dyn Write> = match &cli.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Self {
            out,
            kind,
            seed: cli.seed,
            config: serde_json::to_value(config)?,
            graph: Value::Null,
            timestamp: cli.timestamp,
        })
    }

    fn with_graph(mut self, path: Option<&Path>, graph: &Graph) -> Self {
        self.graph = json!({
            "path": path.map(|p| p.display().to_string()),
            "sha256": graph_hash(graph),
            "n": graph.num_vertices(),
            "m": graph.num_edges(),
        });
        self
    }

    fn emit(&mut self, result: Value) -> Result<()> {
        let mut record = json!({
            "kind": self.kind,
            "seed": self.seed,
            "config": self.config,
            "graph": self.graph,
            "result": result,
        });
        if self.timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            record["timestamp"] = json!(secs);
        }
        serde_json::to_writer(&mut self.out, &record)?;
        writeln!(self.out)?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::GenGraph(a) => gen_graph(cli, a),
        Command::Warmstart(a) => warmstart(cli, a),
        Command::Qaoa(a) => qaoa(cli, a),
        Command::SweepTable(a) => sweep_table(cli, a),
        Command::Thermality(a) => thermality(cli, a),
        Command::SmallAngle(a) => small_angle(cli, a),
        Command::MagicAngle(a) => magic_angle(cli, a),
        Command::Bounds(a) => bounds(cli, a),
        Command::DensityOfStates(a) => dos(a),
    }
}

fn gen_graph(cli: &Cli, a: &GenGraphArgs) -> Result<()> {
    let g = match a.family {
        Family::Regular => generate_regular_graph(a.n, a.degree, cli.seed)?,
        Family::Sk => Graph::sherrington_kirkpatrick(a.n, cli.seed),
        Family::Decoupled => Graph::decoupled(a.n),
        Family::Cycle => Graph::cycle(a.n)?,
        Family::Complete => Graph::complete(a.n),
    };
    write_graph(&g, &a.output)?;
    let mut rec = Records::new(cli, "gen-graph", a)?.with_graph(Some(&a.output), &g);
    rec.emit(json!({ "written": a.output.display().to_string() }))?;
    rec.finish()
}

fn load_strings(string: &Option<String>, strings: &Option<PathBuf>) -> Result<Vec<BitString>> {
    let mut out = Vec::new();
    if let Some(s) = string {
        out.push(BitString::parse(s)?);
    }
    if let Some(path) = strings {
        out.extend(StringBatch::read(path)?.strings);
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("pass --string or --strings".into()));
    }
    Ok(out)
}

fn warmstart(cli: &Cli, a: &WarmstartArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let (strings, params) = match a.method {
        Generator::Sa => {
            let kind = parse_cost(&a.cost)?;
            let moves = if a.cluster { MoveSet::Cluster } else { MoveSet::SingleSite };
            let spec = ThermalSpec::new(a.temperature)?
                .with_updates(a.updates_per_vertex * g.num_vertices())?
                .with_moves(moves);
            let strings = metropolis_samples(&Cost::new(kind, &g), &spec, cli.seed, a.count)?;
            let params = format!(
                "cost={} temperature={} updates_per_vertex={} moves={}",
                kind.name(),
                a.temperature,
                a.updates_per_vertex,
                if a.cluster { "cluster" } else { "single-site" }
            );
            (strings, params)
        }
        Generator::Gw => {
            let config = GwConfig::default();
            let strings = (0..a.count)
                .map(|i| goemans_williamson(&g, &config, task_seed(cli.seed, i as u64)).map(|r| r.string))
                .collect::<Result<Vec<_>>>()?;
            let params = format!("sweeps={} roundings={}", config.sweeps, config.roundings);
            (strings, params)
        }
        Generator::GreedyMis => {
            let strings = (0..a.count)
                .map(|i| greedy_mis(&g, task_seed(cli.seed, i as u64)))
                .collect();
            (strings, "order=degree".to_string())
        }
    };
    let batch = StringBatch {
        graph: a.graph.display().to_string(),
        generator: format!("{:?}", a.method).to_lowercase(),
        params,
        seed: cli.seed,
        strings,
    };
    match &a.output {
        Some(path) => {
            batch.write(path)?;
            let mut rec = Records::new(cli, "warmstart", a)?.with_graph(Some(&a.graph), &g);
            rec.emit(json!({ "written": path.display().to_string(), "count": batch.strings.len() }))?;
            rec.finish()
        }
        None => {
            print!("{}", batch.format());
            Ok(())
        }
    }
}

fn qaoa(cli: &Cli, a: &QaoaArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let cost = Cost::new(parse_cost(&a.cost)?, &g);
    let mut rec = Records::new(cli, "qaoa", a)?.with_graph(Some(&a.graph), &g);
    let config = OptimizeConfig {
        restarts: a.restarts,
        ..OptimizeConfig::with_seed(cli.seed)
    };
    match a.mode {
        Mode::Standard => {
            if a.p.fract() != 0.0 || a.p < 1.0 {
                return Err(Error::InvalidArgument(format!("standard depth must be a positive integer, got {}", a.p)));
            }
            let sim = Simulator::new(cost)?;
            let angles = match &a.angles {
                Some(angles) => angles.clone(),
                None => {
                    let bounds = Bounds::qaoa(Schedule::Standard, 2 * a.p as usize);
                    optimize(
                        |x| sim.expectation(&QaoaParams::standard(x.to_vec())?, &Start::Uniform),
                        &bounds,
                        &config,
                    )?
                    .best_angles
                }
            };
            let params = QaoaParams::standard(angles)?;
            let state = sim.state(&params, &Start::Uniform)?;
            rec.emit(json!({
                "angles": params.angles(),
                "expectation": sim.expectation_of(&state)?,
                "mean": sim.mean_value(),
                "max": sim.max_value(),
                "success_probability": sim.success_probability(&state, sim.max_value())?,
            }))?;
        }
        Mode::Warm => {
            let backend = parse_backend(&a.backend)?;
            let k = warm_layers(a.p)?;
            for (i, w) in load_strings(&a.string, &a.strings)?.iter().enumerate() {
                let initial = cost.evaluate(w)? as f64;
                let result = match &a.angles {
                    Some(angles) => {
                        let value = match backend {
                            Backend::Statevector => Simulator::new(cost)?
                                .expectation(&QaoaParams::warm_start(angles.clone())?, &Start::Basis(w.clone()))?,
                            Backend::LocalSim => LocalSimulator::new(cost, k)?.expectation(w, angles)?,
                        };
                        json!({ "angles": angles, "value": value })
                    }
                    None => {
                        let r = improvement_report(&cost, w, a.p, &OptimizeConfig { seed: task_seed(cli.seed, i as u64), ..config.clone() }, backend)?;
                        json!({
                            "angles": r.best_angles,
                            "value": r.best_value,
                            "improved": r.improved,
                            "improvement": r.improvement(),
                            "evaluations": r.evaluations,
                        })
                    }
                };
                let mut result = result;
                result["string"] = json!(w.to_string());
                result["initial_cost"] = json!(initial);
                rec.emit(result)?;
            }
        }
    }
    rec.finish()
}

/// Right-aligned text table with a left label column.
pub fn format_table(title: &str, header: &[String], rows: &[(String, Vec<String>)]) -> String {
    let label_w = rows.iter().map(|r| r.0.len()).chain([1]).max().unwrap_or(1);
    let cols = header.len();
    let col_w: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.1.get(c).map(String::len))
                .chain([header[c].len()])
                .max()
                .unwrap_or(1)
        })
        .collect();
    let mut out = format!("{title}\n");
    let line = |label: &str, cells: &[String]| {
        let mut s = format!("{label:>label_w$} |");
        for (c, cell) in cells.iter().enumerate() {
            s.push_str(&format!(" {cell:>w$}", w = col_w[c]));
        }
        s.push('\n');
        s
    };
    out.push_str(&line("p", header));
    out.push_str(&format!("{}\n", "-".repeat(label_w + 2 + col_w.iter().map(|w| w + 1).sum::<usize>())));
    for (label, cells) in rows {
        out.push_str(&line(label, cells));
    }
    out
}

fn depth_label(p: f64) -> String {
    if p.fract() == 0.0 {
        format!("{p}")
    } else {
        format!("{}/2", (2.0 * p) as i64)
    }
}

fn sweep_table(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let g = match &a.graph {
        Some(path) => read_graph(path)?,
        None => generate_regular_graph(a.n, a.degree, cli.seed)?,
    };
    let cost = Cost::maxcut(&g);
    let sim = Simulator::new(cost)?;
    let mut rec = match &cli.out {
        Some(_) => Some(Records::new(cli, "sweep-table", a)?.with_graph(a.graph.as_deref(), &g)),
        None => None,
    };
    let n = g.num_vertices();
    println!(
        "MaxCut on n = {n}, m = {}: max cut {}, mean cut {}\n",
        g.num_edges(),
        sim.max_value(),
        sim.mean_value()
    );
    let header: Vec<String> = a.depths.iter().map(|&p| depth_label(p)).collect();
    for &level in &a.levels {
        let mut strings: Vec<BitString> = sim
            .values()
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == level)
            .map(|(i, _)| BitString::from_index(n, i, Convention::Spin))
            .collect();
        let total = strings.len();
        if let Some(k) = a.max_strings {
            strings.truncate(k);
        }
        let mut counts = Vec::new();
        let mut means = Vec::new();
        let mut largest = Vec::new();
        for &p in &a.depths {
            let mut improved = Vec::new();
            for (i, w) in strings.iter().enumerate() {
                let config = OptimizeConfig {
                    restarts: a.restarts,
                    ..OptimizeConfig::with_seed(task_seed(cli.seed, i as u64))
                };
                let r = improvement_report(&cost, w, p, &config, Backend::Statevector)?;
                if let Some(rec) = rec.as_mut() {
                    rec.emit(json!({
                        "level": level,
                        "p": p,
                        "string": w.to_string(),
                        "initial_cost": level,
                        "value": r.best_value,
                        "improved": r.improved,
                        "angles": r.best_angles,
                    }))?;
                }
                if r.improved {
                    improved.push(r.best_value);
                }
            }
            counts.push(improved.len().to_string());
            if improved.is_empty() {
                means.push("-".into());
                largest.push("-".into());
            } else {
                means.push(format!("{:.2}", improved.iter().sum::<f64>() / improved.len() as f64));
                largest.push(format!("{:.2}", improved.iter().copied().fold(f64::MIN, f64::max)));
            }
        }
        let title = format!(
            "Warm start at C(w) = {level} with {} of {total} strings",
            strings.len()
        );
        let rows = vec![
            ("Number of strings improved".to_string(), counts),
            ("Mean cost of improved strings".to_string(), means),
            ("Largest cost of improved strings".to_string(), largest),
        ];
        println!("{}", format_table(&title, &header, &rows));
    }
    if !a.standard_depths.is_empty() {
        let mut values = Vec::new();
        for &p in &a.standard_depths {
            let bounds = Bounds::qaoa(Schedule::Standard, 2 * p);
            let config = OptimizeConfig {
                restarts: a.restarts,
                ..OptimizeConfig::with_seed(task_seed(cli.seed, 1_000_000 + p as u64))
            };
            let r = optimize(
                |x| sim.expectation(&QaoaParams::standard(x.to_vec())?, &Start::Uniform),
                &bounds,
                &config,
            )?;
            if let Some(rec) = rec.as_mut() {
                rec.emit(json!({ "standard_p": p, "value": r.best_value, "angles": r.best_angles }))?;
            }
            values.push(format!("{:.2}", r.best_value));
        }
        let header: Vec<String> = a.standard_depths.iter().map(|p| p.to_string()).collect();
        let rows = vec![("Expected cut size".to_string(), values)];
        println!("{}", format_table("Standard QAOA", &header, &rows));
    }
    if let Some(rec) = rec {
        rec.finish()?;
    }
    Ok(())
}

fn thermality(cli: &Cli, a: &ThermalityArgs) -> Result<()> {
    if a.fit {
        let spec = ThermalSpec::new(a.temperature)?;
        let mut points = Vec::new();
        let mut csv = String::from("n,E\n");
        for (i, &n) in a.sizes.iter().enumerate() {
            let g = generate_regular_graph(n, a.degree, task_seed(cli.seed, i as u64))?;
            let strings = metropolis_samples(&Cost::maxcut(&g), &spec, task_seed(cli.seed, 1000 + i as u64), a.samples)?;
            let e = sample_deviation(&strings, &g, a.radius)?;
            csv.push_str(&format!("{n},{e}\n"));
            points.push((n as f64, e));
        }
        match &a.csv {
            Some(path) => std::fs::write(path, &csv)?,
            None => print!("{csv}"),
        }
        let fit = fit_inverse_sqrt(&points)?;
        let mut rec = match (&cli.out, &a.csv) {
            (None, None) => {
                eprintln!(
                    "E = {:.4} n^(-1/2); free slope {:.4}",
                    fit.coefficient, fit.slope
                );
                return Ok(());
            }
            _ => Records::new(cli, "thermality-fit", a)?,
        };
        rec.emit(json!({
            "points": points,
            "coefficient": fit.coefficient,
            "free_slope": fit.slope,
            "free_intercept": fit.intercept,
        }))?;
        return rec.finish();
    }
    let path = a
        .graph
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("pass --graph (or --fit)".into()))?;
    let g = read_graph(path)?;
    let cost = Cost::maxcut(&g);
    let mut rec = Records::new(cli, "thermality", a)?.with_graph(Some(path), &g);
    for w in load_strings(&a.string, &a.strings)? {
        let t = thermality_coefficient(&cost, &w, a.radius)?;
        rec.emit(json!({
            "string": w.to_string(),
            "cost": cost.evaluate(&w)?,
            "beta": t.beta,
            "epsilon": t.epsilon,
        }))?;
    }
    rec.finish()
}

fn small_angle(cli: &Cli, a: &SmallAngleArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let cost = Cost::maxcut(&g);
    let n = g.num_vertices();
    let strings = match a.level {
        Some(level) => cost
            .values(crate::problems::ENUMERATION_CAP)?
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == level)
            .map(|(i, _)| BitString::from_index(n, i, Convention::Spin))
            .collect(),
        None => load_strings(&a.string, &a.strings)?,
    };
    let mut rec = Records::new(cli, "small-angle", a)?.with_graph(Some(&a.graph), &g);
    let sim = if a.verify { Some(Simulator::new(cost)?) } else { None };
    let config = SmallBetaConfig {
        beta_max: a.beta_max,
        ..SmallBetaConfig::default()
    };
    for w in strings {
        let report = small_angle_condition(&g, &w)?;
        let mut result = json!({
            "string": w.to_string(),
            "cost": cost.evaluate(&w)?,
            "s1": report.s1,
            "s3": report.s3,
            "condition": report.condition(),
        });
        if let Some(sim) = &sim {
            let start = Start::Basis(w.clone());
            let initial = cost.evaluate(&w)? as f64;
            let best = small_beta_optimize(
                |x| sim.expectation(&QaoaParams::warm_start(x.to_vec())?, &start),
                &config,
            )?;
            let improved = best - initial > IMPROVEMENT_TOL;
            result["small_beta_value"] = json!(best);
            result["improved"] = json!(improved);
            result["agrees"] = json!(improved == report.condition());
        }
        rec.emit(result)?;
    }
    rec.finish()
}

fn magic_angle(cli: &Cli, a: &MagicAngleArgs) -> Result<()> {
    let g = match &a.graph {
        Some(path) => read_graph(path)?,
        None => Graph::sherrington_kirkpatrick(a.n, cli.seed),
    };
    let n = g.num_vertices();
    let strings = match &a.string {
        Some(s) => vec![BitString::parse(s)?],
        None => (0..a.count)
            .map(|i| {
                let mut rng = stream_rng(cli.seed, i as u64);
                BitString::spins((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let cost = Cost::sk(&g);
    let mut rec = Records::new(cli, "magic-angle", a)?.with_graph(a.graph.as_deref(), &g);
    for w in strings {
        let r = magic_angle_state(&g, &w)?;
        let support: Vec<Value> = r
            .support
            .iter()
            .map(|(s, p)| json!({ "string": s.to_string(), "probability": p, "cost": cost.evaluate(s).ok() }))
            .collect();
        rec.emit(json!({
            "string": w.to_string(),
            "cost": cost.evaluate(&w)?,
            "predicted": r.predicted.to_string(),
            "predicted_cost": cost.evaluate(&r.predicted)?,
            "support": support,
            "matches": r.matches_prediction(1e-9),
        }))?;
    }
    rec.finish()
}

fn bounds(cli: &Cli, a: &BoundsArgs) -> Result<()> {
    let graph = a.graph.as_ref().map(read_graph).transpose()?;
    let mut rec = Records::new(cli, "bounds", a)?;
    if let (Some(g), Some(path)) = (&graph, &a.graph) {
        rec = rec.with_graph(Some(path), g);
    }
    match a.kind {
        BoundKind::Compression => {
            let inputs = match (&graph, a.d0, a.d1) {
                (_, Some(d0), Some(d1)) => CompressionInputs {
                    d0,
                    d1,
                    p: a.p,
                    n: a.n.ok_or_else(|| Error::InvalidArgument("pass -n with --d0/--d1".into()))?,
                    delta: a.delta.unwrap_or(1.0),
                },
                (Some(g), _, _) => {
                    let window = a
                        .window
                        .as_ref()
                        .filter(|w| w.len() == 2)
                        .ok_or_else(|| Error::InvalidArgument("pass --window C0,C0'".into()))?;
                    let target = a.target.ok_or_else(|| Error::InvalidArgument("pass --target".into()))?;
                    let dos = density_of_states(&Cost::new(parse_cost(&a.cost)?, g))?;
                    CompressionInputs::from_dos(
                        &dos,
                        (window[0], window[1]),
                        target,
                        a.p,
                        a.n.unwrap_or(g.num_vertices()),
                        a.delta.unwrap_or(1.0),
                    )?
                }
                _ => return Err(Error::InvalidArgument("pass --graph or both --d0 and --d1".into())),
            };
            let eps = compression_epsilon(&inputs)?;
            // Without an explicit Δ the count bound is taken at Δ = ε.
            let delta = a.delta.unwrap_or(eps.value.clamp(f64::MIN_POSITIVE, 1.0));
            let count = improvable_count(&CompressionInputs { delta, ..inputs })?;
            rec.emit(json!({
                "d0": inputs.d0,
                "d1": inputs.d1,
                "p": inputs.p,
                "n": inputs.n,
                "epsilon": eps.value,
                "epsilon_vacuous": eps.vacuous,
                "delta": delta,
                "count_bound": count.value,
                "count_vacuous": count.vacuous,
            }))?;
        }
        BoundKind::Thermal => {
            let g = graph
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("the thermal bound needs --graph".into()))?;
            let cost = Cost::maxcut(g);
            let m = g.num_edges() as f64;
            for (i, w) in load_strings(&a.string, &a.strings)?.iter().enumerate() {
                let b = thermal_bound(&cost, w, a.radius)?;
                let mut result = json!({
                    "string": w.to_string(),
                    "cut_fraction": b.cut_fraction,
                    "beta": b.beta,
                    "epsilon": b.epsilon,
                    "delta": b.delta,
                    "bound": b.value(),
                });
                if a.optimize {
                    let config = OptimizeConfig {
                        restarts: a.restarts,
                        ..OptimizeConfig::with_seed(task_seed(cli.seed, i as u64))
                    };
                    let p = a.radius as f64 + 0.5;
                    let r = improvement_report(&cost, w, p, &config, Backend::LocalSim)?;
                    result["optimized_fraction"] = json!(r.best_value / m);
                    result["violated"] = json!(r.best_value / m > b.value() + 1e-9);
                }
                rec.emit(result)?;
            }
        }
    }
    rec.finish()
}

fn dos(a: &DosArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let counts: BTreeMap<i64, u64> = density_of_states(&Cost::new(parse_cost(&a.cost)?, &g))?;
    let mut out = io::stdout().lock();
    writeln!(out, "cost,count")?;
    for (c, k) in counts {
        writeln!(out, "{c},{k}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles_parse() {
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert!(parse_angle("pix").is_err());
        assert!(parse_angle("abc").is_err());
    }

    #[test]
    fn table_layout() {
        let t = format_table(
            "T",
            &["3/2".into(), "5/2".into()],
            &[("Number".into(), vec!["0".into(), "12".into()])],
        );
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[1], "     p | 3/2 5/2");
        assert_eq!(lines[3], "Number |   0  12");
    }

    #[test]
    fn hash_ignores_file_layout() {
        let g = Graph::cycle(5).unwrap();
        let h = Graph::new(5, [(1, 0), (2, 1), (3, 2), (4, 3), (4, 0)]).unwrap();
        assert_eq!(graph_hash(&g), graph_hash(&h));
        assert_eq!(graph_hash(&g).len(), 64);
    }

    #[test]
    fn task_seeds_differ() {
        assert_ne!(task_seed(1, 0), task_seed(1, 1));
        assert_eq!(task_seed(1, 2), task_seed(1, 2));
    }
}
