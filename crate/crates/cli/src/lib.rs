//! `qfb`: build, verify and benchmark the functionality of quantum circuits
//! with decision diagrams.

pub mod record;
pub mod source;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qfb_core::oracle::dense_product;
use qfb_core::package::DENSE_LIMIT;
use qfb_core::{
    build_pairwise, build_repeated, build_sequential, BuildOptions, BuildStats, Edge, Error,
    Package, PackageConfig,
};

pub use record::{BenchmarkRecord, Status};
pub use source::{GenOptions, Instance, Source, Workload};

/// Largest qubit count for which `verify` also compares against the dense
/// product of the gate matrices.
pub const VERIFY_DENSE_LIMIT: usize = 8;
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Sequential,
    Pairwise,
    Repeated,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Sequential => "sequential",
            Strategy::Pairwise => "pairwise",
            Strategy::Repeated => "repeated",
        }
    }

    /// Strategies that can build the given workload.
    pub fn applicable(w: &Workload) -> Vec<Strategy> {
        match w {
            Workload::Plain(_) => vec![Strategy::Sequential, Strategy::Pairwise],
            Workload::Repeated(_) => {
                vec![Strategy::Repeated, Strategy::Sequential, Strategy::Pairwise]
            }
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qfb",
    version,
    about = "Construct the functionality of quantum circuits as decision diagrams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build one circuit and print its statistics as JSON.
    Build(BuildArgs),
    /// Build with every applicable strategy and check the results agree.
    Verify(VerifyArgs),
    /// Run a benchmark sweep.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    /// Complex-table tolerance.
    #[arg(long, default_value_t = qfb_core::numerics::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// log2 of the compute-table slot count.
    #[arg(long = "ct-size", default_value_t = 16)]
    pub ct_size: u32,
    /// Abort a run once the unique table holds more nodes than this.
    #[arg(long)]
    pub max_nodes: Option<usize>,
}

impl Default for EngineArgs {
    fn default() -> Self {
        EngineArgs {
            tolerance: qfb_core::numerics::DEFAULT_TOLERANCE,
            ct_size: 16,
            max_nodes: None,
        }
    }
}

impl EngineArgs {
    pub fn config(&self) -> Result<PackageConfig> {
        ensure!(
            self.tolerance.is_finite() && self.tolerance > 0.0 && self.tolerance < 1e-3,
            "tolerance must lie in (0, 1e-3), got {}",
            self.tolerance
        );
        ensure!(
            (1..=30).contains(&self.ct_size),
            "--ct-size must lie in 1..=30, got {}",
            self.ct_size
        );
        Ok(PackageConfig {
            tolerance: self.tolerance,
            compute_table_bits: self.ct_size,
            max_nodes: self.max_nodes,
            ..PackageConfig::default()
        })
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct GenArgs {
    /// Append the final qubit-reversal swaps to QFT circuits.
    #[arg(long)]
    pub with_swaps: bool,
    /// Grover iteration count (default ⌊√N⌋).
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Marked Grover element, most significant bit first (default all zeros).
    #[arg(long)]
    pub marked: Option<String>,
}

impl GenArgs {
    fn options(&self) -> GenOptions {
        GenOptions {
            with_swaps: self.with_swaps,
            iterations: self.iterations,
            marked: self.marked.clone(),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    /// QASM file, `qft:<n>`, `grover:<d>[:<marked>]` or `random:<n>:<m>[:<seed>]`.
    pub source: Source,
    #[arg(short, long, value_enum, default_value_t = Strategy::Pairwise)]
    pub strategy: Strategy,
    /// Seconds before the build is abandoned.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Print the dense matrix (at most 12 qubits).
    #[arg(long)]
    pub dump_matrix: bool,
    /// Print the node list of the final diagram.
    #[arg(long)]
    pub dump_dd: bool,
    /// Write the JSON record here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub gen: GenArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub source: Source,
    #[arg(long)]
    pub timeout: Option<f64>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub gen: GenArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Qft,
    Grover,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Smallest generator parameter (qubits for qft, data qubits for grover).
    #[arg(long)]
    pub min: usize,
    /// Largest generator parameter.
    #[arg(long)]
    pub max: usize,
    /// Comma-separated list; defaults to every strategy the suite supports.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub strategies: Vec<Strategy>,
    /// Per-run timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// CSV file, or JSON when the name ends in `.json`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Append the final swaps to every QFT instance.
    #[arg(long)]
    pub with_swaps: bool,
    /// Grover iteration count for every instance (default ⌊√N⌋).
    #[arg(long)]
    pub iterations: Option<usize>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

/// A finished (or abandoned) construction.
pub struct Built {
    pub record: BenchmarkRecord,
    /// Root edge, holding one reference; absent unless the run finished.
    pub root: Option<Edge>,
    pub stats: Option<BuildStats>,
}

fn timeout_duration(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| Duration::try_from_secs_f64(s).with_context(|| format!("invalid timeout {s}")))
        .transpose()
}

/// Builds `inst` with `strategy` in `pkg`. Timeouts and node-limit
/// violations produce a record with the matching status; other failures are
/// errors.
pub fn construct(
    pkg: &mut Package,
    inst: &Instance,
    strategy: Strategy,
    timeout: Option<Duration>,
) -> Result<Built> {
    let opts = match timeout {
        Some(t) => BuildOptions::with_timeout(t),
        None => BuildOptions::default(),
    };
    let start = Instant::now();
    let result = match (&inst.workload, strategy) {
        (Workload::Plain(_), Strategy::Repeated) => bail!(
            "the repeated strategy needs a repeated building block; '{}' has none",
            inst.benchmark
        ),
        (Workload::Repeated(r), Strategy::Repeated) => build_repeated(pkg, r, &opts),
        (Workload::Plain(c), Strategy::Sequential) => build_sequential(pkg, c, &opts),
        (Workload::Plain(c), Strategy::Pairwise) => build_pairwise(pkg, c, &opts),
        (Workload::Repeated(r), Strategy::Sequential) => build_sequential(pkg, &r.unroll(), &opts),
        (Workload::Repeated(r), Strategy::Pairwise) => build_pairwise(pkg, &r.unroll(), &opts),
    };
    let mut record = BenchmarkRecord {
        benchmark: inst.benchmark.clone(),
        n: inst.n(),
        m: inst.m(),
        strategy: strategy.name().to_string(),
        wall_time: start.elapsed().as_secs_f64(),
        multiplications: None,
        peak_nodes: None,
        final_nodes: None,
        unique_table_nodes_allocated: None,
        status: Status::Ok,
    };
    match result {
        Ok((root, stats)) => {
            record.wall_time = stats.wall_time.as_secs_f64();
            record.multiplications = Some(stats.multiplications);
            record.peak_nodes = Some(stats.peak_nodes);
            record.final_nodes = Some(stats.final_nodes);
            record.unique_table_nodes_allocated = Some(pkg.stats().nodes_allocated);
            Ok(Built {
                record,
                root: Some(root),
                stats: Some(stats),
            })
        }
        Err(Error::Timeout) => {
            record.status = Status::Timeout;
            Ok(Built {
                record,
                root: None,
                stats: None,
            })
        }
        Err(Error::NodeLimit(_)) => {
            record.status = Status::MemoryLimit;
            Ok(Built {
                record,
                root: None,
                stats: None,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Runs a parsed command line. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Build(a) => cmd_build(&a, out),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::Bench(a) => cmd_bench(&a, out, err),
    }
}

pub fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> Result<u8> {
    let inst = a.source.load(&a.gen.options())?;
    let mut pkg = Package::new(a.engine.config()?);
    if a.dump_matrix && inst.n() > DENSE_LIMIT {
        bail!(
            "--dump-matrix supports at most {DENSE_LIMIT} qubits, circuit has {}",
            inst.n()
        );
    }
    let built = construct(&mut pkg, &inst, a.strategy, timeout_duration(a.timeout)?)?;
    if let Some(root) = built.root {
        if a.dump_dd {
            write!(out, "{}", pkg.dump(root))?;
        }
        if a.dump_matrix {
            let m = pkg.to_matrix(root, inst.n())?;
            for r in 0..m.dim() {
                let row: Vec<String> = (0..m.dim())
                    .map(|c| {
                        let v = m.get(r, c);
                        format!("{:.6}{:+.6}i", v.re, v.im)
                    })
                    .collect();
                writeln!(out, "{}", row.join(" "))?;
            }
        }
    }
    let json = serde_json::to_string(&built.record)?;
    match &a.output {
        Some(path) => std::fs::write(path, format!("{json}\n"))
            .with_context(|| format!("cannot write '{}'", path.display()))?,
        None => writeln!(out, "{json}")?,
    }
    match built.record.status {
        Status::Ok => Ok(0),
        Status::Timeout => bail!("build did not finish within the timeout"),
        Status::MemoryLimit => bail!("build exceeded the node limit"),
    }
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let inst = a.source.load(&a.gen.options())?;
    let mut pkg = Package::new(a.engine.config()?);
    let timeout = timeout_duration(a.timeout)?;
    let mut roots: Vec<(Strategy, Edge)> = Vec::new();
    for s in Strategy::applicable(&inst.workload) {
        let built = construct(&mut pkg, &inst, s, timeout)?;
        let Some(root) = built.root else {
            bail!("{} build stopped early: {}", s.name(), built.record.status);
        };
        roots.push((s, root));
    }
    let (first, reference) = roots[0];
    for &(s, root) in &roots[1..] {
        if root != reference {
            writeln!(err, "mismatch: {} vs {}", first.name(), s.name())?;
            return Ok(1);
        }
        writeln!(out, "{} == {}: identical root edge", first.name(), s.name())?;
    }
    let n = inst.n();
    if n <= VERIFY_DENSE_LIMIT {
        let dense = dense_product(&inst.unrolled())?;
        let diff = pkg.to_matrix(reference, n)?.max_abs_diff(&dense);
        if diff.is_nan() || diff > VERIFY_TOLERANCE {
            writeln!(
                err,
                "mismatch: {} vs dense oracle (max |diff| {diff:e})",
                first.name()
            )?;
            return Ok(1);
        }
        writeln!(out, "{} == dense oracle: max |diff| {diff:e}", first.name())?;
    }
    writeln!(out, "ok")?;
    Ok(0)
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    ensure!(a.min <= a.max, "--min {} exceeds --max {}", a.min, a.max);
    let strategies = if a.strategies.is_empty() {
        match a.suite {
            Suite::Qft => vec![Strategy::Sequential, Strategy::Pairwise],
            Suite::Grover => vec![Strategy::Sequential, Strategy::Pairwise, Strategy::Repeated],
        }
    } else {
        a.strategies.clone()
    };
    if a.suite == Suite::Qft && strategies.contains(&Strategy::Repeated) {
        bail!("the repeated strategy does not apply to the qft suite");
    }
    let config = a.engine.config()?;
    let timeout = timeout_duration(Some(a.timeout))?;
    // open the output first so that an unwritable path fails before the sweep
    let file = a
        .output
        .as_ref()
        .map(|p| File::create(p).with_context(|| format!("cannot write '{}'", p.display())))
        .transpose()?;

    let gen = GenOptions {
        with_swaps: a.with_swaps,
        iterations: a.iterations,
        marked: None,
    };
    let mut records = Vec::new();
    for p in a.min..=a.max {
        let source = match a.suite {
            Suite::Qft => Source::Qft(p),
            Suite::Grover => Source::Grover { d: p, marked: None },
        };
        let inst = source.load(&gen)?;
        for &s in &strategies {
            let mut pkg = Package::new(config.clone());
            let built = construct(&mut pkg, &inst, s, timeout)?;
            writeln!(
                err,
                "{} n={} {}: {} ({:.3} s)",
                inst.benchmark,
                inst.n(),
                s.name(),
                built.record.status,
                built.record.wall_time
            )?;
            records.push(built.record);
        }
    }
    record::write_table(&records, &mut *out)?;
    if let (Some(file), Some(path)) = (file, &a.output) {
        let mut w = BufWriter::new(file);
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            serde_json::to_writer_pretty(&mut w, &records)?;
            writeln!(w)?;
        } else {
            record::write_csv(&records, &mut w)?;
        }
        w.flush()?;
    }
    Ok(0)
}
