mod config;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use config::{Config, ConfigArgs};
use spinhex::analysis::{fit_and_project, read_csv, threshold_estimate, write_csv, CurvePoint, CurveRow, QUOP_TARGETS};
use spinhex::arch::{chip_area, footprint, ArchitectureParams, CodeVariant, MemoryBasis};
use spinhex::circuit::build_memory_experiment;
use spinhex::decoder::Decoder;
use spinhex::dem::{build_dem, DetectorErrorModel};
use spinhex::experiment::MemoryExperiment;
use spinhex::frame::FrameSampler;
use spinhex::io;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "spinhex", version, about = "SpinHex surface-code memory simulation and resource estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the noisy memory circuit.
    Build(ConfigArgs),
    /// Print the decomposed detector error model.
    Dem(ConfigArgs),
    /// Sample detector and observable bits.
    Sample {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value = "binary")]
        format: SampleFormat,
    },
    /// Decode a sample file against a DEM file and count logical failures.
    Decode {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        dem: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sweep every (basis, d, p) point and write a CSV of logical error rates.
    Memory(ConfigArgs),
    /// Estimate the threshold of each curve family in a CSV.
    Threshold {
        #[arg(long)]
        input: PathBuf,
    },
    /// Fit ln pL against d and project the distances for the Quop targets.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Only use rows at this physical error rate.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Qubit, coupler and area counts for one logical qubit.
    Footprint {
        #[arg(long, default_value_t = 2)]
        nx: u32,
        #[arg(long, default_value_t = 3)]
        ny: u32,
        #[arg(long)]
        d: u32,
        /// Also report the chip area of this many logical qubits.
        #[arg(long)]
        logical: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        overhead: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Binary,
    Text,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Build(args) => {
            let cfg = args.resolve()?;
            let (arch, noise, rounds) = cfg.single()?;
            let c = build_memory_experiment(&arch, &noise, rounds)?;
            emit(cfg.output.as_deref(), with_header(&cfg, &c.to_text()).as_bytes())
        }
        Command::Dem(args) => {
            let cfg = args.resolve()?;
            let (arch, noise, rounds) = cfg.single()?;
            let dem = build_dem(&build_memory_experiment(&arch, &noise, rounds)?)?;
            emit(cfg.output.as_deref(), with_header(&cfg, &dem.to_text()).as_bytes())
        }
        Command::Sample { cfg, format } => {
            let cfg = cfg.resolve()?;
            let (arch, noise, rounds) = cfg.single()?;
            let sampler = FrameSampler::new(&build_memory_experiment(&arch, &noise, rounds)?)?;
            let s = sampler.sample_with_workers(cfg.shots, cfg.seed, cfg.workers)?;
            match format {
                SampleFormat::Binary => {
                    let Some(path) = cfg.output.as_deref() else {
                        bail!("binary samples need --output");
                    };
                    emit(Some(path), &io::write_binary(&s, &cfg.header()))
                }
                SampleFormat::Text => emit(cfg.output.as_deref(), io::write_text(&s, &cfg.header()).as_bytes()),
            }
        }
        Command::Decode { samples, dem, output } => {
            let bytes = std::fs::read(&samples).with_context(|| format!("reading {}", samples.display()))?;
            let (s, _) = if bytes.starts_with(io::MAGIC) {
                io::read_binary(&bytes)?
            } else {
                io::read_text(std::str::from_utf8(&bytes).context("sample file is neither binary nor text")?)?
            };
            let dem = DetectorErrorModel::from_text(&read_text(&dem)?)?;
            let failures = Decoder::from_dem(&dem)?.logical_error_count(&s)?;
            emit(output.as_deref(), format!("shots = {}\nfailures = {}\n", s.shots, failures).as_bytes())
        }
        Command::Memory(args) => memory(&args.resolve()?),
        Command::Threshold { input } => threshold(&read_csv(&read_text(&input)?)?),
        Command::Fit { input, p } => fit(&read_csv(&read_text(&input)?)?, p),
        Command::Footprint { nx, ny, d, logical, overhead, json } => {
            let arch = ArchitectureParams::xzzx(nx, ny, d)?;
            let report = footprint(&arch)?;
            let area = logical.map(|n| chip_area(&arch, n, overhead)).transpose()?;
            let out = if json {
                let mut v = serde_json::to_value(&report)?;
                if let Some(a) = area {
                    v["chip_area_cm2"] = serde_json::json!(a);
                }
                serde_json::to_string_pretty(&v)? + "\n"
            } else {
                let mut t = report.to_text();
                if let Some(a) = area {
                    writeln!(t, "chip_area_cm2 = {a:.4}")?;
                }
                t
            };
            emit(None, out.as_bytes())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(bytes)?),
    }
}

fn with_header(cfg: &Config, body: &str) -> String {
    let mut s: String = cfg.header().lines().map(|l| format!("# {l}\n")).collect();
    s.push_str(body);
    s
}

/// Every point uses the configured seed, so a single row is reproduced by
/// rerunning with that row's d, basis and p alone.
fn memory(cfg: &Config) -> Result<()> {
    let mut rows = Vec::new();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let failures = cfg.failures.unwrap_or(u64::MAX);
    for &basis in &cfg.basis {
        for &d in &cfg.d {
            let rounds = cfg.rounds_for(d);
            for &p in &cfg.p {
                let e = MemoryExperiment::new(&cfg.arch(d, basis)?, &cfg.noise(p)?, rounds)?;
                let r = pool.install(|| e.run(cfg.shots, failures, cfg.seed))?;
                let pt = CurvePoint::from_counts(p, d, rounds, r.shots, r.failures)?;
                eprintln!("{} {basis} d={d} p={p} shots={} failures={}", cfg.variant, r.shots, r.failures);
                rows.push(CurveRow {
                    variant: cfg.variant,
                    basis,
                    nx: cfg.nx,
                    ny: cfg.ny,
                    d,
                    p,
                    eta: cfg.eta,
                    rounds,
                    shots: r.shots,
                    failures: r.failures,
                    pl_round: pt.pl_round,
                    ci_low: pt.ci_low,
                    ci_high: pt.ci_high,
                });
            }
        }
    }
    let csv = write_csv(&rows, &[cfg.header()])?;
    emit(cfg.output.as_deref(), csv.as_bytes())
}

type Family = (CodeVariant, MemoryBasis, u32, u32, String);

fn families(rows: &[CurveRow]) -> BTreeMap<Family, Vec<&CurveRow>> {
    let mut m: BTreeMap<Family, Vec<&CurveRow>> = BTreeMap::new();
    for r in rows {
        m.entry((r.variant, r.basis, r.nx, r.ny, r.eta.to_string())).or_default().push(r);
    }
    m
}

fn threshold(rows: &[CurveRow]) -> Result<()> {
    let mut out = String::new();
    for ((variant, basis, nx, ny, eta), group) in families(rows) {
        let points: Vec<CurvePoint> = group.iter().map(|r| r.point()).collect();
        write!(out, "{variant} {basis} nx={nx} ny={ny} eta={eta}: ")?;
        match threshold_estimate(&points) {
            Ok(t) => {
                writeln!(out, "p_th = {:.5} +- {:.5}", t.p_th, t.uncertainty)?;
                for c in &t.crossings {
                    writeln!(out, "  d={}/{}: {:.5} [{:.5}, {:.5}]", c.d_low, c.d_high, c.p, c.p_min, c.p_max)?;
                }
            }
            Err(e) => writeln!(out, "no estimate ({e})")?,
        }
    }
    emit(None, out.as_bytes())
}

fn fit(rows: &[CurveRow], p: Option<f64>) -> Result<()> {
    let targets: Vec<f64> = QUOP_TARGETS.iter().map(|&(_, t)| t).collect();
    let mut out = String::new();
    for ((variant, basis, nx, ny, eta), group) in families(rows) {
        let mut by_p: BTreeMap<u64, Vec<(u32, f64)>> = BTreeMap::new();
        for r in group.iter().filter(|r| p.is_none_or(|p| r.p == p) && r.failures > 0) {
            by_p.entry(r.p.to_bits()).or_default().push((r.d, r.pl_round));
        }
        for (bits, pts) in by_p {
            write!(out, "{variant} {basis} nx={nx} ny={ny} eta={eta} p={}: ", f64::from_bits(bits))?;
            match fit_and_project(&pts, &targets) {
                Ok((f, ds)) => {
                    writeln!(out, "ln pL = {:.4} + {:.4} d", f.intercept, f.slope)?;
                    for ((name, _), d) in QUOP_TARGETS.iter().zip(ds) {
                        writeln!(out, "  {name}: d = {d}")?;
                    }
                }
                Err(e) => writeln!(out, "no fit ({e})")?,
            }
        }
    }
    emit(None, out.as_bytes())
}
