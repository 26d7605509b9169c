//! Run configuration: defaults, then the TOML file, then command-line flags.

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer};
use spinhex::arch::{ArchitectureParams, CodeVariant, MemoryBasis};
use spinhex::noise::{Bias, IdleDuringSwaps, NoiseParams};
use std::path::{Path, PathBuf};

pub const WORKERS_ENV: &str = "SPINHEX_WORKERS";

/// Every key is optional here; unknown keys are rejected so that a typo in
/// a noise knob cannot silently fall back to its default.
#[derive(Debug, Default, Clone, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// Flat TOML file with any of the keys below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nx: Option<u32>,
    #[arg(long)]
    pub ny: Option<u32>,
    /// Code distances, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub d: Option<Vec<u32>>,
    #[arg(long)]
    pub variant: Option<CodeVariant>,
    /// Memory bases, comma separated (H/V for xzzx, X/Z for css).
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub basis: Option<Vec<MemoryBasis>>,
    /// Physical two-qubit error rates, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub p: Option<Vec<f64>>,
    /// Dephasing bias, a positive number or `inf`.
    #[arg(long)]
    #[serde(default, deserialize_with = "bias")]
    pub eta: Option<Bias>,
    #[arg(long)]
    pub xi_reset: Option<f64>,
    /// `per_step` or `single`.
    #[arg(long)]
    pub idle_during_swaps: Option<IdleDuringSwaps>,
    #[arg(long)]
    pub swap_rate_override: Option<f64>,
    /// Rounds of syndrome extraction; defaults to 3d.
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Shot ceiling per point.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Failure ceiling per point.
    #[arg(long)]
    pub failures: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Fully resolved configuration, echoed into every output file.
#[derive(Debug, Clone)]
pub struct Config {
    pub nx: u32,
    pub ny: u32,
    pub d: Vec<u32>,
    pub variant: CodeVariant,
    pub basis: Vec<MemoryBasis>,
    pub p: Vec<f64>,
    pub eta: Bias,
    pub xi_reset: f64,
    pub idle_during_swaps: IdleDuringSwaps,
    pub swap_rate_override: Option<f64>,
    pub rounds: Option<u32>,
    pub shots: u64,
    pub failures: Option<u64>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub workers: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(de: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(Some(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    }))
}

/// `eta = 100` and `eta = "inf"` are both accepted.
fn bias<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Bias>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    let b = match Raw::deserialize(de)? {
        Raw::Num(x) => Bias::Finite(x),
        Raw::Text(s) => s.parse().map_err(D::Error::custom)?,
    };
    b.validate().map_err(D::Error::custom)?;
    Ok(Some(b))
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl ConfigArgs {
    fn load(path: &Path) -> Result<ConfigArgs> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn resolve(&self) -> Result<Config> {
        let mut a = match &self.config {
            Some(path) => ConfigArgs::load(path)?,
            None => ConfigArgs::default(),
        };
        let flags = self.clone();
        overlay!(a, flags, nx, ny, d, variant, basis, p, eta, xi_reset, idle_during_swaps, swap_rate_override, rounds, shots, failures, seed, output, workers);

        let variant = a.variant.unwrap_or(CodeVariant::Xzzx);
        let default_basis = match variant {
            CodeVariant::Xzzx => MemoryBasis::H,
            CodeVariant::Css => MemoryBasis::Z,
        };
        let workers = match a.workers {
            Some(w) => w,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) => v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v} is not a worker count"))?,
                Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        let c = Config {
            nx: a.nx.unwrap_or(2),
            ny: a.ny.unwrap_or(3),
            d: a.d.unwrap_or_else(|| vec![3]),
            variant,
            basis: a.basis.unwrap_or_else(|| vec![default_basis]),
            p: a.p.unwrap_or_else(|| vec![0.001]),
            eta: a.eta.unwrap_or(Bias::Finite(100.0)),
            xi_reset: a.xi_reset.unwrap_or(NoiseParams::DEFAULT_XI_RESET),
            idle_during_swaps: a.idle_during_swaps.unwrap_or(IdleDuringSwaps::PerStep),
            swap_rate_override: a.swap_rate_override,
            rounds: a.rounds,
            shots: a.shots.unwrap_or(100_000),
            failures: a.failures,
            seed: a.seed.unwrap_or(1),
            output: a.output,
            workers: workers.max(1),
        };
        c.validate()?;
        Ok(c)
    }
}

impl Config {
    fn validate(&self) -> Result<()> {
        for (name, empty) in [("d", self.d.is_empty()), ("basis", self.basis.is_empty()), ("p", self.p.is_empty())] {
            if empty {
                bail!("`{name}` must list at least one value");
            }
        }
        if self.shots == 0 {
            bail!("`shots` must be at least 1");
        }
        // Keeps the echoed header loadable as a config file.
        if self.seed > i64::MAX as u64 {
            bail!("`seed` must be at most {} (TOML integer range)", i64::MAX);
        }
        if self.rounds == Some(0) {
            bail!("`rounds` must be at least 1");
        }
        for &d in &self.d {
            for &b in &self.basis {
                self.arch(d, b)?;
            }
        }
        for &p in &self.p {
            self.noise(p)?;
        }
        Ok(())
    }

    pub fn arch(&self, d: u32, basis: MemoryBasis) -> Result<ArchitectureParams> {
        Ok(ArchitectureParams::new(self.nx, self.ny, d, self.variant, basis)?)
    }

    pub fn noise(&self, p: f64) -> Result<NoiseParams> {
        let n = NoiseParams {
            p,
            eta: self.eta,
            xi_reset: self.xi_reset,
            idle_during_swaps: self.idle_during_swaps,
            swap_rate_override: self.swap_rate_override,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn rounds_for(&self, d: u32) -> u32 {
        self.rounds.unwrap_or(3 * d)
    }

    /// The single point of a one-point configuration.
    pub fn single(&self) -> Result<(ArchitectureParams, NoiseParams, u32)> {
        if self.d.len() != 1 || self.basis.len() != 1 || self.p.len() != 1 {
            bail!("this command takes exactly one value each of `d`, `basis` and `p`");
        }
        let d = self.d[0];
        Ok((self.arch(d, self.basis[0])?, self.noise(self.p[0])?, self.rounds_for(d)))
    }

    /// The resolved configuration as TOML lines, for header comments.
    pub fn header(&self) -> String {
        let list = |v: Vec<String>| format!("[{}]", v.join(", "));
        let mut rows = vec![
            format!("nx = {}", self.nx),
            format!("ny = {}", self.ny),
            format!("d = {}", list(self.d.iter().map(u32::to_string).collect())),
            format!("variant = \"{}\"", self.variant),
            format!("basis = {}", list(self.basis.iter().map(|b| format!("\"{b}\"")).collect())),
            format!("p = {}", list(self.p.iter().map(|p| format!("{p:?}")).collect())),
            format!("eta = \"{}\"", self.eta),
            format!("xi_reset = {:?}", self.xi_reset),
            format!("idle_during_swaps = \"{}\"", match self.idle_during_swaps {
                IdleDuringSwaps::PerStep => "per_step",
                IdleDuringSwaps::Single => "single",
            }),
        ];
        if let Some(s) = self.swap_rate_override {
            rows.push(format!("swap_rate_override = {s:?}"));
        }
        if let Some(r) = self.rounds {
            rows.push(format!("rounds = {r}"));
        }
        rows.push(format!("shots = {}", self.shots));
        if let Some(f) = self.failures {
            rows.push(format!("failures = {f}"));
        }
        rows.push(format!("seed = {}", self.seed));
        rows.join("\n")
    }
}
