//! Memory-experiment points: sample, decode and count logical failures.
//!
//! Shots are processed in fixed chunks of [`CHUNK_SHOTS`]; chunks run in
//! parallel in groups of [`CHUNK_GROUP`] and are tallied in order. A point
//! stops at the first chunk boundary where the shot or failure ceiling is
//! reached, so counts never depend on the worker count.

use crate::arch::ArchitectureParams;
use crate::circuit::{build_memory_experiment, Circuit, CircuitError};
use crate::decoder::{DecodeError, Decoder};
use crate::dem::{build_dem, DemError, DetectorErrorModel};
use crate::frame::{FrameSampler, SampleError};
use crate::noise::NoiseParams;
use rayon::prelude::*;
use thiserror::Error;

pub const CHUNK_SHOTS: u64 = 1024;
pub const CHUNK_GROUP: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Dem(#[from] DemError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("shot ceiling must be at least 1")]
    NoShots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointResult {
    pub shots: u64,
    pub failures: u64,
}

/// Everything needed to run one memory configuration.
pub struct MemoryExperiment {
    pub circuit: Circuit,
    pub dem: DetectorErrorModel,
    pub sampler: FrameSampler,
    pub decoder: Decoder,
}

impl MemoryExperiment {
    pub fn new(arch: &ArchitectureParams, noise: &NoiseParams, rounds: u32) -> Result<Self, ExperimentError> {
        let circuit = build_memory_experiment(arch, noise, rounds)?;
        Self::from_circuit(circuit)
    }

    pub fn from_circuit(circuit: Circuit) -> Result<Self, ExperimentError> {
        let sampler = FrameSampler::new(&circuit)?;
        let dem = build_dem(&circuit)?;
        let decoder = Decoder::from_dem(&dem)?;
        Ok(MemoryExperiment { circuit, dem, sampler, decoder })
    }

    fn chunk_failures(&self, chunk: u64, max_shots: u64, seed: u64) -> Result<(u64, u64), ExperimentError> {
        let first = chunk * CHUNK_SHOTS;
        let n = CHUNK_SHOTS.min(max_shots - first);
        let samples = self.sampler.sample_range(first, n as usize, seed);
        let mut failures = 0;
        for s in 0..n as usize {
            let flagged: Vec<u32> = samples.detectors.ones(s).collect();
            let predicted = self.decoder.decode(&flagged)?;
            let actual = samples.observables.row(s).first().copied().unwrap_or(0);
            failures += (predicted != actual) as u64;
        }
        Ok((n, failures))
    }

    /// Run on the current rayon pool until `max_shots` shots or
    /// `max_failures` failures, whichever comes first.
    pub fn run(&self, max_shots: u64, max_failures: u64, seed: u64) -> Result<PointResult, ExperimentError> {
        if max_shots == 0 {
            return Err(ExperimentError::NoShots);
        }
        let chunks = max_shots.div_ceil(CHUNK_SHOTS);
        let mut total = PointResult { shots: 0, failures: 0 };
        let mut next = 0;
        while next < chunks {
            let end = (next + CHUNK_GROUP).min(chunks);
            let results: Vec<Result<(u64, u64), ExperimentError>> =
                (next..end).into_par_iter().map(|c| self.chunk_failures(c, max_shots, seed)).collect();
            for r in results {
                let (n, f) = r?;
                total.shots += n;
                total.failures += f;
                if total.failures >= max_failures {
                    return Ok(total);
                }
            }
            next = end;
        }
        Ok(total)
    }

    /// [`MemoryExperiment::run`] on a dedicated pool of `workers` threads.
    pub fn run_with_workers(&self, max_shots: u64, max_failures: u64, seed: u64, workers: usize) -> Result<PointResult, ExperimentError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| SampleError::Pool(e.to_string()))?;
        pool.install(|| self.run(max_shots, max_failures, seed))
    }
}
