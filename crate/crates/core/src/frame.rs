//! Bit-packed Pauli-frame sampling.
//!
//! Shots run in lanes of a 64-bit word. Each shot draws its errors from its
//! own generator, `ChaCha8Rng::seed_from_u64(seed)` on stream `shot index`,
//! so the output does not depend on how shots are batched or how many
//! threads run them. Within a shot, the noise sites of each distinct channel
//! are visited by geometric skipping, channels in first-appearance order.

use crate::circuit::Circuit;
use crate::noise::{Fault, OpKind, PauliChannel};
use crate::sensitivity::{check_deterministic, DeterminismError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

const LANES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error(transparent)]
    Determinism(#[from] DeterminismError),
    #[error(transparent)]
    Circuit(#[from] crate::circuit::CircuitError),
    #[error("circuit has {0} observables, at most 64 are supported")]
    TooManyObservables(usize),
    #[error("shots must be at least 1")]
    NoShots,
    #[error("no noise operation {noise_index} in layer {layer}")]
    BadInjection { layer: usize, noise_index: usize },
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

/// Row-major bit matrix, each row padded to whole 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix { rows, cols, words_per_row, data: vec![0; rows * words_per_row] }
    }

    /// Wrap packed words; bits beyond `cols` in each row must be zero.
    pub fn from_words(rows: usize, cols: usize, data: Vec<u64>) -> Option<Self> {
        let words_per_row = cols.div_ceil(64);
        if data.len() != rows * words_per_row {
            return None;
        }
        let m = BitMatrix { rows, cols, words_per_row, data };
        let tail = cols % 64;
        if tail != 0 && (0..rows).any(|r| m.row(r)[words_per_row - 1] >> tail != 0) {
            return None;
        }
        Some(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row(r)[c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words_per_row + c / 64];
        *w = (*w & !(1 << (c % 64))) | ((v as u64) << (c % 64));
    }

    /// Column indices of the set bits of row `r`, increasing.
    pub fn ones(&self, r: usize) -> impl Iterator<Item = u32> + '_ {
        self.row(r).iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(k as u32 * 64 + b)
            })
        })
    }

    pub fn count_ones(&self) -> u64 {
        self.data.iter().map(|w| w.count_ones() as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub shots: u64,
    pub seed: u64,
    /// Shots by detectors.
    pub detectors: BitMatrix,
    /// Shots by observables.
    pub observables: BitMatrix,
}

/// Deterministic fault placed on a noise operation, for injection runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Injection {
    pub layer: usize,
    pub noise_index: usize,
    pub fault: Fault,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Reset(u32),
    H(u32),
    Cx(u32, u32),
    Cz(u32, u32),
    MeasureZ(u32, u32),
    MeasureX(u32, u32),
}

// Fault code bits: X on first target, Z on first, X on second, Z on second,
// record flip.
const X0: u8 = 1;
const Z0: u8 = 2;
const X1: u8 = 4;
const Z1: u8 = 8;
const FLIP: u8 = 16;

fn fault_code(f: Fault) -> u8 {
    let bits = |p: crate::noise::Pauli, x, z| (if p.has_x() { x } else { 0 }) | (if p.has_z() { z } else { 0 });
    match f {
        Fault::Single(p) => bits(p, X0, Z0),
        Fault::Pair(a, b) => bits(a, X0, Z0) | bits(b, X1, Z1),
        Fault::RecordFlip => FLIP,
    }
}

#[derive(Debug, Clone)]
struct Site {
    layer: u32,
    q0: u32,
    q1: u32,
    /// Measurement recorded by `q0` in this layer, for record flips.
    meas: u32,
}

#[derive(Debug, Clone)]
struct Class {
    channel: PauliChannel,
    total: f64,
    ln_keep: f64,
    cumulative: Vec<f64>,
    codes: Vec<u8>,
    sites: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    site: u32,
    code: u8,
    lane: u8,
}

/// Compiled sampler for one circuit.
#[derive(Debug, Clone)]
pub struct FrameSampler {
    num_qubits: usize,
    num_measurements: usize,
    layers: Vec<Vec<Op>>,
    sites: Vec<Site>,
    /// First site index of each layer.
    layer_site_start: Vec<u32>,
    classes: Vec<Class>,
    detectors: Vec<Vec<u32>>,
    observables: Vec<Vec<u32>>,
}

struct Scratch {
    x: Vec<u64>,
    z: Vec<u64>,
    rec: Vec<u64>,
    buckets: Vec<Vec<Event>>,
}

impl FrameSampler {
    /// Validate `circuit`, check that it is deterministic without noise, and
    /// compile it.
    pub fn new(circuit: &Circuit) -> Result<Self, SampleError> {
        circuit.validate()?;
        if circuit.num_observables() > 64 {
            return Err(SampleError::TooManyObservables(circuit.num_observables()));
        }
        check_deterministic(circuit)?;
        let meas_map = circuit.measurement_map();
        let mut layers = Vec::with_capacity(circuit.layers.len());
        let mut sites = Vec::new();
        let mut layer_site_start = Vec::with_capacity(circuit.layers.len());
        let mut classes: Vec<Class> = Vec::new();
        for (li, layer) in circuit.layers.iter().enumerate() {
            let mut meas = meas_map[li].iter();
            let ops = layer
                .ideal_ops
                .iter()
                .map(|op| {
                    let t = &op.targets;
                    match op.kind {
                        OpKind::ResetZ | OpKind::ResetX => Op::Reset(t[0]),
                        OpKind::H => Op::H(t[0]),
                        OpKind::Cx => Op::Cx(t[0], t[1]),
                        OpKind::Cz => Op::Cz(t[0], t[1]),
                        OpKind::MeasureZ => Op::MeasureZ(t[0], meas.next().unwrap().1),
                        OpKind::MeasureX => Op::MeasureX(t[0], meas.next().unwrap().1),
                    }
                })
                .collect();
            layers.push(ops);
            layer_site_start.push(sites.len() as u32);
            for nop in &layer.noise_ops {
                let q0 = nop.targets[0];
                let meas = meas_map[li].iter().find(|(q, _)| *q == q0).map_or(u32::MAX, |&(_, m)| m);
                let site = sites.len() as u32;
                sites.push(Site { layer: li as u32, q0, q1: nop.targets.get(1).copied().unwrap_or(q0), meas });
                let total = nop.channel.total_rate();
                if total <= 0.0 {
                    continue;
                }
                let class = match classes.iter().position(|c| c.channel == nop.channel) {
                    Some(i) => i,
                    None => {
                        let comps = nop.channel.components();
                        let mut acc = 0.0;
                        let cumulative = comps
                            .iter()
                            .map(|&(_, p)| {
                                acc += p;
                                acc
                            })
                            .collect();
                        classes.push(Class {
                            channel: nop.channel,
                            total,
                            ln_keep: (-total).ln_1p(),
                            cumulative,
                            codes: comps.iter().map(|&(f, _)| fault_code(f)).collect(),
                            sites: Vec::new(),
                        });
                        classes.len() - 1
                    }
                };
                classes[class].sites.push(site);
            }
        }
        Ok(FrameSampler {
            num_qubits: circuit.num_qubits as usize,
            num_measurements: circuit.num_measurements(),
            layers,
            sites,
            layer_site_start,
            classes,
            detectors: circuit.detectors.clone(),
            observables: circuit.observables.clone(),
        })
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            x: vec![0; self.num_qubits],
            z: vec![0; self.num_qubits],
            rec: vec![0; self.num_measurements],
            buckets: vec![Vec::new(); self.layers.len()],
        }
    }

    /// Draw the errors of one shot into the layer buckets.
    fn draw(&self, shot: u64, seed: u64, lane: u8, buckets: &mut [Vec<Event>]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        for class in &self.classes {
            let n = class.sites.len();
            let mut pos = 0usize;
            loop {
                if class.total < 1.0 {
                    let u: f64 = rng.gen();
                    let gap = (-u).ln_1p() / class.ln_keep;
                    if gap >= (n - pos) as f64 {
                        break;
                    }
                    pos += gap as usize;
                } else if pos >= n {
                    break;
                }
                let v = rng.gen::<f64>() * class.total;
                let k = class.cumulative.iter().position(|&c| v < c).unwrap_or(class.codes.len() - 1);
                let site = class.sites[pos];
                buckets[self.sites[site as usize].layer as usize].push(Event { site, code: class.codes[k], lane });
                pos += 1;
            }
        }
    }

    /// Propagate frames through the circuit with the bucketed errors, leaving
    /// the measurement flips in `s.rec`.
    fn propagate(&self, s: &mut Scratch) {
        s.x.fill(0);
        s.z.fill(0);
        s.rec.fill(0);
        for (li, ops) in self.layers.iter().enumerate() {
            for &op in ops {
                match op {
                    Op::Reset(q) => {
                        s.x[q as usize] = 0;
                        s.z[q as usize] = 0;
                    }
                    Op::H(q) => std::mem::swap(&mut s.x[q as usize], &mut s.z[q as usize]),
                    Op::Cx(c, t) => {
                        let (c, t) = (c as usize, t as usize);
                        s.x[t] ^= s.x[c];
                        s.z[c] ^= s.z[t];
                    }
                    Op::Cz(a, b) => {
                        let (a, b) = (a as usize, b as usize);
                        s.z[b] ^= s.x[a];
                        s.z[a] ^= s.x[b];
                    }
                    Op::MeasureZ(q, m) => s.rec[m as usize] = s.x[q as usize],
                    Op::MeasureX(q, m) => s.rec[m as usize] = s.z[q as usize],
                }
            }
            for ev in s.buckets[li].drain(..) {
                let site = &self.sites[ev.site as usize];
                let bit = 1u64 << ev.lane;
                let (q0, q1) = (site.q0 as usize, site.q1 as usize);
                if ev.code & X0 != 0 {
                    s.x[q0] ^= bit;
                }
                if ev.code & Z0 != 0 {
                    s.z[q0] ^= bit;
                }
                if ev.code & X1 != 0 {
                    s.x[q1] ^= bit;
                }
                if ev.code & Z1 != 0 {
                    s.z[q1] ^= bit;
                }
                if ev.code & FLIP != 0 {
                    s.rec[site.meas as usize] ^= bit;
                }
            }
        }
    }

    fn parity(&self, rec: &[u64], ms: &[u32]) -> u64 {
        ms.iter().fold(0, |acc, &m| acc ^ rec[m as usize])
    }

    /// Scatter the detector and observable words of a batch into the rows of
    /// `det` and `obs`, which start at the batch's first shot.
    fn write_rows(&self, rec: &[u64], lanes: usize, det: &mut [u64], obs: &mut [u64]) {
        let dw = self.detectors.len().div_ceil(64);
        let ow = self.observables.len().div_ceil(64);
        let lane_mask = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
        for (j, ms) in self.detectors.iter().enumerate() {
            let mut w = self.parity(rec, ms) & lane_mask;
            while w != 0 {
                let lane = w.trailing_zeros() as usize;
                w &= w - 1;
                det[lane * dw + j / 64] |= 1 << (j % 64);
            }
        }
        for (j, ms) in self.observables.iter().enumerate() {
            let mut w = self.parity(rec, ms) & lane_mask;
            while w != 0 {
                let lane = w.trailing_zeros() as usize;
                w &= w - 1;
                obs[lane * ow + j / 64] |= 1 << (j % 64);
            }
        }
    }

    /// Sample shots `first..first + count` on the calling thread.
    pub fn sample_range(&self, first: u64, count: usize, seed: u64) -> SampleResult {
        let mut det = BitMatrix::zeros(count, self.num_detectors());
        let mut obs = BitMatrix::zeros(count, self.num_observables());
        let mut s = self.scratch();
        let (dw, ow) = (det.words_per_row, obs.words_per_row);
        for b in 0..count.div_ceil(LANES) {
            let lanes = LANES.min(count - b * LANES);
            self.run_batch(first + (b * LANES) as u64, lanes, seed, &mut s);
            let (d0, o0) = (b * LANES * dw, b * LANES * ow);
            self.write_rows(&s.rec, lanes, &mut det.data[d0..d0 + lanes * dw], &mut obs.data[o0..o0 + lanes * ow]);
        }
        SampleResult { shots: count as u64, seed, detectors: det, observables: obs }
    }

    fn run_batch(&self, first: u64, lanes: usize, seed: u64, s: &mut Scratch) {
        for lane in 0..lanes {
            self.draw(first + lane as u64, seed, lane as u8, &mut s.buckets);
        }
        self.propagate(s);
    }

    /// Sample `shots` shots on the current rayon pool.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampleResult, SampleError> {
        if shots == 0 {
            return Err(SampleError::NoShots);
        }
        let count = shots as usize;
        let mut det = BitMatrix::zeros(count, self.num_detectors());
        let mut obs = BitMatrix::zeros(count, self.num_observables());
        let (dw, ow) = (det.words_per_row.max(1), obs.words_per_row.max(1));
        let det_chunks = det.data.par_chunks_mut(LANES * dw);
        let obs_chunks = obs.data.par_chunks_mut(LANES * ow);
        det_chunks.zip(obs_chunks).enumerate().for_each_init(
            || self.scratch(),
            |s, (b, (dchunk, ochunk))| {
                let lanes = LANES.min(count - b * LANES);
                self.run_batch((b * LANES) as u64, lanes, seed, s);
                self.write_rows(&s.rec, lanes, dchunk, ochunk);
            },
        );
        Ok(SampleResult { shots, seed, detectors: det, observables: obs })
    }

    /// Sample with a dedicated pool of `workers` threads.
    pub fn sample_with_workers(&self, shots: u64, seed: u64, workers: usize) -> Result<SampleResult, SampleError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| SampleError::Pool(e.to_string()))?;
        pool.install(|| self.sample(shots, seed))
    }

    /// Run each list of faults as one noiseless shot and report the flipped
    /// detectors and observable mask.
    pub fn inject(&self, shots: &[Vec<Injection>]) -> Result<Vec<(Vec<u32>, u64)>, SampleError> {
        let mut s = self.scratch();
        let mut out = Vec::with_capacity(shots.len());
        for batch in shots.chunks(LANES) {
            for (lane, faults) in batch.iter().enumerate() {
                for f in faults {
                    let start = *self.layer_site_start.get(f.layer).ok_or(SampleError::BadInjection {
                        layer: f.layer,
                        noise_index: f.noise_index,
                    })?;
                    let end = self.layer_site_start.get(f.layer + 1).copied().unwrap_or(self.sites.len() as u32);
                    let site = start + f.noise_index as u32;
                    if site >= end {
                        return Err(SampleError::BadInjection { layer: f.layer, noise_index: f.noise_index });
                    }
                    s.buckets[f.layer].push(Event { site, code: fault_code(f.fault), lane: lane as u8 });
                }
            }
            self.propagate(&mut s);
            for lane in 0..batch.len() {
                let dets = (0..self.detectors.len() as u32)
                    .filter(|&j| self.parity(&s.rec, &self.detectors[j as usize]) >> lane & 1 == 1)
                    .collect();
                let mask = self
                    .observables
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, ms)| acc | ((self.parity(&s.rec, ms) >> lane & 1) << j));
                out.push((dets, mask));
            }
        }
        Ok(out)
    }
}

/// Compile `circuit` and sample `shots` shots.
pub fn sample(circuit: &Circuit, shots: u64, seed: u64) -> Result<SampleResult, SampleError> {
    FrameSampler::new(circuit)?.sample(shots, seed)
}
