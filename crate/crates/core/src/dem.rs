//! Detector error models.
//!
//! Every Pauli component of every noise channel is propagated to the set of
//! detectors it flips and the observables it flips. Components with equal
//! signatures are merged as independent events, and signatures touching more
//! than two detectors are split into existing edge signatures so the model
//! can be matched.

use crate::circuit::Circuit;
use crate::noise::{Fault, Pauli};
use crate::sensitivity::{backward_sweep, xor_into, DeterminismError, Sensitivity};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DemError {
    #[error(transparent)]
    Determinism(#[from] DeterminismError),
    #[error("circuit has {0} observables, at most 64 are supported")]
    TooManyObservables(usize),
    #[error("cannot decompose error({probability}) {detectors:?} mask {mask:#b} into matchable edges")]
    Undecomposable { probability: f64, detectors: Vec<u32>, mask: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Combined probability of two independent events that cancel in pairs.
pub fn merge_probability(p1: f64, p2: f64) -> f64 {
    p1 + p2 - 2.0 * p1 * p2
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMechanism {
    pub probability: f64,
    /// Sorted detector indices.
    pub detectors: Vec<u32>,
    pub observable_mask: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectorErrorModel {
    pub mechanisms: Vec<ErrorMechanism>,
    pub num_detectors: usize,
    pub num_observables: usize,
}

/// One Pauli component of one noise operation, with its effect.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorLocation {
    pub layer: usize,
    /// Index into the layer's `noise_ops`.
    pub noise_index: usize,
    pub fault: Fault,
    pub probability: f64,
    pub detectors: Vec<u32>,
    pub observable_mask: u64,
}

fn pauli_targets(p: Pauli, q: usize, s: &Sensitivity, out: &mut Vec<u32>) {
    if p.has_x() {
        xor_into(out, &s.x[q]);
    }
    if p.has_z() {
        xor_into(out, &s.z[q]);
    }
}

/// Every primitive error location of `circuit` and the signature it produces,
/// in circuit order.
pub fn error_locations(circuit: &Circuit) -> Result<Vec<ErrorLocation>, DemError> {
    let nd = circuit.num_detectors();
    if circuit.num_observables() > 64 {
        return Err(DemError::TooManyObservables(circuit.num_observables()));
    }
    let meas_map = circuit.measurement_map();
    let mut out = Vec::new();
    backward_sweep(circuit, |layer, noise_index, nop, s| {
        for (fault, probability) in nop.channel.components() {
            let mut targets = Vec::new();
            let q = nop.targets[0] as usize;
            match fault {
                Fault::Single(p) => pauli_targets(p, q, s, &mut targets),
                Fault::Pair(p1, p2) => {
                    pauli_targets(p1, q, s, &mut targets);
                    pauli_targets(p2, nop.targets[1] as usize, s, &mut targets);
                }
                Fault::RecordFlip => {
                    let m = meas_map[layer]
                        .iter()
                        .find(|(mq, _)| *mq as usize == q)
                        .map(|&(_, m)| m)
                        .expect("validated circuit measures MEASURE_FLIP targets");
                    targets = s.by_measurement[m as usize].clone();
                }
            }
            let split = targets.partition_point(|&t| (t as usize) < nd);
            let mask = targets[split..].iter().fold(0u64, |acc, &t| acc ^ (1 << (t as usize - nd)));
            targets.truncate(split);
            out.push(ErrorLocation { layer, noise_index, fault, probability, detectors: targets, observable_mask: mask });
        }
    })?;
    out.reverse();
    Ok(out)
}

/// Merged model without hyperedge decomposition. Its detector marginals are
/// exact for the circuit's noise.
pub fn build_dem_undecomposed(circuit: &Circuit) -> Result<DetectorErrorModel, DemError> {
    let mut merged: BTreeMap<(Vec<u32>, u64), f64> = BTreeMap::new();
    for loc in error_locations(circuit)? {
        if loc.probability <= 0.0 || (loc.detectors.is_empty() && loc.observable_mask == 0) {
            continue;
        }
        let p = merged.entry((loc.detectors, loc.observable_mask)).or_insert(0.0);
        *p = merge_probability(*p, loc.probability);
    }
    Ok(DetectorErrorModel {
        mechanisms: merged
            .into_iter()
            .map(|((detectors, observable_mask), probability)| ErrorMechanism { probability, detectors, observable_mask })
            .collect(),
        num_detectors: circuit.num_detectors(),
        num_observables: circuit.num_observables(),
    })
}

/// Matchable model: every mechanism touches at most two detectors.
pub fn build_dem(circuit: &Circuit) -> Result<DetectorErrorModel, DemError> {
    build_dem_undecomposed(circuit)?.decomposed()
}

impl DetectorErrorModel {
    /// Split every mechanism with more than two detectors into edges that
    /// already exist on their own, and fold its probability into them.
    pub fn decomposed(&self) -> Result<DetectorErrorModel, DemError> {
        let mut edges: BTreeMap<(Vec<u32>, u64), f64> = BTreeMap::new();
        let mut by_dets: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
        for m in self.mechanisms.iter().filter(|m| m.detectors.len() <= 2) {
            edges.insert((m.detectors.clone(), m.observable_mask), m.probability);
            by_dets.entry(m.detectors.clone()).or_default().push(m.observable_mask);
        }
        for masks in by_dets.values_mut() {
            masks.sort_unstable();
        }
        for m in self.mechanisms.iter().filter(|m| m.detectors.len() > 2) {
            let mut parts = Vec::new();
            if !split(&m.detectors, m.observable_mask, &by_dets, &mut parts) {
                return Err(DemError::Undecomposable {
                    probability: m.probability,
                    detectors: m.detectors.clone(),
                    mask: m.observable_mask,
                });
            }
            for key in parts {
                let p = edges.get_mut(&key).expect("parts are existing edges");
                *p = merge_probability(*p, m.probability);
            }
        }
        Ok(DetectorErrorModel {
            mechanisms: edges
                .into_iter()
                .map(|((detectors, observable_mask), probability)| ErrorMechanism { probability, detectors, observable_mask })
                .collect(),
            num_detectors: self.num_detectors,
            num_observables: self.num_observables,
        })
    }

    /// Mechanisms that flip an observable without tripping any detector.
    pub fn undetectable_logicals(&self) -> Vec<&ErrorMechanism> {
        self.mechanisms.iter().filter(|m| m.detectors.is_empty() && m.observable_mask != 0).collect()
    }

    /// Probability that each detector fires: `(1 - prod(1 - 2 p_i)) / 2` over
    /// the mechanisms touching it. Exact for undecomposed models.
    pub fn detector_marginals(&self) -> Vec<f64> {
        let mut prod = vec![1.0f64; self.num_detectors];
        for m in &self.mechanisms {
            for &d in &m.detectors {
                prod[d as usize] *= 1.0 - 2.0 * m.probability;
            }
        }
        prod.into_iter().map(|x| 0.5 * (1.0 - x)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "detectors {}", self.num_detectors).unwrap();
        writeln!(s, "observables {}", self.num_observables).unwrap();
        for m in &self.mechanisms {
            write!(s, "error({})", m.probability).unwrap();
            for d in &m.detectors {
                write!(s, " D{d}").unwrap();
            }
            for l in 0..64 {
                if m.observable_mask >> l & 1 == 1 {
                    write!(s, " L{l}").unwrap();
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<DetectorErrorModel, DemError> {
        let mut dem = DetectorErrorModel::default();
        for (i, raw) in text.lines().enumerate() {
            let perr = |msg: String| DemError::Parse { line: i + 1, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            let count = |tok: Option<&str>| -> Result<usize, DemError> {
                tok.and_then(|t| t.parse().ok()).ok_or_else(|| perr(format!("bad count in `{line}`")))
            };
            if head == "detectors" {
                dem.num_detectors = count(tokens.next())?;
            } else if head == "observables" {
                dem.num_observables = count(tokens.next())?;
            } else if let Some(p) = head.strip_prefix("error(").and_then(|r| r.strip_suffix(')')) {
                let probability: f64 = p.parse().map_err(|_| perr(format!("bad probability `{p}`")))?;
                if !(probability > 0.0 && probability < 1.0) {
                    return Err(perr(format!("probability {probability} outside (0, 1)")));
                }
                let mut detectors = Vec::new();
                let mut observable_mask = 0u64;
                for tok in tokens {
                    let parse_idx = |s: &str| s.parse::<u32>().map_err(|_| perr(format!("bad target `{tok}`")));
                    if let Some(d) = tok.strip_prefix('D') {
                        detectors.push(parse_idx(d)?);
                    } else if let Some(l) = tok.strip_prefix('L') {
                        let l = parse_idx(l)?;
                        if l >= 64 {
                            return Err(perr(format!("observable {l} out of range")));
                        }
                        observable_mask ^= 1 << l;
                    } else {
                        return Err(perr(format!("bad target `{tok}`")));
                    }
                }
                detectors.sort_unstable();
                dem.mechanisms.push(ErrorMechanism { probability, detectors, observable_mask });
            } else {
                return Err(perr(format!("unknown line `{line}`")));
            }
        }
        for m in &dem.mechanisms {
            if let Some(&d) = m.detectors.iter().find(|&&d| d as usize >= dem.num_detectors) {
                return Err(DemError::Parse { line: 0, msg: format!("detector {d} out of range") });
            }
        }
        Ok(dem)
    }
}

/// Depth-first search for a partition of `dets` into existing edges whose
/// masks XOR to `mask`. The lowest remaining detector is covered first, by a
/// pair before a singleton, partners in increasing order.
fn split(dets: &[u32], mask: u64, edges: &HashMap<Vec<u32>, Vec<u64>>, out: &mut Vec<(Vec<u32>, u64)>) -> bool {
    let Some((&first, rest)) = dets.split_first() else {
        return mask == 0;
    };
    for j in 0..rest.len() {
        let key = vec![first, rest[j]];
        if let Some(masks) = edges.get(&key) {
            let remaining: Vec<u32> = rest.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &d)| d).collect();
            for &m in masks {
                out.push((key.clone(), m));
                if split(&remaining, mask ^ m, edges, out) {
                    return true;
                }
                out.pop();
            }
        }
    }
    if let Some(masks) = edges.get(&vec![first]) {
        for &m in masks {
            out.push((vec![first], m));
            if split(rest, mask ^ m, edges, out) {
                return true;
            }
            out.pop();
        }
    }
    false
}
