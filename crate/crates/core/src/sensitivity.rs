//! Backward propagation of detector and observable sensitivities.
//!
//! Walking the circuit from the end, `x[q]` holds the targets (detectors,
//! then observables offset by the detector count) that an X error on `q` at
//! the current time would flip, and `z[q]` likewise for Z errors. Both are
//! kept as sorted index lists, which stay short for local codes.

use crate::circuit::{Circuit, NoiseOp};
use crate::noise::OpKind;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeterminismError {
    #[error("detector {0} is not deterministic in the noiseless circuit")]
    Detector(usize),
    #[error("observable {0} is not deterministic in the noiseless circuit")]
    Observable(usize),
    #[error("detector {index} has noiseless parity 1")]
    OddParity { index: usize },
}

/// Symmetric difference of two sorted lists, written into `a`.
pub(crate) fn xor_into(a: &mut Vec<u32>, b: &[u32]) {
    if b.is_empty() {
        return;
    }
    if a.is_empty() {
        a.extend_from_slice(b);
        return;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

pub(crate) struct Sensitivity {
    pub x: Vec<Vec<u32>>,
    pub z: Vec<Vec<u32>>,
    /// Targets containing each measurement.
    pub by_measurement: Vec<Vec<u32>>,
    pub num_detectors: usize,
}

impl Sensitivity {
    fn fail(&self, targets: &[u32]) -> DeterminismError {
        let t = targets[0] as usize;
        if t < self.num_detectors {
            DeterminismError::Detector(t)
        } else {
            DeterminismError::Observable(t - self.num_detectors)
        }
    }
}

/// Sweep `circuit` backwards. `on_noise(layer, index, op, sens)` is called
/// for every noise operation with the sensitivities right after it.
/// Fails if some detector or observable is not fixed by the noiseless circuit.
pub(crate) fn backward_sweep(
    circuit: &Circuit,
    mut on_noise: impl FnMut(usize, usize, &NoiseOp, &Sensitivity),
) -> Result<(), DeterminismError> {
    let n = circuit.num_qubits as usize;
    let nm = circuit.num_measurements();
    let nd = circuit.detectors.len();
    let mut by_measurement = vec![Vec::new(); nm];
    for (i, ms) in circuit.detectors.iter().chain(&circuit.observables).enumerate() {
        for &m in ms {
            // A measurement listed twice cancels.
            xor_into(&mut by_measurement[m as usize], &[i as u32]);
        }
    }
    let mut s = Sensitivity { x: vec![Vec::new(); n], z: vec![Vec::new(); n], by_measurement, num_detectors: nd };
    let meas_map = circuit.measurement_map();
    for (li, layer) in circuit.layers.iter().enumerate().rev() {
        for (ni, nop) in layer.noise_ops.iter().enumerate().rev() {
            on_noise(li, ni, nop, &s);
        }
        let mut meas = meas_map[li].iter().rev();
        for op in layer.ideal_ops.iter().rev() {
            let t = &op.targets;
            let (a, b) = (t[0] as usize, t.get(1).copied().unwrap_or(0) as usize);
            match op.kind {
                OpKind::H => {
                    let tmp = std::mem::take(&mut s.x[a]);
                    s.x[a] = std::mem::replace(&mut s.z[a], tmp);
                }
                OpKind::Cx => {
                    let xt = s.x[b].clone();
                    xor_into(&mut s.x[a], &xt);
                    let zc = s.z[a].clone();
                    xor_into(&mut s.z[b], &zc);
                }
                OpKind::Cz => {
                    let zb = s.z[b].clone();
                    xor_into(&mut s.x[a], &zb);
                    let za = s.z[a].clone();
                    xor_into(&mut s.x[b], &za);
                }
                OpKind::ResetZ => {
                    if !s.z[a].is_empty() {
                        return Err(s.fail(&s.z[a]));
                    }
                    s.x[a].clear();
                }
                OpKind::ResetX => {
                    if !s.x[a].is_empty() {
                        return Err(s.fail(&s.x[a]));
                    }
                    s.z[a].clear();
                }
                OpKind::MeasureZ | OpKind::MeasureX => {
                    let (_, m) = *meas.next().expect("measurement map matches layer");
                    // A component anticommuting with the measured basis makes the target random.
                    let anti = if op.kind == OpKind::MeasureZ { &s.z[a] } else { &s.x[a] };
                    if !anti.is_empty() {
                        return Err(s.fail(anti));
                    }
                    let targets = s.by_measurement[m as usize].clone();
                    if op.kind == OpKind::MeasureZ {
                        xor_into(&mut s.x[a], &targets);
                    } else {
                        xor_into(&mut s.z[a], &targets);
                    }
                }
            }
        }
    }
    for q in 0..n {
        if let Some(list) = [&s.x[q], &s.z[q]].into_iter().find(|l| !l.is_empty()) {
            return Err(s.fail(list));
        }
    }
    Ok(())
}

/// Check that every detector and observable is fixed by the noiseless
/// circuit and that every detector's noiseless parity is 0.
pub fn check_deterministic(circuit: &Circuit) -> Result<(), DeterminismError> {
    backward_sweep(circuit, |_, _, _, _| {})?;
    let reference = crate::tableau::reference_record(circuit);
    for (i, ms) in circuit.detectors.iter().enumerate() {
        let parity = ms.iter().fold(false, |acc, &m| acc ^ reference[m as usize].0);
        if parity {
            return Err(DeterminismError::OddParity { index: i });
        }
    }
    Ok(())
}
