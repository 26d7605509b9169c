//! Layered stabilizer circuits with Pauli noise annotations.
//!
//! A [`Circuit`] is a list of [`Layer`]s. Inside a layer the ideal Clifford
//! operations act first and the noise channels act right after them, so a
//! gate's depolarizing channel sees the post-gate state and a `MEASURE_FLIP`
//! flips the result recorded by the measurement in the same layer.
//!
//! Text form, one instruction per line:
//!
//! ```text
//! QUBITS 17
//! RESET_Z 0
//! X_FLIP 0 0.002
//! TICK
//! CX 9 0
//! DEPOLARIZE2 9 0 0.001
//! TICK
//! DETECTOR 0 8
//! OBSERVABLE 16 17 18
//! ```
//!
//! `TICK` terminates each layer. Measurement indices count measurements in
//! program order from 0.

mod builder;
mod layout;

pub use builder::{
    attach_noise, build_memory_experiment, insert_swap_overhead, plan_memory_experiment,
    stabilizer_schedule, CheckSchedule, CircuitPlan, PlannedLayer, ScheduledGate,
};
pub use layout::{Check, CheckType, Corner, RotatedLayout, X_TYPE_ORDER, Z_TYPE_ORDER};

use crate::noise::{NoiseError, OpKind, PauliChannel};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error(transparent)]
    Arch(#[from] crate::arch::ArchError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("layer {layer}: {msg}")]
    InvalidLayer { layer: usize, msg: String },
    #[error("{what} {index} references measurement {measurement}, but only {count} exist")]
    BadMeasurementRef { what: &'static str, index: usize, measurement: u32, count: usize },
}

/// Ideal Clifford operation. Two-qubit gates list control first.
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: OpKind,
    pub targets: Vec<u32>,
}

impl Instruction {
    pub fn new(kind: OpKind, targets: &[u32]) -> Self {
        Self { kind, targets: targets.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOp {
    pub channel: PauliChannel,
    pub targets: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layer {
    pub ideal_ops: Vec<Instruction>,
    pub noise_ops: Vec<NoiseOp>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: u32,
    pub layers: Vec<Layer>,
    pub detectors: Vec<Vec<u32>>,
    pub observables: Vec<Vec<u32>>,
}

impl Circuit {
    pub fn num_measurements(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| &l.ideal_ops)
            .filter(|op| op.kind.is_measurement())
            .count()
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    /// For each layer, the `(qubit, measurement index)` pairs it measures.
    pub fn measurement_map(&self) -> Vec<Vec<(u32, u32)>> {
        let mut next = 0u32;
        self.layers
            .iter()
            .map(|layer| {
                layer
                    .ideal_ops
                    .iter()
                    .filter(|op| op.kind.is_measurement())
                    .map(|op| {
                        let m = next;
                        next += 1;
                        (op.targets[0], m)
                    })
                    .collect()
            })
            .collect()
    }

    /// Copy of the circuit with every noise channel removed.
    pub fn without_noise(&self) -> Circuit {
        let mut c = self.clone();
        for layer in &mut c.layers {
            layer.noise_ops.clear();
        }
        c
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| &l.ideal_ops)
            .filter(|op| op.kind.arity() == 2)
            .count()
    }

    /// Structural checks: targets in range, one ideal op per qubit per layer,
    /// noise arity, `MEASURE_FLIP` only on qubits measured in that layer, and
    /// detector/observable references in range.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let n = self.num_qubits;
        let mut touched = vec![usize::MAX; n as usize];
        for (li, layer) in self.layers.iter().enumerate() {
            let bad = |msg: String| CircuitError::InvalidLayer { layer: li, msg };
            let mut measured = Vec::new();
            for op in &layer.ideal_ops {
                if op.targets.len() != op.kind.arity() {
                    return Err(bad(format!("{} expects {} target(s)", op.kind.name(), op.kind.arity())));
                }
                if op.targets.len() == 2 && op.targets[0] == op.targets[1] {
                    return Err(bad(format!("{} targets must be distinct", op.kind.name())));
                }
                for &q in &op.targets {
                    if q >= n {
                        return Err(bad(format!("qubit {q} out of range")));
                    }
                    if touched[q as usize] == li {
                        return Err(bad(format!("qubit {q} targeted twice")));
                    }
                    touched[q as usize] = li;
                }
                if op.kind.is_measurement() {
                    measured.push(op.targets[0]);
                }
            }
            for nop in &layer.noise_ops {
                if nop.targets.len() != nop.channel.arity() {
                    return Err(bad(format!("{} expects {} target(s)", nop.channel.name(), nop.channel.arity())));
                }
                if let Some(&q) = nop.targets.iter().find(|&&q| q >= n) {
                    return Err(bad(format!("qubit {q} out of range")));
                }
                if matches!(nop.channel, PauliChannel::MeasureFlip(_)) && !measured.contains(&nop.targets[0]) {
                    return Err(bad(format!("MEASURE_FLIP on unmeasured qubit {}", nop.targets[0])));
                }
            }
        }
        let count = self.num_measurements();
        for (what, list) in [("detector", &self.detectors), ("observable", &self.observables)] {
            for (i, ms) in list.iter().enumerate() {
                if let Some(&m) = ms.iter().find(|&&m| m as usize >= count) {
                    return Err(CircuitError::BadMeasurementRef { what, index: i, measurement: m, count });
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "QUBITS {}", self.num_qubits).unwrap();
        for layer in &self.layers {
            for op in &layer.ideal_ops {
                s.push_str(op.kind.name());
                for q in &op.targets {
                    write!(s, " {q}").unwrap();
                }
                s.push('\n');
            }
            for nop in &layer.noise_ops {
                s.push_str(nop.channel.name());
                for q in &nop.targets {
                    write!(s, " {q}").unwrap();
                }
                for a in nop.channel.args() {
                    write!(s, " {a}").unwrap();
                }
                s.push('\n');
            }
            s.push_str("TICK\n");
        }
        for (key, list) in [("DETECTOR", &self.detectors), ("OBSERVABLE", &self.observables)] {
            for ms in list {
                s.push_str(key);
                for m in ms {
                    write!(s, " {m}").unwrap();
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit, CircuitError> {
        let mut c = Circuit::default();
        let mut current = Layer::default();
        let mut dirty = false;
        let mut saw_qubits = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let perr = |msg: String| CircuitError::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let head = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            let ints = |toks: &[&str]| -> Result<Vec<u32>, CircuitError> {
                toks.iter()
                    .map(|t| t.parse::<u32>().map_err(|_| perr(format!("expected integer, got `{t}`"))))
                    .collect()
            };
            match head {
                "QUBITS" => {
                    let v = ints(&rest)?;
                    if v.len() != 1 {
                        return Err(perr("QUBITS takes one count".into()));
                    }
                    c.num_qubits = v[0];
                    saw_qubits = true;
                }
                "TICK" => {
                    if !rest.is_empty() {
                        return Err(perr("TICK takes no arguments".into()));
                    }
                    c.layers.push(std::mem::take(&mut current));
                    dirty = false;
                }
                "DETECTOR" => c.detectors.push(ints(&rest)?),
                "OBSERVABLE" => c.observables.push(ints(&rest)?),
                _ => {
                    if let Some(kind) = OpKind::from_name(head) {
                        let targets = ints(&rest)?;
                        current.ideal_ops.push(Instruction { kind, targets });
                    } else {
                        let nargs = if head == "BIASED_PAULI1" { 2 } else { 1 };
                        if rest.len() < nargs {
                            return Err(perr(format!("unknown or malformed instruction `{head}`")));
                        }
                        let (qs, args) = rest.split_at(rest.len() - nargs);
                        let channel = PauliChannel::from_parts(head, args)
                            .map_err(|e| perr(e.to_string()))?;
                        current.noise_ops.push(NoiseOp { channel, targets: ints(qs)? });
                    }
                    dirty = true;
                }
            }
        }
        if dirty {
            c.layers.push(current);
        }
        if !saw_qubits {
            return Err(CircuitError::Parse { line: 0, msg: "missing QUBITS header".into() });
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{ArchitectureParams, CodeVariant, MemoryBasis};
    use crate::noise::{Bias, NoiseParams};

    #[test]
    fn text_round_trip_on_built_circuit() {
        let arch = ArchitectureParams::new(2, 3, 3, CodeVariant::Xzzx, MemoryBasis::V).unwrap();
        let noise = NoiseParams::new(0.0013, Bias::Finite(100.0)).unwrap();
        let c = build_memory_experiment(&arch, &noise, 2).unwrap();
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn infinite_bias_round_trips() {
        let arch = ArchitectureParams::new(2, 3, 3, CodeVariant::Css, MemoryBasis::Z).unwrap();
        let noise = NoiseParams::new(0.001, Bias::Infinite).unwrap();
        let c = build_memory_experiment(&arch, &noise, 1).unwrap();
        let text = c.to_text();
        assert!(text.contains(" inf\n"));
        assert_eq!(Circuit::from_text(&text).unwrap().to_text(), text);
    }

    #[test]
    fn parse_errors() {
        assert!(Circuit::from_text("CX 0 1\nTICK\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nCX 0 0\nTICK\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nFOO 0\nTICK\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nH 0\nH 0\nTICK\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nMEASURE_Z 0\nTICK\nDETECTOR 1\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nH 0\nMEASURE_FLIP 0 0.1\nTICK\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nDEPOLARIZE1 0 1.5\nTICK\n").is_err());
        let ok = Circuit::from_text("# c\nQUBITS 2\nMEASURE_Z 0\nMEASURE_FLIP 0 0.1\nTICK\nDETECTOR 0\n").unwrap();
        assert_eq!(ok.num_measurements(), 1);
    }
}
