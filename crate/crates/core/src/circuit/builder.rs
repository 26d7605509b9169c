//! Memory-experiment construction: schedule, SWAP overhead and noise.
//!
//! Building happens in three passes so each can be inspected on its own:
//! [`plan_memory_experiment`] lays out the ideal stabilizer rounds,
//! [`insert_swap_overhead`] wraps every two-qubit gate step in the SWAP hops
//! that carry the measurement qubit to its data partner and back, and
//! [`attach_noise`] turns the plan into a [`Circuit`] with channels.

use super::layout::{CheckType, RotatedLayout};
use super::{Circuit, CircuitError, Instruction, Layer, NoiseOp};
use crate::arch::{ArchitectureParams, CodeVariant};
use crate::noise::{channel_for, IdleDuringSwaps, LayerKind, NoiseContext, NoiseParams, OpKind};

/// One two-qubit gate of a stabilizer measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduledGate {
    pub kind: OpKind,
    pub control: u32,
    pub target: u32,
    pub ancilla: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSchedule {
    pub ancilla: u32,
    pub check_type: CheckType,
    /// Whether the ancilla is rotated into the X basis around its gates.
    pub hadamard: bool,
    /// Gate at each of the four time steps, `None` where a boundary check idles.
    pub steps: [Option<ScheduledGate>; 4],
}

/// Gate plan of every measurement qubit.
///
/// XZZX checks prepare the ancilla in `|+>` and apply CX where the check has
/// an X and CZ where it has a Z, giving `X Z Z X` on every face. CSS X checks
/// use CX with the ancilla as control, CSS Z checks CX with the data as
/// control.
pub fn stabilizer_schedule(arch: &ArchitectureParams) -> Vec<CheckSchedule> {
    let layout = RotatedLayout::new(arch.distance);
    layout
        .checks
        .iter()
        .enumerate()
        .map(|(i, check)| {
            let ancilla = layout.ancilla(i);
            let mut steps = [None; 4];
            for (t, corner) in check.order().into_iter().enumerate() {
                let Some(data) = check.corners[corner as usize] else { continue };
                let gate = match arch.variant {
                    CodeVariant::Xzzx => {
                        let x_here = (check.check_type == CheckType::X) != layout.is_odd(data);
                        let kind = if x_here { OpKind::Cx } else { OpKind::Cz };
                        ScheduledGate { kind, control: ancilla, target: data, ancilla }
                    }
                    CodeVariant::Css => match check.check_type {
                        CheckType::X => ScheduledGate { kind: OpKind::Cx, control: ancilla, target: data, ancilla },
                        CheckType::Z => ScheduledGate { kind: OpKind::Cx, control: data, target: ancilla, ancilla },
                    },
                };
                steps[t] = Some(gate);
            }
            let hadamard = arch.variant == CodeVariant::Xzzx || check.check_type == CheckType::X;
            CheckSchedule { ancilla, check_type: check.check_type, hadamard, steps }
        })
        .collect()
}

/// Noise-free description of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedLayer {
    pub kind: LayerKind,
    pub ops: Vec<Instruction>,
    /// Measurement qubits on the move: the SWAP-noise carriers in `Swap`
    /// layers, and the gate's ancillas in `TwoQubit` layers.
    pub travelling: Vec<u32>,
    /// Qubits that accrue idling noise in this step.
    pub idle: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitPlan {
    pub num_qubits: u32,
    pub layers: Vec<PlannedLayer>,
    pub detectors: Vec<Vec<u32>>,
    pub observables: Vec<Vec<u32>>,
}

fn complement(num_qubits: u32, busy: &[u32]) -> Vec<u32> {
    let mut mask = vec![false; num_qubits as usize];
    for &q in busy {
        mask[q as usize] = true;
    }
    (0..num_qubits).filter(|&q| !mask[q as usize]).collect()
}

/// Ideal `rounds`-round memory experiment, without SWAPs or noise.
pub fn plan_memory_experiment(arch: &ArchitectureParams, rounds: u32) -> Result<CircuitPlan, CircuitError> {
    arch.validate()?;
    if rounds == 0 {
        return Err(CircuitError::NoRounds);
    }
    let layout = RotatedLayout::new(arch.distance);
    let schedule = stabilizer_schedule(arch);
    let nq = layout.num_qubits();
    let nd = layout.num_data();
    let nc = schedule.len() as u32;
    let horizontal = arch.basis.is_horizontal();

    // Per-data basis for preparation and final readout.
    let data_in_x: Vec<bool> = (0..nd)
        .map(|q| match arch.variant {
            CodeVariant::Css => horizontal,
            CodeVariant::Xzzx => horizontal != layout.is_odd(q),
        })
        .collect();
    let ancillas: Vec<u32> = schedule.iter().map(|s| s.ancilla).collect();
    let data: Vec<u32> = (0..nd).collect();
    let hadamard_layer = || {
        let ops: Vec<Instruction> = schedule
            .iter()
            .filter(|s| s.hadamard)
            .map(|s| Instruction::new(OpKind::H, &[s.ancilla]))
            .collect();
        let busy: Vec<u32> = ops.iter().map(|o| o.targets[0]).collect();
        PlannedLayer { kind: LayerKind::SingleQubit, ops, travelling: vec![], idle: complement(nq, &busy) }
    };

    let mut layers = Vec::new();
    for round in 0..rounds {
        let mut ops = Vec::new();
        if round == 0 {
            for &q in &data {
                let kind = if data_in_x[q as usize] { OpKind::ResetX } else { OpKind::ResetZ };
                ops.push(Instruction::new(kind, &[q]));
            }
        }
        ops.extend(ancillas.iter().map(|&a| Instruction::new(OpKind::ResetZ, &[a])));
        let idle = if round == 0 { vec![] } else { data.clone() };
        layers.push(PlannedLayer { kind: LayerKind::Reset, ops, travelling: vec![], idle });

        layers.push(hadamard_layer());
        for step in 0..4 {
            let gates: Vec<_> = schedule.iter().filter_map(|s| s.steps[step]).collect();
            let ops = gates.iter().map(|g| Instruction::new(g.kind, &[g.control, g.target])).collect();
            let busy: Vec<u32> = gates.iter().flat_map(|g| [g.control, g.target]).collect();
            layers.push(PlannedLayer {
                kind: LayerKind::TwoQubit,
                ops,
                travelling: gates.iter().map(|g| g.ancilla).collect(),
                idle: complement(nq, &busy),
            });
        }
        layers.push(hadamard_layer());
        layers.push(PlannedLayer {
            kind: LayerKind::Measure,
            ops: ancillas.iter().map(|&a| Instruction::new(OpKind::MeasureZ, &[a])).collect(),
            travelling: vec![],
            idle: data.clone(),
        });
    }
    layers.push(PlannedLayer {
        kind: LayerKind::Measure,
        ops: data
            .iter()
            .map(|&q| {
                let kind = if data_in_x[q as usize] { OpKind::MeasureX } else { OpKind::MeasureZ };
                Instruction::new(kind, &[q])
            })
            .collect(),
        travelling: vec![],
        // Ancillas are never touched again, noise on them is invisible.
        idle: vec![],
    });

    let anc_meas = |round: u32, c: u32| round * nc + c;
    let data_meas = |q: u32| rounds * nc + q;
    let boundary_type = if horizontal { CheckType::X } else { CheckType::Z };
    let mut detectors = Vec::new();
    for (c, check) in layout.checks.iter().enumerate() {
        if check.check_type == boundary_type {
            detectors.push(vec![anc_meas(0, c as u32)]);
        }
    }
    for round in 1..rounds {
        for c in 0..nc {
            detectors.push(vec![anc_meas(round - 1, c), anc_meas(round, c)]);
        }
    }
    for (c, check) in layout.checks.iter().enumerate() {
        if check.check_type == boundary_type {
            let mut det = vec![anc_meas(rounds - 1, c as u32)];
            det.extend(check.data_qubits().map(data_meas));
            detectors.push(det);
        }
    }
    let logical = if horizontal { layout.horizontal_logical() } else { layout.vertical_logical() };
    let observables = vec![logical.into_iter().map(data_meas).collect()];

    Ok(CircuitPlan { num_qubits: nq, layers, detectors, observables })
}

/// Surround every two-qubit gate step with `k = 4(n_x + n_y) - 10` SWAP hops
/// of its measurement qubits: `ceil(k/2)` on the way out, `floor(k/2)` back.
///
/// Under [`IdleDuringSwaps::PerStep`] every other qubit idles once per hop;
/// under [`IdleDuringSwaps::Single`] hops carry no idle noise and the qubit
/// idles only once, in the gate step itself.
pub fn insert_swap_overhead(plan: CircuitPlan, arch: &ArchitectureParams, noise: &NoiseParams) -> CircuitPlan {
    let k = arch.swaps_per_gate() as usize;
    let (out, back) = (k.div_ceil(2), k / 2);
    let nq = plan.num_qubits;
    let mut layers = Vec::with_capacity(plan.layers.len() * 2);
    for layer in plan.layers {
        if layer.kind != LayerKind::TwoQubit {
            layers.push(layer);
            continue;
        }
        let hop = PlannedLayer {
            kind: LayerKind::Swap,
            ops: vec![],
            travelling: layer.travelling.clone(),
            idle: match noise.idle_during_swaps {
                IdleDuringSwaps::PerStep => complement(nq, &layer.travelling),
                IdleDuringSwaps::Single => vec![],
            },
        };
        layers.extend(std::iter::repeat(hop.clone()).take(out));
        layers.push(layer);
        layers.extend(std::iter::repeat(hop).take(back));
    }
    CircuitPlan { layers, ..plan }
}

/// Attach the channel for every operation, SWAP hop and idle slot.
/// Channels with zero rate are left out.
pub fn attach_noise(plan: &CircuitPlan, noise: &NoiseParams) -> Result<Circuit, CircuitError> {
    let mut layers = Vec::with_capacity(plan.layers.len());
    let swap = channel_for(NoiseContext::SwapHop, noise)?;
    for pl in &plan.layers {
        let mut noise_ops = Vec::new();
        let mut push = |channel: crate::noise::PauliChannel, targets: Vec<u32>| {
            if channel.total_rate() > 0.0 {
                noise_ops.push(NoiseOp { channel, targets });
            }
        };
        for op in &pl.ops {
            push(channel_for(NoiseContext::Op(op.kind), noise)?, op.targets.clone());
        }
        if pl.kind == LayerKind::Swap {
            for &q in &pl.travelling {
                push(swap, vec![q]);
            }
        }
        let idle = channel_for(NoiseContext::Idle(pl.kind), noise)?;
        for &q in &pl.idle {
            push(idle, vec![q]);
        }
        layers.push(Layer { ideal_ops: pl.ops.clone(), noise_ops });
    }
    let circuit = Circuit {
        num_qubits: plan.num_qubits,
        layers,
        detectors: plan.detectors.clone(),
        observables: plan.observables.clone(),
    };
    circuit.validate()?;
    Ok(circuit)
}

/// Full noisy memory experiment with `rounds` rounds of syndrome extraction.
pub fn build_memory_experiment(
    arch: &ArchitectureParams,
    noise: &NoiseParams,
    rounds: u32,
) -> Result<Circuit, CircuitError> {
    noise.validate()?;
    let plan = plan_memory_experiment(arch, rounds)?;
    let plan = insert_swap_overhead(plan, arch, noise);
    attach_noise(&plan, noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::MemoryBasis;
    use crate::noise::{Bias, PauliChannel};

    fn arch(variant: CodeVariant, basis: MemoryBasis, d: u32) -> ArchitectureParams {
        ArchitectureParams::new(2, 3, d, variant, basis).unwrap()
    }

    #[test]
    fn qubit_and_round_counts() {
        let a = arch(CodeVariant::Xzzx, MemoryBasis::H, 5);
        let noise = NoiseParams::new(0.001, Bias::Finite(100.0)).unwrap();
        let c = build_memory_experiment(&a, &noise, 15).unwrap();
        assert_eq!(c.num_qubits, 25 + 24);
        let resets = c.layers.iter().filter(|l| l.ideal_ops.iter().any(|o| o.kind == OpKind::ResetZ)).count();
        assert_eq!(resets, 15);
        assert_eq!(c.num_measurements(), 15 * 24 + 25);
        // 12 X-type boundary detectors at each end, 24 per intermediate round.
        assert_eq!(c.num_detectors(), 12 + 14 * 24 + 12);
        assert_eq!(c.observables.len(), 1);
    }

    #[test]
    fn bulk_xzzx_check_is_cx_cz_cz_cx() {
        let a = arch(CodeVariant::Xzzx, MemoryBasis::H, 5);
        for s in stabilizer_schedule(&a) {
            let kinds: Vec<_> = s.steps.iter().flatten().map(|g| g.kind).collect();
            if kinds.len() == 4 {
                assert_eq!(kinds, [OpKind::Cx, OpKind::Cz, OpKind::Cz, OpKind::Cx]);
            } else {
                assert_eq!(kinds.len(), 2);
            }
            assert!(s.hadamard);
        }
    }

    #[test]
    fn css_gate_orientation() {
        let a = arch(CodeVariant::Css, MemoryBasis::Z, 3);
        for s in stabilizer_schedule(&a) {
            for g in s.steps.iter().flatten() {
                assert_eq!(g.kind, OpKind::Cx);
                match s.check_type {
                    CheckType::Z => assert_eq!(g.target, s.ancilla),
                    CheckType::X => assert_eq!(g.control, s.ancilla),
                }
            }
            assert_eq!(s.hadamard, s.check_type == CheckType::X);
        }
    }

    #[test]
    fn weight_two_checks_idle_two_steps() {
        let a = arch(CodeVariant::Xzzx, MemoryBasis::V, 3);
        let sched = stabilizer_schedule(&a);
        let edge: Vec<_> = sched.iter().filter(|s| s.steps.iter().flatten().count() == 2).collect();
        assert_eq!(edge.len(), 4);
        for s in edge {
            assert_eq!(s.steps.iter().filter(|g| g.is_none()).count(), 2);
        }
    }

    /// Gates per round at d=3, counted straight from the face list: four
    /// weight-4 faces and four weight-2 faces.
    #[test]
    fn d3_gate_count_matches_face_enumeration() {
        let mut expected = 0;
        for row in -1i32..3 {
            for col in -1i32..3 {
                let inside = |r: i32, c: i32| (0..3).contains(&r) && (0..3).contains(&c);
                let w = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().filter(|(dr, dc)| inside(row + dr, col + dc)).count();
                let x_type = (row + col).rem_euclid(2) == 0;
                let lr = col == -1 || col == 2;
                let tb = row == -1 || row == 2;
                let keep = match (lr, tb) {
                    (false, false) => true,
                    (true, true) => false,
                    (true, false) => x_type,
                    (false, true) => !x_type,
                };
                if keep {
                    expected += w;
                }
            }
        }
        assert_eq!(expected, 24);
        for variant in [(CodeVariant::Xzzx, MemoryBasis::H), (CodeVariant::Css, MemoryBasis::Z)] {
            let a = arch(variant.0, variant.1, 3);
            let c = build_memory_experiment(&a, &NoiseParams::noiseless(), 1).unwrap();
            assert_eq!(c.two_qubit_gate_count(), expected);
        }
    }

    fn swap_events(c: &Circuit, rate: f64) -> usize {
        c.layers
            .iter()
            .filter(|l| l.ideal_ops.is_empty())
            .flat_map(|l| &l.noise_ops)
            .filter(|n| n.channel == PauliChannel::Depolarize1(rate))
            .count()
    }

    #[test]
    fn swap_noise_per_gate() {
        let noise = NoiseParams::new(0.001, Bias::Finite(100.0)).unwrap();
        for (nx, ny, k) in [(2, 3, 10usize), (4, 5, 26)] {
            let a = ArchitectureParams::new(nx, ny, 3, CodeVariant::Xzzx, MemoryBasis::H).unwrap();
            let c = build_memory_experiment(&a, &noise, 1).unwrap();
            assert_eq!(swap_events(&c, 0.8 * 0.001), c.two_qubit_gate_count() * k);
            assert_eq!(a.swaps_per_stabilizer() as usize, 4 * k);
            // ceil(k/2) hops before the first gate layer.
            let first_gate = c.layers.iter().position(|l| l.ideal_ops.iter().any(|o| o.kind.arity() == 2)).unwrap();
            let hops_before = c.layers[..first_gate].iter().rev().take_while(|l| l.ideal_ops.is_empty()).count();
            assert_eq!(hops_before, k.div_ceil(2));
        }
    }

    #[test]
    fn idle_mode_changes_swap_layers_only() {
        let a = arch(CodeVariant::Xzzx, MemoryBasis::H, 3);
        let mut noise = NoiseParams::new(0.001, Bias::Finite(100.0)).unwrap();
        let per_step = build_memory_experiment(&a, &noise, 1).unwrap();
        noise.idle_during_swaps = IdleDuringSwaps::Single;
        let single = build_memory_experiment(&a, &noise, 1).unwrap();
        let idles = |c: &Circuit| {
            c.layers
                .iter()
                .flat_map(|l| &l.noise_ops)
                .filter(|n| matches!(n.channel, PauliChannel::BiasedPauli1 { .. }))
                .count()
        };
        // Every hop layer idles all 17 qubits but its travellers.
        let hop_idle: usize = per_step
            .layers
            .iter()
            .filter(|l| l.ideal_ops.is_empty())
            .map(|l| 17 - l.noise_ops.iter().filter(|n| matches!(n.channel, PauliChannel::Depolarize1(_))).count())
            .sum();
        assert_eq!(idles(&per_step) - idles(&single), hop_idle);
        assert_eq!(per_step.two_qubit_gate_count(), single.two_qubit_gate_count());
    }

    #[test]
    fn xzzx_and_css_have_same_shape() {
        for d in [3, 5, 7] {
            let x = build_memory_experiment(&arch(CodeVariant::Xzzx, MemoryBasis::H, d), &NoiseParams::noiseless(), 2).unwrap();
            let c = build_memory_experiment(&arch(CodeVariant::Css, MemoryBasis::X, d), &NoiseParams::noiseless(), 2).unwrap();
            assert_eq!(x.num_qubits, c.num_qubits);
            assert_eq!(x.two_qubit_gate_count(), c.two_qubit_gate_count());
        }
    }

    #[test]
    fn initial_states_follow_memory_basis() {
        let first_resets = |variant, basis| {
            let c = build_memory_experiment(&arch(variant, basis, 3), &NoiseParams::noiseless(), 1).unwrap();
            c.layers[0].ideal_ops[..9].iter().map(|o| o.kind).collect::<Vec<_>>()
        };
        use OpKind::{ResetX as P, ResetZ as Z};
        assert_eq!(first_resets(CodeVariant::Xzzx, MemoryBasis::H), [P, Z, P, Z, P, Z, P, Z, P]);
        assert_eq!(first_resets(CodeVariant::Xzzx, MemoryBasis::V), [Z, P, Z, P, Z, P, Z, P, Z]);
        assert_eq!(first_resets(CodeVariant::Css, MemoryBasis::Z), [Z; 9]);
        assert_eq!(first_resets(CodeVariant::Css, MemoryBasis::X), [P; 9]);
    }

    #[test]
    fn rejects_zero_rounds() {
        let a = arch(CodeVariant::Css, MemoryBasis::Z, 3);
        assert_eq!(build_memory_experiment(&a, &NoiseParams::noiseless(), 0), Err(CircuitError::NoRounds));
    }
}
