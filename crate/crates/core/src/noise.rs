//! Circuit-level noise model tailored to the SpinHex device.
//!
//! All rates are expressed relative to the two-qubit gate error `p`:
//!
//! | context             | channel                         | total rate       |
//! |---------------------|---------------------------------|------------------|
//! | CX / CZ             | two-qubit depolarizing          | `p`              |
//! | H                   | single-qubit depolarizing       | `p/10`           |
//! | reset               | prepares the orthogonal state   | `2p`             |
//! | measurement         | flips the recorded result       | `2p`             |
//! | SWAP hop            | single-qubit depolarizing       | `0.8p`           |
//! | idle in layer `L`   | biased Pauli with bias `eta`    | `xi(L) * p/10`   |

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("base error rate p must lie in [0, 0.1] (got {0})")]
    BadRate(f64),
    #[error("bias eta must be positive (got {0})")]
    BadBias(f64),
    #[error("xi scaling must be non-negative (got {0})")]
    BadXi(f64),
    #[error("channel total rate {0} exceeds 1")]
    RateAboveOne(f64),
    #[error("no noise channel is defined for context {0:?}")]
    UnknownContext(NoiseContext),
    #[error("cannot parse `{0}`")]
    Parse(String),
}

/// Single-qubit Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

/// One elementary fault a channel can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fault {
    /// Pauli on the first (or only) target.
    Single(Pauli),
    /// Pauli pair on the two targets, not both identity.
    Pair(Pauli, Pauli),
    /// Classical flip of the measurement result recorded on the target.
    RecordFlip,
}

/// Dephasing bias `eta = p_z / (p_x + p_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Bias {
    Finite(f64),
    /// Pure dephasing.
    Infinite,
}

impl Bias {
    pub fn validate(self) -> Result<(), NoiseError> {
        match self {
            Bias::Finite(eta) if !(eta > 0.0 && eta.is_finite()) => Err(NoiseError::BadBias(eta)),
            _ => Ok(()),
        }
    }

    /// Split a total idle rate into `(p_x, p_y, p_z)`.
    pub fn split(self, total: f64) -> (f64, f64, f64) {
        match self {
            Bias::Finite(eta) => {
                let pxy = total / (2.0 * (1.0 + eta));
                (pxy, pxy, eta * total / (1.0 + eta))
            }
            Bias::Infinite => (0.0, 0.0, total),
        }
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bias::Finite(eta) => write!(f, "{eta}"),
            Bias::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Bias {
    type Err = NoiseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Bias::Infinite);
        }
        let eta: f64 = t.parse().map_err(|_| NoiseError::Parse(s.to_string()))?;
        let bias = Bias::Finite(eta);
        bias.validate()?;
        Ok(bias)
    }
}

impl TryFrom<String> for Bias {
    type Error = NoiseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Bias> for String {
    fn from(b: Bias) -> String {
        b.to_string()
    }
}

/// How qubits that sit out a SWAP hop accrue idling noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdleDuringSwaps {
    /// One idle event per SWAP step.
    PerStep,
    /// One idle event per composite (SWAP-wrapped) two-qubit gate.
    Single,
}

impl FromStr for IdleDuringSwaps {
    type Err = NoiseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "per_step" => Ok(IdleDuringSwaps::PerStep),
            "single" => Ok(IdleDuringSwaps::Single),
            _ => Err(NoiseError::Parse(s.to_string())),
        }
    }
}

/// Kind of time step, which sets the idle scaling `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerKind {
    Reset,
    SingleQubit,
    TwoQubit,
    Swap,
    Measure,
}

/// Ideal operations that carry their own noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    ResetZ,
    ResetX,
    H,
    Cx,
    Cz,
    MeasureZ,
    MeasureX,
}

impl OpKind {
    pub fn arity(self) -> usize {
        match self {
            OpKind::Cx | OpKind::Cz => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OpKind::ResetZ => "RESET_Z",
            OpKind::ResetX => "RESET_X",
            OpKind::H => "H",
            OpKind::Cx => "CX",
            OpKind::Cz => "CZ",
            OpKind::MeasureZ => "MEASURE_Z",
            OpKind::MeasureX => "MEASURE_X",
        }
    }

    pub fn from_name(name: &str) -> Option<OpKind> {
        Some(match name {
            "RESET_Z" => OpKind::ResetZ,
            "RESET_X" => OpKind::ResetX,
            "H" => OpKind::H,
            "CX" => OpKind::Cx,
            "CZ" => OpKind::Cz,
            "MEASURE_Z" => OpKind::MeasureZ,
            "MEASURE_X" => OpKind::MeasureX,
            _ => return None,
        })
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, OpKind::MeasureZ | OpKind::MeasureX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseContext {
    Op(OpKind),
    SwapHop,
    Idle(LayerKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub p: f64,
    pub eta: Bias,
    /// Idle scaling applied while other qubits are being reset.
    pub xi_reset: f64,
    pub idle_during_swaps: IdleDuringSwaps,
    /// Replaces the `0.8 p` SWAP-hop rate when set.
    pub swap_rate_override: Option<f64>,
}

impl NoiseParams {
    pub const XI_TWO_QUBIT: f64 = 1.0;
    pub const XI_SINGLE_QUBIT: f64 = 0.1;
    pub const XI_READOUT: f64 = 7.0;
    pub const DEFAULT_XI_RESET: f64 = 7.0;

    pub fn new(p: f64, eta: Bias) -> Result<Self, NoiseError> {
        let n = Self {
            p,
            eta,
            xi_reset: Self::DEFAULT_XI_RESET,
            idle_during_swaps: IdleDuringSwaps::PerStep,
            swap_rate_override: None,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn noiseless() -> Self {
        Self::new(0.0, Bias::Finite(1.0)).expect("zero noise is valid")
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..=0.1).contains(&self.p) {
            return Err(NoiseError::BadRate(self.p));
        }
        self.eta.validate()?;
        if !(self.xi_reset >= 0.0 && self.xi_reset.is_finite()) {
            return Err(NoiseError::BadXi(self.xi_reset));
        }
        if let Some(s) = self.swap_rate_override {
            if !(0.0..=1.0).contains(&s) {
                return Err(NoiseError::RateAboveOne(s));
            }
        }
        let idle_max = Self::XI_READOUT.max(self.xi_reset) * self.p / 10.0;
        if idle_max > 1.0 {
            return Err(NoiseError::RateAboveOne(idle_max));
        }
        Ok(())
    }

    pub fn single_qubit_rate(&self) -> f64 {
        self.p / 10.0
    }

    pub fn spam_rate(&self) -> f64 {
        2.0 * self.p
    }

    /// Only 12 of the 15 two-qubit Paulis of a SWAP touch the moved qubit.
    pub fn swap_rate(&self) -> f64 {
        self.swap_rate_override.unwrap_or(0.8 * self.p)
    }

    pub fn idle_base(&self) -> f64 {
        self.p / 10.0
    }

    pub fn xi(&self, layer: LayerKind) -> f64 {
        match layer {
            LayerKind::Reset => self.xi_reset,
            LayerKind::SingleQubit => Self::XI_SINGLE_QUBIT,
            LayerKind::TwoQubit | LayerKind::Swap => Self::XI_TWO_QUBIT,
            LayerKind::Measure => Self::XI_READOUT,
        }
    }
}

/// Stochastic Pauli channel attached to one or two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PauliChannel {
    Depolarize1(f64),
    Depolarize2(f64),
    BiasedPauli1 { p_idle: f64, eta: Bias },
    XFlip(f64),
    ZFlip(f64),
    MeasureFlip(f64),
}

impl PauliChannel {
    pub fn arity(&self) -> usize {
        match self {
            PauliChannel::Depolarize2(_) => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PauliChannel::Depolarize1(_) => "DEPOLARIZE1",
            PauliChannel::Depolarize2(_) => "DEPOLARIZE2",
            PauliChannel::BiasedPauli1 { .. } => "BIASED_PAULI1",
            PauliChannel::XFlip(_) => "X_FLIP",
            PauliChannel::ZFlip(_) => "Z_FLIP",
            PauliChannel::MeasureFlip(_) => "MEASURE_FLIP",
        }
    }

    pub fn total_rate(&self) -> f64 {
        match *self {
            PauliChannel::Depolarize1(p)
            | PauliChannel::Depolarize2(p)
            | PauliChannel::XFlip(p)
            | PauliChannel::ZFlip(p)
            | PauliChannel::MeasureFlip(p) => p,
            PauliChannel::BiasedPauli1 { p_idle, .. } => p_idle,
        }
    }

    /// Every fault with its probability; zero-probability faults are kept so
    /// the list has a fixed shape per channel kind.
    pub fn components(&self) -> Vec<(Fault, f64)> {
        match *self {
            PauliChannel::Depolarize1(p) => {
                Pauli::NON_IDENTITY.iter().map(|&q| (Fault::Single(q), p / 3.0)).collect()
            }
            PauliChannel::Depolarize2(p) => {
                let mut out = Vec::with_capacity(15);
                for a in Pauli::ALL {
                    for b in Pauli::ALL {
                        if (a, b) != (Pauli::I, Pauli::I) {
                            out.push((Fault::Pair(a, b), p / 15.0));
                        }
                    }
                }
                out
            }
            PauliChannel::BiasedPauli1 { p_idle, eta } => {
                let (px, py, pz) = eta.split(p_idle);
                vec![
                    (Fault::Single(Pauli::X), px),
                    (Fault::Single(Pauli::Y), py),
                    (Fault::Single(Pauli::Z), pz),
                ]
            }
            PauliChannel::XFlip(p) => vec![(Fault::Single(Pauli::X), p)],
            PauliChannel::ZFlip(p) => vec![(Fault::Single(Pauli::Z), p)],
            PauliChannel::MeasureFlip(p) => vec![(Fault::RecordFlip, p)],
        }
    }

    /// Numeric arguments as they appear in the circuit text format.
    pub fn args(&self) -> Vec<String> {
        match *self {
            PauliChannel::BiasedPauli1 { p_idle, eta } => vec![p_idle.to_string(), eta.to_string()],
            _ => vec![self.total_rate().to_string()],
        }
    }

    pub fn from_parts(name: &str, args: &[&str]) -> Result<PauliChannel, NoiseError> {
        let num = |i: usize| -> Result<f64, NoiseError> {
            args.get(i)
                .ok_or_else(|| NoiseError::Parse(name.to_string()))?
                .parse::<f64>()
                .map_err(|_| NoiseError::Parse(args[i].to_string()))
        };
        let expected = if name == "BIASED_PAULI1" { 2 } else { 1 };
        if args.len() != expected {
            return Err(NoiseError::Parse(format!("{name} expects {expected} argument(s)")));
        }
        let ch = match name {
            "DEPOLARIZE1" => PauliChannel::Depolarize1(num(0)?),
            "DEPOLARIZE2" => PauliChannel::Depolarize2(num(0)?),
            "BIASED_PAULI1" => PauliChannel::BiasedPauli1 { p_idle: num(0)?, eta: args[1].parse()? },
            "X_FLIP" => PauliChannel::XFlip(num(0)?),
            "Z_FLIP" => PauliChannel::ZFlip(num(0)?),
            "MEASURE_FLIP" => PauliChannel::MeasureFlip(num(0)?),
            _ => return Err(NoiseError::Parse(name.to_string())),
        };
        let rate = ch.total_rate();
        if !(0.0..=1.0).contains(&rate) {
            return Err(NoiseError::RateAboveOne(rate));
        }
        Ok(ch)
    }
}

/// The channel applied in a given context.
pub fn channel_for(context: NoiseContext, noise: &NoiseParams) -> Result<PauliChannel, NoiseError> {
    noise.validate()?;
    let ch = match context {
        NoiseContext::Op(OpKind::Cx | OpKind::Cz) => PauliChannel::Depolarize2(noise.p),
        NoiseContext::Op(OpKind::H) => PauliChannel::Depolarize1(noise.single_qubit_rate()),
        NoiseContext::Op(OpKind::ResetZ) => PauliChannel::XFlip(noise.spam_rate()),
        NoiseContext::Op(OpKind::ResetX) => PauliChannel::ZFlip(noise.spam_rate()),
        NoiseContext::Op(OpKind::MeasureZ | OpKind::MeasureX) => {
            PauliChannel::MeasureFlip(noise.spam_rate())
        }
        NoiseContext::SwapHop => PauliChannel::Depolarize1(noise.swap_rate()),
        NoiseContext::Idle(layer) => PauliChannel::BiasedPauli1 {
            p_idle: noise.xi(layer) * noise.idle_base(),
            eta: noise.eta,
        },
    };
    if ch.total_rate() > 1.0 {
        return Err(NoiseError::RateAboveOne(ch.total_rate()));
    }
    Ok(ch)
}
