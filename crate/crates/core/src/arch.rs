//! SpinHex unit-cell geometry and the closed-form resource model.
//!
//! A SpinHex device is parameterised by the number of couplers on its
//! horizontal 1D arrays (`n_x`) and on its diagonal arrays (`n_y`). Every
//! two-qubit stabilizer gate has to shuttle the measurement qubit across the
//! unit cell with SWAPs, and the same geometry fixes how many physical qubits
//! and how much chip area a logical qubit needs.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArchError {
    #[error("n_x must be at least 2 (got {0})")]
    NxTooSmall(u32),
    #[error("n_y must be at least 3 (got {0})")]
    NyTooSmall(u32),
    #[error("code distance must be an odd integer >= 3 (got {0})")]
    BadDistance(u32),
    #[error("memory basis {basis} is not valid for the {variant} code")]
    BasisMismatch { variant: CodeVariant, basis: MemoryBasis },
    #[error("number of logical qubits must be at least 1")]
    NoLogicalQubits,
    #[error("overhead factor must be >= 1 (got {0})")]
    BadOverhead(f64),
    #[error("device geometry lengths must be positive")]
    BadGeometry,
    #[error("unknown {what} `{value}`")]
    Parse { what: &'static str, value: String },
}

/// Stabilizer flavour of the rotated planar code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CodeVariant {
    /// Clifford-deformed code, every check is `X Z Z X`.
    #[serde(rename = "xzzx")]
    Xzzx,
    /// Pure X and pure Z checks.
    #[serde(rename = "css")]
    Css,
}

/// Which logical state the memory experiment preserves.
///
/// `H`/`V` are the horizontal and vertical memories of the XZZX code, `X`/`Z`
/// the usual memories of the CSS code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MemoryBasis {
    H,
    V,
    X,
    Z,
}

impl MemoryBasis {
    pub fn is_legal_for(self, variant: CodeVariant) -> bool {
        matches!(
            (variant, self),
            (CodeVariant::Xzzx, MemoryBasis::H | MemoryBasis::V)
                | (CodeVariant::Css, MemoryBasis::X | MemoryBasis::Z)
        )
    }

    /// True when the logical observable is a horizontal string, i.e. the
    /// memory is the image of the CSS X memory.
    pub fn is_horizontal(self) -> bool {
        matches!(self, MemoryBasis::H | MemoryBasis::X)
    }
}

impl fmt::Display for CodeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeVariant::Xzzx => "xzzx",
            CodeVariant::Css => "css",
        })
    }
}

impl fmt::Display for MemoryBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemoryBasis::H => "H",
            MemoryBasis::V => "V",
            MemoryBasis::X => "X",
            MemoryBasis::Z => "Z",
        })
    }
}

impl FromStr for CodeVariant {
    type Err = ArchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xzzx" => Ok(CodeVariant::Xzzx),
            "css" => Ok(CodeVariant::Css),
            _ => Err(ArchError::Parse { what: "code variant", value: s.to_string() }),
        }
    }
}

impl FromStr for MemoryBasis {
    type Err = ArchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "H" => Ok(MemoryBasis::H),
            "V" => Ok(MemoryBasis::V),
            "X" => Ok(MemoryBasis::X),
            "Z" => Ok(MemoryBasis::Z),
            _ => Err(ArchError::Parse { what: "memory basis", value: s.to_string() }),
        }
    }
}

/// Unit-cell shape plus the code laid out on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArchitectureParams {
    pub n_x: u32,
    pub n_y: u32,
    pub distance: u32,
    pub variant: CodeVariant,
    pub basis: MemoryBasis,
}

impl ArchitectureParams {
    pub fn new(
        n_x: u32,
        n_y: u32,
        distance: u32,
        variant: CodeVariant,
        basis: MemoryBasis,
    ) -> Result<Self, ArchError> {
        let params = Self { n_x, n_y, distance, variant, basis };
        params.validate()?;
        Ok(params)
    }

    /// XZZX horizontal memory, the configuration used for most results.
    pub fn xzzx(n_x: u32, n_y: u32, distance: u32) -> Result<Self, ArchError> {
        Self::new(n_x, n_y, distance, CodeVariant::Xzzx, MemoryBasis::H)
    }

    pub fn validate(&self) -> Result<(), ArchError> {
        if self.n_x < 2 {
            return Err(ArchError::NxTooSmall(self.n_x));
        }
        if self.n_y < 3 {
            return Err(ArchError::NyTooSmall(self.n_y));
        }
        if self.distance < 3 || self.distance % 2 == 0 {
            return Err(ArchError::BadDistance(self.distance));
        }
        if !self.basis.is_legal_for(self.variant) {
            return Err(ArchError::BasisMismatch { variant: self.variant, basis: self.basis });
        }
        Ok(())
    }

    /// SWAPs added around every CZ/CX of the stabilizer circuit: `4(n_x + n_y) - 10`.
    pub fn swaps_per_gate(&self) -> u32 {
        4 * (self.n_x + self.n_y) - 10
    }

    /// SWAPs per weight-4 stabilizer measurement: `8[2 n_x - 1 + 2(n_y - 2)]`.
    pub fn swaps_per_stabilizer(&self) -> u32 {
        8 * (2 * self.n_x - 1 + 2 * (self.n_y - 2))
    }

    pub fn default_rounds(&self) -> u32 {
        3 * self.distance
    }
}

/// Physical sizes entering the footprint estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceGeometry {
    /// Quantum-dot diameter (pitch) in nm.
    pub dot_pitch_nm: f64,
    /// Multi-electron coupler diameter in nm.
    pub coupler_diameter_nm: f64,
}

impl Default for DeviceGeometry {
    fn default() -> Self {
        Self { dot_pitch_nm: 100.0, coupler_diameter_nm: 500.0 }
    }
}

impl DeviceGeometry {
    /// Length of one double-dot plus one coupler along an array, in nm.
    fn segment_nm(&self) -> f64 {
        2.0 * self.dot_pitch_nm + self.coupler_diameter_nm
    }
}

/// Counts and areas for one logical qubit on an `(n_x, n_y)` device.
///
/// Lengths are in nm, areas in µm².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintReport {
    pub n_x: u32,
    pub n_y: u32,
    pub distance: u32,
    pub couplers_per_square: u64,
    pub double_dots_per_square: u64,
    pub array_length_x: f64,
    pub array_length_y: f64,
    pub square_area_bound: f64,
    pub couplers_per_logical: u64,
    pub qubits_per_logical: u64,
    pub area_per_logical: f64,
    pub connection_island_area: f64,
    pub swaps_per_gate: u64,
    pub swaps_per_stabilizer: u64,
}

impl FootprintReport {
    /// Flat `key = value` listing, one entry per line.
    pub fn to_text(&self) -> String {
        let rows: [(&str, String); 14] = [
            ("nx", self.n_x.to_string()),
            ("ny", self.n_y.to_string()),
            ("d", self.distance.to_string()),
            ("couplers_per_square", self.couplers_per_square.to_string()),
            ("double_dots_per_square", self.double_dots_per_square.to_string()),
            ("array_length_x_nm", format!("{}", self.array_length_x)),
            ("array_length_y_nm", format!("{}", self.array_length_y)),
            ("square_area_bound_um2", format!("{:.4}", self.square_area_bound)),
            ("couplers_per_logical", self.couplers_per_logical.to_string()),
            ("qubits_per_logical", self.qubits_per_logical.to_string()),
            ("area_per_logical_um2", format!("{:.4}", self.area_per_logical)),
            ("connection_island_area_um2", format!("{:.4}", self.connection_island_area)),
            ("swaps_per_gate", self.swaps_per_gate.to_string()),
            ("swaps_per_stabilizer", self.swaps_per_stabilizer.to_string()),
        ];
        rows.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

pub fn footprint(params: &ArchitectureParams) -> Result<FootprintReport, ArchError> {
    footprint_with_geometry(params, &DeviceGeometry::default())
}

pub fn footprint_with_geometry(
    params: &ArchitectureParams,
    geometry: &DeviceGeometry,
) -> Result<FootprintReport, ArchError> {
    params.validate()?;
    if !(geometry.dot_pitch_nm > 0.0 && geometry.coupler_diameter_nm > 0.0) {
        return Err(ArchError::BadGeometry);
    }
    let nx = params.n_x as u64;
    let ny = params.n_y as u64;
    let d = params.distance as u64;
    let squares = d * d - 1;

    let couplers_per_square = 2 * nx + 4 * (ny - 2);
    let double_dots_per_square = 2 * (nx - 1) + 4 * (ny - 1);
    let seg = geometry.segment_nm();
    let lx = seg * (nx - 1) as f64;
    let ly = seg * (ny - 1) as f64;
    // nm² -> µm²
    let square_area_bound = 4.0 * (lx + ly) * ly * 1e-6;
    let connection_island_area = lx * ly * 1e-6;

    Ok(FootprintReport {
        n_x: params.n_x,
        n_y: params.n_y,
        distance: params.distance,
        couplers_per_square,
        double_dots_per_square,
        array_length_x: lx,
        array_length_y: ly,
        square_area_bound,
        couplers_per_logical: couplers_per_square * squares,
        qubits_per_logical: 2 * double_dots_per_square * squares,
        area_per_logical: square_area_bound * squares as f64,
        connection_island_area,
        swaps_per_gate: params.swaps_per_gate() as u64,
        swaps_per_stabilizer: params.swaps_per_stabilizer() as u64,
    })
}

/// Chip area in cm² for `n_logical` logical qubits, scaled by
/// `overhead_factor` for factories and routing.
pub fn chip_area(
    params: &ArchitectureParams,
    n_logical: u64,
    overhead_factor: f64,
) -> Result<f64, ArchError> {
    if n_logical == 0 {
        return Err(ArchError::NoLogicalQubits);
    }
    if !(overhead_factor >= 1.0) {
        return Err(ArchError::BadOverhead(overhead_factor));
    }
    let report = footprint(params)?;
    // 1 cm² = 1e8 µm²
    Ok(report.area_per_logical * n_logical as f64 * overhead_factor * 1e-8)
}
