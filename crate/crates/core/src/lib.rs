//! Simulation of rotated surface-code memories on a shuttling spin-qubit
//! architecture: layout and footprint, circuit construction with SWAP
//! overhead, Pauli-frame sampling, detector error models, matching decoding
//! and threshold/overhead analysis.

pub mod analysis;
pub mod arch;
pub mod circuit;
pub mod decoder;
pub mod dem;
pub mod experiment;
pub mod frame;
pub mod io;
pub mod noise;
pub mod sensitivity;
pub mod tableau;
