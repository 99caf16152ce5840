//! Simulation of parity-check entanglement distillation for two identical
//! qubits (bosons or fermions) distributed over two spatial modes.
//!
//! The pipeline is: prepare a two-particle state, apply local noise, send
//! both particles through a 50:50 beam splitter and measure whether they
//! left in different spatial modes (odd parity) or the same one (even).
//! Everything is exact dense linear algebra on the 10- (boson) or
//! 6-dimensional (fermion) two-particle sector.

pub mod channels;
pub mod cli;
pub mod detector;
pub mod elements;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod numfmt;
pub mod oracle;
pub mod po_equiv;
pub mod protocol;
pub mod random;
pub mod verify;

pub use error::{Error, Result};
