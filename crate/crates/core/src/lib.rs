//! Random multipartite entangled states from repeated two-qubit gates.
//!
//! A register of N qubits starts in |00…0⟩. At every step a fixed two-qubit
//! gate acts on a randomly chosen pair of qubits, followed by independent
//! Haar-random rotations of those two qubits. Averaged over many
//! realizations, the multipartite entanglement of the state approaches the
//! Haar value exponentially in the number of gates.
//!
//! Modules:
//!
//! * [`qstate`]: statevector, gates, Haar U(2) sampling;
//! * [`entanglement`]: marginals and the level / global measures;
//! * [`haar_baseline`]: Haar-average saturation values;
//! * [`protocol`]: ensembles, ΔE trajectories, convergence and decay rates;
//! * [`brachistochrone`]: time-optimal gate durations and φ sweeps;
//! * [`output`]: CSV and JSON result files.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod brachistochrone;
pub mod entanglement;
mod error;
pub mod haar_baseline;
pub mod linalg;
pub mod output;
pub mod protocol;
pub mod qstate;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use rng::RngStream;
pub use scalar::Real;

pub use entanglement::{Bipartition, MeasureKind};
pub use protocol::{Convergence, DecayFit, GeometryKind, Level};

pub type StateVector64 = qstate::StateVector<f64>;
pub type StateVector32 = qstate::StateVector<f32>;
pub type SingleQubitGate64 = qstate::SingleQubitGate<f64>;
pub type TwoQubitGate64 = qstate::TwoQubitGate<f64>;
pub type DensityMatrix64 = entanglement::DensityMatrix<f64>;
pub type EntanglementProfile64 = entanglement::EntanglementProfile<f64>;
pub type BaselineTable64 = haar_baseline::BaselineTable<f64>;
pub type ProtocolConfig64 = protocol::ProtocolConfig<f64>;
pub type Trajectory64 = protocol::Trajectory<f64>;
pub type ConvergenceReport64 = protocol::ConvergenceReport<f64>;
pub type SweepTable64 = brachistochrone::SweepTable<f64>;
