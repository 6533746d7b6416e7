//! Mixed-state stabilizer simulation of random Clifford circuits with
//! monitored and unmonitored measurements, plus the classical replica
//! statistical-mechanics model built on symmetric-group weights.

pub mod analysis;
pub mod bits;
pub mod clifford;
pub mod dense;
pub mod entanglement;
pub mod error;
pub mod measurement;
pub mod pauli;
pub mod perm;
pub mod protocol;
pub mod scalar;
pub mod stabilizer;
pub mod statmech;
pub mod weingarten;

#[cfg(test)]
mod testutil;

pub use bits::{rank_gf2, BitVec};
pub use clifford::CliffordGate;
pub use entanglement::{entropy_of_region, half_chain_report, mutual_information, EntropyReport, Region};
pub use error::{Error, Result};
pub use measurement::{measure_monitored, measure_unmonitored, MeasurementKind, MeasurementOutcome};
pub use pauli::{Pauli, PauliOperator};
pub use perm::Permutation;
pub use protocol::{run_trajectory, step, InitialState, ProtocolParams, Streams, TrajectoryRecord};
pub use scalar::Scalar;
pub use stabilizer::StabilizerState;
pub use statmech::{BondWeights, HoneycombPatch};
pub use weingarten::{weingarten_table, WeingartenTable};

/// Exact scalar for weights and partition functions.
pub type Exact = num_rational::BigRational;
/// Default floating-point scalar.
pub type Real = f64;
pub type ExactWeights = BondWeights<Exact>;
pub type RealWeights = BondWeights<Real>;
