//! Classical replica model on the anisotropic honeycomb lattice: Weingarten
//! weights on vertical bonds, measurement and dephasing weights on zigzag
//! bonds, and partition functions with pinned boundaries.

pub mod audit;
pub mod partition;
pub mod patch;
pub mod weights;

pub use audit::{symmetry_audit, SymmetryReport, SymmetryVerdict, Witness};
pub use partition::{
    partition_function, renyi_from_partition, Boundary, Engine, BRUTE_FORCE_LIMIT, TRANSFER_DIM_LIMIT,
};
pub use patch::{BottomAttachment, HoneycombPatch};
pub use weights::{k_matrix_element, large_d_correction, large_d_weight, w_km, BondWeights};
