//! Grid sweeps and the analysis of their results.

pub mod fit;
pub mod pc;
pub mod regions;
pub mod sweep;

pub use fit::{fit_exp_region, fit_log_region, fit_volume_log, FitModel, FitPoint, FitResult, FitWindow};
pub use pc::{estimate_pc, PcConfig, PcEstimate};
pub use regions::{classify_regions, Regime, RegionConfig, RegionLabel};
pub use sweep::{run_sweep, GridPoint, Schedule, SweepConfig, SweepRow, SweepTable};
