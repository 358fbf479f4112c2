//! Finite-ensemble statistics and resource accounting.

mod chernoff;
mod qcb;
mod resources;

pub use chernoff::{
    chernoff_bound, confidence_equalize, good_statistics_samples, required_samples, total_measurements,
    ChernoffQuery, ProbabilityAssumption, SettingBudget, TotalMeasurements,
};
pub use qcb::{chi_distance_metrics, quantum_chernoff_bound, ChiDistance, QcbResult};
pub use resources::{resource_table, NuGroup, ResourceRow, Scheme, MAX_RESOURCE_QUBITS};
