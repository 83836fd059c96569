//! Path simulation and benchmark scenarios.

mod branching;
mod dataset;
mod expected;
mod scenario;

pub use branching::{sample_path, BranchingSampler};
pub use dataset::sample_dataset;
pub use expected::expected_counts;
pub use scenario::{
    block_radii, block_sizes, make_scenario, ClassStructure, MixtureSpec, ScenarioName, ScenarioSpec,
    StructureReport, StructureTargets, SPARSITY_TOLERANCE,
};
