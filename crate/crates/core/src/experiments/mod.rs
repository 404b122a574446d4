//! Closed-form specialisations for sparse inputs and the figure sweeps.

pub mod closed_form;
pub mod record;
pub mod sweeps;

pub use closed_form::{
    coherent_particles_closed_form, output_block, reduced_pair_cov, second_moment_particles,
    single_mode_output_blocks, squeezed_thermal_particles, squeezed_thermal_sigma11,
    two_mode_output_blocks, LowestModeBlocks, OutputBlock, SparseInput,
};
pub use record::{HeatmapGrid, SweepRecord, Value};
pub use sweeps::{
    coherent_phase_sweep, convergence_study, entanglement_distribution, negativity_vs_particles,
    linspace, pair_negativity, phase_averaged_coherent, phase_grid, squeezing_temperature_scan, thermal_death_threshold,
    single_mode_sweep, InitialState, Observable, SingleModeFamily, SingleModeParams,
    SweepParameter, SqueezingThreshold, TemperatureScan,
};

/// Default cutoff for the figure data sets.
pub const DEFAULT_CUTOFF: usize = 64;

/// Default heatmap extent (modes per side).
pub const DEFAULT_HEATMAP_SIZE: usize = 6;

/// Thermal occupations of the temperature scan.
pub const DEFAULT_NBARS: [f64; 4] = [0.0, 5.0, 10.0, 15.0];
