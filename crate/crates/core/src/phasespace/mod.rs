//! Wigner-function evolution under the Fokker–Planck master equation.

pub mod cat;
pub mod coherence;
pub mod grid;
pub mod moments;
pub mod predictors;
pub mod solver;

pub use cat::{cat_wigner, default_grid, CatGeometry, CatStateSpec, Parity};
pub use coherence::{coherence_factor, CoherenceSeries};
pub use grid::{GridSpec, WignerGrid};
pub use moments::{
    gaussian_moment_evolution, moment_trajectory, steady_state, CoefficientSchedule, Coefficients, GaussianState,
};
pub use predictors::{decoherence_time_predictors, DecoherencePredictors};
pub use solver::{evolve_fokker_planck, max_stable_dt, Snapshot, SolverOptions, Trajectory};
