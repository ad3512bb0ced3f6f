//! Reserve site selection for multiple species.
//!
//! The pipeline generates synthetic habitat landscapes, places species on
//! them, optionally projects the populations forward with a per-parcel
//! Lotka-Volterra model with crowding, and chooses which parcels to protect
//! under a budget by solving a 0/1 knapsack over weighted species counts.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod io;
pub mod landscape;
pub mod rational;
pub mod render;
pub mod solver;

pub use dynamics::{lv_step, round_counts, simulate, LVParams, SimulatedGrid};
pub use error::{Error, Result};
pub use experiment::{
    budget_sweep, build_species_suite, default_scenarios, similarity, summarize, weighted_comparison, Scenario,
    SimilarityStats, SpeciesSpec, SpeciesSuite, SweepRow,
};
pub use grid::{CountsGrid, RealGrid};
pub use landscape::{
    distribute_population, fragmentation, generate_landscape, select_extremes, FragmentationScore, Landscape,
};
pub use rational::Rational;
pub use render::{render_grid, RenderSpec};
pub use solver::{parcel_score, solve, solve_bruteforce, solve_dp, solve_topk, ReserveProblem, ReserveSolution};
