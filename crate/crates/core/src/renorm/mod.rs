//! Space-time blocks, their classification and the derived counts (d = 1).

pub mod animal;
pub mod bounds;
pub mod classify;
pub mod coverage;
pub mod geometry;
pub mod params;
pub mod phi;
pub mod separation;
pub mod stream;
pub mod sweep;
pub mod tails;

pub use animal::{is_connected, lattice_animal, visited_blocks, LatticeAnimal};
pub use bounds::{chernoff_bound, chernoff_bound_for, log_chernoff_bound, log_poisson_cdf, theta_admissible, DEFAULT_THETA};
pub use classify::{classify_blocks, classify_with_threshold, BlockClassification, BlockLabel, BLOCKS_SCHEMA};
pub use coverage::{
    block_covered, closed_loop, coverage_event, estimate_f_r, mu_1, pedestal_event, u_r, ClosedLoop, CoverageVerdict,
    FEstimate, Placement, Proportion,
};
pub use geometry::{layers_for, spatial_bound, BlockGeometry, BlockGrid, PathClass, Rect};
pub use params::{
    check_constants, gamma_product, gamma_recursion, gamma_sequence, ConstantsReport, ConstantsRow, RenormParams,
    TheoremParameters,
};
pub use phi::{phi_r, phi_sup_dp, time_in_bad, LayerDomain, PhiDomain, DEFAULT_STATE_BUDGET};
pub use separation::{greedy_separated, separated_family, SeparationMode};
pub use stream::{stream_classify, BandFocus, StreamOptions, StreamOutcome, STREAM_MAX_EVENTS};
pub use sweep::{BlockRecord, BlockSweep, LayerRange};
pub use tails::{
    measure_proposition_tails, tail_counts, tail_replica, ReplicaStatus, TailCounts, TailEvents, TailReport, TailRow,
    TailSample, TailThresholds, TAILS_SCHEMA,
};
