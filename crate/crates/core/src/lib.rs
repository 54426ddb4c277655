//! Survivor sets of the b-adic shift with moving holes: exact counting,
//! structural schedules, Pisot constants, dimension estimates and joint
//! spectral radius checks.

pub mod counting;
pub mod dimension;
pub mod error;
pub mod jsr;
pub mod model;
pub mod schedules;
pub mod spectra;

pub use counting::{
    adjacency_matrix, count_exact, count_from_prefix, count_series, exact_series, log_series,
    nvec_step, product_norm, BitMatrix, Counter, LogSeries, Mode, NVector, Series, StateVector,
};
pub use dimension::{
    estimate_dims, family_checkpoints, moran_bound, predict_dims, regularity_ratios, DimReport,
    PredictedDims,
};
pub use error::{Error, Result};
pub use jsr::{
    finiteness_check, jsr_report, jsr_upper_exhaustive, jsr_upper_po, Exhaustive, Finiteness,
    JsrReport, DEFAULT_BUDGET,
};
pub use model::{parse_digits, parse_word, Params, Word, MAX_BASE};
pub use schedules::{
    build_pq_schedule, classify_position, classify_range, conformance, pattern_density, GapMode,
    HoleSchedule, PQSchedule, PatternClass, Rational, Rule, SeedStream,
};
pub use spectra::{
    b_power_closed, dominant_root, lambda_pq, pisot_conjugates, spectral_radius, struct_matrices,
    IntMatrix, LambdaPq, Poly, RootKind, RootResult,
};
