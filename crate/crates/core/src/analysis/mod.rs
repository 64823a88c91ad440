//! Measure profiles along sequences, exact zero-window checks, uniform
//! lower-bound certification and the witness-pair search.

mod profile;
mod vector;
mod verdict;
mod witness;

pub use profile::{
    joint_profile, joint_profile_on, multiplicative_profile, multiplicative_profile_on, MeasureSeries, SeriesEntry,
    SeriesMode,
};
pub use vector::{normalize_vector, Reduction, Vector};
pub use verdict::{
    certify_v_alpha_lower, certify_v_alpha_lower_columns, is_resource_error, verify_zero_window, verify_zero_window_on,
    Evidence, SubsequenceRule, TypeVerdict, VerdictKind, GUARANTEE_KEY,
};
pub use witness::{height_terms, witness_pair_search, witness_pair_search_on, WitnessPair};
