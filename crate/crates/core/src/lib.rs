//! Exact computations for rank-one transformations built by cutting and
//! stacking: columns and descendant sets, intersection measures as exact
//! rational enclosures, type verdicts along sequences, the builders of the
//! standard constructions, the vector order relations and an independent
//! interval-map oracle.

pub mod analysis;
pub mod builders;
mod descendants;
mod error;
mod kernel;
mod level;
mod measure;
pub mod oracle;
mod spec;
pub mod vectors;

pub use descendants::{descendants, materialize, push_to_column, DescendantSet};
pub use error::{Error, Result};
pub use level::{Level, LevelSet};
pub use measure::{intersection_measure, resolve_depth, MeasureBound, Resolution};
pub use spec::{
    column_stats, ColumnStats, ConstructionSpec, Limits, Stage, StageRule, Tower, DEFAULT_CARDINALITY_BUDGET,
    DEFAULT_DEPTH_CAP,
};

pub use analysis::{normalize_vector, MeasureSeries, TypeVerdict, Vector, VerdictKind};
pub use builders::BuilderParams;
pub use oracle::{oracle_intersection, realize, IntervalMap};
pub use vectors::{decide_le_m, decide_le_p, verify_witness, OrderWitness};
