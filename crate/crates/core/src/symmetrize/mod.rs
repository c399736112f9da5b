//! Steiner symmetrization of polyhedral sets and the monotonicity checks
//! that go with it.

mod partition;
mod steiner;
mod verify;

pub use partition::{chord_partition, Affine, Cell, CellShape, ChordPartition, Frame};
pub use steiner::{steiner, steiner_with, Perturbation, SteinerResult};
pub(crate) use partition::{clip, signed_area};
pub use verify::{
    iterate_symmetrization, polar_inclusion_check, verify_monotonicity, verify_rounding, InclusionReport, MonotonicityReport,
    RoundingReport, SymmetrizationTrace, TraceRow,
};
