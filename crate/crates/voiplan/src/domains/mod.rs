//! Benchmark domains.
//!
//! Each domain is a builder struct with overridable parameters. Small
//! instances materialize an explicit [`DiscretePomdp`](crate::DiscretePomdp)
//! for exact cross-checks; large instances implement
//! [`GenerativeModel`](crate::GenerativeModel) directly and refuse explicit
//! materialization once the tables would exceed [`EXPLICIT_ENTRY_CAP`].

pub mod fvrs;
pub mod tiger;
pub mod tracking;

pub use fvrs::FvrsModel;
pub use tiger::TigerModel;
pub use tracking::TrackingModel;

/// Maximum number of table entries (`|S|²·|A|` transition plus
/// `|S|·|A|·|O|` observation) a domain will materialize explicitly.
///
/// Above this, explicit construction returns
/// [`Error::InfeasibleExplicitModel`](crate::Error::InfeasibleExplicitModel):
/// exact solvers are for desk-scale cross-checks, not production instances.
pub const EXPLICIT_ENTRY_CAP: usize = 1_000_000;
