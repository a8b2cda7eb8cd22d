//! Coregularity and complete-intersection deciders for quiver settings.
//!
//! A quiver setting is a directed multigraph together with a positive
//! dimension vector. The crate implements the reduction calculus on settings,
//! local quivers, primitive-cycle counting, minimal generator counts for the
//! toric ideal of relations, and forbidden-descendant search. Every verdict
//! carries a certificate that can be checked independently.

pub mod classify;
pub mod corpus;
pub mod cycles;
pub mod error;
pub mod local;
pub mod quiver;
pub mod reductions;
pub mod toric;
pub mod trace;

pub use error::{Error, Result};
pub use quiver::{Arrow, ArrowId, QuiverSetting, Vertex, VertexId};
pub use trace::{ReductionTrace, Step, StepKind};
