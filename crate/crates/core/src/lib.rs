//! Planning and simulation toolkit for convex-territory perimeter defense.
//!
//! The crate is split the same way the workflow is:
//!
//! * [`geometry`]: territory polygon, perimeter arc-length arithmetic and the
//!   arrival-point predictor for maneuvering intruders.
//! * [`static_design`]: offline layout design (reserve stations, priority and
//!   monitoring regions, critical points, minimum monitoring team).
//! * [`assignment`]: spatio-temporal cost matrices and the exact multi-task
//!   assignment solver.
//! * [`dream`]: dynamic resource allocation that grows and shrinks the team.
//! * [`simulation`]: discrete-time episodes and Monte-Carlo batches.

pub mod assignment;
pub mod dream;
pub mod geometry;
pub mod simulation;
pub mod static_design;

pub use geometry::{ConvexPolygon, PerimeterPoint, Point2};
