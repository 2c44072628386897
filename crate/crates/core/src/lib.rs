//! Canonical polygonal schemas for closed orientable triangle meshes.
//!
//! The pipeline is: compute a greedy homotopy basis rooted at a vertex
//! ([`basis`]), detach the loops where they share edges by local mesh
//! refinement ([`detach`]), cut the refined mesh open along the now disjoint
//! loops and embed the resulting disk on a regular `4g`-gon ([`schema`]).
//! [`metrics`] measures growth and geometric deviation, [`synth`] generates
//! test meshes and [`bench`] runs growth sweeps.

pub mod basis;
pub mod bench;
pub mod detach;
pub mod geom;
pub mod mesh;
pub mod metrics;
pub mod par;
pub mod schema;
pub mod synth;
mod union_find;

pub use basis::{basis_for, globally_shortest_basis, greedy_basis, Loop, LoopSystem, RootChoice};
pub use detach::{detach_all, RefineConfig, RefinementReport, Strategy};
pub use mesh::{EdgeRef, TriMesh};
pub use par::Execution;
