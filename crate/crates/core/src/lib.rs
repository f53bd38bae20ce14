//! C² cubic splines on triangulations refined by the cubic Wang–Shi split.
//!
//! Every triangle of a mesh is split by the complete graph on the nine
//! points dividing its edges into thirds. On each such macro-triangle the
//! spline space has dimension 28 and is spanned by a nonnegative
//! partition-of-unity basis of scaled cubic simplex splines. The crate
//! provides
//!
//! * [`mesh`]: triangulation ingestion with global edge frames,
//! * [`geometry`]: the exact line arrangement of the split (75 cells),
//! * [`simplex`]: simplex spline evaluation by knot-removal recurrences,
//! * [`basis`]: the 28-function basis and its dual (Marsden) polynomials,
//! * [`hermite`]: the 28 Hermite functionals and the collocation matrix,
//! * [`reduction`]: reduced local spaces that still contain cubics,
//! * [`global`]: assembly of global C² spaces over a mesh,
//! * [`verify`]: the verification checks behind `ws3 check`.
//!
//! Batch work (grid evaluation, per-triangle assembly, sampling) goes
//! through [`par`], which uses rayon when the `parallel` feature is on.

pub mod basis;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod global;
pub mod hermite;
pub mod linalg;
pub mod mesh;
pub mod par;
pub mod poly;
pub mod reduction;
pub mod sampling;
pub mod simplex;
pub mod table2;
pub mod types;
pub mod verify;

pub use basis::{BasisSet, DualPolynomialTable};
pub use error::{Error, Result};
pub use geometry::{CellLocation, MacroTriangleGeometry};
pub use global::{GlobalDofTable, GlobalSpace, GlobalSpline, SpaceDim};
pub use hermite::{CollocationMatrix, HermiteData, HermiteFunctional};
pub use mesh::TriangulationMesh;
pub use par::ExecMode;
pub use reduction::{EdgeStrategy, InteriorFamilyPoint, InteriorPreset, ReductionMatrix, ReductionOptions};
pub use simplex::{KnotMultiset, SimplexSpline};
pub use types::{Jet, Order, Triangle, Vec2};
