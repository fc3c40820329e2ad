//! Discrete Orlicz–Sobolev trace constants with vanishing windows and
//! holes on 2-D triangulations, together with the shape optimization,
//! capacity and circular-symmetrization experiments built on them.

// `!(x > 0.0)` is the idiom here for "not positive, or NaN"
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod error;
pub mod linalg;
pub mod mesh;
pub mod modular;
pub mod quadrature;
pub mod shape_opt;
pub mod symmetry;
pub mod trace_solver;
pub mod young;

pub use error::{Error, Result};
pub use mesh::{BoundarySubset, InteriorSubset, MeshDomain, Point};
pub use modular::{ScalarField, ModularReport};
pub use young::{YoungExpr, YoungFunction};
