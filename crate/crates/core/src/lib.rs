//! Numerical workbench for U(1)-equivariant real spectral triples over
//! noncommutative tori and the θ-deformed 3-sphere, at finite truncation.

pub mod basis;
pub mod cli;
pub mod connection;
pub mod error;
pub mod geometry;
pub mod kr;
pub mod lm;
pub mod operator;
pub mod projection;
pub mod report;
pub mod sphere;
pub mod spinor;
pub mod torus;
pub mod verify;

pub use basis::{Basis, BasisIndex, InteriorSubspace};
pub use error::{NcgError, Result};
pub use geometry::{Expr, Geometry, GeometryParams, Letter, TorusConvention, Word};
pub use operator::{AntilinearOperator, SparseOperator, C64};
pub use report::{CheckRecord, VerificationReport};
