//! Residue matrices for families of lattice polytopes, with combinatorial degree
//! certificates computed in exact arithmetic.

pub mod coloring;
pub mod construction;
pub mod degree;
pub mod error;
pub mod io;
pub mod linalg;
pub mod partition;
pub mod polytope;
pub mod residue;

pub use error::{Error, Result};
pub use polytope::{hull, minkowski, LatticePolytope, Point, PolytopeFamily};
