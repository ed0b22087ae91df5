//! Randomized incremental Delaunay triangulation in the plane, with point
//! location driven by a cascade of nearest-neighbor graphs over doubling
//! rounds.

pub mod bench;
pub mod delaunay;
pub mod driver;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod io;
pub mod nng;
pub mod oracle;
pub mod svg;

pub use error::{Error, Result};
pub use geometry::{Point, PointId, Sign};
