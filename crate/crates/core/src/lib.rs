//! Exact-arithmetic toolkit for visibility graphs and blocking sets of planar point sets.

pub mod bitset;
pub mod blocking;
pub mod crossing;
pub mod drawings;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod geom;
pub mod graph;
pub mod midpoints;
pub mod visibility;

pub use error::{Error, Result};
pub use geom::{LineRecord, PointSet, RationalPoint};
