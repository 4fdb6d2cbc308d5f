//! Numerical location of resonances and their counting functions.

pub mod contour;
pub mod counting;
pub mod quadtree;

pub use contour::{count_zeros, Contour};
pub use counting::*;
pub use quadtree::{find_resonances, find_resonances_with, ResonanceSet, Root, SearchOptions};
