//! Real periodic functions on the circle and degree-one circle maps.

mod circle_map;
mod periodic;

pub use circle_map::CircleMap;
pub use periodic::{grid_len, grid_points, PeriodicFunction};
