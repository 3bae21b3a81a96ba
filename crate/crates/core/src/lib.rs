//! Near-field bending beams: phase synthesis for curved caustic
//! trajectories, array codewords, angular-spectrum propagation and the
//! metrics used to judge them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod array;
pub mod design;
pub mod error;
pub mod footprint;
pub mod grid;
pub mod oracle;
pub mod presets;
pub mod propagation;
pub mod scenario;
pub mod special;
mod spline;
pub mod trajectory;

pub use error::{Error, Result};
pub use grid::{make_medium, total_power, window_power, FieldSlice, Grid, Grid1D, Grid2D, Medium, Window};
