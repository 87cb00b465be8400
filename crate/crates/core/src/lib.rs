//! Connectivity-oriented loss for delineating road and canal networks from
//! predicted distance maps, together with the post-processing that turns a
//! distance map into a graph and the connectivity metrics used to score it.
//!
//! * [`grid`]: rasters, morphology, exact distance transform, tiling.
//! * [`graph`] and [`annotation`]: centerline graphs and ground truth.
//! * [`loss`]: maximin pair weights and the windowed loss with gradients.
//! * [`extract`]: threshold, thin, skeleton to graph, spur pruning.
//! * [`metrics`]: APLS, TLTS, junction, holes-and-marbles and CCQ scores.
//! * [`io`]: the binary grid file format.

pub mod annotation;
pub mod error;
pub mod extract;
pub mod graph;
pub mod grid;
pub mod io;
pub mod loss;
pub mod metrics;
pub mod synth;

pub use error::{Error, Result};
