//! The marked Poisson process: windowed sampling, lazy realization, spatial index.

pub mod index;
pub mod io;
pub mod lazy;
mod raster;
pub mod sampler;
pub mod window;

pub use index::{build_index, build_index_from_bodies, size_class, LayeredGrid};
pub use io::{read_points_jsonl, write_points_jsonl};
pub use lazy::{lazy_chemical_distance, lazy_reaches_boundary, LazyProcess, SearchOutcome};
pub use sampler::{
    configuration_from_bodies, sample_configuration, sample_layered_configuration,
    Configuration, MarkedPoint,
};
pub use window::{TruncationPolicy, Window, UNCAPPED_MARGIN_LEVEL};
