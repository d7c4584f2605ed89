//! Numerical construction and verification of approximately hyperkähler
//! metrics on elliptic K3 surfaces near each type of singular fiber.

pub mod diffgeo;
pub mod error;
pub mod fit;
pub mod gibbons_hawking;
pub mod gluing_engine;
pub mod k3_config;
pub mod lattice_greens;
pub mod model_spaces;
pub mod scales_bubbles;
pub mod sector_analysis;
pub mod semi_flat;
pub mod special;
pub mod triple_algebra;

pub use error::{GeomError, Result};
pub use fit::LineFit;
pub use gibbons_hawking::GHChart;
pub use k3_config::{FiberConfig, FiberType, ModuliDims};
pub use lattice_greens::{eval_green, GreensEval, HolomorphicPoly, MonopoleSet, Representation};
pub use scales_bubbles::{BubbleLabel, Locus, Probe, Scaling, WeightField};
pub use sector_analysis::SectorSpec;
pub use semi_flat::{PeriodModel, SemiFlatChart};
pub use triple_algebra::DefiniteTriple;
