pub mod dataset;
pub mod dynamics;
pub mod env;
pub mod error;
pub mod geom;
pub mod reward;
pub mod rng;
pub mod sensing;
pub mod track;
pub mod harness;
pub mod policy;
