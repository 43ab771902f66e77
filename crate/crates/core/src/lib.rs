pub mod affinity;
pub mod collab;
pub mod community;
pub mod corpus;
pub mod delineation;
mod csvutil;
pub mod country;
pub mod error;
pub mod graph;
pub mod pipeline;
pub mod roles;
pub mod synth;
pub mod topics;

pub use error::{Error, Result};
