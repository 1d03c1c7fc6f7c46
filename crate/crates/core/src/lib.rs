//! Frobenius circulant graphs of degree six: construction, Eisenstein-Jacobi
//! isomorphisms, covers, and optimal gossip / broadcast schedules.

pub mod audit;
pub mod circulant;
pub mod covers;
pub mod eisenstein;
pub mod error;
pub mod graph;
pub mod numtheory;
pub mod scheduler;
pub mod simulator;

pub use circulant::{Circulant, FrobeniusCirculant};
pub use covers::CoverMap;
pub use eisenstein::{EjGraph, EjInt};
pub use error::{Error, Result};
pub use graph::{Arc, Topology};
