//! Spacetime Pauli checks for Clifford circuits.

pub mod circuit;
pub mod clifford;
pub mod dense;
pub mod fidelity;
pub mod gf2;
pub mod insertion;
pub mod noise;
pub mod pauli;
pub mod picking;
pub mod pipeline;
pub mod propagate;
pub mod rng;
pub mod schedule;
pub mod state;
pub mod synthesis;
pub mod tableau;
pub mod wires;
