pub mod cli;
pub mod connections;
pub mod error;
pub mod graph;
pub mod group;
pub mod interactions;
pub mod loops;
pub mod oracles;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod tree;
pub mod verify;
