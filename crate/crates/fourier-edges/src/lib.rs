pub mod concentration;
pub mod error;
pub mod forward_model;
pub mod frames;
pub mod harness;
pub mod map_solver;
pub mod reconstruct;
pub mod sampling;
pub mod sbl;
