//! Compile encoding-independent discrete optimization problems into spin
//! Hamiltonians, transform them, and check their ground states.

pub mod gf2;
pub mod model;
pub mod poly;
pub mod encodings;
pub mod compiler;
pub mod parity;
pub mod problems;
pub mod solve;
