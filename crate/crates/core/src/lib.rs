//! Hybrid continuous/discrete-variable entanglement swapping.
//!
//! Closed-form expressions for the heralded state, its entanglement and the
//! resulting key rate, alongside a truncated Fock-space simulator that
//! reproduces every closed form from first principles.

pub mod channels;
pub mod error;
pub mod fock;
pub mod hybrid;
pub mod numerics;
pub mod qkd;
pub mod swap;

pub use error::{HybridError, Result};
pub use num_complex::Complex64;
