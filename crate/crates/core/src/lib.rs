pub mod bogoliubov;
pub mod cli;
pub mod error;
pub mod fock;
pub mod harness;
pub mod oracle;
pub mod perturb;
pub mod qfi;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
