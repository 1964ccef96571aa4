//! Ultrastrong-coupling metrology: closed forms, Gaussian and Fock-space
//! oracles, open-system response and strategy comparison.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod numdiff;
pub mod open_dynamics;
pub mod strategy;
pub mod sweep;

pub use error::{Error, Result};
