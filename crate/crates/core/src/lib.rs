//! Exact simulation of single-qubit Clifford gate-teleportation circuits,
//! possibilistic oracles, lightcone analysis, and stabilizer tomography
//! built on top of them.

pub mod bell;
pub mod circuits;
pub mod error;
pub mod group;
pub mod hashing;
pub mod lightcone;
pub mod oracle;
pub mod reduction;
pub mod tomography;
pub mod verify;
pub mod word_problems;

pub use error::{Error, Result};
