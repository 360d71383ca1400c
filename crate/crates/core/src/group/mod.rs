//! Single-qubit Pauli and Clifford groups.

pub mod clifford;
pub mod matrix;
pub mod pauli;
pub mod s3;

pub use clifford::{product_of_sequence, Clifford1, CLIFFORD_ORDER, COSET_COUNT};
pub use pauli::{PauliLabel, SignedPauli1, SignedPauli2};
pub use s3::S3Perm;
