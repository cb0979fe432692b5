//! A desk-scale laboratory for quantum tamper detection.
//!
//! * [`field`]: prime-field arithmetic and polynomials for the QAMD tag.
//! * [`linalg`]: dense complex matrices, vectors and Householder QR.
//! * [`perm`]: symmetric-group combinatorics behind the moment bounds.
//! * [`weingarten`]: exact Weingarten tables and Haar moments.
//! * [`haar`]: reproducible Haar unitaries and encoding isometries.
//! * [`pauli`]: generalized Pauli operators on qudits.
//! * [`qamd`]: the explicit quantum AMD code and its security scans.
//! * [`operator`]: dense or structured tampering operators.
//! * [`moments`]: exact and Monte Carlo moments of overlap random variables.
//! * [`tamper`]: Haar-random encoding schemes under tampering.

pub mod error;
pub mod field;
pub mod haar;
pub mod linalg;
pub mod moments;
pub mod operator;
pub mod pauli;
pub mod perm;
pub mod qamd;
pub mod rational;
pub mod tamper;
pub mod weingarten;

pub use error::{Error, Result};
