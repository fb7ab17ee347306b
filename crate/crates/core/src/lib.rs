//! Complex Hadamard matrices from designs: exact construction, verification
//! and equivalence invariants.

pub mod chm;
pub mod construct;
pub mod designs;
pub mod equivalence;
pub mod error;
pub mod finite_field;
pub mod invariants;
pub mod linalg;
pub mod matrix;
pub mod scalar;

pub use chm::{ComplexHadamardMatrix, Entry, EquivalenceMove};
pub use construct::Sign;
pub use designs::{BlockDesign, ConferenceMatrixReal, RealHadamard};
pub use equivalence::{InequivalenceCertificate, Verdict};
pub use error::{Error, Result};
pub use invariants::{Budget, Census, Engine, Fingerprint, HaagerupSet, MinorSpectrum};
pub use matrix::Matrix;
pub use scalar::{QuadExtScalar, Rational};
