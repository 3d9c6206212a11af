//! Finite fields, Galois rings and semilinear algebra over them.

mod finite_field;
mod galois_ring;
pub mod linalg;
mod matrix;
pub(crate) mod poly;
mod ring;
mod smith;
mod sparse;

pub use finite_field::{FfElem, FiniteField, RingDescriptor, DEFAULT_FIELD_BOUND, EXHAUSTIVE_BOUND};
pub use galois_ring::{GaloisRing, GrElem, MAX_CHARACTERISTIC};
pub use matrix::{Matrix, SemilinearMap};
pub use ring::{Field, Ring};
pub use smith::{diagonal_reduce, invert, DiagonalForm};
pub use sparse::SparseMatrix;
