//! Exact computations with finite-dimensional bimodules over the dual numbers
//! `D = k[x]/(x²)`, with `k = ℚ`.

pub mod actmat;
pub mod bimodule;
pub mod canonical;
pub mod cells;
pub mod decompose;
pub mod label;
pub mod linalg;
pub mod suite;

pub use bimodule::{Bimodule, BimoduleError, Morphism, TensorProduct};
pub use label::{Label, Shape};
pub use linalg::{Field, Mat};

/// The ground field: exact rationals.
pub type Scalar = num_rational::BigRational;
pub type QMat = Mat<Scalar>;
pub type QBimodule = Bimodule<Scalar>;
pub type QMorphism = Morphism<Scalar>;
