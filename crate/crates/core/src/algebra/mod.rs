//! Coefficient-field and polynomial-ring arithmetic over A = F_q[T], the
//! normal-form machinery every other module builds on.

pub mod factor;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod residue;

pub use factor::{factor, irreducibles_of_degree, irreducibles_up_to, is_irreducible, is_squarefree};
pub use field::Fq;
pub use matrix::{hnf2, snf2, Hnf2, Mat2};
pub use poly::PolyA;
pub use residue::ResidueField;
