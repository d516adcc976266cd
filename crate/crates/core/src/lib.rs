//! Exact arithmetic in imaginary quadratic extensions of F_q(T): polynomial
//! and 2x2 normal-form algebra, the field K = k(sqrt(D)) and its orders,
//! rank-2 CM lattices, class groups of non-maximal orders and their tower
//! maps, the lattice model of X_0(n) with degeneracy maps and Hecke
//! correspondences, canonical cyclic-isogeny factorization, and Heegner-point
//! towers with their geometric Galois action.
//!
//! Everything is exact and deterministic: searches are budgeted, randomized
//! routines take explicit seeds, and all values are immutable after
//! construction.

pub mod algebra;
pub mod classgroup;
pub mod error;
pub mod heegner;
pub mod isogeny;
pub mod lattice;
pub mod quadratic;
pub mod sample;
pub mod verify;

pub use algebra::{Fq, PolyA};
pub use classgroup::{AbGroupShape, HnStruct, PicClass, PicGroup, TowerMap};
pub use error::{Error, Result};
pub use heegner::{GaloisElement, GeometricData, HeegnerConfig, HeegnerPoint};
pub use isogeny::{Factorization, ModuliPoint, SublatticeReport};
pub use lattice::{Lattice, LatticeJson, Order, QuotientShape};
pub use quadratic::{InfinityType, QuadElement, QuadField, SplitType};
