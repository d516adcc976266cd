//! Shared fixtures for the criterion benchmarks.

use heegner_core::algebra::{Fq, PolyA};
use heegner_core::quadratic::{make_field, QuadField};

pub fn running_field() -> (Fq, QuadField) {
    let fq = Fq::prime(3).unwrap();
    let d = PolyA::parse(&fq, "T^3+2*T+1").unwrap();
    let k = make_field(&fq, &d).unwrap();
    (fq, k)
}
