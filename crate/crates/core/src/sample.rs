//! Seeded random generation of polynomials, field elements, ideals and CM
//! lattices, used by the property suites and the randomized tests. All
//! randomness flows through an explicit ChaCha stream.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::algebra::{Fq, PolyA};
use crate::error::Result;
use crate::lattice::{primes_above, Lattice, Order};
use crate::quadratic::{splitting_type, QuadElement, QuadField};

pub fn rng_for(seed: u64, salt: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15))
}

pub fn rand_poly(rng: &mut ChaCha12Rng, fq: &Fq, max_deg: usize) -> PolyA {
    let deg = rng.gen_range(0..=max_deg);
    let coeffs: Vec<u64> = (0..=deg).map(|_| rng.gen_range(0..fq.q())).collect();
    PolyA::new(fq, coeffs)
}

pub fn rand_nonzero_poly(rng: &mut ChaCha12Rng, fq: &Fq, max_deg: usize) -> PolyA {
    loop {
        let p = rand_poly(rng, fq, max_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn rand_monic(rng: &mut ChaCha12Rng, fq: &Fq, deg: usize) -> PolyA {
    let mut coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..fq.q())).collect();
    coeffs.push(1);
    PolyA::new(fq, coeffs)
}

pub fn rand_quad_element(rng: &mut ChaCha12Rng, k: &QuadField, max_deg: usize) -> QuadElement {
    loop {
        let x = rand_poly(rng, k.fq(), max_deg);
        let y = rand_poly(rng, k.fq(), max_deg);
        let e = QuadElement::from_polys(k, &x, &y);
        if !e.is_zero() {
            return e;
        }
    }
}

/// A random unimodular 2x2 matrix over A, as a product of elementary
/// operations applied to the identity.
pub fn rand_unimodular(rng: &mut ChaCha12Rng, fq: &Fq, steps: usize) -> [[PolyA; 2]; 2] {
    let mut m = [
        [PolyA::one(fq), PolyA::zero(fq)],
        [PolyA::zero(fq), PolyA::one(fq)],
    ];
    for _ in 0..steps {
        let t = rand_poly(rng, fq, 2);
        if rng.gen_bool(0.5) {
            // R0 += t R1
            m[0][0] = m[0][0].add(&t.mul(&m[1][0]));
            m[0][1] = m[0][1].add(&t.mul(&m[1][1]));
        } else {
            m[1][0] = m[1][0].add(&t.mul(&m[0][0]));
            m[1][1] = m[1][1].add(&t.mul(&m[0][1]));
        }
        if rng.gen_bool(0.3) {
            m.swap(0, 1);
        }
    }
    m
}

/// The non-inert monic irreducibles of degree <= 2, raw material for random
/// ideals.
pub fn split_or_ramified_primes(k: &QuadField, max_deg: usize) -> Result<Vec<Lattice>> {
    let mut pool = Vec::new();
    for q0 in crate::algebra::irreducibles_up_to(k.fq(), max_deg) {
        let st = splitting_type(k, &q0)?;
        if st.chi >= 0 {
            pool.extend(primes_above(k, &q0)?);
        }
    }
    Ok(pool)
}

/// A random invertible O_K-ideal: a product of a few pool primes.
pub fn rand_ok_ideal(rng: &mut ChaCha12Rng, k: &QuadField, pool: &[Lattice]) -> Result<Lattice> {
    let mut out = Order::maximal(k).lattice();
    let count = rng.gen_range(0..=2);
    for _ in 0..count {
        let idx = rng.gen_range(0..pool.len());
        out = out.product(&pool[idx])?;
    }
    Ok(out)
}

/// A random proper O_c-lattice of conductor exactly c: the contraction
/// I ∩ O_c of a random invertible O_K-ideal coprime to c.
pub fn rand_cm_lattice(
    rng: &mut ChaCha12Rng,
    k: &QuadField,
    pool: &[Lattice],
    cond: &PolyA,
) -> Result<Lattice> {
    let order = Order::new(k, cond)?;
    let ideal = rand_coprime_ideal(rng, k, pool, cond)?;
    if order.is_maximal() {
        Ok(ideal)
    } else {
        ideal.intersect(&order.lattice())
    }
}

/// A random invertible O_K-ideal whose norm is coprime to the modulus.
pub fn rand_coprime_ideal(
    rng: &mut ChaCha12Rng,
    k: &QuadField,
    pool: &[Lattice],
    modulus: &PolyA,
) -> Result<Lattice> {
    let okk = Order::maximal(k);
    loop {
        let ideal = rand_ok_ideal(rng, k, pool)?;
        let (n, _) = ideal.ideal_norm(&okk)?;
        if n.gcd(modulus).is_one() {
            return Ok(ideal);
        }
    }
}
