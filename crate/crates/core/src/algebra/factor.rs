//! Factorization in F_q[T]: distinct-degree splitting followed by randomized
//! equal-degree splitting. The seed is a mandatory parameter and the factor
//! list is sorted canonically, so output is reproducible.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::field::Fq;
use super::poly::PolyA;
use crate::error::{Error, Result};

/// Rabin irreducibility test.
pub fn is_irreducible(f: &PolyA) -> bool {
    let n = f.deg();
    if n <= 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let q = f.field().q() as u128;
    let x = PolyA::t(f.field());
    // x^(q^n) == x mod f
    let mut t = x.clone();
    for _ in 0..n {
        t = t.powmod(q, f);
    }
    if t != x.rem(f).unwrap() {
        return false;
    }
    for l in prime_divisors(n as u64) {
        let k = n as u64 / l;
        let mut t = x.clone();
        for _ in 0..k {
            t = t.powmod(q, f);
        }
        if !f.gcd(&t.sub(&x)).is_one() {
            return false;
        }
    }
    true
}

/// f is square-free iff gcd(f, f') is constant (with the convention that a
/// vanishing derivative, i.e. a p-th power, is never square-free).
pub fn is_squarefree(f: &PolyA) -> bool {
    if f.is_zero() {
        return false;
    }
    if f.is_constant() {
        return true;
    }
    let d = f.derivative();
    if d.is_zero() {
        return false;
    }
    f.gcd(&d).is_constant()
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Full factorization of a nonzero polynomial: (leading unit, factors), the
/// factors monic irreducible with multiplicities, sorted by degree then
/// coefficient order.
pub fn factor(f: &PolyA, seed: u64) -> Result<(u64, Vec<(PolyA, u32)>)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = f.lead();
    let monic = f.monic();
    if monic.is_one() {
        return Ok((unit, Vec::new()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut factors: Vec<(PolyA, u32)> = Vec::new();
    for (g, mult) in squarefree_decomposition(&monic)? {
        for h in factor_squarefree(&g, &mut rng) {
            merge(&mut factors, h, mult);
        }
    }
    factors.sort_by(|a, b| a.0.cmp_canonical(&b.0));
    Ok((unit, factors))
}

fn merge(factors: &mut Vec<(PolyA, u32)>, f: PolyA, mult: u32) {
    for entry in factors.iter_mut() {
        if entry.0 == f {
            entry.1 += mult;
            return;
        }
    }
    factors.push((f, mult));
}

/// Yun's algorithm adapted to characteristic p: returns square-free monic
/// parts with multiplicities whose product (with multiplicity) is the input.
fn squarefree_decomposition(f: &PolyA) -> Result<Vec<(PolyA, u32)>> {
    let mut out: Vec<(PolyA, u32)> = Vec::new();
    let p = f.field().p() as u32;
    let d = f.derivative();
    if d.is_zero() {
        // f = g(T^p) = (pth_root g-ish)^p after recursing
        let root = f.pth_root()?;
        for (h, m) in squarefree_decomposition(&root)? {
            out.push((h, m * p));
        }
        return Ok(out);
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c)?;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y)?;
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w)?;
    }
    if !c.is_one() {
        let root = c.pth_root()?;
        for (h, m) in squarefree_decomposition(&root)? {
            out.push((h, m * p));
        }
    }
    Ok(out)
}

/// Distinct-degree then equal-degree splitting of a monic square-free input.
fn factor_squarefree(f: &PolyA, rng: &mut ChaCha12Rng) -> Vec<PolyA> {
    let fq = f.field();
    let q = fq.q() as u128;
    let x = PolyA::t(fq);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut w = x.clone();
    let mut d = 0u32;
    while rest.deg() > 0 {
        d += 1;
        if (rest.deg() as u32) < 2 * d {
            // what is left is irreducible
            out.push(rest.clone());
            break;
        }
        w = w.powmod(q, &rest);
        let g = rest.gcd(&w.sub(&x));
        if g.deg() > 0 {
            equal_degree_split(&g, d, rng, &mut out);
            rest = rest.div_exact(&g).expect("gcd divides");
            w = w.rem(&rest).unwrap();
        }
    }
    out
}

/// Cantor-Zassenhaus: splits a product of distinct irreducibles of equal
/// degree d. The field has odd order, so the (q^d - 1)/2 power map separates.
fn equal_degree_split(f: &PolyA, d: u32, rng: &mut ChaCha12Rng, out: &mut Vec<PolyA>) {
    if f.deg() as u32 == d {
        out.push(f.monic());
        return;
    }
    let fq = f.field();
    let exp = (fq.q() as u128).pow(d) / 2; // (q^d - 1)/2 since q^d is odd
    loop {
        let r = random_poly_below(fq, f.deg() as usize, rng);
        if r.is_constant() {
            continue;
        }
        let g0 = f.gcd(&r);
        if g0.deg() > 0 && g0.deg() < f.deg() {
            equal_degree_split(&g0, d, rng, out);
            equal_degree_split(&f.div_exact(&g0).unwrap(), d, rng, out);
            return;
        }
        let s = r.powmod(exp, f);
        let g = f.gcd(&s.sub(&PolyA::one(fq)));
        if g.deg() > 0 && g.deg() < f.deg() {
            equal_degree_split(&g, d, rng, out);
            equal_degree_split(&f.div_exact(&g).unwrap(), d, rng, out);
            return;
        }
    }
}

fn random_poly_below(fq: &Fq, deg_bound: usize, rng: &mut ChaCha12Rng) -> PolyA {
    let coeffs: Vec<u64> = (0..deg_bound).map(|_| rng.gen_range(0..fq.q())).collect();
    PolyA::new(fq, coeffs)
}

/// Monic irreducibles of the given degree, in canonical order.
pub fn irreducibles_of_degree(fq: &Fq, deg: usize) -> Vec<PolyA> {
    assert!(deg >= 1);
    let q = fq.q();
    let total = q.pow(deg as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut v = code;
        for _ in 0..deg {
            coeffs.push(v % q);
            v /= q;
        }
        coeffs.push(1);
        let f = PolyA::new(fq, coeffs);
        if is_irreducible(&f) {
            out.push(f);
        }
    }
    out.sort_by(|a, b| a.cmp_canonical(b));
    out
}

/// All monic irreducibles of degree <= max_deg, ascending canonical order.
pub fn irreducibles_up_to(fq: &Fq, max_deg: usize) -> Vec<PolyA> {
    let mut out = Vec::new();
    for d in 1..=max_deg {
        out.extend(irreducibles_of_degree(fq, d));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn p(s: &str) -> PolyA {
        PolyA::parse(&f3(), s).unwrap()
    }

    #[test]
    fn splits_with_roots() {
        // T^2+2 = (T+1)(T+2) over F_3
        let (unit, factors) = factor(&p("T^2+2"), 1).unwrap();
        assert_eq!(unit, 1);
        assert_eq!(factors, vec![(p("T+1"), 1), (p("T+2"), 1)]);
    }

    #[test]
    fn cubic_without_roots_is_irreducible() {
        let f = p("T^3+2*T+1");
        assert!(is_irreducible(&f));
        let (_, factors) = factor(&f, 1).unwrap();
        assert_eq!(factors, vec![(f, 1)]);
    }

    #[test]
    fn repeated_factor() {
        let (unit, factors) = factor(&p("T^2"), 1).unwrap();
        assert_eq!(unit, 1);
        assert_eq!(factors, vec![(p("T"), 2)]);
        assert!(!is_squarefree(&p("T^2")));
        assert!(is_squarefree(&p("T^2+2")));
    }

    #[test]
    fn zero_rejected() {
        assert_eq!(factor(&PolyA::zero(&f3()), 0).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn pth_power_factorization() {
        // (T+1)^3 has zero derivative over F_3
        let f = p("T+1").pow(3);
        assert!(!is_squarefree(&f));
        let (_, factors) = factor(&f, 5).unwrap();
        assert_eq!(factors, vec![(p("T+1"), 3)]);
    }

    #[test]
    fn seed_does_not_change_sorted_output() {
        let f = p("T^4+T^2+2").mul(&p("T+2")).mul(&p("T+1"));
        let a = factor(&f, 1).unwrap();
        let b = factor(&f, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // #monic irreducibles of degree d over F_q: d=1: q, d=2: (q^2-q)/2,
        // d=3: (q^3-q)/3
        assert_eq!(irreducibles_of_degree(&f3(), 1).len(), 3);
        assert_eq!(irreducibles_of_degree(&f3(), 2).len(), 3);
        assert_eq!(irreducibles_of_degree(&f3(), 3).len(), 8);
    }
}
