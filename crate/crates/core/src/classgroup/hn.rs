//! The p-groups H_n = (1 + pO_K)/(1 + pO_n), computed inside the finite ring
//! O_K/p^{n+1}O_K. The denominator is the image of the O_n-units congruent
//! to 1 mod pO_K, i.e. 1 + (pO_K intersect O_n) = 1 + pA + p^n A w; reducing
//! mod p^{n+1} keeps that set faithful since p^{n+1}O_K lies inside it.

use std::collections::HashMap;
use std::collections::HashSet;

use super::abgroup::AbGroupShape;
use crate::algebra::PolyA;
use crate::error::{Error, Result};
use crate::quadratic::QuadField;

/// Structure record for H_n.
#[derive(Clone, Debug)]
pub struct HnStruct {
    pub n: u32,
    pub shape: AbGroupShape,
    pub order: u64,
    /// Minimal s with p^s * H_n = 0.
    pub annihilator_exp: u32,
    /// p-rank (number of invariant factors).
    pub min_generators: u32,
    /// Ring elements (s, t) = s + t*w mod p^{n+1} whose classes realize the
    /// invariant factors, largest first.
    pub basis: Vec<(PolyA, PolyA)>,
}

/// Arithmetic in O_K/mO_K for a monic modulus m, elements stored as reduced
/// polynomial pairs s + t*w.
#[derive(Clone)]
struct QuadRing {
    k: QuadField,
    m: PolyA,
    d_red: PolyA,
}

type Res = (PolyA, PolyA);

impl QuadRing {
    fn new(k: &QuadField, m: &PolyA) -> QuadRing {
        QuadRing {
            k: k.clone(),
            m: m.monic(),
            d_red: k.d().rem(m).unwrap(),
        }
    }

    fn one(&self) -> Res {
        (PolyA::one(self.k.fq()), PolyA::zero(self.k.fq()))
    }

    fn reduce(&self, s: &PolyA, t: &PolyA) -> Res {
        (s.rem(&self.m).unwrap(), t.rem(&self.m).unwrap())
    }

    fn mul(&self, a: &Res, b: &Res) -> Res {
        let s = a.0.mul(&b.0).add(&a.1.mul(&b.1).mul(&self.d_red));
        let t = a.0.mul(&b.1).add(&a.1.mul(&b.0));
        self.reduce(&s, &t)
    }

    fn pow(&self, a: &Res, mut e: u64) -> Res {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit whose norm is coprime to the modulus.
    fn inv(&self, a: &Res) -> Result<Res> {
        let norm = a.0.mul(&a.0).sub(&a.1.mul(&a.1).mul(&self.d_red));
        let (g, u, _) = norm.rem(&self.m).unwrap().xgcd(&self.m);
        if !g.is_one() {
            return Err(Error::Internal("non-unit in quadratic residue ring".into()));
        }
        Ok(self.reduce(&a.0.mul(&u), &a.1.neg().mul(&u)))
    }
}

fn residues_mod(p: &PolyA, n: u32) -> Vec<PolyA> {
    let fq = p.field();
    let deg = (p.deg() as u32 * n) as usize;
    let q = fq.q();
    let total = q.pow(deg as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut coeffs = Vec::with_capacity(deg);
        let mut v = code;
        for _ in 0..deg {
            coeffs.push(v % q);
            v /= q;
        }
        out.push(PolyA::new(fq, coeffs));
    }
    out
}

/// Coset representatives of the subgroup generated by the basis so far,
/// together with the exponent word of each representative.
struct Span {
    reps: Vec<(Res, Vec<u64>)>,
}

impl Span {
    fn identity(ring: &QuadRing) -> Span {
        Span {
            reps: vec![(ring.one(), Vec::new())],
        }
    }

    /// The word of the span element whose den-coset contains y, if any.
    fn coset_word(&self, y: &Res, ring: &QuadRing, den: &HashSet<Res>) -> Result<Option<Vec<u64>>> {
        for (s, w) in &self.reps {
            if den.contains(&ring.mul(y, &ring.inv(s)?)) {
                return Ok(Some(w.clone()));
            }
        }
        Ok(None)
    }

    fn extend(&mut self, x: &Res, order: u64, ring: &QuadRing) {
        let mut next = Vec::with_capacity(self.reps.len() * order as usize);
        let mut pw = ring.one();
        for e in 0..order {
            for (s, w) in &self.reps {
                let mut w2 = w.clone();
                w2.push(e);
                next.push((ring.mul(s, &pw), w2));
            }
            pw = ring.mul(&pw, x);
        }
        self.reps = next;
    }
}

/// Full structure of H_n. Requires |p|^{2(n+1)} within the enumeration
/// budget.
pub fn hn_group(k: &QuadField, p: &PolyA, n: u32, budget: usize) -> Result<HnStruct> {
    assert!(n >= 1, "H_n is defined for n >= 1");
    let p = p.monic();
    let dp = p.deg() as u32;
    let qsize = k.fq().q() as u128;
    let ring_size = qsize.pow(2 * (n + 1) * dp);
    if ring_size > budget as u128 {
        return Err(Error::BudgetExceeded(budget));
    }
    let p_char = k.fq().p();
    let modulus = p.pow((n + 1) as u64);
    let ring = QuadRing::new(k, &modulus);
    let pn = p.pow(n as u64);

    // denominator: {1 + p*a + p^n*b*w : a mod p^n, b mod p}
    let mut den: HashSet<Res> = HashSet::new();
    for a in residues_mod(&p, n) {
        for b in residues_mod(&p, 1) {
            let s = PolyA::one(k.fq()).add(&p.mul(&a));
            let t = pn.mul(&b);
            den.insert(ring.reduce(&s, &t));
        }
    }
    let den_size = den.len() as u64;
    let num_size = (k.fq().q() as u64).pow(2 * n * dp);
    let order = num_size / den_size;

    // quotient-order histogram by coset enumeration: for each numerator
    // element the class order is the least p_char-power landing in the
    // denominator
    let residues = residues_mod(&p, n);
    let mut histogram: HashMap<u32, u64> = HashMap::new();
    let mut kmax = 0u32;
    for us in &residues {
        for ut in &residues {
            let x = ring.reduce(&PolyA::one(k.fq()).add(&p.mul(us)), &p.mul(ut));
            let mut y = x;
            let mut kk = 0u32;
            while !den.contains(&y) {
                y = ring.pow(&y, p_char);
                kk += 1;
            }
            *histogram.entry(kk).or_insert(0) += 1;
            kmax = kmax.max(kk);
        }
    }
    let mut torsion_counts: Vec<u64> = vec![den_size];
    for kk in 1..=kmax {
        let upto: u64 = histogram
            .iter()
            .filter(|(o, _)| **o <= kk)
            .map(|(_, c)| *c)
            .sum();
        torsion_counts.push(upto);
    }

    // invariant factors from torsion counts: r_k = #factors of exponent >= k
    let mut ranks = Vec::new();
    for kk in 1..=kmax as usize {
        let ratio = torsion_counts[kk] / torsion_counts[kk - 1];
        ranks.push(ilog(ratio, p_char));
    }
    let mut factors: Vec<u64> = Vec::new();
    for (i, &r) in ranks.iter().enumerate() {
        let next = ranks.get(i + 1).copied().unwrap_or(0);
        for _ in 0..r.saturating_sub(next) {
            factors.push(p_char.pow(i as u32 + 1));
        }
    }
    factors.sort_unstable();
    let shape = AbGroupShape::new(factors);
    if shape.order != order {
        return Err(Error::Internal(format!(
            "torsion counting gave order {} but |H_n| = {}",
            shape.order, order
        )));
    }

    // cross-check against the valuation formula coming from the char-p
    // identity (1 + pu)^{p^k} = 1 + p^{p^k} u^{p^k}
    for kk in 1..=kmax {
        let expected = closed_form_torsion(k, &p, n, kk);
        if expected != torsion_counts[kk as usize] / den_size {
            return Err(Error::Internal(format!(
                "H_n torsion mismatch at p^{kk}: enumerated {} vs derived {}",
                torsion_counts[kk as usize] / den_size,
                expected
            )));
        }
    }

    // explicit basis: greedy maximal relative order plus purification
    let lambda: Vec<u64> = shape.invariant_factors.iter().rev().cloned().collect();
    let mut span = Span::identity(&ring);
    let mut basis: Vec<Res> = Vec::new();
    let mut basis_orders: Vec<u64> = Vec::new();
    for &target in &lambda {
        let mut found: Option<Res> = None;
        'scan: for us in &residues {
            for ut in &residues {
                let x = ring.reduce(&PolyA::one(k.fq()).add(&p.mul(us)), &p.mul(ut));
                let mut y = x.clone();
                let mut rel_ord = 1u64;
                while span.coset_word(&y, &ring, &den)?.is_none() {
                    y = ring.pow(&y, p_char);
                    rel_ord *= p_char;
                }
                if rel_ord != target {
                    continue;
                }
                // purify: x^target = prod basis_i^{w_i} mod den with
                // target | w_i; replace x by x * prod basis_i^{-w_i/target}
                let word = span
                    .coset_word(&ring.pow(&x, target), &ring, &den)?
                    .expect("x^target lies in the span");
                let mut adjusted = x.clone();
                for (i, &w) in word.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    if w % target != 0 {
                        return Err(Error::Internal(
                            "impure basis candidate; purity lemma violated".into(),
                        ));
                    }
                    let adj = ring.inv(&ring.pow(&basis[i], w / target))?;
                    adjusted = ring.mul(&adjusted, &adj);
                }
                if !den.contains(&ring.pow(&adjusted, target)) {
                    return Err(Error::Internal("purification failed".into()));
                }
                found = Some(adjusted);
                break 'scan;
            }
        }
        let x = found
            .ok_or_else(|| Error::Internal("no element of the required order in H_n".into()))?;
        span.extend(&x, target, &ring);
        basis.push(x);
        basis_orders.push(target);
    }
    let _ = basis_orders;

    Ok(HnStruct {
        n,
        order,
        annihilator_exp: kmax,
        min_generators: shape.invariant_factors.len() as u32,
        basis,
        shape,
    })
}

/// Number of classes of order dividing p_char^k from the char-p binomial
/// identity: the w-coordinate of (1+pu)^{p^k} - 1 is p^P t^P D^{(P-1)/2},
/// which lies in the denominator iff P(1 + ord_p(t)) + ord_p(D^{(P-1)/2})
/// reaches n.
fn closed_form_torsion(k: &QuadField, p: &PolyA, n: u32, kk: u32) -> u64 {
    let p_char = k.fq().p();
    let dp = p.deg() as u32;
    let q = k.fq().q() as u64;
    let big_p = p_char.pow(kk);
    let e = (big_p - 1) / 2;
    let d_val = {
        let mut v = 0u64;
        let mut d = k.d().clone();
        while d.rem(p).unwrap().is_zero() {
            v += 1;
            d = d.div_exact(p).unwrap();
        }
        v
    };
    let rhs = n as i64 - (e * d_val) as i64;
    let need = if rhs <= big_p as i64 {
        0
    } else {
        ((rhs + big_p as i64 - 1) / big_p as i64 - 1).max(0)
    } as u32;
    let m = need.min(n);
    let count_t = q.pow((n - m) * dp);
    let count_s = q.pow(n * dp);
    count_t * count_s / q.pow((n + 1) * dp)
}

fn ilog(mut v: u64, base: u64) -> u32 {
    let mut out = 0;
    while v > 1 {
        debug_assert_eq!(v % base, 0);
        v /= base;
        out += 1;
    }
    out
}

/// The paper's annihilator bound ceil(log_p(n+1)).
pub fn annihilator_bound(p_char: u64, n: u32) -> u32 {
    let mut s = 0u32;
    let mut v = 1u64;
    while v < (n + 1) as u64 {
        v *= p_char;
        s += 1;
    }
    s
}

/// The paper's generator-count lower bound
/// log_p(|p|) * (n-1) / ceil(log_p(n+1)), rounded up to an integer.
pub fn generator_lower_bound(k: &QuadField, p: &PolyA, n: u32) -> u32 {
    let p_char = k.fq().p();
    let log_p_abs = (p.deg() as u32) * ilog(k.fq().q(), p_char);
    let s = annihilator_bound(p_char, n);
    let num = log_p_abs * (n - 1);
    num.div_ceil(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fq;
    use crate::quadratic::make_field;

    fn setup() -> (QuadField, PolyA) {
        let fq = Fq::prime(3).unwrap();
        let d = PolyA::parse(&fq, "T^3+2*T+1").unwrap();
        (make_field(&fq, &d).unwrap(), PolyA::parse(&fq, "T").unwrap())
    }

    #[test]
    fn h1_is_trivial() {
        let (k, p) = setup();
        let h = hn_group(&k, &p, 1, 1 << 24).unwrap();
        assert_eq!(h.order, 1);
        assert!(h.shape.invariant_factors.is_empty());
        assert_eq!(h.min_generators, 0);
    }

    #[test]
    fn h3_has_order_9() {
        let (k, p) = setup();
        let h = hn_group(&k, &p, 3, 1 << 24).unwrap();
        assert_eq!(h.order, 9);
        assert!(h.annihilator_exp <= annihilator_bound(3, 3));
        for f in &h.shape.invariant_factors {
            let mut v = *f;
            while v % 3 == 0 {
                v /= 3;
            }
            assert_eq!(v, 1);
        }
    }

    #[test]
    fn h4_has_order_27_and_two_generators() {
        let (k, p) = setup();
        let h = hn_group(&k, &p, 4, 1 << 26).unwrap();
        assert_eq!(h.order, 27);
        assert_eq!(generator_lower_bound(&k, &p, 4), 2);
        assert!(h.min_generators >= 2);
        assert_eq!(h.shape.invariant_factors, vec![3, 9]);
        // basis orders match the factors, largest first
        assert_eq!(h.basis.len(), 2);
    }

    #[test]
    fn budget_guard() {
        let (k, p) = setup();
        assert!(matches!(
            hn_group(&k, &p, 4, 100),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn degree_two_tower_prime() {
        // p of degree 2: |p| = 9, |H_2| = |p|^(2-1) = 9
        let (k, _) = setup();
        let p2 = PolyA::parse(k.fq(), "T^2+1").unwrap();
        let h = hn_group(&k, &p2, 2, 1 << 26).unwrap();
        assert_eq!(h.order, 9);
    }
}
