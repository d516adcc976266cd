//! The residue field A/q0 for a monic irreducible q0, used for splitting
//! tests, square roots of D, and point counting over constant-field
//! extensions.

use super::factor::is_irreducible;
use super::poly::PolyA;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ResidueField {
    modulus: PolyA,
    /// Field order q^deg(q0).
    order: u128,
}

impl ResidueField {
    pub fn new(modulus: &PolyA) -> Result<ResidueField> {
        if !is_irreducible(modulus) {
            return Err(Error::NotIrreducible(modulus.to_string()));
        }
        let modulus = modulus.monic();
        let order = (modulus.field().q() as u128).pow(modulus.deg() as u32);
        Ok(ResidueField { modulus, order })
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn modulus(&self) -> &PolyA {
        &self.modulus
    }

    pub fn reduce(&self, x: &PolyA) -> PolyA {
        x.rem(&self.modulus).unwrap()
    }

    pub fn mul(&self, a: &PolyA, b: &PolyA) -> PolyA {
        self.reduce(&a.mul(b))
    }

    pub fn pow(&self, a: &PolyA, n: u128) -> PolyA {
        a.powmod(n, &self.modulus)
    }

    pub fn inv(&self, a: &PolyA) -> Result<PolyA> {
        let (g, u, _) = a.rem(&self.modulus).unwrap().xgcd(&self.modulus);
        if !g.is_one() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(&u))
    }

    /// Euler symbol of a residue: +1 square, -1 non-square, 0 for zero.
    pub fn legendre(&self, a: &PolyA) -> i32 {
        let r = self.reduce(a);
        if r.is_zero() {
            return 0;
        }
        let s = self.pow(&r, (self.order - 1) / 2);
        if s.is_one() {
            1
        } else {
            -1
        }
    }

    /// All residues (degree < deg q0), ascending canonical order.
    pub fn elements(&self) -> Vec<PolyA> {
        let fq = self.modulus.field();
        let d = self.modulus.deg() as usize;
        let q = fq.q();
        let total = q.pow(d as u32);
        let mut out = Vec::with_capacity(total as usize);
        for code in 0..total {
            let mut coeffs = Vec::with_capacity(d);
            let mut v = code;
            for _ in 0..d {
                coeffs.push(v % q);
                v /= q;
            }
            out.push(PolyA::new(fq, coeffs));
        }
        out.sort_by(|a, b| a.cmp_canonical(b));
        out
    }

    /// Tonelli-Shanks square root in the odd-order residue field. Returns the
    /// root whose canonical representative is smaller of the pair.
    pub fn sqrt(&self, a: &PolyA) -> Option<PolyA> {
        let a = self.reduce(a);
        if a.is_zero() {
            return Some(a);
        }
        if self.legendre(&a) != 1 {
            return None;
        }
        let m = self.order - 1;
        let s = m.trailing_zeros();
        let t = m >> s;
        let root = if s == 1 {
            // order = 3 mod 4: direct formula
            self.pow(&a, (self.order + 1) / 4)
        } else {
            // find a quadratic non-residue deterministically
            let z = self
                .elements()
                .into_iter()
                .find(|e| self.legendre(e) == -1)
                .expect("odd field has non-squares");
            let mut c = self.pow(&z, t);
            let mut x = self.pow(&a, (t + 1) / 2);
            let mut b = self.pow(&a, t);
            let mut m_exp = s;
            while !b.is_one() {
                // least i with b^(2^i) = 1
                let mut i = 0u32;
                let mut bb = b.clone();
                while !bb.is_one() {
                    bb = self.mul(&bb, &bb);
                    i += 1;
                }
                let mut c2 = c.clone();
                for _ in 0..(m_exp - i - 1) {
                    c2 = self.mul(&c2, &c2);
                }
                x = self.mul(&x, &c2);
                c = self.mul(&c2, &c2);
                b = self.mul(&b, &c);
                m_exp = i;
            }
            x
        };
        let neg = self.reduce(&root.neg());
        if root.cmp_canonical(&neg) == std::cmp::Ordering::Greater {
            Some(neg)
        } else {
            Some(root)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Fq;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn p(s: &str) -> PolyA {
        PolyA::parse(&f3(), s).unwrap()
    }

    #[test]
    fn legendre_matches_enumeration_of_squares() {
        for m in ["T", "T+1", "T^2+1", "T^3+2*T+1"] {
            let rf = ResidueField::new(&p(m)).unwrap();
            let mut squares = std::collections::HashSet::new();
            for e in rf.elements() {
                squares.insert(rf.mul(&e, &e).to_string());
            }
            for e in rf.elements() {
                let expect = if e.is_zero() {
                    0
                } else if squares.contains(&e.to_string()) {
                    1
                } else {
                    -1
                };
                assert_eq!(rf.legendre(&e), expect, "element {e} mod {m}");
            }
        }
    }

    #[test]
    fn sqrt_squares_back() {
        for m in ["T^2+1", "T^3+2*T+1"] {
            let rf = ResidueField::new(&p(m)).unwrap();
            for e in rf.elements() {
                if rf.legendre(&e) == 1 {
                    let r = rf.sqrt(&e).unwrap();
                    assert_eq!(rf.mul(&r, &r), e);
                }
            }
        }
    }

    #[test]
    fn non_irreducible_modulus_rejected() {
        assert!(matches!(
            ResidueField::new(&p("T^2+2")),
            Err(Error::NotIrreducible(_))
        ));
    }
}
