//! The coefficient field F_q, q = p^e with p an odd prime.
//!
//! Elements are stored as `u64` codes. For a prime field the code is the
//! residue itself; for an extension it packs the coefficients of the
//! representative polynomial in base p, so codes always lie in `0..q`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq, Hash)]
struct FqRepr {
    p: u64,
    e: u32,
    q: u64,
    /// Coefficients of the irreducible modulus, ascending degree, length e+1.
    /// Empty for prime fields.
    modulus: Vec<u64>,
}

/// Shared-handle description of F_q. Cloning is cheap; equality compares the
/// field parameters, not the handle.
#[derive(Clone)]
pub struct Fq(Arc<FqRepr>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Fq {}

impl std::hash::Hash for Fq {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.e)
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Fq {
    /// Prime field F_p, p an odd prime.
    pub fn prime(p: u64) -> Result<Fq> {
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(Fq(Arc::new(FqRepr {
            p,
            e: 1,
            q: p,
            modulus: Vec::new(),
        })))
    }

    /// Extension F_{p^e} defined by an explicit irreducible modulus over F_p,
    /// given as ascending coefficients of length e+1 with a nonzero leading
    /// coefficient.
    pub fn extension(p: u64, e: u32, modulus: &[u64]) -> Result<Fq> {
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        if e == 1 {
            return Self::prime(p);
        }
        if modulus.len() != e as usize + 1 {
            return Err(Error::InvalidField(format!(
                "modulus must have degree {e} (got {} coefficients)",
                modulus.len()
            )));
        }
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if modulus[e as usize] == 0 {
            return Err(Error::InvalidField("modulus has zero leading coefficient".into()));
        }
        let q = p
            .checked_pow(e)
            .ok_or_else(|| Error::InvalidField("q = p^e overflows u64".into()))?;
        let fq = Fq(Arc::new(FqRepr { p, e, q, modulus }));
        if !fq.modulus_is_irreducible() {
            return Err(Error::NotIrreducible("extension modulus".into()));
        }
        Ok(fq)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn e(&self) -> u32 {
        self.0.e
    }
    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn ensure_same(&self, other: &Fq) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn decode(&self, x: u64) -> Vec<u64> {
        let mut digits = vec![0u64; self.0.e as usize];
        let mut v = x;
        for d in digits.iter_mut() {
            *d = v % self.0.p;
            v /= self.0.p;
        }
        digits
    }

    fn encode(&self, digits: &[u64]) -> u64 {
        let mut v = 0u64;
        for &d in digits.iter().rev() {
            v = v * self.0.p + (d % self.0.p);
        }
        v
    }

    pub fn zero(&self) -> u64 {
        0
    }
    pub fn one(&self) -> u64 {
        1
    }

    /// Canonical element for an arbitrary u64 code (reduces into `0..q`).
    pub fn element(&self, x: u64) -> u64 {
        if self.0.e == 1 {
            x % self.0.p
        } else {
            x % self.0.q
        }
    }

    /// Embeds a (possibly negative) integer via the prime subfield.
    pub fn from_int(&self, n: i64) -> u64 {
        let r = n.rem_euclid(self.0.p as i64) as u64;
        r
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.0.e == 1 {
            let s = a + b;
            if s >= self.0.p {
                s - self.0.p
            } else {
                s
            }
        } else {
            let da = self.decode(a);
            let db = self.decode(b);
            let sum: Vec<u64> = da
                .iter()
                .zip(db.iter())
                .map(|(x, y)| (x + y) % self.0.p)
                .collect();
            self.encode(&sum)
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.0.e == 1 {
            if a == 0 {
                0
            } else {
                self.0.p - a
            }
        } else {
            let da = self.decode(a);
            let neg: Vec<u64> = da.iter().map(|x| (self.0.p - x) % self.0.p).collect();
            self.encode(&neg)
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.0.e == 1 {
            (a as u128 * b as u128 % self.0.p as u128) as u64
        } else {
            let da = self.decode(a);
            let db = self.decode(b);
            let e = self.0.e as usize;
            let mut prod = vec![0u64; 2 * e - 1];
            for (i, &x) in da.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % self.0.p;
                }
            }
            // reduce by the modulus
            let m = &self.0.modulus;
            let lead_inv = mod_inv(m[e], self.0.p);
            for i in (e..prod.len()).rev() {
                if prod[i] == 0 {
                    continue;
                }
                let f = prod[i] * lead_inv % self.0.p;
                for (j, &mc) in m.iter().enumerate() {
                    let idx = i + j - e;
                    prod[idx] = (prod[idx] + self.0.p * self.0.p - f * mc % self.0.p * 1) % self.0.p;
                }
                prod[i] = 0;
            }
            self.encode(&prod[..e])
        }
    }

    pub fn pow(&self, mut a: u64, mut n: u64) -> u64 {
        let mut acc = 1u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero field element");
        self.pow(a, self.0.q - 2)
    }

    /// Euler criterion; zero maps to false.
    pub fn is_square(&self, a: u64) -> bool {
        if a == 0 {
            return false;
        }
        self.pow(a, (self.0.q - 1) / 2) == 1
    }

    /// All field elements in canonical code order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.0.q
    }

    fn modulus_is_irreducible(&self) -> bool {
        // Rabin's test on the modulus over F_p, done with plain digit vectors
        // since Fq arithmetic is not available yet at construction time.
        let p = self.0.p;
        let e = self.0.e as usize;
        let m = &self.0.modulus;
        let polymulmod = |a: &[u64], b: &[u64]| -> Vec<u64> {
            let mut prod = vec![0u64; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let lead_inv = mod_inv(m[e], p);
            for i in (e..prod.len()).rev() {
                if prod[i] == 0 {
                    continue;
                }
                let f = prod[i] * lead_inv % p;
                for (j, &mc) in m.iter().enumerate() {
                    let idx = i + j - e;
                    prod[idx] = (prod[idx] + p * p - f * mc % p) % p;
                }
                prod[i] = 0;
            }
            prod.truncate(e.max(1));
            prod
        };
        let powq = |a: &[u64], mut n: u64| -> Vec<u64> {
            let mut acc = vec![0u64; e];
            acc[0] = 1;
            let mut base = a.to_vec();
            while n > 0 {
                if n & 1 == 1 {
                    acc = polymulmod(&acc, &base);
                }
                base = polymulmod(&base, &base);
                n >>= 1;
            }
            acc
        };
        let mut x = vec![0u64; e];
        if e > 1 {
            x[1] = 1;
        }
        // x^{p^e} == x mod m, and x^{p^{e/l}} != x for prime l | e
        let mut t = x.clone();
        for _ in 0..e {
            t = powq(&t, p);
        }
        if t != x {
            return false;
        }
        let mut primes = Vec::new();
        let mut n = e as u64;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                primes.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        for l in primes {
            let k = e as u64 / l;
            let mut t = x.clone();
            for _ in 0..k {
                t = powq(&t, p);
            }
            if t == x {
                return false;
            }
        }
        true
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut n = p - 2;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        n >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_ops() {
        let f = Fq::prime(3).unwrap();
        assert_eq!(f.add(2, 2), 1);
        assert_eq!(f.mul(2, 2), 1);
        assert_eq!(f.inv(2), 2);
        assert_eq!(f.neg(1), 2);
        assert!(f.is_square(1));
        assert!(!f.is_square(2));
    }

    #[test]
    fn rejects_bad_fields() {
        assert_eq!(Fq::prime(2).unwrap_err(), Error::EvenCharacteristic);
        assert!(matches!(Fq::prime(9), Err(Error::InvalidField(_))));
    }

    #[test]
    fn extension_field_f9() {
        // F_9 = F_3[x]/(x^2+1)
        let f = Fq::extension(3, 2, &[1, 0, 1]).unwrap();
        assert_eq!(f.q(), 9);
        // x * x = -1 = 2; x has code 3
        assert_eq!(f.mul(3, 3), 2);
        for a in 1..9 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        // multiplicative group has order 8: count squares = 4
        let squares = (1..9).filter(|&a| f.is_square(a)).count();
        assert_eq!(squares, 4);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 - 1 = (x-1)(x+1)
        assert!(matches!(
            Fq::extension(3, 2, &[2, 0, 1]),
            Err(Error::NotIrreducible(_))
        ));
    }
}
