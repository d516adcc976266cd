//! Polynomials over F_q: the base ring A = F_q[T].
//!
//! Values are kept canonical (ascending coefficients, no trailing zeros, the
//! zero polynomial is the empty sequence), so structural equality is module
//! equality and polynomials hash cheaply.

use std::cmp::Ordering;
use std::fmt;

use super::field::Fq;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyA {
    fq: Fq,
    /// Ascending-degree coefficient codes, canonical (no trailing zeros).
    coeffs: Vec<u64>,
}

impl fmt::Debug for PolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PolyA {
    pub fn new(fq: &Fq, coeffs: Vec<u64>) -> PolyA {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| fq.element(c)).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyA {
            fq: fq.clone(),
            coeffs,
        }
    }

    pub fn zero(fq: &Fq) -> PolyA {
        PolyA {
            fq: fq.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(fq: &Fq) -> PolyA {
        PolyA::new(fq, vec![1])
    }

    pub fn constant(fq: &Fq, c: u64) -> PolyA {
        PolyA::new(fq, vec![c])
    }

    /// The generator T.
    pub fn t(fq: &Fq) -> PolyA {
        PolyA::new(fq, vec![0, 1])
    }

    /// T^n.
    pub fn t_pow(fq: &Fq, n: usize) -> PolyA {
        let mut coeffs = vec![0u64; n + 1];
        coeffs[n] = 1;
        PolyA::new(fq, coeffs)
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; -1 for the zero polynomial.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lead(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    /// q^deg for nonzero input; the absolute value |a| of the glossary.
    pub fn abs_size(&self) -> u64 {
        assert!(!self.is_zero(), "|0| is not defined");
        self.fq.q().pow(self.deg() as u32)
    }

    pub fn add(&self, other: &PolyA) -> PolyA {
        assert_eq!(self.fq, other.fq, "polynomials over different fields");
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.fq.add(self.coeff(i), other.coeff(i)));
        }
        PolyA::new(&self.fq, out)
    }

    pub fn neg(&self) -> PolyA {
        let out: Vec<u64> = self.coeffs.iter().map(|&c| self.fq.neg(c)).collect();
        PolyA {
            fq: self.fq.clone(),
            coeffs: out,
        }
    }

    pub fn sub(&self, other: &PolyA) -> PolyA {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PolyA) -> PolyA {
        assert_eq!(self.fq, other.fq, "polynomials over different fields");
        if self.is_zero() || other.is_zero() {
            return PolyA::zero(&self.fq);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                out[i + j] = self.fq.add(out[i + j], self.fq.mul(a, b));
            }
        }
        PolyA::new(&self.fq, out)
    }

    pub fn scale(&self, c: u64) -> PolyA {
        let c = self.fq.element(c);
        let out: Vec<u64> = self.coeffs.iter().map(|&a| self.fq.mul(a, c)).collect();
        PolyA::new(&self.fq, out)
    }

    pub fn shift(&self, n: usize) -> PolyA {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![0u64; n];
        out.extend_from_slice(&self.coeffs);
        PolyA::new(&self.fq, out)
    }

    /// Quotient and remainder; errors on division by zero.
    pub fn divrem(&self, other: &PolyA) -> Result<(PolyA, PolyA)> {
        assert_eq!(self.fq, other.fq, "polynomials over different fields");
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.deg() < other.deg() {
            return Ok((PolyA::zero(&self.fq), self.clone()));
        }
        let fq = &self.fq;
        let lead_inv = fq.inv(other.lead());
        let mut rem = self.coeffs.clone();
        let dd = other.coeffs.len() - 1;
        let mut quo = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i] == 0 {
                continue;
            }
            let f = fq.mul(rem[i], lead_inv);
            quo[i - dd] = f;
            for (j, &oc) in other.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = fq.sub(rem[idx], fq.mul(f, oc));
            }
        }
        Ok((PolyA::new(fq, quo), PolyA::new(fq, rem)))
    }

    pub fn rem(&self, other: &PolyA) -> Result<PolyA> {
        Ok(self.divrem(other)?.1)
    }

    /// Exact division; internal invariant error if the remainder is nonzero.
    pub fn div_exact(&self, other: &PolyA) -> Result<PolyA> {
        let (q, r) = self.divrem(other)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!("{self} is not divisible by {other}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &PolyA) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.divrem(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    /// Multiplies by the inverse of the leading coefficient.
    pub fn monic(&self) -> PolyA {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.fq.inv(self.lead()))
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &PolyA) -> PolyA {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns (g, u, v) with g monic (or zero) and
    /// u*self + v*other = g.
    pub fn xgcd(&self, other: &PolyA) -> (PolyA, PolyA, PolyA) {
        let fq = &self.fq;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut u0, mut u1) = (PolyA::one(fq), PolyA::zero(fq));
        let (mut v0, mut v1) = (PolyA::zero(fq), PolyA::one(fq));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            let nu = u0.sub(&q.mul(&u1));
            let nv = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = nu;
            v0 = v1;
            v1 = nv;
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let c = fq.inv(r0.lead());
        (r0.scale(c), u0.scale(c), v0.scale(c))
    }

    pub fn lcm(&self, other: &PolyA) -> PolyA {
        if self.is_zero() || other.is_zero() {
            return PolyA::zero(&self.fq);
        }
        self.mul(other)
            .div_exact(&self.gcd(other))
            .expect("gcd divides product")
            .monic()
    }

    pub fn derivative(&self) -> PolyA {
        if self.coeffs.len() <= 1 {
            return PolyA::zero(&self.fq);
        }
        let p = self.fq.p();
        let out: Vec<u64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| {
                let m = (i as u64) % p;
                self.fq.mul(c, m)
            })
            .collect();
        PolyA::new(&self.fq, out)
    }

    /// p-th root of a polynomial of the form g(T^p); the caller must ensure
    /// all exponents with nonzero coefficients are multiples of p.
    pub fn pth_root(&self) -> Result<PolyA> {
        let p = self.fq.p() as usize;
        let e = self.fq.e();
        let mut out = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i % p == 0 {
                // c^(p^(e-1)) is the inverse Frobenius in F_{p^e}
                let root = if e == 1 {
                    c
                } else {
                    self.fq.pow(c, self.fq.q() / self.fq.p())
                };
                out.push(root);
            } else if c != 0 {
                return Err(Error::Internal(format!("{self} is not a p-th power")));
            }
        }
        Ok(PolyA::new(&self.fq, out))
    }

    pub fn pow(&self, n: u64) -> PolyA {
        let mut acc = PolyA::one(&self.fq);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// self^n mod m, with a u128 exponent (residue-field sizes q^d fit easily).
    pub fn powmod(&self, n: u128, m: &PolyA) -> PolyA {
        assert!(!m.is_zero());
        let mut acc = PolyA::one(&self.fq).rem(m).unwrap();
        let mut base = self.rem(m).unwrap();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).rem(m).unwrap();
            }
            base = base.mul(&base).rem(m).unwrap();
            n >>= 1;
        }
        acc
    }

    /// Evaluation at a field element (by code).
    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = self.fq.add(self.fq.mul(acc, x), c);
        }
        acc
    }

    /// Canonical total order: by degree, then coefficients from the highest
    /// power down, comparing element codes. Used wherever a deterministic
    /// choice among polynomials is required.
    pub fn cmp_canonical(&self, other: &PolyA) -> Ordering {
        match self.coeffs.len().cmp(&other.coeffs.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        for i in (0..self.coeffs.len()).rev() {
            match self.coeffs[i].cmp(&other.coeffs[i]) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Parses the polynomial grammar
    /// `poly := term (('+'|'-') term)*`,
    /// `term := coeff | coeff '*'? 'T' ('^' nat)? | 'T' ('^' nat)?`.
    /// Integer coefficients are reduced into the prime subfield (codes `>= p`
    /// are taken mod q and interpreted as element codes, so extension-field
    /// output round-trips).
    pub fn parse(fq: &Fq, input: &str) -> Result<PolyA> {
        let s: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(u64, usize)> = Vec::new();
        let mut i = 0usize;
        let mut sign_neg = false;
        if s[0] == '+' || s[0] == '-' {
            sign_neg = s[0] == '-';
            i = 1;
        }
        loop {
            // one term
            let mut coeff: Option<u64> = None;
            if i < s.len() && s[i].is_ascii_digit() {
                let start = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                let n: u64 = s[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("coefficient overflows u64".into()))?;
                coeff = Some(if n < fq.p() { n } else { fq.element(n) });
                if i < s.len() && s[i] == '*' {
                    i += 1;
                    if i >= s.len() || s[i] != 'T' {
                        return Err(Error::Parse("expected T after '*'".into()));
                    }
                }
            }
            let mut pow = 0usize;
            if i < s.len() && s[i] == 'T' {
                i += 1;
                pow = 1;
                if i < s.len() && s[i] == '^' {
                    i += 1;
                    let start = i;
                    while i < s.len() && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    if start == i {
                        return Err(Error::Parse("expected exponent after '^'".into()));
                    }
                    pow = s[start..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| Error::Parse("exponent overflows usize".into()))?;
                }
            } else if coeff.is_none() {
                return Err(Error::Parse(format!("unexpected character in {input:?}")));
            }
            let c = coeff.unwrap_or(1);
            let c = if sign_neg { fq.neg(fq.element(c)) } else { fq.element(c) };
            terms.push((c, pow));
            if i == s.len() {
                break;
            }
            match s[i] {
                '+' => sign_neg = false,
                '-' => sign_neg = true,
                _ => return Err(Error::Parse(format!("unexpected character {:?}", s[i]))),
            }
            i += 1;
        }
        let maxdeg = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![0u64; maxdeg + 1];
        for (c, p) in terms {
            coeffs[p] = fq.add(coeffs[p], c);
        }
        Ok(PolyA::new(fq, coeffs))
    }
}

impl fmt::Display for PolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, _) => write!(f, "{c}*T")?,
                (_, 1) => write!(f, "T^{i}")?,
                (_, _) => write!(f, "{c}*T^{i}")?,
            }
        }
        Ok(())
    }
}
