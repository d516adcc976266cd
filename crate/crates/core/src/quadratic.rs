//! The imaginary quadratic field K = k(sqrt(D)) for square-free non-constant
//! D in A, its maximal order O_K = A[w] with w^2 = D, prime splitting, and
//! conjugation/norm/trace.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{is_irreducible, is_squarefree, Fq, PolyA, ResidueField};
use crate::error::{Error, Result};

/// Behavior of the infinite place of k in K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InfinityType {
    /// deg D odd.
    Ramified,
    /// deg D even with non-square leading coefficient.
    Inert,
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct QfRepr {
    fq: Fq,
    d: PolyA,
    infinity: InfinityType,
    genus: u32,
}

/// Shared-handle description of K; cheap to clone, equality by content.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadField(Arc<QfRepr>);

impl fmt::Debug for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K = F_{}(T, sqrt({}))", self.0.fq.q(), self.0.d)
    }
}

/// Validates D and classifies the infinite place.
pub fn make_field(fq: &Fq, d: &PolyA) -> Result<QuadField> {
    fq.ensure_same(d.field())?;
    if d.is_zero() || d.is_constant() {
        return Err(Error::DegenerateConstantField);
    }
    if !is_squarefree(d) {
        return Err(Error::NotSquareFree(d.to_string()));
    }
    let infinity = if d.deg() % 2 == 1 {
        InfinityType::Ramified
    } else if !fq.is_square(d.lead()) {
        InfinityType::Inert
    } else {
        return Err(Error::RealField(d.to_string()));
    };
    let genus = ((d.deg() - 1) / 2) as u32;
    Ok(QuadField(Arc::new(QfRepr {
        fq: fq.clone(),
        d: d.clone(),
        infinity,
        genus,
    })))
}

impl QuadField {
    pub fn fq(&self) -> &Fq {
        &self.0.fq
    }
    pub fn d(&self) -> &PolyA {
        &self.0.d
    }
    pub fn infinity_type(&self) -> InfinityType {
        self.0.infinity
    }
    pub fn genus(&self) -> u32 {
        self.0.genus
    }

    pub fn zero(&self) -> QuadElement {
        QuadElement::from_polys(self, &PolyA::zero(self.fq()), &PolyA::zero(self.fq()))
    }
    pub fn one(&self) -> QuadElement {
        QuadElement::from_polys(self, &PolyA::one(self.fq()), &PolyA::zero(self.fq()))
    }
    /// The generator w = sqrt(D).
    pub fn omega(&self) -> QuadElement {
        QuadElement::from_polys(self, &PolyA::zero(self.fq()), &PolyA::one(self.fq()))
    }

    pub fn element(&self, x: &PolyA, y: &PolyA, den: &PolyA) -> Result<QuadElement> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QuadElement::new(self, x.clone(), y.clone(), den.clone()))
    }
}

/// An element x + y*w of K, stored as a polynomial pair over a common monic
/// denominator coprime to the numerator gcd.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElement {
    k: QuadField,
    x: PolyA,
    y: PolyA,
    den: PolyA,
}

impl fmt::Debug for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "({}) + ({})*w", self.x, self.y)
        } else {
            write!(f, "[({}) + ({})*w]/({})", self.x, self.y, self.den)
        }
    }
}

impl QuadElement {
    fn new(k: &QuadField, x: PolyA, y: PolyA, den: PolyA) -> QuadElement {
        // reduce: cancel gcd(x, y, den), then make den monic
        let g = x.gcd(&y).gcd(&den);
        let (x, y, den) = if g.is_one() || g.is_zero() {
            (x, y, den)
        } else {
            (
                x.div_exact(&g).unwrap(),
                y.div_exact(&g).unwrap(),
                den.div_exact(&g).unwrap(),
            )
        };
        let unit = k.fq().inv(den.lead());
        QuadElement {
            k: k.clone(),
            x: x.scale(unit),
            y: y.scale(unit),
            den: den.scale(unit),
        }
    }

    pub fn from_polys(k: &QuadField, x: &PolyA, y: &PolyA) -> QuadElement {
        QuadElement::new(k, x.clone(), y.clone(), PolyA::one(k.fq()))
    }

    pub fn from_poly(k: &QuadField, x: &PolyA) -> QuadElement {
        Self::from_polys(k, x, &PolyA::zero(k.fq()))
    }

    pub fn field(&self) -> &QuadField {
        &self.k
    }
    pub fn num_x(&self) -> &PolyA {
        &self.x
    }
    pub fn num_y(&self) -> &PolyA {
        &self.y
    }
    pub fn den(&self) -> &PolyA {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// True when the element lies in the base field k.
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn is_integral_over_a(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &QuadElement) -> QuadElement {
        assert_eq!(self.k, other.k, "elements of different fields");
        let x = self.x.mul(&other.den).add(&other.x.mul(&self.den));
        let y = self.y.mul(&other.den).add(&other.y.mul(&self.den));
        QuadElement::new(&self.k, x, y, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> QuadElement {
        QuadElement {
            k: self.k.clone(),
            x: self.x.neg(),
            y: self.y.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &QuadElement) -> QuadElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QuadElement) -> QuadElement {
        assert_eq!(self.k, other.k, "elements of different fields");
        let d = self.k.d();
        let x = self
            .x
            .mul(&other.x)
            .add(&self.y.mul(&other.y).mul(d));
        let y = self.x.mul(&other.y).add(&self.y.mul(&other.x));
        QuadElement::new(&self.k, x, y, self.den.mul(&other.den))
    }

    pub fn scale_poly(&self, c: &PolyA) -> QuadElement {
        QuadElement::new(
            &self.k,
            self.x.mul(c),
            self.y.mul(c),
            self.den.clone(),
        )
    }

    pub fn conj(&self) -> QuadElement {
        QuadElement {
            k: self.k.clone(),
            x: self.x.clone(),
            y: self.y.neg(),
            den: self.den.clone(),
        }
    }

    /// Norm x^2 - D y^2 as a reduced fraction (numerator, monic denominator).
    pub fn norm(&self) -> (PolyA, PolyA) {
        let num = self.x.mul(&self.x).sub(&self.y.mul(&self.y).mul(self.k.d()));
        let den = self.den.mul(&self.den);
        reduce_fraction(num, den)
    }

    /// Trace 2x as a reduced fraction.
    pub fn trace(&self) -> (PolyA, PolyA) {
        let two = PolyA::constant(self.k.fq(), 2);
        reduce_fraction(self.x.mul(&two), self.den.clone())
    }

    /// deg(norm); the anisotropy law makes this max(2 deg x, 2 deg y + deg D)
    /// shifted by the denominator. Returns None for zero.
    pub fn norm_degree(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let dx = if self.x.is_zero() {
            i64::MIN
        } else {
            2 * self.x.deg()
        };
        let dy = if self.y.is_zero() {
            i64::MIN
        } else {
            2 * self.y.deg() + self.k.d().deg()
        };
        Some(dx.max(dy) - 2 * self.den.deg())
    }

    pub fn inv(&self) -> Result<QuadElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // conj / norm: ((x - yw)/den) * (nd/nn); the constructor renormalizes
        // the denominator to monic.
        let (nn, nd) = self.norm();
        Ok(QuadElement::new(
            &self.k,
            self.x.mul(&nd),
            self.y.neg().mul(&nd),
            self.den.mul(&nn),
        ))
    }

    pub fn mul_inv(&self, other: &QuadElement) -> Result<QuadElement> {
        Ok(self.mul(&other.inv()?))
    }

    /// Deterministic unit normalization: scales by the unit making the
    /// dominant coordinate monic. Homothety witnesses are unique mod F_q*, so
    /// this pins the representative.
    pub fn unit_normalized(&self) -> QuadElement {
        let fq = self.k.fq();
        let lead = if self.y.is_zero() {
            self.x.lead()
        } else if self.x.is_zero() {
            self.y.lead()
        } else if 2 * self.x.deg() >= 2 * self.y.deg() + self.k.d().deg() {
            self.x.lead()
        } else {
            self.y.lead()
        };
        if lead == 0 || lead == 1 {
            return self.clone();
        }
        let u = fq.inv(lead);
        QuadElement {
            k: self.k.clone(),
            x: self.x.scale(u),
            y: self.y.scale(u),
            den: self.den.clone(),
        }
    }

    /// Canonical order on elements: by (y, x, den) in the polynomial order.
    pub fn cmp_canonical(&self, other: &QuadElement) -> std::cmp::Ordering {
        self.y
            .cmp_canonical(&other.y)
            .then_with(|| self.x.cmp_canonical(&other.x))
            .then_with(|| self.den.cmp_canonical(&other.den))
    }
}

pub fn reduce_fraction(num: PolyA, den: PolyA) -> (PolyA, PolyA) {
    assert!(!den.is_zero());
    let g = num.gcd(&den);
    let (num, den) = if g.is_one() || g.is_zero() {
        (num, den)
    } else {
        (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
    };
    let u = den.field().inv(den.lead());
    (num.scale(u), den.scale(u))
}

/// Splitting data of a finite prime of A in K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitType {
    pub prime: PolyA,
    /// +1 split, -1 inert, 0 ramified.
    pub chi: i32,
    /// A square root of D mod the prime when chi = +1 (the smaller of the
    /// two in canonical order).
    pub root: Option<PolyA>,
}

/// chi = (D mod q0)^((|q0|-1)/2) evaluated in A/q0, with a root of D when
/// D is a nonzero square.
pub fn splitting_type(k: &QuadField, q0: &PolyA) -> Result<SplitType> {
    let rf = ResidueField::new(q0)?;
    let chi = rf.legendre(k.d());
    let root = if chi == 1 { rf.sqrt(k.d()) } else { None };
    Ok(SplitType {
        prime: q0.monic(),
        chi,
        root,
    })
}

/// [O_K^* : O_c^*]. With D square-free and non-constant the constant field of
/// K equals F_q, so both unit groups are the torsion group F_q^* and the
/// index is 1. Kept as an operation for forward generality.
pub fn unit_index(k: &QuadField, c: &PolyA) -> Result<u64> {
    if c.is_zero() {
        return Err(Error::ZeroScale);
    }
    // Torsion units are the units of the constant field of K. A constant
    // subfield larger than F_q would force D to be a constant times a square,
    // which make_field already excludes.
    debug_assert!(!k.d().is_constant() && is_squarefree(k.d()));
    Ok(1)
}

/// Convenience check used by the Heegner hypothesis.
pub fn is_split(k: &QuadField, q0: &PolyA) -> Result<bool> {
    if !is_irreducible(q0) {
        return Err(Error::NotIrreducible(q0.to_string()));
    }
    Ok(splitting_type(k, q0)?.chi == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn p(s: &str) -> PolyA {
        PolyA::parse(&f3(), s).unwrap()
    }

    fn running_k() -> QuadField {
        make_field(&f3(), &p("T^3+2*T+1")).unwrap()
    }

    #[test]
    fn classification() {
        let k = running_k();
        assert_eq!(k.infinity_type(), InfinityType::Ramified);
        assert_eq!(k.genus(), 1);
        assert_eq!(
            make_field(&f3(), &p("T^2+1")).unwrap_err(),
            Error::RealField("T^2+1".into())
        );
        assert_eq!(
            make_field(&f3(), &p("T^2")).unwrap_err(),
            Error::NotSquareFree("T^2".into())
        );
        assert_eq!(
            make_field(&f3(), &p("2")).unwrap_err(),
            Error::DegenerateConstantField
        );
        // deg 2 with non-square lead: 2 is not a square mod 3
        let k2 = make_field(&f3(), &p("2*T^2+1")).unwrap();
        assert_eq!(k2.infinity_type(), InfinityType::Inert);
    }

    #[test]
    fn splitting_running_example() {
        let k = running_k();
        let s = splitting_type(&k, &p("T")).unwrap();
        assert_eq!(s.chi, 1);
        assert_eq!(s.root.unwrap(), p("1"));
        let s = splitting_type(&k, &p("T^3+2*T+1")).unwrap();
        assert_eq!(s.chi, 0);
        let s = splitting_type(&k, &p("T+1")).unwrap();
        assert_eq!(s.chi, 1);
        assert_eq!(s.root.unwrap(), p("1"));
    }

    #[test]
    fn conj_norm_trace_examples() {
        let k = running_k();
        let w = k.omega();
        assert_eq!(w.conj(), w.neg());
        assert_eq!(w.norm().0, k.d().neg());
        assert_eq!(w.trace().0, PolyA::zero(&f3()));
        let one = k.one();
        assert_eq!(one.conj(), one);
        assert_eq!(one.norm().0, p("1"));
        assert_eq!(one.trace().0, p("2"));
        // (1 + w): norm = 1 - D = 2T^3 + T
        let e = one.add(&w);
        assert_eq!(e.norm().0, p("2*T^3+T"));
    }

    #[test]
    fn unit_index_is_one() {
        let k = running_k();
        assert_eq!(unit_index(&k, &p("1")).unwrap(), 1);
        assert_eq!(unit_index(&k, &p("T^3")).unwrap(), 1);
        assert_eq!(unit_index(&k, &PolyA::zero(&f3())).unwrap_err(), Error::ZeroScale);
    }

    #[test]
    fn splitting_census_degree_up_to_3() {
        // #split == #inert among monic irreducibles coprime to D, checked
        // against direct square enumeration in each residue field.
        let k = running_k();
        let mut split = 0;
        let mut inert = 0;
        for q0 in crate::algebra::irreducibles_up_to(&f3(), 3) {
            if k.d().rem(&q0).unwrap().is_zero() {
                continue;
            }
            let s = splitting_type(&k, &q0).unwrap();
            let rf = ResidueField::new(&q0).unwrap();
            let squares: std::collections::HashSet<String> = rf
                .elements()
                .iter()
                .map(|e| rf.mul(e, e).to_string())
                .collect();
            let expected = if squares.contains(&rf.reduce(k.d()).to_string()) {
                1
            } else {
                -1
            };
            assert_eq!(s.chi, expected, "prime {q0}");
            if s.chi == 1 {
                split += 1;
            } else {
                inert += 1;
            }
        }
        // 13 primes coprime to D up to degree 3; the census balances up to
        // the Weil bound
        assert_eq!(split + inert, 13);
        assert!((split - inert as i64).abs() <= 3, "split {split} inert {inert}");
    }

    fn arb_elem() -> impl Strategy<Value = QuadElement> {
        (
            proptest::collection::vec(0u64..3, 0..5),
            proptest::collection::vec(0u64..3, 0..5),
        )
            .prop_map(|(x, y)| {
                let k = running_k();
                QuadElement::from_polys(
                    &k,
                    &PolyA::new(&f3(), x),
                    &PolyA::new(&f3(), y),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn norm_multiplicative(a in arb_elem(), b in arb_elem()) {
            let lhs = a.mul(&b).norm();
            let (na, _) = a.norm();
            let (nb, _) = b.norm();
            prop_assert_eq!(lhs.0, na.mul(&nb));
        }

        #[test]
        fn norm_degree_law(a in arb_elem()) {
            // deg norm = max(2 deg x, 2 deg y + deg D) for nonzero elements
            if !a.is_zero() {
                let (n, d) = a.norm();
                prop_assert!(d.is_one());
                prop_assert_eq!(n.deg(), a.norm_degree().unwrap());
            }
        }
    }

    #[test]
    fn norm_degree_law_inert_type() {
        // same law must hold when deg D is even with non-square lead
        let k = make_field(&f3(), &p("2*T^2+1")).unwrap();
        for cx in 0..27u64 {
            for cy in 0..27u64 {
                let x = PolyA::new(&f3(), vec![cx % 3, (cx / 3) % 3, cx / 9]);
                let y = PolyA::new(&f3(), vec![cy % 3, (cy / 3) % 3, cy / 9]);
                let e = QuadElement::from_polys(&k, &x, &y);
                if e.is_zero() {
                    continue;
                }
                assert_eq!(e.norm().0.deg(), e.norm_degree().unwrap());
            }
        }
    }
}
