//! Fractional rank-2 A-lattices in K: the objects standing in for Drinfeld
//! modules. Canonical Hermite form makes equality structural and lattices
//! hashable, which the class-group and moduli machinery relies on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{hnf2, snf2, Mat2, PolyA};
use crate::error::{Error, Result};
use crate::quadratic::{reduce_fraction, QuadElement, QuadField};

/// Canonical form (1/den) * (A*a + A*(b + c*w)) with a, c, den monic,
/// deg b < deg a, and den coprime to gcd(a, b, c).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    k: QuadField,
    den: PolyA,
    a: PolyA,
    b: PolyA,
    c: PolyA,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(1/{})<{}, {} + ({})w>", self.den, self.a, self.b, self.c)
    }
}

/// An order O_c = A + c*O_K, tracked by its conductor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Order {
    k: QuadField,
    cond: PolyA,
}

impl Order {
    pub fn new(k: &QuadField, cond: &PolyA) -> Result<Order> {
        if cond.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(Order {
            k: k.clone(),
            cond: cond.monic(),
        })
    }

    pub fn maximal(k: &QuadField) -> Order {
        Order {
            k: k.clone(),
            cond: PolyA::one(k.fq()),
        }
    }

    pub fn field(&self) -> &QuadField {
        &self.k
    }

    pub fn conductor(&self) -> &PolyA {
        &self.cond
    }

    pub fn is_maximal(&self) -> bool {
        self.cond.is_one()
    }

    pub fn lattice(&self) -> Lattice {
        Lattice {
            k: self.k.clone(),
            den: PolyA::one(self.k.fq()),
            a: PolyA::one(self.k.fq()),
            b: PolyA::zero(self.k.fq()),
            c: self.cond.clone(),
        }
    }

    pub fn contains(&self, other: &Order) -> bool {
        self.cond.divides(&other.cond)
    }
}

/// Elementary divisors of a containment L1 <= L2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientShape {
    pub d1: PolyA,
    pub d2: PolyA,
    pub cyclic: bool,
    pub index_ideal: PolyA,
}

impl Lattice {
    /// Canonical lattice from a fractional generating set.
    pub fn from_generators(gens: &[QuadElement]) -> Result<Lattice> {
        let k = gens
            .first()
            .ok_or(Error::RankDeficient)?
            .field()
            .clone();
        // common denominator
        let mut den = PolyA::one(k.fq());
        for g in gens {
            if g.field() != &k {
                return Err(Error::FieldMismatch);
            }
            den = den.lcm(g.den());
        }
        let mut rows = Vec::with_capacity(gens.len());
        for g in gens {
            let m = den.div_exact(g.den())?;
            rows.push((g.num_x().mul(&m), g.num_y().mul(&m)));
        }
        let h = hnf2(&rows)?;
        Ok(Self::normalize(&k, den, h.a, h.b, h.c))
    }

    fn normalize(k: &QuadField, den: PolyA, a: PolyA, b: PolyA, c: PolyA) -> Lattice {
        let g = a.gcd(&b).gcd(&c).gcd(&den);
        let (den, a, b, c) = if g.is_one() {
            (den, a, b, c)
        } else {
            (
                den.div_exact(&g).unwrap(),
                a.div_exact(&g).unwrap(),
                b.div_exact(&g).unwrap(),
                c.div_exact(&g).unwrap(),
            )
        };
        Lattice { k: k.clone(), den, a, b, c }
    }

    /// Rebuilds from stored parts (used by JSON input); runs the full
    /// canonicalization so any spanning description is accepted.
    pub fn from_parts(
        k: &QuadField,
        den: &PolyA,
        a: &PolyA,
        b: &PolyA,
        c: &PolyA,
    ) -> Result<Lattice> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let e1 = k.element(a, &PolyA::zero(k.fq()), den)?;
        let e2 = k.element(b, c, den)?;
        Lattice::from_generators(&[e1, e2])
    }

    pub fn field(&self) -> &QuadField {
        &self.k
    }
    pub fn den(&self) -> &PolyA {
        &self.den
    }
    pub fn a(&self) -> &PolyA {
        &self.a
    }
    pub fn b(&self) -> &PolyA {
        &self.b
    }
    pub fn c(&self) -> &PolyA {
        &self.c
    }

    pub fn basis(&self) -> [QuadElement; 2] {
        [
            self.k
                .element(&self.a, &PolyA::zero(self.k.fq()), &self.den)
                .unwrap(),
            self.k.element(&self.b, &self.c, &self.den).unwrap(),
        ]
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Content of the integral part: gcd(a, b, c).
    pub fn content(&self) -> PolyA {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    /// The primitive integral lattice den/content * L.
    pub fn primitive_part(&self) -> Lattice {
        let g = self.content();
        Lattice {
            k: self.k.clone(),
            den: PolyA::one(self.k.fq()),
            a: self.a.div_exact(&g).unwrap(),
            b: self.b.div_exact(&g).unwrap(),
            c: self.c.div_exact(&g).unwrap(),
        }
    }

    /// Canonical order on lattices (used for deterministic choices).
    pub fn cmp_canonical(&self, other: &Lattice) -> std::cmp::Ordering {
        self.a
            .cmp_canonical(&other.a)
            .then_with(|| self.b.cmp_canonical(&other.b))
            .then_with(|| self.c.cmp_canonical(&other.c))
            .then_with(|| self.den.cmp_canonical(&other.den))
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        if self.k != other.k {
            return Err(Error::FieldMismatch);
        }
        let [a1, a2] = self.basis();
        let [b1, b2] = other.basis();
        Lattice::from_generators(&[a1, a2, b1, b2])
    }

    pub fn product(&self, other: &Lattice) -> Result<Lattice> {
        if self.k != other.k {
            return Err(Error::FieldMismatch);
        }
        let [a1, a2] = self.basis();
        let [b1, b2] = other.basis();
        Lattice::from_generators(&[a1.mul(&b1), a1.mul(&b2), a2.mul(&b1), a2.mul(&b2)])
    }

    pub fn scale(&self, s: &QuadElement) -> Result<Lattice> {
        if self.k != *s.field() {
            return Err(Error::FieldMismatch);
        }
        if s.is_zero() {
            return Err(Error::ZeroScale);
        }
        let [e1, e2] = self.basis();
        Lattice::from_generators(&[e1.mul(s), e2.mul(s)])
    }

    pub fn scale_poly(&self, s: &PolyA) -> Result<Lattice> {
        self.scale(&QuadElement::from_poly(&self.k, s))
    }

    /// Trace dual {x : tr(x L) <= A}; swaps sums with intersections.
    pub fn dual(&self) -> Lattice {
        // For basis rows (a,0),(b,c)/den the dual is
        // span{(cD, -b), (0, a)} * den/(2acD).
        let d = self.k.d();
        let two_acd = self
            .a
            .mul(&self.c)
            .mul(d)
            .scale(2);
        let g1 = crate::quadratic::QuadElement::from_polys(
            &self.k,
            &self.c.mul(d).mul(&self.den),
            &self.b.neg().mul(&self.den),
        );
        let g1 = div_elem(&g1, &two_acd);
        let g2 = crate::quadratic::QuadElement::from_polys(
            &self.k,
            &PolyA::zero(self.k.fq()),
            &self.a.mul(&self.den),
        );
        let g2 = div_elem(&g2, &two_acd);
        Lattice::from_generators(&[g1, g2]).expect("dual of a lattice has rank 2")
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        if self.k != other.k {
            return Err(Error::FieldMismatch);
        }
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    /// Transporter (other : self) = {x in K : x * self <= other}.
    pub fn transporter(&self, other: &Lattice) -> Result<Lattice> {
        if self.k != other.k {
            return Err(Error::FieldMismatch);
        }
        Ok(self.product(&other.dual())?.dual())
    }

    /// Membership test for a field element.
    pub fn contains_element(&self, e: &QuadElement) -> bool {
        if e.is_zero() {
            return true;
        }
        // beta = y*den/(d*c), alpha = (x*den - d*beta*b)/(d*a)
        let dn = e.den();
        let num_beta = e.num_y().mul(&self.den);
        let den_beta = dn.mul(&self.c);
        let (q_beta, r_beta) = match num_beta.divrem(&den_beta) {
            Ok(v) => v,
            Err(_) => return false,
        };
        if !r_beta.is_zero() {
            return false;
        }
        let num_alpha = e.num_x().mul(&self.den).sub(&dn.mul(&q_beta).mul(&self.b));
        let den_alpha = dn.mul(&self.a);
        match num_alpha.divrem(&den_alpha) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        let [e1, e2] = other.basis();
        self.contains_element(&e1) && self.contains_element(&e2)
    }

    /// Elementary divisors of other/self for self <= other.
    pub fn quotient_shape(&self, other: &Lattice) -> Result<QuotientShape> {
        if self.k != other.k {
            return Err(Error::FieldMismatch);
        }
        // X = (den_other/den_self) * B_self * B_other^{-1} must be integral
        let b_self = Mat2::new([
            [self.a.clone(), PolyA::zero(self.k.fq())],
            [self.b.clone(), self.c.clone()],
        ]);
        let b_other = Mat2::new([
            [other.a.clone(), PolyA::zero(self.k.fq())],
            [other.b.clone(), other.c.clone()],
        ]);
        let num = b_self.mul(&b_other.adj());
        let den = self.den.mul(&b_other.det());
        let mut rows: Vec<Vec<PolyA>> = Vec::new();
        for i in 0..2 {
            let mut row = Vec::new();
            for j in 0..2 {
                let entry = num.rows[i][j].mul(&other.den);
                let (q, r) = entry.divrem(&den)?;
                if !r.is_zero() {
                    return Err(Error::NotContained);
                }
                row.push(q);
            }
            rows.push(row);
        }
        let x = Mat2::new([
            [rows[0][0].clone(), rows[0][1].clone()],
            [rows[1][0].clone(), rows[1][1].clone()],
        ]);
        let (d1, d2) = snf2(&x)?;
        let cyclic = d1.is_one();
        let index_ideal = d1.mul(&d2);
        Ok(QuotientShape { d1, d2, cyclic, index_ideal })
    }

    /// End(L) = {x : xL <= L} as an order; the conductor is the lcm of the
    /// denominators of the w-action matrix in L's basis.
    pub fn multiplier_ring(&self) -> Order {
        let d = self.k.d();
        // entries of the action of w on the basis: -b/c, a/c,
        // (c^2 D - b^2)/(ac), b/c
        let e3_num = self.c.mul(&self.c).mul(d).sub(&self.b.mul(&self.b));
        let e3_den = self.a.mul(&self.c);
        let d1 = reduce_fraction(self.b.clone(), self.c.clone()).1;
        let d2 = reduce_fraction(self.a.clone(), self.c.clone()).1;
        let d3 = reduce_fraction(e3_num, e3_den).1;
        let cond = d1.lcm(&d2).lcm(&d3);
        Order {
            k: self.k.clone(),
            cond,
        }
    }

    pub fn conductor(&self) -> PolyA {
        self.multiplier_ring().cond
    }

    /// Monic generator of the index ideal [O : L] as a reduced fraction
    /// (numerator, denominator).
    pub fn ideal_norm(&self, order: &Order) -> Result<(PolyA, PolyA)> {
        // End(L) >= O, i.e. cond(End(L)) | cond(O)
        let end = self.multiplier_ring();
        if !end.cond.divides(&order.cond) {
            return Err(Error::OrderMismatch);
        }
        let num = self.a.mul(&self.c);
        let den = self.den.mul(&self.den).mul(&order.cond);
        Ok(reduce_fraction(num, den))
    }

    /// deg of the fractional ideal norm.
    pub fn norm_degree(&self, order: &Order) -> Result<i64> {
        let (n, d) = self.ideal_norm(order)?;
        Ok(n.deg() - d.deg())
    }

    /// O_{c2} * L.
    pub fn order_extend(&self, c2: &PolyA) -> Result<Lattice> {
        let o = Order::new(&self.k, c2)?;
        self.product(&o.lattice())
    }

    /// All nonzero lattice vectors of norm degree exactly `target`, one per
    /// unit orbit, in canonical order. Complete by the anisotropy law.
    pub fn vectors_of_norm_degree(&self, target: i64, budget: usize) -> Result<Vec<QuadElement>> {
        let mut spent = 0usize;
        self.vectors_exact(target, budget, &mut spent)
    }

    fn vectors_exact(
        &self,
        target: i64,
        budget: usize,
        spent: &mut usize,
    ) -> Result<Vec<QuadElement>> {
        let fq = self.k.fq();
        let degd = self.k.d().deg();
        let bprime = target + 2 * self.den.deg();
        let bx = bprime.div_euclid(2);
        let by = (bprime - degd).div_euclid(2) - self.c.deg();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let mut push = |x: PolyA, y: PolyA, this: &Lattice| {
            let v = this
                .k
                .element(&x, &y, &this.den)
                .expect("den nonzero")
                .unit_normalized();
            if v.is_zero() {
                return;
            }
            if v.norm_degree() == Some(target) && seen.insert((v.num_x().clone(), v.num_y().clone()))
            {
                out.push(v);
            }
        };
        // beta = 0: X = gamma * a, gamma != 0
        let gmax = bx - self.a.deg();
        if gmax >= 0 {
            for gamma in polys_up_to(fq, gmax as usize) {
                *spent += 1;
                if *spent > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                if gamma.is_zero() {
                    continue;
                }
                push(gamma.mul(&self.a), PolyA::zero(fq), self);
            }
        }
        // beta != 0
        if by >= 0 {
            for beta in polys_up_to(fq, by as usize) {
                if beta.is_zero() {
                    continue;
                }
                let y = beta.mul(&self.c);
                let r = beta.mul(&self.b).rem(&self.a).expect("a monic nonzero");
                // gamma = 0 candidate
                *spent += 1;
                if *spent > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                if r.deg() <= bx {
                    push(r.clone(), y.clone(), self);
                }
                let gmax = bx - self.a.deg();
                if gmax >= 0 {
                    for gamma in polys_up_to(fq, gmax as usize) {
                        *spent += 1;
                        if *spent > budget {
                            return Err(Error::BudgetExceeded(budget));
                        }
                        if gamma.is_zero() {
                            continue;
                        }
                        let x = gamma.mul(&self.a).add(&r);
                        push(x, y.clone(), self);
                    }
                }
            }
        }
        out.sort_by(|p, q| p.cmp_canonical(q));
        Ok(out)
    }

    /// Smallest norm degree of a nonzero vector.
    pub fn minimal_norm_degree(&self, budget: usize) -> Result<i64> {
        let dd = self.den.deg();
        let floor = (2 * self.a.deg()).min(2 * self.c.deg() + self.k.d().deg()) - 2 * dd;
        let ceil = 2 * self.a.deg() - 2 * dd; // a/den is always a vector
        let mut spent = 0usize;
        for b in floor..=ceil {
            if !self.vectors_exact(b, budget, &mut spent)?.is_empty() {
                return Ok(b);
            }
        }
        Err(Error::Internal("minimal vector scan missed a/den".into()))
    }

    /// All nonzero vectors of minimal norm degree (mod units), canonical
    /// order, capped at `count`.
    pub fn minimal_vectors(&self, count: usize, budget: usize) -> Result<Vec<QuadElement>> {
        if count == 0 {
            return Err(Error::Internal("count must be >= 1".into()));
        }
        let deg = self.minimal_norm_degree(budget)?;
        let mut v = self.vectors_of_norm_degree(deg, budget)?;
        v.truncate(count);
        Ok(v)
    }

    /// Principality test for a proper O-ideal by the norm-degree criterion:
    /// x generates iff deg N(x) equals the degree of the index ideal.
    pub fn is_principal(&self, order: &Order, budget: usize) -> Result<Option<QuadElement>> {
        if self.multiplier_ring() != *order {
            return Err(Error::NotProper);
        }
        let target = self.norm_degree(order)?;
        let mindeg = self.minimal_norm_degree(budget)?;
        if mindeg != target {
            return Ok(None);
        }
        for x in self.vectors_of_norm_degree(target, budget)? {
            let candidate = order.lattice().scale(&x)?;
            if candidate == *self {
                return Ok(Some(x));
            }
        }
        Err(Error::Internal(
            "norm-degree witness failed to generate; anisotropy violated".into(),
        ))
    }

    /// (O : I) with the product verified to be O; proper ideals of quadratic
    /// orders are invertible, so failure means the input was not proper.
    pub fn ideal_inverse(&self, order: &Order) -> Result<Lattice> {
        // the input must at least be an O-module
        if !self.multiplier_ring().cond.divides(&order.cond) {
            return Err(Error::NotInvertible);
        }
        let inv = self.transporter(&order.lattice())?;
        if self.product(&inv)? != order.lattice() {
            return Err(Error::NotInvertible);
        }
        Ok(inv)
    }

    /// A scalar with lambda * self = other, if one exists (unique mod units).
    pub fn homothety_test(&self, other: &Lattice, budget: usize) -> Result<Option<QuadElement>> {
        if self.k != other.k {
            return Err(Error::FieldMismatch);
        }
        let end = self.multiplier_ring();
        if end != other.multiplier_ring() {
            return Ok(None); // conductor is a homothety invariant
        }
        let t = self.transporter(other)?;
        let target = other.norm_degree(&end)? - self.norm_degree(&end)?;
        for lam in t.vectors_of_norm_degree(target, budget)? {
            if self.scale(&lam)? == *other {
                return Ok(Some(lam));
            }
        }
        Ok(None)
    }

    /// Canonical representative of the ideal class of a proper O-ideal: the
    /// least (in canonical order) primitive O_K-integral lattice of minimal
    /// norm degree in the class. The candidates are the minimal vectors of
    /// the transporter into O_K: minimality forces content 1, since dividing
    /// by the content would shrink the norm while staying in the transporter.
    pub fn reduced_class_rep(&self, order: &Order, budget: usize) -> Result<Lattice> {
        if self.multiplier_ring() != *order {
            return Err(Error::NotProper);
        }
        let i0 = if self.is_integral() && self.content().is_one() {
            self.clone()
        } else {
            self.primitive_part()
        };
        let j = i0.transporter(&Order::maximal(&self.k).lattice())?;
        let mut best: Option<Lattice> = None;
        for lam in j.minimal_vectors(usize::MAX, budget)? {
            let m = i0.scale(&lam)?;
            if !m.is_integral() || !m.content().is_one() {
                return Err(Error::Internal(
                    "reduced representative is not primitive integral".into(),
                ));
            }
            best = match best {
                None => Some(m),
                Some(cur) => {
                    if m.cmp_canonical(&cur) == std::cmp::Ordering::Less {
                        Some(m)
                    } else {
                        Some(cur)
                    }
                }
            };
        }
        best.ok_or_else(|| Error::Internal("transporter lattice has no minimal vectors".into()))
    }

    /// An integral representative of the class whose norm is coprime to the
    /// given modulus, found by scanning inverse-lattice vectors by degree.
    pub fn coprime_class_rep(
        &self,
        order: &Order,
        modulus: &PolyA,
        budget: usize,
    ) -> Result<Lattice> {
        if self.multiplier_ring() != *order {
            return Err(Error::NotProper);
        }
        let i0 = self.primitive_part();
        let j = i0.ideal_inverse(order)?;
        let start = j.minimal_norm_degree(budget)?;
        let mut spent = 0usize;
        for deg in start..start + 64 {
            for lam in j.vectors_exact(deg, budget, &mut spent)? {
                let m = i0.scale(&lam)?;
                let (n, _) = m.ideal_norm(order)?;
                if n.gcd(modulus).is_one() {
                    return Ok(m);
                }
            }
        }
        Err(Error::BudgetExceeded(budget))
    }
}

fn div_elem(e: &QuadElement, den: &PolyA) -> QuadElement {
    let k = e.field().clone();
    k.element(e.num_x(), e.num_y(), &e.den().mul(den))
        .expect("nonzero denominator")
}

fn polys_up_to(fq: &crate::algebra::Fq, max_deg: usize) -> Vec<PolyA> {
    let q = fq.q();
    let total = q.pow(max_deg as u32 + 1);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut coeffs = Vec::with_capacity(max_deg + 1);
        let mut v = code;
        for _ in 0..=max_deg {
            coeffs.push(v % q);
            v /= q;
        }
        out.push(PolyA::new(fq, coeffs));
    }
    out
}

/// Primes of O_K above a monic irreducible q0, in canonical order: both
/// conjugates for split q0, the unique ramified prime for q0 | D, and the
/// inert principal prime otherwise.
pub fn primes_above(k: &QuadField, q0: &PolyA) -> Result<Vec<Lattice>> {
    let split = crate::quadratic::splitting_type(k, q0)?;
    let ok = Order::maximal(k).lattice();
    match split.chi {
        1 => {
            let r = split.root.expect("split primes carry a root");
            let p1 = ok_prime(k, q0, &r)?;
            let p2 = ok_prime(k, q0, &r.neg().rem(q0)?)?;
            let mut v = vec![p1, p2];
            v.sort_by(|a, b| a.cmp_canonical(b));
            Ok(v)
        }
        0 => Ok(vec![ok_prime(k, q0, &PolyA::zero(k.fq()))?]),
        _ => Ok(vec![ok.scale_poly(q0)?]),
    }
}

/// The O_K-ideal (q0, w - r) for r a square root of D mod q0 (r = 0 in the
/// ramified case).
pub fn ok_prime(k: &QuadField, q0: &PolyA, r: &PolyA) -> Result<Lattice> {
    let g1 = QuadElement::from_poly(k, &q0.monic());
    let g2 = QuadElement::from_polys(k, &r.neg(), &PolyA::one(k.fq()));
    let g3 = g2.mul(&k.omega());
    Lattice::from_generators(&[g1.clone(), g2, g3, g1.mul(&k.omega())])
}

/// One ideal of O_K with cyclic quotient A/n for square-free split n: the
/// product of the primes (q, w - r_q) with canonical roots.
pub fn serialize_poly(p: &PolyA) -> String {
    p.to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LatticeJson {
    pub den: String,
    pub a: String,
    pub b: String,
    pub c: String,
}

impl Lattice {
    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            den: self.den.to_string(),
            a: self.a.to_string(),
            b: self.b.to_string(),
            c: self.c.to_string(),
        }
    }

    pub fn from_json(k: &QuadField, j: &LatticeJson) -> Result<Lattice> {
        let den = PolyA::parse(k.fq(), &j.den)?;
        let a = PolyA::parse(k.fq(), &j.a)?;
        let b = PolyA::parse(k.fq(), &j.b)?;
        let c = PolyA::parse(k.fq(), &j.c)?;
        Lattice::from_parts(k, &den, &a, &b, &c)
    }
}
