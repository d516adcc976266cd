//! Pic(O_c) as a finite abelian group with ideal-class representatives, the
//! exact-sequence cardinality formula, and the tower maps
//! Pic(O_{n+1}) -> Pic(O_n) realizing the inverse limit at finite level.

pub mod abgroup;
pub mod hn;
pub mod zeta;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

pub use abgroup::{AbGroupShape, RelationStructure};
pub use hn::{annihilator_bound, generator_lower_bound, hn_group, HnStruct};
pub use zeta::class_number_zeta;

use crate::algebra::{factor, irreducibles_of_degree, PolyA};
use crate::error::{Error, Result};
use crate::lattice::{primes_above, Lattice, Order};
use crate::quadratic::{splitting_type, unit_index, InfinityType, QuadField};

/// |(A/m)*| by the multiplicative closed form over the prime factorization.
pub fn a_unit_count(m: &PolyA) -> Result<u64> {
    if m.is_zero() {
        return Err(Error::ZeroScale);
    }
    let (_, factors) = factor(m, 0)?;
    let q = m.field().q();
    let mut out = 1u64;
    for (p, e) in factors {
        let ap = q.pow(p.deg() as u32);
        out *= ap.pow(e) - ap.pow(e - 1);
    }
    Ok(out)
}

/// |(O_K/mO_K)*| by splitting type, multiplicative over prime powers:
/// split (|q|^v - |q|^{v-1})^2, inert |q|^{2v} - |q|^{2v-2},
/// ramified |q|^{2v} - |q|^{2v-1}.
pub fn ok_unit_count_closed(k: &QuadField, m: &PolyA) -> Result<u64> {
    if m.is_zero() {
        return Err(Error::ZeroScale);
    }
    let (_, factors) = factor(m, 0)?;
    let q = k.fq().q();
    let mut out = 1u64;
    for (p, v) in factors {
        let ap = q.pow(p.deg() as u32);
        let chi = splitting_type(k, &p)?.chi;
        out *= match chi {
            1 => (ap.pow(v) - ap.pow(v - 1)).pow(2),
            -1 => ap.pow(2 * v) - ap.pow(2 * v - 2),
            _ => ap.pow(2 * v) - ap.pow(2 * v - 1),
        };
    }
    Ok(out)
}

/// Cardinality of the unit group of the finite ring O/(m O_K ∩ O) by direct
/// enumeration (x is a unit iff xO + M = O), with the closed-form value
/// attached for the maximal order.
pub fn unit_residue_card(order: &Order, m: &PolyA, budget: usize) -> Result<(u64, Option<u64>)> {
    if m.is_zero() {
        return Err(Error::ZeroScale);
    }
    let k = order.field();
    let o_lat = order.lattice();
    let m_lat = Order::maximal(k)
        .lattice()
        .scale_poly(&m.monic())?
        .intersect(&o_lat)?;
    // triangular coordinates of M inside O: reps are (u mod x_a, v mod x_c)
    let shape_mat = containment_matrix(&m_lat, &o_lat)?;
    let (xa, xb, xc) = shape_mat;
    let size = (k.fq().q() as u128).pow((xa.deg() + xc.deg()) as u32);
    if size > budget as u128 {
        return Err(Error::BudgetExceeded(budget));
    }
    let [e1, e2] = o_lat.basis();
    let mut count = 0u64;
    for u in residue_polys(&xa) {
        for v in residue_polys(&xc) {
            let x = e1.scale_poly(&u).add(&e2.scale_poly(&v));
            if x.is_zero() {
                // the zero class is a unit only in the zero ring
                if m_lat == o_lat {
                    count += 1;
                }
                continue;
            }
            let xo = o_lat.scale(&x)?;
            if xo.sum(&m_lat)? == o_lat {
                count += 1;
            }
        }
    }
    let _ = xb;
    let closed = if order.is_maximal() {
        Some(ok_unit_count_closed(k, m)?)
    } else {
        None
    };
    Ok((count, closed))
}

/// Rows of the basis of `sub` written in the basis of `sup`, triangularized:
/// returns (x_a, x_b, x_c) with rows (x_a, 0), (x_b, x_c).
fn containment_matrix(sub: &Lattice, sup: &Lattice) -> Result<(PolyA, PolyA, PolyA)> {
    use crate::algebra::{hnf2, Mat2};
    let fq = sub.field().fq();
    let b_sub = Mat2::new([
        [sub.a().clone(), PolyA::zero(fq)],
        [sub.b().clone(), sub.c().clone()],
    ]);
    let b_sup = Mat2::new([
        [sup.a().clone(), PolyA::zero(fq)],
        [sup.b().clone(), sup.c().clone()],
    ]);
    let num = b_sub.mul(&b_sup.adj());
    let den = sub.den().mul(&b_sup.det());
    let mut rows = Vec::new();
    for i in 0..2 {
        let mut row = Vec::new();
        for j in 0..2 {
            let entry = num.rows[i][j].mul(sup.den());
            let (q, r) = entry.divrem(&den)?;
            if !r.is_zero() {
                return Err(Error::NotContained);
            }
            row.push(q);
        }
        rows.push(row);
    }
    let h = hnf2(&[
        (rows[0][0].clone(), rows[0][1].clone()),
        (rows[1][0].clone(), rows[1][1].clone()),
    ])?;
    Ok((h.a, h.b, h.c))
}

fn residue_polys(m: &PolyA) -> Vec<PolyA> {
    let fq = m.field();
    let d = m.deg().max(0) as usize;
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
    out
}

/// |Pic(O_K)|: zeta oracle in the ramified case, exhaustive class
/// enumeration (every class contains a primitive ideal of norm degree at
/// most genus + 1) in the inert case.
pub fn maximal_class_number(k: &QuadField, budget: usize) -> Result<u64> {
    match k.infinity_type() {
        InfinityType::Ramified => class_number_zeta(k),
        InfinityType::Inert => {
            let okk = Order::maximal(k);
            let bound = k.genus() as i64 + 1;
            let mut classes: Vec<Lattice> = Vec::new();
            for (_, ideal) in primitive_ideals_up_to(k, bound)? {
                let rep = ideal.reduced_class_rep(&okk, budget)?;
                if !classes.contains(&rep) {
                    classes.push(rep);
                }
            }
            Ok(classes.len() as u64)
        }
    }
}

/// All primitive integral O_K-ideals (a, b + w), a monic of degree <= bound,
/// keyed by norm a. These are exactly the ideals with cyclic quotient.
pub fn primitive_ideals_up_to(k: &QuadField, bound: i64) -> Result<Vec<(PolyA, Lattice)>> {
    let fq = k.fq();
    let mut out = Vec::new();
    let mut monics: Vec<PolyA> = vec![PolyA::one(fq)];
    for d in 1..=bound.max(0) as usize {
        for tail in residue_polys(&PolyA::t_pow(fq, d)) {
            let a = tail.add(&PolyA::t_pow(fq, d));
            monics.push(a);
        }
    }
    for a in monics {
        for b in residue_polys(&a) {
            if a.is_one() && !b.is_zero() {
                continue;
            }
            let disc = b.mul(&b).sub(k.d());
            if a.is_one() || disc.rem(&a)?.is_zero() {
                let ideal = crate::lattice::ok_prime(k, &a, &b.neg())?;
                out.push((a.clone(), ideal));
            }
        }
    }
    Ok(out)
}

/// |Pic(O_c)| from the exact sequence:
/// |Pic(O_K)| * |(O_K/cO_K)*| / (|(A/c)*| * [O_K* : O_c*]).
pub fn pic_card_exact(order: &Order, budget: usize) -> Result<u64> {
    let k = order.field();
    let h = maximal_class_number(k, budget)?;
    if order.is_maximal() {
        return Ok(h);
    }
    let c = order.conductor();
    let ok_units = ok_unit_count_closed(k, c)?;
    let a_units = a_unit_count(c)?;
    let idx = unit_index(k, c)?;
    Ok(h * ok_units / a_units / idx)
}

/// One ideal class, identified by its index in the enumerated group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PicClass(pub usize);

/// Pic(O) with representatives, canonical coordinates, and discrete logs.
pub struct PicGroup {
    order: Order,
    pub shape: AbGroupShape,
    elements: Vec<Lattice>,
    index_of: HashMap<Lattice, usize>,
    coords: Vec<Vec<u64>>,
    coord_index: HashMap<Vec<u64>, usize>,
    /// Ideal-class representatives realizing the invariant factors.
    pub basis: Vec<Lattice>,
    budget: usize,
}

impl PicGroup {
    /// Enumerates Pic(O) by closing prime classes coprime to the conductor
    /// under multiplication, using the exact-sequence cardinality as the
    /// completeness certificate.
    pub fn compute(order: &Order, budget: usize) -> Result<PicGroup> {
        let k = order.field();
        let target = pic_card_exact(order, budget)?;
        let mut gens: Vec<Lattice> = Vec::new();
        let mut degree = 0usize;
        loop {
            let closure = Self::close(order, &gens, target, budget)?;
            if let Some((elements, words, relations)) = closure {
                let rs = RelationStructure::from_relations(gens.len(), &relations, target)?;
                let mut coords = Vec::with_capacity(elements.len());
                let mut coord_index = HashMap::new();
                let mut index_of = HashMap::new();
                for (i, (lat, w)) in elements.iter().zip(&words).enumerate() {
                    let c = rs.coords_of(w);
                    coord_index.insert(c.clone(), i);
                    coords.push(c);
                    index_of.insert(lat.clone(), i);
                }
                let basis = rs
                    .basis_words()
                    .iter()
                    .enumerate()
                    .map(|(fi, w)| {
                        let c = rs.coords_of(w);
                        debug_assert_eq!(rs.shape.order_of(&c), rs.shape.invariant_factors[fi]);
                        let idx = *coord_index
                            .get(&c)
                            .expect("every coordinate vector is enumerated");
                        elements[idx].clone()
                    })
                    .collect();
                return Ok(PicGroup {
                    order: order.clone(),
                    shape: rs.shape.clone(),
                    elements,
                    index_of,
                    coords,
                    coord_index,
                    basis,
                    budget,
                });
            }
            // closure fell short: feed in primes of the next degree
            degree += 1;
            if degree > 8 {
                return Err(Error::BudgetExceeded(budget));
            }
            for q0 in irreducibles_of_degree(k.fq(), degree) {
                if !order.conductor().gcd(&q0).is_one() {
                    continue;
                }
                let st = splitting_type(k, &q0)?;
                if st.chi == -1 {
                    continue; // inert contractions are principal
                }
                let p_ok = primes_above(k, &q0)?.into_iter().next().unwrap();
                let contracted = if order.is_maximal() {
                    p_ok
                } else {
                    p_ok.intersect(&order.lattice())?
                };
                gens.push(contracted);
            }
        }
    }

    /// BFS closure; None if the generators do not yet reach the target.
    #[allow(clippy::type_complexity)]
    fn close(
        order: &Order,
        gens: &[Lattice],
        target: u64,
        budget: usize,
    ) -> Result<Option<(Vec<Lattice>, Vec<Vec<i64>>, Vec<Vec<i64>>)>> {
        let identity = order.lattice();
        let mut elements = vec![identity.reduced_class_rep(order, budget)?];
        let mut words: Vec<Vec<i64>> = vec![vec![0; gens.len()]];
        let mut index: HashMap<Lattice, usize> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut relations: Vec<Vec<i64>> = Vec::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            for (gi, g) in gens.iter().enumerate() {
                let prod = elements[i].product(g)?;
                let rep = prod.reduced_class_rep(order, budget)?;
                let mut w = words[i].clone();
                w[gi] += 1;
                match index.get(&rep) {
                    Some(&j) => {
                        let rel: Vec<i64> =
                            w.iter().zip(&words[j]).map(|(x, y)| x - y).collect();
                        if rel.iter().any(|&x| x != 0) {
                            relations.push(rel);
                        }
                    }
                    None => {
                        let id = elements.len();
                        elements.push(rep.clone());
                        index.insert(rep, id);
                        words.push(w);
                        queue.push_back(id);
                        if elements.len() as u64 > target {
                            return Err(Error::Internal(
                                "class enumeration exceeded the cardinality certificate".into(),
                            ));
                        }
                    }
                }
            }
        }
        if (elements.len() as u64) < target {
            return Ok(None);
        }
        Ok(Some((elements, words, relations)))
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn group_order(&self) -> u64 {
        self.shape.order
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn identity(&self) -> PicClass {
        self.class_of(&self.order.lattice()).expect("identity is present")
    }

    pub fn classes(&self) -> impl Iterator<Item = PicClass> + '_ {
        (0..self.elements.len()).map(PicClass)
    }

    pub fn representative(&self, c: PicClass) -> &Lattice {
        &self.elements[c.0]
    }

    pub fn coords(&self, c: PicClass) -> &[u64] {
        &self.coords[c.0]
    }

    /// Class of an arbitrary proper O-ideal.
    pub fn class_of(&self, ideal: &Lattice) -> Result<PicClass> {
        let rep = ideal.reduced_class_rep(&self.order, self.budget)?;
        self.index_of
            .get(&rep)
            .copied()
            .map(PicClass)
            .ok_or_else(|| Error::Internal("ideal class missing from enumerated group".into()))
    }

    pub fn mul(&self, a: PicClass, b: PicClass) -> PicClass {
        let c = self.shape.add(&self.coords[a.0], &self.coords[b.0]);
        PicClass(self.coord_index[&c])
    }

    pub fn inv(&self, a: PicClass) -> PicClass {
        let c = self.shape.neg(&self.coords[a.0]);
        PicClass(self.coord_index[&c])
    }

    pub fn pow(&self, a: PicClass, e: u64) -> PicClass {
        let c = self.shape.mul_scalar(&self.coords[a.0], e);
        PicClass(self.coord_index[&c])
    }

    pub fn order_of(&self, a: PicClass) -> u64 {
        self.shape.order_of(&self.coords[a.0])
    }

    pub fn is_identity(&self, a: PicClass) -> bool {
        self.shape.is_identity(&self.coords[a.0])
    }

    /// A representative of the class whose norm is coprime to the modulus.
    pub fn coprime_representative(&self, a: PicClass, modulus: &PolyA) -> Result<Lattice> {
        self.elements[a.0].coprime_class_rep(&self.order, modulus, self.budget)
    }
}

/// The tower map Pic(O_upper) -> Pic(O_lower), [I] -> [O_lower * I] on
/// representatives coprime to the conductor.
#[derive(Debug, Serialize)]
pub struct TowerMap {
    /// image[i] = index in the lower group of the image of upper class i.
    pub image: Vec<usize>,
    /// Upper-group indices mapping to the identity.
    pub kernel: Vec<usize>,
    pub surjective: bool,
}

pub fn tower_map(upper: &PicGroup, lower: &PicGroup) -> Result<TowerMap> {
    if upper.order().field() != lower.order().field() {
        return Err(Error::FieldMismatch);
    }
    if !lower.order().conductor().divides(upper.order().conductor()) {
        return Err(Error::OrderMismatch);
    }
    let lower_lat = lower.order().lattice();
    let modulus = upper.order().conductor();
    let mut image = Vec::with_capacity(upper.len());
    let mut kernel = Vec::new();
    let mut hit = vec![false; lower.len()];
    for c in upper.classes() {
        let rep = upper.coprime_representative(c, modulus)?;
        let img = lower.class_of(&rep.product(&lower_lat)?)?;
        image.push(img.0);
        hit[img.0] = true;
        if lower.is_identity(img) {
            kernel.push(c.0);
        }
    }
    Ok(TowerMap {
        image,
        kernel,
        surjective: hit.iter().all(|&b| b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fq;
    use crate::quadratic::make_field;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn p(s: &str) -> PolyA {
        PolyA::parse(&f3(), s).unwrap()
    }

    fn k() -> QuadField {
        make_field(&f3(), &p("T^3+2*T+1")).unwrap()
    }

    const BUDGET: usize = 1 << 24;

    #[test]
    fn unit_counts() {
        let kk = k();
        // O_K mod T: T splits, units (|T|-1)^2 = 4
        let okk = Order::maximal(&kk);
        let (enumd, closed) = unit_residue_card(&okk, &p("T"), BUDGET).unwrap();
        assert_eq!(enumd, 4);
        assert_eq!(closed, Some(4));
        // |(A/T^2)*| = 6
        assert_eq!(a_unit_count(&p("T^2")).unwrap(), 6);
        // trivial modulus
        let (e1, c1) = unit_residue_card(&okk, &p("1"), BUDGET).unwrap();
        assert_eq!(e1, 1);
        assert_eq!(c1, Some(1));
        // enumerated maximal-order counts match the closed form on bigger moduli
        for m in ["T^2", "T+1", "T^2+1"] {
            let (e, c) = unit_residue_card(&okk, &p(m), BUDGET).unwrap();
            assert_eq!(Some(e), c, "modulus {m}");
        }
        // non-maximal order: O_1/(T*O_K ∩ O_1) = A/T, 2 units
        let o1 = Order::new(&kk, &p("T")).unwrap();
        let (e, c) = unit_residue_card(&o1, &p("T"), BUDGET).unwrap();
        assert_eq!(e, 2);
        assert_eq!(c, None);
    }

    #[test]
    fn pic_cardinalities_running_example() {
        let kk = k();
        assert_eq!(pic_card_exact(&Order::maximal(&kk), BUDGET).unwrap(), 7);
        assert_eq!(
            pic_card_exact(&Order::new(&kk, &p("T")).unwrap(), BUDGET).unwrap(),
            14
        );
        assert_eq!(
            pic_card_exact(&Order::new(&kk, &p("T^2")).unwrap(), BUDGET).unwrap(),
            42
        );
    }

    #[test]
    fn pic_group_maximal_is_cyclic_of_order_7() {
        let kk = k();
        let g = PicGroup::compute(&Order::maximal(&kk), BUDGET).unwrap();
        assert_eq!(g.group_order(), 7);
        assert_eq!(g.shape.invariant_factors, vec![7]);
        // the class of the prime above T+1 generates
        let n = primes_above(&kk, &p("T+1")).unwrap().remove(0);
        let c = g.class_of(&n).unwrap();
        assert_eq!(g.order_of(c), 7);
    }

    #[test]
    fn pic_group_conductor_t() {
        let kk = k();
        let o1 = Order::new(&kk, &p("T")).unwrap();
        let g = PicGroup::compute(&o1, BUDGET).unwrap();
        assert_eq!(g.group_order(), 14);
        // abelian of order 14 is cyclic
        assert_eq!(g.shape.invariant_factors, vec![14]);
    }

    #[test]
    fn trivial_group_for_rational_d() {
        let kk = make_field(&f3(), &p("T")).unwrap();
        let g = PicGroup::compute(&Order::maximal(&kk), BUDGET).unwrap();
        assert_eq!(g.group_order(), 1);
        assert!(g.shape.invariant_factors.is_empty());
    }

    #[test]
    fn tower_map_kernels() {
        let kk = k();
        let g0 = PicGroup::compute(&Order::maximal(&kk), BUDGET).unwrap();
        let g1 = PicGroup::compute(&Order::new(&kk, &p("T")).unwrap(), BUDGET).unwrap();
        let g2 = PicGroup::compute(&Order::new(&kk, &p("T^2")).unwrap(), BUDGET).unwrap();
        let t10 = tower_map(&g1, &g0).unwrap();
        assert!(t10.surjective);
        assert_eq!(t10.kernel.len(), 2); // 14/7
        let t21 = tower_map(&g2, &g1).unwrap();
        assert!(t21.surjective);
        assert_eq!(t21.kernel.len(), 3); // 42/14 = |T|
        // kernel elements have p-power order
        for &i in &t21.kernel {
            let ord = g2.order_of(PicClass(i));
            let mut v = ord;
            while v % 3 == 0 {
                v /= 3;
            }
            assert_eq!(v, 1, "kernel class of order {ord}");
        }
        // identity-level map is the identity permutation
        let tid = tower_map(&g1, &g1).unwrap();
        assert_eq!(tid.image, (0..g1.len()).collect::<Vec<_>>());
        assert_eq!(tid.kernel, vec![g1.identity().0]);
    }

    #[test]
    fn inert_maximal_count_matches_formula_chain() {
        // inert field: D = 2T^2+1 over F_3, genus 1
        let kk = make_field(&f3(), &p("2*T^2+1")).unwrap();
        let h = maximal_class_number(&kk, BUDGET).unwrap();
        let g = PicGroup::compute(&Order::maximal(&kk), BUDGET).unwrap();
        assert_eq!(g.group_order(), h);
        // non-maximal order over the inert field still satisfies the formula
        let o1 = Order::new(&kk, &p("T")).unwrap();
        let g1 = PicGroup::compute(&o1, BUDGET).unwrap();
        assert_eq!(g1.group_order(), pic_card_exact(&o1, BUDGET).unwrap());
    }
}
