//! The moduli-of-lattices model of X_0(n): homothety classes of cyclic
//! lattice pairs, classification of prime-index sublattices, the canonical
//! factorization of cyclic isogenies between CM lattices, degeneracy maps,
//! and Hecke correspondences.

use std::collections::HashSet;

use serde::Serialize;

use crate::algebra::{factor, is_irreducible, PolyA};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeJson, Order};
use crate::quadratic::QuadElement;

/// A point of X_0(n): the homothety class of a pair small ⊂_n big, stored as
/// the canonical representative (first slot primitive integral of minimal
/// norm degree, ties broken by the canonical lattice order on the pair).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuliPoint {
    level: PolyA,
    small: Lattice,
    big: Lattice,
}

impl std::fmt::Debug for ModuliPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "X0({})-point [{:?} in {:?}]",
            self.level, self.small, self.big
        )
    }
}

impl ModuliPoint {
    /// Canonical homothety-class representative of a cyclic pair.
    pub fn new(small: &Lattice, big: &Lattice, level: &PolyA, budget: usize) -> Result<ModuliPoint> {
        if small.field() != big.field() {
            return Err(Error::FieldMismatch);
        }
        let shape = small.quotient_shape(big)?;
        if !shape.cyclic {
            return Err(Error::NotCyclic);
        }
        let level = level.monic();
        if shape.index_ideal != level {
            return Err(Error::LevelMismatch);
        }
        let k = small.field().clone();
        let s0 = small.primitive_part();
        // small = (cont/den) * s0, so a candidate mu rescales big by
        // mu * den / cont
        let cont = small.content();
        let den = small.den().clone();
        let j = s0.transporter(&Order::maximal(&k).lattice())?;
        let mut best: Option<(Lattice, Lattice)> = None;
        for mu in j.minimal_vectors(usize::MAX, budget)? {
            let cand_small = s0.scale(&mu)?;
            let lam = mu
                .scale_poly(&den)
                .mul(&k.element(&PolyA::one(k.fq()), &PolyA::zero(k.fq()), &cont)?);
            let cand_big = big.scale(&lam)?;
            let better = match &best {
                None => true,
                Some((bs, bb)) => match cand_small.cmp_canonical(bs) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        cand_big.cmp_canonical(bb) == std::cmp::Ordering::Less
                    }
                },
            };
            if better {
                best = Some((cand_small, cand_big));
            }
        }
        let (small, big) =
            best.ok_or_else(|| Error::Internal("no canonical representative found".into()))?;
        Ok(ModuliPoint { level, small, big })
    }

    pub fn level(&self) -> &PolyA {
        &self.level
    }
    pub fn small(&self) -> &Lattice {
        &self.small
    }
    pub fn big(&self) -> &Lattice {
        &self.big
    }

    /// Conductor of the underlying CM order (same for both slots when the
    /// pair comes from a Heegner construction; reported per slot).
    pub fn conductors(&self) -> (PolyA, PolyA) {
        (self.small.conductor(), self.big.conductor())
    }
}

/// Report of all index-q0 sublattices with cyclic quotient.
#[derive(Clone, Debug)]
pub struct SublatticeReport {
    pub prime: PolyA,
    /// (sublattice, conductor) for each of the |q0| + 1 lines.
    pub entries: Vec<(Lattice, PolyA)>,
    /// Index of the unique conductor-dropping sublattice when q0 divides the
    /// conductor of the ambient lattice.
    pub distinguished: Option<usize>,
}

#[derive(Serialize)]
pub struct SublatticeReportJson {
    pub prime: String,
    pub entries: Vec<SublatticeEntryJson>,
    pub distinguished: Option<usize>,
}

#[derive(Serialize)]
pub struct SublatticeEntryJson {
    pub lattice: LatticeJson,
    pub conductor: String,
}

impl SublatticeReport {
    pub fn to_json(&self) -> SublatticeReportJson {
        SublatticeReportJson {
            prime: self.prime.to_string(),
            entries: self
                .entries
                .iter()
                .map(|(l, c)| SublatticeEntryJson {
                    lattice: l.to_json(),
                    conductor: c.to_string(),
                })
                .collect(),
            distinguished: self.distinguished,
        }
    }
}

/// All sublattices La ⊂_{q0} Lb: the |q0|+1 lines of Lb/q0·Lb. When q0
/// divides c(Lb), the classification of Lemma 5.2 is verified: exactly one
/// has conductor c/q0 and equals q0 * O_{c/q0} * Lb, the rest have conductor
/// c*q0.
pub fn sublattices_prime(lb: &Lattice, q0: &PolyA) -> Result<SublatticeReport> {
    if !is_irreducible(q0) {
        return Err(Error::NotIrreducible(q0.to_string()));
    }
    let q0 = q0.monic();
    let k = lb.field().clone();
    let [b1, b2] = lb.basis();
    let q0lat = lb.scale_poly(&q0)?;
    let mut entries = Vec::new();
    // lines (1 : t) and (0 : 1) in (A/q0)^2
    let mut directions: Vec<(PolyA, PolyA)> = residues(&q0)
        .into_iter()
        .map(|t| (PolyA::one(k.fq()), t))
        .collect();
    directions.push((PolyA::zero(k.fq()), PolyA::one(k.fq())));
    for (u, v) in directions {
        let w = b1.scale_poly(&u).add(&b2.scale_poly(&v));
        let [g1, g2] = q0lat.basis();
        let la = Lattice::from_generators(&[w, g1, g2])?;
        debug_assert_eq!(la.quotient_shape(lb)?.index_ideal, q0);
        let cond = la.conductor();
        entries.push((la, cond));
    }
    let c = lb.conductor();
    let mut distinguished = None;
    if c.rem(&q0)?.is_zero() {
        let c_over = c.div_exact(&q0)?;
        let expect = lb.order_extend(&c_over)?.scale_poly(&q0)?;
        let cq = c.mul(&q0);
        let mut drop_count = 0;
        for (i, (la, cond)) in entries.iter().enumerate() {
            if *cond == c_over {
                drop_count += 1;
                if *la != expect {
                    return Err(Error::Internal(
                        "distinguished sublattice differs from q0 * O_{c/q0} * Lb".into(),
                    ));
                }
                distinguished = Some(i);
            } else if *cond != cq {
                return Err(Error::Internal(format!(
                    "sublattice conductor {cond} is neither c/q0 nor c*q0"
                )));
            }
        }
        if drop_count != 1 {
            return Err(Error::Internal(format!(
                "{drop_count} conductor-dropping sublattices instead of 1"
            )));
        }
    }
    Ok(SublatticeReport {
        prime: q0,
        entries,
        distinguished,
    })
}

fn residues(m: &PolyA) -> Vec<PolyA> {
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

/// The full output record of the canonical factorization of a cyclic
/// inclusion a ⊂_d b through the order O_c.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub c1: PolyA,
    pub c2: PolyA,
    pub c: PolyA,
    pub d: PolyA,
    pub d1: PolyA,
    pub d2: PolyA,
    pub dprime: PolyA,
    /// The O_K-ideal with O_K/D ≅ A/d'.
    pub d_ideal: Lattice,
    /// O_c * a.
    pub mid1: Lattice,
    /// d2 * O_c * b.
    pub mid2: Lattice,
}

#[derive(Serialize)]
pub struct FactorizationJson {
    pub c1: String,
    pub c2: String,
    pub c: String,
    pub d: String,
    pub d1: String,
    pub d2: String,
    pub dprime: String,
    pub d_ideal: LatticeJson,
    pub mid1: LatticeJson,
    pub mid2: LatticeJson,
}

impl Factorization {
    pub fn to_json(&self) -> FactorizationJson {
        FactorizationJson {
            c1: self.c1.to_string(),
            c2: self.c2.to_string(),
            c: self.c.to_string(),
            d: self.d.to_string(),
            d1: self.d1.to_string(),
            d2: self.d2.to_string(),
            dprime: self.dprime.to_string(),
            d_ideal: self.d_ideal.to_json(),
            mid1: self.mid1.to_json(),
            mid2: self.mid2.to_json(),
        }
    }
}

/// Canonical factorization of a cyclic inclusion la ⊂_d lb through the
/// chain la ⊂_{d1} O_c la ⊂_{d'} d2 O_c lb ⊂_{d2} lb, with every claimed
/// identity verified before returning.
pub fn canonical_factorization(la: &Lattice, lb: &Lattice) -> Result<Factorization> {
    let k = la.field().clone();
    let shape = la.quotient_shape(lb)?;
    if !shape.cyclic {
        return Err(Error::NotCyclic);
    }
    let d = shape.index_ideal.clone();
    let c1 = la.conductor();
    let c2 = lb.conductor();
    // c = annihilator of (O_K la + lb)/lb: the smallest monic c with
    // c * O_K * la ⊆ lb, read off the transporter
    let ok_la = la.order_extend(&PolyA::one(k.fq()))?;
    let t = ok_la.transporter(lb)?;
    let c = t.a().div_exact(&t.a().gcd(t.den()))?;
    let d1 = c1.div_exact(&c)?;
    let d2 = c2.div_exact(&c)?;
    let dprime = d.div_exact(&d1.mul(&d2))?;
    if !c.gcd(&dprime).is_one() {
        return Err(Error::Internal("c and d' are not coprime".into()));
    }
    let oc = Order::new(&k, &c)?;
    let mid1 = la.product(&oc.lattice())?;
    let mid2 = lb.product(&oc.lattice())?.scale_poly(&d2)?;
    // chain shapes
    let s1 = la.quotient_shape(&mid1)?;
    if !(s1.cyclic && s1.index_ideal == d1) {
        return Err(Error::Internal("first chain step is not ⊂_{d1}".into()));
    }
    let s2 = mid1.quotient_shape(&mid2)?;
    if !(s2.cyclic && s2.index_ideal == dprime) {
        return Err(Error::Internal("middle chain step is not ⊂_{d'}".into()));
    }
    let s3 = mid2.quotient_shape(lb)?;
    if !(s3.cyclic && s3.index_ideal == d2) {
        return Err(Error::Internal("last chain step is not ⊂_{d2}".into()));
    }
    // D = d2^{-1} O_K b^{-1} a with O_K/D ≅ A/d'
    let okk = Order::maximal(&k);
    let ok_lb = lb.order_extend(&PolyA::one(k.fq()))?;
    let d_ideal = ok_lb
        .ideal_inverse(&okk)?
        .product(&ok_la)?
        .scale(&k.element(&PolyA::one(k.fq()), &PolyA::zero(k.fq()), &d2)?)?;
    let sd = d_ideal.quotient_shape(&okk.lattice())?;
    if !(sd.cyclic && sd.index_ideal == dprime) {
        return Err(Error::Internal("O_K/D is not cyclic of index d'".into()));
    }
    // mid2 = (D ∩ O_c)^{-1} * mid1
    let dc = d_ideal.intersect(&oc.lattice())?;
    let dc_inv = dc.ideal_inverse(&oc)?;
    if dc_inv.product(&mid1)? != mid2 {
        return Err(Error::Internal(
            "d2 O_c b does not equal (D ∩ O_c)^{-1} O_c a".into(),
        ));
    }
    Ok(Factorization {
        c1,
        c2,
        c,
        d,
        d1,
        d2,
        dprime,
        d_ideal,
        mid1,
        mid2,
    })
}

/// All witnesses lambda (mod units) of a cyclic isogeny of degree d from the
/// lattice class of x to the class of y: lambda * y ⊆ x with quotient
/// A/d. Complete within the norm-degree bound implied by the anisotropy law.
pub fn cyclic_isogenies_between(
    x: &Lattice,
    y: &Lattice,
    d: &PolyA,
    budget: usize,
) -> Result<Vec<QuadElement>> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch);
    }
    let d = d.monic();
    let t = y.transporter(x)?;
    let covol = |l: &Lattice| l.a().deg() + l.c().deg() - 2 * l.den().deg();
    let target = d.deg() + covol(x) - covol(y);
    let mut out = Vec::new();
    for lam in t.vectors_of_norm_degree(target, budget)? {
        let ly = y.scale(&lam)?;
        match ly.quotient_shape(x) {
            Ok(s) if s.cyclic && s.index_ideal == d => out.push(lam),
            Ok(_) => {}
            Err(Error::NotContained) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The degeneracy map δ_d : X_0(mn) -> X_0(n) on the lattice model:
/// (Λ, Λ'') -> (Λ'' ∩ d^{-1}Λ, Λ'' ∩ (dn)^{-1}Λ).
pub fn degeneracy(
    pt: &ModuliPoint,
    d: &PolyA,
    m: &PolyA,
    n: &PolyA,
    budget: usize,
) -> Result<ModuliPoint> {
    let d = d.monic();
    let m = m.monic();
    let n = n.monic();
    if !d.divides(&m) {
        return Err(Error::NotDivisor(d.to_string(), m.to_string()));
    }
    if !m.gcd(&n).is_one() {
        return Err(Error::NotCoprime(m.gcd(&n).to_string()));
    }
    if pt.level() != &m.mul(&n) {
        return Err(Error::LevelMismatch);
    }
    let k = pt.small().field().clone();
    let inv = |f: &PolyA| k.element(&PolyA::one(k.fq()), &PolyA::zero(k.fq()), f);
    let lam = pt.small();
    let big = pt.big();
    let first = big.intersect(&lam.scale(&inv(&d)?)?)?;
    let second = big.intersect(&lam.scale(&inv(&d.mul(&n))?)?)?;
    ModuliPoint::new(&first, &second, &n, budget)
}

/// Divisors of m, monic, in canonical order.
pub fn divisors(m: &PolyA) -> Result<Vec<PolyA>> {
    let (_, factors) = factor(m, 0)?;
    let mut out = vec![PolyA::one(m.field())];
    for (p, e) in factors {
        let mut next = Vec::new();
        for div in &out {
            let mut pw = PolyA::one(m.field());
            for _ in 0..=e {
                next.push(div.mul(&pw));
                pw = pw.mul(&p);
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.cmp_canonical(b));
    Ok(out)
}

/// The full degeneracy map: the tuple (δ_d(pt))_{d | m} in divisor order.
pub fn full_degeneracy(
    pt: &ModuliPoint,
    m: &PolyA,
    n: &PolyA,
    budget: usize,
) -> Result<Vec<(PolyA, ModuliPoint)>> {
    let mut out = Vec::new();
    for d in divisors(m)? {
        let img = degeneracy(pt, &d, m, n, budget)?;
        out.push((d, img));
    }
    Ok(out)
}

/// Hecke membership: (x, y) ∈ T_m iff some level-mn point w has δ_1(w) = x
/// and δ_m(w) = y. With w normalized so its small slot is x.small, w is
/// determined by a cyclic m-superlattice M of x.small with M + x.big ≅ the
/// pair of y; the enumeration over the ψ(m) cyclic submodules is complete.
pub fn hecke_member(
    x: &ModuliPoint,
    y: &ModuliPoint,
    m: &PolyA,
    budget: usize,
) -> Result<Option<ModuliPoint>> {
    let m = m.monic();
    if !m.gcd(x.level()).is_one() {
        return Err(Error::NotCoprime(m.gcd(x.level()).to_string()));
    }
    if x.level() != y.level() {
        return Err(Error::LevelMismatch);
    }
    let k = x.small().field().clone();
    let n = x.level().clone();
    let minv = k.element(&PolyA::one(k.fq()), &PolyA::zero(k.fq()), &m)?;
    let over = x.small().scale(&minv)?;
    let [f1, f2] = over.basis();
    let [s1, s2] = x.small().basis();
    // cyclic submodules of (A/m)^2 of annihilator m: generators (u, v) with
    // gcd(u, v, m) = 1, modulo units of A/m
    let mut seen: HashSet<Lattice> = HashSet::new();
    let mut spent = 0usize;
    for u in residues(&m) {
        for v in residues(&m) {
            if !u.gcd(&v).gcd(&m).is_one() {
                continue;
            }
            spent += 1;
            if spent > budget {
                return Err(Error::BudgetExceeded(budget));
            }
            let w = f1.scale_poly(&u).add(&f2.scale_poly(&v));
            let cand = Lattice::from_generators(&[w, s1.clone(), s2.clone()])?;
            if !seen.insert(cand.clone()) {
                continue;
            }
            let shape = x.small().quotient_shape(&cand)?;
            if !(shape.cyclic && shape.index_ideal == m) {
                continue;
            }
            let big_w = cand.sum(x.big())?;
            // the image under δ_m is (M, M + x.big)
            let wshape = x.small().quotient_shape(&big_w)?;
            if !(wshape.cyclic && wshape.index_ideal == m.mul(&n)) {
                continue;
            }
            let image = ModuliPoint::new(&cand, &big_w, &n, budget)?;
            if image == *y {
                let witness = ModuliPoint::new(x.small(), &big_w, &m.mul(&n), budget)?;
                return Ok(Some(witness));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fq;
    use crate::lattice::primes_above;
    use crate::quadratic::{make_field, QuadField};

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn p(s: &str) -> PolyA {
        PolyA::parse(&f3(), s).unwrap()
    }

    fn k() -> QuadField {
        make_field(&f3(), &p("T^3+2*T+1")).unwrap()
    }

    const BUDGET: usize = 1 << 22;

    #[test]
    fn sublattices_of_o1_at_t() {
        // Lb = O_1 (c = T), q0 = T: 4 sublattices, one of conductor 1
        // equal to T*O_K, three of conductor T^2
        let kk = k();
        let o1 = Order::new(&kk, &p("T")).unwrap().lattice();
        let rep = sublattices_prime(&o1, &p("T")).unwrap();
        assert_eq!(rep.entries.len(), 4);
        let drops: Vec<_> = rep
            .entries
            .iter()
            .filter(|(_, c)| c.is_one())
            .collect();
        assert_eq!(drops.len(), 1);
        let tok = Order::maximal(&kk).lattice().scale_poly(&p("T")).unwrap();
        assert_eq!(drops[0].0, tok);
        assert_eq!(
            rep.entries.iter().filter(|(_, c)| *c == p("T^2")).count(),
            3
        );
        assert!(rep.distinguished.is_some());
    }

    #[test]
    fn sublattices_of_maximal_at_split_prime() {
        // q0 coprime to the conductor: enumeration only, conductors in {1, T}
        let kk = k();
        let ok = Order::maximal(&kk).lattice();
        let rep = sublattices_prime(&ok, &p("T")).unwrap();
        assert_eq!(rep.entries.len(), 4);
        assert!(rep.distinguished.is_none());
        for (la, cond) in &rep.entries {
            let s = la.quotient_shape(&ok).unwrap();
            assert!(s.cyclic && s.index_ideal == p("T"));
            assert!(cond.is_one() || *cond == p("T"));
        }
        // split prime: the two primes above T appear among the sublattices
        let prs = primes_above(&kk, &p("T")).unwrap();
        for pr in prs {
            assert!(rep.entries.iter().any(|(la, _)| *la == pr));
        }
    }

    #[test]
    fn factorization_trivial() {
        let kk = k();
        let ok = Order::maximal(&kk).lattice();
        let f = canonical_factorization(&ok, &ok).unwrap();
        assert!(f.d.is_one() && f.c.is_one());
        assert!(f.d1.is_one() && f.d2.is_one() && f.dprime.is_one());
        assert_eq!(f.d_ideal, ok);
    }

    #[test]
    fn factorization_horizontal_prime() {
        // O_K ⊂_{T+1} P^{-1}: c = 1, d' = T+1, D = P
        let kk = k();
        let okk = Order::maximal(&kk);
        let pr = primes_above(&kk, &p("T+1"))
            .unwrap()
            .into_iter()
            .find(|l| l.b() == &p("2"))
            .unwrap();
        let pinv = pr.ideal_inverse(&okk).unwrap();
        let f = canonical_factorization(&okk.lattice(), &pinv).unwrap();
        assert_eq!(f.d, p("T+1"));
        assert!(f.c.is_one() && f.d1.is_one() && f.d2.is_one());
        assert_eq!(f.dprime, p("T+1"));
        assert_eq!(f.d_ideal, pr);
    }

    #[test]
    fn factorization_vertical_up_and_down() {
        let kk = k();
        let ok = Order::maximal(&kk).lattice();
        let o1 = Order::new(&kk, &p("T")).unwrap().lattice();
        // T*O_K ⊂_T O_1: d1 = 1, d2 = T (conductor grows toward b)
        let tok = ok.scale_poly(&p("T")).unwrap();
        let f = canonical_factorization(&tok, &o1).unwrap();
        assert_eq!((f.d.clone(), f.c.clone()), (p("T"), p("1")));
        assert_eq!((f.d1.clone(), f.d2.clone(), f.dprime.clone()), (p("1"), p("T"), p("1")));
        assert_eq!(f.d_ideal, ok);
        // O_1 ⊂_T O_K: d1 = T, d2 = 1
        let f = canonical_factorization(&o1, &ok).unwrap();
        assert_eq!((f.d1, f.d2, f.dprime), (p("T"), p("1"), p("1")));
    }

    #[test]
    fn factorization_rejects_non_cyclic() {
        let kk = k();
        let ok = Order::maximal(&kk).lattice();
        let tok = ok.scale_poly(&p("T")).unwrap();
        assert_eq!(
            canonical_factorization(&tok, &ok).unwrap_err(),
            Error::NotCyclic
        );
    }

    #[test]
    fn isogeny_witnesses_class_number_one() {
        // h(K) = 1 for D = T: a split prime gives two witnesses (the two
        // conjugate primes above it)
        let kk = make_field(&f3(), &p("T")).unwrap();
        let ok = Order::maximal(&kk).lattice();
        // T+2: D(x) = x at x = -2 = 1 ... chi(T+2) via splitting
        let st = crate::quadratic::splitting_type(&kk, &p("T+2")).unwrap();
        assert_eq!(st.chi, 1);
        let ws = cyclic_isogenies_between(&ok, &ok, &p("T+2"), BUDGET).unwrap();
        assert_eq!(ws.len(), 2);
        // in the running example (h = 7) the primes above T are not
        // principal, so there is no witness
        let kk7 = k();
        let ok7 = Order::maximal(&kk7).lattice();
        let ws = cyclic_isogenies_between(&ok7, &ok7, &p("T"), BUDGET).unwrap();
        assert!(ws.is_empty());
        // d = 1: the units
        let ws = cyclic_isogenies_between(&ok7, &ok7, &p("1"), BUDGET).unwrap();
        assert_eq!(ws.len(), 1);
    }

    #[test]
    fn moduli_point_normalization() {
        let kk = k();
        let okk = Order::maximal(&kk);
        let pr = primes_above(&kk, &p("T+1")).unwrap().remove(0);
        let pinv = pr.ideal_inverse(&okk).unwrap();
        let pt = ModuliPoint::new(&okk.lattice(), &pinv, &p("T+1"), BUDGET).unwrap();
        // scaling both slots gives the same canonical point
        let lam = kk.element(&p("T^2+1"), &p("2"), &p("T")).unwrap();
        let pt2 = ModuliPoint::new(
            &okk.lattice().scale(&lam).unwrap(),
            &pinv.scale(&lam).unwrap(),
            &p("T+1"),
            BUDGET,
        )
        .unwrap();
        assert_eq!(pt, pt2);
        // level-1 point
        let pt1 = ModuliPoint::new(&okk.lattice(), &okk.lattice(), &p("1"), BUDGET).unwrap();
        assert_eq!(pt1.small(), pt1.big());
        // non-cyclic pair rejected
        let tok = okk.lattice().scale_poly(&p("T")).unwrap();
        assert_eq!(
            ModuliPoint::new(&tok, &okk.lattice(), &p("T^2"), BUDGET).unwrap_err(),
            Error::NotCyclic
        );
        // wrong level rejected
        assert_eq!(
            ModuliPoint::new(&okk.lattice(), &pinv, &p("T"), BUDGET).unwrap_err(),
            Error::LevelMismatch
        );
    }

    #[test]
    fn degeneracy_forgets_the_m_part() {
        // w = (O_K, P^{-1} Q^{-1}) of level (T+1)*T with Q above T:
        // δ_1 forgets the T-part, δ_T forgets the (T+1)-part
        let kk = k();
        let okk = Order::maximal(&kk);
        let pr = primes_above(&kk, &p("T+1")).unwrap().remove(0);
        let qr = primes_above(&kk, &p("T")).unwrap().remove(0);
        let pinv = pr.ideal_inverse(&okk).unwrap();
        let qinv = qr.ideal_inverse(&okk).unwrap();
        let big = pinv.product(&qinv).unwrap();
        let w = ModuliPoint::new(&okk.lattice(), &big, &p("T^2+T"), BUDGET).unwrap();
        let d1 = degeneracy(&w, &p("1"), &p("T"), &p("T+1"), BUDGET).unwrap();
        let expect1 = ModuliPoint::new(&okk.lattice(), &pinv, &p("T+1"), BUDGET).unwrap();
        assert_eq!(d1, expect1);
        let dm = degeneracy(&w, &p("T"), &p("T"), &p("T+1"), BUDGET).unwrap();
        let expectm = ModuliPoint::new(&qinv, &big, &p("T+1"), BUDGET).unwrap();
        assert_eq!(dm, expectm);
        // error paths
        assert!(matches!(
            degeneracy(&w, &p("T+2"), &p("T"), &p("T+1"), BUDGET),
            Err(Error::NotDivisor(_, _))
        ));
        assert!(matches!(
            degeneracy(&w, &p("T"), &p("T"), &p("T"), BUDGET),
            Err(Error::NotCoprime(_))
        ));
    }

    #[test]
    fn hecke_diagonal_and_consistency() {
        let kk = k();
        let okk = Order::maximal(&kk);
        let pr = primes_above(&kk, &p("T+1")).unwrap().remove(0);
        let pinv = pr.ideal_inverse(&okk).unwrap();
        let x = ModuliPoint::new(&okk.lattice(), &pinv, &p("T+1"), BUDGET).unwrap();
        // T_1 is the diagonal
        assert!(hecke_member(&x, &x, &p("1"), BUDGET).unwrap().is_some());
        let qr = primes_above(&kk, &p("T")).unwrap().remove(0);
        let qinv = qr.ideal_inverse(&okk).unwrap();
        let y_big = pinv.product(&qinv).unwrap();
        let y = ModuliPoint::new(&qinv, &y_big, &p("T+1"), BUDGET).unwrap();
        // w = (O_K, P^{-1}Q^{-1}) realizes (x, y) ∈ T_Q
        let w = hecke_member(&x, &y, &p("T"), BUDGET).unwrap().unwrap();
        assert_eq!(w.level(), &p("T^2+T"));
        assert_eq!(degeneracy(&w, &p("1"), &p("T"), &p("T+1"), BUDGET).unwrap(), x);
        assert_eq!(degeneracy(&w, &p("T"), &p("T"), &p("T+1"), BUDGET).unwrap(), y);
    }
}
