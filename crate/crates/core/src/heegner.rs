//! Heegner-point towers, the Galois action of Pic(O_n) on them, the
//! geometric subgroup generated by ramified Frobenius classes, and the
//! theta-element search used to separate non-geometric directions.

use serde::{Deserialize, Serialize};

use crate::algebra::{factor, is_irreducible, is_squarefree, PolyA};
use crate::classgroup::{PicClass, PicGroup};
use crate::error::{Error, Result};
use crate::isogeny::{divisors, ModuliPoint};
use crate::lattice::{ok_prime, Lattice, Order};
use crate::quadratic::{splitting_type, QuadField};

/// Validated Heegner configuration: K, a square-free level n whose primes
/// all split in K, a tower prime p not dividing n, and the canonical ideal
/// N with O_K/N ≅ A/n.
#[derive(Clone, Debug)]
pub struct HeegnerConfig {
    pub k: QuadField,
    pub n_level: PolyA,
    pub p: PolyA,
    pub n_ideal: Lattice,
    pub budget: usize,
}

/// CLI-facing serialized form of a configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeegnerConfigJson {
    pub q: u64,
    pub d: String,
    pub n_level: String,
    pub p: String,
    pub budget: usize,
    pub seed: u64,
}

/// Checks the Heegner hypothesis: n square-free with every prime factor
/// split in K, p irreducible and coprime to n.
pub fn check_heegner_hypothesis(k: &QuadField, n_level: &PolyA, p: &PolyA) -> Result<()> {
    if !is_irreducible(p) {
        return Err(Error::NotIrreducible(p.to_string()));
    }
    if n_level.is_zero() || !is_squarefree(n_level) {
        return Err(Error::NotSquareFreeLevel);
    }
    if !n_level.gcd(p).is_one() {
        return Err(Error::PDividesN);
    }
    let (_, factors) = factor(n_level, 0)?;
    for (q0, _) in factors {
        if splitting_type(k, &q0)?.chi != 1 {
            return Err(Error::NonSplitPrime(q0.to_string()));
        }
    }
    Ok(())
}

/// The canonical ideal N = prod (q, w - r_q) over the primes q | n, with
/// r_q the smaller square root of D mod q; O_K/N ≅ A/n is verified.
pub fn construct_n(k: &QuadField, n_level: &PolyA) -> Result<Lattice> {
    let okk = Order::maximal(k).lattice();
    let mut n_ideal = okk.clone();
    let (_, factors) = factor(n_level, 0)?;
    for (q0, _) in factors {
        let st = splitting_type(k, &q0)?;
        let r = st
            .root
            .ok_or_else(|| Error::NonSplitPrime(q0.to_string()))?;
        let pr = ok_prime(k, &q0, &r)?;
        n_ideal = n_ideal.product(&pr)?;
    }
    let shape = n_ideal.quotient_shape(&okk)?;
    if !(shape.cyclic && shape.index_ideal == n_level.monic()) {
        return Err(Error::Internal("O_K/N is not cyclic of index n".into()));
    }
    Ok(n_ideal)
}

impl HeegnerConfig {
    pub fn new(k: &QuadField, n_level: &PolyA, p: &PolyA, budget: usize) -> Result<HeegnerConfig> {
        check_heegner_hypothesis(k, n_level, p)?;
        let n_ideal = construct_n(k, n_level)?;
        Ok(HeegnerConfig {
            k: k.clone(),
            n_level: n_level.monic(),
            p: p.monic(),
            n_ideal,
            budget,
        })
    }

    /// O_n = A + p^n O_K.
    pub fn order_at(&self, n: u32) -> Order {
        Order::new(&self.k, &self.p.pow(n as u64)).expect("p-power conductor")
    }
}

/// The Heegner point x_n: the moduli point of (O_n, N_n^{-1}) with
/// N_n = N ∩ O_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegnerPoint {
    pub n: u32,
    pub pt: ModuliPoint,
}

/// Construct x_n and verify O_n/N_n ≅ A/n, the cyclic level structure, and
/// conductor p^n on both slots.
pub fn heegner_point(cfg: &HeegnerConfig, n: u32) -> Result<HeegnerPoint> {
    let order = cfg.order_at(n);
    let o_lat = order.lattice();
    let n_n = cfg.n_ideal.intersect(&o_lat)?;
    let shape = n_n.quotient_shape(&o_lat)?;
    if !(shape.cyclic && shape.index_ideal == cfg.n_level) {
        return Err(Error::Internal("O_n/N_n is not cyclic of index n".into()));
    }
    let slot2 = n_n.ideal_inverse(&order)?;
    let pt = ModuliPoint::new(&o_lat, &slot2, &cfg.n_level, cfg.budget)?;
    let cond = order.conductor();
    let (c1, c2) = pt.conductors();
    if c1 != *cond || c2 != *cond {
        return Err(Error::Internal(format!(
            "Heegner slots have conductors ({c1}, {c2}) instead of {cond}"
        )));
    }
    Ok(HeegnerPoint { n, pt })
}

/// A Galois element of the tower, represented by an O_K-ideal coprime to p;
/// at level n it acts through the class of ideal ∩ O_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisElement {
    pub ideal: Lattice,
}

impl GaloisElement {
    pub fn new(cfg: &HeegnerConfig, ideal: &Lattice) -> Result<GaloisElement> {
        let okk = Order::maximal(&cfg.k);
        if ideal.multiplier_ring() != okk {
            return Err(Error::NotProper);
        }
        let (norm, _) = ideal.ideal_norm(&okk)?;
        if !norm.gcd(&cfg.p).is_one() {
            return Err(Error::NotCoprime(cfg.p.to_string()));
        }
        Ok(GaloisElement {
            ideal: ideal.clone(),
        })
    }

    pub fn identity(cfg: &HeegnerConfig) -> GaloisElement {
        GaloisElement {
            ideal: Order::maximal(&cfg.k).lattice(),
        }
    }

    /// A_n = ideal ∩ O_n.
    pub fn contracted(&self, cfg: &HeegnerConfig, n: u32) -> Result<Lattice> {
        self.ideal.intersect(&cfg.order_at(n).lattice())
    }

    /// Composition corresponds to the ideal product.
    pub fn compose(&self, other: &GaloisElement) -> Result<GaloisElement> {
        Ok(GaloisElement {
            ideal: self.ideal.product(&other.ideal)?,
        })
    }

    /// Class of the contraction in a computed Pic(O_n).
    pub fn class_at(&self, cfg: &HeegnerConfig, pic: &PicGroup) -> Result<PicClass> {
        let n = conductor_level(cfg, pic)?;
        pic.class_of(&self.contracted(cfg, n)?)
    }
}

fn conductor_level(cfg: &HeegnerConfig, pic: &PicGroup) -> Result<u32> {
    let cond = pic.order().conductor();
    let mut n = 0u32;
    let mut c = cond.clone();
    while !c.is_one() {
        c = c.div_exact(&cfg.p)?;
        n += 1;
    }
    Ok(n)
}

/// x ↦ x^sigma: componentwise [Λ] ↦ [A_n^{-1} Λ], with the kernel shape of
/// the connecting isogeny verified against O_n/A_n.
pub fn galois_act(
    cfg: &HeegnerConfig,
    sigma: &GaloisElement,
    x: &HeegnerPoint,
) -> Result<HeegnerPoint> {
    let order = cfg.order_at(x.n);
    let a_n = sigma.contracted(cfg, x.n)?;
    let a_inv = a_n.ideal_inverse(&order)?;
    let small = x.pt.small().product(&a_inv)?;
    let big = x.pt.big().product(&a_inv)?;
    // kernel of the connecting isogeny Λ ⊆ A_n^{-1} Λ matches O_n/A_n
    let expected = a_n.quotient_shape(&order.lattice())?;
    let got = x.pt.small().quotient_shape(&small)?;
    if (expected.d1.clone(), expected.d2.clone()) != (got.d1.clone(), got.d2.clone()) {
        return Err(Error::Internal(
            "isogeny kernel does not match O_n/A_n".into(),
        ));
    }
    let pt = ModuliPoint::new(&small, &big, &cfg.n_level, cfg.budget)?;
    Ok(HeegnerPoint { n: x.n, pt })
}

/// The ramified data of §6: primes p_i ≠ p ramifying in K, their product m,
/// and the divisor map d ↦ σ_d onto the subgroup G_1 they generate.
#[derive(Clone, Debug)]
pub struct GeometricData {
    pub ramified: Vec<PolyA>,
    pub m: PolyA,
    /// (d, σ_d) for every monic divisor d | m, in canonical divisor order.
    pub divisor_map: Vec<(PolyA, GaloisElement)>,
}

/// Ramified primes are the irreducible factors of D other than p; here
/// Pic(A) is trivial so every e_i = 1 and m is their plain product.
pub fn geometric_group(cfg: &HeegnerConfig) -> Result<GeometricData> {
    let (_, factors) = factor(cfg.k.d(), 0)?;
    let mut ramified = Vec::new();
    for (q0, _) in factors {
        if q0 != cfg.p {
            ramified.push(q0);
        }
    }
    let mut m = PolyA::one(cfg.k.fq());
    for q0 in &ramified {
        m = m.mul(q0);
    }
    let mut divisor_map = Vec::new();
    for d in divisors(&m)? {
        let mut ideal = Order::maximal(&cfg.k).lattice();
        for q0 in &ramified {
            if d.rem(q0)?.is_zero() {
                ideal = ideal.product(&ok_prime(&cfg.k, q0, &PolyA::zero(cfg.k.fq()))?)?;
            }
        }
        divisor_map.push((d, GaloisElement::new(cfg, &ideal)?));
    }
    Ok(GeometricData {
        ramified,
        m,
        divisor_map,
    })
}

impl GeometricData {
    pub fn sigma(&self, d: &PolyA) -> Result<&GaloisElement> {
        self.divisor_map
            .iter()
            .find(|(div, _)| div == d)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::NotDivisor(d.to_string(), self.m.to_string()))
    }

    /// |G_1| at level n: the number of distinct classes among the divisor
    /// images, computed on canonical class representatives.
    pub fn g1_size_at_level(&self, cfg: &HeegnerConfig, n: u32) -> Result<usize> {
        let order = cfg.order_at(n);
        let mut reps = Vec::new();
        for (_, sigma) in &self.divisor_map {
            let rep = sigma
                .contracted(cfg, n)?
                .reduced_class_rep(&order, cfg.budget)?;
            if !reps.contains(&rep) {
                reps.push(rep);
            }
        }
        Ok(reps.len())
    }
}

/// Prop. 6.1(1) at one divisor and level: (x_n, x_n^{σ_d}) ∈ T_d, returning
/// the witness point of level d*n.
pub fn verify_geometric_level(
    cfg: &HeegnerConfig,
    geo: &GeometricData,
    d: &PolyA,
    n: u32,
) -> Result<Option<ModuliPoint>> {
    let x = heegner_point(cfg, n)?;
    let sigma = geo.sigma(d)?;
    let xs = galois_act(cfg, sigma, &x)?;
    crate::isogeny::hecke_member(&x.pt, &xs.pt, d, cfg.budget)
}

/// The lifted point x'_n = (O_n, N_n^{-1} M_n^{-1}) of level m*n, where
/// M_n = (P_1 ... P_g) ∩ O_n.
pub fn lifted_point_x_prime(
    cfg: &HeegnerConfig,
    geo: &GeometricData,
    n: u32,
) -> Result<ModuliPoint> {
    let order = cfg.order_at(n);
    let o_lat = order.lattice();
    let sigma_m = geo.sigma(&geo.m)?;
    let m_n = sigma_m.contracted(cfg, n)?;
    let n_n = cfg.n_ideal.intersect(&o_lat)?;
    let slot2 = n_n
        .ideal_inverse(&order)?
        .product(&m_n.ideal_inverse(&order)?)?;
    let level = geo.m.mul(&cfg.n_level);
    ModuliPoint::new(&o_lat, &slot2, &level, cfg.budget)
}

/// Full-degeneracy coherence: δ_d(x'_n) must equal x_n^{σ_d} for every
/// d | m. Returns the list of (d, matched) pairs.
pub fn lifted_point_coherence(
    cfg: &HeegnerConfig,
    geo: &GeometricData,
    n: u32,
) -> Result<Vec<(PolyA, bool)>> {
    let xprime = lifted_point_x_prime(cfg, geo, n)?;
    let x = heegner_point(cfg, n)?;
    let mut out = Vec::new();
    for (d, img) in crate::isogeny::full_degeneracy(&xprime, &geo.m, &cfg.n_level, cfg.budget)? {
        let sigma = geo.sigma(&d)?;
        let expect = galois_act(cfg, sigma, &x)?;
        out.push((d, img == expect.pt));
    }
    Ok(out)
}

/// Certificate produced by the geometric test: either a cyclic O_K-ideal
/// matching the classes at every requested level, or the exhausted bound.
#[derive(Clone, Debug)]
pub enum GeometricCertificate {
    Ideal(Lattice),
    ExhaustedBound(i64),
}

/// Is sigma geometric? True iff some O_K-ideal D with cyclic quotient and
/// norm degree at most the bound has [D ∩ O_n] = [ideal ∩ O_n] for every
/// level n in `levels`. The primitive ideals (a, b + w) are exactly the
/// cyclic-quotient ones, and the comparison is on canonical class
/// representatives, so the search is exhaustive.
pub fn is_geometric(
    cfg: &HeegnerConfig,
    sigma: &GaloisElement,
    degree_bound: i64,
    levels: &[u32],
) -> Result<(bool, GeometricCertificate)> {
    let target: Vec<Lattice> = {
        let mut v = Vec::new();
        for &n in levels {
            let order = cfg.order_at(n);
            v.push(
                sigma
                    .contracted(cfg, n)?
                    .reduced_class_rep(&order, cfg.budget)?,
            );
        }
        v
    };
    'cand: for (a, ideal) in crate::classgroup::primitive_ideals_up_to(&cfg.k, degree_bound)? {
        if !a.gcd(&cfg.p).is_one() {
            continue;
        }
        for (i, &n) in levels.iter().enumerate() {
            let order = cfg.order_at(n);
            let rep = ideal
                .intersect(&order.lattice())?
                .reduced_class_rep(&order, cfg.budget)?;
            if rep != target[i] {
                continue 'cand;
            }
        }
        return Ok((true, GeometricCertificate::Ideal(ideal)));
    }
    Ok((false, GeometricCertificate::ExhaustedBound(degree_bound)))
}

/// Search for θ in ker(Pic(O_horizon) -> Pic(O_m_level)) such that θσ is
/// non-geometric for every σ in R, in deterministic order over the kernel.
pub fn choose_theta(
    cfg: &HeegnerConfig,
    m_level: u32,
    representatives: &[GaloisElement],
    degree_bound: i64,
    horizon: u32,
) -> Result<GaloisElement> {
    assert!(horizon > m_level);
    let upper = PicGroup::compute(&cfg.order_at(horizon), cfg.budget)?;
    let lower = PicGroup::compute(&cfg.order_at(m_level), cfg.budget)?;
    let map = crate::classgroup::tower_map(&upper, &lower)?;
    let levels: Vec<u32> = (1..=horizon).collect();
    // sort kernel classes by their canonical representative
    let mut kernel: Vec<PicClass> = map.kernel.iter().map(|&i| PicClass(i)).collect();
    kernel.sort_by(|a, b| {
        upper
            .representative(*a)
            .cmp_canonical(upper.representative(*b))
    });
    for cls in kernel {
        // extend a coprime representative to an O_K-ideal
        let rep = upper.coprime_representative(cls, &cfg.p)?;
        let ideal = rep.order_extend(&PolyA::one(cfg.k.fq()))?;
        let theta = GaloisElement::new(cfg, &ideal)?;
        let mut ok = true;
        for sigma in representatives {
            let prod = theta.compose(sigma)?;
            let (geo, _) = is_geometric(cfg, &prod, degree_bound, &levels)?;
            if geo {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(theta);
        }
    }
    Err(Error::NoWitnessInHorizon)
}

/// Which subgroup to take the formal orbit over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitSubgroup {
    Trivial,
    G1,
    Full,
    /// Finite-level stand-in for the torsion subgroup: classes of Pic(O_n)
    /// that lift to classes of equal order in Pic(O_{n+lookahead}).
    TorsionApprox(u32),
}

/// Formal orbit multiset {x^σ} under the chosen subgroup. The trace on E is
/// out of reach here; the orbit is the combinatorial shadow it acts through.
pub fn g0_orbit(
    cfg: &HeegnerConfig,
    geo: &GeometricData,
    x: &HeegnerPoint,
    subgroup: OrbitSubgroup,
) -> Result<Vec<ModuliPoint>> {
    match subgroup {
        OrbitSubgroup::Trivial => Ok(vec![x.pt.clone()]),
        OrbitSubgroup::G1 => {
            let order = cfg.order_at(x.n);
            let mut seen_classes: Vec<Lattice> = Vec::new();
            let mut orbit = Vec::new();
            for (_, sigma) in &geo.divisor_map {
                let rep = sigma
                    .contracted(cfg, x.n)?
                    .reduced_class_rep(&order, cfg.budget)?;
                if seen_classes.contains(&rep) {
                    continue;
                }
                seen_classes.push(rep);
                orbit.push(galois_act(cfg, sigma, x)?.pt);
            }
            Ok(orbit)
        }
        OrbitSubgroup::Full => {
            let pic = PicGroup::compute(&cfg.order_at(x.n), cfg.budget)?;
            let mut orbit = Vec::new();
            for cls in pic.classes() {
                let rep = pic.coprime_representative(cls, &cfg.p)?;
                let ideal = rep.order_extend(&PolyA::one(cfg.k.fq()))?;
                let sigma = GaloisElement::new(cfg, &ideal)?;
                orbit.push(galois_act(cfg, &sigma, x)?.pt);
            }
            Ok(orbit)
        }
        OrbitSubgroup::TorsionApprox(lookahead) => {
            let pic = PicGroup::compute(&cfg.order_at(x.n), cfg.budget)?;
            let upper = PicGroup::compute(&cfg.order_at(x.n + lookahead), cfg.budget)?;
            let map = crate::classgroup::tower_map(&upper, &pic)?;
            let mut keep = vec![false; pic.len()];
            for c in upper.classes() {
                let img = PicClass(map.image[c.0]);
                if upper.order_of(c) == pic.order_of(img) {
                    keep[img.0] = true;
                }
            }
            let mut orbit = Vec::new();
            for cls in pic.classes() {
                if !keep[cls.0] {
                    continue;
                }
                let rep = pic.coprime_representative(cls, &cfg.p)?;
                let ideal = rep.order_extend(&PolyA::one(cfg.k.fq()))?;
                let sigma = GaloisElement::new(cfg, &ideal)?;
                orbit.push(galois_act(cfg, &sigma, x)?.pt);
            }
            Ok(orbit)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fq;
    use crate::lattice::primes_above;
    use crate::quadratic::make_field;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn p(s: &str) -> PolyA {
        PolyA::parse(&f3(), s).unwrap()
    }

    fn cfg() -> HeegnerConfig {
        let k = make_field(&f3(), &p("T^3+2*T+1")).unwrap();
        HeegnerConfig::new(&k, &p("T+1"), &p("T"), 1 << 22).unwrap()
    }

    #[test]
    fn hypothesis_checks() {
        let k = make_field(&f3(), &p("T^3+2*T+1")).unwrap();
        assert!(check_heegner_hypothesis(&k, &p("T+1"), &p("T")).is_ok());
        assert_eq!(
            check_heegner_hypothesis(&k, &p("T^3+2*T+1"), &p("T")).unwrap_err(),
            Error::NonSplitPrime("T^3+2*T+1".into())
        );
        assert_eq!(
            check_heegner_hypothesis(&k, &p("T"), &p("T")).unwrap_err(),
            Error::PDividesN
        );
        assert_eq!(
            check_heegner_hypothesis(&k, &p("T^2"), &p("T+2")).unwrap_err(),
            Error::NotSquareFreeLevel
        );
    }

    #[test]
    fn construct_n_examples() {
        let c = cfg();
        // N = (T+1, w - 1): HNF a = T+1, b = -1 = 2, c = 1
        assert_eq!(c.n_ideal.a(), &p("T+1"));
        assert_eq!(c.n_ideal.b(), &p("2"));
        assert!(c.n_ideal.c().is_one());
        // n = 1 gives O_K
        let k = c.k.clone();
        assert_eq!(
            construct_n(&k, &p("1")).unwrap(),
            Order::maximal(&k).lattice()
        );
        // a product of two split primes has norm n
        let okk = Order::maximal(&k);
        let n2 = construct_n(&k, &p("T^2+T")).unwrap();
        assert_eq!(n2.ideal_norm(&okk).unwrap().0, p("T^2+T"));
    }

    #[test]
    fn heegner_points_levels_0_to_3() {
        let c = cfg();
        for n in 0..=3 {
            let x = heegner_point(&c, n).unwrap();
            let cond = c.order_at(n).conductor().clone();
            let (c1, c2) = x.pt.conductors();
            assert_eq!(c1, cond);
            assert_eq!(c2, cond);
            let shape = x.pt.small().quotient_shape(x.pt.big()).unwrap();
            assert!(shape.cyclic);
            assert_eq!(shape.index_ideal, p("T+1"));
        }
    }

    #[test]
    fn galois_action_laws() {
        let c = cfg();
        let x = heegner_point(&c, 2).unwrap();
        // principal sigma acts trivially
        let princ = Order::maximal(&c.k)
            .lattice()
            .scale_poly(&p("T^2+1"))
            .unwrap();
        let sigma = GaloisElement::new(&c, &princ).unwrap();
        assert_eq!(galois_act(&c, &sigma, &x).unwrap().pt, x.pt);
        // (στ)x = σ(τx) for prime ideals
        let s1 = GaloisElement::new(&c, &primes_above(&c.k, &p("T+1")).unwrap().remove(0)).unwrap();
        let s2 = GaloisElement::new(&c, &primes_above(&c.k, &p("T^2+1")).unwrap().remove(0)).unwrap();
        let lhs = galois_act(&c, &s1.compose(&s2).unwrap(), &x).unwrap();
        let rhs = galois_act(&c, &s1, &galois_act(&c, &s2, &x).unwrap()).unwrap();
        assert_eq!(lhs.pt, rhs.pt);
        // coprimality to p enforced
        let bad = primes_above(&c.k, &p("T")).unwrap().remove(0);
        assert!(matches!(
            GaloisElement::new(&c, &bad),
            Err(Error::NotCoprime(_))
        ));
    }

    #[test]
    fn geometric_data_running_example() {
        let c = cfg();
        let geo = geometric_group(&c).unwrap();
        // D is irreducible, so one ramified prime and m = D
        assert_eq!(geo.ramified, vec![p("T^3+2*T+1")]);
        assert_eq!(geo.m, p("T^3+2*T+1"));
        assert_eq!(geo.divisor_map.len(), 2);
        // sigma_D has order 2 at levels >= 1: |G1| = 2
        assert_eq!(geo.g1_size_at_level(&c, 1).unwrap(), 2);
        assert_eq!(geo.g1_size_at_level(&c, 2).unwrap(), 2);
        // at level 0 the ramified prime w*O_K is principal: |G1| = 1
        assert_eq!(geo.g1_size_at_level(&c, 0).unwrap(), 1);
    }

    #[test]
    fn prop61_part1_level_2() {
        let c = cfg();
        let geo = geometric_group(&c).unwrap();
        // d = 1: diagonal
        let w = verify_geometric_level(&c, &geo, &p("1"), 2).unwrap();
        assert!(w.is_some());
        // d = D
        let d = geo.m.clone();
        let w = verify_geometric_level(&c, &geo, &d, 2).unwrap().unwrap();
        assert_eq!(w.level(), &d.mul(&p("T+1")));
    }

    #[test]
    fn lifted_point_level_2() {
        let c = cfg();
        let geo = geometric_group(&c).unwrap();
        let coh = lifted_point_coherence(&c, &geo, 2).unwrap();
        assert_eq!(coh.len(), 2);
        for (d, ok) in coh {
            assert!(ok, "delta_{d} mismatch");
        }
    }

    #[test]
    fn geometric_certificates() {
        let c = cfg();
        let geo = geometric_group(&c).unwrap();
        // sigma_D is geometric with certificate of norm degree 3
        let sigma_d = geo.sigma(&geo.m).unwrap();
        let (is_geo, cert) = is_geometric(&c, sigma_d, 4, &[1, 2, 3]).unwrap();
        assert!(is_geo);
        match cert {
            GeometricCertificate::Ideal(i) => {
                let okk = Order::maximal(&c.k);
                assert_eq!(i.ideal_norm(&okk).unwrap().0, geo.m);
            }
            _ => panic!("expected an ideal certificate"),
        }
        // a class of two coprime split primes is geometric
        let pq = primes_above(&c.k, &p("T+1"))
            .unwrap()
            .remove(0)
            .product(&primes_above(&c.k, &p("T+2")).unwrap().remove(0))
            .unwrap();
        let sigma = GaloisElement::new(&c, &pq).unwrap();
        let (is_geo, _) = is_geometric(&c, &sigma, 4, &[1, 2]).unwrap();
        assert!(is_geo);
    }

    #[test]
    fn theta_search_small() {
        let c = cfg();
        let theta = choose_theta(&c, 1, &[GaloisElement::identity(&c)], 2, 2).unwrap();
        // theta is in the kernel: trivial at level 1, nontrivial at level 2
        let o1 = c.order_at(1);
        let contracted = theta.contracted(&c, 1).unwrap();
        assert!(contracted
            .is_principal(&o1, c.budget)
            .unwrap()
            .is_some());
        let o2 = c.order_at(2);
        let c2 = theta.contracted(&c, 2).unwrap();
        assert!(c2.is_principal(&o2, c.budget).unwrap().is_none());
    }

    #[test]
    fn orbits() {
        let c = cfg();
        let geo = geometric_group(&c).unwrap();
        let x = heegner_point(&c, 1).unwrap();
        assert_eq!(
            g0_orbit(&c, &geo, &x, OrbitSubgroup::Trivial).unwrap().len(),
            1
        );
        let orb = g0_orbit(&c, &geo, &x, OrbitSubgroup::G1).unwrap();
        assert_eq!(orb.len(), 2);
        // closure: acting by sigma_D permutes the orbit
        let sigma = geo.sigma(&geo.m).unwrap();
        for pt in &orb {
            let moved = galois_act(
                &c,
                sigma,
                &HeegnerPoint {
                    n: 1,
                    pt: pt.clone(),
                },
            )
            .unwrap();
            assert!(orb.contains(&moved.pt));
        }
    }
}
