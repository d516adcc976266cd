//! Named property suites with deterministic, seeded reports. The CLI `verify`
//! command and the acceptance tests are thin wrappers around these.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{factor, hnf2, irreducibles_up_to, snf2, Fq, Mat2, PolyA};
use crate::classgroup::{
    annihilator_bound, class_number_zeta, generator_lower_bound, hn_group, pic_card_exact,
    tower_map, PicGroup,
};
use crate::error::{Error, Result};
use crate::heegner::{
    galois_act, geometric_group, heegner_point, is_geometric, lifted_point_coherence,
    verify_geometric_level, GaloisElement, HeegnerConfig,
};
use crate::isogeny::{
    canonical_factorization, cyclic_isogenies_between, degeneracy, hecke_member, sublattices_prime,
    ModuliPoint,
};
use crate::lattice::{Lattice, Order};
use crate::quadratic::{make_field, splitting_type, QuadElement, QuadField};
use crate::sample::{
    rand_cm_lattice, rand_coprime_ideal, rand_poly, rand_quad_element, rand_unimodular,
    rng_for, split_or_ramified_primes,
};

pub const SUITE_NAMES: &[&str] = &[
    "algebra",
    "quadratic",
    "lattice",
    "lemma52",
    "prop51",
    "degeneracy",
    "classgroup",
    "hn",
    "heegner",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
    pub fn counts(&self) -> (usize, usize) {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        (ok, self.checks.len())
    }
}

/// Deterministic plain-text rendering shared by the CLI and the tests.
pub fn render_reports(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    let mut ok_total = 0;
    let mut all_total = 0;
    for r in reports {
        out.push_str(&format!("suite {}\n", r.suite));
        for c in &r.checks {
            out.push_str(&format!(
                "  {:<34} {} ({})\n",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.detail
            ));
        }
        let (ok, total) = r.counts();
        ok_total += ok;
        all_total += total;
        out.push_str(&format!("  {ok}/{total} checks passed\n"));
    }
    out.push_str(&format!("result: {ok_total}/{all_total} checks passed\n"));
    out
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub k: QuadField,
    pub n_level: PolyA,
    pub p: PolyA,
    pub seed: u64,
    pub budget: usize,
}

impl VerifyConfig {
    pub fn heegner(&self) -> Result<HeegnerConfig> {
        HeegnerConfig::new(&self.k, &self.n_level, &self.p, self.budget)
    }
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn count_check(name: &str, good: usize, total: usize) -> CheckResult {
    check(name, good == total, format!("{good}/{total}"))
}

/// Runs one suite, or all of them for "all".
pub fn run(name: &str, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    let names: Vec<&str> = if name == "all" {
        SUITE_NAMES.to_vec()
    } else if SUITE_NAMES.contains(&name) {
        vec![name]
    } else {
        return Err(Error::Parse(format!(
            "unknown suite {name:?}; available: {} or all",
            SUITE_NAMES.join(", ")
        )));
    };
    names
        .into_iter()
        .map(|n| {
            let checks = match n {
                "algebra" => suite_algebra(cfg),
                "quadratic" => suite_quadratic(cfg),
                "lattice" => suite_lattice(cfg),
                "lemma52" => suite_lemma52(cfg),
                "prop51" => suite_prop51(cfg),
                "degeneracy" => suite_degeneracy(cfg),
                "classgroup" => suite_classgroup(cfg),
                "hn" => suite_hn(cfg),
                "heegner" => suite_heegner(cfg),
                _ => unreachable!(),
            }?;
            Ok(SuiteReport {
                suite: n.to_string(),
                checks,
            })
        })
        .collect()
}

fn suite_algebra(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let fq = cfg.k.fq().clone();
    let mut out = Vec::new();

    // hnf idempotence on random generator sets
    let mut rng = rng_for(cfg.seed, 1);
    let mut good = 0;
    let total = 200;
    let mut done = 0;
    while done < total {
        let n = 2 + (done % 3);
        let gens: Vec<(PolyA, PolyA)> = (0..n)
            .map(|_| (rand_poly(&mut rng, &fq, 3), rand_poly(&mut rng, &fq, 3)))
            .collect();
        let h = match hnf2(&gens) {
            Ok(h) => h,
            Err(Error::RankDeficient) => continue,
            Err(e) => return Err(e),
        };
        done += 1;
        let again = hnf2(&[(h.a.clone(), PolyA::zero(&fq)), (h.b.clone(), h.c.clone())])?;
        if again == h {
            good += 1;
        }
    }
    out.push(count_check("hnf_idempotent", good, total));

    // module equality under unimodular transformation of the basis
    let mut rng = rng_for(cfg.seed, 2);
    let mut good = 0;
    let total = 200;
    let mut done = 0;
    while done < total {
        let gens: Vec<(PolyA, PolyA)> = (0..2)
            .map(|_| (rand_poly(&mut rng, &fq, 3), rand_poly(&mut rng, &fq, 3)))
            .collect();
        let h = match hnf2(&gens) {
            Ok(h) => h,
            Err(Error::RankDeficient) => continue,
            Err(e) => return Err(e),
        };
        done += 1;
        let u = rand_unimodular(&mut rng, &fq, 4);
        let b = [
            (h.a.clone(), PolyA::zero(&fq)),
            (h.b.clone(), h.c.clone()),
        ];
        let rows: Vec<(PolyA, PolyA)> = (0..2)
            .map(|i| {
                (
                    u[i][0].mul(&b[0].0).add(&u[i][1].mul(&b[1].0)),
                    u[i][0].mul(&b[0].1).add(&u[i][1].mul(&b[1].1)),
                )
            })
            .collect();
        if hnf2(&rows)? == h {
            good += 1;
        }
    }
    out.push(count_check("hnf_module_equality", good, total));

    // snf divisibility and determinant
    let mut rng = rng_for(cfg.seed, 3);
    let mut good = 0;
    let total = 200;
    let mut done = 0;
    while done < total {
        let m = Mat2::new([
            [rand_poly(&mut rng, &fq, 3), rand_poly(&mut rng, &fq, 3)],
            [rand_poly(&mut rng, &fq, 3), rand_poly(&mut rng, &fq, 3)],
        ]);
        let det = m.det();
        if det.is_zero() {
            continue;
        }
        done += 1;
        let (d1, d2) = snf2(&m)?;
        if d1.divides(&d2) && d1.mul(&d2) == det.monic() {
            good += 1;
        }
    }
    out.push(count_check("snf_divisibility", good, total));

    // factorization reconstruction over F_3 and F_5
    for q in [3u64, 5] {
        let f = Fq::prime(q)?;
        let mut rng = rng_for(cfg.seed, 4 + q);
        let mut good = 0;
        let total = 1000;
        let mut done = 0;
        while done < total {
            let poly = rand_poly(&mut rng, &f, 8);
            if poly.is_zero() {
                continue;
            }
            done += 1;
            let (unit, factors) = factor(&poly, cfg.seed)?;
            let mut prod = PolyA::constant(&f, unit);
            for (p, e) in &factors {
                prod = prod.mul(&p.pow(*e as u64));
            }
            if prod == poly {
                good += 1;
            }
        }
        out.push(count_check(&format!("factor_reconstruction_f{q}"), good, total));
    }
    Ok(out)
}

fn suite_quadratic(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    let fq = k.fq().clone();
    let mut out = Vec::new();

    // chi against direct enumeration of squares, primes of degree <= 3
    let mut good = 0;
    let mut total = 0;
    let mut split = 0i64;
    let mut inert = 0i64;
    for q0 in irreducibles_up_to(&fq, 3) {
        if k.d().rem(&q0)?.is_zero() {
            continue;
        }
        total += 1;
        let st = splitting_type(k, &q0)?;
        let rf = crate::algebra::ResidueField::new(&q0)?;
        let squares: std::collections::HashSet<PolyA> =
            rf.elements().iter().map(|e| rf.mul(e, e)).collect();
        let expect = if squares.contains(&rf.reduce(k.d())) { 1 } else { -1 };
        if st.chi == expect {
            good += 1;
        }
        if st.chi == 1 {
            split += 1;
        } else {
            inert += 1;
        }
    }
    out.push(check(
        "splitting_census",
        good == total && (split - inert).abs() <= 2 * (k.genus() as i64 + 1),
        format!("{good}/{total} exact, split {split} vs inert {inert}"),
    ));

    // norm multiplicativity
    let mut rng = rng_for(cfg.seed, 10);
    let mut good = 0;
    let total = 500;
    for _ in 0..total {
        let a = rand_quad_element(&mut rng, k, 3);
        let b = rand_quad_element(&mut rng, k, 3);
        let (nab, dab) = a.mul(&b).norm();
        let (na, da) = a.norm();
        let (nb, db) = b.norm();
        if nab.mul(&da).mul(&db) == na.mul(&nb).mul(&dab) {
            good += 1;
        }
    }
    out.push(count_check("norm_multiplicative", good, total));

    // degree law on the configured field and on an inert companion
    let mut companion = None;
    for c in 1..fq.q() {
        if !fq.is_square(c) {
            let d2 = PolyA::new(&fq, vec![1, 0, c]);
            if crate::algebra::is_squarefree(&d2) {
                companion = Some(make_field(&fq, &d2)?);
                break;
            }
        }
    }
    let companion = companion.ok_or_else(|| Error::Internal("no inert companion field".into()))?;
    for (label, field) in [("configured", k.clone()), ("inert", companion)] {
        let mut rng = rng_for(cfg.seed, 11);
        let mut good = 0;
        let total = 500;
        for _ in 0..total {
            let e = rand_quad_element(&mut rng, &field, 4);
            let (n, d) = e.norm();
            if d.is_one() && n.deg() == e.norm_degree().unwrap() {
                good += 1;
            }
        }
        out.push(count_check(&format!("norm_degree_law_{label}"), good, total));
    }
    Ok(out)
}

fn suite_lattice(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    let pool = split_or_ramified_primes(k, 2)?;
    let conductors: Vec<PolyA> = vec![
        PolyA::one(k.fq()),
        cfg.p.clone(),
        cfg.p.mul(&cfg.p),
        rand_other_linear(k, &cfg.p)?,
    ];
    let mut out = Vec::new();

    // conductor is a homothety invariant
    let mut rng = rng_for(cfg.seed, 20);
    let mut good = 0;
    let total = 200;
    for i in 0..total {
        let c = &conductors[i % conductors.len()];
        let l = rand_cm_lattice(&mut rng, k, &pool, c)?;
        let lam = rand_quad_element(&mut rng, k, 2);
        if l.scale(&lam)?.conductor() == l.conductor() {
            good += 1;
        }
    }
    out.push(count_check("conductor_homothety_invariant", good, total));

    // c(I * L) = c(L) for I invertible over O = End(L)
    let mut rng = rng_for(cfg.seed, 21);
    let mut good = 0;
    let total = 200;
    for i in 0..total {
        let c = &conductors[i % conductors.len()];
        let order = Order::new(k, c)?;
        let l = rand_cm_lattice(&mut rng, k, &pool, c)?;
        let ideal = rand_coprime_ideal(&mut rng, k, &pool, c)?;
        let contracted = if order.is_maximal() {
            ideal
        } else {
            ideal.intersect(&order.lattice())?
        };
        if l.product(&contracted)?.conductor() == l.conductor() {
            good += 1;
        }
    }
    out.push(count_check("invertible_product_conductor", good, total));

    // index ideal from quotient shape equals the norm ratio
    let mut rng = rng_for(cfg.seed, 22);
    let mut good = 0;
    let total = 200;
    for i in 0..total {
        let c = &conductors[i % conductors.len()];
        let l2 = rand_cm_lattice(&mut rng, k, &pool, c)?;
        // scale by a nonzero element of End(l2) = O_c so that l1 <= l2
        let s = loop {
            let x = rand_poly(&mut rng, k.fq(), 2);
            let y = rand_poly(&mut rng, k.fq(), 1);
            let e = QuadElement::from_polys(k, &x, &y.mul(c));
            if !e.is_zero() {
                break e;
            }
        };
        let l1 = l2.scale(&s)?;
        let shape = l1.quotient_shape(&l2)?;
        let o = l2.multiplier_ring();
        let (n1, d1) = l1.ideal_norm(&o)?;
        let (n2, d2) = l2.ideal_norm(&o)?;
        // [L2 : L1] = N(L1)/N(L2)
        if shape.index_ideal.mul(&n2).mul(&d1).monic() == n1.mul(&d2).monic() {
            good += 1;
        }
    }
    out.push(count_check("index_equals_norm_ratio", good, total));

    // transporter duality: proper ideals multiply to O, non-proper fall short
    let mut rng = rng_for(cfg.seed, 23);
    let mut good = 0;
    let total = 100;
    for i in 0..total {
        let c = &conductors[i % conductors.len()];
        let order = Order::new(k, c)?;
        let ideal = rand_coprime_ideal(&mut rng, k, &pool, c)?;
        let contracted = if order.is_maximal() {
            ideal
        } else {
            ideal.intersect(&order.lattice())?
        };
        let inv = contracted.transporter(&order.lattice())?;
        if contracted.product(&inv)? == order.lattice() {
            good += 1;
        }
    }
    out.push(count_check("transporter_duality_proper", good, total));
    let mut good = 0;
    let mut total = 0;
    for c in &conductors {
        if c.is_one() {
            continue;
        }
        total += 1;
        let order = Order::new(k, c)?;
        // O_K is not proper over O_c
        let okk = Order::maximal(k).lattice();
        let t = okk.transporter(&order.lattice())?;
        let prod = okk.product(&t)?;
        if prod != order.lattice() && order.lattice().contains_lattice(&prod) {
            good += 1;
        }
    }
    out.push(count_check("transporter_duality_nonproper", good, total));

    // minimal vectors are complete: nothing below the minimum
    let mut rng = rng_for(cfg.seed, 24);
    let mut good = 0;
    let total = 100;
    for i in 0..total {
        let c = &conductors[i % conductors.len()];
        let l = rand_cm_lattice(&mut rng, k, &pool, c)?;
        let d = l.minimal_norm_degree(cfg.budget)?;
        let at = l.vectors_of_norm_degree(d, cfg.budget)?;
        let mut below = 0;
        for b in (d - 3)..d {
            below += l.vectors_of_norm_degree(b, cfg.budget)?.len();
        }
        if below == 0 && !at.is_empty() {
            good += 1;
        }
    }
    out.push(count_check("minimal_vectors_complete", good, total));
    Ok(out)
}

fn rand_other_linear(k: &QuadField, p: &PolyA) -> Result<PolyA> {
    for q0 in irreducibles_up_to(k.fq(), 1) {
        if &q0 != p {
            return Ok(q0);
        }
    }
    Err(Error::Internal("no linear prime other than p".into()))
}

fn suite_lemma52(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    let pool = split_or_ramified_primes(k, 1)?;
    let linears = irreducibles_up_to(k.fq(), 1);
    let mut rng = rng_for(cfg.seed, 30);
    let mut good_count = 0;
    let mut good_multiset = 0;
    let mut good_distinguished = 0;
    let total = 20;
    for _ in 0..total {
        let q0 = &linears[rng.gen_range(0..linears.len())];
        // conductor divisible by q0
        let extra = match rng.gen_range(0..3u32) {
            0 => PolyA::one(k.fq()),
            1 => q0.clone(),
            _ => linears[rng.gen_range(0..linears.len())].clone(),
        };
        let c = q0.mul(&extra);
        let lb = rand_cm_lattice(&mut rng, k, &pool, &c)?;
        let report = sublattices_prime(&lb, q0)?;
        let qsize = k.fq().q().pow(q0.deg() as u32) as usize;
        if report.entries.len() == qsize + 1 {
            good_count += 1;
        }
        let c_over = c.div_exact(q0)?;
        let cq = c.mul(q0);
        let drops = report.entries.iter().filter(|(_, cc)| *cc == c_over).count();
        let ups = report.entries.iter().filter(|(_, cc)| *cc == cq).count();
        if drops == 1 && ups == qsize {
            good_multiset += 1;
        }
        if let Some(i) = report.distinguished {
            let expect = lb.order_extend(&c_over)?.scale_poly(q0)?;
            if report.entries[i].0 == expect {
                good_distinguished += 1;
            }
        }
    }
    Ok(vec![
        count_check("sublattice_count", good_count, total),
        count_check("conductor_multiset", good_multiset, total),
        count_check("distinguished_sublattice", good_distinguished, total),
    ])
}

fn suite_prop51(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    let pool = split_or_ramified_primes(k, 1)?;
    let linears = irreducibles_up_to(k.fq(), 1);
    let mut rng = rng_for(cfg.seed, 40);
    let total = 50;
    let mut built = 0;
    let mut good = 0;
    let mut detail_parts: Vec<String> = Vec::new();
    while built < total {
        // random CM seed with conductor from a small pool
        let c = match rng.gen_range(0..4u32) {
            0 => PolyA::one(k.fq()),
            1 => cfg.p.clone(),
            2 => linears[rng.gen_range(0..linears.len())].clone(),
            _ => cfg.p.mul(&linears[rng.gen_range(0..linears.len())]),
        };
        let lb = rand_cm_lattice(&mut rng, k, &pool, &c)?;
        // walk down a few prime-index steps
        let steps = rng.gen_range(1..=3u32);
        let mut la = lb.clone();
        for _ in 0..steps {
            let q0 = &linears[rng.gen_range(0..linears.len())];
            let report = sublattices_prime(&la, q0)?;
            let pick = rng.gen_range(0..report.entries.len());
            la = report.entries[pick].0.clone();
        }
        let shape = la.quotient_shape(&lb)?;
        if !shape.cyclic {
            continue;
        }
        built += 1;
        let f = canonical_factorization(&la, &lb)?;
        let mut ok = true;
        ok &= f.d == f.d1.mul(&f.d2).mul(&f.dprime);
        ok &= f.c.gcd(&f.dprime).is_one();
        ok &= f.c.mul(&f.d1) == f.c1 && f.c.mul(&f.d2) == f.c2;
        let okk = Order::maximal(k);
        let sd = f.d_ideal.quotient_shape(&okk.lattice())?;
        ok &= sd.cyclic && sd.index_ideal == f.dprime;
        let oc = Order::new(k, &f.c)?;
        let dc = f.d_ideal.intersect(&oc.lattice())?;
        ok &= dc.ideal_inverse(&oc)?.product(&f.mid1)? == f.mid2;
        if ok {
            good += 1;
        } else {
            detail_parts.push(format!("case {built} failed"));
        }
    }
    let detail = if detail_parts.is_empty() {
        format!("{good}/{total}")
    } else {
        format!("{good}/{total}: {}", detail_parts.join("; "))
    };
    Ok(vec![check("factorization_invariants", good == total, detail)])
}

fn suite_degeneracy(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    cfg.heegner()?; // validate the configuration
    let mut out = Vec::new();
    // auxiliary split modulus m coprime to both the level and the tower prime
    let m = {
        let mut found = None;
        for q0 in irreducibles_up_to(k.fq(), 1) {
            if q0.gcd(&cfg.n_level).is_one()
                && q0.gcd(&cfg.p).is_one()
                && splitting_type(k, &q0)?.chi == 1
            {
                found = Some(q0);
                break;
            }
        }
        found.ok_or_else(|| Error::Internal("no split linear prime coprime to n and p".into()))?
    };
    let mn = m.mul(&cfg.n_level);

    // a supply of level-mn points: Heegner-style pairs at small conductors,
    // twisted by random prime classes
    let pool = split_or_ramified_primes(k, 1)?;
    let build_w = |rng: &mut rand_chacha::ChaCha12Rng| -> Result<ModuliPoint> {
        let level_ideal = crate::heegner::construct_n(k, &mn)?;
        let j = rng.gen_range(0..3u32);
        let order = Order::new(k, &cfg.p.pow(j as u64))?;
        let o_lat = order.lattice();
        let contracted = level_ideal.intersect(&o_lat)?;
        let big = contracted.ideal_inverse(&order)?;
        let tw = rand_coprime_ideal(rng, k, &pool, &cfg.p)?;
        let tw_c = if order.is_maximal() {
            tw
        } else {
            tw.intersect(&o_lat)?
        };
        let inv = tw_c.ideal_inverse(&order)?;
        ModuliPoint::new(&o_lat.product(&inv)?, &big.product(&inv)?, &mn, cfg.budget)
    };

    // homothety invariance of the degeneracy maps
    let mut rng = rng_for(cfg.seed, 50);
    let mut good = 0;
    let total = 100;
    for _ in 0..total {
        let w = build_w(&mut rng)?;
        let lam = rand_quad_element(&mut rng, k, 2);
        let w2 = ModuliPoint::new(
            &w.small().scale(&lam)?,
            &w.big().scale(&lam)?,
            &mn,
            cfg.budget,
        )?;
        let a = degeneracy(&w, &m, &m, &cfg.n_level, cfg.budget)?;
        let b = degeneracy(&w2, &m, &m, &cfg.n_level, cfg.budget)?;
        let a1 = degeneracy(&w, &PolyA::one(k.fq()), &m, &cfg.n_level, cfg.budget)?;
        let b1 = degeneracy(&w2, &PolyA::one(k.fq()), &m, &cfg.n_level, cfg.budget)?;
        if a == b && a1 == b1 {
            good += 1;
        }
    }
    out.push(count_check("degeneracy_homothety_invariant", good, total));

    // hecke consistency: membership recovers the witness class
    let mut rng = rng_for(cfg.seed, 51);
    let mut good = 0;
    let total = 30;
    for _ in 0..total {
        let w = build_w(&mut rng)?;
        let x = degeneracy(&w, &PolyA::one(k.fq()), &m, &cfg.n_level, cfg.budget)?;
        let y = degeneracy(&w, &m, &m, &cfg.n_level, cfg.budget)?;
        match hecke_member(&x, &y, &m, cfg.budget)? {
            Some(witness) if witness == w => good += 1,
            _ => {}
        }
    }
    out.push(count_check("hecke_recovers_witness", good, total));

    // uniqueness of the O_c-stable index-q superlattice of O_c * a
    let mut rng = rng_for(cfg.seed, 52);
    let mut good = 0;
    let total = 50;
    let linears = irreducibles_up_to(k.fq(), 1);
    for _ in 0..total {
        let q0 = &linears[rng.gen_range(0..linears.len())];
        let extra = if rng.gen_bool(0.5) {
            PolyA::one(k.fq())
        } else {
            q0.clone()
        };
        let c = q0.mul(&extra);
        let a_lat = rand_cm_lattice(&mut rng, k, &pool, &c)?;
        let oc = Order::new(k, &c)?;
        let x = a_lat.product(&oc.lattice())?;
        // superlattices Y with X ⊂_{q0} Y: lines of q0^{-1} X / X
        let inv = k.element(&PolyA::one(k.fq()), &PolyA::zero(k.fq()), q0)?;
        let over = x.scale(&inv)?;
        let [f1, f2] = over.basis();
        let [s1, s2] = x.basis();
        let mut stable = 0;
        let mut dirs: Vec<(PolyA, PolyA)> = Vec::new();
        for t in residues_of(q0) {
            dirs.push((PolyA::one(k.fq()), t));
        }
        dirs.push((PolyA::zero(k.fq()), PolyA::one(k.fq())));
        for (u, v) in dirs {
            let wvec = f1.scale_poly(&u).add(&f2.scale_poly(&v));
            let y = Lattice::from_generators(&[wvec, s1.clone(), s2.clone()])?;
            let shape = x.quotient_shape(&y)?;
            if !(shape.cyclic && shape.index_ideal == *q0) {
                continue;
            }
            if y.product(&oc.lattice())? == y {
                stable += 1;
            }
        }
        if stable == 1 {
            good += 1;
        }
    }
    out.push(count_check("unique_stable_superlattice", good, total));
    Ok(out)
}

fn residues_of(m: &PolyA) -> Vec<PolyA> {
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

fn suite_classgroup(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    let mut out = Vec::new();
    let r = rand_other_linear(k, &cfg.p)?;
    let conductors = [
        PolyA::one(k.fq()),
        cfg.p.clone(),
        cfg.p.mul(&cfg.p),
        cfg.p.mul(&r),
    ];
    let mut good = 0;
    let mut details = Vec::new();
    for c in &conductors {
        let order = Order::new(k, c)?;
        let formula = pic_card_exact(&order, cfg.budget)?;
        let group = PicGroup::compute(&order, cfg.budget)?;
        if group.group_order() == formula && group.len() as u64 == formula {
            good += 1;
        }
        details.push(format!("c={c}: {formula}"));
    }
    out.push(check(
        "enumeration_matches_formula",
        good == conductors.len(),
        details.join(", "),
    ));

    if k.infinity_type() == crate::quadratic::InfinityType::Ramified {
        let h = class_number_zeta(k)?;
        let formula = pic_card_exact(&Order::maximal(k), cfg.budget)?;
        out.push(check(
            "zeta_agreement",
            h == formula,
            format!("zeta {h}, formula {formula}"),
        ));
    }

    // tower behavior up to level 4
    let maxn = 4u32;
    let groups: Vec<PicGroup> = (0..=maxn)
        .map(|n| PicGroup::compute(&Order::new(k, &cfg.p.pow(n as u64))?, cfg.budget))
        .collect::<Result<_>>()?;
    let p_abs = k.fq().q().pow(cfg.p.deg() as u32);
    let chi = splitting_type(k, &cfg.p)?.chi;
    let mut surj = true;
    let mut kernels_ok = true;
    let mut pgroups_ok = true;
    for n in 0..maxn as usize {
        let t = tower_map(&groups[n + 1], &groups[n])?;
        surj &= t.surjective;
        let expect = if n == 0 {
            (p_abs as i64 - chi as i64) as u64
        } else {
            p_abs
        };
        kernels_ok &= t.kernel.len() as u64 == expect;
        if n >= 1 {
            for &i in &t.kernel {
                let mut v = groups[n + 1].order_of(crate::classgroup::PicClass(i));
                while v % k.fq().p() == 0 {
                    v /= k.fq().p();
                }
                pgroups_ok &= v == 1;
            }
        }
    }
    out.push(check("tower_surjective", surj, format!("levels 0..{maxn}")));
    out.push(check(
        "tower_kernel_orders",
        kernels_ok,
        format!("|p| = {p_abs}, chi = {chi}"),
    ));
    out.push(check(
        "tower_kernel_p_groups",
        pgroups_ok,
        "levels >= 1".to_string(),
    ));

    // prime-to-p invariant factors stabilize for n >= 1
    let parts: Vec<Vec<u64>> = groups
        .iter()
        .skip(1)
        .map(|g| g.shape.prime_to_p_part(k.fq().p()))
        .collect();
    let stable = parts.windows(2).all(|w| w[0] == w[1]);
    out.push(check(
        "prime_to_p_stabilization",
        stable,
        format!("{parts:?}"),
    ));
    Ok(out)
}

fn suite_hn(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    let p_char = k.fq().p();
    let p_abs = k.fq().q().pow(cfg.p.deg() as u32);
    let maxn = if (p_abs as u128).pow(12) <= cfg.budget as u128 { 5 } else { 4 };
    let mut out = Vec::new();
    for n in 1..=maxn {
        let h = hn_group(k, &cfg.p, n, cfg.budget)?;
        let expect = p_abs.pow(n - 1);
        let factors_are_p_powers = h.shape.invariant_factors.iter().all(|&f| {
            let mut v = f;
            while v % p_char == 0 {
                v /= p_char;
            }
            v == 1
        });
        let s_bound = annihilator_bound(p_char, n);
        let g_bound = generator_lower_bound(k, &cfg.p, n);
        let passed = h.order == expect
            && factors_are_p_powers
            && h.annihilator_exp <= s_bound
            && (n == 1 || h.min_generators >= g_bound);
        out.push(check(
            &format!("hn_level_{n}"),
            passed,
            format!(
                "|H_{n}| = {} (expect {expect}), factors {:?}, s = {} <= {s_bound}, gens = {} >= {g_bound}",
                h.order, h.shape.invariant_factors, h.annihilator_exp, h.min_generators
            ),
        ));
    }
    Ok(out)
}

fn suite_heegner(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let k = &cfg.k;
    let hcfg = cfg.heegner()?;
    let mut out = Vec::new();

    // construction invariants for n <= 5
    let mut good = 0;
    let total = 6;
    for n in 0..=5u32 {
        let x = heegner_point(&hcfg, n)?;
        let cond = hcfg.order_at(n).conductor().clone();
        let (c1, c2) = x.pt.conductors();
        let shape = x.pt.small().quotient_shape(x.pt.big())?;
        if c1 == cond && c2 == cond && shape.cyclic && shape.index_ideal == cfg.n_level {
            good += 1;
        }
    }
    out.push(count_check("construction_levels_0_to_5", good, total));

    // action laws
    let pool = split_or_ramified_primes(k, 1)?;
    let mut rng = rng_for(cfg.seed, 60);
    let mut good = 0;
    let total = 50;
    let x2 = heegner_point(&hcfg, 2)?;
    for _ in 0..total {
        let s = GaloisElement::new(&hcfg, &rand_coprime_ideal(&mut rng, k, &pool, &cfg.p)?)?;
        let t = GaloisElement::new(&hcfg, &rand_coprime_ideal(&mut rng, k, &pool, &cfg.p)?)?;
        let lhs = galois_act(&hcfg, &s.compose(&t)?, &x2)?;
        let rhs = galois_act(&hcfg, &s, &galois_act(&hcfg, &t, &x2)?)?;
        if lhs.pt == rhs.pt {
            good += 1;
        }
    }
    out.push(count_check("action_associative", good, total));

    let princ = Order::maximal(k).lattice().scale_poly(&rand_other_linear(k, &cfg.p)?)?;
    let sigma = GaloisElement::new(&hcfg, &princ)?;
    out.push(check(
        "principal_acts_trivially",
        galois_act(&hcfg, &sigma, &x2)?.pt == x2.pt,
        "principal class".to_string(),
    ));

    // Prop 6.1(1) for all d | m, n <= 4
    let geo = geometric_group(&hcfg)?;
    let mut good = 0;
    let mut total = 0;
    for n in 0..=4u32 {
        for (d, _) in &geo.divisor_map {
            total += 1;
            if verify_geometric_level(&hcfg, &geo, d, n)?.is_some() {
                good += 1;
            }
        }
    }
    out.push(count_check("prop61_hecke_membership", good, total));

    // lifted-point coherence for n <= 4
    let mut good = 0;
    let mut total = 0;
    for n in 0..=4u32 {
        for (_, ok) in lifted_point_coherence(&hcfg, &geo, n)? {
            total += 1;
            if ok {
                good += 1;
            }
        }
    }
    out.push(count_check("lifted_point_coherence", good, total));

    // |G1| at tested levels divides 2^g
    let mut good = 0;
    let total = 4;
    for n in 1..=total as u32 {
        let size = geo.g1_size_at_level(&hcfg, n)? as u64;
        if (1u64 << geo.ramified.len()) % size == 0 {
            good += 1;
        }
    }
    out.push(count_check("g1_size_divides_2_pow_g", good, total));

    // non-geometric exclusion: five certified classes, no isogenies of
    // degree <= 2 at levels 3..5
    let levels = [3u32, 4, 5];
    let candidates = nongeometric_candidates(&hcfg, 5, 4, &levels)?;
    let mut good = 0;
    let total = candidates.len();
    for sigma in &candidates {
        let mut empty = true;
        for &n in &levels {
            let xn = heegner_point(&hcfg, n)?;
            let xs = galois_act(&hcfg, sigma, &xn)?;
            for d in monics_up_to(k.fq(), 2) {
                if !cyclic_isogenies_between(xn.pt.small(), xs.pt.small(), &d, cfg.budget)?
                    .is_empty()
                {
                    empty = false;
                }
            }
        }
        if empty {
            good += 1;
        }
    }
    out.push(check(
        "nongeometric_exclusion",
        good == total && total == 5,
        format!("{good}/{total} certified classes exclude all deg <= 2 isogenies"),
    ));

    // tower compatibility of Galois classes
    let mut rng = rng_for(cfg.seed, 61);
    let groups: Vec<PicGroup> = (1..=3u32)
        .map(|n| PicGroup::compute(&hcfg.order_at(n), cfg.budget))
        .collect::<Result<_>>()?;
    let mut good = 0;
    let total = 10;
    for _ in 0..total {
        let sigma = GaloisElement::new(&hcfg, &rand_coprime_ideal(&mut rng, k, &pool, &cfg.p)?)?;
        let mut ok = true;
        for n in 1..3usize {
            let upper = &groups[n];
            let lower = &groups[n - 1];
            let map = tower_map(upper, lower)?;
            let cu = upper.class_of(&sigma.contracted(&hcfg, n as u32 + 1)?)?;
            let cl = lower.class_of(&sigma.contracted(&hcfg, n as u32)?)?;
            ok &= map.image[cu.0] == cl.0;
        }
        if ok {
            good += 1;
        }
    }
    out.push(count_check("galois_tower_compatibility", good, total));
    Ok(out)
}

/// The first `count` principal classes (u + w)O_K, in canonical scan order,
/// that are certified non-geometric at the given bound and levels.
pub fn nongeometric_candidates(
    hcfg: &HeegnerConfig,
    count: usize,
    degree_bound: i64,
    levels: &[u32],
) -> Result<Vec<GaloisElement>> {
    let k = &hcfg.k;
    let okk = Order::maximal(k);
    let mut out = Vec::new();
    'outer: for deg_u in 0..=4usize {
        for u in monics_up_to_exact(k.fq(), deg_u) {
            let x = QuadElement::from_polys(k, &u, &PolyA::one(k.fq()));
            let (norm, _) = x.norm();
            if norm.is_zero() || !norm.gcd(&hcfg.p).is_one() {
                continue;
            }
            let ideal = okk.lattice().scale(&x)?;
            let sigma = match GaloisElement::new(hcfg, &ideal) {
                Ok(s) => s,
                Err(_) => continue,
            };
            // require a nontrivial class at every tested level
            let mut nontrivial = true;
            for &n in levels {
                let on = hcfg.order_at(n);
                if sigma
                    .contracted(hcfg, n)?
                    .is_principal(&on, hcfg.budget)?
                    .is_some()
                {
                    nontrivial = false;
                    break;
                }
            }
            if !nontrivial {
                continue;
            }
            let (geo, _) = is_geometric(hcfg, &sigma, degree_bound, levels)?;
            if !geo {
                out.push(sigma);
                if out.len() == count {
                    break 'outer;
                }
            }
        }
    }
    if out.len() < count {
        return Err(Error::BudgetExceeded(hcfg.budget));
    }
    Ok(out)
}

fn monics_up_to(fq: &Fq, maxdeg: usize) -> Vec<PolyA> {
    let mut out = Vec::new();
    for d in 0..=maxdeg {
        out.extend(monics_up_to_exact(fq, d));
    }
    out
}

fn monics_up_to_exact(fq: &Fq, deg: usize) -> Vec<PolyA> {
    if deg == 0 {
        return vec![PolyA::one(fq)];
    }
    let total = fq.q().pow(deg as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut v = code;
        for _ in 0..deg {
            coeffs.push(v % fq.q());
            v /= fq.q();
        }
        coeffs.push(1);
        out.push(PolyA::new(fq, coeffs));
    }
    out.sort_by(|a, b| a.cmp_canonical(b));
    out
}
