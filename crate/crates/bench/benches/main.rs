use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use heegner_bench::running_field;
use heegner_core::algebra::{factor, PolyA};
use heegner_core::classgroup::{hn_group, PicGroup};
use heegner_core::isogeny::canonical_factorization;
use heegner_core::lattice::{primes_above, Order};

fn bench_factor(c: &mut Criterion) {
    let (fq, _) = running_field();
    let f = PolyA::parse(&fq, "T^8+2*T^5+T^3+2*T+1").unwrap();
    c.bench_function("poly_factor_deg8", |b| {
        b.iter(|| factor(black_box(&f), 7).unwrap())
    });
}

fn bench_class_group(c: &mut Criterion) {
    let (fq, k) = running_field();
    let cond = PolyA::parse(&fq, "T^2").unwrap();
    c.bench_function("pic_group_conductor_t2", |b| {
        b.iter(|| {
            let order = Order::new(&k, &cond).unwrap();
            PicGroup::compute(black_box(&order), 1 << 24).unwrap()
        })
    });
}

fn bench_hn(c: &mut Criterion) {
    let (fq, k) = running_field();
    let p = PolyA::parse(&fq, "T").unwrap();
    c.bench_function("hn_group_level_4", |b| {
        b.iter(|| hn_group(black_box(&k), &p, 4, 1 << 26).unwrap())
    });
}

fn bench_factorization(c: &mut Criterion) {
    let (fq, k) = running_field();
    let okk = Order::maximal(&k);
    let pr = primes_above(&k, &PolyA::parse(&fq, "T+1").unwrap())
        .unwrap()
        .remove(0);
    let pinv = pr.ideal_inverse(&okk).unwrap();
    let o2 = Order::new(&k, &PolyA::parse(&fq, "T^2").unwrap())
        .unwrap()
        .lattice();
    let la = o2.intersect(&pr).unwrap();
    c.bench_function("canonical_factorization", |b| {
        b.iter(|| canonical_factorization(black_box(&la), black_box(&pinv)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_factor,
    bench_class_group,
    bench_hn,
    bench_factorization
);
criterion_main!(benches);
