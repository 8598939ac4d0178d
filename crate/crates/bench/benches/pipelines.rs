use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use rfdkit::amalgam::{separate_amalgam, Amalgam, AmalgamWord, SeparationBudget};
use rfdkit::characters::{Character, QuotientCharacter};
use rfdkit::groups::{abels, heisenberg};
use rfdkit::quotients::{enumerate_quotient, DEFAULT_CAP};
use rfdkit::repkit::induce;

fn enumeration(c: &mut Criterion) {
    let heis = Arc::new(heisenberg());
    let abels2 = Arc::new(abels(2).unwrap());
    c.bench_function("enumerate heisenberg mod 16", |b| b.iter(|| enumerate_quotient(&heis, black_box(16), DEFAULT_CAP).unwrap()));
    c.bench_function("enumerate abels(2) mod 3", |b| b.iter(|| enumerate_quotient(&abels2, black_box(3), DEFAULT_CAP).unwrap()));
}

fn induction(c: &mut Criterion) {
    let heis = Arc::new(heisenberg());
    let q = Arc::new(enumerate_quotient(&heis, 12, DEFAULT_CAP).unwrap());
    let lambda = Character::parse(&heis, &["1/3".to_string()]).unwrap();
    let chi = QuotientCharacter::approximate(q.clone(), &lambda).unwrap();
    let x = heis.generator("x").unwrap().clone();
    c.bench_function("induce heisenberg mod 12 and evaluate x", |b| {
        b.iter(|| {
            let rho = induce(&q, &chi).unwrap();
            rho.eval(black_box(&x)).unwrap()
        })
    });
}

fn separation(c: &mut Criterion) {
    let amalgam = Amalgam::double(Arc::new(heisenberg()));
    let w = AmalgamWord::parse(&amalgam, "L:x R:y L:x^-1 R:y^-1").unwrap();
    let lambda = Character::parse(amalgam.left(), &["0".to_string()]).unwrap();
    let budget = SeparationBudget::up_to(8);
    c.bench_function("separate commutator word in heisenberg amalgam", |b| {
        b.iter(|| separate_amalgam(&amalgam, black_box(&w), &lambda, &budget).unwrap())
    });
}

criterion_group!(benches, enumeration, induction, separation);
criterion_main!(benches);
