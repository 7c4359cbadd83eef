#![allow(dead_code)]

use std::path::PathBuf;

use qdm::{build_ring, build_series, CohomRing, GiventalSeries, SignMode, ToricVariety};

pub const CORPUS: [&str; 6] = ["p1", "p2", "p3", "p1xp1", "f1", "dp7"];

pub fn fan_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fans").join(format!("{name}.json"))
}

pub fn load(name: &str) -> (ToricVariety, CohomRing) {
    let text = std::fs::read_to_string(fan_path(name)).unwrap();
    let v = ToricVariety::from_json(&text).unwrap();
    let r = build_ring(&v.fan, &v.charge).unwrap();
    (v, r)
}

pub fn series(name: &str, bound: u32) -> (ToricVariety, CohomRing, GiventalSeries) {
    let (v, r) = load(name);
    let f = build_series(&r, &v.charge, &v.generators, bound, SignMode::General).unwrap();
    (v, r, f)
}

/// `n!` by repeated multiplication, independent of the library helper.
pub fn factorial(n: i64) -> num_bigint::BigInt {
    (1..=n).fold(num_bigint::BigInt::from(1), |acc, k| acc * k)
}
