#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::OnceLock;

use qops::C64;

/// mpmath reference value `key` from the oracle fixture.
pub fn oracle(key: &str) -> C64 {
    static T: OnceLock<BTreeMap<String, [f64; 2]>> = OnceLock::new();
    let t = T.get_or_init(|| toml::from_str(include_str!("../fixtures/oracles.toml")).expect("oracle fixture parses"));
    let [re, im] = t.get(key).unwrap_or_else(|| panic!("no oracle `{key}`"));
    C64::new(*re, *im)
}

/// |a - b| ≤ tol·max(1, |b|).
#[track_caller]
pub fn assert_close(a: C64, b: C64, tol: f64) {
    let d = (a - b).norm();
    assert!(d <= tol * b.norm().max(1.0), "{a} vs {b}: |Δ| = {d:e} > {tol:e}");
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
