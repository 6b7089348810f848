#![allow(dead_code)]

use koethe_lab::growth_dsl::{parse_spec, KoetheMatrixSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BASES: [&str; 5] = ["1", "log(j)", "j^(1/2)", "j", "j^2"];

/// `(a·q + b)` per basis function; `a ≥ 0` and `b ≥ 0` on the constant
/// keep rows nondecreasing in `q`.
pub fn spec_text(name: &str, terms: &[(usize, i64, i64)]) -> String {
    let mut parts: Vec<String> = terms.iter().map(|&(k, a, b)| format!("({a}*q + {b}) * {}", BASES[k])).collect();
    if parts.is_empty() {
        parts.push("q".into());
    }
    format!("matrix {name} {{ log_entry: {} }}", parts.join(" + "))
}

pub fn fragment_spec() -> impl Strategy<Value = KoetheMatrixSpec> {
    proptest::collection::vec((0usize..5, 0i64..=3, -2i64..=2), 1..=3).prop_map(|mut terms| {
        for t in terms.iter_mut() {
            if t.0 == 0 {
                t.2 = t.2.abs();
            }
        }
        parse_spec(&spec_text("g", &terms)).unwrap()
    })
}

fn random_terms(rng: &mut ChaCha8Rng) -> Vec<(usize, i64, i64)> {
    let n = rng.random_range(1..=3);
    (0..n)
        .map(|_| {
            let k = rng.random_range(0..5);
            let b = rng.random_range(-2..=2i64);
            (k, rng.random_range(0..=3), if k == 0 { b.abs() } else { b })
        })
        .collect()
}

/// Named specs plus seeded random fragment specs, 36 in total.
pub fn corpus() -> Vec<KoetheMatrixSpec> {
    let named = [
        ("s", "q * log(j)"),
        ("damped", "q * log(j) - j"),
        ("lambda_j", "q * j"),
        ("lambda_sqrt", "q * j^(1/2)"),
        ("lambda_sq", "q * j^2"),
        ("double_s", "2*q * log(j)"),
        ("shifted_s", "(q + 1) * log(j)"),
        ("quadratic_grade", "q^2 * log(j)"),
        ("mixed", "q * log(j) + q * j^(1/2)"),
        ("flat", "q"),
        ("constant_row", "log(j)"),
        ("heavy_damping", "q * log(j) - j^2"),
        ("half_s", "1/2 * q * log(j)"),
        ("j_minus_log", "q * j - log(j)"),
        ("grade_offset", "(q + 3) * j"),
        ("poly_mix", "q * j + q * log(j)"),
    ];
    let mut out: Vec<KoetheMatrixSpec> =
        named.iter().map(|(n, e)| parse_spec(&format!("matrix {n} {{ log_entry: {e} }}")).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut i = 0;
    while out.len() < 36 {
        let s = parse_spec(&spec_text(&format!("random_{i}"), &random_terms(&mut rng))).unwrap();
        i += 1;
        if !out.iter().any(|o| o.basis() == s.basis() && o.terms() == s.terms()) {
            out.push(s);
        }
    }
    out
}
