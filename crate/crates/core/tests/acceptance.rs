//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::Instant;

use koethe_lab::growth_dsl::{KoetheMatrixSpec, Provenance, TabulatedMatrix};
use koethe_lab::matrix_calculus::{
    classify, dominated_by, has_dn, is_nuclear, probe_classification, probe_nuclearity, sweep_nuclearity, trend_slope,
    DIVERGENCE_SLOPE,
};
use koethe_lab::norm_lab::{run_suite, SuiteConfig, SQRT3};
use koethe_lab::quasi_equiv::{
    match_profiles, mityagin_pair, normalize_profile, planted_pair, random_orthonormal_family, square_witness,
};
use koethe_lab::smooth_ops::{profile, rank_one, Family, GradedNormSystem};
use koethe_lab::{AffineTemplate, ConstantBound, State, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn inf_convolution_constants() -> Outcome {
    let start = Instant::now();
    let cfg = SuiteConfig { lemma35_models: 1000, lemma35_samples: 1000, ladder_models: 0, seed: 1, ..SuiteConfig::default() };
    let r = run_suite(&cfg).expect("suite");
    let secs = start.elapsed().as_secs_f64();
    let pass = r.holds()
        && r.lemma35_models >= 1000
        && r.ratio_min >= 1.0 - 1e-9
        && r.ratio_max <= SQRT3 * (1.0 + 1e-9)
        && r.quotient_ratio_max <= 1.0 + 1e-9
        && secs < 30.0;
    outcome(
        pass,
        format!(
            "{} models x {} vectors, ‖x‖_E/‖x‖_F in [{:.6}, {:.6}], quotient ratio ≤ {:.6}, {secs:.1}s",
            r.lemma35_models, r.lemma35_samples, r.ratio_min, r.ratio_max, r.quotient_ratio_max
        ),
    )
}

fn ladder_constant() -> Outcome {
    let start = Instant::now();
    let cfg = SuiteConfig {
        lemma35_models: 0,
        ladder_models: 100,
        ladder_samples: 2000,
        ladder_max_dim: 32,
        ladder_max_levels: 6,
        seed: 2,
        ..SuiteConfig::default()
    };
    let r = run_suite(&cfg).expect("suite");
    let secs = start.elapsed().as_secs_f64();
    let pass = r.holds() && r.ladder_models >= 100 && r.ladder_observed_max <= 49.0 * (1.0 + 1e-6) && secs < 60.0;
    outcome(
        pass,
        format!("{} ladder models, observed sup {:.6} (bound 49), {secs:.1}s", r.ladder_models, r.ladder_observed_max),
    )
}

fn rank_one_identity() -> Outcome {
    let worst = (0..1000u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(t);
            let n = rng.random_range(1..=512);
            let f = random_orthonormal_family(n.min(64), t)[0].clone();
            // spread the unit vector over the full dimension
            let mut g = koethe_lab::smooth_ops::CVector::zeros(n);
            for (i, z) in f.iter().enumerate() {
                g[(i * 7919) % n] += *z;
            }
            let g = &g / num_complex::Complex64::from(g.norm());
            let sys = GradedNormSystem::new(n, 7);
            let p = rank_one(&g).unwrap();
            (0..7)
                .map(|q| {
                    let v = sys.vector_norm(&g, q).unwrap().powi(2);
                    (sys.operator_norm(&p, q).unwrap() - v).abs() / v
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 1e-9, format!("1000 unit vectors, N ≤ 512, q ≤ 6, worst relative error {worst:.2e}"))
}

fn template_is(v: &Verdict, t: AffineTemplate) -> bool {
    v.is_proved() && v.witness.as_ref().and_then(|w| w.r_template) == Some(t)
}

fn classify_s() -> Outcome {
    let start = Instant::now();
    let s = KoetheMatrixSpec::rapidly_decreasing();
    let r = probe_classification(&s, classify(&s).unwrap(), 10_000, 8).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let v = &r.verdicts;
    let cnr = v.continuous_norm_row.witness.as_ref().is_some_and(|w| w.p == Some(0) && w.constant.is_one());
    let sqrt_c = v.sqrt_closed.witness.as_ref().is_some_and(|w| w.constant.is_one());
    let pass = template_is(&v.nuclear, AffineTemplate { a: 1, b: 2 })
        && v.continuous_norm_row.is_proved()
        && cnr
        && template_is(&v.sqrt_closed, AffineTemplate { a: 2, b: 0 })
        && sqrt_c
        && r.is_consistent()
        && secs < 5.0;
    outcome(
        pass,
        format!(
            "nuclear r = q+2, continuous norm p = 0 C = 1, sqrt-closed r = 2q C = 1, probe consistent = {}, {secs:.2}s",
            r.is_consistent()
        ),
    )
}

fn counterexamples() -> Outcome {
    let d = koethe_lab::growth_dsl::parse_spec("matrix damped { log_entry: q * log(j) - j }").unwrap();
    let r = classify(&d).unwrap();
    let rows = (1..=1_000_000u32).map(|j| (0..8).map(|q| q as f64 * (1.0 + (j as f64).ln()).ln()).collect()).collect();
    let ll = TabulatedMatrix::from_log_rows(rows, Provenance::ExternalFile).unwrap();
    let sweep = sweep_nuclearity(&ll);
    let harmonic = probe_nuclearity(&ll, 0, 1).unwrap().diverging();
    let pass = r.verdicts.nuclear.is_proved() && r.verdicts.continuous_norm_row.is_refuted() && sweep.non_nuclear && harmonic;
    outcome(
        pass,
        format!(
            "j^q e^-j: nuclear {:?}, continuous norm {:?}; log(1+log j) at J = 10^6: non-nuclear flag {}",
            r.verdicts.nuclear.state, r.verdicts.continuous_norm_row.state, sweep.non_nuclear
        ),
    )
}

const ORACLE_ROWS: usize = 10_000;
const ORACLE_R: usize = 12;
const ORACLE_Q: u64 = 4;

/// Running maxima of a log ratio at J = 10², 10³, 10⁴.
fn decade_maxima(log_ratio: &[f64]) -> [f64; 3] {
    let m = |n: usize| log_ratio[..n].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [m(100), m(1000), m(10_000)]
}

fn strictly_growing(m: [f64; 3]) -> bool {
    m[1] > m[0] + 1e-9 && m[2] > m[1] + 1e-9
}

/// A proved bound on `log_ratio` at the witness constant. `scale` is the
/// largest log entry involved; cancellation error grows with it.
fn witness_holds(log_ratio: &[f64], scale: f64, c: &ConstantBound, q: u64) -> bool {
    let m = decade_maxima(log_ratio);
    let slack = 1e-9 + 1e-13 * scale;
    match c.at(q) {
        Some(c) => m[2] <= c.ln() + slack + 1e-9 * c.ln().abs(),
        None => m[2] - m[1] <= DIVERGENCE_SLOPE * 10f64.ln() + slack,
    }
}

/// What a brute-force search accepts as a witness: bounded by 10⁶ on the
/// grid and not trending upward at its end.
fn brute_force_witness(log_ratio: &[f64]) -> bool {
    decade_maxima(log_ratio)[2] <= 1e6f64.ln() && trend_slope(log_ratio) <= DIVERGENCE_SLOPE
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(cols: &[&[f64]]) -> f64 {
    cols.iter().flat_map(|c| c.iter()).fold(0.0, |m, x| m.max(x.abs()))
}

struct Tally {
    checked: usize,
    beyond_grid: usize,
    contradictions: Vec<String>,
}

/// Whether `a_{j,q} / b_{j,r}` passes 10⁶ somewhere in `10⁵ ≤ j ≤ 10¹²`.
fn exceeds_past_grid(a: &KoetheMatrixSpec, b: &KoetheMatrixSpec, q: u64, r: u64) -> bool {
    (5..=12).any(|k| {
        let j = 10u64.pow(k);
        a.log_evaluate(j, q).unwrap() - b.log_evaluate(j, r).unwrap() > 1e6f64.ln()
    })
}

fn check_domination(
    (a, b): (&KoetheMatrixSpec, &KoetheMatrixSpec),
    v: &Verdict,
    ca: &[Vec<f64>],
    cb: &[Vec<f64>],
    t: &mut Tally,
) {
    let name = format!("{} ≺ {}", a.name(), b.name());
    match v.state {
        State::Proved => {
            let w = v.witness.as_ref().unwrap();
            let tmpl = w.r_template.unwrap();
            for q in 0..=ORACLE_Q {
                let r = tmpl.apply(q) as usize;
                if r <= ORACLE_R {
                    t.checked += 1;
                    let sc = scale(&[&ca[q as usize], &cb[r]]);
                    if !witness_holds(&diff(&ca[q as usize], &cb[r]), sc, &w.constant, q) {
                        t.contradictions.push(format!("{name}: proved witness fails at q = {q}, r = {r}"));
                    }
                }
            }
        }
        State::Refuted => {
            let q0 = v.certificate.as_ref().unwrap().q0 as usize;
            if q0 <= ORACLE_R {
                t.checked += 1;
                let ratios: Vec<Vec<f64>> = (0..=ORACLE_R).map(|r| diff(&ca[q0], &cb[r])).collect();
                if !strictly_growing(decade_maxima(&ratios[0])) {
                    t.contradictions.push(format!("{name}: refuted at q0 = {q0} but the r = 0 maximum does not grow"));
                }
                // a grid witness is an artifact when the ratio passes 10⁶ further out
                for r in (0..=ORACLE_R).filter(|&r| brute_force_witness(&ratios[r])) {
                    if exceeds_past_grid(a, b, q0 as u64, r as u64) {
                        t.beyond_grid += 1;
                    } else {
                        t.contradictions.push(format!("{name}: refuted at q0 = {q0} but r = {r} is a grid witness"));
                    }
                }
            }
        }
        State::Undecided => {}
    }
}

fn oracle_equivalence(corpus: &[KoetheMatrixSpec]) -> Outcome {
    let grids: Vec<TabulatedMatrix> = corpus.par_iter().map(|s| s.evaluate_grid(ORACLE_ROWS, ORACLE_R + 1).unwrap()).collect();
    let cols: Vec<Vec<Vec<f64>>> = grids.iter().map(|g| (0..=ORACLE_R).map(|q| g.log_column(q)).collect()).collect();
    let mut tally = Tally { checked: 0, beyond_grid: 0, contradictions: vec![] };
    let mut states = [0usize; 3];
    let mut count = |v: &Verdict| {
        states[match v.state {
            State::Proved => 0,
            State::Refuted => 1,
            State::Undecided => 2,
        }] += 1
    };
    for (i, a) in corpus.iter().enumerate() {
        for (k, b) in corpus.iter().enumerate() {
            let v = dominated_by(a, b).unwrap();
            count(&v);
            check_domination((a, b), &v, &cols[i], &cols[k], &mut tally);
        }
        let n = is_nuclear(a).unwrap();
        count(&n);
        match n.state {
            State::Proved => {
                let tmpl = n.witness.as_ref().unwrap().r_template.unwrap();
                for q in 0..=ORACLE_Q as usize {
                    let r = tmpl.apply(q as u64) as usize;
                    if r <= ORACLE_R {
                        tally.checked += 1;
                        if probe_nuclearity(&grids[i], q, r).unwrap().diverging() {
                            tally.contradictions.push(format!("{}: nuclear witness diverges at q = {q}", a.name()));
                        }
                    }
                }
            }
            State::Refuted => {
                let q0 = n.certificate.as_ref().unwrap().q0 as usize;
                tally.checked += 1;
                if let Some(r) = (0..=ORACLE_R).find(|&r| !probe_nuclearity(&grids[i], q0, r).unwrap().diverging()) {
                    tally.contradictions.push(format!("{}: non-nuclear but q0 = {q0}, r = {r} converges", a.name()));
                }
            }
            State::Undecided => {}
        }
        let dn = has_dn(a).unwrap();
        count(&dn);
        if dn.is_refuted() {
            tally.contradictions.push(format!("{}: DN refuted", a.name()));
        }
        if let (State::Proved, Some(w)) = (dn.state, dn.witness.as_ref()) {
            let (p, tmpl) = (w.p.unwrap() as usize, w.r_template.unwrap());
            for q in 0..=ORACLE_Q {
                let r = tmpl.apply(q) as usize;
                if r <= ORACLE_R && p <= ORACLE_R {
                    tally.checked += 1;
                    let c = &cols[i];
                    let lr: Vec<f64> = (0..ORACLE_ROWS).map(|j| 2.0 * c[q as usize][j] - c[p][j] - c[r][j]).collect();
                    if !witness_holds(&lr, scale(&[&c[q as usize], &c[p], &c[r]]), &w.constant, q) {
                        tally.contradictions.push(format!("{}: DN witness fails at q = {q}", a.name()));
                    }
                }
            }
        }
    }
    let exit2: Vec<&str> = corpus
        .par_iter()
        .filter(|s| !probe_classification(s, classify(s).unwrap(), ORACLE_ROWS, 8).unwrap().is_consistent())
        .map(|s| s.name())
        .collect();
    for c in &tally.contradictions {
        println!("    contradiction: {c}");
    }
    outcome(
        tally.contradictions.is_empty() && exit2.is_empty() && corpus.len() >= 30,
        format!(
            "{} specs, verdicts proved/refuted/undecided = {}/{}/{}, {} grid checks ({} refutations visible only past J = 10^4), {} contradictions, {} exit-2 events {:?}",
            corpus.len(),
            states[0],
            states[1],
            states[2],
            tally.checked,
            tally.beyond_grid,
            tally.contradictions.len(),
            exit2.len(),
            exit2
        ),
    )
}

fn internal_consistency(corpus: &[KoetheMatrixSpec]) -> Outcome {
    let reports: Vec<_> = corpus.iter().map(|s| classify(s).unwrap()).collect();
    let decided: Vec<_> = reports.iter().filter(|r| r.norm_row_set.is_some() && r.dn_set.is_some()).collect();
    let bad: Vec<&str> = decided.iter().filter(|r| !r.consistency).map(|r| r.matrix.as_str()).collect();
    outcome(
        bad.is_empty() && !decided.is_empty(),
        format!("{} of {} specs fully decided, inconsistent: {:?}", decided.len(), corpus.len(), bad),
    )
}

fn quasi_equivalence() -> Outcome {
    let results: Vec<(bool, f64, usize)> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..=200);
            let p = planted_pair(n, 8, seed).unwrap();
            let m = match_profiles(&p.a, &p.b).unwrap();
            let lambdas = m.log_lambda.iter().zip(&p.plant.log_lambda).all(|(x, y)| (x - y).abs() <= 1e-9);
            let ok = p.plant.separation >= 1e-6 && m.sigma == p.plant.sigma && lambdas && m.distortion <= 1e-9;
            (ok, m.distortion, n)
        })
        .collect();
    let recovered = results.iter().filter(|r| r.0).count();
    let (a, b) = mityagin_pair(48, 8, 3).unwrap();
    let (_, d) = mityagin_pair(48, 8, 17).unwrap();
    let m1 = match_profiles(&a, &b).unwrap().distortion;
    let m2 = match_profiles(&b, &d).unwrap().distortion;
    outcome(
        recovered == 50 && m1 <= 0.1 && m2 <= 0.1,
        format!("planted recovery {recovered}/50 (n ≤ 200, Q = 8); orthonormal realizations of Λ_∞(j): distortion {m1:.3e}, {m2:.3e}"),
    )
}

fn normalized_profiles() -> Outcome {
    let worst: Vec<(f64, bool)> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let n = ChaCha8Rng::seed_from_u64(seed ^ 0xabc).random_range(1..=256);
            let fam = random_orthonormal_family(n, seed);
            let l2: Vec<f64> = fam.iter().map(|f| f.norm()).collect();
            let tab = profile(Family::Vectors(&fam), 8).unwrap();
            let w = square_witness(&normalize_profile(&tab, &l2).unwrap(), 1e-12);
            (w.min_entry, w.holds)
        })
        .collect();
    let min = worst.iter().map(|w| w.0).fold(f64::INFINITY, f64::min);
    let all = worst.iter().all(|w| w.1);
    outcome(min >= 1.0 - 1e-12 && all, format!("100 families, N ≤ 256, min entry {min:.15}, A ∼ A² witness holds: {all}"))
}

type Criterion<'a> = (u8, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let corpus = common::corpus();
    let criteria: Vec<Criterion> = vec![
        (1, "inf-convolution constants", Box::new(inf_convolution_constants)),
        (2, "dominating extension constant 49", Box::new(ladder_constant)),
        (3, "rank-one norm identity", Box::new(rank_one_identity)),
        (4, "classification of s", Box::new(classify_s)),
        (5, "counterexample detection", Box::new(counterexamples)),
        (6, "oracle equivalence", Box::new(|| oracle_equivalence(&corpus))),
        (7, "internal consistency", Box::new(|| internal_consistency(&corpus))),
        (8, "quasi-equivalence recovery", Box::new(quasi_equivalence)),
        (9, "normalized-profile law", Box::new(normalized_profiles)),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let o = f();
        println!("criterion {id} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
