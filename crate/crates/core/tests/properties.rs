mod common;

use common::fragment_spec;
use koethe_lab::growth_dsl::{parse_spec, Provenance, TabulatedMatrix};
use koethe_lab::matrix_calculus::{
    classify, dominated_by, equivalent, is_sqrt_closed, verify_domination_template,
};
use koethe_lab::{AffineTemplate, State};
use proptest::prelude::*;

mod growth_dsl {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn print_parse_round_trip(spec in fragment_spec()) {
            let back = parse_spec(&spec.to_string()).unwrap();
            prop_assert_eq!(back, spec);
        }

        #[test]
        fn square_squares_entries(spec in fragment_spec(), j in 1u64..5000, q in 0u64..12) {
            let a = spec.log_evaluate(j, q).unwrap();
            let b = spec.square().log_evaluate(j, q).unwrap();
            prop_assert!((b - 2.0 * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }

        #[test]
        fn symbolic_koethe_has_no_grid_violation(spec in fragment_spec(), rows in 1usize..2000, cols in 1usize..=16) {
            if spec.validate_koethe().state == State::Proved {
                let g = spec.evaluate_grid(rows, cols).unwrap();
                prop_assert!(g.validate_koethe().state != State::Refuted);
            }
        }
    }

    #[test]
    fn symbolic_koethe_full_grid() {
        for spec in common::corpus() {
            assert_eq!(spec.validate_koethe().state, State::Proved, "{}", spec.name());
            assert!(spec.evaluate_grid(10_000, 16).unwrap().is_column_monotone(), "{}", spec.name());
        }
    }
}

mod matrix_calculus {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn domination_is_reflexive(a in fragment_spec()) {
            let v = dominated_by(&a, &a).unwrap();
            prop_assert!(v.is_proved());
            prop_assert!(verify_domination_template(&a, &a, AffineTemplate::IDENTITY).unwrap());
        }

        #[test]
        fn domination_is_transitive(a in fragment_spec(), b in fragment_spec(), c in fragment_spec()) {
            let (ab, bc) = (dominated_by(&a, &b).unwrap(), dominated_by(&b, &c).unwrap());
            if ab.is_proved() && bc.is_proved() {
                let t1 = ab.witness.unwrap().r_template.unwrap();
                let t2 = bc.witness.unwrap().r_template.unwrap();
                prop_assert!(verify_domination_template(&a, &c, t2.compose(&t1)).unwrap());
                prop_assert!(!dominated_by(&a, &c).unwrap().is_refuted());
            }
        }

        #[test]
        fn equivalence_is_symmetric(a in fragment_spec(), b in fragment_spec()) {
            prop_assert_eq!(equivalent(&a, &b).unwrap().state, equivalent(&b, &a).unwrap().state);
        }

        #[test]
        fn sqrt_closed_means_square_dominated(a in fragment_spec()) {
            let v = is_sqrt_closed(&a).unwrap();
            if v.is_proved() {
                let d = dominated_by(&a.square(), &a).unwrap();
                prop_assert!(d.is_proved());
                let t = v.witness.unwrap().r_template.unwrap();
                prop_assert!(verify_domination_template(&a.square(), &a, t).unwrap());
            }
        }

        #[test]
        fn classification_is_consistent(a in fragment_spec()) {
            prop_assert!(classify(&a).unwrap().consistency);
        }
    }
}

mod smooth_ops {
    use koethe_lab::quasi_equiv::random_orthonormal_family;
    use koethe_lab::smooth_ops::{profile, rank_one, CVector, Family, FiniteOperator, GradedNormSystem, ProjectionFamily};
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    use super::*;

    fn cvec(re: &[f64], im: &[f64]) -> CVector {
        CVector::from_iterator(re.len(), re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn grade_zero_is_l2_operator_norm(n in 1usize..12, vals in proptest::collection::vec(-3.0f64..3.0, 288)) {
            let m = DMatrix::from_fn(n, n, |r, c| Complex64::new(vals[2 * (r * n + c)], vals[2 * (r * n + c) + 1]));
            let x = FiniteOperator::new(m.clone()).unwrap();
            let got = GradedNormSystem::new(n, 1).operator_norm(&x, 0).unwrap();
            let want = m.singular_values().max();
            prop_assert!((got - want).abs() <= 1e-10 * want.max(1e-300));
        }

        #[test]
        fn rank_one_identity(n in 1usize..200, seed in any::<u64>(), q in 0usize..6) {
            let f = &random_orthonormal_family(n, seed)[0];
            let g = GradedNormSystem::new(n, 6);
            let v = g.vector_norm(f, q).unwrap().powi(2);
            let o = g.operator_norm(&rank_one(f).unwrap(), q).unwrap();
            prop_assert!((o - v).abs() <= 1e-9 * v);
        }

        #[test]
        fn orthonormal_profiles(n in 2usize..40, seed in any::<u64>()) {
            let fam = random_orthonormal_family(n, seed);
            let proj = ProjectionFamily::from_orthonormal(&fam, 1e-10).unwrap();
            let pv = profile(Family::Vectors(&fam), 5).unwrap();
            let pp = profile(Family::Projections(&proj), 5).unwrap();
            for j in 0..n {
                for q in 0..5 {
                    prop_assert!((pp.log_entry(j, q) - 2.0 * pv.log_entry(j, q)).abs() <= 1e-9);
                    prop_assert!(pv.entry(j, q) >= 1.0 - 1e-12);
                }
            }
        }

        #[test]
        fn vector_norm_is_weighted_l2(re in proptest::collection::vec(-1.0f64..1.0, 1..20), q in 0usize..4) {
            let im = vec![0.5; re.len()];
            let v = cvec(&re, &im);
            let g = GradedNormSystem::new(re.len(), 4);
            let want: f64 = v.iter().enumerate().map(|(i, z)| z.norm_sqr() * ((i + 1) as f64).powi(2 * q as i32)).sum::<f64>().sqrt();
            prop_assert!((g.vector_norm(&v, q).unwrap() - want).abs() <= 1e-12 * want);
        }
    }
}

mod norm_lab {
    use koethe_lab::norm_lab::{
        dominating_extension, extend_hilbert_norm, inf_convolution_norm, random_gram, random_model, HilbertNorm,
        Lemma35Instance, NormLadder, SQRT3,
    };
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;

    fn gauss(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
        DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn inf_convolution_bounds_and_parallelogram(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = Lemma35Instance::random(12, &mut rng).unwrap();
            let f = inf_convolution_norm(&inst.model, &inst.norm_e, &inst.norm1, &inst.norm2).unwrap();
            for _ in 0..50 {
                let (x, y) = (gauss(f.dim(), &mut rng), gauss(f.dim(), &mut rng));
                prop_assert!(f.parallelogram_residual(&x, &y) <= 1e-10);
                let z = gauss(inst.model.sub_dim(), &mut rng);
                let ratio = f.norm(&inst.model.include(&z)) / inst.norm_e.norm(&z);
                prop_assert!((1.0 / SQRT3 - 1e-9..=1.0 + 1e-9).contains(&ratio), "{}", ratio);
            }
        }

        #[test]
        fn inf_convolution_is_monotone_in_norm2(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = Lemma35Instance::random(10, &mut rng).unwrap();
            let extra = random_gram(inst.model.dim(), &mut rng).unwrap();
            let bigger = HilbertNorm::new(inst.norm2.gram() + extra.gram()).unwrap();
            let f = inf_convolution_norm(&inst.model, &inst.norm_e, &inst.norm1, &inst.norm2).unwrap();
            let g = inf_convolution_norm(&inst.model, &inst.norm_e, &inst.norm1, &bigger).unwrap();
            for _ in 0..50 {
                let x = gauss(f.dim(), &mut rng);
                prop_assert!(g.norm(&x) >= f.norm(&x) * (1.0 - 1e-10));
            }
        }

        #[test]
        fn extension_restricts_exactly(seed in any::<u64>(), n in 2usize..14) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = 1 + (seed as usize) % (n - 1);
            let model = random_model(n, k, &mut rng).unwrap();
            let e = random_gram(k, &mut rng).unwrap();
            let ext = extend_hilbert_norm(&model, &e).unwrap();
            for _ in 0..20 {
                let z = gauss(k, &mut rng);
                let (a, b) = (ext.norm(&model.include(&z)), e.norm(&z));
                prop_assert!((a - b).abs() <= 1e-10 * b);
            }
        }

        #[test]
        fn ladder_is_log_convex(vals in proptest::collection::vec(-5.0f64..5.0, 1..30), k in 1usize..8) {
            let x = DVector::from_vec(vals);
            prop_assume!(x.norm() > 0.0);
            let l = NormLadder::power(10);
            let (a, b, c) = (l.log_norm(&x, k - 1).unwrap(), l.log_norm(&x, k).unwrap(), l.log_norm(&x, k + 1).unwrap());
            prop_assert!(2.0 * b <= a + c + 1e-12 * (1.0 + b.abs()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn dominating_extension_within_49(seed in any::<u64>(), n in 2usize..16, levels in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = 1 + (seed as usize) % (n - 1);
            let model = random_model(n, k, &mut rng).unwrap();
            let ladder = NormLadder::power(levels);
            let (_, rep) = dominating_extension(&model, &ladder, &ladder, 200, seed ^ 1).unwrap();
            prop_assert!(rep.holds && rep.observed_max <= 49.0);
            prop_assert!(rep.restriction_error <= 1e-10);
        }
    }
}

mod quasi_equiv {
    use koethe_lab::quasi_equiv::{
        match_profiles, normalize_profile, planted_pair, random_orthonormal_family, square_witness,
        verify_quasi_equivalence,
    };
    use koethe_lab::smooth_ops::{profile, Family};

    use super::*;

    fn grid(rows: Vec<Vec<f64>>) -> TabulatedMatrix {
        TabulatedMatrix::from_log_rows(rows, Provenance::ExternalFile).unwrap()
    }

    fn log_grid() -> impl Strategy<Value = TabulatedMatrix> {
        (1usize..12, 1usize..6).prop_flat_map(|(n, q)| {
            proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, q), n).prop_map(grid)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn self_match_is_free(a in log_grid()) {
            let m = match_profiles(&a, &a).unwrap();
            prop_assert_eq!(m.distortion, 0.0);
            for (j, &k) in m.sigma.iter().enumerate() {
                prop_assert_eq!(a.log_row(j), a.log_row(k));
            }
        }

        #[test]
        fn distortion_is_symmetric((a, b) in (1usize..10, 1usize..5).prop_flat_map(|(n, q)| {
            let g = proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, q), n).prop_map(grid);
            (g.clone(), g)
        })) {
            let (x, y) = (match_profiles(&a, &b).unwrap(), match_profiles(&b, &a).unwrap());
            prop_assert!((x.distortion - y.distortion).abs() <= 1e-12);
            prop_assert!(verify_quasi_equivalence(&a, &b, &x.sigma, &x.log_lambda, x.distortion.exp()).unwrap());
        }

        #[test]
        fn planted_round_trip(n in 1usize..60, q in 1usize..9, seed in any::<u64>()) {
            let p = planted_pair(n, q, seed).unwrap();
            prop_assume!(p.plant.separation >= 1e-6);
            let m = match_profiles(&p.a, &p.b).unwrap();
            prop_assert!(verify_quasi_equivalence(&p.a, &p.b, &m.sigma, &m.log_lambda, m.distortion.exp() + 1e-9).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn normalized_profiles_square_equivalent(n in 1usize..64, seed in any::<u64>()) {
            let fam = random_orthonormal_family(n, seed);
            let tab = profile(Family::Vectors(&fam), 8).unwrap();
            let norm = normalize_profile(&tab, &vec![1.0; n]).unwrap();
            let w = square_witness(&norm, 1e-12);
            prop_assert!(w.min_entry >= 1.0 - 1e-12);
            prop_assert!(w.holds, "{:?}", w);
        }
    }
}
