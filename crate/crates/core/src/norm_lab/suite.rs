use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lemmas::{dominating_extension, inf_convolution_norm, random_model, verify_lemma35, Lemma35Instance};
use super::model::NormLadder;
use super::NormError;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub lemma35_models: usize,
    pub lemma35_samples: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub quotient_ratio_max: f64,
    pub ladder_models: usize,
    pub ladder_samples: usize,
    pub ladder_observed_max: f64,
    pub ladder_bound: f64,
    pub restriction_error_max: f64,
    /// First failure, if any; the suite stops there.
    pub violation: Option<String>,
}

impl SuiteReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub lemma35_models: usize,
    pub lemma35_samples: usize,
    pub lemma35_max_dim: usize,
    pub ladder_models: usize,
    pub ladder_samples: usize,
    pub ladder_max_dim: usize,
    pub ladder_max_levels: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            lemma35_models: 1000,
            lemma35_samples: 1000,
            lemma35_max_dim: 20,
            ladder_models: 100,
            ladder_samples: 2000,
            ladder_max_dim: 32,
            ladder_max_levels: 6,
            seed: 0,
        }
    }
}

/// Random instances of both norm lemmas. Instance `i` draws from the stream
/// seeded by `seed` and samples with seed `seed ^ (i + 1) << 32`, so
/// instance and sample streams never coincide.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, NormError> {
    let mut rep = SuiteReport {
        seed: cfg.seed,
        lemma35_models: 0,
        lemma35_samples: cfg.lemma35_samples,
        ratio_min: f64::INFINITY,
        ratio_max: 0.0,
        quotient_ratio_max: 0.0,
        ladder_models: 0,
        ladder_samples: cfg.ladder_samples,
        ladder_observed_max: 0.0,
        ladder_bound: super::DOMINATION_BOUND,
        restriction_error_max: 0.0,
        violation: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sample_seed = |i: usize| cfg.seed ^ ((i as u64 + 1) << 32);
    for i in 0..cfg.lemma35_models {
        let inst = Lemma35Instance::random(cfg.lemma35_max_dim, &mut rng)?;
        let f = inf_convolution_norm(&inst.model, &inst.norm_e, &inst.norm1, &inst.norm2)?;
        rep.lemma35_models += 1;
        match verify_lemma35(&f, &inst.model, &inst.norm_e, &inst.norm_g, cfg.lemma35_samples, sample_seed(i)) {
            Ok(r) => {
                rep.ratio_min = rep.ratio_min.min(r.ratio_min);
                rep.ratio_max = rep.ratio_max.max(r.ratio_max);
                rep.quotient_ratio_max = rep.quotient_ratio_max.max(r.quotient_ratio_max);
            }
            Err(e @ NormError::InequalityViolated { .. }) => {
                rep.violation = Some(format!("inf-convolution model {i}: {e}"));
                return Ok(rep);
            }
            Err(e) => return Err(e),
        }
    }
    for i in 0..cfg.ladder_models {
        let n = rng.random_range(2..=cfg.ladder_max_dim.max(2));
        let k = rng.random_range(1..n);
        let levels = rng.random_range(1..=cfg.ladder_max_levels.max(1));
        let model = random_model(n, k, &mut rng)?;
        let ladder = NormLadder::power(levels);
        let (_, r) = dominating_extension(&model, &ladder, &ladder, cfg.ladder_samples, sample_seed(i))?;
        rep.ladder_models += 1;
        rep.ladder_observed_max = rep.ladder_observed_max.max(r.observed_max);
        rep.restriction_error_max = rep.restriction_error_max.max(r.restriction_error);
        if !r.holds {
            rep.violation = Some(format!("ladder model {i}: observed {} > {}", r.observed_max, r.bound));
            return Ok(rep);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_holds() {
        let cfg = SuiteConfig {
            lemma35_models: 30,
            lemma35_samples: 50,
            ladder_models: 5,
            ladder_samples: 100,
            ladder_max_dim: 10,
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.holds(), "{:?}", r.violation);
        assert!(r.ratio_min >= 1.0 - 1e-9 && r.ratio_max <= crate::norm_lab::SQRT3 * (1.0 + 1e-9));
        assert_eq!((r.lemma35_models, r.ladder_models), (30, 5));
    }
}
