use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::model::{log_sum_exp, HilbertNorm, NormLadder, SubspaceModel};
use super::NormError;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;
/// Constant of the dominating-extension bound `‖x‖_U² ≤ 49‖x‖‖x‖_V`.
pub const DOMINATION_BOUND: f64 = 49.0;

fn check_dim(expected: usize, found: usize) -> Result<(), NormError> {
    if expected != found {
        return Err(NormError::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>, NormError> {
    m.clone().cholesky().map(|c| c.inverse()).ok_or(NormError::SingularGram)
}

/// `‖x‖_F² = inf_{z∈E} (‖z‖_E² + ‖x − z‖²)` with `‖·‖² = ‖·‖₁² + ‖·‖₂²`.
///
/// Requires `‖z‖_E ≤ ‖z‖₁` on `E`; a violation is reported with a vector of
/// `E` on which it fails.
pub fn inf_convolution_norm(
    model: &SubspaceModel,
    norm_e: &HilbertNorm,
    norm1: &HilbertNorm,
    norm2: &HilbertNorm,
) -> Result<HilbertNorm, NormError> {
    check_dim(model.dim(), norm1.dim())?;
    check_dim(model.dim(), norm2.dim())?;
    check_dominates_on_e(model, norm_e, norm1)?;
    inf_convolution_with(model, norm_e, &HilbertNorm::new(norm1.gram() + norm2.gram())?)
}

/// As [`inf_convolution_norm`], with the combined norm `‖·‖` given
/// directly; requires `‖z‖_E ≤ ‖z‖` on `E`.
pub fn inf_convolution_with(
    model: &SubspaceModel,
    norm_e: &HilbertNorm,
    norm: &HilbertNorm,
) -> Result<HilbertNorm, NormError> {
    check_dim(model.sub_dim(), norm_e.dim())?;
    check_dim(model.dim(), norm.dim())?;
    check_dominates_on_e(model, norm_e, norm)?;
    let u = model.subspace();
    let m = norm.gram();
    let mu = m * u;
    let s = norm_e.gram() + u.transpose() * &mu;
    let f = m - &mu * inverse(&s)? * mu.transpose();
    HilbertNorm::new((&f + f.transpose()) * 0.5)
}

fn check_dominates_on_e(model: &SubspaceModel, norm_e: &HilbertNorm, big: &HilbertNorm) -> Result<(), NormError> {
    if model.sub_dim() == 0 {
        return Ok(());
    }
    let d = big.restrict(model.subspace()) - norm_e.gram();
    let eig = SymmetricEigen::new((&d + d.transpose()) * 0.5);
    let (i, min) = eig.eigenvalues.argmin();
    let scale = norm_e.gram().amax().max(1.0);
    if min < -1e-10 * scale {
        let w = model.include(&eig.eigenvectors.column(i).into_owned());
        return Err(NormError::PreconditionViolated { deficit: -min, witness: w.iter().copied().collect() });
    }
    Ok(())
}

/// Gram in G-coordinates of `‖q x‖ := inf_{y∈E} ‖x − y‖`.
pub fn quotient_norm(model: &SubspaceModel, norm: &HilbertNorm) -> Result<HilbertNorm, NormError> {
    let c = model.complement();
    let g = quotient_gram(model, norm)?;
    HilbertNorm::new(c.transpose() * g * c)
}

/// Ambient Gram of `x ↦ inf_{y∈E} ‖x − y‖` (a seminorm vanishing on `E`).
fn quotient_gram(model: &SubspaceModel, norm: &HilbertNorm) -> Result<DMatrix<f64>, NormError> {
    let u = model.subspace();
    let f = norm.gram();
    if model.sub_dim() == 0 {
        return Ok(f.clone());
    }
    let fu = f * u;
    let a = u.transpose() * &fu;
    Ok(f - &fu * inverse(&a)? * fu.transpose())
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma35Report {
    pub samples: usize,
    /// Extremes of `‖x‖_E / ‖x‖_F` over sampled `x ∈ E`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Largest `‖q x‖_G / inf_{y∈E} ‖x − y‖_F` over sampled `x ∈ F`.
    pub quotient_ratio_max: f64,
}

/// Samples `x ∈ E` for `‖x‖_F ≤ ‖x‖_E ≤ √3‖x‖_F` and `x ∈ F` for
/// `‖q x‖_G ≤ inf_{y∈E} ‖x − y‖_F`; the first violation is an error
/// carrying the vector.
pub fn verify_lemma35(
    norm_f: &HilbertNorm,
    model: &SubspaceModel,
    norm_e: &HilbertNorm,
    norm_g: &HilbertNorm,
    samples: usize,
    seed: u64,
) -> Result<Lemma35Report, NormError> {
    check_dim(model.dim(), norm_f.dim())?;
    check_dim(model.sub_dim(), norm_e.dim())?;
    check_dim(model.quotient_dim(), norm_g.dim())?;
    const SLACK: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qf = HilbertNorm::new_unchecked(quotient_gram(model, norm_f)?);
    let mut rep = Lemma35Report { samples, ratio_min: f64::INFINITY, ratio_max: 0.0, quotient_ratio_max: 0.0 };
    for _ in 0..samples {
        if model.sub_dim() > 0 {
            let z = gaussian(model.sub_dim(), &mut rng);
            let x = model.include(&z);
            let (ne, nf) = (norm_e.norm(&z), norm_f.norm(&x));
            let ratio = ne / nf;
            if nf > ne * (1.0 + SLACK) {
                return Err(NormError::inequality("‖x‖_F ≤ ‖x‖_E", ratio, &x));
            }
            if ne > SQRT3 * nf * (1.0 + SLACK) {
                return Err(NormError::inequality("‖x‖_E ≤ √3‖x‖_F", ratio, &x));
            }
            rep.ratio_min = rep.ratio_min.min(ratio);
            rep.ratio_max = rep.ratio_max.max(ratio);
        }
        if model.quotient_dim() > 0 {
            let x = gaussian(model.dim(), &mut rng);
            let (lhs, rhs) = (norm_g.norm(&model.quotient(&x)), qf.norm(&x));
            // Both sides vanish on E; allow rounding at that scale.
            let floor = 1e-12 * x.norm() * norm_g.gram().amax().sqrt();
            if lhs > rhs * (1.0 + SLACK) + floor {
                return Err(NormError::inequality("‖q x‖_G ≤ inf ‖x − y‖_F", lhs / rhs, &x));
            }
            if rhs > floor {
                rep.quotient_ratio_max = rep.quotient_ratio_max.max(lhs / rhs);
            }
        }
    }
    Ok(rep)
}

/// Hilbert norm on `F` whose restriction to `E` is exactly `norm_e`:
/// `‖x‖² = ‖π x‖_E² + inf_{y∈E} ‖x − y‖_F²`, with `‖·‖_F` the
/// inf-convolution for `‖·‖₁² = ‖·‖_E² ⊕ |·|²` on `E ⊕ E^⊥`, `‖·‖₂ = |q·|`,
/// and `π` the `‖·‖_F`-orthogonal projection onto `E`.
pub fn extend_hilbert_norm(model: &SubspaceModel, norm_e: &HilbertNorm) -> Result<HilbertNorm, NormError> {
    check_dim(model.sub_dim(), norm_e.dim())?;
    let (u, c) = (model.subspace(), model.complement());
    let cc = c * c.transpose();
    // ‖·‖₁² + ‖·‖₂² with ‖·‖₂ = |q·| vanishing on E.
    let sum = HilbertNorm::new(u * norm_e.gram() * u.transpose() + &cc * 2.0)?;
    let norm_f = inf_convolution_with(model, norm_e, &sum)?;
    extend_with(model, norm_e, &norm_f)
}

/// The extension step for a given `‖·‖_F`.
pub fn extend_with(model: &SubspaceModel, norm_e: &HilbertNorm, norm_f: &HilbertNorm) -> Result<HilbertNorm, NormError> {
    check_dim(model.sub_dim(), norm_e.dim())?;
    check_dim(model.dim(), norm_f.dim())?;
    let u = model.subspace();
    let q = quotient_gram(model, norm_f)?;
    if model.sub_dim() == 0 {
        return HilbertNorm::new(q);
    }
    let f = norm_f.gram();
    let p = inverse(&(u.transpose() * f * u))? * u.transpose() * f;
    let g = p.transpose() * norm_e.gram() * &p + q;
    HilbertNorm::new((&g + g.transpose()) * 0.5)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    /// Level `U` of the ladder on `F`.
    pub u: usize,
    /// Paired level `V = 12·U` (interpolation exponents 1/3 then 1/4).
    pub v: usize,
    /// Largest observed `‖x‖_U² / (‖x‖·‖x‖_V)`.
    pub observed: f64,
    pub worst: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominatingExtensionReport {
    pub samples: usize,
    pub bound: f64,
    pub levels: Vec<LevelReport>,
    pub observed_max: f64,
    pub holds: bool,
    /// Largest `|‖x‖ − ‖x‖_E|/‖x‖_E` over sampled `x ∈ E`.
    pub restriction_error: f64,
}

/// Diagonal Gram of ladder level 0.
fn level_zero_gram(ladder: &NormLadder, dim: usize) -> Result<HilbertNorm, NormError> {
    let mut d = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut e = DVector::zeros(dim);
        e[j] = 1.0;
        d.push(ladder.norm(&e, 0)?.powi(2));
    }
    HilbertNorm::new(DMatrix::from_diagonal(&DVector::from_vec(d)))
}

/// Builds `‖x‖² = ‖x‖_ext² + ‖q x‖_{G,0}²` and checks
/// `‖x‖_U² ≤ 49·‖x‖·‖x‖_V` for each level `U < levels`, where the ladder on
/// `F` is `‖x‖_k² = ‖z‖_{E,k}² + ‖g‖_{G,k}²` for `x = U z + C g`.
pub fn dominating_extension(
    model: &SubspaceModel,
    ladder_e: &NormLadder,
    ladder_g: &NormLadder,
    samples: usize,
    seed: u64,
) -> Result<(HilbertNorm, DominatingExtensionReport), NormError> {
    let norm_e0 = level_zero_gram(ladder_e, model.sub_dim())?;
    let norm_g0 = level_zero_gram(ladder_g, model.quotient_dim())?;
    let ext = extend_hilbert_norm(model, &norm_e0)?;
    let c = model.complement();
    let norm = HilbertNorm::new(ext.gram() + c * norm_g0.gram() * c.transpose())?;

    let level_log = |x: &DVector<f64>, k: usize| -> Result<f64, NormError> {
        let z = model.subspace().transpose() * x;
        let g = model.quotient(x);
        let mut parts = Vec::new();
        if !z.is_empty() {
            parts.push(2.0 * ladder_e.log_norm(&z, k)?);
        }
        if !g.is_empty() {
            parts.push(2.0 * ladder_g.log_norm(&g, k)?);
        }
        Ok(0.5 * log_sum_exp(&parts))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<DVector<f64>> = (0..samples).map(|i| sample_vector(model.dim(), i % 2 == 1, &mut rng)).collect();
    let mut levels = Vec::new();
    let max_level = ladder_e.levels().min(ladder_g.levels()).max(1);
    for u in 0..max_level {
        let v = 12 * u;
        if !(ladder_e.has_level(v) && ladder_g.has_level(v)) {
            continue;
        }
        let mut rep = LevelReport { u, v, observed: 0.0, worst: vec![] };
        for x in &xs {
            let log_ratio = 2.0 * level_log(x, u)? - norm.norm(x).ln() - level_log(x, v)?;
            let r = log_ratio.exp();
            if r > rep.observed {
                rep.observed = r;
                rep.worst = x.iter().copied().collect();
            }
        }
        levels.push(rep);
    }
    let mut restriction_error: f64 = 0.0;
    for _ in 0..samples.min(1000) {
        if model.sub_dim() == 0 {
            break;
        }
        let z = gaussian(model.sub_dim(), &mut rng);
        let (a, b) = (norm.norm(&model.include(&z)), norm_e0.norm(&z));
        restriction_error = restriction_error.max((a - b).abs() / b);
    }
    let observed_max = levels.iter().map(|l| l.observed).fold(0.0, f64::max);
    let report = DominatingExtensionReport {
        samples,
        bound: DOMINATION_BOUND,
        holds: observed_max <= DOMINATION_BOUND * (1.0 + 1e-6),
        levels,
        observed_max,
        restriction_error,
    };
    Ok((norm, report))
}

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Gaussian, or Gaussian with log-uniform coordinate scales in `[e^−6, e^6]`
/// to reach vectors concentrated on few coordinates.
fn sample_vector(n: usize, spread: bool, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut x = gaussian(n, rng);
    if spread {
        for v in x.iter_mut() {
            *v *= rng.random_range(-6.0f64..6.0).exp();
        }
    }
    x
}

/// Seeded inputs for the inf-convolution lemma: random subspace, `‖·‖_E`,
/// `‖·‖₁ ≥ ‖·‖_E` on `E`, `‖·‖₂`, and `‖·‖_G` the quotient of `‖·‖₂`.
#[derive(Clone, Debug)]
pub struct Lemma35Instance {
    pub model: SubspaceModel,
    pub norm_e: HilbertNorm,
    pub norm1: HilbertNorm,
    pub norm2: HilbertNorm,
    pub norm_g: HilbertNorm,
}

impl Lemma35Instance {
    pub fn random(max_dim: usize, rng: &mut impl Rng) -> Result<Self, NormError> {
        let n = rng.random_range(2..=max_dim.max(2));
        let k = rng.random_range(1..=n);
        let model = random_model(n, k, rng)?;
        let u = model.subspace();
        let norm_e = random_gram(k, rng)?;
        let norm1 = HilbertNorm::new(u * norm_e.gram() * u.transpose() + random_gram(n, rng)?.gram())?;
        let norm2 = random_gram(n, rng)?;
        let norm_g = if model.quotient_dim() == 0 {
            HilbertNorm::euclidean(0)
        } else {
            quotient_norm(&model, &norm2)?
        };
        Ok(Lemma35Instance { model, norm_e, norm1, norm2, norm_g })
    }
}

/// Random `k`-dimensional subspace of `ℝ^n` (QR of a Gaussian matrix).
pub fn random_model(n: usize, k: usize, rng: &mut impl Rng) -> Result<SubspaceModel, NormError> {
    let a: DMatrix<f64> = DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(rng));
    let q = a.qr().q();
    SubspaceModel::new(q.columns(0, k).into_owned())
}

/// `A Aᵀ/n + I/10` for Gaussian `A`.
pub fn random_gram(n: usize, rng: &mut impl Rng) -> Result<HilbertNorm, NormError> {
    let a: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let g = &a * a.transpose() / n.max(1) as f64 + DMatrix::identity(n, n) * 0.1;
    HilbertNorm::new((&g + g.transpose()) * 0.5)
}
