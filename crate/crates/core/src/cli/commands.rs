use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::growth_dsl::{parse_file, parse_spec, KoetheMatrixSpec, Provenance, TabulatedMatrix};
use crate::matrix_calculus::{classify, probe_classification, probe_dn, sweep_nuclearity};
use crate::norm_lab::{dominating_extension, run_suite, NormLadder, SubspaceModel, SuiteConfig};
use crate::quasi_equiv::{match_profiles, planted_pair, power_series_profile};
use crate::smooth_ops::{block_householder_family, check_dominating_l2, profile, CVector, Family};

use super::{CliError, Command, ConstructKind, Limits, Outcome, RunConfig};

/// Largest truncation for which `construct --profile` builds dense vectors.
const PROFILE_LIMIT: usize = 4096;

pub(super) fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match &cfg.command {
        Command::Check { inputs } => check(inputs),
        Command::Classify { inputs } => classify_cmd(inputs, cfg.limits),
        Command::Probe { input } => probe(input, cfg.limits.unwrap_or_default()),
        Command::Construct { kind, alpha, truncate, grades, profile, n, blocks } => {
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let p = ConstructParams { alpha, truncate: *truncate, grades: *grades, profile: *profile, n: *n, blocks: *blocks };
            construct(*kind, &p, cfg.seed, &dir)
        }
        Command::Match { a, b } => {
            let m = match_profiles(&load_grid(a)?, &load_grid(b)?)?;
            Ok(Outcome { code: 0, report: serde_json::to_value(m)? })
        }
        Command::Normlab { model, models, samples } => normlab(model.as_deref(), *models, *samples, cfg.seed),
    }
}

enum Input {
    Specs(Vec<KoetheMatrixSpec>),
    Grid(TabulatedMatrix),
}

fn is_grid(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("csv" | "json"))
}

fn load(path: &Path) -> Result<Input, CliError> {
    let wrap = |source| CliError::Input { path: path.to_path_buf(), source };
    if is_grid(path) {
        return TabulatedMatrix::load(path).map(Input::Grid).map_err(wrap);
    }
    let text = std::fs::read_to_string(path).map_err(|e| wrap(e.into()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let specs = parse_file(&text)
        .and_then(|v| v.into_iter().map(|s| s.resolve_samples(base)).collect::<Result<Vec<_>, _>>())
        .map_err(wrap)?;
    Ok(Input::Specs(specs))
}

fn load_grid(path: &Path) -> Result<TabulatedMatrix, CliError> {
    TabulatedMatrix::load(path).map_err(|source| CliError::Input { path: path.to_path_buf(), source })
}

fn load_specs(path: &Path) -> Result<Vec<KoetheMatrixSpec>, CliError> {
    match load(path)? {
        Input::Specs(s) => Ok(s),
        Input::Grid(_) => Err(CliError::BadArgument(format!("{}: expected a matrix spec, found a grid", path.display()))),
    }
}

fn check(inputs: &[PathBuf]) -> Result<Outcome, CliError> {
    let mut out = Vec::new();
    for path in inputs {
        match load(path)? {
            Input::Specs(specs) => {
                for s in specs {
                    out.push(json!({
                        "input": path.display().to_string(),
                        "matrix": s.name(),
                        "basis": s.basis().iter().map(|b| b.label()).collect::<Vec<_>>(),
                        "canonical": s.to_string().trim_end(),
                        "koethe": s.validate_koethe(),
                    }));
                }
            }
            Input::Grid(t) => out.push(json!({
                "input": path.display().to_string(),
                "rows": t.rows(),
                "cols": t.cols(),
                "koethe": t.validate_koethe(),
            })),
        }
    }
    Ok(Outcome { code: 0, report: json!({ "command": "check", "results": out }) })
}

fn classify_cmd(inputs: &[PathBuf], limits: Option<Limits>) -> Result<Outcome, CliError> {
    let mut reports = Vec::new();
    let mut consistent = true;
    for path in inputs {
        for s in load_specs(path)? {
            let mut r = classify(&s)?;
            if let Some(l) = limits {
                r = probe_classification(&s, r, l.j, l.q)?;
            }
            consistent &= r.is_consistent();
            reports.push(r);
        }
    }
    Ok(Outcome {
        code: if consistent { 0 } else { 2 },
        report: json!({ "command": "classify", "probe": limits, "consistent": consistent, "reports": reports }),
    })
}

fn grid_probe(name: &str, tab: &TabulatedMatrix) -> Value {
    json!({
        "matrix": name,
        "rows": tab.rows(),
        "cols": tab.cols(),
        "koethe": tab.validate_koethe(),
        "nuclearity": sweep_nuclearity(tab),
        "dn": probe_dn(tab),
    })
}

fn probe(input: &Path, limits: Limits) -> Result<Outcome, CliError> {
    let mut results = Vec::new();
    let mut consistent = true;
    match load(input)? {
        Input::Grid(t) => {
            let t = t.truncate(limits.j, limits.q);
            results.push(grid_probe(&input.display().to_string(), &t));
        }
        Input::Specs(specs) => {
            for s in specs {
                let t = s.evaluate_grid(limits.j, limits.q)?;
                let mut v = grid_probe(s.name(), &t);
                let r = probe_classification(&s, classify(&s)?, limits.j, limits.q)?;
                consistent &= r.is_consistent();
                v["symbolic"] = serde_json::to_value(r)?;
                results.push(v);
            }
        }
    }
    Ok(Outcome {
        code: if consistent { 0 } else { 2 },
        report: json!({ "command": "probe", "probe": limits, "consistent": consistent, "results": results }),
    })
}

struct ConstructParams<'a> {
    alpha: &'a str,
    truncate: usize,
    grades: usize,
    profile: bool,
    n: usize,
    blocks: u32,
}

/// `α` as a DSL basis reference, or `None` for the tabulated `log log j`.
fn alpha_basis(alpha: &str) -> Result<Option<String>, CliError> {
    let a: String = alpha.split_whitespace().collect::<Vec<_>>().join(" ");
    match a.as_str() {
        "j" => Ok(Some("j".into())),
        "log j" | "log(j)" => Ok(Some("log(j)".into())),
        "log log j" | "log(log(j))" => Ok(None),
        _ => {
            let theta = a
                .strip_prefix("j^")
                .map(|t| t.trim_start_matches('(').trim_end_matches(')'))
                .ok_or_else(|| CliError::BadArgument(format!("unsupported alpha '{alpha}'")))?;
            Ok(Some(format!("j^({theta})")))
        }
    }
}

fn write_grid(dir: &Path, name: &str, tab: &TabulatedMatrix, files: &mut Vec<Value>) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&tab.to_log_json_value()?)? + "\n")?;
    files.push(json!({ "path": path.display().to_string(), "rows": tab.rows(), "cols": tab.cols(), "koethe": tab.validate_koethe() }));
    Ok(())
}

fn construct(kind: ConstructKind, p: &ConstructParams<'_>, seed: u64, dir: &Path) -> Result<Outcome, CliError> {
    if p.truncate == 0 || p.grades == 0 || p.n == 0 || p.blocks == 0 {
        return Err(CliError::BadArgument("limits must be positive".into()));
    }
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut extra = json!({});
    match kind {
        ConstructKind::PowerSeries => {
            let alpha: Vec<f64> = match alpha_basis(p.alpha)? {
                Some(basis) => {
                    let spec = parse_spec(&format!("matrix power_series {{ log_entry: q * {basis} }}"))?;
                    let path = dir.join("power_series.kothe");
                    std::fs::write(&path, spec.to_string())?;
                    files.push(json!({ "path": path.display().to_string(), "koethe": spec.validate_koethe() }));
                    let grid = spec.evaluate_grid(p.truncate, p.grades)?;
                    write_grid(dir, "power_series.json", &grid, &mut files)?;
                    (1..=p.truncate as u64).map(|j| spec.log_evaluate(j, 1)).collect::<Result<Vec<_>, _>>()?
                }
                None => {
                    let alpha: Vec<f64> = (1..=p.truncate).map(|j| (1.0 + (j as f64).ln()).ln()).collect();
                    let rows = alpha.iter().map(|a| (0..p.grades).map(|q| q as f64 * a).collect()).collect();
                    let grid = TabulatedMatrix::from_log_rows(rows, Provenance::EvaluatedFromSpec)?;
                    write_grid(dir, "power_series.json", &grid, &mut files)?;
                    alpha
                }
            };
            if p.profile {
                if p.truncate > PROFILE_LIMIT {
                    return Err(CliError::BadArgument(format!("--profile needs --truncate ≤ {PROFILE_LIMIT}")));
                }
                let units = unit_vectors(p.truncate);
                write_grid(dir, "power_series.profile.json", &power_series_profile(&units, &alpha, p.grades)?, &mut files)?;
            }
        }
        ConstructKind::CanonicalBasis => {
            let units = unit_vectors(p.n);
            write_grid(dir, "canonical_basis.profile.json", &profile(Family::Vectors(&units), p.grades)?, &mut files)?;
        }
        ConstructKind::BlockHouseholder => {
            let fam = block_householder_family(p.blocks, seed);
            let tab = profile(Family::Vectors(&fam), p.grades)?;
            let rep = check_dominating_l2(&tab, None, seed)?;
            write_grid(dir, "block_householder.profile.json", &tab, &mut files)?;
            extra = json!({ "dominating_l2": rep });
        }
        ConstructKind::PlantedPair => {
            let pair = planted_pair(p.n, p.grades, seed)?;
            write_grid(dir, "planted_a.json", &pair.a, &mut files)?;
            write_grid(dir, "planted_b.json", &pair.b, &mut files)?;
            let path = dir.join("plant.json");
            let plant = json!({
                "sigma": pair.plant.sigma.iter().map(|s| s + 1).collect::<Vec<_>>(),
                "log_lambda": pair.plant.log_lambda,
                "separation": pair.plant.separation,
            });
            std::fs::write(&path, serde_json::to_string_pretty(&plant)? + "\n")?;
            files.push(json!({ "path": path.display().to_string() }));
        }
    }
    let all_valid = files.iter().all(|f| f.get("koethe").is_none_or(|v| v["state"] != "refuted"));
    Ok(Outcome {
        code: if all_valid { 0 } else { 2 },
        report: json!({ "command": "construct", "kind": kind, "seed": seed, "files": files, "details": extra }),
    })
}

fn unit_vectors(n: usize) -> Vec<CVector> {
    (0..n)
        .map(|i| {
            let mut v = CVector::zeros(n);
            v[i] = 1.0.into();
            v
        })
        .collect()
}

fn normlab(model: Option<&Path>, models: usize, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    if let Some(path) = model {
        let (m, ladder) = SubspaceModel::from_json(&std::fs::read_to_string(path)?)?;
        let ladder = ladder.unwrap_or_else(|| NormLadder::power(4));
        let (_, rep) = dominating_extension(&m, &ladder, &ladder, samples, seed)?;
        return Ok(Outcome {
            code: if rep.holds { 0 } else { 2 },
            report: json!({ "command": "normlab", "model": path.display().to_string(), "dominating_extension": rep }),
        });
    }
    let cfg = SuiteConfig {
        lemma35_models: models,
        lemma35_samples: samples,
        ladder_models: models,
        ladder_samples: samples,
        seed,
        ..SuiteConfig::default()
    };
    let rep = run_suite(&cfg)?;
    Ok(Outcome { code: if rep.holds() { 0 } else { 2 }, report: json!({ "command": "normlab", "suite": rep }) })
}
