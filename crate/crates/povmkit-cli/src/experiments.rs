//! The named experiment harnesses behind `povmkit experiment`.
//!
//! Each experiment resolves its configuration (CLI overrides on top of
//! per-experiment defaults), runs a fixed list of tasks, and emits one CSV
//! row per result plus a JSON record with the config echo and summary.
//! A row carries the seed and the substream index that regenerate it in
//! isolation; reruns with an identical config produce byte-identical CSV.
//!
//! Tasks may run on several workers; task i always draws from
//! `substream(i)` of the root stream and rows are sorted by task index
//! before writing, so output does not depend on the worker count.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use povmkit::designs::{binomial, design_defect, sym_projector, DesignSpec};
use povmkit::operator::{random_direction, HermitianOperator};
use povmkit::povm::ElementSet;
use povmkit::sparsify::{
    band_verdict, random_povm, sparsify_sub_povm, verify_equivalence, BandVerdict,
    LocalUniformNormRef, RatioReport, SparsifyBudget, UniformNormRef,
};
use povmkit::uniform::{
    estimate_uniform_norm, exact_second_moment, moment_growth_check, norm_2_1,
};
use povmkit::RngStream;

pub const EXPERIMENT_NAMES: &[&str] = &[
    "prop4-sandwich",
    "thm1-concentration",
    "thm3-local",
    "thm4-subpovm",
    "moment-identities",
    "design-check",
];

/// Fully resolved experiment configuration; echoed into the JSON record.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub n_sweep: Vec<usize>,
    pub budget: usize,
    pub epsilon: f64,
    pub samples: usize,
    pub directions: usize,
    pub trials: usize,
    pub multiplier: f64,
    pub workers: usize,
}

/// CLI-level overrides; `None` falls back to the experiment default.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub dims: Option<Vec<usize>>,
    pub n_sweep: Option<Vec<usize>>,
    pub budget: Option<usize>,
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
    pub directions: Option<usize>,
    pub trials: Option<usize>,
    pub multiplier: Option<f64>,
}

impl ExperimentConfig {
    pub fn resolve(
        name: &str,
        seed: u64,
        workers: usize,
        ov: &ConfigOverrides,
    ) -> Result<Self> {
        let mut config = match name {
            "prop4-sandwich" => Self {
                name: name.into(),
                seed,
                dims: vec![2, 4, 8, 16],
                n_sweep: vec![],
                budget: 0,
                epsilon: 0.0,
                samples: 100_000,
                directions: 0,
                trials: 50,
                multiplier: 40.0,
                workers,
            },
            "thm1-concentration" => Self {
                name: name.into(),
                seed,
                dims: vec![2],
                n_sweep: vec![],
                budget: 0,
                epsilon: 0.25,
                samples: 20_000,
                directions: 200,
                trials: 5,
                multiplier: 40.0,
                workers,
            },
            "thm3-local" => Self {
                name: name.into(),
                seed,
                dims: vec![2, 2],
                n_sweep: vec![],
                budget: 0,
                epsilon: 0.5,
                samples: 20_000,
                directions: 100,
                trials: 3,
                multiplier: 40.0,
                workers,
            },
            "thm4-subpovm" => Self {
                name: name.into(),
                seed,
                dims: vec![3],
                n_sweep: vec![600],
                budget: 180,
                epsilon: 0.2,
                samples: 0,
                directions: 500,
                trials: 1,
                multiplier: 40.0,
                workers,
            },
            "moment-identities" => Self {
                name: name.into(),
                seed,
                dims: vec![2, 3, 5],
                n_sweep: vec![],
                budget: 0,
                epsilon: 0.0,
                samples: 100_000,
                directions: 0,
                trials: 10,
                multiplier: 40.0,
                workers,
            },
            "design-check" => Self {
                name: name.into(),
                seed,
                dims: vec![],
                n_sweep: vec![],
                budget: 0,
                epsilon: 0.0,
                samples: 0,
                directions: 0,
                trials: 1,
                multiplier: 40.0,
                workers,
            },
            other => bail!(
                "unknown experiment {other:?}; expected one of {}",
                EXPERIMENT_NAMES.join(", ")
            ),
        };
        if let Some(dims) = &ov.dims {
            config.dims = dims.clone();
        }
        if let Some(sweep) = &ov.n_sweep {
            config.n_sweep = sweep.clone();
        }
        if let Some(b) = ov.budget {
            config.budget = b;
        }
        if let Some(e) = ov.epsilon {
            config.epsilon = e;
        }
        if let Some(s) = ov.samples {
            config.samples = s;
        }
        if let Some(d) = ov.directions {
            config.directions = d;
        }
        if let Some(t) = ov.trials {
            config.trials = t;
        }
        if let Some(m) = ov.multiplier {
            config.multiplier = m;
        }
        if config.name == "thm1-concentration" && config.n_sweep.is_empty() {
            let d = *config.dims.first().unwrap_or(&2);
            config.n_sweep = vec![4 * d * d, 16 * d * d, 64 * d * d];
        }
        Ok(config)
    }

    /// Outcome count per factor dimension when none is given explicitly:
    /// multiplier · ε⁻² · d².
    pub fn outcomes_for(&self, d: usize) -> usize {
        ((self.multiplier / (self.epsilon * self.epsilon)) * (d * d) as f64).round() as usize
    }
}

/// One CSV row: the task index orders output, values match the header.
#[derive(Debug, Clone)]
pub struct Row {
    pub task: usize,
    pub index: usize,
    pub values: Vec<String>,
}

pub struct ExperimentOutcome {
    pub header: Vec<&'static str>,
    pub rows: Vec<Row>,
    pub summary: serde_json::Value,
    /// Hard invariant violations; statistical inconclusives do not count.
    pub violations: usize,
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn verdict_name(v: BandVerdict) -> &'static str {
    match v {
        BandVerdict::Pass => "pass",
        BandVerdict::Fail => "fail",
        BandVerdict::Inconclusive => "inconclusive",
    }
}

/// Runs `f` over 0..tasks with a fixed substream per task, on `workers`
/// threads; results come back in task order regardless of scheduling.
fn run_tasks<R: Send>(
    tasks: usize,
    workers: usize,
    f: impl Fn(usize) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    if workers <= 1 || tasks <= 1 {
        return (0..tasks).map(f).collect();
    }
    let slots: Vec<Mutex<Option<Result<R>>>> = (0..tasks).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for w in 0..workers.min(tasks) {
            let f = &f;
            let slots = &slots;
            scope.spawn(move || {
                let mut i = w;
                while i < tasks {
                    let result = f(i);
                    *slots[i].lock().expect("poisoned slot") = Some(result);
                    i += workers;
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("poisoned slot").expect("task ran"))
        .collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    match config.name.as_str() {
        "prop4-sandwich" => prop4_sandwich(config),
        "thm1-concentration" => thm1_concentration(config),
        "thm3-local" => thm3_local(config),
        "thm4-subpovm" => thm4_subpovm(config),
        "moment-identities" => moment_identities(config),
        "design-check" => design_check(config),
        other => bail!("unknown experiment {other:?}"),
    }
}

/// Uniform-norm sandwich: for random directions Δ, the Monte Carlo
/// ‖Δ‖_U must lie in [‖Δ‖_{2(1)}/√18, ‖Δ‖_{2(1)}] up to 3 std errors.
fn prop4_sandwich(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let root = RngStream::from_seed(config.seed);
    let tasks: Vec<(usize, usize)> = config
        .dims
        .iter()
        .flat_map(|&d| (0..config.trials).map(move |r| (d, r)))
        .collect();
    let results = run_tasks(tasks.len(), config.workers, |i| {
        let (d, repeat) = tasks[i];
        let mut stream = root.substream(i as u64);
        let delta = random_direction(d, &mut stream);
        let upper = norm_2_1(&delta);
        let lower = upper / 18f64.sqrt();
        let est = estimate_uniform_norm(&delta, config.samples, &mut stream);
        let slack = 3.0 * est.std_error;
        let verdict = if est.value >= lower && est.value <= upper {
            BandVerdict::Pass
        } else if est.value < lower - slack || est.value > upper + slack {
            BandVerdict::Fail
        } else {
            BandVerdict::Inconclusive
        };
        Ok((d, repeat, lower, upper, est, verdict))
    })?;

    let mut rows = Vec::new();
    let mut violations = 0;
    let mut worst_ratio = f64::INFINITY;
    for (i, (d, repeat, lower, upper, est, verdict)) in results.iter().enumerate() {
        if *verdict == BandVerdict::Fail {
            violations += 1;
        }
        worst_ratio = worst_ratio.min(est.value / upper);
        rows.push(Row {
            task: i,
            index: 0,
            values: vec![
                config.seed.to_string(),
                i.to_string(),
                d.to_string(),
                repeat.to_string(),
                fmt(*lower),
                fmt(*upper),
                fmt(est.value),
                fmt(est.std_error),
                verdict_name(*verdict).into(),
            ],
        });
    }
    Ok(ExperimentOutcome {
        header: vec![
            "seed", "substream", "d", "repeat", "lower", "upper", "value", "stderr", "verdict",
        ],
        rows,
        summary: json!({
            "directions": tasks.len(),
            "hard_violations": violations,
            "worst_observed_ratio_to_upper": worst_ratio,
        }),
        violations,
    })
}

/// Concentration of the random POVM norm around the uniform norm: the
/// min/max ratio band over sampled directions, per outcome count n.
fn thm1_concentration(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let root = RngStream::from_seed(config.seed);
    let tasks: Vec<(usize, usize, usize)> = config
        .dims
        .iter()
        .flat_map(|&d| {
            config
                .n_sweep
                .iter()
                .flat_map(move |&n| (0..config.trials).map(move |t| (d, n, t)))
        })
        .collect();
    let results = run_tasks(tasks.len(), config.workers, |i| {
        let (d, n, _) = tasks[i];
        let mut stream = root.substream(i as u64);
        let m = random_povm(d, n, &mut stream)?;
        let reference = UniformNormRef {
            samples: config.samples,
        };
        let report = verify_equivalence(&m, &reference, config.directions, &mut stream)?;
        Ok(report)
    })?;

    let mut rows = Vec::new();
    for (i, report) in results.iter().enumerate() {
        let (d, n, trial) = tasks[i];
        let inconclusive = report.records.iter().filter(|r| !r.conclusive).count();
        rows.push(Row {
            task: i,
            index: 0,
            values: vec![
                config.seed.to_string(),
                i.to_string(),
                d.to_string(),
                n.to_string(),
                trial.to_string(),
                fmt(report.min_ratio),
                fmt(report.max_ratio),
                fmt(report.band_width()),
                inconclusive.to_string(),
            ],
        });
    }

    // Trend summary: per d, mean band width over trials for each n.
    let mut trend = Vec::new();
    let mut violations = 0;
    for &d in &config.dims {
        let mut widths = Vec::new();
        for &n in &config.n_sweep {
            let mut acc = 0.0;
            let mut count = 0;
            for (i, report) in results.iter().enumerate() {
                if tasks[i].0 == d && tasks[i].1 == n {
                    acc += report.band_width();
                    count += 1;
                }
            }
            widths.push(acc / count.max(1) as f64);
        }
        let monotone = widths.windows(2).all(|w| w[1] < w[0]);
        trend.push(json!({
            "d": d,
            "n_sweep": config.n_sweep,
            "mean_band_widths": widths,
            "strictly_decreasing": monotone,
        }));
    }
    for report in &results {
        if !report.min_ratio.is_finite() || !report.max_ratio.is_finite() {
            violations += 1;
        }
    }
    Ok(ExperimentOutcome {
        header: vec![
            "seed",
            "substream",
            "d",
            "n",
            "trial",
            "min_ratio",
            "max_ratio",
            "band_width",
            "inconclusive",
        ],
        rows,
        summary: json!({ "trend": trend }),
        violations,
    })
}

/// Local sparsification: per-factor random POVMs are verified against the
/// uniform norm, their tensor against the local uniform norm; the product
/// band must contain the tensor band up to 3 std errors per direction.
fn thm3_local(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let root = RngStream::from_seed(config.seed);
    let factor_ns: Vec<usize> = config.dims.iter().map(|&d| config.outcomes_for(d)).collect();

    struct TrialResult {
        factor_reports: Vec<RatioReport>,
        product_report: RatioReport,
        expected_lo: f64,
        expected_hi: f64,
        fails: usize,
    }

    let results = run_tasks(config.trials, config.workers, |t| {
        let mut stream = root.substream(t as u64);
        let mut factors = Vec::new();
        let mut factor_reports = Vec::new();
        let mut expected_lo = 1.0;
        let mut expected_hi = 1.0;
        for (k, (&d, &n)) in config.dims.iter().zip(&factor_ns).enumerate() {
            let mut factor_stream = stream.substream(1000 + k as u64);
            let m = random_povm(d, n, &mut factor_stream)?;
            let reference = UniformNormRef {
                samples: config.samples,
            };
            let report =
                verify_equivalence(&m, &reference, config.directions, &mut factor_stream)?;
            // Convert the observed factor band into the product prediction.
            expected_lo *= report.min_ratio.min(1.0);
            expected_hi *= report.max_ratio.max(1.0);
            factor_reports.push(report);
            factors.push(m);
        }
        let mut product = factors[0].clone();
        for m in &factors[1..] {
            product = product.tensor(m);
        }
        let reference = LocalUniformNormRef {
            dims: config.dims.clone(),
            samples: config.samples,
        };
        let product_report =
            verify_equivalence(&product, &reference, config.directions, &mut stream)?;
        let fails = product_report
            .records
            .iter()
            .filter(|r| band_verdict(r, expected_lo, expected_hi) == BandVerdict::Fail)
            .count();
        Ok(TrialResult {
            factor_reports,
            product_report,
            expected_lo,
            expected_hi,
            fails,
        })
    })?;

    let mut rows = Vec::new();
    let mut violations = 0;
    for (t, result) in results.iter().enumerate() {
        for (k, report) in result.factor_reports.iter().enumerate() {
            let inconclusive = report.records.iter().filter(|r| !r.conclusive).count();
            rows.push(Row {
                task: t,
                index: k,
                values: vec![
                    config.seed.to_string(),
                    t.to_string(),
                    "factor".into(),
                    k.to_string(),
                    config.dims[k].to_string(),
                    factor_ns[k].to_string(),
                    fmt(report.min_ratio),
                    fmt(report.max_ratio),
                    inconclusive.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            });
        }
        let inconclusive = result
            .product_report
            .records
            .iter()
            .filter(|r| !r.conclusive)
            .count();
        violations += result.fails;
        rows.push(Row {
            task: t,
            index: result.factor_reports.len(),
            values: vec![
                config.seed.to_string(),
                t.to_string(),
                "product".into(),
                String::new(),
                config.dims.iter().product::<usize>().to_string(),
                factor_ns.iter().product::<usize>().to_string(),
                fmt(result.product_report.min_ratio),
                fmt(result.product_report.max_ratio),
                inconclusive.to_string(),
                fmt(result.expected_lo),
                fmt(result.expected_hi),
                result.fails.to_string(),
            ],
        });
    }
    Ok(ExperimentOutcome {
        header: vec![
            "seed",
            "trial",
            "row",
            "factor",
            "d",
            "n",
            "min_ratio",
            "max_ratio",
            "inconclusive",
            "expected_lo",
            "expected_hi",
            "fails",
        ],
        rows,
        summary: json!({
            "factor_outcomes": factor_ns,
            "hard_violations": violations,
        }),
        violations,
    })
}

/// Sub-POVM sparsification certificate: the two-rescale importance sampler
/// applied to a random POVM, with per-direction ratio rows.
fn thm4_subpovm(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let d = *config.dims.first().unwrap_or(&3);
    let n = *config.n_sweep.first().unwrap_or(&600);
    let root = RngStream::from_seed(config.seed);

    let mut rows = Vec::new();
    let mut violations = 0;
    let mut summaries = Vec::new();
    for t in 0..config.trials {
        let mut stream = root.substream(t as u64);
        let m = random_povm(d, n, &mut stream)?;
        let budget = SparsifyBudget {
            target_outcomes: config.budget,
            epsilon: config.epsilon,
            direction_samples: config.directions,
        };
        let out = sparsify_sub_povm(&m, &budget, &mut stream)?;

        // Hard invariants: sub-POVM sum, one-sided bound, support condition.
        let mut sum = HermitianOperator::zeros(d);
        for e in out.sub_povm.elements() {
            sum = &sum + e;
        }
        let max_eig = *sum.eigenvalues().last().expect("nonempty");
        if max_eig > 1.0 + 1e-10 {
            violations += 1;
        }
        if out.report.max_ratio > 1.0 + 1e-10 {
            violations += 1;
        }
        for ((idx, lambda), e) in out.source.iter().zip(out.sub_povm.elements()) {
            if *lambda <= 0.0
                || (e - &m.elements()[*idx].scaled(*lambda)).operator_norm() > 1e-10
            {
                violations += 1;
            }
        }

        for r in &out.report.records {
            rows.push(Row {
                task: t,
                index: r.index,
                values: vec![
                    config.seed.to_string(),
                    t.to_string(),
                    r.index.to_string(),
                    r.substream.to_string(),
                    fmt(r.candidate_norm),
                    fmt(r.reference_value),
                    fmt(r.ratio),
                ],
            });
        }
        summaries.push(json!({
            "trial": t,
            "distinct_outcomes": out.sub_povm.n_outcomes(),
            "min_ratio": out.report.min_ratio,
            "max_ratio": out.report.max_ratio,
            "scale_subpovm": out.scale_subpovm,
            "scale_norm": out.scale_norm,
            "sum_max_eigenvalue": max_eig,
        }));
    }
    Ok(ExperimentOutcome {
        header: vec![
            "seed",
            "trial",
            "direction",
            "substream",
            "subpovm_norm",
            "povm_norm",
            "ratio",
        ],
        rows,
        summary: json!({ "trials": summaries, "hard_violations": violations }),
        violations,
    })
}

/// Moment identities: the exact second moment against Monte Carlo, and the
/// sub-exponential growth bound for higher moments.
fn moment_identities(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let root = RngStream::from_seed(config.seed);
    let q_max = 3usize;
    let tasks: Vec<(usize, usize)> = config
        .dims
        .iter()
        .flat_map(|&d| (0..config.trials).map(move |r| (d, r)))
        .collect();
    let results = run_tasks(tasks.len(), config.workers, |i| {
        let (d, _) = tasks[i];
        let mut stream = root.substream(i as u64);
        let delta = random_direction(d, &mut stream);
        let exact = exact_second_moment(&delta);
        let checks = moment_growth_check(&delta, q_max, config.samples, &mut stream);
        Ok((delta, exact, checks))
    })?;

    let mut rows = Vec::new();
    let mut violations = 0;
    for (i, (_, exact, checks)) in results.iter().enumerate() {
        let (d, repeat) = tasks[i];
        for check in checks {
            let verdict = if check.q == 1 {
                let dev = (check.moment_mean - exact).abs();
                if dev <= 3.0 * check.moment_std_error {
                    BandVerdict::Pass
                } else if dev <= 5.0 * check.moment_std_error {
                    BandVerdict::Inconclusive
                } else {
                    BandVerdict::Fail
                }
            } else if check.empirical_root <= check.bound {
                BandVerdict::Pass
            } else {
                BandVerdict::Fail
            };
            if verdict == BandVerdict::Fail {
                violations += 1;
            }
            rows.push(Row {
                task: i,
                index: check.q,
                values: vec![
                    config.seed.to_string(),
                    i.to_string(),
                    d.to_string(),
                    repeat.to_string(),
                    check.q.to_string(),
                    fmt(check.moment_mean),
                    fmt(check.moment_std_error),
                    fmt(if check.q == 1 { *exact } else { f64::NAN }),
                    fmt(check.empirical_root),
                    fmt(check.bound),
                    verdict_name(verdict).into(),
                ],
            });
        }
    }
    Ok(ExperimentOutcome {
        header: vec![
            "seed", "substream", "d", "repeat", "q", "moment", "stderr", "exact", "root",
            "bound", "verdict",
        ],
        rows,
        summary: json!({ "hard_violations": violations }),
        violations,
    })
}

/// Exact design checks: the qubit MUB 2-design, the single-atom defect pair,
/// and symmetric projector traces.
fn design_check(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let mut rows = Vec::new();
    let mut violations = 0;
    let push = |task: usize,
                    check: &str,
                    d: usize,
                    t: usize,
                    values: (f64, f64),
                    expected: (f64, f64),
                    tol: f64,
                    rows: &mut Vec<Row>,
                    violations: &mut usize| {
        let pass = (values.0 - expected.0).abs() <= tol && (values.1 - expected.1).abs() <= tol;
        if !pass {
            *violations += 1;
        }
        rows.push(Row {
            task,
            index: 0,
            values: vec![
                config.seed.to_string(),
                "0".into(),
                check.into(),
                d.to_string(),
                t.to_string(),
                fmt(values.0),
                fmt(values.1),
                fmt(expected.0),
                fmt(expected.1),
                if pass { "pass".into() } else { "fail".into() },
            ],
        });
    };

    let mub = DesignSpec::mub_qubit();
    let defect = design_defect(&mub)?;
    push(
        0,
        "mub-2-design",
        2,
        2,
        defect,
        (0.0, 0.0),
        1e-9,
        &mut rows,
        &mut violations,
    );

    let single = DesignSpec::new(
        2,
        2,
        vec![(1.0, povmkit::operator::PureState::basis_vector(2, 0))],
    )?;
    let defect = design_defect(&single)?;
    push(
        1,
        "single-atom",
        2,
        2,
        defect,
        (1.0, 2.0),
        1e-9,
        &mut rows,
        &mut violations,
    );

    let mut task = 2;
    for d in 1..=4usize {
        for t in 1..=3usize {
            let p = sym_projector(d, t)?;
            let expected = binomial(d + t - 1, t) as f64;
            push(
                task,
                "sym-trace",
                d,
                t,
                (p.trace(), 0.0),
                (expected, 0.0),
                1e-8,
                &mut rows,
                &mut violations,
            );
            task += 1;
        }
    }

    Ok(ExperimentOutcome {
        header: vec![
            "seed",
            "substream",
            "check",
            "d",
            "t",
            "value_lo",
            "value_hi",
            "expected_lo",
            "expected_hi",
            "verdict",
        ],
        rows,
        summary: json!({ "hard_violations": violations }),
        violations,
    })
}

/// Writes `<out>/<name>.csv` and `<out>/<name>.json`, returns the violation
/// count for the exit code.
pub fn write_outputs(
    config: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    out_dir: &Path,
    duration_ms: u128,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let mut rows = outcome.rows.clone();
    rows.sort_by_key(|r| (r.task, r.index));

    let csv_path = out_dir.join(format!("{}.csv", config.name));
    let mut csv = String::new();
    csv.push_str("experiment,");
    csv.push_str(&outcome.header.join(","));
    csv.push('\n');
    for row in &rows {
        csv.push_str(&config.name);
        for v in &row.values {
            csv.push(',');
            csv.push_str(v);
        }
        csv.push('\n');
    }
    fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;

    let json_rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let mut map = serde_json::Map::new();
            for (key, value) in outcome.header.iter().zip(&row.values) {
                map.insert((*key).into(), json!(value));
            }
            serde_json::Value::Object(map)
        })
        .collect();
    let record = json!({
        "config": config,
        "summary": outcome.summary,
        "rows": json_rows,
        "duration_ms": duration_ms,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let json_path = out_dir.join(format!("{}.json", config.name));
    fs::write(&json_path, serde_json::to_string_pretty(&record)?)
        .with_context(|| format!("writing {}", json_path.display()))?;
    Ok((csv_path, json_path))
}

pub fn run_and_write(config: &ExperimentConfig, out_dir: &Path) -> Result<usize> {
    let start = Instant::now();
    let outcome = run_experiment(config)?;
    let duration_ms = start.elapsed().as_millis();
    let (csv_path, json_path) = write_outputs(config, &outcome, out_dir, duration_ms)?;
    eprintln!(
        "{}: {} rows, {} hard violations, {} ms",
        config.name,
        outcome.rows.len(),
        outcome.violations,
        duration_ms
    );
    eprintln!("  wrote {}", csv_path.display());
    eprintln!("  wrote {}", json_path.display());
    Ok(outcome.violations)
}
