//! File-oriented subcommands: validate, norm, random-povm, sparsify,
//! tensor, design-check.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use povmkit::designs::{design_defect, DesignSpec};
use povmkit::operator::HermitianOperator;
use povmkit::povm::{
    dist_norm, povm_defects, DiscretePovm, ElementSet, POVM_COMPLETENESS_TOL,
    POVM_PSD_TOL, SUBPOVM_SUM_TOL,
};
use povmkit::sparsify::{sparsify_sub_povm, SparsifyBudget};
use povmkit::uniform::{estimate_local_uniform_norm, estimate_uniform_norm, norm_2_1, norm_2_k};
use povmkit::zonoid::SymmetricZonotope;
use povmkit::RngStream;

fn read_json(path: &Path) -> Result<Value> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    // serde_json errors carry line/column context.
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse<T: serde::de::DeserializeOwned>(value: Value, what: &str) -> Result<T> {
    serde_json::from_value(value).with_context(|| format!("decoding {what}"))
}

/// Prints one line per invariant with the measured defect; returns the
/// number of failed checks.
pub fn cmd_validate(path: &Path) -> Result<usize> {
    let value = read_json(path)?;
    let mut failures = 0;
    let mut check = |name: &str, pass: bool, detail: String| {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("  [{tag}] {name:<28} {detail}");
        if !pass {
            failures += 1;
        }
    };

    if let Some(kind) = value.get("kind").and_then(Value::as_str) {
        // A POVM or sub-POVM file; decode the elements leniently so defects
        // of invalid families are still reported.
        let d = value
            .get("d")
            .and_then(Value::as_u64)
            .context("missing field \"d\"")? as usize;
        let elements: Vec<HermitianOperator> =
            parse(value.get("elements").cloned().context("missing field \"elements\"")?,
                  "POVM elements")?;
        println!(
            "{}: kind {kind}, d = {d}, {} elements",
            path.display(),
            elements.len()
        );
        for (i, e) in elements.iter().enumerate() {
            if e.dim() != d {
                bail!("element {i} has dimension {} but the file declares d = {d}", e.dim());
            }
        }
        let defects = povm_defects(&elements)?;
        check(
            "elements PSD",
            defects.min_element_eigenvalue >= -POVM_PSD_TOL,
            format!(
                "min eigenvalue {:.3e} (element {}), tolerance -1e-10",
                defects.min_element_eigenvalue, defects.worst_element
            ),
        );
        match kind {
            "povm" => check(
                "sum equals identity",
                defects.completeness_defect <= POVM_COMPLETENESS_TOL,
                format!(
                    "‖ΣM − Id‖∞ = {:.3e}, tolerance 1e-9",
                    defects.completeness_defect
                ),
            ),
            "subpovm" => check(
                "sum below identity",
                defects.sum_max_eigenvalue <= 1.0 + SUBPOVM_SUM_TOL,
                format!(
                    "λmax(ΣM) = {:.10}, tolerance 1 + 1e-9",
                    defects.sum_max_eigenvalue
                ),
            ),
            other => bail!("unknown kind {other:?}"),
        }
    } else if value.get("atoms").is_some() {
        let spec: DesignSpec = parse(value, "design file")?;
        println!(
            "{}: design, d = {}, t = {}, {} atoms",
            path.display(),
            spec.dim(),
            spec.order(),
            spec.atoms().len()
        );
        let (lo, hi) = design_defect(&spec)?;
        check(
            "approximate-design defect",
            lo <= 1e-9 && hi <= 1e-9,
            format!("(ε_lower, ε_upper) = ({lo:.3e}, {hi:.3e}), exact within 1e-9"),
        );
    } else if value.get("gens").is_some() {
        let z: SymmetricZonotope = parse(value, "zonotope file")?;
        println!(
            "{}: zonotope, ambient dimension {}, {} generators",
            path.display(),
            z.ambient_dim(),
            z.generators().len()
        );
        let tiny = z.tiny_generators();
        check(
            "generators nondegenerate",
            true,
            if tiny.is_empty() {
                "no generators below 1e-14".into()
            } else {
                format!("{} tiny generators retained: {tiny:?}", tiny.len())
            },
        );
    } else {
        bail!("unrecognized file: expected a POVM, sub-POVM, design, or zonotope JSON");
    }
    Ok(failures)
}

pub struct NormArgs<'a> {
    pub delta_path: &'a Path,
    pub povm_path: Option<&'a Path>,
    pub dims: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub seed: u64,
}

/// Evaluates the requested norms of one Hermitian operator and prints a
/// JSON object.
pub fn cmd_norm(args: &NormArgs) -> Result<()> {
    let delta: HermitianOperator = parse(read_json(args.delta_path)?, "operator file")?;
    let mut out = serde_json::Map::new();
    out.insert("d".into(), json!(delta.dim()));
    out.insert("trace_norm".into(), json!(delta.trace_norm()));
    out.insert("hs_norm".into(), json!(delta.hs_norm()));
    out.insert("operator_norm".into(), json!(delta.operator_norm()));
    out.insert("norm_2_1".into(), json!(norm_2_1(&delta)));

    if let Some(dims) = &args.dims {
        out.insert("dims".into(), json!(dims));
        out.insert("norm_2_k".into(), json!(norm_2_k(&delta, dims)?));
    }
    if let Some(path) = args.povm_path {
        let m: DiscretePovm = parse(read_json(path)?, "POVM file")?;
        out.insert("dist_norm".into(), json!(dist_norm(&m, &delta)?));
    }
    if let Some(samples) = args.samples {
        let rng = RngStream::from_seed(args.seed);
        let est = estimate_uniform_norm(&delta, samples, &mut rng.substream(0));
        out.insert("uniform".into(), serde_json::to_value(est)?);
        if let Some(dims) = &args.dims {
            let est =
                estimate_local_uniform_norm(&delta, dims, samples, &mut rng.substream(1))?;
            out.insert("local_uniform".into(), serde_json::to_value(est)?);
        }
    }
    println!("{}", serde_json::to_string_pretty(&Value::Object(out))?);
    Ok(())
}

fn write_or_print<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string(value)?;
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn cmd_random_povm(d: usize, n: usize, seed: u64, out: Option<&Path>) -> Result<()> {
    let mut rng = RngStream::from_seed(seed);
    let m = povmkit::sparsify::random_povm(d, n, &mut rng)?;
    let defects = povm_defects(m.elements())?;
    eprintln!(
        "random POVM: d = {d}, n = {n}, ‖ΣM − Id‖∞ = {:.3e}, informationally complete: {}",
        defects.completeness_defect,
        povmkit::povm::is_informationally_complete(&m)
    );
    write_or_print(&m, out)
}

pub struct SparsifyArgs<'a> {
    pub povm_path: &'a Path,
    pub budget: usize,
    pub epsilon: f64,
    pub directions: usize,
    pub seed: u64,
    pub out: Option<&'a Path>,
    pub report: Option<&'a Path>,
}

pub fn cmd_sparsify(args: &SparsifyArgs) -> Result<()> {
    let m: DiscretePovm = parse(read_json(args.povm_path)?, "POVM file")?;
    let budget = SparsifyBudget {
        target_outcomes: args.budget,
        epsilon: args.epsilon,
        direction_samples: args.directions,
    };
    let mut rng = RngStream::from_seed(args.seed);
    let out = sparsify_sub_povm(&m, &budget, &mut rng)?;
    eprintln!(
        "sparsified {} → {} outcomes; ratios [{:.4}, {:.4}] on {} directions; rescales {:.6} · {:.6}",
        m.n_outcomes(),
        out.sub_povm.n_outcomes(),
        out.report.min_ratio,
        out.report.max_ratio,
        out.report.directions_tested,
        out.scale_subpovm,
        out.scale_norm,
    );
    if let Some(path) = args.report {
        fs::write(path, serde_json::to_string_pretty(&out.report)?)
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    write_or_print(&out.sub_povm, args.out)
}

pub fn cmd_tensor(left: &Path, right: &Path, out: Option<&Path>) -> Result<()> {
    let a: DiscretePovm = parse(read_json(left)?, "POVM file")?;
    let b: DiscretePovm = parse(read_json(right)?, "POVM file")?;
    let product = a.tensor(&b);
    eprintln!(
        "tensor POVM: d = {}, {} outcomes",
        product.dim(),
        product.n_outcomes()
    );
    write_or_print(&product, out)
}

pub fn cmd_design_check(path: &Path, expect_exact: bool) -> Result<usize> {
    let spec: DesignSpec = parse(read_json(path)?, "design file")?;
    let (lo, hi) = design_defect(&spec)?;
    println!(
        "{}: d = {}, t = {}, {} atoms, defect (ε_lower, ε_upper) = ({lo:.3e}, {hi:.3e})",
        path.display(),
        spec.dim(),
        spec.order(),
        spec.atoms().len()
    );
    let exact = lo <= 1e-9 && hi <= 1e-9;
    println!(
        "  exact {}-design within 1e-9: {}",
        spec.order(),
        if exact { "yes" } else { "no" }
    );
    Ok(if expect_exact && !exact { 1 } else { 0 })
}
