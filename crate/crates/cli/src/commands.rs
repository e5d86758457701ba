//! Command implementations. Each returns an [`Outcome`]; printing and exit
//! codes are left to the binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use logent::theorems::{replay, search_subadditivity_violation_in, Instance, SampleFamily};
use logent::{
    divergence_terms, logical_divergence, logical_entropy, measure, random_density, run_all,
    run_check, trace_of_square, tsallis_entropy, twirl_subsystem_b, von_neumann_entropy,
    CheckConfig, CheckReport, DimSpec, Subsystem, TheoremId,
};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::matrix_file::{format_matrix_file, parse_matrix_file, parse_projector_file, write_file};
use crate::report::{render_table, InputDigest, ReportDocument};

/// Result of running one command.
#[derive(Debug)]
pub struct Outcome {
    pub report: ReportDocument,
    /// Human-readable rendering of the results.
    pub table: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(report: ReportDocument) -> Self {
        let table = render_table(&report.results);
        Self {
            report,
            table,
            exit_code: CliError::EXIT_OK,
        }
    }
}

/// Settings shared by every command.
#[derive(Clone, Debug)]
pub struct Context {
    /// The command line as given, without the program name.
    pub argv: Vec<String>,
    pub max_dim: usize,
}

/// Which theorems `check` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    All,
    One(TheoremId),
}

impl std::str::FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Selector::All);
        }
        s.parse::<TheoremId>()
            .map(Selector::One)
            .map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, Default)]
pub struct EntropyOptions {
    pub purity: bool,
    pub von_neumann: bool,
    pub tsallis: Option<f64>,
    pub spectrum: bool,
    pub marginals: bool,
}

impl EntropyOptions {
    pub fn all() -> Self {
        Self {
            purity: true,
            von_neumann: true,
            tsallis: None,
            spectrum: true,
            marginals: true,
        }
    }
}

pub fn entropy(ctx: &Context, path: &Path, opts: &EntropyOptions) -> Result<Outcome, CliError> {
    let file = parse_matrix_file(path, ctx.max_dim)?;
    let rho = &file.state;
    let mut results = Map::new();
    results.insert("dim".into(), json!(rho.dim()));
    if let Some(label) = &file.label {
        results.insert("label".into(), json!(label));
    }
    results.insert("logical_entropy".into(), json!(logical_entropy(rho)?));
    if opts.purity {
        results.insert("purity".into(), json!(trace_of_square(rho.matrix())?));
    }
    if opts.von_neumann {
        results.insert(
            "von_neumann_entropy".into(),
            json!(von_neumann_entropy(rho)?),
        );
    }
    if let Some(q) = opts.tsallis {
        let value =
            tsallis_entropy(rho, q).map_err(|e| CliError::Usage(format!("--tsallis: {e}")))?;
        results.insert("tsallis".into(), json!({ "q": q, "value": value }));
    }
    if opts.spectrum {
        results.insert("spectrum".into(), json!(rho.eigenvalues()?));
    }
    if opts.marginals {
        let split = file.split.ok_or_else(|| {
            CliError::Usage(format!(
                "{}: --marginals needs a \"split\": [dA, dB] entry in the file",
                path.display()
            ))
        })?;
        let rho_a = rho.partial_trace(split, Subsystem::B)?;
        let rho_b = rho.partial_trace(split, Subsystem::A)?;
        results.insert(
            "marginals".into(),
            json!({
                "split": [split.dim_a, split.dim_b],
                "logical_entropy_a": logical_entropy(&rho_a)?,
                "logical_entropy_b": logical_entropy(&rho_b)?,
            }),
        );
    }
    let inputs = vec![InputDigest::read(path)?];
    Ok(Outcome::ok(ReportDocument::new(
        ctx.argv.clone(),
        inputs,
        None,
        Value::Object(results),
    )))
}

pub fn divergence(ctx: &Context, rho_path: &Path, sigma_path: &Path) -> Result<Outcome, CliError> {
    let rho = parse_matrix_file(rho_path, ctx.max_dim)?.state;
    let sigma = parse_matrix_file(sigma_path, ctx.max_dim)?.state;
    if rho.dim() != sigma.dim() {
        return Err(CliError::validation(
            format!("{} vs {}", rho_path.display(), sigma_path.display()),
            logent::Error::DimensionMismatch {
                left: rho.dim(),
                right: sigma.dim(),
            },
        ));
    }
    let terms = divergence_terms(&rho, &sigma)?;
    let results = json!({
        "dim": rho.dim(),
        "logical_divergence": logical_divergence(&rho, &sigma)?,
        "terms": terms,
    });
    let inputs = vec![InputDigest::read(rho_path)?, InputDigest::read(sigma_path)?];
    Ok(Outcome::ok(ReportDocument::new(
        ctx.argv.clone(),
        inputs,
        None,
        results,
    )))
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub selector: Selector,
    pub trials: usize,
    pub seed: u64,
    pub dims: Option<String>,
    pub tolerance: f64,
}

fn check_config(
    trials: usize,
    seed: u64,
    dims: Option<&str>,
    tolerance: f64,
) -> Result<CheckConfig, CliError> {
    let dims = match dims {
        Some(s) => DimSpec::parse_list(s).map_err(|e| CliError::Usage(format!("--dims: {e}")))?,
        None => Vec::new(),
    };
    let config = CheckConfig {
        dims,
        trials,
        seed,
        tolerance,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

pub fn check(ctx: &Context, opts: &CheckOptions) -> Result<Outcome, CliError> {
    let config = check_config(opts.trials, opts.seed, opts.dims.as_deref(), opts.tolerance)?;
    let reports = match opts.selector {
        Selector::All => run_all(&config),
        Selector::One(t) => run_check(t, &config).map(|r| vec![r]),
    }
    .map_err(|e| match e {
        logent::Error::Config(m) => CliError::Usage(m),
        other => CliError::Compute(other),
    })?;
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    let results = json!({
        "passed": failures == 0,
        "total_failures": failures,
        "reports": reports,
    });
    let report = ReportDocument::new(ctx.argv.clone(), Vec::new(), Some(opts.seed), results);
    let exit_code = if failures == 0 {
        CliError::EXIT_OK
    } else {
        CliError::EXIT_CHECK_FAILED
    };
    Ok(Outcome {
        report,
        table: check_table(&reports),
        exit_code,
    })
}

fn check_table(reports: &[CheckReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.theorem.name().len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for r in reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{status}  {:width$}  trials={:<6} failures={:<4} worst_margin={:.3e}",
            r.theorem.name(),
            r.trials_run,
            r.failures,
            r.worst_margin,
        );
    }
    for r in reports {
        for f in &r.failing_seeds {
            let i = f.instance;
            let _ = writeln!(
                out,
                "failing instance: {} {i} slack={:.3e}  (replay: logent replay {} --seed {} --trial {} --dims {})",
                r.theorem.name(),
                f.slack,
                r.theorem.name().to_lowercase(),
                i.seed,
                i.trial,
                i.dims,
            );
        }
    }
    out
}

pub fn replay_trial(
    ctx: &Context,
    theorem: TheoremId,
    seed: u64,
    trial: usize,
    dims: &str,
) -> Result<Outcome, CliError> {
    let dims: DimSpec = dims
        .parse()
        .map_err(|e: logent::Error| CliError::Usage(format!("--dims: {e}")))?;
    let instance = Instance { seed, trial, dims };
    let slack = replay(theorem, instance).map_err(|e| match e {
        logent::Error::Config(m) => CliError::Usage(m),
        other => CliError::Compute(other),
    })?;
    let results = json!({
        "theorem": theorem,
        "instance": instance,
        "slack": slack,
    });
    Ok(Outcome::ok(ReportDocument::new(
        ctx.argv.clone(),
        Vec::new(),
        Some(seed),
        results,
    )))
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub family: SampleFamily,
    pub trials: usize,
    pub seed: u64,
    pub dims: Option<String>,
    pub tolerance: f64,
}

/// Exploratory search for states with `L(A,B) > L(A) + L(B)`. Finding one is
/// a result, not an error, so the exit code is 0 either way.
pub fn search_subadditivity(ctx: &Context, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let config = check_config(opts.trials, opts.seed, opts.dims.as_deref(), opts.tolerance)?;
    if config.dims.iter().any(|d| matches!(d, DimSpec::Single(_))) {
        return Err(CliError::Usage(
            "--dims: the search needs bipartite dimensions such as 2x2".into(),
        ));
    }
    let found = search_subadditivity_violation_in(&config, opts.family)?;
    let results = match found {
        Some(v) => json!({
            "family": opts.family,
            "trials": opts.trials,
            "violation_found": true,
            "excess": v.excess(),
            "violation": v,
        }),
        None => json!({ "family": opts.family, "trials": opts.trials, "violation_found": false }),
    };
    Ok(Outcome::ok(ReportDocument::new(
        ctx.argv.clone(),
        Vec::new(),
        Some(opts.seed),
        results,
    )))
}

fn written(path: &Path, contents: &str) -> Result<Value, CliError> {
    write_file(path, contents)?;
    Ok(
        serde_json::to_value(InputDigest::of(path, contents.as_bytes()))
            .expect("digest serializes"),
    )
}

pub fn random(
    ctx: &Context,
    dim: usize,
    rank: usize,
    seed: u64,
    out: &Path,
) -> Result<Outcome, CliError> {
    if dim == 0 || dim > ctx.max_dim {
        return Err(CliError::Usage(format!(
            "--dim must be in 1..={} (raise the limit with --max-dim)",
            ctx.max_dim
        )));
    }
    if rank == 0 || rank > dim {
        return Err(CliError::Usage(format!(
            "--rank must be in 1..={dim}, got {rank}"
        )));
    }
    let rho = random_density::<f64>(dim, rank, seed)?;
    let label = format!("random dim={dim} rank={rank} seed={seed}");
    let text = format_matrix_file(rho.matrix(), None, Some(&label));
    let results = json!({
        "dim": dim,
        "rank": rank,
        "logical_entropy": logical_entropy(&rho)?,
        "output": written(out, &text)?,
    });
    Ok(Outcome::ok(ReportDocument::new(
        ctx.argv.clone(),
        Vec::new(),
        Some(seed),
        results,
    )))
}

pub fn twirl(ctx: &Context, path: &Path, out: &Path) -> Result<Outcome, CliError> {
    let file = parse_matrix_file(path, ctx.max_dim)?;
    let split = file.split.ok_or_else(|| {
        CliError::Usage(format!(
            "{}: twirl needs a \"split\": [dA, dB] entry in the file",
            path.display()
        ))
    })?;
    if split.dim_b < 2 {
        return Err(CliError::Usage(format!(
            "{}: subsystem B must have dimension at least 2",
            path.display()
        )));
    }
    let twirled = twirl_subsystem_b(&file.state, split)?;
    let label = format!(
        "twirl over B of {}",
        file.label.as_deref().unwrap_or(&path.display().to_string())
    );
    let text = format_matrix_file(twirled.matrix(), Some(split), Some(&label));
    let results = json!({
        "split": [split.dim_a, split.dim_b],
        "logical_entropy_before": logical_entropy(&file.state)?,
        "logical_entropy_after": logical_entropy(&twirled)?,
        "output": written(out, &text)?,
    });
    let inputs = vec![InputDigest::read(path)?];
    Ok(Outcome::ok(ReportDocument::new(
        ctx.argv.clone(),
        inputs,
        None,
        results,
    )))
}

pub fn measure_state(
    ctx: &Context,
    path: &Path,
    projectors: &Path,
    out: Option<&PathBuf>,
) -> Result<Outcome, CliError> {
    let file = parse_matrix_file(path, ctx.max_dim)?;
    let m = parse_projector_file(projectors, ctx.max_dim)?;
    if m.dim() != file.state.dim() {
        return Err(CliError::validation(
            format!("{} vs {}", path.display(), projectors.display()),
            logent::Error::DimensionMismatch {
                left: file.state.dim(),
                right: m.dim(),
            },
        ));
    }
    let after = measure(&file.state, &m)?;
    let mut results = Map::new();
    results.insert("dim".into(), json!(after.dim()));
    results.insert("outcomes".into(), json!(m.projectors().len()));
    results.insert(
        "logical_entropy_before".into(),
        json!(logical_entropy(&file.state)?),
    );
    results.insert(
        "logical_entropy_after".into(),
        json!(logical_entropy(&after)?),
    );
    if let Some(out) = out {
        let label = format!(
            "measured {}",
            file.label.as_deref().unwrap_or(&path.display().to_string())
        );
        let text = format_matrix_file(after.matrix(), file.split, Some(&label));
        results.insert("output".into(), written(out, &text)?);
    }
    let inputs = vec![InputDigest::read(path)?, InputDigest::read(projectors)?];
    Ok(Outcome::ok(ReportDocument::new(
        ctx.argv.clone(),
        inputs,
        None,
        Value::Object(results),
    )))
}
