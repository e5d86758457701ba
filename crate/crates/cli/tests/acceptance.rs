//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. Built with `harness = false` so the lines
//! show up in plain `cargo test` output.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use logent::entropy::{partition_entropy_by_blocks, partition_entropy_by_counting};
use logent::theorems::CheckReport;
use logent::{
    dit_count, divergence_terms, hermitian_eigen, logical_divergence, logical_entropy,
    logical_entropy_spectral, measure, random_density, run_check, CheckConfig, ClassicalPartition,
    ComplexMatrix, DensityMatrix, DimSpec, Measurement, TheoremId,
};
use serde_json::Value;

type Verdict = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Verdict,
}

fn pairs(list: &[(usize, usize)]) -> Vec<DimSpec> {
    list.iter().map(|&(a, b)| DimSpec::Pair(a, b)).collect()
}

fn singles(list: &[usize]) -> Vec<DimSpec> {
    list.iter().map(|&d| DimSpec::Single(d)).collect()
}

fn check(
    theorem: TheoremId,
    dims: Vec<DimSpec>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<CheckReport, String> {
    let config = CheckConfig {
        dims,
        trials,
        seed,
        tolerance,
    };
    let report = run_check(theorem, &config).map_err(|e| e.to_string())?;
    if report.trials_run != trials {
        return Err(format!(
            "{theorem}: ran {} of {trials} trials",
            report.trials_run
        ));
    }
    if !report.passed() {
        let first = report
            .failing_seeds
            .first()
            .map(|f| f.instance.to_string())
            .unwrap_or_default();
        return Err(format!(
            "{theorem}: {} failures, worst slack {:.3e}, first at {first}",
            report.failures, report.worst_margin
        ));
    }
    Ok(report)
}

fn margin(report: &CheckReport, name: &str) -> f64 {
    report.margins[name]
}

fn max_entropy_value() -> Verdict {
    let mut worst = 0.0f64;
    for d in [2usize, 3, 4, 8, 16] {
        let l = logical_entropy(&DensityMatrix::maximally_mixed(d)).map_err(|e| e.to_string())?;
        let expected = 1.0 - 1.0 / d as f64;
        let err = (l - expected).abs();
        if err >= 1e-12 {
            return Err(format!("d={d}: L={l} expected {expected}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("max |L - (1 - 1/d)| = {worst:.1e}"))
}

fn purity() -> Verdict {
    let r = check(TheoremId::PureZero, singles(&[2, 4, 8]), 3000, 2, 1e-10)?;
    let max = margin(&r, "max_entropy");
    if max >= 1e-10 {
        return Err(format!("max L over rank-1 states {max:.3e}"));
    }
    Ok(format!("3000 rank-1 states, max L = {max:.1e}"))
}

fn klein() -> Verdict {
    let r = check(TheoremId::Klein, singles(&[2, 3, 4, 8]), 4000, 3, 1e-9)?;
    let self_div = margin(&r, "max_self_divergence");
    if self_div >= 1e-12 {
        return Err(format!("d(rho||rho) reached {self_div:.3e}"));
    }
    Ok(format!(
        "4000 pairs, min d = {:.3e}, max d(rho||rho) = {self_div:.1e}",
        margin(&r, "min_divergence")
    ))
}

fn product_formula() -> Verdict {
    let r = check(
        TheoremId::ProductFormula,
        pairs(&[(2, 2), (2, 3), (3, 3)]),
        1000,
        4,
        1e-10,
    )?;
    let gap = margin(&r, "max_formula_gap");
    if gap >= 1e-10 {
        return Err(format!("formula gap {gap:.3e}"));
    }
    let half = DensityMatrix::maximally_mixed(2);
    let joint = half.tensor(&half).map_err(|e| e.to_string())?;
    // Direct trace oracle: 1 - 4 * (1/4)^2
    let oracle = 1.0 - 4.0 * (0.25f64 * 0.25);
    let l = logical_entropy(&joint).map_err(|e| e.to_string())?;
    if l != oracle || oracle != 0.75 {
        return Err(format!("L(I/2 (x) I/2) = {l}, oracle {oracle}"));
    }
    Ok(format!(
        "1000 pairs, max gap = {gap:.1e}, L(I/2 (x) I/2) = {l}"
    ))
}

fn pure_marginals() -> Verdict {
    let r = check(
        TheoremId::PureMarginals,
        pairs(&[(2, 2), (2, 3), (3, 4)]),
        1000,
        5,
        1e-10,
    )?;
    let gap = margin(&r, "max_marginal_gap");
    if gap >= 1e-10 {
        return Err(format!("marginal gap {gap:.3e}"));
    }
    Ok(format!("1000 pure states, max |L(A) - L(B)| = {gap:.1e}"))
}

fn diag_subadditivity() -> Verdict {
    let dims = TheoremId::DiagSubadditivity.default_dims();
    let trials = 1000 * dims.len();
    let r = check(TheoremId::DiagSubadditivity, dims, trials, 6, 1e-9)?;
    Ok(format!(
        "{trials} states over 2x2, 2x3, 3x3, min gap = {:.3e}",
        margin(&r, "min_subadditivity_gap")
    ))
}

/// A random orthonormal basis: eigenvectors of a full-rank random state.
fn random_basis(dim: usize, seed: u64) -> Result<ComplexMatrix, String> {
    let rho = random_density::<f64>(dim, dim, seed).map_err(|e| e.to_string())?;
    let vectors = hermitian_eigen(rho.matrix())
        .map_err(|e| e.to_string())?
        .vectors;
    // Eigenvectors become the columns.
    let data = (0..dim)
        .flat_map(|i| vectors.iter().map(move |v| v[i]))
        .collect();
    ComplexMatrix::new(dim, data).map_err(|e| e.to_string())
}

fn measurement_monotone() -> Verdict {
    let r = check(
        TheoremId::MeasurementMonotone,
        singles(&[2, 4, 8]),
        3000,
        7,
        1e-9,
    )?;
    // Separate sweep pinned to coarse measurements, with rank >= 2 in every
    // outcome for d = 4 and d = 8.
    let mut coarse = 0;
    for (d, ranks) in [
        (2usize, vec![2usize]),
        (4, vec![2, 2]),
        (8, vec![2, 3, 3]),
        (8, vec![4, 4]),
    ] {
        for seed in 0..100u64 {
            let basis = random_basis(d, 70_000 + seed)?;
            let m = Measurement::from_basis_groups(&basis, &ranks).map_err(|e| e.to_string())?;
            let rho = random_density::<f64>(d, 1 + seed as usize % d, 71_000 + seed)
                .map_err(|e| e.to_string())?;
            let before = logical_entropy(&rho).map_err(|e| e.to_string())?;
            let after = logical_entropy(&measure(&rho, &m).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            if after < before - 1e-9 {
                return Err(format!(
                    "coarse measurement {ranks:?} lowered L from {before} to {after}"
                ));
            }
            coarse += 1;
        }
    }
    Ok(format!(
        "3000 random measurements (projector counts {}..{}) plus {coarse} coarse, min gain = {:.3e}",
        margin(&r, "min_projector_count"),
        margin(&r, "max_projector_count"),
        margin(&r, "min_entropy_gain"),
    ))
}

fn concavity() -> Verdict {
    let a = check(
        TheoremId::ConcavityOrthogonal,
        singles(&[2, 3, 4]),
        1000,
        8,
        1e-9,
    )?;
    let gap = margin(&a, "min_gap");
    if gap <= 0.0 {
        return Err(format!(
            "orthogonal mixtures: gap not strict, min {gap:.3e}"
        ));
    }
    let b = check(
        TheoremId::ConcavityBounds,
        singles(&[2, 3, 4]),
        1000,
        9,
        1e-9,
    )?;
    let lower = margin(&b, "lower_margin");
    let upper = margin(&b, "upper_margin");
    Ok(format!(
        "strict min gap = {gap:.3e}; bounds lower/upper margins = {lower:.3e}/{upper:.3e}"
    ))
}

fn joint_convexity() -> Verdict {
    let r = check(TheoremId::JointConvexity, singles(&[2, 4]), 1000, 10, 1e-9)?;
    Ok(format!(
        "1000 tuples, min gap = {:.3e}",
        margin(&r, "min_convexity_gap")
    ))
}

fn divergence_monotone() -> Verdict {
    let r = check(
        TheoremId::DivergenceMonotone,
        pairs(&[(2, 2), (2, 3), (3, 2)]),
        1500,
        11,
        1e-9,
    )?;
    let residual = margin(&r, "max_twirl_residual");
    if residual >= 1e-10 {
        return Err(format!("twirl residual {residual:.3e}"));
    }
    Ok(format!(
        "1500 pairs, twirl residual = {residual:.1e}, min gap = {:.3e}",
        margin(&r, "min_monotonicity_gap")
    ))
}

/// Every set partition of `{0..n}` as a label vector, via restricted growth
/// strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(labels: &mut Vec<usize>, n: usize, top: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=top + 1 {
            labels.push(l);
            grow(labels, n, top.max(l), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        grow(&mut vec![0], n, 0, &mut out);
    }
    out
}

fn two_path_oracles() -> Verdict {
    let mut worst_entropy = 0.0f64;
    let mut worst_divergence = 0.0f64;
    let mut instances = 0;
    for d in 1..=8usize {
        for seed in 0..250u64 {
            let rho = random_density::<f64>(d, 1 + seed as usize % d, 110_000 + seed)
                .map_err(|e| e.to_string())?;
            let sigma = random_density::<f64>(d, 1 + (seed as usize / 3) % d, 120_000 + seed)
                .map_err(|e| e.to_string())?;
            let direct = logical_entropy(&rho).map_err(|e| e.to_string())?;
            let spectral = logical_entropy_spectral(&rho).map_err(|e| e.to_string())?;
            worst_entropy = worst_entropy.max((direct - spectral).abs());
            let squared = logical_divergence(&rho, &sigma).map_err(|e| e.to_string())?;
            let terms = divergence_terms(&rho, &sigma)
                .map_err(|e| e.to_string())?
                .value();
            worst_divergence = worst_divergence.max((squared - terms).abs());
            instances += 1;
        }
    }
    if worst_entropy >= 1e-10 || worst_divergence >= 1e-10 {
        return Err(format!(
            "entropy paths {worst_entropy:.3e}, divergence paths {worst_divergence:.3e}"
        ));
    }

    let mut partitions = 0;
    for n in 1..=8usize {
        for labels in set_partitions(n) {
            let pi = ClassicalPartition::from_labels(&labels).map_err(|e| e.to_string())?;
            // Oracle: ordered pairs in distinct blocks, counted directly.
            let distinct = labels
                .iter()
                .flat_map(|a| labels.iter().map(move |b| (a, b)))
                .filter(|(a, b)| a != b)
                .count() as u64;
            if dit_count(&pi) != distinct {
                return Err(format!(
                    "{labels:?}: dit count {} vs {distinct}",
                    dit_count(&pi)
                ));
            }
            let by_blocks = partition_entropy_by_blocks(&pi);
            let by_counting = partition_entropy_by_counting(&pi);
            let total = (n * n) as u64;
            if by_blocks != by_counting
                || *by_blocks.numer() * total != distinct * *by_blocks.denom()
            {
                return Err(format!(
                    "{labels:?}: {by_blocks} vs {by_counting} vs {distinct}/{total}"
                ));
            }
            partitions += 1;
        }
    }
    // Bell numbers B(1..=8) sum to 5295.
    if partitions != 5295 {
        return Err(format!("enumerated {partitions} partitions, expected 5295"));
    }
    Ok(format!(
        "{instances} instances, gaps {worst_entropy:.1e}/{worst_divergence:.1e}; {partitions} partitions exact"
    ))
}

fn logent(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_logent"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn entropy_via_cli(dir: &std::path::Path, tag: &str) -> Result<(Vec<u8>, Vec<u64>), String> {
    let mut bits = Vec::new();
    let mut bytes = Vec::new();
    for (dim, rank) in [(2, 1), (4, 4), (8, 3)] {
        let path = dir.join(format!("{tag}-{dim}-{rank}.json"));
        let p = path.to_str().unwrap();
        let out = logent(&[
            "random",
            "--dim",
            &dim.to_string(),
            "--rank",
            &rank.to_string(),
            "--seed",
            "42",
            "--out",
            p,
        ])?;
        if !out.status.success() {
            return Err(format!(
                "random failed: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        bytes.extend(fs::read(&path).map_err(|e| e.to_string())?);
        let out = logent(&["entropy", p, "--json"])?;
        let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let l = v["results"]["logical_entropy"]
            .as_f64()
            .ok_or("entropy report has no value")?;
        bits.push(l.to_bits());
    }
    Ok((bytes, bits))
}

fn cli_round_trip() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (bytes_a, bits_a) = entropy_via_cli(dir.path(), "a")?;
    let (bytes_b, bits_b) = entropy_via_cli(dir.path(), "b")?;
    if bytes_a != bytes_b || bits_a != bits_b {
        return Err("random -> entropy pipeline is not bit-stable".into());
    }
    let out = logent(&["check", "all", "--trials", "200", "--seed", "42", "--json"])?;
    if !out.status.success() {
        return Err(format!("check all exited with {:?}", out.status.code()));
    }
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let reports = v["results"]["reports"].as_array().map_or(0, Vec::len);
    if reports != 11 {
        return Err(format!("check all produced {reports} reports"));
    }
    Ok(format!(
        "pipeline bit-stable, check all: {reports} reports, exit 0"
    ))
}

const CRITERIA: [Criterion; 12] = [
    Criterion {
        id: 1,
        name: "max-entropy value",
        budget: Duration::from_secs(1),
        run: max_entropy_value,
    },
    Criterion {
        id: 2,
        name: "purity",
        budget: Duration::from_secs(10),
        run: purity,
    },
    Criterion {
        id: 3,
        name: "klein",
        budget: Duration::from_secs(10),
        run: klein,
    },
    Criterion {
        id: 4,
        name: "product formula",
        budget: Duration::from_secs(10),
        run: product_formula,
    },
    Criterion {
        id: 5,
        name: "pure-state marginals",
        budget: Duration::from_secs(10),
        run: pure_marginals,
    },
    Criterion {
        id: 6,
        name: "diagonal subadditivity",
        budget: Duration::from_secs(10),
        run: diag_subadditivity,
    },
    Criterion {
        id: 7,
        name: "measurement monotonicity",
        budget: Duration::from_secs(30),
        run: measurement_monotone,
    },
    Criterion {
        id: 8,
        name: "concavity",
        budget: Duration::from_secs(30),
        run: concavity,
    },
    Criterion {
        id: 9,
        name: "joint convexity",
        budget: Duration::from_secs(10),
        run: joint_convexity,
    },
    Criterion {
        id: 10,
        name: "divergence monotonicity",
        budget: Duration::from_secs(30),
        run: divergence_monotone,
    },
    Criterion {
        id: 11,
        name: "two-path oracles",
        budget: Duration::from_secs(30),
        run: two_path_oracles,
    },
    Criterion {
        id: 12,
        name: "cli round trip",
        budget: Duration::from_secs(60),
        run: cli_round_trip,
    },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let verdict = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match verdict {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; over time budget")),
            other => other,
        };
        let (status, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "{status} criterion {:>2} {:<26} {:>7.2}s / {:>2}s  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if verdict.is_err() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        CRITERIA.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
