//! Batch experiment runner.
//!
//! ```text
//! qcount --command bound-table --dims 2,4,8 --deltas 0,0.125 --out bounds.csv
//! qcount --command verify-lemma --dims 2,4,8 --deltas 0,0.05,0.1,0.15 --instances 100 --seed 1 --out lemma.json
//! qcount --command enumerate --machine-family identity --n 1 --delta 0.1 --net-epsilon 0.09 --seed 0 --out cat.json
//! qcount --command net-check --n 1 --seed 0 --out net.json
//! qcount --command complexity-scan --lmax 16 --out c.csv
//! ```
//!
//! Exit status: 0 when every embedded assertion passes, 1 when a report was
//! written but some assertion failed, 2 on configuration or runtime errors
//! (no file is written then).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use qcount::enumeration::NetConfig;
use qcount::experiments::{self, BoundRow, ComplexityRow, LemmaConfig};
use qcount::qis::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    BoundTable,
    VerifyLemma,
    Enumerate,
    NetCheck,
    ComplexityScan,
}

#[derive(Debug, Parser)]
#[command(name = "qcount", version, about = "Counting-argument experiments for quantum Kolmogorov complexity")]
struct Cli {
    #[arg(long, value_enum)]
    command: Command,
    /// Required by verify-lemma, enumerate and net-check.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input dimensions for bound-table and verify-lemma.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Tolerances for bound-table and verify-lemma.
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    /// identity, basis-permutation, seeded-random-unitary or dephasing-compose.
    #[arg(long)]
    machine_family: Option<String>,
    /// Input strings have length at most n.
    #[arg(long)]
    n: Option<usize>,
    /// Output tolerance for enumerate.
    #[arg(long)]
    delta: Option<f64>,
    /// Covering radius of the input net; must be below --delta for enumerate.
    #[arg(long)]
    net_epsilon: Option<f64>,
    /// Random channels per dimension in verify-lemma.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Longest program tried by complexity-scan.
    #[arg(long, default_value_t = 16)]
    lmax: usize,
    /// Extra strings for complexity-scan.
    #[arg(long, value_delimiter = ',')]
    targets: Vec<String>,
}

/// A finished artifact and whether all its assertions held.
struct Artifact {
    bytes: Vec<u8>,
    pass: bool,
    summary: Option<String>,
}

fn fail(msg: impl std::fmt::Display) -> String {
    msg.to_string()
}

fn require<T>(v: Option<T>, flag: &str, command: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("--{flag} is required for {command}"))
}

/// Ten significant digits, plain decimal notation.
fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, String> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(fail)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    w.into_inner().map_err(fail)
}

fn run(cli: &Cli) -> Result<Artifact, String> {
    match cli.command {
        Command::BoundTable => {
            if cli.dims.is_empty() || cli.deltas.is_empty() {
                return Err("bound-table needs --dims and --deltas".into());
            }
            let rows = experiments::bound_table(&cli.dims, &cli.deltas).map_err(fail)?;
            let bytes = csv_bytes(
                &["d", "delta", "bound_bits"],
                rows.iter().map(|r: &BoundRow| vec![r.d.to_string(), sig10(r.delta), sig10(r.bound_bits)]),
            )?;
            Ok(Artifact { bytes, pass: true, summary: None })
        }
        Command::VerifyLemma => {
            let seed = require(cli.seed, "seed", "verify-lemma")?;
            let dims = if cli.dims.is_empty() { vec![2, 4, 8] } else { cli.dims.clone() };
            let deltas = if cli.deltas.is_empty() { vec![0.0, 0.05, 0.1, 0.15] } else { cli.deltas.clone() };
            let report = experiments::verify_lemma(&LemmaConfig::new(dims, deltas, cli.instances, seed))
                .map_err(fail)?;
            let summary = format!("cells {} failed {} pass {}", report.cell_count, report.failed, report.all_pass);
            Ok(Artifact { bytes: json(&report)?, pass: report.all_pass, summary: Some(summary) })
        }
        Command::Enumerate => {
            let seed = require(cli.seed, "seed", "enumerate")?;
            let family = require(cli.machine_family.as_deref(), "machine-family", "enumerate")?;
            let n = require(cli.n, "n", "enumerate")?;
            let delta = require(cli.delta, "delta", "enumerate")?;
            let spec = experiments::machine_spec(family, n, seed).map_err(fail)?;
            let net = match cli.net_epsilon {
                Some(eps) => NetConfig::new(n, eps),
                None => NetConfig::default_for(n),
            };
            let report = experiments::enumerate(spec, delta, net).map_err(fail)?;
            let s = &report.summary;
            let summary = format!(
                "count {} log2_count {} bound(delta_eff={}) {} pass {}",
                s.count,
                s.log2_count.map_or("none".into(), sig10),
                sig10(s.delta_eff),
                s.bound_at_delta_eff.map_or("none".into(), sig10),
                s.pass
            );
            Ok(Artifact { bytes: json(&report)?, pass: s.pass, summary: Some(summary) })
        }
        Command::NetCheck => {
            let seed = require(cli.seed, "seed", "net-check")?;
            let n = require(cli.n, "n", "net-check")?;
            let report = experiments::net_check(n, cli.net_epsilon, seed).map_err(fail)?;
            let summary = format!(
                "points {} checked {} violations {} worst {} pass {}",
                report.size,
                report.certificate.checked,
                report.certificate.violations,
                sig10(report.certificate.worst_distance),
                report.pass
            );
            Ok(Artifact { bytes: json(&report)?, pass: report.pass, summary: Some(summary) })
        }
        Command::ComplexityScan => {
            let targets = cli
                .targets
                .iter()
                .map(|t| t.parse::<BitString>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(fail)?;
            let rows = experiments::complexity_scan(cli.lmax, &targets).map_err(fail)?;
            let bytes = csv_bytes(
                &["x", "complexity"],
                rows.iter().map(|r: &ComplexityRow| {
                    vec![r.x.to_string(), r.complexity.map_or("none".into(), |c| c.to_string())]
                }),
            )?;
            Ok(Artifact { bytes, pass: true, summary: None })
        }
    }
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial artifact.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let artifact = match run(&cli) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("qcount: {msg}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => write_atomic(path, &artifact.bytes),
        None => std::io::stdout().write_all(&artifact.bytes),
    };
    if let Err(e) = written {
        eprintln!("qcount: cannot write output: {e}");
        return ExitCode::from(2);
    }
    // The summary shares stdout only when the artifact went to a file.
    if let Some(s) = &artifact.summary {
        if cli.out.is_some() {
            println!("{s}");
        } else {
            eprintln!("{s}");
        }
    }
    if artifact.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
