use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use tgalab::greedy::{tga_trace, write_trace_csv};
use tgalab::numeric::format_significant;
use tgalab::oracle::{estimate_constant, sigma_profile, sigma_tilde_profile, DEFAULT_TOL};
use tgalab::propcheck::{catalog_ids, render_table, suite_exit_code};
use tgalab::schema::{csv_preamble, CONSTANT_COLUMNS, NORM_COLUMNS, REPORT_COLUMNS, SCHEMA_VERSION, SIGMA_COLUMNS};
use tgalab::{run_check, run_suite, CheckReport, ConstantName, FuncF, Sampler, Space, SparseVector, Tier, WeightSequence};

const DIGITS: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "tgalab", version, about = "Greedy-basis laboratory: norms, TGA traces, constants and checks")]
struct Cli {
    /// Space description (JSON file, or inline JSON starting with `{`).
    #[arg(long, global = true)]
    space: Option<String>,

    /// Threshold function f (JSON file or inline JSON).
    #[arg(long, global = true)]
    func: Option<String>,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Dimension bound: vectors and greedy sets live in 1..=dim.
    #[arg(long, global = true)]
    dim: Option<usize>,

    /// Largest accepted --dim.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    max_dim: usize,

    /// Write here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[arg(long, global = true, value_enum, default_value_t = TierArg::Fast)]
    tier: TierArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TierArg {
    Fast,
    Full,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Fast => Tier::Fast,
            TierArg::Full => Tier::Full,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm of a vector.
    Norm { vector: String },
    /// Residuals along the thresholding greedy algorithm.
    Tga {
        vector: String,
        #[arg(long)]
        m_max: usize,
    },
    /// Best m-term errors with free coefficients and with projections.
    Sigma {
        vector: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Empirical lower bound for a named constant.
    Constants {
        /// C_ell, C_q, Delta_d_f, Delta_sd_f, Delta_A_f, K_su, K_u, C_af or C_gf.
        name: String,
        #[arg(long, default_value_t = 256)]
        trials: usize,
        /// Sampler (JSON file or inline JSON), e.g. {"family":"gaussian","support":8,"horizon":32}.
        #[arg(long)]
        sampler: String,
    },
    /// Run the check catalog, or a single check with --check.
    Suite {
        #[arg(long)]
        check: Option<String>,
        /// Parameter overrides for --check (JSON object).
        #[arg(long)]
        params: Option<String>,
        /// List check ids and exit.
        #[arg(long)]
        list: bool,
    },
    /// Weight sequence of the weighted summing space.
    Weights {
        #[arg(long)]
        j_max: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("TGALAB_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().with_context(|| format!("TGALAB_THREADS=`{raw}` is not a thread count"))?;
    if n == 0 {
        bail!("TGALAB_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

/// Parses inline JSON or the named file; serde errors carry line and column.
fn load<T: DeserializeOwned>(what: &str, arg: &str) -> Result<T> {
    let (text, origin) = if arg.trim_start().starts_with('{') {
        (arg.to_string(), "<inline>".to_string())
    } else {
        (fs::read_to_string(arg).with_context(|| format!("reading {what} file `{arg}`"))?, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| {
        // errors raised by our own validation carry no position
        if e.line() == 0 {
            anyhow!("{what} {origin}: {e}")
        } else {
            anyhow!("{what} {origin}:{}:{}: {e}", e.line(), e.column())
        }
    })
}

fn space(cli: &Cli) -> Result<Space> {
    load("space", cli.space.as_deref().ok_or_else(|| anyhow!("--space is required"))?)
}

fn func(cli: &Cli) -> Result<Option<FuncF>> {
    cli.func.as_deref().map(|f| load("func", f)).transpose()
}

fn vector(cli: &Cli, arg: &str, space: &Space) -> Result<SparseVector> {
    let x: SparseVector = load("vector", arg)?;
    if let Some(top) = x.max_index() {
        if let Some(cap) = space.capacity() {
            if top > cap {
                bail!("vector index {top} exceeds the capacity of {} ({cap})", space.describe());
            }
        }
        if let Some(dim) = cli.dim {
            if top > dim {
                bail!("vector index {top} exceeds --dim {dim}");
            }
        }
    }
    Ok(x)
}

fn dimension(cli: &Cli, wanted: usize) -> Result<usize> {
    let dim = cli.dim.unwrap_or(wanted);
    if dim > cli.max_dim {
        bail!("dimension {dim} exceeds the cap {} (raise it with --max-dim)", cli.max_dim);
    }
    Ok(dim)
}

/// Rounds to the printed precision so JSON and CSV carry the same digits.
fn rounded(v: f64) -> Value {
    if v.is_finite() {
        json!(format_significant(v, DIGITS).parse::<f64>().expect("formatted float parses"))
    } else if v > 0.0 {
        json!("+inf")
    } else {
        json!("-inf")
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(csv_preamble().into_bytes());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

/// Everything is rendered before the first byte is written, and files are
/// replaced by rename, so a failed command leaves no partial output.
fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => write_atomic(path, text.as_bytes()),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Norm { vector: v } => {
            let s = space(cli)?;
            let x = vector(cli, v, &s)?;
            let n = s.norm(&x)?;
            let text = match cli.format {
                Format::Json => json_text(&json!({ "schema": SCHEMA_VERSION, "space": s, "norm": rounded(n) })),
                Format::Csv => csv_text(&NORM_COLUMNS, &[vec![format_significant(n, DIGITS)]])?,
            };
            emit(cli, &text)?;
        }
        Command::Tga { vector: v, m_max } => {
            let s = space(cli)?;
            let x = vector(cli, v, &s)?;
            let wanted = x.max_index().unwrap_or(0).max(*m_max).max(1);
            let dim = dimension(cli, wanted)?;
            let rows = tga_trace(&x, &s, *m_max, dim)?;
            let text = match cli.format {
                Format::Json => {
                    let rows: Vec<Value> = rows
                        .iter()
                        .map(|r| json!({ "m": r.m, "indices": r.indices, "residual": rounded(r.residual) }))
                        .collect();
                    json_text(&json!({ "schema": SCHEMA_VERSION, "space": s, "dimension": dim, "rows": rows }))
                }
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_trace_csv(&rows, &mut buf)?;
                    String::from_utf8(buf)?
                }
            };
            emit(cli, &text)?;
        }
        Command::Sigma { vector: v, m, tol } => {
            let s = space(cli)?;
            let x = vector(cli, v, &s)?;
            let free = sigma_profile(&x, *m, &s, *tol)?;
            let proj = sigma_tilde_profile(&x, *m, &s)?;
            let text = match cli.format {
                Format::Json => {
                    let rows: Vec<Value> = (0..=*m)
                        .map(|k| json!({ "k": k, "sigma": rounded(free[k]), "sigma_tilde": rounded(proj[k]) }))
                        .collect();
                    json_text(&json!({ "schema": SCHEMA_VERSION, "space": s, "tol": tol, "rows": rows }))
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = (0..=*m)
                        .map(|k| {
                            vec![k.to_string(), format_significant(free[k], DIGITS), format_significant(proj[k], DIGITS)]
                        })
                        .collect();
                    csv_text(&SIGMA_COLUMNS, &rows)?
                }
            };
            emit(cli, &text)?;
        }
        Command::Constants { name, trials, sampler } => {
            let s = space(cli)?;
            let f = func(cli)?;
            let name: ConstantName = name.parse()?;
            let sampler: Sampler = load("sampler", sampler)?;
            sampler.validate()?;
            dimension(cli, sampler.horizon())?;
            if name.needs_func() && f.is_none() {
                bail!("{name} needs --func");
            }
            let est = estimate_constant(name, &s, f.as_ref(), &sampler, *trials, cli.seed)?;
            let text = match cli.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&est)?;
                    v["value"] = rounded(est.value);
                    v["observed"] = rounded(est.observed);
                    json_text(&json!({ "schema": SCHEMA_VERSION, "estimate": v }))
                }
                Format::Csv => csv_text(
                    &CONSTANT_COLUMNS,
                    &[vec![
                        name.to_string(),
                        format_significant(est.value, DIGITS),
                        format_significant(est.observed, DIGITS),
                        est.seed.to_string(),
                        est.trials.to_string(),
                        est.skipped.to_string(),
                    ]],
                )?,
            };
            emit(cli, &text)?;
        }
        Command::Suite { check, params, list } => {
            if *list {
                let ids = catalog_ids();
                let text = match cli.format {
                    Format::Json => json_text(&json!({ "schema": SCHEMA_VERSION, "checks": ids })),
                    Format::Csv => {
                        csv_text(&["check_id"], &ids.iter().map(|id| vec![id.to_string()]).collect::<Vec<_>>())?
                    }
                };
                emit(cli, &text)?;
                return Ok(0);
            }
            let tier: Tier = cli.tier.into();
            let reports = match check {
                Some(id) => {
                    let mut p: Value = match params {
                        Some(p) => load("params", p)?,
                        None => json!({}),
                    };
                    let obj = p.as_object_mut().ok_or_else(|| anyhow!("--params must be a JSON object"))?;
                    obj.entry("tier").or_insert(json!(tier));
                    vec![run_check(id, &p, cli.seed)?]
                }
                None => {
                    if params.is_some() {
                        bail!("--params applies to a single --check");
                    }
                    run_suite(tier, cli.seed)
                }
            };
            let text = match cli.format {
                // each report carries its own schema field
                Format::Json => json_text(&serde_json::to_value(&reports)?),
                Format::Csv => report_csv(&reports, tier)?,
            };
            emit(cli, &text)?;
            eprint!("{}", render_table(&reports));
            return Ok(suite_exit_code(&reports) as u8);
        }
        Command::Weights { j_max } => {
            let w = WeightSequence::new(*j_max)?;
            dimension(cli, w.len())?;
            let text = match cli.format {
                Format::Json => {
                    let weights: Vec<Value> = w.weights().into_iter().map(|v| json!(v)).collect();
                    json_text(&json!({
                        "schema": SCHEMA_VERSION,
                        "j_max": j_max,
                        "block_lengths": w.block_lengths(),
                        "weights": weights,
                        "problems": w.verify(),
                    }))
                }
                Format::Csv => {
                    let mut buf = Vec::new();
                    w.write_csv(&mut buf)?;
                    String::from_utf8(buf)?
                }
            };
            emit(cli, &text)?;
        }
    }
    Ok(0)
}

fn report_csv(reports: &[CheckReport], tier: Tier) -> Result<String> {
    let tier = serde_json::to_value(tier)?.as_str().unwrap_or_default().to_string();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let measured: Vec<String> =
                r.measured.iter().map(|(k, v)| format!("{k}={}", format_significant(*v, DIGITS))).collect();
            vec![r.check_id.clone(), tier.clone(), r.status.to_string(), measured.join(";")]
        })
        .collect();
    csv_text(&REPORT_COLUMNS, &rows)
}
