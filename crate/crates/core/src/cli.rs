//! Command-line front end: `table2 | modular | search | shots | baseline`.
//!
//! Exit codes: 0 success, 1 self-check failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::djstates::{self, balanced_rows, CanonicalStatePair, StateVariant, Table2Row};
use crate::error::{Error, Result};
use crate::modular::{report, MeterConfig};
use crate::oracle::{classify, enumerate, oracle_unitary, table1_functions, BooleanFunction, OracleClass};
use crate::output::{create_with_metadata, metadata};
use crate::qcore::{BlochVector, Complex};
use crate::rng;
use crate::search::{self, run_search, SearchConfig};
use crate::shots::{
    baseline_dj, build_plan, dj_all_zero_probability, summarize, write_summary_csv, DjVerdict,
    NoiseModel, RunSummary, DEFAULT_REPETITIONS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SHOT_COUNTS: [usize; 5] = [8, 16, 32, 64, 128];

#[derive(Debug, Parser, Serialize)]
#[command(name = "modval", version, about = "Modular-value Deutsch-Jozsa experiments")]
pub struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "modval-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Tolerance for self-check comparisons.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum VariantArg {
    ExactN2,
    Ibm,
    General,
}

impl From<VariantArg> for StateVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::ExactN2 => StateVariant::ThreeQubitExact,
            VariantArg::Ibm => StateVariant::IbmSimplified,
            VariantArg::General => StateVariant::GeneralN,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Regenerate the balanced-function modular-value table.
    Table2(Table2Args),
    /// Evaluate one function under one state pair and meter.
    Modular(ModularArgs),
    /// Random search over pre/post-selected states.
    Search(SearchArgs),
    /// Shot experiments, noiseless and noisy.
    Shots(ShotsArgs),
    /// Textbook Deutsch-Jozsa verdicts for every two-bit function.
    Baseline,
}

#[derive(Debug, Args, Serialize)]
pub struct Table2Args {
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Oracle input bits; values other than 2 select the general states.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ModularArgs {
    /// Truth table as a bitstring, e.g. 0011.
    #[arg(long = "f")]
    pub f: String,
    /// Expected input bits; checked against the bitstring length.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::ExactN2)]
    pub variant: VariantArg,
    /// Meter initial direction `x,y,z`.
    #[arg(long, default_value = "0,0,1")]
    pub m: String,
    /// Control projector direction `x,y,z`.
    #[arg(long, default_value = "1,0,0")]
    pub r: String,
    /// Readout direction `x,y,z`.
    #[arg(long, default_value = "0,1,0")]
    pub q: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Preset {
    Separable,
    General,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    /// JSON file with search parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum NoiseArg {
    Off,
    Default,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct ShotsArgs {
    #[arg(long, value_enum, default_value_t = NoiseArg::Both)]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    pub repetitions: usize,
    #[arg(long, value_delimiter = ',', default_values_t = SHOT_COUNTS.to_vec())]
    pub shots: Vec<usize>,
    #[arg(long)]
    pub depolarizing: Option<f64>,
    #[arg(long)]
    pub readout: Option<f64>,
    /// Also run the textbook algorithm on every two-bit function.
    #[arg(long)]
    pub baseline: bool,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(stderr, "self-check failed: {msg}");
            EXIT_CHECK_FAILED
        }
    }
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::OrthogonalPrePost(_) | Error::ZeroPostselection => {
                Failure::Check(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    if !(cli.tolerance > 0.0 && cli.tolerance.is_finite()) {
        return Err(Failure::Usage(format!("tolerance must be positive, got {}", cli.tolerance)));
    }
    match &cli.command {
        Command::Table2(a) => cmd_table2(cli, a, stdout),
        Command::Modular(a) => cmd_modular(cli, a, stdout, stderr),
        Command::Search(a) => cmd_search(cli, a, stdout, stderr),
        Command::Shots(a) => cmd_shots(cli, a, stdout),
        Command::Baseline => cmd_baseline(cli, stdout),
    }
}

fn echo(cli: &Cli, kind: &str) -> Result<Value> {
    metadata(kind, cli)
}

fn write_json(path: &Path, meta: &Value, body: Value) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let doc = json!({ "metadata": meta, "data": body });
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

fn rows_json(rows: &[Table2Row]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| json!({ "f": r.f.to_string(), "om_re": r.o_m.re, "om_im": r.o_m.im }))
            .collect(),
    )
}

fn write_rows(cli: &Cli, name: &str, meta: &Value, rows: &[Table2Row]) -> Result<PathBuf> {
    let path = match cli.format {
        Format::Csv => {
            let path = cli.out.join(format!("{name}.csv"));
            let mut out = create_with_metadata(&path, meta)?;
            djstates::write_rows_csv(&mut out, rows)?;
            out.flush()?;
            path
        }
        Format::Json => {
            let path = cli.out.join(format!("{name}.json"));
            write_json(&path, meta, rows_json(rows))?;
            path
        }
    };
    Ok(path)
}

fn constants_check(pair: &CanonicalStatePair, tol: f64) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    for (value, target) in [(false, 1.0), (true, -1.0)] {
        let f = BooleanFunction::constant(pair.n(), value);
        let o = crate::modular::modular_value(pair.psi_i(), pair.psi_f(), &oracle_unitary(&f))?;
        if (o - Complex::new(target, 0.0)).norm() > tol {
            problems.push(format!("constant {f}: O_m = {o}, expected {target}"));
        }
    }
    Ok(problems)
}

fn cmd_table2(cli: &Cli, a: &Table2Args, stdout: &mut dyn Write) -> CmdResult {
    let variant: StateVariant = match (a.variant, a.n) {
        (Some(v), _) => v.into(),
        (None, 2) => StateVariant::ThreeQubitExact,
        (None, _) => StateVariant::GeneralN,
    };
    let pair = CanonicalStatePair::for_variant(variant, a.n)?;
    let meta = echo(cli, "table2")?;
    let tol = cli.tolerance;
    // constants are checked to structural precision; the exact rows to --tolerance
    let mut problems = constants_check(&pair, tol.max(1e-10))?;

    match variant {
        StateVariant::ThreeQubitExact => {
            let rows = djstates::table2(&pair)?;
            for (row, (f, re, im)) in rows.iter().zip(djstates::table2_expected()) {
                let (re, im) = (
                    *re.numer() as f64 / *re.denom() as f64,
                    *im.numer() as f64 / *im.denom() as f64,
                );
                if row.f != f || (row.re() - re).abs() > tol || (row.im() - im).abs() > tol {
                    problems.push(format!(
                        "row {}: got ({:.15}, {:.15}), expected ({re:.15}, {im:.15})",
                        row.f,
                        row.re(),
                        row.im()
                    ));
                }
            }
            let path = write_rows(cli, "table2", &meta, &rows)?;
            writeln!(stdout, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        StateVariant::IbmSimplified => {
            let rows = djstates::table2(&CanonicalStatePair::three_qubit_exact())
                .map(|r| r.into_iter().map(|row| row.f).collect::<Vec<_>>())?;
            let rows = balanced_rows(&pair, &rows)?;
            let path = write_rows(cli, "table2_ibm", &meta, &rows)?;
            let blind: Vec<String> = rows
                .iter()
                .filter(|r| r.im().abs() <= tol.max(1e-10))
                .map(|r| r.f.to_string())
                .collect();
            writeln!(stdout, "wrote {} rows to {}", rows.len(), path.display())?;
            writeln!(stdout, "not discriminated (Im O_m = 0): {}", blind.join(" "))?;
            if blind.len() == rows.len() {
                problems.push("no balanced function is discriminated".into());
            }
        }
        StateVariant::GeneralN => {
            let functions = enumerate(a.n, OracleClass::Balanced)?;
            let rows = balanced_rows(&pair, &functions)?;
            let min_im = rows.iter().map(|r| r.im().abs()).fold(f64::INFINITY, f64::min);
            if min_im <= tol.max(1e-10) {
                problems.push(format!("some balanced function has Im O_m = {min_im:e}"));
            }
            let path = write_rows(cli, &format!("balanced_n{}", a.n), &meta, &rows)?;
            writeln!(stdout, "wrote {} rows to {}", rows.len(), path.display())?;
            writeln!(stdout, "min |Im O_m| over balanced functions: {min_im:.6}")?;
        }
    }
    if problems.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Check(problems.join("; ")))
    }
}

fn parse_bloch(s: &str) -> std::result::Result<BlochVector, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("bad direction {s:?}: {e}")))?;
    match parts.as_slice() {
        [x, y, z] => BlochVector::new(*x, *y, *z).map_err(Failure::from),
        _ => Err(Failure::Usage(format!("direction {s:?} needs three components"))),
    }
}

fn cmd_modular(cli: &Cli, a: &ModularArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let f: BooleanFunction = a.f.parse()?;
    let n = f.input_bits();
    if let Some(expected) = a.n {
        if expected != n {
            return Err(Failure::Usage(format!(
                "--f has {} entries, which needs n = {n}, not {expected}",
                f.table().len()
            )));
        }
    }
    if n < 2 {
        return Err(Failure::Usage(format!("--f must have at least 4 entries, got {}", f.table().len())));
    }
    if classify(&f) == OracleClass::Neither {
        writeln!(stderr, "warning: {f} is neither constant nor balanced")?;
    }
    let meter = MeterConfig::new(parse_bloch(&a.m)?, parse_bloch(&a.r)?, parse_bloch(&a.q)?)?;
    let pair = CanonicalStatePair::for_variant(a.variant.into(), n)?;
    let rep = report(pair.psi_i(), pair.psi_f(), &oracle_unitary(&f), &meter)?;
    let body = serde_json::to_value(&rep).map_err(Error::from)?;
    writeln!(stdout, "{}", serde_json::to_string_pretty(&body).map_err(Error::from)?)?;
    write_json(&cli.out.join("modular.json"), &echo(cli, "modular")?, body)?;
    Ok(EXIT_OK)
}

fn load_search_config(a: &SearchArgs) -> std::result::Result<SearchConfig, Failure> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => SearchConfig::default(),
    };
    if let Some(p) = a.preset {
        cfg.separable_only = p == Preset::Separable;
    }
    if let Some(s) = a.samples {
        cfg.samples = s;
    }
    Ok(cfg)
}

fn cmd_search(cli: &Cli, a: &SearchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let mut cfg = load_search_config(a)?;
    if a.config.is_none() {
        cfg.seed = cli.seed;
    }
    cfg.validate()?;
    let points = run_search(&cfg)?;
    let functions = search::balanced_functions(cfg.n)?.len();
    let frontier = match search::pareto_frontier(&points) {
        Ok(f) => f,
        Err(Error::EmptyAcceptedSet) => {
            writeln!(stderr, "warning: no point passed the filters")?;
            Vec::new()
        }
        Err(e) => return Err(e.into()),
    };
    let meta = metadata("search", &json!({ "cli": cli, "search": cfg, "assumptions": cfg.metadata() }))?;
    let accepted = points.iter().filter(|p| p.accepted).count();
    match cli.format {
        Format::Csv => {
            for (name, set) in [("search_points.csv", &points), ("search_frontier.csv", &frontier)] {
                let mut out = create_with_metadata(&cli.out.join(name), &meta)?;
                search::write_points_csv(&mut out, set, functions)?;
                out.flush()?;
            }
        }
        Format::Json => {
            let body = json!({ "points": points, "frontier": frontier });
            write_json(&cli.out.join("search.json"), &meta, body)?;
        }
    }
    let rho = search::spearman(
        &frontier.iter().map(|p| p.p_postselect).collect::<Vec<_>>(),
        &frontier.iter().map(|p| p.avg_visibility).collect::<Vec<_>>(),
    );
    writeln!(stdout, "samples: {}  accepted: {accepted}  frontier: {}", points.len(), frontier.len())?;
    if let Some(rho) = rho {
        writeln!(stdout, "frontier spearman(p, avg_visibility): {rho:.4}")?;
    }
    for pt in &frontier {
        writeln!(stdout, "  p = {:.4}  avg_visibility = {:.4}", pt.p_postselect, pt.avg_visibility)?;
    }
    Ok(EXIT_OK)
}

const CASES: [(&str, &str); 2] = [("constant", "0000"), ("balanced", "0011")];

fn cmd_shots(cli: &Cli, a: &ShotsArgs, stdout: &mut dyn Write) -> CmdResult {
    if a.shots.contains(&0) || a.repetitions == 0 {
        return Err(Failure::Usage("shot counts and repetitions must be positive".into()));
    }
    let mut noisy = NoiseModel::default();
    if let Some(p) = a.depolarizing {
        noisy.two_qubit_depolarizing = p;
    }
    if let Some(p) = a.readout {
        noisy.readout_flip = p;
    }
    noisy.validate()?;
    let models: Vec<(&str, NoiseModel)> = match a.noise {
        NoiseArg::Off => vec![("noiseless", NoiseModel::noiseless())],
        NoiseArg::Default => vec![("noisy", noisy)],
        NoiseArg::Both => vec![("noiseless", NoiseModel::noiseless()), ("noisy", noisy)],
    };
    let pair = CanonicalStatePair::ibm();
    let meter = MeterConfig::ibm();
    let meta = echo(cli, "shots")?;
    let mut report = Vec::new();
    let mut problems = Vec::new();
    for (m_idx, (label, noise)) in models.iter().enumerate() {
        let mut by_case: Vec<(&str, Vec<RunSummary>)> = Vec::new();
        for (c_idx, (case, bits)) in CASES.iter().enumerate() {
            let f: BooleanFunction = bits.parse().expect("literal");
            let plan = build_plan(&f, &pair, &meter)?;
            let mut runs = Vec::new();
            for &shots in &a.shots {
                let tag = ((m_idx as u64) << 40) | ((c_idx as u64) << 32) | shots as u64;
                let seed = rng::derive_seed(cli.seed, tag);
                runs.push(summarize(&plan, shots, a.repetitions, noise, seed)?);
            }
            by_case.push((case, runs));
        }
        for (case, runs) in &by_case {
            let stem = format!("shots_{label}_{case}");
            match cli.format {
                Format::Csv => {
                    let mut out = create_with_metadata(&cli.out.join(format!("{stem}.csv")), &meta)?;
                    write_summary_csv(&mut out, runs)?;
                    out.flush()?;
                }
                Format::Json => write_json(
                    &cli.out.join(format!("{stem}.json")),
                    &meta,
                    serde_json::to_value(runs).map_err(Error::from)?,
                )?,
            }
            for s in runs {
                let mean_rate =
                    s.postselect_rate_per_run.iter().sum::<f64>() / s.postselect_rate_per_run.len() as f64;
                writeln!(
                    stdout,
                    "{label:9} {case:8} shots={:4}  spin={:+.4} sd={:.4} se={:.4}  rate={:.4}",
                    s.shots_per_run,
                    s.grand_mean.unwrap_or(f64::NAN),
                    s.std_dev,
                    s.std_error,
                    mean_rate
                )?;
                report.push(json!({
                    "noise": label, "case": case, "shots": s.shots_per_run,
                    "grand_mean": s.grand_mean, "std_dev": s.std_dev, "std_error": s.std_error,
                    "mean_postselect_rate": mean_rate,
                }));
            }
        }
        if *label == "noiseless" {
            let (constant, balanced) = (&by_case[0].1, &by_case[1].1);
            for (c, b) in constant.iter().zip(balanced) {
                if let (Some(c_mean), Some(b_mean)) = (c.grand_mean, b.grand_mean) {
                    if b_mean >= c_mean {
                        problems.push(format!(
                            "{} shots: balanced mean {b_mean:.3} not below constant {c_mean:.3}",
                            c.shots_per_run
                        ));
                    }
                }
            }
        }
    }
    write_json(&cli.out.join("shots_summary.json"), &meta, Value::Array(report))?;
    if a.baseline {
        if let Err(Failure::Check(msg)) = baseline_into(cli, stdout) {
            problems.push(msg);
        }
    }
    if problems.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Check(problems.join("; ")))
    }
}

fn baseline_into(cli: &Cli, stdout: &mut dyn Write) -> CmdResult {
    let meta = echo(cli, "baseline")?;
    let mut rows = Vec::new();
    let mut wrong = Vec::new();
    for (i, f) in table1_functions().iter().enumerate() {
        let mut r = rng::stream(cli.seed, i as u64);
        let verdict = baseline_dj(f, &mut r)?;
        let class = classify(f);
        let correct = matches!(
            (class, verdict),
            (OracleClass::Constant, DjVerdict::Constant) | (OracleClass::Balanced, DjVerdict::Balanced)
        );
        if !correct {
            wrong.push(f.to_string());
        }
        let p0 = dj_all_zero_probability(f);
        writeln!(stdout, "{f}  {class:8}  verdict={verdict:?}  p(all zeros)={p0:.3}")?;
        rows.push((f.clone(), class, verdict, p0, correct));
    }
    match cli.format {
        Format::Csv => {
            let mut out = create_with_metadata(&cli.out.join("baseline.csv"), &meta)?;
            writeln!(out, "f,class,verdict,p_all_zero,correct")?;
            for (f, class, verdict, p0, ok) in &rows {
                writeln!(out, "{f},{class},{verdict:?},{p0:.17e},{}", *ok as u8)?;
            }
            out.flush()?;
        }
        Format::Json => {
            let body = rows
                .iter()
                .map(|(f, class, verdict, p0, ok)| {
                    json!({ "f": f, "class": class, "verdict": verdict, "p_all_zero": p0, "correct": ok })
                })
                .collect();
            write_json(&cli.out.join("baseline.json"), &meta, Value::Array(body))?;
        }
    }
    if wrong.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Check(format!("baseline misclassified {}", wrong.join(" "))))
    }
}

fn cmd_baseline(cli: &Cli, stdout: &mut dyn Write) -> CmdResult {
    baseline_into(cli, stdout)
}
