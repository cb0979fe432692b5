//! The `qtamper` command: argument parsing, dispatch and report emission.
//!
//! Each run writes `<out>/<subcommand>.json` holding a [`RunManifest`] and
//! the result, plus a `.timing.json` sidecar with the wall-clock duration.
//! Exit codes: 0 success, 2 an assertion in the report failed (the report
//! is still written), 1 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qtamper_core::haar::{Seed, GENERATOR_VERSION};
use qtamper_core::moments::{exact_moment, first_moment_js, first_moment_ss, mc_moment, MomentSpec, Pattern};
use qtamper_core::perm::verify_lemmas;
use qtamper_core::qamd::{qamd_security_scan, QamdParams, ScanMode};
use qtamper_core::tamper::{family_security_scan, DetectionMode};
use qtamper_core::weingarten::{falling_reciprocal, rising_reciprocal, wg_table, MAX_GRAM_ORDER};

pub mod inputs;
pub mod output;

use inputs::{parse_amplitudes, parse_family, parse_seed_list, parse_unitary_spec, resolve_seed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qtamper", version, about = "Quantum tamper-detection laboratory")]
pub struct Cli {
    /// Directory for reports.
    #[arg(long, global = true, default_value = "reports")]
    pub out: PathBuf,
    /// Worker threads: a positive count or `max`.
    #[arg(long, global = true, default_value = "max", value_parser = parse_jobs)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    if s == "max" {
        return Ok(0);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer or `max`, got {s:?}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Weingarten table Wg(λ, N) for every cycle type λ ⊢ p.
    WeingartenTable(WeingartenArgs),
    /// Exhaustive check of the permutation lemmas.
    PermVerify(PermArgs),
    /// Security scan of the explicit QAMD code.
    QamdScan(QamdArgs),
    /// Exact and Monte Carlo moments of X_js, X_ss or X_m.
    Moments(MomentsArgs),
    /// Tampering experiments over a unitary family and scheme seeds.
    TamperSim(TamperArgs),
    /// Re-run the manifest embedded in a report.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WeingartenArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PermArgs {
    #[arg(long, default_value_t = 7)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(group(clap::ArgGroup::new("scan").required(true).args(["exhaustive", "trials"])))]
pub struct QamdArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub exhaustive: bool,
    /// Random scan with this many (message, tampering) samples.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip the dense state-vector cross-check.
    #[arg(long)]
    pub no_dense: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternArg {
    Js,
    Ss,
    M,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MomentsArgs {
    #[arg(long, value_enum)]
    pub pattern: PatternArg,
    #[arg(long)]
    pub t: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    /// pauli:<label>, file:<path>, random:<seed> or identity.
    #[arg(long)]
    pub unitary: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Message count for pattern m.
    #[arg(long = "K", default_value_t = 2)]
    #[serde(rename = "K")]
    pub k: usize,
    /// Decoded message index for pattern m.
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// `uniform` or comma-separated complex amplitudes for pattern m.
    #[arg(long, default_value = "uniform")]
    pub amplitudes: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Classical,
    Relaxed,
    Weak,
    Quantum,
}

impl From<ModeArg> for DetectionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Classical => Self::Classical,
            ModeArg::Relaxed => Self::Relaxed,
            ModeArg::Weak => Self::Weak,
            ModeArg::Quantum => Self::Quantum,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TamperArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// paulis:COUNT or file:PATH.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "classical")]
    pub mode: ModeArg,
    /// Scheme seeds: `A..B`, `A..=B`, a comma list or one seed.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Seed for drawing a `paulis:COUNT` family.
    #[arg(long)]
    pub family_seed: Option<u64>,
    /// Declared trace bound for file families.
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub min_pass_fraction: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// A report written by an earlier run.
    pub report: PathBuf,
    /// Exit 2 unless the new report is byte-identical to the old one.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub build: String,
    pub subcommand: String,
    pub params: Value,
    pub seeds: Vec<u64>,
    pub generator_version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub passed: bool,
    pub result: Value,
}

/// A resolved subcommand: every seed is explicit, so it replays without
/// the environment.
#[derive(Debug, Clone)]
enum Job {
    Weingarten(WeingartenArgs),
    Perm(PermArgs),
    Qamd(QamdArgs),
    Moments(MomentsArgs),
    Tamper(TamperArgs),
}

struct Outcome {
    passed: bool,
    result: Value,
    seeds: Vec<u64>,
    csv: Option<Vec<u8>>,
}

type CmdResult<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

impl Job {
    fn name(&self) -> &'static str {
        match self {
            Job::Weingarten(_) => "weingarten-table",
            Job::Perm(_) => "perm-verify",
            Job::Qamd(_) => "qamd-scan",
            Job::Moments(_) => "moments",
            Job::Tamper(_) => "tamper-sim",
        }
    }

    fn params(&self) -> Value {
        match self {
            Job::Weingarten(a) => serde_json::to_value(a),
            Job::Perm(a) => serde_json::to_value(a),
            Job::Qamd(a) => serde_json::to_value(a),
            Job::Moments(a) => serde_json::to_value(a),
            Job::Tamper(a) => serde_json::to_value(a),
        }
        .expect("arguments serialize")
    }

    fn from_manifest(m: &RunManifest) -> CmdResult<Self> {
        let p = m.params.clone();
        let bad = |e: serde_json::Error| format!("manifest parameters for {}: {e}", m.subcommand);
        Ok(match m.subcommand.as_str() {
            "weingarten-table" => Job::Weingarten(serde_json::from_value(p).map_err(bad)?),
            "perm-verify" => Job::Perm(serde_json::from_value(p).map_err(bad)?),
            "qamd-scan" => Job::Qamd(serde_json::from_value(p).map_err(bad)?),
            "moments" => Job::Moments(serde_json::from_value(p).map_err(bad)?),
            "tamper-sim" => Job::Tamper(serde_json::from_value(p).map_err(bad)?),
            other => return Err(format!("unknown subcommand {other:?} in manifest")),
        })
    }

    fn resolve(self) -> CmdResult<Self> {
        Ok(match self {
            Job::Qamd(mut a) => {
                if a.trials.is_some() {
                    a.seed = Some(resolve_seed(a.seed).map_err(err)?);
                }
                Job::Qamd(a)
            }
            Job::Moments(mut a) => {
                a.seed = Some(resolve_seed(a.seed).map_err(err)?);
                Job::Moments(a)
            }
            Job::Tamper(mut a) => {
                if a.seeds.is_none() {
                    a.seeds = Some(resolve_seed(None).map_err(err)?.to_string());
                }
                if a.family.starts_with("paulis:") {
                    a.family_seed = Some(resolve_seed(a.family_seed).map_err(err)?);
                }
                Job::Tamper(a)
            }
            other => other,
        })
    }

    fn execute(&self) -> CmdResult<Outcome> {
        match self {
            Job::Weingarten(a) => weingarten(a),
            Job::Perm(a) => perm(a),
            Job::Qamd(a) => qamd(a),
            Job::Moments(a) => moments(a),
            Job::Tamper(a) => tamper(a),
        }
    }
}

fn weingarten(a: &WeingartenArgs) -> CmdResult<Outcome> {
    let table = wg_table(a.p, a.n).map_err(err)?;
    let classes: Vec<Value> = table
        .values()
        .iter()
        .map(|(ct, v)| {
            json!({
                "cycle_type": ct.to_string(),
                "class_size": table.class_size(ct),
                "value": v,
                "value_f64": v.to_f64(),
            })
        })
        .collect();
    let sum = table.sum();
    let abs_sum = table.abs_sum();
    let sum_cf = rising_reciprocal(a.p, a.n);
    let abs_cf = falling_reciprocal(a.p, a.n);
    let holds = sum == sum_cf && abs_sum == abs_cf;
    Ok(Outcome {
        passed: holds,
        result: json!({
            "p": a.p,
            "N": a.n,
            "route": if a.p <= MAX_GRAM_ORDER { "gram" } else { "class" },
            "classes": classes,
            "sum": sum,
            "sum_closed_form": sum_cf,
            "abs_sum": abs_sum,
            "abs_sum_closed_form": abs_cf,
            "identities_hold": holds,
        }),
        seeds: vec![],
        csv: None,
    })
}

fn perm(a: &PermArgs) -> CmdResult<Outcome> {
    let reports = verify_lemmas(a.n_max).map_err(err)?;
    let total: usize = reports.iter().map(|r| r.counterexamples.len()).sum();
    Ok(Outcome {
        passed: total == 0,
        result: json!({
            "n_max": a.n_max,
            "lemmas": reports,
            "total_counterexamples": total,
        }),
        seeds: vec![],
        csv: None,
    })
}

fn qamd(a: &QamdArgs) -> CmdResult<Outcome> {
    let params = QamdParams::new(a.q, a.d).map_err(err)?;
    let (mode, seed) = match a.trials {
        Some(trials) if !a.exhaustive => (ScanMode::Random { trials }, a.seed.unwrap_or(0)),
        _ => (ScanMode::Exhaustive, 0),
    };
    let report = qamd_security_scan(&params, mode, Seed(seed), !a.no_dense).map_err(err)?;
    Ok(Outcome {
        passed: report.passed,
        result: serde_json::to_value(&report).map_err(err)?,
        seeds: if a.trials.is_some() { vec![seed] } else { vec![] },
        csv: None,
    })
}

/// Allowed |exact − Monte Carlo| in standard errors.
const MC_AGREEMENT_SIGMAS: f64 = 4.0;

fn moments(a: &MomentsArgs) -> CmdResult<Outcome> {
    let seed = a.seed.unwrap_or(0);
    let u = parse_unitary_spec(&a.unitary, a.n).map_err(err)?;
    let spec = match a.pattern {
        PatternArg::Js => MomentSpec::codeword(Pattern::OffDiagonalJs, a.t, u.clone()),
        PatternArg::Ss => MomentSpec::codeword(Pattern::DiagonalSs, a.t, u.clone()),
        PatternArg::M => {
            let amps = parse_amplitudes(&a.amplitudes, a.k).map_err(err)?;
            MomentSpec::message(a.m, a.t, u.clone(), amps)
        }
    }
    .map_err(err)?;
    let exact = exact_moment(&spec).map_err(err)?;
    let mc = mc_moment(&spec, a.trials, Seed(seed)).map_err(err)?;
    let closed_form = match (a.pattern, a.t) {
        (PatternArg::Js, 1) => Some(first_moment_js(&u).map_err(err)?),
        (PatternArg::Ss, 1) => Some(first_moment_ss(&u).map_err(err)?),
        _ => None,
    };
    let agrees = mc.agrees_with(exact.value, MC_AGREEMENT_SIGMAS);
    Ok(Outcome {
        passed: agrees,
        result: json!({
            "pattern": a.pattern,
            "t": a.t,
            "N": a.n,
            "K": spec.k(),
            "trace_abs": u.trace().norm(),
            "exact": exact.value,
            "exact_imaginary_residue": exact.imaginary_residue,
            "beta_weights": exact.weights,
            "mc_estimate": mc.mean,
            "mc_stderr": mc.stderr,
            "mc_trials": mc.trials,
            "closed_form": closed_form,
            "agreement_sigmas": MC_AGREEMENT_SIGMAS,
            "exact_mc_agree": agrees,
        }),
        seeds: vec![seed],
        csv: None,
    })
}

fn tamper(a: &TamperArgs) -> CmdResult<Outcome> {
    let seeds = parse_seed_list(a.seeds.as_deref().unwrap_or("0")).map_err(err)?;
    let family = parse_family(&a.family, a.n, a.family_seed.unwrap_or(0), a.phi).map_err(err)?;
    let seed_list: Vec<Seed> = seeds.iter().copied().map(Seed).collect();
    let report = family_security_scan(
        a.n,
        a.k,
        &family,
        a.epsilon,
        &seed_list,
        a.mode.into(),
        a.min_pass_fraction,
    )
    .map_err(err)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "seed",
        "member",
        "message",
        "p_same",
        "p_diff",
        "p_perp",
        "detection",
        "fidelity_given_pass",
    ])
    .map_err(err)?;
    for r in &report.rows {
        csv.write_record([
            r.seed.to_string(),
            r.member.clone(),
            r.message.map_or(String::new(), |m| m.to_string()),
            output::fmt_f64(r.p_same),
            output::fmt_f64(r.p_diff),
            output::fmt_f64(r.p_perp),
            output::fmt_f64(r.detection),
            r.fidelity_given_pass.map_or(String::new(), output::fmt_f64),
        ])
        .map_err(err)?;
    }
    let csv = csv.into_inner().map_err(err)?;

    let mut result = serde_json::to_value(&report).map_err(err)?;
    let obj = result.as_object_mut().expect("report is an object");
    obj.remove("rows");
    obj.insert("cells".into(), json!(report.rows.len()));
    obj.insert("cells_csv".into(), json!("tamper-sim.csv"));
    let mut all_seeds = seeds;
    if let Some(fs) = a.family_seed {
        all_seeds.push(fs);
    }
    Ok(Outcome {
        passed: report.passed,
        result,
        seeds: all_seeds,
        csv: Some(csv),
    })
}

fn manifest(job: &Job, seeds: Vec<u64>) -> RunManifest {
    RunManifest {
        tool: "qtamper".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        build: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).into(),
        subcommand: job.name().into(),
        params: job.params(),
        seeds,
        generator_version: GENERATOR_VERSION.into(),
    }
}

/// Runs a job and writes its files; returns the report text and pass flag.
fn run_job(job: &Job, out: &Path, jobs: usize) -> CmdResult<(String, bool)> {
    let start = Instant::now();
    let outcome = job.execute()?;
    let elapsed = start.elapsed().as_secs_f64();
    let report = Report {
        manifest: manifest(job, outcome.seeds),
        passed: outcome.passed,
        result: outcome.result,
    };
    let text = output::to_json(&report).map_err(err)?;
    fs::create_dir_all(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
    let name = job.name();
    let path = out.join(format!("{name}.json"));
    fs::write(&path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    if let Some(csv) = outcome.csv {
        let csv_path = out.join(format!("{name}.csv"));
        fs::write(&csv_path, csv).map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
    }
    let timing = json!({ "wall_clock_seconds": elapsed, "jobs": jobs });
    output::write_json(&out.join(format!("{name}.timing.json")), &timing).map_err(err)?;
    Ok((text, report.passed))
}

fn dispatch(cli: Cli) -> CmdResult<i32> {
    let threads = rayon::current_num_threads();
    let (job, original) = match cli.command {
        Command::WeingartenTable(a) => (Job::Weingarten(a), None),
        Command::PermVerify(a) => (Job::Perm(a), None),
        Command::QamdScan(a) => (Job::Qamd(a), None),
        Command::Moments(a) => (Job::Moments(a), None),
        Command::TamperSim(a) => (Job::Tamper(a), None),
        Command::Replay(r) => {
            let text = fs::read_to_string(&r.report)
                .map_err(|e| format!("cannot read {}: {e}", r.report.display()))?;
            let report: Report = serde_json::from_str(&text)
                .map_err(|e| format!("{} is not a qtamper report: {e}", r.report.display()))?;
            let job = Job::from_manifest(&report.manifest)?;
            (job, r.check.then_some(text))
        }
    };
    let job = job.resolve()?;
    let (text, passed) = run_job(&job, &cli.out, threads)?;
    if let Some(original) = original {
        if original != text {
            eprintln!("replayed report differs from the original");
            return Ok(EXIT_ASSERTION);
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_ASSERTION })
}

/// Entry point shared by the binary and tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cli.jobs > 0 {
        builder = builder.num_threads(cli.jobs);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_INPUT;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}
