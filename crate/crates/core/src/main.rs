use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seqwit::explore::{find_violation_window, optimize_settings, OptimizeConfig, Target};
use seqwit::lab::{self, fmt_sci, RateRow};
use seqwit::randomness::EntropyReport;
use seqwit::witness::{evaluate_scenario, violation};
use seqwit::{build_table, Error, Pair, Scenario, ScenarioKind, WeakCoupling, WitnessKind};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "seqwit", version, about = "Three-observer dimension witnesses with weak measurement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    W1,
    W2,
}

impl From<ScenarioArg> for ScenarioKind {
    fn from(a: ScenarioArg) -> Self {
        match a {
            ScenarioArg::W1 => ScenarioKind::W1,
            ScenarioArg::W2 => ScenarioKind::W2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    W1ab,
    W1ac,
    W2ab,
    W2ac,
}

impl From<TargetArg> for Target {
    fn from(a: TargetArg) -> Self {
        let (kind, pair) = match a {
            TargetArg::W1ab => (WitnessKind::W1, Pair::AB),
            TargetArg::W1ac => (WitnessKind::W1, Pair::AC),
            TargetArg::W2ab => (WitnessKind::W2, Pair::AB),
            TargetArg::W2ac => (WitnessKind::W2, Pair::AC),
        };
        Target { kind, pair }
    }
}

#[derive(clap::Args)]
struct ScenarioOpts {
    /// Canonical settings to use.
    #[arg(long, value_enum, default_value = "w1")]
    scenario: ScenarioArg,
    /// TOML scenario file; overrides --scenario.
    #[arg(long)]
    scenario_file: Option<PathBuf>,
}

impl ScenarioOpts {
    fn load(&self) -> seqwit::Result<Scenario> {
        match &self.scenario_file {
            Some(path) => Scenario::load(path),
            None => Ok(ScenarioKind::from(self.scenario).canonical()),
        }
    }
}

#[derive(clap::Args)]
struct RangeOpts {
    /// First coupling of the grid, in radians.
    #[arg(long, default_value_t = 0.0)]
    eps_start: f64,
    /// Last coupling of the grid (included), at most pi.
    #[arg(long, default_value_t = PI)]
    eps_end: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 101)]
    steps: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Witness and entropy curves over a grid of couplings (CSV or JSON).
    Sweep {
        #[command(flatten)]
        scenario: ScenarioOpts,
        #[command(flatten)]
        range: RangeOpts,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Double-violation windows found by bisection.
    Thresholds {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Multi-start search for settings maximizing a witness.
    Optimize {
        #[arg(long, value_enum, default_value = "w1ab")]
        target: TargetArg,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 2000)]
        max_iterations: usize,
        /// Also search over mixed preparations.
        #[arg(long)]
        mixed: bool,
        /// Write the best scenario as TOML.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified randomness curves; with --eps, the full entropy report of one table.
    Randomness {
        #[command(flatten)]
        scenario: ScenarioOpts,
        #[command(flatten)]
        range: RangeOpts,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump all 64 joint probabilities p(b,c|x,y,z) as JSON.
    Table {
        #[command(flatten)]
        scenario: ScenarioOpts,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the simulation against every closed form and invariant.
    Verify {
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &mut dyn Write, v: &serde_json::Value) -> seqwit::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn rounded<T: serde::Serialize>(rows: &[T]) -> serde_json::Value {
    let mut v = serde_json::to_value(rows).expect("plain numeric rows");
    round_numbers(&mut v);
    v
}

fn round_numbers(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(lab::round12(f)) {
                    *n = r;
                }
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_numbers),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn run(cli: Cli) -> seqwit::Result<u8> {
    match cli.command {
        Command::Sweep { scenario, range, format, out } => {
            let s = scenario.load()?;
            let rows = lab::run_sweep(&s, range.eps_start, range.eps_end, range.steps)?;
            let mut w = open_out(&out)?;
            match format {
                Format::Csv => lab::write_sweep_csv(&mut w, &rows)?,
                Format::Json => write_json(&mut w, &rounded(&rows))?,
            }
            w.flush()?;
        }
        Command::Thresholds { tol, format } => {
            let w1 = find_violation_window(WitnessKind::W1, tol)?;
            let w2 = find_violation_window(WitnessKind::W2, tol)?;
            let s = ScenarioKind::W1.canonical();
            let mid = 0.5 * (w1.lo + w1.hi);
            let at_mid =
                |pair| evaluate_scenario(&s, WeakCoupling::new(mid).expect("inside window"), WitnessKind::W1, pair);
            let mut w = open_out(&None)?;
            match format {
                Format::Csv => {
                    writeln!(w, "kind,lo,hi,midpoint,w1_ab_mid,w1_ac_mid")?;
                    writeln!(
                        w,
                        "w1,{},{},{},{},{}",
                        fmt_sci(w1.lo),
                        fmt_sci(w1.hi),
                        fmt_sci(mid),
                        fmt_sci(at_mid(Pair::AB)),
                        fmt_sci(at_mid(Pair::AC))
                    )?;
                    writeln!(w, "w2,{},{},,,", fmt_sci(w2.lo), fmt_sci(w2.hi))?;
                }
                Format::Json => {
                    let v = serde_json::json!({
                        "w1": { "lo": w1.lo, "hi": w1.hi, "midpoint": mid,
                                "w1_ab_mid": at_mid(Pair::AB), "w1_ac_mid": at_mid(Pair::AC) },
                        "w2": { "lo": w2.lo, "hi": w2.hi, "open": true },
                    });
                    let mut v = v;
                    round_numbers(&mut v);
                    write_json(&mut w, &v)?;
                }
            }
            w.flush()?;
        }
        Command::Optimize { target, eps, seed, restarts, tol, max_iterations, mixed, out } => {
            let target = Target::from(target);
            let mut cfg = OptimizeConfig::new(target, WeakCoupling::new(eps)?);
            cfg.seed = seed;
            cfg.restarts = restarts;
            cfg.tolerance = tol;
            cfg.max_iterations = max_iterations;
            cfg.allow_mixed = mixed;
            let result = optimize_settings(&cfg)?;
            let v = violation(target.kind, result.value);
            let mut w = open_out(&None)?;
            writeln!(w, "value = {}", fmt_sci(result.value))?;
            writeln!(w, "quantum_bound = {}", fmt_sci(target.kind.quantum_bound()))?;
            writeln!(w, "violates_classical = {}", v.violated)?;
            writeln!(w, "restart = {}", result.restart)?;
            writeln!(w, "converged = {}", result.converged)?;
            writeln!(w, "evaluations = {}", result.evaluations)?;
            writeln!(w, "max_evaluated = {}", fmt_sci(result.max_evaluated))?;
            writeln!(w, "\n# best scenario")?;
            write!(w, "{}", result.scenario.to_toml_string()?)?;
            w.flush()?;
            if let Some(path) = out {
                result.scenario.save(path)?;
            }
        }
        Command::Randomness { scenario, range, eps, format, out } => {
            let mut w = open_out(&out)?;
            match eps {
                Some(e) => {
                    let s = scenario.load()?;
                    let report = EntropyReport::evaluate(&build_table(&s, WeakCoupling::new(e)?))?;
                    match format {
                        Format::Csv => {
                            let header = [
                                "epsilon",
                                "hmin_global_exact",
                                "hmin_local_bob_exact",
                                "hmin_global_bound",
                                "h_bob_certified_w1",
                                "h_bob_certified_w2",
                                "h_charlie_certified",
                            ];
                            let row = vec![
                                report.epsilon,
                                report.hmin_global_exact,
                                report.hmin_local_bob_exact,
                                report.hmin_global_bound,
                                report.h_bob_certified_w1,
                                report.h_bob_certified_w2,
                                report.h_charlie_certified,
                            ];
                            lab::write_csv(&mut w, &header, [row])?;
                        }
                        Format::Json => write_json(&mut w, &rounded(&[report]))?,
                    }
                }
                None => {
                    let rows = lab::run_rates(range.eps_start, range.eps_end, range.steps)?;
                    match format {
                        Format::Csv => lab::write_csv(&mut w, &RateRow::HEADER, rows.iter().map(RateRow::values))?,
                        Format::Json => write_json(&mut w, &rounded(&rows))?,
                    }
                }
            }
            w.flush()?;
        }
        Command::Table { scenario, eps, out } => {
            let s = scenario.load()?;
            let t = build_table(&s, WeakCoupling::new(eps)?);
            let mut w = open_out(&out)?;
            write_json(&mut w, &lab::table_json(&t))?;
            w.flush()?;
        }
        Command::Verify { steps, tol, format } => {
            let report = lab::run_verify(steps, tol)?;
            let mut w = open_out(&None)?;
            match format {
                Some(Format::Json) => write_json(&mut w, &report.to_json())?,
                Some(Format::Csv) => {
                    let mut csv = csv::Writer::from_writer(&mut w);
                    for c in &report.checks {
                        csv.serialize(c).map_err(|e| Error::Io(io::Error::other(e)))?;
                    }
                    csv.flush()?;
                }
                None => {
                    for c in report.failures() {
                        writeln!(
                            w,
                            "FAIL {} eps={} expected={} actual={} |error|={:e}",
                            c.check_name,
                            fmt_sci(c.epsilon),
                            fmt_sci(c.expected),
                            fmt_sci(c.actual),
                            c.abs_error
                        )?;
                    }
                    let failed = report.failures().count();
                    writeln!(
                        w,
                        "{} checks, {} failed, max |error| = {:e}, tolerance = {:e}",
                        report.checks.len(),
                        failed,
                        report.max_abs_error(),
                        tol
                    )?;
                }
            }
            w.flush()?;
            if !report.passed() {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
