//! Command-line front end. [`run`] parses arguments, writes to the supplied
//! streams and returns the process exit code: 0 success, 1 a check failed,
//! 2 bad usage or input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::planner::{self, AntennaConfig, BlockPlan, ORACLE_MAX_ANTENNAS};
use crate::rational::Rational;
use crate::realmap::TolerancePolicy;
use crate::sim::{run_trials, TrialConfig};
use crate::verify::certify;
use crate::GOLDEN_EXAMPLES;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the log filter.
pub const LOG_ENV: &str = "XCHAN_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "xchan",
    version,
    about = "Interference alignment planning for 2x2 MIMO X channels"
)]
struct Cli {
    /// Worker threads for sweep, verify and simulate (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    #[arg(long)]
    m1: u32,
    #[arg(long)]
    m2: u32,
    #[arg(long)]
    n1: u32,
    #[arg(long)]
    n2: u32,
}

impl ConfigArgs {
    fn cfg(&self) -> AntennaConfig {
        AntennaConfig::new(self.m1, self.m2, self.n1, self.n2)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the case, block lengths, DoF, outer bound and gap.
    Plan {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate every valid configuration up to K antennas as CSV.
    Sweep {
        #[arg(long = "max-antennas", value_name = "K")]
        max_antennas: u32,
        /// Also run the brute-force optimum (K <= 8) and fail on any mismatch.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Synthesize and certify precoders over many channel draws.
    Verify {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// First channel seed; draws use seed, seed+1, ...
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo symbol-error and slope run from a JSON config.
    Simulate {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Override the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the nine worked configurations end to end.
    Examples {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Install the `XCHAN_LOG`-driven logger (no-op if one is already set).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}

pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(err, "error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FAILED;
        }
    };
    let result = pool.install(|| dispatch(cli.command, out, err));
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn failed(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_FAILED,
        message: message.to_string(),
    }
}

fn dispatch(
    cmd: Command,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<i32, Failure> {
    match cmd {
        Command::Plan {
            cfg,
            json,
            out: path,
        } => cmd_plan(&cfg.cfg(), json, path.as_deref(), out),
        Command::Sweep {
            max_antennas,
            oracle,
            csv,
        } => cmd_sweep(max_antennas, oracle, csv.as_deref(), out, err),
        Command::Verify {
            cfg,
            seeds,
            seed,
            json,
            out: path,
        } => cmd_verify(&cfg.cfg(), seeds, seed, json, path.as_deref(), out, err),
        Command::Simulate {
            config,
            seed,
            format,
            out: path,
        } => cmd_simulate(&config, seed, format, path.as_deref(), out),
        Command::Examples { seed } => cmd_examples(seed, out),
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut (dyn Write + Send)) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))
        }
        None => out.write_all(text.as_bytes()).map_err(failed),
    }
}

pub fn render_plan(p: &BlockPlan) -> String {
    let row = |name: &str, b: [u32; 3]| format!("{name}  {} {} {}\n", b[0], b[1], b[2]);
    let scenario = match p.scenario() {
        planner::Scenario::TransmitRich => "transmit-rich",
        planner::Scenario::ReceiveRich => "receive-rich",
    };
    let mut s = format!("config {}\ncase {} ({scenario})\n", p.cfg, p.tag);
    s += &row("L", p.blocks.l);
    s += &row("K", p.blocks.k);
    s += &row("J", p.blocks.j);
    s += &row("G", p.blocks.g);
    s += &format!("Q11={} Q21={} Q12={} Q22={}\n", p.q11, p.q21, p.q12, p.q22);
    s += &format!("dof {}\nbound {}\ngap {}\n", p.dof, p.outer_bound, p.gap());
    s
}

fn cmd_plan(
    cfg: &AntennaConfig,
    json: bool,
    path: Option<&Path>,
    out: &mut (dyn Write + Send),
) -> Result<i32, Failure> {
    let p = planner::plan(cfg).map_err(usage)?;
    let text = if json {
        serde_json::to_string_pretty(&p).map_err(failed)? + "\n"
    } else {
        render_plan(&p)
    };
    emit(path, &text, out)?;
    Ok(EXIT_OK)
}

struct SweepRow {
    plan: BlockPlan,
    oracle: Option<Option<Rational>>,
}

fn cmd_sweep(
    k: u32,
    oracle: bool,
    path: Option<&Path>,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<i32, Failure> {
    if k == 0 {
        return Err(usage("--max-antennas must be at least 1"));
    }
    if oracle && k > ORACLE_MAX_ANTENNAS {
        return Err(usage(format!(
            "--oracle needs --max-antennas <= {ORACLE_MAX_ANTENNAS}"
        )));
    }
    // Unsupported geometries have no plan and are left out of the table.
    let plans: Vec<BlockPlan> = AntennaConfig::enumerate(k)
        .iter()
        .filter_map(|c| planner::plan(c).ok())
        .collect();
    let rows: Vec<SweepRow> = plans
        .into_par_iter()
        .map(|plan| {
            let o =
                oracle.then(|| planner::oracle_max_dof(&plan.cfg).expect("within oracle scope"));
            SweepRow { plan, oracle: o }
        })
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["m1", "m2", "n1", "n2", "case", "dof", "bound", "gap"];
    if oracle {
        header.push("oracle_dof");
    }
    w.write_record(&header).map_err(failed)?;
    let mut mismatches = 0;
    for r in &rows {
        let p = &r.plan;
        let mut rec = vec![
            p.cfg.m1.to_string(),
            p.cfg.m2.to_string(),
            p.cfg.n1.to_string(),
            p.cfg.n2.to_string(),
            p.tag.case.to_string(),
            p.dof.to_string(),
            p.outer_bound.to_string(),
            p.gap().to_string(),
        ];
        if let Some(o) = r.oracle {
            rec.push(o.map(|x| x.to_string()).unwrap_or_else(|| "none".into()));
            if o != Some(p.dof) {
                mismatches += 1;
                let _ = writeln!(
                    err,
                    "oracle mismatch at {}: plan {}, oracle {:?}",
                    p.cfg, p.dof, o
                );
            }
        }
        w.write_record(&rec).map_err(failed)?;
    }
    let bytes = w.into_inner().map_err(failed)?;
    emit(path, &String::from_utf8(bytes).map_err(failed)?, out)?;
    if mismatches > 0 {
        return Err(failed(format!("{mismatches} oracle mismatches")));
    }
    Ok(EXIT_OK)
}

fn cmd_verify(
    cfg: &AntennaConfig,
    seeds: u64,
    first: u64,
    json: bool,
    path: Option<&Path>,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<i32, Failure> {
    let p = planner::plan(cfg).map_err(usage)?;
    let pol = TolerancePolicy::default();
    let results: Vec<_> = (first..first + seeds)
        .into_par_iter()
        .map(|s| (s, certify(&p, s, &pol)))
        .collect();
    let mut passed = 0;
    let mut reports = Vec::new();
    for (s, res) in results {
        match res {
            Ok((_, _, rep)) => {
                if rep.passed() && rep.achieved_dof == p.dof {
                    passed += 1;
                } else {
                    let _ = writeln!(
                        err,
                        "seed {s}: failed {:?}, achieved dof {}",
                        rep.failures(),
                        rep.achieved_dof
                    );
                }
                reports.push(serde_json::json!({ "seed": s, "report": rep }));
            }
            Err(e) => {
                let _ = writeln!(err, "seed {s}: {e}");
                reports.push(serde_json::json!({ "seed": s, "error": e.to_string() }));
            }
        }
    }
    let text = if json {
        let doc = serde_json::json!({
            "config": cfg,
            "dof": p.dof,
            "seeds": seeds,
            "passed": passed,
            "trials": reports,
        });
        serde_json::to_string_pretty(&doc).map_err(failed)? + "\n"
    } else {
        format!(
            "{cfg} case {} dof={}: {passed}/{seeds} pass\n",
            p.tag.case, p.dof
        )
    };
    emit(path, &text, out)?;
    Ok(if passed == seeds {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_simulate(
    config: &Path,
    seed: Option<u64>,
    format: Format,
    path: Option<&Path>,
    out: &mut (dyn Write + Send),
) -> Result<i32, Failure> {
    let raw = fs::read_to_string(config)
        .map_err(|e| usage(format!("cannot read {}: {e}", config.display())))?;
    let mut tc: TrialConfig = serde_json::from_str(&raw)
        .map_err(|e| usage(format!("bad config {}: {e}", config.display())))?;
    if let Some(s) = seed {
        tc.seed = s;
    }
    tc.validate().map_err(usage)?;
    planner::plan(&tc.cfg).map_err(usage)?;
    let res = run_trials(&tc).map_err(failed)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&res).map_err(failed)? + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            res.write_csv(&mut buf).map_err(failed)?;
            String::from_utf8(buf).map_err(failed)?
        }
    };
    emit(path, &text, out)?;
    Ok(EXIT_OK)
}

fn cmd_examples(seed: u64, out: &mut (dyn Write + Send)) -> Result<i32, Failure> {
    let pol = TolerancePolicy::default();
    let mut all_ok = true;
    for ((m1, m2, n1, n2), (num, den)) in GOLDEN_EXAMPLES {
        let cfg = AntennaConfig::new(m1, m2, n1, n2);
        let expected = Rational::new(num, den);
        let line = match planner::plan(&cfg) {
            Ok(p) => match certify(&p, seed, &pol) {
                Ok((_, _, rep))
                    if p.dof == expected && rep.passed() && rep.achieved_dof == expected =>
                {
                    format!("{cfg} dof={} OK", p.dof)
                }
                Ok((_, _, rep)) => {
                    all_ok = false;
                    format!(
                        "{cfg} dof={} FAIL (expected {expected}, achieved {}, failed {:?})",
                        p.dof,
                        rep.achieved_dof,
                        rep.failures()
                    )
                }
                Err(e) => {
                    all_ok = false;
                    format!("{cfg} dof={} FAIL ({e})", p.dof)
                }
            },
            Err(e) => {
                all_ok = false;
                format!("{cfg} FAIL ({e})")
            }
        };
        writeln!(out, "{line}").map_err(failed)?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILED })
}
