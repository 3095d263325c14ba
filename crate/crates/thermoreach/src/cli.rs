//! Command-line surface. Six subcommands cover the engines: `reach`
//! (closure construction), `check` (membership with protocol synthesis),
//! `protocol` (replay and verification), `gep` (monotone certification of
//! a trajectory), `simulate` (schedules and fixed-rate evolutions), and
//! `app` (the case-study sweeps).
//!
//! Exit codes: 0 success or feasible, 2 usage error, 3 infeasible or
//! violated, 4 undecided (a search bound was hit), 5 internal error. Every
//! run prints a metadata line (version, mode, tolerance, seed, wall time)
//! on stderr; artifacts on stdout or `--out` stay byte-deterministic.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::apps::{
    catalysis_curve, cooling_curve, hbac_optimize, photoisomerization_yield,
    work_extraction_curve, CatalysisParams, CoolingParams, HbacParams,
    PhotoisomerizationParams, SweepResult, WorkExtractionParams,
};
use crate::context::{GibbsContext, Population};
use crate::error::{Error, Result};
use crate::gep::{verify_monotone, DivergenceFamily};
use crate::io;
use crate::reach::{build_reach_set, is_reachable, ReachDecision, ReachOptions};
use crate::scalar::{ArithmeticMode, Scalar};
use crate::thermalization::{ControlSequence, MtpGenerator, Trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_UNDECIDED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "thermoreach",
    version,
    about = "Reachability, protocols, and monotones for elementary thermalization dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Arithmetic: exact rationals or IEEE floats with tolerance slack.
    #[arg(long, global = true, default_value = "rational")]
    mode: String,

    /// Comparison slack in float mode and normalization slack on inputs.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Cap on full thermalizations per explored path.
    #[arg(long, global = true)]
    depth_bound: Option<usize>,

    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format where a choice exists (json or csv).
    #[arg(long, global = true)]
    format: Option<String>,
}

/// Ways to specify the stationary environment; exactly one is required.
#[derive(Args, Debug)]
struct ContextArgs {
    /// Context JSON file.
    #[arg(long)]
    context: Option<PathBuf>,

    /// Inline stationary weights, e.g. "2,1" or "1/2,1/3,1/6".
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<String>>,

    /// Inline ascending energy levels, e.g. "0,1,2"; requires --beta.
    #[arg(long, value_delimiter = ',')]
    energies: Option<Vec<f64>>,

    /// Inverse temperature for --energies.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the full closure reachable from a source state.
    Reach {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Source population: a path or an inline comma list.
        #[arg(long)]
        from: String,
    },
    /// Decide whether a target is reachable from a source; synthesize and
    /// verify a protocol when it is.
    Check {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Source population: a path or an inline comma list.
        #[arg(long)]
        from: String,
        /// Target population: a path or an inline comma list.
        #[arg(long)]
        to: String,
        /// Also write the bare protocol to this path.
        #[arg(long)]
        protocol_out: Option<PathBuf>,
    },
    /// Replay a protocol file against a source state.
    Protocol {
        /// Protocol JSON file.
        file: PathBuf,
        #[command(flatten)]
        ctx: ContextArgs,
        /// Apply the protocol and emit the visited states.
        #[arg(long)]
        replay: bool,
        /// Source population: a path or an inline comma list.
        #[arg(long)]
        from: String,
        /// Expected final population; mismatch beyond the residual
        /// tolerance exits 3.
        #[arg(long)]
        expect: Option<String>,
        /// Largest allowed entry difference from --expect.
        #[arg(long, default_value_t = 1e-9)]
        residual: f64,
        /// Intermediate samples per step in the emitted trajectory.
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Verify the monotone families along a trajectory table.
    Gep {
        /// Trajectory CSV (header t,p_1..p_d).
        trajectory: PathBuf,
        #[command(flatten)]
        ctx: ContextArgs,
        /// Comma list such as "shannon,vacancy,renyi:2,tsallis:0.5,absolute:0.3".
        #[arg(long)]
        families: Option<String>,
        /// Allowed dip between consecutive samples.
        #[arg(long, default_value_t = 1e-9)]
        monotone_tol: f64,
        /// Also write per-family values as CSV to this path.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Run a protocol or a fixed-rate evolution and emit the trajectory.
    Simulate {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Source population: a path or an inline comma list.
        #[arg(long)]
        from: String,
        /// Protocol JSON to run.
        #[arg(long)]
        protocol: Option<PathBuf>,
        /// Rate-matrix JSON (object with a "rates" row-major array) to
        /// evolve under; float mode only.
        #[arg(long)]
        rates: Option<PathBuf>,
        /// Total evolution time under --rates.
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        /// Number of evenly spaced samples (per step for protocols, total
        /// for evolutions).
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
    /// Case-study sweeps; each emits a plottable CSV and optionally a JSON
    /// bundle with protocols and metadata.
    App {
        #[command(subcommand)]
        which: AppCommand,
    },
}

#[derive(Subcommand, Debug)]
enum AppCommand {
    /// Minimal battery-charging error versus extracted work.
    WorkExtraction {
        #[arg(long, default_value_t = 2.0)]
        beta_s: f64,
        #[arg(long, default_value_t = 1.0)]
        beta_e: f64,
        /// Battery splittings in system-splitting units.
        #[arg(long, value_delimiter = ',')]
        w_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-6)]
        eps_tol: f64,
        /// JSON bundle output path.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Ground-population gain from one inversion-cooling round.
    Cooling {
        #[arg(long, value_delimiter = ',')]
        beta_grid: Option<Vec<f64>>,
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Coldest reachable temperature, alone and with a qubit catalyst.
    Catalysis {
        #[arg(long, value_delimiter = ',')]
        beta_e_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1.0)]
        catalyst_gap: f64,
        #[arg(long)]
        catalyst_beta: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        fin_tol: f64,
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// One optimal cooling round over all two-qubit permutations.
    Hbac {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Round input for the target qubit: a path or inline comma list;
        /// defaults to thermal at twice the bath's inverse temperature.
        #[arg(long)]
        round_input: Option<String>,
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Best switching probability for a three-level photoswitch.
    Photoisomerization {
        #[arg(long, default_value_t = 0.2)]
        p00: f64,
        /// Three ascending energies.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        levels: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        mc_samples: usize,
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
}

/// Parses and dispatches one invocation, returning the process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_thread_pool();
    let started = Instant::now();
    let outcome = dispatch(&cli);
    let wall_ms = started.elapsed().as_millis();
    eprintln!(
        "# thermoreach {} mode={} tolerance={} seed={} wall_ms={}",
        env!("CARGO_PKG_VERSION"),
        cli.mode,
        cli.tolerance.map_or("default".into(), |t| t.to_string()),
        cli.seed.map_or("none".into(), |s| s.to_string()),
        wall_ms
    );
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

/// Everything a caller can cause with bad arguments or bad files is a
/// usage error; code 5 is reserved for broken internal invariants.
fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::DepthBoundHit => EXIT_UNDECIDED,
        Error::CurveArgOutOfRange
        | Error::SigmaParamOutOfRange
        | Error::DescentPrecondition(_)
        | Error::NoProgress { .. }
        | Error::BisectionBracket(_)
        | Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

/// Honors the thread-count cap once per process; later calls are no-ops.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("THERMOREACH_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn parse_mode(cli: &Cli) -> Result<ArithmeticMode> {
    cli.mode.parse()
}

fn load_context(cli: &Cli, args: &ContextArgs) -> Result<GibbsContext> {
    let mode = parse_mode(cli)?;
    let ctx = if let Some(path) = &args.context {
        io::read_context(path, Some(mode))?
    } else if let Some(gamma) = &args.gamma {
        let v = json!({ "mode": mode.to_string(), "gamma": gamma });
        io::context_from_json(&v, Some(mode))?
    } else if let Some(energies) = &args.energies {
        let beta = args
            .beta
            .ok_or_else(|| Error::Schema("--energies requires --beta".into()))?;
        GibbsContext::from_energies(energies, beta, mode)?
    } else {
        return Err(Error::Schema(
            "specify the environment with --context, --gamma, or --energies/--beta".into(),
        ));
    };
    match cli.tolerance {
        Some(t) => ctx.with_eta(t),
        None => Ok(ctx),
    }
}

/// A population argument: inline when it contains a comma, a file path
/// otherwise.
fn load_population(ctx: &GibbsContext, arg: &str) -> Result<Population> {
    if arg.contains(',') {
        let entries: Vec<&str> = arg.split(',').map(str::trim).collect();
        ctx.population_from_strs(&entries)
    } else {
        io::read_population(Path::new(arg), ctx)
    }
}

fn reach_options(cli: &Cli) -> ReachOptions {
    ReachOptions {
        depth_bound: cli.depth_bound,
        ..ReachOptions::default()
    }
}

fn wants_json(cli: &Cli) -> Result<bool> {
    match cli.format.as_deref() {
        None => Ok(false),
        Some("json") => Ok(true),
        Some("csv") => Ok(false),
        Some(other) => Err(Error::Schema(format!(
            "unknown format '{other}' (use json or csv)"
        ))),
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Reach { ctx, from } => cmd_reach(cli, ctx, from),
        Command::Check {
            ctx,
            from,
            to,
            protocol_out,
        } => cmd_check(cli, ctx, from, to, protocol_out.as_deref()),
        Command::Protocol {
            file,
            ctx,
            replay,
            from,
            expect,
            residual,
            samples,
        } => cmd_protocol(
            cli,
            file,
            ctx,
            *replay,
            from,
            expect.as_deref(),
            *residual,
            *samples,
        ),
        Command::Gep {
            trajectory,
            ctx,
            families,
            monotone_tol,
            table,
        } => cmd_gep(
            cli,
            trajectory,
            ctx,
            families.as_deref(),
            *monotone_tol,
            table.as_deref(),
        ),
        Command::Simulate {
            ctx,
            from,
            protocol,
            rates,
            time,
            samples,
        } => cmd_simulate(
            cli,
            ctx,
            from,
            protocol.as_deref(),
            rates.as_deref(),
            *time,
            *samples,
        ),
        Command::App { which } => cmd_app(cli, which),
    }
}

fn cmd_reach(cli: &Cli, ctx_args: &ContextArgs, from: &str) -> Result<i32> {
    let ctx = load_context(cli, ctx_args)?;
    let source = load_population(&ctx, from)?;
    let rs = build_reach_set(&ctx, &source, reach_options(cli))?;
    let bound_hit = rs.diagnostics().bound_hit;
    io::emit(cli.out.as_deref(), &io::json_bytes(&io::reach_set_to_json(&rs)))?;
    Ok(if bound_hit { EXIT_UNDECIDED } else { EXIT_OK })
}

/// Monotone-family certificate for a synthesized protocol: the replayed
/// trajectory is checked against the standard families.
fn certificate_for(
    ctx: &GibbsContext,
    source: &Population,
    seq: &ControlSequence,
) -> Result<Value> {
    let traj = Trajectory::sample(ctx, source, seq, 4)?;
    let mut entries = Vec::new();
    let mut all_ok = true;
    for family in DivergenceFamily::standard_set(ctx.mode()) {
        let check = verify_monotone(ctx, traj.states(), &family, ctx.eta())?;
        all_ok &= check.ok;
        entries.push(json!({
            "family": family.to_string(),
            "ok": check.ok,
            "worst_drop": check.worst_drop,
        }));
    }
    Ok(json!({ "monotone": all_ok, "families": entries }))
}

fn cmd_check(
    cli: &Cli,
    ctx_args: &ContextArgs,
    from: &str,
    to: &str,
    protocol_out: Option<&Path>,
) -> Result<i32> {
    let ctx = load_context(cli, ctx_args)?;
    let source = load_population(&ctx, from)?;
    let target = load_population(&ctx, to)?;
    let rs = build_reach_set(&ctx, &source, reach_options(cli))?;
    let answer = is_reachable(&rs, &target)?;
    let certificate = match &answer.protocol {
        Some(seq) => Some(certificate_for(&ctx, &source, seq)?),
        None => None,
    };
    if let (Some(path), Some(seq)) = (protocol_out, &answer.protocol) {
        io::write_protocol(path, seq)?;
    }
    let decision = answer.decision;
    io::emit(
        cli.out.as_deref(),
        &io::json_bytes(&io::reachability_to_json(&answer, certificate)),
    )?;
    Ok(match decision {
        ReachDecision::Reachable => EXIT_OK,
        ReachDecision::Unreachable => EXIT_INFEASIBLE,
        ReachDecision::Unknown => EXIT_UNDECIDED,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_protocol(
    cli: &Cli,
    file: &Path,
    ctx_args: &ContextArgs,
    replay: bool,
    from: &str,
    expect: Option<&str>,
    residual_tol: f64,
    samples: usize,
) -> Result<i32> {
    let ctx = load_context(cli, ctx_args)?;
    let source = load_population(&ctx, from)?;
    let seq = io::read_protocol(file, ctx.mode())?;
    let traj = Trajectory::sample(&ctx, &source, &seq, samples.max(1))?;
    let final_state = traj.final_state().clone();
    let mut code = EXIT_OK;
    let mut residual = None;
    if let Some(expect) = expect {
        let expected = load_population(&ctx, expect)?;
        let worst = final_state
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs().to_f64())
            .fold(0.0f64, f64::max);
        residual = Some(worst);
        if worst > residual_tol {
            code = EXIT_INFEASIBLE;
        }
    }
    if replay && !wants_json(cli)? {
        io::emit(cli.out.as_deref(), &io::trajectory_csv_bytes(&traj)?)?;
    } else {
        let mut obj = serde_json::Map::new();
        obj.insert("final".into(), io::population_to_json(&final_state));
        obj.insert("steps".into(), json!(seq.len()));
        if let Some(r) = residual {
            obj.insert("residual".into(), json!(r));
            obj.insert("accepted".into(), json!(code == EXIT_OK));
        }
        io::emit(cli.out.as_deref(), &io::json_bytes(&Value::Object(obj)))?;
    }
    Ok(code)
}

fn parse_families(arg: Option<&str>, mode: ArithmeticMode) -> Result<Vec<DivergenceFamily>> {
    match arg {
        None => Ok(DivergenceFamily::standard_set(mode)),
        Some(s) => s
            .split(',')
            .map(|part| DivergenceFamily::parse(part.trim(), mode))
            .collect(),
    }
}

fn cmd_gep(
    cli: &Cli,
    trajectory: &Path,
    ctx_args: &ContextArgs,
    families: Option<&str>,
    monotone_tol: f64,
    table: Option<&Path>,
) -> Result<i32> {
    let ctx = load_context(cli, ctx_args)?;
    let traj = io::read_trajectory_csv(trajectory, &ctx)?;
    let families = parse_families(families, ctx.mode())?;
    let mut entries = Vec::new();
    let mut all_ok = true;
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    for family in &families {
        let check = verify_monotone(&ctx, traj.states(), family, monotone_tol)?;
        all_ok &= check.ok;
        entries.push(json!({
            "family": family.to_string(),
            "ok": check.ok,
            "worst_drop": check.worst_drop,
            "violation_index": check.violation_index,
        }));
        columns.push(check.values);
    }
    if let Some(path) = table {
        let mut header = vec!["t".to_string()];
        header.extend(families.iter().map(|f| f.to_string()));
        let rows: Vec<Vec<String>> = traj
            .times()
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let mut row = vec![t.to_string()];
                row.extend(columns.iter().map(|col| col[k].to_string()));
                row
            })
            .collect();
        io::write_csv_file(path, &header, &rows)?;
    }
    let report = json!({
        "monotone": all_ok,
        "samples": traj.len(),
        "families": entries,
    });
    io::emit(cli.out.as_deref(), &io::json_bytes(&report))?;
    Ok(if all_ok { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn cmd_simulate(
    cli: &Cli,
    ctx_args: &ContextArgs,
    from: &str,
    protocol: Option<&Path>,
    rates: Option<&Path>,
    time: f64,
    samples: usize,
) -> Result<i32> {
    let ctx = load_context(cli, ctx_args)?;
    let source = load_population(&ctx, from)?;
    let traj = match (protocol, rates) {
        (Some(path), None) => {
            let seq = io::read_protocol(path, ctx.mode())?;
            Trajectory::sample(&ctx, &source, &seq, samples.max(1))?
        }
        (None, Some(path)) => {
            let doc = io::read_json_file(path)?;
            let rows = doc
                .get("rates")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Schema("rate file needs a 'rates' array".into()))?;
            let mut matrix = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::Schema(format!("rates[{i}] must be an array")))?;
                let mut out = Vec::with_capacity(row.len());
                for (j, cell) in row.iter().enumerate() {
                    out.push(cell.as_f64().ok_or_else(|| {
                        Error::Schema(format!("rates[{i}][{j}] must be a number"))
                    })?);
                }
                matrix.push(out);
            }
            let generator = MtpGenerator::new(&ctx, matrix)?;
            let n = samples.max(1);
            let mut times = Vec::with_capacity(n + 1);
            let mut states = Vec::with_capacity(n + 1);
            times.push(Scalar::from_f64(0.0, ctx.mode())?);
            states.push(source.clone());
            let mut current = source.clone();
            let dt = time / n as f64;
            for k in 1..=n {
                current = generator.evolve(&ctx, &current, dt)?;
                times.push(Scalar::from_f64(dt * k as f64, ctx.mode())?);
                states.push(current.clone());
            }
            Trajectory::from_parts(times, states)?
        }
        _ => {
            return Err(Error::Schema(
                "simulate needs exactly one of --protocol or --rates".into(),
            ))
        }
    };
    io::emit(cli.out.as_deref(), &io::trajectory_csv_bytes(&traj)?)?;
    Ok(EXIT_OK)
}

fn emit_sweep(cli: &Cli, result: &SweepResult, bundle: Option<&Path>) -> Result<i32> {
    if let Some(path) = bundle {
        io::write_json_file(path, &result.to_json())?;
    }
    if wants_json(cli)? {
        io::emit(cli.out.as_deref(), &io::json_bytes(&result.to_json()))?;
    } else {
        let header = result.csv_header();
        io::emit(
            cli.out.as_deref(),
            &io::csv_bytes(&header, &result.csv_rows())?,
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_app(cli: &Cli, which: &AppCommand) -> Result<i32> {
    match which {
        AppCommand::WorkExtraction {
            beta_s,
            beta_e,
            w_grid,
            eps_tol,
            bundle,
        } => {
            let mut params = WorkExtractionParams {
                beta_s_delta: *beta_s,
                beta_e_delta: *beta_e,
                eps_tol: *eps_tol,
                mode: parse_mode(cli)?,
                reach: reach_options(cli),
                ..WorkExtractionParams::default()
            };
            if let Some(grid) = w_grid {
                params.w_grid = grid.clone();
            }
            emit_sweep(cli, &work_extraction_curve(&params)?, bundle.as_deref())
        }
        AppCommand::Cooling { beta_grid, bundle } => {
            let mut params = CoolingParams {
                reach: reach_options(cli),
                ..CoolingParams::default()
            };
            if let Some(grid) = beta_grid {
                params.beta_grid = grid.clone();
            }
            emit_sweep(cli, &cooling_curve(&params)?, bundle.as_deref())
        }
        AppCommand::Catalysis {
            beta_e_grid,
            catalyst_gap,
            catalyst_beta,
            fin_tol,
            bundle,
        } => {
            let mut params = CatalysisParams {
                catalyst_gap: *catalyst_gap,
                catalyst_beta: *catalyst_beta,
                fin_tol: *fin_tol,
                reach: reach_options(cli),
                ..CatalysisParams::default()
            };
            if let Some(grid) = beta_e_grid {
                params.beta_e_grid = grid.clone();
            }
            emit_sweep(cli, &catalysis_curve(&params)?, bundle.as_deref())
        }
        AppCommand::Hbac {
            beta,
            round_input,
            bundle,
        } => {
            let round = match round_input {
                Some(arg) => {
                    let ctx_q = GibbsContext::from_energies(
                        &[0.0, 1.0],
                        *beta,
                        ArithmeticMode::Rational,
                    )?;
                    Some(load_population(&ctx_q, arg)?)
                }
                None => None,
            };
            let params = HbacParams {
                beta_delta: *beta,
                round_input: round,
                reach: reach_options(cli),
            };
            emit_sweep(cli, &hbac_optimize(&params)?, bundle.as_deref())
        }
        AppCommand::Photoisomerization {
            p00,
            levels,
            beta,
            mc_samples,
            bundle,
        } => {
            let mut params = PhotoisomerizationParams {
                p00: *p00,
                beta: *beta,
                mc_samples: *mc_samples,
                reach: reach_options(cli),
                ..PhotoisomerizationParams::default()
            };
            if let Some(seed) = cli.seed {
                params.seed = seed;
            }
            if let Some(levels) = levels {
                params.levels = [levels[0], levels[1], levels[2]];
            }
            emit_sweep(cli, &photoisomerization_yield(&params)?, bundle.as_deref())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_command(["thermoreach", "no-such-command"]), EXIT_USAGE);
        assert_eq!(
            run_command(["thermoreach", "check", "--from", "a", "--to", "b", "--bogus"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_command(["thermoreach", "--help"]), EXIT_OK);
    }
}
