//! Command-line front end. `run` parses arguments, dispatches a command and
//! returns the process exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mnl_match_core::customized::solve_customized;
use mnl_match_core::inclusive::solve_inclusive;
use mnl_match_core::instance::generate_random;
use mnl_match_core::mnl::menu_to_choice_matrix;
use mnl_match_core::oracle::OracleLimits;
use mnl_match_core::reward::{dp_estimate, exact_reward, DEFAULT_CUTOFF};
use mnl_match_core::{ChoiceMatrix, EstimateReport, GenParams, Instance, Model};

use crate::bench::{meets_floor, run_bench, summary, write_csv, BenchConfig};
use crate::io::{
    instance_json, read_eval_input, read_instance, to_json, write_text, EstimateJson, EvalInput,
    OracleJson, SolutionFile,
};
use crate::parallel::{brute_force_parallel, mc_reward_parallel};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mnl-match",
    version,
    about = "Menu optimization for two-sided MNL matching markets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random or preset instance file.
    Gen(GenArgs),
    /// Run the approximation algorithm for one model.
    Solve(SolveArgs),
    /// Estimate the expected reward of a solution or menu.
    Eval(EvalArgs),
    /// Find the optimal deterministic menu by exhaustive search.
    Oracle(OracleArgs),
    /// Compare algorithm and oracle on random instances (CSV output).
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Customized,
    Inclusive,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Customized => Model::Customized,
            ModelArg::Inclusive => Model::Inclusive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Two customers, two suppliers; splitting the menu loses reward.
    #[value(alias = "appendix-c2")]
    MenuGap,
    /// One customer, one supplier, all parameters 1.
    Unit,
}

impl Preset {
    pub fn instance(self) -> Instance {
        match self {
            Preset::MenuGap => Instance::menu_gap(),
            Preset::Unit => Instance::unit(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Mc,
    Dp,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(short, long, value_parser = parse_customers)]
    pub customers: Option<usize>,
    #[arg(short, long, value_parser = parse_suppliers)]
    pub suppliers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0.05, value_parser = parse_epsilon)]
    pub epsilon: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub instance: PathBuf,
    /// Solution file (uses its `x`) or menu file (`{"menu": [[...], ...]}`).
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
    /// Defaults to the solution's model, or inclusive for menu files.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, default_value_t = 0.05, value_parser = parse_epsilon)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: usize,
    /// Worker threads for Monte Carlo; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_menus)]
    pub max_menus: u128,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Both models when omitted.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, default_value_t = 200)]
    pub count: u64,
    /// Instance size as CUSTOMERSxSUPPLIERS.
    #[arg(long, default_value = "3x3", value_parser = parse_size)]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_epsilon)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_menus)]
    pub max_menus: u128,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Write 0 for wall_time_ms so repeated runs give identical files.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_count(s: &str, what: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n == 0 {
        return Err(format!("{what} must be ≥ 1"));
    }
    Ok(n)
}

fn parse_customers(s: &str) -> Result<usize, String> {
    parse_count(s, "customers")
}

fn parse_suppliers(s: &str) -> Result<usize, String> {
    parse_count(s, "suppliers")
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let e: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if e > 0.0 && e < 1.0 {
        Ok(e)
    } else {
        Err(format!("epsilon must lie in (0, 1), got {e}"))
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (c, k) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected CUSTOMERSxSUPPLIERS, got {s:?}"))?;
    Ok((parse_customers(c)?, parse_suppliers(k)?))
}

/// A failed command: message for stderr plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        use mnl_match_core::Error as C;
        let code = match &e {
            Error::Io { .. } | Error::Format(_) => EXIT_USAGE,
            Error::Core(C::InvalidInstance(_) | C::InvalidMenu { .. } | C::InvalidEpsilon(_))
            | Error::Core(C::InvalidParams(_) | C::RaggedMatrix { .. } | C::Dimension(_))
            | Error::Core(C::OracleBudget { .. } | C::NoSamples | C::UnsupportedModel) => {
                EXIT_USAGE
            }
            _ => EXIT_RUNTIME,
        };
        let mut message = e.to_string();
        if matches!(e, Error::Core(C::SupportExceedsCutoff { .. })) {
            message.push_str(" (try --method mc or --method dp)");
        }
        Failure { code, message }
    }
}

impl From<mnl_match_core::Error> for Failure {
    fn from(e: mnl_match_core::Error) -> Self {
        Error::Core(e).into()
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render();
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{}", text.ansi());
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Gen(a) => cmd_gen(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Oracle(a) => cmd_oracle(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdout, stderr),
    }
}

/// Writes `text` to `output` and prints the path, or prints `text` itself.
fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let res = match output {
        Some(path) => {
            write_text(path, text)?;
            writeln!(stdout, "{}", path.display())
        }
        None => write!(stdout, "{text}"),
    };
    res.map_err(|e| Failure {
        code: EXIT_RUNTIME,
        message: format!("stdout: {e}"),
    })
}

fn cmd_gen(a: GenArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = match a.preset {
        Some(p) => {
            let inst = p.instance();
            let dims = (inst.n_customers, inst.n_suppliers);
            if a.customers.is_some_and(|c| c != dims.0) || a.suppliers.is_some_and(|s| s != dims.1)
            {
                return Err(Failure::usage(format!(
                    "preset {:?} is {}x{}",
                    p.to_possible_value()
                        .expect("no skipped variants")
                        .get_name(),
                    dims.0,
                    dims.1
                )));
            }
            inst
        }
        None => {
            let (Some(c), Some(s)) = (a.customers, a.suppliers) else {
                return Err(Failure::usage(
                    "gen needs --customers and --suppliers, or --preset",
                ));
            };
            generate_random(c, s, &GenParams::default().with_seed(a.seed))?
        }
    };
    emit(a.output.as_deref(), &instance_json(&inst), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_solve(a: SolveArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = read_instance(&a.instance)?;
    let file = match Model::from(a.model) {
        Model::Customized => SolutionFile::from(&solve_customized(&inst)?),
        Model::Inclusive => SolutionFile::from(&solve_inclusive(&inst, a.epsilon)?),
    };
    emit(a.output.as_deref(), &to_json(&file), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_eval(a: EvalArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = read_instance(&a.instance)?;
    let (x, file_model): (ChoiceMatrix, Model) = match read_eval_input(&a.input)? {
        EvalInput::Solution(s) => (s.choice_matrix()?, s.model()?),
        EvalInput::Menu(menu) => (menu_to_choice_matrix(&inst, &menu)?, Model::Inclusive),
    };
    let model = a.model.map_or(file_model, Model::from);
    let report = match a.method {
        MethodArg::Exact => EstimateReport::exact(exact_reward(&inst, &x, model, None, a.cutoff)?),
        MethodArg::Mc => mc_reward_parallel(&inst, &x, model, a.samples, a.seed, a.workers)?,
        MethodArg::Dp => {
            if model == Model::Customized {
                return Err(Failure::usage(
                    "the DP estimator only supports the inclusive model",
                ));
            }
            dp_estimate(&inst, &x, model, a.epsilon, None)?
        }
    };
    let mut text = serde_json::to_string(&EstimateJson::new(None, &report))
        .expect("estimates always serialize");
    text.push('\n');
    emit(a.output.as_deref(), &text, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_oracle(a: OracleArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = read_instance(&a.instance)?;
    let model = Model::from(a.model);
    let limits = OracleLimits {
        max_menus: a.max_menus,
        cutoff: a.cutoff,
    };
    let res = brute_force_parallel(&inst, model, &limits, a.workers)?;
    emit(
        a.output.as_deref(),
        &to_json(&OracleJson::new(model, &res)),
        stdout,
    )?;
    Ok(EXIT_OK)
}

fn cmd_bench(a: BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let models = match a.model {
        Some(m) => vec![m.into()],
        None => vec![Model::Customized, Model::Inclusive],
    };
    let cfg = BenchConfig {
        models,
        count: a.count,
        customers: a.size.0,
        suppliers: a.size.1,
        seed: a.seed,
        epsilon: a.epsilon,
        limits: OracleLimits {
            max_menus: a.max_menus,
            cutoff: a.cutoff,
        },
        workers: a.workers,
        timing: !a.no_timing,
    };
    let rows = run_bench(&cfg)?;
    let mut csv = Vec::new();
    write_csv(&mut csv, &rows)?;
    let text = String::from_utf8(csv).expect("csv output is UTF-8");
    emit(a.output.as_deref(), &text, stdout)?;
    for line in summary(&rows, &cfg.models, cfg.epsilon) {
        let _ = writeln!(stderr, "{line}");
    }
    let violations = rows
        .iter()
        .filter(|r| {
            let model = if r.model == Model::Customized.as_str() {
                Model::Customized
            } else {
                Model::Inclusive
            };
            !meets_floor(r, model, cfg.epsilon)
        })
        .count();
    if violations > 0 {
        let _ = writeln!(
            stderr,
            "error: {violations} instance(s) below the guaranteed ratio"
        );
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}
