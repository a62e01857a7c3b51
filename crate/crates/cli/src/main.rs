use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cobordant::cobordant::DivisorPolicy;
use cobordant::graded::{cobordism_cone, star_subdivision, Cone, Fan};
use cobordant::Error;
use cobordant_cli::checks::{seed_from_env, verify_corpus, verify_problem, Outcome};
use cobordant_cli::driver::{blowup_once, invariant_at, run_with, DriverError, RunOptions, Trace};
use cobordant_cli::problem::{Mode, Plan, Problem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cobordant", version, about = "Weighted and cobordant blow-ups of ideals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Plan file with per-step points and coordinate changes.
    #[arg(long, global = true)]
    plan: Option<PathBuf>,
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    divisors: Option<Policy>,
    /// Writes the full trace of `resolve` here.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Records wall-clock time per step in the trace.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant at the marked point.
    Inv,
    /// Center at the marked point with its normal form.
    Center,
    /// One cobordant blow-up at the marked point.
    Blowup,
    /// Principalization or embedded resolution loop.
    Resolve {
        /// Overrides the mode of the problem file.
        #[arg(long, value_enum)]
        mode: Option<LoopMode>,
    },
    /// Star subdivision against the projected cobordism cone.
    Toric,
    /// Property suites on the shipped corpus, plus `--input` when given.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Total,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum LoopMode {
    Principalize,
    Embedded,
}

#[derive(Debug)]
enum Failure {
    Driver(DriverError),
    Io(String),
    Verify(usize),
}

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        Failure::Driver(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Driver(e.into())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Driver(DriverError::Core(e)) => match e {
                Error::Syntax { .. } | Error::UnknownVariable(_) | Error::BadCharacteristic(_) => 2,
                Error::PrecisionExhausted(_) => 4,
                Error::NonAdmissible(_) => 5,
                _ => 1,
            },
            Failure::Driver(DriverError::MaxStepsExceeded(..)) => 3,
            Failure::Driver(DriverError::Internal(_)) | Failure::Verify(_) => 5,
            Failure::Io(_) => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(cli: &Cli) -> Result<(Problem, Plan), Failure> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| Failure::Io("--input is required".into()))?;
    let mut p = Problem::parse(&read(path)?)?;
    if let Some(n) = cli.precision {
        p.precision = Some(n);
    }
    if let Some(k) = cli.max_steps {
        p.max_steps = k;
    }
    if let Some(d) = cli.divisors {
        p.policy = match d {
            Policy::Total => DivisorPolicy::Total,
            Policy::Strict => DivisorPolicy::Strict,
        };
    }
    let plan = match &cli.plan {
        Some(f) => Plan::parse(&read(f)?)?,
        None => Plan::default(),
    };
    Ok((p, plan))
}

fn emit(cli: &Cli, value: serde_json::Value, text: String) {
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
        Format::Text => print!("{text}"),
    }
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(T::to_string).collect()
}

fn inv(cli: &Cli, with_center: bool) -> Result<(), Failure> {
    let (p, _) = load(cli)?;
    let m = invariant_at(&p)?;
    let nf = m.center.normal_form().text;
    let mut text = format!("inv {}\n", m.inv);
    if with_center {
        text += &format!("center {}\n", nf.join(", "));
    }
    let value = if with_center {
        json!({ "inv": m.inv, "center": m.center.to_json(), "normal_form": nf })
    } else {
        json!({ "inv": m.inv })
    };
    emit(cli, value, text);
    Ok(())
}

fn blowup(cli: &Cli) -> Result<(), Failure> {
    let (p, _) = load(cli)?;
    let b = blowup_once(&p)?;
    let controlled = strings(&b.controlled);
    let strict: Vec<_> = b
        .strict
        .iter()
        .map(|(f, e)| json!({ "poly": f.to_string(), "s_power": e }))
        .collect();
    let mut text = format!(
        "inv {}\ncenter {}\n",
        b.milling.inv,
        b.center.normal_form().text.join(", ")
    );
    for c in &b.change {
        text += &format!("change {c}\n");
    }
    text += &format!("w_A {} weights {:?}\n", b.chart.w_a(), b.chart.weights());
    for c in &controlled {
        text += &format!("controlled {c}\n");
    }
    emit(
        cli,
        json!({
            "inv": b.milling.inv,
            "change": b.change,
            "center": b.center.to_json(),
            "chart": b.chart.to_json(),
            "w_a": b.chart.w_a().to_string(),
            "controlled": controlled,
            "strict": strict,
        }),
        text,
    );
    Ok(())
}

fn trace_text(t: &Trace) -> String {
    let mut out = String::new();
    for s in &t.steps {
        out += &format!("step {}: inv {} center {}", s.step, s.inv, s.normal_form.join(", "));
        if !s.point.is_empty() {
            out += &format!(" at {:?}", s.point);
        }
        out += "\n";
    }
    if let Some(last) = &t.last {
        out += &format!("final generators {}\n", last.generators.join(", "));
        if let Some(inv) = &last.inv {
            out += &format!("final inv {inv}\n");
        }
        if let Some(ok) = last.full_transform_monomial {
            out += &format!("full transform monomial: {ok}\n");
        }
    }
    out
}

fn write_trace(cli: &Cli, t: &Trace) -> Result<(), Failure> {
    if let Some(path) = &cli.trace {
        std::fs::write(path, t.to_json() + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn resolve(cli: &Cli, mode: Option<LoopMode>) -> Result<(), Failure> {
    let (p, plan) = load(cli)?;
    let embedded = match mode {
        Some(LoopMode::Embedded) => true,
        Some(LoopMode::Principalize) => false,
        None => p.mode == Mode::Embedded,
    };
    match run_with(&p, &plan, embedded, RunOptions { timing: cli.timing }) {
        Ok(t) => {
            write_trace(cli, &t)?;
            emit(cli, serde_json::to_value(&t).expect("json"), trace_text(&t));
            Ok(())
        }
        Err(DriverError::MaxStepsExceeded(k, t)) => {
            write_trace(cli, &t)?;
            Err(DriverError::MaxStepsExceeded(k, t).into())
        }
        Err(e) => Err(e.into()),
    }
}

fn toric(cli: &Cli) -> Result<(), Failure> {
    let (p, _) = load(cli)?;
    let t = p
        .toric
        .as_ref()
        .ok_or_else(|| Error::Invalid("problem has no `toric` section".into()))?;
    let sigma = Cone::new(t.cone.clone())?;
    let star = star_subdivision(&Fan::of_cone(sigma.clone()), &t.v)?;
    let upper = cobordism_cone(&sigma, &t.v)?.projected_upper()?;
    let agree = star.canonical() == upper.canonical();
    let text = format!(
        "star subdivision: {} cones\nprojected upper boundary: {} cones\nagree: {agree}\n",
        star.cones().len(),
        upper.cones().len()
    );
    emit(
        cli,
        json!({ "star": star.to_json(), "projected_upper": upper.to_json(), "agree": agree }),
        text,
    );
    if agree {
        Ok(())
    } else {
        Err(DriverError::Internal("projected upper boundary differs from the star subdivision".into()).into())
    }
}

fn verify(cli: &Cli) -> Result<(), Failure> {
    let seed = seed_from_env();
    let mut outcomes: Vec<Outcome> = verify_corpus(seed);
    if cli.input.is_some() {
        let (p, plan) = load(cli)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        outcomes.extend(verify_problem("input", &p, &plan, &[], &mut rng));
    }
    let mut text = String::new();
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        text += &format!("{status} {}", o.property);
        if !o.detail.is_empty() {
            text += &format!(": {}", o.detail);
        }
        text += "\n";
    }
    emit(cli, json!({ "seed": seed, "outcomes": outcomes }), text);
    match outcomes.iter().filter(|o| !o.passed).count() {
        0 => Ok(()),
        n => Err(Failure::Verify(n)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Inv => inv(&cli, false),
        Command::Center => inv(&cli, true),
        Command::Blowup => blowup(&cli),
        Command::Resolve { mode } => resolve(&cli, *mode),
        Command::Toric => toric(&cli),
        Command::Verify => verify(&cli),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Driver(e) => eprintln!("error: {e}"),
                Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Verify(n) => eprintln!("{n} properties failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
