use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use predltl::automata::{contract, export_hoa, import_hoa_named, translate, Ldba};
use predltl::curriculum::{sample_batch, Curriculum, PropositionRegime};
use predltl::envs::{EnvKind, Environment, FalloutConfig, FalloutWorld, RgbZoneConfig, RgbZoneEnv};
use predltl::eval::{evaluate, run_single, FormulaSource, PolicyName, RunManifest};
use predltl::ltl::{json as ltl_json, parse_atom};
use predltl::taskseq::sequences_from;
use predltl::{parse_ltl, Error, Signature};

/// Directory searched for relative manifest, curriculum and HOA paths.
const CONFIG_DIR_VAR: &str = "PREDLTL_CONFIG_DIR";

const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "predltl",
    version,
    about = "LTL tasks over parameterized predicates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its JSON syntax tree.
    Parse {
        formula: String,
        /// Only accept the `at`, `loc` and `rad` predicates.
        #[arg(long)]
        strict: bool,
    },
    /// Compile a formula (or import HOA) and report the automaton.
    Translate {
        #[command(flatten)]
        input: AutomatonInput,
        /// Write Graphviz output to a file, or to stdout when no path is given.
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
        /// Write HOA output to a file, or to stdout when the path is `-`.
        #[arg(long)]
        hoa_out: Option<String>,
    },
    /// List the reach-avoid sequences from an automaton state.
    Sequences {
        #[command(flatten)]
        input: AutomatonInput,
        #[arg(long)]
        from_state: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run one episode and print its trace.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Episode index within the manifest.
        #[arg(long, default_value_t = 0)]
        episode: usize,
        /// One JSON object per line.
        #[arg(long)]
        ndjson: bool,
    },
    /// Run every episode of a manifest and print aggregate metrics.
    Evaluate {
        manifest: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Curriculum utilities.
    Curriculum {
        #[command(subcommand)]
        command: CurriculumCommand,
    },
    /// Environment utilities.
    Env {
        #[command(subcommand)]
        command: EnvCommand,
    },
}

#[derive(Args)]
struct AutomatonInput {
    /// Formula text.
    formula: Option<String>,
    /// Read the formula from a file.
    #[arg(long, conflicts_with_all = ["formula", "hoa_in"])]
    file: Option<PathBuf>,
    /// Import an automaton instead of translating.
    #[arg(long, conflicts_with = "formula")]
    hoa_in: Option<PathBuf>,
    /// Remove always-safe epsilon transitions.
    #[arg(long)]
    contract: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Run manifest; the flags below build one when absent.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    env: Option<EnvKind>,
    /// Template id such as `phi4` or `ra_fw2`.
    #[arg(long, conflicts_with = "formula")]
    template: Option<String>,
    #[arg(long)]
    formula: Option<String>,
    #[arg(long, default_value = "oracle")]
    policy: PolicyName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    regime: Option<PropositionRegime>,
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Subcommand)]
enum CurriculumCommand {
    /// Draw training tasks from one stage.
    Sample {
        #[arg(long)]
        env: EnvKind,
        /// One-based stage number.
        #[arg(long, default_value_t = 1)]
        stage: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "training_grid")]
        regime: PropositionRegime,
        /// Curriculum JSON; defaults to `curriculum-<env>.json` in the config
        /// directory, then to the built-in table.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EnvCommand {
    /// Reset an environment and print its state, label and observation.
    Snapshot {
        #[arg(long)]
        env: EnvKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "training_grid")]
        regime: PropositionRegime,
        /// FalloutWorld atoms such as `loc(3,4)` or `rad(0.5)`.
        #[arg(long = "atom")]
        atoms: Vec<String>,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::SamplingBudgetExhausted { .. } | Error::InsufficientAtoms { .. } => {
                (EXIT_INFEASIBLE, "infeasible")
            }
            Error::NoEpsilonAvailable(_) => (EXIT_INTERNAL, "internal"),
            _ => (EXIT_USAGE, "input"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn resolve_path(p: &Path) -> PathBuf {
    if p.is_relative() && !p.exists() {
        if let Some(dir) = std::env::var_os(CONFIG_DIR_VAR) {
            let alt = Path::new(&dir).join(p);
            if alt.exists() {
                return alt;
            }
        }
    }
    p.to_path_buf()
}

fn read(p: &Path) -> CliResult<String> {
    let p = resolve_path(p);
    fs::read_to_string(&p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
}

fn emit(target: &str, text: &str) -> CliResult<()> {
    if target == "-" {
        out(text.trim_end_matches('\n'));
    } else {
        fs::write(target, text).map_err(|e| Failure::usage(format!("{target}: {e}")))?;
    }
    Ok(())
}

/// Writes to stdout, treating a closed pipe as success.
fn out(text: &str) {
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn print_json(v: &Value) {
    out(&serde_json::to_string_pretty(v).expect("json"));
}

fn load_automaton(input: &AutomatonInput) -> CliResult<Ldba> {
    let b = if let Some(p) = &input.hoa_in {
        import_hoa_named(&read(p)?, true)?
    } else {
        let text = match (&input.formula, &input.file) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => read(p)?,
            (None, None) => return Err(Failure::usage("expected a formula, --file or --hoa-in")),
        };
        translate(&parse_ltl(text.trim(), &Signature::permissive())?)?
    };
    Ok(if input.contract { contract(&b) } else { b })
}

fn summary(b: &Ldba) -> Value {
    json!({
        "states": b.num_states(),
        "initial": b.initial(),
        "accepting": b.accepting_states(),
        "epsilon_edges": b.epsilon_edges().len(),
        "contracted": b.is_contracted(),
        "automaton": b.to_json(),
    })
}

fn cmd_translate(
    input: &AutomatonInput,
    dot: Option<&str>,
    hoa_out: Option<&str>,
) -> CliResult<()> {
    let b = load_automaton(input)?;
    let to_stdout = dot == Some("-") || hoa_out == Some("-");
    if let Some(t) = dot {
        emit(t, &b.to_dot())?;
    }
    if let Some(t) = hoa_out {
        emit(t, &export_hoa(&b))?;
    }
    if !to_stdout {
        print_json(&summary(&b));
    }
    Ok(())
}

fn cmd_sequences(
    input: &AutomatonInput,
    from: Option<usize>,
    k: usize,
    as_json: bool,
) -> CliResult<()> {
    if k == 0 {
        return Err(Failure::usage("k must be positive"));
    }
    let b = load_automaton(input)?;
    let q = from.unwrap_or(b.initial());
    if q >= b.num_states() {
        return Err(Error::UnknownState(q).into());
    }
    let seqs = sequences_from(&b, q, k);
    let note = seqs
        .is_empty()
        .then(|| format!("no accepting cycle is reachable from q{q}"));
    if as_json {
        let mut v = json!({
            "from_state": q,
            "k": k,
            "sequences": seqs.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        });
        if let Some(n) = &note {
            v["note"] = json!(n);
        }
        print_json(&v);
    } else {
        if let Some(n) = &note {
            eprintln!("{n}");
        }
        for (i, s) in seqs.iter().enumerate() {
            out(&format!("# sequence {i}\n{}", s.render()));
        }
    }
    Ok(())
}

fn manifest_from(run: &RunArgs) -> CliResult<RunManifest> {
    if let Some(p) = &run.manifest {
        return Ok(RunManifest::from_json(&read(p)?)?);
    }
    let formula = match (&run.template, &run.formula) {
        (Some(t), _) => FormulaSource::Template(t.clone()),
        (None, Some(f)) => FormulaSource::Text(f.clone()),
        (None, None) => {
            return Err(Failure::usage(
                "expected --manifest, --template or --formula",
            ))
        }
    };
    let env = match (run.env, &formula) {
        (Some(e), _) => e,
        (None, FormulaSource::Template(id)) => {
            predltl::policies::template(id)
                .ok_or_else(|| Failure::usage(format!("unknown template `{id}`")))?
                .env
        }
        _ => return Err(Failure::usage("--env is required with --formula")),
    };
    let mut m = RunManifest::new(run.seed, env, formula, run.policy, 1);
    if let Some(r) = run.regime {
        m.regime = r;
    }
    m.max_steps = run.max_steps;
    m.validate()?;
    Ok(m)
}

fn cmd_simulate(run: &RunArgs, episode: usize, ndjson: bool) -> CliResult<()> {
    let m = manifest_from(run)?;
    let (formula, trace) = run_single(&m, episode)?;
    if ndjson {
        out(&json!({ "formula": formula, "seed": m.episode_seed(episode) }).to_string());
        out(trace.to_ndjson().trim_end_matches('\n'));
    } else {
        print_json(&json!({
            "formula": formula,
            "seed": m.episode_seed(episode),
            "trace": trace.to_json(),
        }));
    }
    Ok(())
}

fn cmd_evaluate(path: &Path, workers: Option<usize>, output: Option<&Path>) -> CliResult<()> {
    let m = RunManifest::from_json(&read(path)?)?;
    let metrics = evaluate(&m, workers)?;
    let text = metrics.to_json();
    match output.map(Path::to_path_buf).or(m.output.clone()) {
        Some(p) => fs::write(&p, text + "\n")
            .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => out(&text),
    }
    Ok(())
}

fn load_curriculum(env: EnvKind, config: Option<&Path>) -> CliResult<Curriculum> {
    let path = match config {
        Some(p) => Some(resolve_path(p)),
        None => std::env::var_os(CONFIG_DIR_VAR).map(|d| {
            let name = match env {
                EnvKind::RgbZone => "curriculum-rgbzone.json",
                EnvKind::Fallout => "curriculum-fallout.json",
            };
            Path::new(&d).join(name)
        }),
    };
    match path {
        Some(p) if config.is_some() || p.exists() => {
            let c = Curriculum::from_json(&read(&p)?)?;
            if c.env != env {
                return Err(Failure::usage(format!(
                    "{} is for another environment",
                    p.display()
                )));
            }
            Ok(c)
        }
        _ => Ok(Curriculum::builtin(env)),
    }
}

fn cmd_curriculum(cmd: &CurriculumCommand) -> CliResult<()> {
    let CurriculumCommand::Sample {
        env,
        stage,
        count,
        seed,
        regime,
        config,
    } = cmd;
    let c = load_curriculum(*env, config.as_deref())?;
    if *stage == 0 {
        return Err(Failure::usage("stages are numbered from 1"));
    }
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    for (i, (entry, task)) in sample_batch(&c, stage - 1, *regime, *count, *seed)?
        .into_iter()
        .enumerate()
    {
        let line = json!({ "index": i, "stage": stage, "entry": entry, "task": task.to_json() });
        if writeln!(stdout, "{line}").is_err() {
            break;
        }
    }
    Ok(())
}

fn cmd_env(cmd: &EnvCommand) -> CliResult<()> {
    let EnvCommand::Snapshot {
        env,
        seed,
        regime,
        atoms,
    } = cmd;
    let v = match env {
        EnvKind::RgbZone => {
            if !atoms.is_empty() {
                return Err(Failure::usage(
                    "RGBZoneEnv atoms come from the colour regime",
                ));
            }
            let e = RgbZoneEnv::reset(&RgbZoneConfig::default(), *seed, 0, &regime.color_space())?;
            describe(&e, e.observe())?
        }
        EnvKind::Fallout => {
            let sig = Signature::environments();
            let atoms = atoms
                .iter()
                .map(|a| parse_atom(a, &sig))
                .collect::<predltl::Result<Vec<_>>>()?;
            let e = FalloutWorld::reset(&FalloutConfig::default(), *seed, &atoms)?;
            describe(&e, e.observe())?
        }
    };
    out(&v.to_string());
    Ok(())
}

fn describe<E: Environment>(e: &E, observation: Vec<f64>) -> CliResult<Value> {
    Ok(json!({
        "snapshot": e.snapshot(),
        "label": e.label()?.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "observation": observation,
    }))
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Parse { formula, strict } => {
            let sig = if *strict {
                Signature::environments()
            } else {
                Signature::permissive()
            };
            let f = parse_ltl(formula, &sig)?;
            print_json(&json!({ "formula": f.to_string(), "ast": ltl_json::to_json(&f) }));
            Ok(())
        }
        Command::Translate {
            input,
            dot,
            hoa_out,
        } => cmd_translate(input, dot.as_deref(), hoa_out.as_deref()),
        Command::Sequences {
            input,
            from_state,
            k,
            json,
        } => cmd_sequences(input, *from_state, *k, *json),
        Command::Simulate {
            run,
            episode,
            ndjson,
        } => cmd_simulate(run, *episode, *ndjson),
        Command::Evaluate {
            manifest,
            workers,
            output,
        } => cmd_evaluate(manifest, *workers, output.as_deref()),
        Command::Curriculum { command } => cmd_curriculum(command),
        Command::Env { command } => cmd_env(command),
    }
}

fn fail(f: &Failure) -> ExitCode {
    let v = json!({ "error": { "kind": f.kind, "message": f.message, "exit_code": f.code } });
    eprintln!("{v}");
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        let v = json!({ "error": { "kind": "internal", "message": info.to_string(), "exit_code": EXIT_INTERNAL } });
        eprintln!("{v}");
    }));
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Failure::usage(e.to_string().trim_end())),
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => fail(&f),
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
