//! `dsh-lab`: build tower models from substitutions, run the property
//! suites and the invertible-approximation pipeline, and emit JSON reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dsh_lab::dsh_model::{validate_model, Element};
use dsh_lab::dynamics::{build_tower_model, return_times, return_words, Substitution};
use dsh_lab::matrixkit::{ComplexMatrix, Permutation};
use dsh_lab::pipeline::{
    approximate_by_invertible, plan_cylinder_chain, plant_singularity, source_tower, CylinderChainConfig, Inversion,
    PipelineOptions,
};
use dsh_lab::suites::{run_suites, suite_names, SUITES};
use dsh_lab::unitary_paths::{eta_product, TranspositionPathSpec};

#[derive(Parser)]
#[command(name = "dsh-lab", version, about = "Finite DSH models, unitary paths and invertible approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First-return words of the fixed point to a cylinder.
    ReturnWords {
        #[command(flatten)]
        sub: SubstitutionArgs,
        /// Cylinder word.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10_000, value_parser = positive)]
        scan_length: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tower model over a cylinder, as JSON.
    BuildModel {
        #[command(flatten)]
        sub: SubstitutionArgs,
        #[arg(long)]
        word: String,
        #[arg(long, value_parser = positive)]
        horizon: usize,
        /// Keep at most this many points per level.
        #[arg(long, value_parser = positive)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 10_000, value_parser = positive)]
        scan_length: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run property suites; all of them unless `--suite` is given.
    Verify {
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[command(flatten)]
        seed: SeedArgs,
        /// Trials per suite, overriding each suite's default.
        #[arg(long, value_parser = positive)]
        trials: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Approximate a non-invertible element by an invertible one and certify it.
    Pipeline(PipelineArgs),
    /// Unitary path utilities.
    Unitary {
        #[command(subcommand)]
        command: UnitaryCommand,
    },
}

#[derive(Subcommand)]
enum UnitaryCommand {
    /// Evaluate a transposition path or a block-exchange path.
    Eval {
        #[arg(long, value_parser = positive)]
        n: usize,
        /// Transposition `k1,k2`.
        #[arg(long, value_delimiter = ',', conflicts_with = "eta")]
        pair: Option<Vec<usize>>,
        /// Exchange of the block ending at this position with the last block.
        #[arg(long, requires = "block")]
        eta: Option<usize>,
        #[arg(long, value_parser = positive)]
        block: Option<usize>,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct SubstitutionArgs {
    /// Substitution JSON with `alphabet`, `rules` and `seed`.
    #[arg(long, conflicts_with = "builtin")]
    substitution: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Builtin::Fibonacci)]
    builtin: Builtin,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Fibonacci,
    ThueMorse,
}

#[derive(Args)]
struct SeedArgs {
    #[arg(long, env = "DSH_LAB_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    sub: SubstitutionArgs,
    /// Source base; a prefix of the fixed point.
    #[arg(long, default_value = "0")]
    word: String,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    horizon: usize,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, default_value_t = 10_000, value_parser = positive)]
    scan_length: usize,
    /// Points kept per level of the top tower.
    #[arg(long, default_value_t = 3, value_parser = positive)]
    cap: usize,
    /// Most intermediate towers tried before giving up.
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
    /// Crosses per block start (default R + M + 3).
    #[arg(long, value_parser = positive)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = InversionArg::Floor)]
    inversion: InversionArg,
    /// Point `level/id` of the source tower whose value is made singular
    /// (default: first point of the top level).
    #[arg(long, conflicts_with_all = ["element", "no_plant"])]
    plant: Option<String>,
    /// Keep the random element as drawn.
    #[arg(long)]
    no_plant: bool,
    /// Load the input element (JSON keyed by `level/id`) instead of drawing one.
    #[arg(long, conflicts_with = "no_plant")]
    element: Option<PathBuf>,
    /// Also write the output element here.
    #[arg(long)]
    element_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum InversionArg {
    /// Raise singular values below δ to δ.
    Floor,
    /// Add δ·1.
    ScalarShift,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

enum Failure {
    /// Bad flags, files or configuration.
    Usage(String),
    /// The computation itself failed or produced a failing certificate.
    Domain(String),
    /// Some property suite failed.
    Suites(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Suites(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Suites(m) => m,
        }
    }
}

impl From<dsh_lab::Error> for Failure {
    fn from(e: dsh_lab::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn load_substitution(args: &SubstitutionArgs) -> Result<Substitution, Failure> {
    let Some(path) = &args.substitution else {
        return Ok(match args.builtin {
            Builtin::Fibonacci => Substitution::fibonacci(),
            Builtin::ThueMorse => Substitution::thue_morse(),
        });
    };
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &OutArgs, value: &Value) -> Outcome {
    write_json(out.out.as_deref(), value)
}

fn write_json(path: Option<&Path>, value: &Value) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("reports serialize") + "\n";
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_return_words(sub: &SubstitutionArgs, word: &str, scan_length: usize, out: &OutArgs) -> Outcome {
    let s = load_substitution(sub)?;
    let words = return_words(&s, word, scan_length)?;
    let times = return_times(&s, word, scan_length)?;
    emit(
        out,
        &json!({
            "substitution": s,
            "word": word,
            "return_words": words,
            "return_times": times,
            "stabilization": { "scan_lengths": [scan_length, 2 * scan_length], "stable": true },
        }),
    )
}

fn cmd_build_model(
    sub: &SubstitutionArgs,
    word: &str,
    horizon: usize,
    cap: Option<usize>,
    scan_length: usize,
    out: &OutArgs,
) -> Outcome {
    let s = load_substitution(sub)?;
    let tower = build_tower_model(&s, word, horizon, cap, scan_length)?;
    let report = validate_model(&tower.model);
    if !report.is_valid() {
        return Err(Failure::Domain(format!("model fails validation: {}", report.violations.join("; "))));
    }
    emit(out, &tower.to_json())
}

fn cmd_verify(names: &[String], seed: u64, trials: Option<usize>, out: &OutArgs) -> Outcome {
    let valid = suite_names();
    if let Some(bad) = names.iter().find(|n| !valid.contains(&n.as_str())) {
        return Err(Failure::Usage(format!("unknown suite {bad:?}; valid suites: {}", valid.join(", "))));
    }
    let selected: Vec<&str> = if names.is_empty() { valid } else { names.iter().map(String::as_str).collect() };
    let reports = run_suites(&selected, seed, trials)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
    let table: Vec<Value> = SUITES.iter().map(|s| json!({ "suite": s.name, "checks": s.description })).collect();
    emit(
        out,
        &json!({
            "seed": seed,
            "trials": trials,
            "passed": failed.is_empty(),
            "suites": reports,
            "table": table,
        }),
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Suites(format!("failing suites: {}", failed.join(", "))))
    }
}

fn cmd_pipeline(args: &PipelineArgs) -> Outcome {
    if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
        return Err(Failure::Usage(format!("--epsilon must be positive, got {}", args.epsilon)));
    }
    let s = load_substitution(&args.sub)?;
    let cfg = CylinderChainConfig {
        base: args.word.clone(),
        horizon: args.horizon,
        scan_length: args.scan_length,
        top_cap: Some(args.cap),
        max_depth: args.max_depth,
        n: args.n,
    };
    let source = source_tower(&s, &cfg)?;
    let model = &source.model;
    let (input, planted) = match &args.element {
        Some(path) => {
            let value: Value = serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let e = Element::from_json(model, &value).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            (e, None)
        }
        None => {
            let drawn = Element::random(model, &mut ChaCha8Rng::seed_from_u64(args.seed.seed));
            if args.no_plant {
                (drawn, None)
            } else {
                let p = match &args.plant {
                    Some(key) => model.parse_key(key).map_err(|e| Failure::Usage(format!("--plant: {e}")))?,
                    None => *model.free_points_at(model.level_count() - 1).first().expect("top level has points"),
                };
                (plant_singularity(&drawn, p)?, Some(model.key(p)?))
            }
        }
    };
    let planned = plan_cylinder_chain(&s, &cfg, &input, args.epsilon)?;
    let opts = PipelineOptions {
        n: args.n,
        inversion: match args.inversion {
            InversionArg::Floor => Inversion::SingularValueFloor,
            InversionArg::ScalarShift => Inversion::ScalarShift,
        },
        ..Default::default()
    };
    let out = approximate_by_invertible(&planned.chain, 0, &input, args.epsilon, &opts)?;
    let bases: Vec<&str> = planned.towers.iter().map(|t| t.base.as_str()).collect();
    let dims: Vec<Vec<usize>> = planned.towers.iter().map(|t| t.return_times()).collect();
    let report = json!({
        "seed": args.seed.seed,
        "substitution": s,
        "config": {
            "word": args.word,
            "horizon": args.horizon,
            "epsilon": args.epsilon,
            "scan_length": args.scan_length,
            "cap": args.cap,
            "max_depth": args.max_depth,
            "planted": planted,
            "element_file": args.element.as_ref().map(|p| p.display().to_string()),
        },
        "chain": { "bases": bases, "dimensions": dims, "simple_index": planned.simple_index },
        "certificate": out.certificate.to_json(),
    });
    emit(&args.out, &report)?;
    if let Some(path) = &args.element_out {
        write_json(Some(path), &out.element.to_json())?;
    }
    let failures = out.certificate.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = failures.iter().map(|(stage, pred, w)| format!("{stage}.{pred}: {}", w.as_deref().unwrap_or("failed"))).collect();
        Err(Failure::Domain(format!("certificate has failing predicates: {}", list.join("; "))))
    }
}

fn cmd_unitary_eval(
    n: usize,
    pair: Option<&[usize]>,
    eta: Option<usize>,
    block: Option<usize>,
    t: f64,
    out: &OutArgs,
) -> Outcome {
    let (kind, matrix, permutation): (&str, ComplexMatrix, Permutation) = match (pair, eta) {
        (Some(&[a, b]), None) => {
            let spec = TranspositionPathSpec::between(n, a, b)?;
            ("transposition", spec.eval(t)?, Permutation::transposition(n, a, b)?)
        }
        (None, Some(k)) => {
            let big_n = block.expect("clap requires --block with --eta");
            let path = eta_product(n, k, n, big_n, t)?;
            ("block_exchange", path.matrix(), dsh_lab::unitary_paths::eta_permutation(n, k, n, big_n)?)
        }
        _ => return Err(Failure::Usage("give exactly one of --pair k1,k2 or --eta k --block N".into())),
    };
    emit(
        out,
        &json!({
            "kind": kind,
            "n": n,
            "pair": pair,
            "eta": eta,
            "block": block,
            "t": t,
            "matrix": matrix,
            "permutation": permutation.images().iter().map(|i| i + 1).collect::<Vec<_>>(),
            "unitarity_defect": matrix.unitarity_defect(),
        }),
    )
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::ReturnWords { sub, word, scan_length, out } => cmd_return_words(&sub, &word, scan_length, &out),
        Command::BuildModel { sub, word, horizon, cap, scan_length, out } => {
            cmd_build_model(&sub, &word, horizon, cap, scan_length, &out)
        }
        Command::Verify { suites, seed, trials, out } => cmd_verify(&suites, seed.seed, trials, &out),
        Command::Pipeline(args) => cmd_pipeline(&args),
        Command::Unitary { command: UnitaryCommand::Eval { n, pair, eta, block, t, out } } => {
            cmd_unitary_eval(n, pair.as_deref(), eta, block, t, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
