use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use simplegraph::bench::{bench_model, BenchModel, BENCH_HEADER};
use simplegraph::config_model::{
    erased_configuration, repeated_configuration_with, truncated_erased_configuration, DegreeResampling, ParityPolicy,
    DEFAULT_MAX_ATTEMPTS,
};
use simplegraph::dgrd::{dgrd_generate, dgrd_target, Recipe};
use simplegraph::distributions::{parse_dist_spec, parse_mix_spec};
use simplegraph::grg::{grg_exact_blocked, grg_fast, grg_limit_pmf, sample_weights, Regime, WeightSequence};
use simplegraph::seeding::{stream, Purpose};
use simplegraph::verify::{empirical_distribution, erasure_fraction, tail_exponent, tv_distance, VerificationReport};
use simplegraph::{DegreeDistribution, Error, GenerationReport, MixingLaw, SimpleGraph};

#[derive(Debug, Parser)]
#[command(
    name = "simplegraph",
    version,
    about = "Simple random graphs with prescribed asymptotic degree laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate one graph and write it as an edge list
    Generate(GenerateArgs),
    /// Generate one graph and compare its degrees with the limit law
    Verify(VerifyArgs),
    /// Time every generator over a doubling grid of sizes
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    ErasedConfig,
    RepeatedConfig,
    TruncatedConfig,
    Grg,
    GrgFast,
    Dgrd,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::ErasedConfig => "erased-config",
            Model::RepeatedConfig => "repeated-config",
            Model::TruncatedConfig => "truncated-config",
            Model::Grg => "grg",
            Model::GrgFast => "grg-fast",
            Model::Dgrd => "dgrd",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Parity {
    RemoveStub,
    Regenerate,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Degree law for the configuration models, out-degree law for dgrd
    #[arg(long)]
    dist: Option<String>,
    /// Weight law for grg and grg-fast
    #[arg(long)]
    weights: Option<String>,
    /// Read grg weights from a file, one per line
    #[arg(long, conflicts_with = "weights")]
    weights_file: Option<PathBuf>,
    /// Target law for dgrd: poisson:MU | mixedpoisson:<mix> | compoundpoisson:LAMBDA,<dist>
    #[arg(long, conflicts_with = "dist")]
    recipe: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Truncation exponent: degrees are conditioned on D <= floor(n^a)
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    /// Odds scaling exponent; defaults to 1/alpha when --alpha is given, else 1
    #[arg(long)]
    beta: Option<f64>,
    /// Weight tail index, P(W > w) ~ c w^-alpha; selects the heavy-tail limit
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Parity::RemoveStub)]
    parity: Parity,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: usize,
    /// Repeated model: keep the first degree sequence across attempts
    #[arg(long)]
    keep_degrees: bool,
    /// Write the key=value report here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Edge list destination; stdout if absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Save the sampled grg weights for reuse with --weights-file
    #[arg(long)]
    dump_weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Degree range of the ccdf slope fit
    #[arg(long, default_value_t = 10)]
    tail_lo: usize,
    #[arg(long, default_value_t = 100)]
    tail_hi: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Models to time; all of them if absent
    #[arg(long = "model")]
    models: Vec<String>,
    /// Comma-separated sizes overriding each model's default grid
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn code(e: &Error) -> (&'static str, u8) {
    match e {
        Error::RecipeInfeasible(_) => ("recipe-infeasible", 3),
        Error::TooManyAttempts { .. } => ("too-many-attempts", 4),
        Error::NonConvergence { .. } => ("non-convergence", 5),
        Error::Io(_) => ("io", 1),
        _ => ("usage", 2),
    }
}

struct Generated {
    graph: SimpleGraph,
    report: VerificationReport,
    weights: Option<WeightSequence>,
}

fn need_n(args: &ModelArgs) -> Result<usize, Error> {
    args.n
        .ok_or_else(|| usage(format!("--n is required for {}", args.model.name())))
}

fn degree_law(args: &ModelArgs) -> Result<DegreeDistribution, Error> {
    let spec = args
        .dist
        .as_deref()
        .ok_or_else(|| usage(format!("--dist is required for {}", args.model.name())))?;
    parse_dist_spec(spec)
}

fn weight_law(args: &ModelArgs) -> Result<Option<MixingLaw>, Error> {
    args.weights.as_deref().map(parse_mix_spec).transpose()
}

fn beta(args: &ModelArgs) -> f64 {
    args.beta.unwrap_or_else(|| args.alpha.map_or(1.0, |a| 1.0 / a))
}

fn out_degree_law(args: &ModelArgs) -> Result<DegreeDistribution, Error> {
    match (&args.recipe, &args.dist) {
        (Some(recipe), _) => Recipe::parse(recipe)?.source(),
        (None, Some(_)) => degree_law(args),
        (None, None) => Err(usage("dgrd needs --recipe or --dist")),
    }
}

fn weights(args: &ModelArgs) -> Result<WeightSequence, Error> {
    match (&args.weights_file, weight_law(args)?) {
        (Some(path), _) => {
            let w = WeightSequence::read_text(BufReader::new(File::open(path)?), beta(args))?;
            if let Some(n) = args.n.filter(|&n| n != w.n()) {
                return Err(usage(format!(
                    "--n {n} disagrees with {} weights in {}",
                    w.n(),
                    path.display()
                )));
            }
            Ok(w)
        }
        (None, Some(law)) => sample_weights(
            &law,
            need_n(args)?,
            beta(args),
            &mut stream(args.seed, Purpose::Weights),
        ),
        (None, None) => Err(usage(format!(
            "{} needs --weights or --weights-file",
            args.model.name()
        ))),
    }
}

fn fill_config_report(report: &mut VerificationReport, gen: &GenerationReport, with_erasure: bool) {
    report.attempts = Some(gen.attempts);
    report.odd_sum_fixed = Some(gen.odd_sum_fixed);
    if with_erasure {
        report.erasure_fraction = Some(erasure_fraction(gen));
    }
}

fn generate(args: &ModelArgs) -> Result<Generated, Error> {
    if args.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let parity = match args.parity {
        Parity::RemoveStub => ParityPolicy::RemoveStub,
        Parity::Regenerate => ParityPolicy::Regenerate,
    };
    let mut rng = stream(args.seed, Purpose::Degrees);
    let mut weights_used = None;
    let (graph, gen) = match args.model {
        Model::ErasedConfig => erased_configuration(&degree_law(args)?, need_n(args)?, parity, &mut rng)?,
        Model::TruncatedConfig => {
            truncated_erased_configuration(&degree_law(args)?, need_n(args)?, args.a, parity, &mut rng)?
        }
        Model::RepeatedConfig => {
            let resampling = if args.keep_degrees {
                DegreeResampling::KeepFixed
            } else {
                DegreeResampling::Redraw
            };
            repeated_configuration_with(
                &degree_law(args)?,
                need_n(args)?,
                parity,
                args.max_attempts,
                resampling,
                &mut rng,
            )?
        }
        Model::Grg | Model::GrgFast => {
            let w = weights(args)?;
            let g = if args.model == Model::Grg {
                grg_exact_blocked(&w, args.seed, Some(args.threads))?
            } else {
                grg_fast(&w, &mut stream(args.seed, Purpose::Edges))?
            };
            weights_used = Some(w);
            (g, GenerationReport::default())
        }
        Model::Dgrd => {
            let g = dgrd_generate(
                &out_degree_law(args)?,
                need_n(args)?,
                &mut stream(args.seed, Purpose::Targets),
            )?;
            (g, GenerationReport::default())
        }
    };
    let mut report = VerificationReport::new(args.model.name(), graph.n(), args.seed);
    report.edges = Some(graph.edge_count());
    match args.model {
        Model::ErasedConfig | Model::TruncatedConfig => fill_config_report(&mut report, &gen, true),
        Model::RepeatedConfig => fill_config_report(&mut report, &gen, false),
        _ => {}
    }
    Ok(Generated {
        graph,
        report,
        weights: weights_used,
    })
}

/// The law the empirical degrees should approach, if one is known.
fn target(args: &ModelArgs) -> Result<Option<DegreeDistribution>, Error> {
    match args.model {
        Model::ErasedConfig | Model::RepeatedConfig | Model::TruncatedConfig => degree_law(args).map(Some),
        Model::Dgrd => match &args.recipe {
            Some(recipe) => Recipe::parse(recipe)?.intended().map(Some),
            None => dgrd_target(&out_degree_law(args)?).map(Some),
        },
        Model::Grg | Model::GrgFast => {
            let Some(law) = weight_law(args)? else {
                return Ok(None);
            };
            let regime = match args.alpha {
                Some(alpha) => Regime::HeavyTail { alpha, c: args.c },
                None => Regime::FiniteMean,
            };
            grg_limit_pmf(&law, regime).map(Some)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_report(report: &VerificationReport, path: Option<&Path>) -> Result<(), Error> {
    match path {
        Some(p) => {
            let mut f = create(p)?;
            write!(f, "{report}")?;
            f.flush()?;
        }
        None => print!("{report}"),
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Error> {
    let run = generate(&args.model)?;
    if let Some(path) = &args.dump_weights {
        let w = run
            .weights
            .as_ref()
            .ok_or_else(|| usage("--dump-weights applies to grg and grg-fast only"))?;
        let mut f = create(path)?;
        w.write_text(&mut f)?;
        f.flush()?;
    }
    match &args.out {
        Some(path) => {
            let mut f = create(path)?;
            run.graph.write_edge_list(&mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = BufWriter::new(stdout.lock());
            run.graph.write_edge_list(&mut lock)?;
            lock.flush()?;
        }
    }
    if let Some(path) = &args.model.report {
        write_report(&run.report, Some(path))?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Error> {
    let target = target(&args.model)?;
    let mut run = generate(&args.model)?;
    let empirical = empirical_distribution(&run.graph)?;
    if let Some(t) = &target {
        run.report.tv = Some(tv_distance(&empirical, t));
    }
    run.report.tail_slope = tail_exponent(&empirical, args.tail_lo, args.tail_hi).ok();
    write_report(&run.report, args.model.report.as_deref())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Error> {
    let models = if args.models.is_empty() {
        BenchModel::ALL.to_vec()
    } else {
        args.models
            .iter()
            .map(|m| m.parse())
            .collect::<Result<Vec<BenchModel>, _>>()?
    };
    println!("{BENCH_HEADER}");
    for model in models {
        let grid = args.grid.clone().unwrap_or_else(|| model.default_grid());
        let reps = args.reps.unwrap_or_else(|| model.default_reps());
        for row in bench_model(model, &grid, reps, args.seed)? {
            println!("{row}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("error=usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (name, status) = code(&e);
            eprintln!("error={name}: {}", e.to_string().replace('\n', " "));
            ExitCode::from(status)
        }
    }
}
