use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use usea::engine::{usea_run, Variant};
use usea::harness::demos::{case_study_1d, demo_operators, offspring_distribution_demo, ShiftSetup, SnapshotSetup};
use usea::harness::export::{load_raw_json, save_json, save_summary_csv, RawResults};
use usea::harness::{run_experiment, summarize, AlgorithmSpec, ExperimentSpec};
use usea::operators::Operator;
use usea::problems::Benchmark;
use usea::rng::RngStream;
use usea::surrogate::SurrogateKind;

#[derive(Parser)]
#[command(name = "usea", version, about = "Surrogate-assisted evolution with un-evaluated parents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run of one configuration; writes the trace as JSON.
    Run(RunArgs),
    /// Multi-run sweep; writes summary CSV/JSON and raw JSON.
    Bench(BenchArgs),
    /// Demonstration reports on the 1-D case function.
    Demo {
        #[arg(value_parser = ["fig3", "fig8"])]
        which: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out/demo")]
        out: PathBuf,
    },
    /// Recompute the summary from a raw JSON file.
    Stats {
        raw: PathBuf,
        /// Reference algorithm for the marks; defaults to the one stored in the file.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(long, default_value = "eda")]
    operator: Operator,
    #[arg(long, default_value = "rf")]
    surrogate: SurrogateKind,
    #[arg(long, default_value = "usea")]
    variant: Variant,
    #[arg(long, default_value_t = 500)]
    fes: usize,
    #[arg(long, default_value_t = 50)]
    pop: usize,
    #[arg(long)]
    tau: Option<usize>,
}

impl AlgoArgs {
    fn spec(&self) -> AlgorithmSpec {
        let mut a = AlgorithmSpec::new(self.operator.clone(), self.variant);
        a.surrogate = self.surrogate;
        a.fes = self.fes;
        a.pop_size = self.pop;
        a.tau = self.tau;
        a
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "Ellipsoid")]
    problem: Benchmark,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out/trace.json")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment spec as JSON. Without it the sweep is built from the flags:
    /// the chosen algorithm against the plain-operator baseline.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, num_args = 1.., default_values = ["Ellipsoid"])]
    problem: Vec<Benchmark>,
    #[arg(long, num_args = 1.., default_values_t = [20])]
    dim: Vec<usize>,
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn run(args: RunArgs) -> AnyResult<()> {
    let cfg = args.algo.spec().config(args.problem, args.dim, args.seed);
    let trace = usea_run(&cfg)?;
    save_json(&trace, &args.out)?;
    println!(
        "{} on {} (n={}): best {:.6e} after {} evaluations in {:.2}s -> {}",
        cfg.label(),
        args.problem,
        args.dim,
        trace.final_best.f,
        trace.evaluations,
        trace.wall_clock,
        args.out.display()
    );
    Ok(())
}

fn bench(args: BenchArgs) -> AnyResult<()> {
    let mut spec: ExperimentSpec = match &args.spec {
        Some(path) => serde_json::from_reader(std::fs::File::open(path)?)?,
        None => {
            let main = args.algo.spec();
            let mut base = main.clone();
            base.variant = Variant::Baseline;
            ExperimentSpec {
                algorithms: vec![main, base],
                problems: args.problem.clone(),
                dims: args.dim.clone(),
                runs: args.runs,
                base_seed: args.seed,
                reference: None,
                workers: args.workers,
                output: Default::default(),
            }
        }
    };
    if args.workers.is_some() {
        spec.workers = args.workers;
    }
    let summary_csv = spec.output.summary_csv.clone().map(PathBuf::from).unwrap_or(args.out.join("summary.csv"));
    let raw_json = spec.output.raw_json.clone().map(PathBuf::from).unwrap_or(args.out.join("raw.json"));
    info!("{} cells x {} runs", spec.cells().len(), spec.runs);
    let result = run_experiment(&spec)?;
    save_summary_csv(&result.summary.cells, &summary_csv)?;
    save_json(&result.summary, summary_csv.with_extension("json"))?;
    save_json(&RawResults::new(&result.summary.reference, result.records), &raw_json)?;
    print_summary(&result.summary);
    println!("summary -> {}, raw -> {}", summary_csv.display(), raw_json.display());
    Ok(())
}

fn print_summary(s: &usea::harness::StatsSummary) {
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3e}"));
    println!("{:<14}{:>4}  {:<16}{:>11}{:>11}{:>11}{:>6}  mark", "problem", "n", "algorithm", "mean", "std", "median", "rank");
    for c in &s.cells {
        println!(
            "{:<14}{:>4}  {:<16}{:>11}{:>11}{:>11}{:>6}  {}{}",
            c.problem,
            c.dim,
            c.algorithm,
            fmt(c.mean),
            fmt(c.std),
            fmt(c.median),
            c.rank.map_or("-".into(), |r| format!("{r}")),
            c.mark.map_or(String::new(), |m| m.to_string()),
            if c.is_complete() { "" } else { " (incomplete)" }
        );
    }
    for r in &s.mean_ranks {
        println!("mean rank n={} {}: {:.2}", r.dim, r.algorithm, r.mean_rank);
    }
}

fn demo(which: &str, seed: u64, out: PathBuf) -> AnyResult<()> {
    std::fs::create_dir_all(&out)?;
    let rng = RngStream::new(seed);
    if which == "fig3" {
        let setup = ShiftSetup::default();
        for op in demo_operators() {
            let r = offspring_distribution_demo(&op, &setup, &rng.derive(op.short_name()))?;
            let path = out.join(format!("fig3_{}.csv", op.short_name().to_lowercase()));
            r.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            println!(
                "{:<4} share in [{}, {}]: with P_u {:.4}, without {:.4} -> {}",
                r.operator,
                setup.region.0,
                setup.region.1,
                r.fraction_with,
                r.fraction_without,
                path.display()
            );
        }
    } else {
        let r = case_study_1d(&SnapshotSetup::default(), &rng)?;
        r.write_dir(&out)?;
        let top = &r.offspring[0];
        println!(
            "EI argmax x={:.4} (EI {:.4}); best predicted offspring x={:.4} (pred {:.4}) -> {}",
            r.ei_argmax.x,
            r.ei_argmax.ei,
            top.x,
            top.prediction,
            out.display()
        );
    }
    Ok(())
}

fn stats(raw: PathBuf, reference: Option<String>, out: PathBuf) -> AnyResult<()> {
    let raw = load_raw_json(raw)?;
    let reference = reference.unwrap_or(raw.reference);
    let summary = summarize(&raw.records, &reference)?;
    save_summary_csv(&summary.cells, out.join("summary.csv"))?;
    save_json(&summary, out.join("summary.json"))?;
    print_summary(&summary);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
        Command::Demo { which, seed, out } => demo(&which, seed, out),
        Command::Stats { raw, reference, out } => stats(raw, reference, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
