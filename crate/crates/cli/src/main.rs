use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use parseal::dictionary::build_dictionary_with_budget;
use parseal::io::{
    load_csv, run_pipeline, synth_example1, synth_example2, write_artifacts, write_csv,
    FitSettings, DEFAULT_SEED,
};
use parseal::{Error, ImportanceMode, SearchMode};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

/// Automatic variable transformation and best-subset model selection.
#[derive(Parser, Debug)]
#[command(name = "parseal", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, screen and search the transform dictionary; write a report.
    Fit(FitArgs),
    /// Write one of the built-in synthetic datasets as CSV.
    Synth(SynthArgs),
    /// Print the dictionary census as JSON without fitting anything.
    Dict(DictArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DeltaMode {
    Absolute,
    Relative,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Search {
    Exhaustive,
    #[value(alias = "greedy_forward", alias = "greedy-forward")]
    Greedy,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    response: String,
    /// Flat `key = value` settings file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Largest power / log exponent.
    #[arg(long)]
    alpha: Option<u32>,
    /// Maximum number of distinct variables per term.
    #[arg(long)]
    mixture: Option<usize>,
    /// Importance threshold.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    delta_mode: Option<DeltaMode>,
    /// Redundancy threshold on pairwise |corr|.
    #[arg(long)]
    varsigma: Option<f64>,
    #[arg(long)]
    vif_cap: Option<f64>,
    /// Largest subset size searched.
    #[arg(long)]
    max_terms: Option<usize>,
    #[arg(long, value_enum)]
    search: Option<Search>,
    /// Refuse exhaustive searches with more candidates than this.
    #[arg(long)]
    search_budget: Option<u64>,
    /// Also fit the untransformed best-subset baseline.
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json and the residual / agreement tables.
    /// Without it the report is printed to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Omit timing so that reports are byte-identical across runs.
    #[arg(long)]
    stable: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    example: u8,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DictArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    #[arg(long, default_value_t = 2)]
    mixture: usize,
    /// Write the census here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn settings(args: &FitArgs) -> anyhow::Result<FitSettings> {
    let mut s = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            FitSettings::from_text(&text)?
        }
        None => FitSettings::default(),
    };
    let c = &mut s.selection;
    if let Some(v) = args.alpha {
        c.alpha = v;
    }
    if let Some(v) = args.mixture {
        c.mixture_m = v;
    }
    if let Some(v) = args.delta {
        c.importance.value = v;
    }
    if let Some(m) = args.delta_mode {
        c.importance.mode = match m {
            DeltaMode::Absolute => ImportanceMode::Absolute,
            DeltaMode::Relative => ImportanceMode::Relative,
        };
    }
    if let Some(v) = args.varsigma {
        c.varsigma = v;
    }
    if let Some(v) = args.vif_cap {
        c.vif_cap = v;
    }
    if let Some(v) = args.max_terms {
        c.max_subset_size = v;
    }
    if let Some(m) = args.search {
        c.search_mode = match m {
            Search::Exhaustive => SearchMode::Exhaustive,
            Search::Greedy => SearchMode::GreedyForward,
        };
    }
    if let Some(v) = args.search_budget {
        c.search_budget = v;
    }
    if let Some(v) = args.seed {
        c.seed = v;
    }
    s.baseline |= args.baseline;
    Ok(s)
}

fn fit(args: FitArgs) -> anyhow::Result<()> {
    let s = settings(&args)?;
    let data = load_csv(&args.input, &args.response)?;
    let out = run_pipeline(&data, &s.selection, s.baseline)?;
    match &args.out_dir {
        Some(dir) => {
            write_artifacts(&out, dir, args.stable)?;
            let m = &out.report.selected;
            eprintln!("selected {} term(s): {}", m.terms.len(), m.terms.join(", "));
            eprintln!(
                "R^2 = {:.12}, adjusted R^2 = {:.12}, RMSE = {:.6e}",
                m.r_squared, m.r_squared_adj, m.rmse
            );
            if let Some(b) = &out.report.baseline {
                eprintln!(
                    "baseline: {} (adjusted R^2 = {:.12})",
                    b.terms.join(", "),
                    b.r_squared_adj
                );
            }
            eprintln!("wrote {}", dir.display());
        }
        None => {
            let mut report = out.report;
            if args.stable {
                report.timing = None;
            }
            print!("{}", report.to_json()?);
        }
    }
    Ok(())
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let data = match args.example {
        1 => synth_example1(args.n, args.seed)?,
        _ => synth_example2(args.n, args.seed)?,
    };
    write_csv(&data, &args.out)?;
    Ok(())
}

fn dict(args: DictArgs) -> anyhow::Result<()> {
    let data = load_csv(&args.input, &args.response)?;
    let z = build_dictionary_with_budget(
        &data,
        args.alpha,
        args.mixture,
        parseal::dictionary::DEFAULT_DICTIONARY_BUDGET,
    )?;
    let mut text = serde_json::to_string_pretty(z.census())?;
    text.push('\n');
    match args.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("PARSEAL_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!(
                "PARSEAL_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        if n == 0 {
            return Err(Error::InvalidConfig("PARSEAL_THREADS must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>().map(Error::root) {
        Some(Error::InvalidConfig(_)) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Fit(a) => fit(a),
        Command::Synth(a) => synth(a),
        Command::Dict(a) => dict(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
