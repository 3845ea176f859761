use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qppsearch::driver;
use qppsearch::figure::{figure_rows, FigureKind};
use qppsearch::lengths::parse_lengths;
use qppsearch::manifest::{RunManifest, RunRequest};
use qppsearch::progress::{self, ProgressLog};
use qppsearch::records::{read_csv, write_csv, MetricsRow, SearchRow, SimRow, SpectrumRow};
use qppsearch_core::defaults::defaults_for;
use qppsearch_core::qpp::{ClassSelector, Qpp};
use qppsearch_core::search::{GroupOrdering, SearchConfig};
use qppsearch_core::sim::{SimConfig, DEFAULT_LLR_STOP_THRESHOLD, DEFAULT_MAX_FRAMES, DEFAULT_MAX_ITERATIONS, DEFAULT_MIN_ERROR_FRAMES};
use qppsearch_core::spectrum::{spectrum_of, Budget, DEFAULT_WEIGHT_CEILING};
use qppsearch_core::tub::{tub_ber, tub_fer};

#[derive(Parser)]
#[command(name = "qppsearch", version, about = "QPP interleaver search for LTE turbo codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spread factor, nonlinearity degrees and reducibility of one QPP.
    Metrics {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        q0: usize,
        #[arg(long)]
        q1: usize,
        #[arg(long)]
        q2: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leading distance spectrum terms of the turbo code using one QPP.
    Spectrum {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        q1: usize,
        #[arg(long)]
        q2: usize,
        /// Number of terms; defaults to the table value for the length.
        #[arg(long)]
        num_dist: Option<usize>,
        /// SNR for the printed bounds; defaults to the table value.
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finds the QPP of a class with the smallest TUB(FER).
    Search(SearchArgs),
    /// Monte-Carlo frame error rate over Rayleigh fading.
    Simulate {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        q1: usize,
        #[arg(long)]
        q2: usize,
        /// Comma-separated SNR points (Eb/N0, dB).
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        snr_db: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MIN_ERROR_FRAMES)]
        min_errors: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_FRAMES)]
        max_frames: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: u32,
        #[arg(long, default_value_t = DEFAULT_LLR_STOP_THRESHOLD)]
        llr_threshold: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot data from search result CSV files.
    FigureData {
        #[arg(long, value_enum)]
        kind: FigureArg,
        /// Search CSV files; none gives a header-only file.
        #[arg(long, num_args = 0..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct BudgetArgs {
    /// Heaviest codeword weight enumerated.
    #[arg(long, default_value_t = DEFAULT_WEIGHT_CEILING)]
    budget: u32,
    /// Maximum search nodes per spectrum.
    #[arg(long)]
    node_limit: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            weight_ceiling: self.budget,
            node_limit: self.node_limit,
        }
    }
}

#[derive(clap::Args)]
struct SearchArgs {
    /// Lengths: `40`, `40,48` or a range over table lengths such as `40-96`.
    #[arg(long)]
    length: String,
    #[arg(long, value_enum, default_value_t = ClassArg::Ls)]
    class: ClassArg,
    /// Spread target for `--class d-target`; defaults to the LTE value.
    #[arg(long)]
    d_target: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    num_dist: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Compute every group completely.
    #[arg(long)]
    no_prune: bool,
    /// Keep QPPs that reduce to linear permutations.
    #[arg(long)]
    include_lpp: bool,
    /// Also enumerate the constant coefficient.
    #[arg(long)]
    include_q0: bool,
    #[arg(long, value_enum, default_value_t = OrderArg::Spread)]
    order: OrderArg,
    /// CSV output; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON manifest with full-precision records.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// JSON-lines log of finished groups; resumes from it if present.
    #[arg(long)]
    progress: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Ls,
    DTarget,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    /// Descending D, then descending ζ', then coefficients.
    Spread,
    Coefficients,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    MinDistance,
    D,
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn metrics(length: usize, q0: usize, q1: usize, q2: usize, out: Option<&Path>) -> anyhow::Result<()> {
    if length < 2 || q0 >= length || q1 >= length || q2 >= length {
        bail!("coefficients must lie in 0..{length} and the length must be at least 2");
    }
    let qpp = Qpp::with_shift(length, q0, q1, q2);
    let row = MetricsRow::of(&qpp);
    write_csv(output(out)?, std::slice::from_ref(&row))?;
    qpp.permutation()?;
    Ok(())
}

fn checked_qpp(length: usize, q1: usize, q2: usize) -> anyhow::Result<Qpp> {
    if length < 2 || q1 >= length || q2 >= length {
        bail!("coefficients must lie in 0..{length} and the length must be at least 2");
    }
    let qpp = Qpp::new(length, q1, q2);
    qpp.permutation()?;
    Ok(qpp)
}

#[allow(clippy::too_many_arguments)]
fn spectrum(
    length: usize,
    q1: usize,
    q2: usize,
    num_dist: Option<usize>,
    snr_db: Option<f64>,
    budget: Budget,
    format: Format,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let qpp = checked_qpp(length, q1, q2)?;
    let row = defaults_for(length).ok();
    let m = num_dist.or(row.map(|r| r.num_dist)).unwrap_or(1);
    let snr = snr_db.or(row.map(|r| r.snr_db));
    let s = spectrum_of(&qpp.permutation()?, m, &budget)?;
    let mut w = output(out)?;
    match format {
        Format::Csv => write_csv(w, &SpectrumRow::rows(&qpp, &s))?,
        Format::Text => {
            writeln!(w, "{s}")?;
            if let Some(snr) = snr {
                writeln!(w, "snr_db {snr}")?;
                writeln!(w, "tub_ber_e7 {:.4}", tub_ber(&s, length, snr) * 1e7)?;
                writeln!(w, "tub_fer_e5 {:.4}", tub_fer(&s, length, snr) * 1e5)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn search_config(args: &SearchArgs, length: usize) -> anyhow::Result<SearchConfig> {
    let row = defaults_for(length).ok();
    let kind = match args.class {
        ClassArg::Ls => ClassSelector::largest_spread(),
        ClassArg::All => ClassSelector::all(),
        ClassArg::DTarget => {
            let target = match (args.d_target, row) {
                (Some(d), _) => d,
                (None, Some(r)) => r.lte().permutation()?.spread(),
                (None, None) => bail!("length {length} has no LTE polynomial; pass --d-target"),
            };
            ClassSelector::spread_target(target)
        }
    };
    let selector = ClassSelector {
        exclude_lpp_reducible: !args.include_lpp,
        include_q0: args.include_q0,
        ..kind
    };
    let (snr_db, num_dist) = match (args.snr_db, args.num_dist, row) {
        (Some(s), Some(m), _) => (s, m),
        (s, m, Some(r)) => (s.unwrap_or(r.snr_db), m.unwrap_or(r.num_dist)),
        _ => bail!("length {length} is not in the defaults table; pass --snr-db and --num-dist"),
    };
    Ok(SearchConfig {
        length,
        selector,
        snr_db,
        num_dist,
        baseline: row.map(|r| r.lte()),
        ordering: match args.order {
            OrderArg::Spread => GroupOrdering::SpreadThenZeta,
            OrderArg::Coefficients => GroupOrdering::Coefficients,
        },
        budget: args.budget.budget(),
        pruning: !args.no_prune,
    })
}

fn search(args: &SearchArgs) -> anyhow::Result<()> {
    let lengths = parse_lengths(&args.length)?;
    let configs = lengths
        .iter()
        .map(|&l| search_config(args, l))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let source = |o: bool| if o { "override" } else { "defaults" }.to_string();
    let mut manifest = RunManifest::new(RunRequest {
        lengths: lengths.clone(),
        class: match args.class {
            ClassArg::Ls => "ls",
            ClassArg::DTarget => "d-target",
            ClassArg::All => "all",
        }
        .to_string(),
        jobs: args.jobs,
        snr_source: source(args.snr_db.is_some()),
        num_dist_source: source(args.num_dist.is_some()),
    });
    let mut log = args.progress.as_deref().map(ProgressLog::open).transpose()?;
    let mut rows = Vec::new();
    for config in configs {
        let resumed = match &args.progress {
            Some(p) => progress::load(p, &config)?,
            None => Vec::new(),
        };
        let (record, reports) = driver::run_search(&config, args.jobs, resumed, |report| match log.as_mut() {
            Some(log) => log.append(&config, report),
            None => Ok(()),
        })
        .with_context(|| format!("search at length {}", config.length))?;
        eprintln!(
            "L={}: {} D={} {} TUB(FER)={:.4}e-5 groups={} aborted={}",
            record.length,
            record.winner,
            record.d,
            record.spectrum.head().map(|t| t.to_string()).unwrap_or_default(),
            record.tub_fer * 1e5,
            record.groups_total,
            record.groups_aborted,
        );
        rows.push(SearchRow::from_record(&record));
        manifest.push(config, record, &reports);
    }
    write_csv(output(args.out.as_deref())?, &rows)?;
    if let Some(path) = &args.manifest {
        std::fs::write(path, manifest.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Metrics {
            length,
            q0,
            q1,
            q2,
            out,
        } => metrics(length, q0, q1, q2, out.as_deref()),
        Command::Spectrum {
            length,
            q1,
            q2,
            num_dist,
            snr_db,
            budget,
            format,
            out,
        } => spectrum(length, q1, q2, num_dist, snr_db, budget.budget(), format, out.as_deref()),
        Command::Search(args) => search(&args),
        Command::Simulate {
            length,
            q1,
            q2,
            snr_db,
            seed,
            min_errors,
            max_frames,
            max_iterations,
            llr_threshold,
            jobs,
            out,
        } => {
            let qpp = checked_qpp(length, q1, q2)?;
            let config = SimConfig {
                perm: qpp.permutation()?,
                snr_points_db: snr_db,
                max_iterations,
                llr_stop_threshold: llr_threshold,
                min_error_frames: min_errors,
                max_frames,
                rng_seed: seed,
            };
            let points = driver::simulate(&config, jobs)?;
            let rows: Vec<SimRow> = points.iter().map(SimRow::from).collect();
            write_csv(output(out.as_deref())?, &rows)?;
            Ok(())
        }
        Command::FigureData { kind, input, out } => {
            let mut rows: Vec<SearchRow> = Vec::new();
            for path in &input {
                let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                rows.extend(read_csv::<SearchRow, _>(file).with_context(|| format!("reading {}", path.display()))?);
            }
            let kind = match kind {
                FigureArg::MinDistance => FigureKind::MinDistance,
                FigureArg::D => FigureKind::Spread,
            };
            write_csv(output(out.as_deref())?, &figure_rows(kind, &rows))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(qppsearch::exit_code(&err) as u8)
        }
    }
}
