//! Command-line driver: ingest course files, build and export the reply
//! graph, emit metric tables, run the full analysis, generate synthetic
//! courses, and cross-check the metric kernels against brute-force oracles.
//!
//! Exit codes: 0 success, 1 input error, 2 internal error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use replynet_core::analysis::{
    render_correlations_csv, render_group_comparison_csv, render_json, render_markdown,
    render_role_top_scores_csv, run_full_analysis, AnalysisConfig,
};
use replynet_core::graph::{build_graph, to_dot, to_graphml, BuildOptions, CountMode};
use replynet_core::metrics::{compute_metric_table, metric_table_to_csv, HitsConfig};
use replynet_core::model::{
    parse_course, serialize_grades, serialize_roster, serialize_threads, validate_course, Course,
};
use replynet_core::oracle;
use replynet_core::stats::SpearmanConfig;
use replynet_core::synth::{generate_course, SynthError, SynthParams};

use config::ConfigFile;

#[derive(Parser)]
#[command(name = "replynet", version, about = "Forum reply-graph analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and normalize course input files.
    Ingest(IngestArgs),
    /// Build the social graph and export it as GraphML or DOT.
    Graph(GraphArgs),
    /// Compute the per-user metric table as CSV.
    Metrics(MetricsArgs),
    /// Run the full analysis and write the report bundle.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic course.
    Synth(SynthArgs),
    /// Cross-check metrics and graph construction against brute-force
    /// oracles on random inputs.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Threads JSON document.
    #[arg(long)]
    threads: PathBuf,
    /// Roster CSV (user_id,role).
    #[arg(long)]
    roster: PathBuf,
    /// Grades CSV (user_id,grade).
    #[arg(long)]
    grades: PathBuf,
    /// Course identifier used in reports.
    #[arg(long, default_value = "course")]
    course_id: String,
}

#[derive(Args, Debug)]
struct GraphOptionArgs {
    /// Keep anonymous (unknown-role) users in the graph.
    #[arg(long)]
    include_unknown: bool,
    /// Drop students who never posted.
    #[arg(long)]
    active_only: bool,
    /// Drop TA and instructor nodes.
    #[arg(long)]
    exclude_staff: bool,
    /// Event counting rule for repeated prior posters.
    #[arg(long, value_enum, default_value = "distinct-participants")]
    count_mode: CountModeArg,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CountModeArg {
    DistinctParticipants,
    PriorPosts,
}

impl GraphOptionArgs {
    fn to_options(&self) -> BuildOptions {
        BuildOptions {
            drop_unknown: !self.include_unknown,
            restrict_to_active_students: self.active_only,
            include_staff: !self.exclude_staff,
            count_mode: match self.count_mode {
                CountModeArg::DistinctParticipants => CountMode::DistinctParticipants,
                CountModeArg::PriorPosts => CountMode::PriorPosts,
            },
        }
    }
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Directory for the normalized files; summary only if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    options: GraphOptionArgs,
    #[arg(long, value_enum, default_value = "graphml")]
    format: GraphFormat,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum GraphFormat {
    Graphml,
    Dot,
}

#[derive(Args, Debug)]
struct HitsArgs {
    /// HITS convergence tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// HITS iteration cap.
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Ignore edge weights in HITS.
    #[arg(long)]
    binary: bool,
}

impl HitsArgs {
    fn to_config(&self, config: &ConfigFile) -> Result<HitsConfig> {
        let defaults = HitsConfig::default();
        Ok(HitsConfig {
            tolerance: config.resolve("tolerance", self.tolerance, defaults.tolerance)?,
            max_iterations: config.resolve(
                "max_iterations",
                self.max_iterations,
                defaults.max_iterations,
            )?,
            use_weights: !config.resolve_bool("binary", self.binary)?,
        })
    }
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    options: GraphOptionArgs,
    #[command(flatten)]
    hits: HitsArgs,
    /// Config file with key = value lines mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    hits: HitsArgs,
    /// Config file with key = value lines mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report directory (report.json, report.md, tables/).
    #[arg(long)]
    out: PathBuf,
    /// Significance level for correlation rows.
    #[arg(long)]
    significance: Option<f64>,
    /// Seed for permutation p-values.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    permutation_rounds: Option<usize>,
    /// Sample sizes at or below this use permutation p-values.
    #[arg(long)]
    permutation_threshold: Option<usize>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    students: Option<usize>,
    #[arg(long)]
    staff: Option<usize>,
    #[arg(long)]
    peer_tutors: Option<usize>,
    /// Number of discussion threads.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    mean_posts: Option<f64>,
    /// Target Spearman correlation between post count and grade.
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long)]
    inactive_fraction: Option<f64>,
    /// Probability a reply is authored by staff.
    #[arg(long)]
    staff_share: Option<f64>,
    /// Config file with key = value lines mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for threads.json, roster.csv, grades.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Maximum nodes per random graph.
    #[arg(long, default_value_t = 10)]
    max_nodes: usize,
    /// Number of random graphs per metric check.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InternalError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Marker for failures that are not the user's fault.
#[derive(Debug)]
struct InternalError(String);

impl std::fmt::Display for InternalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InternalError {}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn load_course(input: &InputArgs) -> Result<Course> {
    let open = |path: &Path| {
        fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))
    };
    let course = parse_course(
        &input.course_id,
        open(&input.threads)?,
        open(&input.roster)?,
        open(&input.grades)?,
    )?;
    Ok(course)
}

fn write_or_stdout(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, content)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    log::info!("ingest: {:?}", args);
    let course = load_course(&args.input)?;
    let issues = validate_course(&course);
    if !issues.is_empty() {
        // parse_course validates, so this is a program bug.
        return Err(InternalError(format!("parsed course failed validation: {}", issues[0])).into());
    }
    if let Some(out) = &args.out {
        fs::create_dir_all(out)?;
        fs::write(out.join("threads.json"), serialize_threads(&course))?;
        fs::write(out.join("roster.csv"), serialize_roster(&course))?;
        fs::write(out.join("grades.csv"), serialize_grades(&course))?;
    }
    println!(
        "course {}: {} users, {} threads, {} posts, {} grades; ok",
        course.course_id,
        course.users.len(),
        course.threads.len(),
        course.posts().count(),
        course.gradebook.len(),
    );
    Ok(())
}

fn cmd_graph(args: GraphArgs) -> Result<()> {
    log::info!("graph: {:?}", args);
    let course = load_course(&args.input)?;
    let graph = build_graph(&course, args.options.to_options());
    let rendered = match args.format {
        GraphFormat::Graphml => to_graphml(&graph),
        GraphFormat::Dot => to_dot(&graph),
    };
    write_or_stdout(args.out.as_deref(), &rendered)
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let hits_config = args.hits.to_config(&config)?;
    log::info!("metrics: {:?} hits={:?}", args.input, hits_config);
    let course = load_course(&args.input)?;
    let graph = build_graph(&course, args.options.to_options());
    let table = compute_metric_table(&graph, &hits_config)
        .map_err(|e| InternalError(e.to_string()))?;
    if !table.hits_converged {
        log::warn!(
            "HITS did not converge within {} iterations",
            table.hits_iterations
        );
    }
    write_or_stdout(args.out.as_deref(), &metric_table_to_csv(&table))
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let config_file = ConfigFile::load(args.config.as_deref())?;
    let spearman_defaults = SpearmanConfig::default();
    let analysis_config = AnalysisConfig {
        hits: args.hits.to_config(&config_file)?,
        spearman: SpearmanConfig {
            permutation_threshold: config_file.resolve(
                "permutation_threshold",
                args.permutation_threshold,
                spearman_defaults.permutation_threshold,
            )?,
            permutation_rounds: config_file.resolve(
                "permutation_rounds",
                args.permutation_rounds,
                spearman_defaults.permutation_rounds,
            )?,
            seed: config_file.resolve("seed", args.seed, spearman_defaults.seed)?,
        },
        significance_level: config_file.resolve("significance", args.significance, 0.05)?,
    };
    log::info!("analyze: {:?} config={:?}", args.input, analysis_config);

    let course = load_course(&args.input)?;
    let report = run_full_analysis(&course, &analysis_config);

    let out = &args.out;
    let tables = out.join("tables");
    fs::create_dir_all(&tables)?;
    fs::write(out.join("report.json"), render_json(&report))?;
    fs::write(out.join("report.md"), render_markdown(&report))?;
    if let Some(comparison) = report.group_comparison.value() {
        fs::write(
            tables.join("group_comparison.csv"),
            render_group_comparison_csv(comparison),
        )?;
    }
    if let Some(rows) = report.correlations.value() {
        fs::write(tables.join("correlations.csv"), render_correlations_csv(rows))?;
    }
    if let Some(scores) = report.role_top_scores.value() {
        fs::write(
            tables.join("role_top_scores.csv"),
            render_role_top_scores_csv(scores),
        )?;
    }
    println!("report written to {}", out.display());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let defaults = SynthParams::default();
    let params = SynthParams {
        seed: config.resolve("seed", args.seed, defaults.seed)?,
        n_students: config.resolve("students", args.students, defaults.n_students)?,
        n_staff: config.resolve("staff", args.staff, defaults.n_staff)?,
        n_peer_tutors: config.resolve("peer_tutors", args.peer_tutors, defaults.n_peer_tutors)?,
        n_threads: config.resolve("threads", args.threads, defaults.n_threads)?,
        mean_posts_per_thread: config.resolve(
            "mean_posts",
            args.mean_posts,
            defaults.mean_posts_per_thread,
        )?,
        activity_grade_coupling: config.resolve(
            "coupling",
            args.coupling,
            defaults.activity_grade_coupling,
        )?,
        inactive_fraction: config.resolve(
            "inactive_fraction",
            args.inactive_fraction,
            defaults.inactive_fraction,
        )?,
        staff_answer_share: config.resolve(
            "staff_share",
            args.staff_share,
            defaults.staff_answer_share,
        )?,
    };
    log::info!("synth: {:?}", params);
    let course = generate_course(&params).map_err(|e| match e {
        SynthError::InvalidParams(_) | SynthError::Unsatisfiable(_) => anyhow!(e),
    })?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("threads.json"), serialize_threads(&course))?;
    fs::write(args.out.join("roster.csv"), serialize_roster(&course))?;
    fs::write(args.out.join("grades.csv"), serialize_grades(&course))?;
    println!(
        "synthetic course {} written to {}",
        course.course_id,
        args.out.display()
    );
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    log::info!("oracle: {:?}", args);
    let checked = oracle::run_metric_checks(args.max_nodes, args.trials, args.seed)
        .map_err(|e| InternalError(e.to_string()))?;
    let builder_trials = (args.trials / 10).max(3);
    let builder_checked = oracle::run_builder_checks(builder_trials, args.seed)
        .map_err(|e| InternalError(e.to_string()))?;
    println!(
        "all checks passed ({checked} metric graphs, {builder_checked} builder courses)"
    );
    Ok(())
}
