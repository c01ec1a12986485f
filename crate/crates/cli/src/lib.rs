//! `payback`: exact payback-period analysis from the command line.
//!
//! Exit codes: 0 success, 1 a functional violated an axiom it is known to
//! satisfy, 2 bad input or flags, 3 a discount table is missing a factor.

pub mod error;
pub mod input;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use payback_core::axioms::{self, Axiom, PaybackFunctional, PerturbationNorm};
use payback_core::discount::DEFAULT_PRECISION;
use payback_core::metrics::{self, report};
use payback_core::{parse_rational, DiscountFunction, ExtendedTime, MetricKind, Project, Rational};

pub use error::CliError;
use input::{parse_discount_table, parse_events, ProjectFile};
use output::{
    join, verdict, AnalyzeOutput, AxiomEntry, AxiomsOutput, CompareOutput, MetricValue, NamedReport, PortfolioReport,
};

#[derive(Debug, Parser)]
#[command(name = "payback", version, about = "Exact payback-period analysis of cash-flow streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Payback metrics for one project.
    Analyze(AnalyzeArgs),
    /// Metrics for several projects and their pooled sum.
    Portfolio(PortfolioArgs),
    /// All metrics side by side with the break-even points.
    Compare(CompareArgs),
    /// Falsification checks of a named payback functional.
    Axioms(AxiomsArgs),
    /// Balance path as CSV (`t,balance_before,balance_at`).
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
struct DiscountArgs {
    /// Exponential discounting at this per-period rate (e.g. 0.1 or 1/10).
    #[arg(long, value_name = "R", conflicts_with = "discount_table")]
    rate: Option<String>,
    /// CSV of `time,factor` pairs; the factor at 0 defaults to 1.
    #[arg(long, value_name = "FILE")]
    discount_table: Option<PathBuf>,
    /// Decimal digits kept when a fractional-time exponential factor must be rounded.
    #[arg(long, value_name = "DIGITS", default_value_t = DEFAULT_PRECISION)]
    precision: u32,
}

impl DiscountArgs {
    fn resolve(&self) -> Result<Option<DiscountFunction>, CliError> {
        if let Some(path) = &self.discount_table {
            return parse_discount_table(path).map(Some);
        }
        match &self.rate {
            Some(rate) => {
                let rate = parse_flag("--rate", rate)?;
                DiscountFunction::exponential(rate, self.precision)
                    .map(Some)
                    .map_err(|e| CliError::Usage(e.to_string()))
            }
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricChoice {
    Last,
    First,
    Modified,
    Discounted,
    All,
}

impl MetricChoice {
    fn kinds(self, alpha: Option<&DiscountFunction>) -> Result<Vec<MetricKind>, CliError> {
        let kinds = match self {
            MetricChoice::Last => vec![MetricKind::LastBreakeven],
            MetricChoice::First => vec![MetricKind::FirstBreakeven],
            MetricChoice::Modified => vec![MetricKind::Modified],
            MetricChoice::Discounted => vec![MetricKind::DiscountedLast],
            MetricChoice::All => MetricKind::ALL
                .into_iter()
                .filter(|k| *k != MetricKind::DiscountedLast || alpha.is_some())
                .collect(),
        };
        if kinds.contains(&MetricKind::DiscountedLast) && alpha.is_none() {
            return Err(CliError::Usage("--metric discounted needs --rate or --discount-table".into()));
        }
        Ok(kinds)
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricChoice::All)]
    metric: MetricChoice,
    #[command(flatten)]
    discount: DiscountArgs,
    /// Maximum acceptable payback period; a value equal to it is accepted.
    #[arg(long, value_name = "M")]
    mapp: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct PortfolioArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = MetricChoice::Last)]
    metric: MetricChoice,
    #[command(flatten)]
    discount: DiscountArgs,
    #[arg(long, value_name = "M")]
    mapp: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    file: PathBuf,
    #[command(flatten)]
    discount: DiscountArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxiomChoice {
    Comp,
    Acons,
    Mon,
    Lsc,
    AlphaComp,
    AlphaMon,
    All,
}

impl AxiomChoice {
    fn axioms(self) -> Vec<Axiom> {
        match self {
            AxiomChoice::Comp => vec![Axiom::Comp],
            AxiomChoice::Acons => vec![Axiom::Acons],
            AxiomChoice::Mon => vec![Axiom::Mon],
            AxiomChoice::Lsc => vec![Axiom::Lsc],
            AxiomChoice::AlphaComp => vec![Axiom::AlphaComp],
            AxiomChoice::AlphaMon => vec![Axiom::AlphaMon],
            AxiomChoice::All => Axiom::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormChoice {
    Balance,
    TotalVariation,
    Independent,
}

#[derive(Debug, Args)]
struct AxiomsArgs {
    /// LAST_BE, FIRST_BE, MODIFIED, CONST_ZERO or OBS3_RESTRICTED; prefix
    /// with DISCOUNTED_ to evaluate on the discounted stream.
    functional: String,
    #[arg(long, value_enum, default_value_t = AxiomChoice::All)]
    axiom: AxiomChoice,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How amount perturbations are bounded in the LSC check.
    #[arg(long, value_enum, default_value_t = NormChoice::Balance)]
    lsc_norm: NormChoice,
    #[command(flatten)]
    discount: DiscountArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    file: PathBuf,
    #[command(flatten)]
    discount: DiscountArgs,
    /// Print decimal approximations instead of exact fractions.
    #[arg(long)]
    float: bool,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::Portfolio(a) => portfolio(a, out, err),
        Command::Compare(a) => compare(a, out),
        Command::Axioms(a) => axioms_cmd(a, out),
        Command::PlotData(a) => plot_data(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn parse_flag(flag: &str, value: &str) -> Result<Rational, CliError> {
    parse_rational(value).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

fn parse_mapp(mapp: &Option<String>) -> Result<Option<Rational>, CliError> {
    let Some(m) = mapp else { return Ok(None) };
    let m = parse_flag("--mapp", m)?;
    if m <= Rational::default() {
        return Err(CliError::Usage(format!("--mapp must be positive, got {m}")));
    }
    Ok(Some(m))
}

fn load(path: &Path) -> Result<(ProjectFile, Project), CliError> {
    let file = parse_events(path)?;
    let project = file.project()?;
    Ok((file, project))
}

fn emit_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report types always serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (file, x) = load(&args.file)?;
    let alpha = args.discount.resolve()?;
    let mapp = parse_mapp(&args.mapp)?;
    let reports = args
        .metric
        .kinds(alpha.as_ref())?
        .into_iter()
        .map(|k| report(&x, k, alpha.as_ref(), mapp.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    let result = AnalyzeOutput {
        name: file.name,
        class: x.classify(),
        discount: alpha.as_ref().map(DiscountFunction::describe),
        reports,
    };
    if args.json {
        emit_json(out, &result)?;
        return Ok(0);
    }
    writeln!(out, "project {} ({} events, class {})", result.name, x.len(), result.class.tag)?;
    if let Some(d) = &result.discount {
        writeln!(out, "discount {d}")?;
    }
    for r in &result.reports {
        writeln!(
            out,
            "{:<16} {:<8} breakeven: {}{}",
            r.kind.as_str(),
            r.value.to_string(),
            join(&r.breakeven_points),
            verdict(r.acceptable)
        )?;
    }
    Ok(0)
}

fn portfolio(args: &PortfolioArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let alpha = args.discount.resolve()?;
    let mapp = parse_mapp(&args.mapp)?;
    let loaded = args.files.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let pool = loaded.iter().fold(Project::zero(), |acc, (_, x)| &acc + x);
    let mut portfolios = Vec::new();
    for kind in args.metric.kinds(alpha.as_ref())? {
        let projects = loaded
            .iter()
            .map(|(f, x)| {
                Ok(NamedReport { name: f.name.clone(), report: report(x, kind, alpha.as_ref(), mapp.as_ref())? })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let pool_report = report(&pool, kind, alpha.as_ref(), mapp.as_ref())?;
        let bound = projects.iter().map(|p| p.report.value.clone()).max().unwrap_or_else(ExtendedTime::zero);
        let holds = pool_report.value <= bound;
        portfolios.push(PortfolioReport {
            metric: kind,
            projects,
            pool: pool_report,
            max_rule_bound: bound,
            max_rule_holds: holds,
        });
    }
    for p in portfolios.iter().filter(|p| !p.max_rule_holds) {
        writeln!(
            err,
            "warning: pooled {} is {}, above the largest individual value {}",
            p.metric, p.pool.value, p.max_rule_bound
        )?;
    }
    if args.json {
        match portfolios.as_slice() {
            [single] => emit_json(out, single)?,
            many => emit_json(out, &many)?,
        }
        return Ok(0);
    }
    for p in &portfolios {
        writeln!(out, "{}", p.metric)?;
        for n in &p.projects {
            writeln!(out, "  {:<20} {}{}", n.name, n.report.value, verdict(n.report.acceptable))?;
        }
        writeln!(out, "  {:<20} {}{}", "pool", p.pool.value, verdict(p.pool.acceptable))?;
        writeln!(
            out,
            "  max rule: pool {} max {} -> {}",
            p.pool.value,
            p.max_rule_bound,
            if p.max_rule_holds { "holds" } else { "fails" }
        )?;
    }
    Ok(0)
}

fn compare(args: &CompareArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (file, x) = load(&args.file)?;
    let alpha = args.discount.resolve()?;
    let metrics = MetricChoice::All
        .kinds(alpha.as_ref())?
        .into_iter()
        .map(|kind| Ok(MetricValue { kind, value: metrics::metric(&x, kind, alpha.as_ref())? }))
        .collect::<Result<Vec<_>, CliError>>()?;
    let result = CompareOutput {
        name: file.name,
        class: x.classify(),
        terminal_value: x.terminal_value(),
        breakeven_points: x.breakeven_points(),
        metrics,
    };
    if args.json {
        emit_json(out, &result)?;
        return Ok(0);
    }
    writeln!(out, "project   {}", result.name)?;
    match &result.class.phase_switch {
        Some(s) => writeln!(out, "class     {} (switch at {s})", result.class.tag)?,
        None => writeln!(out, "class     {}", result.class.tag)?,
    }
    writeln!(out, "terminal  {}", result.terminal_value)?;
    writeln!(out, "breakeven {}", join(&result.breakeven_points))?;
    for m in &result.metrics {
        writeln!(out, "{:<16} {}", m.kind.as_str(), m.value)?;
    }
    Ok(0)
}

fn resolve_functional(name: &str, alpha: Option<&DiscountFunction>) -> Result<PaybackFunctional, CliError> {
    let upper = name.trim().to_ascii_uppercase();
    match upper.strip_prefix("DISCOUNTED_") {
        Some(base) => {
            let alpha = alpha.ok_or_else(|| CliError::Usage(format!("{upper} needs --rate or --discount-table")))?;
            Ok(axioms::builtin(base)
                .map_err(|e| CliError::Usage(e.to_string()))?
                .discounted(alpha.clone()))
        }
        None => axioms::builtin(&upper).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn axioms_cmd(args: &AxiomsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let alpha = args.discount.resolve()?;
    let f = resolve_functional(&args.functional, alpha.as_ref())?;
    let check_alpha = alpha.unwrap_or_else(DiscountFunction::identity);
    let norm = match args.lsc_norm {
        NormChoice::Independent => PerturbationNorm::Independent,
        NormChoice::TotalVariation => PerturbationNorm::TotalVariation,
        NormChoice::Balance => PerturbationNorm::Balance,
    };
    let (trials, seed) = (args.trials, args.seed);
    let mut results = Vec::new();
    for axiom in args.axiom.axioms() {
        let report = match axiom {
            Axiom::Comp => axioms::check_comp(&f, trials, seed)?,
            Axiom::Acons => axioms::check_acons(&f, trials, seed)?,
            Axiom::Mon => axioms::check_mon(&f, trials, seed)?,
            Axiom::Lsc => axioms::check_lsc_suite(&f, trials, seed, norm)?,
            Axiom::AlphaComp => axioms::check_alpha_comp(&f, &check_alpha, trials, seed)?,
            Axiom::AlphaMon => axioms::check_alpha_mon(&f, &check_alpha, trials, seed)?,
        };
        results.push(AxiomEntry { expected: f.expectation(axiom, &check_alpha).into(), report });
    }
    let failed = results.iter().any(AxiomEntry::is_unexpected_failure);
    let result = AxiomsOutput {
        functional: f.name().to_string(),
        discount: check_alpha.describe(),
        seed,
        trials,
        results,
    };
    if args.json {
        emit_json(out, &result)?;
    } else {
        writeln!(out, "functional {} (discount {}, seed {})", result.functional, result.discount, seed)?;
        for e in &result.results {
            let r = &e.report;
            write!(
                out,
                "{:<11} {:<14} trials={} violations={} expected={}",
                r.axiom.as_str(),
                r.status.to_string(),
                r.trials,
                r.violation_count,
                e.expected
            )?;
            if let Some(d) = &r.largest_stable_delta {
                write!(out, " stable_delta={d}")?;
            }
            writeln!(out)?;
            if let Some(w) = r.violations.first() {
                let inputs: Vec<String> = w.inputs.iter().map(|i| format!("{}={}", i.label, i.project)).collect();
                let observed: Vec<String> = w.observed.iter().map(ToString::to_string).collect();
                writeln!(out, "  witness {} -> {}", inputs.join(" "), observed.join(", "))?;
            }
        }
    }
    Ok(if failed { 1 } else { 0 })
}

fn plot_data(args: &PlotArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (_, x) = load(&args.file)?;
    let x = match args.discount.resolve()? {
        Some(alpha) => alpha.apply(&x)?.project,
        None => x,
    };
    let render = |v: &Rational| -> String {
        if args.float {
            v.to_f64().map_or_else(|| v.to_string(), |f| f.to_string())
        } else {
            v.to_string()
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "balance_before", "balance_at"]).map_err(csv_err)?;
    let mut before = Rational::default();
    for (t, at) in x.balances() {
        w.write_record([render(&t), render(&before), render(&at)]).map_err(csv_err)?;
        before = at;
    }
    let beyond = x.last_time().map_or_else(|| Rational::from_integer(1.into()), |t| t + Rational::from_integer(1.into()));
    w.write_record([render(&beyond), render(&before), render(&before)]).map_err(csv_err)?;
    out.write_all(&w.into_inner().map_err(|e| CliError::Output(e.into_error()))?)?;
    Ok(0)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Output(std::io::Error::other(e))
}
