//! `octgaps`: batch runs for slope-gap statistics of the regular octagon and the L surface.

mod output;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use octgaps_core::distribution::{self, pdf, pdf_piece_id, BREAKPOINTS};
use octgaps_core::experiments::{self, GapSample, KSReport};
use octgaps_core::scalar::fmt_g17;
use octgaps_core::section::{trajectory_csv, Section};
use octgaps_core::verify::{self, VerifyConfig, CHECKS};
use octgaps_core::{Component, QSqrt2, Scalar, SectionPoint};
use serde::Serialize;

use output::{gaps_script, histogram_script, pdf_script, sibling, write_atomic};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "octgaps", version, about = "Slope gap statistics for the regular octagon")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Renormalized gaps from section iteration, with histograms.
    Gaps(GapsArgs),
    /// Table of the limiting density on a grid.
    Pdf(PdfArgs),
    /// Run the verification suite; extra `--tol-<check> <value>` flags override tolerances.
    Verify(VerifyArgs),
    /// Kolmogorov–Smirnov distance of a gap sample to the limiting CDF.
    Ks(KsArgs),
    /// Dump a section trajectory.
    Trajectory(Box<TrajectoryArgs>),
    /// Return counts against R² for R = (1+√2)^k.
    Growth(GrowthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Exact,
    Float,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SampleArgs {
    /// Arithmetic backend.
    #[arg(long, value_enum, default_value_t = Mode::Float)]
    mode: Mode,
    /// Radius exponent: R = (1+√2)^k.
    #[arg(long, default_value_t = 8)]
    k: u32,
    /// Number of section returns.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Recorded in reports; sampling here is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GapsArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long, default_value = "gaps.csv")]
    out: PathBuf,
    /// Histogram bins on [1, 20).
    #[arg(long, default_value_t = 190)]
    bins: usize,
    /// Also write the histogram of gaps rescaled to the octagon.
    #[arg(long)]
    octagon: bool,
}

#[derive(Args, Debug)]
struct PdfArgs {
    /// `lo:hi:step`; the seven breakpoints are always added.
    #[arg(long, default_value = "0.5:20:0.01")]
    grid: String,
    #[arg(long, default_value = "pdf.csv")]
    out: PathBuf,
    /// Tabulate the octagon density instead of the L density.
    #[arg(long)]
    octagon: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "verify-report.json")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct KsArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long, default_value = "ks.json")]
    out: PathBuf,
    /// Pass threshold; defaults to 0.01 for n ≥ 10⁵ and 0.05 otherwise.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Start at the section point for R = (1+√2)^k unless `--a`/`--b` are given.
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Start point coordinates as `p + q*sqrt2` text.
    #[arg(long, requires = "b", allow_hyphen_values = true)]
    a: Option<QSqrt2>,
    #[arg(long, requires = "a", allow_hyphen_values = true)]
    b: Option<QSqrt2>,
    #[arg(long, default_value = "one")]
    component: String,
    #[arg(long, default_value = "trajectory.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GrowthArgs {
    #[arg(long, default_value_t = 8)]
    k_max: u32,
    #[arg(long, default_value = "growth.csv")]
    out: PathBuf,
}

enum Outcome {
    Ok,
    Failed,
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Pulls `--tol-<check> <v>` and `--tol-<check>=<v>` out of argv.
fn split_tolerances(args: Vec<String>) -> Result<(Vec<String>, BTreeMap<String, f64>)> {
    let mut rest = Vec::new();
    let mut tol = BTreeMap::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(spec) = arg.strip_prefix("--tol-") else {
            rest.push(arg);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => (spec.to_string(), it.next().ok_or_else(|| usage(format!("--tol-{spec} needs a value")))?),
        };
        let name = name.replace('-', "_");
        if verify::default_tolerance(&name).is_none() {
            let known: Vec<&str> = CHECKS.iter().map(|(n, _)| *n).collect();
            return Err(usage(format!("unknown check '{name}'; known: {}", known.join(", "))));
        }
        let v: f64 = value.parse().map_err(|_| usage(format!("bad tolerance '{value}' for {name}")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(usage(format!("tolerance for {name} must be a finite number ≥ 0")));
        }
        tol.insert(name, v);
    }
    Ok((rest, tol))
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("OCTGAPS_THREADS") {
        let n: usize =
            v.parse().ok().filter(|&n| n > 0).ok_or_else(|| usage("OCTGAPS_THREADS must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    Ok(())
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(usage(format!("grid '{spec}' is not lo:hi:step")));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| usage(format!("grid '{spec}': bad number '{s}'")));
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo) {
        return Err(usage(format!("grid '{spec}' needs finite lo ≤ hi and step > 0")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    if count > 10_000_000 {
        return Err(usage("grid has more than 10⁷ points"));
    }
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

/// Grid points merged with `breaks`; a grid point within 10⁻¹² of a break is replaced by it.
fn merge_breaks(mut grid: Vec<f64>, breaks: &[f64]) -> Vec<f64> {
    grid.retain(|t| breaks.iter().all(|b| (t - b).abs() > 1e-12));
    grid.extend_from_slice(breaks);
    grid.sort_by(f64::total_cmp);
    grid
}

fn pdf_table(grid: &[f64], octagon: bool) -> String {
    let c2 = distribution::constants().octagon_scale.powi(2);
    let mut out = String::from("t,f,piece_id\n");
    for &t in grid {
        let (f, id) =
            if octagon { (distribution::octagon_pdf(t), pdf_piece_id(t / c2)) } else { (pdf(t), pdf_piece_id(t)) };
        let _ = writeln!(out, "{},{},{}", fmt_g17(t), fmt_g17(f), id);
    }
    out
}

fn cmd_pdf(args: &PdfArgs) -> Result<Outcome> {
    let c2 = distribution::constants().octagon_scale.powi(2);
    let breaks: Vec<f64> =
        if args.octagon { BREAKPOINTS.iter().map(|b| b * c2).collect() } else { BREAKPOINTS.to_vec() };
    let grid = merge_breaks(parse_grid(&args.grid)?, &breaks);
    write_atomic(&args.out, &pdf_table(&grid, args.octagon))?;
    write_atomic(&sibling(&args.out, ".gp"), &pdf_script(&args.out))?;
    println!("wrote {} rows to {}", grid.len(), args.out.display());
    Ok(Outcome::Ok)
}

#[allow(clippy::large_enum_variant)]
enum AnySample {
    Exact(GapSample<QSqrt2>),
    Float(GapSample<f64>),
}

impl AnySample {
    fn gaps_f64(&self) -> Result<Vec<f64>> {
        Ok(match self {
            AnySample::Exact(s) => s.gaps_f64()?,
            AnySample::Float(s) => s.gaps_f64()?,
        })
    }
    fn csv(&self) -> String {
        match self {
            AnySample::Exact(s) => s.to_csv(),
            AnySample::Float(s) => s.to_csv(),
        }
    }
    fn suspect_steps(&self) -> usize {
        match self {
            AnySample::Exact(s) => s.suspect_steps,
            AnySample::Float(s) => s.suspect_steps,
        }
    }
}

fn sample(args: &SampleArgs) -> Result<AnySample> {
    let n = args.n as usize;
    if n < 2 {
        return Err(usage("need at least two returns"));
    }
    Ok(match args.mode {
        Mode::Exact => AnySample::Exact(experiments::exact_gaps_for_exponent(args.k, n)?),
        Mode::Float => AnySample::Float(experiments::float_gaps_for_exponent(args.k, n)?),
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn cmd_gaps(args: &GapsArgs) -> Result<Outcome> {
    if args.bins == 0 {
        return Err(usage("--bins must be positive"));
    }
    let s = sample(&args.sample)?;
    let gaps = s.gaps_f64()?;
    write_atomic(&args.out, &s.csv())?;
    write_atomic(&sibling(&args.out, ".gp"), &gaps_script(&args.out))?;

    let hist_path = sibling(&args.out, ".hist.csv");
    let hist = experiments::histogram(&gaps, 1.0, 20.0, args.bins);
    write_atomic(&hist_path, &experiments::histogram_csv(&hist))?;
    write_atomic(&sibling(&hist_path, ".gp"), &histogram_script(&hist_path, "gaps of L"))?;

    if args.octagon {
        let c2 = distribution::constants().octagon_scale.powi(2);
        let oct_path = sibling(&args.out, ".octagon.hist.csv");
        let oct = experiments::histogram(&experiments::octagon_gaps(&gaps), c2, 20.0 * c2, args.bins);
        write_atomic(&oct_path, &experiments::histogram_csv(&oct))?;
        write_atomic(&sibling(&oct_path, ".gp"), &histogram_script(&oct_path, "gaps of the octagon"))?;
    }
    println!(
        "wrote {} gaps to {} (mean {}, suspect steps {})",
        gaps.len(),
        args.out.display(),
        fmt_g17(mean(&gaps)),
        s.suspect_steps()
    );
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct KsFile<'a> {
    config: &'a SampleArgs,
    report: KSReport,
    mean_gap: f64,
    suspect_steps: usize,
}

fn cmd_ks(args: &KsArgs) -> Result<Outcome> {
    if args.sample.n < 1000 {
        return Err(usage("ks needs n ≥ 1000"));
    }
    let threshold = args.threshold.unwrap_or(if args.sample.n >= 100_000 { 0.01 } else { 0.05 });
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(usage("--threshold must lie in (0, 1]"));
    }
    let s = sample(&args.sample)?;
    let gaps = s.gaps_f64()?;
    let report = experiments::ks_distance(&gaps, distribution::cdf_many, threshold);
    let passed = report.passed;
    println!("ks distance {} (threshold {}, n {})", fmt_g17(report.ks_distance), threshold, report.sample_size);
    let file = KsFile { config: &args.sample, report, mean_gap: mean(&gaps), suspect_steps: s.suspect_steps() };
    write_atomic(&args.out, &(serde_json::to_string_pretty(&file)? + "\n"))?;
    Ok(if passed { Outcome::Ok } else { Outcome::Failed })
}

fn cmd_verify(args: &VerifyArgs, tolerances: BTreeMap<String, f64>) -> Result<Outcome> {
    let report = verify::run(&VerifyConfig { seed: args.seed, tolerances })?;
    write_atomic(&args.out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    for c in &report.checks {
        println!(
            "{} {} computed={} expected={} tol={}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            fmt_g17(c.computed),
            fmt_g17(c.expected),
            c.tolerance
        );
    }
    Ok(if report.all_pass { Outcome::Ok } else { Outcome::Failed })
}

fn parse_component(s: &str) -> Result<Component> {
    match s.to_ascii_lowercase().as_str() {
        "one" | "1" => Ok(Component::One),
        "two" | "2" => Ok(Component::Two),
        _ => Err(usage(format!("component '{s}' is not one or two"))),
    }
}

fn write_trajectory<S: Scalar>(start: SectionPoint<S>, n: usize, out: &Path) -> Result<()> {
    let steps = Section::<S>::new().trajectory(&start, n)?;
    write_atomic(out, &trajectory_csv(&start, &steps))
}

fn cmd_trajectory(args: &TrajectoryArgs) -> Result<Outcome> {
    let start = match (&args.a, &args.b) {
        (Some(a), Some(b)) => SectionPoint::new(parse_component(&args.component)?, a.clone(), b.clone()),
        _ => experiments::start_for_exponent(args.k)?,
    };
    if !Section::<QSqrt2>::new().contains(&start) {
        return Err(usage("start point is outside the section"));
    }
    match args.mode {
        Mode::Exact => write_trajectory(start, args.n, &args.out)?,
        Mode::Float => write_trajectory(start.to_f64()?, args.n, &args.out)?,
    }
    println!("wrote {} steps to {}", args.n, args.out.display());
    Ok(Outcome::Ok)
}

fn cmd_growth(args: &GrowthArgs) -> Result<Outcome> {
    if args.k_max < 4 {
        return Err(usage("--k-max must be at least 4"));
    }
    let rows = experiments::growth_check(args.k_max, 1.0)?;
    let mut out = String::from("k,radius,count,ratio\n");
    for r in &rows {
        let _ = writeln!(out, "{},{},{},{}", r.k, fmt_g17(r.radius), r.count, fmt_g17(r.ratio));
    }
    write_atomic(&args.out, &out)?;
    print!("{out}");
    Ok(Outcome::Ok)
}

fn run(argv: Vec<String>) -> Result<Outcome> {
    let (argv, tolerances) = split_tolerances(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return Err(usage(e.render().to_string())),
        Err(e) => {
            print!("{}", e.render());
            return Ok(Outcome::Ok);
        }
    };
    if !tolerances.is_empty() && !matches!(cli.command, Command::Verify(_)) {
        return Err(usage("--tol-<check> flags only apply to verify"));
    }
    configure_threads()?;
    match &cli.command {
        Command::Gaps(a) => cmd_gaps(a),
        Command::Pdf(a) => cmd_pdf(a),
        Command::Verify(a) => cmd_verify(a, tolerances),
        Command::Ks(a) => cmd_ks(a),
        Command::Trajectory(a) => cmd_trajectory(a),
        Command::Growth(a) => cmd_growth(a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(EXIT_FAIL),
        Err(e) if e.is::<UsageError>() => {
            eprint!("{e}");
            if !e.to_string().ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn tolerance_flags() {
        let (rest, tol) =
            split_tolerances(argv("octgaps verify --tol-covolume_total 0 --tol-pdf-continuity=1e-3 --seed 4")).unwrap();
        assert_eq!(rest, argv("octgaps verify --seed 4"));
        assert_eq!(tol["covolume_total"], 0.0);
        assert_eq!(tol["pdf_continuity"], 1e-3);
        assert!(split_tolerances(argv("x --tol-nope 1")).is_err());
        assert!(split_tolerances(argv("x --tol-covolume_total -1")).is_err());
        assert!(split_tolerances(argv("x --tol-covolume_total")).is_err());
    }

    #[test]
    fn grid() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        let g = merge_breaks(parse_grid("0.5:20:0.01").unwrap(), &BREAKPOINTS);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        for b in BREAKPOINTS {
            assert!(g.contains(&b));
        }
    }

    #[test]
    fn pdf_rows() {
        let t = pdf_table(&[0.5, 1.0, 2.0], false);
        let rows: Vec<&str> = t.lines().collect();
        assert_eq!(rows[0], "t,f,piece_id");
        assert_eq!(rows[1], "0.5,0,0");
        assert!(rows[3].ends_with(",2"));
    }
}
