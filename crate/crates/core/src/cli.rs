//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on I/O errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::global::{measure_global, pose_metrics, GlobalConfig, Split};
use crate::io::{merge_feature_sets, read_bundles, save_bundle, FeatureBundle};
use crate::kernel::NeighborhoodRule;
use crate::manifold::ManifoldSlice;
use crate::measure::{measure_local, LocalConfig};
use crate::report::{read_report, write_plot_rows, write_report, GlobalMeasureReport, Report};
use crate::synth::{corpus_specs, generate, SynthSpec};

#[derive(Debug, Parser)]
#[command(name = "manifold-probe", version, about = "Geometric measures of view manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write synthetic manifolds as feature bundles.
    Synth(SynthArgs),
    /// Per-instance measures of every bundle, grouped by layer.
    MeasureLocal(LocalArgs),
    /// KNN, SVM and pose-regression probes on a train/test pair.
    MeasureGlobal(GlobalArgs),
    /// AAAI error and threshold accuracies of two angle files (degrees, one per line).
    PoseMetrics(PoseArgs),
    /// Emit the plot rows of a report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Family 1-10.
    #[arg(long, required_unless_present = "corpus", conflicts_with = "corpus")]
    family: Option<u8>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Dimension; defaults to 3 for families 3-7 and 10 otherwise.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Noise level; defaults to the family's own.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write every reference grid item instead of one family.
    #[arg(long)]
    corpus: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    FeatureDistance,
    PoseLabels,
}

#[derive(Debug, Args)]
struct LocalArgs {
    /// Bundle directory or file; repeat for several layers.
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    /// Kernel neighborhood size (default: max(2, N/4) per instance).
    #[arg(long)]
    neighborhood_n: Option<usize>,
    #[arg(long, value_enum, default_value = "feature-distance")]
    neighborhood_rule: RuleArg,
    #[arg(long, default_value_t = 90.0)]
    p: f64,
    #[arg(long, default_value_t = crate::kpls::DEFAULT_COMPONENTS)]
    kpls_d: usize,
    #[arg(long, default_value_t = crate::tps::DEFAULT_LAMBDA)]
    tps_lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value = "global.json")]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = crate::global::DEFAULT_K_VALUES)]
    k_values: Vec<usize>,
    /// Seed of the SVM coordinate order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PoseArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    csv: PathBuf,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::MeasureLocal(a) => local(a),
        Command::MeasureGlobal(a) => global(a),
        Command::PoseMetrics(a) => poses(a),
        Command::Report(a) => report(a),
    }
}

fn write_slice(slice: &ManifoldSlice, out: &Path) -> Result<()> {
    let bundle = FeatureBundle::from_slices(slice.instance_id(), "synthetic", std::slice::from_ref(slice))?;
    save_bundle(&bundle, out, slice.instance_id())?;
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let specs = if a.corpus {
        corpus_specs(a.seed)
    } else {
        let family = a.family.expect("clap enforces --family without --corpus");
        let d = a.d.unwrap_or(if (3..=7).contains(&family) { 3 } else { 10 });
        let mut spec = SynthSpec::new(family, a.n, d, a.seed).with_radius(a.radius);
        if let Some(noise) = a.noise {
            spec = spec.with_noise(noise);
        }
        vec![spec]
    };
    for spec in &specs {
        write_slice(&generate(spec)?, &a.out)?;
    }
    println!("wrote {} bundle(s) to {}", specs.len(), a.out.display());
    Ok(())
}

/// Groups bundles by layer name, preserving first appearance.
fn layers_of(bundles: Vec<FeatureBundle>) -> Result<Vec<(String, Vec<ManifoldSlice>)>> {
    let mut layers: Vec<(String, Vec<ManifoldSlice>)> = Vec::new();
    for b in bundles {
        let slices = b.to_slices()?;
        match layers.iter_mut().find(|(name, _)| *name == b.layer) {
            Some((_, existing)) => existing.extend(slices),
            None => layers.push((b.layer.clone(), slices)),
        }
    }
    Ok(layers)
}

fn local(a: LocalArgs) -> Result<()> {
    let mut bundles = Vec::new();
    for input in &a.inputs {
        bundles.extend(read_bundles(input)?);
    }
    let config = LocalConfig {
        neighborhood_n: a.neighborhood_n,
        neighborhood_rule: match a.neighborhood_rule {
            RuleArg::FeatureDistance => NeighborhoodRule::FeatureDistance,
            RuleArg::PoseLabels => NeighborhoodRule::PoseLabels,
        },
        p: a.p,
        kpls_d: a.kpls_d,
        tps_lambda: a.tps_lambda,
        seed: a.seed,
        ..LocalConfig::default()
    };
    config.validate()?;
    let report = measure_local(&layers_of(bundles)?, &config)?;
    let instances: usize = report.layers.iter().map(|l| l.per_instance.len()).sum();
    let flagged: usize = report
        .layers
        .iter()
        .flat_map(|l| l.per_instance.values())
        .filter(|m| !m.flags.is_empty())
        .count();
    let csv_path = write_report(&Report::Local(report), &a.out)?;
    println!(
        "measured {instances} instance(s), {flagged} flagged; wrote {} and {}",
        a.out.display(),
        csv_path.display()
    );
    Ok(())
}

fn global(a: GlobalArgs) -> Result<()> {
    let train_bundles = read_bundles(&a.train)?;
    let test_bundles = read_bundles(&a.test)?;
    let train = merge_feature_sets(&train_bundles, Split::Train)?;
    let test = merge_feature_sets(&test_bundles, Split::Test)?;
    let mut config = GlobalConfig {
        k_values: a.k_values,
        ..GlobalConfig::default()
    };
    config.svm.seed = a.seed;
    let measures = measure_global(&train, &test, &config)?;
    let mut layers: Vec<&str> = train_bundles.iter().map(|b| b.layer.as_str()).collect();
    layers.dedup();
    let report = GlobalMeasureReport {
        config,
        train: train_bundles.iter().map(|b| b.name.clone()).collect(),
        test: test_bundles.iter().map(|b| b.name.clone()).collect(),
        layer: layers.join("+"),
        measures,
    };
    for flag in &report.measures.flags {
        eprintln!("flag: {flag}");
    }
    let csv_path = write_report(&Report::Global(report), &a.out)?;
    println!("wrote {} and {}", a.out.display(), csv_path.display());
    Ok(())
}

fn read_angles(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(f64::to_radians)
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    message: format!("line {}: not a finite angle: {:?}", i + 1, l.trim()),
                })
        })
        .collect()
}

fn poses(a: PoseArgs) -> Result<()> {
    let pred = read_angles(&a.pred)?;
    let truth = read_angles(&a.truth)?;
    let m = pose_metrics(&pred, &truth)?;
    println!("count       {}", m.count);
    println!("aaai_mean   {:.6}", m.aaai_mean);
    println!("within_22_5 {:.2}%", 100.0 * m.within_22_5);
    println!("within_45   {:.2}%", 100.0 * m.within_45);
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let report = read_report(&a.input)?;
    write_plot_rows(&report, &a.csv)?;
    println!("wrote {} plot rows to {}", report.plot_rows().len(), a.csv.display());
    Ok(())
}
