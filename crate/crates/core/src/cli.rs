//! Command-line front end. Each subcommand is one pipeline stage and writes
//! its artifacts into `--out`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric or
//! degenerate failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::attributes::{expand_class_attributes, ClassAttributeMatrix, ImageAttributeMatrix};
use crate::dataset::{
    self, generate_synthetic, load_dataset, read_attribute_matrix, read_f64_matrix,
    read_noise_mask, FeatureMatrix, Format, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::experiment::{
    default_theta_grid, hold_out_classes, recovery_stats, sweep_theta, write_sweep_csv, ZeroShotTask,
};
use crate::geometry::DEFAULT_MAX_NORM;
use crate::graph::{graph_stats, write_edge_list, Metric, Topology};
use crate::pipeline::{feature_graph, propagate_attributes, PropagationConfig};
use crate::refine::{DEFAULT_IDW_P, DEFAULT_THETA};
use crate::zsc::DEFAULT_RIDGE_LAMBDA;

#[derive(Debug, Parser)]
#[command(name = "hyperattr", version, about = "Refine weak attribute annotations over hyperbolic neighborhood graphs")]
pub struct Cli {
    /// Worker threads (default: all available)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the neighborhood graph of a feature file
    BuildGraph(BuildGraphArgs),
    /// Refine per-sample attributes
    Propagate(PropagateArgs),
    /// Train and score the linear zero-shot classifier
    Eval(EvalArgs),
    /// Refine at several thresholds and score each result
    SweepTheta(SweepArgs),
    /// Generate a planted-noise benchmark
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Binary,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Binary => Format::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Hyperbolic,
    Euclidean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TopologyArg {
    Rng,
    Complete,
}

#[derive(Debug, Args)]
pub struct GraphOpts {
    #[arg(long, value_enum, default_value = "hyperbolic")]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value = "rng")]
    pub topology: TopologyArg,
    /// Largest row norm after embedding into the unit ball
    #[arg(long = "max-norm", default_value_t = DEFAULT_MAX_NORM)]
    pub max_norm: f64,
    /// Subtract the feature mean before embedding
    #[arg(long)]
    pub center: bool,
}

#[derive(Debug, Args)]
pub struct DataOpts {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long = "class-attrs")]
    pub class_attrs: PathBuf,
    /// Starting per-sample attributes (M x N); defaults to the class attributes of each label
    #[arg(long = "image-attrs")]
    pub image_attrs: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct TestOpts {
    #[arg(long = "test-features", requires = "test_labels", conflicts_with = "test_classes")]
    pub test_features: Option<PathBuf>,
    #[arg(long = "test-labels", requires = "test_features")]
    pub test_labels: Option<PathBuf>,
    /// Hold out these classes of the input set instead of reading test files
    #[arg(long = "test-classes", value_delimiter = ',')]
    pub test_classes: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct BuildGraphArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[command(flatten)]
    pub graph: GraphOpts,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub graph: GraphOpts,
    /// Inverse distance weighting exponent
    #[arg(long = "idw-p", default_value_t = DEFAULT_IDW_P)]
    pub idw_p: f64,
    /// Consistency threshold; cells with J < theta are flipped
    #[arg(long, default_value_t = DEFAULT_THETA)]
    pub theta: f64,
    /// Planted-noise cells, to report recovery
    #[arg(long = "noise-mask")]
    pub noise_mask: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub test: TestOpts,
    /// Ridge penalty of the linear map
    #[arg(long = "lambda", default_value_t = DEFAULT_RIDGE_LAMBDA)]
    pub lambda: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub test: TestOpts,
    #[command(flatten)]
    pub graph: GraphOpts,
    #[arg(long = "idw-p", default_value_t = DEFAULT_IDW_P)]
    pub idw_p: f64,
    #[arg(long = "lambda", default_value_t = DEFAULT_RIDGE_LAMBDA)]
    pub lambda: f64,
    /// Comma-separated thresholds (default 0,0.1,...,1)
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 5)]
    pub clusters: usize,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 20)]
    pub attrs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: PathBuf,
}

impl GraphOpts {
    fn config(&self) -> PropagationConfig {
        PropagationConfig {
            metric: match self.metric {
                MetricArg::Hyperbolic => Metric::Hyperbolic,
                MetricArg::Euclidean => Metric::Euclidean,
            },
            topology: match self.topology {
                TopologyArg::Rng => Topology::RelativeNeighborhood,
                TopologyArg::Complete => Topology::Complete,
            },
            target_max_norm: self.max_norm,
            center: self.center,
            ..PropagationConfig::default()
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Output goes to `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::BuildGraph(args) => build_graph_cmd(args, out),
        Command::Propagate(args) => propagate_cmd(args, out),
        Command::Eval(args) => eval_cmd(args, out),
        Command::SweepTheta(args) => sweep_cmd(args, out),
        Command::Synth(args) => synth_cmd(args, out),
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    body(&mut writer)
        .and_then(|_| writer.flush())
        .map_err(|e| Error::io(path, e))
}

struct LoadedData {
    features: FeatureMatrix,
    class_attrs: ClassAttributeMatrix,
    initial: ImageAttributeMatrix,
}

fn load_data(opts: &DataOpts) -> Result<LoadedData> {
    let format = Format::from(opts.format);
    let (features, class_attrs) = load_dataset(&opts.features, &opts.labels, &opts.class_attrs, format)?;
    let initial = match &opts.image_attrs {
        Some(path) => {
            let values = read_attribute_matrix(path, format)?;
            if values.ncols() != features.len() || values.nrows() != class_attrs.attribute_count() {
                return Err(Error::DimensionMismatch(format!(
                    "{} is {}x{}, expected {}x{}",
                    path.display(),
                    values.nrows(),
                    values.ncols(),
                    class_attrs.attribute_count(),
                    features.len()
                )));
            }
            ImageAttributeMatrix::new(values)?
        }
        None => expand_class_attributes(&class_attrs, features.labels())?,
    };
    Ok(LoadedData {
        features,
        class_attrs,
        initial,
    })
}

/// Training features, training targets and the zero-shot task.
fn zero_shot_inputs(
    data: &LoadedData,
    test: &TestOpts,
    format: Format,
    lambda: f64,
) -> Result<(FeatureMatrix, ImageAttributeMatrix, ZeroShotTask)> {
    match (&test.test_classes, &test.test_features, &test.test_labels) {
        (Some(classes), _, _) => {
            let split = hold_out_classes(&data.features, classes)?;
            let targets = data.initial.select_samples(&split.train_indices);
            let task = ZeroShotTask::new(&split.train, &split.test, &data.class_attrs, lambda)?;
            Ok((split.train, targets, task))
        }
        (None, Some(fpath), Some(lpath)) => {
            let rows = read_f64_matrix(fpath, format)?;
            let labels = dataset::read_labels(lpath, format)?;
            let test_set = FeatureMatrix::new(rows, labels, data.class_attrs.class_count())
                .map_err(|e| Error::invalid(format!("{}: {e}", fpath.display())))?;
            let task = ZeroShotTask::new(&data.features, &test_set, &data.class_attrs, lambda)?;
            Ok((data.features.clone(), data.initial.clone(), task))
        }
        _ => Err(Error::invalid(
            "give either --test-classes or both --test-features and --test-labels",
        )),
    }
}

fn build_graph_cmd(args: &BuildGraphArgs, out: &mut dyn Write) -> Result<()> {
    let format = Format::from(args.format);
    let rows = read_f64_matrix(&args.features, format)?;
    let graph = feature_graph(rows.view(), &args.graph.config())?;
    create_out_dir(&args.out)?;
    let path = args.out.join("graph.txt");
    write_file(&path, |w| write_edge_list(&graph, w))?;

    let s = graph_stats(&graph);
    writeln!(
        out,
        "vertices {} edges {} min_degree {} max_degree {} mean_degree {:.4} connected {}",
        graph.vertex_count(),
        s.edge_count,
        s.min_degree,
        s.max_degree,
        s.mean_degree,
        s.connected
    )
    .and_then(|_| writeln!(out, "wrote {}", path.display()))
    .map_err(stdout_err)
}

fn propagate_cmd(args: &PropagateArgs, out: &mut dyn Write) -> Result<()> {
    let format = Format::from(args.data.format);
    let data = load_data(&args.data)?;
    let config = PropagationConfig {
        idw_p: args.idw_p,
        theta: args.theta,
        ..args.graph.config()
    };
    let result = propagate_attributes(data.features.rows(), &data.initial, &config)?;

    create_out_dir(&args.out)?;
    let isa_path = args.out.join(format!("isa.{}", format.extension()));
    dataset::write_attribute_matrix(&isa_path, &result.refined.values().to_owned(), format)?;
    let report_path = args.out.join("consistency.csv");
    write_file(&report_path, |w| result.report.write_csv(w))?;

    writeln!(
        out,
        "flipped {} of {} cells ({:.4}%) at theta {}",
        result.report.flipped.len(),
        data.initial.attribute_count() * data.initial.sample_count(),
        100.0 * result.report.flip_fraction(),
        args.theta
    )
    .map_err(stdout_err)?;
    if let Some(mask_path) = &args.noise_mask {
        let mask = read_noise_mask(mask_path)?;
        let stats = recovery_stats(&data.initial, &result.refined, &mask)?;
        writeln!(
            out,
            "reverted {} of {} planted flips ({:.4}%); flipped {} of {} clean cells ({:.4}%)",
            stats.reverted,
            stats.planted,
            100.0 * stats.reverted_fraction(),
            stats.clean_flipped,
            stats.clean,
            100.0 * stats.clean_flip_fraction()
        )
        .map_err(stdout_err)?;
    }
    writeln!(out, "wrote {} and {}", isa_path.display(), report_path.display()).map_err(stdout_err)
}

fn eval_cmd(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let format = Format::from(args.data.format);
    let data = load_data(&args.data)?;
    let (_, targets, task) = zero_shot_inputs(&data, &args.test, format, args.lambda)?;
    let result = task.evaluate(&targets)?;

    create_out_dir(&args.out)?;
    let result_path = args.out.join("zsc_result.csv");
    write_file(&result_path, |w| result.write_csv(w))?;
    let confusion_path = args.out.join("confusion.csv");
    write_file(&confusion_path, |w| result.write_confusion_csv(w))?;

    writeln!(
        out,
        "mean class accuracy {:.6} over {} test classes",
        result.mean_class_accuracy,
        result.classes.len()
    )
    .map_err(stdout_err)?;
    if result.zero_norm_projections > 0 {
        writeln!(
            out,
            "warning: {} test samples projected to zero and were assigned by tie-break",
            result.zero_norm_projections
        )
        .map_err(stdout_err)?;
    }
    writeln!(out, "wrote {} and {}", result_path.display(), confusion_path.display()).map_err(stdout_err)
}

fn sweep_cmd(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let format = Format::from(args.data.format);
    let data = load_data(&args.data)?;
    let (train, targets, task) = zero_shot_inputs(&data, &args.test, format, args.lambda)?;
    let grid = args.grid.clone().unwrap_or_else(default_theta_grid);
    let graph = feature_graph(train.rows(), &args.graph.config())?;
    let rows = sweep_theta(&graph, &targets, args.idw_p, &grid, &task)?;

    create_out_dir(&args.out)?;
    let path = args.out.join("sweep.csv");
    write_file(&path, |w| write_sweep_csv(&rows, w))?;
    write_sweep_csv(&rows, &mut *out)
        .and_then(|_| writeln!(out, "wrote {}", path.display()))
        .map_err(stdout_err)
}

fn synth_cmd(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let format = Format::from(args.format);
    let spec = SyntheticSpec {
        cluster_count: args.clusters,
        points_per_cluster: args.points,
        dimension: args.dim,
        cluster_spread: args.spread,
        attribute_count: args.attrs,
        noise_rate: args.noise,
        seed: args.seed,
    };
    let data = generate_synthetic(&spec)?;
    create_out_dir(&args.out)?;
    let ext = format.extension();
    let file = |name: &str| args.out.join(format!("{name}.{ext}"));
    dataset::write_f64_matrix(file("features"), &data.features.rows().to_owned(), format)?;
    dataset::write_labels(file("labels"), data.features.labels(), format)?;
    dataset::write_attribute_matrix(file("class_attrs"), &data.class_attrs.values().to_owned(), format)?;
    dataset::write_attribute_matrix(file("observed_attrs"), &data.observed.values().to_owned(), format)?;
    dataset::write_attribute_matrix(file("ground_truth"), &data.ground_truth.values().to_owned(), format)?;
    dataset::write_noise_mask(args.out.join("noise_mask.csv"), &data.noise_mask)?;
    writeln!(
        out,
        "generated {} samples, {} classes, {} attributes, {} planted flips in {}",
        data.features.len(),
        spec.cluster_count,
        spec.attribute_count,
        data.noise_mask.len(),
        args.out.display()
    )
    .map_err(stdout_err)
}
