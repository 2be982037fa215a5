//! The `qnmc` command line.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 data error
//! (unreadable, malformed or inconsistent input files), 4 runtime error
//! (encoding, fitting or experiment failure, unwritable output).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qnmc::classifier::{fit, ClassifierKind, ClassifierSpec, TrainedModel, DEFAULT_REGULARIZATION};
use qnmc::dataset::ipf::{load_ipf, IpfSchema};
use qnmc::dataset::synthetic::GeneratorSpec;
use qnmc::dataset::{load_csv, load_patterns, write_csv, ClassLabel, CsvOptions, Dataset, Patterns};
use qnmc::encoding::{encode, EncoderKind};
use qnmc::evaluation::{
    accuracy, ipf_bench_config, rescale_sweep, run_on_dataset, write_sweep_csv, ExperimentConfig, RescalePreset,
    RescaleSetting, IPF_RUNS,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

/// Directory for outputs when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "QNMC_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<qnmc::Error> for CliError {
    fn from(e: qnmc::Error) -> Self {
        use qnmc::Error as E;
        let msg = e.to_string();
        match e {
            E::Config(_)
            | E::InvalidSpec(_)
            | E::InvalidArgument(_)
            | E::InvalidWeight { .. }
            | E::UnknownFeature(_) => CliError::Config(msg),
            E::Io { .. }
            | E::Csv { .. }
            | E::MissingColumn { .. }
            | E::EmptyCell { .. }
            | E::ParseCell { .. }
            | E::Schema { .. }
            | E::EmptyDataset
            | E::EmptyClass(_)
            | E::ClassTooSmall { .. }
            | E::EmptyFeatureVector
            | E::NonFiniteFeature { .. }
            | E::DimensionMismatch { .. }
            | E::ModelFormat(_) => CliError::Data(msg),
            _ => CliError::Runtime(msg),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qnmc", version, about = "Quantum nearest mean classification experiments")]
pub struct Cli {
    /// Directory for outputs written without an explicit --output.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the density pattern of every row of a dataset.
    Encode(EncodeArgs),
    /// Fit one classifier and save the model as JSON.
    Fit(FitArgs),
    /// Classify the rows of a dataset with a saved model.
    Predict(PredictArgs),
    /// Run a repeated random-split experiment from a TOML config.
    Evaluate(EvaluateArgs),
    /// Repeat an experiment over a grid of uniform rescaling factors.
    Sweep(SweepArgs),
    /// Write a synthetic dataset.
    GenData(GenDataArgs),
    /// Run the nine-classifier benchmark on an IPF table.
    IpfBench(IpfBenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Delimited input file with a header row.
    pub input: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Comma-separated feature columns (default: every non-label column).
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Read the input as an IPF table described by this schema file.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

impl DataArgs {
    fn csv_options(&self) -> CsvOptions {
        let opts = CsvOptions::new(self.label_column.clone()).with_delimiter(self.delimiter);
        match &self.features {
            Some(f) => opts.with_features(f.clone()),
            None => opts,
        }
    }

    fn load_dataset(&self) -> CliResult<Dataset> {
        match &self.schema {
            Some(schema) => Ok(load_ipf(&self.input, &IpfSchema::load(schema)?)?.dataset),
            None => Ok(load_csv(&self.input, &self.csv_options())?),
        }
    }

    /// Feature names, rows, and labels if the input has them.
    fn load_patterns(&self) -> CliResult<Patterns> {
        match &self.schema {
            Some(_) => {
                let d = self.load_dataset()?;
                let labels = (0..d.len()).map(|i| d.label(i).clone()).collect();
                Ok((d.feature_names().to_vec(), d.rows().to_vec(), Some(labels)))
            }
            None => Ok(load_patterns(&self.input, &self.csv_options())?),
        }
    }
}

#[derive(Debug, Args)]
pub struct RescaleArgs {
    /// Multiply every feature by this factor.
    #[arg(long, conflicts_with_all = ["preset", "weights"])]
    pub uniform: Option<f64>,
    /// Named per-feature preset: resc1, resc2, resc3 or resc4.
    #[arg(long, conflicts_with = "weights")]
    pub preset: Option<String>,
    /// Comma-separated per-feature weights.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
}

impl RescaleArgs {
    fn setting(&self) -> CliResult<Option<RescaleSetting>> {
        Ok(match (self.uniform, &self.preset, &self.weights) {
            (Some(t), _, _) => Some(RescaleSetting::Uniform(t)),
            (_, Some(p), _) => Some(RescaleSetting::Preset(p.parse::<RescalePreset>()?)),
            (_, _, Some(w)) => Some(RescaleSetting::Weights(w.clone())),
            _ => None,
        })
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_parser = parse_encoder)]
    pub encoder: EncoderKind,
    #[command(flatten)]
    pub rescale: RescaleArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_parser = parse_kind)]
    pub classifier: ClassifierKind,
    /// Required for qnmc.
    #[arg(long, value_parser = parse_encoder)]
    pub encoder: Option<EncoderKind>,
    #[arg(long, default_value_t = DEFAULT_REGULARIZATION)]
    pub regularization: f64,
    #[command(flatten)]
    pub rescale: RescaleArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentOverrides {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Experiment config (TOML).
    pub config: PathBuf,
    #[command(flatten)]
    pub overrides: ExperimentOverrides,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Experiment config (TOML).
    pub config: PathBuf,
    /// Comma-separated rescaling factors.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.5,1,2,5,10")]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub runs_per_t: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// gaussian, moon or banana; may be omitted when --config names one.
    pub generator: Option<String>,
    /// Generator parameters (TOML with a `generator` key).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n_per_class: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IpfBenchArgs {
    /// IPF table (delimited text).
    pub input: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = IPF_RUNS)]
    pub runs: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

fn parse_encoder(s: &str) -> Result<EncoderKind, String> {
    s.parse().map_err(|e: qnmc::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<ClassifierKind, String> {
    s.parse().map_err(|e: qnmc::Error| e.to_string())
}

/// Parses `args` (program name first), runs, prints diagnostics, and returns
/// the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("qnmc: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let out = Output {
        dir: cli.output_dir.clone(),
    };
    match cli.command {
        Command::Encode(a) => cmd_encode(&a, &out),
        Command::Fit(a) => cmd_fit(&a, &out),
        Command::Predict(a) => cmd_predict(&a, &out),
        Command::Evaluate(a) => cmd_evaluate(&a, &out),
        Command::Sweep(a) => cmd_sweep(&a, &out),
        Command::GenData(a) => cmd_gen_data(&a, &out),
        Command::IpfBench(a) => cmd_ipf_bench(&a, &out),
    }
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    /// Writes to `explicit`, else to `default_name` in the output directory,
    /// else to stdout.
    fn write(&self, explicit: Option<&Path>, default_name: &str, bytes: &[u8]) -> CliResult<()> {
        let target = match (explicit, &self.dir) {
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(dir)) => {
                fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
                Some(dir.join(default_name))
            }
            (None, None) => None,
        };
        match target {
            Some(p) => fs::write(&p, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
        }
    }
}

/// `-0.0` prints as `-0`; dumps show plain zeros.
fn num(v: f64) -> String {
    (v + 0.0).to_string()
}

fn cmd_encode(a: &EncodeArgs, out: &Output) -> CliResult<()> {
    let (names, rows, _) = a.data.load_patterns()?;
    let weights = a.rescale.setting()?.map(|s| s.resolve_for(&names)).transpose()?;
    let dim = names.len() + 1;
    let mut text = String::from("pattern,row");
    for c in 0..dim {
        text.push_str(&format!(",c{c}"));
    }
    text.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let x = match &weights {
            Some(w) => w.apply(row)?,
            None => row.clone(),
        };
        let rho = encode(&x, a.encoder).map_err(|e| CliError::Runtime(format!("pattern {i}: {e}")))?;
        for r in 0..dim {
            text.push_str(&format!("{i},{r}"));
            for c in 0..dim {
                text.push(',');
                text.push_str(&num(rho.matrix().get(r, c)));
            }
            text.push('\n');
        }
    }
    out.write(a.output.as_deref(), "encoded.csv", text.as_bytes())
}

fn cmd_fit(a: &FitArgs, out: &Output) -> CliResult<()> {
    let data = a.data.load_dataset()?;
    let spec = ClassifierSpec {
        kind: a.classifier,
        encoder: a.encoder,
        regularization: a.regularization,
    };
    let weights = a.rescale.setting()?.map(|s| s.resolve(&data)).transpose()?;
    let model = fit(&spec, &data, weights.as_ref())?;
    let mut json = model.to_json()?;
    json.push('\n');
    out.write(a.output.as_deref(), "model.json", json.as_bytes())
}

fn cmd_predict(a: &PredictArgs, out: &Output) -> CliResult<()> {
    let text = fs::read_to_string(&a.model).map_err(|e| CliError::Data(format!("{}: {e}", a.model.display())))?;
    let model = TrainedModel::from_json(&text)?;
    let (_, rows, labels) = a.data.load_patterns()?;
    let predicted: Vec<&ClassLabel> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| model.predict(r).map_err(|e| CliError::from(e).with_context(&format!("pattern {i}"))))
        .collect::<CliResult<_>>()?;
    let mut csv = String::from(if labels.is_some() { "pattern,predicted,actual\n" } else { "pattern,predicted\n" });
    for (i, p) in predicted.iter().enumerate() {
        match &labels {
            Some(l) => csv.push_str(&format!("{i},{p},{}\n", l[i])),
            None => csv.push_str(&format!("{i},{p}\n")),
        }
    }
    if let Some(l) = &labels {
        let owned: Vec<ClassLabel> = predicted.iter().map(|p| (*p).clone()).collect();
        eprintln!("accuracy {:.3} over {} patterns", accuracy(&owned, l)?, l.len());
    }
    out.write(a.output.as_deref(), "predictions.csv", csv.as_bytes())
}

impl CliError {
    fn with_context(self, ctx: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{ctx}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{ctx}: {m}")),
            CliError::Runtime(m) => CliError::Runtime(format!("{ctx}: {m}")),
        }
    }
}

/// Reads an experiment config; relative dataset paths are taken relative to
/// the config file.
pub fn load_experiment(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| CliError::from(e).with_context(&path.display().to_string()))?;
    let base = path.parent().unwrap_or(Path::new(""));
    cfg.dataset = cfg.dataset.with_base_dir(base);
    Ok(cfg)
}

/// TOML rendering of the resolved config, for echoing into outputs.
pub fn echo_config(cfg: &ExperimentConfig) -> CliResult<String> {
    toml::to_string(&cfg.resolved()).map_err(|e| CliError::Runtime(format!("cannot render config: {e}")))
}

fn render_report(cfg: &ExperimentConfig, data: &Dataset, format: Format) -> CliResult<String> {
    let report = run_on_dataset(cfg, data)?;
    Ok(match format {
        Format::Json => report.to_json()?,
        Format::Table => format!(
            "{}\n# resolved configuration\n{}",
            report.to_table(),
            echo_config(cfg)?
        ),
    })
}

fn default_report_name(stem: &str, format: Format) -> String {
    match format {
        Format::Json => format!("{stem}.json"),
        Format::Table => format!("{stem}.txt"),
    }
}

fn cmd_evaluate(a: &EvaluateArgs, out: &Output) -> CliResult<()> {
    let mut cfg = load_experiment(&a.config)?;
    if let Some(s) = a.overrides.seed {
        cfg.seed = s;
    }
    if let Some(r) = a.overrides.runs {
        cfg.runs = r;
    }
    cfg.validate()?;
    let data = cfg.dataset.load(cfg.seed)?;
    let text = render_report(&cfg, &data, a.format)?;
    out.write(a.overrides.output.as_deref(), &default_report_name("report", a.format), text.as_bytes())
}

fn cmd_sweep(a: &SweepArgs, out: &Output) -> CliResult<()> {
    let mut cfg = load_experiment(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.runs = a.runs_per_t;
    cfg.validate()?;
    let data = cfg.dataset.load(cfg.seed)?;
    let rows = rescale_sweep(&cfg, &data, &a.grid, a.runs_per_t)?;
    let mut text = String::new();
    let grid: Vec<String> = a.grid.iter().map(|t| t.to_string()).collect();
    text.push_str(&format!("# grid = [{}]\n", grid.join(", ")));
    for line in echo_config(&cfg)?.lines() {
        text.push_str(&format!("# {line}\n"));
    }
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    text.push_str(&String::from_utf8(buf).expect("csv output is UTF-8"));
    out.write(a.output.as_deref(), "sweep.csv", text.as_bytes())
}

#[derive(Serialize)]
struct GenEcho<'a> {
    seed: u64,
    #[serde(flatten)]
    spec: &'a GeneratorSpec,
}

fn cmd_gen_data(a: &GenDataArgs, out: &Output) -> CliResult<()> {
    let mut spec = match (&a.config, &a.generator) {
        (Some(path), name) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let spec: GeneratorSpec =
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if let Some(n) = name {
                if !spec.name().eq_ignore_ascii_case(n) {
                    return Err(CliError::Config(format!(
                        "--config describes '{}' but '{n}' was requested",
                        spec.name()
                    )));
                }
            }
            spec
        }
        (None, Some(name)) => GeneratorSpec::by_name(name)?,
        (None, None) => return Err(CliError::Config("name a generator or pass --config".into())),
    };
    match &mut spec {
        GeneratorSpec::Gaussian(c) => {
            if a.noise.is_some() {
                return Err(CliError::Config("--noise does not apply to the gaussian generator".into()));
            }
            if let Some(n) = a.n_per_class {
                c.n_per_class = n;
            }
        }
        GeneratorSpec::Moon(c) => {
            c.n_per_class = a.n_per_class.unwrap_or(c.n_per_class);
            c.noise = a.noise.unwrap_or(c.noise);
        }
        GeneratorSpec::Banana(c) => {
            c.n_per_class = a.n_per_class.unwrap_or(c.n_per_class);
            c.noise = a.noise.unwrap_or(c.noise);
        }
    }
    let data = spec.generate(a.seed)?;
    let mut buf = Vec::new();
    write_csv(&data, &mut buf, "label", ',')?;
    let echo = toml::to_string(&GenEcho { seed: a.seed, spec: &spec })
        .map_err(|e| CliError::Runtime(format!("cannot render config: {e}")))?;
    eprint!("{echo}");
    out.write(a.output.as_deref(), &format!("{}.csv", spec.name()), &buf)
}

fn cmd_ipf_bench(a: &IpfBenchArgs, out: &Output) -> CliResult<()> {
    let mut cfg = ipf_bench_config(a.input.clone(), a.schema.clone(), a.seed);
    cfg.runs = a.runs;
    cfg.validate()?;
    let data = cfg.dataset.load(cfg.seed)?;
    let text = render_report(&cfg, &data, a.format)?;
    out.write(a.output.as_deref(), &default_report_name("ipf-bench", a.format), text.as_bytes())
}
