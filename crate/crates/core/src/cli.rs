//! The `nbpm` command line.
//!
//! Every subcommand writes a single JSON document or a CSV table whose first
//! line is `# {json metadata}`. Output goes to stdout unless an output
//! directory is given (`--out-dir` or `NBPM_OUTPUT_DIR`), in which case it is
//! written to `<dir>/<subcommand>.<csv|json>`.
//!
//! Exit codes: 0 success, 1 domain or configuration error, 2 numeric
//! failure, 3 self-test failure.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    build_measure, clustering_growth, kolmogorov_distance, run_ks_experiment, weight_profile,
    ExperimentSpec, KsGrid, Normalizer, ProcessKind, ProcessParams,
};
use crate::measure::{BaseMeasure, DiscreteMeasure, SCHEMA_VERSION};
use crate::points::{TruncationPolicy, DEFAULT_HARD_CAP};
use crate::special::{exp_integral_e1, gamma_quantile_upper, upper_incomplete_gamma, Precision};
use crate::tail::{LevyTail, TailKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailChoice {
    Stable,
    Gamma,
    GeneralizedGamma,
}

#[derive(Debug, Parser)]
#[command(
    name = "nbpm",
    version,
    about = "Sample and study NBP-based random measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; never changes the output.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, env = "NBPM_OUTPUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub process: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Tail for `--process pkp`.
    #[arg(long, value_enum)]
    pub tail: Option<TailChoice>,
    /// Fixed truncation: last series index (number of sticks for pdp_stick).
    #[arg(long, conflicts_with = "epsilon")]
    pub n: Option<usize>,
    /// Relative-weight stopping rule.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one random measure.
    Sample(ModelArgs),
    /// Mean Kolmogorov distances over a grid of (alpha, theta, r) rows.
    KsTable(ModelArgs),
    /// Mean largest weights of PKP with a gamma or other tail across r.
    Weights {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated r values.
        #[arg(long, value_delimiter = ',')]
        r_grid: Option<Vec<f64>>,
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Growth of the number of distinct values among n draws.
    Clusters {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
    },
    /// Run quick invariant checks.
    Selftest,
}

/// Values that may come from the config file.
#[derive(Debug, Clone, Default, Deserialize)]
struct FileConfig {
    process: Option<String>,
    alpha: Option<f64>,
    theta: Option<f64>,
    r: Option<f64>,
    tail: Option<TailChoice>,
    n: Option<usize>,
    epsilon: Option<f64>,
    reps: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    output: Option<OutputFormat>,
    r_grid: Option<Vec<f64>>,
    top_k: Option<usize>,
    n_grid: Option<Vec<usize>>,
}

/// Flags merged over the config file.
struct Settings {
    file: FileConfig,
    raw: Option<serde_json::Value>,
    seed: u64,
    jobs: usize,
    output: OutputFormat,
}

impl Settings {
    fn load(common: &CommonArgs) -> Result<Self> {
        let (file, raw) = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read config {}: {e}", path.display()))
                })?;
                let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
                    Error::Config(format!("invalid config {}: {e}", path.display()))
                })?;
                let file = serde_json::from_value(raw.clone()).map_err(|e| {
                    Error::Config(format!("invalid config {}: {e}", path.display()))
                })?;
                (file, Some(raw))
            }
            None => (FileConfig::default(), None),
        };
        Ok(Settings {
            seed: common.seed.or(file.seed).unwrap_or(1),
            jobs: common.jobs.or(file.jobs).unwrap_or(1).max(1),
            output: common.output.or(file.output).unwrap_or(OutputFormat::Json),
            file,
            raw,
        })
    }

    fn model(&self, m: &ModelArgs) -> Model {
        let f = &self.file;
        Model {
            process: m.process.clone().or_else(|| f.process.clone()),
            alpha: m.alpha.or(f.alpha),
            theta: m.theta.or(f.theta),
            r: m.r.or(f.r),
            tail: m.tail.or(f.tail),
            // A flag on either side of the n/epsilon pair overrides both file values.
            n: m.n.or(if m.epsilon.is_some() { None } else { f.n }),
            epsilon: m.epsilon.or(if m.n.is_some() { None } else { f.epsilon }),
            reps: m.reps.or(f.reps),
        }
    }
}

struct Model {
    process: Option<String>,
    alpha: Option<f64>,
    theta: Option<f64>,
    r: Option<f64>,
    tail: Option<TailChoice>,
    n: Option<usize>,
    epsilon: Option<f64>,
    reps: Option<usize>,
}

impl Model {
    /// With no process given, the default Dirichlet process uses theta = 3.
    fn or_default_dirichlet(mut self) -> Self {
        if self.process.is_none() && self.theta.is_none() {
            self.theta = Some(3.0);
        }
        self
    }

    fn kind(&self, default: ProcessKind) -> Result<ProcessKind> {
        match &self.process {
            Some(p) => p.parse(),
            None => Ok(default),
        }
    }

    fn truncation(&self, default_n: usize) -> Result<TruncationPolicy> {
        let t = match (self.n, self.epsilon) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either n or epsilon, not both".into()))
            }
            (Some(n), None) => TruncationPolicy::fixed(n),
            (None, Some(e)) => TruncationPolicy::epsilon(e),
            (None, None) => TruncationPolicy::fixed(default_n),
        };
        t.validate()?;
        Ok(t)
    }

    fn tail(&self) -> Result<Option<LevyTail>> {
        let Some(choice) = self.tail else {
            return Ok(None);
        };
        let missing = |name: &str| Error::Config(format!("tail needs `{name}`"));
        let kind = match choice {
            TailChoice::Stable => TailKind::Stable {
                alpha: self.alpha.ok_or_else(|| missing("alpha"))?,
            },
            TailChoice::Gamma => TailKind::Gamma {
                theta: self.theta.ok_or_else(|| missing("theta"))?,
            },
            TailChoice::GeneralizedGamma => TailKind::GeneralizedGamma {
                alpha: self.alpha.ok_or_else(|| missing("alpha"))?,
            },
        };
        Ok(Some(LevyTail::new(kind)?))
    }

    fn params(&self) -> Result<ProcessParams> {
        Ok(ProcessParams {
            alpha: self.alpha,
            theta: self.theta,
            r: self.r,
            tail: self.tail()?,
        })
    }
}

/// A CSV or JSON table: metadata plus flat rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table<M, R> {
    pub schema_version: u32,
    pub meta: M,
    pub rows: Vec<R>,
}

#[derive(Serialize, Deserialize)]
struct TableHeader<M> {
    schema_version: u32,
    meta: M,
}

impl<M, R> Table<M, R>
where
    M: Serialize + DeserializeOwned + Clone,
    R: Serialize + DeserializeOwned,
{
    pub fn new(meta: M, rows: Vec<R>) -> Self {
        Table {
            schema_version: SCHEMA_VERSION,
            meta,
            rows,
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn read_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        check_version(t.schema_version)?;
        Ok(t)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header = TableHeader {
            schema_version: self.schema_version,
            meta: self.meta.clone(),
        };
        writeln!(out, "# {}", serde_json::to_string(&header)?)?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<B: BufRead>(mut input: B) -> Result<Self> {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let json = first
            .trim_end()
            .strip_prefix("# ")
            .ok_or_else(|| Error::Config("missing `# {header}` line".into()))?;
        let header: TableHeader<M> = serde_json::from_str(json)?;
        check_version(header.schema_version)?;
        let rows = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<std::result::Result<Vec<R>, _>>()?;
        Ok(Table {
            schema_version: header.schema_version,
            meta: header.meta,
            rows,
        })
    }
}

fn check_version(v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Config(format!("unsupported schema_version {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsMeta {
    pub process: ProcessKind,
    pub truncation: TruncationPolicy,
    pub replications: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsRow {
    pub alpha: f64,
    pub theta: f64,
    pub r: f64,
    pub reference: Option<f64>,
    pub mean_distance: f64,
    pub std_error: f64,
    pub failures: usize,
    pub flagged: bool,
    /// Master seed of this row's replications.
    pub seed: u64,
}

pub type KsTable = Table<KsMeta, KsRow>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsMeta {
    pub tail: LevyTail,
    pub top_k: usize,
    pub replications: usize,
    pub truncation: TruncationPolicy,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsRow {
    pub r: f64,
    pub rank: usize,
    pub mean_weight: f64,
}

pub type WeightsTable = Table<WeightsMeta, WeightsRow>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClustersMeta {
    pub process: ProcessKind,
    pub params: ProcessParams,
    pub truncation: TruncationPolicy,
    pub replications: usize,
    pub normalizer: Normalizer,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClustersRow {
    pub n: usize,
    pub kn_mean: f64,
    pub kn_std_error: f64,
    pub ratio: f64,
}

pub type ClustersTable = Table<ClustersMeta, ClustersRow>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub property: String,
    pub passed: bool,
    pub detail: String,
}

pub type SelftestTable = Table<SelftestMeta, CheckRow>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestMeta {
    pub passed: usize,
    pub failed: usize,
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numeric { .. } | Error::Resource(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let settings = Settings::load(&cli.common)?;
    let mut buf = Vec::new();
    let name;
    let mut code = 0;
    match &cli.command {
        Command::Sample(m) => {
            name = "sample";
            let model = settings.model(m).or_default_dirichlet();
            let kind = model.kind(ProcessKind::Dirichlet)?;
            let base = BaseMeasure::standard_uniform();
            let measure = build_measure(
                kind,
                &model.params()?,
                &model.truncation(400)?,
                &base,
                settings.seed,
            )?;
            match settings.output {
                OutputFormat::Json => {
                    buf.extend_from_slice(measure.to_json()?.as_bytes());
                    buf.push(b'\n');
                }
                OutputFormat::Csv => measure.write_csv(&mut buf)?,
            }
        }
        Command::KsTable(m) => {
            name = "ks-table";
            let table = ks_table(&settings, m)?;
            write_table(&table, settings.output, &mut buf)?;
        }
        Command::Weights {
            model,
            r_grid,
            top_k,
        } => {
            name = "weights";
            let model = settings.model(model);
            let tail = match model.tail()? {
                Some(t) => t,
                None => LevyTail::gamma(model.theta.unwrap_or(3.0))?,
            };
            let r_grid = r_grid
                .clone()
                .or_else(|| settings.file.r_grid.clone())
                .unwrap_or_else(|| vec![0.0, 3.0, 5.0, 10.0]);
            let top_k = top_k.or(settings.file.top_k).unwrap_or(10);
            let trunc = model.truncation(400)?;
            let reps = model.reps.unwrap_or(1000);
            let p = weight_profile(
                &tail,
                &r_grid,
                top_k,
                reps,
                &trunc,
                settings.seed,
                settings.jobs,
            )?;
            let rows = p
                .r_grid
                .iter()
                .zip(&p.means)
                .flat_map(|(&r, means)| {
                    means.iter().enumerate().map(move |(k, &w)| WeightsRow {
                        r,
                        rank: k + 1,
                        mean_weight: w,
                    })
                })
                .collect();
            let meta = WeightsMeta {
                tail,
                top_k,
                replications: reps,
                truncation: trunc,
                seed: settings.seed,
            };
            write_table(&Table::new(meta, rows), settings.output, &mut buf)?;
        }
        Command::Clusters { model, n_grid } => {
            name = "clusters";
            let model = settings.model(model).or_default_dirichlet();
            let kind = model.kind(ProcessKind::Dirichlet)?;
            let params = model.params()?;
            let trunc = model.truncation(2000)?;
            let n_grid = n_grid
                .clone()
                .or_else(|| settings.file.n_grid.clone())
                .unwrap_or_else(|| vec![100, 1000]);
            let reps = model.reps.unwrap_or(200);
            let g = clustering_growth(
                kind,
                &params,
                &trunc,
                &n_grid,
                reps,
                settings.seed,
                settings.jobs,
            )?;
            let rows = (0..g.n_grid.len())
                .map(|i| ClustersRow {
                    n: g.n_grid[i],
                    kn_mean: g.kn_means[i],
                    kn_std_error: g.kn_std_errors[i],
                    ratio: g.ratios[i],
                })
                .collect();
            let meta = ClustersMeta {
                process: kind,
                params,
                truncation: trunc,
                replications: reps,
                normalizer: g.normalizer,
                seed: settings.seed,
            };
            write_table(&Table::new(meta, rows), settings.output, &mut buf)?;
        }
        Command::Selftest => {
            name = "selftest";
            let checks = selftest(settings.jobs);
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                code = 3;
            }
            let meta = SelftestMeta {
                passed: checks.len() - failed,
                failed,
            };
            write_table(&Table::new(meta, checks), settings.output, &mut buf)?;
        }
    }
    match &cli.common.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let ext = match settings.output {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            let path = dir.join(format!("{name}.{ext}"));
            std::fs::write(&path, &buf)?;
        }
        None => stdout.write_all(&buf)?,
    }
    Ok(code)
}

fn write_table<M, R>(t: &Table<M, R>, fmt: OutputFormat, out: &mut Vec<u8>) -> Result<()>
where
    M: Serialize + DeserializeOwned + Clone,
    R: Serialize + DeserializeOwned,
{
    match fmt {
        OutputFormat::Json => t.write_json(out),
        OutputFormat::Csv => t.write_csv(out),
    }
}

fn ks_table(settings: &Settings, m: &ModelArgs) -> Result<KsTable> {
    let mut grid = match &settings.raw {
        Some(raw) if raw.get("rows").is_some() => KsGrid::from_json(&raw.to_string())?,
        _ => KsGrid::bundled(),
    };
    let model = settings.model(m);
    if let Some(p) = &model.process {
        grid.process = p.parse()?;
    }
    if let Some(reps) = m.reps {
        grid.replications = reps;
    }
    if model.n.is_some() || model.epsilon.is_some() {
        grid.truncation = model.truncation(400)?;
    }
    // A single (alpha, theta, r) given on the command line replaces the grid.
    if m.alpha.is_some() || m.theta.is_some() {
        let alpha = model
            .alpha
            .ok_or_else(|| Error::Config("ks-table needs --alpha".into()))?;
        let theta = model
            .theta
            .ok_or_else(|| Error::Config("ks-table needs --theta".into()))?;
        grid.rows = vec![crate::experiments::GridRow {
            alpha,
            theta,
            r: model.r.unwrap_or(theta / alpha),
            reference: None,
        }];
    }
    let base = BaseMeasure::standard_uniform();
    let mut rows = Vec::with_capacity(grid.rows.len());
    for i in 0..grid.rows.len() {
        let spec = grid.row_spec(i, settings.seed, settings.jobs);
        let res = run_ks_experiment(&spec, &base)?;
        let row = grid.rows[i];
        rows.push(KsRow {
            alpha: row.alpha,
            theta: row.theta,
            r: row.r,
            reference: row.reference,
            mean_distance: res.mean_distance,
            std_error: res.std_error,
            failures: res.failures,
            flagged: res.flagged,
            seed: spec.master_seed,
        });
    }
    Ok(Table::new(
        KsMeta {
            process: grid.process,
            truncation: grid.truncation,
            replications: grid.replications,
            master_seed: settings.seed,
        },
        rows,
    ))
}

fn check(property: &str, outcome: Result<(bool, String)>) -> CheckRow {
    let (passed, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckRow {
        property: property.to_string(),
        passed,
        detail,
    }
}

/// Quick invariant checks, one row per property.
pub fn selftest(jobs: usize) -> Vec<CheckRow> {
    let prec = Precision::default();
    let uniform = BaseMeasure::standard_uniform();
    let mut rows = Vec::new();

    rows.push(check(
        "upper_incomplete_gamma",
        (|| {
            let v = upper_incomplete_gamma(0.5, 1.0, prec)?;
            let err = (v / 0.278_805_585_280_661_98 - 1.0).abs();
            Ok((err < 1e-12, format!("relative error {err:e}")))
        })(),
    ));

    rows.push(check(
        "exp_integral_e1",
        (|| {
            let v = exp_integral_e1(1.0)?;
            let err = (v / 0.219_383_934_395_520_27 - 1.0).abs();
            Ok((err < 1e-12, format!("relative error {err:e}")))
        })(),
    ));

    rows.push(check(
        "gamma_quantile_small_shape",
        (|| {
            let ln_x = gamma_quantile_upper(0.01, 0.5, prec)?;
            let err = (ln_x / -69.883_748_850_601_5 - 1.0).abs();
            Ok((err < 1e-9, format!("relative error {err:e}")))
        })(),
    ));

    rows.push(check(
        "tail_inverse_roundtrip",
        (|| {
            let tails = [
                LevyTail::stable(0.5)?,
                LevyTail::gamma(3.0)?,
                LevyTail::generalized_gamma(0.5)?,
            ];
            let mut worst: f64 = 0.0;
            for t in &tails {
                for &x in &[1e-6, 1e-2, 0.5, 1.0, 5.0, 30.0] {
                    let back = t.inverse(t.value(x)?)?;
                    worst = worst.max((back / x - 1.0).abs());
                }
            }
            Ok((worst < 1e-9, format!("worst relative error {worst:e}")))
        })(),
    ));

    rows.push(check(
        "dp_equals_pkp_r0",
        (|| {
            let t = TruncationPolicy::fixed(200);
            let dp = crate::measure::sample_dp(3.0, &uniform, &t, 5)?;
            let pkp = crate::measure::sample_pkp(0.0, &LevyTail::gamma(3.0)?, &uniform, &t, 5)?;
            let same = dp.atoms() == pkp.atoms() && dp.weights() == pkp.weights();
            Ok((same, String::new()))
        })(),
    ));

    rows.push(check(
        "normalized_and_decreasing",
        (|| {
            let tails = [
                LevyTail::stable(0.5)?,
                LevyTail::gamma(3.0)?,
                LevyTail::generalized_gamma(0.5)?,
            ];
            let mut ok = true;
            for (i, t) in tails.iter().enumerate() {
                for &r in &[0.0, 2.0, 2.5] {
                    let m = crate::measure::sample_pkp(
                        r,
                        t,
                        &uniform,
                        &TruncationPolicy::fixed(300),
                        i as u64,
                    )?;
                    ok &= (m.weight_sum() - 1.0).abs() <= 1e-12;
                    ok &= m.weights().windows(2).all(|w| w[1] < w[0]);
                }
            }
            Ok((ok, String::new()))
        })(),
    ));

    rows.push(check(
        "measure_round_trip",
        (|| {
            let m = crate::measure::sample_dp(3.0, &uniform, &TruncationPolicy::fixed(50), 3)?;
            let json_ok = DiscreteMeasure::from_json(&m.to_json()?)? == m;
            let mut buf = Vec::new();
            m.write_csv(&mut buf)?;
            let csv_ok = DiscreteMeasure::read_csv(&buf[..])? == m;
            Ok((json_ok && csv_ok, String::new()))
        })(),
    ));

    rows.push(check("kolmogorov_distance_examples", (|| {
        let m = DiscreteMeasure::from_json(
            r#"{"schema_version":1,"atoms":[0.25,0.75],"weights":[0.5,0.5],"sorted_by_weight":false,
               "provenance":{"kind":"fixed","params":{},"seed":0,"generator_id":"chacha8","base":"uniform[0,1]","status":"complete"}}"#,
        )?;
        let d = kolmogorov_distance(&m, &uniform)?;
        Ok(((d - 0.25).abs() < 1e-15, format!("d = {d}")))
    })()));

    rows.push(check(
        "experiment_independent_of_jobs",
        (|| {
            let mut spec = ExperimentSpec {
                process: ProcessKind::PdpSeries,
                params: ProcessParams {
                    alpha: Some(0.5),
                    theta: Some(2.0),
                    ..Default::default()
                },
                replications: 24,
                truncation: TruncationPolicy::fixed(100),
                master_seed: 7,
                parallelism: 1,
            };
            let a = run_ks_experiment(&spec, &uniform)?;
            spec.parallelism = jobs.max(2);
            let b = run_ks_experiment(&spec, &uniform)?;
            Ok((
                a.mean_distance == b.mean_distance,
                format!("mean {}", a.mean_distance),
            ))
        })(),
    ));

    rows.push(check(
        "hard_cap_default",
        Ok((DEFAULT_HARD_CAP == 1_000_000, String::new())),
    ));
    rows
}
