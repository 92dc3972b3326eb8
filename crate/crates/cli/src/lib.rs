//! Command-line front end for `birelay`. Gains and powers go in as dB, rates
//! come out in bits per channel use.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use birelay::discrete::InputGrid;
use birelay::fading::{montecarlo_samples, PartialGainsDb};
use birelay::{
    fixed_delta_region, gaussian_mi_table, mabc_capacity_region, montecarlo_expected_rates, optimize_schedule,
    optimized_region, sweep_sum_rate, BoundKind, ChannelGains, DiscreteChannel, Error, FadingConfig, FadingModel,
    PhaseSchedule, Protocol, RateRegion, SweepParam, SweepSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

/// Schedules given on the command line may be rounded.
pub const DELTA_SUM_TOL: f64 = 1e-9;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "birelay",
    version,
    about = "Rate regions and phase schedules for half-duplex two-way relaying"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertices of a fixed-schedule or optimized rate region
    Region(RegionArgs),
    /// Best schedule and rate pair for a weighting of the two rates
    Optimize(OptimizeArgs),
    /// Optimized sum rates over a range of one parameter
    Sweep(SweepArgs),
    /// Containment test between two regions, with a witness when it fails
    Compare(CompareArgs),
    /// MABC capacity region of a discrete channel read from JSON
    Discrete(DiscreteArgs),
    /// Expected optimized sum rates under path loss and fading
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GainsDb {
    /// Transmit power per phase [dB]
    #[arg(long, allow_negative_numbers = true)]
    pub p_db: f64,
    /// Gain between the terminals [dB]
    #[arg(long, allow_negative_numbers = true)]
    pub g_ab_db: f64,
    /// Gain between a and the relay [dB]
    #[arg(long, allow_negative_numbers = true)]
    pub g_ar_db: f64,
    /// Gain between b and the relay [dB]
    #[arg(long, allow_negative_numbers = true)]
    pub g_br_db: f64,
}

impl GainsDb {
    fn gains(&self) -> Result<ChannelGains, Error> {
        ChannelGains::from_db(self.p_db, self.g_ab_db, self.g_ar_db, self.g_br_db)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write here (atomically) instead of standard output
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegionArgs {
    #[arg(long)]
    pub protocol: Protocol,
    /// inner (alias exact), outer or outer-relay-free
    #[arg(long, default_value = "inner")]
    pub bound: BoundKind,
    #[command(flatten)]
    pub gains: GainsDb,
    /// Fixed phase durations, comma separated; optimizes over schedules when absent
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    /// Number of weights in the initial support-point grid
    #[arg(long, default_value_t = 201)]
    pub mu_grid: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub protocol: Protocol,
    #[arg(long, default_value = "inner")]
    pub bound: BoundKind,
    #[command(flatten)]
    pub gains: GainsDb,
    /// Weight of R_a; R_b gets 1 - mu
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Swept quantity: p_db, g_ab_db, g_ar_db or g_br_db
    #[arg(long)]
    pub param: SweepParam,
    #[arg(long, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub p_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g_ab_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g_ar_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g_br_db: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "dt,mabc,tdbc,hbc")]
    pub protocols: Vec<Protocol>,
    #[arg(long, default_value = "inner")]
    pub bound: BoundKind,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// `protocol[:bound]`, bound defaulting to inner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionSpec {
    pub protocol: Protocol,
    pub bound: BoundKind,
}

impl FromStr for RegionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (p, b) = s.split_once(':').unwrap_or((s, "inner"));
        Ok(Self {
            protocol: p.parse()?,
            bound: b.parse()?,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// Region tested for containment, as protocol[:bound]
    #[arg(long)]
    pub a: RegionSpec,
    /// Containing region, as protocol[:bound]
    #[arg(long)]
    pub b: RegionSpec,
    #[command(flatten)]
    pub gains: GainsDb,
    #[arg(long, default_value_t = 201)]
    pub mu_grid: usize,
    /// Distance outside `b` tolerated before a point counts as a witness
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiscreteArgs {
    /// Channel description (JSON)
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.5")]
    pub delta: Vec<f64>,
    /// Input distributions are searched over multiples of 1/grid
    #[arg(long, default_value_t = 8)]
    pub grid: u32,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McArgs {
    /// Transmit power per phase [dB]
    #[arg(long, allow_negative_numbers = true)]
    pub p_db: f64,
    /// Path-loss exponent
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d_ab: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d_ar: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d_br: f64,
    /// none or rayleigh
    #[arg(long, default_value = "rayleigh")]
    pub model: FadingModel,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "dt,mabc,tdbc,hbc")]
    pub protocols: Vec<Protocol>,
    #[arg(long, default_value = "inner")]
    pub bound: BoundKind,
    /// Also write one CSV row per realization here
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A failed run: exit code and the message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument { .. } | Error::Parse(_) => EXIT_USAGE,
            _ => EXIT_COMPUTE,
        };
        Failure {
            code,
            message: format!("error: {e}"),
        }
    }
}

fn io_failure(name: &str, path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_COMPUTE,
        message: format!("error: `{name}` {}: {e}", path.display()),
    }
}

/// Result of a run, as the process would report it.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stderr: text,
                    ..Default::default()
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    ..Default::default()
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            ..Default::default()
        },
        Err(f) => Outcome {
            code: f.code,
            stderr: format!("{}\n", f.message),
            ..Default::default()
        },
    }
}

/// Runs a parsed command. Returns what goes to standard output; file output
/// has already been written when `--output` is set.
pub fn execute(command: &Command) -> Result<String, Failure> {
    let (text, out) = match command {
        Command::Region(a) => (region(a)?, &a.out),
        Command::Optimize(a) => (optimize(a)?, &a.out),
        Command::Sweep(a) => (sweep(a)?, &a.out),
        Command::Compare(a) => (compare(a)?, &a.out),
        Command::Discrete(a) => (discrete(a)?, &a.out),
        Command::Mc(a) => (mc(a)?, &a.out),
    };
    match &out.output {
        Some(path) => {
            write_atomic(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_failure("output", path, e))?;
    tmp.write_all(text.as_bytes())
        .map_err(|e| io_failure("output", path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_failure("output", path, e))?;
    tmp.persist(path).map_err(|e| io_failure("output", path, e.error))?;
    Ok(())
}

fn with_metadata(command: &str, params: &impl Serialize, body: Value) -> String {
    let mut doc = json!({
        "metadata": {
            "tool": "birelay",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "parameters": params,
        }
    });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn region_body(r: &RateRegion) -> Value {
    json!({ "vertices": r })
}

fn schedule(protocol: Protocol, delta: &[f64]) -> Result<PhaseSchedule, Error> {
    PhaseSchedule::with_tolerance(protocol, delta.to_vec(), DELTA_SUM_TOL)
}

pub fn compute_region(
    protocol: Protocol,
    bound: BoundKind,
    gains: &GainsDb,
    delta: Option<&[f64]>,
    mu_grid: usize,
) -> Result<RateRegion, Error> {
    let table = gaussian_mi_table(&gains.gains()?, protocol);
    match delta {
        Some(d) => fixed_delta_region(protocol, bound, &table, &schedule(protocol, d)?),
        None => optimized_region(protocol, bound, &table, mu_grid),
    }
}

fn region(a: &RegionArgs) -> Result<String, Failure> {
    let r = compute_region(a.protocol, a.bound, &a.gains, a.delta.as_deref(), a.mu_grid)?;
    Ok(match a.format {
        Format::Csv => r.to_csv(),
        Format::Json => with_metadata("region", a, region_body(&r)),
    })
}

fn optimize(a: &OptimizeArgs) -> Result<String, Failure> {
    let table = gaussian_mi_table(&a.gains.gains()?, a.protocol);
    let opt = optimize_schedule(a.protocol, a.bound, &table, a.mu)?;
    Ok(match a.format {
        Format::Json => with_metadata("optimize", a, json!({ "result": opt, "sum_rate": opt.sum_rate() })),
        Format::Csv => {
            let mut s = String::from("protocol,bound,mu,value,sum_rate,r_a,r_b,delta_1,delta_2,delta_3,delta_4\n");
            let _ = write!(
                s,
                "{},{},{},{},{},{},{}",
                opt.protocol,
                opt.bound,
                opt.mu,
                opt.value,
                opt.sum_rate(),
                opt.rates.r_a,
                opt.rates.r_b
            );
            for k in 0..4 {
                match opt.schedule.durations().get(k) {
                    Some(d) => {
                        let _ = write!(s, ",{d}");
                    }
                    None => s.push(','),
                }
            }
            s.push('\n');
            s
        }
    })
}

fn sweep(a: &SweepArgs) -> Result<String, Failure> {
    let fixed = PartialGainsDb {
        p_db: a.p_db,
        g_ab_db: a.g_ab_db,
        g_ar_db: a.g_ar_db,
        g_br_db: a.g_br_db,
    };
    let swept_also_fixed = match a.param {
        SweepParam::PDb => fixed.p_db.is_some(),
        SweepParam::GabDb => fixed.g_ab_db.is_some(),
        SweepParam::GarDb => fixed.g_ar_db.is_some(),
        SweepParam::GbrDb => fixed.g_br_db.is_some(),
    };
    if swept_also_fixed {
        return Err(Failure {
            code: EXIT_USAGE,
            message: format!("error: `{}` is swept and cannot also be fixed", a.param.name()),
        });
    }
    let spec = SweepSpec {
        param: a.param,
        start: a.start,
        stop: a.stop,
        step: a.step,
        fixed,
    };
    let table = sweep_sum_rate(&spec, &a.protocols, a.bound)?;
    Ok(match a.format {
        Format::Csv => table.to_csv(),
        Format::Json => with_metadata("sweep", a, json!({ "rows": table.rows })),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub contained: bool,
    /// First vertex of `a` (in vertex order) outside `b`.
    pub witness: Option<birelay::RatePair>,
    /// Largest distance of a vertex of `a` outside `b`.
    pub max_excess: f64,
    pub a_vertices: RateRegion,
    pub b_vertices: RateRegion,
}

pub fn compare_regions(a: &CompareArgs) -> Result<Comparison, Error> {
    let ra = compute_region(a.a.protocol, a.a.bound, &a.gains, None, a.mu_grid)?;
    let rb = compute_region(a.b.protocol, a.b.bound, &a.gains, None, a.mu_grid)?;
    let witness = ra.exists_point_outside(&rb, a.tol);
    Ok(Comparison {
        contained: witness.is_none(),
        witness,
        max_excess: ra.max_excess_over(&rb),
        a_vertices: ra,
        b_vertices: rb,
    })
}

fn compare(a: &CompareArgs) -> Result<String, Failure> {
    let c = compare_regions(a)?;
    Ok(with_metadata("compare", a, json!({ "result": c })))
}

fn discrete(a: &DiscreteArgs) -> Result<String, Failure> {
    let text = std::fs::read_to_string(&a.channel).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("error: `channel` {}: {e}", a.channel.display()),
    })?;
    let ch = DiscreteChannel::from_json(&text)?;
    let r = mabc_capacity_region(&ch, &schedule(Protocol::Mabc, &a.delta)?, &InputGrid::new(a.grid)?)?;
    Ok(match a.format {
        Format::Csv => r.to_csv(),
        Format::Json => with_metadata("discrete", a, region_body(&r)),
    })
}

fn mc(a: &McArgs) -> Result<String, Failure> {
    let cfg = FadingConfig {
        alpha: a.alpha,
        d_ab: a.d_ab,
        d_ar: a.d_ar,
        d_br: a.d_br,
        model: a.model,
        power: birelay::db_to_linear(a.p_db).map_err(|_| Error::InvalidArgument {
            name: "p_db".into(),
            reason: format!("must be finite, got {}", a.p_db),
        })?,
        samples: a.samples,
        seed: a.seed,
    };
    let report = montecarlo_expected_rates(&cfg, &a.protocols, a.bound)?;
    if let Some(path) = &a.samples_csv {
        let rows = montecarlo_samples(&cfg, &a.protocols, a.bound)?;
        let mut s = String::from("index,g_ab,g_ar,g_br,ordered");
        for st in &report.stats {
            let _ = write!(s, ",{}", st.protocol);
        }
        s.push('\n');
        for r in rows {
            let _ = write!(s, "{},{},{},{},{}", r.index, r.g_ab, r.g_ar, r.g_br, r.ordered);
            for v in r.sum_rates {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        write_atomic(path, &s)?;
    }
    Ok(with_metadata("mc", a, json!({ "result": report })))
}
