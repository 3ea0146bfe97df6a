use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qhlab::bounds::Modulus;
use qhlab::profiler::Axis;
use qhlab::qh_solver::MethodChoice;
use qhlab::report::{self, Command, Format, MetricChoice, RunConfig, EXIT_ERROR};
use qhlab::Error;

#[derive(Parser)]
#[command(name = "qhlab", version, about = "Quasihyperbolic metric laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distance between two points.
    Dist(DistArgs),
    /// Polyline realizing k̂, as CSV of vertices and cumulative k-length.
    Geodesic(GeodesicArgs),
    /// Check catalog inequalities by sampling; exit 2 on a violation.
    Verify(VerifyArgs),
    /// Envelope of k̂ against |x-y|/min δ or j.
    Profile(ProfileArgs),
    /// Pairs of a non-φ-uniform example for growing n.
    Sequence(SequenceArgs),
    /// Table of a(θ) and a(α,θ).
    Constants(ConstantsArgs),
}

#[derive(Args)]
struct DomainArgs {
    /// Domain spec as inline JSON.
    #[arg(long)]
    domain: Option<String>,
    /// Domain spec read from a JSON file.
    #[arg(long)]
    domain_file: Option<String>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// "x1,..,xn;y1,..,yn"
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    #[arg(long, value_enum, default_value_t = MetricArg::K)]
    metric: MetricArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` (closed-form entries), `numeric`, `everything`, or one bound name.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = qhlab::profiler::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, value_enum, default_value_t = AxisArg::Ratio)]
    axis: AxisArg,
    /// Sampling box "lo1,..;hi1,.."; defaults to the domain's bounding box.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Predicted modulus as JSON, e.g. '{"kind":"linear","slope":1}'.
    #[arg(long)]
    phi: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SequenceArgs {
    #[arg(long, value_parser = ["half_strip", "exp_cusp", "revolution", "comb"])]
    example: String,
    #[arg(long, default_value_t = 8)]
    n_max: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Comma-separated θ values; 0.1,..,0.9 by default.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    /// Comma-separated α values for a(α,θ).
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    J,
    K,
    Rho,
    Q,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Closed,
    Numeric,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Ratio,
    J,
}

fn apply_common(cfg: &mut RunConfig, c: Common) {
    cfg.tol = c.tol;
    cfg.format = match c.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    cfg.out = c.out;
}

fn apply_domain(cfg: &mut RunConfig, d: &DomainArgs) -> qhlab::Result<()> {
    cfg.domain = report::resolve_domain(d.domain.as_deref(), d.domain_file.as_deref())?;
    cfg.domain_file = d.domain_file.clone();
    Ok(())
}

fn config(cli: Cli) -> qhlab::Result<RunConfig> {
    let cfg = match cli.command {
        Cmd::Dist(a) => {
            let mut cfg = RunConfig::new(Command::Dist);
            apply_domain(&mut cfg, &a.domain)?;
            cfg.points = Some(report::parse_pair(&a.points, "--points")?);
            cfg.metric = match a.metric {
                MetricArg::J => MetricChoice::J,
                MetricArg::K => MetricChoice::K,
                MetricArg::Rho => MetricChoice::Rho,
                MetricArg::Q => MetricChoice::Q,
            };
            cfg.method = match a.method {
                MethodArg::Auto => MethodChoice::Auto,
                MethodArg::Closed => MethodChoice::Closed,
                MethodArg::Numeric => MethodChoice::Numeric,
            };
            apply_common(&mut cfg, a.common);
            cfg
        }
        Cmd::Geodesic(a) => {
            let mut cfg = RunConfig::new(Command::Geodesic);
            apply_domain(&mut cfg, &a.domain)?;
            cfg.points = Some(report::parse_pair(&a.points, "--points")?);
            apply_common(&mut cfg, a.common);
            cfg
        }
        Cmd::Verify(a) => {
            let mut cfg = RunConfig::new(Command::Verify);
            cfg.suite = a.suite;
            cfg.samples = a.samples;
            cfg.seed = a.seed;
            apply_common(&mut cfg, a.common);
            cfg
        }
        Cmd::Profile(a) => {
            let mut cfg = RunConfig::new(Command::Profile);
            apply_domain(&mut cfg, &a.domain)?;
            cfg.samples = a.samples;
            cfg.seed = a.seed;
            cfg.bins = a.bins;
            cfg.axis = match a.axis {
                AxisArg::Ratio => Axis::Ratio,
                AxisArg::J => Axis::J,
            };
            cfg.region = a.region.as_deref().map(|r| report::parse_pair(r, "--region")).transpose()?;
            cfg.phi = a
                .phi
                .as_deref()
                .map(|s| serde_json::from_str::<Modulus>(s).map_err(|e| Error::Usage(format!("--phi: {e}"))))
                .transpose()?;
            apply_common(&mut cfg, a.common);
            cfg
        }
        Cmd::Sequence(a) => {
            let mut cfg = RunConfig::new(Command::Sequence);
            cfg.example = Some(a.example);
            cfg.n_max = a.n_max;
            apply_common(&mut cfg, a.common);
            cfg
        }
        Cmd::Constants(a) => {
            let mut cfg = RunConfig::new(Command::Constants);
            cfg.theta = a.theta;
            cfg.alpha = a.alpha;
            apply_common(&mut cfg, a.common);
            cfg
        }
    };
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = config(cli).and_then(|cfg| {
        let outcome = report::run(&cfg)?;
        report::emit(&outcome.body, cfg.out.as_deref())?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qhlab: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
