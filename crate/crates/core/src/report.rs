//! Run configuration, dispatch and byte-deterministic CSV/JSON output.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::bounds::{self, Backend, BoundSpec, Modulus, ViolationReport};
use crate::closed_form::{self, j_metric, MetricResult};
use crate::error::{Error, Result};
use crate::geometry::{make_domain, Aabb, DomainOracle, DomainSpec, Model, Point};
use crate::profiler::{self, Axis, Example};
use crate::qh_solver::{self, MethodChoice, SolverOptions};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for usage, spec and I/O errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit code when `verify` finds a violation.
pub const EXIT_VIOLATION: i32 = 2;

/// Scientific notation with seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact JSON with every float in [`fmt_f64`] form.
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Serialize with the fixed float format; one trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidSpec(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Dist,
    Geodesic,
    Verify,
    Profile,
    Sequence,
    Constants,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    J,
    K,
    Rho,
    Q,
}

/// Everything a run depends on; embedded verbatim in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub domain: Option<DomainSpec>,
    /// File the domain was read from, if any.
    pub domain_file: Option<String>,
    pub points: Option<(Vec<f64>, Vec<f64>)>,
    pub metric: MetricChoice,
    pub method: MethodChoice,
    pub tol: f64,
    pub samples: u64,
    pub seed: u64,
    pub bins: usize,
    pub axis: Axis,
    pub region: Option<(Vec<f64>, Vec<f64>)>,
    /// Predicted modulus for `profile`.
    pub phi: Option<Modulus>,
    pub suite: String,
    pub example: Option<String>,
    pub n_max: u32,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            domain: None,
            domain_file: None,
            points: None,
            metric: MetricChoice::K,
            method: MethodChoice::Auto,
            tol: 1e-3,
            samples: 1000,
            seed: 0,
            bins: profiler::DEFAULT_BINS,
            axis: Axis::Ratio,
            region: None,
            phi: None,
            suite: "all".into(),
            example: None,
            n_max: 8,
            theta: Vec::new(),
            alpha: Vec::new(),
            format: Format::Json,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.samples == 0 {
            return Err(Error::Usage("--samples must be positive".into()));
        }
        if self.bins == 0 {
            return Err(Error::Usage("--bins must be positive".into()));
        }
        Ok(())
    }
}

/// Parse `"x1,..,xn;y1,..,yn"`.
pub fn parse_pair(s: &str, what: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 2 {
        return Err(Error::Usage(format!("{what}: expected two ';'-separated coordinate lists")));
    }
    let list = |p: &str| -> Result<Vec<f64>> {
        p.split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Usage(format!("{what}: bad number `{}`", c.trim())))
            })
            .collect()
    };
    let (a, b) = (list(parts[0])?, list(parts[1])?);
    if a.len() != b.len() {
        return Err(Error::Usage(format!("{what}: the two lists differ in length")));
    }
    Ok((a, b))
}

/// Resolve the domain from inline JSON or a file; giving both is an error.
pub fn resolve_domain(inline: Option<&str>, file: Option<&str>) -> Result<Option<DomainSpec>> {
    match (inline, file) {
        (Some(_), Some(_)) => Err(Error::Usage("give --domain or --domain-file, not both".into())),
        (Some(s), None) => DomainSpec::from_json(s).map(Some),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.to_string(),
                source: e,
            })?;
            DomainSpec::from_json(&text).map(Some)
        }
        (None, None) => Ok(None),
    }
}

/// Result of a run: the rendered document and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    result: T,
}

fn wrap<T: Serialize>(cfg: &RunConfig, result: T) -> Result<String> {
    to_json(&Envelope {
        tool: "qhlab",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        result,
    })
}

/// CSV preamble: the tool, version and config as `#` comment lines.
fn csv_header(cfg: &RunConfig) -> Result<String> {
    let json = to_json(cfg)?;
    Ok(format!(
        "# qhlab {}\n# config {}",
        env!("CARGO_PKG_VERSION"),
        json
    ))
}

fn need_domain(cfg: &RunConfig) -> Result<DomainOracle> {
    let spec = cfg
        .domain
        .as_ref()
        .ok_or_else(|| Error::Usage("--domain or --domain-file is required".into()))?;
    make_domain(spec)
}

fn need_points(cfg: &RunConfig) -> Result<(Point, Point)> {
    let (x, y) = cfg
        .points
        .as_ref()
        .ok_or_else(|| Error::Usage("--points is required".into()))?;
    Ok((Point::new(x.clone())?, Point::new(y.clone())?))
}

fn rho(oracle: &DomainOracle, x: &Point, y: &Point) -> Result<MetricResult> {
    match oracle.model() {
        Model::Ball { center, radius } => {
            oracle.interior_delta(x)?;
            oracle.interior_delta(y)?;
            let to_unit = |p: &Point| -> Vec<f64> {
                p.coords().iter().zip(center).map(|(a, c)| (a - c) / radius).collect()
            };
            Ok(MetricResult::exact(closed_form::rho_ball_at(&to_unit(x), &to_unit(y))))
        }
        Model::HalfSpace { .. } => closed_form::k_halfspace(x, y),
        Model::General => Err(Error::NoClosedForm),
    }
}

#[derive(Serialize)]
struct DistResult {
    metric: MetricChoice,
    #[serde(flatten)]
    value: MetricResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimate: Option<qh_solver::KEstimate>,
}

fn run_dist(cfg: &RunConfig) -> Result<Outcome> {
    let (x, y) = need_points(cfg)?;
    let (value, estimate) = match cfg.metric {
        MetricChoice::Q => (closed_form::chordal(&x, &y)?, None),
        MetricChoice::J => (j_metric(&need_domain(cfg)?, &x, &y)?, None),
        MetricChoice::Rho => (rho(&need_domain(cfg)?, &x, &y)?, None),
        MetricChoice::K => {
            let oracle = need_domain(cfg)?;
            let opts = SolverOptions {
                method: cfg.method,
                ..SolverOptions::default()
            };
            let e = qh_solver::k_estimate(&oracle, &x, &y, cfg.tol, &opts)?;
            (e.metric(), Some(e))
        }
    };
    let body = match cfg.format {
        Format::Json => wrap(
            cfg,
            DistResult {
                metric: cfg.metric,
                value: value.clone(),
                estimate,
            },
        )?,
        Format::Csv => format!(
            "{}metric,value,method,error_bound\n{},{},{},{}\n",
            csv_header(cfg)?,
            serde_plain(&cfg.metric),
            fmt_f64(value.value),
            serde_plain(&value.method),
            fmt_f64(value.error_bound)
        ),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

/// The bare string form of a unit enum variant.
fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn run_geodesic(cfg: &RunConfig) -> Result<Outcome> {
    let oracle = need_domain(cfg)?;
    let (x, y) = need_points(cfg)?;
    let path = qh_solver::geodesic(&oracle, &x, &y, cfg.tol)?;
    let body = match cfg.format {
        Format::Json => wrap(cfg, &path)?,
        Format::Csv => format!("{}{}", csv_header(cfg)?, path.to_csv()),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

/// Catalog entries selected by a suite name.
pub fn suite_entries(suite: &str) -> Result<Vec<BoundSpec>> {
    let all = bounds::catalog();
    Ok(match suite {
        "all" => all.into_iter().filter(|b| b.backend == Backend::ClosedOnly).collect(),
        "numeric" => all.into_iter().filter(|b| b.backend == Backend::WithNumeric).collect(),
        "everything" => all,
        name => vec![bounds::find(name)?],
    })
}

#[derive(Serialize)]
struct VerifyResult {
    passed: bool,
    reports: Vec<ViolationReport>,
}

fn run_verify(cfg: &RunConfig) -> Result<Outcome> {
    let entries = suite_entries(&cfg.suite)?;
    let reports = entries
        .iter()
        .map(|b| bounds::check_bound(b, cfg.samples, cfg.seed, b.backend, cfg.tol))
        .collect::<Result<Vec<_>>>()?;
    verify_outcome(cfg, reports)
}

fn verify_outcome(cfg: &RunConfig, reports: Vec<ViolationReport>) -> Result<Outcome> {
    let passed = reports.iter().all(ViolationReport::passed);
    let body = match cfg.format {
        Format::Json => wrap(cfg, VerifyResult { passed, reports })?,
        Format::Csv => {
            let mut s = csv_header(cfg)?;
            s.push_str("name,samples,hits,checks,violation_count,solver_failures,worst_gap,max_sharpness_defect,passed\n");
            for r in &reports {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.name,
                    r.samples,
                    r.hits,
                    r.checks,
                    r.violation_count,
                    r.solver_failures,
                    fmt_f64(r.worst_gap),
                    r.max_sharpness_defect.map(fmt_f64).unwrap_or_default(),
                    r.passed()
                ));
            }
            s
        }
    };
    Ok(Outcome {
        body,
        exit_code: if passed { EXIT_OK } else { EXIT_VIOLATION },
    })
}

#[derive(Serialize)]
struct ProfileResult {
    profile: profiler::PhiProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<profiler::EnvelopeComparison>,
}

fn run_profile(cfg: &RunConfig) -> Result<Outcome> {
    let oracle = need_domain(cfg)?;
    let region = match &cfg.region {
        Some((lo, hi)) => Aabb::new(lo.clone(), hi.clone())?,
        None => oracle
            .bounding_box()
            .cloned()
            .ok_or_else(|| Error::Usage("unbounded domain: --region is required".into()))?,
    };
    let mut profile = profiler::phi_envelope(&oracle, cfg.samples, cfg.bins, cfg.seed, cfg.axis, &region, cfg.tol)?;
    let mut comparison = None;
    if let Some(phi) = &cfg.phi {
        comparison = Some(profiler::envelope_vs_theorem(&profile, phi, cfg.tol)?);
        profile = profile.with_predicted(phi);
    }
    let body = match cfg.format {
        Format::Json => wrap(cfg, ProfileResult { profile, comparison })?,
        Format::Csv => format!("{}{}", csv_header(cfg)?, profile.to_csv()),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

fn run_sequence(cfg: &RunConfig) -> Result<Outcome> {
    let name = cfg
        .example
        .as_deref()
        .ok_or_else(|| Error::Usage("--example is required".into()))?;
    let report = profiler::divergence_sequence(Example::parse(name)?, cfg.n_max, cfg.tol)?;
    let body = match cfg.format {
        Format::Json => wrap(cfg, &report)?,
        Format::Csv => format!("{}{}", csv_header(cfg)?, report.to_csv()),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct ConstantRow {
    name: &'static str,
    alpha: Option<f64>,
    theta: f64,
    value: f64,
}

fn run_constants(cfg: &RunConfig) -> Result<Outcome> {
    let thetas = if cfg.theta.is_empty() {
        (1..=9).map(|i| i as f64 / 10.0).collect()
    } else {
        cfg.theta.clone()
    };
    let mut rows = Vec::new();
    for &t in &thetas {
        rows.push(ConstantRow {
            name: "a_theta",
            alpha: None,
            theta: t,
            value: bounds::a_theta(t)?,
        });
        for &a in &cfg.alpha {
            rows.push(ConstantRow {
                name: "a_alpha_theta",
                alpha: Some(a),
                theta: t,
                value: bounds::a_alpha_theta(a, t)?,
            });
        }
    }
    let body = match cfg.format {
        Format::Json => wrap(cfg, &rows)?,
        Format::Csv => {
            let mut s = csv_header(cfg)?;
            s.push_str("name,alpha,theta,value\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.name,
                    r.alpha.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(r.theta),
                    fmt_f64(r.value)
                ));
            }
            s
        }
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

/// Execute a run and render its document.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.command {
        Command::Dist => run_dist(cfg),
        Command::Geodesic => run_geodesic(cfg),
        Command::Verify => run_verify(cfg),
        Command::Profile => run_profile(cfg),
        Command::Sequence => run_sequence(cfg),
        Command::Constants => run_constants(cfg),
    }
}

/// Write `body` to `path`, or to stdout when `path` is `None`.
pub fn emit(body: &str, path: Option<&std::path::Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::Io {
            path: p.display().to_string(),
            source: e,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{check_bound, find, Backend};

    #[test]
    fn violation_maps_to_exit_two() {
        let mut cfg = RunConfig::new(Command::Verify);
        cfg.samples = 30;
        let bad = find("newlem1").unwrap().with_param("s", -0.5);
        let good = find("bernoulli").unwrap();
        let reports = vec![
            check_bound(&good, 30, 0, Backend::ClosedOnly, 1e-3).unwrap(),
            check_bound(&bad, 30, 3, Backend::WithNumeric, 1e-2).unwrap(),
        ];
        let out = verify_outcome(&cfg, reports.clone()).unwrap();
        assert_eq!(out.exit_code, EXIT_VIOLATION);
        assert!(out.body.contains("\"passed\":false"));
        let out = verify_outcome(&cfg, reports[..1].to_vec()).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
    }
}
