//! One-parameter sweeps over the registered engines, and the CSV writers
//! shared by the command-line front-end.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytics::AnalyticReport;
use crate::config::{ScenarioConfig, KEYS};
use crate::engine::{EngineOutput, EngineRegistry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    LambdaSbs,
    EtaFiles,
    ThetaDb,
    /// Storage-to-catalog ratio; sets `S = round(kappa F)`.
    Kappa,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] =
        [Self::LambdaSbs, Self::EtaFiles, Self::ThetaDb, Self::Kappa];

    pub fn key(self) -> &'static str {
        match self {
            Self::LambdaSbs => "lambda_sbs",
            Self::EtaFiles => "eta_files",
            Self::ThetaDb => "theta_db",
            Self::Kappa => "kappa",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = base.clone();
        match self {
            Self::LambdaSbs => c.lambda_sbs = value,
            Self::EtaFiles => c.eta_files = value,
            Self::ThetaDb => c.theta_db = value,
            Self::Kappa => {
                if !(0.0..1.0).contains(&value) {
                    return Err(Error::InvalidArgument(format!(
                        "kappa must be in [0, 1), got {value}"
                    )));
                }
                c = c.with_kappa(value);
            }
        }
        c.ensure_valid()?;
        Ok(c)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "sweep parameter",
                name: s.to_string(),
                available: Self::ALL.map(Self::key).join(", "),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub engines: Vec<String>,
}

/// `n` points from `a` to `b` inclusive, evenly spaced in log scale.
pub fn log_space(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || n == 0 {
        return Err(Error::InvalidArgument(format!("bad log range {a}:{b}:{n}")));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => a,
            i if i == n - 1 => b,
            i => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// Parses `KEY=v1,v2,...` or `KEY=log:a:b:n`.
pub fn parse_sweep(text: &str, engines: &[String]) -> Result<SweepSpec> {
    let (key, rest) = text
        .split_once('=')
        .ok_or_else(|| Error::InvalidArgument(format!("expected KEY=values, got `{text}`")))?;
    let parameter: SweepParameter = key.trim().parse()?;
    let rest = rest.trim();
    let values = if let Some(range) = rest.strip_prefix("log:") {
        let parts: Vec<&str> = range.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(Error::InvalidArgument(format!(
                "expected log:a:b:n, got `{rest}`"
            )));
        };
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number `{s}`")))
        };
        let n = n
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("bad count `{n}`")))?;
        log_space(num(a)?, num(b)?, n)?
    } else {
        rest.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad sweep value `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "sweep over {parameter} has no values"
        )));
    }
    if engines.is_empty() {
        return Err(Error::InvalidArgument("no engines selected".into()));
    }
    Ok(SweepSpec {
        parameter,
        values,
        engines: engines.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub engine: String,
    /// `ok`, or the error message for a failed point.
    pub status: String,
    pub output: Option<EngineOutput>,
}

/// Evaluates every (value, engine) pair. Points run concurrently; rows come
/// back in value-major, engine-minor order. Failures are recorded per row.
pub fn run_sweep(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    registry: &EngineRegistry,
) -> Result<Vec<SweepRow>> {
    if spec.values.is_empty() {
        return Err(Error::InvalidArgument("sweep has no values".into()));
    }
    let engines = spec
        .engines
        .iter()
        .map(|name| registry.get(name))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(f64, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..engines.len()).map(move |e| (v, e)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(value, e)| {
            let engine = engines[e];
            let result = spec
                .parameter
                .apply(base, value)
                .and_then(|c| engine.evaluate(&c));
            let (status, output) = match result {
                Ok(o) => ("ok".to_string(), Some(o)),
                Err(err) => (err.to_string(), None),
            };
            SweepRow {
                parameter: spec.parameter,
                value,
                engine: engine.name().to_string(),
                status,
                output,
            }
        })
        .collect())
}

pub const SWEEP_COLUMNS: [&str; 15] = [
    "parameter",
    "value",
    "engine",
    "status",
    "p_hit",
    "p_suc",
    "ci_halfwidth",
    "n",
    "seed",
    "outage",
    "ase",
    "tg_fd",
    "l_dx",
    "l_x_miss",
    "l_dx_miss",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        let mut rec = vec![
            r.parameter.to_string(),
            r.value.to_string(),
            r.engine.clone(),
            r.status.clone(),
        ];
        match &r.output {
            Some(o) => rec.extend([
                o.p_hit.to_string(),
                o.p_suc.to_string(),
                opt(o.ci_halfwidth),
                opt(o.n),
                opt(o.seed),
                o.outage.to_string(),
                o.ase.to_string(),
                o.tg_fd.to_string(),
                opt(o.l_dx),
                opt(o.l_x_miss),
                opt(o.l_dx_miss),
            ]),
            None => rec.extend(std::iter::repeat_n(String::new(), SWEEP_COLUMNS.len() - 4)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row: the scenario fields followed by the report fields.
pub fn write_report_csv<W: Write>(
    config: &ScenarioConfig,
    report: &AnalyticReport,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(KEYS.iter().chain(AnalyticReport::CSV_FIELDS.iter()))?;
    let values = config.values();
    let metrics = report.csv_values().map(|v| v.to_string());
    w.write_record(values.iter().chain(metrics.iter()))?;
    w.flush()?;
    Ok(())
}

pub const SIMULATE_COLUMNS: [&str; 9] = [
    "mode",
    "p_hit",
    "p_suc",
    "ci_halfwidth",
    "n",
    "seed",
    "outage",
    "ase",
    "tg_fd",
];

pub fn write_simulate_csv<W: Write>(mode: &str, o: &EngineOutput, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIMULATE_COLUMNS)?;
    w.write_record([
        mode.to_string(),
        o.p_hit.to_string(),
        o.p_suc.to_string(),
        opt(o.ci_halfwidth),
        opt(o.n),
        opt(o.seed),
        o.outage.to_string(),
        o.ase.to_string(),
        o.tg_fd.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub const HIT_COLUMNS: [&str; 9] = [
    "eta",
    "S",
    "F",
    "R_R",
    "R_C",
    "gamma",
    "p_hit_analytic",
    "p_hit_mc",
    "ci_halfwidth",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitRow {
    pub eta: f64,
    pub storage: usize,
    pub catalog: usize,
    pub radius_request: f64,
    pub radius_cache: f64,
    pub gamma: f64,
    pub p_hit_analytic: f64,
    pub p_hit_mc: Option<f64>,
    pub ci_halfwidth: Option<f64>,
}

pub fn write_hit_csv<W: Write>(rows: &[HitRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HIT_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.eta.to_string(),
            r.storage.to_string(),
            r.catalog.to_string(),
            r.radius_request.to_string(),
            r.radius_cache.to_string(),
            r.gamma.to_string(),
            r.p_hit_analytic.to_string(),
            opt(r.p_hit_mc),
            opt(r.ci_halfwidth),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::McOptions;

    fn analytic() -> Vec<String> {
        vec!["analytic".to_string()]
    }

    #[test]
    fn parses_lists_and_ranges() {
        let s = parse_sweep("eta_files=0.01, 0.1,1,10", &analytic()).unwrap();
        assert_eq!(s.parameter, SweepParameter::EtaFiles);
        assert_eq!(s.values, [0.01, 0.1, 1.0, 10.0]);
        let s = parse_sweep("lambda_sbs=log:1e-4:1e-3:3", &analytic()).unwrap();
        assert_eq!(s.values.len(), 3);
        assert_eq!((s.values[0], s.values[2]), (1e-4, 1e-3));
        assert!((s.values[1] - 10f64.powf(-3.5)).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(parse_sweep("eta_files=", &analytic()).is_err());
        assert!(parse_sweep("eta_files", &analytic()).is_err());
        assert!(parse_sweep("storage=1,2", &analytic()).is_err());
        assert!(parse_sweep("kappa=0.1,x", &analytic()).is_err());
        assert!(parse_sweep("kappa=log:0:1:3", &analytic()).is_err());
        assert!(parse_sweep("kappa=0.1", &[]).is_err());
    }

    #[test]
    fn kappa_maps_to_storage() {
        let base = ScenarioConfig::reference();
        assert_eq!(
            SweepParameter::Kappa
                .apply(&base, 0.35)
                .unwrap()
                .storage_size,
            35
        );
        assert_eq!(
            SweepParameter::Kappa
                .apply(&base, 0.0)
                .unwrap()
                .storage_size,
            0
        );
        assert!(SweepParameter::Kappa.apply(&base, 1.0).is_err());
        assert!(SweepParameter::Kappa.apply(&base, 0.999).is_err());
    }

    #[test]
    fn failures_stay_in_rows() {
        let reg = EngineRegistry::with_defaults(McOptions::default());
        let spec = SweepSpec {
            parameter: SweepParameter::LambdaSbs,
            values: vec![5e-4, -1.0, 1e-4],
            engines: analytic(),
        };
        let rows = run_sweep(&ScenarioConfig::reference(), &spec, &reg).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].status, "ok");
        assert!(rows[1].status.contains("lambda_sbs"));
        assert!(rows[1].output.is_none());
        assert_eq!(rows[2].value, 1e-4);

        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), SWEEP_COLUMNS.join(","));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn unknown_engine_is_an_error() {
        let reg = EngineRegistry::with_defaults(McOptions::default());
        let spec = SweepSpec {
            parameter: SweepParameter::Kappa,
            values: vec![0.1],
            engines: vec!["bogus".into()],
        };
        assert!(run_sweep(&ScenarioConfig::reference(), &spec, &reg).is_err());
    }
}
