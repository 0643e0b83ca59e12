//! Scenario configuration: the single parameter set shared by the analytic and
//! simulation engines, its validation rules, and the `key = value` file format.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::units::{db_to_linear, dbm_to_watts};

/// Whether the two hops of a cache-miss transfer see the same interferer
/// realization (physical) or independent ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationMode {
    Correlated,
    Uncorrelated,
}

/// How per-SBS cache states are drawn in the network simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CacheSamplingMode {
    /// i.i.d. Bernoulli(P_hit) per SBS.
    Bernoulli,
    /// Per-SBS request + local file process sampling.
    Geographic,
}

/// Radius of the simulation disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowRadius {
    /// `max(300 m, 6 / sqrt(lambda * pi))`, re-evaluated for the current density.
    Auto,
    Fixed(f64),
}

impl WindowRadius {
    pub const MIN_AUTO: f64 = 300.0;

    pub fn resolve(self, lambda_sbs: f64) -> f64 {
        match self {
            WindowRadius::Fixed(r) => r,
            WindowRadius::Auto => {
                let r = 6.0 / (lambda_sbs * std::f64::consts::PI).sqrt();
                if r.is_finite() {
                    r.max(Self::MIN_AUTO)
                } else {
                    Self::MIN_AUTO
                }
            }
        }
    }
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:path => $kw:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $kw),+ })
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($kw => Ok($variant),)+
                    other => Err(format!(
                        "expected one of {}, got `{other}`",
                        [$($kw),+].join("|")
                    )),
                }
            }
        }
    };
}

keyword_enum!(CorrelationMode {
    CorrelationMode::Correlated => "correlated",
    CorrelationMode::Uncorrelated => "uncorrelated",
});

keyword_enum!(CacheSamplingMode {
    CacheSamplingMode::Bernoulli => "bernoulli",
    CacheSamplingMode::Geographic => "geographic",
});

impl fmt::Display for WindowRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowRadius::Auto => f.write_str("auto"),
            WindowRadius::Fixed(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for WindowRadius {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(WindowRadius::Auto);
        }
        s.parse::<f64>()
            .map(WindowRadius::Fixed)
            .map_err(|_| format!("expected `auto` or meters, got `{s}`"))
    }
}

/// Every model parameter plus simulation controls.
///
/// Powers and thresholds are kept in the units users write them in (dBm / dB);
/// the accessor methods return the linear forms used by the engines.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// SBS density [SBSs/m^2].
    pub lambda_sbs: f64,
    /// File density [files/m^2].
    pub eta_files: f64,
    pub catalog_size: usize,
    pub storage_size: usize,
    pub zipf_gamma: f64,
    /// Request-region radius [m].
    pub radius_request: f64,
    /// Potential cache-region radius [m].
    pub radius_cache: f64,
    /// UL node to SBS distance [m].
    pub r_ul: f64,
    /// SBS to DL node distance [m].
    pub r_dl: f64,
    pub rho_ul_dbm: f64,
    pub rho_dl_dbm: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub theta_db: f64,
    pub rician_k: f64,
    pub si_attenuation_db: f64,
    pub sim_window_radius: WindowRadius,
    pub n_snapshots: usize,
    pub seed: u64,
    pub correlation_mode: CorrelationMode,
    pub cache_sampling_mode: CacheSamplingMode,
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub const KEYS: [&str; 21] = [
    "lambda_sbs",
    "eta_files",
    "catalog_size",
    "storage_size",
    "zipf_gamma",
    "radius_request",
    "radius_cache",
    "r_ul",
    "r_dl",
    "rho_ul_dbm",
    "rho_dl_dbm",
    "alpha1",
    "alpha2",
    "theta_db",
    "rician_k",
    "si_attenuation_db",
    "sim_window_radius",
    "n_snapshots",
    "seed",
    "correlation_mode",
    "cache_sampling_mode",
];

impl ScenarioConfig {
    /// Reference deployment:
    /// F = 100 files, eta = 1 file/m^2, kappa = 0.6, lambda = 5e-4.
    pub fn reference() -> Self {
        Self {
            lambda_sbs: 5e-4,
            eta_files: 1.0,
            catalog_size: 100,
            storage_size: 60,
            zipf_gamma: 0.7,
            radius_request: 8.0,
            radius_cache: 40.0,
            r_ul: 20.0,
            r_dl: 5.0,
            rho_ul_dbm: 30.0,
            rho_dl_dbm: 24.0,
            alpha1: 3.0,
            alpha2: 4.0,
            theta_db: 0.0,
            rician_k: 1.0,
            si_attenuation_db: 60.0,
            sim_window_radius: WindowRadius::Auto,
            n_snapshots: 100_000,
            seed: 1,
            correlation_mode: CorrelationMode::Correlated,
            cache_sampling_mode: CacheSamplingMode::Bernoulli,
        }
    }

    /// Returns a copy with `S = round(kappa * F)`.
    pub fn with_kappa(&self, kappa: f64) -> Self {
        let mut c = self.clone();
        c.storage_size = (kappa * self.catalog_size as f64).round() as usize;
        c
    }

    pub fn kappa(&self) -> f64 {
        self.storage_size as f64 / self.catalog_size as f64
    }

    pub fn rho_ul(&self) -> f64 {
        dbm_to_watts(self.rho_ul_dbm)
            .map(|p| p.watts())
            .unwrap_or(f64::NAN)
    }

    pub fn rho_dl(&self) -> f64 {
        dbm_to_watts(self.rho_dl_dbm)
            .map(|p| p.watts())
            .unwrap_or(f64::NAN)
    }

    pub fn theta(&self) -> f64 {
        db_to_linear(self.theta_db).unwrap_or(f64::NAN)
    }

    pub fn omega(&self) -> f64 {
        db_to_linear(self.si_attenuation_db).unwrap_or(f64::NAN)
    }

    pub fn window_radius(&self) -> f64 {
        self.sim_window_radius.resolve(self.lambda_sbs)
    }

    /// Fails with every violation if the configuration is invalid.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Parses the `key = value` scenario format. Every key in [`KEYS`] must
    /// appear exactly once; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: [Option<(usize, String)>; KEYS.len()] = Default::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let slot = KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                })?;
            if values[slot].is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            values[slot] = Some((line_no, value.to_string()));
        }

        let mut fields = values.into_iter().zip(KEYS);
        let mut next = || -> Result<(usize, String)> {
            let (slot, key) = fields.next().expect("field order matches KEYS");
            slot.ok_or(Error::MissingKey(key))
        };

        fn conv<T: FromStr>(entry: (usize, String), key: &str) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            let (line, value) = entry;
            value.parse::<T>().map_err(|e| Error::Parse {
                line,
                message: format!("bad value for `{key}`: {e}"),
            })
        }

        Ok(Self {
            lambda_sbs: conv(next()?, "lambda_sbs")?,
            eta_files: conv(next()?, "eta_files")?,
            catalog_size: conv(next()?, "catalog_size")?,
            storage_size: conv(next()?, "storage_size")?,
            zipf_gamma: conv(next()?, "zipf_gamma")?,
            radius_request: conv(next()?, "radius_request")?,
            radius_cache: conv(next()?, "radius_cache")?,
            r_ul: conv(next()?, "r_ul")?,
            r_dl: conv(next()?, "r_dl")?,
            rho_ul_dbm: conv(next()?, "rho_ul_dbm")?,
            rho_dl_dbm: conv(next()?, "rho_dl_dbm")?,
            alpha1: conv(next()?, "alpha1")?,
            alpha2: conv(next()?, "alpha2")?,
            theta_db: conv(next()?, "theta_db")?,
            rician_k: conv(next()?, "rician_k")?,
            si_attenuation_db: conv(next()?, "si_attenuation_db")?,
            sim_window_radius: conv(next()?, "sim_window_radius")?,
            n_snapshots: conv(next()?, "n_snapshots")?,
            seed: conv(next()?, "seed")?,
            correlation_mode: conv(next()?, "correlation_mode")?,
            cache_sampling_mode: conv(next()?, "cache_sampling_mode")?,
        })
    }

    /// Serializes in the same format [`ScenarioConfig::parse`] reads.
    pub fn to_scenario_string(&self) -> String {
        KEYS.iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Field values as text, in [`KEYS`] order.
    pub fn values(&self) -> [String; KEYS.len()] {
        [
            self.lambda_sbs.to_string(),
            self.eta_files.to_string(),
            self.catalog_size.to_string(),
            self.storage_size.to_string(),
            self.zipf_gamma.to_string(),
            self.radius_request.to_string(),
            self.radius_cache.to_string(),
            self.r_ul.to_string(),
            self.r_dl.to_string(),
            self.rho_ul_dbm.to_string(),
            self.rho_dl_dbm.to_string(),
            self.alpha1.to_string(),
            self.alpha2.to_string(),
            self.theta_db.to_string(),
            self.rician_k.to_string(),
            self.si_attenuation_db.to_string(),
            self.sim_window_radius.to_string(),
            self.n_snapshots.to_string(),
            self.seed.to_string(),
            self.correlation_mode.to_string(),
            self.cache_sampling_mode.to_string(),
        ]
    }
}

/// Lists every violated invariant; an empty list means the configuration is valid.
pub fn validate(c: &ScenarioConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |field: &'static str, message: String| out.push(Violation { field, message });

    let finite = [
        ("lambda_sbs", c.lambda_sbs),
        ("eta_files", c.eta_files),
        ("zipf_gamma", c.zipf_gamma),
        ("radius_request", c.radius_request),
        ("radius_cache", c.radius_cache),
        ("r_ul", c.r_ul),
        ("r_dl", c.r_dl),
        ("rho_ul_dbm", c.rho_ul_dbm),
        ("rho_dl_dbm", c.rho_dl_dbm),
        ("alpha1", c.alpha1),
        ("alpha2", c.alpha2),
        ("theta_db", c.theta_db),
        ("rician_k", c.rician_k),
        ("si_attenuation_db", c.si_attenuation_db),
    ];
    for (field, v) in finite {
        if !v.is_finite() {
            push(field, format!("{field} must be finite"));
        }
    }

    if !(c.alpha1 > 2.0) {
        push("alpha1", "alpha1 must exceed 2".into());
    }
    if !(c.alpha2 >= c.alpha1) {
        push("alpha2", "alpha2 must be >= alpha1".into());
    }

    for (field, v) in [
        ("lambda_sbs", c.lambda_sbs),
        ("eta_files", c.eta_files),
        ("radius_request", c.radius_request),
        ("radius_cache", c.radius_cache),
        ("r_ul", c.r_ul),
        ("r_dl", c.r_dl),
    ] {
        if !(v > 0.0) {
            push(field, format!("{field} must be > 0"));
        }
    }
    if c.catalog_size == 0 {
        push("catalog_size", "catalog_size must be > 0".into());
    }
    if c.storage_size >= c.catalog_size {
        push("storage_size", "storage_size must be < catalog_size".into());
    }
    if !(c.zipf_gamma >= 0.0) {
        push("zipf_gamma", "zipf_gamma must be >= 0".into());
    }
    if !(c.r_ul > c.r_dl) {
        push("r_ul", "r_ul must exceed r_dl".into());
    }
    if !(c.rician_k >= 0.0) {
        push("rician_k", "rician_k must be >= 0".into());
    }
    if !(c.si_attenuation_db >= 0.0) {
        push("si_attenuation_db", "si_attenuation_db must be >= 0".into());
    }
    if let WindowRadius::Fixed(r) = c.sim_window_radius {
        if !(r > 0.0 && r.is_finite()) {
            push("sim_window_radius", "sim_window_radius must be > 0".into());
        }
    }
    if c.n_snapshots == 0 {
        push("n_snapshots", "n_snapshots must be > 0".into());
    }
    out
}

/// Non-fatal advisories.
pub fn warnings(c: &ScenarioConfig) -> Vec<String> {
    let mut w = Vec::new();
    if c.r_ul > c.r_dl && c.r_ul < 2.0 * c.r_dl {
        w.push(format!(
            "r_ul = {} m is less than twice r_dl = {} m; the model assumes r_ul >> r_dl",
            c.r_ul, c.r_dl
        ));
    }
    w
}
