//! Snapshot simulation at the typical SBS / UL / DL triple and Monte Carlo
//! estimators for the success probability and the interference transforms.
//!
//! The typical SBS sits at the origin, its DL node at `(r_dl, 0)` and its UL
//! node at distance `r_ul` in a uniform direction. Interferers are a PPP on a
//! disc around the origin; SBSs beyond the disc are replaced by their mean
//! interference unless [`McOptions::far_field`] is off.
//!
//! Every snapshot draws from its own stream, `split_stream(seed, index)`, and
//! results are reduced in index order, so estimates do not depend on the
//! number of worker threads.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::caching::{sample_cell_miss, CacheRegions, CatalogModel};
use crate::channel::{
    pathloss_sq, sample_rayleigh_power, sample_si_power, si_gamma_params, SiGammaParams,
};
use crate::config::{CacheSamplingMode, CorrelationMode, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{distance_sq, poisson_count, MarkedNetwork, Point2D};

/// Minimum snapshot count accepted by the success-probability estimator.
pub const MIN_SNAPSHOTS: usize = 100;

/// Width [m] of the rings the interferer field is sampled in.
pub const RING_WIDTH: f64 = 100.0;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sample mean with a 95% normal-approximation confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    pub const Z95: f64 = 1.96;

    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                ci_halfwidth: f64::NAN,
                n,
                seed,
            };
        }
        let mut s = NeumaierSum::default();
        samples.iter().for_each(|&x| s.add(x));
        let mean = s.total() / n as f64;
        let mut ss = NeumaierSum::default();
        samples
            .iter()
            .for_each(|&x| ss.add((x - mean) * (x - mean)));
        let var = if n > 1 {
            ss.total() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            ci_halfwidth: Self::Z95 * (var / n as f64).sqrt(),
            n,
            seed,
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.ci_halfwidth / Self::Z95
    }
}

/// Independent, reproducible stream for snapshot `index` under `seed`.
pub fn split_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// How miss-conditioned transform estimates handle the typical cache state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditioning {
    /// Draw the typical state and discard hit snapshots.
    #[default]
    Rejection,
    /// Treat every snapshot as a miss. Valid because the typical state is
    /// independent of the interferer field.
    Forced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    /// Add the mean interference of SBSs outside the window.
    pub far_field: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub conditioning: Conditioning,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            far_field: true,
            workers: None,
            conditioning: Conditioning::Rejection,
        }
    }
}

/// Positions of the typical cell. The SBS is always at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalTriple {
    pub sbs: Point2D,
    pub ul: Point2D,
    pub dl: Point2D,
}

/// Fading of the typical cell's own links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalGains {
    pub signal_ul: f64,
    pub signal_dl: f64,
    /// UL node -> DL node.
    pub ini: f64,
    /// Residual self-interference gain.
    pub si: f64,
}

/// Interferers and their fading towards the typical SBS and DL node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterfererField {
    pub network: MarkedNetwork,
    pub sbs_to_sbs: Vec<f64>,
    pub ul_to_sbs: Vec<f64>,
    pub sbs_to_dl: Vec<f64>,
    pub ul_to_dl: Vec<f64>,
}

/// Deterministic mean interference from beyond the window.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FarField {
    pub at_sbs: f64,
    pub at_dl: f64,
}

/// One simulated realization seen from the typical cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: InterfererField,
    /// Independent field for the DL hop of a miss in uncorrelated mode.
    pub dl_field: Option<InterfererField>,
    pub typical: TypicalTriple,
    pub gains: TypicalGains,
    pub typical_miss: bool,
    pub far_field: FarField,
    pub sir_ul: Option<f64>,
    pub sir_dl: f64,
}

/// Powers, exponents and distances in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub rho_ul: f64,
    pub rho_dl: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub r_ul: f64,
    pub r_dl: f64,
}

impl LinkParams {
    pub fn from_config(c: &ScenarioConfig) -> Self {
        Self {
            rho_ul: c.rho_ul(),
            rho_dl: c.rho_dl(),
            alpha1: c.alpha1,
            alpha2: c.alpha2,
            r_ul: c.r_ul,
            r_dl: c.r_dl,
        }
    }
}

/// Field interference `(at typical SBS, at typical DL)` without own-cell terms.
pub fn field_interference(
    field: &InterfererField,
    typical: &TypicalTriple,
    p: &LinkParams,
) -> (f64, f64) {
    let net = &field.network;
    let (mut at_sbs, mut at_dl) = (0.0, 0.0);
    for i in 0..net.len() {
        let y = net.sbs[i];
        at_sbs +=
            p.rho_dl * pathloss_sq(distance_sq(y, typical.sbs), p.alpha1) * field.sbs_to_sbs[i];
        at_dl += p.rho_dl * pathloss_sq(distance_sq(y, typical.dl), p.alpha1) * field.sbs_to_dl[i];
        if net.cache_miss[i] {
            let u = net.ul[i];
            at_sbs +=
                p.rho_ul * pathloss_sq(distance_sq(u, typical.sbs), p.alpha1) * field.ul_to_sbs[i];
            at_dl +=
                p.rho_ul * pathloss_sq(distance_sq(u, typical.dl), p.alpha2) * field.ul_to_dl[i];
        }
    }
    (at_sbs, at_dl)
}

/// Interference at the typical SBS, or `None` on a typical hit (no UL hop).
pub fn interference_at_sbs(snap: &Snapshot, p: &LinkParams) -> Option<f64> {
    if !snap.typical_miss {
        return None;
    }
    let (field, _) = field_interference(&snap.field, &snap.typical, p);
    Some(field + snap.far_field.at_sbs + p.rho_dl * snap.gains.si)
}

/// Interference at the typical DL node, including the own UL node on a miss.
pub fn interference_at_dl(snap: &Snapshot, p: &LinkParams) -> f64 {
    let source = match (&snap.dl_field, snap.typical_miss) {
        (Some(f), true) => f,
        _ => &snap.field,
    };
    let (_, field) = field_interference(source, &snap.typical, p);
    field + snap.far_field.at_dl + own_ini(snap.typical_miss, &snap.typical, &snap.gains, p)
}

fn own_ini(miss: bool, t: &TypicalTriple, g: &TypicalGains, p: &LinkParams) -> f64 {
    if miss {
        p.rho_ul * pathloss_sq(distance_sq(t.ul, t.dl), p.alpha2) * g.ini
    } else {
        0.0
    }
}

/// Which transform `estimate_laplace` targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplaceTarget {
    /// Field interference at the DL node.
    IDx,
    /// Interference at the SBS on a miss, with self-interference.
    IXMiss,
    /// Interference at the DL node on a miss, with the own UL node.
    IDxMiss,
}

#[derive(Debug, Clone)]
enum CacheStates {
    Bernoulli,
    Geographic {
        catalog: CatalogModel,
        storage: usize,
        radius_request: f64,
        radius_cache: f64,
    },
}

/// A scenario prepared for repeated snapshot sampling.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub links: LinkParams,
    pub theta: f64,
    pub lambda: f64,
    pub window_radius: f64,
    pub p_hit: f64,
    pub si: SiGammaParams,
    pub far_field: FarField,
    pub correlation: CorrelationMode,
    pub options: McOptions,
    states: CacheStates,
}

impl Simulator {
    pub fn new(c: &ScenarioConfig, p_hit: f64, options: McOptions) -> Result<Self> {
        c.ensure_valid()?;
        if !(0.0..=1.0).contains(&p_hit) {
            return Err(Error::InvalidArgument(format!(
                "p_hit must be in [0, 1], got {p_hit}"
            )));
        }
        if options.workers == Some(0) {
            return Err(Error::InvalidArgument("worker count must be >= 1".into()));
        }
        let links = LinkParams::from_config(c);
        let window_radius = c.window_radius();
        let far_field = if options.far_field {
            let shot = |rho: f64, alpha: f64| {
                2.0 * PI * c.lambda_sbs * rho * window_radius.powf(2.0 - alpha) / (alpha - 2.0)
            };
            let sbs = shot(links.rho_dl, c.alpha1);
            FarField {
                at_sbs: sbs + (1.0 - p_hit) * shot(links.rho_ul, c.alpha1),
                at_dl: sbs + (1.0 - p_hit) * shot(links.rho_ul, c.alpha2),
            }
        } else {
            FarField::default()
        };
        let states = match c.cache_sampling_mode {
            CacheSamplingMode::Bernoulli => CacheStates::Bernoulli,
            CacheSamplingMode::Geographic => CacheStates::Geographic {
                catalog: CatalogModel::from_config(c)?,
                storage: c.storage_size,
                radius_request: c.radius_request,
                radius_cache: c.radius_cache,
            },
        };
        Ok(Self {
            links,
            theta: c.theta(),
            lambda: c.lambda_sbs,
            window_radius,
            p_hit,
            si: si_gamma_params(c.rician_k, c.omega())?,
            far_field,
            correlation: c.correlation_mode,
            options,
            states,
        })
    }

    fn sample_miss<R: Rng + ?Sized>(&self, sbs: Point2D, dl: Point2D, rng: &mut R) -> bool {
        match &self.states {
            CacheStates::Bernoulli => rng.random::<f64>() >= self.p_hit,
            CacheStates::Geographic {
                catalog,
                storage,
                radius_request,
                radius_cache,
            } => {
                let regions = CacheRegions {
                    request_center: dl,
                    request_radius: *radius_request,
                    cache_center: sbs,
                    cache_radius: *radius_cache,
                };
                sample_cell_miss(catalog, &regions, *storage, rng)
            }
        }
    }

    fn sample_typical<R: Rng + ?Sized>(&self, rng: &mut R) -> (TypicalTriple, TypicalGains) {
        let ul = Point2D::polar(self.links.r_ul, 2.0 * PI * rng.random::<f64>());
        let typical = TypicalTriple {
            sbs: Point2D::ORIGIN,
            ul,
            dl: Point2D::new(self.links.r_dl, 0.0),
        };
        let gains = TypicalGains {
            signal_ul: sample_rayleigh_power(rng),
            signal_dl: sample_rayleigh_power(rng),
            ini: sample_rayleigh_power(rng),
            si: sample_si_power(&self.si, rng),
        };
        (typical, gains)
    }

    /// Interferer positions, marks, cache states and fading.
    ///
    /// The disc is split into rings of width [`RING_WIDTH`], each drawn from
    /// its own sub-stream keyed by one value from `rng`. A larger window thus
    /// reproduces the inner rings exactly. All four gains are drawn for every
    /// interferer so that streams stay aligned across `p_hit` values.
    pub fn sample_field<R: Rng + ?Sized>(&self, rng: &mut R) -> InterfererField {
        let key: u64 = rng.random();
        let mut f = InterfererField::default();
        f.network.window_radius = self.window_radius;
        let rings = (self.window_radius / RING_WIDTH).ceil() as u64;
        for j in 0..rings {
            let inner = j as f64 * RING_WIDTH;
            let outer = ((j + 1) as f64 * RING_WIDTH).min(self.window_radius);
            let mut ring_rng = split_stream(key, j);
            let rng = &mut ring_rng;
            let (in2, out2) = (inner * inner, outer * outer);
            let n = poisson_count(self.lambda * PI * (out2 - in2), rng);
            for _ in 0..n {
                let r = (in2 + rng.random::<f64>() * (out2 - in2)).sqrt();
                let x = Point2D::polar(r, 2.0 * PI * rng.random::<f64>());
                let ul = x + Point2D::polar(self.links.r_ul, 2.0 * PI * rng.random::<f64>());
                let dl = x + Point2D::polar(self.links.r_dl, 2.0 * PI * rng.random::<f64>());
                let miss = self.sample_miss(x, dl, rng);
                f.network.sbs.push(x);
                f.network.ul.push(ul);
                f.network.dl.push(dl);
                f.network.cache_miss.push(miss);
                f.sbs_to_sbs.push(sample_rayleigh_power(rng));
                f.ul_to_sbs.push(sample_rayleigh_power(rng));
                f.sbs_to_dl.push(sample_rayleigh_power(rng));
                f.ul_to_dl.push(sample_rayleigh_power(rng));
            }
        }
        f
    }

    /// One full snapshot: typical triple, typical cache state, field(s) and SIRs.
    pub fn run_snapshot<R: Rng + ?Sized>(&self, rng: &mut R) -> Snapshot {
        let (typical, gains) = self.sample_typical(rng);
        let typical_miss = self.sample_miss(typical.sbs, typical.dl, rng);
        let field = self.sample_field(rng);
        let dl_field = (typical_miss && self.correlation == CorrelationMode::Uncorrelated)
            .then(|| self.sample_field(rng));
        let mut snap = Snapshot {
            field,
            dl_field,
            typical,
            gains,
            typical_miss,
            far_field: self.far_field,
            sir_ul: None,
            sir_dl: 0.0,
        };
        let p = &self.links;
        snap.sir_ul = interference_at_sbs(&snap, p)
            .map(|i| p.rho_ul * p.r_ul.powf(-p.alpha1) * gains.signal_ul / i);
        snap.sir_dl =
            p.rho_dl * p.r_dl.powf(-p.alpha1) * gains.signal_dl / interference_at_dl(&snap, p);
        snap
    }

    pub fn snapshot_success(&self, snap: &Snapshot) -> bool {
        snap.sir_dl > self.theta && snap.sir_ul.is_none_or(|s| s > self.theta)
    }

    /// Per-snapshot success value. With Bernoulli states both typical branches
    /// are evaluated on the same realization and weighted by `p_hit`;
    /// geographic states use the sampled typical state.
    fn success_sample<R: Rng + ?Sized>(&self, mode: CorrelationMode, rng: &mut R) -> f64 {
        let p = &self.links;
        let (typical, gains) = self.sample_typical(rng);
        let sampled_miss = self.sample_miss(typical.sbs, typical.dl, rng);
        let a = self.sample_field(rng);
        let (a_sbs, a_dl) = field_interference(&a, &typical, p);
        let dl_miss_field = match mode {
            CorrelationMode::Correlated => a_dl,
            CorrelationMode::Uncorrelated => {
                field_interference(&self.sample_field(rng), &typical, p).1
            }
        };
        let s_ul = p.rho_ul * p.r_ul.powf(-p.alpha1) * gains.signal_ul;
        let s_dl = p.rho_dl * p.r_dl.powf(-p.alpha1) * gains.signal_dl;
        let hit_ok = s_dl > self.theta * (a_dl + self.far_field.at_dl);
        let ul_ok = s_ul > self.theta * (a_sbs + self.far_field.at_sbs + p.rho_dl * gains.si);
        let dl_ok = s_dl
            > self.theta
                * (dl_miss_field + self.far_field.at_dl + own_ini(true, &typical, &gains, p));
        let miss_ok = ul_ok && dl_ok;
        match self.states {
            CacheStates::Bernoulli => {
                self.p_hit * f64::from(u8::from(hit_ok))
                    + (1.0 - self.p_hit) * f64::from(u8::from(miss_ok))
            }
            CacheStates::Geographic { .. } => {
                f64::from(u8::from(if sampled_miss { miss_ok } else { hit_ok }))
            }
        }
    }

    fn laplace_sample<R: Rng + ?Sized>(
        &self,
        s: f64,
        target: LaplaceTarget,
        rng: &mut R,
    ) -> Option<f64> {
        let p = &self.links;
        let (typical, gains) = self.sample_typical(rng);
        let sampled_miss = self.sample_miss(typical.sbs, typical.dl, rng);
        let needs_miss = target != LaplaceTarget::IDx;
        if needs_miss && self.options.conditioning == Conditioning::Rejection && !sampled_miss {
            return None;
        }
        let field = self.sample_field(rng);
        let (at_sbs, at_dl) = field_interference(&field, &typical, p);
        let i = match target {
            LaplaceTarget::IDx => at_dl + self.far_field.at_dl,
            LaplaceTarget::IXMiss => at_sbs + self.far_field.at_sbs + p.rho_dl * gains.si,
            LaplaceTarget::IDxMiss => {
                at_dl + self.far_field.at_dl + own_ini(true, &typical, &gains, p)
            }
        };
        Some((-s * i).exp())
    }

    fn par_map<T: Send, F: Fn(u64) -> T + Sync + Send>(&self, n: usize, f: F) -> Result<Vec<T>> {
        let run = || (0..n as u64).into_par_iter().map(&f).collect::<Vec<T>>();
        match self.options.workers {
            None => Ok(run()),
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| {
                        Error::InvalidArgument(format!("cannot build worker pool: {e}"))
                    })?;
                Ok(pool.install(run))
            }
        }
    }

    pub fn estimate_p_suc(&self, mode: CorrelationMode, n: usize, seed: u64) -> Result<McEstimate> {
        if n < MIN_SNAPSHOTS {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_SNAPSHOTS} snapshots, got {n}"
            )));
        }
        let values = self.par_map(n, |k| self.success_sample(mode, &mut split_stream(seed, k)))?;
        Ok(McEstimate::from_samples(&values, seed))
    }

    /// Empirical `E[exp(-s I)]`; `n` counts attempted snapshots.
    pub fn estimate_laplace(
        &self,
        s: f64,
        target: LaplaceTarget,
        n: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "transform argument must be finite and >= 0, got {s}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one snapshot".into()));
        }
        if s == 0.0 {
            return Ok(McEstimate {
                mean: 1.0,
                ci_halfwidth: 0.0,
                n,
                seed,
            });
        }
        let values: Vec<f64> = self
            .par_map(n, |k| {
                self.laplace_sample(s, target, &mut split_stream(seed, k))
            })?
            .into_iter()
            .flatten()
            .collect();
        if values.is_empty() {
            return Err(Error::NoSamples(match target {
                LaplaceTarget::IDx => "I_dx",
                LaplaceTarget::IXMiss => "I_x_miss",
                LaplaceTarget::IDxMiss => "I_dx_miss",
            }));
        }
        Ok(McEstimate::from_samples(&values, seed))
    }

    /// Per-snapshot records for the raw dump.
    pub fn sample_records(&self, n: usize, seed: u64) -> Result<Vec<SampleRecord>> {
        self.par_map(n, |k| {
            let snap = self.run_snapshot(&mut split_stream(seed, k));
            SampleRecord {
                snapshot_index: k,
                typical_miss: snap.typical_miss,
                sir_ul: snap.sir_ul,
                sir_dl: snap.sir_dl,
                success: self.snapshot_success(&snap),
            }
        })
    }
}

/// Convenience wrapper building a [`Simulator`] with default options.
pub fn run_snapshot<R: Rng + ?Sized>(
    c: &ScenarioConfig,
    p_hit: f64,
    rng: &mut R,
) -> Result<Snapshot> {
    Ok(Simulator::new(c, p_hit, McOptions::default())?.run_snapshot(rng))
}

/// Success probability with `config.n_snapshots` snapshots from `config.seed`.
pub fn estimate_p_suc(
    c: &ScenarioConfig,
    p_hit: f64,
    mode: CorrelationMode,
    options: McOptions,
) -> Result<McEstimate> {
    Simulator::new(c, p_hit, options)?.estimate_p_suc(mode, c.n_snapshots, c.seed)
}

pub fn estimate_laplace(
    c: &ScenarioConfig,
    p_hit: f64,
    s: f64,
    target: LaplaceTarget,
    options: McOptions,
) -> Result<McEstimate> {
    Simulator::new(c, p_hit, options)?.estimate_laplace(s, target, c.n_snapshots, c.seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub snapshot_index: u64,
    pub typical_miss: bool,
    pub sir_ul: Option<f64>,
    pub sir_dl: f64,
    pub success: bool,
}

pub fn write_samples_csv<W: Write>(records: &[SampleRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "snapshot_index",
        "typical_miss",
        "sir_ul_db",
        "sir_dl_db",
        "success",
    ])?;
    let db = |x: f64| (10.0 * x.log10()).to_string();
    for r in records {
        w.write_record([
            r.snapshot_index.to_string(),
            u8::from(r.typical_miss).to_string(),
            r.sir_ul.map(db).unwrap_or_default(),
            db(r.sir_dl),
            u8::from(r.success).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_links() -> LinkParams {
        LinkParams {
            rho_ul: 1.0,
            rho_dl: 0.5,
            alpha1: 3.0,
            alpha2: 4.0,
            r_ul: 20.0,
            r_dl: 5.0,
        }
    }

    fn empty_snapshot(miss: bool) -> Snapshot {
        Snapshot {
            field: InterfererField::default(),
            dl_field: None,
            typical: TypicalTriple {
                sbs: Point2D::ORIGIN,
                ul: Point2D::new(0.0, 20.0),
                dl: Point2D::new(5.0, 0.0),
            },
            gains: TypicalGains {
                signal_ul: 1.0,
                signal_dl: 1.0,
                ini: 1.0,
                si: 2e-6,
            },
            typical_miss: miss,
            far_field: FarField::default(),
            sir_ul: None,
            sir_dl: 0.0,
        }
    }

    fn single_interferer(miss: bool) -> InterfererField {
        InterfererField {
            network: MarkedNetwork {
                sbs: vec![Point2D::new(100.0, 0.0)],
                ul: vec![Point2D::new(100.0, 20.0)],
                dl: vec![Point2D::new(95.0, 0.0)],
                cache_miss: vec![miss],
                window_radius: 300.0,
            },
            sbs_to_sbs: vec![1.0],
            ul_to_sbs: vec![1.0],
            sbs_to_dl: vec![1.0],
            ul_to_dl: vec![1.0],
        }
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut s = NeumaierSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.total(), 2.0);
    }

    #[test]
    fn estimate_from_constant_samples() {
        let e = McEstimate::from_samples(&[0.25; 400], 3);
        assert_eq!((e.mean, e.ci_halfwidth, e.n, e.seed), (0.25, 0.0, 400, 3));
    }

    #[test]
    fn streams_reproducible_and_distinct() {
        let a: Vec<u64> = (0..1000).map(|_| split_stream(5, 2).random()).collect();
        let mut r1 = split_stream(5, 2);
        let b: Vec<u64> = (0..1000).map(|_| r1.random()).collect();
        let mut r2 = split_stream(5, 2);
        let c: Vec<u64> = (0..1000).map(|_| r2.random()).collect();
        assert_eq!(b, c);
        assert!(a.iter().all(|&x| x == a[0]));
        let mut r3 = split_stream(6, 2);
        let d: Vec<u64> = (0..1000).map(|_| r3.random()).collect();
        assert_ne!(b, d);
    }

    #[test]
    fn empty_field_hit_and_miss() {
        let p = unit_links();
        let hit = empty_snapshot(false);
        assert_eq!(interference_at_sbs(&hit, &p), None);
        assert_eq!(interference_at_dl(&hit, &p), 0.0);

        let miss = empty_snapshot(true);
        assert_eq!(interference_at_sbs(&miss, &p), Some(0.5 * 2e-6));
        // UL at (0, 20), DL at (5, 0): d² = 25 + 400
        let expect = 1.0 / (425.0f64 * 425.0);
        assert!((interference_at_dl(&miss, &p) - expect).abs() < 1e-20);
    }

    #[test]
    fn single_interferer_hand_computed() {
        let p = unit_links();
        let mut snap = empty_snapshot(true);
        snap.field = single_interferer(true);
        snap.gains.si = 0.0;
        let sbs = 0.5 * 100f64.powi(-3) + 1.0 * (100.0f64 * 100.0 + 400.0).powf(-1.5);
        assert!((interference_at_sbs(&snap, &p).unwrap() - sbs).abs() < 1e-18);
        let ini = 1.0 / (425.0f64 * 425.0);
        let dl = 0.5 * 95f64.powi(-3) + (95.0f64 * 95.0 + 400.0).powi(-2) + ini;
        assert!((interference_at_dl(&snap, &p) - dl).abs() < 1e-18);

        // hit-state interferer contributes only its SBS term
        snap.field = single_interferer(false);
        snap.typical_miss = false;
        assert!((interference_at_dl(&snap, &p) - 0.5 * 95f64.powi(-3)).abs() < 1e-18);
    }

    #[test]
    fn snapshot_determinism_and_branches() {
        let c = ScenarioConfig::reference();
        let sim = Simulator::new(&c, 1.0, McOptions::default()).unwrap();
        for k in 0..50 {
            let a = sim.run_snapshot(&mut split_stream(9, k));
            let b = sim.run_snapshot(&mut split_stream(9, k));
            assert_eq!(a, b);
            assert!(!a.typical_miss && a.sir_ul.is_none());
            assert!(a.sir_dl >= 0.0);
        }
        let sim = Simulator::new(&c, 0.0, McOptions::default()).unwrap();
        let s = sim.run_snapshot(&mut split_stream(1, 1));
        assert!(s.typical_miss && s.sir_ul.unwrap() >= 0.0);
    }

    #[test]
    fn rejects_small_runs_and_zero_workers() {
        let c = ScenarioConfig::reference();
        let sim = Simulator::new(&c, 0.5, McOptions::default()).unwrap();
        assert!(sim
            .estimate_p_suc(CorrelationMode::Correlated, 99, 1)
            .is_err());
        let opts = McOptions {
            workers: Some(0),
            ..McOptions::default()
        };
        assert!(Simulator::new(&c, 0.5, opts).is_err());
    }

    #[test]
    fn laplace_at_zero_and_no_samples() {
        let c = ScenarioConfig::reference();
        let sim = Simulator::new(&c, 0.5, McOptions::default()).unwrap();
        assert_eq!(
            sim.estimate_laplace(0.0, LaplaceTarget::IXMiss, 10, 1)
                .unwrap()
                .mean,
            1.0
        );
        let all_hit = Simulator::new(&c, 1.0, McOptions::default()).unwrap();
        assert_eq!(
            all_hit
                .estimate_laplace(1.0, LaplaceTarget::IXMiss, 20, 1)
                .unwrap_err(),
            Error::NoSamples("I_x_miss")
        );
    }

    #[test]
    fn tiny_threshold_always_succeeds() {
        let mut c = ScenarioConfig::reference();
        c.theta_db = -80.0;
        let sim = Simulator::new(&c, 0.3, McOptions::default()).unwrap();
        let e = sim
            .estimate_p_suc(CorrelationMode::Uncorrelated, 200, 4)
            .unwrap();
        assert!(e.mean > 0.999);
    }

    #[test]
    fn sample_dump_layout() {
        let c = ScenarioConfig::reference();
        let sim = Simulator::new(&c, 0.5, McOptions::default()).unwrap();
        let recs = sim.sample_records(20, 2).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "snapshot_index,typical_miss,sir_ul_db,sir_dl_db,success"
        );
        assert_eq!(lines.count(), 20);
        for r in &recs {
            assert_eq!(r.sir_ul.is_some(), r.typical_miss);
        }
    }

    #[test]
    fn geographic_mode_runs() {
        let mut c = ScenarioConfig::reference();
        c.cache_sampling_mode = CacheSamplingMode::Geographic;
        c.lambda_sbs = 1e-4;
        let sim = Simulator::new(&c, 0.3, McOptions::default()).unwrap();
        let e = sim
            .estimate_p_suc(CorrelationMode::Correlated, 200, 4)
            .unwrap();
        assert!((0.0..=1.0).contains(&e.mean));
    }
}
