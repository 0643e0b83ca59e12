//! Zipf catalog, the geographic caching model and the cache-hit probability.
//!
//! A DL node requests the files that have at least one copy inside its request
//! ball; an SBS caches the files among the `S` most popular that have a copy
//! inside its cache ball. The closed form multiplies the two presence
//! probabilities as if the balls saw independent file processes. The simulators
//! below offer both that independent-regions view and the physical one where a
//! single file process serves both (overlapping) balls.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    distance_sq, poisson_count, uniform_in_disc, FileProcess, MarkedNetwork, Point2D,
};
use crate::montecarlo::{split_stream, McEstimate};

/// File catalog with Zipf request probabilities, most popular first.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogModel {
    pub catalog_size: usize,
    pub request_probs: Vec<f64>,
    pub zipf_gamma: f64,
    pub eta_files: f64,
    cdf: Vec<f64>,
}

/// `p_i = i^-gamma / sum_j j^-gamma` for `i = 1..=F`.
pub fn zipf_catalog(catalog_size: usize, zipf_gamma: f64, eta_files: f64) -> Result<CatalogModel> {
    if catalog_size == 0 {
        return Err(Error::InvalidArgument("catalog size must be >= 1".into()));
    }
    if !(zipf_gamma >= 0.0) || !zipf_gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "zipf gamma must be >= 0, got {zipf_gamma}"
        )));
    }
    if !(eta_files >= 0.0) || !eta_files.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "file density must be >= 0, got {eta_files}"
        )));
    }
    let weights: Vec<f64> = (1..=catalog_size)
        .map(|i| (i as f64).powf(-zipf_gamma))
        .collect();
    // Sum smallest-first for accuracy.
    let total: f64 = weights.iter().rev().sum();
    let request_probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = request_probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    *cdf.last_mut().expect("non-empty catalog") = 1.0;
    Ok(CatalogModel {
        catalog_size,
        request_probs,
        zipf_gamma,
        eta_files,
        cdf,
    })
}

impl CatalogModel {
    pub fn from_config(c: &ScenarioConfig) -> Result<Self> {
        zipf_catalog(c.catalog_size, c.zipf_gamma, c.eta_files)
    }

    /// Request probability of file `i` (1-based).
    pub fn prob(&self, i: usize) -> f64 {
        self.request_probs[i - 1]
    }

    /// Draws a 1-based file index with the request probabilities.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.catalog_size - 1)
            + 1
    }

    /// Probability that file `i` has at least one copy in a ball of `radius`.
    pub fn presence_probability(&self, i: usize, radius: f64) -> f64 {
        -(-self.prob(i) * self.eta_files * PI * radius * radius).exp_m1()
    }
}

/// Request ball around the DL node and potential cache ball around the SBS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheRegions {
    pub request_center: Point2D,
    pub request_radius: f64,
    pub cache_center: Point2D,
    pub cache_radius: f64,
}

/// Closed-form cache-hit probability for a cache holding the `storage` most
/// popular files.
pub fn cache_hit_probability(
    catalog: &CatalogModel,
    radius_request: f64,
    radius_cache: f64,
    storage: usize,
) -> Result<f64> {
    if storage > catalog.catalog_size {
        return Err(Error::InvalidArgument(format!(
            "storage {storage} exceeds catalog size {}",
            catalog.catalog_size
        )));
    }
    let set: Vec<usize> = (1..=storage).collect();
    cache_hit_probability_for_set(catalog, radius_request, radius_cache, &set)
}

/// Same sum restricted to an arbitrary set of cacheable (1-based) file indices.
pub fn cache_hit_probability_for_set(
    catalog: &CatalogModel,
    radius_request: f64,
    radius_cache: f64,
    cached: &[usize],
) -> Result<f64> {
    if !(radius_request > 0.0 && radius_cache > 0.0) {
        return Err(Error::InvalidArgument("region radii must be > 0".into()));
    }
    let sum: f64 = cached
        .iter()
        .map(|&i| {
            catalog.presence_probability(i, radius_request)
                * catalog.presence_probability(i, radius_cache)
        })
        .sum();
    Ok(sum / catalog.catalog_size as f64)
}

pub fn p_hit_for_config(c: &ScenarioConfig) -> Result<f64> {
    let catalog = CatalogModel::from_config(c)?;
    cache_hit_probability(&catalog, c.radius_request, c.radius_cache, c.storage_size)
}

/// Marks every SBS as a cache miss independently with probability `1 - p_hit`.
pub fn assign_cache_states_bernoulli<R: Rng + ?Sized>(
    mut net: MarkedNetwork,
    p_hit: f64,
    rng: &mut R,
) -> Result<MarkedNetwork> {
    if !(0.0..=1.0).contains(&p_hit) {
        return Err(Error::InvalidArgument(format!(
            "p_hit must be in [0, 1], got {p_hit}"
        )));
    }
    for miss in net.cache_miss.iter_mut() {
        *miss = rng.random::<f64>() >= p_hit;
    }
    Ok(net)
}

/// Outcome of checking one file realization against one pair of regions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HitReport {
    pub requested: BTreeSet<usize>,
    pub cached: BTreeSet<usize>,
    /// `|requested ∩ cached| / F`.
    pub hit_value: f64,
}

pub fn geographic_hit_indicator(
    files: &FileProcess,
    regions: &CacheRegions,
    storage: usize,
    catalog_size: usize,
) -> HitReport {
    let rr2 = regions.request_radius * regions.request_radius;
    let rc2 = regions.cache_radius * regions.cache_radius;
    let mut report = HitReport::default();
    for (&p, &i) in files.points.iter().zip(&files.file_index) {
        if distance_sq(p, regions.request_center) <= rr2 {
            report.requested.insert(i);
        }
        if i <= storage && distance_sq(p, regions.cache_center) <= rc2 {
            report.cached.insert(i);
        }
    }
    report.hit_value =
        report.requested.intersection(&report.cached).count() as f64 / catalog_size as f64;
    report
}

/// Whether the request and cache balls see the same file realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeographicMode {
    /// Independent file processes per ball, as the closed form assumes.
    IndependentRegions,
    /// One shared process; balls centered `r_dl` apart.
    PhysicalOverlap,
}

/// Per-realization hit value for the typical SBS at the origin and its DL
/// node at `(r_dl, 0)`.
///
/// Only files `i <= S` can produce a hit, so only those are sampled. Per-file
/// counts are drawn directly from the thinned processes; positions are drawn
/// only when the balls overlap and membership depends on them.
pub(crate) fn sample_hit_value<R: Rng + ?Sized>(
    catalog: &CatalogModel,
    regions: &CacheRegions,
    storage: usize,
    mode: GeographicMode,
    rng: &mut R,
) -> f64 {
    let eta = catalog.eta_files;
    let area_r = PI * regions.request_radius * regions.request_radius;
    let area_c = PI * regions.cache_radius * regions.cache_radius;
    let mut hits = 0usize;
    match mode {
        GeographicMode::IndependentRegions => {
            for i in 1..=storage {
                let mu = catalog.prob(i) * eta;
                if poisson_count(mu * area_r, rng) > 0 && poisson_count(mu * area_c, rng) > 0 {
                    hits += 1;
                }
            }
        }
        GeographicMode::PhysicalOverlap => {
            for i in 1..=storage {
                if file_in_both_regions(catalog, i, regions, rng) {
                    hits += 1;
                }
            }
        }
    }
    hits as f64 / catalog.catalog_size as f64
}

/// Whether one realization of file `i`'s process has copies in both balls.
fn file_in_both_regions<R: Rng + ?Sized>(
    catalog: &CatalogModel,
    i: usize,
    regions: &CacheRegions,
    rng: &mut R,
) -> bool {
    let sep = distance_sq(regions.request_center, regions.cache_center).sqrt();
    let cover = regions.cache_radius.max(sep + regions.request_radius);
    let rr2 = regions.request_radius * regions.request_radius;
    let rc2 = regions.cache_radius * regions.cache_radius;
    let n = poisson_count(
        catalog.prob(i) * catalog.eta_files * PI * cover * cover,
        rng,
    );
    let (mut in_r, mut in_c) = (false, false);
    for _ in 0..n {
        let p = uniform_in_disc(regions.cache_center, cover, rng);
        in_r |= distance_sq(p, regions.request_center) <= rr2;
        in_c |= distance_sq(p, regions.cache_center) <= rc2;
        if in_r && in_c {
            return true;
        }
    }
    false
}

/// Cache state of one cell in the network simulator: the DL node requests a
/// uniformly chosen file, which is a hit if it is cacheable and has copies in
/// both of the cell's balls. Returns `true` on a miss.
pub(crate) fn sample_cell_miss<R: Rng + ?Sized>(
    catalog: &CatalogModel,
    regions: &CacheRegions,
    storage: usize,
    rng: &mut R,
) -> bool {
    let i = rng.random_range(1..=catalog.catalog_size);
    !(i <= storage && file_in_both_regions(catalog, i, regions, rng))
}

/// Monte Carlo cache-hit probability over `n` independent file realizations.
pub fn estimate_p_hit_geographic(
    config: &ScenarioConfig,
    mode: GeographicMode,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "need at least one realization".into(),
        ));
    }
    let catalog = CatalogModel::from_config(config)?;
    let regions = CacheRegions {
        request_center: Point2D::new(config.r_dl, 0.0),
        request_radius: config.radius_request,
        cache_center: Point2D::ORIGIN,
        cache_radius: config.radius_cache,
    };
    let storage = config.storage_size.min(catalog.catalog_size);
    let values: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = split_stream(seed, k);
            sample_hit_value(&catalog, &regions, storage, mode, &mut rng)
        })
        .collect();
    Ok(McEstimate::from_samples(&values, seed))
}
