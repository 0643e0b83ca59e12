//! Name-keyed registries of evaluation engines and cache-hit estimators, so
//! front-ends can pick implementations at runtime.

use std::collections::BTreeMap;

use crate::analytics::{analytic_report, ase, fd_throughput_gain, outage, TransformVariant};
use crate::caching::{estimate_p_hit_geographic, p_hit_for_config, GeographicMode};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{McOptions, Simulator};
use crate::quadrature::QuadraturePolicy;

/// Metrics for one parameter point. Monte Carlo fields are `None` for
/// analytic engines and vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EngineOutput {
    pub p_hit: f64,
    pub p_suc: f64,
    pub ci_halfwidth: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub outage: f64,
    pub ase: f64,
    pub tg_fd: f64,
    pub l_dx: Option<f64>,
    pub l_x_miss: Option<f64>,
    pub l_dx_miss: Option<f64>,
}

pub trait Engine: Send + Sync {
    fn name(&self) -> &str;
    fn evaluate(&self, config: &ScenarioConfig) -> Result<EngineOutput>;
}

pub struct AnalyticEngine {
    pub name: String,
    pub variant: TransformVariant,
    pub policy: QuadraturePolicy,
}

impl Engine for AnalyticEngine {
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, config: &ScenarioConfig) -> Result<EngineOutput> {
        let r = analytic_report(config, self.variant, &self.policy)?;
        Ok(EngineOutput {
            p_hit: r.p_hit,
            p_suc: r.p_suc_lower,
            outage: r.outage,
            ase: r.ase,
            tg_fd: r.tg_fd,
            l_dx: Some(r.l_dx),
            l_x_miss: Some(r.l_x_miss),
            l_dx_miss: Some(r.l_dx_miss),
            ..EngineOutput::default()
        })
    }
}

/// Snapshot estimator using the scenario's correlation mode, snapshot count
/// and seed, with interferer cache states drawn from the closed-form `P_hit`.
pub struct MonteCarloEngine {
    pub options: McOptions,
}

impl Engine for MonteCarloEngine {
    fn name(&self) -> &str {
        "montecarlo"
    }

    fn evaluate(&self, config: &ScenarioConfig) -> Result<EngineOutput> {
        let p_hit = p_hit_for_config(config)?;
        let sim = Simulator::new(config, p_hit, self.options)?;
        let e = sim.estimate_p_suc(config.correlation_mode, config.n_snapshots, config.seed)?;
        Ok(EngineOutput {
            p_hit,
            p_suc: e.mean,
            ci_halfwidth: Some(e.ci_halfwidth),
            n: Some(e.n),
            seed: Some(e.seed),
            outage: outage(e.mean),
            ase: ase(sim.theta, sim.lambda, e.mean),
            tg_fd: fd_throughput_gain(
                sim.theta,
                sim.lambda,
                e.mean,
                config.r_ul,
                config.r_dl,
                config.alpha1,
            ),
            ..EngineOutput::default()
        })
    }
}

fn unknown(kind: &'static str, name: &str, names: Vec<&str>) -> Error {
    Error::UnknownStrategy {
        kind,
        name: name.to_string(),
        available: names.join(", "),
    }
}

#[derive(Default)]
pub struct EngineRegistry {
    engines: BTreeMap<String, Box<dyn Engine>>,
}

impl EngineRegistry {
    /// `analytic`, `analytic-shared` and `montecarlo`.
    pub fn with_defaults(options: McOptions) -> Self {
        let mut r = Self::default();
        r.register(Box::new(AnalyticEngine {
            name: "analytic".into(),
            variant: TransformVariant::ReceiverConsistent,
            policy: QuadraturePolicy::default(),
        }));
        r.register(Box::new(AnalyticEngine {
            name: "analytic-shared".into(),
            variant: TransformVariant::SharedUplinkExponent,
            policy: QuadraturePolicy::default(),
        }));
        r.register(Box::new(MonteCarloEngine { options }));
        r
    }

    /// Replaces any engine already registered under the same name.
    pub fn register(&mut self, engine: Box<dyn Engine>) {
        self.engines.insert(engine.name().to_string(), engine);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Engine> {
        self.engines
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| unknown("engine", name, self.names()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.engines.keys().map(String::as_str).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitOutput {
    pub p_hit: f64,
    pub ci_halfwidth: Option<f64>,
}

pub trait HitEstimator: Send + Sync {
    fn name(&self) -> &str;
    fn estimate(&self, config: &ScenarioConfig, n: usize, seed: u64) -> Result<HitOutput>;
}

/// Closed-form cache-hit probability.
pub struct ClosedFormHit;

impl HitEstimator for ClosedFormHit {
    fn name(&self) -> &str {
        "closed-form"
    }

    fn estimate(&self, config: &ScenarioConfig, _n: usize, _seed: u64) -> Result<HitOutput> {
        Ok(HitOutput {
            p_hit: p_hit_for_config(config)?,
            ci_halfwidth: None,
        })
    }
}

pub struct GeographicHit {
    pub mode: GeographicMode,
}

impl HitEstimator for GeographicHit {
    fn name(&self) -> &str {
        match self.mode {
            GeographicMode::IndependentRegions => "independent-regions",
            GeographicMode::PhysicalOverlap => "physical-overlap",
        }
    }

    fn estimate(&self, config: &ScenarioConfig, n: usize, seed: u64) -> Result<HitOutput> {
        let e = estimate_p_hit_geographic(config, self.mode, n, seed)?;
        Ok(HitOutput {
            p_hit: e.mean,
            ci_halfwidth: Some(e.ci_halfwidth),
        })
    }
}

#[derive(Default)]
pub struct HitRegistry {
    estimators: BTreeMap<String, Box<dyn HitEstimator>>,
}

impl HitRegistry {
    /// `closed-form`, `independent-regions` and `physical-overlap`.
    pub fn with_defaults() -> Self {
        let mut r = Self::default();
        r.register(Box::new(ClosedFormHit));
        r.register(Box::new(GeographicHit {
            mode: GeographicMode::IndependentRegions,
        }));
        r.register(Box::new(GeographicHit {
            mode: GeographicMode::PhysicalOverlap,
        }));
        r
    }

    pub fn register(&mut self, estimator: Box<dyn HitEstimator>) {
        self.estimators
            .insert(estimator.name().to_string(), estimator);
    }

    pub fn get(&self, name: &str) -> Result<&dyn HitEstimator> {
        self.estimators
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| unknown("hit estimator", name, self.names()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.estimators.keys().map(String::as_str).collect()
    }
}
