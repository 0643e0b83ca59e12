//! Closed-form and quadrature evaluation of the interference Laplace
//! transforms, the success-probability lower bound, outage, ASE and the
//! full-duplex throughput gain.
//!
//! Interferers come in SBS/UL-node pairs: an SBS at distance `r` from the
//! receiver and its UL node `r_ul` away from it at a uniform angle. SBSs in a
//! cache-hit state transmit alone. Every transform below has the form
//!
//! ```text
//! L(s) = exp(-2πλ [P_hit Υ̂(s) + (1 - P_hit) Υ̃(s)])
//! ```
//!
//! times per-cell factors for the self-interference and the own UL node.

use std::f64::consts::PI;

use crate::caching::p_hit_for_config;
use crate::channel::{si_gamma_params, SiGammaParams};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::quadrature::{
    gauss_legendre, integrate_adaptive, Estimate, QuadraturePolicy, RadialTruncation, GL_MAX_LEVEL,
    GL_MIN_LEVEL,
};

/// Which exponent the UL-node interferers get at the SBS receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TransformVariant {
    /// UL node -> SBS links use `alpha1`, matching the pathloss rule and the
    /// simulator. The DL-side transforms are unaffected.
    #[default]
    ReceiverConsistent,
    /// The SBS-side transform reuses the DL-side one, so UL-node interferers
    /// reach the SBS with `alpha2`.
    SharedUplinkExponent,
}

/// Linear-unit parameters shared by all transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub lambda: f64,
    pub p_hit: f64,
    pub rho_ul: f64,
    pub rho_dl: f64,
    pub r_ul: f64,
    pub r_dl: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub theta: f64,
    pub si: SiGammaParams,
}

impl NetworkParams {
    pub fn from_config(c: &ScenarioConfig, p_hit: f64) -> Result<Self> {
        c.ensure_valid()?;
        Ok(Self {
            lambda: c.lambda_sbs,
            p_hit,
            rho_ul: c.rho_ul(),
            rho_dl: c.rho_dl(),
            r_ul: c.r_ul,
            r_dl: c.r_dl,
            alpha1: c.alpha1,
            alpha2: c.alpha2,
            theta: c.theta(),
            si: si_gamma_params(c.rician_k, c.omega())?,
        })
    }

    /// Transform argument of the SBS -> DL hop: `θ R_DL^α1 / ρ_DL`.
    pub fn s_dl(&self) -> f64 {
        self.theta * self.r_dl.powf(self.alpha1) / self.rho_dl
    }

    /// Transform argument of the UL -> SBS hop: `θ R_UL^α1 / ρ_UL`.
    pub fn s_ul(&self) -> f64 {
        self.theta * self.r_ul.powf(self.alpha1) / self.rho_ul
    }

    fn pair(&self, alpha_ul: f64) -> PairParams {
        PairParams {
            rho_dl: self.rho_dl,
            rho_ul: self.rho_ul,
            r_ul: self.r_ul,
            alpha1: self.alpha1,
            alpha_ul,
        }
    }
}

/// An interfering SBS/UL-node pair as seen from one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairParams {
    pub rho_dl: f64,
    pub rho_ul: f64,
    pub r_ul: f64,
    /// Exponent of the SBS -> receiver link.
    pub alpha1: f64,
    /// Exponent of the UL node -> receiver link.
    pub alpha_ul: f64,
}

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "transform argument must be finite and >= 0, got {s}"
        )));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "pathloss exponent must exceed 2, got {alpha}"
        )));
    }
    Ok(())
}

/// `π (s ρ_DL)^(2/α1) csc(2π/α1) / α1`, the SBS-only shot-noise integral.
pub fn upsilon_hat(s: f64, rho_dl: f64, alpha1: f64) -> Result<f64> {
    check_s(s)?;
    check_alpha(alpha1)?;
    if s == 0.0 || rho_dl == 0.0 {
        return Ok(0.0);
    }
    Ok(PI * (s * rho_dl).powf(2.0 / alpha1) / (2.0 * PI / alpha1).sin() / alpha1)
}

/// Radial quadrature of `∫ (1 - 1/(1 + s ρ r^-α)) r dr`; independent route to
/// [`upsilon_hat`].
pub fn upsilon_hat_quadrature(
    s: f64,
    rho_dl: f64,
    alpha1: f64,
    policy: &QuadraturePolicy,
) -> Result<Estimate> {
    check_s(s)?;
    check_alpha(alpha1)?;
    if s == 0.0 || rho_dl == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let c = s * rho_dl;
    let scale = c.powf(1.0 / alpha1);
    let g = |r: f64| {
        let u = r.powf(alpha1) / c;
        1.0 / (1.0 + u)
    };
    let tail = |r: f64| c * r.powf(2.0 - alpha1) / (alpha1 - 2.0);
    radial_integral(
        g,
        &[scale],
        4.0 * scale,
        alpha1,
        tail,
        policy,
        "upsilon_hat quadrature",
    )
}

/// Angular average over the UL-node position and its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiValue {
    /// `Ξ(s, r)`.
    pub xi: f64,
    /// `1 - Ξ(s, r)`, computed directly so it keeps relative accuracy when small.
    pub one_minus: f64,
}

/// `Ξ(s, r) = (1/2π) ∫ dφ / (1 + s ρ_UL (R_UL² + r² + 2 R_UL r cos φ)^(-α/2))`.
///
/// The integrand is even about `φ = π`, so the rule runs on `[0, π]` with
/// Gauss–Legendre orders doubled from 16 until successive orders agree.
pub fn xi(
    s: f64,
    r: f64,
    rho_ul: f64,
    r_ul: f64,
    alpha: f64,
    policy: &QuadraturePolicy,
) -> Result<XiValue> {
    check_s(s)?;
    check_alpha(alpha)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "radius must be finite and >= 0, got {r}"
        )));
    }
    if s == 0.0 || rho_ul == 0.0 {
        return Ok(XiValue {
            xi: 1.0,
            one_minus: 0.0,
        });
    }
    let c = s * rho_ul;
    // t = d^α / (sρ); 1/(1+y) = t/(1+t) and y/(1+y) = 1/(1+t).
    let node = |d2: f64| -> (f64, f64) {
        let t = d2.powf(0.5 * alpha) / c;
        (t / (1.0 + t), 1.0 / (1.0 + t))
    };
    if r == 0.0 {
        let (x, om) = node(r_ul * r_ul);
        return Ok(XiValue {
            xi: x,
            one_minus: om,
        });
    }
    let diff2 = (r_ul - r) * (r_ul - r);
    let four_rr = 4.0 * r_ul * r;
    let eval = |level: usize| -> (f64, f64) {
        let rule = gauss_legendre(level);
        let (mut sx, mut so) = (0.0, 0.0);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            // φ = π/2 (1 + x); (1 + cos φ) = 2 cos²(φ/2)
            let half_phi = 0.25 * PI * (1.0 + x);
            let cos_h = half_phi.cos();
            let (a, b) = node(diff2 + four_rr * cos_h * cos_h);
            sx += w * a;
            so += w * b;
        }
        (0.5 * sx, 0.5 * so)
    };
    let inner_rel = (policy.rel_tol * 1e-2).max(1e-14);
    let mut prev = eval(GL_MIN_LEVEL);
    for level in GL_MIN_LEVEL + 1..=GL_MAX_LEVEL {
        let cur = eval(level);
        let d_om = (cur.1 - prev.1).abs();
        let d_xi = (cur.0 - prev.0).abs();
        if d_om <= inner_rel * cur.1 + 1e-300
            || (d_xi <= inner_rel * cur.0 && d_om <= policy.abs_tol)
        {
            return Ok(XiValue {
                xi: cur.0,
                one_minus: cur.1,
            });
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        component: format!("xi(s={s}, r={r})"),
        estimate: prev.0,
        error: f64::NAN,
    })
}

/// `Υ̃(s) = ∫ (1 - Ξ(s, r) / (1 + s ρ_DL r^-α1)) r dr` for one receiver type.
pub fn upsilon_tilde(s: f64, pair: &PairParams, policy: &QuadraturePolicy) -> Result<Estimate> {
    check_s(s)?;
    check_alpha(pair.alpha1)?;
    check_alpha(pair.alpha_ul)?;
    if !policy.is_valid() {
        return Err(Error::InvalidArgument("invalid quadrature policy".into()));
    }
    if s == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let c_dl = s * pair.rho_dl;
    let c_ul = s * pair.rho_ul;
    let mut inner_err: Option<Error> = None;
    let g = |r: f64| -> f64 {
        let om = match xi(s, r, pair.rho_ul, pair.r_ul, pair.alpha_ul, policy) {
            Ok(v) => v.one_minus,
            Err(e) => {
                inner_err.get_or_insert(e);
                0.0
            }
        };
        if c_dl == 0.0 {
            return om;
        }
        // 1 - Ξ u/(1+u) with u = r^α1 / (sρ_DL)
        let u = r.powf(pair.alpha1) / c_dl;
        (1.0 + om * u) / (1.0 + u)
    };
    let scale_dl = if c_dl > 0.0 {
        c_dl.powf(1.0 / pair.alpha1)
    } else {
        0.0
    };
    let scale_ul = if c_ul > 0.0 {
        c_ul.powf(1.0 / pair.alpha_ul)
    } else {
        0.0
    };
    let mut scales = vec![pair.r_ul];
    if scale_dl > 0.0 {
        scales.push(scale_dl);
    }
    if scale_ul > 0.0 && scale_ul < pair.r_ul {
        scales.push(pair.r_ul - scale_ul);
        scales.push(pair.r_ul + scale_ul);
    }
    let r_star = 4.0 * scale_dl.max(pair.r_ul + scale_ul);
    let tail = |r: f64| {
        c_dl * r.powf(2.0 - pair.alpha1) / (pair.alpha1 - 2.0)
            + c_ul * r.powf(2.0 - pair.alpha_ul) / (pair.alpha_ul - 2.0)
    };
    let out = radial_integral(
        g,
        &scales,
        r_star,
        pair.alpha1,
        tail,
        policy,
        "upsilon_tilde",
    );
    if let Some(e) = inner_err {
        return Err(e);
    }
    out
}

/// `∫_0^∞ g(r) r dr` split at `scales`, with `[r_star, ∞)` either mapped by
/// `r = r_star t^(-1/(α-2))` or replaced by `tail(R)` per the policy.
fn radial_integral<G: FnMut(f64) -> f64, T: Fn(f64) -> f64>(
    mut g: G,
    scales: &[f64],
    r_star: f64,
    alpha_slowest: f64,
    tail: T,
    policy: &QuadraturePolicy,
    component: &str,
) -> Result<Estimate> {
    let upper = match policy.radial_truncation {
        RadialTruncation::Adaptive => r_star,
        RadialTruncation::Fixed(r) => r,
    };
    let mut breaks = vec![0.0];
    let mut inner: Vec<f64> = scales
        .iter()
        .copied()
        .filter(|&x| x > 0.0 && x < upper)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    breaks.extend(inner);
    breaks.push(upper);

    let fail = |e: Estimate| Error::Quadrature {
        component: component.to_string(),
        estimate: e.value,
        error: e.error,
    };
    let head = integrate_adaptive(
        |r| g(r) * r,
        &breaks,
        policy.rel_tol,
        policy.abs_tol,
        policy.max_subdivisions,
    )
    .map_err(fail)?;
    let tail_est = match policy.radial_truncation {
        RadialTruncation::Fixed(r) => Estimate {
            value: tail(r),
            error: 0.0,
        },
        RadialTruncation::Adaptive => {
            let q = 1.0 / (alpha_slowest - 2.0);
            let mapped = |t: f64| {
                let r = r_star * t.powf(-q);
                g(r) * r * q * r_star * t.powf(-q - 1.0)
            };
            integrate_adaptive(
                mapped,
                &[0.0, 1.0],
                policy.rel_tol,
                policy.abs_tol,
                policy.max_subdivisions,
            )
            .map_err(fail)?
        }
    };
    Ok(Estimate {
        value: head.value + tail_est.value,
        error: head.error + tail_est.error,
    })
}

/// `exp(-2πλ [P_hit Υ̂(s) + (1 - P_hit) Υ̃(s)])` for the given receiver.
pub fn laplace_shot_noise(
    s: f64,
    lambda: f64,
    p_hit: f64,
    pair: &PairParams,
    policy: &QuadraturePolicy,
) -> Result<f64> {
    check_s(s)?;
    if !(0.0..=1.0).contains(&p_hit) {
        return Err(Error::InvalidArgument(format!(
            "p_hit must be in [0, 1], got {p_hit}"
        )));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let hat = upsilon_hat(s, pair.rho_dl, pair.alpha1)?;
    let tilde = if p_hit < 1.0 {
        upsilon_tilde(s, pair, policy)?.value
    } else {
        0.0
    };
    Ok((-2.0 * PI * lambda * (p_hit * hat + (1.0 - p_hit) * tilde)).exp())
}

/// Laplace transform of the interference at the typical DL node (no own-cell terms).
pub fn laplace_i_dx(s: f64, net: &NetworkParams, policy: &QuadraturePolicy) -> Result<f64> {
    laplace_shot_noise(s, net.lambda, net.p_hit, &net.pair(net.alpha2), policy)
}

/// Laplace transform of the interference at the typical SBS on a cache miss,
/// including residual self-interference.
pub fn laplace_i_x_miss(
    s: f64,
    net: &NetworkParams,
    variant: TransformVariant,
    policy: &QuadraturePolicy,
) -> Result<f64> {
    let alpha_ul = match variant {
        TransformVariant::ReceiverConsistent => net.alpha1,
        TransformVariant::SharedUplinkExponent => net.alpha2,
    };
    let field = laplace_shot_noise(s, net.lambda, net.p_hit, &net.pair(alpha_ul), policy)?;
    Ok(net.si.laplace(s * net.rho_dl) * field)
}

/// Laplace transform of the interference at the typical DL node on a cache
/// miss, including the own UL node.
pub fn laplace_i_dx_miss(s: f64, net: &NetworkParams, policy: &QuadraturePolicy) -> Result<f64> {
    let own = xi(s, net.r_dl, net.rho_ul, net.r_ul, net.alpha2, policy)?.xi;
    Ok(own * laplace_i_dx(s, net, policy)?)
}

/// Lower bound on the success probability and the three transforms it combines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessBound {
    pub p_suc_lower: f64,
    pub l_dx: f64,
    pub l_x_miss: f64,
    pub l_dx_miss: f64,
}

pub fn p_suc_lower_bound(
    net: &NetworkParams,
    variant: TransformVariant,
    policy: &QuadraturePolicy,
) -> Result<SuccessBound> {
    if !(net.theta > 0.0) {
        return Err(Error::InvalidArgument("theta must be > 0".into()));
    }
    let s_dl = net.s_dl();
    let s_ul = net.s_ul();
    let l_dx = laplace_i_dx(s_dl, net, policy)?;
    let l_x_miss = laplace_i_x_miss(s_ul, net, variant, policy)?;
    let own = xi(s_dl, net.r_dl, net.rho_ul, net.r_ul, net.alpha2, policy)?.xi;
    let l_dx_miss = own * l_dx;
    let p = net.p_hit * l_dx + (1.0 - net.p_hit) * l_x_miss * l_dx_miss;
    Ok(SuccessBound {
        p_suc_lower: p.clamp(0.0, 1.0),
        l_dx,
        l_x_miss,
        l_dx_miss,
    })
}

/// Area spectral efficiency `λ P_suc log2(1 + θ)` [bps/Hz/m²].
pub fn ase(theta: f64, lambda: f64, p_suc: f64) -> f64 {
    lambda * p_suc * (1.0 + theta).log2()
}

pub fn outage(p_suc: f64) -> f64 {
    1.0 - p_suc
}

/// Throughput gain of the cache-aided FD network over the cache-free HD one.
pub fn fd_throughput_gain(
    theta: f64,
    lambda: f64,
    p_suc: f64,
    r_ul: f64,
    r_dl: f64,
    alpha1: f64,
) -> f64 {
    let hd = PI * theta.powf(2.0 / alpha1) * (r_ul * r_ul + r_dl * r_dl)
        / (2.0 * PI / alpha1).sin()
        / alpha1;
    2.0 * p_suc * (2.0 * PI * lambda * hd).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticReport {
    pub p_hit: f64,
    pub p_suc_lower: f64,
    pub outage: f64,
    /// [bps/Hz/m²]
    pub ase: f64,
    pub tg_fd: f64,
    pub l_dx: f64,
    pub l_x_miss: f64,
    pub l_dx_miss: f64,
}

impl AnalyticReport {
    pub const CSV_FIELDS: [&'static str; 8] = [
        "p_hit",
        "p_suc_lower",
        "outage",
        "ase",
        "tg_fd",
        "l_dx",
        "l_x_miss",
        "l_dx_miss",
    ];

    pub fn csv_values(&self) -> [f64; 8] {
        [
            self.p_hit,
            self.p_suc_lower,
            self.outage,
            self.ase,
            self.tg_fd,
            self.l_dx,
            self.l_x_miss,
            self.l_dx_miss,
        ]
    }
}

/// Full pipeline: cache-hit probability, bound, outage, ASE and TG.
pub fn analytic_report(
    c: &ScenarioConfig,
    variant: TransformVariant,
    policy: &QuadraturePolicy,
) -> Result<AnalyticReport> {
    let p_hit = p_hit_for_config(c)?;
    let net = NetworkParams::from_config(c, p_hit)?;
    let b = p_suc_lower_bound(&net, variant, policy)?;
    Ok(AnalyticReport {
        p_hit,
        p_suc_lower: b.p_suc_lower,
        outage: outage(b.p_suc_lower),
        ase: ase(net.theta, net.lambda, b.p_suc_lower),
        tg_fd: fd_throughput_gain(
            net.theta,
            net.lambda,
            b.p_suc_lower,
            net.r_ul,
            net.r_dl,
            net.alpha1,
        ),
        l_dx: b.l_dx,
        l_x_miss: b.l_x_miss,
        l_dx_miss: b.l_dx_miss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_net(p_hit: f64) -> NetworkParams {
        NetworkParams::from_config(&ScenarioConfig::reference(), p_hit).unwrap()
    }

    #[test]
    fn upsilon_hat_values() {
        assert_eq!(upsilon_hat(0.0, 0.25, 3.0).unwrap(), 0.0);
        let v = upsilon_hat(1.0, 1.0, 4.0).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-15);
        assert!(upsilon_hat(1.0, 1.0, 2.0).is_err());
        let base = upsilon_hat(3.0, 0.7, 3.3).unwrap();
        for c in [0.1, 2.0, 17.0] {
            let scaled = upsilon_hat(3.0 * c, 0.7, 3.3).unwrap();
            assert!((scaled - c.powf(2.0 / 3.3) * base).abs() < 1e-12 * scaled);
        }
    }

    #[test]
    fn upsilon_hat_matches_quadrature_at_pi_over_4() {
        let q = upsilon_hat_quadrature(1.0, 1.0, 4.0, &QuadraturePolicy::default()).unwrap();
        assert!((q.value - std::f64::consts::FRAC_PI_4).abs() < 1e-8);
    }

    #[test]
    fn xi_trivial_cases() {
        let p = QuadraturePolicy::default();
        assert_eq!(xi(0.0, 7.0, 1.0, 20.0, 4.0, &p).unwrap().xi, 1.0);
        assert_eq!(xi(5.0, 7.0, 0.0, 20.0, 4.0, &p).unwrap().xi, 1.0);
        let at0 = xi(500.0, 0.0, 1.0, 20.0, 4.0, &p).unwrap();
        let exact = 1.0 / (1.0 + 500.0 * 20f64.powf(-4.0));
        assert!((at0.xi - exact).abs() < 1e-15);
    }

    #[test]
    fn xi_small_r_continuity() {
        // r -> 0 approaches the angle-free value; checks the quadrature path
        let p = QuadraturePolicy::default();
        let exact = 1.0 / (1.0 + 500.0 * 20f64.powf(-4.0));
        let near = xi(500.0, 1e-7, 1.0, 20.0, 4.0, &p).unwrap();
        assert!((near.xi - exact).abs() < 1e-10);
        assert!((near.xi + near.one_minus - 1.0).abs() < 1e-14);
    }

    #[test]
    fn xi_at_coincident_radius_is_finite() {
        let p = QuadraturePolicy::default();
        for s in [1.0, 1e3, 1e6] {
            let v = xi(s, 20.0, 1.0, 20.0, 4.0, &p).unwrap();
            assert!(v.xi > 0.0 && v.xi <= 1.0);
        }
    }

    #[test]
    fn upsilon_tilde_reductions() {
        let p = QuadraturePolicy::default();
        let net = reference_net(0.3);
        assert_eq!(upsilon_tilde(0.0, &net.pair(4.0), &p).unwrap().value, 0.0);
        let mut no_ul = net.pair(4.0);
        no_ul.rho_ul = 0.0;
        for s in [1.0, 497.6, 8000.0] {
            let t = upsilon_tilde(s, &no_ul, &p).unwrap().value;
            let h = upsilon_hat(s, net.rho_dl, 3.0).unwrap();
            assert!(((t - h) / h).abs() < 1e-8, "s={s}: {t} vs {h}");
            let full = upsilon_tilde(s, &net.pair(4.0), &p).unwrap().value;
            assert!(full >= h);
        }
    }

    #[test]
    fn fixed_truncation_agrees_with_mapped_tail() {
        let net = reference_net(0.0);
        let adaptive = upsilon_tilde(497.6, &net.pair(4.0), &QuadraturePolicy::default())
            .unwrap()
            .value;
        let fixed_policy = QuadraturePolicy {
            radial_truncation: RadialTruncation::Fixed(5000.0),
            ..QuadraturePolicy::default()
        };
        let fixed = upsilon_tilde(497.6, &net.pair(4.0), &fixed_policy)
            .unwrap()
            .value;
        assert!(((adaptive - fixed) / adaptive).abs() < 1e-6);
    }

    #[test]
    fn halving_tolerance_stays_within_error_estimate() {
        let net = reference_net(0.0);
        let loose = QuadraturePolicy {
            rel_tol: 1e-6,
            ..QuadraturePolicy::default()
        };
        let tight = QuadraturePolicy {
            rel_tol: 5e-7,
            ..QuadraturePolicy::default()
        };
        for (s, a) in [(497.6, 4.0), (8000.0, 3.0)] {
            let l = upsilon_tilde(s, &net.pair(a), &loose).unwrap();
            let t = upsilon_tilde(s, &net.pair(a), &tight).unwrap();
            assert!(
                (l.value - t.value).abs() <= l.error,
                "s={s}: {} vs {} (err {})",
                l.value,
                t.value,
                l.error
            );
        }
    }

    #[test]
    fn transforms_at_zero_and_reductions() {
        let p = QuadraturePolicy::default();
        let net = reference_net(0.5);
        assert_eq!(laplace_i_dx(0.0, &net, &p).unwrap(), 1.0);
        assert_eq!(
            laplace_i_x_miss(0.0, &net, TransformVariant::ReceiverConsistent, &p).unwrap(),
            1.0
        );
        assert_eq!(laplace_i_dx_miss(0.0, &net, &p).unwrap(), 1.0);

        let all_hit = reference_net(1.0);
        let s = all_hit.s_dl();
        let expect =
            (-2.0 * PI * all_hit.lambda * upsilon_hat(s, all_hit.rho_dl, 3.0).unwrap()).exp();
        assert!((laplace_i_dx(s, &all_hit, &p).unwrap() - expect).abs() < 1e-14);

        let mut dense = net;
        dense.lambda *= 2.0;
        let single = laplace_i_dx(s, &net, &p).unwrap();
        assert!((laplace_i_dx(s, &dense, &p).unwrap() - single * single).abs() < 1e-10);
    }

    #[test]
    fn si_factor_vanishes_with_infinite_attenuation() {
        let p = QuadraturePolicy::default();
        let mut net = reference_net(0.2);
        net.si = si_gamma_params(1.0, 1e300).unwrap();
        for v in [
            TransformVariant::ReceiverConsistent,
            TransformVariant::SharedUplinkExponent,
        ] {
            let alpha_ul = if v == TransformVariant::SharedUplinkExponent {
                net.alpha2
            } else {
                net.alpha1
            };
            let s = net.s_ul();
            let field =
                laplace_shot_noise(s, net.lambda, net.p_hit, &net.pair(alpha_ul), &p).unwrap();
            assert!((laplace_i_x_miss(s, &net, v, &p).unwrap() - field).abs() < 1e-15);
        }
        // shared-exponent variant reduces to the DL-side transform
        let s = net.s_ul();
        let shared = laplace_i_x_miss(s, &net, TransformVariant::SharedUplinkExponent, &p).unwrap();
        assert!((shared - laplace_i_dx(s, &net, &p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn dl_miss_bounded_and_reduces_without_ul_power() {
        let p = QuadraturePolicy::default();
        let net = reference_net(0.4);
        let s = net.s_dl();
        assert!(laplace_i_dx_miss(s, &net, &p).unwrap() <= laplace_i_dx(s, &net, &p).unwrap());
        let mut quiet = net;
        quiet.rho_ul = 0.0;
        assert_eq!(
            laplace_i_dx_miss(s, &quiet, &p).unwrap(),
            laplace_i_dx(s, &quiet, &p).unwrap()
        );
    }

    #[test]
    fn bound_reductions() {
        let p = QuadraturePolicy::default();
        let net = reference_net(1.0);
        let b = p_suc_lower_bound(&net, TransformVariant::ReceiverConsistent, &p).unwrap();
        assert!((b.p_suc_lower - laplace_i_dx(net.s_dl(), &net, &p).unwrap()).abs() < 1e-15);

        let mut tiny = reference_net(0.3);
        tiny.theta = 1e-9;
        let b = p_suc_lower_bound(&tiny, TransformVariant::ReceiverConsistent, &p).unwrap();
        assert!(b.p_suc_lower > 0.9999);
    }

    #[test]
    fn metric_definitions() {
        assert!((ase(1.0, 5e-4, 0.5) - 2.5e-4).abs() < 1e-18);
        assert_eq!(outage(1.0), 0.0);
        assert!((ase(1.0, 1e-3, 0.5) - 2.0 * ase(1.0, 5e-4, 0.5)).abs() < 1e-18);
        assert!((fd_throughput_gain(1.0, 0.0, 1.0, 20.0, 5.0, 3.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn report_invariants() {
        let r = analytic_report(
            &ScenarioConfig::reference(),
            TransformVariant::default(),
            &QuadraturePolicy::default(),
        )
        .unwrap();
        assert!((0.0..=1.0).contains(&r.p_suc_lower));
        assert_eq!(r.outage, 1.0 - r.p_suc_lower);
        let ase_expect = 5e-4 * r.p_suc_lower * 2f64.log2();
        assert!((r.ase - ase_expect).abs() <= 1e-12 * ase_expect);
    }

    #[test]
    fn cache_free_reduces_to_product() {
        let c = ScenarioConfig::reference().with_kappa(0.0);
        let r = analytic_report(
            &c,
            TransformVariant::default(),
            &QuadraturePolicy::default(),
        )
        .unwrap();
        assert_eq!(r.p_hit, 0.0);
        assert!((r.p_suc_lower - r.l_x_miss * r.l_dx_miss).abs() < 1e-15);
    }
}
