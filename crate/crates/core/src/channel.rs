//! Pathloss, Rayleigh power fading and the Gamma residual self-interference gain.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{Error, Result};

/// Transmitter/receiver pairs that occur in the interference sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkKind {
    UlToSbs,
    SbsToDl,
    SbsToSbs,
    UlToDl,
}

impl LinkKind {
    pub const ALL: [LinkKind; 4] = [
        LinkKind::UlToSbs,
        LinkKind::SbsToDl,
        LinkKind::SbsToSbs,
        LinkKind::UlToDl,
    ];
}

/// UL-node to DL-node links use the steeper `alpha2`; everything else `alpha1`.
pub fn link_exponent(kind: LinkKind, alpha1: f64, alpha2: f64) -> f64 {
    match kind {
        LinkKind::UlToDl => alpha2,
        LinkKind::UlToSbs | LinkKind::SbsToDl | LinkKind::SbsToSbs => alpha1,
    }
}

pub fn pathloss(r: f64, alpha: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pathloss distance must be > 0, got {r}"
        )));
    }
    Ok(r.powf(-alpha))
}

/// `d2^(-alpha/2)`, i.e. the pathloss for a squared distance. Hot path of the
/// simulator; the common integer and half-integer exponents avoid `powf`.
#[inline]
pub(crate) fn pathloss_sq(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else if alpha == 3.0 {
        1.0 / (d2 * d2.sqrt())
    } else if alpha == 2.0 {
        1.0 / d2
    } else {
        d2.powf(-0.5 * alpha)
    }
}

pub fn sample_rayleigh_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Shape/scale of the Gamma-distributed residual SI power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiGammaParams {
    pub shape_a: f64,
    pub scale_b: f64,
}

impl SiGammaParams {
    pub fn mean(&self) -> f64 {
        self.shape_a * self.scale_b
    }

    pub fn variance(&self) -> f64 {
        self.shape_a * self.scale_b * self.scale_b
    }

    /// `E[exp(-t X)] = (1 + t b)^-a`.
    pub fn laplace(&self, t: f64) -> f64 {
        (1.0 + t * self.scale_b).powf(-self.shape_a)
    }
}

/// Moment-matches a Gamma law to the squared envelope of a Rician channel with
/// factor `k` whose mean power is `1 / omega_linear`.
///
/// A squared Rician envelope with mean `m` has variance `m^2 (2K+1)/(K+1)^2`,
/// so `a = (K+1)^2 / (2K+1)` and `b = m / a`.
pub fn si_gamma_params(k: f64, omega_linear: f64) -> Result<SiGammaParams> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Rician K must be >= 0, got {k}"
        )));
    }
    if !(omega_linear >= 1.0) || !omega_linear.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "SI attenuation must be >= 1 (0 dB), got {omega_linear}"
        )));
    }
    let shape_a = (k + 1.0).powi(2) / (2.0 * k + 1.0);
    let scale_b = 1.0 / (shape_a * omega_linear);
    Ok(SiGammaParams { shape_a, scale_b })
}

pub fn sample_si_power<R: Rng + ?Sized>(p: &SiGammaParams, rng: &mut R) -> f64 {
    Gamma::new(p.shape_a, p.scale_b)
        .expect("validated SI parameters")
        .sample(rng)
}
