//! dB/dBm conversions. Everything past the configuration boundary is linear.

use crate::error::{Error, Result};

/// A non-negative power in watts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinearPower(f64);

impl LinearPower {
    pub fn new(watts: f64) -> Result<Self> {
        if !watts.is_finite() {
            return Err(Error::NonFinite("power"));
        }
        if watts < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "power must be non-negative, got {watts}"
            )));
        }
        Ok(Self(watts))
    }

    pub fn watts(self) -> f64 {
        self.0
    }
}

pub fn dbm_to_watts(dbm: f64) -> Result<LinearPower> {
    if !dbm.is_finite() {
        return Err(Error::NonFinite("dBm"));
    }
    Ok(LinearPower(10f64.powf((dbm - 30.0) / 10.0)))
}

pub fn db_to_linear(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(Error::NonFinite("dB"));
    }
    Ok(10f64.powf(db / 10.0))
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dbm_reference_points() {
        assert_eq!(dbm_to_watts(30.0).unwrap().watts(), 1.0);
        assert!((dbm_to_watts(0.0).unwrap().watts() - 1e-3).abs() < 1e-18);
        // 10^-0.6
        let w = dbm_to_watts(24.0).unwrap().watts();
        assert!((w - 0.251_188_643_150_958).abs() < 1e-12);
        assert_eq!(format!("{:.4}", w), "0.2512");
    }

    #[test]
    fn db_reference_points() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert!((db_to_linear(60.0).unwrap() - 1e6).abs() < 1e-6);
        assert!((db_to_linear(3.0).unwrap() - 1.995_262_314_968_88).abs() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(dbm_to_watts(f64::NAN), Err(Error::NonFinite("dBm")));
        assert!(dbm_to_watts(f64::INFINITY).is_err());
        assert!(db_to_linear(f64::NEG_INFINITY).is_err());
        assert!(LinearPower::new(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn dbm_round_trip(x in -150.0f64..150.0) {
            let w = dbm_to_watts(x).unwrap().watts();
            let back = 10.0 * (w * 1000.0).log10();
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
            let lin = db_to_linear(x - 30.0 + 30.0).unwrap();
            prop_assert!((w * 1000.0 - lin).abs() <= 1e-12 * lin);
        }
    }
}
