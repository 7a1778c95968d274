//! Direct readout estimation: the density is the observed 1-frequency.
//!
//! With `s` ones in `N` shots the estimate is `s/N` and its binomial
//! standard error is `√(n̂(1-n̂)/N)`. Under a known symmetric readout flip
//! rate `ε` the observed frequency targets `n(1-2ε) + ε`, so an optional
//! unbiasing step inverts that map; it widens the standard error by
//! `1/(1-2ε)` and the result is clamped back into `[0, 1]`.

use crate::error::{Error, Result};
use crate::estimators::{DensityEstimate, Method};
use crate::measurement::{NoiseModel, ShotRecord};

/// Estimate the density from direct readout counts.
///
/// Pass `unbias = Some(noise)` to invert a known readout flip channel;
/// `None` reports the raw frequency (the default protocol, which accepts
/// the flip-induced bias as part of the experiment).
pub fn estimate_direct_z(
    record: &ShotRecord,
    unbias: Option<&NoiseModel>,
) -> Result<DensityEstimate> {
    if record.shots == 0 {
        return Err(Error::ZeroShots);
    }
    if record.successes > record.shots {
        return Err(Error::InvalidParameter(format!(
            "{} successes exceed {} shots",
            record.successes, record.shots
        )));
    }
    let raw = record.frequency();
    let raw_se = (raw * (1.0 - raw) / record.shots as f64).sqrt();
    let (value, se) = match unbias {
        Some(noise) => (noise.invert(raw), raw_se / noise.contrast()),
        None => (raw, raw_se),
    };
    Ok(DensityEstimate::new(
        value,
        se,
        record.shots,
        Method::DirectZ,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn record(successes: u64, shots: u64) -> ShotRecord {
        ShotRecord {
            shots,
            successes,
            seed: 0,
        }
    }

    #[test]
    fn frequency_is_the_estimate() {
        let est = estimate_direct_z(&record(450, 1000), None).unwrap();
        assert_abs_diff_eq!(est.value, 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(
            est.std_error,
            (0.45f64 * 0.55 / 1000.0).sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(est.shots_used, 1000);
        assert_eq!(est.method, Method::DirectZ);
        assert!(!est.flagged);
    }

    #[test]
    fn unbiasing_inverts_the_flip_channel() {
        // Observed 0.99 under ε = 0.01 corresponds exactly to density 1.
        let noise = NoiseModel::new(0.01).unwrap();
        let est = estimate_direct_z(&record(99, 100), Some(&noise)).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-12);
        assert!(est.flagged);
    }

    #[test]
    fn unbiasing_clamps_out_of_range_values() {
        // Observed frequency above 1 - ε maps outside [0, 1] and clamps.
        let noise = NoiseModel::new(0.01).unwrap();
        let est = estimate_direct_z(&record(100, 100), Some(&noise)).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-15);

        let est = estimate_direct_z(&record(0, 100), Some(&noise)).unwrap();
        assert_abs_diff_eq!(est.value, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unbiasing_widens_the_standard_error() {
        let noise = NoiseModel::new(0.1).unwrap();
        let raw = estimate_direct_z(&record(500, 1000), None).unwrap();
        let fixed = estimate_direct_z(&record(500, 1000), Some(&noise)).unwrap();
        assert_abs_diff_eq!(fixed.std_error, raw.std_error / 0.8, epsilon = 1e-15);
    }

    #[test]
    fn boundary_estimates_are_flagged() {
        assert!(estimate_direct_z(&record(999, 1000), None).unwrap().flagged);
        assert!(estimate_direct_z(&record(1, 1000), None).unwrap().flagged);
        assert!(!estimate_direct_z(&record(500, 1000), None).unwrap().flagged);
    }

    #[test]
    fn invalid_records_are_rejected() {
        assert!(matches!(
            estimate_direct_z(&record(0, 0), None),
            Err(Error::ZeroShots)
        ));
        assert!(estimate_direct_z(&record(11, 10), None).is_err());
    }
}
