//! Optimal channel identification: quantum Fisher information for the
//! depolarization parameter, the Cramer-Rao variance floor, and sampling of
//! the imperfect estimate handed to the decoder.
//!
//! Two probe settings are covered by closed forms: a pure unentangled qubit
//! probe with `J(f) = 1/(f(2-f))`, and a maximally entangled pair with one
//! half sent through the channel, `J(f) = 1/(f(4/3-f))`. An unbiased
//! estimator from `n` independent measurements then has variance at best
//! `1/(n·J)`, and the receiver-side estimate is drawn from a normal with
//! that variance, truncated to [0, 1] by rejection.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EstimationError {
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

/// What channel knowledge the decoder receives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeMode {
    /// Decoder gets the true flip probability.
    Perfect,
    /// Decoder gets a configured default prior, ignoring the channel.
    NoInformation,
    /// Estimate from an unentangled pure-state probe.
    Unentangled,
    /// Estimate from a maximally entangled probe pair.
    Entangled,
    /// Decoder gets this fixed flip probability.
    Fixed(f64),
}

impl fmt::Display for ProbeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeMode::Perfect => write!(f, "perfect"),
            ProbeMode::NoInformation => write!(f, "no-information"),
            ProbeMode::Unentangled => write!(f, "unentangled"),
            ProbeMode::Entangled => write!(f, "entangled"),
            ProbeMode::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

impl FromStr for ProbeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "perfect" => Ok(ProbeMode::Perfect),
            "no-information" => Ok(ProbeMode::NoInformation),
            "unentangled" => Ok(ProbeMode::Unentangled),
            "entangled" => Ok(ProbeMode::Entangled),
            other => {
                if let Some(v) = other.strip_prefix("fixed:") {
                    let value: f64 = v
                        .parse()
                        .map_err(|_| format!("invalid fixed prior {v:?}"))?;
                    if !(0.0..=1.0).contains(&value) {
                        return Err(format!("fixed prior {value} outside [0, 1]"));
                    }
                    Ok(ProbeMode::Fixed(value))
                } else {
                    Err(format!(
                        "unknown mode {other:?} (expected perfect, no-information, \
                         unentangled, entangled or fixed:<value>)"
                    ))
                }
            }
        }
    }
}

/// Which argument the Fisher information is evaluated at when converting an
/// operating point into an estimator variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FisherArg {
    /// Evaluate J at the depolarization parameter f.
    F,
    /// Evaluate J at the flip probability f' = 3f/4.
    #[default]
    FPrime,
}

impl fmt::Display for FisherArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FisherArg::F => write!(f, "f"),
            FisherArg::FPrime => write!(f, "f-prime"),
        }
    }
}

/// Estimator settings shared by every decode trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub mode: ProbeMode,
    /// Number of independent probe measurements; scales the variance.
    pub n_m: u64,
    /// Block length used in the variance; `None` means the code's N.
    pub fisher_scale_n: Option<usize>,
    /// Flip probability handed to the decoder in `NoInformation` mode.
    pub default_prior: f64,
    pub fisher_arg: FisherArg,
}

impl EstimatorConfig {
    pub fn new(mode: ProbeMode) -> Self {
        EstimatorConfig {
            mode,
            n_m: 1,
            fisher_scale_n: None,
            default_prior: 0.375,
            fisher_arg: FisherArg::default(),
        }
    }

    pub fn validate(&self) -> Result<(), EstimationError> {
        if self.n_m < 1 {
            return Err(EstimationError::OutOfRange {
                name: "n_m",
                value: self.n_m as f64,
                range: "[1, ..)",
            });
        }
        if !(self.default_prior > 0.0 && self.default_prior <= 0.75) {
            return Err(EstimationError::OutOfRange {
                name: "default_prior",
                value: self.default_prior,
                range: "(0, 0.75]",
            });
        }
        if let ProbeMode::Fixed(v) = self.mode {
            if !(0.0..=1.0).contains(&v) {
                return Err(EstimationError::OutOfRange {
                    name: "fixed prior",
                    value: v,
                    range: "[0, 1]",
                });
            }
        }
        Ok(())
    }
}

fn check_open_unit(name: &'static str, v: f64) -> Result<(), EstimationError> {
    if !(v > 0.0 && v < 1.0) {
        return Err(EstimationError::OutOfRange {
            name,
            value: v,
            range: "(0, 1)",
        });
    }
    Ok(())
}

/// Fisher information `1/(f(2-f))` for an unentangled pure probe.
///
/// The endpoints are singular (the limit at f = 1 is 1, at f -> 0 it
/// diverges) and are rejected as inputs.
pub fn fisher_unentangled(f: f64) -> Result<f64, EstimationError> {
    check_open_unit("f", f)?;
    Ok(1.0 / (f * (2.0 - f)))
}

/// Fisher information `1/(f(4/3-f))` for a maximally entangled probe pair.
///
/// Strictly larger than the unentangled value everywhere in (0, 1).
pub fn fisher_entangled(f: f64) -> Result<f64, EstimationError> {
    check_open_unit("f", f)?;
    Ok(1.0 / (f * (4.0 / 3.0 - f)))
}

/// Cramer-Rao variance floor `1/(n_m·J)` for an unbiased estimator from
/// `n_m` independent measurements.
pub fn crb_variance(j: f64, n_m: u64) -> Result<f64, EstimationError> {
    if j <= 0.0 {
        return Err(EstimationError::OutOfRange {
            name: "J",
            value: j,
            range: "(0, ..)",
        });
    }
    if n_m < 1 {
        return Err(EstimationError::OutOfRange {
            name: "n_m",
            value: n_m as f64,
            range: "[1, ..)",
        });
    }
    Ok(1.0 / (n_m as f64 * j))
}

/// One draw from `Normal(mean, variance)` truncated to [0, 1] by rejection.
///
/// Truncation is by resampling, not clipping, so no point mass accumulates
/// at the interval ends. A zero variance degenerates to the mean.
pub fn sample_estimate<R: Rng + ?Sized>(
    mean: f64,
    variance: f64,
    rng: &mut R,
) -> Result<f64, EstimationError> {
    check_unit_closed("mean", mean)?;
    if variance < 0.0 {
        return Err(EstimationError::OutOfRange {
            name: "variance",
            value: variance,
            range: "[0, ..)",
        });
    }
    Ok(sample_truncated_counted(mean, variance, rng).0)
}

fn sample_truncated_counted<R: Rng + ?Sized>(
    mean: f64,
    variance: f64,
    rng: &mut R,
) -> (f64, u64) {
    if variance == 0.0 {
        return (mean, 0);
    }
    let normal = Normal::new(mean, variance.sqrt()).expect("finite parameters");
    let mut rejections = 0;
    loop {
        let x = normal.sample(rng);
        if (0.0..=1.0).contains(&x) {
            return (x, rejections);
        }
        rejections += 1;
    }
}

fn check_unit_closed(name: &'static str, v: f64) -> Result<(), EstimationError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(EstimationError::OutOfRange {
            name,
            value: v,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Sanity guard: the truncated normal is close to untruncated when three
/// standard deviations fit inside the interval on both sides of the mean.
pub fn estimate_well_conditioned(mean: f64, variance: f64) -> bool {
    3.0 * variance.sqrt() < mean.min(1.0 - mean)
}

/// Variance of the estimate for the given probe mode at operating point
/// `f_true`, or `None` for the deterministic modes.
pub fn estimate_variance(
    cfg: &EstimatorConfig,
    f_true: f64,
    n_block: usize,
) -> Result<Option<f64>, EstimationError> {
    let fisher = match cfg.mode {
        ProbeMode::Unentangled => fisher_unentangled,
        ProbeMode::Entangled => fisher_entangled,
        _ => return Ok(None),
    };
    check_open_unit("f", f_true)?;
    let f_prime = 0.75 * f_true;
    let arg = match cfg.fisher_arg {
        FisherArg::F => f_true,
        FisherArg::FPrime => f_prime,
    };
    let j = fisher(arg)?;
    let scale = cfg.fisher_scale_n.unwrap_or(n_block).max(1) as u64;
    Ok(Some(crb_variance(j, cfg.n_m * scale)?))
}

/// Flip probability handed to the decoder for one transmitted block.
///
/// `Perfect` returns the exact `3f/4`; `NoInformation` and `Fixed` are
/// deterministic configured values; the probing modes draw from the
/// truncated normal centered on `3f/4` with the Cramer-Rao variance.
pub fn decoder_prior<R: Rng + ?Sized>(
    cfg: &EstimatorConfig,
    f_true: f64,
    n_block: usize,
    rng: &mut R,
) -> Result<f64, EstimationError> {
    match cfg.mode {
        ProbeMode::Perfect => {
            check_open_unit("f", f_true)?;
            Ok(0.75 * f_true)
        }
        ProbeMode::NoInformation => Ok(cfg.default_prior),
        ProbeMode::Fixed(v) => Ok(v),
        ProbeMode::Unentangled | ProbeMode::Entangled => {
            let variance = estimate_variance(cfg, f_true, n_block)?.expect("probing mode");
            sample_estimate(0.75 * f_true, variance, rng)
        }
    }
}
