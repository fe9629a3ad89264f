//! Actualization mechanisms: ideal measurements and spontaneous localization.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::fiq::{Fiq, FiqError};
use crate::propensity::Propensity;
use crate::sampling::Sampler;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MechanismError {
    #[error(
        "unknown mechanism `{0}` (expected none, measure:m=<int> or spont:lambda=<a/b>,w=<int>)"
    )]
    Unknown(String),
    #[error("mechanism field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
}

fn field_err(field: &'static str, reason: impl Into<String>) -> MechanismError {
    MechanismError::Field {
        field,
        reason: reason.into(),
    }
}

/// How potentialities get resolved while a system evolves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActualizationMechanism {
    None,
    /// Ideal measurement of digits `1..=precision` after every step.
    MeasurementInduced {
        precision: usize,
    },
    /// Each indeterminate digit with index `<= window` localizes with
    /// propensity `rate` per step.
    Spontaneous {
        rate: Propensity,
        window: usize,
    },
}

impl ActualizationMechanism {
    pub fn measurement(precision: usize) -> Result<Self, MechanismError> {
        if precision == 0 {
            return Err(field_err("m", "precision must be at least 1"));
        }
        Ok(ActualizationMechanism::MeasurementInduced { precision })
    }

    pub fn spontaneous(rate: Propensity, window: usize) -> Result<Self, MechanismError> {
        if window == 0 {
            return Err(field_err("w", "window must be at least 1"));
        }
        Ok(ActualizationMechanism::Spontaneous { rate, window })
    }

    pub fn tag(&self) -> MechanismTag {
        match self {
            ActualizationMechanism::None => MechanismTag::None,
            ActualizationMechanism::MeasurementInduced { .. } => MechanismTag::Measurement,
            ActualizationMechanism::Spontaneous { .. } => MechanismTag::Spontaneous,
        }
    }

    /// Runs this mechanism once on `x` at dynamics step `step`.
    pub fn apply(
        &self,
        x: &Fiq,
        step: u64,
        sampler: &mut Sampler,
        max_digits: usize,
    ) -> Result<(Fiq, Vec<ActualizationEvent>), FiqError> {
        match self {
            ActualizationMechanism::None => Ok((x.clone(), Vec::new())),
            ActualizationMechanism::MeasurementInduced { precision } => {
                let mut state = x.clone();
                let mut events = Vec::new();
                for j in 1..=*precision {
                    let was_open = !state.digit(j).is_determined();
                    let (next, bit) = state.actualize_digit(j, sampler, max_digits)?;
                    if was_open {
                        events.push(ActualizationEvent {
                            step,
                            digit_index: j,
                            bit,
                            mechanism: MechanismTag::Measurement,
                        });
                    }
                    state = next;
                }
                Ok((state, events))
            }
            ActualizationMechanism::Spontaneous { rate, window } => {
                spontaneous_hook(x, rate, *window, step, sampler, max_digits)
            }
        }
    }
}

impl fmt::Display for ActualizationMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActualizationMechanism::None => f.write_str("none"),
            ActualizationMechanism::MeasurementInduced { precision } => {
                write!(f, "measure:m={precision}")
            }
            ActualizationMechanism::Spontaneous { rate, window } => {
                write!(f, "spont:lambda={rate},w={window}")
            }
        }
    }
}

impl FromStr for ActualizationMechanism {
    type Err = MechanismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "none" {
            return Ok(ActualizationMechanism::None);
        }
        let (kind, params) = s
            .split_once(':')
            .ok_or_else(|| MechanismError::Unknown(s.to_string()))?;
        let mut fields = std::collections::BTreeMap::new();
        for part in params.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| MechanismError::Unknown(s.to_string()))?;
            fields.insert(k.trim(), v.trim());
        }
        let count = |field: &'static str| -> Result<usize, MechanismError> {
            let v = fields
                .get(field)
                .ok_or_else(|| field_err(field, "missing"))?;
            v.parse::<usize>()
                .map_err(|_| field_err(field, format!("`{v}` is not a count")))
        };
        match kind {
            "measure" => {
                if let Some(k) = fields.keys().find(|k| **k != "m") {
                    return Err(MechanismError::Unknown(format!("{s} (field `{k}`)")));
                }
                Self::measurement(count("m")?)
            }
            "spont" => {
                if let Some(k) = fields.keys().find(|k| **k != "lambda" && **k != "w") {
                    return Err(MechanismError::Unknown(format!("{s} (field `{k}`)")));
                }
                let lam = fields
                    .get("lambda")
                    .ok_or_else(|| field_err("lambda", "missing"))?;
                let rate: Propensity = lam
                    .parse()
                    .map_err(|e| field_err("lambda", format!("`{lam}`: {e}")))?;
                Self::spontaneous(rate, count("w")?)
            }
            _ => Err(MechanismError::Unknown(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismTag {
    None,
    Measurement,
    Spontaneous,
}

impl fmt::Display for MechanismTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MechanismTag::None => "none",
            MechanismTag::Measurement => "measure",
            MechanismTag::Spontaneous => "spont",
        })
    }
}

/// One digit turning from a potentiality into a bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActualizationEvent {
    pub step: u64,
    pub digit_index: usize,
    pub bit: u8,
    pub mechanism: MechanismTag,
}

impl fmt::Display for ActualizationEvent {
    /// `digit:bit:mechanism`; the step is carried by the enclosing record.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.digit_index, self.bit, self.mechanism)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub bits: String,
    pub collapsed_state: Fiq,
    pub consumed_randomness: u64,
}

/// Ideal measurement at `precision` significant digits.
///
/// Digits `1..=precision` are actualized in ascending order; determined
/// digits pass through without a draw and later digits are untouched.
pub fn measure(
    x: &Fiq,
    precision: usize,
    sampler: &mut Sampler,
    max_digits: usize,
) -> Result<MeasurementOutcome, FiqError> {
    assert!(precision >= 1, "measurement precision must be at least 1");
    let start = sampler.draws();
    let mut state = x.clone();
    let mut bits = String::with_capacity(precision);
    for j in 1..=precision {
        let (next, bit) = state.actualize_digit(j, sampler, max_digits)?;
        bits.push(if bit == 1 { '1' } else { '0' });
        state = next;
    }
    Ok(MeasurementOutcome {
        bits,
        collapsed_state: state,
        consumed_randomness: sampler.draws() - start,
    })
}

/// One invocation of spontaneous localization.
///
/// Every indeterminate digit with index `<= window` (tail digits included)
/// first draws against `rate`; on success it is actualized.
pub fn spontaneous_hook(
    x: &Fiq,
    rate: &Propensity,
    window: usize,
    step: u64,
    sampler: &mut Sampler,
    max_digits: usize,
) -> Result<(Fiq, Vec<ActualizationEvent>), FiqError> {
    let mut events = Vec::new();
    if rate.value().is_zero() {
        return Ok((x.clone(), events));
    }
    let mut state = x.clone();
    for j in 1..=window {
        if state.digit(j).is_determined() || !sampler.bernoulli(rate) {
            continue;
        }
        let (next, bit) = state.actualize_digit(j, sampler, max_digits)?;
        events.push(ActualizationEvent {
            step,
            digit_index: j,
            bit,
            mechanism: MechanismTag::Spontaneous,
        });
        state = next;
    }
    Ok((state, events))
}
