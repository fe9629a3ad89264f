//! Chaotic digit-shift maps acting on finite-information quantities.
//!
//! The doubling map `x -> 2x mod 1` is a left shift of the binary expansion.
//! It is applied to the digit list exactly: propensities move one place
//! toward significance and the leading one is dropped (logged, never sampled).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::fiq::{Fiq, FiqError, DEFAULT_MAX_DIGITS};
use crate::measurement::{measure, ActualizationEvent, ActualizationMechanism};
use crate::propensity::{info_content, Propensity};
use crate::sampling::{split_seed, Sampler};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("initial state holds {len} explicit digits, above the limit {max}")]
    StorageLimit { len: usize, max: usize },
    #[error("ensemble needs at least one trial")]
    NoTrials,
    #[error("ensemble precision must be at least 1")]
    ZeroPrecision,
    #[error(transparent)]
    Fiq(#[from] FiqError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    DoublingMap,
    /// Multiplication by `2^k` mod 1.
    ShiftBy(usize),
}

impl MapKind {
    pub fn shift(self) -> usize {
        match self {
            MapKind::DoublingMap => 1,
            MapKind::ShiftBy(k) => k,
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::DoublingMap => f.write_str("doubling"),
            MapKind::ShiftBy(k) => write!(f, "shift:{k}"),
        }
    }
}

impl FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "doubling" => Ok(MapKind::DoublingMap),
            other => {
                let k = other
                    .strip_prefix("shift:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| {
                        format!("unknown map `{other}` (expected doubling or shift:<k>)")
                    })?;
                if k == 0 {
                    return Err("shift amount must be at least 1".to_string());
                }
                Ok(MapKind::ShiftBy(k))
            }
        }
    }
}

/// One application of `map`: returns the shifted state and the digits that
/// left through the radix point, most significant first.
pub fn step_map(x: &Fiq, map: MapKind) -> (Fiq, Vec<Propensity>) {
    let k = map.shift();
    let digits = x.digits();
    let discarded: Vec<Propensity> = (1..=k).map(|j| x.digit(j)).collect();
    let rest = digits
        .get(k..)
        .map(<[Propensity]>::to_vec)
        .unwrap_or_default();
    (Fiq::new(rest), discarded)
}

/// State of a trajectory at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryRecord {
    pub step: u64,
    pub state: Fiq,
    pub discarded: Vec<Propensity>,
    pub events: Vec<ActualizationEvent>,
}

impl fmt::Display for TrajectoryRecord {
    /// `step<TAB>state<TAB>discarded<TAB>events`; empty lists print as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |items: Vec<String>| {
            if items.is_empty() {
                "-".to_string()
            } else {
                items.join(",")
            }
        };
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.step,
            self.state,
            join(self.discarded.iter().map(ToString::to_string).collect()),
            join(self.events.iter().map(ToString::to_string).collect()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> &Fiq {
        &self
            .records
            .last()
            .expect("trajectory has an initial record")
            .state
    }

    pub fn events(&self) -> impl Iterator<Item = &ActualizationEvent> {
        self.records.iter().flat_map(|r| r.events.iter())
    }

    /// Column header matching the record lines.
    pub const HEADER: &'static str = "step\tstate\tdiscarded\tevents";

    /// Line-delimited serialization, one record per line.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub map: MapKind,
    pub steps: u64,
    pub mechanism: ActualizationMechanism,
    pub seed: u64,
    pub max_digits: usize,
}

impl TrajectoryConfig {
    pub fn new(map: MapKind, steps: u64, mechanism: ActualizationMechanism, seed: u64) -> Self {
        TrajectoryConfig {
            map,
            steps,
            mechanism,
            seed,
            max_digits: DEFAULT_MAX_DIGITS,
        }
    }
}

/// Alternates `step_map` with the mechanism hook, recording every state.
///
/// Record 0 is the initial state. The run is a pure function of `x0` and the
/// config; the sampler is seeded from `config.seed` directly.
pub fn run_trajectory(x0: &Fiq, config: &TrajectoryConfig) -> Result<Trajectory, DynamicsError> {
    let mut sampler = Sampler::new(config.seed);
    run_with_sampler(x0, config, &mut sampler)
}

fn run_with_sampler(
    x0: &Fiq,
    config: &TrajectoryConfig,
    sampler: &mut Sampler,
) -> Result<Trajectory, DynamicsError> {
    if x0.explicit_len() > config.max_digits {
        return Err(DynamicsError::StorageLimit {
            len: x0.explicit_len(),
            max: config.max_digits,
        });
    }
    let mut records = Vec::with_capacity(config.steps as usize + 1);
    records.push(TrajectoryRecord {
        step: 0,
        state: x0.clone(),
        discarded: Vec::new(),
        events: Vec::new(),
    });
    let mut state = x0.clone();
    for step in 1..=config.steps {
        let (shifted, discarded) = step_map(&state, config.map);
        let (next, events) = config
            .mechanism
            .apply(&shifted, step, sampler, config.max_digits)?;
        state = next;
        records.push(TrajectoryRecord {
            step,
            state: state.clone(),
            discarded,
            events,
        });
    }
    Ok(Trajectory { records })
}

/// Histogram of coarse outcomes over independently seeded trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleHistogram {
    pub trials: u64,
    pub precision: usize,
    pub counts: BTreeMap<String, u64>,
}

impl EnsembleHistogram {
    pub fn frequency(&self, outcome: &str) -> f64 {
        self.counts.get(outcome).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

/// Runs `trials` mechanism-free trajectories and measures each final state at
/// `precision` digits.
///
/// Trial `i` draws from `split_seed(seed, i)`. Trials may run in parallel;
/// counts are merged in trial order so the result does not depend on scheduling.
pub fn ensemble_spread(
    x0: &Fiq,
    map: MapKind,
    steps: u64,
    trials: u64,
    precision: usize,
    seed: u64,
) -> Result<EnsembleHistogram, DynamicsError> {
    if trials == 0 {
        return Err(DynamicsError::NoTrials);
    }
    if precision == 0 {
        return Err(DynamicsError::ZeroPrecision);
    }
    let config = TrajectoryConfig::new(map, steps, ActualizationMechanism::None, seed);
    // the mechanism-free run is deterministic, so it is shared by all trials
    let traj = run_with_sampler(x0, &config, &mut Sampler::new(seed))?;
    let end = traj.final_state();
    let outcomes: Vec<String> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut sampler = Sampler::new(split_seed(seed, i));
            measure(end, precision, &mut sampler, config.max_digits).map(|o| o.bits)
        })
        .collect::<Result<_, _>>()?;
    let mut counts = BTreeMap::new();
    for o in outcomes {
        *counts.entry(o).or_insert(0) += 1;
    }
    Ok(EnsembleHistogram {
        trials,
        precision,
        counts,
    })
}

/// Information carried away by discarded digits.
pub fn discarded_information(discarded: &[Propensity]) -> f64 {
    discarded.iter().map(info_content).sum()
}
