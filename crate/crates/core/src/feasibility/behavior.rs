//! Behaviors: families of per-context outcome distributions, and their text
//! file format.
//!
//! ```text
//! # comment
//! measurements: A0=0|1 A1=0|1 B0=0|1 B1=0|1
//! A0,B0: 1/2 0 0 1/2
//! A0,B1: 0.25 0.25 0.25 0.25
//! ```
//!
//! Each context line names its measurements and then lists the probability of
//! every joint outcome, first measurement most significant. Entries are exact
//! (`a/b` or integers) or decimal; decimal entries go through
//! [`rationalize`](super::rationalize) before any exact check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::propensity::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviorError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("measurement `{0}` is declared twice")]
    DuplicateMeasurement(String),
    #[error("measurement `{0}` needs at least one outcome")]
    EmptyAlphabet(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("context {context} repeats a measurement")]
    RepeatedSetting { context: String },
    #[error(
        "context {context} lists {found} probabilities, its outcome alphabets give {expected}"
    )]
    AlphabetMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("context {context} has a negative entry")]
    Negative { context: String },
    #[error("context {context} sums to {sum}, not 1")]
    NotNormalized { context: String, sum: String },
    #[error("behavior has no contexts")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    pub label: String,
    pub outcomes: Vec<String>,
}

impl Measurement {
    pub fn new(label: impl Into<String>, outcomes: &[&str]) -> Self {
        Measurement {
            label: label.into(),
            outcomes: outcomes.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn binary(label: impl Into<String>) -> Self {
        Self::new(label, &["0", "1"])
    }
}

/// One jointly performed set of measurements and its outcome distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context<T> {
    /// Indices into the behavior's measurement list.
    pub settings: Vec<usize>,
    /// Indexed by joint outcome in mixed radix, first setting most significant.
    pub probs: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior<T> {
    measurements: Vec<Measurement>,
    contexts: Vec<Context<T>>,
}

pub type ExactBehavior = Behavior<BigRational>;
pub type FloatBehavior = Behavior<f64>;

/// A parsed file entry, exact or decimal.
#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Exact(BigRational),
    Decimal(f64),
}

impl<T> Behavior<T> {
    /// Checks the structure: known, non-repeated settings and entry counts
    /// matching the outcome alphabets.
    pub fn new(
        measurements: Vec<Measurement>,
        contexts: Vec<Context<T>>,
    ) -> Result<Self, BehaviorError> {
        let mut seen = BTreeSet::new();
        for m in &measurements {
            if !seen.insert(m.label.as_str()) {
                return Err(BehaviorError::DuplicateMeasurement(m.label.clone()));
            }
            if m.outcomes.is_empty() {
                return Err(BehaviorError::EmptyAlphabet(m.label.clone()));
            }
        }
        if contexts.is_empty() {
            return Err(BehaviorError::Empty);
        }
        let b = Behavior {
            measurements,
            contexts,
        };
        for (ci, c) in b.contexts.iter().enumerate() {
            let mut used = BTreeSet::new();
            for &s in &c.settings {
                if s >= b.measurements.len() {
                    return Err(BehaviorError::UnknownMeasurement(format!("#{s}")));
                }
                if !used.insert(s) {
                    return Err(BehaviorError::RepeatedSetting {
                        context: b.context_name(ci),
                    });
                }
            }
            let expected = b.joint_outcome_count(ci);
            if c.probs.len() != expected {
                return Err(BehaviorError::AlphabetMismatch {
                    context: b.context_name(ci),
                    expected,
                    found: c.probs.len(),
                });
            }
        }
        Ok(b)
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn contexts(&self) -> &[Context<T>] {
        &self.contexts
    }

    /// `A0,B1` style name of context `ci`.
    pub fn context_name(&self, ci: usize) -> String {
        self.contexts[ci]
            .settings
            .iter()
            .map(|&s| self.measurements[s].label.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn joint_outcome_count(&self, ci: usize) -> usize {
        self.contexts[ci]
            .settings
            .iter()
            .map(|&s| self.measurements[s].outcomes.len())
            .product()
    }

    /// Outcome labels of joint outcome `k` in context `ci`.
    pub fn outcome_labels(&self, ci: usize, mut k: usize) -> Vec<&str> {
        let settings = &self.contexts[ci].settings;
        let mut labels = vec![""; settings.len()];
        for (slot, &s) in settings.iter().enumerate().rev() {
            let n = self.measurements[s].outcomes.len();
            labels[slot] = &self.measurements[s].outcomes[k % n];
            k /= n;
        }
        labels
    }

    /// Joint outcome index in context `ci` picked by a global assignment
    /// (one outcome index per measurement).
    pub fn joint_index(&self, ci: usize, assignment: &[usize]) -> usize {
        self.contexts[ci].settings.iter().fold(0, |acc, &s| {
            acc * self.measurements[s].outcomes.len() + assignment[s]
        })
    }

    /// Number of deterministic global assignments, saturating.
    pub fn assignment_count(&self) -> u128 {
        self.measurements
            .iter()
            .fold(1u128, |acc, m| acc.saturating_mul(m.outcomes.len() as u128))
    }

    /// Decodes global assignment `index` (first measurement most significant).
    pub fn assignment(&self, mut index: u128) -> Vec<usize> {
        let mut out = vec![0; self.measurements.len()];
        for (slot, m) in self.measurements.iter().enumerate().rev() {
            let n = m.outcomes.len() as u128;
            out[slot] = (index % n) as usize;
            index /= n;
        }
        out
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Behavior<U> {
        Behavior {
            measurements: self.measurements.clone(),
            contexts: self
                .contexts
                .iter()
                .map(|c| Context {
                    settings: c.settings.clone(),
                    probs: c.probs.iter().map(&mut f).collect(),
                })
                .collect(),
        }
    }

    /// Index of the measurement labelled `label`.
    pub fn measurement_index(&self, label: &str) -> Option<usize> {
        self.measurements.iter().position(|m| m.label == label)
    }
}

impl ExactBehavior {
    /// Every context non-negative and summing to exactly 1.
    pub fn check_normalized(&self) -> Result<(), BehaviorError> {
        for (ci, c) in self.contexts.iter().enumerate() {
            if c.probs.iter().any(Signed::is_negative) {
                return Err(BehaviorError::Negative {
                    context: self.context_name(ci),
                });
            }
            let sum: BigRational = c.probs.iter().sum();
            if !sum.is_one() {
                return Err(BehaviorError::NotNormalized {
                    context: self.context_name(ci),
                    sum: format_rational(&sum),
                });
            }
        }
        Ok(())
    }
}

impl Behavior<Entry> {
    /// The exact behavior, if no entry is decimal.
    pub fn as_exact(&self) -> Option<ExactBehavior> {
        let all_exact = self
            .contexts
            .iter()
            .flat_map(|c| &c.probs)
            .all(|e| matches!(e, Entry::Exact(_)));
        all_exact.then(|| {
            self.map(|e| match e {
                Entry::Exact(r) => r.clone(),
                Entry::Decimal(_) => unreachable!(),
            })
        })
    }
}

/// Parses the behavior file format.
pub fn parse_behavior(text: &str) -> Result<Behavior<Entry>, BehaviorError> {
    let mut measurements: Option<Vec<Measurement>> = None;
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut contexts = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: String| BehaviorError::Syntax {
            line: line_no,
            reason,
        };
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| syntax("expected `<name>: ...`".into()))?;
        let head = head.trim();
        if head == "measurements" {
            if measurements.is_some() {
                return Err(syntax("second `measurements:` header".into()));
            }
            let mut ms = Vec::new();
            for tok in body.split_whitespace() {
                let (label, alphabet) = tok.split_once('=').ok_or_else(|| {
                    syntax(format!("measurement `{tok}` needs `label=o1|o2|...`"))
                })?;
                let outcomes: Vec<String> = alphabet
                    .split('|')
                    .filter(|o| !o.is_empty())
                    .map(str::to_string)
                    .collect();
                let distinct: BTreeSet<&String> = outcomes.iter().collect();
                if distinct.len() != outcomes.len() {
                    return Err(syntax(format!("measurement `{label}` repeats an outcome")));
                }
                if index.insert(label.to_string(), ms.len()).is_some() {
                    return Err(BehaviorError::DuplicateMeasurement(label.to_string()));
                }
                ms.push(Measurement {
                    label: label.to_string(),
                    outcomes,
                });
            }
            measurements = Some(ms);
            continue;
        }
        if measurements.is_none() {
            return Err(syntax(
                "context line before the `measurements:` header".into(),
            ));
        }
        let settings = head
            .split(',')
            .map(|l| {
                index
                    .get(l.trim())
                    .copied()
                    .ok_or_else(|| BehaviorError::UnknownMeasurement(l.trim().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let probs = body
            .split_whitespace()
            .map(|tok| parse_entry(tok).ok_or_else(|| syntax(format!("bad probability `{tok}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        contexts.push(Context { settings, probs });
    }
    let measurements = measurements.ok_or(BehaviorError::Syntax {
        line: 0,
        reason: "missing `measurements:` header".into(),
    })?;
    Behavior::new(measurements, contexts)
}

fn parse_entry(tok: &str) -> Option<Entry> {
    if tok.contains(['.', 'e', 'E']) {
        tok.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Entry::Decimal)
    } else {
        parse_rational(tok).ok().map(Entry::Exact)
    }
}

impl<T: BehaviorEntry> fmt::Display for Behavior<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("measurements:")?;
        for m in &self.measurements {
            write!(f, " {}={}", m.label, m.outcomes.join("|"))?;
        }
        writeln!(f)?;
        for (ci, c) in self.contexts.iter().enumerate() {
            write!(f, "{}:", self.context_name(ci))?;
            for p in &c.probs {
                write!(f, " {}", p.render())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Entry types the file writer knows how to render.
pub trait BehaviorEntry {
    fn render(&self) -> String;
}

impl BehaviorEntry for BigRational {
    fn render(&self) -> String {
        if self.is_zero() {
            "0".to_string()
        } else {
            format_rational(self)
        }
    }
}

impl BehaviorEntry for f64 {
    /// Shortest round-trip decimal, always with a radix point.
    fn render(&self) -> String {
        let s = format!("{self:?}");
        if s.contains(['.', 'e', 'E']) {
            s
        } else {
            format!("{s}.0")
        }
    }
}
