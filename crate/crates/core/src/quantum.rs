//! Born-rule propensities over projective measurement contexts.
//!
//! This module only produces per-context outcome tables; those tables feed
//! [`crate::feasibility`], where incompatible contexts can fail to share a
//! single probability space.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::feasibility::{Behavior, Context, FloatBehavior, Measurement};

/// Largest local dimension handled.
pub const MAX_LOCAL_DIM: usize = 8;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("state has norm² {0}, expected 1")]
    NotNormalized(f64),
    #[error("dimension {0} is outside 2..={max}", max = MAX_LOCAL_DIM)]
    Dimension(usize),
    #[error("basis `{label}` is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { label: String, deviation: f64 },
    #[error("dimension mismatch: state has {state}, measurement expects {basis}")]
    Mismatch { state: usize, basis: usize },
    #[error("each party needs at least two settings")]
    TooFewSettings,
    #[error("zero vector cannot be normalized")]
    ZeroVector,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amplitudes.len() < 2 {
            return Err(QuantumError::Dimension(amplitudes.len()));
        }
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 {
            return Err(QuantumError::ZeroVector);
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Self::new(amplitudes)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self, QuantumError> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `self ⊗ other`, index `i·d_other + j`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: kron(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Two-qubit singlet `(|01⟩ - |10⟩)/√2`.
    pub fn singlet() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[0.0, h, -h, 0.0]).expect("unit norm")
    }
}

fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// An orthonormal measurement basis; outcome `i` is vector `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableBasis {
    label: String,
    vectors: Vec<Vec<Complex64>>,
}

impl ObservableBasis {
    pub fn new(
        label: impl Into<String>,
        vectors: Vec<Vec<Complex64>>,
    ) -> Result<Self, QuantumError> {
        let label = label.into();
        let d = vectors.len();
        if !(2..=MAX_LOCAL_DIM).contains(&d) {
            return Err(QuantumError::Dimension(d));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(QuantumError::Mismatch {
                state: v.len(),
                basis: d,
            });
        }
        let mut deviation: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((inner(&vectors[i], &vectors[j]) - target).norm());
            }
        }
        if deviation > NORM_TOL {
            return Err(QuantumError::NotOrthonormal { label, deviation });
        }
        Ok(ObservableBasis { label, vectors })
    }

    pub fn computational(label: impl Into<String>, d: usize) -> Result<Self, QuantumError> {
        let vectors = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        Self::new(label, vectors)
    }

    /// Real qubit basis `(cos θ, sin θ), (-sin θ, cos θ)`.
    pub fn real_qubit(label: impl Into<String>, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let v = |a: f64, b: f64| vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)];
        Self::new(label, vec![v(c, s), v(-s, c)]).expect("rotation is orthonormal")
    }

    /// Gram–Schmidt on `raw` rows; fails on linearly dependent input.
    pub fn gram_schmidt(
        label: impl Into<String>,
        raw: Vec<Vec<Complex64>>,
    ) -> Result<Self, QuantumError> {
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(raw.len());
        for mut v in raw {
            for _ in 0..2 {
                for u in &out {
                    let c = inner(u, &v);
                    v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
                }
            }
            let n = norm_sqr(&v).sqrt();
            if n < 1e-9 {
                return Err(QuantumError::ZeroVector);
            }
            v.iter_mut().for_each(|x| *x /= n);
            out.push(v);
        }
        Self::new(label, out)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextDistribution {
    pub context_label: String,
    pub outcome_propensities: Vec<f64>,
}

/// `p(a | ψ, A) = |⟨a|ψ⟩|²` for each basis vector `a` of `A`.
pub fn born_propensities(
    psi: &StateVector,
    basis: &ObservableBasis,
) -> Result<ContextDistribution, QuantumError> {
    if psi.dim() != basis.dim() {
        return Err(QuantumError::Mismatch {
            state: psi.dim(),
            basis: basis.dim(),
        });
    }
    Ok(ContextDistribution {
        context_label: basis.label.clone(),
        outcome_propensities: basis
            .vectors
            .iter()
            .map(|a| inner(a, &psi.amplitudes).norm_sqr())
            .collect(),
    })
}

/// Joint Born distributions `p(a, b | x, y)` for every pair of local settings.
///
/// Measurements are labelled by their basis labels; contexts run over
/// `(x, y)` with `y` fastest, outcomes `a·d_B + b`.
pub fn bipartite_behavior(
    psi: &StateVector,
    settings_a: &[ObservableBasis],
    settings_b: &[ObservableBasis],
) -> Result<FloatBehavior, QuantumError> {
    if settings_a.len() < 2 || settings_b.len() < 2 {
        return Err(QuantumError::TooFewSettings);
    }
    let da = settings_a[0].dim();
    let db = settings_b[0].dim();
    if let Some(s) = settings_a.iter().find(|s| s.dim() != da) {
        return Err(QuantumError::Mismatch {
            state: da,
            basis: s.dim(),
        });
    }
    if let Some(s) = settings_b.iter().find(|s| s.dim() != db) {
        return Err(QuantumError::Mismatch {
            state: db,
            basis: s.dim(),
        });
    }
    if psi.dim() != da * db {
        return Err(QuantumError::Mismatch {
            state: psi.dim(),
            basis: da * db,
        });
    }
    let outcomes = |d: usize| (0..d).map(|i| i.to_string()).collect::<Vec<_>>();
    let measurements: Vec<Measurement> = settings_a
        .iter()
        .map(|s| Measurement {
            label: s.label.clone(),
            outcomes: outcomes(da),
        })
        .chain(settings_b.iter().map(|s| Measurement {
            label: s.label.clone(),
            outcomes: outcomes(db),
        }))
        .collect();
    let mut contexts = Vec::with_capacity(settings_a.len() * settings_b.len());
    for (x, sa) in settings_a.iter().enumerate() {
        for (y, sb) in settings_b.iter().enumerate() {
            let probs = sa
                .vectors
                .iter()
                .flat_map(|a| {
                    sb.vectors
                        .iter()
                        .map(move |b| inner(&kron(a, b), &psi.amplitudes).norm_sqr())
                })
                .collect();
            contexts.push(Context {
                settings: vec![x, settings_a.len() + y],
                probs,
            });
        }
    }
    Behavior::new(measurements, contexts).map_err(|_| QuantumError::TooFewSettings)
}

/// Settings `(A0, A1), (B0, B1)` at which the singlet reaches CHSH = 2√2.
pub fn chsh_optimal_settings() -> (Vec<ObservableBasis>, Vec<ObservableBasis>) {
    (
        vec![
            ObservableBasis::real_qubit("A0", 0.0),
            ObservableBasis::real_qubit("A1", PI / 4.0),
        ],
        vec![
            ObservableBasis::real_qubit("B0", 5.0 * PI / 8.0),
            ObservableBasis::real_qubit("B1", 3.0 * PI / 8.0),
        ],
    )
}

/// Singlet behavior at CHSH-optimal settings.
pub fn singlet_chsh_behavior() -> FloatBehavior {
    let (a, b) = chsh_optimal_settings();
    bipartite_behavior(&StateVector::singlet(), &a, &b).expect("qubit settings")
}

/// Correlator `p(same) - p(different)` of a binary two-outcome context.
pub fn correlator(probs: &[f64]) -> f64 {
    probs[0] + probs[3] - probs[1] - probs[2]
}
