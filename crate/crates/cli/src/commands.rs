use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fiq::calculus::{humphreys_check, lln_experiment, CausalModel, LlnError};
use fiq::dynamics::{ensemble_spread, run_trajectory, DynamicsError, Trajectory, TrajectoryConfig};
use fiq::feasibility::{
    check_global_space, chsh_value, parse_behavior, product_behavior, rationalize_distribution,
    rationalize_entries, Entry, FeasibilityError, FeasibilityVerdict, RationalizeOptions,
};
use fiq::fiq::FiqError;
use fiq::measurement::measure;
use fiq::propensity::{format_rational, parse_rational};
use fiq::quantum::{born_propensities, chsh_optimal_settings, singlet_chsh_behavior, StateVector};
use fiq::{
    split_seed, ActualizationMechanism, Fiq, MapKind, Propensity, Sampler, DEFAULT_MAX_DIGITS,
};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::config::{pick, require, FileConfig, Resolved};
use crate::error::CliError;

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file whose keys are long flag names; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Run a trajectory, or an ensemble histogram when `--trials` exceeds 1.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Initial state, e.g. `0.10(1/3)`.
    #[arg(long)]
    x0: Option<String>,
    /// `doubling` or `shift:k`.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    /// `none`, `measure:m=M` or `spont:lambda=a/b,w=W`.
    #[arg(long)]
    mech: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Digits measured on each ensemble member's final state.
    #[arg(long)]
    precision: Option<usize>,
    #[arg(long)]
    max_digits: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

/// Repeat an ideal measurement and tabulate outcome frequencies.
#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    precision: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_digits: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

/// Deviation fractions of Bernoulli frequencies over a grid of run lengths.
#[derive(Debug, Args)]
pub struct LlnArgs {
    /// Propensity `a/b`.
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated run lengths.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Runs per grid point.
    #[arg(long)]
    trials: Option<u64>,
    /// Deviation threshold `a/b` in (0, 1).
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

/// Exact check of the Bayes-reversal contradiction for one causal model.
#[derive(Debug, Args)]
pub struct HumphreysArgs {
    #[arg(long)]
    p_c: Option<String>,
    #[arg(long)]
    p_e_given_c: Option<String>,
    #[arg(long)]
    p_e_given_not_c: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

/// Decide whether a behavior file admits a global probability space.
#[derive(Debug, Args)]
pub struct FeasibilityArgs {
    #[arg(long)]
    behavior: Option<PathBuf>,
    /// Largest allowed distance between a decimal entry and its rational.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_denominator: Option<u64>,
    /// Largest number of deterministic assignments to enumerate.
    #[arg(long)]
    cap: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Singlet at CHSH-optimal settings, decimal entries.
    SingletChsh,
    /// A product of two qubit states at the same settings, exact entries.
    Product,
}

/// Write a behavior file for one of the built-in experiments.
#[derive(Debug, Args)]
pub struct BehaviorArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    #[command(flatten)]
    pub output: Output,
}

/// Header plus body, and the error to report once they are written.
pub struct Report {
    pub header: Resolved,
    pub body: String,
    pub status: Result<(), CliError>,
}

impl Report {
    fn ok(header: Resolved, body: String) -> Self {
        Report {
            header,
            body,
            status: Ok(()),
        }
    }

    pub fn render(&self) -> String {
        let mut s = self.header.header();
        s.push_str(&self.body);
        s
    }
}

fn rational(field: &'static str, text: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(|e| CliError::invalid(field, e))
}

fn propensity(field: &'static str, text: &str) -> Result<Propensity, CliError> {
    text.parse::<Propensity>()
        .map_err(|e| CliError::invalid(field, e))
}

fn initial_state(text: &str) -> Result<Fiq, CliError> {
    text.parse::<Fiq>().map_err(|e| CliError::invalid("x0", e))
}

fn digit_error(e: FiqError) -> CliError {
    match e {
        FiqError::DigitLimit { .. } => CliError::Cap(e.to_string()),
        other => CliError::invalid("x0", other),
    }
}

fn dynamics_error(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::StorageLimit { .. } => CliError::Cap(e.to_string()),
        DynamicsError::NoTrials => CliError::invalid("trials", e),
        DynamicsError::ZeroPrecision => CliError::invalid("precision", e),
        DynamicsError::Fiq(e) => digit_error(e),
    }
}

fn decimal(x: f64) -> String {
    format!("{x:?}")
}

/// `outcome  count  trials  frequency  propensity` rows in outcome order.
fn outcome_table(x: &Fiq, counts: &BTreeMap<String, u64>, trials: u64) -> String {
    let mut body = String::from("outcome\tcount\ttrials\tfrequency\tpropensity\n");
    for (outcome, count) in counts {
        let q: BigRational = outcome
            .bytes()
            .enumerate()
            .map(|(i, b)| {
                let d = x.digit(i + 1);
                if b == b'1' {
                    d.into_value()
                } else {
                    d.complement().into_value()
                }
            })
            .product();
        let _ = writeln!(
            body,
            "{outcome}\t{count}\t{trials}\t{}\t{}",
            decimal(*count as f64 / trials as f64),
            format_rational(&q)
        );
    }
    body
}

pub fn simulate(args: SimulateArgs, file: FileConfig) -> Result<Report, CliError> {
    let x0 = initial_state(&require(pick(args.x0, file.x0), "x0")?)?;
    let map: MapKind = pick(args.map, file.map)
        .unwrap_or_else(|| "doubling".into())
        .parse()
        .map_err(|e| CliError::invalid("map", e))?;
    let steps = require(pick(args.steps, file.steps), "steps")?;
    let mech: ActualizationMechanism = pick(args.mech, file.mech)
        .unwrap_or_else(|| "none".into())
        .parse()
        .map_err(|e| CliError::invalid("mech", e))?;
    let seed = require(pick(args.seed, file.seed), "seed")?;
    let trials = pick(args.trials, file.trials).unwrap_or(1);
    let precision = pick(args.precision, file.precision);
    let max_digits = pick(args.max_digits, file.max_digits).unwrap_or(DEFAULT_MAX_DIGITS);
    if trials == 0 {
        return Err(CliError::invalid("trials", "must be at least 1"));
    }

    let mut header = Resolved::new("simulate");
    header.set("x0", &x0);
    header.set("map", map);
    header.set("steps", steps);
    header.set("mech", &mech);
    header.set("seed", seed);
    header.set("max-digits", max_digits);

    if trials == 1 {
        let mut config = TrajectoryConfig::new(map, steps, mech, seed);
        config.max_digits = max_digits;
        let t: Trajectory = run_trajectory(&x0, &config).map_err(dynamics_error)?;
        let body = format!("{}\n{}", Trajectory::HEADER, t.to_lines());
        return Ok(Report::ok(header, body));
    }

    let precision = require(precision, "precision")?;
    if mech != ActualizationMechanism::None {
        return Err(CliError::invalid(
            "mech",
            "ensemble runs (--trials > 1) are mechanism-free",
        ));
    }
    header.set("trials", trials);
    header.set("precision", precision);
    let hist = ensemble_spread(&x0, map, steps, trials, precision, seed).map_err(dynamics_error)?;
    // the shared final state fixes each outcome's propensity
    let mut config = TrajectoryConfig::new(map, steps, ActualizationMechanism::None, seed);
    config.max_digits = max_digits;
    let end = run_trajectory(&x0, &config).map_err(dynamics_error)?;
    Ok(Report::ok(
        header,
        outcome_table(end.final_state(), &hist.counts, trials),
    ))
}

pub fn measure_cmd(args: MeasureArgs, file: FileConfig) -> Result<Report, CliError> {
    let x0 = initial_state(&require(pick(args.x0, file.x0), "x0")?)?;
    let precision = require(pick(args.precision, file.precision), "precision")?;
    let trials = pick(args.trials, file.trials).unwrap_or(1);
    let seed = require(pick(args.seed, file.seed), "seed")?;
    let max_digits = pick(args.max_digits, file.max_digits).unwrap_or(DEFAULT_MAX_DIGITS);
    if precision == 0 {
        return Err(CliError::invalid("precision", "must be at least 1"));
    }
    if trials == 0 {
        return Err(CliError::invalid("trials", "must be at least 1"));
    }
    let mut counts = BTreeMap::new();
    for i in 0..trials {
        let mut sampler = Sampler::new(split_seed(seed, i));
        let out = measure(&x0, precision, &mut sampler, max_digits).map_err(digit_error)?;
        *counts.entry(out.bits).or_insert(0u64) += 1;
    }
    let mut header = Resolved::new("measure");
    header.set("x0", &x0);
    header.set("precision", precision);
    header.set("trials", trials);
    header.set("seed", seed);
    header.set("max-digits", max_digits);
    Ok(Report::ok(header, outcome_table(&x0, &counts, trials)))
}

pub fn lln(args: LlnArgs, file: FileConfig) -> Result<Report, CliError> {
    let p = propensity("p", &require(pick(args.p, file.p), "p")?)?;
    let grid = pick(args.n, file.n).unwrap_or_else(|| vec![100, 1_000, 10_000]);
    let runs = pick(args.trials, file.trials).unwrap_or(1_000);
    let eps = rational("eps", &require(pick(args.eps, file.eps), "eps")?)?;
    let seed = require(pick(args.seed, file.seed), "seed")?;
    if !eps.is_positive() || eps >= BigRational::from_integer(1.into()) {
        return Err(CliError::invalid(
            "eps",
            "must lie strictly between 0 and 1",
        ));
    }
    if grid.is_empty() || grid.contains(&0) {
        return Err(CliError::invalid("n", "run lengths must be at least 1"));
    }

    let mut header = Resolved::new("lln");
    header.set("p", &p);
    header.set(
        "n",
        grid.iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    header.set("trials", runs);
    header.set("eps", format_rational(&eps));
    header.set("seed", seed);

    let mut body =
        String::from("n\truns\teps\tdeviating_runs\tdeviation_fraction\thoeffding_bound\n");
    for &n in &grid {
        let r = lln_experiment(&p, n, runs, &eps, seed).map_err(|e| match e {
            LlnError::NoTrials => CliError::invalid("n", e),
            LlnError::NoRuns => CliError::invalid("trials", e),
            LlnError::Epsilon(_) => CliError::invalid("eps", e),
        })?;
        let _ = writeln!(
            body,
            "{n}\t{runs}\t{}\t{}\t{}\t{}",
            format_rational(&eps),
            r.deviating_runs,
            decimal(r.deviation_fraction),
            decimal(r.hoeffding_bound)
        );
    }
    Ok(Report::ok(header, body))
}

pub fn humphreys(args: HumphreysArgs, file: FileConfig) -> Result<Report, CliError> {
    let pc = propensity("p-c", &require(pick(args.p_c, file.p_c), "p-c")?)?;
    let pec = propensity(
        "p-e-given-c",
        &require(pick(args.p_e_given_c, file.p_e_given_c), "p-e-given-c")?,
    )?;
    let penc = propensity(
        "p-e-given-not-c",
        &require(
            pick(args.p_e_given_not_c, file.p_e_given_not_c),
            "p-e-given-not-c",
        )?,
    )?;
    let mut header = Resolved::new("humphreys");
    header.set("p-c", &pc);
    header.set("p-e-given-c", &pec);
    header.set("p-e-given-not-c", &penc);

    let mut body = String::from("field\tvalue\n");
    let _ = writeln!(
        body,
        "p_c\t{pc}\np_e_given_c\t{pec}\np_e_given_not_c\t{penc}"
    );
    let model = CausalModel::new(pc, pec, penc);
    match humphreys_check(&model) {
        Ok(v) => {
            let _ = writeln!(body, "p_e\t{}", v.effect);
            let _ = writeln!(body, "causally_nontrivial\t{}", v.causally_nontrivial);
            let _ = writeln!(body, "p_c_given_e\t{}", v.bayes_reversal);
            let _ = writeln!(
                body,
                "p_c_given_not_e\t{}",
                v.cause_given_not_effect
                    .as_ref()
                    .map_or("undefined".to_string(), |q| q.to_string())
            );
            let _ = writeln!(body, "constraint_holds\t{}", v.constraint_holds);
            let _ = writeln!(body, "forced_p_e_given_c\t{}", v.forced_effect_given_cause);
            let _ = writeln!(body, "contradiction\t{}", v.contradiction);
            let status = if v.contradiction {
                "contradiction"
            } else {
                "consistent"
            };
            let _ = writeln!(body, "status\t{status}");
            Ok(Report::ok(header, body))
        }
        Err(e) => {
            let _ = writeln!(body, "status\tdegenerate");
            Ok(Report {
                header,
                body,
                status: Err(CliError::Degenerate(e.to_string())),
            })
        }
    }
}

pub fn feasibility(args: FeasibilityArgs, file: FileConfig) -> Result<Report, CliError> {
    let path = require(pick(args.behavior, file.behavior), "behavior")?;
    let defaults = RationalizeOptions::default();
    let tolerance = pick(args.tolerance, file.tolerance).unwrap_or(defaults.tolerance);
    let max_denominator =
        pick(args.max_denominator, file.max_denominator).unwrap_or(defaults.max_denominator);
    let cap = pick(args.cap, file.cap).unwrap_or(fiq::feasibility::DEFAULT_ASSIGNMENT_CAP as u64);
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(CliError::invalid(
            "tolerance",
            "must be a non-negative number",
        ));
    }
    if max_denominator == 0 {
        return Err(CliError::invalid("max-denominator", "must be at least 1"));
    }

    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let parsed = parse_behavior(&text).map_err(|e| CliError::invalid("behavior", e))?;
    let options = RationalizeOptions {
        tolerance,
        max_denominator,
    };
    let exact =
        rationalize_entries(&parsed, &options).map_err(|e| CliError::invalid("behavior", e))?;
    let verdict = check_global_space(&exact, cap as u128).map_err(|e| match e {
        FeasibilityError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        FeasibilityError::Behavior(e) => CliError::invalid("behavior", e),
    })?;

    let mut header = Resolved::new("feasibility");
    header.set("behavior", path.display());
    header.set("tolerance", decimal(tolerance));
    header.set("max-denominator", max_denominator);
    header.set("cap", cap);

    let mut decimals = 0usize;
    let mut worst = 0.0f64;
    for (pc, ec) in parsed.contexts().iter().zip(exact.contexts()) {
        for (e, r) in pc.probs.iter().zip(&ec.probs) {
            if let Entry::Decimal(x) = e {
                decimals += 1;
                let err = (BigRational::from_float(*x).expect("finite") - r).abs();
                worst = worst.max(err.to_f64().unwrap_or(f64::INFINITY));
            }
        }
    }

    let mut body = String::new();
    body.push_str(
        "# decides existence of a global probability space only, not whether it is accessible\n",
    );
    let verdict_word = if verdict.is_feasible() {
        "feasible"
    } else {
        "infeasible"
    };
    let _ = writeln!(body, "verdict\t{verdict_word}");
    let _ = writeln!(body, "assignments\t{}", exact.assignment_count());
    let _ = writeln!(body, "decimal_entries\t{decimals}");
    let _ = writeln!(body, "max_rationalization_error\t{}", decimal(worst));
    if let Some(s) = chsh_value(&exact) {
        let _ = writeln!(
            body,
            "chsh\t{}\t{}",
            format_rational(&s),
            decimal(s.to_f64().unwrap_or(f64::NAN))
        );
    }
    for (ci, c) in exact.contexts().iter().enumerate() {
        let probs: Vec<String> = c.probs.iter().map(format_rational).collect();
        let _ = writeln!(
            body,
            "context\t{}\t{}",
            exact.context_name(ci),
            probs.join(" ")
        );
    }
    match &verdict {
        FeasibilityVerdict::Feasible { weights } => {
            for (a, w) in weights {
                let labels: Vec<String> = exact
                    .measurements()
                    .iter()
                    .zip(a)
                    .map(|(m, &o)| format!("{}={}", m.label, m.outcomes[o]))
                    .collect();
                let _ = writeln!(body, "weight\t{}\t{}", labels.join(" "), format_rational(w));
            }
        }
        FeasibilityVerdict::Infeasible { functional } => {
            let _ = writeln!(body, "bound\t{}", format_rational(&functional.bound));
            let _ = writeln!(body, "value\t{}", format_rational(&functional.value));
            let _ = writeln!(
                body,
                "violation\t{}",
                format_rational(&functional.violation())
            );
            for (ci, coeffs) in functional.coefficients.iter().enumerate() {
                let cs: Vec<String> = coeffs
                    .iter()
                    .map(|k| {
                        if k.is_zero() {
                            "0".into()
                        } else {
                            format_rational(k)
                        }
                    })
                    .collect();
                let _ = writeln!(
                    body,
                    "coefficient\t{}\t{}",
                    exact.context_name(ci),
                    cs.join(" ")
                );
            }
        }
    }
    Ok(Report::ok(header, body))
}

pub fn behavior(args: BehaviorArgs) -> Result<Report, CliError> {
    let mut header = Resolved::new("behavior");
    let body = match args.preset {
        Preset::SingletChsh => {
            header.set("preset", "singlet-chsh");
            singlet_chsh_behavior().to_string()
        }
        Preset::Product => {
            header.set("preset", "product");
            let phi = StateVector::from_real(&[0.6, 0.8]).expect("unit vector");
            let chi = StateVector::from_real(&[0.8, -0.6]).expect("unit vector");
            let (sa, sb) = chsh_optimal_settings();
            let local = |psi: &StateVector, settings: &[fiq::quantum::ObservableBasis]| {
                settings
                    .iter()
                    .map(|s| {
                        let probs = born_propensities(psi, s)
                            .expect("qubit settings")
                            .outcome_propensities;
                        let exact =
                            rationalize_distribution(&probs, &RationalizeOptions::default())
                                .expect("Born marginals rationalize");
                        (fiq::feasibility::Measurement::binary(s.label()), exact)
                    })
                    .collect::<Vec<_>>()
            };
            product_behavior(&local(&phi, &sa), &local(&chi, &sb))
                .expect("product of normalized marginals")
                .to_string()
        }
    };
    Ok(Report::ok(header, body))
}
