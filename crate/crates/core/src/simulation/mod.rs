//! Monte Carlo comparison of online procedures on batch-dependent Gaussian
//! p-values.
//!
//! Within a batch of size `b` the statistics are equicorrelated standard
//! normals, built from one shared factor:
//! `X_k = √ρ W + √(1 − ρ) ξ_k`. Each hypothesis is non-null with probability
//! `π_A`; then `Z_k = X_k + μ_A`, otherwise `Z_k = X_k + μ_N`, and
//! `P_k = Φ(−Z_k)`. Procedures run with lags `l_i = (i − 1) mod b`.
//!
//! Power is the mean over trials of the fraction of false nulls rejected,
//! taken over trials that contain at least one false null. FWER is the
//! fraction of trials with at least one false rejection.

mod rng;

pub use rng::{trial_rng, StreamRole};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gamma::GammaSequence;
use crate::lags::LagStructure;
use crate::procedures::{AddisParams, ProcedureSettings, ProcedureSpec};
use crate::state::{validate_alpha, ProcedureId};

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Hypotheses per trial; a multiple of `batch_size`.
    pub n: usize,
    pub batch_size: usize,
    /// Within-batch correlation, in `(0, 1)`.
    pub rho: f64,
    /// Probability of a false null, in `(0, 1)`.
    pub pi_a: f64,
    /// Alternative mean, positive.
    pub mu_a: f64,
    /// Null mean, at most zero.
    pub mu_n: f64,
    pub alpha: f64,
    pub trials: usize,
    pub base_seed: u64,
    pub gamma: GammaSequence,
    pub tau: f64,
    pub lambda: f64,
}

impl SimConfig {
    /// The desk-scale version of the reference design: `n = 200`,
    /// `b = 10`, `ρ = 0.8`, `π_A = 0.2`, `μ_A = 4`, `μ_N = 0`, `α = 0.2`,
    /// `γ_i = 6 / (π² i²)`, `τ = 0.8`, `λ = 0.3`, 500 trials.
    pub fn desk_scale(base_seed: u64) -> Self {
        Self {
            n: 200,
            batch_size: 10,
            rho: 0.8,
            pi_a: 0.2,
            mu_a: 4.0,
            mu_n: 0.0,
            alpha: 0.2,
            trials: 500,
            base_seed,
            gamma: GammaSequence::inverse_square(),
            tau: 0.8,
            lambda: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.batch_size == 0 || !self.n.is_multiple_of(self.batch_size) {
            return bad("n must be a positive multiple of the batch size");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0, 1)");
        }
        if !(self.pi_a > 0.0 && self.pi_a < 1.0) {
            return bad("pi_A must lie in (0, 1)");
        }
        if !(self.mu_a > 0.0 && self.mu_a.is_finite()) {
            return bad("mu_A must be positive");
        }
        if !(self.mu_n <= 0.0 && self.mu_n.is_finite()) {
            return bad("mu_N must be at most 0");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        validate_alpha(self.alpha)?;
        AddisParams::constant(self.tau, self.lambda)?.evaluate(1, &[], self.alpha)?;
        Ok(())
    }

    /// Procedure settings with the batch lags of this design.
    pub fn settings(&self) -> Result<ProcedureSettings> {
        Ok(ProcedureSettings {
            alpha: self.alpha,
            gamma: self.gamma.clone(),
            lags: LagStructure::batch(self.batch_size)?,
            addis: AddisParams::constant(self.tau, self.lambda)?,
        })
    }
}

/// One simulated stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub pvalues: Vec<f64>,
    pub is_null: Vec<bool>,
}

/// `Φ(−z)`.
pub fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn generate_trial(config: &SimConfig, trial_index: u64) -> Result<Trial> {
    config.validate()?;
    let mut labels = trial_rng(config.base_seed, trial_index, StreamRole::Assignment);
    let is_null: Vec<bool> = (0..config.n)
        .map(|_| !labels.random_bool(config.pi_a))
        .collect();

    let mut stats = trial_rng(config.base_seed, trial_index, StreamRole::Statistics);
    let mut x = Vec::with_capacity(config.batch_size);
    let mut pvalues = Vec::with_capacity(config.n);
    for batch in is_null.chunks(config.batch_size) {
        equicorrelated_normals(&mut stats, batch.len(), config.rho, &mut x);
        for (&null, &x) in batch.iter().zip(&x) {
            let z = x + if null { config.mu_n } else { config.mu_a };
            pvalues.push(upper_tail(z));
        }
    }
    Ok(Trial { pvalues, is_null })
}

/// Fills `out` with `b` standard normals of pairwise correlation `rho ≥ 0`.
pub fn equicorrelated_normals<R: Rng + ?Sized>(
    rng: &mut R,
    b: usize,
    rho: f64,
    out: &mut Vec<f64>,
) {
    let shared = rho.sqrt();
    let own = (1.0 - rho).sqrt();
    let w: f64 = rng.sample(StandardNormal);
    out.clear();
    out.extend((0..b).map(|_| {
        let xi: f64 = rng.sample(StandardNormal);
        shared * w + own * xi
    }));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialResult {
    pub rejected: usize,
    pub false_rejection: bool,
    pub true_positives: usize,
    pub false_nulls: usize,
}

impl TrialResult {
    fn tally(rejections: &[bool], is_null: &[bool]) -> Self {
        let mut r = TrialResult {
            rejected: 0,
            false_rejection: false,
            true_positives: 0,
            false_nulls: 0,
        };
        for (&rej, &null) in rejections.iter().zip(is_null) {
            r.rejected += usize::from(rej);
            r.false_nulls += usize::from(!null);
            if rej && null {
                r.false_rejection = true;
            }
            if rej && !null {
                r.true_positives += 1;
            }
        }
        r
    }

    /// True-positive fraction, if the trial has any false null.
    pub fn power(&self) -> Option<f64> {
        (self.false_nulls > 0).then(|| self.true_positives as f64 / self.false_nulls as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub procedure: ProcedureId,
    pub rejections: Vec<bool>,
    pub result: TrialResult,
}

/// Generates trial `trial_index` and runs every procedure on it.
pub fn run_trial(
    config: &SimConfig,
    procedures: &[ProcedureSpec],
    trial_index: u64,
) -> Result<Vec<TrialOutcome>> {
    let trial = generate_trial(config, trial_index)?;
    let settings = config.settings()?;
    procedures
        .iter()
        .map(|spec| {
            let mut tester = spec.build(&settings)?;
            let rejections = tester.run(&trial.pvalues)?;
            let result = TrialResult::tally(&rejections, &trial.is_null);
            Ok(TrialOutcome {
                procedure: spec.id(),
                rejections,
                result,
            })
        })
        .collect()
}

/// Runs all trials on `threads` workers (`0` picks the rayon default) and
/// returns the outcomes in trial order.
pub fn run_trials(
    config: &SimConfig,
    procedures: &[ProcedureSpec],
    threads: usize,
) -> Result<Vec<Vec<TrialOutcome>>> {
    config.validate()?;
    if procedures.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one procedure is required".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(config, procedures, t))
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub procedure: ProcedureId,
    pub power: f64,
    pub power_se: f64,
    pub fwer: f64,
    pub fwer_se: f64,
    pub trials: usize,
    /// Trials contributing to the power estimate.
    pub power_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

impl MetricsTable {
    pub fn get(&self, procedure: ProcedureId) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.procedure == procedure)
    }
}

/// Aggregates outcomes in trial order, so the estimates are bit-identical
/// however the trials were scheduled.
pub fn summarize(outcomes: &[Vec<TrialOutcome>], procedures: &[ProcedureSpec]) -> MetricsTable {
    let trials = outcomes.len();
    let rows = procedures
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let errors = outcomes
                .iter()
                .filter(|o| o[k].result.false_rejection)
                .count();
            let powers: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o[k].result.power())
                .collect();
            let fwer = errors as f64 / trials as f64;
            let m = powers.len();
            let power = if m == 0 {
                f64::NAN
            } else {
                powers.iter().sum::<f64>() / m as f64
            };
            let power_se = if m < 2 {
                0.0
            } else {
                let var = powers.iter().map(|x| (x - power).powi(2)).sum::<f64>() / (m - 1) as f64;
                (var / m as f64).sqrt()
            };
            MetricsRow {
                procedure: spec.id(),
                power,
                power_se,
                fwer,
                fwer_se: (fwer * (1.0 - fwer) / trials as f64).sqrt(),
                trials,
                power_trials: m,
            }
        })
        .collect();
    MetricsTable { rows }
}

pub fn estimate_power_fwer(
    config: &SimConfig,
    procedures: &[ProcedureSpec],
    threads: usize,
) -> Result<MetricsTable> {
    let outcomes = run_trials(config, procedures, threads)?;
    Ok(summarize(&outcomes, procedures))
}
