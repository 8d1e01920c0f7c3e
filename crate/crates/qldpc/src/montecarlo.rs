//! Seeded, parallel Monte-Carlo harness sweeping depolarization strength
//! and estimator mode.
//!
//! Each point runs trials until a target number of block errors has been
//! collected or a trial cap is hit. Every trial owns an independent RNG
//! stream keyed by (master seed, grid index, mode index, trial index), and
//! trials are always accumulated in trial-index order, so results are
//! byte-identical for any degree of parallelism.

use crate::codes::{bicycle_code, load_code, BicycleParams, CodeError};
use crate::decoder::{
    decode_with_retries_ctx, init_priors, DecodeContext, DecoderError, PriorSplit, TannerGraph,
};
use crate::estimation::{
    decoder_prior, estimate_variance, estimate_well_conditioned, EstimationError, EstimatorConfig,
    FisherArg, ProbeMode,
};
use crate::stabilizer::{ResidualClass, StabilizerMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSource {
    FiveQubit,
    File(PathBuf),
    Bicycle(BicycleParams),
}

/// Which error count the QBER/FER aggregation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Raw residual support: a qubit counts as erroneous whenever the
    /// decoded estimate differs from the true error there.
    #[default]
    Physical,
    /// Residuals that are stabilizers count as error-free; only logical
    /// errors and syndrome mismatches contribute.
    Logical,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Physical => write!(f, "physical"),
            Metric::Logical => write!(f, "logical"),
        }
    }
}

/// Full description of a sweep; identical configs produce identical tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub code: CodeSource,
    /// Operating points, interpreted per `grid_is_f_prime`.
    pub grid: Vec<f64>,
    /// When true the grid lists flip probabilities f' instead of f.
    pub grid_is_f_prime: bool,
    pub modes: Vec<ProbeMode>,
    pub n_m: u64,
    pub default_prior: f64,
    pub fisher_arg: FisherArg,
    pub fisher_scale_n: Option<usize>,
    pub prior_split: PriorSplit,
    pub max_iter: u32,
    pub max_retries: u32,
    pub perturb_strength: f64,
    pub stop_block_errors: u64,
    pub max_trials: u64,
    pub master_seed: u64,
    pub metric: Metric,
}

impl SweepConfig {
    pub fn new(code: CodeSource) -> Self {
        SweepConfig {
            code,
            grid: Vec::new(),
            grid_is_f_prime: false,
            modes: vec![ProbeMode::Perfect],
            n_m: 1,
            default_prior: 0.375,
            fisher_arg: FisherArg::default(),
            fisher_scale_n: None,
            prior_split: PriorSplit::default(),
            max_iter: 100,
            max_retries: 10,
            perturb_strength: 0.1,
            stop_block_errors: 100,
            max_trials: 1_000_000,
            master_seed: 0,
            metric: Metric::default(),
        }
    }

    /// Depolarization parameter for a grid entry.
    pub fn f_of_grid(&self, g: f64) -> f64 {
        if self.grid_is_f_prime {
            g * 4.0 / 3.0
        } else {
            g
        }
    }

    fn estimator_for(&self, mode: ProbeMode) -> EstimatorConfig {
        EstimatorConfig {
            mode,
            n_m: self.n_m,
            fisher_scale_n: self.fisher_scale_n,
            default_prior: self.default_prior,
            fisher_arg: self.fisher_arg,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.modes.is_empty() {
            return Err(SweepError::Config("no modes given".into()));
        }
        if self.stop_block_errors < 1 {
            return Err(SweepError::Config("stop_block_errors must be >= 1".into()));
        }
        if self.max_trials < self.stop_block_errors {
            return Err(SweepError::Config(format!(
                "max_trials = {} below stop_block_errors = {}",
                self.max_trials, self.stop_block_errors
            )));
        }
        if self.max_iter < 1 {
            return Err(SweepError::Config("max_iter must be >= 1".into()));
        }
        if !(self.perturb_strength > 0.0 && self.perturb_strength < 1.0) {
            return Err(SweepError::Config(format!(
                "perturb_strength = {} outside (0, 1)",
                self.perturb_strength
            )));
        }
        for mode in &self.modes {
            self.estimator_for(*mode).validate()?;
        }
        let needs_open = self
            .modes
            .iter()
            .any(|m| matches!(m, ProbeMode::Perfect | ProbeMode::Unentangled | ProbeMode::Entangled));
        for &g in &self.grid {
            let f = self.f_of_grid(g);
            if !(0.0..=1.0).contains(&f) {
                return Err(SweepError::Config(format!(
                    "grid value {g} maps to f = {f} outside [0, 1]"
                )));
            }
            if needs_open && !(f > 0.0 && f < 1.0) {
                return Err(SweepError::Config(format!(
                    "grid value {g} maps to f = {f}, but estimating modes need f in (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// A code with its decoding graph, ready to run trials against.
pub struct PreparedCode {
    pub matrix: StabilizerMatrix,
    pub graph: TannerGraph,
    pub id: String,
}

pub fn prepare_code(source: &CodeSource) -> Result<PreparedCode, SweepError> {
    let (matrix, id) = match source {
        CodeSource::FiveQubit => (StabilizerMatrix::five_qubit(), "five-qubit".to_string()),
        CodeSource::File(path) => {
            let m = load_code(path)?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into());
            (m, id)
        }
        CodeSource::Bicycle(params) => (bicycle_code(params)?, params.id()),
    };
    let graph = TannerGraph::from_stabilizers(&matrix);
    graph.validate()?;
    Ok(PreparedCode { matrix, graph, id })
}

/// Outcome of a single decode trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub f: f64,
    /// Flip probability actually handed to the decoder.
    pub f_prime_est: f64,
    pub converged: bool,
    pub iterations: u32,
    pub retries_used: u32,
    pub residual: ResidualClass,
    /// Qubits where the residual has X or Z support.
    pub qubit_errors: u32,
}

impl TrialRecord {
    /// Error count under the chosen metric.
    pub fn counted_errors(&self, metric: Metric) -> u32 {
        match metric {
            Metric::Physical => self.qubit_errors,
            Metric::Logical => match self.residual {
                ResidualClass::Exact | ResidualClass::DegenerateSuccess => 0,
                _ => self.qubit_errors,
            },
        }
    }

    pub fn is_block_error(&self, metric: Metric) -> bool {
        self.counted_errors(metric) > 0
    }
}

/// RNG stream for one trial; the key is the (seed, point, mode, trial)
/// tuple itself, so streams never collide and never depend on scheduling.
fn trial_rng(master_seed: u64, point_index: u64, mode_index: u64, trial_index: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&point_index.to_le_bytes());
    seed[16..24].copy_from_slice(&mode_index.to_le_bytes());
    seed[24..32].copy_from_slice(&trial_index.to_le_bytes());
    ChaCha12Rng::from_seed(seed)
}

/// Runs one trial: sample a channel error, measure the syndrome, draw the
/// decoder's channel estimate, decode, classify the residual.
pub fn run_trial(
    prep: &PreparedCode,
    f: f64,
    mode: ProbeMode,
    cfg: &SweepConfig,
    rng: &mut ChaCha12Rng,
) -> TrialRecord {
    let mut ctx = DecodeContext::new(&prep.graph);
    run_trial_with(&mut ctx, prep, f, mode, cfg, 0, rng)
}

fn run_trial_with(
    ctx: &mut DecodeContext,
    prep: &PreparedCode,
    f: f64,
    mode: ProbeMode,
    cfg: &SweepConfig,
    trial_index: u64,
    rng: &mut ChaCha12Rng,
) -> TrialRecord {
    let n = prep.matrix.n_qubits();
    let f_prime = 0.75 * f;
    let error = crate::channel::sample_error(n, f_prime, rng).expect("validated f");
    let syndrome = prep.matrix.syndrome(&error).expect("lengths match");
    let est_cfg = cfg.estimator_for(mode);
    let f_prime_est = decoder_prior(&est_cfg, f, n, rng).expect("validated estimator");
    let priors = init_priors(f_prime_est, n, cfg.prior_split);
    let result = decode_with_retries_ctx(
        ctx,
        &prep.graph,
        &syndrome,
        &priors,
        cfg.max_iter,
        cfg.max_retries,
        cfg.perturb_strength,
        rng,
    );
    let residual = prep
        .matrix
        .residual_class(&error, &result.error_estimate)
        .expect("lengths match");
    let qubit_errors = error.xor(&result.error_estimate).expect("lengths").weight() as u32;
    TrialRecord {
        trial_index,
        f,
        f_prime_est,
        converged: result.converged,
        iterations: result.iterations,
        retries_used: result.retries_used,
        residual,
        qubit_errors,
    }
}

/// Aggregated results for one (f, mode) point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub f: f64,
    pub f_prime: f64,
    pub mode: ProbeMode,
    pub trials: u64,
    pub block_errors: u64,
    pub qubit_errors: u64,
    pub qber: f64,
    pub qber_lo: f64,
    pub qber_hi: f64,
    pub fer: f64,
    pub fer_lo: f64,
    pub fer_hi: f64,
    pub mean_iters: f64,
    /// Largest per-attempt iteration count observed (instrumentation).
    pub max_iterations_seen: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub code_id: String,
    pub master_seed: u64,
    pub rows: Vec<PointRow>,
}

const BATCH: u64 = 1024;

/// Runs trials at one operating point until `stop_block_errors` block
/// errors are collected or `max_trials` is reached.
///
/// Trials are computed in parallel batches but consumed strictly in trial
/// order, so the stopping point and all counts are scheduling-independent.
pub fn run_point(
    prep: &PreparedCode,
    f: f64,
    mode: ProbeMode,
    point_index: u64,
    mode_index: u64,
    cfg: &SweepConfig,
) -> PointRow {
    warn_if_ill_conditioned(cfg, prep, f, mode);
    let n = prep.matrix.n_qubits() as u64;
    let mut trials = 0u64;
    let mut block_errors = 0u64;
    let mut qubit_errors = 0u64;
    let mut iter_sum = 0u64;
    let mut max_iterations_seen = 0u32;

    let mut start = 0u64;
    'outer: while start < cfg.max_trials {
        let end = (start + BATCH).min(cfg.max_trials);
        let batch: Vec<TrialRecord> = (start..end)
            .into_par_iter()
            .map_init(
                || DecodeContext::new(&prep.graph),
                |ctx, t| {
                    let mut rng = trial_rng(cfg.master_seed, point_index, mode_index, t);
                    run_trial_with(ctx, prep, f, mode, cfg, t, &mut rng)
                },
            )
            .collect();
        for record in &batch {
            trials += 1;
            iter_sum += u64::from(record.iterations);
            max_iterations_seen = max_iterations_seen.max(record.iterations);
            qubit_errors += u64::from(record.counted_errors(cfg.metric));
            if record.is_block_error(cfg.metric) {
                block_errors += 1;
                if block_errors == cfg.stop_block_errors {
                    break 'outer;
                }
            }
        }
        start = end;
    }

    let (fer, fer_lo, fer_hi) = proportion_with_wilson(block_errors, trials);
    let (qber, qber_lo, qber_hi) = proportion_with_wilson(qubit_errors, trials * n);
    PointRow {
        f,
        f_prime: 0.75 * f,
        mode,
        trials,
        block_errors,
        qubit_errors,
        qber,
        qber_lo,
        qber_hi,
        fer,
        fer_lo,
        fer_hi,
        mean_iters: iter_sum as f64 / trials as f64,
        max_iterations_seen,
    }
}

fn warn_if_ill_conditioned(cfg: &SweepConfig, prep: &PreparedCode, f: f64, mode: ProbeMode) {
    let est = cfg.estimator_for(mode);
    if let Ok(Some(variance)) = estimate_variance(&est, f, prep.matrix.n_qubits()) {
        let mean = 0.75 * f;
        if !estimate_well_conditioned(mean, variance) {
            log::warn!(
                "estimate at f' = {mean} with variance {variance:.3e} is heavily truncated \
                 (mode {mode}); moments will deviate from the nominal normal"
            );
        }
    }
}

/// Wilson 95% interval around the observed proportion.
fn proportion_with_wilson(successes: u64, total: u64) -> (f64, f64, f64) {
    if total == 0 {
        return (0.0, 0.0, 1.0);
    }
    let z = 1.959963984540054_f64;
    let n = total as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == total { 1.0 } else { (center + half).min(1.0) };
    (p, lo, hi)
}

/// Sweeps the full grid x mode Cartesian product, grid outer, modes inner.
pub fn run_sweep(cfg: &SweepConfig) -> Result<ResultTable, SweepError> {
    cfg.validate()?;
    let prep = prepare_code(&cfg.code)?;
    let mut rows = Vec::with_capacity(cfg.grid.len() * cfg.modes.len());
    for (point_index, &g) in cfg.grid.iter().enumerate() {
        let f = cfg.f_of_grid(g);
        for (mode_index, &mode) in cfg.modes.iter().enumerate() {
            rows.push(run_point(
                &prep,
                f,
                mode,
                point_index as u64,
                mode_index as u64,
                cfg,
            ));
        }
    }
    Ok(ResultTable {
        code_id: prep.id,
        master_seed: cfg.master_seed,
        rows,
    })
}
