//! Monte Carlo harness: synthetic generators for every model, a deterministic
//! sweep driver over a signal-strength grid, ideal-step baselines, and
//! rate aggregation against each model's theory exponent.

mod oracle;

pub use oracle::{brute_force_map, enumerate_labelings, FixedPointTable, OracleStep, BRUTE_FORCE_CAP};

use crate::gmm::{self, GmmInstance, GmmParams, DEFAULT_KMEANS_RESTARTS};
use crate::groupsync::{perm, z2, zk};
use crate::groupsync::{PermSyncInstance, PermSyncParams, Z2Instance, Z2Params, ZkInstance, ZkParams};
use crate::iterate::{
    ideal_step, one_step, run_iterations, GroundTruth, IterationConfig, RecoveryError,
    RecoveryModel,
};
use crate::mra::{self, MraInstance, MraParams};
use crate::numerics::Rng;
use crate::ranking::{self, RankingInstance, RankingParams};
use crate::signrec::{self, lambda_for_snr, SignInstance, SignParams, DEFAULT_SLOPE_PENALTY};

/// Model selection plus its fixed dimensions. The signal-strength field the
/// sweep varies (separation, comparison strength, SNR, lambda) is a
/// placeholder here; [`BenchParams::at_signal`] substitutes each grid value.
#[derive(Clone, Debug, PartialEq)]
pub enum BenchParams {
    Gmm(GmmParams),
    Rank(RankingParams),
    Sign(SignParams),
    Mra(MraParams),
    Z2(Z2Params),
    Zk(ZkParams),
    Perm(PermSyncParams),
}

impl BenchParams {
    pub fn kind(&self) -> &'static str {
        match self {
            BenchParams::Gmm(_) => "gmm",
            BenchParams::Rank(_) => "rank",
            BenchParams::Sign(_) => "sign",
            BenchParams::Mra(_) => "mra",
            BenchParams::Z2(_) => "sync-z2",
            BenchParams::Zk(_) => "sync-zk",
            BenchParams::Perm(_) => "sync-perm",
        }
    }

    /// Number of label coordinates p.
    pub fn coords(&self) -> usize {
        match self {
            BenchParams::Gmm(p) => p.p,
            BenchParams::Rank(p) => p.p,
            BenchParams::Sign(p) => p.p,
            BenchParams::Mra(p) => p.p,
            BenchParams::Z2(p) => p.p,
            BenchParams::Zk(p) => p.p,
            BenchParams::Perm(p) => p.p,
        }
    }

    /// Same dimensions with the swept signal knob set to `v`: center
    /// separation for clustering, comparison strength for ranking, SNR for
    /// sign recovery (mapped to its lambda), squared shift separation for
    /// alignment, lambda* for synchronization.
    pub fn at_signal(&self, v: f64) -> BenchParams {
        match self {
            BenchParams::Gmm(p) => BenchParams::Gmm(GmmParams { delta_min: v, ..p.clone() }),
            BenchParams::Rank(p) => BenchParams::Rank(RankingParams { beta_star: v, ..p.clone() }),
            BenchParams::Sign(p) => BenchParams::Sign(SignParams {
                lambda: lambda_for_snr(v, p.n, p.p, p.s),
                ..p.clone()
            }),
            BenchParams::Mra(p) => BenchParams::Mra(MraParams { delta_min_sq: v, ..p.clone() }),
            BenchParams::Z2(p) => BenchParams::Z2(Z2Params { lambda_star: v, ..p.clone() }),
            BenchParams::Zk(p) => BenchParams::Zk(ZkParams { lambda_star: v, ..p.clone() }),
            BenchParams::Perm(p) => BenchParams::Perm(PermSyncParams { lambda_star: v, ..p.clone() }),
        }
    }

    /// Exponent x in the per-model error target exp(-x) at signal value `v`.
    pub fn theory_exponent(&self, v: f64) -> f64 {
        match self {
            BenchParams::Gmm(_) => v * v / 8.0,
            BenchParams::Rank(p) => p.p as f64 * v * v / 4.0,
            BenchParams::Sign(_) => v * v / 2.0,
            // The alignment grid is already a squared separation.
            BenchParams::Mra(_) => v / 8.0,
            BenchParams::Z2(p) => p.p as f64 * v * v / 2.0,
            BenchParams::Zk(p) => p.p as f64 * v * v / 8.0,
            BenchParams::Perm(p) => p.p as f64 * v * v / 2.0,
        }
    }
}

pub enum BenchInstance {
    Gmm(GmmInstance),
    Rank(RankingInstance),
    Sign(SignInstance),
    Mra(MraInstance),
    Z2(Z2Instance),
    Zk(ZkInstance),
    Perm(PermSyncInstance),
}

/// Draw one synthetic instance of the selected model.
pub fn generate(params: &BenchParams, rng: &mut Rng) -> BenchInstance {
    match params {
        BenchParams::Gmm(p) => BenchInstance::Gmm(gmm::sample(p, rng)),
        BenchParams::Rank(p) => BenchInstance::Rank(ranking::sample(p, rng)),
        BenchParams::Sign(p) => BenchInstance::Sign(signrec::sample(p, rng)),
        BenchParams::Mra(p) => BenchInstance::Mra(mra::sample(p, rng)),
        BenchParams::Z2(p) => BenchInstance::Z2(z2::sample(p, rng)),
        BenchParams::Zk(p) => BenchInstance::Zk(zk::sample(p, rng)),
        BenchParams::Perm(p) => BenchInstance::Perm(perm::sample(p, rng)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitChoice {
    /// The model's own initializer: spectral clustering, rank statistics,
    /// sqrt-SLOPE thresholding, reference alignment, or eigenvectors.
    Builtin,
    Truth,
    /// Truth with this fraction of coordinates relabeled uniformly at random
    /// (among the other labels); probes the basin of attraction directly.
    CorruptedTruth(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub params: BenchParams,
    /// Signal-strength grid, ascending.
    pub grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub init: InitChoice,
    /// Worker threads; 0 picks the available parallelism.
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateOutcome {
    pub final_error: f64,
    pub ideal_error: f64,
    pub ideal_loss: f64,
    /// Surrogate loss at every recorded iterate, starting at the initializer.
    pub losses: Vec<f64>,
    /// Error metric at every recorded iterate.
    pub errors: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Short failure code; when set the numeric fields are unusable.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPointReport {
    pub snr_param: f64,
    pub mean_error: f64,
    pub median_error: f64,
    pub stderr_error: f64,
    /// Loss per iteration averaged over completed replicates; replicates that
    /// hit a fixed point early continue at their final loss.
    pub mean_loss_trajectory: Vec<f64>,
    /// Mean error of the one-shot fit-at-truth baseline.
    pub ideal_error: f64,
    pub outcomes: Vec<ReplicateOutcome>,
}

impl GridPointReport {
    /// (iterations to fixed point, replicate count) pairs, ascending.
    pub fn iteration_distribution(&self) -> Vec<(usize, usize)> {
        let mut map = std::collections::BTreeMap::new();
        for o in self.outcomes.iter().filter(|o| o.failure.is_none()) {
            *map.entry(o.iterations).or_insert(0usize) += 1;
        }
        map.into_iter().collect()
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.failure.is_some()).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub spec: SweepSpec,
    pub points: Vec<GridPointReport>,
}

impl ExperimentReport {
    pub fn total_failures(&self) -> usize {
        self.points.iter().map(|p| p.failures()).sum()
    }
}

pub fn failure_code(e: &RecoveryError) -> &'static str {
    match e {
        RecoveryError::LabelCount { .. } => "label-count",
        RecoveryError::InvalidLabel { .. } => "invalid-label",
        RecoveryError::DegenerateLabels(_) => "degenerate-labels",
        RecoveryError::SupportTooLarge { .. } => "support-too-large",
        RecoveryError::NoConvergence { .. } => "no-convergence",
        RecoveryError::InitFailed(_) => "init-failed",
        RecoveryError::Numerics(_) => "numerics",
    }
}

/// Error of the one-shot fit-at-truth baseline on this instance.
pub fn ideal_error<M: RecoveryModel + ?Sized>(
    model: &M,
    truth_labels: &[M::Label],
) -> Result<f64, RecoveryError> {
    let labels = ideal_step(model, truth_labels)?;
    Ok(model.canonical_error(&labels, truth_labels))
}

/// Truth with round(fraction * p) distinct coordinates resampled uniformly
/// among their other candidate labels.
pub fn corrupt_labels<M: RecoveryModel + ?Sized>(
    model: &M,
    truth: &[M::Label],
    fraction: f64,
    rng: &mut Rng,
) -> Vec<M::Label> {
    assert!((0.0..=1.0).contains(&fraction), "flip fraction outside [0, 1]");
    let p = model.num_coords();
    let flips = ((fraction * p as f64).round() as usize).min(p);
    let mut out = truth.to_vec();
    for j in rng.sample_distinct(p, flips) {
        let a = model.alphabet_size(j);
        if a <= 1 {
            continue;
        }
        loop {
            let cand = model.label_at(j, rng.uniform_below(a));
            if cand != out[j] {
                out[j] = cand;
                break;
            }
        }
    }
    out
}

fn failed_outcome(code: &str) -> ReplicateOutcome {
    ReplicateOutcome {
        final_error: f64::NAN,
        ideal_error: f64::NAN,
        ideal_loss: f64::NAN,
        losses: vec![],
        errors: vec![],
        iterations: 0,
        converged: false,
        failure: Some(code.to_string()),
    }
}

fn measure_replicate<M: RecoveryModel + ?Sized>(
    model: &M,
    truth_labels: &[M::Label],
    truth_block: &M::Block,
    init: Result<Vec<M::Label>, RecoveryError>,
) -> ReplicateOutcome {
    let init = match init {
        Ok(v) => v,
        Err(e) => return failed_outcome(failure_code(&e)),
    };
    let ideal = match ideal_step(model, truth_labels) {
        Ok(v) => v,
        Err(e) => return failed_outcome(failure_code(&e)),
    };
    let ideal_error = model.canonical_error(&ideal, truth_labels);
    let ideal_loss = model.loss(&ideal, truth_labels, truth_block);
    let cfg = IterationConfig::for_coords(model.num_coords());
    let truth = GroundTruth::<M> { labels: truth_labels, block: truth_block };
    match run_iterations(model, &init, &cfg, Some(truth)) {
        Ok(trace) => ReplicateOutcome {
            final_error: trace.final_error().unwrap_or(f64::NAN),
            ideal_error,
            ideal_loss,
            losses: trace.entries.iter().map(|e| e.loss_value.unwrap_or(f64::NAN)).collect(),
            errors: trace.entries.iter().map(|e| e.error_metric.unwrap_or(f64::NAN)).collect(),
            iterations: trace.iterations_run,
            converged: trace.converged,
            failure: None,
        },
        Err(e) => failed_outcome(failure_code(&e)),
    }
}

/// One grid cell: child seed from (grid index, replicate index), generate,
/// initialize, iterate, measure.
fn run_cell(spec: &SweepSpec, g: usize, r: usize) -> ReplicateOutcome {
    let point = spec.params.at_signal(spec.grid[g]);
    let mut rng = Rng::seed_from_u64(Rng::derive_seed(spec.seed, g as u64, r as u64));
    match generate(&point, &mut rng) {
        BenchInstance::Gmm(inst) => {
            let init = match &spec.init {
                InitChoice::Builtin => inst.model.spectral_init(DEFAULT_KMEANS_RESTARTS, &mut rng),
                InitChoice::Truth => Ok(inst.truth_labels.clone()),
                InitChoice::CorruptedTruth(f) => {
                    Ok(corrupt_labels(&inst.model, &inst.truth_labels, *f, &mut rng))
                }
            };
            measure_replicate(&inst.model, &inst.truth_labels, &inst.truth_centers, init)
        }
        BenchInstance::Rank(inst) => {
            let init = match &spec.init {
                InitChoice::Builtin => Ok(inst.model.rank_init()),
                InitChoice::Truth => Ok(inst.truth_labels.clone()),
                InitChoice::CorruptedTruth(f) => {
                    Ok(corrupt_labels(&inst.model, &inst.truth_labels, *f, &mut rng))
                }
            };
            measure_replicate(&inst.model, &inst.truth_labels, &inst.beta_star, init)
        }
        BenchInstance::Sign(inst) => {
            let init = match &spec.init {
                InitChoice::Builtin => inst.model.sqrt_slope_init(DEFAULT_SLOPE_PENALTY),
                InitChoice::Truth => Ok(inst.truth_labels.clone()),
                InitChoice::CorruptedTruth(f) => {
                    Ok(corrupt_labels(&inst.model, &inst.truth_labels, *f, &mut rng))
                }
            };
            measure_replicate(&inst.model, &inst.truth_labels, &inst.truth_block, init)
        }
        BenchInstance::Mra(inst) => {
            let init = match &spec.init {
                InitChoice::Builtin => Ok(inst.model.reference_init()),
                InitChoice::Truth => Ok(inst.truth_labels.clone()),
                InitChoice::CorruptedTruth(f) => {
                    Ok(corrupt_labels(&inst.model, &inst.truth_labels, *f, &mut rng))
                }
            };
            measure_replicate(&inst.model, &inst.truth_labels, &inst.theta_star, init)
        }
        BenchInstance::Z2(inst) => {
            let init = match &spec.init {
                InitChoice::Builtin => inst.model.eigenvector_init(),
                InitChoice::Truth => Ok(inst.truth_labels.clone()),
                InitChoice::CorruptedTruth(f) => {
                    Ok(corrupt_labels(&inst.model, &inst.truth_labels, *f, &mut rng))
                }
            };
            measure_replicate(&inst.model, &inst.truth_labels, &inst.truth_block, init)
        }
        BenchInstance::Zk(inst) => {
            let init = match &spec.init {
                InitChoice::Builtin => inst.model.spectral_init(&mut rng),
                InitChoice::Truth => Ok(inst.truth_labels.clone()),
                InitChoice::CorruptedTruth(f) => {
                    Ok(corrupt_labels(&inst.model, &inst.truth_labels, *f, &mut rng))
                }
            };
            measure_replicate(&inst.model, &inst.truth_labels, &inst.truth_block, init)
        }
        BenchInstance::Perm(inst) => {
            let init = match &spec.init {
                InitChoice::Builtin => inst.model.spectral_init(),
                InitChoice::Truth => Ok(inst.truth_labels.clone()),
                InitChoice::CorruptedTruth(f) => {
                    Ok(corrupt_labels(&inst.model, &inst.truth_labels, *f, &mut rng))
                }
            };
            measure_replicate(&inst.model, &inst.truth_labels, &inst.truth_block, init)
        }
    }
}

/// Order-preserving parallel map over contiguous chunks; results depend only
/// on the input order, never on scheduling.
fn parallel_map<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(
    threads: usize,
    items: &[T],
    f: F,
) -> Vec<U> {
    let threads = if threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        threads
    };
    let threads = threads.min(items.len()).max(1);
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut results: Vec<Vec<U>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(f).collect::<Vec<U>>())
            })
            .collect();
        for h in handles {
            results.push(h.join().expect("sweep worker panicked"));
        }
    });
    results.into_iter().flatten().collect()
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n <= 1 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

fn aggregate(snr_param: f64, outcomes: Vec<ReplicateOutcome>) -> GridPointReport {
    let ok: Vec<&ReplicateOutcome> = outcomes.iter().filter(|o| o.failure.is_none()).collect();
    let finals: Vec<f64> = ok.iter().map(|o| o.final_error).collect();
    let ideals: Vec<f64> = ok.iter().map(|o| o.ideal_error).collect();

    let horizon = ok.iter().map(|o| o.losses.len()).max().unwrap_or(0);
    let mut mean_loss_trajectory = vec![0.0f64; horizon];
    for o in &ok {
        for (t, slot) in mean_loss_trajectory.iter_mut().enumerate() {
            // Past a fixed point the labels, and hence the loss, are constant.
            *slot += o.losses.get(t).or(o.losses.last()).copied().unwrap_or(f64::NAN);
        }
    }
    for slot in &mut mean_loss_trajectory {
        *slot /= ok.len() as f64;
    }

    GridPointReport {
        snr_param,
        mean_error: mean(&finals),
        median_error: median(&finals),
        stderr_error: stderr(&finals),
        mean_loss_trajectory,
        ideal_error: mean(&ideals),
        outcomes,
    }
}

/// Runs the grid x replicates Monte Carlo experiment. Fully deterministic
/// given the sweep description: every replicate draws from a child seed
/// derived from its (grid, replicate) index, and aggregation folds in index
/// order.
pub fn run_sweep(spec: &SweepSpec) -> ExperimentReport {
    assert!(spec.replicates >= 1, "need at least one replicate");
    assert!(!spec.grid.is_empty(), "empty signal grid");
    assert!(
        spec.grid.windows(2).all(|w| w[0] <= w[1]),
        "signal grid must be ascending"
    );

    let jobs: Vec<(usize, usize)> = (0..spec.grid.len())
        .flat_map(|g| (0..spec.replicates).map(move |r| (g, r)))
        .collect();
    let outcomes = parallel_map(spec.threads, &jobs, |&(g, r)| run_cell(spec, g, r));

    let mut by_point: Vec<Vec<ReplicateOutcome>> = spec.grid.iter().map(|_| Vec::new()).collect();
    for ((g, _), outcome) in jobs.into_iter().zip(outcomes) {
        by_point[g].push(outcome);
    }
    let points = spec
        .grid
        .iter()
        .zip(by_point)
        .map(|(&v, outs)| aggregate(v, outs))
        .collect();
    ExperimentReport { spec: spec.clone(), points }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub snr_param: f64,
    pub mean_error: f64,
    /// -log(mean error) over the model's theory exponent; 1 means the decay
    /// rate matches the theory exactly.
    pub ratio: f64,
    /// Mean error was exactly zero: the ratio is evaluated at the resolution
    /// floor 1/(replicates * p), so the true ratio is at least this value.
    pub floored: bool,
}

pub fn rate_table(report: &ExperimentReport) -> Vec<RateRow> {
    let p = report.spec.params.coords() as f64;
    let reps = report.spec.replicates as f64;
    report
        .points
        .iter()
        .map(|pt| {
            let exponent = report.spec.params.theory_exponent(pt.snr_param);
            let floored = pt.mean_error == 0.0;
            let m = if floored { 1.0 / (reps * p) } else { pt.mean_error };
            RateRow { snr_param: pt.snr_param, mean_error: pt.mean_error, ratio: -m.ln() / exponent, floored }
        })
        .collect()
}

fn equivalence<M: OracleStep + ?Sized>(model: &M) -> Result<(), String> {
    let table = brute_force_map(model);
    for (z, expected) in &table.rows {
        let got = one_step(model, z).map_err(|e| failure_code(&e).to_string());
        if &got != expected {
            return Err(format!(
                "one-step image of {z:?} is {got:?}, brute force says {expected:?}"
            ));
        }
    }
    Ok(())
}

/// Certifies `one_step` against the brute-force table on this instance.
pub fn oracle_equivalence(instance: &BenchInstance) -> Result<(), String> {
    match instance {
        BenchInstance::Gmm(i) => equivalence(&i.model),
        BenchInstance::Rank(i) => equivalence(&i.model),
        BenchInstance::Sign(i) => equivalence(&i.model),
        BenchInstance::Mra(i) => equivalence(&i.model),
        BenchInstance::Z2(i) => equivalence(&i.model),
        BenchInstance::Zk(i) => equivalence(&i.model),
        BenchInstance::Perm(i) => equivalence(&i.model),
    }
}

/// Built-in verification: brute-force equivalence on small instances of all
/// seven models, the zero-noise and determinism invariants, and the
/// ideal-versus-iterative ordering. Returns one message per failure.
pub fn selftest() -> Vec<String> {
    let mut failures = Vec::new();

    let equivalence_cases: Vec<(&str, BenchParams, u64)> = vec![
        (
            "gmm",
            BenchParams::Gmm(GmmParams { p: 4, k: 2, d: 2, delta_min: 2.0, noise_scale: 1.0 }),
            10,
        ),
        ("rank", BenchParams::Rank(RankingParams { p: 4, beta_star: 0.5, c_p: 2.0 }), 10),
        ("sign", BenchParams::Sign(SignParams { n: 8, p: 4, s: 1, lambda: 1.5 }), 3),
        (
            "mra",
            BenchParams::Mra(MraParams { d: 3, p: 3, delta_min_sq: 4.0, noise_scale: 1.0 }),
            10,
        ),
        ("sync-z2", BenchParams::Z2(Z2Params { p: 3, lambda_star: 1.0 }), 10),
        ("sync-zk", BenchParams::Zk(ZkParams { p: 3, k: 3, lambda_star: 1.0 }), 10),
        ("sync-perm", BenchParams::Perm(PermSyncParams { p: 4, d: 3, lambda_star: 1.0 }), 3),
    ];
    for (name, params, seeds) in equivalence_cases {
        for seed in 0..seeds {
            let inst = generate(&params, &mut Rng::seed_from_u64(seed));
            if let Err(msg) = oracle_equivalence(&inst) {
                failures.push(format!("{name} seed {seed}: {msg}"));
            }
        }
    }

    // Zero noise + truth init: exact recovery in a single round.
    let zero_noise: Vec<(&str, BenchParams)> = vec![
        (
            "gmm",
            BenchParams::Gmm(GmmParams { p: 30, k: 3, d: 4, delta_min: 3.0, noise_scale: 0.0 }),
        ),
        ("mra", BenchParams::Mra(MraParams { d: 6, p: 10, delta_min_sq: 8.0, noise_scale: 0.0 })),
    ];
    for (name, params) in zero_noise {
        let spec = SweepSpec {
            params,
            grid: vec![3.0],
            replicates: 2,
            seed: 17,
            init: InitChoice::Truth,
            threads: 1,
        };
        let report = run_sweep(&spec);
        for o in &report.points[0].outcomes {
            if o.failure.is_some() || o.final_error != 0.0 || o.iterations != 1 || !o.converged {
                failures.push(format!("{name}: zero-noise truth-init replicate was not exact"));
            }
        }
    }

    // Determinism and thread invariance on a small clustering sweep.
    let base = SweepSpec {
        params: BenchParams::Gmm(GmmParams { p: 40, k: 2, d: 3, delta_min: 0.0, noise_scale: 1.0 }),
        grid: vec![3.0, 5.0],
        replicates: 3,
        seed: 5,
        init: InitChoice::Builtin,
        threads: 1,
    };
    let first = run_sweep(&base);
    let second = run_sweep(&base);
    if first != second {
        failures.push("repeated sweep differs from the first run".to_string());
    }
    let threaded = run_sweep(&SweepSpec { threads: 2, ..base.clone() });
    if threaded.points != first.points {
        failures.push("two-thread sweep differs from the serial one".to_string());
    }

    // The one-shot fit-at-truth baseline can never beat the iterative runs
    // systematically.
    for pt in &first.points {
        if pt.ideal_error > pt.mean_error + 3.0 * pt.stderr_error + 1e-12 {
            failures.push(format!(
                "ideal baseline {} exceeds iterative {} + 3 stderr at signal {}",
                pt.ideal_error, pt.mean_error, pt.snr_param
            ));
        }
    }

    failures
}
