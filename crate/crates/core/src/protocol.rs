//! The random two-qubit gate protocol and its convergence analysis.
//!
//! Each step picks a pair of qubits `(i, j)` according to the coupling
//! geometry, applies the fixed two-qubit gate `W` to the pair and then a
//! fresh Haar-random rotation to each of the two qubits, i.e. the state is
//! multiplied by `V_i V_j W_ij`. Realizations start from |00…0⟩ and each one
//! consumes its own [`RngStream`] `(seed, realization_index)`, so ensemble
//! results do not depend on how realizations are scheduled.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::entanglement::{MeasureKind, ProfileEvaluator};
use crate::error::{invalid, Error, Result};
use crate::haar_baseline::{haar_global_baseline, BaselineTable};
use crate::qstate::{sample_haar_u2, StateVector, TwoQubitGate, MAX_QUBITS};
use crate::rng::RngStream;
use crate::scalar::Real;

/// Realizations reduced per batch in [`run_ensemble`]. The batch boundaries
/// and the summation order inside them are fixed, so the ensemble mean is
/// bitwise reproducible for any number of workers.
const ENSEMBLE_BATCH: usize = 64;

/// Which pairs of qubits a gate may couple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    /// Any two distinct qubits.
    NonLocal,
    /// Nearest neighbours on a chain.
    LocalOpen,
    /// Nearest neighbours on a ring.
    LocalPeriodic,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::NonLocal => "nonlocal",
            GeometryKind::LocalOpen => "local-open",
            GeometryKind::LocalPeriodic => "local-periodic",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonlocal" => Ok(GeometryKind::NonLocal),
            "local-open" => Ok(GeometryKind::LocalOpen),
            "local-periodic" => Ok(GeometryKind::LocalPeriodic),
            other => Err(invalid!("unknown geometry {other:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig<T: Real> {
    pub num_qubits: usize,
    pub geometry: GeometryKind,
    pub fixed_gate: TwoQubitGate<T>,
    pub realizations: usize,
    pub max_gates: usize,
    /// Entanglement is recorded at gate indices 0, stride, 2·stride, …
    pub eval_stride: usize,
    pub seed: u64,
    pub measures: Vec<MeasureKind>,
    /// ΔE level that counts as converged.
    pub threshold: T,
    /// Recorded points after the crossing that must also stay below
    /// `threshold`.
    pub confirm_window: usize,
}

impl<T: Real> ProtocolConfig<T> {
    /// Defaults: non-local geometry, 1000 realizations, 400 gates recorded at
    /// every step, seed 42, linear entropy, threshold 0.01, window 10.
    pub fn new(num_qubits: usize, fixed_gate: TwoQubitGate<T>) -> Self {
        Self {
            num_qubits,
            geometry: GeometryKind::NonLocal,
            fixed_gate,
            realizations: 1000,
            max_gates: 400,
            eval_stride: 1,
            seed: 42,
            measures: vec![MeasureKind::Linear],
            threshold: T::cast(0.01),
            confirm_window: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_QUBITS).contains(&self.num_qubits) {
            return Err(invalid!("protocol needs 2..={MAX_QUBITS} qubits, got {}", self.num_qubits));
        }
        if self.realizations < 1 {
            return Err(invalid!("at least one realization is required"));
        }
        if self.eval_stride < 1 {
            return Err(invalid!("evaluation stride must be at least 1"));
        }
        if !(self.threshold > T::zero() && self.threshold < T::one()) {
            return Err(invalid!("threshold {} outside (0, 1)", self.threshold));
        }
        if self.measures.is_empty() {
            return Err(invalid!("no entanglement measure requested"));
        }
        Ok(())
    }

    /// Gate indices at which entanglement is recorded.
    pub fn recorded_gates(&self) -> Vec<usize> {
        (0..=self.max_gates).step_by(self.eval_stride).collect()
    }
}

/// Draw the pair of qubits for the next gate. The first element is the
/// gate's first target.
pub fn pick_pair(geometry: GeometryKind, n: usize, stream: &mut RngStream) -> (usize, usize) {
    debug_assert!(n >= 2);
    match geometry {
        GeometryKind::NonLocal => {
            let i = stream.below(n);
            let mut j = stream.below(n - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        }
        GeometryKind::LocalOpen => {
            let k = stream.below(n - 1);
            (k, k + 1)
        }
        GeometryKind::LocalPeriodic => {
            let k = stream.below(n);
            (k, (k + 1) % n)
        }
    }
}

/// One protocol step: `W` on the chosen pair, then a Haar rotation on each
/// of its qubits.
pub fn step<T: Real>(
    state: &mut StateVector<T>,
    config: &ProtocolConfig<T>,
    stream: &mut RngStream,
) -> Result<()> {
    let (i, j) = pick_pair(config.geometry, state.num_qubits(), stream);
    state.apply_two(&config.fixed_gate, i, j)?;
    let vi = sample_haar_u2(stream);
    let vj = sample_haar_u2(stream);
    state.apply_single(&vi, i)?;
    state.apply_single(&vj, j)
}

/// Where a value sits in the level hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    /// E^(m), the average over m-qubit subsets.
    Subset(usize),
    /// E, the mean over all levels.
    Global,
}

impl Level {
    /// All levels of an N-qubit register, subsets first.
    pub fn all(n: usize) -> impl Iterator<Item = Level> {
        (1..=n / 2).map(Level::Subset).chain(std::iter::once(Level::Global))
    }

    fn slot(self, num_levels: usize) -> usize {
        match self {
            Level::Subset(m) => m - 1,
            Level::Global => num_levels,
        }
    }

    fn baseline<T: Real>(self, table: &BaselineTable<T>) -> T {
        match self {
            Level::Subset(m) => table.value(Some(m)),
            Level::Global => table.global,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Subset(m) => write!(f, "{m}"),
            Level::Global => f.write_str("global"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "global" {
            return Ok(Level::Global);
        }
        s.parse::<usize>()
            .ok()
            .filter(|&m| m >= 1)
            .map(Level::Subset)
            .ok_or_else(|| invalid!("unknown level {s:?}"))
    }
}

/// Entanglement recorded along one realization. Values are stored
/// record-major, then by measure, then by level slot (E^(1)…E^(L), E).
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationSeries<T: Real> {
    pub gate_indices: Vec<usize>,
    pub measures: Vec<MeasureKind>,
    pub num_levels: usize,
    values: Vec<T>,
}

impl<T: Real> RealizationSeries<T> {
    fn slots(&self) -> usize {
        self.measures.len() * (self.num_levels + 1)
    }

    pub fn value(&self, record: usize, measure: MeasureKind, level: Level) -> Option<T> {
        let k = self.measures.iter().position(|&m| m == measure)?;
        let slot = level.slot(self.num_levels);
        if slot > self.num_levels || record >= self.gate_indices.len() {
            return None;
        }
        Some(self.values[record * self.slots() + k * (self.num_levels + 1) + slot])
    }

    pub fn raw(&self) -> &[T] {
        &self.values
    }
}

/// Evolve one realization from |00…0⟩ for `max_gates` steps using stream
/// `(seed, realization_index)`.
pub fn run_realization<T: Real>(
    config: &ProtocolConfig<T>,
    realization_index: usize,
) -> Result<RealizationSeries<T>> {
    config.validate()?;
    if realization_index >= config.realizations {
        return Err(invalid!(
            "realization {realization_index} out of range for {} realizations",
            config.realizations
        ));
    }
    let evaluator = ProfileEvaluator::new(config.num_qubits)?;
    realization_with(config, &evaluator, realization_index)
}

fn realization_with<T: Real>(
    config: &ProtocolConfig<T>,
    evaluator: &ProfileEvaluator,
    index: usize,
) -> Result<RealizationSeries<T>> {
    let mut stream = RngStream::new(config.seed, index as u64);
    let mut state = StateVector::zero_state(config.num_qubits)?;
    let gate_indices = config.recorded_gates();
    let num_levels = evaluator.num_levels();
    let mut values = Vec::with_capacity(gate_indices.len() * config.measures.len() * (num_levels + 1));

    let record = |state: &StateVector<T>, values: &mut Vec<T>| -> Result<()> {
        for profile in evaluator.profiles(state, &config.measures)? {
            values.extend_from_slice(&profile.per_level);
            values.push(profile.global);
        }
        Ok(())
    };

    record(&state, &mut values)?;
    for gate in 1..=config.max_gates {
        step(&mut state, config, &mut stream)?;
        if gate % config.eval_stride == 0 {
            record(&state, &mut values)?;
        }
    }
    Ok(RealizationSeries {
        gate_indices,
        measures: config.measures.clone(),
        num_levels,
        values,
    })
}

/// Ensemble-averaged entanglement ⟨E⟩ and the normalized distance
/// ΔE = (E_Haar − ⟨E⟩)/E_Haar for every measure and level.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T: Real> {
    pub num_qubits: usize,
    pub realizations: usize,
    pub gate_indices: Vec<usize>,
    pub measures: Vec<MeasureKind>,
    pub num_levels: usize,
    /// One analytic baseline table per entry of `measures`.
    pub baselines: Vec<BaselineTable<T>>,
    mean: Vec<T>,
    delta: Vec<T>,
}

/// One (measure, level) column of a [`Trajectory`].
#[derive(Clone, Debug, PartialEq)]
pub struct Series<T: Real> {
    pub measure: MeasureKind,
    pub level: Level,
    pub gate_indices: Vec<usize>,
    pub mean: Vec<T>,
    pub delta: Vec<T>,
}

impl<T: Real> Series<T> {
    /// Series built from explicit ΔE values, mainly for analysis of
    /// externally produced data.
    pub fn from_delta(gate_indices: Vec<usize>, delta: Vec<T>) -> Result<Self> {
        if gate_indices.len() != delta.len() {
            return Err(invalid!(
                "{} gate indices but {} ΔE values",
                gate_indices.len(),
                delta.len()
            ));
        }
        Ok(Self {
            measure: MeasureKind::Linear,
            level: Level::Global,
            mean: vec![T::nan(); delta.len()],
            gate_indices,
            delta,
        })
    }
}

impl<T: Real> Trajectory<T> {
    fn slots(&self) -> usize {
        self.measures.len() * (self.num_levels + 1)
    }

    /// Every (measure, level) pair present, in storage order.
    pub fn keys(&self) -> Vec<(MeasureKind, Level)> {
        self.measures
            .iter()
            .flat_map(|&m| Level::all(self.num_qubits).map(move |l| (m, l)))
            .collect()
    }

    pub fn series(&self, measure: MeasureKind, level: Level) -> Option<Series<T>> {
        let k = self.measures.iter().position(|&m| m == measure)?;
        if let Level::Subset(m) = level {
            if m == 0 || m > self.num_levels {
                return None;
            }
        }
        let offset = k * (self.num_levels + 1) + level.slot(self.num_levels);
        let stride = self.slots();
        let pick = |v: &[T]| v.iter().skip(offset).step_by(stride).copied().collect();
        Some(Series {
            measure,
            level,
            gate_indices: self.gate_indices.clone(),
            mean: pick(&self.mean),
            delta: pick(&self.delta),
        })
    }
}

/// Average all realizations of `config` on the current rayon pool.
pub fn run_ensemble<T: Real>(config: &ProtocolConfig<T>) -> Result<Trajectory<T>> {
    config.validate()?;
    let evaluator = ProfileEvaluator::new(config.num_qubits)?;
    let gate_indices = config.recorded_gates();
    let num_levels = evaluator.num_levels();
    let slots = config.measures.len() * (num_levels + 1);
    let mut sum = vec![T::zero(); gate_indices.len() * slots];

    for start in (0..config.realizations).step_by(ENSEMBLE_BATCH) {
        let end = (start + ENSEMBLE_BATCH).min(config.realizations);
        let batch = (start..end)
            .into_par_iter()
            .map(|r| realization_with(config, &evaluator, r))
            .collect::<Result<Vec<_>>>()?;
        for series in &batch {
            for (acc, &v) in sum.iter_mut().zip(&series.values) {
                *acc = *acc + v;
            }
        }
    }

    let count = T::from_count(config.realizations);
    let mean: Vec<T> = sum.into_iter().map(|s| s / count).collect();
    let baselines = config
        .measures
        .iter()
        .map(|&m| haar_global_baseline(config.num_qubits, m))
        .collect::<Result<Vec<_>>>()?;

    let mut delta = vec![T::zero(); mean.len()];
    for (k, table) in baselines.iter().enumerate() {
        for level in Level::all(config.num_qubits) {
            let haar = level.baseline(table);
            let offset = k * (num_levels + 1) + level.slot(num_levels);
            for rec in 0..gate_indices.len() {
                let i = rec * slots + offset;
                delta[i] = (haar - mean[i]) / haar;
            }
        }
    }

    Ok(Trajectory {
        num_qubits: config.num_qubits,
        realizations: config.realizations,
        gate_indices,
        measures: config.measures.clone(),
        num_levels,
        baselines,
        mean,
        delta,
    })
}

/// Run `f` on a dedicated rayon pool with `workers` threads.
pub fn with_workers<R, F>(workers: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| invalid!("cannot start {workers} workers: {e}"))?;
    Ok(pool.install(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    /// First recorded gate index at which convergence was confirmed.
    Converged(usize),
    NotConverged,
}

impl Convergence {
    pub fn gates(self) -> Option<usize> {
        match self {
            Convergence::Converged(n) => Some(n),
            Convergence::NotConverged => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayFit<T: Real> {
    /// Decay rate of ΔE per gate.
    Rate(T),
    Unfit,
}

impl<T: Real> DecayFit<T> {
    pub fn rate(self) -> Option<T> {
        match self {
            DecayFit::Rate(r) => Some(r),
            DecayFit::Unfit => None,
        }
    }
}

/// First recorded gate index where ΔE ≤ `threshold` and stays there for the
/// next `confirm_window` recorded points. The whole window must have been
/// recorded.
pub fn convergence_gate_count<T: Real>(
    series: &Series<T>,
    threshold: T,
    confirm_window: usize,
) -> Convergence {
    let delta = &series.delta;
    let mut run = 0usize;
    // Walk backwards counting how many consecutive points from i onward are
    // below threshold; the earliest i with a long enough run wins.
    let mut found = None;
    for i in (0..delta.len()).rev() {
        if delta[i] <= threshold {
            run += 1;
            if run > confirm_window {
                found = Some(i);
            }
        } else {
            run = 0;
        }
    }
    match found {
        Some(i) => Convergence::Converged(series.gate_indices[i]),
        None => Convergence::NotConverged,
    }
}

/// Least-squares slope of ln ΔE against gate index over the recorded points
/// with ΔE in `[fit_lo, fit_hi]`, negated. Needs at least five points and a
/// positive rate.
pub fn fit_decay_rate<T: Real>(series: &Series<T>, fit_hi: T, fit_lo: T) -> DecayFit<T> {
    if !(fit_hi > fit_lo && fit_lo > T::zero()) {
        return DecayFit::Unfit;
    }
    let points: Vec<(T, T)> = series
        .gate_indices
        .iter()
        .zip(&series.delta)
        .filter(|(_, &d)| d >= fit_lo && d <= fit_hi)
        .map(|(&g, &d)| (T::from_count(g), d.ln()))
        .collect();
    if points.len() < 5 {
        return DecayFit::Unfit;
    }
    let n = T::from_count(points.len());
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: T = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let rate = -sxy / sxx;
    if rate.is_finite() && rate > T::zero() {
        DecayFit::Rate(rate)
    } else {
        DecayFit::Unfit
    }
}

/// Default ΔE window for the decay-rate fit.
pub const DEFAULT_FIT_HI: f64 = 0.5;
pub const DEFAULT_FIT_LO: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceEntry<T: Real> {
    pub measure: MeasureKind,
    pub level: Level,
    pub n_gates: Convergence,
    pub decay_rate: DecayFit<T>,
    /// (ΔE_hi, ΔE_lo) used for the fit.
    pub fit_range: (T, T),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport<T: Real> {
    pub entries: Vec<ConvergenceEntry<T>>,
}

impl<T: Real> ConvergenceReport<T> {
    pub fn get(&self, measure: MeasureKind, level: Level) -> Option<&ConvergenceEntry<T>> {
        self.entries
            .iter()
            .find(|e| e.measure == measure && e.level == level)
    }

    pub fn all_converged(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.n_gates != Convergence::NotConverged)
    }
}

pub fn convergence_report<T: Real>(
    traj: &Trajectory<T>,
    threshold: T,
    confirm_window: usize,
    fit_hi: T,
    fit_lo: T,
) -> ConvergenceReport<T> {
    let entries = traj
        .keys()
        .into_iter()
        .map(|(measure, level)| {
            let s = traj.series(measure, level).expect("key comes from the trajectory");
            ConvergenceEntry {
                measure,
                level,
                n_gates: convergence_gate_count(&s, threshold, confirm_window),
                decay_rate: fit_decay_rate(&s, fit_hi, fit_lo),
                fit_range: (fit_hi, fit_lo),
            }
        })
        .collect();
    ConvergenceReport { entries }
}

/// One point of a λ sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaRow<T: Real> {
    pub lambda: [T; 3],
    pub n_gates: Convergence,
}

/// Gate counts for canonical gates over the ordered cube
/// `λx ≥ λy ≥ λz` drawn from `grid`, judged on the global linear measure.
/// Permutations of λ are locally equivalent, so the ordered cube covers
/// every distinct gate of the grid.
pub fn sweep_lambda<T: Real>(base: &ProtocolConfig<T>, grid: &[T]) -> Result<Vec<LambdaRow<T>>> {
    let mut rows = Vec::new();
    for (a, &x) in grid.iter().enumerate() {
        for (b, &y) in grid.iter().enumerate().take(a + 1) {
            for &z in grid.iter().take(b + 1) {
                let mut config = base.clone();
                config.fixed_gate = TwoQubitGate::canonical([x, y, z]).gate;
                config.measures = vec![MeasureKind::Linear];
                let traj = run_ensemble(&config)?;
                let series = traj
                    .series(MeasureKind::Linear, Level::Global)
                    .expect("linear measure was requested");
                rows.push(LambdaRow {
                    lambda: [x, y, z],
                    n_gates: convergence_gate_count(&series, config.threshold, config.confirm_window),
                });
            }
        }
    }
    Ok(rows)
}
