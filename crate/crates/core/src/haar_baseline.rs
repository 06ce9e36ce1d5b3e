//! Haar-average entanglement, the saturation values of the random circuit.
//!
//! For a Haar-random pure state of N qubits and an m-qubit marginal with
//! `d_A = 2^m ≤ d_B = 2^(N−m)`:
//!
//! * average purity (Lubkin): `⟨Tr ρ²⟩ = (d_A + d_B)/(d_A·d_B + 1)`;
//! * average entropy in nats (Page):
//!   `Σ_{k=d_B+1}^{d_A·d_B} 1/k − (d_A − 1)/(2 d_B)`.
//!
//! Both are mapped onto the normalized measures used throughout the crate.
//! [`monte_carlo_baseline`] estimates the same numbers by sampling.

use num_complex::Complex;

use crate::entanglement::{MeasureKind, ProfileEvaluator};
use crate::error::{invalid, Result};
use crate::qstate::StateVector;
use crate::rng::RngStream;
use crate::scalar::Real;

/// Largest register for which Haar states are sampled.
pub const MAX_SAMPLED_QUBITS: usize = 16;

/// Haar averages E_Haar^(m) for every level and their mean E_Haar.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineTable<T: Real> {
    pub num_qubits: usize,
    pub measure: MeasureKind,
    /// `per_level[m - 1]` is E_Haar^(m).
    pub per_level: Vec<T>,
    pub global: T,
}

impl<T: Real> BaselineTable<T> {
    /// Baseline for level `m`, or for the global mean when `m` is `None`.
    pub fn value(&self, m: Option<usize>) -> T {
        match m {
            Some(m) => self.per_level[m - 1],
            None => self.global,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate<T: Real> {
    pub mean: T,
    /// Sample standard deviation over √samples.
    pub std_error: T,
    pub samples: usize,
}

fn check_level(n: usize, m: usize) -> Result<()> {
    if n > crate::qstate::MAX_QUBITS {
        return Err(invalid!("qubit count {n} exceeds {}", crate::qstate::MAX_QUBITS));
    }
    if m < 1 || 2 * m > n {
        return Err(invalid!("subset size m = {m} outside 1..={} for N = {n}", n / 2));
    }
    Ok(())
}

/// Haar average of the normalized linear entropy of an m-qubit marginal.
pub fn lubkin_linear_baseline<T: Real>(n: usize, m: usize) -> Result<T> {
    check_level(n, m)?;
    let da = 1u64 << m;
    let db = 1u64 << (n - m);
    let d = da * db;
    // (d_A/(d_A−1))·(1 − (d_A+d_B)/(d+1)) as one ratio of exact integers.
    let num = da * (d + 1 - da - db);
    let den = (da - 1) * (d + 1);
    Ok(T::from_u64(num).unwrap() / T::from_u64(den).unwrap())
}

/// Haar average of the base-2 von Neumann entropy of an m-qubit marginal,
/// divided by m.
pub fn page_vn_baseline<T: Real>(n: usize, m: usize) -> Result<T> {
    check_level(n, m)?;
    let da = 1usize << m;
    let db = 1usize << (n - m);
    // Smallest terms first.
    let harmonic: T = ((db + 1)..=(da * db))
        .rev()
        .map(|k| T::from_count(k).recip())
        .sum();
    let nats = harmonic - T::from_count(da - 1) / T::from_count(2 * db);
    Ok(nats / T::LN_2() / T::from_count(m))
}

pub fn level_baseline<T: Real>(n: usize, m: usize, measure: MeasureKind) -> Result<T> {
    match measure {
        MeasureKind::Linear => lubkin_linear_baseline(n, m),
        MeasureKind::VonNeumann => page_vn_baseline(n, m),
    }
}

/// Analytic baselines for every level of an N-qubit register.
pub fn haar_global_baseline<T: Real>(n: usize, measure: MeasureKind) -> Result<BaselineTable<T>> {
    if n < 2 {
        return Err(invalid!("baseline needs at least 2 qubits, got {n}"));
    }
    let per_level = (1..=n / 2)
        .map(|m| level_baseline(n, m, measure))
        .collect::<Result<Vec<T>>>()?;
    let global = per_level.iter().copied().sum::<T>() / T::from_count(per_level.len());
    Ok(BaselineTable {
        num_qubits: n,
        measure,
        per_level,
        global,
    })
}

/// Haar-random pure state: independent standard complex Gaussian
/// amplitudes, normalized.
pub fn sample_haar_state<T: Real>(n: usize, stream: &mut RngStream) -> Result<StateVector<T>> {
    if !(1..=MAX_SAMPLED_QUBITS).contains(&n) {
        return Err(invalid!("Haar state sampling supports 1..={MAX_SAMPLED_QUBITS} qubits, got {n}"));
    }
    let amps = (0..1usize << n)
        .map(|_| Complex::new(T::standard_normal(stream), T::standard_normal(stream)))
        .collect();
    StateVector::normalized(amps)
}

/// Mean and standard error of `values`.
pub fn mean_and_std_error<T: Real>(values: &[T]) -> MonteCarloEstimate<T> {
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (n - T::one());
    MonteCarloEstimate {
        mean,
        std_error: (var / n).sqrt(),
        samples: values.len(),
    }
}

/// Monte Carlo estimate of E^(m) over `samples` independent Haar states.
pub fn monte_carlo_baseline<T: Real>(
    n: usize,
    m: usize,
    measure: MeasureKind,
    samples: usize,
    stream: &mut RngStream,
) -> Result<MonteCarloEstimate<T>> {
    if samples < 100 {
        return Err(invalid!("Monte Carlo baseline needs at least 100 samples, got {samples}"));
    }
    check_level(n, m)?;
    let evaluator = ProfileEvaluator::new(n)?;
    let values = (0..samples)
        .map(|_| {
            let state = sample_haar_state::<T>(n, stream)?;
            evaluator.level(&state, m, measure)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(mean_and_std_error(&values))
}
