//! Bipartite marginals and the multipartite entanglement measures built on
//! them.
//!
//! For a state of N qubits and a subset size m, the level entanglement
//! E^(m) is the average, over all nonequivalent m-qubit subsets, of a
//! normalized entropy of the subset's reduced density matrix. The global
//! entanglement E is the mean of E^(1), …, E^(⌊N/2⌋). When m = N/2 a subset
//! and its complement give the same value, so only subsets that contain
//! qubit 0 are enumerated.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::qstate::StateVector;
use crate::scalar::Real;

/// Which mixedness measure to apply to each marginal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureKind {
    /// `(2^m/(2^m − 1))·(1 − Tr ρ²)`
    Linear,
    /// `−(1/m)·Tr ρ log₂ ρ`
    VonNeumann,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 2] = [MeasureKind::Linear, MeasureKind::VonNeumann];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Linear => "linear",
            MeasureKind::VonNeumann => "vonneumann",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(MeasureKind::Linear),
            "vonneumann" => Ok(MeasureKind::VonNeumann),
            other => Err(invalid!("unknown measure {other:?}")),
        }
    }
}

/// The kept side of a bipartition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    kept: Vec<usize>,
}

impl Bipartition {
    /// Build from qubit indices; they are sorted and must be distinct.
    pub fn new(mut kept: Vec<usize>) -> Result<Self> {
        kept.sort_unstable();
        if kept.is_empty() {
            return Err(invalid!("bipartition keeps no qubits"));
        }
        if kept.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid!("bipartition has repeated qubits {kept:?}"));
        }
        Ok(Self { kept })
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn m(&self) -> usize {
        self.kept.len()
    }

    /// The complementary qubit set within an `n`-qubit register.
    pub fn complement(&self, n: usize) -> Result<Self> {
        Self::new((0..n).filter(|q| !self.kept.contains(q)).collect())
    }
}

/// All nonequivalent m-qubit subsets of an N-qubit register, in
/// lexicographic order. Yields `C(N, m)` subsets, or `C(N, m)/2` when
/// `2m = N`, keeping the representative that contains qubit 0.
pub fn enumerate_bipartitions(n: usize, m: usize) -> Result<Vec<Bipartition>> {
    if m < 1 || 2 * m > n {
        return Err(invalid!("subset size m = {m} outside 1..={} for N = {n}", n / 2));
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..m).collect();
    loop {
        if 2 * m != n || combo[0] == 0 {
            out.push(Bipartition { kept: combo.clone() });
        }
        // Advance to the next combination.
        let mut i = m;
        while i > 0 && combo[i - 1] == n - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        combo[i - 1] += 1;
        for k in i..m {
            combo[k] = combo[k - 1] + 1;
        }
    }
    Ok(out)
}

/// Number of nonequivalent m-subsets: `C(N, m)`, halved when `2m = N`.
pub fn bipartition_count(n: usize, m: usize) -> usize {
    let mut c: usize = 1;
    for k in 0..m {
        c = c * (n - k) / (k + 1);
    }
    if 2 * m == n {
        c / 2
    } else {
        c
    }
}

/// Reduced density matrix of an m-qubit subsystem, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    num_qubits: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Wrap explicit entries; the matrix must be square with a power-of-two
    /// dimension. No positivity check is done here.
    pub fn from_entries(entries: Vec<Complex<T>>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt() as usize;
        if dim * dim != entries.len() || dim < 2 || !dim.is_power_of_two() {
            return Err(invalid!("{} entries is not a 2^m × 2^m matrix", entries.len()));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            entries,
        })
    }

    /// Maximally mixed state on m qubits.
    pub fn maximally_mixed(m: usize) -> Self {
        let dim = 1usize << m;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        let w = T::from_count(dim).recip();
        for i in 0..dim {
            entries[i * dim + i] = Complex::new(w, T::zero());
        }
        Self {
            num_qubits: m,
            entries,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    /// `Tr ρ²`, as the squared Frobenius norm.
    pub fn purity(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.entries, self.dim())
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Precomputed index tables for one bipartition of an N-qubit register:
/// every basis index is `kept_offsets[s] | env_offsets[e]`.
#[derive(Clone, Debug)]
pub struct MarginalPlan {
    part: Bipartition,
    kept_offsets: Vec<usize>,
    env_offsets: Vec<usize>,
}

/// Scatter the bits of `k` onto the listed positions.
fn scatter(k: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .filter(|(bit, _)| k >> bit & 1 == 1)
        .fold(0, |acc, (_, &pos)| acc | 1 << pos)
}

impl MarginalPlan {
    pub fn new(n: usize, part: Bipartition) -> Result<Self> {
        if part.kept.iter().any(|&q| q >= n) || part.m() >= n {
            return Err(invalid!("bipartition {:?} invalid for N = {n}", part.kept));
        }
        let env: Vec<usize> = (0..n).filter(|q| !part.kept.contains(q)).collect();
        let kept_offsets = (0..1usize << part.m()).map(|s| scatter(s, &part.kept)).collect();
        let env_offsets = (0..1usize << env.len()).map(|e| scatter(e, &env)).collect();
        Ok(Self {
            part,
            kept_offsets,
            env_offsets,
        })
    }

    pub fn bipartition(&self) -> &Bipartition {
        &self.part
    }

    /// `ρ[s, s'] = Σ_e ψ[s ⊕ e] · conj(ψ[s' ⊕ e])`.
    pub fn reduce<T: Real>(&self, state: &StateVector<T>) -> DensityMatrix<T> {
        let psi = state.amplitudes();
        let dim = self.kept_offsets.len();
        let zero = Complex::new(T::zero(), T::zero());
        let mut entries = vec![zero; dim * dim];
        for (s, &ks) in self.kept_offsets.iter().enumerate() {
            for (t, &kt) in self.kept_offsets.iter().enumerate().skip(s) {
                let mut acc = zero;
                for &e in &self.env_offsets {
                    acc = acc + psi[ks | e] * psi[kt | e].conj();
                }
                entries[s * dim + t] = acc;
                entries[t * dim + s] = acc.conj();
            }
            entries[s * dim + s].im = T::zero();
        }
        DensityMatrix {
            num_qubits: self.part.m(),
            entries,
        }
    }
}

/// Partial trace of `|ψ⟩⟨ψ|` over the complement of `part`.
pub fn reduced_density_matrix<T: Real>(
    state: &StateVector<T>,
    part: &Bipartition,
) -> Result<DensityMatrix<T>> {
    Ok(MarginalPlan::new(state.num_qubits(), part.clone())?.reduce(state))
}

/// Normalized linear entropy of an m-qubit marginal, clamped to [0, 1].
pub fn linear_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    let d = T::from_count(rho.dim());
    let s = d / (d - T::one()) * (T::one() - rho.purity());
    s.max(T::zero()).min(T::one())
}

/// Base-2 von Neumann entropy divided by the number of marginal qubits.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let eig = rho.eigenvalues();
    if let Some(&low) = eig.first() {
        if low < -T::ROUNDOFF_FLOOR {
            return Err(Error::NumericalDegeneracy(format!(
                "density matrix eigenvalue {low:e} is below −{:e}",
                T::ROUNDOFF_FLOOR
            )));
        }
    }
    let h: T = eig
        .into_iter()
        .map(|p| p.max(T::zero()).min(T::one()))
        .filter(|&p| p > T::zero())
        .map(|p| -p * p.log2())
        .sum();
    let s = h / T::from_count(rho.num_qubits());
    Ok(s.max(T::zero()).min(T::one()))
}

pub fn marginal_entropy<T: Real>(rho: &DensityMatrix<T>, measure: MeasureKind) -> Result<T> {
    match measure {
        MeasureKind::Linear => Ok(linear_entropy(rho)),
        MeasureKind::VonNeumann => von_neumann_entropy(rho),
    }
}

/// Per-level averages E^(m) and their mean E.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementProfile<T: Real> {
    pub measure: MeasureKind,
    /// `per_level[m - 1]` is E^(m).
    pub per_level: Vec<T>,
    pub global: T,
}

/// Cached marginal plans for every level of an N-qubit register, so that
/// repeated evaluation inside a simulation loop does no index bookkeeping.
#[derive(Clone, Debug)]
pub struct ProfileEvaluator {
    num_qubits: usize,
    levels: Vec<Vec<MarginalPlan>>,
}

impl ProfileEvaluator {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid!("global entanglement needs at least 2 qubits, got {n}"));
        }
        let levels = (1..=n / 2)
            .map(|m| {
                enumerate_bipartitions(n, m)?
                    .into_iter()
                    .map(|p| MarginalPlan::new(n, p))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            num_qubits: n,
            levels,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of levels, ⌊N/2⌋.
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    fn check_state<T: Real>(&self, state: &StateVector<T>) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(invalid!(
                "evaluator built for {} qubits, state has {}",
                self.num_qubits,
                state.num_qubits()
            ));
        }
        Ok(())
    }

    pub fn level<T: Real>(
        &self,
        state: &StateVector<T>,
        m: usize,
        measure: MeasureKind,
    ) -> Result<T> {
        self.check_state(state)?;
        let plans = self
            .levels
            .get(m.wrapping_sub(1))
            .ok_or_else(|| invalid!("level m = {m} outside 1..={}", self.levels.len()))?;
        let mut sum = T::zero();
        for plan in plans {
            sum = sum + marginal_entropy(&plan.reduce(state), measure)?;
        }
        Ok(sum / T::from_count(plans.len()))
    }

    pub fn profile<T: Real>(
        &self,
        state: &StateVector<T>,
        measure: MeasureKind,
    ) -> Result<EntanglementProfile<T>> {
        let per_level = (1..=self.levels.len())
            .map(|m| self.level(state, m, measure))
            .collect::<Result<Vec<T>>>()?;
        let global = per_level.iter().copied().sum::<T>() / T::from_count(per_level.len());
        Ok(EntanglementProfile {
            measure,
            per_level,
            global,
        })
    }

    /// Profiles for several measures, reducing each marginal only once.
    pub fn profiles<T: Real>(
        &self,
        state: &StateVector<T>,
        measures: &[MeasureKind],
    ) -> Result<Vec<EntanglementProfile<T>>> {
        self.check_state(state)?;
        let mut sums = vec![vec![T::zero(); self.levels.len()]; measures.len()];
        for (lvl, plans) in self.levels.iter().enumerate() {
            for plan in plans {
                let rho = plan.reduce(state);
                for (k, &measure) in measures.iter().enumerate() {
                    sums[k][lvl] = sums[k][lvl] + marginal_entropy(&rho, measure)?;
                }
            }
        }
        Ok(measures
            .iter()
            .zip(sums)
            .map(|(&measure, sums)| {
                let per_level: Vec<T> = sums
                    .into_iter()
                    .zip(&self.levels)
                    .map(|(s, plans)| s / T::from_count(plans.len()))
                    .collect();
                let global =
                    per_level.iter().copied().sum::<T>() / T::from_count(per_level.len());
                EntanglementProfile {
                    measure,
                    per_level,
                    global,
                }
            })
            .collect())
    }
}

/// E^(m): mean entropy over all nonequivalent m-qubit marginals.
pub fn level_entanglement<T: Real>(
    state: &StateVector<T>,
    m: usize,
    measure: MeasureKind,
) -> Result<T> {
    let n = state.num_qubits();
    let mut sum = T::zero();
    let parts = enumerate_bipartitions(n, m)?;
    for part in &parts {
        sum = sum + marginal_entropy(&reduced_density_matrix(state, part)?, measure)?;
    }
    Ok(sum / T::from_count(parts.len()))
}

/// E^(m) for every level and the global mean E.
pub fn global_entanglement<T: Real>(
    state: &StateVector<T>,
    measure: MeasureKind,
) -> Result<EntanglementProfile<T>> {
    ProfileEvaluator::new(state.num_qubits())?.profile(state, measure)
}
