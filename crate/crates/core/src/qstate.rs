//! Dense statevector simulation.
//!
//! Bit convention: basis index `b` has bit `k` equal to the state of qubit
//! `k`, so qubit 0 is the least significant bit. Two-qubit gates are 4×4
//! matrices indexed by `2·(bit of first target) + (bit of second target)`,
//! i.e. in the order |00⟩, |01⟩, |10⟩, |11⟩ with the first target as the
//! high bit.
//!
//! Gates are applied in place over the amplitude array by visiting each
//! group of amplitudes that differ only on the target bits. Nothing is ever
//! renormalized; unitarity of the gates is what keeps the norm at one.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::rng::RngStream;
use crate::scalar::Real;

/// Largest register this simulator accepts.
pub const MAX_QUBITS: usize = 24;

#[inline]
fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Insert a zero bit at position `pos`, shifting higher bits up.
#[inline]
fn insert_zero_bit(k: usize, pos: usize) -> usize {
    let low = k & ((1 << pos) - 1);
    ((k >> pos) << (pos + 1)) | low
}

/// Normalized pure state of `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state |basis_index⟩.
    pub fn new_basis_state(num_qubits: usize, basis_index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(invalid!(
                "basis index {basis_index} out of range for {num_qubits} qubits"
            ));
        }
        let mut amplitudes = vec![czero(); dim];
        amplitudes[basis_index] = cone();
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// The all-zero product state |00…0⟩.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::new_basis_state(num_qubits, 0)
    }

    /// Wrap an explicit amplitude array. The length must be a power of two
    /// and the norm must be one to within `sqrt(ROUNDOFF_FLOOR)`.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid!("amplitude count {len} is not a power of two ≥ 2"));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let drift = (state.norm_sqr() - T::one()).abs();
        if drift > T::ROUNDOFF_FLOOR.sqrt() {
            return Err(invalid!("state is not normalized (|norm² − 1| = {drift:e})"));
        }
        Ok(state)
    }

    /// Normalize an arbitrary nonzero amplitude array.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(invalid!("cannot normalize a zero vector"));
        }
        let inv = norm.recip();
        for a in &mut amplitudes {
            *a = a.scale(inv);
        }
        Self::from_amplitudes(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            Err(invalid!(
                "qubit {q} out of range for a {}-qubit state",
                self.num_qubits
            ))
        } else {
            Ok(())
        }
    }

    /// Apply `gate` to `qubit`.
    pub fn apply_single(&mut self, gate: &SingleQubitGate<T>, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let [[a, b], [c, d]] = gate.m;
        let bit = 1usize << qubit;
        for k in 0..self.dim() / 2 {
            let i0 = insert_zero_bit(k, qubit);
            let i1 = i0 | bit;
            let x0 = self.amplitudes[i0];
            let x1 = self.amplitudes[i1];
            self.amplitudes[i0] = a * x0 + b * x1;
            self.amplitudes[i1] = c * x0 + d * x1;
        }
        Ok(())
    }

    /// Apply `gate` with `qubit_i` as its first (high-bit) target and
    /// `qubit_j` as its second.
    pub fn apply_two(
        &mut self,
        gate: &TwoQubitGate<T>,
        qubit_i: usize,
        qubit_j: usize,
    ) -> Result<()> {
        self.check_qubit(qubit_i)?;
        self.check_qubit(qubit_j)?;
        if qubit_i == qubit_j {
            return Err(invalid!("two-qubit gate targets must differ (both {qubit_i})"));
        }
        let (lo, hi) = (qubit_i.min(qubit_j), qubit_i.max(qubit_j));
        let bi = 1usize << qubit_i;
        let bj = 1usize << qubit_j;
        let m = &gate.m;
        for k in 0..self.dim() / 4 {
            let base = insert_zero_bit(insert_zero_bit(k, lo), hi);
            let idx = [base, base | bj, base | bi, base | bi | bj];
            let x = idx.map(|i| self.amplitudes[i]);
            for (row, &out) in m.iter().zip(idx.iter()) {
                self.amplitudes[out] =
                    row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
            }
        }
        Ok(())
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(invalid!("qubit count {n} outside 1..={MAX_QUBITS}"))
    }
}

fn unitarity_error<const D: usize, T: Real>(m: &[[Complex<T>; D]; D]) -> T {
    let mut worst = T::zero();
    for i in 0..D {
        for j in 0..D {
            let mut acc = czero::<T>();
            for row in m.iter() {
                acc = acc + row[i].conj() * row[j];
            }
            let target = if i == j { cone() } else { czero() };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

fn dagger<const D: usize, T: Real>(m: &[[Complex<T>; D]; D]) -> [[Complex<T>; D]; D] {
    let mut out = [[czero(); D]; D];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = v.conj();
        }
    }
    out
}

/// 2×2 unitary acting on one qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitGate<T: Real> {
    m: [[Complex<T>; 2]; 2],
}

impl<T: Real> SingleQubitGate<T> {
    /// Validate and wrap a matrix; rejects anything not unitary to within
    /// `sqrt(ROUNDOFF_FLOOR)`.
    pub fn from_matrix(m: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let err = unitarity_error(&m);
        if err > T::ROUNDOFF_FLOOR.sqrt() {
            return Err(invalid!("matrix is not unitary (error {err:e})"));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self {
            m: [[cone(), czero()], [czero(), cone()]],
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            m: [[czero(), cone()], [cone(), czero()]],
        }
    }

    pub fn hadamard() -> Self {
        let h = creal(T::FRAC_1_SQRT_2());
        Self {
            m: [[h, h], [h, -h]],
        }
    }

    pub fn matrix(&self) -> &[[Complex<T>; 2]; 2] {
        &self.m
    }

    pub fn dagger(&self) -> Self {
        Self { m: dagger(&self.m) }
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> T {
        unitarity_error(&self.m)
    }

    /// `self · other` as matrices (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let mut m = [[czero(); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[i][0] * other.m[0][j] + self.m[i][1] * other.m[1][j];
            }
        }
        Self { m }
    }
}

/// Haar-random element of U(2).
///
/// Draws a 2×2 complex Ginibre matrix and takes the unitary factor of its QR
/// decomposition with the diagonal of R fixed real and positive. The first
/// column is the normalized first Gaussian column; the second is the unit
/// vector orthogonal to it, phased so that its overlap with the second
/// Gaussian column is real and positive. Constructing the complement
/// directly keeps the output unitary to machine precision even for
/// ill-conditioned draws.
pub fn sample_haar_u2<T: Real>(stream: &mut RngStream) -> SingleQubitGate<T> {
    loop {
        let mut g = || Complex::new(T::standard_normal(stream), T::standard_normal(stream));
        let (z00, z10, z01, z11) = (g(), g(), g(), g());

        let r11 = (z00.norm_sqr() + z10.norm_sqr()).sqrt();
        if !(r11 > T::min_positive_value()) {
            continue;
        }
        let (a, b) = (z00.unscale(r11), z10.unscale(r11));
        // Unit vector orthogonal to (a, b).
        let (wa, wb) = (-b.conj(), a.conj());
        let overlap = wa.conj() * z01 + wb.conj() * z11;
        let r22 = overlap.norm();
        if !(r22 > T::min_positive_value()) {
            continue;
        }
        let phase = overlap.unscale(r22);
        return SingleQubitGate {
            m: [[a, wa * phase], [b, wb * phase]],
        };
    }
}

/// 4×4 unitary acting on an ordered pair of qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitGate<T: Real> {
    m: [[Complex<T>; 4]; 4],
}

impl<T: Real> TwoQubitGate<T> {
    pub fn from_matrix(m: [[Complex<T>; 4]; 4]) -> Result<Self> {
        let err = unitarity_error(&m);
        if err > T::ROUNDOFF_FLOOR.sqrt() {
            return Err(invalid!("matrix is not unitary (error {err:e})"));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        let mut m = [[czero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = cone();
        }
        Self { m }
    }

    /// CNOT with the first target as control.
    pub fn cnot() -> Self {
        let mut m = [[czero(); 4]; 4];
        m[0][0] = cone();
        m[1][1] = cone();
        m[2][3] = cone();
        m[3][2] = cone();
        Self { m }
    }

    /// Kronecker product `first ⊗ second`, with `first` on the high bit.
    pub fn kron(first: &SingleQubitGate<T>, second: &SingleQubitGate<T>) -> Self {
        let mut m = [[czero(); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = first.m[r >> 1][c >> 1] * second.m[r & 1][c & 1];
            }
        }
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex<T>; 4]; 4] {
        &self.m
    }

    pub fn dagger(&self) -> Self {
        Self { m: dagger(&self.m) }
    }

    pub fn unitarity_error(&self) -> T {
        unitarity_error(&self.m)
    }

    /// Nonlocal part `exp(−i Σ_k λ_k σ_k⊗σ_k)` of a two-qubit gate, built
    /// from its Bell-basis eigendecomposition.
    ///
    /// The four Bell states diagonalize every `σ_k⊗σ_k` simultaneously, so the
    /// exponential is a sum of four projectors weighted by the phases
    ///
    /// | eigenvector          | phase                       |
    /// |----------------------|-----------------------------|
    /// | (\|00⟩+\|11⟩)/√2     | exp(−i(λx − λy + λz))       |
    /// | (\|00⟩−\|11⟩)/√2     | exp(−i(−λx + λy + λz))      |
    /// | (\|01⟩+\|10⟩)/√2     | exp(−i(λx + λy − λz))       |
    /// | (\|01⟩−\|10⟩)/√2     | exp(+i(λx + λy + λz))       |
    ///
    /// Any λ is accepted; values outside the symmetry-reduced cube
    /// `[0, π/4]³` set the returned flag.
    pub fn canonical(lambda: [T; 3]) -> CanonicalGate<T> {
        let [x, y, z] = lambda;
        let cis = |theta: T| Complex::new(theta.cos(), theta.sin());
        let p_phi_plus = cis(-(x - y + z));
        let p_phi_minus = cis(-(-x + y + z));
        let p_psi_plus = cis(-(x + y - z));
        let p_psi_minus = cis(x + y + z);
        let half = T::cast(0.5);

        // Σ_k p_k |B_k⟩⟨B_k| only couples {|00⟩,|11⟩} and {|01⟩,|10⟩}.
        let d0 = (p_phi_plus + p_phi_minus).scale(half);
        let o0 = (p_phi_plus - p_phi_minus).scale(half);
        let d1 = (p_psi_plus + p_psi_minus).scale(half);
        let o1 = (p_psi_plus - p_psi_minus).scale(half);

        let mut m = [[czero(); 4]; 4];
        m[0][0] = d0;
        m[3][3] = d0;
        m[0][3] = o0;
        m[3][0] = o0;
        m[1][1] = d1;
        m[2][2] = d1;
        m[1][2] = o1;
        m[2][1] = o1;

        let upper = T::FRAC_PI_4();
        let in_range = lambda.iter().all(|&l| l >= T::zero() && l <= upper);
        CanonicalGate {
            gate: Self { m },
            outside_reduced_range: !in_range,
        }
    }

    /// The entangler `U_φ`: a real rotation by φ in the {|00⟩, |11⟩}
    /// subspace, identity on |01⟩ and |10⟩. Defined for φ ∈ [0, π].
    pub fn entangler(phi: T) -> Result<Self> {
        if !(phi >= T::zero() && phi <= T::PI()) {
            return Err(invalid!("entangler angle {phi} outside [0, π]"));
        }
        let (s, c) = phi.sin_cos();
        let mut m = [[czero(); 4]; 4];
        m[0][0] = creal(c);
        m[0][3] = creal(s);
        m[1][1] = cone();
        m[2][2] = cone();
        m[3][0] = creal(-s);
        m[3][3] = creal(c);
        Ok(Self { m })
    }
}

/// Result of [`TwoQubitGate::canonical`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalGate<T: Real> {
    pub gate: TwoQubitGate<T>,
    /// Set when some λ_k lies outside `[0, π/4]`.
    pub outside_reduced_range: bool,
}
