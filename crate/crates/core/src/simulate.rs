//! State-vector simulation, circuit-matrix extraction and measurement
//! sampling.
//!
//! Gate application is a direct pairwise update over the amplitudes whose
//! index satisfies the gate's conditions: `O(2^m)` per gate with unit
//! constant. Macros are applied as permutations. Measurement is sampling
//! only; no state collapse, since nothing here measures mid-circuit.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::ir::{
    Circuit, Complex, Direction, Gate, GateKind, PermSpec, bit_reverse, index_bit,
    rotate_bits_left, rotate_bits_right,
};
use crate::transforms::DenseMatrix;

/// Residual amplitude allowed outside the ancilla-zero subspace when
/// extracting a circuit's matrix.
pub const ANCILLA_LEAK_TOL: f64 = 1e-10;
/// Largest data register extract_matrix() will materialize.
pub const MAX_EXTRACT_QUBITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("state dimension {got} does not match the circuit ({expected} expected)")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("qubit {qubit} out of range for a {qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, qubits: usize },
    #[error("basis index {index} out of range for dimension {dim}")]
    BasisOutOfRange { index: usize, dim: usize },
    #[error("amplitudes must be finite")]
    NonFinite,
    #[error("ancilla leak: residual amplitude {residual:.3e} outside the ancilla-zero subspace")]
    AncillaLeak { residual: f64 },
    #[error("data register of {0} qubits exceeds the extraction limit")]
    TooLarge(usize),
}

/// Amplitudes of an `m`-qubit register, indexed by the crate's bit
/// convention (qubit 0 least significant).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, 0).expect("index 0 always valid")
    }

    /// Basis state `|index⟩`.
    pub fn basis(qubits: usize, index: usize) -> Result<Self, SimError> {
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(SimError::BasisOutOfRange { index, dim });
        }
        let mut amps = vec![Complex::new(0.0, 0.0); dim];
        amps[index] = Complex::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector
    /// is not required to be normalized (sampling normalizes).
    pub fn from_amplitudes(amps: Vec<Complex>) -> Result<Self, SimError> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(SimError::NotPowerOfTwo(amps.len()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::NonFinite);
        }
        Ok(Self {
            qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Destination of basis state `k` under a permutation gate.
fn perm_image(spec: &PermSpec, k: usize, data_qubits: usize) -> usize {
    let mask = (1usize << data_qubits) - 1;
    let (data, rest) = (k & mask, k & !mask);
    let moved = match spec {
        PermSpec::BitReversal => bit_reverse(data, data_qubits),
        PermSpec::RotateWires(Direction::Left) => rotate_bits_left(data, data_qubits),
        PermSpec::RotateWires(Direction::Right) => rotate_bits_right(data, data_qubits),
        PermSpec::Transposition(i, j) => {
            if data == *i {
                *j
            } else if data == *j {
                *i
            } else {
                data
            }
        }
        PermSpec::WireSwap(a, b) => {
            let (ba, bb) = (index_bit(k, *a), index_bit(k, *b));
            let mut out = k;
            out = crate::ir::with_bit(out, *a, bb);
            out = crate::ir::with_bit(out, *b, ba);
            return out; // may involve ancilla wires, no data mask
        }
    };
    rest | moved
}

/// Applies one gate in place. Conditions are evaluated on the full index;
/// only amplitudes meeting them change.
pub fn apply_gate(psi: &mut StateVector, gate: &Gate, data_qubits: usize) -> Result<(), SimError> {
    let dim = psi.dim();
    let qubits = psi.qubits;
    let oob = |q: usize| SimError::QubitOutOfRange { qubit: q, qubits };
    if let Some(q) = gate.conds.qubits().find(|&q| q >= qubits) {
        return Err(oob(q));
    }
    match &gate.kind {
        GateKind::Single { target, op } => {
            if *target >= qubits {
                return Err(oob(*target));
            }
            let u = op.matrix();
            let (u00, u01) = (u.entry(0, 0), u.entry(0, 1));
            let (u10, u11) = (u.entry(1, 0), u.entry(1, 1));
            let t = 1usize << target;
            for base in 0..dim {
                if base & t != 0 || !gate.conds.satisfied_by(base) {
                    continue;
                }
                let a0 = psi.amps[base];
                let a1 = psi.amps[base | t];
                psi.amps[base] = u00 * a0 + u01 * a1;
                psi.amps[base | t] = u10 * a0 + u11 * a1;
            }
        }
        GateKind::Perm(spec) => {
            if let PermSpec::WireSwap(a, b) = spec
                && (*a >= qubits || *b >= qubits)
            {
                return Err(oob((*a).max(*b)));
            }
            let mut out = psi.amps.clone();
            for k in 0..dim {
                if gate.conds.satisfied_by(k) {
                    out[perm_image(spec, k, data_qubits)] = psi.amps[k];
                }
            }
            psi.amps = out;
        }
        GateKind::TwosComplement { lo, hi } => {
            if *hi >= qubits {
                return Err(oob(*hi));
            }
            let width = hi - lo + 1;
            let mask = ((1usize << width) - 1) << lo;
            let mut out = psi.amps.clone();
            for k in 0..dim {
                if !gate.conds.satisfied_by(k) {
                    continue;
                }
                let v = (k & mask) >> lo;
                let comp = (1usize << width).wrapping_sub(v) & ((1usize << width) - 1);
                out[(k & !mask) | (comp << lo)] = psi.amps[k];
            }
            psi.amps = out;
        }
    }
    Ok(())
}

/// Runs a circuit. The input may cover the data qubits only (ancillas are
/// appended in `|0⟩`) or the full register.
pub fn run(circuit: &Circuit, psi0: &StateVector) -> Result<StateVector, SimError> {
    let total = circuit.total_qubits();
    let mut psi = if psi0.qubits == total {
        psi0.clone()
    } else if psi0.qubits == circuit.data_qubits() {
        let mut amps = psi0.amps.clone();
        amps.resize(1usize << total, Complex::new(0.0, 0.0));
        StateVector {
            qubits: total,
            amps,
        }
    } else {
        return Err(SimError::DimensionMismatch {
            expected: 1usize << total,
            got: psi0.dim(),
        });
    };
    for gate in circuit.gates() {
        apply_gate(&mut psi, gate, circuit.data_qubits())?;
    }
    Ok(psi)
}

/// A circuit matrix restricted to the data register, plus the worst
/// amplitude observed outside the ancilla-zero subspace.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub matrix: DenseMatrix,
    pub max_ancilla_residual: f64,
}

/// Simulates every data basis state and assembles the circuit's matrix on
/// the ancilla-zero subspace. Fails with [`SimError::AncillaLeak`] when any
/// residual amplitude outside that subspace exceeds [`ANCILLA_LEAK_TOL`].
pub fn extract_matrix(circuit: &Circuit) -> Result<Extraction, SimError> {
    let n = circuit.data_qubits();
    if n > MAX_EXTRACT_QUBITS {
        return Err(SimError::TooLarge(n));
    }
    let dim = 1usize << n;
    let mut residual = 0.0f64;
    let mut columns = Vec::with_capacity(dim);
    for k in 0..dim {
        let out = run(circuit, &StateVector::basis(n, k)?)?;
        for amp in &out.amps[dim..] {
            residual = residual.max(amp.norm());
        }
        columns.push(out.amps[..dim].to_vec());
    }
    if residual > ANCILLA_LEAK_TOL {
        return Err(SimError::AncillaLeak { residual });
    }
    Ok(Extraction {
        matrix: DenseMatrix::from_columns(columns),
        max_ancilla_residual: residual,
    })
}

fn uniform_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sample_index(psi: &StateVector, rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = psi.amps.iter().map(|a| a.norm_sqr()).sum();
    let mut target = uniform_unit(rng) * total;
    for (k, amp) in psi.amps.iter().enumerate() {
        target -= amp.norm_sqr();
        if target < 0.0 {
            return k;
        }
    }
    psi.dim() - 1
}

/// Samples one measurement of all qubits: basis index `k` is returned with
/// probability `|ψ_k|² / ‖ψ‖²`. The state is not mutated. Deterministic in
/// the seed.
pub fn measure_all(psi: &StateVector, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_index(psi, &mut rng)
}

/// Histogram of `shots` independent samples from one seeded generator.
pub fn sample_counts(psi: &StateVector, shots: u64, seed: u64) -> BTreeMap<usize, u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(sample_index(psi, &mut rng)).or_insert(0) += 1;
    }
    counts
}
