//! Shared oracles and generators for the integration tests. Everything
//! here recomputes semantics from first principles so the checks stay
//! independent of the library's own gate-application path.
#![allow(dead_code)]

use qxform::ir::{
    Circuit, ConditionSet, Direction, Gate, GateKind, PermSpec, SingleOp, Unitary2, bit_reverse,
    index_bit, rotate_bits_left, rotate_bits_right,
};
use qxform::{Complex, DenseMatrix};

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::{RngCore, SeedableRng};

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Kronecker product, the brute-force tensor oracle.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (da, db) = (a.dim(), b.dim());
    DenseMatrix::from_fn(da * db, |r, col| {
        a.get(r / db, col / db) * b.get(r % db, col % db)
    })
}

pub fn h2() -> DenseMatrix {
    let s = 1.0 / 2.0_f64.sqrt();
    DenseMatrix::from_fn(2, |r, col| c(if r == 1 && col == 1 { -s } else { s }, 0.0))
}

/// Dense matrix of one conditioned gate on `qubits` qubits, built directly
/// from the conditional-operation definition: basis states meeting every
/// condition have the 2×2 unitary applied to the target bit, all others
/// are fixed. Macros map basis states by their defining permutation.
pub fn dense_gate_matrix(gate: &Gate, qubits: usize, data_qubits: usize) -> DenseMatrix {
    let dim = 1usize << qubits;
    let mut m = DenseMatrix::zeros(dim);
    for x in 0..dim {
        if !gate.conds.satisfied_by(x) {
            m.set(x, x, c(1.0, 0.0));
            continue;
        }
        match &gate.kind {
            GateKind::Single { target, op } => {
                let u = op.matrix();
                let bit = usize::from(index_bit(x, *target));
                let flipped = x ^ (1 << target);
                // Column x: amplitude u[bit][bit] stays, u[1-bit][bit] moves.
                m.set(x, x, u.entry(bit, bit));
                m.set(flipped, x, u.entry(1 - bit, bit));
            }
            GateKind::Perm(spec) => {
                let mask = (1usize << data_qubits) - 1;
                let (data, rest) = (x & mask, x & !mask);
                let image = match spec {
                    PermSpec::BitReversal => rest | bit_reverse(data, data_qubits),
                    PermSpec::RotateWires(Direction::Left) => {
                        rest | rotate_bits_left(data, data_qubits)
                    }
                    PermSpec::RotateWires(Direction::Right) => {
                        rest | rotate_bits_right(data, data_qubits)
                    }
                    PermSpec::Transposition(i, j) => {
                        if data == *i {
                            rest | j
                        } else if data == *j {
                            rest | i
                        } else {
                            x
                        }
                    }
                    PermSpec::WireSwap(a, b) => {
                        let (ba, bb) = (index_bit(x, *a), index_bit(x, *b));
                        let mut out = x & !(1 << a) & !(1 << b);
                        if bb {
                            out |= 1 << a;
                        }
                        if ba {
                            out |= 1 << b;
                        }
                        out
                    }
                };
                m.set(image, x, c(1.0, 0.0));
            }
            GateKind::TwosComplement { lo, hi } => {
                let width = hi - lo + 1;
                let vmask = (1usize << width) - 1;
                let v = (x >> lo) & vmask;
                let comp = (1usize << width).wrapping_sub(v) & vmask;
                m.set((x & !(vmask << lo)) | (comp << lo), x, c(1.0, 0.0));
            }
        }
    }
    m
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn rand_range(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Haar-ish random 2×2 unitary from four angles.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Unitary2 {
    let tau = std::f64::consts::TAU;
    let (alpha, beta, delta) = (uniform(rng) * tau, uniform(rng) * tau, uniform(rng) * tau);
    let gamma = uniform(rng) * std::f64::consts::PI;
    let (cg, sg) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let e = |t: f64| c(t.cos(), t.sin());
    let g = e(alpha);
    Unitary2::new([
        [
            g * e(-(beta + delta) / 2.0) * cg,
            -(g * e(-(beta - delta) / 2.0) * sg),
        ],
        [
            g * e((beta - delta) / 2.0) * sg,
            g * e((beta + delta) / 2.0) * cg,
        ],
    ])
    .expect("angle construction is unitary")
}

pub fn random_single_op(rng: &mut ChaCha8Rng) -> SingleOp {
    let tau = std::f64::consts::TAU;
    match rng.next_u64() % 6 {
        0 => SingleOp::X,
        1 => SingleOp::Z,
        2 => SingleOp::H,
        3 => SingleOp::Phase(uniform(rng) * tau - std::f64::consts::PI),
        4 => SingleOp::Rot(uniform(rng) * tau - std::f64::consts::PI),
        _ => SingleOp::Unitary(random_unitary(rng)),
    }
}

/// A random conditioned single-qubit gate on `qubits` wires.
pub fn random_conditioned_gate(rng: &mut ChaCha8Rng, qubits: usize) -> Gate {
    let target = rand_range(rng, qubits);
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    for q in 0..qubits {
        if q == target {
            continue;
        }
        match rng.next_u64() % 3 {
            0 => ones.push(q),
            1 => zeros.push(q),
            _ => {}
        }
    }
    Gate::controlled(
        target,
        random_single_op(rng),
        ConditionSet::new(ones, zeros).expect("disjoint"),
    )
}

pub fn random_conditioned_circuit(rng: &mut ChaCha8Rng, qubits: usize, gates: usize) -> Circuit {
    let mut circuit = Circuit::new(qubits, "random").expect("qubits >= 1");
    for _ in 0..gates {
        circuit
            .push(random_conditioned_gate(rng, qubits))
            .expect("valid by construction");
    }
    circuit
}

/// Random unit-norm state on `qubits` qubits.
pub fn random_state(rng: &mut ChaCha8Rng, qubits: usize) -> Vec<Complex> {
    let dim = 1usize << qubits;
    let mut amps: Vec<Complex> = (0..dim)
        .map(|_| c(uniform(rng) * 2.0 - 1.0, uniform(rng) * 2.0 - 1.0))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    amps
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
