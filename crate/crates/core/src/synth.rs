//! Circuit builders for the four transforms.
//!
//! Each builder follows its transform's divide-and-conquer factorization:
//! the size-N circuit is the size-N/2 circuit on the low qubits wrapped in
//! a constant-depth block of (possibly multiply-conditioned) gates on the
//! top qubit. Gates are emitted in time order, i.e. the rightmost factor
//! of the matrix product first. Macros (wire permutations, two's
//! complement) are kept symbolic so the output matches the defining
//! recursion block for block; `crate::lower` expands them.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::ir::{Circuit, Complex, ConditionSet, Direction, Gate, PermSpec, SingleOp, Unitary2};
use crate::transforms::{self, DenseMatrix, MAX_QUBITS, MAX_SLANT_QUBITS, SizeError, slant_coeffs};

/// The transform families this crate synthesizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Dft,
    Walsh,
    Slant,
    Hartley,
}

impl Transform {
    pub const ALL: [Transform; 4] = [
        Transform::Dft,
        Transform::Walsh,
        Transform::Slant,
        Transform::Hartley,
    ];

    pub fn max_qubits(self) -> usize {
        match self {
            Transform::Slant => MAX_SLANT_QUBITS,
            _ => MAX_QUBITS,
        }
    }

    /// The dense ground-truth matrix for this transform.
    pub fn oracle(self, n: usize) -> Result<DenseMatrix, SizeError> {
        match self {
            Transform::Dft => transforms::dft_matrix(n),
            Transform::Walsh => transforms::wht_matrix(n),
            Transform::Slant => transforms::slant_matrix(n),
            Transform::Hartley => transforms::dht_matrix(n),
        }
    }

    /// The circuit realizing this transform on `n` qubits.
    pub fn build(self, n: usize) -> Result<Circuit, SizeError> {
        match self {
            Transform::Dft => build_qft(n),
            Transform::Walsh => build_walsh(n),
            Transform::Slant => build_slant(n),
            Transform::Hartley => build_hartley(n),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Dft => "dft",
            Transform::Walsh => "walsh",
            Transform::Slant => "slant",
            Transform::Hartley => "hartley",
        })
    }
}

impl FromStr for Transform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dft" | "fourier" => Ok(Transform::Dft),
            "walsh" | "wht" => Ok(Transform::Walsh),
            "slant" => Ok(Transform::Slant),
            "hartley" | "dht" => Ok(Transform::Hartley),
            other => Err(format!(
                "unknown transform `{other}` (expected dft, walsh, slant or hartley)"
            )),
        }
    }
}

/// A synthesis request as the CLI sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthRequest {
    pub transform: Transform,
    pub n: usize,
    /// Lower the result to elementary gates.
    pub lower: bool,
}

/// How `build_qft` emits its wire permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QftPermStyle {
    /// Fold every level's rotation into one trailing `BITREV` macro.
    #[default]
    DeferredBitReversal,
    /// Emit the per-level rotations where the recursion places them.
    PerLevelRotations,
}

fn check_n(transform: Transform, n: usize) -> Result<(), SizeError> {
    let max = transform.max_qubits();
    if n < 1 || n > max {
        return Err(SizeError::QubitCount { n, min: 1, max });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Walsh-Hadamard

/// `W_N = (1_2 ⊗ W_{N/2}) (H ⊗ 1_{N/2})`, base `W_2 = H`: one Hadamard per
/// qubit, top qubit first. Exactly `n` gates.
pub fn build_walsh(n: usize) -> Result<Circuit, SizeError> {
    check_n(Transform::Walsh, n)?;
    let mut c = Circuit::new(n, format!("walsh{n}")).expect("n >= 1");
    for q in (0..n).rev() {
        c.push(Gate::h(q)).expect("in range");
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Fourier

/// Emits the size-`span` left rotation of wires `0..span` as adjacent
/// swaps; a rotation covering the whole register uses the macro.
fn push_rotate_left(c: &mut Circuit, span: usize) {
    if span < 2 {
        return;
    }
    if span == c.data_qubits() {
        c.push(Gate::perm(PermSpec::RotateWires(Direction::Left)))
            .expect("valid");
        return;
    }
    for i in (0..span - 1).rev() {
        c.push(Gate::perm(PermSpec::WireSwap(i, i + 1)))
            .expect("valid");
    }
}

fn push_rotate_right(c: &mut Circuit, span: usize) {
    if span < 2 {
        return;
    }
    if span == c.data_qubits() {
        c.push(Gate::perm(PermSpec::RotateWires(Direction::Right)))
            .expect("valid");
        return;
    }
    for i in 0..span - 1 {
        c.push(Gate::perm(PermSpec::WireSwap(i, i + 1)))
            .expect("valid");
    }
}

/// Fourier circuit with the deferred bit-reversal permutation.
pub fn build_qft(n: usize) -> Result<Circuit, SizeError> {
    build_qft_with(n, QftPermStyle::DeferredBitReversal)
}

/// Recursion level with top qubit `m` (register size `2^{m+1}`): a Hadamard
/// on qubit `m`, then the twiddle block — for `j = m−1 .. 0` a phase
/// `diag(1, e^{2πi·2^j/2^{m+1}})` on qubit `j` one-conditioned on qubit `m`.
/// The per-level wire rotation (top wire to the bottom) commutes out of the
/// recursion; deferred style replaces the whole cascade by one bit
/// reversal.
pub fn build_qft_with(n: usize, style: QftPermStyle) -> Result<Circuit, SizeError> {
    check_n(Transform::Dft, n)?;
    let mut c = Circuit::new(n, format!("dft{n}")).expect("n >= 1");
    for m in (0..n).rev() {
        c.push(Gate::h(m)).expect("in range");
        for j in (0..m).rev() {
            let theta = TAU * (1u64 << j) as f64 / (1u64 << (m + 1)) as f64;
            c.push(Gate::controlled(
                j,
                SingleOp::Phase(theta),
                ConditionSet::one(m),
            ))
            .expect("in range");
        }
    }
    match style {
        QftPermStyle::DeferredBitReversal => {
            if n >= 2 {
                c.push(Gate::perm(PermSpec::BitReversal)).expect("valid");
            }
        }
        QftPermStyle::PerLevelRotations => {
            for span in 2..=n {
                push_rotate_left(&mut c, span);
            }
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Slant

/// Builds `[[a, b], [−b, a]]` from the Slant coefficients for size `2^k`.
fn slant_mixer(size: usize) -> Result<Unitary2, SizeError> {
    let (a, b) = slant_coeffs(size)?;
    Ok(Unitary2::new([
        [Complex::new(a, 0.0), Complex::new(b, 0.0)],
        [Complex::new(-b, 0.0), Complex::new(a, 0.0)],
    ])
    .expect("coefficients satisfy a^2 + b^2 = 1"))
}

/// Slant circuit. Level `k` appends, after the recursive half-size circuit
/// on qubits `0..k−1`, the block `Q_N` as six gates (all conditions below
/// are additionally zero-conditioned on the middle qubits `1..k−1`):
/// a `Z` on qubit 0 one-conditioned on the top qubit (the single sign
/// flip), `H` on the top qubit (the butterfly), the coefficient mixer
/// `[[a, b], [−b, a]]` on qubit 0 one-conditioned on the top qubit, and a
/// conditional swap of qubit 0 with the top qubit as three conditioned
/// NOTs (the transposition of basis states 1 and N/2).
pub fn build_slant(n: usize) -> Result<Circuit, SizeError> {
    check_n(Transform::Slant, n)?;
    let mut c = Circuit::new(n, format!("slant{n}")).expect("n >= 1");
    c.push(Gate::h(0)).expect("in range");
    for k in 2..=n {
        let top = k - 1;
        let middles = 1..top;
        let zc = |ones: [usize; 1]| {
            ConditionSet::new(ones, middles.clone()).expect("disjoint by construction")
        };
        c.push(Gate::controlled(0, SingleOp::Z, zc([top])))
            .expect("valid");
        c.push(Gate::h(top)).expect("valid");
        let mixer = slant_mixer(1usize << k)?;
        c.push(Gate::controlled(0, SingleOp::Unitary(mixer), zc([top])))
            .expect("valid");
        c.push(Gate::controlled(top, SingleOp::X, zc([0])))
            .expect("valid");
        c.push(Gate::controlled(0, SingleOp::X, zc([top])))
            .expect("valid");
        c.push(Gate::controlled(top, SingleOp::X, zc([0])))
            .expect("valid");
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Hartley

/// The cosine-sine block on `n − 1` qubits (the half-size subspace of an
/// `n`-qubit Hartley level), *without* the external condition on the
/// level's top qubit. Local layout: qubit `n − 2` is the block's own top
/// bit `b`, qubits `0..n−3` hold the argument `x`. Gates: a two's
/// complement of `x` conditioned on `b`; a `Z` on `b` and a `Z` on `b`
/// zero-conditioned on all of `x` (together: sign flip iff `b = 1` and
/// `x ≠ 0`); one conditioned rotation of `b` per `x` qubit (qubit `k`
/// contributes angle `2π·2^k/2^n`); and the conditioned two's complement
/// again.
pub fn build_cs_block(n: usize) -> Result<Circuit, SizeError> {
    if !(3..=MAX_QUBITS).contains(&n) {
        return Err(SizeError::QubitCount {
            n,
            min: 3,
            max: MAX_QUBITS,
        });
    }
    let mut c = Circuit::new(n - 1, format!("csblock{n}")).expect("n >= 3");
    c.extend(cs_block_gates(n)).expect("valid");
    Ok(c)
}

fn cs_block_gates(n: usize) -> Vec<Gate> {
    let b = n - 2;
    let xs = 0..n - 2;
    let mut gates = Vec::new();
    if b > 0 {
        gates.push(Gate::twos_complement(0, b - 1, ConditionSet::one(b)));
    }
    gates.push(Gate::z(b));
    gates.push(Gate::controlled(
        b,
        SingleOp::Z,
        ConditionSet::new([], xs.clone()).expect("disjoint"),
    ));
    for k in xs.rev() {
        let theta = TAU * (1u64 << k) as f64 / (1u64 << n) as f64;
        gates.push(Gate::controlled(
            b,
            SingleOp::Rot(theta),
            ConditionSet::one(k),
        ));
    }
    if b > 0 {
        gates.push(Gate::twos_complement(0, b - 1, ConditionSet::one(b)));
    }
    gates
}

/// Hartley circuit. Level `k` emits the even/odd separation (the bottom
/// wire's content rotates to the top of wires `0..k`), then the half-size
/// circuit on qubits `0..k−1`, then the cosine-sine block one-conditioned
/// on qubit `k−1`, then `H` on qubit `k−1`. Base case is a single
/// Hadamard; at `k = 2` the cosine-sine block is the identity and is
/// omitted.
pub fn build_hartley(n: usize) -> Result<Circuit, SizeError> {
    check_n(Transform::Hartley, n)?;
    let mut c = Circuit::new(n, format!("hartley{n}")).expect("n >= 1");
    for k in (2..=n).rev() {
        push_rotate_right(&mut c, k);
    }
    c.push(Gate::h(0)).expect("in range");
    for k in 2..=n {
        if k >= 3 {
            for gate in cs_block_gates(k) {
                c.push(
                    gate.with_one_condition(k - 1)
                        .expect("level qubit is fresh"),
                )
                .expect("valid");
            }
        }
        c.push(Gate::h(k - 1)).expect("in range");
    }
    Ok(c)
}
