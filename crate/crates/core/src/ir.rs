//! Gate-level intermediate representation.
//!
//! # Qubit ordering
//!
//! Basis-state index `k` of an `m`-qubit register encodes the bit string
//! `x_{m-1} … x_1 x_0` with `k = Σ x_i · 2^i`. Qubit 0 is the least
//! significant bit; the "most significant qubit" is qubit `m − 1`. Every
//! module in this crate uses this mapping, so e.g. the two-qubit state
//! `|10⟩` (qubit 1 set, qubit 0 clear) lives at index 2, and a gate on
//! qubit 0 acts on adjacent index pairs (a butterfly of stride 1).
//!
//! Ancilla qubits, when a circuit has any, occupy the indices above the
//! data qubits: qubits `n .. n + a`.
//!
//! # Gates
//!
//! A [`Gate`] is either a single-qubit unitary with an optional
//! [`ConditionSet`] (zero-conditions must read 0, one-conditions must
//! read 1 for the gate to act), or a macro: a wire/state permutation or a
//! two's-complement map on a qubit range. Macros keep synthesized
//! circuits auditable gate-for-gate against their defining recursions;
//! [`crate::lower`] expands them.
//!
//! A gate is *elementary* when it is a single-qubit unitary with no
//! zero-conditions and at most one one-condition.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Amplitude scalar used throughout the crate.
pub type Complex = Complex64;

/// Per-entry tolerance for the unitarity check at `Unitary2` construction.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("qubit {qubit} out of range for a circuit with {total} qubits")]
    QubitOutOfRange { qubit: usize, total: usize },
    #[error("zero- and one-condition sets must be disjoint")]
    ConditionsOverlap,
    #[error("target qubit {0} appears in the condition set")]
    TargetInConditions(usize),
    #[error("matrix is not unitary (max deviation {max_dev:.3e})")]
    NotUnitary { max_dev: f64 },
    #[error("matrix entries and gate angles must be finite")]
    NonFinite,
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid qubit range {lo}..{hi}")]
    InvalidRange { lo: usize, hi: usize },
    #[error("a circuit needs at least one data qubit")]
    EmptyRegister,
}

// ---------------------------------------------------------------------------
// index helpers

/// Bit `qubit` of basis-state index `index`.
#[inline]
pub fn index_bit(index: usize, qubit: usize) -> bool {
    (index >> qubit) & 1 == 1
}

/// `index` with bit `qubit` forced to `value`.
#[inline]
pub fn with_bit(index: usize, qubit: usize, value: bool) -> usize {
    if value {
        index | (1 << qubit)
    } else {
        index & !(1 << qubit)
    }
}

/// Reverse the low `width` bits of `index`.
pub fn bit_reverse(index: usize, width: usize) -> usize {
    let mut out = 0;
    for i in 0..width {
        if index_bit(index, i) {
            out |= 1 << (width - 1 - i);
        }
    }
    out
}

/// Rotate the low `width` bits one position toward the most significant
/// end (the top bit wraps around to bit 0).
#[inline]
pub fn rotate_bits_left(index: usize, width: usize) -> usize {
    let mask = (1usize << width) - 1;
    ((index << 1) & mask) | ((index & mask) >> (width - 1))
}

/// Rotate the low `width` bits one position toward the least significant
/// end (bit 0 wraps around to the top).
#[inline]
pub fn rotate_bits_right(index: usize, width: usize) -> usize {
    let mask = (1usize << width) - 1;
    ((index & mask) >> 1) | ((index & 1) << (width - 1))
}

// ---------------------------------------------------------------------------
// 2x2 unitaries

/// A 2×2 unitary matrix, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    entries: [[Complex; 2]; 2],
}

impl Unitary2 {
    /// Builds a unitary from row-major entries. Fails when an entry is not
    /// finite or when `U·U†` deviates from the identity by more than
    /// [`UNITARY_TOL`] in any entry.
    pub fn new(entries: [[Complex; 2]; 2]) -> Result<Self, IrError> {
        for row in &entries {
            for e in row {
                if !e.re.is_finite() || !e.im.is_finite() {
                    return Err(IrError::NonFinite);
                }
            }
        }
        let u = Self { entries };
        let dev = u.unitarity_error();
        if dev > UNITARY_TOL {
            return Err(IrError::NotUnitary { max_dev: dev });
        }
        Ok(u)
    }

    /// Max-entry deviation of `U·U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let m = &self.entries;
        let mut dev: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let dot = m[r][0] * m[c][0].conj() + m[r][1] * m[c][1].conj();
                let expect = if r == c {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                };
                dev = dev.max((dot - expect).norm());
            }
        }
        dev
    }

    pub fn x() -> Self {
        let (o, l) = (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0));
        Self {
            entries: [[o, l], [l, o]],
        }
    }

    pub fn z() -> Self {
        let (o, l) = (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0));
        Self {
            entries: [[l, o], [o, -l]],
        }
    }

    pub fn h() -> Self {
        let s = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            entries: [[s, s], [s, -s]],
        }
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        let o = Complex::new(0.0, 0.0);
        Self {
            entries: [
                [Complex::new(1.0, 0.0), o],
                [o, Complex::new(theta.cos(), theta.sin())],
            ],
        }
    }

    /// Real plane rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            entries: [
                [Complex::new(c, 0.0), Complex::new(-s, 0.0)],
                [Complex::new(s, 0.0), Complex::new(c, 0.0)],
            ],
        }
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[Complex; 2]; 2] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.entries;
        Self {
            entries: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[Complex::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self { entries: out }
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.entries[r][c] - rhs.entries[r][c]).norm());
            }
        }
        d
    }
}

/// The named single-qubit gates: `X`, `Z`, `H`.
pub fn named_gate(name: &str) -> Result<Unitary2, IrError> {
    match name {
        "X" => Ok(Unitary2::x()),
        "Z" => Ok(Unitary2::z()),
        "H" => Ok(Unitary2::h()),
        other => Err(IrError::UnknownGate(other.to_string())),
    }
}

/// A single-qubit operation, kept in named form where one exists so that
/// circuits serialize without re-deriving angles from matrix entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleOp {
    X,
    Z,
    H,
    /// `diag(1, e^{iθ})`
    Phase(f64),
    /// `[[cos θ, −sin θ], [sin θ, cos θ]]`
    Rot(f64),
    Unitary(Unitary2),
}

impl SingleOp {
    pub fn matrix(&self) -> Unitary2 {
        match *self {
            SingleOp::X => Unitary2::x(),
            SingleOp::Z => Unitary2::z(),
            SingleOp::H => Unitary2::h(),
            SingleOp::Phase(theta) => Unitary2::phase(theta),
            SingleOp::Rot(theta) => Unitary2::rotation(theta),
            SingleOp::Unitary(u) => u,
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            SingleOp::Phase(theta) | SingleOp::Rot(theta) => theta.is_finite(),
            _ => true,
        }
    }
}

// ---------------------------------------------------------------------------
// conditions

/// Zero- and one-condition sets of a conditional gate. The sets are kept
/// sorted, deduplicated and disjoint. Condition qubits may be ancillas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConditionSet {
    ones: Vec<usize>,
    zeros: Vec<usize>,
}

impl ConditionSet {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(
        ones: impl IntoIterator<Item = usize>,
        zeros: impl IntoIterator<Item = usize>,
    ) -> Result<Self, IrError> {
        let mut ones: Vec<usize> = ones.into_iter().collect();
        let mut zeros: Vec<usize> = zeros.into_iter().collect();
        ones.sort_unstable();
        ones.dedup();
        zeros.sort_unstable();
        zeros.dedup();
        if ones.iter().any(|q| zeros.binary_search(q).is_ok()) {
            return Err(IrError::ConditionsOverlap);
        }
        Ok(Self { ones, zeros })
    }

    /// A single one-condition.
    pub fn one(qubit: usize) -> Self {
        Self {
            ones: vec![qubit],
            zeros: Vec::new(),
        }
    }

    /// Adds a one-condition, keeping the invariants.
    pub fn with_one(&self, qubit: usize) -> Result<Self, IrError> {
        Self::new(
            self.ones.iter().copied().chain([qubit]),
            self.zeros.iter().copied(),
        )
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn zeros(&self) -> &[usize] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.ones.len() + self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ones.is_empty() && self.zeros.is_empty()
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.ones.binary_search(&qubit).is_ok() || self.zeros.binary_search(&qubit).is_ok()
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.ones.iter().chain(self.zeros.iter()).copied()
    }

    /// Whether basis-state `index` meets every condition.
    #[inline]
    pub fn satisfied_by(&self, index: usize) -> bool {
        self.ones.iter().all(|&q| index_bit(index, q))
            && self.zeros.iter().all(|&q| !index_bit(index, q))
    }
}

// ---------------------------------------------------------------------------
// gates

/// Direction of a whole-register wire rotation, read off the bit string
/// `x_{n-1} … x_0`: `Left` maps it to `x_{n-2} … x_0 x_{n-1}` (the top wire's
/// content wraps to the bottom), `Right` is the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Permutation macros. All of them denote permutation matrices on the data
/// register; `WireSwap` may also touch ancilla wires.
#[derive(Debug, Clone, PartialEq)]
pub enum PermSpec {
    /// Reverse the data wires: basis bits `x_{n-1}…x_0 ↦ x_0…x_{n-1}`.
    /// Never conditioned.
    BitReversal,
    /// Cyclic rotation of all data wires. Conditions, if any, must sit on
    /// ancilla qubits.
    RotateWires(Direction),
    /// Transposition of two basis states of the data register.
    Transposition(usize, usize),
    /// Swap the contents of two wires.
    WireSwap(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Single {
        target: usize,
        op: SingleOp,
    },
    Perm(PermSpec),
    /// `x ↦ (2^m − x) mod 2^m` on the inclusive qubit range `lo..=hi`.
    TwosComplement {
        lo: usize,
        hi: usize,
    },
}

/// One instruction: a kind plus the conditions under which it acts.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub conds: ConditionSet,
}

impl Gate {
    pub fn single(target: usize, op: SingleOp) -> Self {
        Self {
            kind: GateKind::Single { target, op },
            conds: ConditionSet::none(),
        }
    }

    pub fn controlled(target: usize, op: SingleOp, conds: ConditionSet) -> Self {
        Self {
            kind: GateKind::Single { target, op },
            conds,
        }
    }

    pub fn x(target: usize) -> Self {
        Self::single(target, SingleOp::X)
    }

    pub fn z(target: usize) -> Self {
        Self::single(target, SingleOp::Z)
    }

    pub fn h(target: usize) -> Self {
        Self::single(target, SingleOp::H)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::controlled(target, SingleOp::X, ConditionSet::one(control))
    }

    pub fn perm(spec: PermSpec) -> Self {
        Self {
            kind: GateKind::Perm(spec),
            conds: ConditionSet::none(),
        }
    }

    pub fn twos_complement(lo: usize, hi: usize, conds: ConditionSet) -> Self {
        Self {
            kind: GateKind::TwosComplement { lo, hi },
            conds,
        }
    }

    /// Returns `self` with `qubit` added as an extra one-condition.
    pub fn with_one_condition(&self, qubit: usize) -> Result<Self, IrError> {
        let conds = self.conds.with_one(qubit)?;
        let gate = Gate {
            kind: self.kind.clone(),
            conds,
        };
        if let GateKind::Single { target, .. } = gate.kind
            && qubit == target
        {
            return Err(IrError::TargetInConditions(target));
        }
        Ok(gate)
    }

    /// Elementary gates: a single-qubit unitary with no zero-conditions and
    /// at most one one-condition.
    pub fn is_elementary(&self) -> bool {
        matches!(self.kind, GateKind::Single { .. })
            && self.conds.zeros().is_empty()
            && self.conds.ones().len() <= 1
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GateKind::Single { target, op } => {
                let name = match op {
                    SingleOp::X => "X".to_string(),
                    SingleOp::Z => "Z".to_string(),
                    SingleOp::H => "H".to_string(),
                    SingleOp::Phase(t) => format!("PHASE({t:.6})"),
                    SingleOp::Rot(t) => format!("ROT({t:.6})"),
                    SingleOp::Unitary(_) => "U".to_string(),
                };
                write!(f, "{name} q{target}")?;
            }
            GateKind::Perm(PermSpec::BitReversal) => write!(f, "BITREV")?,
            GateKind::Perm(PermSpec::RotateWires(Direction::Left)) => write!(f, "ROTWIRES left")?,
            GateKind::Perm(PermSpec::RotateWires(Direction::Right)) => write!(f, "ROTWIRES right")?,
            GateKind::Perm(PermSpec::Transposition(i, j)) => write!(f, "TRANSPOSE {i} {j}")?,
            GateKind::Perm(PermSpec::WireSwap(i, j)) => write!(f, "SWAPQ q{i} q{j}")?,
            GateKind::TwosComplement { lo, hi } => write!(f, "TCOMP q{lo}..q{hi}")?,
        }
        for q in self.conds.ones() {
            write!(f, " +{q}")?;
        }
        for q in self.conds.zeros() {
            write!(f, " -{q}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// circuits

/// An ordered gate sequence over `data_qubits` data wires and
/// `ancilla_qubits` workbits. Gates act in list order (time order); the
/// matrix of the whole circuit is the product of the gate matrices applied
/// right-to-left.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    data_qubits: usize,
    ancilla_qubits: usize,
    gates: Vec<Gate>,
    pub label: String,
}

impl Circuit {
    pub fn new(data_qubits: usize, label: impl Into<String>) -> Result<Self, IrError> {
        Self::with_ancillas(data_qubits, 0, label)
    }

    pub fn with_ancillas(
        data_qubits: usize,
        ancilla_qubits: usize,
        label: impl Into<String>,
    ) -> Result<Self, IrError> {
        if data_qubits == 0 {
            return Err(IrError::EmptyRegister);
        }
        Ok(Self {
            data_qubits,
            ancilla_qubits,
            gates: Vec::new(),
            label: label.into(),
        })
    }

    pub fn data_qubits(&self) -> usize {
        self.data_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.data_qubits + self.ancilla_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// True iff every gate is elementary. Lowered circuits must satisfy
    /// this; synthesized circuits with macros or multi-condition gates
    /// generally do not.
    pub fn is_elementary_only(&self) -> bool {
        self.gates.iter().all(Gate::is_elementary)
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), IrError> {
        if qubit >= self.total_qubits() {
            return Err(IrError::QubitOutOfRange {
                qubit,
                total: self.total_qubits(),
            });
        }
        Ok(())
    }

    /// Validates a gate against this circuit without appending it.
    pub fn validate_gate(&self, gate: &Gate) -> Result<(), IrError> {
        for q in gate.conds.qubits() {
            self.check_qubit(q)?;
        }
        match &gate.kind {
            GateKind::Single { target, op } => {
                self.check_qubit(*target)?;
                if gate.conds.contains(*target) {
                    return Err(IrError::TargetInConditions(*target));
                }
                if !op.is_finite() {
                    return Err(IrError::NonFinite);
                }
            }
            GateKind::Perm(PermSpec::BitReversal) => {
                if !gate.conds.is_empty() {
                    return Err(IrError::InvalidPermutation(
                        "BITREV cannot be conditioned".into(),
                    ));
                }
            }
            GateKind::Perm(PermSpec::RotateWires(_)) => {
                if gate.conds.qubits().any(|q| q < self.data_qubits) {
                    return Err(IrError::InvalidPermutation(
                        "ROTWIRES conditions must sit on ancilla qubits".into(),
                    ));
                }
            }
            GateKind::Perm(PermSpec::WireSwap(i, j)) => {
                self.check_qubit(*i)?;
                self.check_qubit(*j)?;
                if i == j {
                    return Err(IrError::InvalidPermutation(
                        "SWAPQ wires must differ".into(),
                    ));
                }
                if gate.conds.contains(*i) || gate.conds.contains(*j) {
                    return Err(IrError::InvalidPermutation(
                        "SWAPQ conditions must avoid the swapped wires".into(),
                    ));
                }
            }
            GateKind::Perm(PermSpec::Transposition(i, j)) => {
                let dim = 1usize << self.data_qubits;
                if *i >= dim || *j >= dim {
                    return Err(IrError::InvalidPermutation(format!(
                        "transposed states {i}, {j} exceed the data dimension {dim}"
                    )));
                }
                if i == j {
                    return Err(IrError::InvalidPermutation(
                        "transposed states must differ".into(),
                    ));
                }
                // A conditioned transposition must either move both states or
                // neither, so the pair has to agree on data-qubit conditions.
                for q in gate.conds.qubits().filter(|&q| q < self.data_qubits) {
                    if index_bit(*i, q) != index_bit(*j, q) {
                        return Err(IrError::InvalidPermutation(format!(
                            "transposed states disagree on condition qubit {q}"
                        )));
                    }
                }
            }
            GateKind::TwosComplement { lo, hi } => {
                if lo > hi {
                    return Err(IrError::InvalidRange { lo: *lo, hi: *hi });
                }
                self.check_qubit(*hi)?;
                if gate.conds.qubits().any(|q| (*lo..=*hi).contains(&q)) {
                    return Err(IrError::InvalidRange { lo: *lo, hi: *hi });
                }
            }
        }
        Ok(())
    }

    /// Appends a gate after validating it.
    pub fn push(&mut self, gate: Gate) -> Result<(), IrError> {
        self.validate_gate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), IrError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }
}
