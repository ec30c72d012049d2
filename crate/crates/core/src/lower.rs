//! Lowering of macros and multiply-controlled gates to elementary gates.
//!
//! Output circuits are always elementary-only: single-qubit gates plus
//! singly-conditioned gates, no zero-conditions. Two modes differ in how
//! far conditioned gates are reduced:
//!
//! - [`LowerMode::Elementary`]: a conditioned gate may carry any 2×2
//!   unitary. Toffolis are realized by the five-gate controlled-√X
//!   sequence, so no gate keeps more than one condition.
//! - [`LowerMode::Strict`]: conditioned gates are controlled NOTs only.
//!   Toffolis expand to the textbook six-CNOT sequence and every other
//!   controlled unitary goes through the two-CNOT ABC decomposition.
//!
//! Multi-condition gates are reduced with an AND-ladder: Toffolis
//! accumulate the conjunction of the conditions into one workbit, a
//! singly-conditioned gate fires off it, and the ladder is unwound.
//! Zero-conditions become one-conditions by X-conjugation. Workbits are
//! allocated per gate and un-computed back to `|0⟩` before the next gate;
//! the report carries the peak.
//!
//! The two's-complement macro is NOT-then-increment. The increment shares
//! one carry ladder across all of its controlled flips (every flip's
//! control set is a prefix of `conditions ++ low range bits`), interleaving
//! un-computation with the flips so each carry is consumed before its
//! inputs change. That keeps the expansion linear in the range width.

use std::f64::consts::FRAC_PI_4;

use thiserror::Error;

use crate::ir::{
    Circuit, Complex, ConditionSet, Direction, Gate, GateKind, IrError, PermSpec, SingleOp,
    Unitary2, index_bit,
};

/// Default cap on workbits a lowering may allocate.
pub const DEFAULT_ANCILLA_CAP: usize = 64;

/// Elementary gates per Toffoli in [`LowerMode::Elementary`].
pub const TOFFOLI_COST: usize = 5;
/// Elementary gates per Toffoli in [`LowerMode::Strict`].
pub const TOFFOLI_COST_STRICT: usize = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LowerError {
    #[error("lowering needs {needed} workbits but the cap is {cap}")]
    AncillaBudget { needed: usize, cap: usize },
    #[error("cannot lower: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowerMode {
    #[default]
    Elementary,
    Strict,
}

#[derive(Debug, Clone, Copy)]
pub struct LowerOptions {
    pub mode: LowerMode,
    pub ancilla_cap: usize,
}

impl Default for LowerOptions {
    fn default() -> Self {
        Self {
            mode: LowerMode::Elementary,
            ancilla_cap: DEFAULT_ANCILLA_CAP,
        }
    }
}

impl LowerOptions {
    pub fn strict() -> Self {
        Self {
            mode: LowerMode::Strict,
            ..Self::default()
        }
    }
}

/// One row of the per-gate expansion table.
#[derive(Debug, Clone)]
pub struct GateExpansion {
    pub gate: String,
    pub elementary: usize,
    pub ancillas: usize,
}

#[derive(Debug, Clone)]
pub struct LoweringReport {
    pub input_gate_count: usize,
    pub output_elementary_count: usize,
    pub ancillas_used: usize,
    pub expansions: Vec<GateExpansion>,
}

/// Ladder cost of a gate with `k ≥ 2` one-conditions, excluding the
/// payload: `2(k−1)` Toffolis.
pub fn ladder_cost(k: usize, mode: LowerMode) -> usize {
    let toffoli = match mode {
        LowerMode::Elementary => TOFFOLI_COST,
        LowerMode::Strict => TOFFOLI_COST_STRICT,
    };
    2 * (k - 1) * toffoli
}

// ---------------------------------------------------------------------------
// emitter

fn v_matrix() -> Unitary2 {
    // √X: V² = X.
    let p = Complex::new(0.5, 0.5);
    let m = Complex::new(0.5, -0.5);
    Unitary2::new([[p, m], [m, p]]).expect("unitary")
}

struct Emitter {
    mode: LowerMode,
    anc_base: usize,
    cap: usize,
    in_use: usize,
    peak: usize,
    gate_peak: usize,
    out: Vec<Gate>,
}

impl Emitter {
    fn new(mode: LowerMode, anc_base: usize, cap: usize) -> Self {
        Self {
            mode,
            anc_base,
            cap,
            in_use: 0,
            peak: 0,
            gate_peak: 0,
            out: Vec::new(),
        }
    }

    fn alloc(&mut self, count: usize) -> Result<Vec<usize>, LowerError> {
        let start = self.anc_base + self.in_use;
        self.in_use += count;
        self.peak = self.peak.max(self.in_use);
        self.gate_peak = self.gate_peak.max(self.in_use);
        if self.peak > self.cap {
            return Err(LowerError::AncillaBudget {
                needed: self.peak,
                cap: self.cap,
            });
        }
        Ok((start..start + count).collect())
    }

    fn release(&mut self, count: usize) {
        debug_assert!(self.in_use >= count);
        self.in_use -= count;
    }

    fn push(&mut self, gate: Gate) {
        debug_assert!(
            gate.is_elementary(),
            "emitter produced a non-elementary gate: {gate}"
        );
        self.out.push(gate);
    }

    fn x(&mut self, q: usize) {
        self.push(Gate::x(q));
    }

    fn cx(&mut self, control: usize, target: usize) {
        self.push(Gate::cnot(control, target));
    }

    /// Toffoli on (c1, c2 → t), expanded per mode.
    fn toffoli(&mut self, c1: usize, c2: usize, t: usize) {
        match self.mode {
            LowerMode::Elementary => {
                let v = v_matrix();
                let vd = v.adjoint();
                self.push(Gate::controlled(
                    t,
                    SingleOp::Unitary(v),
                    ConditionSet::one(c2),
                ));
                self.cx(c1, c2);
                self.push(Gate::controlled(
                    t,
                    SingleOp::Unitary(vd),
                    ConditionSet::one(c2),
                ));
                self.cx(c1, c2);
                self.push(Gate::controlled(
                    t,
                    SingleOp::Unitary(v),
                    ConditionSet::one(c1),
                ));
            }
            LowerMode::Strict => {
                let t_gate = SingleOp::Phase(FRAC_PI_4);
                let t_dag = SingleOp::Phase(-FRAC_PI_4);
                self.push(Gate::h(t));
                self.cx(c2, t);
                self.push(Gate::single(t, t_dag));
                self.cx(c1, t);
                self.push(Gate::single(t, t_gate));
                self.cx(c2, t);
                self.push(Gate::single(t, t_dag));
                self.cx(c1, t);
                self.push(Gate::single(t, t_gate));
                self.push(Gate::single(c2, t_gate));
                self.push(Gate::h(t));
                self.cx(c1, c2);
                self.push(Gate::single(c2, t_dag));
                self.push(Gate::single(c1, t_gate));
                self.cx(c1, c2);
            }
        }
    }

    /// A gate with at most one (one-)condition, reduced per mode.
    fn base_gate(&mut self, target: usize, op: SingleOp, control: Option<usize>) {
        match control {
            None => self.push(Gate::single(target, op)),
            Some(c) => match (self.mode, op) {
                (LowerMode::Elementary, _) | (LowerMode::Strict, SingleOp::X) => {
                    self.push(Gate::controlled(target, op, ConditionSet::one(c)));
                }
                (LowerMode::Strict, _) => self.abc(c, target, op.matrix()),
            },
        }
    }

    /// Controlled-U as `phase(α) on the control; A · X · B · X · C` on the
    /// target with `A·B·C = 1` (emitted in time order: C, CX, B, CX, A).
    fn abc(&mut self, control: usize, target: usize, u: Unitary2) {
        let det = u.entry(0, 0) * u.entry(1, 1) - u.entry(0, 1) * u.entry(1, 0);
        let alpha = det.arg() / 2.0;
        let ph = Complex::new((-alpha).cos(), (-alpha).sin());
        let su = [
            [u.entry(0, 0) * ph, u.entry(0, 1) * ph],
            [u.entry(1, 0) * ph, u.entry(1, 1) * ph],
        ];
        let gamma = 2.0 * su[1][0].norm().atan2(su[0][0].norm());
        let (sum, diff) = if su[0][0].norm() < 1e-12 {
            (0.0, 2.0 * su[1][0].arg())
        } else if su[1][0].norm() < 1e-12 {
            (-2.0 * su[0][0].arg(), 0.0)
        } else {
            (-2.0 * su[0][0].arg(), 2.0 * su[1][0].arg())
        };
        let beta = (sum + diff) / 2.0;
        let delta = (sum - diff) / 2.0;

        let a = rz(beta).mul(&ry(gamma / 2.0));
        let b = ry(-gamma / 2.0).mul(&rz(-(delta + beta) / 2.0));
        let c = rz((delta - beta) / 2.0);

        self.push_unless_identity(target, c);
        self.cx(control, target);
        self.push_unless_identity(target, b);
        self.cx(control, target);
        self.push_unless_identity(target, a);
        if alpha != 0.0 {
            self.push(Gate::single(control, SingleOp::Phase(alpha)));
        }
    }

    fn push_unless_identity(&mut self, target: usize, m: Unitary2) {
        if m.max_abs_diff(&identity2()) > 1e-15 {
            self.push(Gate::single(target, SingleOp::Unitary(m)));
        }
    }

    /// Full reduction of a conditioned single-qubit gate: zero-conditions
    /// are X-conjugated, two or more conditions go through the AND-ladder.
    fn single(
        &mut self,
        target: usize,
        op: SingleOp,
        conds: &ConditionSet,
    ) -> Result<(), LowerError> {
        let zeros = conds.zeros().to_vec();
        for &q in &zeros {
            self.x(q);
        }
        let mut ones: Vec<usize> = conds.ones().to_vec();
        ones.extend(&zeros);
        match ones.len() {
            0 => self.base_gate(target, op, None),
            1 => self.base_gate(target, op, Some(ones[0])),
            k => {
                let ancs = self.alloc(k - 1)?;
                self.toffoli(ones[0], ones[1], ancs[0]);
                for i in 2..k {
                    self.toffoli(ancs[i - 2], ones[i], ancs[i - 1]);
                }
                self.base_gate(target, op, Some(ancs[k - 2]));
                for i in (2..k).rev() {
                    self.toffoli(ancs[i - 2], ones[i], ancs[i - 1]);
                }
                self.toffoli(ones[0], ones[1], ancs[0]);
                self.release(k - 1);
            }
        }
        for &q in zeros.iter().rev() {
            self.x(q);
        }
        Ok(())
    }

    /// Two's complement on `lo..=hi` under an all-ones condition list:
    /// conditioned bitwise NOT, then the shared-ladder ripple increment.
    fn tcomp_body(&mut self, lo: usize, hi: usize, conds: &[usize]) -> Result<(), LowerError> {
        let m = hi - lo + 1;
        let c = conds.len();

        // NOT part: flip every range bit under the conjunction.
        match c {
            0 => (lo..=hi).for_each(|b| self.x(b)),
            1 => (lo..=hi).for_each(|b| self.cx(conds[0], b)),
            _ => {
                let ancs = self.alloc(c - 1)?;
                self.toffoli(conds[0], conds[1], ancs[0]);
                for i in 2..c {
                    self.toffoli(ancs[i - 2], conds[i], ancs[i - 1]);
                }
                for b in lo..=hi {
                    self.cx(ancs[c - 2], b);
                }
                for i in (2..c).rev() {
                    self.toffoli(ancs[i - 2], conds[i], ancs[i - 1]);
                }
                self.toffoli(conds[0], conds[1], ancs[0]);
                self.release(c - 1);
            }
        }

        // Increment: bit t flips iff the conditions hold and all lower range
        // bits are (still) 1 — control sets are prefixes of one list.
        let list: Vec<usize> = conds.iter().copied().chain(lo..hi).collect();
        let p = list.len();
        let ancs = if p >= 2 {
            self.alloc(p - 1)?
        } else {
            Vec::new()
        };
        // prefix_ctrl(q): control qubit holding the AND of list[..q].
        let prefix_ctrl = |ancs: &[usize], q: usize| if q == 1 { list[0] } else { ancs[q - 2] };
        for j in 2..=p {
            self.toffoli(prefix_ctrl(&ancs, j - 1), list[j - 1], ancs[j - 2]);
        }
        for t in (0..m).rev() {
            let q = c + t;
            match q {
                0 => self.x(lo + t),
                1 => self.cx(list[0], lo + t),
                _ => self.cx(ancs[q - 2], lo + t),
            }
            if q >= 2 {
                // Un-compute the carry that consumed list[q-1] before that
                // qubit gets flipped on the next iteration.
                self.toffoli(prefix_ctrl(&ancs, q - 1), list[q - 1], ancs[q - 2]);
            }
        }
        for j in (2..c).rev() {
            self.toffoli(prefix_ctrl(&ancs, j - 1), list[j - 1], ancs[j - 2]);
        }
        if p >= 2 {
            self.release(p - 1);
        }
        Ok(())
    }

    fn tcomp(&mut self, lo: usize, hi: usize, conds: &ConditionSet) -> Result<(), LowerError> {
        let zeros = conds.zeros().to_vec();
        for &q in &zeros {
            self.x(q);
        }
        let mut ones: Vec<usize> = conds.ones().to_vec();
        ones.extend(&zeros);
        self.tcomp_body(lo, hi, &ones)?;
        for &q in zeros.iter().rev() {
            self.x(q);
        }
        Ok(())
    }

    fn gate(&mut self, gate: &Gate, data_qubits: usize) -> Result<(), LowerError> {
        match &gate.kind {
            GateKind::Single { target, op } => self.single(*target, *op, &gate.conds)?,
            GateKind::Perm(spec) => {
                for g in lower_perm(spec, &gate.conds, data_qubits) {
                    match g.kind {
                        GateKind::Single { target, op } => self.single(target, op, &g.conds)?,
                        _ => unreachable!("lower_perm emits single-qubit gates"),
                    }
                }
            }
            GateKind::TwosComplement { lo, hi } => self.tcomp(*lo, *hi, &gate.conds)?,
        }
        Ok(())
    }
}

fn identity2() -> Unitary2 {
    Unitary2::new([
        [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
        [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
    ])
    .expect("unitary")
}

fn rz(theta: f64) -> Unitary2 {
    let h = theta / 2.0;
    Unitary2::new([
        [Complex::new(h.cos(), -h.sin()), Complex::new(0.0, 0.0)],
        [Complex::new(0.0, 0.0), Complex::new(h.cos(), h.sin())],
    ])
    .expect("unitary")
}

fn ry(theta: f64) -> Unitary2 {
    let h = theta / 2.0;
    Unitary2::new([
        [Complex::new(h.cos(), 0.0), Complex::new(-h.sin(), 0.0)],
        [Complex::new(h.sin(), 0.0), Complex::new(h.cos(), 0.0)],
    ])
    .expect("unitary")
}

// ---------------------------------------------------------------------------
// public operations

fn swap_gates(a: usize, b: usize, conds: &ConditionSet) -> Vec<Gate> {
    let with = |control: usize, target: usize| Gate {
        kind: GateKind::Single {
            target,
            op: SingleOp::X,
        },
        conds: conds
            .with_one(control)
            .expect("control disjoint from macro conditions"),
    };
    vec![with(a, b), with(b, a), with(a, b)]
}

/// Expands a permutation macro into conditioned NOT gates: a wire swap is
/// three CNOTs (each carrying the macro's conditions), `BITREV` is
/// `⌊n/2⌋` wire swaps, a rotation is `n−1` adjacent swaps, and a basis
/// transposition is a multiply-conditioned NOT conjugated by CNOTs.
pub fn lower_perm(spec: &PermSpec, conds: &ConditionSet, data_qubits: usize) -> Vec<Gate> {
    match spec {
        PermSpec::BitReversal => (0..data_qubits / 2)
            .flat_map(|i| swap_gates(i, data_qubits - 1 - i, conds))
            .collect(),
        PermSpec::RotateWires(Direction::Left) => (0..data_qubits - 1)
            .rev()
            .flat_map(|i| swap_gates(i, i + 1, conds))
            .collect(),
        PermSpec::RotateWires(Direction::Right) => (0..data_qubits - 1)
            .flat_map(|i| swap_gates(i, i + 1, conds))
            .collect(),
        PermSpec::WireSwap(a, b) => swap_gates(*a, *b, conds),
        PermSpec::Transposition(i, j) => {
            // Conditions on data qubits are consistent with the pair (both
            // states agree there); if the pair fails one, the gate is the
            // identity.
            for q in conds.ones().iter().filter(|&&q| q < data_qubits) {
                if !index_bit(*i, *q) {
                    return Vec::new();
                }
            }
            for q in conds.zeros().iter().filter(|&&q| q < data_qubits) {
                if index_bit(*i, *q) {
                    return Vec::new();
                }
            }
            let diff = i ^ j;
            let t = diff.trailing_zeros() as usize;
            let lo_state = if index_bit(*i, t) { *j } else { *i };
            // Map the partner state onto lo_state ⊕ (1 << t), toggle, unmap.
            let vs: Vec<Gate> = (0..data_qubits)
                .filter(|&d| d != t && index_bit(diff, d))
                .map(|d| Gate::cnot(t, d))
                .collect();
            let ones: Vec<usize> = (0..data_qubits)
                .filter(|&q| q != t && index_bit(lo_state, q))
                .chain(conds.ones().iter().copied().filter(|&q| q >= data_qubits))
                .collect();
            let zeros: Vec<usize> = (0..data_qubits)
                .filter(|&q| q != t && !index_bit(lo_state, q))
                .chain(conds.zeros().iter().copied().filter(|&q| q >= data_qubits))
                .collect();
            let middle = Gate::controlled(
                t,
                SingleOp::X,
                ConditionSet::new(ones, zeros).expect("disjoint by construction"),
            );
            let mut out = vs.clone();
            out.push(middle);
            out.extend(vs);
            out
        }
    }
}

/// Lowers one multiply-conditioned single-qubit gate, allocating workbits
/// from `first_ancilla` upward. Returns the sequence and the number of
/// workbits used.
pub fn lower_multicontrol(
    gate: &Gate,
    first_ancilla: usize,
    opts: LowerOptions,
) -> Result<(Vec<Gate>, usize), LowerError> {
    let GateKind::Single { target, op } = &gate.kind else {
        return Err(LowerError::Unsupported(format!(
            "{gate} is not a single-qubit gate"
        )));
    };
    let mut em = Emitter::new(opts.mode, first_ancilla, opts.ancilla_cap);
    em.single(*target, *op, &gate.conds)?;
    debug_assert_eq!(em.in_use, 0);
    Ok((em.out, em.peak))
}

/// Lowers a two's-complement macro on `lo..=hi` under `conds`.
pub fn lower_tcomp(
    lo: usize,
    hi: usize,
    conds: &ConditionSet,
    first_ancilla: usize,
    opts: LowerOptions,
) -> Result<(Vec<Gate>, usize), LowerError> {
    if lo > hi {
        return Err(LowerError::Ir(IrError::InvalidRange { lo, hi }));
    }
    let mut em = Emitter::new(opts.mode, first_ancilla, opts.ancilla_cap);
    em.tcomp(lo, hi, conds)?;
    debug_assert_eq!(em.in_use, 0);
    Ok((em.out, em.peak))
}

/// Lowers a whole circuit to elementary gates. Workbits are appended above
/// the circuit's existing qubits; on the subspace where they start in
/// `|0⟩` the lowered circuit acts like the original and returns them to
/// `|0⟩`.
pub fn lower_circuit(
    circuit: &Circuit,
    opts: LowerOptions,
) -> Result<(Circuit, LoweringReport), LowerError> {
    let mut em = Emitter::new(opts.mode, circuit.total_qubits(), opts.ancilla_cap);
    let mut expansions = Vec::with_capacity(circuit.len());
    for gate in circuit.gates() {
        let before = em.out.len();
        em.gate_peak = 0;
        em.gate(gate, circuit.data_qubits())?;
        debug_assert_eq!(em.in_use, 0, "workbits must be released after every gate");
        expansions.push(GateExpansion {
            gate: gate.to_string(),
            elementary: em.out.len() - before,
            ancillas: em.gate_peak,
        });
    }

    let mut lowered = Circuit::with_ancillas(
        circuit.data_qubits(),
        circuit.ancilla_qubits() + em.peak,
        circuit.label.clone(),
    )?;
    let report = LoweringReport {
        input_gate_count: circuit.len(),
        output_elementary_count: em.out.len(),
        ancillas_used: em.peak,
        expansions,
    };
    for gate in em.out {
        lowered.push(gate)?;
    }
    debug_assert!(lowered.is_elementary_only());
    Ok((lowered, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{StateVector, extract_matrix, run};
    use crate::transforms::DenseMatrix;

    fn matrix_of(gates: &[Gate], qubits: usize) -> DenseMatrix {
        let mut c = Circuit::new(qubits, "t").unwrap();
        for g in gates {
            c.push(g.clone()).unwrap();
        }
        extract_matrix(&c).unwrap().matrix
    }

    fn restricted_matrix(c: &Circuit) -> DenseMatrix {
        extract_matrix(c).unwrap().matrix
    }

    #[test]
    fn elementary_gates_pass_through() {
        let mut c = Circuit::new(2, "t").unwrap();
        c.push(Gate::cnot(1, 0)).unwrap();
        let (low, report) = lower_circuit(&c, LowerOptions::default()).unwrap();
        assert_eq!(low.gates(), c.gates());
        assert_eq!(report.output_elementary_count, 1);
        assert_eq!(report.ancillas_used, 0);
    }

    #[test]
    fn toffoli_expansions_match_the_permutation() {
        let mut expect = DenseMatrix::identity(8);
        expect.set(3, 3, Complex::new(0.0, 0.0));
        expect.set(7, 7, Complex::new(0.0, 0.0));
        expect.set(7, 3, Complex::new(1.0, 0.0));
        expect.set(3, 7, Complex::new(1.0, 0.0));

        for mode in [LowerMode::Elementary, LowerMode::Strict] {
            let mut em = Emitter::new(mode, 3, 8);
            em.toffoli(0, 1, 2);
            let got = matrix_of(&em.out, 3);
            let err = got.max_abs_diff(&expect);
            assert!(err < 1e-13, "{mode:?}: {err:e}");
            let want_len = if mode == LowerMode::Elementary {
                TOFFOLI_COST
            } else {
                TOFFOLI_COST_STRICT
            };
            assert_eq!(em.out.len(), want_len);
        }
    }

    #[test]
    fn double_control_goes_through_one_workbit() {
        // A 2-condition X on 3 qubits lowers with one ancilla; restricted to
        // the ancilla-zero subspace it is the Toffoli permutation.
        let mut c = Circuit::new(3, "ccx").unwrap();
        c.push(Gate::controlled(
            2,
            SingleOp::X,
            ConditionSet::new([0, 1], []).unwrap(),
        ))
        .unwrap();
        let (low, report) = lower_circuit(&c, LowerOptions::default()).unwrap();
        assert_eq!(report.ancillas_used, 1);
        assert_eq!(low.total_qubits(), 4);
        assert_eq!(
            report.output_elementary_count,
            ladder_cost(2, LowerMode::Elementary) + 1
        );
        let got = restricted_matrix(&low);
        let want = restricted_matrix(&c);
        assert!(got.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn zero_condition_is_x_conjugated() {
        let mut c = Circuit::new(3, "oc").unwrap();
        c.push(Gate::controlled(
            0,
            SingleOp::H,
            ConditionSet::new([], [2]).unwrap(),
        ))
        .unwrap();
        let (low, _) = lower_circuit(&c, LowerOptions::default()).unwrap();
        assert_eq!(low.len(), 3);
        assert!(matches!(
            low.gates()[0].kind,
            GateKind::Single {
                target: 2,
                op: SingleOp::X
            }
        ));
        let err = restricted_matrix(&low).max_abs_diff(&restricted_matrix(&c));
        assert!(err < 1e-13);
    }

    #[test]
    fn mixed_conditions_match_direct_simulation() {
        // +0, -1, +2 on a 4-qubit register, arbitrary unitary payload.
        let u = Unitary2::new([
            [Complex::new(0.36, 0.48), Complex::new(0.8, 0.0)],
            [Complex::new(-0.8, 0.0), Complex::new(0.36, -0.48)],
        ])
        .unwrap();
        let mut c = Circuit::new(4, "mixed").unwrap();
        c.push(Gate::controlled(
            3,
            SingleOp::Unitary(u),
            ConditionSet::new([0, 2], [1]).unwrap(),
        ))
        .unwrap();
        for opts in [LowerOptions::default(), LowerOptions::strict()] {
            let (low, report) = lower_circuit(&c, opts).unwrap();
            assert_eq!(report.ancillas_used, 2);
            let err = restricted_matrix(&low).max_abs_diff(&restricted_matrix(&c));
            assert!(err < 1e-12, "{:?}: {err:e}", opts.mode);
        }
    }

    #[test]
    fn double_controlled_z_phases_one_state() {
        let mut c = Circuit::new(3, "ccz").unwrap();
        c.push(Gate::controlled(
            2,
            SingleOp::Z,
            ConditionSet::new([0, 1], []).unwrap(),
        ))
        .unwrap();
        let (low, _) = lower_circuit(&c, LowerOptions::default()).unwrap();
        let m = restricted_matrix(&low);
        for k in 0..8 {
            let want = if k == 7 { -1.0 } else { 1.0 };
            assert!((m.get(k, k).re - want).abs() < 1e-13, "state {k}");
            assert!(m.get(k, k).im.abs() < 1e-13);
        }
    }

    #[test]
    fn strict_mode_is_cnot_and_single_qubit_only() {
        let mut c = Circuit::new(3, "s").unwrap();
        c.push(Gate::controlled(
            0,
            SingleOp::Phase(0.7),
            ConditionSet::one(1),
        ))
        .unwrap();
        c.push(Gate::controlled(
            2,
            SingleOp::H,
            ConditionSet::new([0, 1], []).unwrap(),
        ))
        .unwrap();
        let (low, _) = lower_circuit(&c, LowerOptions::strict()).unwrap();
        assert!(low.is_elementary_only());
        for g in low.gates() {
            if !g.conds.is_empty() {
                assert!(
                    matches!(
                        g.kind,
                        GateKind::Single {
                            op: SingleOp::X,
                            ..
                        }
                    ),
                    "{g}"
                );
            }
        }
        let err = restricted_matrix(&low).max_abs_diff(&restricted_matrix(&c));
        assert!(err < 1e-12);
    }

    #[test]
    fn abc_reproduces_controlled_unitaries() {
        let cases = [
            Unitary2::x(),
            Unitary2::z(),
            Unitary2::h(),
            Unitary2::phase(2.3),
            Unitary2::rotation(-0.9),
            Unitary2::new([
                [Complex::new(0.0, 0.6), Complex::new(0.8, 0.0)],
                [Complex::new(-0.8, 0.0), Complex::new(0.0, -0.6)],
            ])
            .unwrap(),
        ];
        for u in cases {
            let mut em = Emitter::new(LowerMode::Strict, 2, 0);
            em.abc(1, 0, u);
            let got = matrix_of(&em.out, 2);
            let mut want = DenseMatrix::identity(4);
            for r in 0..2 {
                for c in 0..2 {
                    want.set(2 + r, 2 + c, u.entry(r, c));
                }
            }
            let err = got.max_abs_diff(&want);
            assert!(err < 1e-12, "{u:?}: {err:e}");
        }
    }

    #[test]
    fn tcomp_values() {
        // m = 3: 3 -> 5, 0 -> 0.
        let (gates, ancillas) =
            lower_tcomp(0, 2, &ConditionSet::none(), 3, LowerOptions::default()).unwrap();
        let mut c = Circuit::with_ancillas(3, ancillas, "tc").unwrap();
        c.extend(gates).unwrap();
        let m = restricted_matrix(&c);
        assert!((m.get(5, 3).re - 1.0).abs() < 1e-13);
        assert!((m.get(0, 0).re - 1.0).abs() < 1e-13);
        // Involution over all basis states, m = 4.
        let (gates, ancillas) =
            lower_tcomp(0, 3, &ConditionSet::none(), 4, LowerOptions::default()).unwrap();
        let mut c = Circuit::with_ancillas(4, ancillas, "tc2").unwrap();
        c.extend(gates.clone()).unwrap();
        c.extend(gates).unwrap();
        let err = restricted_matrix(&c).max_abs_diff(&DenseMatrix::identity(16));
        assert!(err < 1e-12);
    }

    #[test]
    fn tcomp_matches_macro_semantics() {
        for conds in [
            ConditionSet::none(),
            ConditionSet::one(3),
            ConditionSet::new([3], [4]).unwrap(),
        ] {
            let mut c = Circuit::new(5, "tc").unwrap();
            c.push(Gate::twos_complement(0, 2, conds.clone())).unwrap();
            let (low, _) = lower_circuit(&c, LowerOptions::default()).unwrap();
            let err = restricted_matrix(&low).max_abs_diff(&restricted_matrix(&c));
            assert!(err < 1e-12, "conds {conds:?}");
        }
    }

    #[test]
    fn tcomp_expansion_is_linear_in_width() {
        // Shared carry ladder: gate count grows linearly with the range.
        let mut counts = Vec::new();
        for m in 2..=8 {
            let (gates, _) = lower_tcomp(
                0,
                m - 1,
                &ConditionSet::one(m),
                m + 1,
                LowerOptions::default(),
            )
            .unwrap();
            counts.push(gates.len());
        }
        let diffs: Vec<isize> = counts
            .windows(2)
            .map(|w| w[1] as isize - w[0] as isize)
            .collect();
        assert!(
            diffs.windows(2).all(|d| d[0] == d[1]),
            "not linear: {counts:?}"
        );
    }

    #[test]
    fn bitrev_expands_to_outer_swaps() {
        let gates = lower_perm(&PermSpec::BitReversal, &ConditionSet::none(), 4);
        assert_eq!(gates.len(), 6); // two swaps, three CNOTs each
        let m = matrix_of(&gates, 4);
        for k in 0..16usize {
            assert_eq!(m.get(crate::ir::bit_reverse(k, 4), k).re, 1.0);
        }
        // On 3 qubits index 1 maps to 4.
        let gates = lower_perm(&PermSpec::BitReversal, &ConditionSet::none(), 3);
        let m = matrix_of(&gates, 3);
        assert_eq!(m.get(4, 1).re, 1.0);
    }

    #[test]
    fn wire_swap_is_three_cnots() {
        let gates = lower_perm(&PermSpec::WireSwap(0, 1), &ConditionSet::none(), 2);
        assert_eq!(gates.len(), 3);
        let m = matrix_of(&gates, 2);
        let mut want = DenseMatrix::identity(4);
        want.set(1, 1, Complex::new(0.0, 0.0));
        want.set(2, 2, Complex::new(0.0, 0.0));
        want.set(2, 1, Complex::new(1.0, 0.0));
        want.set(1, 2, Complex::new(1.0, 0.0));
        assert_eq!(m.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn rotations_expand_to_adjacent_swaps() {
        for dir in [Direction::Left, Direction::Right] {
            let mut c = Circuit::new(4, "rot").unwrap();
            c.push(Gate::perm(PermSpec::RotateWires(dir))).unwrap();
            let (low, _) = lower_circuit(&c, LowerOptions::default()).unwrap();
            assert_eq!(low.len(), 9); // 3 swaps
            let err = restricted_matrix(&low).max_abs_diff(&restricted_matrix(&c));
            assert_eq!(err, 0.0, "{dir:?}");
        }
    }

    #[test]
    fn transposition_lowering_matches_macro() {
        for (i, j) in [(1usize, 4usize), (0, 7), (3, 5), (2, 3)] {
            let mut c = Circuit::new(3, "tr").unwrap();
            c.push(Gate::perm(PermSpec::Transposition(i, j))).unwrap();
            let (low, _) = lower_circuit(&c, LowerOptions::default()).unwrap();
            let err = restricted_matrix(&low).max_abs_diff(&restricted_matrix(&c));
            assert!(err < 1e-13, "({i},{j}): {err:e}");
        }
    }

    #[test]
    fn conditioned_swap_conditions_every_cnot() {
        let conds = ConditionSet::new([2], []).unwrap();
        let gates = lower_perm(&PermSpec::WireSwap(0, 1), &conds, 3);
        assert!(gates.iter().all(|g| g.conds.ones().contains(&2)));
        let mut c = Circuit::new(3, "cs").unwrap();
        c.push(Gate {
            kind: GateKind::Perm(PermSpec::WireSwap(0, 1)),
            conds,
        })
        .unwrap();
        let (low, _) = lower_circuit(&c, LowerOptions::default()).unwrap();
        let err = restricted_matrix(&low).max_abs_diff(&restricted_matrix(&c));
        assert!(err < 1e-13);
    }

    #[test]
    fn multicontrol_rejects_macros() {
        let gate = Gate::twos_complement(0, 1, ConditionSet::one(2));
        assert!(matches!(
            lower_multicontrol(&gate, 3, LowerOptions::default()),
            Err(LowerError::Unsupported(_))
        ));
    }

    #[test]
    fn ancilla_cap_is_enforced() {
        let mut c = Circuit::new(6, "cap").unwrap();
        c.push(Gate::controlled(
            0,
            SingleOp::X,
            ConditionSet::new([1, 2, 3, 4, 5], []).unwrap(),
        ))
        .unwrap();
        let opts = LowerOptions {
            ancilla_cap: 2,
            ..LowerOptions::default()
        };
        assert!(matches!(
            lower_circuit(&c, opts),
            Err(LowerError::AncillaBudget { needed: 4, cap: 2 })
        ));
    }

    #[test]
    fn multicontrol_count_grows_linearly() {
        // 10(k-1) + 1 elementary gates for a k-condition payload.
        for k in 2..=8usize {
            let conds = ConditionSet::new(1..=k, []).unwrap();
            let gate = Gate::controlled(0, SingleOp::H, conds);
            let (gates, ancillas) =
                lower_multicontrol(&gate, k + 1, LowerOptions::default()).unwrap();
            assert_eq!(ancillas, k - 1);
            assert_eq!(gates.len(), ladder_cost(k, LowerMode::Elementary) + 1);
        }
    }

    #[test]
    fn lowered_circuits_leave_ancillas_clean() {
        let mut c = Circuit::new(4, "clean").unwrap();
        c.push(Gate::controlled(
            0,
            SingleOp::H,
            ConditionSet::new([1, 2, 3], []).unwrap(),
        ))
        .unwrap();
        c.push(Gate::twos_complement(0, 2, ConditionSet::one(3)))
            .unwrap();
        let (low, _) = lower_circuit(&c, LowerOptions::default()).unwrap();
        for k in 0..16 {
            let out = run(&low, &StateVector::basis(4, k).unwrap()).unwrap();
            let leak: f64 = out.amplitudes()[16..]
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(leak < 1e-12, "basis {k}: leak {leak:e}");
        }
    }
}
