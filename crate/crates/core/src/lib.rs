//! Quantum-circuit synthesis and verification toolkit for fast unitary
//! transforms (Fourier, Walsh-Hadamard, Slant, Hartley).
//!
//! The crate is a small pipeline:
//!
//! - [`ir`] — gate-level circuit representation: single-qubit gates with
//!   zero/one condition sets, plus permutation and two's-complement macros.
//! - [`transforms`] — dense ground-truth matrices for the four transforms;
//!   these define correctness for every synthesized circuit.
//! - [`synth`] — recursive circuit builders, one per transform.
//! - [`lower`] — expansion of macros and multiply-controlled gates into
//!   elementary gates using ancilla workbits.
//! - [`simulate`] — state-vector simulation, full-matrix extraction and
//!   single-shot measurement sampling.
//! - [`analyze`] — gate counting and growth-rate checks.
//! - [`format`] — the `qc-text`, `mat-text` and `vec-text` file formats.

pub mod analyze;
pub mod format;
pub mod ir;
pub mod lower;
pub mod simulate;
pub mod synth;
pub mod transforms;

pub use ir::{Circuit, Complex, ConditionSet, Gate, GateKind, SingleOp, Unitary2};
pub use simulate::StateVector;
pub use synth::Transform;
pub use transforms::DenseMatrix;
