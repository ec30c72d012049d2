//! Gate counting and empirical growth-rate checks.
//!
//! Three counting modes. `HighLevel` counts a synthesized circuit as
//! emitted, weighting macros in wire-swap units (a swap counts 1, `BITREV`
//! counts `⌊n/2⌋`, a rotation counts `n − 1`, `TCOMP` counts 1); those
//! weights make the tables reproducible bit-exactly. `Lowered` and
//! `StrictElementary` count circuits already lowered in the corresponding
//! mode and reject anything else.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ir::{Circuit, GateKind, PermSpec, SingleOp};
use crate::lower::{LowerError, LowerOptions, lower_circuit};
use crate::synth::Transform;
use crate::transforms::SizeError;

/// Largest `n` the lowered-mode profiles will build.
pub const MAX_PROFILE_QUBITS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyzeError {
    #[error("count mode mismatch: {0}")]
    ModeMismatch(String),
    #[error(transparent)]
    Size(#[from] SizeError),
    #[error(transparent)]
    Lower(#[from] LowerError),
    #[error(
        "{transform} level {n}: per-level cost {got} differs from the recurrence value {expected}"
    )]
    RecurrenceMismatch {
        transform: Transform,
        n: usize,
        got: u64,
        expected: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    HighLevel,
    Lowered,
    StrictElementary,
}

impl CountMode {
    pub const ALL: [CountMode; 3] = [
        CountMode::HighLevel,
        CountMode::Lowered,
        CountMode::StrictElementary,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CountMode::HighLevel => "high_level",
            CountMode::Lowered => "lowered",
            CountMode::StrictElementary => "strict_elementary",
        }
    }
}

/// Exact gate count of a circuit in the requested mode.
pub fn count_gates(circuit: &Circuit, mode: CountMode) -> Result<u64, AnalyzeError> {
    match mode {
        CountMode::HighLevel => {
            let n = circuit.data_qubits() as u64;
            Ok(circuit
                .gates()
                .iter()
                .map(|g| match &g.kind {
                    GateKind::Perm(PermSpec::BitReversal) => n / 2,
                    GateKind::Perm(PermSpec::RotateWires(_)) => n - 1,
                    _ => 1,
                })
                .sum())
        }
        CountMode::Lowered => {
            if !circuit.is_elementary_only() {
                return Err(AnalyzeError::ModeMismatch(
                    "circuit is not elementary-only; lower it first".into(),
                ));
            }
            Ok(circuit.len() as u64)
        }
        CountMode::StrictElementary => {
            let strict = circuit.gates().iter().all(|g| {
                g.is_elementary()
                    && (g.conds.is_empty()
                        || matches!(
                            g.kind,
                            GateKind::Single {
                                op: SingleOp::X,
                                ..
                            }
                        ))
            });
            if !strict {
                return Err(AnalyzeError::ModeMismatch(
                    "circuit contains conditioned non-NOT gates; lower it strictly first".into(),
                ));
            }
            Ok(circuit.len() as u64)
        }
    }
}

/// Least-squares fit of `count ≈ c · n^p` in log-log space.
#[derive(Debug, Clone, Copy)]
pub struct PowerFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// RMS residual of `ln count` around the fit.
    pub residual: f64,
}

pub fn fit_power(table: &BTreeMap<usize, u64>) -> PowerFit {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|&(&n, &c)| n >= 1 && c >= 1)
        .map(|(&n, &c)| ((n as f64).ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 2 {
        let c = table.values().next().copied().unwrap_or(1) as f64;
        return PowerFit {
            exponent: 0.0,
            coefficient: c,
            residual: 0.0,
        };
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let exponent = (m * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / m;
    let residual = (pts
        .iter()
        .map(|&(x, y)| (y - (intercept + exponent * x)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    PowerFit {
        exponent,
        coefficient: intercept.exp(),
        residual,
    }
}

/// Gate counts of one transform over `n = 1 ..= n_max` in one mode.
#[derive(Debug, Clone)]
pub struct CountProfile {
    pub transform: Transform,
    pub mode: CountMode,
    pub table: BTreeMap<usize, u64>,
    pub fit: PowerFit,
}

impl CountProfile {
    /// Smallest constant with `count(n) ≤ C·n²` over the profiled range.
    pub fn quadratic_bound(&self) -> f64 {
        self.table
            .iter()
            .map(|(&n, &c)| c as f64 / (n * n) as f64)
            .fold(0.0, f64::max)
    }
}

/// Builds circuits for `n = 1 ..= n_max` and counts them in `mode`.
pub fn profile(
    transform: Transform,
    mode: CountMode,
    n_max: usize,
) -> Result<CountProfile, AnalyzeError> {
    if mode != CountMode::HighLevel && n_max > MAX_PROFILE_QUBITS {
        return Err(AnalyzeError::Size(SizeError::QubitCount {
            n: n_max,
            min: 1,
            max: MAX_PROFILE_QUBITS,
        }));
    }
    let mut table = BTreeMap::new();
    for n in 1..=n_max {
        let circuit = transform.build(n)?;
        let count = match mode {
            CountMode::HighLevel => count_gates(&circuit, mode)?,
            CountMode::Lowered => {
                let (low, _) = lower_circuit(&circuit, LowerOptions::default())?;
                count_gates(&low, mode)?
            }
            CountMode::StrictElementary => {
                let (low, _) = lower_circuit(&circuit, LowerOptions::strict())?;
                count_gates(&low, mode)?
            }
        };
        table.insert(n, count);
    }
    let fit = fit_power(&table);
    Ok(CountProfile {
        transform,
        mode,
        table,
        fit,
    })
}

/// High-level cost of the level-`n` block appended by each recursion,
/// `n ≥ 2`. Walsh adds one Hadamard; Fourier adds a Hadamard, `n − 1`
/// conditioned phases and the amortized growth of the deferred bit
/// reversal; Slant adds its six-gate block; Hartley adds the `n − 1` swap
/// units of the even/odd rotation, the cosine-sine block (`n + 2` gates,
/// absent at `n = 2`) and a Hadamard.
pub fn expected_block_cost(transform: Transform, n: usize) -> u64 {
    debug_assert!(n >= 2);
    let n64 = n as u64;
    match transform {
        Transform::Walsh => 1,
        Transform::Dft => n64 + u64::from(n.is_multiple_of(2)),
        Transform::Slant => 6,
        Transform::Hartley => {
            if n == 2 {
                2
            } else {
                2 * n64 + 2
            }
        }
    }
}

/// High-level profile plus an exact check that consecutive counts differ by
/// [`expected_block_cost`].
pub fn check_recurrence(transform: Transform, n_max: usize) -> Result<CountProfile, AnalyzeError> {
    let profile = profile(transform, CountMode::HighLevel, n_max)?;
    for n in 2..=n_max {
        let got = profile.table[&n] - profile.table[&(n - 1)];
        let expected = expected_block_cost(transform, n);
        if got != expected {
            return Err(AnalyzeError::RecurrenceMismatch {
                transform,
                n,
                got,
                expected,
            });
        }
    }
    Ok(profile)
}

/// Profiles for all three modes.
pub fn full_profiles(
    transform: Transform,
    n_max: usize,
) -> Result<[CountProfile; 3], AnalyzeError> {
    Ok([
        profile(transform, CountMode::HighLevel, n_max)?,
        profile(transform, CountMode::Lowered, n_max)?,
        profile(transform, CountMode::StrictElementary, n_max)?,
    ])
}

/// Tab-separated count table: columns `n`, `N`, `high_level`, `lowered`,
/// `strict_elementary`.
pub fn render_table(profiles: &[CountProfile; 3]) -> String {
    let mut out = String::from("n\tN\thigh_level\tlowered\tstrict_elementary\n");
    for (&n, &high) in &profiles[0].table {
        out.push_str(&format!(
            "{n}\t{}\t{high}\t{}\t{}\n",
            1u64 << n,
            profiles[1].table.get(&n).copied().unwrap_or(0),
            profiles[2].table.get(&n).copied().unwrap_or(0),
        ));
    }
    out
}
