//! Ground-truth dense matrices for the four transforms.
//!
//! Every synthesized circuit is checked against one of these oracles. The
//! Walsh and Slant matrices come out of their defining recursions; the
//! Fourier and Hartley matrices are evaluated entry-wise from their closed
//! forms, so circuit and oracle take genuinely different computation paths.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::ir::Complex;

/// Largest supported qubit count for the Fourier, Walsh and Hartley oracles.
pub const MAX_QUBITS: usize = 12;
/// Largest supported qubit count for the Slant oracle (its recursion
/// multiplies dense factors level by level).
pub const MAX_SLANT_QUBITS: usize = 10;
/// Unitarity tolerance for oracle outputs.
pub const ORACLE_UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SizeError {
    #[error("qubit count {n} outside the supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },
    #[error("size {0} must be a power of two and at least {1}")]
    InvalidSize(usize, usize),
}

fn check_range(n: usize, min: usize, max: usize) -> Result<(), SizeError> {
    if n < min || n > max {
        return Err(SizeError::QubitCount { n, min, max });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// dense matrices

/// Row-major square complex matrix of power-of-two dimension.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<Complex>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix({}x{})", self.dim, self.dim)
    }
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(columns: Vec<Vec<Complex>>) -> Self {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (c, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), dim);
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, *v);
            }
        }
        m
    }

    /// Permutation matrix sending basis state `k` to `perm(k)`.
    pub fn permutation(dim: usize, perm: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(perm(k), k, Complex::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Complex) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn row(&self, row: usize) -> &[Complex] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        // ikj order keeps the inner loop on contiguous rows.
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.entries[i * n..(i + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |r, c| self.get(c, r).conj())
    }

    /// `self^k` by repeated multiplication.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Location and magnitude of the worst deviation from `rhs`.
    pub fn worst_entry_diff(&self, rhs: &Self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0f64);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let d = (self.get(r, c) - rhs.get(r, c)).norm();
                if d > worst.2 {
                    worst = (r, c, d);
                }
            }
        }
        worst
    }

    /// Max-entry deviation of `M†·M` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }
}

// ---------------------------------------------------------------------------
// Fourier

/// Discrete Fourier transform matrix: entry `(j, k) = ω^{jk} / √N` with
/// `ω = exp(2πi/N)`, `N = 2^n`.
pub fn dft_matrix(n: usize) -> Result<DenseMatrix, SizeError> {
    check_range(n, 1, MAX_QUBITS)?;
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    Ok(DenseMatrix::from_fn(dim, |j, k| {
        // Reduce the exponent mod N before touching floating point.
        let e = (j * k) % dim;
        let theta = TAU * e as f64 / dim as f64;
        Complex::new(theta.cos() * scale, theta.sin() * scale)
    }))
}

// ---------------------------------------------------------------------------
// Walsh-Hadamard

/// Walsh-Hadamard matrix via the block recursion
/// `W_N = (1_2 ⊗ W_{N/2}) (H ⊗ 1_{N/2})`, i.e. `W_N = [[W, W], [W, −W]] / √2`.
pub fn wht_matrix(n: usize) -> Result<DenseMatrix, SizeError> {
    check_range(n, 1, MAX_QUBITS)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = DenseMatrix::from_fn(2, |r, c| {
        Complex::new(if r == 1 && c == 1 { -s } else { s }, 0.0)
    });
    let mut w = h;
    for _ in 2..=n {
        let half = w.dim();
        let mut next = DenseMatrix::zeros(2 * half);
        for r in 0..half {
            for c in 0..half {
                let v = w.get(r, c) * s;
                next.set(r, c, v);
                next.set(r, c + half, v);
                next.set(r + half, c, v);
                next.set(r + half, c + half, -v);
            }
        }
        w = next;
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// Slant

/// Slant recursion coefficients `(a_N, b_N)`: `a_2 = 1`, and for `N ≥ 4`
/// `b_N = 1/√(1 + 4·a_{N/2}²)`, `a_N = 2·b_N·a_{N/2}`. At `N = 2` the pair
/// is reported as `(1, 0)`; `b_2` is never used.
pub fn slant_coeffs(size: usize) -> Result<(f64, f64), SizeError> {
    if size < 2 || !size.is_power_of_two() {
        return Err(SizeError::InvalidSize(size, 2));
    }
    static TABLE: Mutex<BTreeMap<usize, (f64, f64)>> = Mutex::new(BTreeMap::new());
    let mut table = TABLE.lock().unwrap();
    if let Some(&pair) = table.get(&size) {
        return Ok(pair);
    }
    let mut n = 2usize;
    let mut a = 1.0f64;
    table.entry(2).or_insert((1.0, 0.0));
    while n < size {
        if let Some(&(cached, _)) = table.get(&(n * 2)) {
            a = cached;
        } else {
            let b = 1.0 / (1.0 + 4.0 * a * a).sqrt();
            a *= 2.0 * b;
            table.insert(n * 2, (a, b));
        }
        n *= 2;
    }
    Ok(*table.get(&size).unwrap())
}

/// Memoized view of the Slant coefficient table.
#[derive(Debug, Clone, Default)]
pub struct SlantCoeffs {
    table: BTreeMap<usize, (f64, f64)>,
}

impl SlantCoeffs {
    /// Table of `(a_N, b_N)` for every power of two `2 ≤ N ≤ size`.
    pub fn up_to(size: usize) -> Result<Self, SizeError> {
        if size < 2 || !size.is_power_of_two() {
            return Err(SizeError::InvalidSize(size, 2));
        }
        let mut table = BTreeMap::new();
        let mut n = 2usize;
        while n <= size {
            table.insert(n, slant_coeffs(n)?);
            n *= 2;
        }
        Ok(Self { table })
    }

    pub fn table(&self) -> &BTreeMap<usize, (f64, f64)> {
        &self.table
    }
}

/// `Q_N = P^a_N · (1_{N/2} ⊕ Q̂_N) · (H ⊗ 1_{N/2}) · P^b_N`, each factor
/// built as an explicit dense matrix:
/// `P^a` transposes basis states 1 and N/2, `P^b` negates basis state
/// N/2 + 1, and `Q̂_N = A_N ⊕ 1` with `A_N = [[a, b], [−b, a]]`.
fn slant_q_factor(dim: usize) -> Result<DenseMatrix, SizeError> {
    let half = dim / 2;
    let (a, b) = slant_coeffs(dim)?;

    let pa = DenseMatrix::permutation(dim, |k| match k {
        1 => half,
        k if k == half => 1,
        k => k,
    });

    let mut pb = DenseMatrix::identity(dim);
    pb.set(half + 1, half + 1, Complex::new(-1.0, 0.0));

    let mut mix = DenseMatrix::identity(dim);
    mix.set(half, half, Complex::new(a, 0.0));
    mix.set(half, half + 1, Complex::new(b, 0.0));
    mix.set(half + 1, half, Complex::new(-b, 0.0));
    mix.set(half + 1, half + 1, Complex::new(a, 0.0));

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut butterfly = DenseMatrix::zeros(dim);
    for r in 0..half {
        butterfly.set(r, r, Complex::new(s, 0.0));
        butterfly.set(r, r + half, Complex::new(s, 0.0));
        butterfly.set(r + half, r, Complex::new(s, 0.0));
        butterfly.set(r + half, r + half, Complex::new(-s, 0.0));
    }

    Ok(pa.mul(&mix).mul(&butterfly).mul(&pb))
}

/// Slant matrix: `S_2 = H`, `S_N = Q_N · (1_2 ⊗ S_{N/2})`.
pub fn slant_matrix(n: usize) -> Result<DenseMatrix, SizeError> {
    check_range(n, 1, MAX_SLANT_QUBITS)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DenseMatrix::from_fn(2, |r, c| {
        Complex::new(if r == 1 && c == 1 { -s } else { s }, 0.0)
    });
    for k in 2..=n {
        let dim = 1usize << k;
        let half = dim / 2;
        let mut block = DenseMatrix::zeros(dim);
        for r in 0..half {
            for c in 0..half {
                let v = m.get(r, c);
                block.set(r, c, v);
                block.set(r + half, c + half, v);
            }
        }
        m = slant_q_factor(dim)?.mul(&block);
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Hartley

/// Discrete Hartley transform matrix: entry
/// `(k, ℓ) = (cos(2πkℓ/N) + sin(2πkℓ/N)) / √N`. Real and exactly symmetric
/// (each entry is computed once and mirrored).
pub fn dht_matrix(n: usize) -> Result<DenseMatrix, SizeError> {
    check_range(n, 1, MAX_QUBITS)?;
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    let mut m = DenseMatrix::zeros(dim);
    for k in 0..dim {
        for l in k..dim {
            let e = (k * l) % dim;
            let theta = TAU * e as f64 / dim as f64;
            let v = Complex::new((theta.cos() + theta.sin()) * scale, 0.0);
            m.set(k, l, v);
            m.set(l, k, v);
        }
    }
    Ok(m)
}

/// The cosine-sine block of the Hartley recursion, of dimension
/// `M = N/2 = 2^{n-1}`. Basis states 0 and `N/4` are fixed; for
/// `1 ≤ k < N/4` the entries are
/// `m[k][k] = cos(2πk/N)`, `m[M−k][M−k] = −cos(2πk/N)` and
/// `m[k][M−k] = m[M−k][k] = sin(2πk/N)`.
///
/// Only those two states are fixed: the all-ones argument (index
/// `N/4 − 1`) mixes like every other nonzero argument.
pub fn cs_block_matrix(n: usize) -> Result<DenseMatrix, SizeError> {
    check_range(n, 2, MAX_QUBITS)?;
    let big_n = 1usize << n;
    let dim = big_n / 2;
    let mut m = DenseMatrix::zeros(dim);
    m.set(0, 0, Complex::new(1.0, 0.0));
    m.set(dim / 2, dim / 2, Complex::new(1.0, 0.0));
    for k in 1..dim / 2 {
        let theta = TAU * k as f64 / big_n as f64;
        let (s, c) = theta.sin_cos();
        m.set(k, k, Complex::new(c, 0.0));
        m.set(k, dim - k, Complex::new(s, 0.0));
        m.set(dim - k, k, Complex::new(s, 0.0));
        m.set(dim - k, dim - k, Complex::new(-c, 0.0));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::index_bit;

    fn approx(a: Complex, re: f64, im: f64, eps: f64) -> bool {
        (a.re - re).abs() < eps && (a.im - im).abs() < eps
    }

    #[test]
    fn dft_small_values() {
        // n=1 is the Hadamard matrix.
        let f2 = dft_matrix(1).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!(approx(f2.get(0, 0), s, 0.0, 1e-15));
        assert!(approx(f2.get(1, 1), -s, 0.0, 1e-15));

        // n=2: ω = i, entries ω^{jk}/2.
        let f4 = dft_matrix(2).unwrap();
        assert!(approx(f4.get(1, 1), 0.0, 0.5, 1e-15));
        assert!(approx(f4.get(1, 3), 0.0, -0.5, 1e-15));
        assert!(approx(f4.get(2, 2), 0.5, 0.0, 1e-15));
        assert!(approx(f4.get(3, 3), 0.0, 0.5, 1e-15));
    }

    #[test]
    fn dft_fourth_power_is_identity() {
        let f = dft_matrix(3).unwrap();
        let err = f.pow(4).max_abs_diff(&DenseMatrix::identity(8));
        assert!(err < 1e-10, "F^4 deviates from identity by {err:e}");
    }

    #[test]
    fn wht_small_values() {
        let w2 = wht_matrix(1).unwrap();
        assert!(approx(w2.get(1, 1), -1.0 / 2.0_f64.sqrt(), 0.0, 1e-15));

        let w4 = wht_matrix(2).unwrap();
        let expect: [[f64; 4]; 4] = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        for (r, row) in expect.iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                assert!(approx(w4.get(r, c), want / 2.0, 0.0, 1e-15));
            }
        }
    }

    #[test]
    fn wht_is_involution() {
        let w = wht_matrix(3).unwrap();
        let err = w.pow(2).max_abs_diff(&DenseMatrix::identity(8));
        assert!(err < 1e-10);
    }

    #[test]
    fn slant_coefficients() {
        assert_eq!(slant_coeffs(2).unwrap().0, 1.0);
        let (a4, b4) = slant_coeffs(4).unwrap();
        assert!((a4 - 2.0 / 5.0_f64.sqrt()).abs() < 1e-15);
        assert!((b4 - 1.0 / 5.0_f64.sqrt()).abs() < 1e-15);
        let (a8, b8) = slant_coeffs(8).unwrap();
        assert!((a8 - 4.0 / 21.0_f64.sqrt()).abs() < 1e-15);
        assert!((b8 - (5.0f64 / 21.0).sqrt()).abs() < 1e-15);
        assert!(slant_coeffs(3).is_err());
        assert!(slant_coeffs(1).is_err());
    }

    #[test]
    fn slant_coefficient_table() {
        let table = SlantCoeffs::up_to(32).unwrap();
        assert_eq!(
            table.table().keys().copied().collect::<Vec<_>>(),
            vec![2, 4, 8, 16, 32]
        );
        assert_eq!(table.table()[&4], slant_coeffs(4).unwrap());
        assert!(SlantCoeffs::up_to(24).is_err());
    }

    #[test]
    fn slant_base_and_dc_row() {
        let s2 = slant_matrix(1).unwrap();
        assert!(approx(s2.get(0, 1), 1.0 / 2.0_f64.sqrt(), 0.0, 1e-15));

        // Row 0 of S_8 is the constant vector 1/√8.
        let s8 = slant_matrix(3).unwrap();
        let want = 1.0 / 8.0_f64.sqrt();
        for c in 0..8 {
            assert!(approx(s8.get(0, c), want, 0.0, 1e-12), "row 0 col {c}");
        }
    }

    #[test]
    fn slant_second_row_is_a_slant() {
        // Row 1 decreases in equal steps and is orthogonal to row 0.
        for n in 2..=6 {
            let s = slant_matrix(n).unwrap();
            let dim = s.dim();
            let row: Vec<f64> = (0..dim).map(|c| s.get(1, c).re).collect();
            let step = row[1] - row[0];
            assert!(step < 0.0, "n={n}: second row should decrease");
            for c in 2..dim {
                assert!(
                    ((row[c] - row[c - 1]) - step).abs() < 1e-12,
                    "n={n}: step at column {c} is not uniform"
                );
            }
            let dot: f64 = (0..dim).map(|c| s.get(0, c).re * row[c]).sum();
            assert!(dot.abs() < 1e-12, "n={n}: rows 0 and 1 not orthogonal");
        }
    }

    #[test]
    fn dht_small_values() {
        let h2 = dht_matrix(1).unwrap();
        assert!(approx(h2.get(1, 1), -1.0 / 2.0_f64.sqrt(), 0.0, 1e-15));

        let h4 = dht_matrix(2).unwrap();
        let expect: [[f64; 4]; 4] = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        for (r, row) in expect.iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                assert!(approx(h4.get(r, c), want / 2.0, 0.0, 1e-15), "({r},{c})");
            }
        }
    }

    #[test]
    fn dht_is_real_symmetric_involution() {
        for n in 1..=6 {
            let h = dht_matrix(n).unwrap();
            let dim = h.dim();
            for r in 0..dim {
                for c in 0..dim {
                    assert_eq!(h.get(r, c).im, 0.0);
                    assert_eq!(h.get(r, c), h.get(c, r));
                }
            }
            let err = h.pow(2).max_abs_diff(&DenseMatrix::identity(dim));
            assert!(err < 1e-10, "n={n}: H^2 deviates by {err:e}");
        }
    }

    #[test]
    fn cs_block_small() {
        // n=2 gives the 2x2 identity.
        let b = cs_block_matrix(2).unwrap();
        assert_eq!(b.max_abs_diff(&DenseMatrix::identity(2)), 0.0);
        assert!(cs_block_matrix(1).is_err());
    }

    #[test]
    fn cs_block_is_orthogonal() {
        let b = cs_block_matrix(4).unwrap();
        let err = b.adjoint().mul(&b).max_abs_diff(&DenseMatrix::identity(8));
        assert!(err < 1e-12);
    }

    #[test]
    fn cs_block_action_matches_case_table() {
        // Columns follow the four-case action on |b x⟩ of the half-size
        // register: 0 and the all-zero x with b=1 are fixed; otherwise
        // |0 y⟩ ↦ cos·|0 y⟩ + sin·|1 y'⟩ and |1 x⟩ ↦ sin·|0 x'⟩ − cos·|1 x⟩
        // with y' the two's complement of y.
        for n in 3..=5 {
            let big_n = 1usize << n;
            let m = cs_block_matrix(n).unwrap();
            let dim = m.dim();
            let xbits = n - 2;
            let xmask = (1usize << xbits) - 1;
            for col in 0..dim {
                let b = index_bit(col, n - 2);
                let x = col & xmask;
                let mut expect = vec![Complex::new(0.0, 0.0); dim];
                let comp = (1usize << xbits).wrapping_sub(x) & xmask;
                if x == 0 {
                    expect[col] = Complex::new(1.0, 0.0);
                } else if !b {
                    let theta = TAU * x as f64 / big_n as f64;
                    expect[col] = Complex::new(theta.cos(), 0.0);
                    expect[comp | (1 << xbits)] = Complex::new(theta.sin(), 0.0);
                } else {
                    let theta = TAU * comp as f64 / big_n as f64;
                    expect[comp] = Complex::new(theta.sin(), 0.0);
                    expect[col] = Complex::new(-theta.cos(), 0.0);
                }
                for (r, want) in expect.iter().enumerate() {
                    assert!(
                        (m.get(r, col) - want).norm() < 1e-14,
                        "n={n} col={col} row={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn oracles_are_unitary() {
        for n in 1..=8 {
            assert!(dft_matrix(n).unwrap().unitarity_error() < ORACLE_UNITARY_TOL);
            assert!(wht_matrix(n).unwrap().unitarity_error() < ORACLE_UNITARY_TOL);
            assert!(slant_matrix(n).unwrap().unitarity_error() < ORACLE_UNITARY_TOL);
            assert!(dht_matrix(n).unwrap().unitarity_error() < ORACLE_UNITARY_TOL);
        }
    }

    #[test]
    fn size_limits() {
        assert!(dft_matrix(0).is_err());
        assert!(dft_matrix(13).is_err());
        assert!(slant_matrix(11).is_err());
    }
}
