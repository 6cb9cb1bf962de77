//! Dense complex linear algebra on the molecule (x) cavity product space.
//!
//! The Hilbert space is the tensor product of a 3-level molecule and an
//! (N+1)-dimensional truncated Fock space, dimension 3(N+1). Tensor ordering
//! is fixed as molecule (x) cavity with the molecule index slow: the basis
//! state |m, n> lives at flat index `m*(N+1) + n`. Every embedded operator is
//! built through [`embed_molecule`] / [`embed_cavity`] so the ordering
//! convention exists in exactly one place.
//!
//! Matrices are dense: the working dimension (93 at the default N = 30) makes
//! dense storage the fast path. Backed by `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Number of molecular levels. |1>, |2>, |3> map to indices 0, 1, 2.
pub const MOL_LEVELS: usize = 3;

/// Complex state vector.
pub type CVec = DVector<C64>;
/// Dense complex matrix.
pub type CMat = DMatrix<C64>;

/// Kronecker product with the left factor slow (row-major block convention):
/// `kron(A, B)[i*db + k, j*db + l] = A[i,j] * B[k,l]`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Identity matrix of dimension `d`.
pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Annihilation operator on the truncated Fock space, `<n-1|a|n> = sqrt(n)`.
///
/// `n_max` is the highest retained Fock state; the matrix is (n_max+1)^2.
pub fn annihilation(n_max: usize) -> Result<CMat> {
    if n_max == 0 {
        return Err(Error::InvalidTruncation);
    }
    let f = n_max + 1;
    let mut m = CMat::zeros(f, f);
    for n in 1..f {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(m)
}

/// Number operator `a^dag a` (diagonal 0..n_max).
pub fn number_operator(n_max: usize) -> Result<CMat> {
    if n_max == 0 {
        return Err(Error::InvalidTruncation);
    }
    let f = n_max + 1;
    Ok(CMat::from_fn(f, f, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Truncated coherent state `c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!)`,
/// renormalized after truncation.
///
/// The truncation tail `sum_{n>N} |c_n|^2` is checked against 1e-10; if the
/// cutoff is too small the error names the truncation actually required.
pub fn coherent_state(alpha: C64, n_max: usize) -> Result<CVec> {
    const TAIL_LIMIT: f64 = 1e-10;
    if n_max == 0 && alpha.norm() > 0.0 {
        return Err(Error::InvalidTruncation);
    }
    let f = n_max + 1;
    let nsq = alpha.norm_sqr();
    // Poisson weights p_n = e^{-|a|^2} |a|^{2n} / n! by stable recurrence
    let mut weights = Vec::with_capacity(f);
    let mut p = (-nsq).exp();
    let mut kept = 0.0;
    for n in 0..f {
        weights.push(p);
        kept += p;
        p *= nsq / (n as f64 + 1.0);
    }
    let tail = 1.0 - kept;
    if tail >= TAIL_LIMIT {
        // continue the recurrence to find the truncation that would suffice
        let mut required = n_max;
        let mut acc = kept;
        let mut pn = p;
        while 1.0 - acc >= TAIL_LIMIT && required < 10_000 {
            required += 1;
            acc += pn;
            pn *= nsq / (required as f64 + 1.0);
        }
        return Err(Error::TruncationTooSmall { n_max, required, tail });
    }
    let phase = if alpha.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        alpha / alpha.norm()
    };
    let mut v = CVec::zeros(f);
    let mut ph = C64::new(1.0, 0.0);
    for n in 0..f {
        v[n] = ph * weights[n].sqrt();
        ph *= phase;
    }
    let norm = v.norm();
    Ok(v / C64::new(norm, 0.0))
}

/// Expectation value `Tr[O rho]`.
///
/// When `O` is Hermitian the imaginary part must come out below 1e-8; this is
/// asserted because a violation means `rho` is broken, not the observable.
pub fn expectation(o: &CMat, rho: &CMat) -> Result<C64> {
    if o.nrows() != rho.nrows() || o.ncols() != rho.ncols() || o.nrows() != o.ncols() {
        return Err(Error::DimensionMismatch {
            expected: o.nrows(),
            got: rho.nrows(),
        });
    }
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..o.nrows() {
        for j in 0..o.ncols() {
            tr += o[(i, j)] * rho[(j, i)];
        }
    }
    if is_hermitian(o, 1e-12) {
        assert!(
            tr.im.abs() < 1e-8,
            "Tr[O rho] has imaginary part {:.3e} for Hermitian O",
            tr.im
        );
    }
    Ok(tr)
}

/// Expectation value `<psi|O|psi>` for a pure state.
pub fn expectation_state(o: &CMat, psi: &CVec) -> Result<C64> {
    if o.ncols() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: o.ncols(),
            got: psi.len(),
        });
    }
    Ok((psi.adjoint() * o * psi)[(0, 0)])
}

/// Reduced cavity density matrix: trace out the 3 molecular levels.
pub fn partial_trace_molecule(rho: &CMat) -> Result<CMat> {
    let d = rho.nrows();
    if d != rho.ncols() || d % MOL_LEVELS != 0 {
        return Err(Error::NotProductSpace { dim: d });
    }
    let f = d / MOL_LEVELS;
    let mut out = CMat::zeros(f, f);
    for m in 0..MOL_LEVELS {
        for n in 0..f {
            for np in 0..f {
                out[(n, np)] += rho[(m * f + n, m * f + np)];
            }
        }
    }
    Ok(out)
}

/// Embed a 3x3 molecular operator on the product space (identity on cavity).
pub fn embed_molecule(op: &CMat, n_max: usize) -> CMat {
    debug_assert_eq!(op.nrows(), MOL_LEVELS);
    kron(op, &identity(n_max + 1))
}

/// Embed a cavity operator on the product space (identity on the molecule).
pub fn embed_cavity(op: &CMat) -> CMat {
    kron(&identity(MOL_LEVELS), op)
}

/// Molecular transition operator |i><j| (zero-based levels), 3x3.
pub fn mol_transition(i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(MOL_LEVELS, MOL_LEVELS);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(m: &CMat) -> f64 {
    let eig = m.clone().symmetric_eigenvalues();
    eig.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Validate a density matrix: Hermitian within 1e-9, unit trace within 1e-9,
/// eigenvalues above -1e-7.
pub fn check_density_matrix(rho: &CMat) -> Result<()> {
    if !is_hermitian(rho, 1e-9) {
        return Err(Error::InvalidState("not Hermitian within 1e-9".into()));
    }
    let tr: C64 = rho.diagonal().iter().sum();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "trace {} not 1 within 1e-9",
            tr
        )));
    }
    let min_eig = min_eigenvalue_hermitian(rho);
    if min_eig < -1e-7 {
        return Err(Error::InvalidState(format!(
            "min eigenvalue {min_eig:.3e} below -1e-7"
        )));
    }
    Ok(())
}

/// Outer product |v><v| as a density matrix.
pub fn outer(v: &CVec) -> CMat {
    let d = v.len();
    CMat::from_fn(d, d, |i, j| v[i] * v[j].conj())
}

/// Sparse coordinate form of an operator; the hot path for time-dependent
/// Hamiltonians, which have O(N) nonzeros here.
#[derive(Debug, Clone)]
pub struct CooMat {
    pub dim: usize,
    pub entries: Vec<(u32, u32, C64)>,
}

impl CooMat {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn push(&mut self, row: usize, col: usize, val: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row as u32, col as u32, val));
    }

    /// Push `val * |row><col|` together with its Hermitian conjugate.
    pub fn push_hc(&mut self, row: usize, col: usize, val: C64) {
        self.push(row, col, val);
        self.push(col, row, val.conj());
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r as usize, c as usize)] += v;
        }
        m
    }

    /// `out += scale * (A v)`.
    pub fn apply_scaled(&self, v: &CVec, scale: C64, out: &mut CVec) {
        let vs = v.as_slice();
        let os = out.as_mut_slice();
        for &(r, c, h) in &self.entries {
            os[r as usize] += scale * h * vs[c as usize];
        }
    }
}
