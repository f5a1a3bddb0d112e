//! Dense numerical linear algebra with an explicit tolerance policy:
//! SVD ranks, eigenvalues, PBH/Kalman controllability tests, invariant
//! zeros, and a seeded random source.
//!
//! Everything here is deterministic given its inputs; randomness only
//! enters through an explicitly passed [`RandomSource`].

use nalgebra::{ComplexField, DMatrix, DVector, RowDVector};
use num_complex::Complex;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Thresholds governing every numerical decision in the crate.
///
/// Rank decisions are relative to the largest singular value, eigenvalue
/// matching is absolute, and PBH margins are normalized by the data scale
/// before being compared against `margin_floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_rel_tol: f64,
    /// Absolute radius for matching/deduplicating eigenvalues.
    pub eig_match_tol: f64,
    /// Minimum acceptable normalized PBH margin.
    pub margin_floor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-9,
            eig_match_tol: 1e-7,
            margin_floor: 1e-8,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let all_pos =
            self.rank_rel_tol > 0.0 && self.eig_match_tol > 0.0 && self.margin_floor > 0.0;
        if !all_pos {
            return Err(Error::InvalidInput(
                "tolerance policy entries must be strictly positive".into(),
            ));
        }
        if self.rank_rel_tol >= 1.0 {
            return Err(Error::InvalidInput("rank_rel_tol must be < 1".into()));
        }
        Ok(())
    }
}

/// Deterministic random stream backed by ChaCha8.
///
/// A single source is single-consumer; concurrent work derives
/// independent child sources via [`RandomSource::fork`].
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform real on [-1, 1].
    pub fn uniform(&mut self) -> f64 {
        self.rng.random_range(-1.0..=1.0)
    }

    /// Signed draw bounded away from zero: |v| uniform on [0.1, 2].
    pub fn nonzero(&mut self) -> f64 {
        let mag = self.rng.random_range(0.1..=2.0);
        if self.rng.random_range(0..2u8) == 0 {
            mag
        } else {
            -mag
        }
    }

    /// Fresh seed for a derived, independent source.
    pub fn next_seed(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Independent child source; the parent advances by one seed draw.
    pub fn fork(&mut self) -> RandomSource {
        RandomSource::from_seed(self.next_seed())
    }
}

fn ensure_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

fn singular_values_generic<T>(m: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .expect("svd iteration cannot be exhausted with an unbounded budget");
    svd.singular_values.iter().copied().collect()
}

fn rank_from_singular_values(
    svals: &[f64],
    rows: usize,
    cols: usize,
    tol: &TolerancePolicy,
) -> usize {
    let sigma_max = svals.iter().copied().fold(0.0f64, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let cutoff = tol.rank_rel_tol * rows.max(cols) as f64 * sigma_max;
    svals.iter().filter(|&&s| s > cutoff).count()
}

/// Numerical rank via singular values with a relative threshold.
pub fn numerical_rank(m: &DMatrix<f64>, tol: &TolerancePolicy) -> Result<usize> {
    ensure_finite(m)?;
    let svals = singular_values_generic(m);
    Ok(rank_from_singular_values(&svals, m.nrows(), m.ncols(), tol))
}

/// Numerical rank of a complex matrix with the same threshold rule.
pub fn numerical_rank_complex(m: &DMatrix<Complex<f64>>, tol: &TolerancePolicy) -> usize {
    let svals = singular_values_generic(m);
    rank_from_singular_values(&svals, m.nrows(), m.ncols(), tol)
}

/// Smallest singular value of a complex matrix (0 for empty matrices).
pub fn min_singular_value(m: &DMatrix<Complex<f64>>) -> f64 {
    singular_values_generic(m)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        .min(f64::MAX)
}

/// Complex eigenvalues with multiplicity, sorted lexicographically by
/// (real, imaginary) part.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "eigenvalues require a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite(m)?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut eigs: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    sort_spectrum(&mut eigs);
    Ok(eigs)
}

/// Lexicographic (re, im) total order used for all reported spectra.
pub fn sort_spectrum(eigs: &mut [Complex<f64>]) {
    eigs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Collapse a spectrum to representatives, merging values closer than `tol`.
pub fn dedupe_modes(eigs: &[Complex<f64>], tol: f64) -> Vec<Complex<f64>> {
    let mut out: Vec<Complex<f64>> = Vec::new();
    for &e in eigs {
        if !out.iter().any(|&seen| (e - seen).norm() <= tol) {
            out.push(e);
        }
    }
    sort_spectrum(&mut out);
    out
}

/// Minimum distance from `x` to a finite set (infinite for an empty set).
pub fn distance_to_set(x: Complex<f64>, set: &[Complex<f64>]) -> f64 {
    set.iter()
        .map(|&s| (x - s).norm())
        .fold(f64::INFINITY, f64::min)
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    m.map(|v| Complex::new(v, 0.0))
}

/// `[λI - A, B]` as a complex matrix.
pub fn pbh_pencil(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    lambda: Complex<f64>,
) -> DMatrix<Complex<f64>> {
    let n = a.nrows();
    let mut pencil = DMatrix::<Complex<f64>>::zeros(n, n + b.ncols());
    for i in 0..n {
        for j in 0..n {
            pencil[(i, j)] = Complex::new(-a[(i, j)], 0.0);
        }
        pencil[(i, i)] += lambda;
        for j in 0..b.ncols() {
            pencil[(i, n + j)] = Complex::new(b[(i, j)], 0.0);
        }
    }
    pencil
}

/// Raw PBH margin: min over λ ∈ σ(A) of the smallest singular value of
/// `[λI − A, B]`. The pair is declared controllable when the margin
/// clears `margin_floor · (1 + ‖A‖ + ‖B‖)`; use [`pbh_controllable`]
/// for the verdict.
pub fn pbh_margin(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: &TolerancePolicy) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidInput(
            "PBH state matrix must be square".into(),
        ));
    }
    if b.nrows() != a.nrows() {
        return Err(Error::InvalidInput(format!(
            "PBH input matrix has {} rows, expected {}",
            b.nrows(),
            a.nrows()
        )));
    }
    ensure_finite(a)?;
    ensure_finite(b)?;
    if a.nrows() == 0 {
        return Ok(f64::INFINITY);
    }
    // [λI−A, B] is trivially full rank away from σ(A), so only the
    // eigenvalues need checking; multiplicities do not change the margin.
    let modes = dedupe_modes(&eigenvalues(a)?, tol.eig_match_tol);
    let mut margin = f64::INFINITY;
    for lambda in modes {
        margin = margin.min(min_singular_value(&pbh_pencil(a, b, lambda)));
    }
    Ok(margin)
}

/// Scale factor making PBH verdicts robust to uniform rescaling.
pub fn pbh_scale(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    1.0 + a.norm() + b.norm()
}

/// PBH verdict plus the raw margin it was derived from.
pub fn pbh_controllable(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &TolerancePolicy,
) -> Result<(bool, f64)> {
    let margin = pbh_margin(a, b, tol)?;
    Ok((margin > tol.margin_floor * pbh_scale(a, b), margin))
}

/// Observability margin by duality: PBH on `(Aᵀ, Cᵀ)`.
pub fn observability_margin(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    tol: &TolerancePolicy,
) -> Result<f64> {
    if c.ncols() != a.nrows() {
        return Err(Error::InvalidInput(format!(
            "output matrix has {} columns, expected {}",
            c.ncols(),
            a.nrows()
        )));
    }
    pbh_margin(&a.transpose(), &c.transpose(), tol)
}

/// Observability verdict plus margin, by duality.
pub fn observable(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    tol: &TolerancePolicy,
) -> Result<(bool, f64)> {
    let margin = observability_margin(a, c, tol)?;
    Ok((margin > tol.margin_floor * pbh_scale(a, c), margin))
}

/// Kalman controllability-matrix rank: rank `[B, AB, …, A^{n−1}B]`.
///
/// Kept as an independent route next to the PBH test; the two must agree
/// and the test suite enforces it.
pub fn kalman_rank(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: &TolerancePolicy) -> Result<usize> {
    if a.nrows() != a.ncols() || b.nrows() != a.nrows() {
        return Err(Error::InvalidInput("Kalman test dimension mismatch".into()));
    }
    ensure_finite(a)?;
    ensure_finite(b)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(0);
    }
    let m = b.ncols();
    let mut ctrb = DMatrix::<f64>::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        ctrb.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = a * block;
    }
    numerical_rank(&ctrb, tol)
}

/// Finite invariant zeros of the SISO triple `(A, b, c)`: the finite λ
/// where the bordered pencil `[[A−λI, b], [c, 0]]` loses rank.
///
/// The pencil is reduced by repeated deflation. Writing the state in an
/// orthonormal basis `[w | V]` with `w ∝ cᵀ` turns the bordered pencil
/// into one of size one less with feedthrough `wᵀb`; once the
/// feedthrough is nonzero the zeros are the eigenvalues of the Schur
/// complement `A − b d⁻¹ c`. Dimensions exhausting first means the
/// transfer has no finite zeros.
pub fn invariant_zeros(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &RowDVector<f64>,
    tol: &TolerancePolicy,
) -> Result<Vec<Complex<f64>>> {
    if a.nrows() != a.ncols() || b.len() != a.nrows() || c.len() != a.nrows() {
        return Err(Error::InvalidInput(
            "invariant zeros require square A with matching b, c".into(),
        ));
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut c = c.clone();
    let mut d = 0.0f64;
    loop {
        let q = a.nrows();
        let scale = 1.0 + a.norm() + b.norm() + c.norm() + d.abs();
        if d.abs() > tol.rank_rel_tol * scale {
            if q == 0 {
                return Ok(Vec::new());
            }
            let closed = &a - &b * &c / d;
            return eigenvalues(&closed);
        }
        if q == 0 || c.norm() <= tol.rank_rel_tol * scale {
            // Identically singular pencil: the transfer is zero.
            return Ok(Vec::new());
        }
        // Householder frame whose first column is ±c^T/‖c‖.
        let w = c.transpose() / c.norm();
        let alpha = if w[0] >= 0.0 { 1.0 } else { -1.0 };
        let mut v = w.clone();
        v[0] += alpha;
        let reflector =
            DMatrix::<f64>::identity(q, q) - 2.0 / v.norm_squared() * &v * v.transpose();
        let w_col = reflector.column(0).clone_owned();
        let basis = reflector.columns(1, q - 1).clone_owned();
        let next_a = basis.transpose() * &a * &basis;
        let next_b = basis.transpose() * &b;
        let next_c = (w_col.transpose() * &a * &basis).row(0).clone_owned();
        d = (w_col.transpose() * &b)[0];
        a = next_a;
        b = next_b;
        c = next_c;
    }
}

/// Complex determinant through LU.
pub fn determinant_complex(m: &DMatrix<Complex<f64>>) -> Complex<f64> {
    m.clone().lu().determinant()
}

/// Hadamard bound `∏ᵢ ‖rowᵢ‖₂`, the natural scale for deciding whether a
/// computed determinant is numerically zero.
pub fn hadamard_bound(m: &DMatrix<Complex<f64>>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).norm())
        .fold(1.0f64, |acc, r| acc * r)
}

/// Convert a real matrix into the complex carrier used by mode tests.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    to_complex(m)
}
