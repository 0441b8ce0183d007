//! Dense complex linear algebra: numerical rank, kernels and minimum-norm
//! least squares.
//!
//! Every rank test and every moment solve goes through this module, so the
//! tolerance policy lives here as well. Real data are embedded with a zero
//! imaginary part.
//!
//! Decompositions run on the real form `[[Re M, -Im M], [Im M, Re M]]`,
//! which carries every singular value of `M` twice and turns complex least
//! squares into real least squares of the same norm. The SVD is one-sided
//! Jacobi: nalgebra's bidiagonal SVD stops early on some well-conditioned
//! inputs (reconstruction errors of order 1e-4), which rank decisions here
//! cannot absorb.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative scale of the default rank threshold, `2^-40`.
pub const DEFAULT_RANK_SCALE: f64 = 9.094_947_017_729_282e-13;

/// Default bound on the relative residual of a solve that is expected to be
/// consistent.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

/// How singular values are compared against the rank threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RankTolerance {
    /// `max(rows, cols) * sigma_max * scale`, evaluated on the largest matrix
    /// of a comparison.
    Relative(f64),
    /// Fixed threshold.
    Absolute(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rank: RankTolerance,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: RankTolerance::Relative(DEFAULT_RANK_SCALE),
            residual: DEFAULT_RESIDUAL_TOL,
        }
    }
}

impl Tolerances {
    /// Tolerances driven by a single user value. The value becomes the
    /// absolute rank threshold and, if looser than the default, the residual
    /// bound too.
    pub fn from_user(tol: Option<f64>) -> Result<Self> {
        match tol {
            None => Ok(Self::default()),
            Some(t) if t.is_finite() && t >= 0.0 => Ok(Tolerances {
                rank: RankTolerance::Absolute(t),
                residual: DEFAULT_RESIDUAL_TOL.max(t),
            }),
            Some(t) => Err(Error::input(format!(
                "tolerance must be finite and >= 0, got {t}"
            ))),
        }
    }

    /// One rank threshold shared by all matrices of a comparison.
    pub fn rank_threshold(&self, mats: &[&CMatrix]) -> Result<f64> {
        match self.rank {
            RankTolerance::Absolute(t) => {
                for m in mats {
                    ensure_finite(m)?;
                }
                Ok(t)
            }
            RankTolerance::Relative(scale) => {
                let mut tol = 0.0_f64;
                for m in mats {
                    tol = tol.max(scaled_tolerance(m, scale)?);
                }
                Ok(tol)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub tolerance_used: f64,
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: CVector,
    /// `||A x - b||_2`
    pub residual_norm: f64,
    /// `||A x - b|| / (||A||_F ||x|| + ||b||)`, zero when the denominator is.
    pub relative_residual: f64,
    /// Rank of `A` at the truncation threshold used for the solve.
    pub rank: usize,
}

pub fn from_real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    match m
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        None => Ok(()),
        Some(idx) => {
            // nalgebra stores column-major
            let (r, c) = (idx % m.nrows().max(1), idx / m.nrows().max(1));
            Err(Error::input(format!(
                "non-finite matrix entry at ({r}, {c})"
            )))
        }
    }
}

/// `[[Re M, -Im M], [Im M, Re M]]`
fn real_form(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut e = DMatrix::<f64>::zeros(2 * r, 2 * c);
    for j in 0..c {
        for i in 0..r {
            let z = m[(i, j)];
            e[(i, j)] = z.re;
            e[(i, c + j)] = -z.im;
            e[(r + i, j)] = z.im;
            e[(r + i, c + j)] = z.re;
        }
    }
    e
}

/// Thin SVD `A = U diag(s) V^T` of a real matrix, `s` descending.
struct RealSvd {
    u: DMatrix<f64>,
    s: Vec<f64>,
    v: DMatrix<f64>,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// One-sided Jacobi on the columns of `a` (`rows >= cols`).
fn jacobi_tall(a: &DMatrix<f64>) -> Result<RealSvd> {
    let (m, n) = a.shape();
    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let thresh = (m as f64).sqrt() * f64::EPSILON;
    // columns at rounding level of the whole matrix count as zero
    let floor = (f64::EPSILON * a.norm()).powi(2);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = u.column(i).norm_squared();
                let beta = u.column(j).norm_squared();
                let gamma = u.column(i).dot(&u.column(j));
                if alpha <= floor || beta <= floor || gamma.abs() <= thresh * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut u, &mut v] {
                    for k in 0..mat.nrows() {
                        let (x, y) = (mat[(k, i)], mat[(k, j)]);
                        mat[(k, i)] = c * x - s * y;
                        mat[(k, j)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical("Jacobi SVD did not converge".into()));
    }
    let mut order: Vec<(f64, usize)> = (0..n).map(|j| (u.column(j).norm(), j)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut us = DMatrix::<f64>::zeros(m, n);
    let mut vs = DMatrix::<f64>::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(sv, j)) in order.iter().enumerate() {
        if sv > 0.0 {
            us.set_column(k, &(u.column(j) / sv));
        }
        vs.set_column(k, &v.column(j));
        s.push(sv);
    }
    Ok(RealSvd { u: us, s, v: vs })
}

fn real_svd(a: &DMatrix<f64>) -> Result<RealSvd> {
    if a.nrows() >= a.ncols() {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.transpose())?;
        Ok(RealSvd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

/// Descending singular values of `m`, `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    Ok(pairs(&real_svd(&real_form(m))?.s))
}

/// One of each pair of the real form's sorted singular values.
fn pairs(doubled: &[f64]) -> Vec<f64> {
    let mut sv = doubled.to_vec();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.into_iter().step_by(2).collect()
}

fn scaled_tolerance(m: &CMatrix, scale: f64) -> Result<f64> {
    let sv = singular_values(m)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    Ok(m.nrows().max(m.ncols()) as f64 * smax * scale)
}

/// Default threshold for `m` alone: `max(rows, cols) * sigma_max * 2^-40`.
pub fn default_tolerance(m: &CMatrix) -> Result<f64> {
    scaled_tolerance(m, DEFAULT_RANK_SCALE)
}

/// Counts singular values strictly above `tol` (or the default threshold).
pub fn numerical_rank(m: &CMatrix, tol: Option<f64>) -> Result<RankReport> {
    let singular_values = singular_values(m)?;
    let tolerance_used = match tol {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => {
            return Err(Error::input(format!(
                "rank tolerance must be >= 0, got {t}"
            )))
        }
        None => {
            let smax = singular_values.first().copied().unwrap_or(0.0);
            m.nrows().max(m.ncols()) as f64 * smax * DEFAULT_RANK_SCALE
        }
    };
    let rank = singular_values
        .iter()
        .filter(|&&s| s > tolerance_used)
        .count();
    Ok(RankReport {
        rank,
        singular_values,
        tolerance_used,
    })
}

/// Rank equality under one threshold. Without `tol`, the threshold is the
/// default of whichever matrix has the larger one.
pub fn rank_equal(a: &CMatrix, b: &CMatrix, tol: Option<f64>) -> Result<bool> {
    let t = match tol {
        Some(t) => t,
        None => Tolerances::default().rank_threshold(&[a, b])?,
    };
    Ok(numerical_rank(a, Some(t))?.rank == numerical_rank(b, Some(t))?.rank)
}

/// Minimum-norm least-squares solution of `A x = b`. Singular values at or
/// below the truncation threshold are discarded.
pub fn lstsq_min_norm(a: &CMatrix, b: &CVector, tol: Option<f64>) -> Result<LeastSquares> {
    if a.nrows() != b.len() {
        return Err(Error::input(format!(
            "dimension mismatch: A has {} rows, b has {}",
            a.nrows(),
            b.len()
        )));
    }
    ensure_finite(a)?;
    if b.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::input("non-finite right-hand side"));
    }
    let b_norm = b.norm();
    if a.is_empty() {
        return Ok(LeastSquares {
            x: CVector::zeros(a.ncols()),
            residual_norm: b_norm,
            relative_residual: if b_norm > 0.0 { 1.0 } else { 0.0 },
            rank: 0,
        });
    }
    let svd = real_svd(&real_form(a))?;
    let sv = pairs(&svd.s);
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = match tol {
        Some(t) => t,
        None => a.nrows().max(a.ncols()) as f64 * smax * DEFAULT_RANK_SCALE,
    };
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let m = b.len();
    let rhs = DVector::<f64>::from_fn(2 * m, |i, _| if i < m { b[i].re } else { b[i - m].im });
    let mut coef = svd.u.transpose() * rhs;
    for (k, c) in coef.iter_mut().enumerate() {
        *c = if svd.s[k] > cut { *c / svd.s[k] } else { 0.0 };
    }
    let xr = &svd.v * coef;
    let n = a.ncols();
    let x = CVector::from_fn(n, |i, _| Complex64::new(xr[i], xr[n + i]));
    let residual_norm = (a * &x - b).norm();
    let denom = a.norm() * x.norm() + b_norm;
    Ok(LeastSquares {
        relative_residual: if denom > 0.0 {
            residual_norm / denom
        } else {
            0.0
        },
        residual_norm,
        x,
        rank,
    })
}

/// Orthonormal basis of `{x : M x = 0}` as the columns of the result.
pub fn right_kernel(m: &CMatrix, tol: Option<f64>) -> Result<CMatrix> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let t = match tol {
        Some(t) => t,
        None => default_tolerance(m)?,
    };
    // Pad to at least square so the thin SVD carries a full set of right
    // singular vectors.
    let mut padded = CMatrix::zeros(rows.max(cols), cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = real_svd(&real_form(&padded))?;
    let rank = pairs(&svd.s).iter().filter(|&&s| s > t).count();
    let dim = cols - rank.min(cols);
    // The real null space is closed under multiplication by i; read its
    // vectors as complex and extract an orthonormal basis with pivoted
    // Gram-Schmidt.
    let mut cands: Vec<CVector> = (0..2 * cols)
        .filter(|&i| svd.s[i] <= t)
        .map(|i| {
            let w = svd.v.column(i);
            CVector::from_fn(cols, |k, _| Complex64::new(w[k], w[cols + k]))
        })
        .collect();
    let mut basis = CMatrix::zeros(cols, dim);
    for j in 0..dim {
        let best = (0..cands.len())
            .max_by(|&a, &b| cands[a].norm().total_cmp(&cands[b].norm()))
            .ok_or_else(|| Error::Numerical("kernel basis ran out of candidates".into()))?;
        let v = cands.swap_remove(best);
        let v = &v / Complex64::new(v.norm(), 0.0);
        for c in cands.iter_mut() {
            let proj = v.dotc(c);
            *c -= &v * proj;
        }
        basis.set_column(j, &v);
    }
    Ok(basis)
}

/// Basis of `{xi : xi M = 0}` as the rows of the result.
pub fn left_kernel(m: &CMatrix, tol: Option<f64>) -> Result<CMatrix> {
    let k = right_kernel(&m.transpose(), tol)?;
    Ok(k.transpose())
}

pub fn hstack(blocks: &[&CMatrix]) -> Result<CMatrix> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    if blocks.iter().any(|b| b.nrows() != rows) {
        return Err(Error::input("hstack: row counts differ"));
    }
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        out.view_mut((0, c0), b.shape()).copy_from(*b);
        c0 += b.ncols();
    }
    Ok(out)
}

pub fn vstack(blocks: &[&CMatrix]) -> Result<CMatrix> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    if blocks.iter().any(|b| b.ncols() != cols) {
        return Err(Error::input("vstack: column counts differ"));
    }
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        out.view_mut((r0, 0), b.shape()).copy_from(*b);
        r0 += b.nrows();
    }
    Ok(out)
}

pub fn column(v: &CVector) -> CMatrix {
    CMatrix::from_column_slice(v.len(), 1, v.as_slice())
}
