//! Reduced-order models by rational interpolation of computed moments.
//!
//! A model of order `r` with real parameters `[q^ -p^]` matches the moments
//! `M_0..M_k` at `sigma` iff `[q^ -p^] X_{1:2r+1} = X_{2r+2}` where `X`
//! stacks `gamma_r^(j)(sigma)` over `sum_m C(j,m) M_m gamma_r^(j-m)(sigma)`
//! column by column. Non-real points contribute their real and imaginary
//! parts as separate columns, which also matches the conjugate point.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::informativity::{is_real, MomentEntry, MomentSet};
use crate::numlin::{self, CMatrix, CVector, RankReport, Tolerances};
use crate::polynomial::{binomial, gamma_deriv, poly_deriv_eval, SystemParams};

/// Below this ratio of extreme Sylvester singular values the numerator and
/// denominator are reported as sharing a root.
const COMMON_FACTOR_RATIO: f64 = 1e-8;

/// `[Gamma^r(sigma); Gamma^r_M(sigma)]` for one point.
#[derive(Clone, Debug)]
pub struct GammaBlock {
    pub sigma: Complex64,
    pub k: usize,
    /// `(r+1) x (k+1)`, column `j` is `gamma_r^(j)(sigma)`.
    pub top: CMatrix,
    /// `(r+1) x (k+1)`, column `j` is `sum_m C(j,m) M_m gamma_r^(j-m)(sigma)`.
    pub bottom: CMatrix,
}

pub fn gamma_block(r: usize, entry: &MomentEntry) -> Result<GammaBlock> {
    if entry.moments.is_empty() {
        return Err(Error::input(format!("no moments given at {}", entry.sigma)));
    }
    let k = entry.moments.len() - 1;
    let sigma = entry.sigma;
    let derivs: Vec<CVector> = (0..=k).map(|j| gamma_deriv(r, j, sigma)).collect();
    let mut top = CMatrix::zeros(r + 1, k + 1);
    let mut bottom = CMatrix::zeros(r + 1, k + 1);
    for j in 0..=k {
        top.set_column(j, &derivs[j]);
        let mut col = CVector::zeros(r + 1);
        for m in 0..=j {
            col += &derivs[j - m] * (entry.moments[m] * binomial(j, m));
        }
        bottom.set_column(j, &col);
    }
    Ok(GammaBlock {
        sigma,
        k,
        top,
        bottom,
    })
}

/// The real interpolation system of order `r`: `(2r+2) x c`, all entries
/// real (stored with zero imaginary part).
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub r: usize,
    pub stacked: CMatrix,
}

impl ConstraintSystem {
    /// Rows `1..=2r+1`, multiplied by `[q^ -p^]`.
    pub fn a(&self) -> CMatrix {
        self.stacked.rows(0, 2 * self.r + 1).into_owned()
    }

    /// Row `2r+2` as a column vector.
    pub fn b(&self) -> CVector {
        self.stacked.row(2 * self.r + 1).transpose()
    }

    /// `Gamma_1`: the `gamma_r` rows only.
    pub fn gamma_rows(&self) -> CMatrix {
        self.stacked.rows(0, self.r + 1).into_owned()
    }

    /// `Gamma_2`: the moment-weighted rows.
    pub fn moment_rows(&self) -> CMatrix {
        self.stacked.rows(self.r + 1, self.r + 1).into_owned()
    }

    /// Absolute and relative residual of `[q -p] A - b` for a candidate model.
    /// Relative means `||res|| / (||[q -p]|| ||A||_F + ||b||)`.
    pub fn residual(&self, params: &SystemParams) -> Result<(f64, f64)> {
        if params.order() != self.r {
            return Err(Error::input(format!(
                "model has order {}, constraints are for order {}",
                params.order(),
                self.r
            )));
        }
        let mut v = CVector::zeros(2 * self.r + 1);
        for (i, &q) in params.q().iter().enumerate() {
            v[i] = Complex64::new(q, 0.0);
        }
        for (i, &p) in params.p().iter().enumerate() {
            v[self.r + 1 + i] = Complex64::new(-p, 0.0);
        }
        let a = self.a();
        let b = self.b();
        let res = (a.transpose() * &v - &b).norm();
        let denom = v.norm() * a.norm() + b.norm();
        Ok((res, if denom > 0.0 { res / denom } else { 0.0 }))
    }
}

/// Builds the real interpolation system for order `r` from the moment set.
pub fn assemble_constraints(r: usize, moments: &MomentSet) -> Result<ConstraintSystem> {
    if r == 0 {
        return Err(Error::input("reduced order must be at least 1"));
    }
    if moments.is_empty() {
        return Err(Error::input("moment set is empty"));
    }
    let mut cols: Vec<CVector> = Vec::new();
    for entry in &moments.entries {
        let blk = gamma_block(r, entry)?;
        let full = numlin::vstack(&[&blk.top, &blk.bottom])?;
        for j in 0..full.ncols() {
            let c = full.column(j);
            cols.push(c.map(|z| Complex64::new(z.re, 0.0)));
            if !is_real(entry.sigma) {
                cols.push(c.map(|z| Complex64::new(z.im, 0.0)));
            }
        }
    }
    let stacked = CMatrix::from_columns(&cols);
    Ok(ConstraintSystem { r, stacked })
}

#[derive(Clone, Debug)]
pub struct Feasibility {
    pub r: usize,
    pub rank_a: RankReport,
    pub rank_full: RankReport,
    pub feasible: bool,
}

/// A model of order `r` exists iff `rank A = rank [A; b]`.
pub fn feasible(r: usize, moments: &MomentSet, tols: &Tolerances) -> Result<Feasibility> {
    let sys = assemble_constraints(r, moments)?;
    feasibility_of(&sys, tols)
}

fn feasibility_of(sys: &ConstraintSystem, tols: &Tolerances) -> Result<Feasibility> {
    let a = sys.a();
    let tol = tols.rank_threshold(&[&a, &sys.stacked])?;
    let rank_a = numlin::numerical_rank(&a, Some(tol))?;
    let rank_full = numlin::numerical_rank(&sys.stacked, Some(tol))?;
    Ok(Feasibility {
        r: sys.r,
        feasible: rank_a.rank == rank_full.rank,
        rank_a,
        rank_full,
    })
}

/// Sylvester-matrix conditioning of `(P^, Q^)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coprimeness {
    /// `sigma_min / sigma_max` of the Sylvester matrix.
    pub sylvester_ratio: f64,
    pub near_common_factor: bool,
}

#[derive(Clone, Debug)]
pub struct ReducedModel {
    pub params: SystemParams,
    pub matched: MomentSet,
    /// Relative residual of the interpolation system.
    pub residual: f64,
    /// Worst relative mismatch of the moment conditions, evaluated directly
    /// on the model polynomials.
    pub moment_residual: f64,
    pub prescribed_poles: bool,
    pub coprimeness: Coprimeness,
}

impl ReducedModel {
    pub fn order(&self) -> usize {
        self.params.order()
    }
}

/// Worst relative violation of
/// `Q^(j)(sigma) = sum_m C(j,m) M_m P^(j-m)(sigma)` over all matched
/// `(sigma, j)`.
pub fn moment_matching_residual(params: &SystemParams, moments: &MomentSet) -> f64 {
    let p = params.denominator();
    let q = params.numerator();
    let mut worst = 0.0_f64;
    for e in &moments.entries {
        for j in 0..e.moments.len() {
            let lhs = poly_deriv_eval(&q, j, e.sigma);
            let mut rhs = Complex64::new(0.0, 0.0);
            let mut scale = lhs.norm();
            for (m, &mm) in e.moments.iter().take(j + 1).enumerate() {
                let term = mm * poly_deriv_eval(&p, j - m, e.sigma) * binomial(j, m);
                scale += term.norm();
                rhs += term;
            }
            if scale > 0.0 {
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
    }
    worst
}

fn coprimeness(params: &SystemParams) -> Result<Coprimeness> {
    let r = params.order();
    // P^ monic of degree r, Q^ of formal degree r; Sylvester matrix is 2r x 2r.
    let mut pd: Vec<f64> = params.p().to_vec();
    pd.push(1.0);
    let qd = params.q();
    let size = 2 * r;
    let mut s = DMatrix::<f64>::zeros(size, size);
    for i in 0..r {
        for (d, &c) in pd.iter().enumerate() {
            s[(i, i + r - d)] = c;
        }
        for (d, &c) in qd.iter().enumerate() {
            s[(r + i, i + r - d)] = c;
        }
    }
    let sv = numlin::singular_values(&numlin::from_real(&s))?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    Ok(Coprimeness {
        sylvester_ratio: ratio,
        near_common_factor: ratio < COMMON_FACTOR_RATIO,
    })
}

fn finish(
    params: SystemParams,
    matched: &MomentSet,
    residual: f64,
    prescribed_poles: bool,
    tols: &Tolerances,
) -> Result<ReducedModel> {
    let moment_residual = moment_matching_residual(&params, matched);
    if moment_residual > tols.residual {
        return Err(Error::Numerical(format!(
            "order-{} model misses its moments by {:.3e} (relative), above {:.1e}",
            params.order(),
            moment_residual,
            tols.residual
        )));
    }
    let coprimeness = coprimeness(&params)?;
    Ok(ReducedModel {
        params,
        matched: matched.clone(),
        residual,
        moment_residual,
        prescribed_poles,
        coprimeness,
    })
}

/// Minimum-norm `[q^ -p^]` of order `r` matching every moment in the set.
pub fn solve_rom(r: usize, moments: &MomentSet, tols: &Tolerances) -> Result<ReducedModel> {
    let sys = assemble_constraints(r, moments)?;
    let feas = feasibility_of(&sys, tols)?;
    if !feas.feasible {
        return Err(Error::Infeasible {
            r,
            rank_a: feas.rank_a.rank,
            rank_full: feas.rank_full.rank,
        });
    }
    let at = sys.a().transpose();
    let sol = numlin::lstsq_min_norm(&at, &sys.b(), Some(feas.rank_full.tolerance_used))?;
    if sol.relative_residual > tols.residual {
        return Err(Error::Numerical(format!(
            "interpolation system for order {r} left relative residual {:.3e}",
            sol.relative_residual
        )));
    }
    let q: Vec<f64> = (0..=r).map(|i| sol.x[i].re).collect();
    let p: Vec<f64> = (0..r).map(|i| -sol.x[r + 1 + i].re).collect();
    let params = SystemParams::new(q, p)?;
    finish(params, moments, sol.relative_residual, false, tols)
}

/// Fixes the denominator to `z^r + p_hat[r-1] z^(r-1) + ... + p_hat[0]` and
/// solves for the numerator. Requires `r + 1` at least the number of real
/// constraints, which makes the system solvable for every `p_hat`.
pub fn solve_rom_prescribed(
    p_hat: &[f64],
    moments: &MomentSet,
    tols: &Tolerances,
) -> Result<ReducedModel> {
    let r = p_hat.len();
    if p_hat.iter().any(|v| !v.is_finite()) {
        return Err(Error::input(
            "prescribed denominator has non-finite coefficients",
        ));
    }
    let needed = moments.real_constraint_count();
    if r == 0 || r + 1 < needed {
        return Err(Error::Precondition(format!(
            "prescribed poles need order r >= {} for {needed} real moment constraints, got r = {r}",
            needed.saturating_sub(1).max(1)
        )));
    }
    let sys = assemble_constraints(r, moments)?;
    let g1 = sys.gamma_rows();
    let g2 = sys.moment_rows();
    let ph = CVector::from_iterator(r, p_hat.iter().map(|&v| Complex64::new(v, 0.0)));
    // q^ G1 = G2[r] + p^ G2[0..r]
    let rhs: CVector = g2.row(r).transpose() + g2.rows(0, r).transpose() * ph;
    let sol = numlin::lstsq_min_norm(&g1.transpose(), &rhs, None)?;
    if sol.relative_residual > tols.residual {
        return Err(Error::Numerical(format!(
            "numerator solve for prescribed poles left relative residual {:.3e}",
            sol.relative_residual
        )));
    }
    let q: Vec<f64> = sol.x.iter().map(|z| z.re).collect();
    let params = SystemParams::new(q, p_hat.to_vec())?;
    let (_, rel) = sys.residual(&params)?;
    finish(params, moments, rel, true, tols)
}

/// Smallest `r` in `1..=r_max` for which a matching model exists.
pub fn minimal_order(
    moments: &MomentSet,
    r_max: usize,
    tols: &Tolerances,
) -> Result<Option<usize>> {
    if r_max == 0 {
        return Err(Error::input("r_max must be at least 1"));
    }
    for r in 1..=r_max {
        if feasible(r, moments, tols)?.feasible {
            return Ok(Some(r));
        }
    }
    Ok(None)
}
