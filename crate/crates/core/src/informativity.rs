//! Informativity of input/output data for identification, interpolation and
//! moment matching, and extraction of the moments they determine.
//!
//! All systems `[q -p]` explaining the data satisfy
//! `[q -p] [H_n(U); H_n(Y)_bar] = [y_n .. y_T]`. The data are informative
//! for interpolation at `sigma` when every one of them has the same value
//! `M_0` with `P(sigma) M_0 = Q(sigma)`. This is decided by rank tests on
//! bordered Hankel matrices; `M_0` is then read off the solution of
//!
//! ```text
//! [ H_n(U)   0      ] [ xi  ]   [ gamma_n(sigma) ]
//! [ H_n(Y)  -gamma  ] [ M_0 ] = [       0        ]
//! ```
//!
//! Higher moments follow the same pattern with a right-hand side built from
//! the lower ones.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numlin::{self, CMatrix, CVector, RankReport, Tolerances};
use crate::polynomial::{binomial, gamma, gamma_deriv};
use crate::trajectory::HankelPair;

/// Points closer than this (relative) are treated as equal.
const POINT_EPS: f64 = 1e-12;

pub fn is_real(sigma: Complex64) -> bool {
    sigma.im.abs() <= POINT_EPS * sigma.re.abs().max(1.0)
}

fn same_point(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= POINT_EPS * a.norm().max(b.norm()).max(1.0)
}

/// Interpolation points with the highest moment order required at each.
#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationSpec {
    points: Vec<(Complex64, usize)>,
}

impl InterpolationSpec {
    /// Rejects repeated points and mutually conjugate pairs.
    pub fn new(points: Vec<(Complex64, usize)>) -> Result<Self> {
        for (i, &(si, _)) in points.iter().enumerate() {
            if !(si.re.is_finite() && si.im.is_finite()) {
                return Err(Error::input(format!(
                    "interpolation point {i} is not finite"
                )));
            }
            for &(sj, _) in &points[..i] {
                if same_point(si, sj) {
                    return Err(Error::input(format!(
                        "interpolation point {si} is repeated"
                    )));
                }
                if same_point(si, sj.conj()) {
                    return Err(Error::input(format!(
                        "interpolation points {sj} and {si} are conjugates; list only one of them"
                    )));
                }
            }
        }
        Ok(InterpolationSpec { points })
    }

    pub fn points(&self) -> &[(Complex64, usize)] {
        &self.points
    }

    /// `k* = sum (k_i + 1)`, each listed point counted once.
    pub fn moment_count(&self) -> usize {
        self.points.iter().map(|&(_, k)| k + 1).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentEntry {
    pub sigma: Complex64,
    /// `M_0..M_k`
    pub moments: Vec<Complex64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MomentSet {
    pub entries: Vec<MomentEntry>,
}

impl MomentSet {
    pub fn new(entries: Vec<MomentEntry>) -> Self {
        MomentSet { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|e| e.moments.is_empty())
    }

    /// Number of real scalar constraints the set imposes on a real model:
    /// `k + 1` per real point and `2 (k + 1)` per non-real point, whose
    /// conjugate is matched implicitly.
    pub fn real_constraint_count(&self) -> usize {
        self.entries
            .iter()
            .map(|e| {
                let per = e.moments.len();
                if is_real(e.sigma) {
                    per
                } else {
                    2 * per
                }
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    SystemIdentification,
    Interpolation,
    /// Moment matching of the given order (at least 1).
    MomentOrder(usize),
}

#[derive(Clone, Debug)]
pub struct InformativityVerdict {
    pub kind: VerdictKind,
    pub verdict: bool,
    pub ranks: Vec<(String, RankReport)>,
    pub moment: Option<Complex64>,
    /// Relative residual of the moment solve, when one was attempted.
    pub residual: Option<f64>,
    pub diagnostic: Option<String>,
}

fn zero_col(rows: usize) -> CMatrix {
    CMatrix::zeros(rows, 1)
}

/// Rank test for identifiability:
/// `rank [Hu; Hy_bar] = rank [Hu; Hy] = 2n + 1`.
pub fn check_sysid(pair: &HankelPair, tols: &Tolerances) -> Result<InformativityVerdict> {
    let n = pair.order();
    let bar = numlin::vstack(&[&pair.hu, &pair.hy_bar])?;
    let full = numlin::vstack(&[&pair.hu, &pair.hy])?;
    let tol = tols.rank_threshold(&[&bar, &full])?;
    let r_bar = numlin::numerical_rank(&bar, Some(tol))?;
    let r_full = numlin::numerical_rank(&full, Some(tol))?;
    let verdict = r_bar.rank == 2 * n + 1 && r_full.rank == 2 * n + 1;
    let diagnostic = (!verdict).then(|| {
        format!(
            "rank [Hu; Hy_bar] = {}, rank [Hu; Hy] = {}, identification needs both = {}",
            r_bar.rank,
            r_full.rank,
            2 * n + 1
        )
    });
    Ok(InformativityVerdict {
        kind: VerdictKind::SystemIdentification,
        verdict,
        ranks: vec![("[Hu; Hy_bar]".into(), r_bar), ("[Hu; Hy]".into(), r_full)],
        moment: None,
        residual: None,
        diagnostic,
    })
}

/// Outcome of the projection-based identifiability test.
#[derive(Clone, Debug)]
pub struct ProjectionCheck {
    /// `rank H_n(U) = n + 1`.
    pub input_full_rank: bool,
    pub input_rank: RankReport,
    /// Rank of `H_n(Y) Pi`, present when `H_n(U)` has full row rank.
    pub projected_rank: Option<RankReport>,
    pub holds: bool,
    pub diagnostic: Option<String>,
}

/// `rank H_n(U) = n + 1` and `rank (H_n(Y) Pi) = n` where `Pi` projects onto
/// the kernel of `H_n(U)`.
pub fn check_verhaegen_condition(pair: &HankelPair, tols: &Tolerances) -> Result<ProjectionCheck> {
    let n = pair.order();
    let hu = &pair.hu;
    let tol_u = tols.rank_threshold(&[hu])?;
    let input_rank = numlin::numerical_rank(hu, Some(tol_u))?;
    if input_rank.rank != n + 1 {
        return Ok(ProjectionCheck {
            input_full_rank: false,
            diagnostic: Some(format!(
                "rank H_n(U) = {} < {}: H_n(U) H_n(U)^T is singular",
                input_rank.rank,
                n + 1
            )),
            input_rank,
            projected_rank: None,
            holds: false,
        });
    }
    let cols = hu.ncols();
    let gram = hu * hu.adjoint();
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Numerical("H_n(U) H_n(U)^T could not be inverted".into()))?;
    let proj = CMatrix::identity(cols, cols) - hu.adjoint() * inv * hu;
    let projected = &pair.hy * proj;
    let tol = tols.rank_threshold(&[&pair.hy])?;
    let projected_rank = numlin::numerical_rank(&projected, Some(tol))?;
    let holds = projected_rank.rank == n;
    Ok(ProjectionCheck {
        input_full_rank: true,
        input_rank,
        diagnostic: (!holds)
            .then(|| format!("rank H_n(Y) Pi = {}, expected {n}", projected_rank.rank)),
        projected_rank: Some(projected_rank),
        holds,
    })
}

struct Blocks {
    base: CMatrix,
    bordered: CMatrix,
    /// `[Hu 0; Hy -gamma]`, the coefficient matrix of the moment solve.
    solve: CMatrix,
}

fn blocks(pair: &HankelPair, g: &CVector) -> Result<Blocks> {
    let rows = pair.hu.nrows();
    let gc = numlin::column(g);
    let base = numlin::vstack(&[&pair.hu, &pair.hy])?;
    let top = numlin::hstack(&[&pair.hu, &zero_col(rows)])?;
    let bordered = numlin::vstack(&[&top, &numlin::hstack(&[&pair.hy, &gc])?])?;
    let neg = -gc;
    let solve = numlin::vstack(&[&top, &numlin::hstack(&[&pair.hy, &neg])?])?;
    Ok(Blocks {
        base,
        bordered,
        solve,
    })
}

fn augmented(
    pair: &HankelPair,
    g: &CVector,
    top_rhs: &CVector,
    bottom_rhs: &CVector,
) -> Result<CMatrix> {
    let rows = pair.hu.nrows();
    let top = numlin::hstack(&[&pair.hu, &zero_col(rows), &numlin::column(top_rhs)])?;
    let bottom = numlin::hstack(&[&pair.hy, &numlin::column(g), &numlin::column(bottom_rhs)])?;
    numlin::vstack(&[&top, &bottom])
}

fn solve_moment(
    solve: &CMatrix,
    top_rhs: &CVector,
    bottom_rhs: &CVector,
    tol: f64,
) -> Result<numlin::LeastSquares> {
    let mut rhs = CVector::zeros(top_rhs.len() + bottom_rhs.len());
    rhs.rows_mut(0, top_rhs.len()).copy_from(top_rhs);
    rhs.rows_mut(top_rhs.len(), bottom_rhs.len())
        .copy_from(bottom_rhs);
    numlin::lstsq_min_norm(solve, &rhs, Some(tol))
}

/// Interpolation at `sigma`: both
/// `rank [Hu 0 g; Hy g 0] = rank [Hu 0; Hy g]` and
/// `rank [Hu 0; Hy g] = rank [Hu; Hy] + 1`, `g = gamma_n(sigma)`.
pub fn check_interpolation(
    pair: &HankelPair,
    sigma: Complex64,
    tols: &Tolerances,
) -> Result<InformativityVerdict> {
    let n = pair.order();
    let g = gamma(n, sigma);
    let b = blocks(pair, &g)?;
    let zero = CVector::zeros(n + 1);
    let aug = augmented(pair, &g, &g, &zero)?;
    let tol = tols.rank_threshold(&[&b.base, &b.bordered, &aug])?;
    let r_base = numlin::numerical_rank(&b.base, Some(tol))?;
    let r_bord = numlin::numerical_rank(&b.bordered, Some(tol))?;
    let r_aug = numlin::numerical_rank(&aug, Some(tol))?;

    let exists = r_aug.rank == r_bord.rank;
    let unique = r_bord.rank == r_base.rank + 1;
    let mut out = InformativityVerdict {
        kind: VerdictKind::Interpolation,
        verdict: false,
        ranks: vec![
            ("[Hu; Hy]".into(), r_base.clone()),
            ("[Hu 0; Hy g]".into(), r_bord.clone()),
            ("[Hu 0 g; Hy g 0]".into(), r_aug.clone()),
        ],
        moment: None,
        residual: None,
        diagnostic: None,
    };
    if !exists || !unique {
        let mut why = Vec::new();
        if !exists {
            why.push(format!(
                "no common moment: rank [Hu 0 g; Hy g 0] = {} != rank [Hu 0; Hy g] = {}",
                r_aug.rank, r_bord.rank
            ));
        }
        if !unique {
            why.push(format!(
                "moment not unique: rank [Hu 0; Hy g] = {} != rank [Hu; Hy] + 1 = {}",
                r_bord.rank,
                r_base.rank + 1
            ));
        }
        out.diagnostic = Some(why.join("; "));
        return Ok(out);
    }
    let sol = solve_moment(&b.solve, &g, &zero, tol)?;
    out.residual = Some(sol.relative_residual);
    if sol.relative_residual > tols.residual {
        out.diagnostic = Some(format!(
            "rank tests passed but the moment solve left relative residual {:.3e} > {:.1e}",
            sol.relative_residual, tols.residual
        ));
        return Ok(out);
    }
    out.verdict = true;
    out.moment = Some(sol.x[sol.x.len() - 1]);
    Ok(out)
}

/// Moments `M_0..M_k` at one point, as far as the data determine them.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub sigma: Complex64,
    pub requested: usize,
    /// One verdict per order attempted, in order; stops after the first
    /// failure.
    pub orders: Vec<InformativityVerdict>,
    /// Moments for every order that passed.
    pub moments: Vec<Complex64>,
    /// First order at which the data stop being informative.
    pub failed_order: Option<usize>,
}

impl MomentReport {
    pub fn informative(&self) -> bool {
        self.failed_order.is_none()
    }
}

/// Walks orders `0..=k`. Order 0 is [`check_interpolation`]. Order `j >= 1`
/// requires `rank [Hu 0 g^(j); Hy g s_j] = rank [Hu 0; Hy g]` with
/// `s_j = sum_{m<j} C(j,m) M_m g^(j-m)`, then solves for `M_j`.
pub fn compute_moments(
    pair: &HankelPair,
    sigma: Complex64,
    k: usize,
    tols: &Tolerances,
) -> Result<MomentReport> {
    let mut report = MomentReport {
        sigma,
        requested: k,
        orders: Vec::with_capacity(k + 1),
        moments: Vec::with_capacity(k + 1),
        failed_order: None,
    };
    let first = check_interpolation(pair, sigma, tols)?;
    let ok = first.verdict;
    if let Some(m) = first.moment {
        report.moments.push(m);
    }
    report.orders.push(first);
    if !ok {
        report.failed_order = Some(0);
        return Ok(report);
    }

    let n = pair.order();
    let g = gamma(n, sigma);
    let b = blocks(pair, &g)?;
    let derivs: Vec<CVector> = (0..=k).map(|j| gamma_deriv(n, j, sigma)).collect();
    for j in 1..=k {
        let mut lower = CVector::zeros(n + 1);
        for (m, &mm) in report.moments.iter().enumerate() {
            lower += &derivs[j - m] * (mm * binomial(j, m));
        }
        let aug = augmented(pair, &g, &derivs[j], &lower)?;
        let tol = tols.rank_threshold(&[&b.base, &b.bordered, &aug])?;
        let r_bord = numlin::numerical_rank(&b.bordered, Some(tol))?;
        let r_aug = numlin::numerical_rank(&aug, Some(tol))?;
        let mut v = InformativityVerdict {
            kind: VerdictKind::MomentOrder(j),
            verdict: false,
            ranks: vec![
                ("[Hu 0; Hy g]".into(), r_bord.clone()),
                (format!("[Hu 0 g^({j}); Hy g s_{j}]"), r_aug.clone()),
            ],
            moment: None,
            residual: None,
            diagnostic: None,
        };
        if r_aug.rank != r_bord.rank {
            v.diagnostic = Some(format!(
                "no common moment of order {j}: rank of augmented matrix {} != {}",
                r_aug.rank, r_bord.rank
            ));
        } else {
            let sol = solve_moment(&b.solve, &derivs[j], &lower, tol)?;
            v.residual = Some(sol.relative_residual);
            if sol.relative_residual > tols.residual {
                v.diagnostic = Some(format!(
                    "rank test passed but the order-{j} solve left relative residual {:.3e} > {:.1e}",
                    sol.relative_residual, tols.residual
                ));
            } else {
                v.verdict = true;
                let m = sol.x[sol.x.len() - 1];
                v.moment = Some(m);
                report.moments.push(m);
            }
        }
        let passed = v.verdict;
        report.orders.push(v);
        if !passed {
            report.failed_order = Some(j);
            break;
        }
    }
    Ok(report)
}

/// Computes the moments for every point of `spec`; the first order that
/// fails at a point truncates that point's moment list.
pub fn compute_moment_set(
    pair: &HankelPair,
    spec: &InterpolationSpec,
    tols: &Tolerances,
) -> Result<Vec<MomentReport>> {
    spec.points()
        .iter()
        .map(|&(s, k)| compute_moments(pair, s, k, tols))
        .collect()
}

/// Appends `(conj sigma, conj M_j)` for every non-real point.
pub fn conjugate_closure(moments: &MomentSet) -> MomentSet {
    let mut out = moments.entries.clone();
    for e in &moments.entries {
        if !is_real(e.sigma) {
            out.push(MomentEntry {
                sigma: e.sigma.conj(),
                moments: e.moments.iter().map(|m| m.conj()).collect(),
            });
        }
    }
    MomentSet::new(out)
}
