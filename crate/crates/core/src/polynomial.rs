//! Polynomials, monomial vectors `gamma_l` and their derivatives, and the
//! transfer-function moment oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numlin::CVector;

/// Complex polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            Poly {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            }
        } else {
            Poly { coeffs }
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Formal degree (length - 1), including zero leading terms.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::new(vec![Complex64::new(0.0, 0.0)]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, &c)| c * m as f64)
                .collect(),
        )
    }
}

/// `k`-th derivative of `poly` at `sigma`, by repeated formal differentiation.
pub fn poly_deriv_eval(poly: &Poly, k: usize, sigma: Complex64) -> Complex64 {
    let mut p = poly.clone();
    for _ in 0..k {
        if p.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            break;
        }
        p = p.derivative();
    }
    p.eval(sigma)
}

/// Parameters of `y_{t+n} + p_{n-1} y_{t+n-1} + ... + p_0 y_t = q_n u_{t+n} + ... + q_0 u_t`.
///
/// `P(z) = z^n + p_{n-1} z^{n-1} + ... + p_0` is monic; its leading one is not
/// stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    q: Vec<f64>,
    p: Vec<f64>,
}

impl SystemParams {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() + 1 {
            return Err(Error::input(format!(
                "order {} needs {} numerator coefficients, got {}",
                p.len(),
                p.len() + 1,
                q.len()
            )));
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite system parameter"));
        }
        Ok(SystemParams { q, p })
    }

    pub fn order(&self) -> usize {
        self.p.len()
    }

    /// `q_0..q_n`
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `p_0..p_{n-1}`
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn numerator(&self) -> Poly {
        Poly::from_real(&self.q)
    }

    pub fn denominator(&self) -> Poly {
        let mut c: Vec<f64> = self.p.clone();
        c.push(1.0);
        Poly::from_real(&c)
    }

    /// Threshold below which `|P(sigma)|` counts as a pole.
    pub fn pole_tolerance(&self) -> f64 {
        let pn = self.p.iter().map(|v| v * v).sum::<f64>().sqrt();
        1e-10 * (1.0 + pn)
    }

    /// `G(z) = Q(z) / P(z)`.
    pub fn transfer(&self, z: Complex64) -> Result<Complex64> {
        let den = self.denominator().eval(z);
        if den.norm() < self.pole_tolerance() {
            return Err(Error::Pole {
                sigma: z,
                magnitude: den.norm(),
            });
        }
        Ok(self.numerator().eval(z) / den)
    }
}

/// `(1, sigma, ..., sigma^ell)`
pub fn gamma(ell: usize, sigma: Complex64) -> CVector {
    let mut v = CVector::zeros(ell + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for m in 0..=ell {
        v[m] = acc;
        acc *= sigma;
    }
    v
}

/// `d^k/dz^k gamma_ell(z)` at `sigma`: entry `m` is `m!/(m-k)! sigma^(m-k)`
/// for `m >= k`, zero otherwise.
pub fn gamma_deriv(ell: usize, k: usize, sigma: Complex64) -> CVector {
    let mut v = CVector::zeros(ell + 1);
    for m in k..=ell {
        v[m] = sigma.powu((m - k) as u32) * falling_factorial(m, k);
    }
    v
}

/// `m (m-1) ... (m-k+1)`
pub fn falling_factorial(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    ((m - k + 1)..=m).fold(1.0, |acc, v| acc * v as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `M_0..M_k` of `G = Q/P` at `sigma` from
/// `Q^(j)(sigma) = sum_m C(j,m) M_m P^(j-m)(sigma)`, solved for `M_j` in turn.
pub fn moment_sequence(sys: &SystemParams, sigma: Complex64, k: usize) -> Result<Vec<Complex64>> {
    let p = sys.denominator();
    let q = sys.numerator();
    let p0 = p.eval(sigma);
    if p0.norm() < sys.pole_tolerance() {
        return Err(Error::Pole {
            sigma,
            magnitude: p0.norm(),
        });
    }
    let p_derivs: Vec<Complex64> = (0..=k).map(|j| poly_deriv_eval(&p, j, sigma)).collect();
    let mut moments: Vec<Complex64> = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut rhs = poly_deriv_eval(&q, j, sigma);
        for (m, mm) in moments.iter().enumerate() {
            rhs -= *mm * p_derivs[j - m] * binomial(j, m);
        }
        moments.push(rhs / p0);
    }
    Ok(moments)
}

/// `k`-th derivative of `Q/P` at `sigma`.
pub fn eval_moment_oracle(sys: &SystemParams, sigma: Complex64, k: usize) -> Result<Complex64> {
    Ok(*moment_sequence(sys, sigma, k)?.last().expect("k+1 moments"))
}
