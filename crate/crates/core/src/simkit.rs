//! Simulation and ground-truth systems: difference-equation and state-space
//! simulation, zero-order-hold discretization, and conversion of a
//! realization to difference-equation parameters.

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::error::{Error, Result};
use crate::polynomial::SystemParams;
use crate::trajectory::{fixtures, Trajectory};

/// Largest realization `ss_to_params` accepts.
pub const MAX_REALIZATION_ORDER: usize = 12;

/// `x' = A x + B u`, `y = C x + D u` (continuous or discrete).
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>, d: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(Error::input(format!(
                "inconsistent realization: A {}x{}, B {}, C {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        if a.iter()
            .chain(b.iter())
            .chain(c.iter())
            .any(|v| !v.is_finite())
            || !d.is_finite()
        {
            return Err(Error::input("non-finite realization entry"));
        }
        Ok(StateSpace { a, b, c, d })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }
}

/// Initial outputs `y_0..y_{n-1}` and the input sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub initial_outputs: Vec<f64>,
    pub input: Vec<f64>,
}

impl SimConfig {
    pub fn zero_initial(n: usize, input: Vec<f64>) -> Self {
        SimConfig {
            initial_outputs: vec![0.0; n],
            input,
        }
    }
}

/// Runs `y_{t+n} = -sum p_j y_{t+j} + sum q_j u_{t+j}` forward from the
/// given initial outputs.
pub fn simulate_io(sys: &SystemParams, cfg: &SimConfig) -> Result<Trajectory> {
    let n = sys.order();
    if cfg.initial_outputs.len() != n {
        return Err(Error::input(format!(
            "order-{n} recursion needs {n} initial outputs, got {}",
            cfg.initial_outputs.len()
        )));
    }
    let len = cfg.input.len();
    if len < n + 1 {
        return Err(Error::input(format!(
            "input of length {len} is too short for order {n} (need at least {})",
            n + 1
        )));
    }
    let u = &cfg.input;
    let mut y = vec![0.0; len];
    y[..n].copy_from_slice(&cfg.initial_outputs);
    for t in 0..len - n {
        let mut acc: f64 = sys.q().iter().enumerate().map(|(j, q)| q * u[t + j]).sum();
        for (j, p) in sys.p().iter().enumerate() {
            acc -= p * y[t + j];
        }
        y[t + n] = acc;
    }
    Trajectory::new(u.clone(), y, n.max(1))
}

/// Output of `x_{t+1} = A x_t + B u_t`, `y_t = C x_t + D u_t` from `x_0 = 0`.
pub fn simulate_state_space(ss: &StateSpace, input: &[f64]) -> Vec<f64> {
    let mut x = DVector::<f64>::zeros(ss.order());
    input
        .iter()
        .map(|&u| {
            let y = (&ss.c * &x)[0] + ss.d * u;
            x = &ss.a * &x + &ss.b * u;
            y
        })
        .collect()
}

/// Zero-order hold: `A_d = exp(A dt)`, `B_d = int_0^dt exp(A tau) dtau B`,
/// both read off the exponential of `[[A, B], [0, 0]] dt`.
pub fn zoh_discretize(ss: &StateSpace, dt: f64) -> Result<StateSpace> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::input(format!(
            "sampling time must be positive, got {dt}"
        )));
    }
    let n = ss.order();
    let mut aug = DMatrix::<f64>::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&(&ss.a * dt));
    aug.view_mut((0, n), (n, 1)).copy_from(&(&ss.b * dt));
    let e = aug.exp();
    StateSpace::new(
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, 1)).column(0).into_owned(),
        ss.c.clone(),
        ss.d,
    )
}

/// Difference-equation parameters of a realization.
///
/// Faddeev-LeVerrier gives `det(zI - A) = z^n + c_1 z^(n-1) + ... + c_n` and
/// `adj(zI - A) = sum_k z^(n-1-k) N_k` with `N_0 = I`,
/// `N_k = A N_{k-1} + c_k I`, `c_k = -tr(A N_{k-1}) / k`. The numerator is
/// `C adj(zI - A) B + D det(zI - A)`.
pub fn ss_to_params(ss: &StateSpace) -> Result<SystemParams> {
    let n = ss.order();
    if n == 0 {
        return Err(Error::input("realization has no states"));
    }
    if n > MAX_REALIZATION_ORDER {
        return Err(Error::input(format!(
            "realization order {n} exceeds {MAX_REALIZATION_ORDER}"
        )));
    }
    let ident = DMatrix::<f64>::identity(n, n);
    // charpoly[k] = c_k, c_0 = 1
    let mut charpoly = Vec::with_capacity(n + 1);
    charpoly.push(1.0);
    let mut adj_terms: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    let mut nk = ident.clone();
    for k in 1..=n {
        adj_terms.push(nk.clone());
        let an = &ss.a * &nk;
        let ck = -an.trace() / k as f64;
        charpoly.push(ck);
        nk = an + &ident * ck;
    }
    // ascending: coefficient of z^j is c_{n-j}
    let p: Vec<f64> = (0..n).map(|j| charpoly[n - j]).collect();
    let mut q = vec![0.0; n + 1];
    for (k, term) in adj_terms.iter().enumerate() {
        // N_k multiplies z^(n-1-k)
        q[n - 1 - k] += (&ss.c * term * &ss.b)[0];
    }
    for (j, qj) in q.iter_mut().enumerate() {
        *qj += ss.d * charpoly[n - j];
    }
    SystemParams::new(q, p)
}

/// Four-inductor ladder with the first inductor current as output. Uses
/// `R_2..R_5`; `R_1` sits across the source and does not enter the dynamics.
pub fn rl_circuit(inductance: [f64; 4], resistance: [f64; 5]) -> Result<StateSpace> {
    let [l1, l2, l3, l4] = inductance;
    let [_, r2, r3, r4, r5] = resistance;
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(4, 4, &[
        -r2 / l1,  r2 / l1,          0.0,              0.0,
         r2 / l2, -(r2 + r3) / l2,   r3 / l2,          0.0,
         0.0,      r3 / l3,         -(r3 + r4) / l3,   r4 / l3,
         0.0,      0.0,              r4 / l4,         -(r4 + r5) / l4,
    ]);
    let b = DVector::from_vec(vec![1.0 / l1, 0.0, 0.0, 0.0]);
    let c = RowDVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    StateSpace::new(a, b, c, 0.0)
}

pub const CIRCUIT_DT: f64 = 0.2;

/// The sampled RL circuit that generates the `rl-circuit` fixture.
pub fn circuit_system() -> StateSpace {
    let ct = rl_circuit([1.0; 4], [0.5, 8.0, 5.0, 1.0, 4.0]).expect("valid circuit");
    zoh_discretize(&ct, CIRCUIT_DT).expect("positive dt")
}

/// Re-simulates the fixture from its input with the circuit at rest.
pub fn regenerate_circuit_data() -> Trajectory {
    let u = fixtures::CIRCUIT_U.to_vec();
    let y = simulate_state_space(&circuit_system(), &u);
    Trajectory::new(u, y, fixtures::CIRCUIT_ORDER).expect("21 samples")
}
