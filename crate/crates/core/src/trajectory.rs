//! Input/output records, Hankel matrices and CSV ingestion.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numlin::{self, CMatrix};

/// Samples `u_0..u_T`, `y_0..y_T` of a scalar system of assumed order `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    u: Vec<f64>,
    y: Vec<f64>,
    n: usize,
}

impl Trajectory {
    pub fn new(u: Vec<f64>, y: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("system order n must be at least 1"));
        }
        if u.len() != y.len() {
            return Err(Error::input(format!(
                "input has {} samples but output has {}",
                u.len(),
                y.len()
            )));
        }
        if u.len() < n + 1 {
            return Err(Error::input(format!(
                "{} samples are too few for order {n}: need T >= n, i.e. at least {} samples",
                u.len(),
                n + 1
            )));
        }
        if let Some(t) = u.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite sample at index {}",
                t % u.len()
            )));
        }
        Ok(Trajectory { u, y, n })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `T`, the index of the last sample.
    pub fn horizon(&self) -> usize {
        self.u.len() - 1
    }

    pub fn with_order(&self, n: usize) -> Result<Self> {
        Trajectory::new(self.u.clone(), self.y.clone(), n)
    }
}

/// `H_n(U)`, `H_n(Y)` and `H_n(Y)` without its last row.
#[derive(Clone, Debug)]
pub struct HankelPair {
    pub hu: CMatrix,
    pub hy: CMatrix,
    pub hy_bar: CMatrix,
}

impl HankelPair {
    pub fn order(&self) -> usize {
        self.hy_bar.nrows()
    }
}

/// Hankel matrix of the given depth: `(depth+1) x (len-depth)` with entry
/// `(i, j) = seq[i + j]`.
pub fn build_hankel(seq: &[f64], depth: usize) -> Result<CMatrix> {
    if depth + 1 > seq.len() {
        return Err(Error::input(format!(
            "Hankel depth {depth} needs at least {} samples, got {}",
            depth + 1,
            seq.len()
        )));
    }
    let cols = seq.len() - depth;
    Ok(CMatrix::from_fn(depth + 1, cols, |i, j| {
        Complex64::new(seq[i + j], 0.0)
    }))
}

pub fn make_pair(traj: &Trajectory) -> HankelPair {
    let n = traj.order();
    // Trajectory guarantees len >= n + 1.
    let hu = build_hankel(traj.u(), n).expect("trajectory length checked at construction");
    let hy = build_hankel(traj.y(), n).expect("trajectory length checked at construction");
    let hy_bar = hy.rows(0, n).into_owned();
    HankelPair { hu, hy, hy_bar }
}

/// Persistency of excitation of the given order: `H_{order-1}(u)` has full
/// row rank.
pub fn check_pe_order(u: &[f64], order: usize) -> Result<bool> {
    if order == 0 {
        return Err(Error::input("excitation order must be at least 1"));
    }
    let h = build_hankel(u, order - 1)?;
    Ok(numlin::numerical_rank(&h, None)?.rank == order)
}

/// Raw columns read from a CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub u: Vec<f64>,
    pub y: Option<Vec<f64>>,
}

/// Reads `t,u,y` records. With `require_y = false` the `y` column may be
/// absent (input-only files).
pub fn read_samples<R: Read>(reader: R, require_y: bool) -> Result<Samples> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Parse {
            line: 1,
            message: "missing header (expected `t,u,y`)".into(),
        });
    }
    let find = |name: &str| headers.iter().position(|h| h == name);
    let missing = |name: &str| Error::Parse {
        line: 1,
        message: format!("header lacks column `{name}`"),
    };
    let t_col = find("t").ok_or_else(|| missing("t"))?;
    let u_col = find("u").ok_or_else(|| missing("u"))?;
    let y_col = find("y");
    if require_y && y_col.is_none() {
        return Err(missing("y"));
    }

    let mut u = Vec::new();
    let mut y = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(idx as u64 + 2, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(idx as u64 + 2, |p| p.line());
        let cell = |col: usize, name: &str| -> Result<f64> {
            let raw = rec.get(col).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing `{name}` value"),
            })?;
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{name}` value `{raw}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("`{name}` value `{raw}` is not finite"),
                });
            }
            Ok(v)
        };
        let t = cell(t_col, "t")?;
        if t != idx as f64 {
            return Err(Error::Parse {
                line,
                message: format!("expected t = {idx}, found `{}`", &rec[t_col]),
            });
        }
        u.push(cell(u_col, "u")?);
        if let Some(c) = y_col {
            y.push(cell(c, "y")?);
        }
    }
    if u.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no samples".into(),
        });
    }
    Ok(Samples {
        u,
        y: y_col.map(|_| y),
    })
}

pub fn load_csv(path: impl AsRef<Path>, n: usize) -> Result<Trajectory> {
    let file = File::open(path.as_ref())?;
    let s = read_samples(file, true)?;
    Trajectory::new(s.u, s.y.expect("y required"), n)
}

/// Writes `t,u,y` with shortest round-trip formatting of every sample.
pub fn write_csv<W: Write>(mut w: W, u: &[f64], y: &[f64]) -> Result<()> {
    if u.len() != y.len() {
        return Err(Error::input("u and y differ in length"));
    }
    writeln!(w, "t,u,y")?;
    for (t, (a, b)) in u.iter().zip(y).enumerate() {
        writeln!(w, "{t},{a},{b}")?;
    }
    Ok(())
}

/// Built-in datasets.
pub mod fixtures {
    use super::Trajectory;

    pub const RL_CIRCUIT: &str = "rl-circuit";
    pub const RL_CIRCUIT_ROUNDED: &str = "rl-circuit-rounded";

    /// RL circuit, `dt = 0.2`, 21 samples at full double precision.
    pub const CIRCUIT_U: [f64; 21] = [
        2.0,
        1.70710678118655,
        0.75,
        -0.207106781186547,
        -0.6875,
        -0.519606781186547,
        0.109375,
        0.769606781186547,
        1.03515625,
        0.726638031186547,
        0.0107421874999998,
        -0.701247406186547,
        -0.996826171874999,
        -0.705397796811547,
        0.000915527343750162,
        0.707595062436547,
        1.00025939941406,
        0.707244110288109,
        7.24792480465695e-05,
        -0.70706863421389,
        -0.999979972839354,
    ];

    pub const CIRCUIT_Y: [f64; 21] = [
        0.0,
        0.250047564387785,
        0.372595157056202,
        0.365856125343819,
        0.275489451684602,
        0.17383822660543,
        0.126197527352066,
        0.159157436530696,
        0.248813449336606,
        0.336707358182543,
        0.364998160875403,
        0.310763691539487,
        0.199605442896405,
        0.0907184524863998,
        0.0422342116320128,
        0.0771665419001742,
        0.169921304671688,
        0.261277592954381,
        0.29306668897561,
        0.242235058729973,
        0.134337949426452,
    ];

    /// The same record rounded to four decimals.
    #[allow(clippy::approx_constant)]
    pub const CIRCUIT_U_ROUNDED: [f64; 21] = [
        2.0, 1.7071, 0.75, -0.2071, -0.6875, -0.5196, 0.1094, 0.7696, 1.0352, 0.7266, 0.0107,
        -0.7012, -0.9968, -0.7054, 0.0009, 0.7076, 1.0003, 0.7072, 0.0001, -0.7071, -1.0,
    ];

    pub const CIRCUIT_Y_ROUNDED: [f64; 21] = [
        0.0, 0.25, 0.3726, 0.3659, 0.2755, 0.1738, 0.1262, 0.1592, 0.2488, 0.3367, 0.365, 0.3108,
        0.1996, 0.0907, 0.0422, 0.0772, 0.1699, 0.2613, 0.2931, 0.2422, 0.1343,
    ];

    pub const CIRCUIT_ORDER: usize = 4;

    pub fn circuit() -> Trajectory {
        Trajectory::new(CIRCUIT_U.to_vec(), CIRCUIT_Y.to_vec(), CIRCUIT_ORDER).unwrap()
    }

    pub fn circuit_rounded() -> Trajectory {
        Trajectory::new(
            CIRCUIT_U_ROUNDED.to_vec(),
            CIRCUIT_Y_ROUNDED.to_vec(),
            CIRCUIT_ORDER,
        )
        .unwrap()
    }

    pub fn by_name(name: &str) -> Option<Trajectory> {
        match name {
            RL_CIRCUIT => Some(circuit()),
            RL_CIRCUIT_ROUNDED => Some(circuit_rounded()),
            _ => None,
        }
    }
}
