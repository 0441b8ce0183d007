#![allow(dead_code)]

use ddmor::polynomial::SystemParams;
use ddmor::simkit::{simulate_io, SimConfig};
use ddmor::Trajectory;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub struct RandomSystem {
    pub params: SystemParams,
    pub poles: Vec<Complex64>,
}

/// Monic real polynomial (ascending, leading one dropped) with the given
/// roots; complex roots must come in conjugate pairs.
pub fn monic_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut coeffs = vec![c(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
        for (i, &a) in coeffs.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        coeffs = next;
    }
    coeffs.pop();
    coeffs.iter().map(|z| z.re).collect()
}

/// Well-separated poles inside radius 0.9 and a numerator bounded away from
/// them, so the realization is minimal.
pub fn stable_system(rng: &mut ChaCha8Rng, n: usize) -> RandomSystem {
    loop {
        let mut poles: Vec<Complex64> = Vec::with_capacity(n);
        while poles.len() < n {
            if n - poles.len() >= 2 && rng.gen_bool(0.5) {
                let rad = rng.gen_range(0.2..0.9);
                let ang = rng.gen_range(0.2..std::f64::consts::PI - 0.2);
                let z = Complex64::from_polar(rad, ang);
                poles.push(z);
                poles.push(z.conj());
            } else {
                poles.push(c(rng.gen_range(-0.9..0.9), 0.0));
            }
        }
        let separated = poles
            .iter()
            .enumerate()
            .all(|(i, a)| poles[..i].iter().all(|b| (a - b).norm() > 0.15));
        if !separated {
            continue;
        }
        let p = monic_from_roots(&poles);
        let q: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let params = SystemParams::new(q, p).unwrap();
        let num = params.numerator();
        if poles.iter().all(|&z| num.eval(z).norm() > 0.05) {
            return RandomSystem { params, poles };
        }
    }
}

/// Random input and random initial outputs, `len` samples.
pub fn random_trajectory(rng: &mut ChaCha8Rng, sys: &SystemParams, len: usize) -> Trajectory {
    let n = sys.order();
    let cfg = SimConfig {
        initial_outputs: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        input: (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    simulate_io(sys, &cfg).unwrap()
}

/// Point in the disk of the given radius at least `gap` away from every pole.
pub fn random_point(rng: &mut ChaCha8Rng, radius: f64, poles: &[Complex64], gap: f64) -> Complex64 {
    loop {
        let z = c(
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
        );
        if z.norm() <= radius && poles.iter().all(|p| (z - p).norm() > gap) {
            return z;
        }
    }
}

pub fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1e-12)
}
