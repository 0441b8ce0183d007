mod common;

use common::{c, rng};
use ddmor::numlin::{self, CMatrix, CVector};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `rows x cols` complex matrix of rank at most `rank`.
fn low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> CMatrix {
    let l = CMatrix::from_fn(rows, rank, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let r = CMatrix::from_fn(rank, cols, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    l * r
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    low_rank(rng, n, n, n).qr().q()
}

proptest! {
    #[test]
    fn rank_survives_unitary_and_permutation(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7, rank in 0usize..7) {
        let mut g = rng(seed);
        let rank = rank.min(rows).min(cols);
        let m = low_rank(&mut g, rows, cols, rank);
        let base = numlin::numerical_rank(&m, None).unwrap().rank;
        prop_assert_eq!(base, rank);
        let u = unitary(&mut g, rows);
        let v = unitary(&mut g, cols);
        prop_assert_eq!(numlin::numerical_rank(&(&u * &m * &v), None).unwrap().rank, base);
        let mut perm = m.clone();
        perm.swap_rows(0, rows - 1);
        perm.swap_columns(0, cols - 1);
        prop_assert_eq!(numlin::numerical_rank(&perm, None).unwrap().rank, base);
    }

    #[test]
    fn duplicated_columns_keep_rank(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6, rank in 0usize..6) {
        let mut g = rng(seed);
        let m = low_rank(&mut g, rows, cols, rank.min(rows).min(cols));
        let both = numlin::hstack(&[&m, &m]).unwrap();
        prop_assert_eq!(
            numlin::numerical_rank(&both, None).unwrap().rank,
            numlin::numerical_rank(&m, None).unwrap().rank
        );
    }

    #[test]
    fn consistent_lstsq_solves(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7, rank in 1usize..7) {
        let mut g = rng(seed);
        let a = low_rank(&mut g, rows, cols, rank.min(rows).min(cols));
        let x0 = random_vec(&mut g, cols);
        let b = &a * x0;
        let sol = numlin::lstsq_min_norm(&a, &b, None).unwrap();
        prop_assert!(sol.relative_residual <= 1e-10, "{}", sol.relative_residual);
        prop_assert!((&a * &sol.x - &b).norm() <= 1e-10 * (1.0 + b.norm()));
    }

    #[test]
    fn last_coordinate_is_unique_for_independent_column(seed in any::<u64>(), rows in 3usize..7, cols in 1usize..5) {
        let mut g = rng(seed);
        let rank = (cols - 1).max(1).min(rows - 1);
        let a = low_rank(&mut g, rows, cols, rank);
        let col = random_vec(&mut g, rows);
        let aa = numlin::hstack(&[&a, &numlin::column(&col)]).unwrap();
        let ra = numlin::numerical_rank(&a, None).unwrap().rank;
        prop_assume!(numlin::numerical_rank(&aa, None).unwrap().rank == ra + 1);
        let rhs = &aa * random_vec(&mut g, cols + 1);
        let first = numlin::lstsq_min_norm(&aa, &rhs, None).unwrap().x;
        let kernel = numlin::right_kernel(&aa, None).unwrap();
        let mut second = first.clone();
        if kernel.ncols() > 0 {
            second += &kernel * random_vec(&mut g, kernel.ncols());
        }
        prop_assert!((&aa * &second - &rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        prop_assert!((first[cols] - second[cols]).norm() <= 1e-9 * (1.0 + first[cols].norm()));
    }

    #[test]
    fn shared_left_kernel_transfers_solutions(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a1 = low_rank(&mut g, 3, 3, 2);
        let w = CMatrix::from_fn(1, 3, |_, _| c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)));
        let b1 = &w * &a1;
        let mix = low_rank(&mut g, 3, 3, 3);
        let (a2, b2) = (&a1 * &mix, &b1 * &mix);
        let stack1 = numlin::vstack(&[&a1, &b1]).unwrap();
        let stack2 = numlin::vstack(&[&a2, &b2]).unwrap();
        let ker = numlin::left_kernel(&stack1, None).unwrap();
        prop_assert!((&ker * &stack2).norm() <= 1e-9);
        // xi A1 = b1  <=>  A1^T xi^T = b1^T
        let base = numlin::lstsq_min_norm(&a1.transpose(), &b1.transpose().column(0).into_owned(), None).unwrap().x;
        let free = numlin::left_kernel(&a1, None).unwrap();
        for _ in 0..5 {
            let coef = random_vec(&mut g, free.nrows());
            let xi = base.transpose() + coef.transpose() * &free;
            prop_assert!((&xi * &a1 - &b1).norm() <= 1e-9);
            prop_assert!((&xi * &a2 - &b2).norm() <= 1e-8);
        }
    }
}
