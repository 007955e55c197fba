use boundaryk::zlinalg::{coker_invariants, hnf, kernel_basis, snf, solve, IntMatrix, SparseMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| { s.push(last); s })).collect()
}

/// Invariant factors from gcds of k×k minors.
fn minor_gcd_factors(m: &[Vec<i64>]) -> Vec<i64> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut prev = 1i64;
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = 0i64;
        for r in subsets(rows, k) {
            for c in subsets(cols, k) {
                let minor: Vec<Vec<i64>> = r.iter().map(|&i| c.iter().map(|&j| m[i][j]).collect()).collect();
                g = g.gcd(&cofactor_det(&minor));
            }
        }
        if g == 0 {
            out.resize(rows.min(cols), 0);
            return out;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

fn matrix(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-bound..=bound, cols), rows)
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

proptest! {
    #[test]
    fn snf_matches_minor_gcds(rows in 1usize..=4, cols in 1usize..=4, seed in matrix(4, 4, 4)) {
        let m: Vec<Vec<i64>> = seed[..rows].iter().map(|r| r[..cols].to_vec()).collect();
        let im = IntMatrix::from_rows(&m).unwrap();
        let d = snf(&im);
        prop_assert!(d.verify(&im));
        prop_assert_eq!(&d.invariant_factors, &big(&minor_gcd_factors(&m)));
        prop_assert_eq!(snf(&im.clone()), d);
    }

    #[test]
    fn hnf_is_triangular_and_unimodular(m in matrix(3, 4, 5)) {
        let im = IntMatrix::from_rows(&m).unwrap();
        let (h, u) = hnf(&im);
        prop_assert!(u.is_unimodular());
        prop_assert_eq!(u.mul(&im).unwrap(), h.clone());
        let mut last_pivot: Option<usize> = None;
        for i in 0..h.rows() {
            match h.row(i).iter().position(|x| !x.is_zero()) {
                Some(p) => {
                    prop_assert!(last_pivot.is_none_or(|q| p > q));
                    prop_assert!(h[(i, p)].is_positive());
                    for k in 0..i {
                        prop_assert!(!h[(k, p)].is_negative() && h[(k, p)] < h[(i, p)]);
                    }
                    last_pivot = Some(p);
                }
                None => prop_assert!(h.row(i).iter().all(|x| x.is_zero())),
            }
        }
    }

    #[test]
    fn kernel_and_solve_agree_with_snf(m in matrix(4, 5, 2), x in prop::collection::vec(-3i64..=3, 5), b in prop::collection::vec(-3i64..=3, 4)) {
        let im = IntMatrix::from_rows(&m).unwrap();
        let sparse = SparseMatrix::from_dense(&im);
        let d = snf(&im);
        let kernel = kernel_basis(&sparse);
        prop_assert_eq!(kernel.len(), 5 - d.rank());
        for v in &kernel {
            prop_assert!(sparse.mul_vec(v).unwrap().iter().all(|e| e.is_zero()));
        }
        let target = im.mul_vec(&big(&x)).unwrap();
        let y = solve(&sparse, &target).unwrap().expect("image vector is solvable");
        prop_assert_eq!(im.mul_vec(&y).unwrap(), target);

        // b ∈ im M iff U·b is divisible entrywise by the invariant factors and vanishes past the rank.
        let ub = d.u.mul_vec(&big(&b)).unwrap();
        let solvable = ub.iter().enumerate().all(|(i, e)| match d.invariant_factors.get(i) {
            Some(f) if !f.is_zero() => (e % f).is_zero(),
            _ => e.is_zero(),
        });
        let got = solve(&sparse, &big(&b)).unwrap();
        prop_assert_eq!(got.is_some(), solvable);
        if let Some(y) = got {
            prop_assert_eq!(im.mul_vec(&y).unwrap(), big(&b));
        }
    }

    #[test]
    fn determinant_matches_cofactor_expansion(m in matrix(4, 4, 3)) {
        let im = IntMatrix::from_rows(&m).unwrap();
        prop_assert_eq!(im.determinant().unwrap(), BigInt::from(cofactor_det(&m)));
    }
}

#[test]
fn cokernel_examples() {
    let c = coker_invariants(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 0]]).unwrap());
    assert_eq!(c.free_rank, 1);
    assert_eq!(c.torsion, vec![BigInt::from(2)]);
    let c = coker_invariants(&IntMatrix::from_rows(&[vec![1, 1], vec![1, -1]]).unwrap());
    assert_eq!(c.free_rank, 0);
    assert_eq!(c.torsion, vec![BigInt::from(2)]);
}
