//! Exact integer and rational matrix routines.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank of a rational matrix given by rows.
pub fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &pivot;
            for j in c..cols {
                let v = &rows[r][j] * &f;
                rows[i][j] -= v;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Inverse of a square rational matrix, or `None` if singular.
pub fn inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let pivot = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigRational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(x I - m)`, coefficients from the constant
/// term upward, by the Faddeev-LeVerrier recursion.
pub fn charpoly(m: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let identity = |s: &BigRational| -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { s.clone() } else { BigRational::zero() }).collect())
            .collect()
    };
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let prev = coeffs[n - k + 1].clone();
        let shifted: Vec<Vec<BigRational>> = mk
            .iter()
            .zip(identity(&prev))
            .map(|(r, i)| r.iter().zip(i).map(|(x, y)| x + y).collect())
            .collect();
        mk = mul(m, &shifted);
        let trace = (0..n).fold(BigRational::zero(), |acc, i| acc + &mk[i][i]);
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
    }
    coeffs
}

pub fn to_rational(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    fn laplace(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * laplace(&minor)
            })
            .sum()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det(&[]), BigInt::one());
        assert_eq!(det(&[vec![1, 1], vec![0, 1]]), BigInt::one());
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det(&[vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]), BigInt::from(4));
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), BigInt::zero());
    }

    #[test]
    fn charpoly_of_a2_coxeter() {
        // C = [[1,1],[0,1]], Phi = -C^{-T} C
        let c = to_rational(&[vec![1, 1], vec![0, 1]]);
        let ct_inv = inverse(&[vec![q(1), q(0)], vec![q(1), q(1)]]).unwrap();
        let phi: Vec<Vec<_>> = mul(&ct_inv, &c).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
        assert_eq!(charpoly(&phi), vec![q(1), q(1), q(1)]);
    }

    #[test]
    fn rank_and_inverse() {
        assert_eq!(rank(vec![vec![q(1), q(2)], vec![q(2), q(4)]]), 1);
        assert_eq!(rank(vec![vec![q(0), q(1)], vec![q(1), q(0)], vec![q(1), q(1)]]), 2);
        assert_eq!(rank(Vec::new()), 0);
        assert!(inverse(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn bareiss_matches_laplace(n in 1usize..5, seed in proptest::collection::vec(-4i64..5, 16)) {
            let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 4 + j]).collect()).collect();
            prop_assert_eq!(det(&m), BigInt::from(laplace(&m)));
        }

        #[test]
        fn inverse_is_two_sided(n in 1usize..4, seed in proptest::collection::vec(-3i64..4, 9)) {
            let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 3 + j]).collect()).collect();
            let r = to_rational(&m);
            match inverse(&r) {
                None => prop_assert!(det(&m).is_zero()),
                Some(inv) => {
                    let id = mul(&r, &inv);
                    for (i, row) in id.iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            prop_assert_eq!(x.clone(), if i == j { q(1) } else { q(0) });
                        }
                    }
                }
            }
        }
    }
}
