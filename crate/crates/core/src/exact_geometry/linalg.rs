//! Small dense exact linear algebra: determinants, square solves, null spaces.

use crate::scalar::Scalar;

/// Determinant by Gaussian elimination with row exchanges.
pub fn determinant<T: Scalar>(mut rows: Vec<Vec<T>>) -> T {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    let mut det = T::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return T::zero();
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let p = rows[col][col].clone();
        det = det * p.clone();
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / p.clone();
            for c in col..n {
                let delta = factor.clone() * rows[col][c].clone();
                rows[r][c] = rows[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<T: Scalar>(rows: &mut [Vec<T>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = T::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            for j in c..ncols {
                let delta = factor.clone() * rows[r][j].clone();
                rows[i][j] = rows[i][j].clone() - delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of `{x : A x = 0}` where `rows` are the rows of `A`.
pub fn null_space<T: Scalar>(rows: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); ncols];
            v[f] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Solves the square system `A x = b`; `None` when `A` is singular.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64) -> BigRational {
        BigRational::from_int(n)
    }

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn determinant_of_small_matrices() {
        assert_eq!(determinant(m(&[&[2, 0], &[0, 3]])), q(6));
        assert_eq!(determinant(m(&[&[0, 1], &[1, 0]])), q(-1));
        assert_eq!(determinant(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), q(0));
        assert_eq!(determinant(m(&[&[2, -1, 0], &[1, 3, 2], &[0, 1, 4]])), q(24));
    }

    #[test]
    fn null_space_of_rank_deficient_rows() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let ns = null_space(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            assert!(dot(row, &ns[0]).is_zero());
        }
    }

    #[test]
    fn solve_square_system() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![BigRational::from_ratio(4, 5), BigRational::from_ratio(7, 5)]);
        assert!(solve(&m(&[&[1, 2], &[2, 4]]), &[q(1), q(2)]).is_none());
    }
}
