//! Sylvester-matrix determinant, kept independent of the resultant code.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Determinant of the Sylvester matrix of `a` and `b`, given as coefficient
/// lists from the constant term up, with the rows of `a` first.
pub fn sylvester_determinant(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigRational::one();
    }
    let mut rows = vec![vec![BigRational::zero(); size]; size];
    for i in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    determinant(rows)
}

/// Gaussian elimination over the rationals.
pub fn determinant(mut rows: Vec<Vec<BigRational>>) -> BigRational {
    let size = rows.len();
    let mut det = BigRational::one();
    for col in 0..size {
        let Some(p) = (col..size).find(|&r| !rows[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            rows.swap(p, col);
            det = -det;
        }
        let pivot = rows[col][col].clone();
        det *= &pivot;
        for r in col + 1..size {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] / &pivot;
            let pivot_row = rows[col].clone();
            for (x, v) in rows[r].iter_mut().zip(&pivot_row).skip(col) {
                *x -= v * &f;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn linear_pair() {
        // (a x + b, c x + d) with a=2, b=3, c=5, d=7: a*d - b*c = -1
        assert_eq!(sylvester_determinant(&q(&[3, 2]), &q(&[7, 5])), BigRational::from_integer((-1).into()));
    }

    #[test]
    fn three_by_three() {
        // x - 2 against x^2 - 1
        assert_eq!(sylvester_determinant(&q(&[-2, 1]), &q(&[-1, 0, 1])), BigRational::from_integer(3.into()));
    }
}
