//! Dense matrices of rational functions: products, determinant, adjugate inverse.

use crate::error::{Error, Result};
use crate::rational::RationalFunction;

pub type Matrix = Vec<Vec<RationalFunction>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![RationalFunction::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = RationalFunction::one();
    }
    m
}

pub fn transpose(a: &Matrix) -> Matrix {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| (0..rows).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = RationalFunction::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = &acc + &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn neg(a: &Matrix) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

fn minor(a: &Matrix, skip_row: usize, skip_col: usize) -> Matrix {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != skip_col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det(a: &Matrix) -> RationalFunction {
    match a.len() {
        0 => RationalFunction::one(),
        1 => a[0][0].clone(),
        2 => &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]),
        n => {
            let mut acc = RationalFunction::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let t = &a[0][j] * &det(&minor(a, 0, j));
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Inverse via the adjugate; fails when the determinant vanishes identically.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("matrix is not square".into()));
    }
    let d = det(a);
    let dinv = d.inv().ok_or_else(|| Error::Invalid("singular matrix".into()))?;
    let mut out = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let c = det(&minor(a, j, i));
            let c = if (i + j) % 2 == 0 { c } else { -c };
            out[i][j] = &c * &dinv;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_scalar;

    fn m(rows: &[&[&str]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, None).unwrap()).collect()).collect()
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = m(&[&["1", "x1", "0"], &["x2", "2", "1"], &["0", "x1^2", "3"]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(matmul(&a, &inv), identity(3));
        assert_eq!(matmul(&inv, &a), identity(3));
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = m(&[&["x1", "x2"], &["2*x1", "2*x2"]]);
        assert!(inverse(&a).is_err());
    }
}
