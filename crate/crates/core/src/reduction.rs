//! Reduced coordinates for zero-mean grid functions.
//!
//! A zero-mean vector of length `n` is stored by its first `n - 1` entries;
//! the last entry is minus their sum. `R` expands reduced vectors, `L` (its
//! pseudo-inverse) subtracts the mean and drops the last entry. These helpers
//! apply both matrices without forming them, which the 1D and 2D operator
//! assembly relies on.

use nalgebra::DMatrix;

/// `R u`: append minus the sum of `u`.
pub fn expand(u: &[f64]) -> Vec<f64> {
    let mut full = Vec::with_capacity(u.len() + 1);
    full.extend_from_slice(u);
    full.push(-u.iter().sum::<f64>());
    full
}

/// `L v`: subtract the mean and drop the last component.
pub fn reduce(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    v[..n - 1].iter().map(|x| x - mean).collect()
}

/// `Rᵀ w`: each entry minus the last one.
pub fn expand_transpose(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let last = w[n - 1];
    w[..n - 1].iter().map(|x| x - last).collect()
}

/// Dense `R_n` of shape `n × (n-1)`.
pub fn r_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n - 1, |i, j| {
        if i == n - 1 {
            -1.0
        } else if i == j {
            1.0
        } else {
            0.0
        }
    })
}

/// Dense `L_n` of shape `(n-1) × n`.
pub fn l_matrix(n: usize) -> DMatrix<f64> {
    let nf = n as f64;
    DMatrix::from_fn(n - 1, n, |i, j| {
        if i == j {
            (nf - 1.0) / nf
        } else {
            -1.0 / nf
        }
    })
}

/// `Y R` for a matrix with `n` columns.
pub fn right_mul_r(y: &DMatrix<f64>) -> DMatrix<f64> {
    let n = y.ncols();
    let last = y.column(n - 1).clone_owned();
    let mut out = y.columns(0, n - 1).clone_owned();
    for mut col in out.column_iter_mut() {
        col -= &last;
    }
    out
}

/// `L Y` for a matrix with `n` rows.
pub fn left_mul_l(y: &DMatrix<f64>) -> DMatrix<f64> {
    let n = y.nrows();
    let mut out = y.rows(0, n - 1).clone_owned();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let mean = y.column(j).sum() / n as f64;
        col.add_scalar_mut(-mean);
    }
    out
}

/// `Rᵀ Y` for a matrix with `n` rows.
pub fn left_mul_rt(y: &DMatrix<f64>) -> DMatrix<f64> {
    let n = y.nrows();
    let mut out = y.rows(0, n - 1).clone_owned();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let last = y[(n - 1, j)];
        col.add_scalar_mut(-last);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn matrix_free_forms_match_dense() {
        let n = 6;
        let r = r_matrix(n);
        let l = l_matrix(n);
        let u: Vec<f64> = (0..n - 1).map(|i| (i as f64 * 0.7).sin()).collect();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 1.3).cos() + 2.0).collect();

        let ru = &r * DVector::from_column_slice(&u);
        assert_eq!(expand(&u), ru.as_slice());
        let lv = &l * DVector::from_column_slice(&v);
        for (a, b) in reduce(&v).iter().zip(lv.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        let rtv = r.transpose() * DVector::from_column_slice(&v);
        assert_eq!(expand_transpose(&v), rtv.as_slice());

        let y = DMatrix::from_fn(n, n, |i, j| (i * 7 + j * 3) as f64 % 5.0 - 2.0);
        assert!((right_mul_r(&y) - &y * &r).amax() < 1e-14);
        assert!((left_mul_l(&y) - &l * &y).amax() < 1e-14);
        assert!((left_mul_rt(&y) - r.transpose() * &y).amax() < 1e-14);
    }

    #[test]
    fn expansion_has_zero_sum() {
        let full = expand(&[1.0, 2.0]);
        assert_eq!(full, vec![1.0, 2.0, -3.0]);
        assert_eq!(full.iter().sum::<f64>(), 0.0);
    }
}
