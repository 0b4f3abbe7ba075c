//! Dense least squares and numerical rank, on top of nalgebra's SVD.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative singular-value cutoff below which a fit is declared rank
/// deficient.
pub const RANK_DEFICIENCY_CUTOFF: f64 = 1e-12;

/// Solves `min |A c - y|` with each column normalised first so that the
/// condition check measures redundancy rather than units. Returns the
/// coefficients in the original column scaling.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = a.shape();
    if rows < cols {
        return Err(Error::InvalidParameter(alloc::format!(
            "underdetermined fit: {rows} equations for {cols} unknowns"
        )));
    }
    let mut scaled = a.clone();
    let mut norms = Vec::with_capacity(cols);
    for j in 0..cols {
        let n = scaled.column(j).norm();
        let n = if n > 0.0 { n } else { 1.0 };
        scaled.column_mut(j).scale_mut(1.0 / n);
        norms.push(n);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin / smax < RANK_DEFICIENCY_CUTOFF {
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        return Err(Error::RankDeficient { condition });
    }
    let sol = svd
        .solve(y, 0.0)
        .map_err(|_| Error::RankDeficient { condition: f64::INFINITY })?;
    Ok(DVector::from_iterator(cols, sol.iter().zip(&norms).map(|(c, n)| c / n)))
}

/// Complex least squares with complex unknowns, solved as the stacked real
/// system `[Re A, -Im A; Im A, Re A] [Re c; Im c] = [Re y; Im y]`.
pub fn least_squares_complex(a: &DMatrix<Complex64>, y: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let (rows, cols) = a.shape();
    let mut big = DMatrix::<f64>::zeros(2 * rows, 2 * cols);
    let mut rhs = DVector::<f64>::zeros(2 * rows);
    for r in 0..rows {
        for c in 0..cols {
            let v = a[(r, c)];
            big[(r, c)] = v.re;
            big[(r, cols + c)] = -v.im;
            big[(rows + r, c)] = v.im;
            big[(rows + r, cols + c)] = v.re;
        }
        rhs[r] = y[r].re;
        rhs[rows + r] = y[r].im;
    }
    let sol = least_squares(&big, &rhs)?;
    Ok(DVector::from_iterator(cols, (0..cols).map(|c| Complex64::new(sol[c], sol[cols + c]))))
}

/// Complex equations with real unknowns: each complex row contributes its
/// real and imaginary parts as two real rows.
pub fn least_squares_real_unknowns(a: &DMatrix<Complex64>, y: &DVector<Complex64>) -> Result<DVector<f64>> {
    let (rows, cols) = a.shape();
    let mut big = DMatrix::<f64>::zeros(2 * rows, cols);
    let mut rhs = DVector::<f64>::zeros(2 * rows);
    for r in 0..rows {
        for c in 0..cols {
            big[(r, c)] = a[(r, c)].re;
            big[(rows + r, c)] = a[(r, c)].im;
        }
        rhs[r] = y[r].re;
        rhs[rows + r] = y[r].im;
    }
    least_squares(&big, &rhs)
}

/// Number of singular values above `rel_threshold * sigma_max`.
pub fn numerical_rank(rows: &[Vec<f64>], rel_threshold: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_threshold * smax).count()
}
