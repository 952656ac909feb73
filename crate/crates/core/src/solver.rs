//! Minimum-norm least squares through a truncated SVD.

use std::time::{Duration, Instant};

use faer::{Mat, MatRef, Par};

use crate::error::{Result, RfmError};

#[derive(Debug, Clone, PartialEq)]
pub struct LstsqReport {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub sigma_max: f64,
    /// Smallest singular value kept by the truncation.
    pub sigma_min_retained: f64,
    /// `‖Ax - b‖₂`.
    pub residual_norm: f64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub sigma_max: f64,
    pub sigma_min_retained: f64,
    pub rank: usize,
}

/// `ε · max(N, M)`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

/// Applies `RFM_THREADS` to the dense kernels; unset or invalid leaves the
/// library default.
pub fn configure_threads_from_env() {
    if let Some(n) = std::env::var("RFM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        faer::set_global_parallelism(if n <= 1 { Par::Seq } else { Par::rayon(n) });
    }
}

fn check(a: MatRef<'_, f64>, b: Option<&[f64]>, rank_tol: Option<f64>) -> Result<f64> {
    let (n, m) = (a.nrows(), a.ncols());
    if n == 0 || m == 0 {
        return Err(RfmError::DimensionMismatch(format!("empty {n}x{m} system")));
    }
    if let Some(b) = b {
        if b.len() != n {
            return Err(RfmError::DimensionMismatch(format!("{} right-hand sides for {n} rows", b.len())));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(RfmError::NonFinite);
        }
    }
    for j in 0..m {
        if a.col(j).iter().any(|v| !v.is_finite()) {
            return Err(RfmError::NonFinite);
        }
    }
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(n, m));
    if !(tol > 0.0 && tol < 1.0) {
        return Err(RfmError::Config(format!("rank tolerance {tol}")));
    }
    Ok(tol)
}

fn retained(s: &[f64], tol: f64) -> usize {
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol * smax).count()
}

/// Least-squares minimizer of `‖Ax - b‖` with the smallest norm, ignoring
/// singular values below `rank_tol · σ_max`.
pub fn solve_min_norm(a: MatRef<'_, f64>, b: &[f64], rank_tol: Option<f64>) -> Result<LstsqReport> {
    let tol = check(a, Some(b), rank_tol)?;
    let start = Instant::now();
    let svd = a
        .thin_svd()
        .map_err(|e| RfmError::Config(format!("SVD did not converge: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    // singular values come sorted in decreasing order
    let rank = retained(&s, tol);
    let (u, v) = (svd.U(), svd.V());
    let bm = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let utb = u.get(.., ..rank).transpose() * &bm;
    let scaled = Mat::from_fn(rank, 1, |i, _| utb[(i, 0)] / s[i]);
    let x = v.get(.., ..rank) * &scaled;
    let coefficients: Vec<f64> = (0..a.ncols()).map(|j| x[(j, 0)]).collect();
    let r = a * &x - &bm;
    let residual_norm = r.norm_l2();
    if coefficients.iter().any(|v| !v.is_finite()) {
        return Err(RfmError::NonFinite);
    }
    Ok(LstsqReport {
        coefficients,
        rank,
        sigma_max: s.first().copied().unwrap_or(0.0),
        sigma_min_retained: if rank > 0 { s[rank - 1] } else { 0.0 },
        residual_norm,
        elapsed: start.elapsed(),
    })
}

/// Singular-value extremes and numerical rank at the solver tolerance.
pub fn condition_report(a: MatRef<'_, f64>, rank_tol: Option<f64>) -> Result<ConditionReport> {
    let tol = check(a, None, rank_tol)?;
    let mut s = a
        .singular_values()
        .map_err(|e| RfmError::Config(format!("SVD did not converge: {e:?}")))?;
    s.sort_by(|x, y| y.total_cmp(x));
    let rank = retained(&s, tol);
    Ok(ConditionReport {
        sigma_max: s[0],
        sigma_min_retained: if rank > 0 { s[rank - 1] } else { 0.0 },
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn identity_returns_rhs() {
        let a = Mat::<f64>::identity(4, 4);
        let b = [1.0, -2.0, 3.5, 0.25];
        let r = solve_min_norm(a.as_ref(), &b, None).unwrap();
        for (x, y) in r.coefficients.iter().zip(b) {
            assert!((x - y).abs() < 1e-15);
        }
        let c = condition_report(a.as_ref(), None).unwrap();
        assert_eq!((c.sigma_max, c.sigma_min_retained, c.rank), (1.0, 1.0, 4));
    }

    #[test]
    fn underdetermined_min_norm() {
        let r = solve_min_norm(mat(&[&[1.0, 1.0]]).as_ref(), &[2.0], None).unwrap();
        assert!((r.coefficients[0] - 1.0).abs() < 1e-14 && (r.coefficients[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_pseudoinverse() {
        // A⁺ = [[1/2, 1/2], [0, 0]] by hand
        let r = solve_min_norm(mat(&[&[1.0, 0.0], &[1.0, 0.0]]).as_ref(), &[1.0, 1.0], None).unwrap();
        assert!((r.coefficients[0] - 1.0).abs() < 1e-14 && r.coefficients[1].abs() < 1e-14);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn duplicated_column_loses_rank() {
        let a = mat(&[&[1.0, 2.0, 1.0], &[0.0, 1.0, 0.0], &[3.0, -1.0, 3.0], &[2.0, 0.5, 2.0]]);
        assert_eq!(condition_report(a.as_ref(), None).unwrap().rank, 2);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let a = mat(&[&[1.0, f64::NAN]]);
        assert!(matches!(solve_min_norm(a.as_ref(), &[1.0], None), Err(RfmError::NonFinite)));
        let b = mat(&[&[1.0, 1.0]]);
        assert!(matches!(solve_min_norm(b.as_ref(), &[f64::INFINITY], None), Err(RfmError::NonFinite)));
    }
}
