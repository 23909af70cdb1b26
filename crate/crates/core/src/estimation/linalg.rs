use nalgebra::{DMatrix, DVector};

pub(crate) fn mean_cov(samples: &[Vec<f64>]) -> (DVector<f64>, DMatrix<f64>) {
    let p = samples.first().map_or(0, Vec::len);
    let n = samples.len() as f64;
    let mut mean = DVector::zeros(p);
    for s in samples {
        mean += DVector::from_column_slice(s);
    }
    mean /= n;
    let mut cov = DMatrix::zeros(p, p);
    for s in samples {
        let d = DVector::from_column_slice(s) - &mean;
        cov += &d * d.transpose();
    }
    cov /= (n - 1.0).max(1.0);
    (mean, cov)
}

/// Least-norm solution of `a x = b` through the SVD, discarding singular
/// values below `rel_eps · σ_max`. Returns `None` for an all-zero matrix.
pub(crate) fn pseudo_solve(a: &DMatrix<f64>, b: &DVector<f64>, rel_eps: f64) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) || !smax.is_finite() {
        return None;
    }
    svd.solve(b, rel_eps * smax).ok()
}

/// Smallest singular value relative to the largest.
pub(crate) fn condition_ratio(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let smax = sv.max();
    if smax > 0.0 {
        sv.min() / smax
    } else {
        0.0
    }
}

pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + values.map(|v| (v - m).exp()).sum::<f64>().ln()
}

pub(crate) fn log_mean_exp(values: &[f64]) -> f64 {
    log_sum_exp(values.iter().copied()) - (values.len() as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_mean_exp_of_constants() {
        assert!((log_mean_exp(&[2.0, 2.0, 2.0]) - 2.0).abs() < 1e-15);
        let v = [0.0, 1000.0];
        assert!((log_mean_exp(&v) - (1000.0 - 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn pseudo_solve_handles_rank_deficiency() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_column_slice(&[2.0, 2.0]);
        let x = pseudo_solve(&a, &b, 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!(condition_ratio(&a) < 1e-12);
    }
}
