use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaResult {
    /// PC1 score per row (skill).
    pub scores: Vec<f64>,
    /// PC1 loading per column (model).
    pub loadings: Vec<f64>,
    pub eigenvalue: f64,
    /// Share of total variance carried by PC1.
    pub explained: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    let d = (sxx * syy).sqrt();
    (d > 0.0).then(|| sxy / d)
}

/// First principal component of a skills x models score matrix, computed from
/// the column correlation matrix after standardizing columns with the sample
/// variance. The sign makes PC1 correlate non-negatively with the row mean of
/// the standardized columns.
pub fn pca_first_component(rows: &[Vec<f64>]) -> Result<PcaResult> {
    let n = rows.len();
    if n < 3 {
        return Err(Error::Pca(format!("need at least 3 skills, got {n}")));
    }
    let p = rows[0].len();
    if p < 2 {
        return Err(Error::Pca(format!("need at least 2 models, got {p}")));
    }
    if rows.iter().any(|r| r.len() != p) {
        return Err(Error::Pca("rows have different lengths".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Pca("matrix has missing or non-finite cells".into()));
    }
    let mut z = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    for j in 0..p {
        let col: Vec<f64> = z.column(j).iter().copied().collect();
        let m = mean(&col);
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
        if !(var > 0.0) {
            return Err(Error::Pca(format!("column {j} has zero variance")));
        }
        let sd = var.sqrt();
        z.column_mut(j).iter_mut().for_each(|v| *v = (*v - m) / sd);
    }
    let corr = z.transpose() * &z / (n - 1) as f64;
    let eig = SymmetricEigen::new(corr);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (l1, l2) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]]);
    if l1 - l2 <= 1e-10 * l1.max(1.0) {
        return Err(Error::Pca(format!(
            "leading eigenvalue {l1} is not separated from {l2}"
        )));
    }
    let v = eig.eigenvectors.column(order[0]).into_owned();
    let mut scores: Vec<f64> = (&z * &v).iter().copied().collect();
    let mut loadings: Vec<f64> = v.iter().copied().collect();
    let row_mean: Vec<f64> = (0..n).map(|i| z.row(i).mean()).collect();
    match correlation(&scores, &row_mean) {
        Some(r) if r.abs() > 1e-12 => {
            if r < 0.0 {
                scores.iter_mut().for_each(|s| *s = -*s);
                loadings.iter_mut().for_each(|s| *s = -*s);
            }
        }
        _ => {
            return Err(Error::Pca(
                "PC1 sign is indeterminate: no correlation with the row mean".into(),
            ))
        }
    }
    let explained = l1 / eig.eigenvalues.iter().sum::<f64>();
    Ok(PcaResult {
        scores,
        loadings,
        eigenvalue: l1,
        explained,
    })
}
