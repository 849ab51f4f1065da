use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;
use serde::Serialize;

use super::BenchmarkReport;
use crate::error::{param_err, IdError, Result};
use crate::geometry::symmetric_eigen;
use crate::math::{mean, median, std_pop};

/// Z-score consensus over the method columns that have any valid value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Consensus {
    /// Indices (into the input columns) of the columns kept.
    pub columns: Vec<usize>,
    /// Kept columns after median imputation, datasets × kept columns.
    pub imputed: Vec<Vec<f64>>,
    pub zscores: Vec<Vec<f64>>,
    /// Row means of `zscores`.
    pub consensus: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Imputes invalid cells with the column median of valid values,
/// standardizes columns (population std, `z = 0` for constant columns) and
/// averages each row. Columns without any valid value are dropped.
pub fn zscore_consensus(
    values: &[Vec<f64>],
    valid: &[Vec<bool>],
    names: &[String],
) -> Result<Consensus> {
    let n = values.len();
    if n < 2 {
        return param_err("consensus needs at least two datasets");
    }
    let m = names.len();
    if values.iter().any(|r| r.len() != m) || valid.iter().any(|r| r.len() != m) {
        return param_err("matrix shape does not match the method list");
    }
    let mut columns = Vec::new();
    let mut warnings = Vec::new();
    let mut imputed_cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..m {
        let ok: Vec<f64> = (0..n)
            .filter(|&i| valid[i][j])
            .map(|i| values[i][j])
            .collect();
        if ok.is_empty() {
            warnings.push(alloc::format!(
                "{}: no valid estimate, column dropped",
                names[j]
            ));
            continue;
        }
        let fill = median(&ok);
        columns.push(j);
        imputed_cols.push(
            (0..n)
                .map(|i| if valid[i][j] { values[i][j] } else { fill })
                .collect(),
        );
    }
    if columns.is_empty() {
        return Err(IdError::DegenerateData(
            "no method has a valid estimate".into(),
        ));
    }
    let z_cols: Vec<Vec<f64>> = imputed_cols
        .iter()
        .map(|c| {
            let (mu, sd) = (mean(c), std_pop(c));
            c.iter()
                .map(|x| if sd > 0.0 { (x - mu) / sd } else { 0.0 })
                .collect()
        })
        .collect();
    let transpose = |cols: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect()
    };
    let zscores = transpose(&z_cols);
    let consensus = zscores.iter().map(|r| mean(r)).collect();
    Ok(Consensus {
        columns,
        imputed: transpose(&imputed_cols),
        zscores,
        consensus,
        warnings,
    })
}

/// Adds the z-score consensus to a report.
pub fn consensus_id(report: &mut BenchmarkReport) -> Result<()> {
    let c = zscore_consensus(&report.id_matrix, &report.valid, &report.methods)?;
    report.warnings.extend(c.warnings.iter().cloned());
    report.consensus = Some(c);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlation {
    pub methods: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    /// Methods whose column has zero variance; their off-diagonal entries are 0.
    pub zero_variance: Vec<String>,
}

/// Pearson correlation between the columns of a datasets × methods matrix.
pub fn pearson_matrix(columns_of: &[Vec<f64>], names: &[String]) -> Result<Correlation> {
    if columns_of.len() < 3 {
        return param_err("correlation needs at least three datasets");
    }
    let m = names.len();
    let n = columns_of.len();
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|j| columns_of.iter().map(|r| r[j]).collect())
        .collect();
    let centred: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let mu = mean(c);
            c.iter().map(|x| x - mu).collect()
        })
        .collect();
    let norms: Vec<f64> = centred
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    // Constant up to rounding counts as zero variance.
    let flat: Vec<bool> = norms
        .iter()
        .zip(&cols)
        .map(|(&nm, c)| {
            let scale = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            !(nm > 1e-12 * scale * (n as f64).sqrt())
        })
        .collect();
    let mut matrix = alloc::vec![alloc::vec![0.0; m]; m];
    for a in 0..m {
        matrix[a][a] = 1.0;
        for b in (a + 1)..m {
            if flat[a] || flat[b] {
                continue;
            }
            let dot: f64 = centred[a].iter().zip(&centred[b]).map(|(x, y)| x * y).sum();
            let r = (dot / (norms[a] * norms[b])).clamp(-1.0, 1.0);
            matrix[a][b] = r;
            matrix[b][a] = r;
        }
    }
    let zero_variance = (0..m)
        .filter(|&j| flat[j])
        .map(|j| names[j].clone())
        .collect();
    Ok(Correlation {
        methods: names.to_vec(),
        matrix,
        zero_variance,
    })
}

/// Correlation between estimators over datasets, after imputation. Runs the
/// consensus first if needed.
pub fn estimator_correlation(report: &mut BenchmarkReport) -> Result<Correlation> {
    if report.consensus.is_none() {
        consensus_id(report)?;
    }
    let c = report.consensus.as_ref().unwrap();
    let names: Vec<String> = c
        .columns
        .iter()
        .map(|&j| report.methods[j].clone())
        .collect();
    let corr = pearson_matrix(&c.imputed, &names)?;
    report.correlation = Some(corr.clone());
    Ok(corr)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePca {
    pub methods: Vec<String>,
    pub explained_variance_ratio: Vec<f64>,
    /// `loadings[c][j]`: weight of method `j` on component `c`.
    pub loadings: Vec<Vec<f64>>,
}

/// PCA of a datasets × methods z-score matrix. Each component's sign makes
/// the `lpca_FO` loading positive (or the largest loading, if `lpca_FO` is
/// absent or zero).
pub fn profile_pca(zscores: &[Vec<f64>], names: &[String]) -> Result<ProfilePca> {
    let n = zscores.len();
    let m = names.len();
    if n < 3 || m < 2 {
        return param_err("profile PCA needs at least three datasets and two methods");
    }
    let means: Vec<f64> = (0..m)
        .map(|j| zscores.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let mut cov = alloc::vec![0.0; m * m];
    for r in zscores {
        for a in 0..m {
            for b in a..m {
                cov[a * m + b] += (r[a] - means[a]) * (r[b] - means[b]);
            }
        }
    }
    for a in 0..m {
        for b in a..m {
            cov[a * m + b] /= (n - 1) as f64;
            cov[b * m + a] = cov[a * m + b];
        }
    }
    let eig = symmetric_eigen(&cov, m);
    let vals: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = vals.iter().sum();
    if !(total > 0.0) {
        return Err(IdError::DegenerateSpectrum);
    }
    let anchor = names.iter().position(|s| s == "lpca_FO");
    let loadings = (0..m)
        .map(|c| {
            let mut v = eig.vector(c);
            let pivot = match anchor {
                Some(a) if v[a].abs() > 1e-12 => a,
                _ => (0..m)
                    .max_by(|&x, &y| v[x].abs().total_cmp(&v[y].abs()))
                    .unwrap(),
            };
            if v[pivot] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(ProfilePca {
        methods: names.to_vec(),
        explained_variance_ratio: vals.iter().map(|v| v / total).collect(),
        loadings,
    })
}
