use serde::{Deserialize, Serialize};

use crate::data::{Dataset, LabelKind};
use crate::error::{validation, Result};

/// Pearson correlation over the pairs where both values are present.
/// `None` with fewer than two joint observations or a constant side.
pub fn pearson(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = a.iter().zip(b).filter_map(|(x, y)| Some(((*x)?, (*y)?))).collect();
    pearson_pairs(&pairs)
}

pub fn pearson_pairs(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Symmetric label correlation matrix; absent entries are `None`, never 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrMatrix {
    pub labels: Vec<LabelKind>,
    pub material: Option<String>,
    pub values: Vec<Vec<Option<f64>>>,
    /// joint observation counts
    pub counts: Vec<Vec<usize>>,
}

pub fn pearson_matrix(ds: &Dataset, labels: &[LabelKind], material_filter: Option<&str>) -> Result<CorrMatrix> {
    if labels.is_empty() {
        return Err(validation!("no labels requested for the correlation matrix"));
    }
    let rows: Vec<_> = ds
        .iter_valid()
        .filter(|r| material_filter.is_none_or(|m| r.material == m))
        .collect();
    let cols: Vec<Vec<Option<f64>>> = labels.iter().map(|&k| rows.iter().map(|r| r.label(k)).collect()).collect();
    let m = labels.len();
    let mut values = vec![vec![None; m]; m];
    let mut counts = vec![vec![0; m]; m];
    for i in 0..m {
        for j in i..m {
            let n = cols[i].iter().zip(&cols[j]).filter(|(a, b)| a.is_some() && b.is_some()).count();
            let v = if i == j {
                pearson(&cols[i], &cols[j]).map(|_| 1.0)
            } else {
                pearson(&cols[i], &cols[j])
            };
            values[i][j] = v;
            values[j][i] = v;
            counts[i][j] = n;
            counts[j][i] = n;
        }
    }
    Ok(CorrMatrix { labels: labels.to_vec(), material: material_filter.map(str::to_string), values, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_negated_columns() {
        let a: Vec<Option<f64>> = [1.0, 2.0, 4.0, 3.0].iter().map(|&v| Some(v)).collect();
        let neg: Vec<Option<f64>> = a.iter().map(|v| v.map(|x| -x)).collect();
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &neg).unwrap() + 1.0).abs() < 1e-15);
        let sparse = vec![Some(1.0), None, None, None];
        assert_eq!(pearson(&a, &sparse), None);
    }
}
