//! Pairwise Pearson correlation across feature columns, tolerant of
//! missing cells: each pair of columns is correlated over the rows where
//! both are present.

use crate::features::FeatureTable;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    /// Row-major, symmetric, unit diagonal.
    pub values: Vec<Vec<f64>>,
    /// Columns with no variance across their present cells; their
    /// correlation against everything else is reported as zero.
    pub zero_variance: Vec<String>,
}

/// Computes the matrix. A pair with fewer than two jointly present rows,
/// or with no variance within the jointly present rows, correlates at
/// zero; the diagonal is one regardless.
pub fn correlation_matrix(table: &FeatureTable) -> CorrelationMatrix {
    let width = table.width();
    let rows: Vec<&[Option<f64>]> = table.rows().map(|(_, row)| row).collect();
    let columns: Vec<String> = table.schema.columns.iter().map(|c| c.name.clone()).collect();

    let zero_variance: Vec<String> = (0..width)
        .filter(|&i| {
            let present: Vec<f64> = rows.iter().filter_map(|r| r[i]).collect();
            let Some(&first) = present.first() else { return true };
            present.iter().all(|&v| v == first)
        })
        .map(|i| columns[i].clone())
        .collect();

    let mut values = vec![vec![0.0; width]; width];
    for i in 0..width {
        values[i][i] = 1.0;
        for j in (i + 1)..width {
            let r = pairwise_pearson(&rows, i, j);
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrelationMatrix {
        columns,
        values,
        zero_variance,
    }
}

fn pairwise_pearson(rows: &[&[Option<f64>]], i: usize, j: usize) -> f64 {
    let pairs: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r[i]?, r[j]?)))
        .collect();
    if pairs.len() < 2 {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let (mx, my) = (
        pairs.iter().map(|p| p.0).sum::<f64>() / n,
        pairs.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pairs {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

impl CorrelationMatrix {
    /// Column ordering from average-linkage agglomerative clustering on the
    /// distance `1 - |r|`: columns that move together end up adjacent,
    /// which makes redundancy visible when the matrix is rendered.
    /// Ties break toward lower indices, so the order is deterministic.
    pub fn cluster_order(&self) -> Vec<usize> {
        let n = self.columns.len();
        if n == 0 {
            return Vec::new();
        }
        // distance between clusters = mean pairwise member distance
        let dist = |a: usize, b: usize| 1.0 - self.values[a][b].abs();
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while clusters.len() > 1 {
            let mut best: Option<(f64, usize, usize)> = None;
            for a in 0..clusters.len() {
                for b in (a + 1)..clusters.len() {
                    let mut total = 0.0;
                    for &x in &clusters[a] {
                        for &y in &clusters[b] {
                            total += dist(x, y);
                        }
                    }
                    let mean = total / (clusters[a].len() * clusters[b].len()) as f64;
                    if best.map_or(true, |(d, _, _)| mean < d) {
                        best = Some((mean, a, b));
                    }
                }
            }
            let (_, a, b) = best.expect("at least two clusters");
            let merged = clusters.remove(b);
            clusters[a].extend(merged);
        }
        clusters.pop().expect("one cluster remains")
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["column".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).expect("writing to Vec cannot fail");
        for (i, name) in self.columns.iter().enumerate() {
            let mut record = vec![name.clone()];
            record.extend(self.values[i].iter().map(|v| format!("{v}")));
            w.write_record(&record).expect("writing to Vec cannot fail");
        }
        w.into_inner().expect("writing to Vec cannot fail")
    }
}
