//! CSV emission and summary statistics for campaign output.
//!
//! Every file starts with `#`-prefixed metadata lines carrying the
//! config hash and base seed, then one header row, then data rows.
//! Floats are written with the shortest round-trip representation, so a
//! rerun with the same config and seed is byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Quantile levels reported by the campaign summaries.
pub const STANDARD_QUANTILES: [f64; 9] = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99];

/// A CSV file under construction.
pub struct CsvReport {
    path: PathBuf,
    writer: BufWriter<File>,
}

impl CsvReport {
    /// Create the file, write metadata comments and the header row.
    /// `notes` carries extra `key=value` provenance lines, one per entry.
    pub fn create(
        dir: &Path,
        name: &str,
        campaign: &str,
        config_hash: &str,
        base_seed: u64,
        notes: &[String],
        header: &str,
    ) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut writer = BufWriter::new(File::create(&path)?);
        writeln!(writer, "# campaign={campaign}")?;
        writeln!(writer, "# config_hash={config_hash}")?;
        writeln!(writer, "# base_seed={base_seed}")?;
        for note in notes {
            writeln!(writer, "# {note}")?;
        }
        writeln!(writer, "{header}")?;
        Ok(CsvReport { path, writer })
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        writeln!(self.writer, "{}", fields.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

/// Render a float with full round-trip precision.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Nearest-rank quantile: the ceil(q*n)-th smallest value.
pub fn quantile_nearest_rank(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Sort a sample and return it with its quantile summary.
pub fn summarize(mut values: Vec<f64>) -> (Vec<f64>, Vec<(f64, f64)>) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in metrics"));
    let quantiles = STANDARD_QUANTILES
        .iter()
        .map(|&q| (q, quantile_nearest_rank(&values, q)))
        .collect();
    (values, quantiles)
}

/// Median by nearest rank.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in metrics"));
    quantile_nearest_rank(&sorted, 0.5)
}

/// Sample mean and the standard error of that mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Efficiency as a ratio of totals, delivered / transmissions, with a
/// delta-method standard error from the per-span transmission counts.
pub fn ratio_efficiency(delivered_per_span: f64, transmissions: &[f64]) -> (f64, f64) {
    let (mean_tx, se_tx) = mean_and_se(transmissions);
    let eff = delivered_per_span / mean_tx;
    let se = delivered_per_span * se_tx / (mean_tx * mean_tx);
    (eff, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_examples() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_nearest_rank(&v, 0.5), 3.0);
        assert_eq!(quantile_nearest_rank(&v, 0.01), 1.0);
        assert_eq!(quantile_nearest_rank(&v, 0.99), 5.0);
        assert_eq!(quantile_nearest_rank(&v, 0.75), 4.0);
        assert_eq!(median(&[2.0, 1.0]), 1.0);
    }

    #[test]
    fn mean_and_se_basics() {
        let (m, se) = mean_and_se(&[1.0, 1.0, 1.0]);
        assert_eq!(m, 1.0);
        assert_eq!(se, 0.0);
        let (m, se) = mean_and_se(&[0.0, 2.0]);
        assert_eq!(m, 1.0);
        assert!((se - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_efficiency_error_free() {
        let (eff, se) = ratio_efficiency(4.0, &[4.0, 4.0, 4.0, 4.0]);
        assert_eq!(eff, 1.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut report =
            CsvReport::create(dir.path(), "t.csv", "test", "cafe", 7, &[], "a,b").unwrap();
        report.row(&["1".into(), fmt_f64(0.5)]).unwrap();
        let path = report.finish().unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(
            text,
            "# campaign=test\n# config_hash=cafe\n# base_seed=7\na,b\n1,0.5\n"
        );
    }
}
