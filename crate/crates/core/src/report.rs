//! Paired base/boosted comparison tables and their CSV renderings.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::evaluation::{compare, error_enhancement, rank_and_mean_rank, FoldSummary, Metric, RankTable, Wtl};

/// One algorithm's metric values in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRow {
    pub name: String,
    pub means: [f64; 6],
    /// Full fold statistics when available (absent for published means).
    pub summaries: Option<[FoldSummary; 6]>,
}

/// Rows alternate base algorithm and its boosted counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    rows: Vec<AlgorithmRow>,
}

impl Comparison {
    pub fn new(rows: Vec<AlgorithmRow>) -> Result<Self> {
        if rows.is_empty() || rows.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "expected base/boosted row pairs, got {} rows",
                rows.len()
            )));
        }
        if rows.iter().any(|r| r.means.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidInput("metric means must be finite".into()));
        }
        Ok(Self { rows })
    }

    pub fn from_means(names: &[&str], means: &[[f64; 6]]) -> Result<Self> {
        if names.len() != means.len() {
            return Err(Error::Shape { expected: names.len(), actual: means.len() });
        }
        Self::new(
            names
                .iter()
                .zip(means)
                .map(|(n, m)| AlgorithmRow { name: n.to_string(), means: *m, summaries: None })
                .collect(),
        )
    }

    pub fn rows(&self) -> &[AlgorithmRow] {
        &self.rows
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&AlgorithmRow, &AlgorithmRow)> {
        self.rows.chunks(2).map(|p| (&p[0], &p[1]))
    }

    pub fn column(&self, metric: Metric) -> Vec<f64> {
        self.rows.iter().map(|r| r.means[metric.index()]).collect()
    }

    pub fn wtl(&self, metric: Metric) -> Wtl {
        let i = metric.index();
        self.pairs().fold(Wtl::default(), |acc, (b, c)| {
            let r = compare(b.means[i], c.means[i]);
            Wtl { wins: acc.wins + r.wins, ties: acc.ties + r.ties, losses: acc.losses + r.losses }
        })
    }

    /// Ranks over all rows, per metric.
    pub fn ranks(&self) -> RankTable {
        let table: Vec<Vec<f64>> = self.rows.iter().map(|r| r.means.to_vec()).collect();
        rank_and_mean_rank(&table).expect("comparison rows are nonempty and rectangular")
    }

    /// Error enhancement per pair and metric; `None` where the base is 100%.
    pub fn error_enhancements(&self) -> Vec<[Option<f64>; 6]> {
        self.pairs()
            .map(|(b, c)| std::array::from_fn(|m| error_enhancement(b.means[m], c.means[m]).ok()))
            .collect()
    }

    /// Table in the per-metric layout: one row per algorithm plus a total
    /// win/tie/loss row. Boosted rows carry their own outcome.
    pub fn metric_table_csv(&self, metric: Metric) -> String {
        let m = metric.index();
        let ranks = self.ranks();
        let mut out = String::from("algorithm,mean,std,min,max,median,rank,wtl\n");
        for (i, row) in self.rows.iter().enumerate() {
            let stats = match &row.summaries {
                Some(s) => {
                    let s = &s[m];
                    format!("{},{},{},{}", num(s.std), num(s.min), num(s.max), num(s.median))
                }
                None => ",,,".to_string(),
            };
            let outcome = if i % 2 == 1 {
                compare(self.rows[i - 1].means[m], row.means[m]).to_string()
            } else {
                String::new()
            };
            let _ = writeln!(out, "{},{},{},{},{}", row.name, num(row.means[m]), stats, num(ranks.ranks[i][m]), outcome);
        }
        let _ = writeln!(out, "Total,,,,,,,{}", self.wtl(metric));
        out
    }

    /// Error enhancement of every boosted row over its base, in percent.
    pub fn ee_table_csv(&self) -> String {
        let mut out = header("comparison", "");
        for ((b, c), ee) in self.pairs().zip(self.error_enhancements()) {
            let cells: Vec<String> = ee.iter().map(|v| v.map(num).unwrap_or_else(|| "NA".into())).collect();
            let _ = writeln!(out, "{} vs {},{}", c.name, b.name, cells.join(","));
        }
        out
    }

    /// Per-metric ranks (among all rows) of the boosted rows and their mean rank.
    pub fn mean_rank_csv(&self) -> String {
        let ranks = self.ranks();
        let mut out = header("algorithm", ",mean_rank");
        for i in (1..self.rows.len()).step_by(2) {
            let cells: Vec<String> = ranks.ranks[i].iter().map(|v| num(*v)).collect();
            let _ = writeln!(out, "{},{},{}", self.rows[i].name, cells.join(","), num(ranks.mean_rank[i]));
        }
        out
    }
}

fn header(first: &str, last: &str) -> String {
    let names: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
    format!("{first},{}{last}\n", names.join(","))
}

/// Fixed four-decimal rendering used by every report.
pub fn num(v: f64) -> String {
    format!("{v:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::published;

    fn published() -> Comparison {
        Comparison::from_means(&published::ALGORITHMS, &published::MEANS).unwrap()
    }

    #[test]
    fn published_wtl_totals() {
        let c = published();
        for (m, &(w, t, l)) in Metric::ALL.iter().zip(&published::WTL) {
            assert_eq!(c.wtl(*m), Wtl { wins: w, ties: t, losses: l }, "{m}");
        }
    }

    #[test]
    fn published_ranks_match_except_unaveraged_tie() {
        let r = published().ranks();
        for (row, printed) in r.ranks.iter().zip(&published::RANKS) {
            for m in 0..5 {
                assert_eq!(row[m], printed[m]);
            }
        }
        // the 64.97 tie is printed as 7/7; averaging gives 7.5/7.5
        assert_eq!(r.ranks[0][5], 7.5);
        assert_eq!(r.ranks[7][5], 7.5);
    }

    #[test]
    fn metric_table_shape() {
        let csv = published().metric_table_csv(Metric::Accuracy);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 14);
        assert_eq!(lines[1], "RP,70.4600,,,,,9.0000,");
        assert_eq!(lines[2], "CODEL-RP,71.1300,,,,,6.0000,1/0/0");
        assert_eq!(lines[13], "Total,,,,,,,6/0/0");
    }

    #[test]
    fn ee_table_reports_undefined_base() {
        let c = Comparison::from_means(&["A", "B"], &[[100.0, 50.0, 50.0, 50.0, 50.0, 50.0], [90.0; 6]]).unwrap();
        let csv = c.ee_table_csv();
        assert!(csv.lines().nth(1).unwrap().starts_with("B vs A,NA,80.0000"));
    }

    #[test]
    fn rejects_odd_rows() {
        assert!(Comparison::from_means(&["A"], &[[1.0; 6]]).is_err());
    }
}
