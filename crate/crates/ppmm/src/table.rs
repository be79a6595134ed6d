//! CSV ingestion and design encoding.
//!
//! Input contract: header row required, UTF-8, comma-delimited, RFC 4180
//! quoting. An empty cell or the literal `NA` (after trimming) denotes a
//! missing value. The outcome may be missing; covariates may not.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A parsed CSV: header names plus raw string cells, row major.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn {
                name: name.to_string(),
            })
    }

    /// 1-based file line of a data row (header is line 1).
    pub fn line_of_row(row: usize) -> usize {
        row + 2
    }
}

pub fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t == "NA"
}

/// Read a CSV file into a `RawTable`.
pub fn read_table(path: &Path) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.iter().map(|h| h.to_string()).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(|c| c.to_string()).collect());
    }
    Ok(RawTable { headers, rows })
}

/// Extract a numeric outcome column; missing cells become `None`.
pub fn outcome_column(table: &RawTable, name: &str) -> Result<Vec<Option<f64>>> {
    let idx = table.column_index(name)?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let cell = &row[idx];
            if is_missing(cell) {
                Ok(None)
            } else {
                cell.trim()
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| Error::NonNumericOutcome {
                        value: cell.clone(),
                        line: RawTable::line_of_row(i),
                    })
            }
        })
        .collect()
}

/// Sum of several numeric columns, missing if any item is missing.
pub fn outcome_sum(table: &RawTable, names: &[String]) -> Result<Vec<Option<f64>>> {
    let columns: Vec<Vec<Option<f64>>> = names
        .iter()
        .map(|n| outcome_column(table, n))
        .collect::<Result<_>>()?;
    Ok((0..table.rows.len())
        .map(|i| {
            columns
                .iter()
                .map(|c| c[i])
                .sum::<Option<f64>>()
        })
        .collect())
}

/// How a design column was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedColumn {
    /// Source CSV column.
    pub source: String,
    /// Human-readable label: the column name for numeric columns,
    /// `name=level` for categorical indicators.
    pub label: String,
}

/// Encoded design matrix over all rows, with column metadata and warnings
/// for dropped zero-variance columns.
#[derive(Debug, Clone)]
pub struct DesignInfo {
    pub matrix: DMatrix<f64>,
    pub columns: Vec<EncodedColumn>,
    pub warnings: Vec<String>,
}

/// Encode the named covariate columns into a numeric design matrix.
///
/// A column where every cell parses as a number is passed through unchanged
/// (unless listed in `force_categorical`); any other column is one-hot
/// encoded, dropping the first observed level. Constant columns are dropped
/// with a warning. Column order follows the input order; level order follows
/// first appearance.
pub fn encode_design(
    table: &RawTable,
    covariates: &[String],
    force_categorical: &[String],
) -> Result<DesignInfo> {
    if covariates.is_empty() {
        return Err(Error::NoCovariates);
    }
    let n = table.rows.len();
    if n == 0 {
        return Err(Error::EmptyColumn {
            column: covariates[0].clone(),
        });
    }

    let mut encoded: Vec<(EncodedColumn, Vec<f64>)> = Vec::new();
    let mut warnings = Vec::new();

    for name in covariates {
        let idx = table.column_index(name)?;
        let cells: Vec<&str> = table.rows.iter().map(|r| r[idx].as_str()).collect();
        if let Some(row) = cells.iter().position(|c| is_missing(c)) {
            return Err(Error::MissingCovariate {
                column: name.clone(),
                line: RawTable::line_of_row(row),
            });
        }

        let forced = force_categorical.iter().any(|c| c == name);
        let numeric: Option<Vec<f64>> = if forced {
            None
        } else {
            cells
                .iter()
                .map(|c| c.trim().parse::<f64>().ok())
                .collect()
        };

        match numeric {
            Some(values) => {
                let constant = values.windows(2).all(|w| w[0] == w[1]);
                if constant {
                    warnings.push(format!("dropped constant numeric column '{name}'"));
                    continue;
                }
                encoded.push((
                    EncodedColumn {
                        source: name.clone(),
                        label: name.clone(),
                    },
                    values,
                ));
            }
            None => {
                // levels in order of first appearance; reference level dropped
                let mut levels: Vec<&str> = Vec::new();
                for c in &cells {
                    let c = c.trim();
                    if !levels.contains(&c) {
                        levels.push(c);
                    }
                }
                if levels.len() < 2 {
                    warnings.push(format!(
                        "dropped single-level categorical column '{name}' (level '{}')",
                        levels.first().copied().unwrap_or("")
                    ));
                    continue;
                }
                for level in &levels[1..] {
                    let values: Vec<f64> = cells
                        .iter()
                        .map(|c| if c.trim() == *level { 1.0 } else { 0.0 })
                        .collect();
                    encoded.push((
                        EncodedColumn {
                            source: name.clone(),
                            label: format!("{name}={level}"),
                        },
                        values,
                    ));
                }
            }
        }
    }

    let p = encoded.len();
    let matrix = DMatrix::from_fn(n, p, |i, j| encoded[j].1[i]);
    Ok(DesignInfo {
        matrix,
        columns: encoded.into_iter().map(|(c, _)| c).collect(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(headers: &[&str], rows: &[&[&str]]) -> RawTable {
        RawTable {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| r.iter().map(|c| c.to_string()).collect())
                .collect(),
        }
    }

    #[test]
    fn categorical_column_drops_reference_level() {
        let t = table(
            &["g"],
            &[&["a"], &["b"], &["c"], &["b"]],
        );
        let d = encode_design(&t, &["g".to_string()], &[]).unwrap();
        assert_eq!(d.columns.len(), 2);
        assert_eq!(d.columns[0].label, "g=b");
        assert_eq!(d.columns[1].label, "g=c");
        assert_eq!(d.matrix[(1, 0)], 1.0);
        assert_eq!(d.matrix[(2, 1)], 1.0);
        assert_eq!(d.matrix[(0, 0)], 0.0);
    }

    #[test]
    fn numeric_column_passes_through() {
        let t = table(&["age"], &[&["31"], &["42.5"], &["18"]]);
        let d = encode_design(&t, &["age".to_string()], &[]).unwrap();
        assert_eq!(d.columns[0].label, "age");
        assert_eq!(d.matrix[(1, 0)], 42.5);
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn single_level_column_is_dropped_with_warning() {
        let t = table(&["g", "z"], &[&["a", "1"], &["a", "2"]]);
        let d = encode_design(&t, &["g".to_string(), "z".to_string()], &[]).unwrap();
        assert_eq!(d.columns.len(), 1);
        assert_eq!(d.columns[0].label, "z");
        assert_eq!(d.warnings.len(), 1);
        assert!(d.warnings[0].contains("single-level"));
    }

    #[test]
    fn constant_numeric_column_is_dropped_with_warning() {
        let t = table(&["c", "z"], &[&["7", "1"], &["7", "2"]]);
        let d = encode_design(&t, &["c".to_string(), "z".to_string()], &[]).unwrap();
        assert_eq!(d.columns.len(), 1);
        assert_eq!(d.warnings.len(), 1);
        assert!(d.warnings[0].contains("constant"));
    }

    #[test]
    fn forced_categorical_overrides_numeric_typing() {
        let t = table(&["code"], &[&["1"], &["2"], &["1"]]);
        let d = encode_design(&t, &["code".to_string()], &["code".to_string()]).unwrap();
        assert_eq!(d.columns[0].label, "code=2");
    }

    #[test]
    fn missing_covariate_reports_line() {
        let t = table(&["z"], &[&["1"], &["NA"], &["3"]]);
        let err = encode_design(&t, &["z".to_string()], &[]).unwrap_err();
        match err {
            Error::MissingCovariate { column, line } => {
                assert_eq!(column, "z");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_table_is_an_error() {
        let t = table(&["z"], &[]);
        assert!(matches!(
            encode_design(&t, &["z".to_string()], &[]),
            Err(Error::EmptyColumn { .. })
        ));
    }

    #[test]
    fn outcome_sum_propagates_missing() {
        let t = table(
            &["a", "b"],
            &[&["1", "2"], &["3", "NA"], &["4", "5"]],
        );
        let y = outcome_sum(&t, &["a".to_string(), "b".to_string()]).unwrap();
        assert_eq!(y, vec![Some(3.0), None, Some(9.0)]);
    }

    #[test]
    fn outcome_column_rejects_text() {
        let t = table(&["y"], &[&["1.5"], &["oops"]]);
        let err = outcome_column(&t, "y").unwrap_err();
        assert!(matches!(err, Error::NonNumericOutcome { line: 3, .. }));
    }
}
