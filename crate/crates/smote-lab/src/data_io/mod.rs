//! Dataset ingestion, normalization, and deterministic result emission.
//!
//! Readers accept delimited text with a header row, a configurable
//! delimiter, decimal-comma numbers, and an explicit missing-value
//! sentinel; every dropped row is counted, never silent. Writers (CSV and
//! SVG) produce byte-identical output for identical inputs so runs can be
//! diffed and golden-tested.

mod csv_out;
mod plot;

pub use csv_out::{format_sig, write_spacing_csv, write_sweep_csv, write_tailprob_csv};
pub use plot::{render_line_plot, PlotSeries, PlotSpec};

use crate::error::{Error, Result};
use crate::sampling::Sample;
use std::fs::File;
use std::path::PathBuf;

/// How a column is addressed in a delimited file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Name(name) => f.write_str(name),
            ColumnSelector::Index(idx) => write!(f, "#{idx}"),
        }
    }
}

/// A single numeric column in a delimited text file, plus the cleaning
/// rules to apply while reading it.
#[derive(Debug, Clone)]
pub struct DatasetRef {
    pub path: PathBuf,
    pub column: ColumnSelector,
    /// Rows whose value equals this sentinel are dropped (and counted).
    pub missing_sentinel: Option<f64>,
    pub delimiter: u8,
    /// Parse `2,6` as `2.6` (the UCI export convention).
    pub decimal_comma: bool,
}

impl DatasetRef {
    pub fn new(path: impl Into<PathBuf>, column: ColumnSelector) -> Self {
        DatasetRef {
            path: path.into(),
            column,
            missing_sentinel: None,
            delimiter: b',',
            decimal_comma: false,
        }
    }
}

/// A loaded column together with its cleaning report.
#[derive(Debug, Clone)]
pub struct LoadedColumn {
    pub sample: Sample,
    /// Rows dropped because the value equalled the missing sentinel.
    pub dropped_sentinel: usize,
    /// Rows dropped because the parsed value was not finite.
    pub dropped_non_finite: usize,
}

impl LoadedColumn {
    pub fn dropped(&self) -> usize {
        self.dropped_sentinel + self.dropped_non_finite
    }
}

/// Reads one numeric column. The file must have a header row; names are
/// matched against it, and index selectors address its fields. Only
/// finite, non-sentinel values are returned.
pub fn load_column(dataset: &DatasetRef) -> Result<LoadedColumn> {
    let file = File::open(&dataset.path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound {
                path: dataset.path.display().to_string(),
            }
        } else {
            Error::io(dataset.path.display().to_string(), e)
        }
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(dataset.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| Error::ParseError {
            row: 1,
            reason: e.to_string(),
        })?
        .clone();
    let col_index = match &dataset.column {
        ColumnSelector::Name(name) => headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::ColumnNotFound {
                column: name.clone(),
                available: headers.iter().map(|h| h.trim().to_string()).collect(),
            })?,
        ColumnSelector::Index(idx) => {
            if *idx >= headers.len() {
                return Err(Error::ColumnNotFound {
                    column: format!("#{idx}"),
                    available: headers.iter().map(|h| h.trim().to_string()).collect(),
                });
            }
            *idx
        }
    };

    let mut values = Vec::new();
    let mut dropped_sentinel = 0usize;
    let mut dropped_non_finite = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::ParseError {
            row: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let raw = record.get(col_index).ok_or_else(|| Error::ParseError {
            row,
            reason: format!(
                "row has {} field(s), column {} is missing",
                record.len(),
                dataset.column
            ),
        })?;
        let mut text = raw.trim().to_string();
        if dataset.decimal_comma {
            text = text.replace(',', ".");
        }
        if text.is_empty() {
            return Err(Error::ParseError {
                row,
                reason: format!("empty value in column {}", dataset.column),
            });
        }
        let value: f64 = text.parse().map_err(|_| Error::ParseError {
            row,
            reason: format!("cannot parse {raw:?} in column {} as a number", dataset.column),
        })?;
        if dataset.missing_sentinel == Some(value) {
            dropped_sentinel += 1;
            continue;
        }
        if !value.is_finite() {
            dropped_non_finite += 1;
            continue;
        }
        values.push(value);
    }

    if values.is_empty() {
        return Err(Error::EmptyAfterCleaning {
            dropped: dropped_sentinel + dropped_non_finite,
        });
    }
    Ok(LoadedColumn {
        sample: Sample::new(values, 1).expect("only finite values collected"),
        dropped_sentinel,
        dropped_non_finite,
    })
}

/// Affinely maps a 1-D sample onto [0, 1] and returns the original range
/// so the map can be inverted and recorded.
pub fn normalize_minmax(sample: &Sample) -> Result<(Sample, f64, f64)> {
    let values = sample.values_1d()?;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Err(Error::DegenerateRange { value: min });
    }
    let scale = 1.0 / (max - min);
    let normalized: Vec<f64> = values.iter().map(|&x| (x - min) * scale).collect();
    Ok((Sample::new(normalized, 1)?, min, max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn sentinel_rows_are_dropped_and_counted() {
        let f = write_temp("time,co\n1,1.0\n2,-200\n3,2.0\n");
        let mut d = DatasetRef::new(f.path(), ColumnSelector::Name("co".into()));
        d.missing_sentinel = Some(-200.0);
        let loaded = load_column(&d).unwrap();
        assert_eq!(loaded.sample.values_1d().unwrap(), &[1.0, 2.0]);
        assert_eq!(loaded.dropped_sentinel, 1);
        assert_eq!(loaded.dropped(), 1);
    }

    #[test]
    fn missing_column_lists_what_is_available() {
        let f = write_temp("a,b\n1,2\n");
        let d = DatasetRef::new(f.path(), ColumnSelector::Name("c".into()));
        match load_column(&d) {
            Err(Error::ColumnNotFound { column, available }) => {
                assert_eq!(column, "c");
                assert_eq!(available, vec!["a".to_string(), "b".to_string()]);
            }
            other => panic!("expected ColumnNotFound, got {other:?}"),
        }
    }

    #[test]
    fn index_selector_addresses_header_fields() {
        let f = write_temp("a,b\n1,2\n3,4\n");
        let d = DatasetRef::new(f.path(), ColumnSelector::Index(1));
        let loaded = load_column(&d).unwrap();
        assert_eq!(loaded.sample.values_1d().unwrap(), &[2.0, 4.0]);

        let d = DatasetRef::new(f.path(), ColumnSelector::Index(5));
        assert!(matches!(load_column(&d), Err(Error::ColumnNotFound { .. })));
    }

    #[test]
    fn semicolon_and_decimal_comma_parse_like_the_uci_export() {
        // trailing ;; produces empty surplus columns, which are ignored
        let f = write_temp(
            "Date;Time;CO(GT);PT08.S1(CO);;\n10/03/2004;18.00.00;2,6;1360;;\n10/03/2004;19.00.00;-200;1292;;\n10/03/2004;20.00.00;2,2;1402;;\n",
        );
        let mut d = DatasetRef::new(f.path(), ColumnSelector::Name("CO(GT)".into()));
        d.delimiter = b';';
        d.decimal_comma = true;
        d.missing_sentinel = Some(-200.0);
        let loaded = load_column(&d).unwrap();
        assert_eq!(loaded.sample.values_1d().unwrap(), &[2.6, 2.2]);
        assert_eq!(loaded.dropped_sentinel, 1);
    }

    #[test]
    fn parse_failures_name_the_row() {
        let f = write_temp("a\n1.0\nnot-a-number\n");
        let d = DatasetRef::new(f.path(), ColumnSelector::Name("a".into()));
        match load_column(&d) {
            Err(Error::ParseError { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected ParseError, got {other:?}"),
        }

        let f = write_temp("a,b\n1.0,\n");
        let d = DatasetRef::new(f.path(), ColumnSelector::Name("b".into()));
        assert!(matches!(load_column(&d), Err(Error::ParseError { row: 2, .. })));
    }

    #[test]
    fn non_finite_values_never_escape() {
        let f = write_temp("a\n1.0\nNaN\ninf\n2.0\n");
        let d = DatasetRef::new(f.path(), ColumnSelector::Name("a".into()));
        let loaded = load_column(&d).unwrap();
        assert_eq!(loaded.sample.values_1d().unwrap(), &[1.0, 2.0]);
        assert_eq!(loaded.dropped_non_finite, 2);
    }

    #[test]
    fn fully_cleaned_file_is_an_error() {
        let f = write_temp("a\n-200\n-200\n");
        let mut d = DatasetRef::new(f.path(), ColumnSelector::Name("a".into()));
        d.missing_sentinel = Some(-200.0);
        assert!(matches!(
            load_column(&d),
            Err(Error::EmptyAfterCleaning { dropped: 2 })
        ));
    }

    #[test]
    fn missing_file_is_reported_as_such() {
        let d = DatasetRef::new("/nonexistent/file.csv", ColumnSelector::Index(0));
        assert!(matches!(load_column(&d), Err(Error::FileNotFound { .. })));
    }

    fn fixture(name: &str) -> PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures")
            .join(name)
    }

    #[test]
    fn housing_fixture_loads_cleanly() {
        let d = DatasetRef::new(
            fixture("housing_fixture.csv"),
            ColumnSelector::Name("median_income".into()),
        );
        let loaded = load_column(&d).unwrap();
        assert_eq!(loaded.sample.len(), 600);
        assert_eq!(loaded.dropped(), 0);
        let values = loaded.sample.values_1d().unwrap();
        assert!(values.iter().all(|&x| x > 0.0 && x < 16.0));
    }

    #[test]
    fn air_quality_fixture_needs_the_full_cleaning_path() {
        let mut d = DatasetRef::new(
            fixture("air_quality_fixture.csv"),
            ColumnSelector::Name("CO(GT)".into()),
        );
        d.delimiter = b';';
        d.decimal_comma = true;
        d.missing_sentinel = Some(-200.0);
        let loaded = load_column(&d).unwrap();
        assert!(loaded.dropped_sentinel > 0);
        assert_eq!(loaded.sample.len() + loaded.dropped(), 72);
        let values = loaded.sample.values_1d().unwrap();
        assert!(values.iter().all(|&x| x > 0.0 && x < 10.0));
        // decimal commas parsed: at least one value has a fractional part
        assert!(values.iter().any(|&x| x.fract() != 0.0));
    }

    #[test]
    fn normalize_maps_onto_the_unit_interval() {
        let s = Sample::from_values(&[2.0, 4.0, 6.0]).unwrap();
        let (norm, min, max) = normalize_minmax(&s).unwrap();
        assert_eq!(norm.values_1d().unwrap(), &[0.0, 0.5, 1.0]);
        assert_eq!((min, max), (2.0, 6.0));
    }

    #[test]
    fn normalize_rejects_constant_samples() {
        let s = Sample::from_values(&[5.0, 5.0]).unwrap();
        assert!(matches!(
            normalize_minmax(&s),
            Err(Error::DegenerateRange { value }) if value == 5.0
        ));
    }

    #[test]
    fn normalization_round_trips_through_the_affine_map() {
        let s = Sample::from_values(&[3.0, -1.5, 0.25, 7.75, 2.0]).unwrap();
        let (norm, min, max) = normalize_minmax(&s).unwrap();
        let values = norm.values_1d().unwrap();
        assert!(values.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(values.contains(&0.0) && values.contains(&1.0));
        for (orig, x) in s.values_1d().unwrap().iter().zip(values) {
            assert_abs_diff_eq!(min + x * (max - min), *orig, epsilon = 1e-12);
        }
    }
}
