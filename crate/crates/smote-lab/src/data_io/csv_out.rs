//! Byte-deterministic CSV emission for sweep and check results.
//!
//! Floats are written in plain decimal with nine significant digits, so
//! identical results always serialize to identical bytes and files can be
//! compared with plain `diff`. Rows are sorted by (k, n): one curve per k,
//! each curve in x order, the order the plotting layer consumes.

use crate::error::{Error, Result};
use crate::experiments::{SpacingResult, SweepResult, TailProbResult};
use std::fmt::Write as _;
use std::path::Path;

/// Formats `x` with `sig` significant digits in plain decimal notation.
///
/// Never switches to scientific notation: small magnitudes get leading
/// zeros, large ones trailing zeros. `sig` must be at least 1.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if !x.is_finite() {
        // Serialized metrics are validated finite upstream; this arm only
        // keeps debug output printable.
        return format!("{x}");
    }
    // Route through scientific formatting so rounding to `sig` digits is
    // done once, by the standard library, then reposition the point.
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("scientific exponent is an integer");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), sig);

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if (exp as usize) < sig - 1 {
        let point = exp as usize + 1;
        out.push_str(&digits[..point]);
        out.push('.');
        out.push_str(&digits[point..]);
    } else {
        out.push_str(&digits);
        for _ in 0..(exp as usize - (sig - 1)) {
            out.push('0');
        }
    }
    out
}

const SIG_DIGITS: usize = 9;

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Writes sweep rows as `n,k,mean,std_error,trials` sorted by (k, n).
///
/// An empty result writes the header line only. Output bytes depend only
/// on the row values.
pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut rows: Vec<_> = result.rows.iter().collect();
    rows.sort_by_key(|r| (r.k, r.n));
    let mut out = String::from("n,k,mean,std_error,trials\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.n,
            row.k,
            format_sig(row.mean, SIG_DIGITS),
            format_sig(row.std_error, SIG_DIGITS),
            row.trials
        )
        .expect("writing to a String cannot fail");
    }
    write_atomic(path, &out)
}

/// Writes spacing-check rows as
/// `n,k,mean_spacing,expected,abs_dev,std_error,trials` sorted by (k, n).
pub fn write_spacing_csv(result: &SpacingResult, path: &Path) -> Result<()> {
    let mut rows: Vec<_> = result.rows.iter().collect();
    rows.sort_by_key(|r| (r.k, r.n));
    let mut out = String::from("n,k,mean_spacing,expected,abs_dev,std_error,trials\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.n,
            row.k,
            format_sig(row.mean_spacing, SIG_DIGITS),
            format_sig(row.expected, SIG_DIGITS),
            format_sig(row.abs_dev, SIG_DIGITS),
            format_sig(row.std_error, SIG_DIGITS),
            result.trials
        )
        .expect("writing to a String cannot fail");
    }
    write_atomic(path, &out)
}

/// Writes tail-probability rows as `k,exceed_count,p_hat,trials` in
/// ascending k order.
pub fn write_tailprob_csv(result: &TailProbResult, path: &Path) -> Result<()> {
    let mut rows: Vec<_> = result.rows.iter().collect();
    rows.sort_by_key(|r| r.k);
    let mut out = String::from("k,exceed_count,p_hat,trials\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.k,
            row.exceed_count,
            format_sig(row.p_hat, SIG_DIGITS),
            result.config.trials
        )
        .expect("writing to a String cannot fail");
    }
    write_atomic(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistributionSpec;
    use crate::experiments::{SweepConfig, SweepRow, SweepSource};
    use crate::metrics::MetricName;

    fn toy_result(rows: Vec<SweepRow>) -> SweepResult {
        SweepResult {
            rows,
            config: SweepConfig {
                source: SweepSource::Analytic(DistributionSpec::standard_uniform()),
                n_grid: vec![8],
                k_values: vec![1],
                trials: 1,
                draws_per_trial: 1,
                metric: MetricName::Ks2,
                seed: 0,
                calibration: false,
            },
        }
    }

    #[test]
    fn significant_digit_formatting_oracles() {
        assert_eq!(format_sig(0.5, 9), "0.500000000");
        assert_eq!(format_sig(7.0 / 30.0, 9), "0.233333333");
        assert_eq!(format_sig(123.456789, 9), "123.456789");
        assert_eq!(format_sig(1.0e12, 9), "1000000000000");
        assert_eq!(format_sig(1.5e-15, 9), "0.00000000000000150000000");
        assert_eq!(format_sig(0.0, 9), "0.00000000");
        assert_eq!(format_sig(-0.25, 9), "-0.250000000");
        assert_eq!(format_sig(1.0, 1), "1");
        assert_eq!(format_sig(9.999999999, 9), "10.0000000");
        assert_eq!(format_sig(0.1, 3), "0.100");
    }

    #[test]
    fn formatted_value_parses_back_to_the_rounded_value() {
        for &x in &[
            0.123456789123,
            1234.56789,
            9.87654321e-7,
            -3.333333333333,
            0.09999999999,
        ] {
            let printed = format_sig(x, 9);
            let parsed: f64 = printed.parse().unwrap();
            // Printing the parsed value again must be a fixed point.
            assert_eq!(format_sig(parsed, 9), printed, "unstable for {x}");
            assert!(((parsed - x) / x).abs() < 1e-8, "lost precision for {x}");
        }
    }

    #[test]
    fn sweep_rows_are_sorted_by_k_then_n() {
        let result = toy_result(vec![
            SweepRow { n: 8, k: 1, mean: 0.25, std_error: 0.01, trials: 50 },
            SweepRow { n: 8, k: 5, mean: 0.30, std_error: 0.01, trials: 50 },
            SweepRow { n: 20, k: 1, mean: 0.15, std_error: 0.005, trials: 50 },
            SweepRow { n: 20, k: 5, mean: 0.18, std_error: 0.005, trials: 50 },
        ]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        write_sweep_csv(&result, &path).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            content,
            "n,k,mean,std_error,trials\n\
             8,1,0.250000000,0.0100000000,50\n\
             20,1,0.150000000,0.00500000000,50\n\
             8,5,0.300000000,0.0100000000,50\n\
             20,5,0.180000000,0.00500000000,50\n"
        );
    }

    #[test]
    fn empty_result_writes_header_only() {
        let result = toy_result(vec![]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_sweep_csv(&result, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "n,k,mean,std_error,trials\n"
        );
    }

    #[test]
    fn identical_results_write_identical_bytes() {
        let result = toy_result(vec![
            SweepRow { n: 8, k: 1, mean: 1.0 / 3.0, std_error: 1.0 / 7.0, trials: 3 },
            SweepRow { n: 12, k: 1, mean: 2.0 / 3.0, std_error: 1.0 / 9.0, trials: 3 },
        ]);
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_sweep_csv(&result, &a).unwrap();
        write_sweep_csv(&result, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn written_file_round_trips_at_printed_precision() {
        let result = toy_result(vec![
            SweepRow { n: 8, k: 1, mean: 0.123456789123, std_error: 0.000123456789123, trials: 50 },
            SweepRow { n: 20, k: 2, mean: 0.98765432123, std_error: 0.0000987654321, trials: 50 },
        ]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("round.csv");
        write_sweep_csv(&result, &path).unwrap();

        let mut reader = csv::Reader::from_path(&path).unwrap();
        assert_eq!(
            reader.headers().unwrap(),
            &csv::StringRecord::from(vec!["n", "k", "mean", "std_error", "trials"])
        );
        let records: Vec<csv::StringRecord> =
            reader.records().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(records.len(), 2);
        for (record, row) in records.iter().zip(&result.rows) {
            assert_eq!(record[0].parse::<usize>().unwrap(), row.n);
            assert_eq!(record[1].parse::<usize>().unwrap(), row.k);
            let mean: f64 = record[2].parse().unwrap();
            let se: f64 = record[3].parse().unwrap();
            assert_eq!(format_sig(mean, 9), format_sig(row.mean, 9));
            assert_eq!(format_sig(se, 9), format_sig(row.std_error, 9));
            assert_eq!(record[4].parse::<usize>().unwrap(), row.trials);
        }
    }

    #[test]
    fn trailing_newline_is_present() {
        let result = toy_result(vec![SweepRow {
            n: 8,
            k: 1,
            mean: 0.1,
            std_error: 0.01,
            trials: 5,
        }]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nl.csv");
        write_sweep_csv(&result, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.last(), Some(&b'\n'));
        assert!(!bytes.ends_with(b"\n\n"));
    }
}
