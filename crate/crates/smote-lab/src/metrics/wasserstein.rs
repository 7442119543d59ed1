//! Empirical Wasserstein-1 distance on the line.

use super::{MetricName, MetricResult};
use crate::error::{Error, Result};
use crate::sampling::Sample;

/// `int |F_a(x) - F_b(x)| dx`, computed exactly as a piecewise-constant
/// integral over the merged sorted support.
///
/// Sample sizes may differ. For equal sizes the integral reduces to the
/// mean absolute difference of paired order statistics.
pub fn wasserstein1(a: &Sample, b: &Sample) -> Result<MetricResult> {
    let (xa, xb) = (a.values_1d()?, b.values_1d()?);
    if xa.is_empty() || xb.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sa = xa.to_vec();
    let mut sb = xb.to_vec();
    sa.sort_unstable_by(f64::total_cmp);
    sb.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);

    let (mut ia, mut ib) = (0usize, 0usize);
    let mut total = 0.0f64;
    let mut prev: Option<f64> = None;
    while ia < sa.len() || ib < sb.len() {
        let v = match (sa.get(ia), sb.get(ib)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            // CDF gap over [p, v) uses counts of values <= p
            total += (ia as f64 / na - ib as f64 / nb).abs() * (v - p);
        }
        while ia < sa.len() && sa[ia] == v {
            ia += 1;
        }
        while ib < sb.len() && sb[ib] == v {
            ib += 1;
        }
        prev = Some(v);
    }
    Ok(MetricResult::new(MetricName::W1, total, sa.len()).with_meta("n_b", sb.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn s(values: &[f64]) -> Sample {
        Sample::from_values(values).unwrap()
    }

    fn w1(a: &[f64], b: &[f64]) -> f64 {
        wasserstein1(&s(a), &s(b)).unwrap().value
    }

    #[test]
    fn identical_samples_have_zero_distance() {
        assert_eq!(w1(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
    }

    #[test]
    fn unit_shift_has_unit_distance() {
        assert_abs_diff_eq!(w1(&[0.0, 1.0], &[1.0, 2.0]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn paired_order_statistics_example() {
        // order statistics 0,0,1,1 vs 0.5,0.5,0.5,0.5 differ by 0.5 each
        assert_abs_diff_eq!(
            w1(&[0.0, 0.0, 1.0, 1.0], &[0.5, 0.5, 0.5, 0.5]),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn unequal_sizes_integrate_the_cdf_gap() {
        // F_a steps 1/2 at 0 and 1; F_b steps 1/3 at 0, 0.5, 1:
        // |gap| is 1/6 on both [0, 0.5) and [0.5, 1)
        assert_abs_diff_eq!(
            w1(&[0.0, 1.0], &[0.0, 0.5, 1.0]),
            1.0 / 6.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_empty_samples() {
        let empty = Sample::new(vec![], 1).unwrap();
        assert!(matches!(
            wasserstein1(&empty, &s(&[1.0])),
            Err(Error::EmptySample)
        ));
    }

    proptest! {
        #[test]
        fn prop_equal_sizes_match_paired_order_statistics(
            a in proptest::collection::vec(-100.0f64..100.0, 1..40),
            b_raw in proptest::collection::vec(-100.0f64..100.0, 40),
        ) {
            let b = &b_raw[..a.len()];
            let integral = w1(&a, b);
            let mut sa = a.clone();
            let mut sb = b.to_vec();
            sa.sort_unstable_by(f64::total_cmp);
            sb.sort_unstable_by(f64::total_cmp);
            let paired: f64 = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum::<f64>()
                / sa.len() as f64;
            prop_assert!((integral - paired).abs() < 1e-9, "{integral} vs {paired}");
        }

        #[test]
        fn prop_symmetry(
            a in proptest::collection::vec(-100.0f64..100.0, 1..30),
            b in proptest::collection::vec(-100.0f64..100.0, 1..30),
        ) {
            prop_assert!((w1(&a, &b) - w1(&b, &a)).abs() < 1e-12);
        }

        #[test]
        fn prop_triangle_inequality(
            a in proptest::collection::vec(-100.0f64..100.0, 1..25),
            b in proptest::collection::vec(-100.0f64..100.0, 1..25),
            c in proptest::collection::vec(-100.0f64..100.0, 1..25),
        ) {
            prop_assert!(w1(&a, &c) <= w1(&a, &b) + w1(&b, &c) + 1e-9);
        }

        #[test]
        fn prop_translation_covariance(
            a in proptest::collection::vec(-100.0f64..100.0, 1..30),
            b in proptest::collection::vec(-100.0f64..100.0, 1..30),
            c in -50.0f64..50.0,
        ) {
            let shifted: Vec<f64> = a.iter().map(|x| x + c).collect();
            // shifting a sample by c moves it exactly |c| from itself
            prop_assert!((w1(&shifted, &a) - c.abs()).abs() < 1e-9);
            // and moves its distance to anything else by at most |c|
            prop_assert!((w1(&shifted, &b) - w1(&a, &b)).abs() <= c.abs() + 1e-9);
        }
    }
}
