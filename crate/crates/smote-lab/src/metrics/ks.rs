//! Kolmogorov-Smirnov distances, computed exactly.

use super::{MetricName, MetricResult};
use crate::dist::{cdf, DistributionSpec};
use crate::error::{Error, Result};
use crate::sampling::Sample;

/// `sup_x |F_n(x) - F(x)|` between the empirical CDF of `sample` and the
/// analytic CDF of `spec`.
///
/// The supremum over the whole line is attained at an order statistic, so
/// it equals `max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)` over the
/// sorted values.
pub fn ks_one_sample(sample: &Sample, spec: &DistributionSpec) -> Result<MetricResult> {
    let values = sample.values_1d()?;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(spec, x);
        let upper = (i + 1) as f64 / n - f;
        let lower = f - i as f64 / n;
        sup = sup.max(upper).max(lower);
    }
    Ok(MetricResult::new(MetricName::Ks1, sup, sorted.len())
        .with_meta("distribution", spec.kind_name()))
}

/// `sup_x |F_a(x) - F_b(x)|` between two empirical CDFs, exact over the
/// merged sorted support.
///
/// At a tied value both CDFs step together, so counts are advanced through
/// every copy of the value in both samples before the gap is measured.
pub fn ks_two_sample(a: &Sample, b: &Sample) -> Result<MetricResult> {
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
    let mut sup = 0.0f64;
    while ia < sa.len() || ib < sb.len() {
        let v = match (sa.get(ia), sb.get(ib)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while ia < sa.len() && sa[ia] == v {
            ia += 1;
        }
        while ib < sb.len() && sb[ib] == v {
            ib += 1;
        }
        sup = sup.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    Ok(MetricResult::new(MetricName::Ks2, sup, sa.len()).with_meta("n_b", sb.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::quantile;
    use approx::assert_abs_diff_eq;

    fn s(values: &[f64]) -> Sample {
        Sample::from_values(values).unwrap()
    }

    #[test]
    fn one_sample_matches_hand_enumeration() {
        let u = DistributionSpec::standard_uniform();
        // gaps at 0.1, 0.5, 0.9: the largest one-sided gap is 1/3 - 0.1
        let r = ks_one_sample(&s(&[0.1, 0.5, 0.9]), &u).unwrap();
        assert_abs_diff_eq!(r.value, 7.0 / 30.0, epsilon = 1e-12);
        assert_eq!(r.n, 3);

        let r = ks_one_sample(&s(&[0.5]), &u).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn one_sample_is_order_independent() {
        let u = DistributionSpec::standard_uniform();
        let r1 = ks_one_sample(&s(&[0.9, 0.1, 0.5]), &u).unwrap();
        let r2 = ks_one_sample(&s(&[0.1, 0.5, 0.9]), &u).unwrap();
        assert_eq!(r1.value, r2.value);
    }

    #[test]
    fn one_sample_vanishes_at_ideal_quantile_placement() {
        let u = DistributionSpec::standard_uniform();
        let n = 10_000;
        let values: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let r = ks_one_sample(&s(&values), &u).unwrap();
        assert!(r.value < 1e-3, "ks {}", r.value);
    }

    #[test]
    fn one_sample_of_own_quantiles_is_half_over_n() {
        // points at u = (i - 1/2)/n make both one-sided gaps equal 1/(2n)
        for spec in [
            DistributionSpec::standard_uniform(),
            DistributionSpec::standard_gaussian(),
            DistributionSpec::standard_exponential(),
        ] {
            for n in [1usize, 5, 40] {
                let values: Vec<f64> = (1..=n)
                    .map(|i| quantile(&spec, (i as f64 - 0.5) / n as f64).unwrap())
                    .collect();
                let r = ks_one_sample(&s(&values), &spec).unwrap();
                assert_abs_diff_eq!(r.value, 0.5 / n as f64, epsilon = 1e-7);
                assert!(r.value <= 1.0 / n as f64);
            }
        }
    }

    #[test]
    fn one_sample_rejects_empty_and_multidim() {
        let u = DistributionSpec::standard_uniform();
        let empty = Sample::new(vec![], 1).unwrap();
        assert!(matches!(
            ks_one_sample(&empty, &u),
            Err(Error::EmptySample)
        ));
        let twod = Sample::new(vec![0.0, 0.0], 2).unwrap();
        assert!(matches!(
            ks_one_sample(&twod, &u),
            Err(Error::NotOneDimensional { dim: 2 })
        ));
    }

    #[test]
    fn two_sample_identical_inputs_give_zero() {
        let a = s(&[0.3, 0.9, 0.1, 0.5]);
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn two_sample_disjoint_supports_give_one() {
        let r = ks_two_sample(&s(&[0.0, 0.0]), &s(&[1.0, 1.0])).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn two_sample_matches_hand_enumeration() {
        // gaps at merged points 0, 0.5, 1 are 1/6, 1/6, 0
        let r = ks_two_sample(&s(&[0.0, 1.0]), &s(&[0.0, 0.5, 1.0])).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn two_sample_is_symmetric() {
        let a = s(&[0.1, 0.7, 0.7, 2.0]);
        let b = s(&[-1.0, 0.7, 1.4]);
        assert_eq!(
            ks_two_sample(&a, &b).unwrap().value,
            ks_two_sample(&b, &a).unwrap().value
        );
    }

    #[test]
    fn two_sample_handles_ties_across_samples() {
        // both CDFs must step through the shared value 1 before comparing
        let r = ks_two_sample(&s(&[0.0, 1.0]), &s(&[1.0, 2.0])).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
    }
}
