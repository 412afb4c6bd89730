use minmotion::{
    achievement_times, from_dimensionless, from_dimensionless_time, to_dimensionless, PeakVector,
    Peaks,
};
use proptest::prelude::*;

fn peaks_strategy() -> impl Strategy<Value = Vec<f64>> {
    (1usize..=8)
        .prop_flat_map(|n| prop::collection::vec((-3.0f64..3.0).prop_map(|l| 10f64.powf(l)), n + 1))
}

proptest! {
    #[test]
    fn round_trip(values in peaks_strategy()) {
        let peaks = PeakVector::new(values.clone()).unwrap();
        let back = from_dimensionless(&to_dimensionless(&peaks), peaks.distance(), peaks.top()).unwrap();
        for (a, b) in back.values().iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn ends_are_exactly_one(values in peaks_strategy()) {
        let hat = to_dimensionless(&PeakVector::new(values).unwrap());
        prop_assert_eq!(hat.get(0), 1.0);
        prop_assert_eq!(hat.get(hat.order()), 1.0);
    }

    #[test]
    fn low_orders_match_their_closed_forms(s in 0.1f64..100.0, v in 0.1f64..10.0, a in 0.1f64..10.0, j in 0.1f64..10.0, p in 0.1f64..10.0) {
        // N = 2: v̂ = v / sqrt(s a)
        let hat = to_dimensionless(&PeakVector::new(vec![s, v, a]).unwrap());
        prop_assert!((hat.get(1) - v / (s * a).sqrt()).abs() <= 1e-12 * hat.get(1));
        // N = 3: v̂ = v / (s^2 j)^(1/3), â = a / (s j^2)^(1/3)
        let hat = to_dimensionless(&PeakVector::new(vec![s, v, a, j]).unwrap());
        prop_assert!((hat.get(1) - v / (s * s * j).cbrt()).abs() <= 1e-12 * hat.get(1));
        prop_assert!((hat.get(2) - a / (s * j * j).cbrt()).abs() <= 1e-12 * hat.get(2));
        // N = 4: v̂ = v / (s^3 p)^(1/4), â = a / (s p)^(1/2), ĵ = j / (s p^3)^(1/4)
        let hat = to_dimensionless(&PeakVector::new(vec![s, v, a, j, p]).unwrap());
        prop_assert!((hat.get(1) - v / (s.powi(3) * p).powf(0.25)).abs() <= 1e-12 * hat.get(1));
        prop_assert!((hat.get(2) - a / (s * p).sqrt()).abs() <= 1e-12 * hat.get(2));
        prop_assert!((hat.get(3) - j / (s * p.powi(3)).powf(0.25)).abs() <= 1e-12 * hat.get(3));
    }

    #[test]
    fn times_transform_back(values in peaks_strategy()) {
        let peaks = PeakVector::new(values).unwrap();
        let n = peaks.order();
        let t_hat = achievement_times(&to_dimensionless(&peaks)).horizon();
        let t = from_dimensionless_time(t_hat, peaks.distance(), peaks.top(), n).unwrap();
        let direct = achievement_times(&peaks).horizon();
        prop_assert!((t - direct).abs() <= 1e-12 * direct);
    }
}

#[test]
fn unit_distance_and_top_leave_peaks_unchanged() {
    let peaks = PeakVector::new(vec![1.0, 0.3, 2.0, 1.0]).unwrap();
    assert_eq!(to_dimensionless(&peaks).values(), peaks.values());
}
