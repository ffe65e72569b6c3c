mod common;

use multicascade::analytics::poisson_upper_tail;

#[test]
fn oracle_reproduces_hand_value() {
    let tails = common::exact_poisson_tails(1, 1, 5, 200);
    assert!((tails[3] - 0.018_988_156_876_153_81).abs() < 1e-16);
}

#[test]
fn tail_plus_cdf_is_one() {
    for rate in [0.1f64, 0.7, 3.0, 12.5, 50.0] {
        let mut pmf = (-rate).exp();
        let mut cdf = 0.0;
        for t in 0..=200u64 {
            cdf += pmf;
            let tail = poisson_upper_tail(t, rate).unwrap();
            assert!((tail + cdf - 1.0).abs() < 1e-12, "rate {rate} t {t}");
            pmf *= rate / (t + 1) as f64;
        }
    }
}

#[test]
fn fractional_rates_against_exact_integers() {
    // 2.5 and 37.5 are not on the acceptance grid
    for (num, den) in [(5u64, 2u64), (75, 2)] {
        let rate = num as f64 / den as f64;
        let exact = common::exact_poisson_tails(num, den, 150, 500);
        for (t, &e) in exact.iter().enumerate() {
            let got = poisson_upper_tail(t as u64, rate).unwrap();
            assert!((got - e).abs() < 1e-12, "rate {rate} t {t}: {got} vs {e}");
        }
    }
}
