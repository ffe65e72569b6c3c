//! Closed-form Poisson approximations of adoption on ER multiplex networks.
//!
//! A node with `q`-fraction A-neighbours sees `Poisson(l·λ)` A-neighbours
//! summed over layers, with `λ = p·q·(n−1)`. It switches when that count
//! exceeds `⌊β_l·p·(n−1)⌋`, where `β_l = Σ b_i / (a_1 + b_1)`.

use crate::error::{Error, Result};
use crate::game::PayoffVector;

/// Above this rate `e^{-rate}` underflows, so terms are built in log space.
const LOG_SPACE_RATE: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticParams {
    pub nodes: usize,
    pub edge_prob: f64,
    pub layers: usize,
    pub payoffs: PayoffVector,
    pub q0: f64,
}

impl AnalyticParams {
    pub fn new(
        nodes: usize,
        edge_prob: f64,
        layers: usize,
        payoffs: PayoffVector,
        q0: f64,
    ) -> Result<Self> {
        let params = AnalyticParams {
            nodes,
            edge_prob,
            layers,
            payoffs,
            q0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::domain("analytic model needs at least 2 nodes"));
        }
        if !(self.edge_prob > 0.0 && self.edge_prob <= 1.0) {
            return Err(Error::domain(format!(
                "edge probability {} is outside (0, 1]",
                self.edge_prob
            )));
        }
        if self.layers != self.payoffs.layers() {
            return Err(Error::Shape {
                left: self.layers,
                right: self.payoffs.layers(),
            });
        }
        check_fraction("q0", self.q0)
    }

    /// `⌊β_l·p·(n−1)⌋`, the largest A-neighbour count that does not trigger
    /// a switch.
    pub fn threshold_count(&self) -> u64 {
        let sum_b: f64 = self.payoffs.b().iter().sum();
        floor_count(sum_b * self.edge_prob * (self.nodes - 1) as f64 / self.payoffs.layer_total())
    }
}

fn check_fraction(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

// A product that is mathematically an integer may land one ulp below it.
fn floor_count(x: f64) -> u64 {
    (x + 4.0 * f64::EPSILON * x.abs()).floor().max(0.0) as u64
}

/// `β_l = (Σ_i b_i) / (a_1 + b_1)`.
pub fn adopting_threshold(pay: &PayoffVector) -> f64 {
    pay.b().iter().sum::<f64>() / pay.layer_total()
}

/// `P(X > threshold_count)` for `X ~ Poisson(rate)`.
///
/// Terms come from the recurrence `t_i = t_{i-1}·rate/i`. Below the mean the
/// complement of the CDF is returned; at or above it the upper terms are
/// summed directly so small tails keep full relative precision.
pub fn poisson_upper_tail(threshold_count: u64, rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::domain(format!(
            "Poisson rate {rate} must be finite and >= 0"
        )));
    }
    if rate == 0.0 {
        return Ok(0.0);
    }
    let terms = PoissonTerms::new(rate);
    let tail = if (threshold_count as f64) < rate {
        let cdf: f64 = terms.take(threshold_count as usize + 1).sum();
        1.0 - cdf
    } else {
        let mut sum = 0.0;
        for (i, t) in terms.enumerate() {
            if i as u64 <= threshold_count {
                // past the mode and already underflowed: the tail is below f64 range
                if t == 0.0 && i as f64 > rate {
                    return Ok(0.0);
                }
                continue;
            }
            sum += t;
            if t <= sum * 1e-17 || t == 0.0 {
                break;
            }
        }
        sum
    };
    Ok(tail.clamp(0.0, 1.0))
}

/// Iterator over Poisson pmf values `P(X = 0), P(X = 1), …`.
struct PoissonTerms {
    rate: f64,
    ln_rate: f64,
    index: u64,
    // linear-space term, or ln of the term when rate is large
    current: f64,
    log_space: bool,
}

impl PoissonTerms {
    fn new(rate: f64) -> Self {
        let log_space = rate > LOG_SPACE_RATE;
        PoissonTerms {
            rate,
            ln_rate: rate.ln(),
            index: 0,
            current: if log_space { -rate } else { (-rate).exp() },
            log_space,
        }
    }
}

impl Iterator for PoissonTerms {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = if self.log_space {
            self.current.exp()
        } else {
            self.current
        };
        self.index += 1;
        let i = self.index as f64;
        if self.log_space {
            self.current += self.ln_rate - i.ln();
        } else {
            self.current *= self.rate / i;
        }
        Some(out)
    }
}

/// Quantities behind one adoption-probability evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdoptionEstimate {
    /// Per-layer mean A-neighbour count `p·q·(n−1)`.
    pub lambda: f64,
    /// Rate summed over layers, `l·λ`.
    pub total_rate: f64,
    pub threshold_count: u64,
    pub probability: f64,
}

/// Poisson estimate of the chance that a B-node switches when a fraction
/// `q` of nodes already play A.
pub fn adoption_probability(ap: &AnalyticParams, q: f64) -> Result<AdoptionEstimate> {
    ap.validate()?;
    check_fraction("q", q)?;
    let lambda = ap.edge_prob * q * (ap.nodes - 1) as f64;
    let total_rate = ap.layers as f64 * lambda;
    let threshold_count = ap.threshold_count();
    Ok(AdoptionEstimate {
        lambda,
        total_rate,
        threshold_count,
        probability: poisson_upper_tail(threshold_count, total_rate)?,
    })
}

/// Mean-field adopter fractions `q_0 … q_steps` with
/// `q_{m+1} = (1 − q_m)·P(l, q_m) + q_m`.
pub fn recurrence_curve(ap: &AnalyticParams, steps: usize) -> Result<Vec<f64>> {
    ap.validate()?;
    let mut q = ap.q0;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(q);
    for _ in 0..steps {
        let p = adoption_probability(ap, q)?.probability;
        q = ((1.0 - q) * p + q).clamp(0.0, 1.0);
        out.push(q);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub alpha: f64,
    /// Lower bound on the adopter fraction after `m` steps, indexed by `m`.
    pub values: Vec<f64>,
}

/// `1 − (1−α)^m + (1−α)^m·q0` for `m = 0 … steps`, where `α` lower-bounds
/// the per-step adoption probability.
pub fn lower_bound_curve(q0: f64, alpha: f64, steps: usize) -> Result<BoundCurve> {
    check_fraction("q0", q0)?;
    check_fraction("alpha", alpha)?;
    let keep = 1.0 - alpha;
    let values = (0..=steps)
        .map(|m| {
            let stay = keep.powi(m as i32);
            ((1.0 - stay) + stay * q0).clamp(0.0, 1.0)
        })
        .collect();
    Ok(BoundCurve { alpha, values })
}

/// The lower bound with `α = P(l, q0)` taken from the Poisson estimate.
pub fn cascade_lower_bound(ap: &AnalyticParams, steps: usize) -> Result<BoundCurve> {
    let alpha = adoption_probability(ap, ap.q0)?.probability;
    lower_bound_curve(ap.q0, alpha, steps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerOrdering {
    /// `⌊(k·b/(a+b))·p·(n−1)⌋`.
    pub floor_k: u64,
    pub floor_j: u64,
    pub floors_equal: bool,
    /// Seed fraction above which `k` layers adopt less than `j` layers.
    pub q_star: f64,
}

/// When do `j > k` layers beat `k` layers? With equal per-layer payoffs
/// `(a, b)` and equal switching floors, `P(k, q) < P(j, q)` holds for
/// `q > max_{0≤i<floor_k} i·ln(j/k) / ((j−k)(n−1)p)`.
pub fn layer_ordering_threshold(
    nodes: usize,
    edge_prob: f64,
    a: f64,
    b: f64,
    k: usize,
    j: usize,
) -> Result<LayerOrdering> {
    if k == 0 || k >= j {
        return Err(Error::domain(format!(
            "layer counts must satisfy 1 <= k < j (got k={k}, j={j})"
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("payoffs must be positive"));
    }
    if nodes < 2 || !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(Error::domain("need n >= 2 and p in (0, 1]"));
    }
    let scale = b / (a + b) * edge_prob * (nodes - 1) as f64;
    let floor_k = floor_count(k as f64 * scale);
    let floor_j = floor_count(j as f64 * scale);
    let per_i = (j as f64 / k as f64).ln() / ((j - k) as f64 * (nodes - 1) as f64 * edge_prob);
    let q_star = (0..floor_k).map(|i| i as f64 * per_i).fold(0.0, f64::max);
    Ok(LayerOrdering {
        floor_k,
        floor_j,
        floors_equal: floor_k == floor_j,
        q_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(nodes: usize, p: f64, layers: usize, a: f64, b: f64, q0: f64) -> AnalyticParams {
        AnalyticParams::new(
            nodes,
            p,
            layers,
            PayoffVector::uniform(a, b, layers).unwrap(),
            q0,
        )
        .unwrap()
    }

    // 1 − e^{-1}(1 + 1 + 1/2 + 1/6), 40-digit evaluation
    const TAIL_3_1: f64 = 0.018_988_156_876_153_81;

    #[test]
    fn threshold_examples() {
        let c = 1.7;
        assert_eq!(
            adopting_threshold(&PayoffVector::uniform(c, c, 1).unwrap()),
            0.5
        );
        assert!(
            (adopting_threshold(&PayoffVector::uniform(2.0, 1.0, 1).unwrap()) - 1.0 / 3.0).abs()
                < 1e-15
        );
        assert!(
            (adopting_threshold(&PayoffVector::uniform(2.0, 1.0, 2).unwrap()) - 2.0 / 3.0).abs()
                < 1e-15
        );
        let mixed = PayoffVector::new(vec![2.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(adopting_threshold(&mixed), 1.0);
    }

    #[test]
    fn tail_examples() {
        assert_eq!(poisson_upper_tail(0, 0.0).unwrap(), 0.0);
        assert!((poisson_upper_tail(3, 1.0).unwrap() - TAIL_3_1).abs() < 1e-15);
        assert!(poisson_upper_tail(3, -1.0).is_err());
        assert!(poisson_upper_tail(3, f64::NAN).is_err());
        assert_eq!(poisson_upper_tail(0, 1.0).unwrap(), 1.0 - (-1.0f64).exp());
    }

    #[test]
    fn tail_grows_with_rate_towards_one() {
        let mut last = 0.0;
        for r in (1..400).map(|x| x as f64 * 0.5) {
            let t = poisson_upper_tail(10, r).unwrap();
            assert!(t >= last);
            last = t;
        }
        assert!(last > 1.0 - 1e-12);
    }

    #[test]
    fn tail_in_log_space_regime() {
        // mean 1000, sd ~31.6: the 1000 cut sits just above the median
        let t = poisson_upper_tail(1000, 1000.0).unwrap();
        assert!((0.45..0.5).contains(&t), "{t}");
        assert!(poisson_upper_tail(10, 1000.0).unwrap() == 1.0);
        assert!(poisson_upper_tail(2000, 1000.0).unwrap() < 1e-100);
    }

    #[test]
    fn adoption_probability_examples() {
        let ap = params(101, 0.1, 1, 2.0, 1.0, 0.1);
        let est = adoption_probability(&ap, 0.1).unwrap();
        assert!((est.total_rate - 1.0).abs() < 1e-12);
        assert_eq!(est.threshold_count, 3);
        assert!((est.probability - TAIL_3_1).abs() < 1e-12);
        assert_eq!(adoption_probability(&ap, 0.0).unwrap().probability, 0.0);
        assert!(adoption_probability(&ap, 1.5).is_err());
    }

    #[test]
    fn params_are_validated() {
        let pay = PayoffVector::uniform(2.0, 1.0, 2).unwrap();
        assert!(AnalyticParams::new(1, 0.1, 2, pay.clone(), 0.1).is_err());
        assert!(AnalyticParams::new(10, 0.0, 2, pay.clone(), 0.1).is_err());
        assert!(AnalyticParams::new(10, 0.1, 3, pay.clone(), 0.1).is_err());
        assert!(AnalyticParams::new(10, 0.1, 2, pay, -0.1).is_err());
    }

    #[test]
    fn exact_integer_floors_are_not_lost() {
        // b/(a+b)·p·(n−1) = 0.5·0.1·100 = 5 exactly
        let ap = params(101, 0.1, 1, 1.0, 1.0, 0.1);
        assert_eq!(ap.threshold_count(), 5);
    }

    #[test]
    fn recurrence_fixed_points() {
        assert!(recurrence_curve(&params(500, 0.1, 2, 2.0, 1.0, 1.0), 10)
            .unwrap()
            .iter()
            .all(|&q| q == 1.0));
        assert!(recurrence_curve(&params(500, 0.1, 2, 2.0, 1.0, 0.0), 10)
            .unwrap()
            .iter()
            .all(|&q| q == 0.0));
    }

    #[test]
    fn recurrence_matches_independent_evaluation() {
        // scipy/mpmath evaluation of the recurrence for n=500, p=0.1, l=2, a=2, b=1, q0=0.25
        let expected = [
            0.25,
            0.286_528_918_319_249_6,
            0.413_513_825_749_702_75,
            0.935_168_369_765_196_5,
            0.999_999_999_999_965_6,
            1.0,
        ];
        let got = recurrence_curve(&params(500, 0.1, 2, 2.0, 1.0, 0.25), 5).unwrap();
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-12, "{g} vs {e}");
        }
    }

    #[test]
    fn bound_examples() {
        assert!(lower_bound_curve(0.3, 0.0, 5)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.3));
        let full = lower_bound_curve(0.3, 1.0, 5).unwrap();
        assert_eq!(full.values[0], 0.3);
        assert!(full.values[1..].iter().all(|&v| v == 1.0));
        let b = lower_bound_curve(0.25, 0.1, 3).unwrap();
        assert!((b.values[1] - 0.325).abs() < 1e-15);
        assert!(lower_bound_curve(1.2, 0.1, 3).is_err());
    }

    #[test]
    fn layer_ordering_examples() {
        let ex = layer_ordering_threshold(300, 0.1, 100.0, 1.0, 10, 13).unwrap();
        assert_eq!((ex.floor_k, ex.floor_j, ex.floors_equal), (2, 3, false));

        let v = layer_ordering_threshold(300, 0.1, 100.0, 1.0, 9, 10).unwrap();
        assert_eq!((v.floor_k, v.floor_j), (2, 2));
        assert!(v.floors_equal);
        assert!((v.q_star - 0.003_523_763_065_479_141_7).abs() < 1e-15);

        let z = layer_ordering_threshold(300, 0.1, 100.0, 1.0, 1, 2).unwrap();
        assert_eq!((z.floor_k, z.floor_j), (0, 0));
        assert_eq!(z.q_star, 0.0);

        assert!(layer_ordering_threshold(300, 0.1, 100.0, 1.0, 3, 3).is_err());
        assert!(layer_ordering_threshold(300, 0.1, 100.0, 1.0, 4, 3).is_err());
    }

    #[test]
    fn uniform_threshold_scales_with_layers() {
        for l in 1..8 {
            let pay = PayoffVector::uniform(3.0, 2.0, l).unwrap();
            assert!((adopting_threshold(&pay) - l as f64 * 2.0 / 5.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn adoption_monotone_in_q_and_p(
            n in 50usize..800,
            p in 0.01f64..0.3,
            l in 1usize..5,
            a in 1.0f64..10.0,
            q in 0.0f64..0.9,
            dq in 0.0f64..0.1,
            dp in 0.0f64..0.05,
        ) {
            let ap = params(n, p, l, a, 1.0, 0.1);
            let lo = adoption_probability(&ap, q).unwrap().probability;
            prop_assert!(adoption_probability(&ap, q + dq).unwrap().probability >= lo);
            let ap2 = params(n, p + dp, l, a, 1.0, 0.1);
            if ap2.threshold_count() == ap.threshold_count() {
                prop_assert!(adoption_probability(&ap2, q).unwrap().probability >= lo);
            }
        }

        #[test]
        fn recurrence_is_monotone_and_bounded(
            n in 50usize..800, p in 0.01f64..0.3, l in 1usize..4, q0 in 0.0f64..1.0,
        ) {
            let curve = recurrence_curve(&params(n, p, l, 2.0, 1.0, q0), 30).unwrap();
            prop_assert!(curve.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(curve.iter().all(|&q| (0.0..=1.0).contains(&q)));
        }

        #[test]
        fn bound_is_monotone(q0 in 0.0f64..=1.0, alpha in 0.0f64..=1.0) {
            let b = lower_bound_curve(q0, alpha, 40).unwrap();
            prop_assert!(b.values.windows(2).all(|w| w[1] >= w[0] - 1e-15));
            prop_assert!(b.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}
