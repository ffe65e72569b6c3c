#![allow(dead_code)]

use multicascade::game::StrategyState;
use multicascade::{MultiplexNetwork, PayoffVector, Strategy};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

/// Exact `P(X > t)` for `t = 0..=max_t`, `X ~ Poisson(num/den)`.
///
/// Works in integers: with `N` series terms, term `i` scaled by `den^N·N!`
/// is `num^i·den^(N−i)·N!/i!`, and the tail is a ratio of integer sums.
/// `terms` must be large enough that the neglected part of `e^λ` is far
/// below f64 resolution.
pub fn exact_poisson_tails(num: u64, den: u64, max_t: usize, terms: usize) -> Vec<f64> {
    let num_b = BigUint::from(num);
    let den_b = BigUint::from(den);
    let mut c = den_b.pow(terms as u32);
    for i in 2..=terms {
        c *= BigUint::from(i);
    }
    let mut scaled = Vec::with_capacity(terms + 1);
    scaled.push(c.clone());
    for i in 1..=terms {
        c = c * &num_b / (&den_b * BigUint::from(i));
        scaled.push(c.clone());
    }
    let total: BigUint = scaled.iter().sum();
    let digits = BigUint::from(10u32).pow(40);
    let mut tail = total.clone();
    let mut out = Vec::with_capacity(max_t + 1);
    for term in scaled.iter().take(max_t + 1) {
        tail -= term;
        let q = if tail.is_zero() {
            0.0
        } else {
            (&tail * &digits / &total).to_f64().unwrap() * 1e-40
        };
        out.push(q);
    }
    out
}

pub struct Instance {
    pub net: MultiplexNetwork,
    pub state: StrategyState,
    pub pay: PayoffVector,
}

/// Random small game instance. Half of the draws use dyadic payoffs so exact
/// payoff ties are common.
pub fn random_instance<R: Rng>(rng: &mut R, max_nodes: usize, max_layers: usize) -> Instance {
    let n = rng.gen_range(1..=max_nodes);
    let l = rng.gen_range(1..=max_layers);
    let p: f64 = rng.gen();
    let mut net = MultiplexNetwork::empty(n, l);
    for layer in 0..l {
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    net.insert_edge(layer, u, v).unwrap();
                }
            }
        }
    }
    let strategy: Vec<Strategy> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                Strategy::A
            } else {
                Strategy::B
            }
        })
        .collect();
    let is_seed: Vec<bool> = strategy
        .iter()
        .map(|s| s.is_a() && rng.gen_bool(0.5))
        .collect();
    let state = StrategyState::from_parts(strategy, is_seed).unwrap();
    let (a, b): (Vec<f64>, Vec<f64>) = if rng.gen_bool(0.5) {
        let total = rng.gen_range(1..=8) as f64;
        (0..l)
            .map(|_| {
                let a = total * rng.gen_range(1..16) as f64 / 16.0;
                (a, total - a)
            })
            .unzip()
    } else {
        let total = rng.gen_range(0.5..10.0);
        (0..l)
            .map(|_| {
                let a = total * rng.gen_range(0.05..0.95);
                (a, total - a)
            })
            .unzip()
    };
    Instance {
        net,
        state,
        pay: PayoffVector::new(a, b).unwrap(),
    }
}
