//! The multiplex coordination game.
//!
//! Every edge `(u, v)` of layer `i` is a 2×2 coordination game: both players
//! earn `a_i` when both play A, `b_i` when both play B and nothing when they
//! disagree. Nodes start on B, seeds are pinned to A, and B-nodes switch to A
//! when their decision rule says A pays at least as well.

mod dynamics;
mod oracle;
mod rules;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use dynamics::{
    run, seed_count, select_seeds, step, Diffusion, DiffusionTrace, TerminalStatus,
};
pub use oracle::brute_force_decide;
pub use rules::{
    decide_dominant, decide_random, decide_sum, tally_neighbors, LayerCount, NeighborTally,
    PayoffTally,
};

const CONSTANT_SUM_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    A,
    B,
}

impl Strategy {
    pub fn is_a(self) -> bool {
        self == Strategy::A
    }
}

/// Per-layer payoffs `a_i` (both play A) and `b_i` (both play B).
///
/// All payoffs are positive and `a_i + b_i` is the same in every layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffVector {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PayoffVector {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Shape {
                left: a.len(),
                right: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::domain("payoff vectors need at least one layer"));
        }
        for (i, (&ai, &bi)) in a.iter().zip(&b).enumerate() {
            if !(ai > 0.0 && ai.is_finite()) || !(bi > 0.0 && bi.is_finite()) {
                return Err(Error::domain(format!(
                    "payoffs must be positive and finite (layer {i}: a={ai}, b={bi})"
                )));
            }
        }
        let total = a[0] + b[0];
        for (i, (&ai, &bi)) in a.iter().zip(&b).enumerate().skip(1) {
            if ((ai + bi) - total).abs() > CONSTANT_SUM_RTOL * total {
                return Err(Error::domain(format!(
                    "payoff sum a+b must be equal in all layers: layer {i} has {} but layer 0 has {total}",
                    ai + bi
                )));
            }
        }
        Ok(PayoffVector { a, b })
    }

    /// The same `(a, b)` pair replicated over `layers` layers.
    pub fn uniform(a: f64, b: f64, layers: usize) -> Result<Self> {
        PayoffVector::new(vec![a; layers], vec![b; layers])
    }

    pub fn layers(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// The common per-layer sum `a_1 + b_1`.
    pub fn layer_total(&self) -> f64 {
        self.a[0] + self.b[0]
    }

    /// `Some((a, b))` when every layer carries identical payoffs.
    pub fn as_uniform(&self) -> Option<(f64, f64)> {
        let (a0, b0) = (self.a[0], self.b[0]);
        let same = self.a.iter().all(|&x| x == a0) && self.b.iter().all(|&x| x == b0);
        same.then_some((a0, b0))
    }
}

/// Which comparison a node uses to decide whether to switch to A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Total payoff summed over all layers.
    Sum,
    /// A must pay at least as well in every layer.
    Dominant,
    /// Payoffs in a single uniformly drawn layer, redrawn every round.
    Random,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Sum, Rule::Dominant, Rule::Random];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Sum => "sum",
            Rule::Dominant => "dominant",
            Rule::Random => "random",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Rule::Sum),
            "dominant" => Ok(Rule::Dominant),
            "random" => Ok(Rule::Random),
            other => Err(Error::domain(format!(
                "unknown rule '{other}' (expected sum, dominant or random)"
            ))),
        }
    }
}

/// Strategy of every node plus the seed flags, which pin a node to A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyState {
    strategy: Vec<Strategy>,
    is_seed: Vec<bool>,
}

impl StrategyState {
    /// All nodes on B except `seeds`, which play A.
    pub fn from_seeds(nodes: usize, seeds: &[usize]) -> Result<Self> {
        let mut strategy = vec![Strategy::B; nodes];
        let mut is_seed = vec![false; nodes];
        for &s in seeds {
            if s >= nodes {
                return Err(Error::Index {
                    what: "seed",
                    index: s,
                    limit: nodes,
                });
            }
            strategy[s] = Strategy::A;
            is_seed[s] = true;
        }
        Ok(StrategyState { strategy, is_seed })
    }

    /// Build a state directly. Seeds must play A.
    pub fn from_parts(strategy: Vec<Strategy>, is_seed: Vec<bool>) -> Result<Self> {
        if strategy.len() != is_seed.len() {
            return Err(Error::Shape {
                left: strategy.len(),
                right: is_seed.len(),
            });
        }
        if let Some(u) = (0..strategy.len()).find(|&u| is_seed[u] && !strategy[u].is_a()) {
            return Err(Error::domain(format!("seed {u} does not play A")));
        }
        Ok(StrategyState { strategy, is_seed })
    }

    pub fn nodes(&self) -> usize {
        self.strategy.len()
    }

    #[inline]
    pub fn strategy(&self, u: usize) -> Strategy {
        self.strategy[u]
    }

    pub fn is_seed(&self, u: usize) -> bool {
        self.is_seed[u]
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategy
    }

    pub fn adopters(&self) -> usize {
        self.strategy.iter().filter(|s| s.is_a()).count()
    }

    /// True if every A-node here also plays A in `other`.
    pub fn is_subset_of(&self, other: &StrategyState) -> bool {
        self.strategy.len() == other.strategy.len()
            && self
                .strategy
                .iter()
                .zip(&other.strategy)
                .all(|(x, y)| !x.is_a() || y.is_a())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payoff_constant_sum_is_enforced() {
        assert!(PayoffVector::new(vec![2.0, 2.0], vec![1.0, 1.0]).is_ok());
        assert!(PayoffVector::new(vec![2.0, 1.5], vec![1.0, 1.5]).is_ok());
        assert!(matches!(
            PayoffVector::new(vec![2.0, 3.0], vec![1.0, 1.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            PayoffVector::new(vec![2.0], vec![1.0, 1.0]),
            Err(Error::Shape { .. })
        ));
        assert!(PayoffVector::new(vec![0.0], vec![1.0]).is_err());
        assert!(PayoffVector::new(vec![3.0], vec![-0.5]).is_err());
        // within relative tolerance
        assert!(PayoffVector::new(vec![0.1 + 0.2, 0.3], vec![0.7, 0.7]).is_ok());
    }

    #[test]
    fn uniform_detection() {
        let p = PayoffVector::uniform(2.0, 1.0, 3).unwrap();
        assert_eq!(p.as_uniform(), Some((2.0, 1.0)));
        let q = PayoffVector::new(vec![2.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(q.as_uniform(), None);
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in Rule::ALL {
            assert_eq!(rule.name().parse::<Rule>().unwrap(), rule);
        }
        assert!("majority".parse::<Rule>().is_err());
    }

    #[test]
    fn seeds_play_a() {
        let s = StrategyState::from_seeds(4, &[1, 3]).unwrap();
        assert_eq!(s.adopters(), 2);
        assert!(s.is_seed(3) && s.strategy(3).is_a());
        assert!(StrategyState::from_seeds(4, &[4]).is_err());
        assert!(StrategyState::from_parts(vec![Strategy::B], vec![true]).is_err());
    }
}
