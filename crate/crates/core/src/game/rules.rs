use super::{PayoffVector, Strategy, StrategyState};
use crate::error::{Error, Result};
use crate::graph::MultiplexNetwork;

/// Neighbours of one node in one layer, split by strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LayerCount {
    pub a: usize,
    pub b: usize,
}

impl LayerCount {
    pub fn new(a: usize, b: usize) -> Self {
        LayerCount { a, b }
    }

    pub fn degree(self) -> usize {
        self.a + self.b
    }

    /// Fraction of neighbours on A, `None` for an empty layer.
    pub fn fraction_a(self) -> Option<f64> {
        (self.degree() > 0).then(|| self.a as f64 / self.degree() as f64)
    }
}

/// Per-layer strategy counts among a focal node's neighbours.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NeighborTally {
    pub layers: Vec<LayerCount>,
}

impl NeighborTally {
    pub fn new(layers: Vec<LayerCount>) -> Self {
        NeighborTally { layers }
    }

    pub fn isolated(&self) -> bool {
        self.layers.iter().all(|c| c.degree() == 0)
    }

    pub fn total_degree(&self) -> usize {
        self.layers.iter().map(|c| c.degree()).sum()
    }

    pub fn total_a(&self) -> usize {
        self.layers.iter().map(|c| c.a).sum()
    }
}

/// Payoffs `r_i` (for playing A) and `s_i` (for playing B) per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTally {
    pub layers: Vec<(f64, f64)>,
    pub r: f64,
    pub s: f64,
}

impl PayoffTally {
    pub fn new(tally: &NeighborTally, pay: &PayoffVector) -> Result<Self> {
        check_shape(tally, pay)?;
        let layers: Vec<(f64, f64)> = tally
            .layers
            .iter()
            .zip(pay.a().iter().zip(pay.b()))
            .map(|(c, (&a, &b))| (c.a as f64 * a, c.b as f64 * b))
            .collect();
        let r = layers.iter().map(|l| l.0).sum();
        let s = layers.iter().map(|l| l.1).sum();
        Ok(PayoffTally { layers, r, s })
    }
}

pub fn tally_neighbors(
    net: &MultiplexNetwork,
    state: &StrategyState,
    u: usize,
) -> Result<NeighborTally> {
    if state.nodes() != net.nodes() {
        return Err(Error::Shape {
            left: state.nodes(),
            right: net.nodes(),
        });
    }
    if u >= net.nodes() {
        return Err(Error::Index {
            what: "node",
            index: u,
            limit: net.nodes(),
        });
    }
    let layers = (0..net.layers())
        .map(|layer| count_layer(net, state.strategies(), u, layer))
        .collect();
    Ok(NeighborTally::new(layers))
}

#[inline]
pub(super) fn count_layer(
    net: &MultiplexNetwork,
    strategies: &[Strategy],
    u: usize,
    layer: usize,
) -> LayerCount {
    let nbrs = net.neighbors_raw(u, layer);
    let a = nbrs.iter().filter(|&&v| strategies[v].is_a()).count();
    LayerCount::new(a, nbrs.len() - a)
}

fn check_shape(tally: &NeighborTally, pay: &PayoffVector) -> Result<()> {
    if tally.layers.len() != pay.layers() {
        return Err(Error::Shape {
            left: tally.layers.len(),
            right: pay.layers(),
        });
    }
    Ok(())
}

#[inline]
fn layer_prefers_a(count: LayerCount, a: f64, b: f64) -> bool {
    count.a as f64 * a >= count.b as f64 * b
}

fn choose(adopt: bool) -> Strategy {
    if adopt {
        Strategy::A
    } else {
        Strategy::B
    }
}

/// A iff the A-payoff summed over layers is at least the B-payoff.
/// Isolated nodes stay on B.
pub fn decide_sum(tally: &NeighborTally, pay: &PayoffVector) -> Result<Strategy> {
    check_shape(tally, pay)?;
    Ok(sum_rule(tally, pay))
}

#[inline]
pub(super) fn sum_rule(tally: &NeighborTally, pay: &PayoffVector) -> Strategy {
    if tally.isolated() {
        return Strategy::B;
    }
    let (mut r, mut s) = (0.0, 0.0);
    for (c, (&a, &b)) in tally.layers.iter().zip(pay.a().iter().zip(pay.b())) {
        r += c.a as f64 * a;
        s += c.b as f64 * b;
    }
    choose(r >= s)
}

/// A iff A pays at least as well as B in every layer. Isolated nodes stay
/// on B; layers without neighbours pass trivially.
pub fn decide_dominant(tally: &NeighborTally, pay: &PayoffVector) -> Result<Strategy> {
    check_shape(tally, pay)?;
    Ok(dominant_rule(tally, pay))
}

#[inline]
pub(super) fn dominant_rule(tally: &NeighborTally, pay: &PayoffVector) -> Strategy {
    if tally.isolated() {
        return Strategy::B;
    }
    let all = tally
        .layers
        .iter()
        .zip(pay.a().iter().zip(pay.b()))
        .all(|(&c, (&a, &b))| layer_prefers_a(c, a, b));
    choose(all)
}

/// A iff A pays at least as well as B in `chosen_layer`, which must have at
/// least one neighbour.
pub fn decide_random(
    tally: &NeighborTally,
    pay: &PayoffVector,
    chosen_layer: usize,
) -> Result<Strategy> {
    check_shape(tally, pay)?;
    if chosen_layer >= pay.layers() {
        return Err(Error::Index {
            what: "layer",
            index: chosen_layer,
            limit: pay.layers(),
        });
    }
    Ok(single_layer_rule(
        tally.layers[chosen_layer],
        pay,
        chosen_layer,
    ))
}

#[inline]
pub(super) fn single_layer_rule(count: LayerCount, pay: &PayoffVector, layer: usize) -> Strategy {
    choose(count.degree() > 0 && layer_prefers_a(count, pay.a()[layer], pay.b()[layer]))
}
