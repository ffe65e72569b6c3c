use super::{PayoffVector, Strategy, StrategyState};
use crate::error::{Error, Result};
use crate::graph::MultiplexNetwork;

/// Reference decision for the sum rule, computed edge by edge.
///
/// Plays the pairwise game against every incident edge twice, once with `u`
/// on A and once on B, accrues total payoffs and picks the better one (A on
/// ties, B when `u` has no edges at all). Used as a test oracle.
pub fn brute_force_decide(
    net: &MultiplexNetwork,
    state: &StrategyState,
    pay: &PayoffVector,
    u: usize,
) -> Result<Strategy> {
    if pay.layers() != net.layers() {
        return Err(Error::Shape {
            left: pay.layers(),
            right: net.layers(),
        });
    }
    let mut payoff_a = 0.0;
    let mut payoff_b = 0.0;
    let mut edges = 0usize;
    for layer in 0..net.layers() {
        for &v in net.neighbors(u, layer)? {
            edges += 1;
            payoff_a += edge_payoff(Strategy::A, state.strategy(v), pay, layer);
            payoff_b += edge_payoff(Strategy::B, state.strategy(v), pay, layer);
        }
    }
    if edges == 0 {
        return Ok(Strategy::B);
    }
    Ok(if payoff_a >= payoff_b {
        Strategy::A
    } else {
        Strategy::B
    })
}

fn edge_payoff(mine: Strategy, theirs: Strategy, pay: &PayoffVector, layer: usize) -> f64 {
    match (mine, theirs) {
        (Strategy::A, Strategy::A) => pay.a()[layer],
        (Strategy::B, Strategy::B) => pay.b()[layer],
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_endpoints_choose_a() {
        let mut net = MultiplexNetwork::empty(3, 1);
        net.insert_edge(0, 0, 1).unwrap();
        net.insert_edge(0, 1, 2).unwrap();
        let pay = PayoffVector::uniform(2.0, 1.0, 1).unwrap();
        let state = StrategyState::from_seeds(3, &[1]).unwrap();
        assert_eq!(
            brute_force_decide(&net, &state, &pay, 0).unwrap(),
            Strategy::A
        );
        assert_eq!(
            brute_force_decide(&net, &state, &pay, 2).unwrap(),
            Strategy::A
        );
    }

    #[test]
    fn isolated_node_stays_b() {
        let net = MultiplexNetwork::empty(2, 2);
        let pay = PayoffVector::uniform(2.0, 1.0, 2).unwrap();
        let state = StrategyState::from_seeds(2, &[1]).unwrap();
        assert_eq!(
            brute_force_decide(&net, &state, &pay, 0).unwrap(),
            Strategy::B
        );
    }
}
