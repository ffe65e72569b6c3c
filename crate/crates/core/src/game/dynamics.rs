use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::rules::{count_layer, dominant_rule, single_layer_rule, sum_rule};
use super::{LayerCount, NeighborTally, PayoffVector, Rule, Strategy, StrategyState};
use crate::error::{Error, Result};
use crate::graph::MultiplexNetwork;
use crate::streams::LayerDraws;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminalStatus {
    /// Every node plays A.
    CompleteCascade,
    /// A step switched nobody.
    FixedPoint,
    /// `max_steps` ran out first.
    StepLimit,
}

impl TerminalStatus {
    pub fn name(self) -> &'static str {
        match self {
            TerminalStatus::CompleteCascade => "complete_cascade",
            TerminalStatus::FixedPoint => "fixed_point",
            TerminalStatus::StepLimit => "step_limit",
        }
    }
}

impl fmt::Display for TerminalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Adopter counts of one run; entry 0 is the seed count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionTrace {
    pub nodes: usize,
    pub adopters_per_step: Vec<usize>,
    pub terminal_status: TerminalStatus,
    pub steps_run: usize,
}

impl DiffusionTrace {
    pub fn final_adopters(&self) -> usize {
        *self.adopters_per_step.last().expect("trace holds step 0")
    }

    pub fn final_fraction(&self) -> f64 {
        self.final_adopters() as f64 / self.nodes as f64
    }
}

/// Number of seeds for fraction `q0` of `nodes`, rounded half up.
pub fn seed_count(nodes: usize, q0: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&q0) {
        return Err(Error::domain(format!(
            "seed fraction {q0} is outside [0, 1]"
        )));
    }
    Ok(((q0 * nodes as f64 + 0.5).floor() as usize).min(nodes))
}

/// Uniformly random seed set of size `seed_count(nodes, q0)`, sorted.
pub fn select_seeds(nodes: usize, q0: f64, rng_seed: u64) -> Result<Vec<usize>> {
    let k = seed_count(nodes, q0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seeds = rand::seq::index::sample(&mut rng, nodes, k).into_vec();
    seeds.sort_unstable();
    Ok(seeds)
}

fn check_shapes(net: &MultiplexNetwork, state: &StrategyState, pay: &PayoffVector) -> Result<()> {
    if pay.layers() != net.layers() {
        return Err(Error::Shape {
            left: pay.layers(),
            right: net.layers(),
        });
    }
    if state.nodes() != net.nodes() {
        return Err(Error::Shape {
            left: state.nodes(),
            right: net.nodes(),
        });
    }
    Ok(())
}

/// One synchronous round: every B-node reads `old` and the result is
/// written to `next`. Returns the number of B→A switches.
#[allow(clippy::too_many_arguments)]
fn advance_into(
    net: &MultiplexNetwork,
    pay: &PayoffVector,
    rule: Rule,
    draws: &LayerDraws,
    round: u64,
    old: &[Strategy],
    next: &mut [Strategy],
    tally: &mut NeighborTally,
) -> usize {
    let layers = net.layers();
    let mut switched = 0;
    next.copy_from_slice(old);
    for u in 0..old.len() {
        if old[u].is_a() {
            continue;
        }
        let choice = match rule {
            Rule::Random => {
                let layer = draws.layer(round, u, layers);
                single_layer_rule(count_layer(net, old, u, layer), pay, layer)
            }
            Rule::Sum | Rule::Dominant => {
                for (layer, slot) in tally.layers.iter_mut().enumerate() {
                    *slot = count_layer(net, old, u, layer);
                }
                if rule == Rule::Sum {
                    sum_rule(tally, pay)
                } else {
                    dominant_rule(tally, pay)
                }
            }
        };
        if choice.is_a() {
            next[u] = Strategy::A;
            switched += 1;
        }
    }
    switched
}

/// Apply one synchronous round to `state`. Seeds and A-nodes never revert.
/// `round` indexes the random rule's layer draws.
pub fn step(
    net: &MultiplexNetwork,
    state: &StrategyState,
    pay: &PayoffVector,
    rule: Rule,
    draws: &LayerDraws,
    round: u64,
) -> Result<(StrategyState, usize)> {
    check_shapes(net, state, pay)?;
    let mut next = state.strategy.clone();
    let mut tally = NeighborTally::new(vec![LayerCount::default(); net.layers()]);
    let switched = advance_into(
        net,
        pay,
        rule,
        draws,
        round,
        &state.strategy,
        &mut next,
        &mut tally,
    );
    let next = StrategyState {
        strategy: next,
        is_seed: state.is_seed.clone(),
    };
    Ok((next, switched))
}

/// Stepwise driver over a double-buffered state.
pub struct Diffusion<'a> {
    net: &'a MultiplexNetwork,
    pay: &'a PayoffVector,
    rule: Rule,
    draws: LayerDraws,
    state: StrategyState,
    scratch: Vec<Strategy>,
    tally: NeighborTally,
    round: u64,
}

impl<'a> Diffusion<'a> {
    pub fn new(
        net: &'a MultiplexNetwork,
        pay: &'a PayoffVector,
        rule: Rule,
        seeds: &[usize],
        rng_seed: u64,
    ) -> Result<Self> {
        let state = StrategyState::from_seeds(net.nodes(), seeds)?;
        check_shapes(net, &state, pay)?;
        Ok(Diffusion {
            net,
            pay,
            rule,
            draws: LayerDraws::new(rng_seed),
            scratch: state.strategy.clone(),
            tally: NeighborTally::new(vec![LayerCount::default(); net.layers()]),
            state,
            round: 0,
        })
    }

    pub fn state(&self) -> &StrategyState {
        &self.state
    }

    /// Rounds played so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Play one round and return the number of nodes that switched.
    pub fn advance(&mut self) -> usize {
        self.round += 1;
        let switched = advance_into(
            self.net,
            self.pay,
            self.rule,
            &self.draws,
            self.round,
            &self.state.strategy,
            &mut self.scratch,
            &mut self.tally,
        );
        std::mem::swap(&mut self.state.strategy, &mut self.scratch);
        switched
    }
}

/// Play rounds until a complete cascade, a round with no switches, or
/// `max_steps` rounds.
pub fn run(
    net: &MultiplexNetwork,
    seeds: &[usize],
    pay: &PayoffVector,
    rule: Rule,
    max_steps: usize,
    rng_seed: u64,
) -> Result<DiffusionTrace> {
    if max_steps == 0 {
        return Err(Error::domain("max_steps must be at least 1"));
    }
    let n = net.nodes();
    let mut sim = Diffusion::new(net, pay, rule, seeds, rng_seed)?;
    let mut count = sim.state().adopters();
    let mut adopters_per_step = vec![count];
    let mut status = TerminalStatus::StepLimit;
    if count == n {
        status = TerminalStatus::CompleteCascade;
    } else {
        for _ in 0..max_steps {
            let switched = sim.advance();
            count += switched;
            adopters_per_step.push(count);
            if count == n {
                status = TerminalStatus::CompleteCascade;
                break;
            }
            if switched == 0 {
                status = TerminalStatus::FixedPoint;
                break;
            }
        }
    }
    Ok(DiffusionTrace {
        nodes: n,
        steps_run: adopters_per_step.len() - 1,
        adopters_per_step,
        terminal_status: status,
    })
}
