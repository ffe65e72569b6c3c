//! Replicated parameter sweeps over the diffusion model.
//!
//! Each `(grid index, replicate)` work item owns RNG streams derived from
//! the sweep seed, so results do not depend on how rayon schedules them.

use std::fmt;

use rayon::prelude::*;

use crate::analytics::{cascade_lower_bound, AnalyticParams};
use crate::error::{Error, Result};
use crate::game::{
    run, seed_count, select_seeds, Diffusion, DiffusionTrace, PayoffVector, Rule, TerminalStatus,
};
use crate::graph::{generate_er_multiplex, GenParams, MultiplexNetwork};
use crate::streams::{derive_seed, purpose};

pub const DEFAULT_MAX_STEPS: usize = 50;
pub const DEFAULT_SAMPLES: usize = 20;

/// Phase boundaries as fractions of `n`.
pub const EPIDEMIC_A_FRACTION: f64 = 0.99;
pub const EPIDEMIC_B_MARGIN: f64 = 0.01;

/// One fully specified simulation setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub nodes: usize,
    pub layers: usize,
    pub edge_prob: f64,
    pub payoffs: PayoffVector,
    pub q0: f64,
    pub rule: Rule,
}

impl Scenario {
    /// n = 500, two layers, p = 0.1, a = 2, b = 1, a quarter of nodes seeded.
    pub fn reference() -> Self {
        Scenario {
            nodes: 500,
            layers: 2,
            edge_prob: 0.1,
            payoffs: PayoffVector::uniform(2.0, 1.0, 2).expect("valid payoffs"),
            q0: 0.25,
            rule: Rule::Sum,
        }
    }

    pub fn validate(&self) -> Result<()> {
        GenParams {
            nodes: self.nodes,
            layers: self.layers,
            edge_prob: self.edge_prob,
            rng_seed: 0,
        }
        .validate()?;
        if self.payoffs.layers() != self.layers {
            return Err(Error::Shape {
                left: self.payoffs.layers(),
                right: self.layers,
            });
        }
        seed_count(self.nodes, self.q0).map(|_| ())
    }

    pub fn analytic(&self) -> Result<AnalyticParams> {
        AnalyticParams::new(
            self.nodes,
            self.edge_prob,
            self.layers,
            self.payoffs.clone(),
            self.q0,
        )
    }

    fn gen_params(&self, rng_seed: u64) -> GenParams {
        GenParams {
            nodes: self.nodes,
            layers: self.layers,
            edge_prob: self.edge_prob,
            rng_seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweptParameter {
    SeedFraction,
    LayerCount,
    EdgeProbability,
    Rule,
}

impl SweptParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweptParameter::SeedFraction => "seed_fraction",
            SweptParameter::LayerCount => "layer_count",
            SweptParameter::EdgeProbability => "edge_probability",
            SweptParameter::Rule => "rule",
        }
    }

    /// Grid used when none is given.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            SweptParameter::SeedFraction | SweptParameter::Rule => {
                (1..=10).map(|i| i as f64 * 0.05).collect()
            }
            SweptParameter::LayerCount => vec![1.0, 2.0, 3.0, 4.0],
            SweptParameter::EdgeProbability => (1..=25).map(|i| i as f64 * 0.02).collect(),
        }
    }
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub swept: SweptParameter,
    pub grid: Vec<f64>,
    pub samples: usize,
    pub max_steps: usize,
    pub rng_seed: u64,
}

impl SweepSpec {
    pub fn new(base: Scenario, swept: SweptParameter, grid: Vec<f64>) -> Self {
        SweepSpec {
            base,
            swept,
            grid,
            samples: DEFAULT_SAMPLES,
            max_steps: DEFAULT_MAX_STEPS,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::domain("sweep grid is empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sweep grid contains a non-finite value"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("sweep grid must be strictly increasing"));
        }
        if self.samples == 0 {
            return Err(Error::domain("samples must be at least 1"));
        }
        if self.max_steps == 0 {
            return Err(Error::domain("max_steps must be at least 1"));
        }
        Ok(())
    }

    /// Scenario at one grid value.
    fn scenario_at(&self, value: f64) -> Result<Scenario> {
        let mut s = self.base.clone();
        match self.swept {
            SweptParameter::SeedFraction | SweptParameter::Rule => s.q0 = value,
            SweptParameter::EdgeProbability => s.edge_prob = value,
            SweptParameter::LayerCount => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::domain(format!(
                        "layer count {value} is not a positive integer"
                    )));
                }
                let (a, b) = s.payoffs.as_uniform().ok_or_else(|| {
                    Error::domain("a layer-count sweep needs identical payoffs in every layer")
                })?;
                s.layers = value as usize;
                s.payoffs = PayoffVector::uniform(a, b, s.layers)?;
            }
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLabel {
    Adopting,
    EpidemicA,
    BackingToB,
    EpidemicB,
}

impl PhaseLabel {
    pub fn name(self) -> &'static str {
        match self {
            PhaseLabel::Adopting => "adopting",
            PhaseLabel::EpidemicA => "epidemic_A",
            PhaseLabel::BackingToB => "backing_to_B",
            PhaseLabel::EpidemicB => "epidemic_B",
        }
    }

    fn rank(self) -> u8 {
        match self {
            PhaseLabel::Adopting => 0,
            PhaseLabel::EpidemicA => 1,
            PhaseLabel::BackingToB => 2,
            PhaseLabel::EpidemicB => 3,
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Label a mean final adopter count. Mixed outcomes are `Adopting` until the
/// sweep has produced its first `EpidemicA` point and `BackingToB` after.
pub fn classify_phase(
    mean_final_count: f64,
    seed_count: usize,
    nodes: usize,
    after_epidemic_a: bool,
) -> Result<PhaseLabel> {
    let n = nodes as f64;
    let seeds = seed_count as f64;
    let slack = 1e-9 * n.max(1.0);
    if seed_count > nodes || mean_final_count < seeds - slack || mean_final_count > n + slack {
        return Err(Error::domain(format!(
            "phase classification needs seeds <= mean <= n (seeds={seed_count}, mean={mean_final_count}, n={nodes})"
        )));
    }
    Ok(if mean_final_count >= EPIDEMIC_A_FRACTION * n {
        PhaseLabel::EpidemicA
    } else if mean_final_count <= seeds + EPIDEMIC_B_MARGIN * n {
        PhaseLabel::EpidemicB
    } else if after_epidemic_a {
        PhaseLabel::BackingToB
    } else {
        PhaseLabel::Adopting
    })
}

/// Label a whole sweep in grid order.
pub fn classify_sequence(
    mean_counts: &[f64],
    seed_count: usize,
    nodes: usize,
) -> Result<Vec<PhaseLabel>> {
    let mut seen_a = false;
    mean_counts
        .iter()
        .map(|&m| {
            let label = classify_phase(m, seed_count, nodes, seen_a)?;
            seen_a |= label == PhaseLabel::EpidemicA;
            Ok(label)
        })
        .collect()
}

/// True when labels never step back in the order
/// adopting → epidemic_A → backing_to_B → epidemic_B.
pub fn phases_in_order(labels: &[PhaseLabel]) -> bool {
    labels.windows(2).all(|w| w[0].rank() <= w[1].rank())
}

/// Aggregates for one grid value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub seed_count: usize,
    pub nodes: usize,
    pub mean_final_fraction: f64,
    pub std_final_fraction: f64,
    pub samples: usize,
    pub mean_steps: f64,
    pub complete_cascades: usize,
    pub fixed_points: usize,
    pub step_limits: usize,
    pub phase: Option<PhaseLabel>,
    /// Analytic lower bound at `max_steps`, seed-fraction sweeps only.
    pub bound: Option<f64>,
}

impl SweepPoint {
    pub fn mean_final_count(&self) -> f64 {
        self.mean_final_fraction * self.nodes as f64
    }

    fn aggregate(value: f64, scenario: &Scenario, traces: &[DiffusionTrace]) -> Result<Self> {
        let k = traces.len() as f64;
        let fractions: Vec<f64> = traces.iter().map(DiffusionTrace::final_fraction).collect();
        let mean = fractions.iter().sum::<f64>() / k;
        let var = if traces.len() > 1 {
            fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        let count = |status| {
            traces
                .iter()
                .filter(|t| t.terminal_status == status)
                .count()
        };
        Ok(SweepPoint {
            value,
            seed_count: seed_count(scenario.nodes, scenario.q0)?,
            nodes: scenario.nodes,
            mean_final_fraction: mean,
            std_final_fraction: var.sqrt(),
            samples: traces.len(),
            mean_steps: traces.iter().map(|t| t.steps_run as f64).sum::<f64>() / k,
            complete_cascades: count(TerminalStatus::CompleteCascade),
            fixed_points: count(TerminalStatus::FixedPoint),
            step_limits: count(TerminalStatus::StepLimit),
            phase: None,
            bound: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweptParameter,
    pub rule: Rule,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean_final_fraction).collect()
    }

    pub fn phases(&self) -> Vec<PhaseLabel> {
        self.points.iter().filter_map(|p| p.phase).collect()
    }

    /// Average of the mean final fractions over the grid.
    pub fn grid_average(&self) -> f64 {
        self.means().iter().sum::<f64>() / self.points.len() as f64
    }
}

/// Network and seed set of one replicate.
struct Instance {
    net: MultiplexNetwork,
    seeds: Vec<usize>,
    rule_seed: u64,
}

fn instance(scenario: &Scenario, rng_seed: u64, grid: usize, rep: usize) -> Result<Instance> {
    let (g, r) = (grid as u64, rep as u64);
    let net =
        generate_er_multiplex(&scenario.gen_params(derive_seed(rng_seed, g, r, purpose::NETWORK)))?;
    let seeds = select_seeds(
        scenario.nodes,
        scenario.q0,
        derive_seed(rng_seed, g, r, purpose::SEEDS),
    )?;
    Ok(Instance {
        net,
        seeds,
        rule_seed: derive_seed(rng_seed, g, r, purpose::RULE),
    })
}

type GridTraces = Vec<Vec<Vec<DiffusionTrace>>>;

/// Run every `(grid point, replicate)` for the given rules on shared
/// instances. Returns traces indexed `[rule][grid][replicate]`.
fn run_grid(spec: &SweepSpec, rules: &[Rule]) -> Result<(Vec<Scenario>, GridTraces)> {
    spec.validate()?;
    let scenarios = spec
        .grid
        .iter()
        .map(|&v| spec.scenario_at(v))
        .collect::<Result<Vec<_>>>()?;
    let items: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|g| (0..spec.samples).map(move |r| (g, r)))
        .collect();
    let per_item: Vec<Vec<DiffusionTrace>> = items
        .par_iter()
        .map(|&(g, r)| {
            let sc = &scenarios[g];
            let inst = instance(sc, spec.rng_seed, g, r)?;
            rules
                .iter()
                .map(|&rule| {
                    run(
                        &inst.net,
                        &inst.seeds,
                        &sc.payoffs,
                        rule,
                        spec.max_steps,
                        inst.rule_seed,
                    )
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut out = vec![vec![Vec::with_capacity(spec.samples); scenarios.len()]; rules.len()];
    for (&(g, _), traces) in items.iter().zip(per_item) {
        for (ri, t) in traces.into_iter().enumerate() {
            out[ri][g].push(t);
        }
    }
    Ok((scenarios, out))
}

fn sweep_single(spec: &SweepSpec) -> Result<SweepResult> {
    let rule = spec.base.rule;
    let (scenarios, traces) = run_grid(spec, &[rule])?;
    let points = spec
        .grid
        .iter()
        .zip(&scenarios)
        .zip(&traces[0])
        .map(|((&v, sc), t)| SweepPoint::aggregate(v, sc, t))
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        parameter: spec.swept,
        rule,
        points,
    })
}

fn expect_param(spec: &SweepSpec, want: SweptParameter) -> Result<()> {
    if spec.swept != want {
        return Err(Error::domain(format!(
            "expected a {} sweep, got {}",
            want, spec.swept
        )));
    }
    Ok(())
}

/// Final adopter fraction against seed fraction, each point carrying the
/// analytic lower bound at `max_steps` with `α = P(l, q0)`.
pub fn sweep_seed_fraction(spec: &SweepSpec) -> Result<SweepResult> {
    expect_param(spec, SweptParameter::SeedFraction)?;
    let mut result = sweep_single(spec)?;
    for p in &mut result.points {
        let sc = spec.scenario_at(p.value)?;
        // the Poisson estimate is undefined for p = 0 or n = 1
        if let Ok(ap) = sc.analytic() {
            p.bound = Some(
                *cascade_lower_bound(&ap, spec.max_steps)?
                    .values
                    .last()
                    .unwrap(),
            );
        }
    }
    Ok(result)
}

/// Final adopter fraction against layer count, payoffs replicated per layer.
pub fn sweep_layers(spec: &SweepSpec) -> Result<SweepResult> {
    expect_param(spec, SweptParameter::LayerCount)?;
    sweep_single(spec)
}

/// Final adopter fraction against edge probability, with phase labels.
pub fn sweep_edge_probability(spec: &SweepSpec) -> Result<SweepResult> {
    expect_param(spec, SweptParameter::EdgeProbability)?;
    let mut result = sweep_single(spec)?;
    let counts: Vec<f64> = result
        .points
        .iter()
        .map(SweepPoint::mean_final_count)
        .collect();
    let seeds = seed_count(spec.base.nodes, spec.base.q0)?;
    let labels = classify_sequence(&counts, seeds, spec.base.nodes)?;
    for (p, l) in result.points.iter_mut().zip(labels) {
        p.phase = Some(l);
    }
    Ok(result)
}

/// Seed-fraction curves for all three rules on identical networks and seed
/// sets. Results come back in `Rule::ALL` order.
pub fn compare_strategies(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    if !matches!(
        spec.swept,
        SweptParameter::SeedFraction | SweptParameter::Rule
    ) {
        return Err(Error::domain("rule comparison sweeps the seed fraction"));
    }
    let (scenarios, traces) = run_grid(spec, &Rule::ALL)?;
    Rule::ALL
        .iter()
        .zip(traces)
        .map(|(&rule, per_grid)| {
            let points = spec
                .grid
                .iter()
                .zip(&scenarios)
                .zip(&per_grid)
                .map(|((&v, sc), t)| SweepPoint::aggregate(v, sc, t))
                .collect::<Result<_>>()?;
            Ok(SweepResult {
                parameter: SweptParameter::Rule,
                rule,
                points,
            })
        })
        .collect()
}

/// Dispatch on the swept parameter. Rule sweeps return three results.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    match spec.swept {
        SweptParameter::SeedFraction => sweep_seed_fraction(spec).map(|r| vec![r]),
        SweptParameter::LayerCount => sweep_layers(spec).map(|r| vec![r]),
        SweptParameter::EdgeProbability => sweep_edge_probability(spec).map(|r| vec![r]),
        SweptParameter::Rule => compare_strategies(spec),
    }
}

/// Run the sum and dominant rules side by side and check, after every
/// round, that the dominant adopters are a subset of the sum adopters.
pub fn dominant_within_sum(
    net: &MultiplexNetwork,
    seeds: &[usize],
    pay: &PayoffVector,
    rounds: usize,
) -> Result<bool> {
    let mut sum = Diffusion::new(net, pay, Rule::Sum, seeds, 0)?;
    let mut dom = Diffusion::new(net, pay, Rule::Dominant, seeds, 0)?;
    for _ in 0..rounds {
        if !dom.state().is_subset_of(sum.state()) {
            return Ok(false);
        }
        let (a, b) = (sum.advance(), dom.advance());
        if a == 0 && b == 0 {
            break;
        }
    }
    Ok(dom.state().is_subset_of(sum.state()))
}

/// Containment check over every replicate instance of a sweep.
pub fn paired_containment(spec: &SweepSpec) -> Result<bool> {
    spec.validate()?;
    let items: Vec<(usize, usize)> = (0..spec.grid.len())
        .flat_map(|g| (0..spec.samples).map(move |r| (g, r)))
        .collect();
    let oks = items
        .par_iter()
        .map(|&(g, r)| {
            let sc = spec.scenario_at(spec.grid[g])?;
            let inst = instance(&sc, spec.rng_seed, g, r)?;
            dominant_within_sum(&inst.net, &inst.seeds, &sc.payoffs, spec.max_steps)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(oks.into_iter().all(|ok| ok))
}
