//! Multiplex networks: one node set shared by `l` undirected layers.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::streams;

/// Parameters of an Erdős–Rényi multiplex network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub nodes: usize,
    pub layers: usize,
    pub edge_prob: f64,
    pub rng_seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::domain("node count must be at least 1"));
        }
        if self.layers == 0 {
            return Err(Error::domain("layer count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return Err(Error::domain(format!(
                "edge probability {} is outside [0, 1]",
                self.edge_prob
            )));
        }
        Ok(())
    }
}

/// Per-layer sorted adjacency lists over nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplexNetwork {
    nodes: usize,
    adjacency: Vec<Vec<Vec<usize>>>,
}

impl MultiplexNetwork {
    /// Network with `nodes` nodes and `layers` empty layers.
    pub fn empty(nodes: usize, layers: usize) -> Self {
        MultiplexNetwork {
            nodes,
            adjacency: vec![vec![Vec::new(); nodes]; layers],
        }
    }

    /// Wrap raw adjacency lists without checking them; see [`validate`].
    pub fn from_adjacency(nodes: usize, adjacency: Vec<Vec<Vec<usize>>>) -> Self {
        MultiplexNetwork { nodes, adjacency }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn layers(&self) -> usize {
        self.adjacency.len()
    }

    /// Sorted neighbours of `u` in layer `layer`.
    pub fn neighbors(&self, u: usize, layer: usize) -> Result<&[usize]> {
        self.check_layer(layer)?;
        self.check_node(u)?;
        Ok(&self.adjacency[layer][u])
    }

    /// Unchecked neighbour access for hot loops; panics on bad indices.
    #[inline]
    pub(crate) fn neighbors_raw(&self, u: usize, layer: usize) -> &[usize] {
        &self.adjacency[layer][u]
    }

    pub fn degree(&self, u: usize, layer: usize) -> Result<usize> {
        self.neighbors(u, layer).map(<[usize]>::len)
    }

    pub fn has_edge(&self, layer: usize, u: usize, v: usize) -> Result<bool> {
        self.check_node(v)?;
        Ok(self.neighbors(u, layer)?.binary_search(&v).is_ok())
    }

    /// Insert undirected edge `(u, v)` into `layer`. Returns false if it
    /// was already present.
    pub fn insert_edge(&mut self, layer: usize, u: usize, v: usize) -> Result<bool> {
        self.check_layer(layer)?;
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::InvalidNetwork(format!(
                "self-loop on node {u} in layer {layer}"
            )));
        }
        let adj = &mut self.adjacency[layer];
        match adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                adj[u].insert(pos, v);
                let pos = adj[v].binary_search(&u).unwrap_err();
                adj[v].insert(pos, u);
                Ok(true)
            }
        }
    }

    /// Edges of one layer as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self, layer: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency[layer]
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| {
                nbrs.iter()
                    .copied()
                    .filter(move |&v| v > u)
                    .map(move |v| (u, v))
            })
    }

    pub fn edge_count(&self, layer: usize) -> usize {
        self.adjacency[layer].iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self, layer: usize) -> f64 {
        if self.nodes == 0 {
            return 0.0;
        }
        2.0 * self.edge_count(layer) as f64 / self.nodes as f64
    }

    fn check_node(&self, u: usize) -> Result<()> {
        if u >= self.nodes {
            return Err(Error::Index {
                what: "node",
                index: u,
                limit: self.nodes,
            });
        }
        Ok(())
    }

    fn check_layer(&self, layer: usize) -> Result<()> {
        if layer >= self.layers() {
            return Err(Error::Index {
                what: "layer",
                index: layer,
                limit: self.layers(),
            });
        }
        Ok(())
    }
}

/// Sample an ER multiplex network. Each layer draws from its own stream
/// keyed by `(rng_seed, layer)`, so layers are independent and adding a
/// layer leaves the earlier ones untouched.
pub fn generate_er_multiplex(params: &GenParams) -> Result<MultiplexNetwork> {
    params.validate()?;
    let n = params.nodes;
    let adjacency = (0..params.layers)
        .map(|layer| {
            let mut rng = streams::layer_rng(params.rng_seed, layer);
            let mut adj = vec![Vec::new(); n];
            // Pushing in (u, v) lexicographic order keeps every list sorted.
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen::<f64>() < params.edge_prob {
                        adj[u].push(v);
                        adj[v].push(u);
                    }
                }
            }
            adj
        })
        .collect();
    Ok(MultiplexNetwork {
        nodes: n,
        adjacency,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LayerSize {
        layer: usize,
        slots: usize,
    },
    OutOfRange {
        layer: usize,
        u: usize,
        v: usize,
    },
    SelfLoop {
        layer: usize,
        u: usize,
    },
    Duplicate {
        layer: usize,
        u: usize,
        v: usize,
    },
    Unsorted {
        layer: usize,
        u: usize,
    },
    /// `v` is listed as a neighbour of `u` but not the reverse.
    Asymmetric {
        layer: usize,
        u: usize,
        v: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::LayerSize { layer, slots } => {
                write!(f, "layer {layer} has {slots} node slots")
            }
            Violation::OutOfRange { layer, u, v } => {
                write!(
                    f,
                    "layer {layer}: node {u} lists out-of-range neighbour {v}"
                )
            }
            Violation::SelfLoop { layer, u } => write!(f, "layer {layer}: self-loop on {u}"),
            Violation::Duplicate { layer, u, v } => {
                write!(f, "layer {layer}: node {u} lists {v} more than once")
            }
            Violation::Unsorted { layer, u } => {
                write!(f, "layer {layer}: neighbours of {u} are not sorted")
            }
            Violation::Asymmetric { layer, u, v } => {
                write!(f, "layer {layer}: edge {u}->{v} has no reverse {v}->{u}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every structural invariant and report all violations found.
pub fn validate(net: &MultiplexNetwork) -> ValidationReport {
    let mut violations = Vec::new();
    let n = net.nodes;
    for (layer, adj) in net.adjacency.iter().enumerate() {
        if adj.len() != n {
            violations.push(Violation::LayerSize {
                layer,
                slots: adj.len(),
            });
            continue;
        }
        for (u, nbrs) in adj.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] > w[1]) {
                violations.push(Violation::Unsorted { layer, u });
            }
            for (k, &v) in nbrs.iter().enumerate() {
                if v >= n {
                    violations.push(Violation::OutOfRange { layer, u, v });
                    continue;
                }
                if v == u {
                    violations.push(Violation::SelfLoop { layer, u });
                    continue;
                }
                if nbrs[..k].contains(&v) {
                    violations.push(Violation::Duplicate { layer, u, v });
                    continue;
                }
                if !adj[v].contains(&u) {
                    violations.push(Violation::Asymmetric { layer, u, v });
                }
            }
        }
    }
    ValidationReport { violations }
}
