//! Diffusion of an innovation over multiplex social networks, modelled as a
//! networked coordination game played on every layer.
//!
//! - [`graph`]: Erdős–Rényi multiplex networks sharing one node set
//! - [`game`]: payoffs, decision rules and synchronous progressive dynamics
//! - [`analytics`]: Poisson estimates of adoption and a cascade lower bound
//! - [`experiments`]: replicated sweeps and phase classification
//! - [`io`], [`cli`]: edge lists, CSV output and the command-line front end

pub mod analytics;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod game;
pub mod graph;
pub mod io;
pub mod streams;

pub use error::{Error, Result};
pub use game::{PayoffVector, Rule, Strategy};
pub use graph::{GenParams, MultiplexNetwork};
