//! Sequential edge-driven sampler.
//!
//! Each edge is built from two endpoint draws. An existing vertex `i` is
//! drawn with weight `D(i) - alpha`, a brand new vertex with weight
//! `theta + alpha * N`, where `N` is the current vertex count. Degrees are
//! updated after every endpoint, so the first endpoint of an edge already
//! counts when the second one is drawn.
//!
//! Sampling is O(1) amortized through the split
//! `D(i) - alpha = (D(i) - 1) + (1 - alpha)`: the first part is a uniform
//! pick from a list holding vertex `v` exactly `D(v) - 1` times, the second a
//! uniform pick among existing vertices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Multigraph, VertexId};

/// Name of the pseudo-random generator behind [`generate`], for output
/// metadata.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("alpha = {0} must lie in (0, 1)")]
    Alpha(f64),
    #[error("theta = {theta} must exceed -alpha = {}", -alpha)]
    Theta { alpha: f64, theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("at least one edge is required")]
    NoEdges,
    #[error("vertex {choice} is not a legal endpoint when {num_vertices} vertices exist")]
    IllegalChoice { choice: VertexId, num_vertices: u32 },
}

/// Model parameters with `0 < alpha < 1` and `theta > -alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    alpha: f64,
    theta: f64,
}

impl Params {
    pub fn new(alpha: f64, theta: f64) -> Result<Self, ParamsError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ParamsError::Alpha(alpha));
        }
        if !(theta.is_finite() && theta > -alpha) {
            return Err(ParamsError::Theta { alpha, theta });
        }
        Ok(Self { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Degree bookkeeping shared by sampling and likelihood replay.
#[derive(Debug, Clone)]
pub struct EndpointState {
    params: Params,
    degrees: Vec<u64>,
    total_degree: u64,
    repeat_list: Vec<VertexId>,
}

impl EndpointState {
    pub fn new(params: Params) -> Self {
        Self {
            params,
            degrees: Vec::new(),
            total_degree: 0,
            repeat_list: Vec::new(),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn num_vertices(&self) -> u32 {
        self.degrees.len() as u32
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn total_degree(&self) -> u64 {
        self.total_degree
    }

    pub fn repeat_list(&self) -> &[VertexId] {
        &self.repeat_list
    }

    /// The three masses `(total_degree - N, N (1 - alpha), theta + alpha N)`;
    /// they sum to `total_degree + theta`.
    pub fn mixture_masses(&self) -> [f64; 3] {
        let n = self.degrees.len() as f64;
        let a = self.params.alpha;
        [
            (self.total_degree - self.degrees.len() as u64) as f64,
            n * (1.0 - a),
            self.params.theta + a * n,
        ]
    }

    /// Log-probability of drawing `choice` next, without changing state.
    pub fn endpoint_logprob(&self, choice: VertexId) -> Result<f64, GeneratorError> {
        let n = self.num_vertices();
        if choice == 0 || choice > n + 1 {
            return Err(GeneratorError::IllegalChoice {
                choice,
                num_vertices: n,
            });
        }
        if n == 0 {
            return Ok(0.0);
        }
        let Params { alpha, theta } = self.params;
        let total = self.total_degree as f64 + theta;
        let weight = if choice == n + 1 {
            theta + alpha * n as f64
        } else {
            self.degrees[choice as usize - 1] as f64 - alpha
        };
        Ok(weight.ln() - total.ln())
    }

    /// Records `choice` as the next endpoint.
    pub fn observe(&mut self, choice: VertexId) -> Result<(), GeneratorError> {
        let n = self.num_vertices();
        if choice == 0 || choice > n + 1 {
            return Err(GeneratorError::IllegalChoice {
                choice,
                num_vertices: n,
            });
        }
        self.push(choice);
        Ok(())
    }

    fn push(&mut self, choice: VertexId) {
        if choice as usize > self.degrees.len() {
            self.degrees.push(1);
        } else {
            self.degrees[choice as usize - 1] += 1;
            self.repeat_list.push(choice);
        }
        self.total_degree += 1;
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> VertexId {
        let n = self.num_vertices();
        if n == 0 {
            return 1;
        }
        let [repeats, uniform, _] = self.mixture_masses();
        let u = rng.random::<f64>() * (self.total_degree as f64 + self.params.theta);
        if u < repeats {
            self.repeat_list[rng.random_range(0..self.repeat_list.len())]
        } else if u < repeats + uniform {
            rng.random_range(1..=n)
        } else {
            n + 1
        }
    }
}

/// Sampling state: endpoint bookkeeping plus a seeded random stream.
#[derive(Debug, Clone)]
pub struct GeneratorState<R = ChaCha8Rng> {
    state: EndpointState,
    rng: R,
}

impl GeneratorState<ChaCha8Rng> {
    pub fn seeded(params: Params, seed: u64) -> Self {
        Self::with_rng(params, ChaCha8Rng::seed_from_u64(seed))
    }
}

impl<R: Rng> GeneratorState<R> {
    pub fn with_rng(params: Params, rng: R) -> Self {
        Self {
            state: EndpointState::new(params),
            rng,
        }
    }

    /// Draws the next endpoint and records it.
    pub fn sample_endpoint(&mut self) -> VertexId {
        let choice = self.state.draw(&mut self.rng);
        self.state.push(choice);
        choice
    }

    pub fn endpoint_logprob(&self, choice: VertexId) -> Result<f64, GeneratorError> {
        self.state.endpoint_logprob(choice)
    }

    pub fn endpoints(&self) -> &EndpointState {
        &self.state
    }
}

/// Generates an `n`-edge graph. Equal inputs give identical graphs.
pub fn generate(params: Params, n: usize, seed: u64, directed: bool) -> Result<Multigraph, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::NoEdges);
    }
    let mut sampler = GeneratorState::seeded(params, seed);
    let edges = (0..n)
        .map(|_| {
            let u = sampler.sample_endpoint();
            let v = sampler.sample_endpoint();
            (u, v)
        })
        .collect();
    Ok(Multigraph::from_parts(
        edges,
        directed,
        sampler.endpoints().num_vertices(),
    ))
}
