//! Edge-driven random multigraphs with power-law degrees.
//!
//! A network grows one edge at a time. Each endpoint either lands on an
//! existing vertex, with weight `degree - alpha`, or on a new vertex, with
//! weight `theta + alpha * (vertex count)`. Degrees follow a power law with
//! exponent `1 + alpha`, between 1 and 2.
//!
//! The crate covers:
//!
//! - [`generator`]: seeded sampling of the model.
//! - [`likelihood`]: the exact closed-form probability of a graph, the
//!   equivalent sequential product, and a small-n enumeration oracle.
//! - [`estimation`]: power-law exponent estimators, moment and maximum
//!   likelihood fits, the expected vertex count and the limiting degree law.
//! - [`graph`]: the multigraph model, degree histograms, projection to simple
//!   graphs and edge-list I/O.
//! - [`harness`]: Monte Carlo experiments with CSV output.
//! - [`numerics`]: log-gamma, ascending factorials, bisection and a 2-D
//!   Nelder–Mead.
//!
//! ```
//! use edgenet::{generator::{generate, Params}, likelihood::log_prob_closed};
//!
//! let params = Params::new(0.5, 1.0).unwrap();
//! let g = generate(params, 100, 7, false).unwrap();
//! let lp = log_prob_closed(&g, params);
//! assert!(lp < 0.0);
//! ```

pub mod estimation;
pub mod generator;
pub mod graph;
pub mod harness;
pub mod likelihood;
pub mod numerics;

pub use estimation::{FitMethod, FitResult};
pub use generator::{generate, Params};
pub use graph::{DegreeHistogram, Multigraph};
