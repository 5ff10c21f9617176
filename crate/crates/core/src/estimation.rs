//! Parameter estimation.
//!
//! Two fits are provided:
//!
//! - [`fit_moment`]: estimate the degree exponent `gamma`, set
//!   `alpha = gamma - 1`, then pick `theta` so that the expected vertex count
//!   [`expected_vertices`] equals the observed one.
//! - [`fit_mle`]: maximize the exact closed-form likelihood over
//!   `(alpha, theta)`.
//!
//! The exponent estimators work on a [`DegreeHistogram`]. The default is the
//! continuous-approximation discrete MLE with `kmin` picked by minimizing the
//! Kolmogorov–Smirnov distance of the fitted tail.

use serde::Serialize;
use thiserror::Error;

use crate::generator::{Params, ParamsError};
use crate::graph::{DegreeHistogram, Multigraph};
use crate::likelihood::GraphSummary;
use crate::numerics::{log_gamma, log_rising, solve_root, NelderMead, NumericsError, RealInterval};

/// Largest `kmin` tried by automatic selection.
pub const AUTO_KMIN_MAX: u64 = 100;

/// Bracket expansion gives up past this `theta`.
pub const THETA_SEARCH_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("degree must be at least 1, got {0}")]
    Degree(u64),
    #[error("alpha = {0} must lie in (0, 1)")]
    Alpha(f64),
    #[error("need at least {needed} distinct degrees >= kmin = {kmin}, found {found}")]
    InsufficientData { kmin: u64, needed: usize, found: usize },
    #[error("every degree >= kmin = {kmin} equals kmin; the exponent estimate diverges")]
    Divergent { kmin: u64 },
    #[error("observed vertex count {observed} must lie in [1, 2n = {max}]")]
    VertexCount { observed: f64, max: u64 },
    #[error("no theta in (-alpha, {THETA_SEARCH_LIMIT:e}] gives {target} expected vertices")]
    Unattainable { target: f64 },
    #[error("estimated exponent {0} is outside the model's range (1, 2)")]
    ExponentOutOfRange(f64),
    #[error("maximum likelihood needs the original multigraph, not its simple projection")]
    SimpleGraphInput,
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Exact limiting degree law `alpha (1 - alpha)^{↑(k-1)} / k!`.
pub fn limit_pmf(k: u64, alpha: f64) -> Result<f64, EstimationError> {
    check_alpha(alpha)?;
    if k < 1 {
        return Err(EstimationError::Degree(k));
    }
    let log = alpha.ln() + log_rising(1.0 - alpha, k - 1)? - log_gamma(k as f64 + 1.0)?;
    Ok(log.exp())
}

/// Large-`k` form of [`limit_pmf`]: `alpha k^{-(alpha+1)} / Gamma(1 - alpha)`.
pub fn limit_pmf_asymptotic(k: u64, alpha: f64) -> Result<f64, EstimationError> {
    check_alpha(alpha)?;
    if k < 1 {
        return Err(EstimationError::Degree(k));
    }
    let log = alpha.ln() - (alpha + 1.0) * (k as f64).ln() - log_gamma(1.0 - alpha)?;
    Ok(log.exp())
}

fn check_alpha(alpha: f64) -> Result<(), EstimationError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(EstimationError::Alpha(alpha))
    }
}

/// Exponent from a least-squares line through `(ln k, ln Pr(degree >= k))`
/// for `k >= kmin`; returns `1 - slope`.
pub fn estimate_gamma_ccdf(hist: &DegreeHistogram, kmin: u64) -> Result<f64, EstimationError> {
    let points: Vec<(f64, f64)> = hist
        .ccdf()
        .into_iter()
        .filter(|&(k, _)| k >= kmin)
        .map(|(k, c)| ((k as f64).ln(), c.ln()))
        .collect();
    if points.len() < 2 {
        return Err(EstimationError::InsufficientData {
            kmin,
            needed: 2,
            found: points.len(),
        });
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        (sxy + (x - mean_x) * (y - mean_y), sxx + (x - mean_x).powi(2))
    });
    Ok(1.0 - sxy / sxx)
}

/// `1 + m / sum ln(k / (kmin - 1/2))` over the `m` vertices with degree
/// `>= kmin`.
pub fn estimate_gamma_mle(hist: &DegreeHistogram, kmin: u64) -> Result<f64, EstimationError> {
    if kmin < 1 {
        return Err(EstimationError::Degree(kmin));
    }
    let shift = kmin as f64 - 0.5;
    let mut m = 0u64;
    let mut log_sum = 0.0;
    let mut distinct = 0;
    for (k, count) in hist.tail(kmin) {
        m += count;
        log_sum += count as f64 * (k as f64 / shift).ln();
        distinct += 1;
    }
    match distinct {
        0 => Err(EstimationError::InsufficientData {
            kmin,
            needed: 1,
            found: 0,
        }),
        1 if hist.count(kmin) > 0 => Err(EstimationError::Divergent { kmin }),
        _ => Ok(1.0 + m as f64 / log_sum),
    }
}

/// Result of automatic `kmin` selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub kmin: u64,
    pub gamma: f64,
    pub ks_distance: f64,
    pub tail_vertices: u64,
}

/// Scans `kmin` in `1..=AUTO_KMIN_MAX` and keeps the MLE fit whose tail is
/// closest to the data in Kolmogorov–Smirnov distance.
pub fn select_kmin(hist: &DegreeHistogram) -> Result<TailFit, EstimationError> {
    let mut best: Option<TailFit> = None;
    for kmin in 1..=AUTO_KMIN_MAX {
        let Ok(gamma) = estimate_gamma_mle(hist, kmin) else {
            continue;
        };
        let (ks_distance, tail_vertices) = ks_distance(hist, kmin, gamma);
        if best.is_none_or(|b| ks_distance < b.ks_distance) {
            best = Some(TailFit {
                kmin,
                gamma,
                ks_distance,
                tail_vertices,
            });
        }
    }
    best.ok_or(EstimationError::Divergent { kmin: 1 })
}

fn ks_distance(hist: &DegreeHistogram, kmin: u64, gamma: f64) -> (f64, u64) {
    let tail: Vec<(u64, u64)> = hist.tail(kmin).collect();
    let m: u64 = tail.iter().map(|t| t.1).sum();
    let shift = kmin as f64 - 0.5;
    let mut at_least = m;
    let mut worst: f64 = 0.0;
    for (k, count) in tail {
        let empirical = at_least as f64 / m as f64;
        let fitted = ((k as f64 - 0.5) / shift).powf(1.0 - gamma);
        worst = worst.max((empirical - fitted).abs());
        at_least -= count;
    }
    (worst, m)
}

/// Which exponent estimator a fit used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaEstimator {
    #[default]
    DiscreteMle,
    CcdfRegression,
}

/// `kmin` choice for exponent estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kmin {
    #[default]
    Auto,
    Fixed(u64),
}

/// Exponent estimate plus the `kmin` it used.
pub fn estimate_gamma(
    hist: &DegreeHistogram,
    estimator: GammaEstimator,
    kmin: Kmin,
) -> Result<(f64, u64), EstimationError> {
    let kmin = match kmin {
        Kmin::Fixed(k) => k,
        Kmin::Auto => {
            let fit = select_kmin(hist)?;
            if estimator == GammaEstimator::DiscreteMle {
                return Ok((fit.gamma, fit.kmin));
            }
            fit.kmin
        }
    };
    let gamma = match estimator {
        GammaEstimator::DiscreteMle => estimate_gamma_mle(hist, kmin)?,
        GammaEstimator::CcdfRegression => estimate_gamma_ccdf(hist, kmin)?,
    };
    Ok((gamma, kmin))
}

/// Asymptotic expected vertex count after `n` edges,
/// `Gamma(theta + 1) / (alpha Gamma(theta + alpha)) (2n)^alpha`.
pub fn expected_vertices(params: Params, n: u64) -> f64 {
    log_expected_vertices(params.alpha(), params.theta(), n).exp()
}

fn log_expected_vertices(alpha: f64, theta: f64, n: u64) -> f64 {
    libm::lgamma(theta + 1.0) - alpha.ln() - libm::lgamma(theta + alpha) + alpha * (2.0 * n as f64).ln()
}

/// The `theta > -alpha` at which [`expected_vertices`] after `n` edges equals
/// `observed`.
pub fn solve_theta(alpha: f64, n: u64, observed: f64) -> Result<f64, EstimationError> {
    check_alpha(alpha)?;
    if !(observed >= 1.0 && observed <= 2.0 * n as f64) {
        return Err(EstimationError::VertexCount {
            observed,
            max: 2 * n,
        });
    }
    let target = observed.ln();
    let f = |theta: f64| log_expected_vertices(alpha, theta, n) - target;

    let lo = -alpha + 1e-12 * alpha.max(1e-3);
    if f(lo) >= 0.0 {
        return Err(EstimationError::Unattainable { target: observed });
    }
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        if hi > THETA_SEARCH_LIMIT {
            return Err(EstimationError::Unattainable { target: observed });
        }
        hi = 2.0 * hi + 1.0;
    }
    let bracket = RealInterval::new(lo, hi)?;
    Ok(solve_root(f, bracket, 1e-12)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Moment,
    Mle,
}

/// Extra detail that does not go into the JSON output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub estimator: Option<GammaEstimator>,
    pub iterations: Option<usize>,
    pub theta_bracket: Option<(f64, f64)>,
    pub start: Option<(f64, f64)>,
}

/// Fitted parameters. Serializes to JSON with keys in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub alpha_hat: f64,
    pub theta_hat: f64,
    pub gamma_hat: f64,
    pub method: FitMethod,
    pub n_edges: u64,
    pub n_vertices: u64,
    pub log_likelihood: Option<f64>,
    pub kmin: Option<u64>,
    pub converged: bool,
    #[serde(skip)]
    pub diagnostics: Diagnostics,
}

impl FitResult {
    pub fn params(&self) -> Result<Params, ParamsError> {
        Params::new(self.alpha_hat, self.theta_hat)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MomentConfig {
    pub estimator: GammaEstimator,
    pub kmin: Kmin,
}

/// Moment fit: `alpha = gamma - 1`, then `theta` from the vertex count.
pub fn fit_moment(graph: &Multigraph, config: &MomentConfig) -> Result<FitResult, EstimationError> {
    let hist = graph.degree_histogram();
    let (gamma, kmin) = match estimate_gamma(&hist, config.estimator, config.kmin) {
        Ok(v) => v,
        // No spread in the tail: there is no power law to speak of.
        Err(EstimationError::Divergent { .. }) => {
            return Err(EstimationError::ExponentOutOfRange(f64::INFINITY))
        }
        Err(e) => return Err(e),
    };
    if !(gamma > 1.0 && gamma < 2.0) {
        return Err(EstimationError::ExponentOutOfRange(gamma));
    }
    let alpha = gamma - 1.0;
    let n = graph.num_edges() as u64;
    let v = graph.num_vertices() as u64;
    let theta = solve_theta(alpha, n, v as f64)?;
    let params = Params::new(alpha, theta)?;
    Ok(FitResult {
        alpha_hat: alpha,
        theta_hat: theta,
        gamma_hat: gamma,
        method: FitMethod::Moment,
        n_edges: n,
        n_vertices: v,
        log_likelihood: Some(GraphSummary::from_histogram(&hist).log_prob(params)),
        kmin: Some(kmin),
        converged: true,
        diagnostics: Diagnostics {
            estimator: Some(config.estimator),
            ..Diagnostics::default()
        },
    })
}

#[derive(Debug, Clone, Copy)]
pub struct MleConfig {
    /// Starting point; defaults to the moment fit, else `(0.5, 1)`.
    pub start: Option<Params>,
    /// Set when the input is known to be a simple projection.
    pub input_is_simple: bool,
    pub optimizer: NelderMead,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            start: None,
            input_is_simple: false,
            optimizer: NelderMead {
                tol: 1e-9,
                initial_step: 0.5,
                max_iterations: 10_000,
            },
        }
    }
}

fn to_plane(params: Params) -> [f64; 2] {
    let a = params.alpha();
    [(a / (1.0 - a)).ln(), (params.theta() + a).ln()]
}

fn from_plane(point: [f64; 2]) -> Option<Params> {
    let alpha = 1.0 / (1.0 + (-point[0]).exp());
    let theta = point[1].exp() - alpha;
    Params::new(alpha, theta).ok()
}

/// Maximum likelihood over `(alpha, theta)`, searched on the plane
/// `(logit alpha, ln(theta + alpha))`.
pub fn fit_mle(graph: &Multigraph, config: &MleConfig) -> Result<FitResult, EstimationError> {
    if config.input_is_simple {
        return Err(EstimationError::SimpleGraphInput);
    }
    let summary = GraphSummary::of(graph);
    let start = config.start.unwrap_or_else(|| {
        fit_moment(graph, &MomentConfig::default())
            .ok()
            .and_then(|f| f.params().ok())
            .unwrap_or_else(|| Params::new(0.5, 1.0).expect("valid"))
    });
    let objective = |point: [f64; 2]| match from_plane(point) {
        Some(params) => -summary.log_prob(params),
        None => f64::INFINITY,
    };
    let found = config.optimizer.minimize(objective, to_plane(start));
    let params = from_plane(found.point).unwrap_or(start);
    Ok(FitResult {
        alpha_hat: params.alpha(),
        theta_hat: params.theta(),
        gamma_hat: params.alpha() + 1.0,
        method: FitMethod::Mle,
        n_edges: summary.n_edges,
        n_vertices: summary.n_vertices,
        log_likelihood: Some(summary.log_prob(params)),
        kmin: None,
        converged: found.converged,
        diagnostics: Diagnostics {
            iterations: Some(found.iterations),
            start: Some((start.alpha(), start.theta())),
            ..Diagnostics::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, theta: f64) -> Params {
        Params::new(alpha, theta).unwrap()
    }

    #[test]
    fn limit_pmf_small_k() {
        for a in [0.1, 0.5, 0.9] {
            assert!((limit_pmf(1, a).unwrap() - a).abs() < 1e-15);
        }
        assert!((limit_pmf(2, 0.5).unwrap() - 0.125).abs() < 1e-15);
        // alpha (1-alpha)(2-alpha) / 3!
        assert!((limit_pmf(3, 0.25).unwrap() - 0.25 * 0.75 * 1.75 / 6.0).abs() < 1e-15);
        assert!(matches!(limit_pmf(0, 0.5), Err(EstimationError::Degree(0))));
        assert!(limit_pmf(3, 1.0).is_err());
    }

    #[test]
    fn limit_pmf_approaches_asymptote() {
        let ratio = limit_pmf(1000, 0.5).unwrap() / limit_pmf_asymptotic(1000, 0.5).unwrap();
        assert!((0.99..=1.01).contains(&ratio), "{ratio}");
    }

    #[test]
    fn limit_pmf_partial_sums() {
        for a in [0.25, 0.5, 0.75] {
            let mut sum = 0.0;
            let mut checkpoints = Vec::new();
            for k in 1..=1_000_000u64 {
                sum += limit_pmf(k, a).unwrap();
                if k == 1_000 || k == 10_000 || k == 100_000 || k == 1_000_000 {
                    checkpoints.push((k, sum));
                }
            }
            assert!(checkpoints.windows(2).all(|w| w[0].1 < w[1].1));
            for (k, partial) in checkpoints {
                assert!(partial < 1.0);
                // Integral of the asymptotic density from k to infinity.
                let integral = (k as f64).powf(-a) / libm::tgamma(1.0 - a);
                let tail = 1.0 - partial;
                assert!(
                    tail > 0.5 * integral && tail < 2.0 * integral,
                    "alpha {a}, K {k}: tail {tail}, integral {integral}"
                );
            }
        }
    }

    /// Histogram whose CCDF is exactly `k^{1-gamma}` for `k <= top`.
    fn pure_power_law(gamma: f64, top: u64) -> DegreeHistogram {
        let scale = 1e15;
        let surv = |k: u64| scale * (k as f64).powf(1.0 - gamma);
        DegreeHistogram::from_counts((1..=top).map(|k| {
            let c = if k < top { surv(k) - surv(k + 1) } else { surv(k) };
            (k, c.round() as u64)
        }))
    }

    #[test]
    fn ccdf_slope_of_exact_power_law() {
        let hist = pure_power_law(1.67, 10_000);
        let g = estimate_gamma_ccdf(&hist, 10).unwrap();
        assert!((g - 1.67).abs() < 0.02, "{g}");
    }

    #[test]
    fn ccdf_needs_two_points() {
        let hist = DegreeHistogram::from_degrees([3, 3, 3]);
        assert!(matches!(
            estimate_gamma_ccdf(&hist, 1),
            Err(EstimationError::InsufficientData { found: 1, .. })
        ));
    }

    #[test]
    fn mle_hand_value() {
        let hist = DegreeHistogram::from_degrees([2, 2, 4, 8]);
        let expected = 1.0
            + 4.0
                / (2.0 * (2.0f64 / 1.5).ln() + (4.0f64 / 1.5).ln() + (8.0f64 / 1.5).ln());
        let got = estimate_gamma_mle(&hist, 2).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!((got - 2.2383).abs() < 1e-4);
    }

    #[test]
    fn mle_divergent_and_empty() {
        let hist = DegreeHistogram::from_degrees([5]);
        assert!(matches!(
            estimate_gamma_mle(&hist, 5),
            Err(EstimationError::Divergent { kmin: 5 })
        ));
        assert!(matches!(
            estimate_gamma_mle(&hist, 6),
            Err(EstimationError::InsufficientData { .. })
        ));
        // A single degree above kmin is fine.
        assert!(estimate_gamma_mle(&hist, 3).is_ok());
    }

    #[test]
    fn expected_vertices_values() {
        let ev = expected_vertices(p(0.5, 1.0), 5000);
        let constant = 1.0 / (0.5 * std::f64::consts::PI.sqrt() / 2.0);
        assert!((ev - constant * 100.0).abs() < 1e-9);
        assert!((ev - 225.675_833_419_102_5).abs() < 1e-8);

        for n in [1u64, 10, 5000] {
            let ev = expected_vertices(p(0.5, 0.0), n);
            let closed = (2.0 * n as f64).sqrt() / (0.5 * std::f64::consts::PI.sqrt());
            assert!((ev - closed).abs() < 1e-10 * closed);
        }
    }

    #[test]
    fn expected_vertices_monotone() {
        for a in [0.1, 0.5, 0.9] {
            let mut prev = 0.0;
            let mut theta = -a + 1e-3;
            while theta < 1e4 {
                let ev = expected_vertices(p(a, theta), 1000);
                assert!(ev > prev);
                prev = ev;
                theta = theta * 1.5 + 0.7;
            }
            let mut prev = 0.0;
            for n in [1, 2, 10, 100, 10_000, 1_000_000] {
                let ev = expected_vertices(p(a, 1.0), n);
                assert!(ev > prev);
                prev = ev;
            }
        }
    }

    #[test]
    fn solve_theta_inverts() {
        // Gamma(2) / (0.5 Gamma(1.5)) * 100, the forward value at theta = 1.
        let target = 400.0 / std::f64::consts::PI.sqrt();
        let theta = solve_theta(0.5, 5000, target).unwrap();
        assert!((theta - 1.0).abs() < 1e-6, "{theta}");
        let theta = solve_theta(0.5, 5000, 225.68).unwrap();
        assert!((theta - 1.0).abs() < 1e-3, "{theta}");

        for (a, t, n) in [(0.25, 1.0, 100_000), (0.85, -0.63, 100_000), (0.3, 168.0, 1000), (0.5, -0.4, 7)] {
            let ev = expected_vertices(p(a, t), n);
            if ev >= 1.0 && ev <= 2.0 * n as f64 {
                let theta = solve_theta(a, n, ev).unwrap();
                assert!((theta - t).abs() < 1e-6 * t.abs().max(1.0), "({a}, {t}): {theta}");
            }
        }
    }

    #[test]
    fn solve_theta_errors() {
        assert!(matches!(
            solve_theta(0.5, 10, 0.0),
            Err(EstimationError::VertexCount { .. })
        ));
        assert!(matches!(
            solve_theta(0.5, 10, 21.0),
            Err(EstimationError::VertexCount { .. })
        ));
        assert!(matches!(solve_theta(1.2, 10, 5.0), Err(EstimationError::Alpha(_))));
        // (2n)^0.01 ~ 1: the vertex count cannot reach 2n for any reasonable theta.
        assert!(matches!(
            solve_theta(0.01, 1_000_000_000_000, 2e12),
            Err(EstimationError::Unattainable { .. })
        ));
    }

    #[test]
    fn matching_graph_has_no_exponent() {
        let g = Multigraph::new(vec![(1, 2), (3, 4), (5, 6)], false).unwrap();
        assert!(matches!(
            fit_moment(&g, &MomentConfig::default()),
            Err(EstimationError::ExponentOutOfRange(_))
        ));
    }

    #[test]
    fn mle_rejects_simple_input() {
        let g = Multigraph::new(vec![(1, 2), (2, 3)], false).unwrap();
        let cfg = MleConfig {
            input_is_simple: true,
            ..MleConfig::default()
        };
        assert_eq!(fit_mle(&g, &cfg), Err(EstimationError::SimpleGraphInput));
    }

    #[test]
    fn plane_round_trip() {
        for (a, t) in [(0.5, 1.0), (0.85, -0.63), (0.01, 500.0)] {
            let back = from_plane(to_plane(p(a, t))).unwrap();
            assert!((back.alpha() - a).abs() < 1e-12);
            assert!((back.theta() - t).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_result_json_key_order() {
        let fit = FitResult {
            alpha_hat: 0.5,
            theta_hat: 1.0,
            gamma_hat: 1.5,
            method: FitMethod::Moment,
            n_edges: 10,
            n_vertices: 4,
            log_likelihood: None,
            kmin: Some(2),
            converged: true,
            diagnostics: Diagnostics::default(),
        };
        assert_eq!(
            fit.to_json(),
            r#"{"alpha_hat":0.5,"theta_hat":1.0,"gamma_hat":1.5,"method":"moment","n_edges":10,"n_vertices":4,"log_likelihood":null,"kmin":2,"converged":true}"#
        );
    }
}
