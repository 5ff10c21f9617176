//! Special functions and small generic solvers.
//!
//! Everything here is a pure function. The likelihood and estimation code
//! build on [`log_gamma`], [`log_rising`], [`solve_root`] and
//! [`minimize_2d`].

use thiserror::Error;

/// Below this length the ascending factorial is summed term by term.
pub const RISING_DIRECT_LIMIT: u64 = 32;

/// Default relative tolerance for [`solve_root`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("function returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
}

/// A closed interval with finite endpoints and `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(NumericsError::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Backed by the musl `lgamma` port from the `libm` crate, which is accurate
/// to a few ulps on the positive axis.
pub fn log_gamma(x: f64) -> Result<f64, NumericsError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(NumericsError::Domain {
            function: "log_gamma",
            value: x,
        });
    }
    Ok(libm::lgamma(x))
}

/// `ln x^{↑j}` where `x^{↑j} = x (x+1) ... (x+j-1)`.
///
/// Short products are summed directly; from [`RISING_DIRECT_LIMIT`] terms on
/// the value is a log-gamma difference.
pub fn log_rising(x: f64, j: u64) -> Result<f64, NumericsError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(NumericsError::Domain {
            function: "log_rising",
            value: x,
        });
    }
    if j < RISING_DIRECT_LIMIT {
        Ok(log_rising_direct(x, j))
    } else {
        Ok(libm::lgamma(x + j as f64) - libm::lgamma(x))
    }
}

fn log_rising_direct(x: f64, j: u64) -> f64 {
    (0..j).map(|i| (x + i as f64).ln()).sum()
}

/// Finds a root of a monotone function by bisection.
///
/// Stops once the bracket is narrower than `tol * max(1, |midpoint|)`, or
/// after 200 halvings.
pub fn solve_root<F>(mut f: F, bracket: RealInterval, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let f_lo = eval_finite(&mut f, lo)?;
    let f_hi = eval_finite(&mut f, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(NumericsError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let f_mid = eval_finite(&mut f, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn eval_finite<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64, NumericsError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(NumericsError::NonFinite { at: x })
    }
}

/// Outcome of a simplex minimization. `converged` is false when the
/// iteration cap was hit; `point` is then the best vertex seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub point: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex search in two dimensions.
///
/// Uses reflection 1, expansion 2, contraction 0.5 and shrink 0.5, and runs
/// one restart from the best point after the first convergence. Bounded
/// domains are handled by the caller through a reparametrization onto the
/// plane.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Simplex diameter at which a run is considered converged.
    pub tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Iteration cap shared by both runs.
    pub max_iterations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            initial_step: 0.5,
            max_iterations: 10_000,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, start: [f64; 2]) -> Minimum
    where
        F: FnMut([f64; 2]) -> f64,
    {
        let first = self.run(&mut f, start, self.max_iterations);
        if !first.converged {
            return first;
        }
        let remaining = self.max_iterations - first.iterations;
        let second = self.run(&mut f, first.point, remaining);
        let best = if second.value <= first.value { second } else { first };
        Minimum {
            point: best.point,
            value: best.value,
            iterations: first.iterations + second.iterations,
            converged: second.converged,
        }
    }

    fn run<F>(&self, f: &mut F, start: [f64; 2], budget: usize) -> Minimum
    where
        F: FnMut([f64; 2]) -> f64,
    {
        let eval = |f: &mut F, p: [f64; 2]| {
            let y = f(p);
            if y.is_nan() { f64::INFINITY } else { y }
        };
        let step = self.initial_step;
        let mut simplex = [
            start,
            [start[0] + step, start[1]],
            [start[0], start[1] + step],
        ];
        let mut values = [
            eval(f, simplex[0]),
            eval(f, simplex[1]),
            eval(f, simplex[2]),
        ];

        let mut iterations = 0;
        loop {
            sort_simplex(&mut simplex, &mut values);
            if diameter(&simplex) <= self.tol {
                return Minimum {
                    point: simplex[0],
                    value: values[0],
                    iterations,
                    converged: true,
                };
            }
            if iterations >= budget {
                return Minimum {
                    point: simplex[0],
                    value: values[0],
                    iterations,
                    converged: false,
                };
            }
            iterations += 1;

            let centroid = [
                0.5 * (simplex[0][0] + simplex[1][0]),
                0.5 * (simplex[0][1] + simplex[1][1]),
            ];
            let worst = simplex[2];
            let along = |t: f64| {
                [
                    centroid[0] + t * (centroid[0] - worst[0]),
                    centroid[1] + t * (centroid[1] - worst[1]),
                ]
            };

            let reflected = along(REFLECT);
            let f_reflected = eval(f, reflected);
            if f_reflected < values[0] {
                let expanded = along(REFLECT * EXPAND);
                let f_expanded = eval(f, expanded);
                if f_expanded < f_reflected {
                    simplex[2] = expanded;
                    values[2] = f_expanded;
                } else {
                    simplex[2] = reflected;
                    values[2] = f_reflected;
                }
                continue;
            }
            if f_reflected < values[1] {
                simplex[2] = reflected;
                values[2] = f_reflected;
                continue;
            }

            let (contracted, f_contracted) = if f_reflected < values[2] {
                let p = along(REFLECT * CONTRACT);
                (p, eval(f, p))
            } else {
                let p = along(-CONTRACT);
                (p, eval(f, p))
            };
            if f_contracted < values[2].min(f_reflected) {
                simplex[2] = contracted;
                values[2] = f_contracted;
                continue;
            }

            let best = simplex[0];
            for i in 1..3 {
                simplex[i] = [
                    best[0] + SHRINK * (simplex[i][0] - best[0]),
                    best[1] + SHRINK * (simplex[i][1] - best[1]),
                ];
                values[i] = eval(f, simplex[i]);
            }
        }
    }
}

fn sort_simplex(simplex: &mut [[f64; 2]; 3], values: &mut [f64; 3]) {
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let s = *simplex;
    let v = *values;
    for (slot, &i) in order.iter().enumerate() {
        simplex[slot] = s[i];
        values[slot] = v[i];
    }
}

fn diameter(simplex: &[[f64; 2]; 3]) -> f64 {
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    dist(simplex[0], simplex[1])
        .max(dist(simplex[0], simplex[2]))
        .max(dist(simplex[1], simplex[2]))
}

/// Minimizes `f` from `start` with default settings and the given diameter
/// tolerance.
pub fn minimize_2d<F>(f: F, start: [f64; 2], tol: f64) -> Minimum
where
    F: FnMut([f64; 2]) -> f64,
{
    NelderMead {
        tol,
        ..NelderMead::default()
    }
    .minimize(f, start)
}
