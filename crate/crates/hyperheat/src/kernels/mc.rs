//! Bessel bridge Monte Carlo estimators.
//!
//! Every kernel here has the shape
//!
//! ```text
//! p(T, r) = prefactor(n, T, r) * E[ exp( int_0^T f(R_t) dt ) ]
//! ```
//!
//! with the expectation over an exact Bessel(n) bridge pinned at `r` (or from
//! `x` to `y`), the time integral by trapezoid on the sampled grid, and the
//! prefactor deterministic. The `n = 3` hyperbolic case degenerates to the
//! closed form with zero variance because the exponent vanishes identically.
//!
//! Estimators evaluate paths in parallel; each path draws from its own
//! counter-based RNG stream keyed by `(seed, path index)` and the reduction
//! is a pairwise sum in fixed tree order, so a given [`McConfig`] produces
//! bitwise identical results at any thread count.

use std::sync::Arc;

use rayon::prelude::*;

use super::{KernelError, KernelValue, Method};
use crate::bessel::{walk_bridge_radii, AngleTable, BridgePath, GridKind, RngStream};
use crate::specfun::{bessel_i_scaled, g_with_limit};
use crate::Dimension;

/// Configuration of one Monte Carlo estimate.
#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub paths: u64,
    pub steps: usize,
    pub seed: u64,
    pub grid_kind: GridKind,
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(paths: u64, steps: usize, seed: u64) -> Self {
        Self {
            paths,
            steps,
            seed,
            grid_kind: GridKind::Uniform,
            antithetic: false,
        }
    }

    /// Default step count: 200 per unit time, never fewer than 200.
    pub fn default_steps(t_end: f64) -> usize {
        (200.0 * t_end.max(1.0)).ceil() as usize
    }

    fn validate(&self) -> Result<(), KernelError> {
        if self.paths < 1 {
            return Err(KernelError::BadConfig("paths must be >= 1".into()));
        }
        if self.steps < 2 {
            return Err(KernelError::BadConfig("steps must be >= 2".into()));
        }
        if self.antithetic && self.paths % 2 != 0 {
            return Err(KernelError::BadConfig(
                "antithetic sampling needs an even path count".into(),
            ));
        }
        Ok(())
    }

    fn grid(&self, t_end: f64) -> Vec<f64> {
        crate::bessel::time_grid(self.grid_kind, t_end, self.steps)
    }
}

/// Monte Carlo result: point estimate, standard error, path count.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: u64,
}

/// Bounded integrand applied along the radial path, plus the deterministic
/// exponent that multiplies the whole representation.
#[derive(Clone)]
pub struct PathFunctional {
    integrand: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub prefactor_exponent: f64,
}

/// Radii below this are evaluated at the floor instead; the analytic limits
/// of the radial integrands exist but are not recoverable from the `G`
/// closures alone, and the floor value differs from the limit by `O(1e-4)`
/// on a grid point of weight `T / (2 steps)`.
const RADIAL_EVAL_FLOOR: f64 = 1e-2;

impl PathFunctional {
    pub fn new(
        integrand: impl Fn(f64) -> f64 + Send + Sync + 'static,
        prefactor_exponent: f64,
    ) -> Self {
        Self {
            integrand: Arc::new(integrand),
            prefactor_exponent,
        }
    }

    /// Exponent integrand of the hyperbolic representation:
    /// `g(r) = -((n-1)(n-3)/8) phi(r)`, with its limit at the origin.
    pub fn hyperbolic(n: Dimension, t_end: f64) -> Self {
        let nf = n.f();
        Self::new(
            move |radius| g_with_limit(n, radius),
            -(nf - 1.0) * (nf - 1.0) * t_end / 8.0,
        )
    }

    /// Exponent integrand of the radially symmetric representation:
    /// `((n-1)(n-3)/8) (1/r^2 - (G'/G)^2) - ((n-1)/4) G''/G`.
    pub fn radial(profile: &RadialProfile, n: Dimension) -> Self {
        let profile = profile.clone();
        let c1 = n.n1n3() / 8.0;
        let c2 = (n.f() - 1.0) / 4.0;
        Self::new(
            move |radius| {
                let r = radius.max(RADIAL_EVAL_FLOOR);
                let g = profile.g(r);
                if !(g > 0.0) {
                    return f64::NAN;
                }
                let u = 1.0 / r;
                let q = profile.g1(r) / g;
                c1 * (u * u - q * q) - c2 * profile.g2(r) / g
            },
            0.0,
        )
    }

    pub fn eval(&self, radius: f64) -> f64 {
        (self.integrand)(radius)
    }
}

/// Warped-product data `G, G', G''` of a radially symmetric metric
/// `ds^2 = dr^2 + G(r)^2 dtheta^2`, with the regularity constant `C`
/// bounding `|d/dr ln(G(r)/r)|`.
#[derive(Clone)]
pub struct RadialProfile {
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    g1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    g2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub c: f64,
}

impl RadialProfile {
    pub fn new(
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        c: f64,
    ) -> Self {
        Self {
            g: Arc::new(g),
            g1: Arc::new(g1),
            g2: Arc::new(g2),
            c,
        }
    }

    pub fn g(&self, r: f64) -> f64 {
        (self.g)(r)
    }

    pub fn g1(&self, r: f64) -> f64 {
        (self.g1)(r)
    }

    pub fn g2(&self, r: f64) -> f64 {
        (self.g2)(r)
    }
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile").field("c", &self.c).finish()
    }
}

/// Trapezoid value of `int_0^T integrand(R_t) dt` along a sampled path. The
/// origin endpoint of an origin-pinned bridge is evaluated at the
/// functional's own limit handling.
pub fn path_functional_value(
    path: &BridgePath,
    functional: &PathFunctional,
) -> Result<f64, KernelError> {
    let times = path.times();
    let radii = path.radii();
    let mut acc = 0.0;
    let mut prev = functional.eval(radii[0]);
    if !prev.is_finite() {
        return Err(KernelError::NonFiniteFunctional { radius: radii[0] });
    }
    for i in 1..times.len() {
        let cur = functional.eval(radii[i]);
        if !cur.is_finite() {
            return Err(KernelError::NonFiniteFunctional { radius: radii[i] });
        }
        acc += 0.5 * (prev + cur) * (times[i] - times[i - 1]);
        prev = cur;
    }
    Ok(acc)
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub(crate) fn reduce_mc_samples(samples: &[f64], reported_paths: u64) -> McEstimate {
    let len = samples.len();
    // degenerate estimators (vanishing exponent) produce bit-identical
    // samples; report their variance as exactly zero rather than summation
    // rounding noise
    if samples.windows(2).all(|w| w[0] == w[1]) {
        return McEstimate {
            mean: samples[0],
            stderr: 0.0,
            paths: reported_paths,
        };
    }
    let mean = pairwise_sum(samples) / len as f64;
    let stderr = if len > 1 {
        let sq: Vec<f64> = samples.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&sq) / (len - 1) as f64;
        (var / len as f64).sqrt()
    } else {
        0.0
    };
    McEstimate {
        mean,
        stderr,
        paths: reported_paths,
    }
}

/// Runs per-path evaluation under the antithetic pairing contract and reduces
/// deterministically. `eval(stream_id, mirror)` must be pure.
fn run_paths(
    cfg: &McConfig,
    eval: impl Fn(u64, bool) -> Result<f64, KernelError> + Sync,
) -> Result<McEstimate, KernelError> {
    cfg.validate()?;
    let samples: Result<Vec<f64>, KernelError> = if cfg.antithetic {
        (0..cfg.paths / 2)
            .into_par_iter()
            .map(|pair| Ok(0.5 * (eval(pair, false)? + eval(pair, true)?)))
            .collect()
    } else {
        (0..cfg.paths)
            .into_par_iter()
            .map(|i| eval(i, false))
            .collect()
    };
    Ok(reduce_mc_samples(&samples?, cfg.paths))
}

/// Streaming bridge walk feeding the trapezoid directly, avoiding per-path
/// allocation of the radii. Draw-for-draw identical to sampling the path and
/// calling [`path_functional_value`].
#[allow(clippy::too_many_arguments)]
fn exp_functional_over_bridge(
    n: Dimension,
    grid: &[f64],
    start_radius: f64,
    end_radius: f64,
    angle: Option<&AngleTable>,
    functional: &PathFunctional,
    stream: RngStream,
    mirror: bool,
) -> Result<f64, KernelError> {
    let dim = n.get() as usize;
    let mut start = vec![0.0; dim];
    start[0] = start_radius;
    let mut end = vec![0.0; dim];
    end[0] = end_radius;

    let mut acc = 0.0;
    let mut prev_val = 0.0;
    let mut prev_t = 0.0;
    let mut bad: Option<f64> = None;
    walk_bridge_radii(
        dim,
        grid,
        &start,
        &end,
        start_radius,
        end_radius,
        stream,
        mirror,
        angle,
        |i, radius| {
            let v = functional.eval(radius);
            if !v.is_finite() && bad.is_none() {
                bad = Some(radius);
            }
            if i > 0 {
                acc += 0.5 * (prev_val + v) * (grid[i] - prev_t);
            }
            prev_val = v;
            prev_t = grid[i];
        },
    );
    if let Some(radius) = bad {
        return Err(KernelError::NonFiniteFunctional { radius });
    }
    Ok(acc.exp())
}

/// Gaussian-type prefactor of the hyperbolic bridge representation:
/// `e^{-(n-1)^2 T/8} (r/sinh r)^{(n-1)/2} e^{-r^2/2T} / (2 pi T)^{n/2}`.
pub(crate) fn bridge_prefactor(n: Dimension, t_end: f64, r: f64) -> f64 {
    let nf = n.f();
    let ratio = if r == 0.0 { 1.0 } else { r / r.sinh() };
    (-(nf - 1.0) * (nf - 1.0) * t_end / 8.0).exp()
        * ratio.powf((nf - 1.0) / 2.0)
        * (-r * r / (2.0 * t_end)).exp()
        / (2.0 * std::f64::consts::PI * t_end).powf(nf / 2.0)
}

/// Deterministic factor of the hyperbolic Bessel representation: the measure
/// change `((sinh y / y)(x / sinh x))^{(n-1)/2}` times the flat Bessel
/// transition density `p_B(T, x, y)`, times `e^{-(n-1)^2 T/8}`.
pub(crate) fn hb_prefactor(
    n: Dimension,
    t_end: f64,
    x: f64,
    y: f64,
) -> Result<f64, KernelError> {
    let nf = n.f();
    let nu = n.bessel_order();
    let z = x * y / t_end;
    let diff = x - y;
    let p_b = (y / x).powf(nu) * (y / t_end) * (-diff * diff / (2.0 * t_end)).exp()
        * bessel_i_scaled(nu, z)?;
    let ratio = (y.sinh() / y) * (x / x.sinh());
    Ok((-(nf - 1.0) * (nf - 1.0) * t_end / 8.0).exp() * ratio.powf((nf - 1.0) / 2.0) * p_b)
}

fn check_time(t_end: f64) -> Result<(), KernelError> {
    if !(t_end > 0.0) {
        return Err(KernelError::Domain {
            what: "time must be positive",
            value: t_end,
        });
    }
    Ok(())
}

/// Bridge Monte Carlo estimate of the heat kernel on `H^n` at geodesic
/// distance `r > 0`.
///
/// For `n = 3` the exponent vanishes identically, so the closed form is
/// returned with zero variance and no sampling.
pub fn heat_kernel_mc(
    n: Dimension,
    t_end: f64,
    r: f64,
    cfg: &McConfig,
) -> Result<KernelValue, KernelError> {
    check_time(t_end)?;
    if !(r > 0.0) {
        return Err(KernelError::Domain {
            what: "distance must be positive (use heat_kernel_mc_at_origin for r = 0)",
            value: r,
        });
    }
    cfg.validate()?;
    let pref = bridge_prefactor(n, t_end, r);
    if n.get() == 3 {
        return Ok(KernelValue::stochastic(pref, 0.0, Method::McBridge));
    }
    let grid = cfg.grid(t_end);
    let functional = PathFunctional::hyperbolic(n, t_end);
    let est = run_paths(cfg, |stream_id, mirror| {
        exp_functional_over_bridge(
            n,
            &grid,
            0.0,
            r,
            None,
            &functional,
            RngStream::new(cfg.seed, stream_id),
            mirror,
        )
    })?;
    Ok(KernelValue::stochastic(
        pref * est.mean,
        pref * est.stderr,
        Method::McBridge,
    ))
}

/// The `r -> 0` limit of the kernel: prefactor with `r/sinh r -> 1` and the
/// exponential functional over the bridge pinned at the origin on both ends.
pub fn heat_kernel_mc_at_origin(
    n: Dimension,
    t_end: f64,
    cfg: &McConfig,
) -> Result<KernelValue, KernelError> {
    check_time(t_end)?;
    cfg.validate()?;
    let pref = bridge_prefactor(n, t_end, 0.0);
    if n.get() == 3 {
        return Ok(KernelValue::stochastic(pref, 0.0, Method::McBridge));
    }
    let grid = cfg.grid(t_end);
    let functional = PathFunctional::hyperbolic(n, t_end);
    let est = run_paths(cfg, |stream_id, mirror| {
        exp_functional_over_bridge(
            n,
            &grid,
            0.0,
            0.0,
            None,
            &functional,
            RngStream::new(cfg.seed, stream_id),
            mirror,
        )
    })?;
    Ok(KernelValue::stochastic(
        pref * est.mean,
        pref * est.stderr,
        Method::McBridge,
    ))
}

/// Bridge Monte Carlo estimate of the hyperbolic Bessel transition density
/// `p_HB(T, x, y)` for `x, y > 0`.
pub fn hyperbolic_bessel_density_mc(
    n: Dimension,
    t_end: f64,
    x: f64,
    y: f64,
    cfg: &McConfig,
) -> Result<McEstimate, KernelError> {
    check_time(t_end)?;
    if !(x > 0.0) || !(y > 0.0) {
        return Err(KernelError::Domain {
            what: "radii must be positive",
            value: x.min(y),
        });
    }
    cfg.validate()?;
    let factor = hb_prefactor(n, t_end, x, y)?;
    if n.get() == 3 {
        return Ok(McEstimate {
            mean: factor,
            stderr: 0.0,
            paths: cfg.paths,
        });
    }
    let grid = cfg.grid(t_end);
    let functional = PathFunctional::hyperbolic(n, t_end);
    let table = AngleTable::new(n, x * y / t_end)?;
    let est = run_paths(cfg, |stream_id, mirror| {
        exp_functional_over_bridge(
            n,
            &grid,
            x,
            y,
            Some(&table),
            &functional,
            RngStream::new(cfg.seed, stream_id),
            mirror,
        )
    })?;
    Ok(McEstimate {
        mean: factor * est.mean,
        stderr: factor * est.stderr,
        paths: cfg.paths,
    })
}

/// Bridge Monte Carlo estimate of the heat kernel on a radially symmetric
/// Cartan-Hadamard space described by `profile`.
pub fn radial_sym_kernel_mc(
    profile: &RadialProfile,
    n: Dimension,
    t_end: f64,
    r: f64,
    cfg: &McConfig,
) -> Result<KernelValue, KernelError> {
    check_time(t_end)?;
    if !(r > 0.0) {
        return Err(KernelError::Domain {
            what: "distance must be positive",
            value: r,
        });
    }
    cfg.validate()?;
    let g_r = profile.g(r);
    if !(g_r > 0.0) {
        return Err(KernelError::NonPositiveProfile { r, g: g_r });
    }
    let nf = n.f();
    let pref = (r / g_r).powf((nf - 1.0) / 2.0) * (-r * r / (2.0 * t_end)).exp()
        / (2.0 * std::f64::consts::PI * t_end).powf(nf / 2.0);
    let grid = cfg.grid(t_end);
    let functional = PathFunctional::radial(profile, n);
    let est = run_paths(cfg, |stream_id, mirror| {
        exp_functional_over_bridge(
            n,
            &grid,
            0.0,
            r,
            None,
            &functional,
            RngStream::new(cfg.seed, stream_id),
            mirror,
        )
    })?;
    Ok(KernelValue::stochastic(
        pref * est.mean,
        pref * est.stderr,
        Method::McBridge,
    ))
}

/// Per-path values of `int_0^T f(R_t) dt` over origin bridges on an explicit
/// grid; the series expansion reuses these across all moment orders.
pub(crate) fn functional_samples_on_grid(
    n: Dimension,
    grid: &[f64],
    r: f64,
    functional: &PathFunctional,
    cfg: &McConfig,
) -> Result<Vec<f64>, KernelError> {
    cfg.validate()?;
    let eval = |stream_id: u64, mirror: bool| -> Result<f64, KernelError> {
        let dim = n.get() as usize;
        let start = vec![0.0; dim];
        let mut end = vec![0.0; dim];
        end[0] = r;
        let mut acc = 0.0;
        let mut prev_val = 0.0;
        let mut prev_t = 0.0;
        let mut bad: Option<f64> = None;
        walk_bridge_radii(
            dim,
            grid,
            &start,
            &end,
            0.0,
            r,
            RngStream::new(cfg.seed, stream_id),
            mirror,
            None,
            |i, radius| {
                let v = functional.eval(radius);
                if !v.is_finite() && bad.is_none() {
                    bad = Some(radius);
                }
                if i > 0 {
                    acc += 0.5 * (prev_val + v) * (grid[i] - prev_t);
                }
                prev_val = v;
                prev_t = grid[i];
            },
        );
        if let Some(radius) = bad {
            return Err(KernelError::NonFiniteFunctional { radius });
        }
        Ok(acc)
    };
    if cfg.antithetic {
        (0..cfg.paths / 2)
            .into_par_iter()
            .flat_map_iter(|pair| {
                let a = eval(pair, false);
                let b = eval(pair, true);
                [a, b]
            })
            .collect()
    } else {
        (0..cfg.paths).into_par_iter().map(|i| eval(i, false)).collect()
    }
}
