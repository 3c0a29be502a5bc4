//! Series and small-time expansions around a deterministic radial path.
//!
//! The bridge expectation `E[exp(int g(R_t) dt)]` expands around any
//! deterministic path `r_t` as `e^{int g(r_t) dt}` times a moment series in
//! `int (g(R_t) - g(r_t)) dt`. With the unbiased path
//! `r_t = g^{-1}(E[g(R_t)])` the first-order term vanishes identically,
//! which is what makes the pure prefactor form second-order accurate in
//! small time; the straight line `r t / T` is the naive baseline.

use crate::bessel::bridge_marginal_density;
use crate::kernels::mc::{
    bridge_prefactor, functional_samples_on_grid, hb_prefactor, reduce_mc_samples, McConfig,
    McEstimate, PathFunctional, RadialProfile,
};
use crate::kernels::{KernelError, KernelValue, Method};
use crate::specfun::{g_at_zero, g_inverse, g_with_limit, integrate, QuadratureSpec, SpecFunError};
use crate::Dimension;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Unbiased,
    StraightLine,
}

/// Deterministic radial path sampled on a time grid, with exact endpoint
/// interpolation between the bridge pins.
#[derive(Clone, Debug)]
pub struct DeterministicPath {
    pub kind: PathKind,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl DeterministicPath {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ExpansionError {
    #[error("{what}: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("unbiased path needs n != 3 (g is identically zero there)")]
    DegenerateDimension,
    #[error("grid must start at 0, end at the horizon and strictly increase")]
    BadGrid,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn marginal_quad_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-12,
        rel_tol: 1e-9,
        max_panels: 512,
        ..QuadratureSpec::default_gl()
    }
}

fn check_grid(grid: &[f64], t_end: f64) -> Result<(), ExpansionError> {
    let ok = grid.len() >= 2
        && grid[0] == 0.0
        && *grid.last().unwrap() == t_end
        && grid.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(ExpansionError::BadGrid)
    }
}

/// `E[g(R_t)]` under the bridge marginal from `a` to `b`, by quadrature in
/// the radius over `[0, hi]`; the marginal has sub-Gaussian tails so `hi`
/// a few standard deviations past the endpoints loses nothing.
fn expected_g(
    n: Dimension,
    t_end: f64,
    a: f64,
    b: f64,
    t: f64,
) -> Result<f64, ExpansionError> {
    let hi = a.max(b) + 10.0 * t_end.sqrt();
    let spec = marginal_quad_spec();
    let v = integrate(
        |rho| {
            g_with_limit(n, rho) * bridge_marginal_density(n, t_end, a, b, t, rho).unwrap_or(f64::NAN)
        },
        0.0,
        hi,
        &spec,
    )
    .map_err(SpecFunError::from)?;
    Ok(v)
}

/// Inverts `g` at the expectation, clamping quadrature noise back into the
/// open range of `g`.
fn invert_expected_g(n: Dimension, m: f64) -> Result<f64, ExpansionError> {
    let g0 = g_at_zero(n);
    let (lo, hi) = if g0 > 0.0 { (0.0, g0) } else { (g0, 0.0) };
    let span = hi - lo;
    let margin = 1e-14 * span;
    if m <= lo - 1e-6 * span || m >= hi + 1e-6 * span {
        return Err(ExpansionError::Domain {
            what: "expected g escaped the range of g",
            value: m,
        });
    }
    let clamped = m.clamp(lo + margin, hi - margin);
    Ok(g_inverse(n, clamped)?)
}

/// The unbiased deterministic path `r_t = g^{-1}(E_r[g(R_t)])` for the
/// origin bridge, with `r_0 = 0` and `r_T = r` pinned exactly.
pub fn unbiased_path(
    n: Dimension,
    t_end: f64,
    r: f64,
    grid: &[f64],
) -> Result<DeterministicPath, ExpansionError> {
    if n.get() == 3 {
        return Err(ExpansionError::DegenerateDimension);
    }
    if !(t_end > 0.0) || !(r > 0.0) {
        return Err(ExpansionError::Domain {
            what: "horizon and distance must be positive",
            value: t_end.min(r),
        });
    }
    check_grid(grid, t_end)?;
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    for &t in &grid[1..grid.len() - 1] {
        let m = expected_g(n, t_end, 0.0, r, t)?;
        values.push(invert_expected_g(n, m)?);
    }
    values.push(r);
    Ok(DeterministicPath {
        kind: PathKind::Unbiased,
        times: grid.to_vec(),
        values,
    })
}

/// Two-sided variant for the `x -> y` bridge, by the same recipe through the
/// two-sided bridge marginal. Endpoints pinned at `x` and `y`.
pub fn unbiased_path_two_sided(
    n: Dimension,
    t_end: f64,
    x: f64,
    y: f64,
    grid: &[f64],
) -> Result<DeterministicPath, ExpansionError> {
    if n.get() == 3 {
        return Err(ExpansionError::DegenerateDimension);
    }
    if !(t_end > 0.0) || !(x > 0.0) || !(y > 0.0) {
        return Err(ExpansionError::Domain {
            what: "horizon and radii must be positive",
            value: t_end.min(x).min(y),
        });
    }
    check_grid(grid, t_end)?;
    let mut values = Vec::with_capacity(grid.len());
    values.push(x);
    for &t in &grid[1..grid.len() - 1] {
        let m = expected_g(n, t_end, x, y, t)?;
        values.push(invert_expected_g(n, m)?);
    }
    values.push(y);
    Ok(DeterministicPath {
        kind: PathKind::Unbiased,
        times: grid.to_vec(),
        values,
    })
}

/// Straight-line baseline `r_t = (t/T) r`.
pub fn straight_line_path(t_end: f64, r: f64, grid: &[f64]) -> DeterministicPath {
    debug_assert!(grid.len() >= 2 && grid[0] == 0.0 && *grid.last().unwrap() == t_end);
    let values = grid.iter().map(|t| r * (t / t_end)).collect();
    DeterministicPath {
        kind: PathKind::StraightLine,
        times: grid.to_vec(),
        values,
    }
}

/// Trapezoid of `g` along a deterministic path (origin endpoint handled by
/// the `g(0+)` limit).
fn g_path_integral(n: Dimension, path: &DeterministicPath) -> f64 {
    let times = path.times();
    let values = path.values();
    let mut acc = 0.0;
    let mut prev = g_with_limit(n, values[0]);
    for i in 1..times.len() {
        let cur = g_with_limit(n, values[i]);
        acc += 0.5 * (prev + cur) * (times[i] - times[i - 1]);
        prev = cur;
    }
    acc
}

/// Small-time kernel approximation: pure prefactor times
/// `exp(int_0^T g(r_t) dt)`, no Monte Carlo. Second-order accurate in `T`
/// with the unbiased path, first-order with any other.
pub fn small_time_kernel(
    n: Dimension,
    t_end: f64,
    r: f64,
    path: &DeterministicPath,
) -> Result<KernelValue, ExpansionError> {
    if !(t_end > 0.0) || !(r > 0.0) {
        return Err(ExpansionError::Domain {
            what: "horizon and distance must be positive",
            value: t_end.min(r),
        });
    }
    if path.horizon() != t_end {
        return Err(ExpansionError::BadGrid);
    }
    let pref = bridge_prefactor(n, t_end, r);
    let exponent = g_path_integral(n, path);
    Ok(KernelValue::deterministic(
        pref * exponent.exp(),
        Method::SmallTime,
    ))
}

/// Truncated series expansion around the deterministic path:
///
/// ```text
/// prefactor * e^{int g(r_t)} * sum_{k=0}^{K} E[ X^k ] / k!,
/// X = int_0^T (g(R_t) - g(r_t)) dt
/// ```
///
/// All moment orders reuse the same sampled bridges (they are strongly
/// correlated, and sharing paths makes the truncated series behave like a
/// control-variate-corrected estimator); the standard error is that of the
/// summed per-path values. Bridges are sampled on the path's own grid so
/// both time integrals share one discretization.
pub fn series_kernel(
    n: Dimension,
    t_end: f64,
    r: f64,
    order: u32,
    path: &DeterministicPath,
    cfg: &McConfig,
) -> Result<KernelValue, ExpansionError> {
    if !(t_end > 0.0) || !(r > 0.0) {
        return Err(ExpansionError::Domain {
            what: "horizon and distance must be positive",
            value: t_end.min(r),
        });
    }
    if path.horizon() != t_end {
        return Err(ExpansionError::BadGrid);
    }
    let pref = bridge_prefactor(n, t_end, r);
    let base = g_path_integral(n, path);
    if n.get() == 3 || order == 0 {
        // g vanishes identically at n = 3; at K = 0 the series is the k = 0
        // term alone. Either way no sampling and zero variance.
        return Ok(KernelValue::stochastic(
            pref * base.exp(),
            0.0,
            Method::Series,
        ));
    }
    let functional = PathFunctional::hyperbolic(n, t_end);
    let integrals = functional_samples_on_grid(n, path.times(), r, &functional, cfg)?;
    let truncated_exp = |x: f64| {
        let mut term = 1.0;
        let mut acc = 1.0;
        for k in 1..=order {
            term *= x / f64::from(k);
            acc += term;
        }
        acc
    };
    let values: Vec<f64> = integrals.iter().map(|a| truncated_exp(a - base)).collect();
    let est = reduce_with_pairing(&values, cfg);
    Ok(KernelValue::stochastic(
        pref * base.exp() * est.mean,
        pref * base.exp() * est.stderr,
        Method::Series,
    ))
}

/// Reduces per-path values; antithetic runs average mirrored pairs first so
/// the standard error reflects the pairing.
fn reduce_with_pairing(values: &[f64], cfg: &McConfig) -> McEstimate {
    if cfg.antithetic {
        let pairs: Vec<f64> = values.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect();
        reduce_mc_samples(&pairs, cfg.paths)
    } else {
        reduce_mc_samples(values, cfg.paths)
    }
}

/// Monte Carlo estimate of the normalized first-order increment
/// `int_0^1 (g(R_{Ts}) - g(r_{Ts})) ds`; centered at zero when `path` is the
/// unbiased one.
pub fn series_centering_estimate(
    n: Dimension,
    t_end: f64,
    r: f64,
    path: &DeterministicPath,
    cfg: &McConfig,
) -> Result<McEstimate, ExpansionError> {
    if path.horizon() != t_end {
        return Err(ExpansionError::BadGrid);
    }
    let base = g_path_integral(n, path);
    let functional = PathFunctional::hyperbolic(n, t_end);
    let integrals = functional_samples_on_grid(n, path.times(), r, &functional, cfg)?;
    let values: Vec<f64> = integrals.iter().map(|a| (a - base) / t_end).collect();
    Ok(reduce_with_pairing(&values, cfg))
}

/// Small-time expansion of the hyperbolic Bessel transition density: the
/// deterministic factor of the bridge representation times
/// `exp(int g(r_t) dt)` along the two-sided path.
pub fn hyperbolic_bessel_small_time(
    n: Dimension,
    t_end: f64,
    x: f64,
    y: f64,
    path: &DeterministicPath,
) -> Result<f64, ExpansionError> {
    if !(t_end > 0.0) || !(x > 0.0) || !(y > 0.0) {
        return Err(ExpansionError::Domain {
            what: "horizon and radii must be positive",
            value: t_end.min(x).min(y),
        });
    }
    if path.horizon() != t_end {
        return Err(ExpansionError::BadGrid);
    }
    let factor = hb_prefactor(n, t_end, x, y)?;
    let exponent = if n.get() == 3 {
        0.0
    } else {
        g_path_integral(n, path)
    };
    Ok(factor * exponent.exp())
}

/// First-order small-time expansion on a radially symmetric space:
/// `leading * (1 + int_0^T E_r[radial integrand](t) dt)`, with the inner
/// expectations by quadrature against the bridge marginal.
pub fn radial_sym_small_time(
    profile: &RadialProfile,
    n: Dimension,
    t_end: f64,
    r: f64,
) -> Result<KernelValue, ExpansionError> {
    if !(t_end > 0.0) || !(r > 0.0) {
        return Err(ExpansionError::Domain {
            what: "horizon and distance must be positive",
            value: t_end.min(r),
        });
    }
    let g_r = profile.g(r);
    if !(g_r > 0.0) {
        return Err(ExpansionError::Kernel(KernelError::NonPositiveProfile {
            r,
            g: g_r,
        }));
    }
    let nf = n.f();
    let leading = (r / g_r).powf((nf - 1.0) / 2.0) * (-r * r / (2.0 * t_end)).exp()
        / (2.0 * std::f64::consts::PI * t_end).powf(nf / 2.0);

    let functional = PathFunctional::radial(profile, n);
    let spec = marginal_quad_spec();
    let hi = r + 10.0 * t_end.sqrt();
    let steps = 64usize;
    let h = t_end / steps as f64;
    let expectation_at = |t: f64| -> Result<f64, ExpansionError> {
        if t <= 0.0 {
            return Ok(functional.eval(0.0));
        }
        if t >= t_end {
            return Ok(functional.eval(r));
        }
        let v = integrate(
            |rho| {
                functional.eval(rho)
                    * bridge_marginal_density(n, t_end, 0.0, r, t, rho).unwrap_or(f64::NAN)
            },
            0.0,
            hi,
            &spec,
        )
        .map_err(SpecFunError::from)?;
        Ok(v)
    };
    let mut correction = 0.0;
    let mut prev = expectation_at(0.0)?;
    for i in 1..=steps {
        let t = if i == steps { t_end } else { h * i as f64 };
        let cur = expectation_at(t)?;
        correction += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    Ok(KernelValue::deterministic(
        leading * (1.0 + correction),
        Method::SmallTime,
    ))
}
