//! Special functions and quadrature shared by every kernel evaluator.

mod bessel_i;
mod gamma;
pub mod quad;

pub use bessel_i::{bessel_i, bessel_i_scaled};
pub use gamma::gamma_fn;
pub use quad::{integrate, integrate_semi_infinite, QuadError, QuadScheme, QuadratureSpec};

use crate::Dimension;

#[derive(Clone, Debug, thiserror::Error)]
pub enum SpecFunError {
    #[error("{what}: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("g is identically zero for n = 3 and has no inverse")]
    NotInvertible,
    #[error("target {target} outside the open range ({lo}, {hi}) of g")]
    OutOfRange { target: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Value of `phi(x) = 1/sinh^2(x) - 1/x^2`, confined to `[-1/3, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiValue(f64);

impl PhiValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

// Laurent tail of 1/sinh^2 at 0; phi(x) = -1/3 + x^2/15 - 2x^4/189 + ...
const PHI_SERIES_SWITCH: f64 = 0.15;

fn phi_series(x: f64) -> f64 {
    let x2 = x * x;
    -1.0 / 3.0
        + x2 * (1.0 / 15.0
            + x2 * (-2.0 / 189.0
                + x2 * (1.0 / 675.0 + x2 * (-2.0 / 10395.0 + x2 * (1382.0 / 58046625.0)))))
}

/// `phi(x) = 1/sinh^2(x) - 1/x^2` for `x > 0`, evaluated to ~1e-13 absolute.
///
/// Direct evaluation cancels catastrophically near 0 and overflows past
/// `sinh`'s range, so small arguments go through the series above and large
/// ones through `-1/x^2 + 4 e^{-2x}(1 + 2e^{-2x} + 3e^{-4x})`.
pub fn phi(x: f64) -> Result<PhiValue, SpecFunError> {
    if !(x > 0.0) {
        return Err(SpecFunError::Domain {
            what: "phi argument must be positive",
            value: x,
        });
    }
    let v = if x < PHI_SERIES_SWITCH {
        phi_series(x)
    } else if x <= 20.0 {
        let s = x.sinh();
        1.0 / (s * s) - 1.0 / (x * x)
    } else {
        let e2 = (-2.0 * x).exp();
        -1.0 / (x * x) + 4.0 * e2 * (1.0 + 2.0 * e2 + 3.0 * e2 * e2)
    };
    Ok(PhiValue(v))
}

/// Limit of `phi` as `x -> 0+`.
pub const PHI_AT_ZERO: f64 = -1.0 / 3.0;

/// `g(r) = -((n-1)(n-3)/8) * phi(r)`, the integrand of the bridge exponent.
///
/// Identically zero for `n = 3`; for `n >= 4` strictly decreasing from
/// `(n-1)(n-3)/24` to 0, for `n = 2` strictly increasing from `-1/24` to 0.
pub fn g_fn(n: Dimension, r: f64) -> Result<f64, SpecFunError> {
    if n.get() == 3 {
        if !(r > 0.0) {
            return Err(SpecFunError::Domain {
                what: "g_fn radius must be positive",
                value: r,
            });
        }
        return Ok(0.0);
    }
    Ok(-(n.n1n3() / 8.0) * phi(r)?.value())
}

/// Limit of `g` as `r -> 0+`: `(n-1)(n-3)/24`.
pub fn g_at_zero(n: Dimension) -> f64 {
    n.n1n3() / 24.0
}

/// `g` extended to `r = 0` by its limit; what path functionals evaluate at
/// the pinned origin endpoint.
pub fn g_with_limit(n: Dimension, r: f64) -> f64 {
    if r == 0.0 {
        g_at_zero(n)
    } else {
        -(n.n1n3() / 8.0) * phi(r).map(PhiValue::value).unwrap_or(f64::NAN)
    }
}

/// Inverse of `g` by bracketed bisection on its monotone branch. Requires
/// `n != 3` and `y` strictly between 0 and `g(0+)`.
pub fn g_inverse(n: Dimension, y: f64) -> Result<f64, SpecFunError> {
    if n.get() == 3 {
        return Err(SpecFunError::NotInvertible);
    }
    let g0 = g_at_zero(n);
    let (lo_val, hi_val) = if g0 > 0.0 { (0.0, g0) } else { (g0, 0.0) };
    if !(y > lo_val && y < hi_val) {
        return Err(SpecFunError::OutOfRange {
            target: y,
            lo: lo_val,
            hi: hi_val,
        });
    }
    let decreasing = g0 > 0.0; // n >= 4; for n = 2 g is increasing
    let g = |r: f64| g_fn(n, r);

    // expand the bracket [lo, hi] until g(lo), g(hi) straddle y
    let mut lo = 1e-8;
    let mut hi = 1.0;
    let above = |val: f64| if decreasing { val > y } else { val < y };
    let mut guard = 0;
    while !above(g(lo)?) {
        lo *= 0.5;
        guard += 1;
        if guard > 1100 {
            return Err(SpecFunError::OutOfRange {
                target: y,
                lo: lo_val,
                hi: hi_val,
            });
        }
    }
    guard = 0;
    while above(g(hi)?) {
        hi *= 2.0;
        guard += 1;
        if guard > 1100 {
            return Err(SpecFunError::OutOfRange {
                target: y,
                lo: lo_val,
                hi: hi_val,
            });
        }
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if (gm - y).abs() <= 1e-12 {
            return Ok(mid);
        }
        if above(gm) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}
