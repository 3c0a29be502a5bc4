//! Heat kernels on hyperbolic space `H^n` and radially symmetric
//! Cartan-Hadamard spaces.
//!
//! The central object is an exact Bessel-bridge Monte Carlo representation of
//! the heat kernel: the kernel at geodesic distance `r` factors into a
//! closed-form Gaussian-type prefactor times the expectation of an exponential
//! path functional under the Bessel bridge pinned at `r`. The crate provides
//!
//! * [`kernels::mc`]: the bridge Monte Carlo estimators (hyperbolic,
//!   hyperbolic Bessel transition density, general radial profile),
//! * [`kernels::closed`]: quadrature/closed-form reference kernels (McKean
//!   for `n = 2`, the exact `n = 3` kernel, Gruet's single integral for all
//!   `n`, and the order-3 hyperbolic Bessel density),
//! * [`expansions`]: deterministic small-time expansions and the series
//!   expansion around an unbiased deterministic radial path,
//! * [`bessel`]: exact Bessel bridge sampling and Bessel process densities,
//! * [`specfun`]: Gamma, modified Bessel `I_nu`, the stable `phi`/`g`
//!   functions and the quadrature engines,
//! * [`geometry`]: half-space/ball models and geodesic distances,
//! * [`profiles`]: built-in radial profiles for the radially symmetric case.
//!
//! All Monte Carlo estimators are deterministic for a fixed configuration:
//! paths draw from counter-based per-path RNG streams and reductions run in a
//! fixed tree order, so results are bitwise reproducible regardless of the
//! number of worker threads.

pub mod bessel;
pub mod expansions;
pub mod geometry;
pub mod kernels;
pub mod profiles;
pub mod specfun;

pub use kernels::{KernelValue, Method};

/// Ambient dimension of the space, `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dimension(u32);

/// Error for dimensions outside the supported range.
#[derive(Clone, Copy, Debug, thiserror::Error)]
#[error("dimension must be an integer >= 2, got {0}")]
pub struct InvalidDimension(pub u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self, InvalidDimension> {
        if n >= 2 {
            Ok(Self(n))
        } else {
            Err(InvalidDimension(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub(crate) fn f(self) -> f64 {
        f64::from(self.0)
    }

    /// Bessel order parameter `nu = n/2 - 1`.
    pub fn bessel_order(self) -> f64 {
        self.f() / 2.0 - 1.0
    }

    /// `(n-1)(n-3)`, the combinatorial factor in every exponent. Negative for
    /// `n = 2`, zero for `n = 3`.
    pub(crate) fn n1n3(self) -> f64 {
        let n = i64::from(self.0);
        ((n - 1) * (n - 3)) as f64
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_rejects_small() {
        assert!(Dimension::new(0).is_err());
        assert!(Dimension::new(1).is_err());
        assert_eq!(Dimension::new(2).unwrap().get(), 2);
    }

    #[test]
    fn combinatorial_factor_signs() {
        assert_eq!(Dimension::new(2).unwrap().n1n3(), -1.0);
        assert_eq!(Dimension::new(3).unwrap().n1n3(), 0.0);
        assert_eq!(Dimension::new(5).unwrap().n1n3(), 8.0);
    }
}
