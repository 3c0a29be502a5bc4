//! Bessel process densities and exact Bessel bridge path sampling, the
//! probabilistic engine behind every Monte Carlo representation here.

mod bridge;
mod rng;

pub use bridge::{
    sample_bridge, sample_bridge_from_origin, sample_bridge_with_table, time_grid, AngleTable,
    BridgePath, GridKind,
};
pub(crate) use bridge::walk_bridge_radii;
pub use rng::RngStream;

use crate::specfun::{bessel_i_scaled, gamma_fn, SpecFunError};
use crate::Dimension;

#[derive(Clone, Debug, thiserror::Error)]
pub enum BesselError {
    #[error("{what}: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid time grid: {0}")]
    BadGrid(String),
    #[error("bridge endpoints have zero transition density (t = {t}, {a} -> {b})")]
    DegenerateBridge { t: f64, a: f64, b: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Density at radius `r` of a Bessel(n) process at time `t` started at the
/// origin: `p_B(t, r) = 2 r^{n-1} e^{-r^2/2t} / ((2t)^{n/2} Gamma(n/2))`.
pub fn bessel_density_from_origin(n: Dimension, t: f64, r: f64) -> Result<f64, BesselError> {
    if !(t > 0.0) {
        return Err(BesselError::Domain {
            what: "time must be positive",
            value: t,
        });
    }
    if !(r >= 0.0) {
        return Err(BesselError::Domain {
            what: "radius must be nonnegative",
            value: r,
        });
    }
    let nf = n.f();
    let gamma = gamma_fn(nf / 2.0)?;
    Ok(2.0 * r.powi(n.get() as i32 - 1) * (-r * r / (2.0 * t)).exp()
        / ((2.0 * t).powf(nf / 2.0) * gamma))
}

/// Transition density `p_B(t, x, y)` of the Bessel(n) process.
///
/// Two-case formula with `nu = n/2 - 1`: the origin density for `x = 0`,
/// otherwise `(y/x)^nu (y/t) e^{-(x-y)^2/2t} [e^{-z} I_nu(z)]` at `z = xy/t`,
/// assembled from the scaled Bessel function so small times do not overflow.
pub fn bessel_transition_density(n: Dimension, t: f64, x: f64, y: f64) -> Result<f64, BesselError> {
    if !(t > 0.0) {
        return Err(BesselError::Domain {
            what: "time must be positive",
            value: t,
        });
    }
    if !(y > 0.0) {
        return Err(BesselError::Domain {
            what: "target radius must be positive",
            value: y,
        });
    }
    if !(x >= 0.0) {
        return Err(BesselError::Domain {
            what: "start radius must be nonnegative",
            value: x,
        });
    }
    if x == 0.0 {
        return bessel_density_from_origin(n, t, y);
    }
    let nu = n.bessel_order();
    let z = x * y / t;
    let scaled = bessel_i_scaled(nu, z)?;
    let diff = x - y;
    Ok((y / x).powf(nu) * (y / t) * (-diff * diff / (2.0 * t)).exp() * scaled)
}

/// Marginal density in `rho` at interior time `t` of the Bessel(n) bridge
/// from `a` to `b` over `[0, T]`:
/// `p_B(t, a, rho) p_B(T-t, rho, b) / p_B(T, a, b)`.
pub fn bridge_marginal_density(
    n: Dimension,
    t_end: f64,
    a: f64,
    b: f64,
    t: f64,
    rho: f64,
) -> Result<f64, BesselError> {
    if !(t > 0.0 && t < t_end) {
        return Err(BesselError::Domain {
            what: "marginal time must lie strictly inside (0, T)",
            value: t,
        });
    }
    if !(rho >= 0.0) {
        return Err(BesselError::Domain {
            what: "marginal radius must be nonnegative",
            value: rho,
        });
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let denom = bessel_transition_density(n, t_end, a, b)?;
    if denom <= 0.0 {
        return Err(BesselError::DegenerateBridge { t: t_end, a, b });
    }
    let forward = bessel_transition_density(n, t, a, rho)?;
    let backward = bessel_transition_density(n, t_end - t, rho, b)?;
    Ok(forward * backward / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, integrate_semi_infinite, QuadratureSpec};
    use proptest::prelude::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn origin_density_reference_points() {
        // chi distribution with 3 degrees of freedom at r = 1
        let v = bessel_density_from_origin(dim(3), 1.0, 1.0).unwrap();
        assert!(rel(v, 0.4839414490382866996) < 1e-13);
        // r^{n-1} factor kills the density at the origin for n = 2
        assert_eq!(bessel_density_from_origin(dim(2), 1.0, 0.0).unwrap(), 0.0);
        assert!(bessel_density_from_origin(dim(2), 0.0, 1.0).is_err());
    }

    #[test]
    fn origin_density_normalizes() {
        let spec = QuadratureSpec::default_gl();
        for n in [2u32, 3, 5] {
            let total = integrate_semi_infinite(
                |r| bessel_density_from_origin(dim(n), 1.0, r).unwrap(),
                0.0,
                |r| (-r * r / 4.0).exp(),
                &spec,
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-10, "n = {n}: {total}");
        }
    }

    #[test]
    fn transition_density_reference_point() {
        // n = 3, t = 1, x = y = 1: e^{-1} I_{1/2}(1)
        let v = bessel_transition_density(dim(3), 1.0, 1.0, 1.0).unwrap();
        assert!(rel(v, 0.34495131388824462599) < 1e-10);
    }

    #[test]
    fn transition_density_origin_branch_is_shared() {
        let a = bessel_transition_density(dim(4), 0.7, 0.0, 1.3).unwrap();
        let b = bessel_density_from_origin(dim(4), 0.7, 1.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn transition_density_continuous_at_origin() {
        let near = bessel_transition_density(dim(3), 1.0, 1e-8, 1.0).unwrap();
        let at = bessel_transition_density(dim(3), 1.0, 0.0, 1.0).unwrap();
        assert!(rel(near, at) < 1e-6, "{near} vs {at}");
    }

    #[test]
    fn chapman_kolmogorov() {
        let spec = QuadratureSpec::default_gl();
        for (n, s, t, x, y) in [
            (2u32, 0.4, 0.6, 0.8, 1.2),
            (3, 0.2, 0.5, 1.0, 0.5),
            (5, 1.0, 1.0, 2.0, 1.5),
        ] {
            let n = dim(n);
            let direct = bessel_transition_density(n, s + t, x, y).unwrap();
            let composed = integrate_semi_infinite(
                |rho| {
                    bessel_transition_density(n, s, x, rho).unwrap()
                        * bessel_transition_density(n, t, rho, y).unwrap()
                },
                0.0,
                |rho| (-(rho - x - y).max(0.0).powi(2) / (2.0 * (s + t))).exp(),
                &spec,
            )
            .unwrap();
            assert!(
                rel(composed, direct) < 1e-6,
                "CK failed: {composed} vs {direct}"
            );
        }
    }

    proptest! {
        #[test]
        fn scaling_law(c in 0.2f64..5.0, x in 0.1f64..3.0, y in 0.1f64..3.0, t in 0.1f64..4.0) {
            // p_B(t, x, y) = (1/c) p_B(t/c^2, x/c, y/c)
            let n = dim(3);
            let lhs = bessel_transition_density(n, t, x, y).unwrap();
            let rhs = bessel_transition_density(n, t / (c * c), x / c, y / c).unwrap() / c;
            prop_assert!(rel(lhs, rhs) < 1e-10, "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn marginal_normalizes_and_concentrates() {
        let spec = QuadratureSpec::default_gl();
        let n = dim(2);
        let total = integrate(
            |rho| bridge_marginal_density(n, 1.0, 0.0, 1.0, 0.3, rho).unwrap(),
            0.0,
            12.0,
            &spec,
        )
        .unwrap();
        assert!((total - 1.0).abs() < 1e-8, "mass {total}");

        // t -> 0 pushes the mass to the start point a = 0
        let mean_small_t = integrate(
            |rho| rho * bridge_marginal_density(n, 1.0, 0.0, 1.0, 1e-4, rho).unwrap(),
            0.0,
            1.0,
            &spec,
        )
        .unwrap();
        assert!(mean_small_t < 0.02, "mean {mean_small_t}");
    }

    #[test]
    fn marginal_rejects_bad_times() {
        let n = dim(2);
        assert!(bridge_marginal_density(n, 1.0, 0.0, 1.0, 0.0, 0.5).is_err());
        assert!(bridge_marginal_density(n, 1.0, 0.0, 1.0, 1.0, 0.5).is_err());
        assert_eq!(
            bridge_marginal_density(n, 1.0, 0.0, 1.0, 0.5, 0.0).unwrap(),
            0.0
        );
    }
}
