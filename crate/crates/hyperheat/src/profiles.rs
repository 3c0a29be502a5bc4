//! Built-in radial profiles for the radially symmetric representation and
//! numerical validation of user-supplied ones.

use crate::kernels::mc::RadialProfile;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinProfile {
    /// `G(r) = r`: flat space, all corrections vanish.
    Euclidean,
    /// `G(r) = sinh r`: curvature -1, recovers the hyperbolic kernels.
    Hyperbolic,
    /// `G(r) = sinh(k r)/k`: constant curvature `-k^2`.
    ScaledHyperbolic(f64),
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("scaled hyperbolic profile needs k > 0, got {0}")]
    BadScale(f64),
}

pub fn builtin_profile(name: BuiltinProfile) -> Result<RadialProfile, ProfileError> {
    match name {
        BuiltinProfile::Euclidean => Ok(RadialProfile::new(|r| r, |_| 1.0, |_| 0.0, 0.0)),
        BuiltinProfile::Hyperbolic => Ok(RadialProfile::new(
            f64::sinh,
            f64::cosh,
            f64::sinh,
            // |coth r - 1/r| < 1 on (0, inf)
            1.0,
        )),
        BuiltinProfile::ScaledHyperbolic(k) => {
            if !(k > 0.0) || !k.is_finite() {
                return Err(ProfileError::BadScale(k));
            }
            Ok(RadialProfile::new(
                move |r| (k * r).sinh() / k,
                move |r| (k * r).cosh(),
                move |r| k * (k * r).sinh(),
                k,
            ))
        }
    }
}

/// Outcome of numerically vetting a profile on a test grid.
#[derive(Clone, Debug)]
pub struct ProfileReport {
    /// Largest observed `|d/dr ln(G(r)/r)|`.
    pub max_log_deriv: f64,
    /// `G(0+) -> 0` held.
    pub g0_ok: bool,
    /// `G'(0+) -> 1` held.
    pub gprime0_ok: bool,
    pub violations: Vec<(f64, String)>,
}

impl ProfileReport {
    pub fn accepted(&self, c: f64) -> bool {
        self.violations.is_empty() && self.max_log_deriv <= c + 1e-12
    }
}

/// Checks `G > 0` on `(0, r_max]`, the endpoint limits `G(0+) = 0` and
/// `G'(0+) = 1`, central-difference consistency of `G1`/`G2` with `G`, and
/// the log-derivative regularity bound, all on a grid of `grid_points`
/// radii.
pub fn validate_profile(p: &RadialProfile, r_max: f64, grid_points: usize) -> ProfileReport {
    let mut violations = Vec::new();

    let g_near0 = p.g(1e-8);
    let g0_ok = g_near0.abs() <= 1e-6;
    if !g0_ok {
        violations.push((0.0, format!("G(0+) = {g_near0}, expected 0")));
    }
    let g1_near0 = p.g1(1e-8);
    let gprime0_ok = (g1_near0 - 1.0).abs() <= 1e-5;
    if !gprime0_ok {
        violations.push((0.0, format!("G'(0+) = {g1_near0}, expected 1")));
    }

    let m = grid_points.max(2);
    let mut max_log_deriv: f64 = 0.0;
    for j in 0..m {
        // log-spaced grid over (1e-4, r_max]
        let frac = j as f64 / (m - 1) as f64;
        let r = 1e-4 * (r_max / 1e-4_f64).powf(frac);
        let g = p.g(r);
        if !(g > 0.0) {
            violations.push((r, format!("G({r}) = {g}, must be positive")));
            continue;
        }
        // |d/dr ln(G/r)| = |G'/G - 1/r|
        let log_deriv = (p.g1(r) / g - 1.0 / r).abs();
        if log_deriv.is_finite() {
            max_log_deriv = max_log_deriv.max(log_deriv);
        }

        if r > 2e-2 {
            let h1 = 1e-5;
            let fd1 = (p.g(r + h1) - p.g(r - h1)) / (2.0 * h1);
            if (p.g1(r) - fd1).abs() > 1e-5 * (1.0 + p.g1(r).abs()) {
                violations.push((r, format!("G1({r}) = {} vs central difference {fd1}", p.g1(r))));
            }
            let h2 = 1e-4;
            let fd2 = (p.g(r + h2) - 2.0 * g + p.g(r - h2)) / (h2 * h2);
            if (p.g2(r) - fd2).abs() > 1e-4 * (1.0 + p.g2(r).abs()) {
                violations.push((r, format!("G2({r}) = {} vs central difference {fd2}", p.g2(r))));
            }
        }
    }

    ProfileReport {
        max_log_deriv,
        g0_ok,
        gprime0_ok,
        violations,
    }
}
