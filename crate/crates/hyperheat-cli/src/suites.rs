//! Validation suites behind `hyperheat validate --suite <name>`: each check
//! prints its name, the observed value, and the bound it was held to.

use hyperheat::bessel::{bessel_transition_density, bridge_marginal_density};
use hyperheat::expansions::{small_time_kernel, straight_line_path, unbiased_path};
use hyperheat::kernels::closed::{gruet, heat_kernel_h3, heat_kernel_mckean};
use hyperheat::kernels::mc::{heat_kernel_mc, McConfig};
use hyperheat::specfun::{bessel_i, integrate, integrate_semi_infinite, QuadratureSpec};
use hyperheat::Dimension;

pub struct Check {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn upper(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            bound,
            pass: observed.is_finite() && observed <= bound,
        }
    }

    fn window(name: impl Into<String>, observed: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: format!("{} (in [{lo}, {hi}])", name.into()),
            observed,
            bound: hi,
            pass: observed.is_finite() && observed >= lo && observed <= hi,
        }
    }
}

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn run_suite(name: &str, seed: u64) -> Option<Vec<Check>> {
    match name {
        "normalization" => Some(normalization_suite()),
        "consistency" => Some(consistency_suite(seed)),
        "order" => Some(order_suite()),
        "bessel" => Some(bessel_suite()),
        _ => None,
    }
}

/// Vol(S^{n-1}) int_0^inf p(T, r) sinh^{n-1}(r) dr = 1 for the
/// quadrature-backed kernels.
fn normalization_suite() -> Vec<Check> {
    let spec = QuadratureSpec::default_gl();
    let mut checks = Vec::new();
    for t in [0.25f64, 1.0, 4.0] {
        let sd = (4.0 * t).sqrt();
        let mass2 = 2.0 * std::f64::consts::PI
            * integrate_semi_infinite(
                |r| heat_kernel_mckean(t, r, &spec).unwrap().value * r.sinh(),
                0.0,
                |r| (-(r - t) * (r - t) / (4.0 * t)).exp() * 2.0 * sd,
                &spec,
            )
            .unwrap_or(f64::NAN);
        checks.push(Check::upper(
            format!("H2 mckean mass deviation, T={t}"),
            (mass2 - 1.0).abs(),
            1e-5,
        ));
        let mass3 = 4.0 * std::f64::consts::PI
            * integrate_semi_infinite(
                |r| heat_kernel_h3(t, r).unwrap().value * r.sinh() * r.sinh(),
                0.0,
                |r| (-(r - 2.0 * t) * (r - 2.0 * t) / (4.0 * t)).exp() * 2.0 * sd,
                &spec,
            )
            .unwrap_or(f64::NAN);
        checks.push(Check::upper(
            format!("H3 exact3 mass deviation, T={t}"),
            (mass3 - 1.0).abs(),
            1e-5,
        ));
    }
    checks
}

/// exact3 / gruet / bridge-MC triangle at fixed points.
fn consistency_suite(seed: u64) -> Vec<Check> {
    let osc = QuadratureSpec::default_oscillatory();
    let gl = QuadratureSpec::default_gl();
    let mut checks = Vec::new();

    for (t, r) in [(1.0, 1.0), (2.0, 0.5)] {
        let g = gruet(dim(3), t, r, &osc).unwrap().value;
        let e = heat_kernel_h3(t, r).unwrap().value;
        checks.push(Check::upper(
            format!("gruet(3) vs exact3 rel diff, T={t}, r={r}"),
            rel(g, e),
            1e-8,
        ));
    }

    let g2 = gruet(dim(2), 1.0, 1.0, &osc).unwrap().value;
    let m2 = heat_kernel_mckean(1.0, 1.0, &gl).unwrap().value;
    checks.push(Check::upper(
        "gruet(2) vs mckean rel diff, T=1, r=1",
        rel(g2, m2),
        1e-6,
    ));

    let mc3 = heat_kernel_mc(dim(3), 1.0, 1.0, &McConfig::new(10, 10, seed)).unwrap();
    checks.push(Check::upper(
        "mc(3) vs exact3 rel diff (zero-variance case)",
        rel(mc3.value, heat_kernel_h3(1.0, 1.0).unwrap().value),
        1e-12,
    ));
    checks.push(Check::upper("mc(3) stderr", mc3.stderr.unwrap(), 0.0));

    let cfg = McConfig::new(40_000, 200, seed);
    let mc2 = heat_kernel_mc(dim(2), 1.0, 1.0, &cfg).unwrap();
    let sigma = mc2.stderr.unwrap();
    checks.push(Check::upper(
        format!("mc(2) vs mckean deviation over stderr, {} paths", cfg.paths),
        (mc2.value - m2).abs() / sigma,
        3.0,
    ));
    checks
}

/// Small-time error ratios against McKean quadrature at n = 2, r = 1 for
/// the unbiased and straight-line paths.
fn order_suite() -> Vec<Check> {
    let gl = QuadratureSpec::default_gl();
    let n = dim(2);
    let r = 1.0;
    let mut errs_unbiased = Vec::new();
    let mut errs_straight = Vec::new();
    for t in [0.5, 0.25] {
        let truth = heat_kernel_mckean(t, r, &gl).unwrap().value;
        let grid = hyperheat::bessel::time_grid(hyperheat::bessel::GridKind::Uniform, t, 200);
        let pu = unbiased_path(n, t, r, &grid).unwrap();
        let vu = small_time_kernel(n, t, r, &pu).unwrap().value;
        errs_unbiased.push(rel(vu, truth));
        let ps = straight_line_path(t, r, &grid);
        let vs = small_time_kernel(n, t, r, &ps).unwrap().value;
        errs_straight.push(rel(vs, truth));
    }
    vec![
        Check::window(
            "unbiased-path error ratio err(0.5)/err(0.25)",
            errs_unbiased[0] / errs_unbiased[1],
            3.0,
            5.0,
        ),
        Check::window(
            "straight-line error ratio err(0.5)/err(0.25)",
            errs_straight[0] / errs_straight[1],
            1.6,
            2.6,
        ),
    ]
}

/// Bessel special-function and density identities.
fn bessel_suite() -> Vec<Check> {
    let gl = QuadratureSpec::default_gl();
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for i in 0..40 {
        let z = 1e-3 * (30.0f64 / 1e-3).powf(i as f64 / 39.0);
        let closed = (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sinh();
        worst = worst.max(rel(bessel_i(0.5, z).unwrap(), closed));
    }
    checks.push(Check::upper(
        "I_1/2 vs closed form, worst rel diff on z in [1e-3, 30]",
        worst,
        1e-10,
    ));

    let mut worst_ck = 0.0f64;
    for (n, s, t, x, y) in [(2u32, 0.4, 0.6, 0.8, 1.2), (3, 0.2, 0.5, 1.0, 0.5)] {
        let nn = dim(n);
        let direct = bessel_transition_density(nn, s + t, x, y).unwrap();
        let composed = integrate_semi_infinite(
            |rho| {
                bessel_transition_density(nn, s, x, rho).unwrap()
                    * bessel_transition_density(nn, t, rho, y).unwrap()
            },
            0.0,
            |rho| (-(rho - x - y).max(0.0).powi(2) / (2.0 * (s + t))).exp(),
            &gl,
        )
        .unwrap_or(f64::NAN);
        worst_ck = worst_ck.max(rel(composed, direct));
    }
    checks.push(Check::upper(
        "Chapman-Kolmogorov worst rel deviation",
        worst_ck,
        1e-6,
    ));

    let mass = integrate(
        |rho| bridge_marginal_density(dim(2), 1.0, 0.0, 1.0, 0.3, rho).unwrap(),
        0.0,
        12.0,
        &gl,
    )
    .unwrap_or(f64::NAN);
    checks.push(Check::upper(
        "bridge marginal mass deviation (n=2, t=0.3)",
        (mass - 1.0).abs(),
        1e-8,
    ));
    checks
}
