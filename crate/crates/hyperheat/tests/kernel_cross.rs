//! Cross-method agreement between the Monte Carlo estimators, the quadrature
//! references, and an independent Euler-Maruyama simulation of the radial
//! SDE.

use hyperheat::bessel::GridKind;
use hyperheat::kernels::closed::{gruet, heat_kernel_mckean, hyperbolic_bessel_density_exact3};
use hyperheat::kernels::mc::{
    heat_kernel_mc, hyperbolic_bessel_density_mc, radial_sym_kernel_mc, McConfig,
};
use hyperheat::profiles::{builtin_profile, BuiltinProfile};
use hyperheat::specfun::QuadratureSpec;
use hyperheat::Dimension;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_distr::StandardNormal;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

#[test]
fn mc_n2_agrees_with_mckean() {
    let cfg = McConfig::new(30_000, 100, 4242);
    let mc = heat_kernel_mc(dim(2), 1.0, 1.0, &cfg).unwrap();
    let truth = heat_kernel_mckean(1.0, 1.0, &QuadratureSpec::default_gl())
        .unwrap()
        .value;
    let sigma = mc.stderr.unwrap();
    assert!(
        (mc.value - truth).abs() <= 3.0 * sigma,
        "mc {} vs mckean {truth} (3 sigma = {})",
        mc.value,
        3.0 * sigma
    );
}

#[test]
fn mc_n4_agrees_with_gruet() {
    let cfg = McConfig::new(30_000, 100, 777);
    let mc = heat_kernel_mc(dim(4), 1.0, 1.0, &cfg).unwrap();
    let truth = gruet(dim(4), 1.0, 1.0, &QuadratureSpec::default_oscillatory())
        .unwrap()
        .value;
    let sigma = mc.stderr.unwrap();
    assert!(
        (mc.value - truth).abs() <= 3.0 * sigma,
        "mc {} vs gruet {truth} (3 sigma = {})",
        mc.value,
        3.0 * sigma
    );
}

#[test]
fn radial_sinh_n2_agrees_with_hyperbolic_route() {
    // same kernel through Theorem-2.1 algebra and through the radial route
    let profile = builtin_profile(BuiltinProfile::Hyperbolic).unwrap();
    let cfg_a = McConfig::new(30_000, 100, 11);
    let cfg_b = McConfig::new(30_000, 100, 22);
    let a = heat_kernel_mc(dim(2), 1.0, 1.0, &cfg_a).unwrap();
    let b = radial_sym_kernel_mc(&profile, dim(2), 1.0, 1.0, &cfg_b).unwrap();
    let sigma = (a.stderr.unwrap().powi(2) + b.stderr.unwrap().powi(2)).sqrt();
    assert!(
        (a.value - b.value).abs() <= 3.0 * sigma,
        "{} vs {} (3 sigma = {sigma})",
        a.value,
        b.value
    );
}

#[test]
fn scaled_profile_matches_rescaled_hyperbolic() {
    // curvature -k^2 rescales: p_k(T, r) = k^n p_1(k^2 T, k r)
    let k = 1.5;
    let n = dim(2);
    let profile = builtin_profile(BuiltinProfile::ScaledHyperbolic(k)).unwrap();
    let cfg = McConfig::new(30_000, 100, 5);
    let (t_end, r) = (0.5, 0.8);
    let scaled = radial_sym_kernel_mc(&profile, n, t_end, r, &cfg).unwrap();
    let reference = heat_kernel_mckean(k * k * t_end, k * r, &QuadratureSpec::default_gl())
        .unwrap()
        .value
        * k.powi(2);
    let sigma = scaled.stderr.unwrap();
    assert!(
        (scaled.value - reference).abs() <= 3.5 * sigma,
        "{} vs {reference} (3.5 sigma = {})",
        scaled.value,
        3.5 * sigma
    );
}

#[test]
fn hb_mc_n2_normalizes_over_target() {
    // trapezoid of the estimated density over a y-grid integrates to 1
    let n = dim(2);
    let (t_end, x) = (1.0, 1.0);
    let cfg = McConfig::new(4_000, 100, 31415);
    let m = 60;
    let hi = 6.5;
    let h = hi / m as f64;
    let mut mass = 0.0;
    let mut prev = 0.0; // density at y = 0 vanishes
    for j in 1..=m {
        let y = h * j as f64;
        let est = hyperbolic_bessel_density_mc(n, t_end, x, y, &cfg).unwrap();
        mass += 0.5 * (prev + est.mean) * h;
        prev = est.mean;
    }
    assert!((mass - 1.0).abs() < 0.01, "mass {mass}");
}

/// Euler-Maruyama simulation of `dR = dW + ((n-1)/2) coth(R) dt` plus a
/// Gaussian-kernel density estimate at `y`: an oracle for the hyperbolic
/// Bessel transition density that shares nothing with the bridge estimator.
fn euler_maruyama_density(
    n: u32,
    t_end: f64,
    x: f64,
    y: f64,
    paths: usize,
    steps: usize,
    bandwidth: f64,
    seed: u64,
) -> (f64, f64) {
    let dt = t_end / steps as f64;
    let drift = f64::from(n - 1) / 2.0;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let norm = 1.0 / (bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for _ in 0..paths {
        let mut r = x;
        for _ in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            r += drift / r.tanh() * dt + dt.sqrt() * z;
            if r < 1e-9 {
                r = 1e-9; // reflecting guard; the drift repels from 0
            }
        }
        let u = (r - y) / bandwidth;
        let w = norm * (-0.5 * u * u).exp();
        acc += w;
        acc2 += w * w;
    }
    let mean = acc / paths as f64;
    let stderr = ((acc2 / paths as f64 - mean * mean) / paths as f64).sqrt();
    (mean, stderr)
}

#[test]
fn hb_mc_n5_agrees_with_euler_maruyama() {
    let n = dim(5);
    let (t_end, x, y) = (0.5, 2.0, 2.0);
    let cfg = McConfig::new(40_000, 100, 99);
    let bridge = hyperbolic_bessel_density_mc(n, t_end, x, y, &cfg).unwrap();

    let (em, em_err) = euler_maruyama_density(5, t_end, x, y, 60_000, 400, 0.05, 1234);
    let sigma = (bridge.stderr * bridge.stderr + em_err * em_err).sqrt();
    // allow the O(dt) + O(bandwidth^2) bias of the oracle on top of 3 sigma
    let tol = 3.0 * sigma + 0.01 * em;
    assert!(
        (bridge.mean - em).abs() <= tol,
        "bridge {} vs EM {em} (tol = {tol})",
        bridge.mean
    );
}

#[test]
fn hb_mc_near_pole_matches_mckean_identity() {
    // p_HB(t, 0, y) = p_{H^2}(t, y) * 2 pi sinh(y); approach the pole from
    // x = 1e-6, which also exercises the small-concentration angle sampler
    let n = dim(2);
    let (t_end, x, y) = (0.7, 1e-6, 1.2);
    let cfg = McConfig::new(30_000, 100, 1203);
    let est = hyperbolic_bessel_density_mc(n, t_end, x, y, &cfg).unwrap();
    let reference = heat_kernel_mckean(t_end, y, &QuadratureSpec::default_gl())
        .unwrap()
        .value
        * 2.0
        * std::f64::consts::PI
        * y.sinh();
    assert!(
        (est.mean - reference).abs() <= 3.5 * est.stderr,
        "{} vs {reference} (3.5 sigma = {})",
        est.mean,
        3.5 * est.stderr
    );
}

#[test]
fn hb_mc_n3_equals_closed_form() {
    let cfg = McConfig::new(10, 10, 3);
    for (t, x, y) in [(0.5, 1.0, 1.5), (1.0, 2.0, 0.4), (2.0, 0.3, 0.3)] {
        let est = hyperbolic_bessel_density_mc(dim(3), t, x, y, &cfg).unwrap();
        let exact = hyperbolic_bessel_density_exact3(t, x, y).unwrap();
        assert_eq!(est.stderr, 0.0);
        assert!(
            ((est.mean - exact) / exact).abs() < 1e-10,
            "t={t}, x={x}, y={y}: {} vs {exact}",
            est.mean
        );
    }
}

#[test]
fn stderr_halves_when_paths_quadruple() {
    // statistical check over 10 independent seed pairs
    let mut ratios = Vec::new();
    for seed in 0..10u64 {
        let small = McConfig::new(2_000, 50, 1000 + seed);
        let large = McConfig::new(8_000, 50, 2000 + seed);
        let a = heat_kernel_mc(dim(2), 1.0, 1.0, &small).unwrap();
        let b = heat_kernel_mc(dim(2), 1.0, 1.0, &large).unwrap();
        ratios.push(a.stderr.unwrap() / b.stderr.unwrap());
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!(
        (mean_ratio - 2.0).abs() < 0.4,
        "expected stderr ratio near 2, got {mean_ratio} from {ratios:?}"
    );
}

#[test]
fn estimate_stable_under_step_doubling() {
    let coarse = McConfig::new(20_000, 100, 8);
    let fine = McConfig::new(20_000, 200, 8);
    let a = heat_kernel_mc(dim(2), 1.0, 1.0, &coarse).unwrap();
    let b = heat_kernel_mc(dim(2), 1.0, 1.0, &fine).unwrap();
    assert!(
        (a.value - b.value).abs() < b.stderr.unwrap() + a.stderr.unwrap(),
        "step refinement moved the estimate: {} vs {}",
        a.value,
        b.value
    );
}

#[test]
fn geometric_grid_consistent_with_uniform() {
    let mut uni = McConfig::new(20_000, 150, 9);
    uni.grid_kind = GridKind::Uniform;
    let mut geo = McConfig::new(20_000, 150, 10);
    geo.grid_kind = GridKind::Geometric;
    let a = heat_kernel_mc(dim(5), 0.8, 1.2, &uni).unwrap();
    let b = heat_kernel_mc(dim(5), 0.8, 1.2, &geo).unwrap();
    let sigma = (a.stderr.unwrap().powi(2) + b.stderr.unwrap().powi(2)).sqrt();
    assert!(
        (a.value - b.value).abs() <= 3.5 * sigma,
        "{} vs {}",
        a.value,
        b.value
    );
}

#[test]
fn hb_small_time_n2_agrees_with_bridge_mc() {
    let n = dim(2);
    let (t_end, x, y) = (0.25, 1.0, 1.5);
    let grid = hyperheat::bessel::time_grid(GridKind::Uniform, t_end, 100);
    let path = hyperheat::expansions::unbiased_path_two_sided(n, t_end, x, y, &grid).unwrap();
    let approx = hyperheat::expansions::hyperbolic_bessel_small_time(n, t_end, x, y, &path).unwrap();
    let cfg = McConfig::new(50_000, 100, 2718);
    let mc = hyperbolic_bessel_density_mc(n, t_end, x, y, &cfg).unwrap();
    assert!(
        (approx - mc.mean).abs() <= 3.0 * mc.stderr,
        "small-time {approx} vs MC {} (3 sigma = {})",
        mc.mean,
        3.0 * mc.stderr
    );
}

#[test]
fn series_partial_sums_do_not_lose_accuracy() {
    // |series(K=4) - truth| <= |series(K=1) - truth| + 3 stderr
    let n = dim(2);
    let (t_end, r) = (1.0, 1.0);
    let grid = hyperheat::bessel::time_grid(GridKind::Uniform, t_end, 100);
    let path = hyperheat::expansions::unbiased_path(n, t_end, r, &grid).unwrap();
    let cfg = McConfig::new(50_000, 100, 1618);
    let truth = heat_kernel_mckean(t_end, r, &QuadratureSpec::default_gl())
        .unwrap()
        .value;
    let k1 = hyperheat::expansions::series_kernel(n, t_end, r, 1, &path, &cfg).unwrap();
    let k4 = hyperheat::expansions::series_kernel(n, t_end, r, 4, &path, &cfg).unwrap();
    assert!(
        (k4.value - truth).abs() <= (k1.value - truth).abs() + 3.0 * k4.stderr.unwrap(),
        "K=4 err {} vs K=1 err {} + 3 sigma {}",
        (k4.value - truth).abs(),
        (k1.value - truth).abs(),
        3.0 * k4.stderr.unwrap()
    );
}

#[test]
fn small_time_unbiased_close_to_mckean_at_quarter_time() {
    let n = dim(2);
    let (t_end, r) = (0.25, 1.0);
    let grid = hyperheat::bessel::time_grid(GridKind::Uniform, t_end, 200);
    let path = hyperheat::expansions::unbiased_path(n, t_end, r, &grid).unwrap();
    let v = hyperheat::expansions::small_time_kernel(n, t_end, r, &path)
        .unwrap()
        .value;
    let truth = heat_kernel_mckean(t_end, r, &QuadratureSpec::default_gl())
        .unwrap()
        .value;
    assert!(
        ((v - truth) / truth).abs() < 0.005,
        "{v} vs {truth}: rel {}",
        ((v - truth) / truth).abs()
    );
}

#[test]
fn antithetic_reduces_variance_here() {
    let plain = McConfig::new(20_000, 80, 314);
    let mut anti = plain;
    anti.antithetic = true;
    let a = heat_kernel_mc(dim(2), 1.0, 1.0, &plain).unwrap();
    let b = heat_kernel_mc(dim(2), 1.0, 1.0, &anti).unwrap();
    // the exponent is monotone-ish in the underlying noise, so pairing helps
    assert!(
        b.stderr.unwrap() < a.stderr.unwrap(),
        "antithetic stderr {} not below plain {}",
        b.stderr.unwrap(),
        a.stderr.unwrap()
    );
}
