//! Exact Bessel bridge sampling.
//!
//! A Bessel(n) bridge is sampled without discretization bias by bridging the
//! underlying n-dimensional Brownian motion and taking norms:
//!
//! * from the origin, the radial law given the endpoint vector is
//!   direction-independent, so a Brownian bridge from 0 to `r e_1` pins the
//!   radius exactly;
//! * from `x > 0` to `y`, the endpoint direction given `|W_T| = y` has polar
//!   density proportional to `e^{(xy/T) cos xi} sin^{n-2}(xi)` (the integrand
//!   of the `I_nu` integral representation); drawing that angle by inverse
//!   CDF and bridging to the resulting endpoint is again exact in law.

use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::RngStream;
use super::BesselError;
use crate::Dimension;

/// Spacing of the default time grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    /// Intervals grow geometrically (ratio 1.05) from both endpoints toward
    /// the middle, refining where path functionals vary fastest.
    Geometric,
}

const GEOMETRIC_RATIO: f64 = 1.05;

/// Strictly increasing grid on `[0, t_end]` with `steps` intervals.
pub fn time_grid(kind: GridKind, t_end: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 1 && t_end > 0.0);
    let mut times = Vec::with_capacity(steps + 1);
    match kind {
        GridKind::Uniform => {
            let h = t_end / steps as f64;
            times.push(0.0);
            for i in 1..steps {
                times.push(h * i as f64);
            }
            times.push(t_end);
        }
        GridKind::Geometric => {
            let front = steps / 2;
            let back = steps - front;
            let mut widths = Vec::with_capacity(steps);
            for i in 0..front {
                widths.push(GEOMETRIC_RATIO.powi(i as i32));
            }
            for i in (0..back).rev() {
                widths.push(GEOMETRIC_RATIO.powi(i as i32));
            }
            let total: f64 = widths.iter().sum();
            let scale = t_end / total;
            times.push(0.0);
            let mut acc = 0.0;
            for w in &widths[..steps - 1] {
                acc += w * scale;
                times.push(acc);
            }
            times.push(t_end);
        }
    }
    times
}

/// Discretized radial bridge path: exact endpoint pinning, radii >= 0.
#[derive(Clone, Debug)]
pub struct BridgePath {
    times: Vec<f64>,
    radii: Vec<f64>,
}

impl BridgePath {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn validate_grid(grid: &[f64], t_end: f64) -> Result<(), BesselError> {
    if grid.len() < 2 {
        return Err(BesselError::BadGrid("grid needs at least 2 points".into()));
    }
    if grid[0] != 0.0 {
        return Err(BesselError::BadGrid("grid must start at 0".into()));
    }
    if *grid.last().unwrap() != t_end {
        return Err(BesselError::BadGrid(format!(
            "grid must end at the horizon {t_end}, got {}",
            grid.last().unwrap()
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BesselError::BadGrid("grid times must strictly increase".into()));
    }
    Ok(())
}

/// Inverse-CDF table for the endpoint polar angle of a bridge from `x` to
/// `y`: density on `[0, pi]` proportional to `e^{kappa cos xi} sin^{n-2} xi`
/// with `kappa = x y / T`. Built once per estimator call and shared
/// read-only across paths.
#[derive(Clone, Debug)]
pub struct AngleTable {
    xi: Vec<f64>,
    cdf: Vec<f64>,
}

const ANGLE_TABLE_CELLS: usize = 4096;

impl AngleTable {
    pub fn new(n: Dimension, kappa: f64) -> Result<Self, BesselError> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(BesselError::Domain {
                what: "angle table concentration must be positive and finite",
                value: kappa,
            });
        }
        // For large kappa the density lives in a window of width ~1/sqrt(kappa)
        // near 0; restrict the grid there (tail mass below e^{-100}).
        let exp_sin = f64::from(n.get() - 2);
        let xi_max = if kappa > 50.0 {
            std::f64::consts::PI.min((16.0 + exp_sin.sqrt()) / kappa.sqrt())
        } else {
            std::f64::consts::PI
        };
        let m = ANGLE_TABLE_CELLS;
        let h = xi_max / m as f64;
        let mut xi = Vec::with_capacity(m + 1);
        let mut cdf = Vec::with_capacity(m + 1);
        let dens = |v: f64| (kappa * (v.cos() - 1.0)).exp() * v.sin().powf(exp_sin);
        let mut acc = 0.0;
        let mut prev = dens(0.0);
        xi.push(0.0);
        cdf.push(0.0);
        for i in 1..=m {
            let v = if i == m { xi_max } else { h * i as f64 };
            let cur = dens(v);
            acc += 0.5 * (prev + cur) * (v - xi[i - 1]);
            xi.push(v);
            cdf.push(acc);
            prev = cur;
        }
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(BesselError::Domain {
                what: "angle density mass must be positive",
                value: acc,
            });
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        *cdf.last_mut().unwrap() = 1.0;
        Ok(Self { xi, cdf })
    }

    /// Angle at quantile `u` in `[0, 1)` by linear interpolation.
    pub fn sample(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|c| *c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let w = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.xi[i - 1] + w * (self.xi[i] - self.xi[i - 1])
    }
}

/// Walks an n-dimensional Brownian bridge from `start` to `end` over `grid`,
/// reporting the radius at each grid time. The endpoint radii are written
/// exactly, not through the norm. `visit(index, radius)` sees every grid
/// point in order.
pub(crate) fn walk_bridge_radii(
    dim: usize,
    grid: &[f64],
    start: &[f64],
    end: &[f64],
    start_radius: f64,
    end_radius: f64,
    stream: RngStream,
    mirror: bool,
    angle: Option<&AngleTable>,
    mut visit: impl FnMut(usize, f64),
) {
    let mut rng = stream.rng();
    let t_end = *grid.last().unwrap();

    let mut endpoint = end.to_vec();
    let mut end_r = end_radius;
    if let Some(table) = angle {
        // endpoint = y (cos xi, sin xi, 0, ..): draw the polar angle first
        let mut u: f64 = rng.gen();
        if mirror {
            u = 1.0 - u;
        }
        let xi = table.sample(u);
        let y = end_radius;
        endpoint.iter_mut().for_each(|c| *c = 0.0);
        endpoint[0] = y * xi.cos();
        endpoint[1] = y * xi.sin();
        end_r = y;
    }

    let mut state = start.to_vec();
    visit(0, start_radius);
    let last = grid.len() - 1;
    for i in 0..last {
        let dt = grid[i + 1] - grid[i];
        let remaining = t_end - grid[i];
        if i + 1 == last {
            visit(last, end_r);
            break;
        }
        let frac = dt / remaining;
        let sd = (dt * (t_end - grid[i + 1]) / remaining).max(0.0).sqrt();
        let mut norm_sq = 0.0;
        for (s, e) in state.iter_mut().zip(endpoint.iter()).take(dim) {
            let z: f64 = rng.sample(StandardNormal);
            let z = if mirror { -z } else { z };
            *s += (e - *s) * frac + sd * z;
            norm_sq += *s * *s;
        }
        visit(i + 1, norm_sq.sqrt());
    }
}

fn collect_path(
    n: Dimension,
    grid: &[f64],
    start: &[f64],
    end: &[f64],
    start_radius: f64,
    end_radius: f64,
    stream: RngStream,
    mirror: bool,
    angle: Option<&AngleTable>,
) -> BridgePath {
    let mut radii = vec![0.0; grid.len()];
    walk_bridge_radii(
        n.get() as usize,
        grid,
        start,
        end,
        start_radius,
        end_radius,
        stream,
        mirror,
        angle,
        |i, r| radii[i] = r,
    );
    BridgePath {
        times: grid.to_vec(),
        radii,
    }
}

/// One exact-in-law sample of the Bessel(n) bridge from 0 to `r` over `grid`.
pub fn sample_bridge_from_origin(
    n: Dimension,
    t_end: f64,
    r: f64,
    grid: &[f64],
    stream: RngStream,
) -> Result<BridgePath, BesselError> {
    if !(r > 0.0) {
        return Err(BesselError::Domain {
            what: "bridge endpoint radius must be positive",
            value: r,
        });
    }
    validate_grid(grid, t_end)?;
    let dim = n.get() as usize;
    let mut end = vec![0.0; dim];
    end[0] = r;
    Ok(collect_path(n, grid, &vec![0.0; dim], &end, 0.0, r, stream, false, None))
}

/// One exact-in-law sample of the Bessel(n) bridge from `x > 0` to `y > 0`.
///
/// Builds a fresh angle table per call; estimators sampling many paths share
/// one table through [`sample_bridge_with_table`].
pub fn sample_bridge(
    n: Dimension,
    t_end: f64,
    x: f64,
    y: f64,
    grid: &[f64],
    stream: RngStream,
) -> Result<BridgePath, BesselError> {
    if !(x > 0.0) {
        return Err(BesselError::Domain {
            what: "bridge start radius must be positive",
            value: x,
        });
    }
    validate_grid(grid, t_end)?;
    let table = AngleTable::new(n, x * y / t_end)?;
    sample_bridge_with_table(n, t_end, x, y, grid, &table, stream)
}

/// Same as [`sample_bridge`] with a caller-built [`AngleTable`].
pub fn sample_bridge_with_table(
    n: Dimension,
    t_end: f64,
    x: f64,
    y: f64,
    grid: &[f64],
    table: &AngleTable,
    stream: RngStream,
) -> Result<BridgePath, BesselError> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(BesselError::Domain {
            what: "bridge radii must be positive",
            value: x.min(y),
        });
    }
    validate_grid(grid, t_end)?;
    let dim = n.get() as usize;
    let mut start = vec![0.0; dim];
    start[0] = x;
    let end = vec![0.0; dim];
    Ok(collect_path(n, grid, &start, &end, x, y, stream, false, Some(table)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn uniform_grid_shape() {
        let g = time_grid(GridKind::Uniform, 2.0, 4);
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn geometric_grid_refines_endpoints() {
        let g = time_grid(GridKind::Geometric, 1.0, 10);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let first = g[1] - g[0];
        let mid = g[5] - g[4];
        let last = g[10] - g[9];
        assert!(first < mid && last < mid);
    }

    #[test]
    fn origin_bridge_pins_endpoints_exactly() {
        let grid = time_grid(GridKind::Uniform, 1.0, 50);
        for stream in 0..20 {
            let p = sample_bridge_from_origin(dim(3), 1.0, 0.7, &grid, RngStream::new(11, stream))
                .unwrap();
            assert_eq!(p.radii()[0], 0.0);
            assert_eq!(*p.radii().last().unwrap(), 0.7);
            assert!(p.radii().iter().all(|r| *r >= 0.0));
        }
    }

    #[test]
    fn two_sided_bridge_pins_endpoints_exactly() {
        let grid = time_grid(GridKind::Uniform, 0.5, 32);
        for stream in 0..20 {
            let p =
                sample_bridge(dim(4), 0.5, 1.3, 0.9, &grid, RngStream::new(5, stream)).unwrap();
            assert_eq!(p.radii()[0], 1.3);
            assert_eq!(*p.radii().last().unwrap(), 0.9);
            assert!(p.radii().iter().all(|r| *r >= 0.0));
        }
    }

    #[test]
    fn deterministic_given_stream() {
        let grid = time_grid(GridKind::Uniform, 1.0, 16);
        let a = sample_bridge_from_origin(dim(2), 1.0, 1.0, &grid, RngStream::new(42, 9)).unwrap();
        let b = sample_bridge_from_origin(dim(2), 1.0, 1.0, &grid, RngStream::new(42, 9)).unwrap();
        assert_eq!(a.radii(), b.radii());
    }

    #[test]
    fn grid_validation() {
        let g = vec![0.0, 0.5, 1.0];
        assert!(sample_bridge_from_origin(dim(2), 2.0, 1.0, &g, RngStream::new(0, 0)).is_err());
        assert!(sample_bridge_from_origin(dim(2), 1.0, 1.0, &[0.0], RngStream::new(0, 0)).is_err());
        let bad = vec![0.0, 0.6, 0.5, 1.0];
        assert!(sample_bridge_from_origin(dim(2), 1.0, 1.0, &bad, RngStream::new(0, 0)).is_err());
        assert!(sample_bridge_from_origin(dim(2), 1.0, 0.0, &g, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn angle_table_concentrates_for_large_kappa() {
        let t = AngleTable::new(dim(3), 1e4).unwrap();
        // median angle should be near the mode scale 1/sqrt(kappa) = 0.01
        let med = t.sample(0.5);
        assert!(med > 1e-3 && med < 5e-2, "median angle {med}");
        assert!(t.sample(0.999) < 0.2);
    }

    #[test]
    fn angle_table_symmetric_for_small_kappa() {
        // kappa -> 0 with n = 3: density ~ sin(xi), median at pi/2
        let t = AngleTable::new(dim(3), 1e-9).unwrap();
        assert!((t.sample(0.5) - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
    }
}
