//! Half-space and ball models of hyperbolic space, and geodesic distances, so
//! kernels can be queried by point pairs rather than raw distance.

#[derive(Clone, Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("points must have at least 2 coordinates, got {0}")]
    TooFewCoordinates(usize),
    #[error("half-space point needs a positive last coordinate, got {0}")]
    NonPositiveHeight(f64),
    #[error("ball point must lie strictly inside the unit ball, |y| = {0}")]
    OutsideBall(f64),
    #[error("Mobius transform is only defined for n = 2, got n = {0}")]
    MobiusDimension(usize),
}

/// Point in the half-space model: last coordinate strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpacePoint {
    coords: Vec<f64>,
}

impl HalfSpacePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.len() < 2 {
            return Err(GeometryError::TooFewCoordinates(coords.len()));
        }
        let height = *coords.last().unwrap();
        if !(height > 0.0) || !height.is_finite() {
            return Err(GeometryError::NonPositiveHeight(height));
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    fn height(&self) -> f64 {
        *self.coords.last().unwrap()
    }
}

/// Point in the ball model: Euclidean norm strictly below 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.len() < 2 {
            return Err(GeometryError::TooFewCoordinates(coords.len()));
        }
        let norm = norm_sq(&coords).sqrt();
        if !(norm < 1.0) {
            return Err(GeometryError::OutsideBall(norm));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Geodesic length between two points; zero iff they coincide.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct GeodesicDistance {
    r: f64,
}

impl GeodesicDistance {
    pub fn r(self) -> f64 {
        self.r
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn diff_norm_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `acosh(1 + u)` for `u >= 0` without forming `1 + u`.
///
/// Near zero `acosh` loses half its digits to cancellation; the expansion
/// `sqrt(2u) (1 - u/12 + 3u^2/160 - 5u^3/896)` is exact to 1e-16 relative for
/// `u < 1e-4`, and `ln(1 + u + sqrt(u(2+u)))` via `ln_1p` covers the rest.
fn acosh_1p(u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    if u < 1e-4 {
        (2.0 * u).sqrt() * (1.0 - u / 12.0 + 3.0 * u * u / 160.0 - 5.0 * u * u * u / 896.0)
    } else {
        (u + (u * (2.0 + u)).sqrt()).ln_1p()
    }
}

/// Geodesic distance in the half-space model: `cosh r = 1 + |p-q|^2 / (2 p_n q_n)`.
pub fn geodesic_distance_half_space(
    p: &HalfSpacePoint,
    q: &HalfSpacePoint,
) -> Result<GeodesicDistance, GeometryError> {
    if p.dim() != q.dim() {
        return Err(GeometryError::DimensionMismatch(p.dim(), q.dim()));
    }
    let u = diff_norm_sq(p.coords(), q.coords()) / (2.0 * p.height() * q.height());
    Ok(GeodesicDistance { r: acosh_1p(u) })
}

/// Geodesic distance in the ball model:
/// `cosh r = 1 + 2 |p-q|^2 / ((1 - |p|^2)(1 - |q|^2))`.
pub fn geodesic_distance_ball(
    p: &BallPoint,
    q: &BallPoint,
) -> Result<GeodesicDistance, GeometryError> {
    if p.dim() != q.dim() {
        return Err(GeometryError::DimensionMismatch(p.dim(), q.dim()));
    }
    let dp = 1.0 - norm_sq(p.coords());
    let dq = 1.0 - norm_sq(q.coords());
    let u = 2.0 * diff_norm_sq(p.coords(), q.coords()) / (dp * dq);
    Ok(GeodesicDistance { r: acosh_1p(u) })
}

/// Mobius transform `w = (z - i)/(z + i)` between the half-plane and the
/// disk, for `n = 2` only. The point is read as `z = x + i y`, `y > 0`.
pub fn mobius_half_to_ball(z: &HalfSpacePoint) -> Result<BallPoint, GeometryError> {
    if z.dim() != 2 {
        return Err(GeometryError::MobiusDimension(z.dim()));
    }
    let (x, y) = (z.coords()[0], z.coords()[1]);
    let denom = x * x + (y + 1.0) * (y + 1.0);
    let re = (x * x + y * y - 1.0) / denom;
    let im = 2.0 * x / denom;
    BallPoint::new(vec![re, im])
}

/// Ball radius of a point at geodesic distance `r` from the pole.
pub fn ball_radius_from_geodesic(r: f64) -> f64 {
    (r / 2.0).tanh()
}

/// Geodesic distance of a point at ball radius `rho` from the origin.
pub fn geodesic_radius_from_ball(rho: f64) -> f64 {
    2.0 * rho.atanh()
}
