//! Heat kernel evaluators: quadrature/closed-form references and the Bessel
//! bridge Monte Carlo estimators.
//!
//! Argument convention, uniform across evaluators: time first, then the
//! geodesic distance (or the start/target radii for transition densities).

pub mod closed;
pub mod mc;

use crate::bessel::BesselError;
use crate::specfun::{QuadError, SpecFunError};

/// How a kernel value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Mckean,
    Exact3,
    Gruet,
    McBridge,
    Series,
    SmallTime,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mckean => "mckean",
            Method::Exact3 => "exact3",
            Method::Gruet => "gruet",
            Method::McBridge => "mc_bridge",
            Method::Series => "series",
            Method::SmallTime => "small_time",
        }
    }

    /// Methods that carry a statistical error bar.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Method::McBridge | Method::Series)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mckean" => Ok(Method::Mckean),
            "exact3" => Ok(Method::Exact3),
            "gruet" => Ok(Method::Gruet),
            "mc_bridge" => Ok(Method::McBridge),
            "series" => Ok(Method::Series),
            "small_time" => Ok(Method::SmallTime),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// Heat kernel density value with its provenance; `stderr` is present exactly
/// for the stochastic methods.
#[derive(Clone, Copy, Debug)]
pub struct KernelValue {
    pub value: f64,
    pub method: Method,
    pub stderr: Option<f64>,
}

impl KernelValue {
    pub fn deterministic(value: f64, method: Method) -> Self {
        debug_assert!(!method.is_stochastic());
        Self {
            value,
            method,
            stderr: None,
        }
    }

    pub fn stochastic(value: f64, stderr: f64, method: Method) -> Self {
        debug_assert!(method.is_stochastic());
        Self {
            value,
            method,
            stderr: Some(stderr),
        }
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum KernelError {
    #[error("{what}: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid Monte Carlo config: {0}")]
    BadConfig(String),
    #[error("path functional returned a non-finite value at radius {radius}")]
    NonFiniteFunctional { radius: f64 },
    #[error("radial profile must keep G positive; G({r}) = {g}")]
    NonPositiveProfile { r: f64, g: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Bessel(#[from] BesselError),
}
