//! Points and the input domain.
//!
//! The input domain is the interval `[-1, 1]` when `d = 1` and the closed
//! unit ball of `R^d` when `d >= 2`; both are the unit ball of the
//! Euclidean norm, so a single containment test covers every dimension.

use crate::error::{Error, Result};

/// A point of `R^d`. Containment in the input domain is enforced where it
/// matters (training sets, samplers), not at construction: quadrature for
/// the smoothed witness evaluates integrands on the enlarged set `3X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point(vec![x])
    }
}

/// Whether `p` lies in the input domain (unit ball, with a hair of slack
/// for rounding in norm computations).
pub fn domain_contains(p: &Point) -> bool {
    p.norm_sq() <= 1.0 + 1e-12
}

pub fn check_in_domain(p: &Point) -> Result<()> {
    if domain_contains(p) {
        Ok(())
    } else {
        Err(Error::OutsideDomain { norm: p.norm() })
    }
}

/// Volume of the unit ball of `R^d` via the even/odd recurrence
/// `V_d = 2 pi V_{d-2} / d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * unit_ball_volume(d - 2) / d as f64,
    }
}

/// Sign convention used throughout: `sign(0) = +1`.
pub fn sign_pm(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}
