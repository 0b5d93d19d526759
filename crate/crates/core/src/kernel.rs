//! Gaussian RBF kernel, Gram matrices, and finite kernel expansions.
//!
//! The width parameter follows the inverse-width convention
//! `k_sigma(x, x') = exp(-sigma^2 ||x - x'||^2)`: larger `sigma` means a
//! narrower kernel. All width handling goes through [`GaussianKernel`] so
//! the convention cannot silently flip.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianKernel {
    sigma: f64,
}

impl GaussianKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(GaussianKernel { sigma })
        } else {
            Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("kernel width parameter must be positive and finite, got {sigma}"),
            })
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        (-self.sigma * self.sigma * x.dist_sq(y)).exp()
    }

    /// Dense Gram matrix; symmetric with unit diagonal by construction.
    pub fn gram(&self, points: &[Point]) -> DMatrix<f64> {
        let n = points.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = 1.0;
            for j in (i + 1)..n {
                let v = self.eval(&points[i], &points[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }
}

/// A function of the form `f(x) = sum_i c_i k(x_i, x) + b`.
///
/// The offset `b` is not an element of the reproducing space; the RKHS norm
/// deliberately excludes it.
#[derive(Clone, Debug)]
pub struct KernelExpansion {
    pub kernel: GaussianKernel,
    pub centers: Vec<Point>,
    pub coefficients: Vec<f64>,
    pub offset: f64,
}

impl KernelExpansion {
    pub fn new(
        kernel: GaussianKernel,
        centers: Vec<Point>,
        coefficients: Vec<f64>,
        offset: f64,
    ) -> Result<Self> {
        if centers.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: centers.len(),
                got: coefficients.len(),
            });
        }
        if centers.is_empty() {
            return Err(Error::Empty("kernel expansion"));
        }
        let d = centers[0].dim();
        for c in &centers {
            if c.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: c.dim(),
                });
            }
        }
        Ok(KernelExpansion {
            kernel,
            centers,
            coefficients,
            offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.centers[0].dim()
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let mut acc = self.offset;
        for (c, &w) in self.centers.iter().zip(&self.coefficients) {
            acc += w * self.kernel.eval(c, x);
        }
        acc
    }

    /// Borrow as a plain function for the risk integrators.
    pub fn as_fn(&self) -> impl Fn(&Point) -> f64 + '_ {
        move |x| self.eval(x)
    }

    /// `c^T K c`; tiny negative rounding residue is clamped to zero.
    pub fn rkhs_norm_sq(&self) -> f64 {
        let n = self.centers.len();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.coefficients[i] * self.coefficients[i];
            for j in (i + 1)..n {
                acc += 2.0
                    * self.coefficients[i]
                    * self.coefficients[j]
                    * self.kernel.eval(&self.centers[i], &self.centers[j]);
            }
        }
        acc.max(0.0)
    }

    pub fn rkhs_norm(&self) -> f64 {
        self.rkhs_norm_sq().sqrt()
    }

    /// Text form: header with the width, dimension, center count and offset,
    /// one line per (center, coefficient). Floats round-trip bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# sigma={} d={} n_centers={} offset={}\n",
            self.kernel.sigma(),
            self.dim(),
            self.centers.len(),
            self.offset
        ));
        for (c, w) in self.centers.iter().zip(&self.coefficients) {
            for v in &c.0 {
                out.push_str(&format!("{v} "));
            }
            out.push_str(&format!("{w}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Empty("expansion file"))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: "missing '#' header".into(),
            })?
            .trim();
        let (mut sigma, mut d, mut n, mut offset) = (None, None, None, None);
        for tok in header.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                reason: format!("malformed header token '{tok}'"),
            })?;
            match k {
                "sigma" => sigma = v.parse::<f64>().ok(),
                "d" => d = v.parse::<usize>().ok(),
                "n_centers" => n = v.parse::<usize>().ok(),
                "offset" => offset = v.parse::<f64>().ok(),
                _ => {
                    return Err(Error::Parse {
                        line: 1,
                        reason: format!("unknown header key '{k}'"),
                    })
                }
            }
        }
        let (sigma, d, n, offset) = match (sigma, d, n, offset) {
            (Some(s), Some(d), Some(n), Some(o)) => (s, d, n, o),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    reason: "header must define sigma, d, n_centers, offset".into(),
                })
            }
        };
        let mut centers = Vec::with_capacity(n);
        let mut coefficients = Vec::with_capacity(n);
        for (i, line) in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != d + 1 {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected {} fields, got {}", d + 1, fields.len()),
                });
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            let mut parsed = parsed.map_err(|e| Error::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            let w = parsed.pop().unwrap();
            centers.push(Point(parsed));
            coefficients.push(w);
        }
        if centers.len() != n {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header says n_centers={n} but file has {}", centers.len()),
            });
        }
        KernelExpansion::new(GaussianKernel::new(sigma)?, centers, coefficients, offset)
    }
}

/// Pointwise clamp of any function into `[-1, 1]`. Clipping never increases
/// the hinge risk, and the clipped function is admissible for the
/// margin-identity risk route.
pub fn clip<F: Fn(&Point) -> f64>(f: F) -> impl Fn(&Point) -> f64 {
    move |x| f(x).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p1(x: f64) -> Point {
        Point(vec![x])
    }

    #[test]
    fn kernel_width_convention() {
        let k1 = GaussianKernel::new(1.0).unwrap();
        assert!((k1.eval(&p1(0.0), &p1(1.0)) - (-1.0f64).exp()).abs() < 1e-15);
        let k2 = GaussianKernel::new(2.0).unwrap();
        assert!((k2.eval(&p1(0.0), &p1(0.5)) - (-1.0f64).exp()).abs() < 1e-15);
        // Larger sigma = narrower kernel.
        assert!(k2.eval(&p1(0.0), &p1(1.0)) < k1.eval(&p1(0.0), &p1(1.0)));
        assert!(GaussianKernel::new(0.0).is_err());
        assert!(GaussianKernel::new(f64::INFINITY).is_err());
    }

    #[test]
    fn gram_is_symmetric_unit_diagonal() {
        let k = GaussianKernel::new(1.5).unwrap();
        let pts: Vec<Point> = vec![p1(-0.5), p1(0.1), p1(0.7)];
        let g = k.gram(&pts);
        for i in 0..3 {
            assert_eq!(g[(i, i)], 1.0);
            for j in 0..3 {
                assert_eq!(g[(i, j)], g[(j, i)]);
                assert!(g[(i, j)] > 0.0 && g[(i, j)] <= 1.0);
            }
        }
    }

    #[test]
    fn gram_is_positive_semidefinite_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.gen_range(2..12);
            let pts: Vec<Point> = (0..n)
                .map(|_| p1(rng.gen_range(-1.0..1.0)))
                .collect();
            let k = GaussianKernel::new(rng.gen_range(0.3..8.0)).unwrap();
            let g = k.gram(&pts);
            // PSD check via quadratic form on random vectors.
            for _ in 0..20 {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let mut q = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        q += v[i] * g[(i, j)] * v[j];
                    }
                }
                assert!(q >= -1e-10, "quadratic form {q}");
            }
        }
    }

    #[test]
    fn single_center_norm_is_coefficient() {
        let k = GaussianKernel::new(1.0).unwrap();
        let e = KernelExpansion::new(k, vec![p1(0.3)], vec![2.0], 0.0).unwrap();
        assert!((e.rkhs_norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_centers_cancel_to_zero_norm() {
        let k = GaussianKernel::new(1.0).unwrap();
        let e = KernelExpansion::new(k, vec![p1(0.3), p1(0.3)], vec![1.0, -1.0], 0.0).unwrap();
        assert_eq!(e.rkhs_norm(), 0.0);
        assert!(e.eval(&p1(0.9)).abs() < 1e-15);
    }

    #[test]
    fn offset_excluded_from_norm() {
        let k = GaussianKernel::new(1.0).unwrap();
        let e = KernelExpansion::new(k, vec![p1(0.0)], vec![1.0], 5.0).unwrap();
        assert!((e.rkhs_norm() - 1.0).abs() < 1e-15);
        assert!((e.eval(&p1(0.0)) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn reproducing_bound_on_random_expansions() {
        // |f(x)| <= ||f||_H sqrt(k(x,x)) = ||f||_H for the Gaussian kernel.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..10);
            let k = GaussianKernel::new(rng.gen_range(0.5..6.0)).unwrap();
            let centers: Vec<Point> = (0..n).map(|_| p1(rng.gen_range(-1.0..1.0))).collect();
            let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let e = KernelExpansion::new(k, centers, coeffs, 0.0).unwrap();
            let norm = e.rkhs_norm();
            for _ in 0..20 {
                let x = p1(rng.gen_range(-1.0..1.0));
                assert!(e.eval(&x).abs() <= norm + 1e-9);
            }
        }
    }

    #[test]
    fn expansion_round_trips_bit_exactly() {
        let k = GaussianKernel::new(2.5).unwrap();
        let e = KernelExpansion::new(
            k,
            vec![Point(vec![0.1, -0.2]), Point(vec![0.33, 0.44])],
            vec![1.0 / 3.0, -0.125],
            -0.7,
        )
        .unwrap();
        let text = e.to_text();
        let back = KernelExpansion::from_text(&text).unwrap();
        assert_eq!(back.kernel.sigma().to_bits(), 2.5f64.to_bits());
        assert_eq!(back.offset.to_bits(), (-0.7f64).to_bits());
        for (a, b) in e.coefficients.iter().zip(&back.coefficients) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in e.centers.iter().zip(&back.centers) {
            for (u, v) in a.0.iter().zip(&b.0) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn clip_clamps_and_preserves_interior() {
        let k = GaussianKernel::new(1.0).unwrap();
        let e = KernelExpansion::new(k, vec![p1(0.0)], vec![3.0], 0.0).unwrap();
        let g = clip(e.as_fn());
        assert_eq!(g(&p1(0.0)), 1.0);
        let far = e.eval(&p1(0.95));
        if far.abs() <= 1.0 {
            assert_eq!(g(&p1(0.95)), far);
        }
    }
}
