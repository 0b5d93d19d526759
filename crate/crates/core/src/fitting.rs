//! Least-squares slope fitting and rank statistics shared by the noise,
//! approximation, complexity, and rate modules.

use crate::error::{Error, Result};

/// An ordinary least-squares fit of `ln y` against `ln x`.
#[derive(Clone, Copy, Debug)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_used: usize,
}

/// Plain OLS on already-transformed coordinates.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewFitPoints { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "xs",
            reason: "all abscissas equal; slope is undefined".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LogLogFit {
        slope,
        intercept,
        r2,
        n_used: n,
    })
}

/// OLS of `ln y` on `ln x`, silently dropping pairs where either value is
/// not strictly positive (callers log how many were dropped via `n_used`).
pub fn ols_loglog(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(ys.len());
    for (&x, &y) in xs.iter().zip(ys) {
        if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
            lx.push(x.ln());
            ly.push(y.ln());
        }
    }
    if lx.len() < 3 {
        return Err(Error::TooFewFitPoints {
            needed: 3,
            got: lx.len(),
        });
    }
    ols(&lx, &ly)
}

/// Median with the even-count average convention. Empty input panics.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut r = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (average ranks on ties).
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 3 {
        return Err(Error::TooFewFitPoints {
            needed: 3,
            got: xs.len(),
        });
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let f = ols(&rx, &ry)?;
    // Pearson on ranks = sign(slope) * sqrt(R^2).
    Ok(f.slope.signum() * f.r2.sqrt())
}
