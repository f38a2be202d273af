//! Ordinary least squares on log-log data, `y ~ K x^p`.

use crate::num;

/// A fitted power law with its RMS residual in log units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub exponent: f64,
    pub constant: f64,
    /// Root-mean-square deviation of `ln y` from the fitted line.
    pub residual: f64,
}

/// Fits `ln y = ln K + p ln x` by least squares over the pairs with
/// positive `x` and `y`. Returns `None` when fewer than two usable pairs
/// remain or the abscissae are degenerate.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    let pairs: alloc::vec::Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (num::ln(x), num::ln(y)))
        .collect();
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let sx: f64 = pairs.iter().map(|p| p.0).sum();
    let sy: f64 = pairs.iter().map(|p| p.1).sum();
    let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det <= 0.0 {
        return None;
    }
    let p = (n * sxy - sx * sy) / det;
    let b = (sy - p * sx) / n;
    let mut ss = 0.0;
    for &(lx, ly) in &pairs {
        let r = ly - (b + p * lx);
        ss += r * r;
    }
    Some(LogLogFit {
        exponent: p,
        constant: num::exp(b),
        residual: num::sqrt(ss / n),
    })
}
