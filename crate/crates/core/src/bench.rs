//! Timing harness for basis construction on bounded-degree families.

use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::Error;
use crate::examples;
use crate::minimal::minimal_basis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Dipath,
    DicycleChain,
}

impl Family {
    pub fn build(self, n: usize) -> Digraph {
        match self {
            Family::Dipath => examples::dipath(n),
            Family::DicycleChain => examples::dicycle_chain(n),
        }
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dipath" => Ok(Family::Dipath),
            "dicycle-chain" => Ok(Family::DicycleChain),
            _ => Err(format!("unknown family `{s}` (expected dipath or dicycle-chain)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub family: Family,
    pub k: usize,
    pub sizes: Vec<usize>,
    /// Best of `repeats` wall-clock runs, in seconds.
    pub seconds: Vec<f64>,
    /// Least-squares slope of `log t` against `log n`; absent for fewer
    /// than two sizes.
    pub slope: Option<f64>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(1e-9).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

pub fn bench_quadratic(family: Family, sizes: &[usize], k: usize, repeats: usize) -> Result<BenchReport, Error> {
    let mut seconds = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let g = family.build(n);
        let mut best = f64::INFINITY;
        for _ in 0..repeats.max(1) {
            let t = Instant::now();
            let b = minimal_basis(&g, k.min(n.saturating_sub(1)))?;
            best = best.min(t.elapsed().as_secs_f64());
            std::hint::black_box(b);
        }
        seconds.push(best);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let slope = log_log_slope(&xs, &seconds);
    Ok(BenchReport { family, k, sizes: sizes.to_vec(), seconds, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_powers() {
        let xs = [10.0, 20.0, 40.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(log_log_slope(&[5.0], &[1.0]), None);
    }

    #[test]
    fn single_size_has_no_slope() {
        let r = bench_quadratic(Family::Dipath, &[20], 2, 1).unwrap();
        assert_eq!(r.seconds.len(), 1);
        assert_eq!(r.slope, None);
        assert_eq!("dicycle-chain".parse::<Family>(), Ok(Family::DicycleChain));
    }
}
