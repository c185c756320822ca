use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Kendall's tau-b by exact pair counting.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "x and y differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Domain("tau-b needs at least 2 observations".into()));
    }
    let n = x.len();
    let (mut conc, mut disc, mut tied_x, mut tied_y) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tied_x += 1;
            }
            if dy == 0.0 {
                tied_y += 1;
            }
            if dx * dy > 0.0 {
                conc += 1;
            } else if dx * dy < 0.0 {
                disc += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as u64;
    let denom = ((n0 - tied_x) * (n0 - tied_y)) as f64;
    if denom == 0.0 {
        return Err(Error::UndefinedCorrelation("x or y is constant".into()));
    }
    Ok((conc as f64 - disc as f64) / denom.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapMethod {
    Percentile,
    Bca,
}

impl std::str::FromStr for BootstrapMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "percentile" => Ok(BootstrapMethod::Percentile),
            "bca" => Ok(BootstrapMethod::Bca),
            _ => Err(Error::Config(format!("method must be percentile or bca, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapCi {
    pub tau: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub method: BootstrapMethod,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
    pub level: f64,
    /// Resamples thrown away because a column was all tied.
    pub redraws: usize,
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

/// Sample quantile, linear interpolation between order statistics.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// One replicate: its tau and the number of resamples discarded first.
fn replicate(x: &[f64], y: &[f64], seed: u64, index: usize, cap: usize) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = x.len();
    let mut xs = vec![0.0; n];
    let mut ys = vec![0.0; n];
    for redraws in 0..=cap {
        for k in 0..n {
            let i = rng.random_range(0..n);
            xs[k] = x[i];
            ys[k] = y[i];
        }
        if !is_constant(&xs) && !is_constant(&ys) {
            return Ok((kendall_tau_b(&xs, &ys)?, redraws));
        }
    }
    Err(Error::Bootstrap(format!("replicate {index} exceeded {cap} redraws")))
}

/// Paired bootstrap interval for tau-b at 95% confidence.
pub fn bootstrap_ci(
    x: &[f64],
    y: &[f64],
    b: usize,
    method: BootstrapMethod,
    seed: u64,
    exec: Execution,
) -> Result<BootstrapCi> {
    if b < 1000 {
        return Err(Error::Bootstrap(format!("B must be >= 1000, got {b}")));
    }
    if x.len() < 8 {
        return Err(Error::Bootstrap(format!("need n >= 8 observations, got {}", x.len())));
    }
    let tau = kendall_tau_b(x, y)?;
    let level = 0.95;
    let cap = 10 * b;
    let reps = exec.try_map(b, |i| replicate(x, y, seed, i, cap))?;
    let redraws: usize = reps.iter().map(|r| r.1).sum();
    if redraws > cap {
        return Err(Error::Bootstrap(format!("{redraws} redraws exceed the cap of {cap}")));
    }
    let mut taus: Vec<f64> = reps.into_iter().map(|r| r.0).collect();
    taus.sort_by(f64::total_cmp);
    let done = |lo: f64, hi: f64| {
        Ok(BootstrapCi {
            tau,
            ci_lo: lo,
            ci_hi: hi,
            method,
            b,
            seed,
            level,
            redraws,
        })
    };
    if taus[0] == taus[b - 1] {
        return done(tau, tau);
    }
    let alpha = (1.0 - level) / 2.0;
    match method {
        BootstrapMethod::Percentile => done(quantile_sorted(&taus, alpha), quantile_sorted(&taus, 1.0 - alpha)),
        BootstrapMethod::Bca => {
            let normal = Normal::standard();
            let below = taus.iter().filter(|&&t| t < tau).count() as f64 / b as f64;
            let eps = 0.5 / b as f64;
            let z0 = normal.inverse_cdf(below.clamp(eps, 1.0 - eps));
            let n = x.len();
            let jack = (0..n)
                .map(|i| {
                    let xs: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| x[j]).collect();
                    let ys: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| y[j]).collect();
                    kendall_tau_b(&xs, &ys)
                })
                .collect::<Result<Vec<f64>>>()
                .map_err(|e| Error::Bootstrap(format!("jackknife failed: {e}")))?;
            let jm = jack.iter().sum::<f64>() / n as f64;
            let num: f64 = jack.iter().map(|t| (jm - t).powi(3)).sum();
            let den: f64 = jack.iter().map(|t| (jm - t).powi(2)).sum::<f64>().powf(1.5);
            let accel = if den > 0.0 { num / (6.0 * den) } else { 0.0 };
            let adjust = |a: f64| {
                let z = normal.inverse_cdf(a);
                normal.cdf(z0 + (z0 + z) / (1.0 - accel * (z0 + z)))
            };
            done(
                quantile_sorted(&taus, adjust(alpha)),
                quantile_sorted(&taus, adjust(1.0 - alpha)),
            )
        }
    }
}
