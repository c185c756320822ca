//! Piecewise skill-A wages: three tiers separated by skill thresholds.
//!
//! Within a tier the informed objective only loses skill-B value as `t_A`
//! grows, so the maximizer sits at a tier's lower boundary. With
//! `wLow >= wMid` the middle tier is dominated by `t_A = 0`, leaving the
//! barbell choice between literacy (`t_A = 0`) and expertise
//! (`t_A = tau_high`), decided by the sign of `delta_gap`.

use serde::Serialize;

use crate::economy::{audit_covering, Scenario, Skill, Tiers};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mismatch::{monotone_verdict, Direction, MonotoneVerdict};
use crate::planner::{solve_naive, KktCase};

/// Audit entries a tiered analysis depends on.
pub const TIER_GATES: [&str; 4] = ["A1", "A2", "thresholds", "tier-ordering"];

fn tiers_of(s: &Scenario) -> Result<&Tiers> {
    s.tiers()
        .ok_or_else(|| Error::Config("scenario has no [tiers] table".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub tau_low: f64,
    pub tau_high: f64,
}

/// Smallest representable `t` with `f_A(t, Ke) >= level`, by bisection to
/// machine precision. Requires `f_A(0) < level < f_A(T)` and `f_A` increasing.
fn threshold_time(s: &Scenario, ke: f64, level: f64) -> f64 {
    let f = s.production(Skill::A);
    let (mut lo, mut hi) = (0.0, s.t_total());
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if f.value(mid, ke) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

pub fn threshold_times(s: &Scenario, k: f64) -> Result<Thresholds> {
    s.check_capital(k)?;
    let tiers = tiers_of(s)?;
    let f = s.production(Skill::A);
    let ke = s.ke(k);
    let tt = s.t_total();
    if !(f.d_t(tt, ke) > 0.0) {
        return Err(Error::Domain(format!(
            "f_A is not strictly increasing on [0, T] at K = {k}"
        )));
    }
    if !(f.value(0.0, ke) < tiers.a_low && f.value(tt, ke) > tiers.a_low) {
        return Err(Error::ThresholdUnreachable { which: "basic", k });
    }
    if !(f.value(tt, ke) > tiers.a_high) {
        return Err(Error::ThresholdUnreachable { which: "advanced", k });
    }
    Ok(Thresholds {
        tau_low: threshold_time(s, ke, tiers.a_low),
        tau_high: threshold_time(s, ke, tiers.a_high),
    })
}

/// `d tau / dK` from the implicit-function quotient at a threshold time.
pub fn threshold_slope(s: &Scenario, k: f64, tau: f64) -> f64 {
    let f = s.production(Skill::A);
    let ke = s.ke(k);
    -f.d_ke(tau) / f.d_t(tau, ke) * s.g_prime()
}

/// Expertise wage premium minus the value of skill B forgone to reach it.
pub fn delta_gap(s: &Scenario, k: f64) -> Result<f64> {
    let tiers = tiers_of(s)?;
    let th = threshold_times(s, k)?;
    let fb = s.production(Skill::B);
    let ke = s.ke(k);
    let tt = s.t_total();
    let premium = tiers.w_high.value(k) - tiers.w_low.value(k);
    let forgone = s.wage_curve(Skill::B).value(k) * (fb.value(tt, ke) - fb.value(tt - th.tau_high, ke));
    Ok(premium - forgone)
}

/// The four analytic drivers of `delta'(K)` and a central difference of
/// `delta_gap` for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPrime {
    /// Direct wage effect `wHigh' - wLow'`.
    pub a: f64,
    /// Skill-B wage effect, non-positive.
    pub b: f64,
    /// Time saved on skill B as the threshold falls, non-negative.
    pub c: f64,
    /// Educational-AI effect on skill B.
    pub d: f64,
    pub sum: f64,
    pub fd_total: f64,
}

pub fn delta_prime_decomposition(s: &Scenario, k: f64, h: f64) -> Result<DeltaPrime> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("step h must be finite and > 0, got {h}")));
    }
    if k - h < 0.0 {
        return Err(Error::Domain(format!("K - h = {} is negative", k - h)));
    }
    let tiers = tiers_of(s)?;
    let tau = threshold_times(s, k)?.tau_high;
    let fb = s.production(Skill::B);
    let wb = s.wage_curve(Skill::B);
    let ke = s.ke(k);
    let tt = s.t_total();
    let a = tiers.w_high.slope(k) - tiers.w_low.slope(k);
    let b = wb.slope(k) * (fb.value(tt - tau, ke) - fb.value(tt, ke));
    let c = wb.value(k) * fb.d_t(tt - tau, ke) * (-threshold_slope(s, k, tau));
    let d = wb.value(k) * s.g_prime() * (fb.d_ke(tt - tau) - fb.d_ke(tt));
    let fd_total = (delta_gap(s, k + h)? - delta_gap(s, k - h)?) / (2.0 * h);
    Ok(DeltaPrime {
        a,
        b,
        c,
        d,
        sum: a + b + c + d,
        fd_total,
    })
}

/// Informed objective under the piecewise schedule (right-continuous in skill).
pub fn tiered_utility(s: &Scenario, k: f64, t_a: f64) -> Result<f64> {
    let tiers = tiers_of(s)?;
    let ke = s.ke(k);
    let skill_a = s.production(Skill::A).value(t_a, ke);
    let skill_b = s.production(Skill::B).value(s.t_total() - t_a, ke);
    Ok(tiers.wage(skill_a, k) + s.wage_curve(Skill::B).value(k) * skill_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TierChoice {
    /// `t_A = 0`.
    Literacy,
    /// `t_A = tau_high`.
    Expertise,
}

impl TierChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            TierChoice::Literacy => "literacy",
            TierChoice::Expertise => "expertise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TierSolution {
    pub k: f64,
    pub tau_low: f64,
    pub tau_high: f64,
    pub delta: f64,
    pub choice: TierChoice,
    pub t_inf: f64,
    /// Utilities at `0`, `tau_low`, `tau_high`.
    pub candidate_utilities: [f64; 3],
}

fn check_ordering(tiers: &Tiers, k: f64) -> Result<()> {
    let (lo, mid, hi) = (tiers.w_low.value(k), tiers.w_mid.value(k), tiers.w_high.value(k));
    if !(hi > lo) {
        return Err(Error::TierOrdering {
            k,
            detail: format!("wHigh = {hi} must exceed wLow = {lo}"),
        });
    }
    if !(lo >= mid) {
        return Err(Error::TierOrdering {
            k,
            detail: format!("wLow = {lo} must be >= wMid = {mid}"),
        });
    }
    Ok(())
}

pub fn solve_informed_tiered(s: &Scenario, k: f64) -> Result<TierSolution> {
    let tiers = tiers_of(s)?;
    s.check_capital(k)?;
    check_ordering(tiers, k)?;
    let th = threshold_times(s, k)?;
    let delta = delta_gap(s, k)?;
    let candidate_utilities = [
        tiered_utility(s, k, 0.0)?,
        tiered_utility(s, k, th.tau_low)?,
        tiered_utility(s, k, th.tau_high)?,
    ];
    let (choice, t_inf) = if delta > 0.0 {
        (TierChoice::Expertise, th.tau_high)
    } else {
        (TierChoice::Literacy, 0.0)
    };
    Ok(TierSolution {
        k,
        tau_low: th.tau_low,
        tau_high: th.tau_high,
        delta,
        choice,
        t_inf,
        candidate_utilities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TieredPoint {
    pub k: f64,
    pub tau_low: f64,
    pub tau_high: f64,
    pub delta: f64,
    pub choice: TierChoice,
    pub t_naive: f64,
    pub case_naive: KktCase,
    pub t_inf: f64,
    /// `t_naive - t_inf`, not normalized.
    pub mismatch: f64,
    /// Choice differs from the previous grid point.
    pub jump: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TieredCurve {
    pub points: Vec<TieredPoint>,
    pub jumps: usize,
    pub mismatch_verdict: MonotoneVerdict,
}

pub fn tiered_mismatch_curve(s: &Scenario, k_grid: &[f64]) -> Result<TieredCurve> {
    tiers_of(s)?;
    if k_grid.is_empty() {
        return Err(Error::Domain("K grid must be non-empty".into()));
    }
    if k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("K grid must be strictly increasing".into()));
    }
    audit_covering(s, k_grid)?.require(&TIER_GATES)?;
    let rows = Execution::available().try_map(k_grid.len(), |i| {
        let k = k_grid[i];
        let inf = solve_informed_tiered(s, k)?;
        let naive = solve_naive(s, k)?;
        Ok::<_, Error>((inf, naive))
    })?;
    let mut points: Vec<TieredPoint> = Vec::with_capacity(rows.len());
    for (inf, naive) in rows {
        let jump = points.last().is_some_and(|p| p.choice != inf.choice);
        points.push(TieredPoint {
            k: inf.k,
            tau_low: inf.tau_low,
            tau_high: inf.tau_high,
            delta: inf.delta,
            choice: inf.choice,
            t_naive: naive.t_a,
            case_naive: naive.case,
            t_inf: inf.t_inf,
            mismatch: naive.t_a - inf.t_inf,
            jump,
        });
    }
    let jumps = points.iter().filter(|p| p.jump).count();
    let mismatch: Vec<f64> = points.iter().map(|p| p.mismatch).collect();
    let interior: Vec<bool> = points.iter().map(|p| p.case_naive == KktCase::Interior).collect();
    Ok(TieredCurve {
        mismatch_verdict: monotone_verdict(&mismatch, &interior, Direction::Increasing),
        points,
        jumps,
    })
}

/// Capitals where `delta_gap` changes sign between consecutive grid points,
/// refined by bisection in `K`.
pub fn delta_crossings(s: &Scenario, k_grid: &[f64]) -> Result<Vec<f64>> {
    let deltas: Vec<f64> = k_grid.iter().map(|&k| delta_gap(s, k)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 1..k_grid.len() {
        if (deltas[i - 1] > 0.0) != (deltas[i] > 0.0) {
            let (mut lo, mut hi) = (k_grid[i - 1], k_grid[i]);
            let lo_positive = deltas[i - 1] > 0.0;
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if (delta_gap(s, mid)? > 0.0) == lo_positive {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    Ok(out)
}
