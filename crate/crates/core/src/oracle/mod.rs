//! Verification primitives that share no code with the solvers: dense-grid
//! argmax, central finite differences, and a proposition checker that
//! replays each comparative-statics claim from those primitives alone.

use serde::Serialize;

use crate::adoption::{solve_intensity, Agent, IntensityProblem};
use crate::economy::{audit_covering, Scenario, BASELINE_GATES};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{linspace, GridSpec};
use crate::mismatch::{monotone_verdict, Direction, MonotoneVerdict};
use crate::planner::{solve, Objective, PlannerKind};
use crate::tiers::{solve_informed_tiered, tiered_utility, TierChoice, TIER_GATES};

/// Default number of oracle grid points on `[0, T]`.
pub const DEFAULT_ORACLE_POINTS: usize = 200_001;
/// Finite-difference estimates closer to zero than this carry no sign.
pub const FD_SIGN_TOL: f64 = 1e-7;
/// Slack added to the grid spacing when comparing oracle and solver.
pub const AGREEMENT_SLACK: f64 = 1e-6;
/// A brute-force point may beat the barbell candidate by at most this.
pub const BARBELL_SLACK: f64 = 1e-8;

const CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArgMax {
    pub x: f64,
    pub fx: f64,
    pub index: usize,
    pub spacing: f64,
}

fn grid_point(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

/// Maximizer of `f` over `n` equally spaced points of `[lo, hi]`; ties go to
/// the smallest `x`.
pub fn grid_argmax<F>(f: F, lo: f64, hi: f64, n: usize, exec: Execution) -> Result<ArgMax>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    if n < 2 {
        return Err(Error::Domain(format!("grid needs at least 2 points, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!(
            "grid bounds must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    let chunks = n.div_ceil(CHUNK);
    let partial = exec.try_map(chunks, |c| {
        let mut best: Option<(usize, f64)> = None;
        for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let x = grid_point(lo, hi, n, i);
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { x });
            }
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        Ok(best.expect("chunks are non-empty"))
    })?;
    let (index, fx) = partial
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one chunk");
    Ok(ArgMax {
        x: grid_point(lo, hi, n, index),
        fx,
        index,
        spacing: (hi - lo) / ((n - 1) as f64),
    })
}

/// Default step `1e-4 * max(1, |t|, |K|)`.
pub fn fd_step(t: f64, k: f64) -> f64 {
    1e-4 * 1f64.max(t.abs()).max(k.abs())
}

/// Central four-point estimate of `d^2 F / dt dK`.
pub fn fd_cross_partial<F: Fn(f64, f64) -> f64>(f: F, t: f64, k: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("step h must be finite and > 0, got {h}")));
    }
    let est = (f(t + h, k + h) - f(t + h, k - h) - f(t - h, k + h) + f(t - h, k - h)) / (4.0 * h * h);
    if !est.is_finite() {
        return Err(Error::NonFinite { x: t });
    }
    Ok(est)
}

/// Central three-point estimate of `f''(x)`.
pub fn fd_second<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("step h must be finite and > 0, got {h}")));
    }
    Ok((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h))
}

/// Cross-partial of a planner objective in `(t_A, K)`, with the stencil
/// required to stay inside `[0, T] x [0, inf)`.
pub fn objective_cross_partial(s: &Scenario, kind: PlannerKind, t: f64, k: f64, h: Option<f64>) -> Result<f64> {
    let h = h.unwrap_or_else(|| fd_step(t, k));
    if t - h < 0.0 || t + h > s.t_total() || k - h < 0.0 {
        return Err(Error::Domain(format!(
            "stencil (t +- {h}, K +- {h}) leaves the domain at t = {t}, K = {k}"
        )));
    }
    let objectives = [Objective::new(s, kind, k - h)?, Objective::new(s, kind, k + h)?];
    fd_cross_partial(
        |tt, kk| {
            if kk < k {
                objectives[0].value(tt)
            } else {
                objectives[1].value(tt)
            }
        },
        t,
        k,
        h,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdSign {
    Positive,
    Negative,
    Indeterminate,
}

pub fn fd_sign(estimate: f64) -> FdSign {
    if estimate > FD_SIGN_TOL {
        FdSign::Positive
    } else if estimate < -FD_SIGN_TOL {
        FdSign::Negative
    } else {
        FdSign::Indeterminate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Proposition {
    P1,
    P2,
    P3,
    P4,
}

impl std::str::FromStr for Proposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(Proposition::P1),
            "P2" => Ok(Proposition::P2),
            "P3" => Ok(Proposition::P3),
            "P4" => Ok(Proposition::P4),
            _ => Err(Error::Config(format!(
                "unknown proposition {s:?}; expected P1, P2, P3 or P4"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Verified,
    Violated,
    NotApplicable,
}

/// Where a check was tightest (or where it failed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub k: Option<f64>,
    pub t: Option<f64>,
    pub c: Option<f64>,
    pub margin: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionReport {
    pub proposition: Proposition,
    pub status: CheckStatus,
    pub evidence: Evidence,
    /// Set once the replay leaves the all-interior regime.
    pub corner_note: Option<String>,
    /// Assumption that made the check not applicable.
    pub failing_assumption: Option<String>,
    /// Oracle and solver disagreed somewhere on the grid.
    pub oracle_disagreement: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub k_grid: GridSpec,
    /// Oracle points on `[0, T]` (and on `[0, 1]` for intensities).
    pub oracle_points: usize,
    /// Time allocation for the intensity problem; defaults to `T / 2`.
    pub t_a: Option<f64>,
    /// Capital for the intensity problem; defaults to `K0` plus one grid step.
    pub k_adoption: Option<f64>,
    /// Cost grid for the intensity problem; defaults to 21 points strictly
    /// inside the interior cost set, descending.
    pub c_grid: Option<GridSpec>,
}

impl CheckSpec {
    pub fn for_scenario(s: &Scenario) -> Self {
        CheckSpec {
            k_grid: GridSpec {
                start: s.k0(),
                step: 0.05,
                end: s.k0() + 2.0,
            },
            oracle_points: DEFAULT_ORACLE_POINTS,
            t_a: None,
            k_adoption: None,
            c_grid: None,
        }
    }
}

fn not_applicable(which: Proposition, err: Error) -> Result<PropositionReport> {
    let (assumption, detail) = match err {
        Error::AuditRefused { assumption, detail } => (Some(assumption), detail),
        e if e.is_refusal() => (None, e.to_string()),
        e => return Err(e),
    };
    Ok(PropositionReport {
        proposition: which,
        status: CheckStatus::NotApplicable,
        evidence: Evidence {
            k: None,
            t: None,
            c: None,
            margin: None,
            detail,
        },
        corner_note: None,
        failing_assumption: assumption,
        oracle_disagreement: false,
    })
}

struct Replay {
    x: Vec<f64>,
    interior: Vec<bool>,
    worst_gap: f64,
    worst_at: usize,
    disagree: bool,
}

/// Oracle argmax of one planner along the K grid, compared with the solver.
fn replay_planner(s: &Scenario, kind: PlannerKind, k_grid: &[f64], n: usize) -> Result<Replay> {
    let tt = s.t_total();
    let rows = k_grid
        .iter()
        .map(|&k| {
            let obj = Objective::new(s, kind, k)?;
            let am = grid_argmax(|t| obj.value(t), 0.0, tt, n, Execution::available())?;
            let sol = solve(s, kind, k)?;
            Ok((am, sol.t_a))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = Replay {
        x: vec![],
        interior: vec![],
        worst_gap: 0.0,
        worst_at: 0,
        disagree: false,
    };
    for (i, (am, t_solver)) in rows.iter().enumerate() {
        let gap = (am.x - t_solver).abs();
        if gap > r.worst_gap {
            r.worst_gap = gap;
            r.worst_at = i;
        }
        r.disagree |= gap > am.spacing + AGREEMENT_SLACK;
        r.x.push(am.x);
        r.interior.push(am.index > 0 && am.index + 1 < n);
    }
    Ok(r)
}

fn monotone_report(
    which: Proposition,
    k_grid: &[f64],
    values: &[f64],
    verdict: &MonotoneVerdict,
    replays: &[&Replay],
    extra_violation: Option<Evidence>,
) -> PropositionReport {
    let disagree = replays.iter().any(|r| r.disagree);
    let corner_note = (verdict.interior_prefix < k_grid.len()).then(|| {
        let k = k_grid[verdict.interior_prefix];
        format!("corner regime from K = {k}; weak monotonicity asserted from there on")
    });
    let (status, evidence) = if let Some(ev) = extra_violation {
        (CheckStatus::Violated, ev)
    } else if disagree {
        let r = replays.iter().find(|r| r.disagree).expect("some replay disagrees");
        (
            CheckStatus::Violated,
            Evidence {
                k: Some(k_grid[r.worst_at]),
                t: Some(r.x[r.worst_at]),
                c: None,
                margin: Some(r.worst_gap),
                detail: "oracle and solver disagree beyond grid spacing".into(),
            },
        )
    } else if let Some(i) = verdict.first_violation {
        (
            CheckStatus::Violated,
            Evidence {
                k: Some(k_grid[i]),
                t: None,
                c: None,
                margin: Some(values[i] - values[i - 1]),
                detail: format!("monotonicity fails between K = {} and K = {}", k_grid[i - 1], k_grid[i]),
            },
        )
    } else {
        let i = (1..values.len())
            .min_by(|&a, &b| (values[a] - values[a - 1]).total_cmp(&(values[b] - values[b - 1])))
            .unwrap_or(0);
        (
            CheckStatus::Verified,
            Evidence {
                k: Some(k_grid[i]),
                t: None,
                c: None,
                margin: (i > 0).then(|| values[i] - values[i - 1]),
                detail: "smallest step along the grid".into(),
            },
        )
    };
    PropositionReport {
        proposition: which,
        status,
        evidence,
        corner_note,
        failing_assumption: None,
        oracle_disagreement: disagree,
    }
}

fn check_p1(s: &Scenario, k_grid: &[f64], n: usize) -> Result<PropositionReport> {
    if let Err(e) = audit_covering(s, k_grid)?.require(&BASELINE_GATES) {
        return not_applicable(Proposition::P1, e);
    }
    let naive = replay_planner(s, PlannerKind::Naive, k_grid, n)?;
    let inf = replay_planner(s, PlannerKind::Informed, k_grid, n)?;
    let tt = s.t_total();
    let mismatch: Vec<f64> = naive.x.iter().zip(&inf.x).map(|(a, b)| (a - b) / tt).collect();
    let both: Vec<bool> = naive
        .interior
        .iter()
        .zip(&inf.interior)
        .map(|(a, b)| *a && *b)
        .collect();
    let verdict = monotone_verdict(&mismatch, &both, Direction::Increasing);
    Ok(monotone_report(
        Proposition::P1,
        k_grid,
        &mismatch,
        &verdict,
        &[&naive, &inf],
        None,
    ))
}

fn check_p2(s: &Scenario, k_grid: &[f64], n: usize) -> Result<PropositionReport> {
    let report = audit_covering(s, k_grid)?;
    if let Err(e) = report.require(&BASELINE_GATES).and_then(|_| report.require(&["A8"])) {
        return not_applicable(Proposition::P2, e);
    }
    let naive = replay_planner(s, PlannerKind::Naive, k_grid, n)?;
    let inf = replay_planner(s, PlannerKind::InformedNoncog, k_grid, n)?;
    let gap: Vec<f64> = k_grid
        .iter()
        .enumerate()
        .map(|(i, &k)| s.noncog_output(inf.x[i], k) - s.noncog_output(naive.x[i], k))
        .collect();
    let both: Vec<bool> = naive
        .interior
        .iter()
        .zip(&inf.interior)
        .map(|(a, b)| *a && *b)
        .collect();
    let verdict = monotone_verdict(&gap, &both, Direction::Increasing);
    let nonpositive = gap.iter().position(|g| !(*g > 0.0)).map(|i| Evidence {
        k: Some(k_grid[i]),
        t: Some(inf.x[i]),
        c: None,
        margin: Some(gap[i]),
        detail: "non-cognitive gap is not positive".into(),
    });
    Ok(monotone_report(
        Proposition::P2,
        k_grid,
        &gap,
        &verdict,
        &[&naive, &inf],
        nonpositive,
    ))
}

fn check_p3(s: &Scenario, spec: &CheckSpec, k_grid: &[f64]) -> Result<PropositionReport> {
    let t_a = spec.t_a.unwrap_or(0.5 * s.t_total());
    let k = match spec.k_adoption {
        Some(k) => k,
        None => k_grid.get(1).copied().unwrap_or(s.k0() + spec.k_grid.step.abs()),
    };
    let p = match IntensityProblem::from_scenario(s, t_a, k) {
        Ok(p) => p,
        Err(e) => return not_applicable(Proposition::P3, e),
    };
    let set = crate::adoption::interior_cost_set(&p);
    if !set.non_empty {
        return not_applicable(
            Proposition::P3,
            Error::Domain(format!("interior cost set ({}, {}) is empty", set.lo, set.hi)),
        );
    }
    let c_grid = match &spec.c_grid {
        Some(g) => g.points()?,
        None => {
            let pts = linspace(set.hi, set.lo, 23);
            pts[1..22].to_vec()
        }
    };
    if let Some(&c) = c_grid.iter().find(|&&c| !set.contains(c)) {
        return Err(Error::OutsideInteriorCostSet {
            c,
            lo: set.lo,
            hi: set.hi,
        });
    }
    let n = spec.oracle_points;
    let mut gap = Vec::with_capacity(c_grid.len());
    let mut disagree = false;
    let mut worst = (0usize, 0.0f64);
    let mut not_greater = None;
    for (i, &c) in c_grid.iter().enumerate() {
        let mut alphas = [0.0; 2];
        for (j, agent) in [Agent::School, Agent::Planner].into_iter().enumerate() {
            let am = grid_argmax(|a| p.benefit(agent, a) - c * a, 0.0, 1.0, n, Execution::available())?;
            let closed = solve_intensity(&p, agent, c)?.alpha;
            let d = (am.x - closed).abs();
            if d > worst.1 {
                worst = (i, d);
            }
            disagree |= d > am.spacing + AGREEMENT_SLACK;
            alphas[j] = am.x;
        }
        let g = alphas[0] - alphas[1];
        if !(g > 0.0) && not_greater.is_none() {
            not_greater = Some(Evidence {
                k: Some(k),
                t: Some(t_a),
                c: Some(c),
                margin: Some(g),
                detail: "school intensity does not exceed the planner's".into(),
            });
        }
        gap.push(g);
    }
    let interior = vec![true; gap.len()];
    let verdict = monotone_verdict(&gap, &interior, Direction::Increasing);
    let widening = p.widening_predicted();
    let (status, evidence) = if let Some(ev) = not_greater {
        (CheckStatus::Violated, ev)
    } else if disagree {
        (
            CheckStatus::Violated,
            Evidence {
                k: Some(k),
                t: Some(t_a),
                c: Some(c_grid[worst.0]),
                margin: Some(worst.1),
                detail: "oracle and closed form disagree beyond grid spacing".into(),
            },
        )
    } else if widening && !verdict.holds() {
        let i = verdict.first_violation.unwrap_or(0);
        (
            CheckStatus::Violated,
            Evidence {
                k: Some(k),
                t: Some(t_a),
                c: Some(c_grid[i]),
                margin: Some(verdict.min_step),
                detail: "widening predicted but the intensity gap does not grow as cost falls".into(),
            },
        )
    } else {
        let i = (0..gap.len()).min_by(|&a, &b| gap[a].total_cmp(&gap[b])).unwrap_or(0);
        (
            CheckStatus::Verified,
            Evidence {
                k: Some(k),
                t: Some(t_a),
                c: Some(c_grid[i]),
                margin: Some(gap[i]),
                detail: format!(
                    "smallest intensity gap; widening {}",
                    if widening {
                        "predicted and observed"
                    } else {
                        "not predicted"
                    }
                ),
            },
        )
    };
    Ok(PropositionReport {
        proposition: Proposition::P3,
        status,
        evidence,
        corner_note: None,
        failing_assumption: None,
        oracle_disagreement: disagree,
    })
}

fn check_p4(s: &Scenario, k_grid: &[f64], n: usize) -> Result<PropositionReport> {
    if s.tiers().is_none() {
        return not_applicable(Proposition::P4, Error::Config("scenario has no [tiers] table".into()));
    }
    if let Err(e) = audit_covering(s, k_grid)?.require(&TIER_GATES) {
        return not_applicable(Proposition::P4, e);
    }
    let tt = s.t_total();
    let mut disagree = false;
    let mut violation = None;
    let mut worst_excess = (0usize, f64::NEG_INFINITY);
    let mut choices = Vec::with_capacity(k_grid.len());
    for (i, &k) in k_grid.iter().enumerate() {
        let sol = match solve_informed_tiered(s, k) {
            Ok(sol) => sol,
            Err(e) => return not_applicable(Proposition::P4, e),
        };
        let am = grid_argmax(
            |t| tiered_utility(s, k, t).unwrap_or(f64::NAN),
            0.0,
            tt,
            n,
            Execution::available(),
        )?;
        let barbell = sol.candidate_utilities[0].max(sol.candidate_utilities[2]);
        let excess = am.fx - barbell;
        if excess > worst_excess.1 {
            worst_excess = (i, excess);
        }
        if excess > BARBELL_SLACK && violation.is_none() {
            violation = Some(Evidence {
                k: Some(k),
                t: Some(am.x),
                c: None,
                margin: Some(excess),
                detail: "a grid allocation beats both barbell candidates".into(),
            });
        }
        // The oracle lands on the first grid point at or past tau_high.
        if (am.x - sol.t_inf).abs() > am.spacing + AGREEMENT_SLACK {
            disagree = true;
            violation.get_or_insert(Evidence {
                k: Some(k),
                t: Some(am.x),
                c: None,
                margin: Some((am.x - sol.t_inf).abs()),
                detail: "oracle and solver disagree beyond grid spacing".into(),
            });
        }
        choices.push(sol.choice);
    }
    let jumps: Vec<f64> = (1..choices.len())
        .filter(|&i| choices[i] != choices[i - 1])
        .map(|i| k_grid[i])
        .collect();
    let (status, evidence) = match violation {
        Some(ev) => (CheckStatus::Violated, ev),
        None => {
            let (i, m) = worst_excess;
            let detail = if jumps.is_empty() {
                format!("barbell optimal everywhere; no jump (choice {})", choices[0].as_str())
            } else {
                let to = |c: TierChoice| c.as_str();
                format!(
                    "barbell optimal everywhere; {} jump(s), first at K = {} ({} -> {})",
                    jumps.len(),
                    jumps[0],
                    to(choices[k_grid.iter().position(|&k| k == jumps[0]).unwrap() - 1]),
                    to(choices[k_grid.iter().position(|&k| k == jumps[0]).unwrap()]),
                )
            };
            (
                CheckStatus::Verified,
                Evidence {
                    k: jumps.first().copied().or(Some(k_grid[i])),
                    t: None,
                    c: None,
                    margin: Some(m),
                    detail,
                },
            )
        }
    };
    Ok(PropositionReport {
        proposition: Proposition::P4,
        status,
        evidence,
        corner_note: None,
        failing_assumption: None,
        oracle_disagreement: disagree,
    })
}

/// Replays one proposition on `s` using oracle primitives only.
pub fn check_proposition(s: &Scenario, which: Proposition, spec: &CheckSpec) -> Result<PropositionReport> {
    let k_grid = spec.k_grid.points()?;
    match which {
        Proposition::P1 => check_p1(s, &k_grid, spec.oracle_points),
        Proposition::P2 => check_p2(s, &k_grid, spec.oracle_points),
        Proposition::P3 => check_p3(s, spec, &k_grid),
        Proposition::P4 => check_p4(s, &k_grid, spec.oracle_points),
    }
}
