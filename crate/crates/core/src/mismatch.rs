//! Mismatch and non-cognitive gap curves over capital grids, and the
//! first-order welfare decomposition along the naive policy path.

use serde::Serialize;

use crate::economy::{audit_covering, Scenario, Skill, BASELINE_GATES};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::planner::{solve, KktCase, PlannerKind, PlannerSolution};
use crate::EPS_MONO;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Monotonicity of a curve sampled on a grid.
///
/// Strict monotonicity is required only between consecutive points that both
/// lie in the interior-regime prefix. From the first corner onward only the
/// weak inequality is asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub direction: Direction,
    pub strict: bool,
    pub weak: bool,
    /// Number of leading grid points where every solution is interior.
    pub interior_prefix: usize,
    /// Index `i` of the first failing difference `v[i] - v[i-1]`.
    pub first_violation: Option<usize>,
    /// Smallest signed step in the checked direction (`+inf` for one point).
    pub min_step: f64,
}

impl MonotoneVerdict {
    pub fn holds(&self) -> bool {
        self.strict && self.weak
    }
}

pub fn monotone_verdict(values: &[f64], interior: &[bool], direction: Direction) -> MonotoneVerdict {
    debug_assert_eq!(values.len(), interior.len());
    let prefix = interior.iter().take_while(|&&b| b).count();
    let mut strict = true;
    let mut weak = true;
    let mut first_violation = None;
    let mut min_step = f64::INFINITY;
    for i in 1..values.len() {
        let step = match direction {
            Direction::Increasing => values[i] - values[i - 1],
            Direction::Decreasing => values[i - 1] - values[i],
        };
        min_step = min_step.min(step);
        if i < prefix {
            if step <= EPS_MONO {
                strict = false;
                first_violation.get_or_insert(i);
            }
        } else if step < -EPS_MONO {
            weak = false;
            first_violation.get_or_insert(i);
        }
    }
    MonotoneVerdict {
        direction,
        strict,
        weak,
        interior_prefix: prefix,
        first_violation,
        min_step,
    }
}

fn check_k_grid(s: &Scenario, k_grid: &[f64]) -> Result<()> {
    if k_grid.is_empty() {
        return Err(Error::Domain("K grid must be non-empty".into()));
    }
    if k_grid[0] < s.k0() {
        return Err(Error::Domain(format!(
            "K grid starts at {} below K0 = {}",
            k_grid[0],
            s.k0()
        )));
    }
    if k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("K grid must be strictly increasing".into()));
    }
    Ok(())
}

fn solve_along(s: &Scenario, kind: PlannerKind, k_grid: &[f64]) -> Result<Vec<PlannerSolution>> {
    Execution::available().try_map(k_grid.len(), |i| solve(s, kind, k_grid[i]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MismatchCurve {
    pub k_grid: Vec<f64>,
    pub t_naive: Vec<f64>,
    pub t_inf: Vec<f64>,
    /// `(t_naive - t_inf) / T`.
    pub mismatch: Vec<f64>,
    pub case_naive: Vec<KktCase>,
    pub case_inf: Vec<KktCase>,
    pub verdict: MonotoneVerdict,
    pub naive_verdict: MonotoneVerdict,
    pub inf_verdict: MonotoneVerdict,
}

pub fn mismatch_curve(s: &Scenario, k_grid: &[f64]) -> Result<MismatchCurve> {
    check_k_grid(s, k_grid)?;
    audit_covering(s, k_grid)?.require(&BASELINE_GATES)?;
    let naive = solve_along(s, PlannerKind::Naive, k_grid)?;
    let inf = solve_along(s, PlannerKind::Informed, k_grid)?;
    let tt = s.t_total();
    let t_naive: Vec<f64> = naive.iter().map(|r| r.t_a).collect();
    let t_inf: Vec<f64> = inf.iter().map(|r| r.t_a).collect();
    let mismatch: Vec<f64> = t_naive.iter().zip(&t_inf).map(|(n, i)| (n - i) / tt).collect();
    let case_naive: Vec<KktCase> = naive.iter().map(|r| r.case).collect();
    let case_inf: Vec<KktCase> = inf.iter().map(|r| r.case).collect();
    let int_n: Vec<bool> = case_naive.iter().map(|c| *c == KktCase::Interior).collect();
    let int_i: Vec<bool> = case_inf.iter().map(|c| *c == KktCase::Interior).collect();
    let both: Vec<bool> = int_n.iter().zip(&int_i).map(|(a, b)| *a && *b).collect();
    Ok(MismatchCurve {
        verdict: monotone_verdict(&mismatch, &both, Direction::Increasing),
        naive_verdict: monotone_verdict(&t_naive, &int_n, Direction::Increasing),
        inf_verdict: monotone_verdict(&t_inf, &int_i, Direction::Decreasing),
        k_grid: k_grid.to_vec(),
        t_naive,
        t_inf,
        mismatch,
        case_naive,
        case_inf,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCurve {
    pub k_grid: Vec<f64>,
    pub t_naive: Vec<f64>,
    pub t_inf_c: Vec<f64>,
    pub c_naive: Vec<f64>,
    pub c_inf: Vec<f64>,
    /// `C_inf - C_naive`.
    pub gap: Vec<f64>,
    pub case_naive: Vec<KktCase>,
    pub case_inf: Vec<KktCase>,
    pub gap_positive: bool,
    pub verdict: MonotoneVerdict,
}

pub fn noncog_gap_curve(s: &Scenario, k_grid: &[f64]) -> Result<GapCurve> {
    check_k_grid(s, k_grid)?;
    let report = audit_covering(s, k_grid)?;
    report.require(&BASELINE_GATES)?;
    report.require(&["A8"])?;
    let naive = solve_along(s, PlannerKind::Naive, k_grid)?;
    let inf = solve_along(s, PlannerKind::InformedNoncog, k_grid)?;
    let c_naive: Vec<f64> = naive.iter().map(|r| r.skills.c).collect();
    let c_inf: Vec<f64> = inf.iter().map(|r| r.skills.c).collect();
    let gap: Vec<f64> = c_inf.iter().zip(&c_naive).map(|(i, n)| i - n).collect();
    let case_naive: Vec<KktCase> = naive.iter().map(|r| r.case).collect();
    let case_inf: Vec<KktCase> = inf.iter().map(|r| r.case).collect();
    let both: Vec<bool> = case_naive
        .iter()
        .zip(&case_inf)
        .map(|(a, b)| *a == KktCase::Interior && *b == KktCase::Interior)
        .collect();
    Ok(GapCurve {
        k_grid: k_grid.to_vec(),
        t_naive: naive.iter().map(|r| r.t_a).collect(),
        t_inf_c: inf.iter().map(|r| r.t_a).collect(),
        gap_positive: gap.iter().all(|g| *g > 0.0),
        verdict: monotone_verdict(&gap, &both, Direction::Increasing),
        c_naive,
        c_inf,
        gap,
        case_naive,
        case_inf,
    })
}

/// First-order decomposition of the welfare change over `[K, K + dK]` along
/// the naive allocation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelfareReport {
    pub k: f64,
    pub dk: f64,
    /// Skill value change with wages frozen at `K`.
    pub teaching_gain: f64,
    /// Wage change with skills frozen at `K`.
    pub substitution_loss: f64,
    /// `Gamma * (C(K + dK) - C(K))`.
    pub noncog_externality: f64,
    pub total: f64,
    /// `total - (teaching_gain + substitution_loss + noncog_externality)`.
    pub residual: f64,
}

pub fn welfare_decomposition(s: &Scenario, k: f64, dk: f64) -> Result<WelfareReport> {
    s.check_capital(k)?;
    if k < s.k0() {
        return Err(Error::Domain(format!("K = {k} lies below K0 = {}", s.k0())));
    }
    if !(dk.is_finite() && dk >= 0.0) {
        return Err(Error::Domain(format!("dK must be finite and >= 0, got {dk}")));
    }
    if dk == 0.0 {
        return Ok(WelfareReport {
            k,
            dk,
            teaching_gain: 0.0,
            substitution_loss: 0.0,
            noncog_externality: 0.0,
            total: 0.0,
            residual: 0.0,
        });
    }
    let k1 = k + dk;
    let n0 = solve(s, PlannerKind::Naive, k)?;
    let n1 = solve(s, PlannerKind::Naive, k1)?;
    let (wa, wb) = (s.wage_curve(Skill::A), s.wage_curve(Skill::B));
    let (wa0, wb0, wa1, wb1) = (wa.value(k), wb.value(k), wa.value(k1), wb.value(k1));
    let (a0, b0, a1, b1) = (n0.skills.a, n0.skills.b, n1.skills.a, n1.skills.b);
    let gamma = s.gamma();

    let teaching_gain = wa0 * (a1 - a0) + wb0 * (b1 - b0);
    let substitution_loss = (wa1 - wa0) * a0 + (wb1 - wb0) * b0;
    let noncog_externality = gamma * (n1.skills.c - n0.skills.c);
    let total = (wa1 * a1 + wb1 * b1 + gamma * n1.skills.c) - (wa0 * a0 + wb0 * b0 + gamma * n0.skills.c);
    let residual = total - (teaching_gain + substitution_loss + noncog_externality);
    Ok(WelfareReport {
        k,
        dk,
        teaching_gain,
        substitution_loss,
        noncog_externality,
        total,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::{make_scenario, ScenarioConfig, WageAConfig};
    use crate::grid::GridSpec;

    fn grid(spec: &str) -> Vec<f64> {
        spec.parse::<GridSpec>().unwrap().points().unwrap()
    }

    #[test]
    fn reference_mismatch() {
        let s = Scenario::reference();
        let c = mismatch_curve(&s, &grid("0:0.05:2")).unwrap();
        assert!(c.mismatch[0].abs() <= 1e-8);
        assert!(c.verdict.holds());
        assert!(c.naive_verdict.holds());
        assert!(c.inf_verdict.holds());
        assert!(c.mismatch.windows(2).all(|w| w[1] - w[0] > EPS_MONO));
        let k1 = c.k_grid.iter().position(|&k| k == 1.0).unwrap();
        assert!((c.mismatch[k1] - 0.4510).abs() < 1e-4);
    }

    #[test]
    fn single_point_curve() {
        let c = mismatch_curve(&Scenario::reference(), &[0.0]).unwrap();
        assert_eq!(c.mismatch.len(), 1);
        assert!(c.mismatch[0].abs() <= 1e-8);
        assert!(c.verdict.holds());
        assert_eq!(c.verdict.first_violation, None);
    }

    #[test]
    fn refuses_failed_dominance() {
        let mut cfg = ScenarioConfig::reference();
        cfg.production.a.eta = 0.5;
        cfg.wages.a = WageAConfig {
            w_inf: 0.4,
            w0: 1.0,
            delta: 1.0,
        };
        let s = make_scenario(cfg).unwrap();
        match mismatch_curve(&s, &grid("0:0.05:2")) {
            Err(Error::AuditRefused { assumption, .. }) => assert_eq!(assumption, "A7"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let s = Scenario::reference();
        assert!(mismatch_curve(&s, &[]).is_err());
        assert!(mismatch_curve(&s, &[0.5, 0.2]).is_err());
        let mut cfg = ScenarioConfig::reference();
        cfg.k0 = 0.5;
        let s = make_scenario(cfg).unwrap();
        assert!(mismatch_curve(&s, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn reference_gap() {
        let s = Scenario::reference();
        let g = noncog_gap_curve(&s, &grid("0:0.1:2")).unwrap();
        assert!(g.gap[0] > 0.0);
        assert!(g.gap_positive);
        assert!(g.gap.windows(2).all(|w| w[1] - w[0] > EPS_MONO));
    }

    #[test]
    fn gap_vanishes_with_gamma() {
        let mut cfg = ScenarioConfig::reference();
        cfg.gamma = 1e-12;
        let s = make_scenario(cfg).unwrap();
        let g = noncog_gap_curve(&s, &[0.0]).unwrap();
        assert!(g.gap[0].abs() < 1e-6);
    }

    #[test]
    fn welfare_zero_step() {
        let w = welfare_decomposition(&Scenario::reference(), 0.5, 0.0).unwrap();
        assert_eq!(
            [
                w.teaching_gain,
                w.substitution_loss,
                w.noncog_externality,
                w.total,
                w.residual
            ],
            [0.0; 5]
        );
        assert!(welfare_decomposition(&Scenario::reference(), 0.5, -1e-3).is_err());
    }

    #[test]
    fn welfare_residual_is_second_order() {
        let s = Scenario::reference();
        let w1 = welfare_decomposition(&s, 0.5, 1e-3).unwrap();
        let w2 = welfare_decomposition(&s, 0.5, 5e-4).unwrap();
        assert!(w1.residual.abs() <= 1e-4);
        let ratio = w2.residual.abs() / w1.residual.abs();
        assert!((0.15..=0.35).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn substitution_channel_is_negative() {
        let s = Scenario::reference();
        for k in grid("0:0.1:2") {
            let w = welfare_decomposition(&s, k, 1e-3).unwrap();
            assert!(w.substitution_loss < 0.0, "K = {k}");
        }
    }

    #[test]
    fn verdict_weak_after_corner() {
        let v = monotone_verdict(
            &[0.1, 0.2, 0.3, 0.3, 0.3],
            &[true, true, true, false, false],
            Direction::Increasing,
        );
        assert!(v.holds());
        assert_eq!(v.interior_prefix, 3);
        let v = monotone_verdict(&[0.1, 0.1, 0.3], &[true, true, true], Direction::Increasing);
        assert!(!v.strict);
        assert_eq!(v.first_violation, Some(1));
        let v = monotone_verdict(&[0.3, 0.2, 0.1], &[true, true, true], Direction::Decreasing);
        assert!(v.holds());
    }
}
