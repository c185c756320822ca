//! Endogenous AI intensity at a fixed time allocation.
//!
//! Skill A output is `m(tA) (1 + phi a - psi a^2)` with `m(tA) = aA tA - bA tA^2`,
//! and non-cognitive output is `cA tA + cB tB - chi a - xi a^2`. The school
//! values skill A at the anchor price and ignores non-cognitive skills; the
//! planner uses the current wage and weights non-cognitive skills by `gamma`.
//! Both marginal-benefit curves are linear in the intensity `a`.

use serde::Serialize;

use crate::economy::{Scenario, Skill};
use crate::error::{Error, Result};
use crate::mismatch::{monotone_verdict, Direction, MonotoneVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agent {
    School,
    Planner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntensityProblem {
    pub t_a: f64,
    pub t_b: f64,
    pub k: f64,
    pub m: f64,
    pub phi: f64,
    pub psi: f64,
    pub chi: f64,
    pub xi: f64,
    pub gamma: f64,
    pub p_a: f64,
    pub w_a: f64,
    pub c_a: f64,
    pub c_b: f64,
}

impl IntensityProblem {
    /// Checks the technology and price conditions; returns the problem unchanged.
    pub fn validated(self) -> Result<Self> {
        let mut v = Vec::new();
        let p = &self;
        let all = [
            p.t_a, p.t_b, p.k, p.m, p.phi, p.psi, p.chi, p.xi, p.gamma, p.p_a, p.w_a, p.c_a, p.c_b,
        ];
        if !all.iter().all(|x| x.is_finite()) {
            v.push("all parameters must be finite".to_string());
        }
        let mut req = |ok: bool, msg: &str| {
            if !ok {
                v.push(msg.to_string());
            }
        };
        req(p.t_a > 0.0, "tA must be > 0");
        req(p.t_b >= 0.0, "tB must be >= 0");
        req(p.m > 0.0, "m(tA) must be > 0");
        req(p.psi > 0.0, "psi must be > 0");
        req(p.phi > 2.0 * p.psi, "phi must exceed 2*psi");
        req(p.chi > 0.0, "chi must be > 0");
        req(p.xi >= 0.0, "xi must be >= 0");
        req(p.gamma > 0.0, "gamma must be > 0");
        req(p.w_a > 0.0, "wA(K) must be > 0");
        req(p.p_a > p.w_a, "pA must exceed wA(K)");
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidScenario(v))
        }
    }

    /// Builds the problem from a scenario's `[adoption]` table at `(tA, K)`.
    pub fn from_scenario(s: &Scenario, t_a: f64, k: f64) -> Result<Self> {
        s.check_time(t_a)?;
        s.check_capital(k)?;
        if k <= s.k0() {
            return Err(Error::Domain(format!("adoption requires K > K0 = {}, got {k}", s.k0())));
        }
        let ad = s
            .adoption()
            .ok_or_else(|| Error::Config("scenario has no [adoption] table".into()))?;
        let fa = s.production(Skill::A);
        IntensityProblem {
            t_a,
            t_b: s.t_total() - t_a,
            k,
            m: fa.a * t_a - fa.b * t_a * t_a,
            phi: ad.phi,
            psi: ad.psi,
            chi: ad.chi,
            xi: ad.xi,
            gamma: s.gamma(),
            p_a: s.p_a(),
            w_a: s.wage_curve(Skill::A).value(k),
            c_a: s.noncog().c_a,
            c_b: s.noncog().c_b,
        }
        .validated()
    }

    fn check_alpha(alpha: f64) -> Result<()> {
        if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
            return Err(Error::Domain(format!("intensity must lie in [0, 1], got {alpha}")));
        }
        Ok(())
    }

    /// Skill A output at intensity `alpha`.
    pub fn skill_a(&self, alpha: f64) -> f64 {
        self.m * (1.0 + self.phi * alpha - self.psi * alpha * alpha)
    }

    /// Non-cognitive output at intensity `alpha`.
    pub fn noncog(&self, alpha: f64) -> f64 {
        self.c_a * self.t_a + self.c_b * self.t_b - self.chi * alpha - self.xi * alpha * alpha
    }

    /// Gross benefit `B(alpha)` as perceived by `agent`.
    pub fn benefit(&self, agent: Agent, alpha: f64) -> f64 {
        match agent {
            Agent::School => self.p_a * self.skill_a(alpha),
            Agent::Planner => self.w_a * self.skill_a(alpha) + self.gamma * self.noncog(alpha),
        }
    }

    pub fn marginal_benefit(&self, agent: Agent, alpha: f64) -> Result<f64> {
        Self::check_alpha(alpha)?;
        Ok(self.mb(agent, alpha))
    }

    fn mb(&self, agent: Agent, alpha: f64) -> f64 {
        let da = self.m * (self.phi - 2.0 * self.psi * alpha);
        match agent {
            Agent::School => self.p_a * da,
            Agent::Planner => self.w_a * da - self.gamma * (self.chi + 2.0 * self.xi * alpha),
        }
    }

    /// Constant slope of the marginal-benefit curve.
    pub fn mb_slope(&self, agent: Agent) -> f64 {
        match agent {
            Agent::School => -2.0 * self.p_a * self.m * self.psi,
            Agent::Planner => -2.0 * (self.w_a * self.m * self.psi + self.gamma * self.xi),
        }
    }

    /// `gamma xi > (pA - wA) m psi`: the planner's curve is the steeper one.
    pub fn widening_predicted(&self) -> bool {
        self.gamma * self.xi > (self.p_a - self.w_a) * self.m * self.psi
    }
}

pub fn marginal_benefit(p: &IntensityProblem, agent: Agent, alpha: f64) -> Result<f64> {
    p.marginal_benefit(agent, alpha)
}

/// The open interval of costs at which both agents choose an interior intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostSet {
    pub lo: f64,
    pub hi: f64,
    pub non_empty: bool,
}

impl CostSet {
    pub fn contains(&self, c: f64) -> bool {
        c > self.lo && c < self.hi
    }
}

pub fn interior_cost_set(p: &IntensityProblem) -> CostSet {
    let lo = p.mb(Agent::School, 1.0);
    let hi = p.mb(Agent::Planner, 0.0);
    CostSet {
        lo,
        hi,
        non_empty: hi > lo,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntensityCase {
    NoAdoption,
    Interior,
    FullAdoption,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntensityChoice {
    pub alpha: f64,
    pub case: IntensityCase,
    /// Multiplier on `alpha >= 0`.
    pub lambda0: f64,
    /// Multiplier on `alpha <= 1`.
    pub lambda1: f64,
}

/// Maximizes `B(alpha) - c alpha` on `[0, 1]` for one agent.
pub fn solve_intensity(p: &IntensityProblem, agent: Agent, c: f64) -> Result<IntensityChoice> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("marginal cost must be finite and > 0, got {c}")));
    }
    let mb0 = p.mb(agent, 0.0);
    let mb1 = p.mb(agent, 1.0);
    if c >= mb0 {
        return Ok(IntensityChoice {
            alpha: 0.0,
            case: IntensityCase::NoAdoption,
            lambda0: c - mb0,
            lambda1: 0.0,
        });
    }
    if c <= mb1 {
        return Ok(IntensityChoice {
            alpha: 1.0,
            case: IntensityCase::FullAdoption,
            lambda0: 0.0,
            lambda1: mb1 - c,
        });
    }
    let alpha = match agent {
        Agent::School => (p.phi - c / (p.p_a * p.m)) / (2.0 * p.psi),
        Agent::Planner => (p.w_a * p.m * p.phi - p.gamma * p.chi - c) / (2.0 * (p.w_a * p.m * p.psi + p.gamma * p.xi)),
    };
    Ok(IntensityChoice {
        alpha,
        case: IntensityCase::Interior,
        lambda0: 0.0,
        lambda1: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdoptionCurve {
    pub c_grid: Vec<f64>,
    pub alpha_school: Vec<f64>,
    pub alpha_planner: Vec<f64>,
    /// `alpha_school - alpha_planner`.
    pub gap_alpha: Vec<f64>,
    pub c_school: Vec<f64>,
    pub c_planner: Vec<f64>,
    /// `C_planner - C_school`.
    pub gap_c: Vec<f64>,
    pub widening_predicted: bool,
    /// Along the grid order, i.e. as the cost falls.
    pub gap_alpha_verdict: MonotoneVerdict,
    pub gap_c_verdict: MonotoneVerdict,
}

/// Solves both agents along a strictly decreasing cost grid inside the
/// interior cost set.
pub fn adoption_mismatch_curve(p: &IntensityProblem, c_grid: &[f64]) -> Result<AdoptionCurve> {
    if c_grid.is_empty() {
        return Err(Error::Domain("cost grid must be non-empty".into()));
    }
    if c_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("cost grid must be strictly decreasing".into()));
    }
    let set = interior_cost_set(p);
    if !set.non_empty {
        return Err(Error::Domain(format!(
            "interior cost set ({}, {}) is empty",
            set.lo, set.hi
        )));
    }
    if let Some(&c) = c_grid.iter().find(|&&c| !set.contains(c)) {
        return Err(Error::OutsideInteriorCostSet {
            c,
            lo: set.lo,
            hi: set.hi,
        });
    }
    let n = c_grid.len();
    let mut curve = AdoptionCurve {
        c_grid: c_grid.to_vec(),
        alpha_school: Vec::with_capacity(n),
        alpha_planner: Vec::with_capacity(n),
        gap_alpha: Vec::with_capacity(n),
        c_school: Vec::with_capacity(n),
        c_planner: Vec::with_capacity(n),
        gap_c: Vec::with_capacity(n),
        widening_predicted: p.widening_predicted(),
        gap_alpha_verdict: monotone_verdict(&[], &[], Direction::Increasing),
        gap_c_verdict: monotone_verdict(&[], &[], Direction::Increasing),
    };
    for &c in c_grid {
        let a_s = solve_intensity(p, Agent::School, c)?.alpha;
        let a_p = solve_intensity(p, Agent::Planner, c)?.alpha;
        let (cs, cp) = (p.noncog(a_s), p.noncog(a_p));
        curve.alpha_school.push(a_s);
        curve.alpha_planner.push(a_p);
        curve.gap_alpha.push(a_s - a_p);
        curve.c_school.push(cs);
        curve.c_planner.push(cp);
        curve.gap_c.push(cp - cs);
    }
    let interior = vec![true; n];
    curve.gap_alpha_verdict = monotone_verdict(&curve.gap_alpha, &interior, Direction::Increasing);
    curve.gap_c_verdict = monotone_verdict(&curve.gap_c, &interior, Direction::Increasing);
    Ok(curve)
}
