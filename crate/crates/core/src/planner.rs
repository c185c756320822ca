//! Time-allocation planners: naive (anchor prices), informed (true wages),
//! and informed with a weight on non-cognitive skills.
//!
//! Every objective is strictly concave on `[0, T]`, so its derivative is
//! strictly decreasing. The solver screens the two corners with the KKT
//! conditions and otherwise bisects on the derivative.

use serde::Serialize;

use crate::economy::{Scenario, Skill};
use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this.
pub const TOL_T: f64 = 1e-11;
/// ... or once `|dU/dt|` falls below this.
pub const TOL_FOC: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    Naive,
    Informed,
    InformedNoncog,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::Naive, PlannerKind::Informed, PlannerKind::InformedNoncog];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Naive => "naive",
            PlannerKind::Informed => "informed",
            PlannerKind::InformedNoncog => "informed-noncog",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KktCase {
    Interior,
    LowerCorner,
    UpperCorner,
}

impl KktCase {
    pub fn as_str(self) -> &'static str {
        match self {
            KktCase::Interior => "interior",
            KktCase::LowerCorner => "lower-corner",
            KktCase::UpperCorner => "upper-corner",
        }
    }
}

/// KKT case and multipliers for `t >= 0` (`mu0`) and `t <= T` (`mu_t`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktClass {
    pub case: KktCase,
    pub mu0: f64,
    pub mu_t: f64,
}

/// Classifies a box-constrained concave maximum from the end-point slopes.
pub fn kkt_classify(dudt_0: f64, dudt_t: f64) -> Result<KktClass> {
    if !(dudt_0.is_finite() && dudt_t.is_finite()) {
        return Err(Error::Domain("end-point derivatives must be finite".into()));
    }
    let lower = dudt_0 <= 0.0;
    let upper = dudt_t >= 0.0;
    match (lower, upper) {
        (true, true) => Err(Error::Inconsistent(format!(
            "dU/dt(0) = {dudt_0} <= 0 and dU/dt(T) = {dudt_t} >= 0 contradict strict concavity"
        ))),
        (true, false) => Ok(KktClass {
            case: KktCase::LowerCorner,
            mu0: -dudt_0,
            mu_t: 0.0,
        }),
        (false, true) => Ok(KktClass {
            case: KktCase::UpperCorner,
            mu0: 0.0,
            mu_t: dudt_t,
        }),
        (false, false) => Ok(KktClass {
            case: KktCase::Interior,
            mu0: 0.0,
            mu_t: 0.0,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Skills {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlannerSolution {
    pub planner: PlannerKind,
    pub k: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub case: KktCase,
    pub mu0: f64,
    pub mu_t: f64,
    pub utility: f64,
    pub skills: Skills,
    /// `|dU/dt|` at `t_a`; zero for corners.
    pub foc_residual: f64,
}

/// A planner objective at fixed capital, as a function of `t_A`.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    s: &'a Scenario,
    kind: PlannerKind,
    k: f64,
    ke: f64,
    w_a: f64,
    w_b: f64,
    gamma: f64,
}

impl<'a> Objective<'a> {
    pub fn new(s: &'a Scenario, kind: PlannerKind, k: f64) -> Result<Self> {
        s.check_capital(k)?;
        let (w_a, w_b) = match kind {
            PlannerKind::Naive => (s.p_a(), s.p_b()),
            PlannerKind::Informed | PlannerKind::InformedNoncog => {
                (s.wage_curve(Skill::A).value(k), s.wage_curve(Skill::B).value(k))
            }
        };
        let gamma = if kind == PlannerKind::InformedNoncog {
            s.gamma()
        } else {
            0.0
        };
        Ok(Objective {
            s,
            kind,
            k,
            ke: s.ke(k),
            w_a,
            w_b,
            gamma,
        })
    }

    pub fn kind(&self) -> PlannerKind {
        self.kind
    }

    pub fn value(&self, t_a: f64) -> f64 {
        let s = self.s;
        let t_b = s.t_total() - t_a;
        let mut u = self.w_a * s.production(Skill::A).value(t_a, self.ke)
            + self.w_b * s.production(Skill::B).value(t_b, self.ke);
        if self.gamma > 0.0 {
            u += self.gamma * s.noncog().value(t_a, t_b, self.ke);
        }
        u
    }

    /// `dU/dt_A`.
    pub fn slope(&self, t_a: f64) -> f64 {
        let s = self.s;
        let t_b = s.t_total() - t_a;
        let mut d =
            self.w_a * s.production(Skill::A).d_t(t_a, self.ke) - self.w_b * s.production(Skill::B).d_t(t_b, self.ke);
        if self.gamma > 0.0 {
            d += self.gamma * s.noncog().composite_d_ta(self.ke);
        }
        d
    }

    pub fn solve(&self) -> Result<PlannerSolution> {
        let tt = self.s.t_total();
        let class = kkt_classify(self.slope(0.0), self.slope(tt))?;
        let (t_a, foc_residual) = match class.case {
            KktCase::LowerCorner => (0.0, 0.0),
            KktCase::UpperCorner => (tt, 0.0),
            KktCase::Interior => {
                let t = bisect_decreasing(|t| self.slope(t), 0.0, tt);
                (t, self.slope(t).abs())
            }
        };
        let t_b = tt - t_a;
        let s = self.s;
        Ok(PlannerSolution {
            planner: self.kind,
            k: self.k,
            t_a,
            t_b,
            case: class.case,
            mu0: class.mu0,
            mu_t: class.mu_t,
            utility: self.value(t_a),
            skills: Skills {
                a: s.production(Skill::A).value(t_a, self.ke),
                b: s.production(Skill::B).value(t_b, self.ke),
                c: s.noncog().value(t_a, t_b, self.ke),
            },
            foc_residual,
        })
    }
}

/// Root of a strictly decreasing function with `f(lo) > 0 > f(hi)`.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo < TOL_T || mid <= lo || mid >= hi {
            return mid;
        }
        let d = f(mid);
        if d.abs() < TOL_FOC {
            return mid;
        }
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

pub fn solve(s: &Scenario, kind: PlannerKind, k: f64) -> Result<PlannerSolution> {
    Objective::new(s, kind, k)?.solve()
}

pub fn solve_naive(s: &Scenario, k: f64) -> Result<PlannerSolution> {
    solve(s, PlannerKind::Naive, k)
}

pub fn solve_informed(s: &Scenario, k: f64) -> Result<PlannerSolution> {
    solve(s, PlannerKind::Informed, k)
}

pub fn solve_informed_noncog(s: &Scenario, k: f64) -> Result<PlannerSolution> {
    solve(s, PlannerKind::InformedNoncog, k)
}
