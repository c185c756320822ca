//! Parametric economies and the assumption audit.
//!
//! Functional families:
//!
//! * skill production `f_j(t, Ke) = (a_j + eta_j Ke) t - b_j t^2`,
//! * educational AI `Ke = g(K) = kappa K`,
//! * wages `w(K) = w_inf + (w_0 - w_inf) exp(-delta K)` (skill B is written
//!   as `w_B0 + s_B (1 - exp(-delta_B K))`, which is the same family),
//! * non-cognitive skills `f_C(tA, tB, Ke) = (cA - muA Ke) tA + (cB - muB Ke) tB - rho Ke`.
//!
//! Anchor prices are never configured: `pA = w_A(K0)` and `pB = w_B(K0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::EPS_SIGN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Skill {
    A,
    B,
}

/// `f(t, Ke) = (a + eta Ke) t - b t^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Production {
    pub a: f64,
    pub b: f64,
    pub eta: f64,
}

impl Production {
    pub fn value(&self, t: f64, ke: f64) -> f64 {
        (self.a + self.eta * ke) * t - self.b * t * t
    }

    pub fn d_t(&self, t: f64, ke: f64) -> f64 {
        self.a + self.eta * ke - 2.0 * self.b * t
    }

    pub fn d_tt(&self) -> f64 {
        -2.0 * self.b
    }

    pub fn d_ke(&self, t: f64) -> f64 {
        self.eta * t
    }

    pub fn d_t_ke(&self) -> f64 {
        self.eta
    }
}

/// `w(K) = w_inf + (w0 - w_inf) exp(-delta K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WageCurve {
    #[serde(rename = "wInf")]
    pub w_inf: f64,
    pub w0: f64,
    pub delta: f64,
}

impl WageCurve {
    pub fn value(&self, k: f64) -> f64 {
        self.w_inf + (self.w0 - self.w_inf) * (-self.delta * k).exp()
    }

    pub fn slope(&self, k: f64) -> f64 {
        -self.delta * (self.w0 - self.w_inf) * (-self.delta * k).exp()
    }
}

/// `f_C(tA, tB, Ke) = (cA - muA Ke) tA + (cB - muB Ke) tB - rho Ke`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonCog {
    #[serde(rename = "cA")]
    pub c_a: f64,
    #[serde(rename = "cB")]
    pub c_b: f64,
    #[serde(rename = "muA")]
    pub mu_a: f64,
    #[serde(rename = "muB")]
    pub mu_b: f64,
    pub rho: f64,
}

impl NonCog {
    pub fn value(&self, t_a: f64, t_b: f64, ke: f64) -> f64 {
        (self.c_a - self.mu_a * ke) * t_a + (self.c_b - self.mu_b * ke) * t_b - self.rho * ke
    }

    /// `dC/dtA` of the composite `C(tA, K) = f_C(tA, T - tA, g(K))`.
    pub fn composite_d_ta(&self, ke: f64) -> f64 {
        (self.c_a - self.c_b) - (self.mu_a - self.mu_b) * ke
    }

    /// `df_C/dKe` at a given time split.
    pub fn d_ke(&self, t_a: f64, t_b: f64) -> f64 {
        -self.mu_a * t_a - self.mu_b * t_b - self.rho
    }

    /// `d2C/(dKe dtA)` of the composite.
    pub fn composite_d_ta_ke(&self) -> f64 {
        -(self.mu_a - self.mu_b)
    }
}

/// Parameters of the AI-intensity technology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdoptionParams {
    pub phi: f64,
    pub psi: f64,
    pub chi: f64,
    pub xi: f64,
}

/// Piecewise skill-A wage schedule: thresholds and the three tier wage curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tiers {
    #[serde(rename = "Alow")]
    pub a_low: f64,
    #[serde(rename = "Ahigh")]
    pub a_high: f64,
    #[serde(rename = "wLow")]
    pub w_low: WageCurve,
    #[serde(rename = "wMid")]
    pub w_mid: WageCurve,
    #[serde(rename = "wHigh")]
    pub w_high: WageCurve,
}

impl Tiers {
    /// Thresholds 0.2 / 0.5 with `wLow = 0.3 + 0.2e^-K`, `wMid = 0.1 + 0.15e^-K`,
    /// `wHigh = 0.9 + 0.1(1 - e^-K)`.
    pub fn reference() -> Self {
        Tiers {
            a_low: 0.2,
            a_high: 0.5,
            w_low: WageCurve {
                w_inf: 0.3,
                w0: 0.5,
                delta: 1.0,
            },
            w_mid: WageCurve {
                w_inf: 0.1,
                w0: 0.25,
                delta: 1.0,
            },
            w_high: WageCurve {
                w_inf: 1.0,
                w0: 0.9,
                delta: 1.0,
            },
        }
    }

    /// Same thresholds with a decaying expert wage `wHigh = 0.5 + 0.4e^-3K`,
    /// which makes the expertise premium change sign at small K.
    pub fn switching() -> Self {
        Tiers {
            w_high: WageCurve {
                w_inf: 0.5,
                w0: 0.9,
                delta: 3.0,
            },
            ..Tiers::reference()
        }
    }

    /// Right-continuous wage for skill level `a`.
    pub fn wage(&self, a: f64, k: f64) -> f64 {
        if a >= self.a_high {
            self.w_high.value(k)
        } else if a >= self.a_low {
            self.w_mid.value(k)
        } else {
            self.w_low.value(k)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionAConfig {
    #[serde(rename = "aA")]
    pub a: f64,
    #[serde(rename = "bA")]
    pub b: f64,
    #[serde(rename = "etaA")]
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionBConfig {
    #[serde(rename = "aB")]
    pub a: f64,
    #[serde(rename = "bB")]
    pub b: f64,
    #[serde(rename = "etaB")]
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionConfig {
    #[serde(rename = "A")]
    pub a: ProductionAConfig,
    #[serde(rename = "B")]
    pub b: ProductionBConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WageAConfig {
    #[serde(rename = "wAinf")]
    pub w_inf: f64,
    #[serde(rename = "wA0")]
    pub w0: f64,
    #[serde(rename = "deltaA")]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WageBConfig {
    #[serde(rename = "wB0")]
    pub w0: f64,
    #[serde(rename = "sB")]
    pub s: f64,
    #[serde(rename = "deltaB")]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WagesConfig {
    #[serde(rename = "A")]
    pub a: WageAConfig,
    #[serde(rename = "B")]
    pub b: WageBConfig,
}

/// The scenario document as written in TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "T")]
    pub t_total: f64,
    #[serde(rename = "K0")]
    pub k0: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub production: ProductionConfig,
    pub wages: WagesConfig,
    pub noncog: NonCog,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adoption: Option<AdoptionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiers: Option<Tiers>,
}

impl ScenarioConfig {
    /// The reference economy used throughout the tests and docs.
    pub fn reference() -> Self {
        ScenarioConfig {
            t_total: 1.0,
            k0: 0.0,
            kappa: 1.0,
            gamma: 0.5,
            production: ProductionConfig {
                a: ProductionAConfig {
                    a: 1.0,
                    b: 0.4,
                    eta: 0.2,
                },
                b: ProductionBConfig {
                    a: 1.0,
                    b: 0.4,
                    eta: 0.1,
                },
            },
            wages: WagesConfig {
                a: WageAConfig {
                    w_inf: 0.3,
                    w0: 1.0,
                    delta: 2.0,
                },
                b: WageBConfig {
                    w0: 1.0,
                    s: 0.2,
                    delta: 1.0,
                },
            },
            noncog: NonCog {
                c_a: 0.1,
                c_b: 0.5,
                mu_a: 0.3,
                mu_b: 0.1,
                rho: 0.05,
            },
            adoption: Some(AdoptionParams {
                phi: 1.0,
                psi: 0.25,
                chi: 0.05,
                xi: 0.1,
            }),
            tiers: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// A validated economy. Construct through [`make_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    config: ScenarioConfig,
    prod_a: Production,
    prod_b: Production,
    wage_a: WageCurve,
    wage_b: WageCurve,
    p_a: f64,
    p_b: f64,
}

/// Validates a scenario document and computes the anchor prices.
pub fn make_scenario(config: ScenarioConfig) -> Result<Scenario> {
    let mut v: Vec<String> = Vec::new();
    let mut req = |ok: bool, msg: &str| {
        if !ok {
            v.push(msg.to_string());
        }
    };
    let c = &config;
    let finite = [
        c.t_total,
        c.k0,
        c.kappa,
        c.gamma,
        c.production.a.a,
        c.production.a.b,
        c.production.a.eta,
        c.production.b.a,
        c.production.b.b,
        c.production.b.eta,
        c.wages.a.w_inf,
        c.wages.a.w0,
        c.wages.a.delta,
        c.wages.b.w0,
        c.wages.b.s,
        c.wages.b.delta,
        c.noncog.c_a,
        c.noncog.c_b,
        c.noncog.mu_a,
        c.noncog.mu_b,
        c.noncog.rho,
    ];
    req(finite.iter().all(|x| x.is_finite()), "all parameters must be finite");
    req(c.t_total > 0.0, "T must be > 0");
    req(c.k0 >= 0.0, "K0 must be >= 0");
    req(c.kappa > 0.0, "kappa must be > 0");
    req(c.gamma > 0.0, "gamma must be > 0");
    req(c.production.a.a > 0.0, "aA must be > 0");
    req(c.production.b.a > 0.0, "aB must be > 0");
    req(c.production.a.b > 0.0, "bA must be > 0");
    req(c.production.b.b > 0.0, "bB must be > 0");
    req(c.production.a.eta >= 0.0, "etaA must be >= 0");
    req(c.production.b.eta >= 0.0, "etaB must be >= 0");
    req(c.wages.a.w_inf > 0.0, "wAinf must be > 0");
    req(c.wages.a.w0 > c.wages.a.w_inf, "wA0 must exceed wAinf");
    req(c.wages.a.delta > 0.0, "deltaA must be > 0");
    req(c.wages.b.w0 > 0.0, "wB0 must be > 0");
    req(c.wages.b.s >= 0.0, "sB must be >= 0");
    req(c.wages.b.delta >= 0.0, "deltaB must be >= 0");
    req(c.noncog.c_a >= 0.0, "cA must be >= 0");
    req(c.noncog.c_b > c.noncog.c_a, "cB must exceed cA");
    req(c.noncog.mu_b >= 0.0, "muB must be >= 0");
    req(c.noncog.mu_a > c.noncog.mu_b, "muA must exceed muB");
    req(c.noncog.rho > 0.0, "rho must be > 0");
    if let Some(ad) = &c.adoption {
        req(
            [ad.phi, ad.psi, ad.chi, ad.xi].iter().all(|x| x.is_finite()),
            "adoption parameters must be finite",
        );
        req(ad.psi > 0.0, "psi must be > 0");
        req(ad.phi > 2.0 * ad.psi, "phi must exceed 2*psi");
        req(ad.chi > 0.0, "chi must be > 0");
        req(ad.xi >= 0.0, "xi must be >= 0");
    }
    if let Some(t) = &c.tiers {
        req(t.a_low > 0.0, "Alow must be > 0");
        req(t.a_high > t.a_low, "Ahigh must exceed Alow");
        for (name, w) in [("wLow", t.w_low), ("wMid", t.w_mid), ("wHigh", t.w_high)] {
            if !(w.w_inf.is_finite() && w.w0.is_finite() && w.delta.is_finite()) {
                v.push(format!("{name} parameters must be finite"));
            }
            if !(w.w_inf > 0.0 && w.w0 > 0.0) {
                v.push(format!("{name} levels must be > 0"));
            }
            if w.delta < 0.0 {
                v.push(format!("{name} delta must be >= 0"));
            }
        }
    }
    if !v.is_empty() {
        return Err(Error::InvalidScenario(v));
    }

    let prod_a = Production {
        a: c.production.a.a,
        b: c.production.a.b,
        eta: c.production.a.eta,
    };
    let prod_b = Production {
        a: c.production.b.a,
        b: c.production.b.b,
        eta: c.production.b.eta,
    };
    let wage_a = WageCurve {
        w_inf: c.wages.a.w_inf,
        w0: c.wages.a.w0,
        delta: c.wages.a.delta,
    };
    let wage_b = WageCurve {
        w_inf: c.wages.b.w0 + c.wages.b.s,
        w0: c.wages.b.w0,
        delta: c.wages.b.delta,
    };
    let p_a = wage_a.value(c.k0);
    let p_b = wage_b.value(c.k0);
    Ok(Scenario {
        config,
        prod_a,
        prod_b,
        wage_a,
        wage_b,
        p_a,
        p_b,
    })
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        make_scenario(ScenarioConfig::from_toml(text)?)
    }

    pub fn reference() -> Self {
        make_scenario(ScenarioConfig::reference()).expect("reference scenario is valid")
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn t_total(&self) -> f64 {
        self.config.t_total
    }

    pub fn k0(&self) -> f64 {
        self.config.k0
    }

    pub fn kappa(&self) -> f64 {
        self.config.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.config.gamma
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    pub fn production(&self, skill: Skill) -> &Production {
        match skill {
            Skill::A => &self.prod_a,
            Skill::B => &self.prod_b,
        }
    }

    pub fn wage_curve(&self, skill: Skill) -> &WageCurve {
        match skill {
            Skill::A => &self.wage_a,
            Skill::B => &self.wage_b,
        }
    }

    pub fn noncog(&self) -> &NonCog {
        &self.config.noncog
    }

    pub fn adoption(&self) -> Option<&AdoptionParams> {
        self.config.adoption.as_ref()
    }

    pub fn tiers(&self) -> Option<&Tiers> {
        self.config.tiers.as_ref()
    }

    /// Wage floor; taken as the asymptotic skill-A wage.
    pub fn wage_floor(&self) -> f64 {
        self.wage_a.w_inf
    }

    /// Educational AI `Ke = g(K)`.
    pub fn ke(&self, k: f64) -> f64 {
        self.config.kappa * k
    }

    /// `g'(K)`.
    pub fn g_prime(&self) -> f64 {
        self.config.kappa
    }

    /// Non-cognitive output at allocation `t_a` and capital `k`.
    pub fn noncog_output(&self, t_a: f64, k: f64) -> f64 {
        self.config.noncog.value(t_a, self.t_total() - t_a, self.ke(k))
    }

    /// Returns a copy with different tiers (used to build switching examples).
    pub fn with_tiers(&self, tiers: Option<Tiers>) -> Result<Self> {
        let mut cfg = self.config.clone();
        cfg.tiers = tiers;
        make_scenario(cfg)
    }

    pub(crate) fn check_capital(&self, k: f64) -> Result<()> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::Domain(format!("capital K must be finite and >= 0, got {k}")));
        }
        Ok(())
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if !(t.is_finite() && (0.0..=self.t_total()).contains(&t)) {
            return Err(Error::Domain(format!(
                "time t must lie in [0, {}], got {t}",
                self.t_total()
            )));
        }
        Ok(())
    }
}

/// Value and analytic partials of a production function at `(t, g(K))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductionEval {
    pub value: f64,
    pub d_t: f64,
    pub d_tt: f64,
    pub d_ke: f64,
    pub d_t_ke: f64,
}

pub fn eval_production(s: &Scenario, skill: Skill, t: f64, k: f64) -> Result<ProductionEval> {
    s.check_time(t)?;
    s.check_capital(k)?;
    let f = s.production(skill);
    let ke = s.ke(k);
    Ok(ProductionEval {
        value: f.value(t, ke),
        d_t: f.d_t(t, ke),
        d_tt: f.d_tt(),
        d_ke: f.d_ke(t),
        d_t_ke: f.d_t_ke(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WageEval {
    pub w_a: f64,
    pub w_b: f64,
    pub dw_a: f64,
    pub dw_b: f64,
}

pub fn eval_wages(s: &Scenario, k: f64) -> Result<WageEval> {
    s.check_capital(k)?;
    Ok(WageEval {
        w_a: s.wage_a.value(k),
        w_b: s.wage_b.value(k),
        dw_a: s.wage_a.slope(k),
        dw_b: s.wage_b.slope(k),
    })
}

/// `d2 U_naive / dK dtA = g' (pA etaA - pB etaB)`.
pub fn naive_cross_partial(s: &Scenario) -> f64 {
    s.g_prime() * (s.p_a * s.prod_a.d_t_ke() - s.p_b * s.prod_b.d_t_ke())
}

/// Two channels of `d2 U_inf / dK dtA`: (workplace, education).
pub fn informed_cross_partial_channels(s: &Scenario, t_a: f64, k: f64) -> (f64, f64) {
    let ke = s.ke(k);
    let t_b = s.t_total() - t_a;
    let workplace = s.wage_a.slope(k) * s.prod_a.d_t(t_a, ke) - s.wage_b.slope(k) * s.prod_b.d_t(t_b, ke);
    let education = s.g_prime() * (s.wage_a.value(k) * s.prod_a.d_t_ke() - s.wage_b.value(k) * s.prod_b.d_t_ke());
    (workplace, education)
}

pub fn informed_cross_partial(s: &Scenario, t_a: f64, k: f64) -> f64 {
    let (a, b) = informed_cross_partial_channels(s, t_a, k);
    a + b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditStatus {
    Pass,
    Fail,
    Indeterminate,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub id: String,
    pub status: AuditStatus,
    /// Human-readable form of the checked inequality.
    pub condition: String,
    /// Whether downstream proposition checks refuse on this entry.
    pub gating: bool,
    pub worst_t: Option<f64>,
    pub worst_k: Option<f64>,
    /// Raw value of the checked expression at the worst grid point.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

/// Assumption ids in report order.
pub const AUDIT_IDS: [&str; 10] = [
    "A1",
    "A2",
    "A3",
    "A4",
    "A5",
    "A6",
    "A7",
    "A8",
    "thresholds",
    "tier-ordering",
];

/// Entries the baseline comparative statics depend on.
pub const BASELINE_GATES: [&str; 5] = ["A1", "A2", "A4", "A5", "A7"];

impl AuditReport {
    pub fn entry(&self, id: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// First of `ids` whose status is not `Pass`.
    pub fn first_failure(&self, ids: &[&str]) -> Option<&AuditEntry> {
        ids.iter()
            .filter_map(|id| self.entry(id))
            .find(|e| e.status != AuditStatus::Pass)
    }

    /// Refuses with the first non-passing id of `ids`.
    pub fn require(&self, ids: &[&str]) -> Result<()> {
        match self.first_failure(ids) {
            None => Ok(()),
            Some(e) => Err(Error::AuditRefused {
                assumption: e.id.clone(),
                detail: format!(
                    "{} is {:?} at t = {}, K = {}, margin {}",
                    e.condition,
                    e.status,
                    e.worst_t.map_or("-".into(), |t| t.to_string()),
                    e.worst_k.map_or("-".into(), |k| k.to_string()),
                    e.margin.map_or("-".into(), |m| m.to_string()),
                ),
            }),
        }
    }

    /// True when every gating entry passes (not-applicable entries are ignored).
    pub fn passed(&self) -> bool {
        self.entries
            .iter()
            .filter(|e| e.gating && e.status != AuditStatus::NotApplicable)
            .all(|e| e.status == AuditStatus::Pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Sense {
    Positive,
    Negative,
    NonNegative,
    NonPositive,
}

impl Sense {
    fn slack(self, v: f64) -> f64 {
        match self {
            Sense::Positive | Sense::NonNegative => v,
            Sense::Negative | Sense::NonPositive => -v,
        }
    }

    fn classify(self, v: f64) -> AuditStatus {
        let s = self.slack(v);
        match self {
            Sense::Positive | Sense::Negative => {
                if s > EPS_SIGN {
                    AuditStatus::Pass
                } else if s < -EPS_SIGN {
                    AuditStatus::Fail
                } else {
                    AuditStatus::Indeterminate
                }
            }
            Sense::NonNegative | Sense::NonPositive => {
                if s >= -EPS_SIGN {
                    AuditStatus::Pass
                } else {
                    AuditStatus::Fail
                }
            }
        }
    }
}

fn severity(st: AuditStatus) -> u8 {
    match st {
        AuditStatus::Fail => 2,
        AuditStatus::Indeterminate => 1,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: Option<f64>,
    k: f64,
    value: f64,
    sense: Sense,
}

/// Folds samples into the worst one: highest severity, then smallest slack.
/// Ties keep the first sample, so the result follows grid order.
fn worst(samples: impl IntoIterator<Item = Sample>) -> Option<Sample> {
    let mut best: Option<(u8, f64, Sample)> = None;
    for s in samples {
        let sev = severity(s.sense.classify(s.value));
        let slack = s.sense.slack(s.value);
        let replace = match &best {
            None => true,
            Some((bs, bslack, _)) => sev > *bs || (sev == *bs && slack < *bslack),
        };
        if replace {
            best = Some((sev, slack, s));
        }
    }
    best.map(|b| b.2)
}

fn entry_from(id: &str, condition: &str, gating: bool, s: Option<Sample>) -> AuditEntry {
    match s {
        Some(s) => AuditEntry {
            id: id.to_string(),
            status: s.sense.classify(s.value),
            condition: condition.to_string(),
            gating,
            worst_t: s.t,
            worst_k: Some(s.k),
            margin: Some(s.value),
        },
        None => AuditEntry {
            id: id.to_string(),
            status: AuditStatus::NotApplicable,
            condition: condition.to_string(),
            gating,
            worst_t: None,
            worst_k: None,
            margin: None,
        },
    }
}

/// Evaluates every assumption on `t_grid x k_grid` and records the worst
/// grid point per assumption. Failing assumptions are report entries.
pub fn audit_assumptions(s: &Scenario, t_grid: &[f64], k_grid: &[f64]) -> Result<AuditReport> {
    if t_grid.is_empty() || k_grid.is_empty() {
        return Err(Error::Domain("audit grids must be non-empty".into()));
    }
    for &t in t_grid {
        s.check_time(t)?;
    }
    for &k in k_grid {
        s.check_capital(k)?;
    }
    let tt = s.t_total();
    let pts = || k_grid.iter().flat_map(move |&k| t_grid.iter().map(move |&t| (t, k)));
    let (fa, fb) = (s.prod_a, s.prod_b);
    let mut entries = Vec::with_capacity(AUDIT_IDS.len());

    // A1: uniform strict concavity in time.
    let a1 = worst(pts().flat_map(|(t, k)| {
        [fa.d_tt(), fb.d_tt()].map(|v| Sample {
            t: Some(t),
            k,
            value: v,
            sense: Sense::Negative,
        })
    }));
    entries.push(entry_from("A1", "d2f_j/dt2 <= -lambda < 0", true, a1));

    // A2: increasing differences of the naive objective.
    let a2 = worst(pts().map(|(t, k)| Sample {
        t: Some(t),
        k,
        value: naive_cross_partial(s),
        sense: Sense::Positive,
    }));
    entries.push(entry_from("A2", "g'(pA etaA - pB etaB) > 0", true, a2));

    // A3 / A6: boundary conditions for interior allocations (informational).
    let boundary = |wa: f64, wb: f64, k: f64| {
        let ke = s.ke(k);
        let at0 = wa * fa.d_t(0.0, ke) - wb * fb.d_t(tt, ke);
        let at_t = wa * fa.d_t(tt, ke) - wb * fb.d_t(0.0, ke);
        [
            Sample {
                t: Some(0.0),
                k,
                value: at0,
                sense: Sense::Positive,
            },
            Sample {
                t: Some(tt),
                k,
                value: -at_t,
                sense: Sense::Positive,
            },
        ]
    };
    let a3 = worst(k_grid.iter().flat_map(|&k| boundary(s.p_a, s.p_b, k)));
    entries.push(entry_from("A3", "dU_naive/dt(0) > 0 and dU_naive/dt(T) < 0", false, a3));

    // A4: wages bounded below by the floor.
    let floor = s.wage_floor();
    let a4 = worst(k_grid.iter().flat_map(|&k| {
        [s.wage_a.value(k), s.wage_b.value(k)].map(|w| Sample {
            t: None,
            k,
            value: w - floor,
            sense: Sense::NonNegative,
        })
    }));
    entries.push(entry_from("A4", "w_j(K) - wbar >= 0", true, a4));

    // A5: wA' < 0, wB' >= 0.
    let a5 = worst(k_grid.iter().flat_map(|&k| {
        [
            Sample {
                t: None,
                k,
                value: s.wage_a.slope(k),
                sense: Sense::Negative,
            },
            Sample {
                t: None,
                k,
                value: s.wage_b.slope(k),
                sense: Sense::NonNegative,
            },
        ]
    }));
    entries.push(entry_from("A5", "wA'(K) < 0 and wB'(K) >= 0", true, a5));

    let a6 = worst(
        k_grid
            .iter()
            .flat_map(|&k| boundary(s.wage_a.value(k), s.wage_b.value(k), k)),
    );
    entries.push(entry_from("A6", "dU_inf/dt(0) > 0 and dU_inf/dt(T) < 0", false, a6));

    // A7: decreasing differences of the informed objective; weak at K0.
    let k0 = s.k0();
    let a7 = worst(pts().map(|(t, k)| Sample {
        t: Some(t),
        k,
        value: informed_cross_partial(s, t, k),
        sense: if k <= k0 { Sense::NonPositive } else { Sense::Negative },
    }));
    entries.push(entry_from("A7", "d2U_inf/dKdtA <= 0 at K0, < 0 beyond", true, a7));

    // A8: non-cognitive production conditions (a)-(c).
    let nc = s.config.noncog;
    let g1 = s.g_prime();
    let a8 = worst(pts().flat_map(|(t, k)| {
        let ke = s.ke(k);
        [
            nc.composite_d_ta(ke),
            g1 * nc.d_ke(t, tt - t),
            g1 * nc.composite_d_ta_ke(),
        ]
        .map(|v| Sample {
            t: Some(t),
            k,
            value: v,
            sense: Sense::Negative,
        })
    }));
    entries.push(entry_from("A8", "dC/dtA < 0, dC/dK < 0, d2C/dKdtA < 0", true, a8));

    let tiers = s.tiers();
    let thresholds = tiers.and_then(|tr| {
        worst(k_grid.iter().flat_map(|&k| {
            let ke = s.ke(k);
            [
                Sample {
                    t: Some(0.0),
                    k,
                    value: tr.a_low - fa.value(0.0, ke),
                    sense: Sense::Positive,
                },
                Sample {
                    t: Some(tt),
                    k,
                    value: fa.value(tt, ke) - tr.a_high,
                    sense: Sense::Positive,
                },
                Sample {
                    t: Some(tt),
                    k,
                    value: fa.d_t(tt, ke),
                    sense: Sense::Positive,
                },
            ]
        }))
    });
    entries.push(entry_from(
        "thresholds",
        "f_A(0,Ke) < Alow, f_A(T,Ke) > Ahigh, f_A increasing on [0,T]",
        true,
        thresholds,
    ));

    let ordering = tiers.and_then(|tr| {
        worst(k_grid.iter().flat_map(|&k| {
            [
                Sample {
                    t: None,
                    k,
                    value: tr.w_high.value(k) - tr.w_low.value(k),
                    sense: Sense::Positive,
                },
                Sample {
                    t: None,
                    k,
                    value: tr.w_low.value(k) - tr.w_mid.value(k),
                    sense: Sense::NonNegative,
                },
            ]
        }))
    });
    entries.push(entry_from("tier-ordering", "wHigh > wLow >= wMid", true, ordering));

    Ok(AuditReport { entries })
}

/// Audit grid covering `k_grid`: 21 evenly spaced times on `[0, T]`.
pub fn audit_covering(s: &Scenario, k_grid: &[f64]) -> Result<AuditReport> {
    audit_assumptions(s, &linspace(0.0, s.t_total(), 21), k_grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, step: f64, hi: f64) -> Vec<f64> {
        crate::grid::GridSpec::new(lo, step, hi).unwrap().points().unwrap()
    }

    #[test]
    fn reference_anchor_prices() {
        let s = Scenario::reference();
        assert_eq!(s.p_a(), 1.0);
        assert_eq!(s.p_b(), 1.0);
        let w = eval_wages(&s, s.k0()).unwrap();
        assert_eq!(w.w_a.to_bits(), s.p_a().to_bits());
        assert_eq!(w.w_b.to_bits(), s.p_b().to_bits());
    }

    #[test]
    fn rejects_zero_curvature() {
        let mut c = ScenarioConfig::reference();
        c.production.a.b = 0.0;
        match make_scenario(c) {
            Err(Error::InvalidScenario(v)) => assert!(v.contains(&"bA must be > 0".to_string())),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_equal_noncog_slopes() {
        let mut c = ScenarioConfig::reference();
        c.noncog.c_b = c.noncog.c_a;
        match make_scenario(c) {
            Err(Error::InvalidScenario(v)) => assert!(v.contains(&"cB must exceed cA".to_string())),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_every_violation() {
        let mut c = ScenarioConfig::reference();
        c.production.a.b = 0.0;
        c.kappa = -1.0;
        c.noncog.rho = 0.0;
        match make_scenario(c) {
            Err(Error::InvalidScenario(v)) => assert_eq!(v.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn production_values() {
        let s = Scenario::reference();
        let e = eval_production(&s, Skill::A, 0.5, 0.0).unwrap();
        assert!((e.value - 0.4).abs() < 1e-15);
        assert!((e.d_t - 0.6).abs() < 1e-15);
        assert_eq!(e.d_tt, -0.8);
        for k in [0.0, 0.3, 2.0] {
            assert_eq!(eval_production(&s, Skill::A, 0.0, k).unwrap().value, 0.0);
        }
        assert_eq!(eval_production(&s, Skill::A, 0.5, 1.0).unwrap().d_t_ke, 0.2);
        assert!(eval_production(&s, Skill::A, 1.5, 0.0).is_err());
        assert!(eval_production(&s, Skill::B, 0.5, -0.1).is_err());
    }

    #[test]
    fn wage_values() {
        let s = Scenario::reference();
        let w = eval_wages(&s, 0.0).unwrap();
        assert_eq!((w.w_a, w.w_b), (1.0, 1.0));
        assert!((w.dw_a + 1.4).abs() < 1e-15);
        assert!((w.dw_b - 0.2).abs() < 1e-15);
        assert!((eval_wages(&s, 50.0).unwrap().w_a - 0.3).abs() < 1e-12);
        assert!(eval_wages(&s, -1.0).is_err());

        let mut c = ScenarioConfig::reference();
        c.wages.b.s = 0.0;
        let s = make_scenario(c).unwrap();
        for k in [0.0, 0.7, 3.0] {
            let w = eval_wages(&s, k).unwrap();
            assert_eq!(w.w_b, 1.0);
            assert_eq!(w.dw_b, 0.0);
        }
    }

    #[test]
    fn reference_audit_passes() {
        let s = Scenario::reference();
        let r = audit_assumptions(&s, &grid(0.0, 0.05, 1.0), &grid(0.0, 0.05, 2.0)).unwrap();
        for id in ["A1", "A2", "A4", "A5", "A7", "A8"] {
            assert_eq!(r.entry(id).unwrap().status, AuditStatus::Pass, "{id}");
        }
        assert!(r.entry("A7").unwrap().margin.unwrap() < 0.0);
        assert_eq!(r.entry("thresholds").unwrap().status, AuditStatus::NotApplicable);
        assert!(r.passed());
        let ids: Vec<&str> = r.entries.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, AUDIT_IDS.to_vec());
    }

    #[test]
    fn education_channel_breaks_dominance() {
        let mut c = ScenarioConfig::reference();
        c.production.a.eta = 0.5;
        c.wages.a = WageAConfig {
            w_inf: 0.4,
            w0: 1.0,
            delta: 1.0,
        };
        let s = make_scenario(c).unwrap();
        let r = audit_assumptions(&s, &grid(0.0, 0.05, 1.0), &grid(0.0, 0.05, 2.0)).unwrap();
        let a7 = r.entry("A7").unwrap();
        assert_eq!(a7.status, AuditStatus::Fail);
        assert_eq!(a7.worst_t, Some(1.0));
        assert_eq!(a7.worst_k, Some(0.0));
        let (work, edu) = informed_cross_partial_channels(&s, 1.0, 0.0);
        assert!(work < 0.0 && edu > -work);
        assert!(!r.passed());
    }

    #[test]
    fn symmetric_complementarity_is_indeterminate() {
        let mut c = ScenarioConfig::reference();
        c.production.b.eta = c.production.a.eta;
        let s = make_scenario(c).unwrap();
        let r = audit_assumptions(&s, &[0.5], &[0.0, 1.0]).unwrap();
        let a2 = r.entry("A2").unwrap();
        assert_eq!(a2.status, AuditStatus::Indeterminate);
        assert_eq!(a2.margin, Some(0.0));
    }

    #[test]
    fn tier_entries_when_configured() {
        let s = Scenario::reference().with_tiers(Some(Tiers::reference())).unwrap();
        let r = audit_covering(&s, &grid(0.0, 0.05, 1.0)).unwrap();
        assert_eq!(r.entry("thresholds").unwrap().status, AuditStatus::Pass);
        assert_eq!(r.entry("tier-ordering").unwrap().status, AuditStatus::Pass);

        let mut t = Tiers::reference();
        t.a_high = 0.7;
        let s = Scenario::reference().with_tiers(Some(t)).unwrap();
        let r = audit_covering(&s, &[0.0]).unwrap();
        assert_eq!(r.entry("thresholds").unwrap().status, AuditStatus::Fail);
    }

    #[test]
    fn audit_is_deterministic() {
        let s = Scenario::reference();
        let t = grid(0.0, 0.1, 1.0);
        let k = grid(0.0, 0.1, 2.0);
        assert_eq!(
            audit_assumptions(&s, &t, &k).unwrap(),
            audit_assumptions(&s, &t, &k).unwrap()
        );
    }

    #[test]
    fn composite_noncog_slope_is_negative() {
        let s = Scenario::reference();
        for k in grid(0.0, 0.25, 5.0) {
            assert!(s.noncog().composite_d_ta(s.ke(k)) < 0.0);
        }
    }

    #[test]
    fn toml_round_trip() {
        let c = ScenarioConfig::reference();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(ScenarioConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn toml_rejects_user_prices() {
        let c = ScenarioConfig::reference();
        let text = format!("pA = 2.0\n{}", toml::to_string(&c).unwrap());
        assert!(matches!(ScenarioConfig::from_toml(&text), Err(Error::Config(_))));
    }
}
