//! Independent oracles for the integration tests. Everything here works
//! from the raw scenario parameters with closed forms or literal loops and
//! never calls the library's solvers.
#![allow(dead_code)]

use std::path::PathBuf;

use edutrap::economy::audit_covering;
use edutrap::economy::{make_scenario, Scenario, ScenarioConfig, BASELINE_GATES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load(name: &str) -> Scenario {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    Scenario::from_toml(&text).unwrap()
}

fn wage_a(c: &ScenarioConfig, k: f64) -> f64 {
    let w = c.wages.a;
    w.w_inf + (w.w0 - w.w_inf) * (-w.delta * k).exp()
}

fn wage_a_slope(c: &ScenarioConfig, k: f64) -> f64 {
    let w = c.wages.a;
    -w.delta * (w.w0 - w.w_inf) * (-w.delta * k).exp()
}

fn wage_b(c: &ScenarioConfig, k: f64) -> f64 {
    let w = c.wages.b;
    w.w0 + w.s * (1.0 - (-w.delta * k).exp())
}

fn wage_b_slope(c: &ScenarioConfig, k: f64) -> f64 {
    let w = c.wages.b;
    w.s * w.delta * (-w.delta * k).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Who {
    Naive,
    Informed,
    Noncog,
}

fn prices(c: &ScenarioConfig, who: Who, k: f64) -> (f64, f64, f64) {
    match who {
        Who::Naive => (wage_a(c, c.k0), wage_b(c, c.k0), 0.0),
        Who::Informed => (wage_a(c, k), wage_b(c, k), 0.0),
        Who::Noncog => (wage_a(c, k), wage_b(c, k), c.gamma),
    }
}

/// Closed-form maximizer of the quadratic-family objective, clamped to `[0, T]`.
pub fn closed_form_t(c: &ScenarioConfig, who: Who, k: f64) -> f64 {
    let (pa, pb, g) = prices(c, who, k);
    let ke = c.kappa * k;
    let (a, b) = (c.production.a, c.production.b);
    let n = &c.noncog;
    let dc = (n.c_a - n.c_b) - (n.mu_a - n.mu_b) * ke;
    let t = (pa * (a.a + a.eta * ke) - pb * (b.a + b.eta * ke - 2.0 * b.b * c.t_total) + g * dc)
        / (2.0 * (pa * a.b + pb * b.b));
    t.clamp(0.0, c.t_total)
}

/// Objective value written out from the parameters.
pub fn objective(c: &ScenarioConfig, who: Who, t: f64, k: f64) -> f64 {
    let (pa, pb, g) = prices(c, who, k);
    let ke = c.kappa * k;
    let (a, b) = (c.production.a, c.production.b);
    let tb = c.t_total - t;
    let fa = (a.a + a.eta * ke) * t - a.b * t * t;
    let fb = (b.a + b.eta * ke) * tb - b.b * tb * tb;
    let n = &c.noncog;
    let fc = (n.c_a - n.mu_a * ke) * t + (n.c_b - n.mu_b * ke) * tb - n.rho * ke;
    pa * fa + pb * fb + g * fc
}

/// `d2U/dt dK` from the closed-form partials.
pub fn analytic_cross_partial(c: &ScenarioConfig, who: Who, t: f64, k: f64) -> f64 {
    let ke = c.kappa * k;
    let (a, b) = (c.production.a, c.production.b);
    let tb = c.t_total - t;
    let ma = a.a + a.eta * ke - 2.0 * a.b * t;
    let mb = b.a + b.eta * ke - 2.0 * b.b * tb;
    let (pa, pb, g) = prices(c, who, k);
    let (dpa, dpb) = match who {
        Who::Naive => (0.0, 0.0),
        _ => (wage_a_slope(c, k), wage_b_slope(c, k)),
    };
    dpa * ma + pa * a.eta * c.kappa - dpb * mb - pb * b.eta * c.kappa - g * (c.noncog.mu_a - c.noncog.mu_b) * c.kappa
}

/// Tau-b by a literal loop over all ordered pairs.
pub fn brute_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut c, mut d, mut tx, mut ty) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let sx = (x[i] - x[j]).signum() * f64::from(u8::from(x[i] != x[j]));
            let sy = (y[i] - y[j]).signum() * f64::from(u8::from(y[i] != y[j]));
            if sx == 0.0 {
                tx += 1;
            }
            if sy == 0.0 {
                ty += 1;
            }
            if sx * sy > 0.0 {
                c += 1;
            }
            if sx * sy < 0.0 {
                d += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as u64;
    let (c, d, tx, ty) = (c / 2, d / 2, tx / 2, ty / 2);
    (c as f64 - d as f64) / (((n0 - tx) * (n0 - ty)) as f64).sqrt()
}

/// Random scenario drawn around the reference; may fail validation or audits.
pub fn random_config(rng: &mut ChaCha8Rng) -> ScenarioConfig {
    let mut c = ScenarioConfig::reference();
    c.k0 = if rng.random_bool(0.5) {
        0.0
    } else {
        rng.random_range(0.0..0.5)
    };
    c.kappa = rng.random_range(0.5..1.5);
    c.gamma = rng.random_range(0.1..1.0);
    c.production.a.a = rng.random_range(0.8..1.5);
    c.production.a.b = rng.random_range(0.2..0.4);
    c.production.a.eta = rng.random_range(0.0..0.3);
    c.production.b.a = rng.random_range(0.8..1.5);
    c.production.b.b = rng.random_range(0.2..0.4);
    c.production.b.eta = rng.random_range(0.0..0.3);
    c.wages.a.w_inf = rng.random_range(0.2..0.6);
    c.wages.a.w0 = c.wages.a.w_inf + rng.random_range(0.2..0.8);
    c.wages.a.delta = rng.random_range(0.5..3.0);
    c.wages.b.w0 = rng.random_range(0.7..1.3);
    c.wages.b.s = rng.random_range(0.0..0.5);
    c.wages.b.delta = rng.random_range(0.5..2.0);
    c.noncog.c_a = rng.random_range(0.0..0.2);
    c.noncog.c_b = c.noncog.c_a + rng.random_range(0.1..0.5);
    c.noncog.mu_a = rng.random_range(0.1..0.5);
    c.noncog.mu_b = rng.random_range(0.0..c.noncog.mu_a);
    c.noncog.rho = rng.random_range(0.0..0.1);
    c
}

/// `count` scenarios that validate and pass the baseline audits on
/// `[K0, K0 + 2]`, with the grid used for the audit.
pub fn audited_scenarios(seed: u64, count: usize) -> Vec<(Scenario, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 100 * count, "could not draw {count} audited scenarios");
        let Ok(s) = make_scenario(random_config(&mut rng)) else {
            continue;
        };
        let grid: Vec<f64> = (0..=8).map(|i| s.k0() + 0.25 * f64::from(i)).collect();
        if audit_covering(&s, &grid).unwrap().require(&BASELINE_GATES).is_ok() {
            out.push((s, grid));
        }
    }
    out
}

/// Deterministic RNG for tests.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
