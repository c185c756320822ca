use std::collections::HashMap;

use serde::Serialize;

use super::judgments::Outcome;
use crate::error::{Error, Result};

/// Rating changes are rounded to this grid so every update is exactly
/// zero-sum in floating point.
const QUANTUM: f64 = 1.0 / 4_294_967_296.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EloConfig {
    pub r0: f64,
    pub k_factor: f64,
}

impl Default for EloConfig {
    fn default() -> Self {
        EloConfig {
            r0: 1000.0,
            k_factor: 32.0,
        }
    }
}

/// Expected score of a player rated `r_a` against one rated `r_b`.
pub fn expected_score(r_a: f64, r_b: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((r_b - r_a) / 400.0))
}

/// One symmetric update; `w_a` is A's score (1, 0.5 or 0).
pub fn elo_update(r_a: f64, r_b: f64, w_a: f64, k_factor: f64) -> (f64, f64) {
    let step = k_factor * (w_a - expected_score(r_a, r_b));
    let step = (step / QUANTUM).round() * QUANTUM;
    (r_a + step, r_b - step)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EloTable {
    pub config: EloConfig,
    pub skills: Vec<String>,
    pub ratings: Vec<f64>,
    pub comparisons: Vec<usize>,
}

impl EloTable {
    pub fn new(roster: &[String], config: EloConfig) -> Self {
        EloTable {
            config,
            skills: roster.to_vec(),
            ratings: vec![config.r0; roster.len()],
            comparisons: vec![0; roster.len()],
        }
    }

    pub fn rating(&self, id: &str) -> Option<f64> {
        self.skills.iter().position(|s| s == id).map(|i| self.ratings[i])
    }

    pub fn total(&self) -> f64 {
        self.ratings.iter().sum()
    }
}

/// Replays `outcomes` in order starting from `R0` for every roster skill.
pub fn elo_run<'a, I>(outcomes: I, roster: &[String], config: EloConfig) -> Result<EloTable>
where
    I: IntoIterator<Item = &'a Outcome>,
{
    let pos: HashMap<&str, usize> = roster.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let lookup = |id: &str| pos.get(id).copied().ok_or_else(|| Error::UnknownSkill(id.to_string()));
    let mut t = EloTable::new(roster, config);
    for o in outcomes {
        let (a, b) = (lookup(&o.skill_a)?, lookup(&o.skill_b)?);
        let (ra, rb) = elo_update(t.ratings[a], t.ratings[b], o.w_a, config.k_factor);
        t.ratings[a] = ra;
        t.ratings[b] = rb;
        t.comparisons[a] += 1;
        t.comparisons[b] += 1;
    }
    Ok(t)
}
