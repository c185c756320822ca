use std::collections::HashMap;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Which skill was shown first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Order {
    IJ,
    JI,
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "IJ" => Ok(Order::IJ),
            "JI" => Ok(Order::JI),
            other => Err(Error::Config(format!("order must be IJ or JI, got {other:?}"))),
        }
    }
}

/// The judge's pick, relative to presentation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    First,
    Second,
    Tie,
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Verdict::First),
            "2" => Ok(Verdict::Second),
            "0" => Ok(Verdict::Tie),
            other => Err(Error::Config(format!("verdict must be 1, 2 or 0, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Judgment {
    pub model_id: String,
    pub skill_i: String,
    pub skill_j: String,
    pub order: Order,
    pub verdict: Verdict,
}

impl Judgment {
    /// Score of `skill_i` in this single record: 1, 0.5 or 0.
    fn score_i(&self) -> f64 {
        match (self.order, self.verdict) {
            (_, Verdict::Tie) => 0.5,
            (Order::IJ, Verdict::First) | (Order::JI, Verdict::Second) => 1.0,
            (Order::IJ, Verdict::Second) | (Order::JI, Verdict::First) => 0.0,
        }
    }

    fn pair_key(&self) -> (String, String, String) {
        let (a, b) = if self.skill_i <= self.skill_j {
            (&self.skill_i, &self.skill_j)
        } else {
            (&self.skill_j, &self.skill_i)
        };
        (self.model_id.clone(), a.clone(), b.clone())
    }

    /// The order in terms of the canonical (sorted) pair labels.
    fn canonical_order(&self) -> Order {
        match (self.skill_i <= self.skill_j, self.order) {
            (true, o) => o,
            (false, Order::IJ) => Order::JI,
            (false, Order::JI) => Order::IJ,
        }
    }
}

/// Validated judgments plus the skill roster.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgmentSet {
    records: Vec<Judgment>,
    roster: Vec<String>,
}

impl JudgmentSet {
    /// Validates `records`. When `roster` is `None` it is taken from the
    /// records in first-appearance order.
    pub fn new(records: Vec<Judgment>, roster: Option<Vec<String>>) -> Result<Self> {
        let mut seen: HashMap<((String, String, String), Order), usize> = HashMap::new();
        for (line, r) in records.iter().enumerate() {
            if r.skill_i == r.skill_j {
                return Err(Error::Config(format!(
                    "record {line}: skill_i equals skill_j ({})",
                    r.skill_i
                )));
            }
            if let Some(prev) = seen.insert((r.pair_key(), r.canonical_order()), line) {
                return Err(Error::DuplicateJudgment(format!(
                    "records {prev} and {line}: model {}, pair ({}, {}), same presentation order",
                    r.model_id, r.skill_i, r.skill_j
                )));
            }
        }
        let roster = match roster {
            Some(r) => {
                for rec in &records {
                    for id in [&rec.skill_i, &rec.skill_j] {
                        if !r.contains(id) {
                            return Err(Error::UnknownSkill(id.clone()));
                        }
                    }
                }
                r
            }
            None => {
                let mut r: Vec<String> = Vec::new();
                for rec in &records {
                    for id in [&rec.skill_i, &rec.skill_j] {
                        if !r.contains(id) {
                            r.push(id.clone());
                        }
                    }
                }
                r
            }
        };
        Ok(JudgmentSet { records, roster })
    }

    pub fn records(&self) -> &[Judgment] {
        &self.records
    }

    pub fn roster(&self) -> &[String] {
        &self.roster
    }

    /// Model ids in first-appearance order.
    pub fn models(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.model_id) {
                out.push(r.model_id.clone());
            }
        }
        out
    }
}

/// A resolved comparison; `w_a` is the score of `skill_a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub model_id: String,
    pub skill_a: String,
    pub skill_b: String,
    pub w_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Symmetrized {
    pub outcomes: Vec<Outcome>,
    /// Pairs seen in only one presentation order.
    pub single_order: usize,
    /// Pairs whose two verdicts disagree (including any tie), scored as draws.
    pub draws_from_disagreement: usize,
}

pub fn symmetrize_judgments(set: &JudgmentSet) -> Symmetrized {
    let mut groups: Vec<(String, String, String, Vec<f64>)> = Vec::new();
    let mut index: HashMap<(String, String, String), usize> = HashMap::new();
    for r in set.records() {
        let slot = *index.entry(r.pair_key()).or_insert_with(|| {
            groups.push((r.model_id.clone(), r.skill_i.clone(), r.skill_j.clone(), Vec::new()));
            groups.len() - 1
        });
        let g = &mut groups[slot];
        // Scores are kept from the point of view of the group's first skill.
        let s = if r.skill_i == g.1 {
            r.score_i()
        } else {
            1.0 - r.score_i()
        };
        g.3.push(s);
    }
    let mut single_order = 0;
    let mut draws_from_disagreement = 0;
    let outcomes = groups
        .into_iter()
        .map(|(model_id, skill_a, skill_b, scores)| {
            let w_a = match scores.as_slice() {
                [s] => {
                    single_order += 1;
                    *s
                }
                [s1, s2] if s1 == s2 && *s1 != 0.5 => *s1,
                _ => {
                    draws_from_disagreement += 1;
                    0.5
                }
            };
            Outcome {
                model_id,
                skill_a,
                skill_b,
                w_a,
            }
        })
        .collect();
    Symmetrized {
        outcomes,
        single_order,
        draws_from_disagreement,
    }
}
