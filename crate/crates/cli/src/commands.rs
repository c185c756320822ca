use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use edutrap::adoption::{adoption_mismatch_curve, interior_cost_set, IntensityProblem};
use edutrap::economy::{audit_assumptions, AuditStatus, Scenario};
use edutrap::grid::GridSpec;
use edutrap::mismatch::{mismatch_curve, noncog_gap_curve};
use edutrap::oracle::{check_proposition, CheckSpec, CheckStatus, Proposition};
use edutrap::planner::{solve, PlannerKind};
use edutrap::skillindex::{
    bootstrap_ci, elo_run, kendall_tau_b, pca_first_component, symmetrize_judgments, BootstrapMethod, EloConfig,
    Judgment, JudgmentSet,
};
use edutrap::tiers::{delta_crossings, tiered_mismatch_curve};
use edutrap::Execution;
use serde::Deserialize;
use serde_json::json;

use crate::output::{num, to_json, Run};

/// A validation failure detected by the front end itself (exit status 2).
#[derive(Debug)]
pub struct Refusal(pub String);

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Refusal {}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Refusal(format!("cannot read {}: {e}", path.display())).into())
}

pub fn load_scenario(run: &mut Run, path: &Path) -> Result<Scenario> {
    let text = read_input(path)?;
    let s = Scenario::from_toml(&text).with_context(|| format!("loading {}", path.display()))?;
    run.input(path);
    run.config(serde_json::to_value(s.config())?);
    Ok(s)
}

fn points(g: &GridSpec) -> Result<Vec<f64>> {
    Ok(g.points()?)
}

pub fn audit(run: &mut Run, scenario: &Path, t_grid: &GridSpec, k_grid: &GridSpec) -> Result<u8> {
    let s = load_scenario(run, scenario)?;
    let report = audit_assumptions(&s, &points(t_grid)?, &points(k_grid)?)?;
    run.json("audit.json", &report)?;
    for e in &report.entries {
        let opt = |x: Option<f64>| x.map_or("-".to_string(), num);
        println!(
            "{:<14} {:<15} gating={:<5} t={:<10} K={:<10} margin={:<16} {}",
            e.id,
            format!("{:?}", e.status).to_lowercase(),
            e.gating,
            opt(e.worst_t),
            opt(e.worst_k),
            opt(e.margin),
            e.condition
        );
    }
    if report.passed() {
        return Ok(0);
    }
    let bad = report
        .entries
        .iter()
        .find(|e| e.gating && !matches!(e.status, AuditStatus::Pass | AuditStatus::NotApplicable))
        .expect("a gating entry failed");
    eprintln!(
        "refused: assumption {} is {:?} ({}) at t = {}, K = {}",
        bad.id,
        bad.status,
        bad.condition,
        bad.worst_t.map_or("-".into(), num),
        bad.worst_k.map_or("-".into(), num)
    );
    Ok(2)
}

pub fn solve_cmd(run: &mut Run, scenario: &Path, k: f64, planner: Option<PlannerKind>) -> Result<u8> {
    let s = load_scenario(run, scenario)?;
    let kinds = match planner {
        Some(p) => vec![p],
        None => PlannerKind::ALL.to_vec(),
    };
    let sols = kinds
        .iter()
        .map(|&p| solve(&s, p, k))
        .collect::<edutrap::Result<Vec<_>>>()?;
    for r in &sols {
        println!(
            "{:<16} tA={:<16} tB={:<16} case={:<13} mu0={:<14} muT={:<14} U={}",
            r.planner.as_str(),
            num(r.t_a),
            num(r.t_b),
            r.case.as_str(),
            num(r.mu0),
            num(r.mu_t),
            num(r.utility)
        );
    }
    run.json("solution.json", &sols)?;
    Ok(0)
}

pub fn sweep(run: &mut Run, scenario: &Path, k_grid: &GridSpec, noncog: bool) -> Result<u8> {
    let s = load_scenario(run, scenario)?;
    let k = points(k_grid)?;
    let c = mismatch_curve(&s, &k)?;
    let rows: Vec<Vec<String>> = (0..k.len())
        .map(|i| {
            vec![
                num(k[i]),
                num(c.t_naive[i]),
                num(c.t_inf[i]),
                num(c.mismatch[i]),
                c.case_naive[i].as_str().into(),
                c.case_inf[i].as_str().into(),
            ]
        })
        .collect();
    run.csv(
        "mismatch.csv",
        &["K", "t_naive", "t_inf", "mismatch", "case_naive", "case_inf"],
        &rows,
    )?;
    let mut summary = json!({
        "mismatch": c.verdict,
        "t_naive": c.naive_verdict,
        "t_inf": c.inf_verdict,
    });
    println!(
        "mismatch: {} points, strictly increasing on interior prefix = {}, weak after = {}",
        k.len(),
        c.verdict.strict,
        c.verdict.weak
    );
    if noncog {
        let g = noncog_gap_curve(&s, &k)?;
        let rows: Vec<Vec<String>> = (0..k.len())
            .map(|i| {
                vec![
                    num(k[i]),
                    num(g.t_naive[i]),
                    num(g.t_inf_c[i]),
                    num(g.c_naive[i]),
                    num(g.c_inf[i]),
                    num(g.gap[i]),
                    g.case_naive[i].as_str().into(),
                    g.case_inf[i].as_str().into(),
                ]
            })
            .collect();
        run.csv(
            "gap.csv",
            &[
                "K",
                "t_naive",
                "t_inf_c",
                "c_naive",
                "c_inf",
                "gap",
                "case_naive",
                "case_inf",
            ],
            &rows,
        )?;
        summary["gap"] = json!({ "positive": g.gap_positive, "verdict": g.verdict });
        println!(
            "non-cognitive gap: positive = {}, increasing = {}",
            g.gap_positive,
            g.verdict.holds()
        );
    }
    run.json("sweep.json", &summary)?;
    Ok(0)
}

pub fn adoption(run: &mut Run, scenario: &Path, t_a: f64, k: Option<f64>, c_grid: &GridSpec) -> Result<u8> {
    let s = load_scenario(run, scenario)?;
    let k = k.unwrap_or(s.k0() + 0.05);
    let p = IntensityProblem::from_scenario(&s, t_a, k)?;
    let curve = adoption_mismatch_curve(&p, &points(c_grid)?)?;
    let rows: Vec<Vec<String>> = (0..curve.c_grid.len())
        .map(|i| {
            [
                curve.c_grid[i],
                curve.alpha_school[i],
                curve.alpha_planner[i],
                curve.gap_alpha[i],
                curve.c_school[i],
                curve.c_planner[i],
                curve.gap_c[i],
            ]
            .iter()
            .map(|x| num(*x))
            .collect()
        })
        .collect();
    run.csv(
        "adoption.csv",
        &[
            "c",
            "alpha_school",
            "alpha_planner",
            "gap_alpha",
            "c_school",
            "c_planner",
            "gap_c",
        ],
        &rows,
    )?;
    run.json(
        "adoption.json",
        &json!({
            "problem": p,
            "interior_cost_set": interior_cost_set(&p),
            "widening_predicted": curve.widening_predicted,
            "gap_alpha": curve.gap_alpha_verdict,
            "gap_c": curve.gap_c_verdict,
        }),
    )?;
    println!(
        "adoption at tA = {}, K = {}: widening predicted = {}, gap in alpha increasing as cost falls = {}",
        num(t_a),
        num(k),
        curve.widening_predicted,
        curve.gap_alpha_verdict.holds()
    );
    Ok(0)
}

pub fn tiers(run: &mut Run, scenario: &Path, k_grid: &GridSpec) -> Result<u8> {
    let s = load_scenario(run, scenario)?;
    let k = points(k_grid)?;
    let curve = tiered_mismatch_curve(&s, &k)?;
    let rows: Vec<Vec<String>> = curve
        .points
        .iter()
        .map(|p| {
            vec![
                num(p.k),
                num(p.tau_low),
                num(p.tau_high),
                num(p.delta),
                p.choice.as_str().into(),
                num(p.t_naive),
                num(p.t_inf),
                num(p.mismatch),
                p.jump.to_string(),
            ]
        })
        .collect();
    run.csv(
        "tiers.csv",
        &[
            "K", "tau_low", "tau_high", "delta", "choice", "t_naive", "t_inf", "mismatch", "jump",
        ],
        &rows,
    )?;
    let crossings = delta_crossings(&s, &k)?;
    run.json(
        "tiers.json",
        &json!({ "jumps": curve.jumps, "delta_crossings": crossings, "mismatch": curve.mismatch_verdict }),
    )?;
    println!(
        "tiers: {} points, {} jump(s), delta crossings at {:?}",
        k.len(),
        curve.jumps,
        crossings
    );
    Ok(0)
}

pub struct CheckArgs {
    pub prop: Proposition,
    pub k_grid: Option<GridSpec>,
    pub oracle_points: Option<usize>,
    pub t_a: Option<f64>,
    pub k_adoption: Option<f64>,
    pub c_grid: Option<GridSpec>,
}

pub fn check(run: &mut Run, scenario: &Path, a: CheckArgs) -> Result<u8> {
    let s = load_scenario(run, scenario)?;
    let mut spec = CheckSpec::for_scenario(&s);
    if let Some(g) = a.k_grid {
        spec.k_grid = g;
    }
    if let Some(n) = a.oracle_points {
        spec.oracle_points = n;
    }
    spec.t_a = a.t_a;
    spec.k_adoption = a.k_adoption;
    spec.c_grid = a.c_grid;
    let r = check_proposition(&s, a.prop, &spec)?;
    run.json(&format!("check_{:?}.json", a.prop), &r)?;
    let status = to_json(&r.status)?;
    println!("{:?} {}: {}", a.prop, status.as_str().unwrap_or("?"), r.evidence.detail);
    if let Some(note) = &r.corner_note {
        println!("note: {note}");
    }
    Ok(match r.status {
        CheckStatus::Verified => 0,
        CheckStatus::NotApplicable => {
            eprintln!(
                "refused: {:?} not applicable{}",
                a.prop,
                r.failing_assumption
                    .as_ref()
                    .map_or(String::new(), |id| format!(", assumption {id} fails"))
            );
            2
        }
        CheckStatus::Violated => {
            eprintln!(
                "{:?} violated at K = {:?}, t = {:?}, c = {:?}",
                a.prop, r.evidence.k, r.evidence.t, r.evidence.c
            );
            1
        }
    })
}

#[derive(Deserialize)]
struct JudgmentRow {
    model_id: String,
    skill_i: String,
    skill_j: String,
    order: String,
    verdict: String,
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn refuse_csv(path: &Path, e: impl fmt::Display) -> anyhow::Error {
    Refusal(format!("{}: {e}", path.display())).into()
}

pub fn index_elo(run: &mut Run, input: &Path) -> Result<u8> {
    let text = read_input(input)?;
    run.input(input);
    let mut records = Vec::new();
    for row in csv_reader(&text).deserialize::<JudgmentRow>() {
        let r = row.map_err(|e| refuse_csv(input, e))?;
        records.push(Judgment {
            model_id: r.model_id,
            skill_i: r.skill_i,
            skill_j: r.skill_j,
            order: r.order.parse()?,
            verdict: r.verdict.parse()?,
        });
    }
    let set = JudgmentSet::new(records, None)?;
    let sym = symmetrize_judgments(&set);
    let config = EloConfig::default();
    let pooled = elo_run(&sym.outcomes, set.roster(), config)?;
    let rows: Vec<Vec<String>> = (0..pooled.skills.len())
        .map(|i| {
            vec![
                pooled.skills[i].clone(),
                num(pooled.ratings[i]),
                pooled.comparisons[i].to_string(),
            ]
        })
        .collect();
    run.csv("ratings.csv", &["skill_id", "rating", "n_comparisons"], &rows)?;
    let models = set.models();
    let tables = models
        .iter()
        .map(|m| elo_run(sym.outcomes.iter().filter(|o| &o.model_id == m), set.roster(), config))
        .collect::<edutrap::Result<Vec<_>>>()?;
    let mut header = vec!["skill_id"];
    header.extend(models.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = (0..set.roster().len())
        .map(|i| {
            let mut r = vec![set.roster()[i].clone()];
            r.extend(tables.iter().map(|t| num(t.ratings[i])));
            r
        })
        .collect();
    run.csv("scores_matrix.csv", &header, &rows)?;
    run.json(
        "elo.json",
        &json!({
            "config": config,
            "records": set.records().len(),
            "comparisons": sym.outcomes.len(),
            "single_order_pairs": sym.single_order,
            "draws_from_disagreement": sym.draws_from_disagreement,
            "models": models,
            "total_rating": pooled.total(),
        }),
    )?;
    println!(
        "elo: {} skills, {} comparisons ({} single-order, {} disagreement draws), total rating {}",
        set.roster().len(),
        sym.outcomes.len(),
        sym.single_order,
        sym.draws_from_disagreement,
        num(pooled.total())
    );
    Ok(0)
}

/// Header, row ids, and the numeric cells of an `id, numbers...` table.
type Table = (Vec<String>, Vec<String>, Vec<Vec<f64>>);

fn read_table(input: &Path) -> Result<Table> {
    let text = read_input(input)?;
    let mut rdr = csv_reader(&text);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| refuse_csv(input, e))?
        .iter()
        .map(String::from)
        .collect();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| refuse_csv(input, e))?;
        ids.push(rec[0].to_string());
        let vals = rec
            .iter()
            .skip(1)
            .map(|f| f.parse::<f64>().map_err(|e| refuse_csv(input, format!("`{f}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(vals);
    }
    Ok((header, ids, rows))
}

pub fn index_pca(run: &mut Run, input: &Path) -> Result<u8> {
    let (header, ids, rows) = read_table(input)?;
    run.input(input);
    let r = pca_first_component(&rows)?;
    let out: Vec<Vec<String>> = ids
        .iter()
        .zip(&r.scores)
        .map(|(id, s)| vec![id.clone(), num(*s)])
        .collect();
    run.csv("index.csv", &["skill_id", "pc1"], &out)?;
    let loadings: HashMap<&str, f64> = header
        .iter()
        .skip(1)
        .map(String::as_str)
        .zip(r.loadings.iter().copied())
        .collect();
    let mut loadings: Vec<(&str, f64)> = loadings.into_iter().collect();
    loadings.sort_by(|a, b| a.0.cmp(b.0));
    run.json(
        "pca.json",
        &json!({ "eigenvalue": r.eigenvalue, "explained": r.explained, "loadings": loadings }),
    )?;
    println!(
        "pca: {} skills x {} models, PC1 explains {}",
        ids.len(),
        header.len() - 1,
        num(r.explained)
    );
    Ok(0)
}

pub struct TauArgs {
    pub bootstrap: Option<usize>,
    pub method: BootstrapMethod,
    pub seed: u64,
}

pub fn index_tau(run: &mut Run, input: &Path, a: TauArgs) -> Result<u8> {
    let (_, _, rows) = read_table(input)?;
    run.input(input);
    if rows.iter().any(|r| r.len() < 2) {
        return Err(Refusal(format!("{}: need two numeric columns after the id", input.display())).into());
    }
    let x: Vec<f64> = rows.iter().map(|r| r[r.len() - 2]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r[r.len() - 1]).collect();
    let stats = match a.bootstrap {
        Some(b) => {
            run.seed(a.seed);
            let ci = bootstrap_ci(&x, &y, b, a.method, a.seed, Execution::available())?;
            json!({ "tau": ci.tau, "ci_lo": ci.ci_lo, "ci_hi": ci.ci_hi, "method": ci.method, "B": b, "seed": a.seed })
        }
        None => {
            json!({ "tau": kendall_tau_b(&x, &y)?, "ci_lo": null, "ci_hi": null, "method": null, "B": null, "seed": null })
        }
    };
    run.json("stats.json", &stats)?;
    let stats = to_json(&stats)?;
    println!("tau_b = {} [{}, {}]", stats["tau"], stats["ci_lo"], stats["ci_hi"]);
    Ok(0)
}
