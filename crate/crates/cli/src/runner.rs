//! Validates an [`ExperimentConfig`], runs it and collects the artifacts.
//!
//! Nothing is written here: [`run`] returns file names and contents, and
//! [`RunOutput::write_to`] places them in exactly one directory.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use harnack_core::conductance::{dumbbell_ratio, DEFAULT_PAIR_CAP};
use harnack_core::coupling::{
    osc_failure_exact, osc_failure_experiment, uc_estimate, EXACT_MAX_RADIUS, OSC_MIN_TRIALS, UC_MIN_TRIALS,
};
use harnack_core::harnack::{
    annulus_ratio, chain_length, ehi_constant, hg_constant, oi_outer_radius, oi_rho, theorem1_check,
};
use harnack_core::io::graph_to_tsv;
use harnack_core::{Error, Result, WeightedGraph};
use serde_json::{json, Map, Value};

use crate::config::{DomainSpec, ExperimentConfig, Operation};
use crate::report::{envelope, exit_code, to_json_text, EXIT_OK};
use crate::source::{GraphSource, LoadedGraph};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "HARNACK_OUT_DIR";

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_UC_TRIALS: u64 = 10_000;
pub const DEFAULT_OSC_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    /// Parsed reports, in the order they were produced.
    pub reports: Vec<Value>,
    pub exit_code: i32,
}

impl RunOutput {
    /// Writes every artifact into `dir` (created if missing) and nowhere else.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.artifacts.len());
        for a in &self.artifacts {
            debug_assert!(!a.file_name.contains(['/', '\\']) && !a.file_name.starts_with('.'));
            let path = dir.join(&a.file_name);
            fs::write(&path, &a.contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `HARNACK_OUT_DIR` when set and nonempty, else the configured directory.
pub fn output_dir(cfg: &ExperimentConfig) -> Option<PathBuf> {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => cfg.output.dir.clone(),
    }
}

struct Plan {
    op: Operation,
    source: Option<GraphSource>,
    loaded: Option<LoadedGraph>,
    x0: usize,
    radii: Vec<u32>,
    k: Option<f64>,
    domain: Option<DomainSpec>,
    eps: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
    cap: Option<usize>,
    exact: bool,
    csv: bool,
}

fn pre(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn reject_unused(cfg: &ExperimentConfig) -> Result<()> {
    use Operation::*;
    let op = cfg.operation;
    let given = [
        ("graph", cfg.graph.is_some(), op != Couple && op != OscFail),
        ("center", cfg.center.is_some(), !matches!(op, Gen | Couple | OscFail)),
        ("R", !cfg.radii.is_empty(), op != Gen),
        ("K", cfg.k.is_some(), matches!(op, Oi | Couple | OscFail)),
        ("D", cfg.domain.is_some(), matches!(op, Hg | Annulus)),
        ("eps", cfg.eps.is_some(), op == Couple),
        ("trials", cfg.trials.is_some(), matches!(op, Couple | OscFail)),
        ("seed", cfg.seed.is_some(), matches!(op, Couple | OscFail)),
        ("cap", cfg.cap.is_some(), op == Db),
        ("exact", cfg.exact, op == OscFail),
        ("output.csv", cfg.output.csv, op == Db),
    ];
    for (name, present, used) in given {
        if present && !used {
            return Err(pre(format!("`{name}` is not a parameter of `{op}`")));
        }
    }
    Ok(())
}

/// Farthest distance from x₀ at which the operation imposes harmonicity;
/// the second component says whether the truncation may sit exactly there.
fn reach(plan: &Plan, r: u32) -> (u32, bool) {
    match plan.op {
        Operation::Ehi => (2 * r, false),
        Operation::Hg | Operation::Annulus => (plan.domain.unwrap().multiple() * r, false),
        Operation::Oi => (oi_outer_radius(r, plan.k.unwrap()), false),
        Operation::Thm1 => ((r + 1).max(2 * 3u32.pow(chain_length(r))), false),
        Operation::Db => (r, true),
        _ => (0, true),
    }
}

fn check_radius(plan: &Plan, g: &WeightedGraph, r: u32) -> Result<()> {
    let min = match plan.op {
        Operation::Ehi => 0,
        Operation::Db => 10,
        _ => 1,
    };
    if r < min {
        return Err(pre(format!("{} needs R >= {min}, got {r}", plan.op)));
    }
    let (reach, inclusive) = reach(plan, r);
    let margin = g.halo_margin(plan.x0);
    if reach > margin || (reach == margin && !inclusive) {
        let limit = if inclusive { margin } else { margin.saturating_sub(1) };
        return Err(Error::Clipped(format!(
            "{} at R = {r} uses B({}, {reach}) but the margin from the centre is {margin}; that ball must have radius at most {limit}",
            plan.op,
            g.label(plan.x0)
        )));
    }
    Ok(())
}

fn check_simulation(plan: &Plan, r: u32) -> Result<()> {
    if r < 1 {
        return Err(pre("R must be at least 1"));
    }
    let k = plan.k.unwrap();
    let trials = plan.trials.unwrap();
    if plan.op == Operation::Couple {
        let eps = plan.eps.unwrap();
        if !(k > 4.0) {
            return Err(pre(format!("K = {k} must exceed 4")));
        }
        if !(eps > 0.0 && eps < (k - 4.0) / 8.0) {
            return Err(pre(format!("eps = {eps} must lie in (0, (K-4)/8) = (0, {})", (k - 4.0) / 8.0)));
        }
        if trials < UC_MIN_TRIALS {
            return Err(pre(format!("trials = {trials} is below {UC_MIN_TRIALS}")));
        }
    } else {
        if !(k > 1.0 && k < 3.0) {
            return Err(pre(format!("K = {k} must lie in (1, 3)")));
        }
        let dr = (3.0 - k) / 3.0 * r as f64;
        if (dr - dr.round()).abs() > 1e-9 {
            return Err(pre(format!("δR = {dr} must be an integer (for K = 2 take R a multiple of 3)")));
        }
        if trials < OSC_MIN_TRIALS {
            return Err(pre(format!("trials = {trials} is below {OSC_MIN_TRIALS}")));
        }
        if plan.exact && r > EXACT_MAX_RADIUS {
            return Err(pre(format!("exact mode supports R <= {EXACT_MAX_RADIUS}, got {r}")));
        }
    }
    Ok(())
}

/// Every check that can be made without running the computation.
fn validate(cfg: &ExperimentConfig) -> Result<Plan> {
    use Operation::*;
    reject_unused(cfg)?;
    let op = cfg.operation;
    let source = match (&cfg.graph, op.is_simulation()) {
        (Some(s), false) => Some(s.parse::<GraphSource>()?),
        (None, false) => return Err(pre(format!("`{op}` needs a graph"))),
        (_, true) => None,
    };
    if op != Gen && cfg.radii.is_empty() {
        return Err(pre(format!("`{op}` needs at least one R")));
    }
    let distinct: BTreeSet<u32> = cfg.radii.iter().copied().collect();
    if distinct.len() != cfg.radii.len() {
        return Err(pre("R list contains duplicates"));
    }
    let mut plan = Plan {
        op,
        source,
        loaded: None,
        x0: 0,
        radii: cfg.radii.clone(),
        k: cfg.k.or(match op {
            Oi | OscFail => Some(2.0),
            Couple => Some(5.0),
            _ => None,
        }),
        domain: cfg.domain.or(matches!(op, Hg | Annulus).then_some(DomainSpec::TwoR)),
        eps: cfg.eps.or((op == Couple).then_some(DEFAULT_EPS)),
        trials: cfg.trials.or(match op {
            Couple => Some(DEFAULT_UC_TRIALS),
            OscFail => Some(DEFAULT_OSC_TRIALS),
            _ => None,
        }),
        seed: cfg.seed.or(op.is_simulation().then_some(DEFAULT_SEED)),
        cap: cfg.cap.or((op == Db).then_some(DEFAULT_PAIR_CAP)),
        exact: cfg.exact,
        csv: cfg.output.csv,
    };
    if let Some(k) = plan.k {
        if !k.is_finite() {
            return Err(pre(format!("K = {k} is not finite")));
        }
        if op == Oi && !(k > 1.0) {
            return Err(pre(format!("K = {k} must exceed 1")));
        }
    }
    if plan.cap == Some(0) {
        return Err(pre("pair cap must be positive"));
    }
    if op.is_simulation() {
        for &r in &plan.radii {
            check_simulation(&plan, r)?;
        }
        return Ok(plan);
    }
    let loaded = plan.source.as_ref().unwrap().load()?;
    if op != Gen {
        let label = cfg
            .center
            .clone()
            .or_else(|| loaded.default_center.clone())
            .ok_or_else(|| pre("a graph read from a file needs an explicit center"))?;
        plan.x0 = loaded.graph.vertex(&label)?;
        for &r in &plan.radii {
            check_radius(&plan, &loaded.graph, r)?;
        }
    }
    plan.loaded = Some(loaded);
    Ok(plan)
}

fn stem(plan: &Plan, r: u32) -> String {
    let mut s = format!("{}-R{r}", plan.op);
    if let Some(d) = plan.domain {
        s.push_str(&format!("-D{d}"));
    }
    if let Some(k) = plan.k {
        s.push_str(&format!("-K{k}"));
    }
    s
}

fn params(plan: &Plan, r: Option<u32>) -> Value {
    let mut m = Map::new();
    if let Some(src) = &plan.source {
        m.insert("graph".into(), json!(src.to_string()));
    }
    if let Some(r) = r {
        if let Some(l) = &plan.loaded {
            m.insert("center".into(), json!(l.graph.label(plan.x0)));
        }
        m.insert("R".into(), json!(r));
    }
    let opt = [
        ("K", plan.k.map(|v| json!(v))),
        ("D", plan.domain.map(|d| json!(d.to_string()))),
        ("eps", plan.eps.map(|v| json!(v))),
        ("trials", plan.trials.map(|v| json!(v))),
        ("seed", plan.seed.map(|v| json!(v))),
        ("cap", plan.cap.map(|v| json!(v))),
    ];
    for (k, v) in opt {
        if let Some(v) = v {
            m.insert(k.into(), v);
        }
    }
    if plan.op == Operation::OscFail {
        m.insert("exact".into(), json!(plan.exact));
    }
    Value::Object(m)
}

fn compute(plan: &Plan, r: u32) -> Result<(Value, Option<String>)> {
    let graph = plan.loaded.as_ref().map(|l| &l.graph);
    let domain = |g: &WeightedGraph| {
        let m = plan.domain.unwrap().multiple();
        g.ball(plan.x0, m * r).map(|d| (d, json!({"spec": plan.domain.unwrap().to_string(), "radius": m * r})))
    };
    let out = match plan.op {
        Operation::Ehi => {
            let g = graph.unwrap();
            ehi_constant(g, plan.x0, r)?.to_json(g)
        }
        Operation::Hg | Operation::Annulus => {
            let g = graph.unwrap();
            let (d, desc) = domain(g)?;
            let rep = if plan.op == Operation::Hg {
                hg_constant(g, plan.x0, r, &d)?
            } else {
                annulus_ratio(g, plan.x0, r, &d)?
            };
            let mut v = rep.to_json(g);
            v["domain"] = desc;
            v
        }
        Operation::Oi => {
            let g = graph.unwrap();
            let k = plan.k.unwrap();
            let mut v = oi_rho(g, plan.x0, r, k)?.to_json(g);
            v["outer_radius"] = json!(oi_outer_radius(r, k));
            v
        }
        Operation::Thm1 => {
            let g = graph.unwrap();
            theorem1_check(g, plan.x0, r)?.to_json(g)
        }
        Operation::Db => {
            let g = graph.unwrap();
            let rep = dumbbell_ratio(g, plan.x0, r, plan.cap.unwrap())?;
            let csv = plan.csv.then(|| rep.to_csv(g));
            return Ok((rep.to_json(g), csv));
        }
        Operation::Couple => {
            uc_estimate(r, plan.k.unwrap(), plan.eps.unwrap(), plan.trials.unwrap(), plan.seed.unwrap())?.to_json()
        }
        Operation::OscFail => {
            let k = plan.k.unwrap();
            let mut v = osc_failure_experiment(r, k, plan.trials.unwrap(), plan.seed.unwrap())?.to_json();
            if plan.exact {
                let (h1, h2) = osc_failure_exact(r, k)?;
                v["exact"] = json!({"h_y1": h1, "h_y2": h2});
            }
            v
        }
        Operation::Gen => unreachable!("gen has no radius"),
    };
    Ok((out, None))
}

fn generate(plan: &Plan) -> (Vec<Artifact>, Value) {
    let src = plan.source.as_ref().unwrap();
    let loaded = plan.loaded.as_ref().unwrap();
    let slug = src.slug();
    let start = Instant::now();
    let mut artifacts = Vec::new();
    let outcome = graph_to_tsv(&loaded.graph).map(|tsv| {
        let g = &loaded.graph;
        let (tsv_name, side_name) = (format!("{slug}.tsv"), format!("{slug}.labels.json"));
        artifacts.push(Artifact { file_name: tsv_name.clone(), contents: tsv });
        artifacts.push(Artifact { file_name: side_name.clone(), contents: to_json_text(&loaded.sidecar) });
        json!({
            "vertices": g.len(),
            "edges": g.edge_count(),
            "halo_vertices": g.halo_vertices().count(),
            "p0": g.controlled_weights_p0(),
            "files": {"graph": tsv_name, "labels": side_name},
        })
    });
    let report = envelope("gen", params(plan, None), &outcome, start.elapsed().as_secs_f64());
    artifacts.push(Artifact { file_name: format!("gen-{slug}.json"), contents: to_json_text(&report) });
    (artifacts, report)
}

/// Runs every entry of the sweep; failures become error reports.
pub fn run(cfg: &ExperimentConfig) -> RunOutput {
    let start = Instant::now();
    let plan = match validate(cfg) {
        Ok(p) => p,
        Err(e) => {
            let echo = serde_json::to_value(cfg).expect("config serializes");
            let report = envelope(cfg.operation.name(), echo, &Err(e.clone()), start.elapsed().as_secs_f64());
            return RunOutput {
                artifacts: vec![Artifact {
                    file_name: format!("{}-error.json", cfg.operation),
                    contents: to_json_text(&report),
                }],
                reports: vec![report],
                exit_code: exit_code(&e),
            };
        }
    };
    if plan.op == Operation::Gen {
        let (artifacts, report) = generate(&plan);
        let code = report["error"]["exit_code"].as_i64().unwrap_or(0) as i32;
        return RunOutput { artifacts, reports: vec![report], exit_code: code };
    }
    let mut out = RunOutput { artifacts: Vec::new(), reports: Vec::new(), exit_code: EXIT_OK };
    for &r in &plan.radii {
        let t = Instant::now();
        let result = compute(&plan, r);
        let seconds = t.elapsed().as_secs_f64();
        let stem = stem(&plan, r);
        let (outcome, csv) = match result {
            Ok((v, csv)) => (Ok(v), csv),
            Err(e) => (Err(e), None),
        };
        if let Err(e) = &outcome {
            if out.exit_code == EXIT_OK {
                out.exit_code = exit_code(e);
            }
        }
        let report = envelope(plan.op.name(), params(&plan, Some(r)), &outcome, seconds);
        out.artifacts.push(Artifact { file_name: format!("{stem}.json"), contents: to_json_text(&report) });
        if let Some(csv) = csv {
            out.artifacts.push(Artifact { file_name: format!("{stem}.csv"), contents: csv });
        }
        out.reports.push(report);
    }
    out
}
