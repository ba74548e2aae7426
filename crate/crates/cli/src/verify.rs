//! The acceptance suite: every criterion computed from scratch, reported as
//! data. Failures never panic; an internal error fails its criterion and is
//! recorded in `measured.error`.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use harnack_core::conductance::{dumbbell_ratio, effective_conductance, DEFAULT_PAIR_CAP};
use harnack_core::coupling::{osc_failure_exact, osc_failure_experiment, stream_rng, uc_estimate};
use harnack_core::generators::{lattice_box, perturb_weights, three_rail};
use harnack_core::harnack::{
    annulus_ratio, ehi_constant, hg_constant, oi_outer_radius, oi_rho, oi_rho_exhaustive, theorem1_check,
};
use harnack_core::potential::{green_column, green_series_oracle, is_harmonic, DirichletSolver, GreenColumn};
use harnack_core::{build_graph, GraphBuilder, Result, VertexSet, WeightedGraph};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::{version, EXIT_OK, EXIT_VERIFY_FAILED};

/// Regression baselines for the plane EHI constants C₁(0, R), R = 4, 8, 16.
pub const EHI_PLANE_BASELINE: [(u32, f64); 3] =
    [(4, 14.342891948664816), (8, 16.99947707816438), (16, 18.876355069651886)];

/// Every threshold the suite compares against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub path_ehi: f64,
    pub green_symmetry: f64,
    pub green_harmonic: f64,
    pub green_series: f64,
    pub oi_exact: f64,
    pub ehi_floor: f64,
    pub baseline_rel: f64,
    pub three_rail_p0: f64,
    pub ehi_factor: f64,
    pub osc_se: f64,
    pub osc_gap: f64,
    pub uc_ratio: f64,
    pub conductance_exact: f64,
    pub perturb_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            path_ehi: 1e-9,
            green_symmetry: 1e-9,
            green_harmonic: 1e-9,
            green_series: 1e-6,
            oi_exact: 1e-12,
            ehi_floor: 2.55,
            baseline_rel: 1e-9,
            three_rail_p0: 2f64.powi(-50),
            ehi_factor: 10.0,
            osc_se: 3.0,
            osc_gap: 0.5,
            uc_ratio: 0.5,
            conductance_exact: 1e-12,
            perturb_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Criteria to run (all when `None`).
    pub only: Option<BTreeSet<u8>>,
    /// Thread count for the determinism rerun; by default one that differs
    /// from the current pool.
    pub rerun_threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 42, tolerances: Tolerances::default(), only: None, rerun_threads: None }
    }
}

impl VerifyOptions {
    fn wants(&self, id: u8) -> bool {
        self.only.as_ref().is_none_or(|s| s.contains(&id))
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "path EHI closed form"),
    (2, "Green's function contracts"),
    (3, "OI oracle equivalence"),
    (4, "ball-growth hitting bounds"),
    (5, "plane EHI floor"),
    (6, "annulus ratio vs HG"),
    (7, "oscillation failure for K < 3"),
    (8, "uniform coupling across scales"),
    (9, "conductance laws"),
    (10, "determinism"),
];

/// Wall-clock budget per criterion, in seconds.
pub fn runtime_limit(id: u8) -> Option<f64> {
    match id {
        1 => Some(5.0),
        2 => Some(30.0),
        3 => Some(60.0),
        4 => Some(120.0),
        7 => Some(600.0),
        8 => Some(900.0),
        9 => Some(60.0),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub measured: Value,
    pub tolerance: Value,
}

#[derive(Debug, Clone)]
pub struct VerifySummary {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    /// Seconds per criterion id; not part of the deterministic summary.
    pub timings: Vec<(u8, f64)>,
    pub threads: Vec<usize>,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        }
    }

    pub fn get(&self, id: u8) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn seconds(&self, id: u8) -> Option<f64> {
        self.timings.iter().find(|t| t.0 == id).map(|t| t.1)
    }

    /// Deterministic summary: identical bytes for identical seed and options.
    pub fn to_json(&self) -> Value {
        json!({
            "version": version(),
            "seed": self.seed,
            "all_pass": self.all_pass(),
            "criteria": self.criteria,
        })
    }

    pub fn timings_json(&self) -> Value {
        let per: serde_json::Map<String, Value> =
            self.timings.iter().map(|(id, s)| (id.to_string(), json!(s))).collect();
        json!({"seconds": per, "threads": self.threads})
    }

    /// One line per criterion: `criterion N: PASS|FAIL name (time)`.
    pub fn lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| {
                let t = self.seconds(c.id).map_or(String::new(), |s| {
                    let limit = runtime_limit(c.id).map_or(String::new(), |l| format!(" / limit {l:.0} s"));
                    format!(" [{s:.1} s{limit}]")
                });
                format!("criterion {:>2}: {} {}{t}", c.id, if c.pass { "PASS" } else { "FAIL" }, c.name)
            })
            .collect()
    }
}

struct Ctx<'a> {
    seed: u64,
    tol: &'a Tolerances,
}

// verifier streams live apart from the library's tags
fn rng(ctx: &Ctx, id: u8, k: u64) -> impl Rng {
    stream_rng(ctx.seed, (0x100 + id as u64) << 48 | k)
}

fn finite_max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn path(n: usize) -> Result<WeightedGraph> {
    let labels: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    build_graph((0..n).map(|i| (labels[i].as_str(), labels[i + 1].as_str(), 1.0)))
}

fn c1_path_ehi(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let g = lattice_box(1, 200)?;
    let o = g.vertex("0")?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for r in [1u32, 2, 4, 8, 16, 32] {
        let closed = (3.0 * r as f64 + 1.0) / (r as f64 + 1.0);
        let computed = ehi_constant(&g, o, r)?.constant;
        // brute force over both boundary columns of B(0, 2R)
        let outer = g.ball(o, 2 * r)?;
        let inner = g.ball(o, r)?;
        let solver = DirichletSolver::new(&g, &outer)?;
        let mut brute: f64 = 0.0;
        for &z in solver.boundary() {
            let col = solver.exit_column(z)?;
            for &u in &inner {
                for &v in &inner {
                    let (a, b) = (col[outer.position(u).unwrap()], col[outer.position(v).unwrap()]);
                    brute = brute.max(a / b);
                }
            }
        }
        let err = (computed - closed).abs().max((brute - closed).abs());
        worst = worst.max(err);
        rows.push(json!({"R": r, "closed_form": closed, "computed": computed, "brute_force": brute}));
    }
    let pass = worst <= ctx.tol.path_ehi;
    Ok((pass, json!({"radii": rows, "max_abs_error": worst}), json!({"max_abs_error": ctx.tol.path_ehi})))
}

fn c2_green(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let g = lattice_box(2, 10)?;
    let o = g.vertex("0,0")?;
    let d = g.ball(o, 8)?;
    let solver = DirichletSolver::new(&g, &d)?;
    let mut cols: HashMap<usize, GreenColumn> = HashMap::new();
    let mut r = rng(ctx, 2, 0);
    let members = d.as_slice();
    let mut sym: f64 = 0.0;
    for _ in 0..200 {
        let x = members[r.random_range(0..members.len())];
        let y = members[r.random_range(0..members.len())];
        for v in [x, y] {
            if let std::collections::hash_map::Entry::Vacant(e) = cols.entry(v) {
                e.insert(solver.green(v)?);
            }
        }
        sym = sym.max((cols[&x].get(y) - cols[&y].get(x)).abs());
    }
    let col = solver.green(o)?;
    let off = d.difference(&VertexSet::singleton(o));
    let harm = is_harmonic(&g, &col.to_field(&g), &off, ctx.tol.green_harmonic)?.max_residual;

    let square = VertexSet::new(
        g.labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| l.split(',').all(|c| c.parse::<i64>().is_ok_and(|c| c.abs() <= 4)))
            .map(|(v, _)| v),
    );
    let exact = green_column(&g, &square, o)?;
    let series = green_series_oracle(&g, &square, o, 10_000)?;
    let series_err = finite_max(series.iter().map(|(v, s)| (exact.get(v) - s).abs()));

    let t = ctx.tol;
    let pass = sym <= t.green_symmetry && harm <= t.green_harmonic && series_err <= t.green_series;
    Ok((
        pass,
        json!({"symmetry_max_error": sym, "pairs": 200, "harmonic_max_residual": harm,
               "series_max_error": series_err, "series_domain_size": square.len(), "series_terms": 10_000}),
        json!({"symmetry": t.green_symmetry, "harmonic": t.green_harmonic, "series": t.green_series}),
    ))
}

// connected graph on ≤ 40 vertices: random tree plus a few chords, random weights
fn random_graph(r: &mut impl Rng) -> Result<WeightedGraph> {
    let n = r.random_range(6..=40usize);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.vertex(&format!("v{i}"));
    }
    let mut seen = BTreeSet::new();
    for i in 1..n {
        let p = r.random_range(0..i);
        seen.insert((p, i));
        b.edge_idx(p, i, r.random_range(0.25..4.0))?;
    }
    for _ in 0..r.random_range(0..=n / 2) {
        let (u, v) = (r.random_range(0..n), r.random_range(0..n));
        if u != v && seen.insert((u.min(v), u.max(v))) {
            b.edge_idx(u, v, r.random_range(0.25..4.0))?;
        }
    }
    b.build()
}

fn c3_oi_oracle(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let mut r = rng(ctx, 3, 0);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut attempts = 0;
    while rows.len() < 25 && attempts < 100_000 {
        attempts += 1;
        let g = random_graph(&mut r)?;
        let x0 = r.random_range(0..g.len());
        let radius = r.random_range(1..=2u32);
        let k = [1.5, 2.0, 2.5, 3.0][r.random_range(0..4)];
        let outer = g.ball(x0, oi_outer_radius(radius, k))?;
        let bd = g.exterior_boundary(&outer).len();
        if !(2..=12).contains(&bd) || g.ball(x0, radius)?.len() < 2 {
            continue;
        }
        let rho = oi_rho(&g, x0, radius, k)?.constant;
        let brute = oi_rho_exhaustive(&g, x0, radius, k)?;
        worst = worst.max((rho - brute).abs());
        rows.push(json!({"vertices": g.len(), "R": radius, "K": k, "boundary": bd, "rho": rho, "exhaustive": brute}));
    }
    let pass = rows.len() == 25 && worst <= ctx.tol.oi_exact;
    Ok((
        pass,
        json!({"graphs": rows.len(), "attempts": attempts, "max_abs_error": worst, "cases": rows}),
        json!({"max_abs_error": ctx.tol.oi_exact}),
    ))
}

fn c4_ball_growth(_ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let g = lattice_box(2, 40)?;
    let o = g.vertex("0,0")?;
    let mut pass = true;
    let mut rows = Vec::new();
    for r in [3u32, 9] {
        let rep = theorem1_check(&g, o, r)?;
        pass &= rep.all_pass && rep.counting_pass;
        let worst = rep.boundary.iter().map(|b| b.hitting / b.bound).fold(f64::INFINITY, f64::min);
        rows.push(json!({"R": r, "N": rep.chain_length, "C1": rep.c1, "p0": rep.p0, "theta": rep.theta,
                         "boundary_size": rep.boundary.len(), "all_hitting_bounds_hold": rep.all_pass,
                         "worst_hitting_over_bound": worst, "counting_bound": rep.counting_bound}));
    }
    Ok((pass, json!({"radii": rows}), json!({"hitting_over_bound_min": 1.0, "counting_bound_max": 1.0})))
}

fn c5_plane_floor(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let g = lattice_box(2, 40)?;
    let o = g.vertex("0,0")?;
    let mut pass = true;
    let mut rows = Vec::new();
    for (r, base) in EHI_PLANE_BASELINE {
        let c = ehi_constant(&g, o, r)?.constant;
        let drift = (c - base).abs() / base;
        pass &= c >= ctx.tol.ehi_floor && drift <= ctx.tol.baseline_rel;
        rows.push(json!({"R": r, "C1": c, "baseline": base, "relative_drift": drift}));
    }
    Ok((pass, json!({"radii": rows}), json!({"floor": ctx.tol.ehi_floor, "baseline_rel": ctx.tol.baseline_rel})))
}

fn c6_annulus_vs_hg(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let lattice = lattice_box(2, 24)?;
    let rail = three_rail(60)?;
    let mut pass = true;
    let mut rows = Vec::new();
    let mut ehi = [Vec::new(), Vec::new()];
    for (gi, (name, g)) in [("lattice:2:24", &lattice), ("three-rail:60", &rail)].into_iter().enumerate() {
        let x0 = g.vertex("0,0")?;
        let margin = g.halo_margin(x0);
        for r in [4u32, 8] {
            ehi[gi].push(ehi_constant(g, x0, r)?.constant);
            for m in [2u32, 4] {
                if m * r >= margin {
                    continue;
                }
                let d = g.ball(x0, m * r)?;
                let ann = annulus_ratio(g, x0, r, &d)?.constant;
                let hg = hg_constant(g, x0, r, &d)?.constant;
                let ok = ann.is_finite() && hg.is_finite() && ann <= hg;
                pass &= ok;
                rows.push(json!({"graph": name, "R": r, "D": format!("{m}R"), "annulus": ann, "hg": hg, "holds": ok}));
            }
        }
    }
    let p0 = rail.controlled_weights_p0();
    let ehi_ok = ehi[1].iter().zip(&ehi[0]).all(|(t, l)| *t <= ctx.tol.ehi_factor * l);
    pass &= p0 <= ctx.tol.three_rail_p0 && ehi_ok;
    Ok((
        pass,
        json!({"comparisons": rows, "three_rail_p0": p0,
               "ehi": {"R": [4, 8], "lattice": ehi[0], "three_rail": ehi[1]}, "ehi_within_factor": ehi_ok}),
        json!({"three_rail_p0_max": ctx.tol.three_rail_p0, "ehi_factor": ctx.tol.ehi_factor}),
    ))
}

fn c7_osc_failure(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let t = ctx.tol;
    let trials = 100_000;
    let mut pass = true;
    let mut rows = Vec::new();
    let mut at3 = None;
    for r in [3u32, 6, 9] {
        let rep = osc_failure_experiment(r, 2.0, trials, ctx.seed)?;
        let within = rep.h_y1.estimate <= rep.bound_y1 + t.osc_se * rep.h_y1.std_error;
        pass &= within;
        if r == 9 {
            pass &= rep.osc_lower >= t.osc_gap;
        }
        if r == 3 {
            at3 = Some((rep.h_y1.estimate, rep.h_y2.estimate));
        }
        rows.push(json!({"R": r, "h_y1": rep.h_y1.estimate, "se_y1": rep.h_y1.std_error, "bound_y1": rep.bound_y1,
                         "h_y2": rep.h_y2.estimate, "gap": rep.osc_lower, "y1_within_bound": within,
                         "cap_hits": [rep.cap_hits.0, rep.cap_hits.1]}));
    }
    // standard error of the estimator at the exact value
    let (e1, e2) = osc_failure_exact(3, 2.0)?;
    let (m1, m2) = at3.unwrap();
    let se = |p: f64| (p * (1.0 - p) / trials as f64).sqrt();
    let exact_ok = (m1 - e1).abs() <= t.osc_se * se(e1) && (m2 - e2).abs() <= t.osc_se * se(e2);
    pass &= exact_ok;
    Ok((
        pass,
        json!({"K": 2.0, "trials": trials, "radii": rows,
               "exact_R3": {"h_y1": e1, "h_y2": e2, "mc_h_y1": m1, "mc_h_y2": m2, "agree": exact_ok}}),
        json!({"se_multiple": t.osc_se, "gap_at_R9": t.osc_gap}),
    ))
}

fn c8_coupling(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let mut rows = Vec::new();
    let mut lowers = Vec::new();
    for r in [4u32, 8, 16] {
        let rep = uc_estimate(r, 5.0, 0.1, 10_000, ctx.seed)?;
        let p1 = rep.p1();
        lowers.push(p1.interval.0);
        rows.push(json!({"R": r, "p1": p1.estimate, "interval": [p1.interval.0, p1.interval.1],
                         "worst_pair": [rep.pairs[rep.worst].y1.label(), rep.pairs[rep.worst].y2.label()],
                         "cap_hits": rep.cap_hits()}));
    }
    let excludes_zero = lowers.iter().all(|&l| l > 0.0);
    let min = lowers.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = min / lowers[0];
    let pass = excludes_zero && ratio >= ctx.tol.uc_ratio;
    Ok((
        pass,
        json!({"K": 5.0, "eps": 0.1, "trials": 10_000, "radii": rows, "all_intervals_exclude_zero": excludes_zero,
               "min_lower_over_R4_lower": ratio}),
        json!({"min_lower_ratio": ctx.tol.uc_ratio}),
    ))
}

fn c9_conductance(ctx: &Ctx) -> Result<(bool, Value, Value)> {
    let t = ctx.tol;
    let mut series_err: f64 = 0.0;
    for n in 1..=12usize {
        let g = path(n)?;
        let all = VertexSet::new(0..g.len());
        let (a, b) = (VertexSet::singleton(g.vertex("0")?), VertexSet::singleton(g.vertex(&n.to_string())?));
        series_err = series_err.max((effective_conductance(&g, &all, &a, &b)?.value - 2.0 / n as f64).abs());
    }

    let mut parallel_err: f64 = 0.0;
    for (k, n) in [(2usize, 3usize), (3, 5), (4, 2)] {
        let mut bld = GraphBuilder::new();
        let (a, z) = (bld.vertex("a"), bld.vertex("b"));
        for i in 0..k {
            let mut prev = a;
            for j in 1..n {
                let v = bld.vertex(&format!("p{i}_{j}"));
                bld.edge_idx(prev, v, 1.0)?;
                prev = v;
            }
            bld.edge_idx(prev, z, 1.0)?;
        }
        let g = bld.build()?;
        let all = VertexSet::new(0..g.len());
        let c = effective_conductance(&g, &all, &VertexSet::singleton(a), &VertexSet::singleton(z))?.value;
        parallel_err = parallel_err.max((c - 2.0 * k as f64 / n as f64).abs());
    }

    let g = lattice_box(2, 8)?;
    let d = g.ball(g.vertex("0,0")?, 5)?;
    let a = g.ball(g.vertex("-2,0")?, 1)?;
    let b = g.ball(g.vertex("2,1")?, 1)?;
    let base = effective_conductance(&g, &d, &a, &b)?.value;
    let inside: Vec<(usize, usize)> =
        g.edges().filter(|&(u, v, _)| d.contains(u) && d.contains(v)).map(|(u, v, _)| (u, v)).collect();
    let mut r = rng(ctx, 9, 0);
    let mut rayleigh_violations = 0;
    let mut worst_drop: f64 = 0.0;
    for _ in 0..50 {
        let (eu, ev) = inside[r.random_range(0..inside.len())];
        let factor = 1.0 + 4.0 * r.random::<f64>();
        let h = g.map_weights(|u, v, _| if (u, v) == (eu, ev) { factor } else { 1.0 })?;
        let c = effective_conductance(&h, &d, &a, &b)?.value;
        worst_drop = worst_drop.max(base - c);
        if c < base - t.conductance_exact * base {
            rayleigh_violations += 1;
        }
    }

    let plane = lattice_box(2, 20)?;
    let o = plane.vertex("0,0")?;
    let seed = ctx.seed;
    let alt = perturb_weights(&plane, 2.0, |u, v| {
        let (lo, hi) = (u.min(v) as u64, u.max(v) as u64);
        let mut e = stream_rng(seed, (0x109 << 48) | lo << 24 | hi);
        2f64.powf(e.random_range(-1.0..=1.0))
    })?;
    let db_base = dumbbell_ratio(&plane, o, 10, DEFAULT_PAIR_CAP)?.ratio;
    let db_pert = dumbbell_ratio(&alt, o, 10, DEFAULT_PAIR_CAP)?.ratio;
    let change = db_pert / db_base;

    let pass = series_err <= t.conductance_exact
        && parallel_err <= t.conductance_exact
        && rayleigh_violations == 0
        && change <= t.perturb_factor;
    Ok((
        pass,
        json!({"series_max_error": series_err, "parallel_max_error": parallel_err,
               "rayleigh": {"increases": 50, "violations": rayleigh_violations, "base": base, "largest_drop": worst_drop},
               "dumbbell": {"base_ratio": db_base, "perturbed_ratio": db_pert, "change": change}}),
        json!({"exact": t.conductance_exact, "perturbed_over_base_max": t.perturb_factor}),
    ))
}

type Check = fn(&Ctx) -> Result<(bool, Value, Value)>;

const CHECKS: [(u8, Check); 9] = [
    (1, c1_path_ehi),
    (2, c2_green),
    (3, c3_oi_oracle),
    (4, c4_ball_growth),
    (5, c5_plane_floor),
    (6, c6_annulus_vs_hg),
    (7, c7_osc_failure),
    (8, c8_coupling),
    (9, c9_conductance),
];

fn name(id: u8) -> String {
    CRITERIA.iter().find(|c| c.0 == id).unwrap().1.to_string()
}

fn run_checks(opts: &VerifyOptions) -> (Vec<CriterionResult>, Vec<(u8, f64)>) {
    let ctx = Ctx { seed: opts.seed, tol: &opts.tolerances };
    let mut results = Vec::new();
    let mut timings = Vec::new();
    for (id, check) in CHECKS {
        if !opts.wants(id) {
            continue;
        }
        let start = Instant::now();
        let (pass, measured, tolerance) = match check(&ctx) {
            Ok(r) => r,
            Err(e) => (false, json!({"error": e.to_string()}), Value::Null),
        };
        timings.push((id, start.elapsed().as_secs_f64()));
        results.push(CriterionResult { id, name: name(id), pass, measured, tolerance });
    }
    (results, timings)
}

/// Runs the selected criteria. Criterion 10 reruns 1–9 in a pool with a
/// different thread count and compares the serialized results byte for byte.
pub fn verify_suite(opts: &VerifyOptions) -> VerifySummary {
    let threads = rayon::current_num_threads();
    let (mut criteria, mut timings) = run_checks(opts);
    let mut used = vec![threads];
    if opts.wants(10) {
        let start = Instant::now();
        let alt = opts.rerun_threads.unwrap_or(if threads > 2 { threads / 2 } else { 3 - threads.min(2) });
        let (pass, measured) = match rayon::ThreadPoolBuilder::new().num_threads(alt).build() {
            Ok(pool) => {
                used.push(alt);
                let (again, _) = pool.install(|| run_checks(opts));
                let first = serde_json::to_string(&criteria).expect("serializable");
                let second = serde_json::to_string(&again).expect("serializable");
                let same = first == second;
                (same, json!({"identical": same, "criteria_compared": criteria.len(), "bytes": first.len()}))
            }
            Err(e) => (false, json!({"error": e.to_string()})),
        };
        timings.push((10, start.elapsed().as_secs_f64()));
        criteria.push(CriterionResult {
            id: 10,
            name: name(10),
            pass,
            measured,
            tolerance: json!({"identical": true}),
        });
    }
    VerifySummary { seed: opts.seed, criteria, timings, threads: used }
}
