use harnack_core::coupling::{jump, stream_rng};
use harnack_core::generators::{lattice_box, three_rail};
use harnack_core::graph::{build_graph, VertexField, VertexSet, WeightedGraph};
use harnack_core::potential::{
    green_column, green_series_oracle, harmonic_extension, harmonic_measure, is_harmonic, DirichletSolver,
};
use proptest::prelude::*;

fn path(n: usize) -> WeightedGraph {
    let labels: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    build_graph((0..n).map(|i| (labels[i].as_str(), labels[i + 1].as_str(), 1.0))).unwrap()
}

fn interior(g: &WeightedGraph, lo: usize, hi: usize) -> VertexSet {
    VertexSet::new((lo..=hi).map(|i| g.vertex(&i.to_string()).unwrap()))
}

#[test]
fn constant_data_extends_to_constant() {
    let g = lattice_box(2, 6).unwrap();
    let a = g.ball(g.vertex("0,0").unwrap(), 3).unwrap();
    let bd = VertexField::constant(g.exterior_boundary(&a), 2.5);
    let h = harmonic_extension(&g, &a, &bd).unwrap();
    assert!(h.values().iter().all(|&v| (v - 2.5).abs() < 1e-12));
}

#[test]
fn gamblers_ruin_on_path() {
    let g = path(10);
    let a = interior(&g, 1, 9);
    let bd = VertexField::from_fn(g.exterior_boundary(&a), |v| if g.label(v) == "10" { 1.0 } else { 0.0 });
    let h = harmonic_extension(&g, &a, &bd).unwrap();
    for x in 0..=10 {
        let v = g.vertex(&x.to_string()).unwrap();
        assert!((h.get(v).unwrap() - x as f64 / 10.0).abs() < 1e-12);
    }
    let mu = harmonic_measure(&g, &a, g.vertex("3").unwrap()).unwrap();
    assert!((mu.prob(g.vertex("10").unwrap()) - 0.3).abs() < 1e-12);
    assert!(harmonic_measure(&g, &a, g.vertex("0").unwrap()).is_err());
}

#[test]
fn indicator_extension_matches_harmonic_measure() {
    let g = lattice_box(2, 6).unwrap();
    let o = g.vertex("0,0").unwrap();
    let a = g.ball(o, 3).unwrap();
    let bd = g.exterior_boundary(&a);
    let z = g.vertex("2,2").unwrap();
    let ind = VertexField::from_fn(bd, |v| (v == z) as u8 as f64);
    let h = harmonic_extension(&g, &a, &ind).unwrap();
    for &x in &a {
        let mu = harmonic_measure(&g, &a, x).unwrap();
        assert!((mu.prob(z) - h.get(x).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn singleton_domain_exits_in_one_step() {
    let g = three_rail(6).unwrap();
    let x = g.vertex("2,1").unwrap();
    let mu = harmonic_measure(&g, &VertexSet::singleton(x), x).unwrap();
    for (y, _) in g.neighbors(x) {
        assert!((mu.prob(y) - g.transition_prob(x, y).unwrap()).abs() < 1e-15);
    }
    let gc = green_column(&g, &VertexSet::singleton(x), x).unwrap();
    assert!((gc.get(x) - 1.0 / g.measure(x)).abs() < 1e-15);
}

#[test]
fn harmonic_measure_agrees_with_monte_carlo() {
    let g = lattice_box(2, 6).unwrap();
    let o = g.vertex("0,0").unwrap();
    let b = g.ball(o, 3).unwrap();
    let mu = harmonic_measure(&g, &b, o).unwrap();
    assert!((mu.total() - 1.0).abs() < 1e-10);
    assert!(mu.probs.iter().all(|&p| p > 0.0));

    let n = 1_000_000u64;
    let mut counts = vec![0u64; mu.boundary.len()];
    let mut rng = stream_rng(1, 0);
    for _ in 0..n {
        let mut x = o;
        while b.contains(x) {
            x = jump(&g, x, &mut rng);
        }
        counts[mu.boundary.position(x).unwrap()] += 1;
    }
    for (k, &p) in mu.probs.iter().enumerate() {
        let est = counts[k] as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((est - p).abs() <= 3.0 * sigma, "z = {}: {est} vs {p}", g.label(mu.boundary.as_slice()[k]));
    }
}

#[test]
fn green_matches_series_on_path() {
    let g = path(10);
    let d = interior(&g, 1, 9);
    let x0 = g.vertex("5").unwrap();
    let gc = green_column(&g, &d, x0).unwrap();
    let series = green_series_oracle(&g, &d, x0, 10_000).unwrap();
    for &y in &d {
        assert!((gc.get(y) - series.get(y).unwrap()).abs() < 1e-6);
    }
    assert_eq!(gc.get(g.vertex("0").unwrap()), 0.0);
    assert!(green_column(&g, &d, g.vertex("0").unwrap()).is_err());
}

#[test]
fn series_oracle_examples() {
    let g = lattice_box(2, 4).unwrap();
    let o = g.vertex("0,0").unwrap();
    let d = g.ball(o, 1).unwrap();
    let s0 = green_series_oracle(&g, &d, o, 0).unwrap();
    for &y in &d {
        let want = if y == o { 1.0 / g.measure(o) } else { 0.0 };
        assert_eq!(s0.get(y).unwrap(), want);
    }
    let gc = green_column(&g, &d, o).unwrap();
    let big = green_series_oracle(&g, &d, o, 5_000).unwrap();
    for &y in &d {
        assert!((gc.get(y) - big.get(y).unwrap()).abs() < 1e-8);
    }
    let d3 = g.ball(o, 2).unwrap();
    let runs: Vec<VertexField> = [10, 100, 1000].iter().map(|&n| green_series_oracle(&g, &d3, o, n).unwrap()).collect();
    for w in runs.windows(2) {
        for (a, b) in w[0].values().iter().zip(w[1].values()) {
            assert!(b >= a);
        }
    }
}

#[test]
fn green_is_symmetric_and_harmonic_off_source() {
    let g = three_rail(8).unwrap();
    let x0 = g.vertex("0,0").unwrap();
    let d = g.ball(x0, 4).unwrap();
    let solver = DirichletSolver::new(&g, &d).unwrap();
    let col = solver.green(x0).unwrap();
    for &y in &d {
        let back = solver.green(y).unwrap().get(x0);
        assert!((col.get(y) - back).abs() <= 1e-10 * col.get(y).max(1.0));
        assert!(col.get(y) >= 0.0);
    }
    let off = d.difference(&VertexSet::singleton(x0));
    assert!(is_harmonic(&g, &col.to_field(&g), &off, 1e-9).unwrap().harmonic);
    assert!(!is_harmonic(&g, &col.to_field(&g), &d, 1e-9).unwrap().harmonic);
}

#[test]
fn is_harmonic_examples() {
    let g = lattice_box(2, 5).unwrap();
    let o = g.vertex("0,0").unwrap();
    let a = g.ball(o, 2).unwrap();
    let bd = VertexField::from_fn(g.exterior_boundary(&a), |v| v as f64);
    let h = harmonic_extension(&g, &a, &bd).unwrap();
    assert!(is_harmonic(&g, &h, &a, 1e-9).unwrap().harmonic);
    let sq =
        VertexField::from_fn(g.closure(&a), |v| g.label(v).split(',').map(|c| c.parse::<f64>().unwrap().powi(2)).sum());
    let chk = is_harmonic(&g, &sq, &a, 1e-9).unwrap();
    assert!(!chk.harmonic);
    assert_eq!(chk.max_residual, 1.0);
}

#[test]
fn halo_domains_are_rejected() {
    let g = lattice_box(2, 3).unwrap();
    let b = g.ball(g.vertex("0,0").unwrap(), 3).unwrap();
    assert!(DirichletSolver::new(&g, &b).is_err());
    let all = VertexSet::new(0..g.len());
    assert!(DirichletSolver::new(&g, &all).is_err());
}

// random nonnegative boundary data on a three-rail ball (weights vary by 2^8)
fn setup() -> (WeightedGraph, VertexSet, VertexSet) {
    let g = three_rail(10).unwrap();
    let a = g.ball(g.vertex("1,1").unwrap(), 4).unwrap();
    let bd = g.exterior_boundary(&a);
    (g, a, bd)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximum_principle(vals in proptest::collection::vec(-5.0f64..5.0, 64)) {
        let (g, a, bd) = setup();
        let f = VertexField::new(bd.clone(), vals[..bd.len()].to_vec()).unwrap();
        let h = harmonic_extension(&g, &a, &f).unwrap();
        let (hi, lo) = (f.max_on(&bd).unwrap(), f.min_on(&bd).unwrap());
        prop_assert!(h.max_on(&a).unwrap() <= hi + 1e-10);
        prop_assert!(h.min_on(&a).unwrap() >= lo - 1e-10);
    }

    #[test]
    fn extension_is_linear(
        f1 in proptest::collection::vec(-5.0f64..5.0, 64),
        f2 in proptest::collection::vec(-5.0f64..5.0, 64),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let (g, a, bd) = setup();
        let m = bd.len();
        let u = VertexField::new(bd.clone(), f1[..m].to_vec()).unwrap();
        let v = VertexField::new(bd.clone(), f2[..m].to_vec()).unwrap();
        let lhs = harmonic_extension(&g, &a, &u.combine(alpha, &v, beta).unwrap()).unwrap();
        let rhs = harmonic_extension(&g, &a, &u).unwrap()
            .combine(alpha, &harmonic_extension(&g, &a, &v).unwrap(), beta).unwrap();
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn local_harnack_on_lattice(vals in proptest::collection::vec(0.0f64..1.0, 40)) {
        let g = lattice_box(2, 6).unwrap();
        let a = g.ball(g.vertex("0,0").unwrap(), 3).unwrap();
        let bd = g.exterior_boundary(&a);
        let f = VertexField::new(bd.clone(), vals[..bd.len()].to_vec()).unwrap();
        let h = harmonic_extension(&g, &a, &f).unwrap();
        let p0 = g.controlled_weights_p0();
        for &x in &a {
            for (y, _) in g.neighbors(x) {
                prop_assert!(h.get(x).unwrap() >= p0 * h.get(y).unwrap() - 1e-12);
            }
        }
    }

    #[test]
    fn measure_rows_sum_to_one_and_columns_are_harmonic(i in 0usize..9) {
        let g = lattice_box(2, 4).unwrap();
        let a = g.ball(g.vertex("0,0").unwrap(), 2).unwrap();
        let solver = DirichletSolver::new(&g, &a).unwrap();
        let x = a.as_slice()[i % a.len()];
        prop_assert!((solver.harmonic_measure(x).unwrap().total() - 1.0).abs() < 1e-10);
        let z = solver.boundary().as_slice()[i % solver.boundary().len()];
        let col = solver.exit_column(z).unwrap();
        let field = VertexField::from_fn(g.closure(&a), |v| {
            a.position(v).map_or((v == z) as u8 as f64, |k| col[k])
        });
        prop_assert!(is_harmonic(&g, &field, &a, 1e-10).unwrap().harmonic);
    }
}
