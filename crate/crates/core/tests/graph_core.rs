use std::collections::BTreeSet;

use harnack_core::generators::{lamplighter_ball, lattice_box, perturb_weights, three_rail, LampState};
use harnack_core::graph::{build_graph, GraphBuilder, VertexField, VertexSet, WeightedGraph};
use proptest::prelude::*;

fn coords(g: &WeightedGraph, v: usize) -> Vec<i64> {
    g.label(v).split(',').map(|s| s.parse().unwrap()).collect()
}

#[test]
fn lattice_fragment_corner_measure() {
    let g = build_graph([("00", "01", 1.0), ("00", "10", 1.0), ("01", "11", 1.0), ("10", "11", 1.0)]).unwrap();
    assert_eq!(g.measure(g.vertex("00").unwrap()), 2.0);
}

#[test]
fn build_examples() {
    let g = build_graph([("a", "b", 1.0)]).unwrap();
    assert_eq!((g.measure(0), g.measure(1)), (1.0, 1.0));
    assert!(build_graph([("a", "b", 0.0)]).is_err());
    assert!(build_graph([("a", "b", 1.0), ("c", "d", 1.0)]).is_err());
    assert!(build_graph([("a", "b", 1.0), ("b", "a", 2.0)]).is_err());
    assert!(build_graph([("a", "a", 1.0)]).is_err());
}

#[test]
fn transition_examples() {
    let g = lattice_box(2, 3).unwrap();
    let o = g.vertex("0,0").unwrap();
    assert_eq!(g.transition_prob(o, g.vertex("0,1").unwrap()).unwrap(), 0.25);
    assert_eq!(g.transition_prob(o, g.vertex("1,1").unwrap()).unwrap(), 0.0);
    assert!(g.transition_prob(o, g.len()).is_err());
}

#[test]
fn ball_sizes_match_coordinate_count() {
    let g = lattice_box(2, 10).unwrap();
    let o = g.vertex("0,0").unwrap();
    assert_eq!(g.ball(o, 1).unwrap().len(), 5);
    assert_eq!(g.ball(o, 0).unwrap().as_slice(), &[o]);
    // brute force over coordinates: |x| + |y| ≤ 5
    let brute = (0..g.len()).filter(|&v| coords(&g, v).iter().map(|c| c.abs()).sum::<i64>() <= 5).count();
    assert_eq!(brute, 61);
    assert_eq!(g.ball(o, 5).unwrap().len(), brute);
}

#[test]
fn boundary_of_ball_by_neighbour_scan() {
    let g = lattice_box(2, 10).unwrap();
    let a = g.ball(g.vertex("0,0").unwrap(), 2).unwrap();
    let mut scan = BTreeSet::new();
    for &u in &a {
        let cu = coords(&g, u);
        for d in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            let label = format!("{},{}", cu[0] + d[0], cu[1] + d[1]);
            let v = g.vertex(&label).unwrap();
            if !a.contains(v) {
                scan.insert(v);
            }
        }
    }
    let bd = g.exterior_boundary(&a);
    assert_eq!(bd.len(), 12);
    assert_eq!(bd.iter().copied().collect::<BTreeSet<_>>(), scan);
    let all = VertexSet::new(0..g.len());
    assert!(g.exterior_boundary(&all).is_empty());

    let p = lattice_box(1, 5).unwrap();
    let a = VertexSet::new(["-2", "-1", "0"].map(|l| p.vertex(l).unwrap()));
    let bd: Vec<&str> = p.exterior_boundary(&a).iter().map(|&v| p.label(v)).collect();
    assert_eq!(bd, ["-3", "1"]);
    assert_eq!(p.closure(&a).len(), 5);
}

// All geodesics between x and y, by depth-first enumeration.
fn all_geodesics(g: &WeightedGraph, x: usize, y: usize) -> Vec<Vec<usize>> {
    let dist = g.distances_from(y);
    let mut out = Vec::new();
    let mut stack = vec![vec![x]];
    while let Some(p) = stack.pop() {
        let cur = *p.last().unwrap();
        if cur == y {
            out.push(p);
            continue;
        }
        for (v, _) in g.neighbors(cur) {
            if dist[v] + 1 == dist[cur] {
                let mut q = p.clone();
                q.push(v);
                stack.push(q);
            }
        }
    }
    out
}

#[test]
fn geodesic_is_least_under_index_order() {
    let g = lattice_box(2, 4).unwrap();
    let (x, y) = (g.vertex("0,0").unwrap(), g.vertex("2,2").unwrap());
    let all = all_geodesics(&g, x, y);
    assert_eq!(all.len(), 6);
    let least = all.iter().min().unwrap();
    let path = g.geodesic(x, y).unwrap();
    assert_eq!(&path, least);
    assert_eq!(path.len(), 5);
    assert_eq!(g.geodesic(x, x).unwrap(), vec![x]);
}

#[test]
fn geodesic_on_path_is_unique() {
    let g = lattice_box(1, 6).unwrap();
    let p = g.geodesic(g.vertex("0").unwrap(), g.vertex("5").unwrap()).unwrap();
    let labels: Vec<&str> = p.iter().map(|&v| g.label(v)).collect();
    assert_eq!(labels, ["0", "1", "2", "3", "4", "5"]);
}

#[test]
fn controlled_weight_examples() {
    assert_eq!(lattice_box(2, 6).unwrap().controlled_weights_p0(), 0.25);
    assert_eq!(build_graph([("a", "b", 3.0)]).unwrap().controlled_weights_p0(), 1.0);
    // edge scan: the smallest ratio is the rung at |n| = 20 seen from (±20, 1),
    // whose other edge is the unit rung to (±20, 0)
    let g = three_rail(20).unwrap();
    let w = 2f64.powi(-20);
    assert_eq!(g.controlled_weights_p0(), w / (1.0 + w));
    let mut scan = f64::INFINITY;
    for (u, v, w) in g.edges() {
        scan = scan.min(w / g.measure(u)).min(w / g.measure(v));
    }
    assert_eq!(g.controlled_weights_p0(), scan);
}

#[test]
fn p0_vanishes_along_three_rail() {
    let p: Vec<f64> = [5, 10, 20, 40].iter().map(|&n| three_rail(n).unwrap().controlled_weights_p0()).collect();
    assert!(p.windows(2).all(|w| w[1] < w[0]));
    assert!(p[3] < 1e-12);
}

#[test]
fn laplacian_of_squared_distance_at_origin() {
    let g = lattice_box(2, 5).unwrap();
    let o = g.vertex("0,0").unwrap();
    let dom = g.closure(&VertexSet::singleton(o));
    let f = VertexField::from_fn(dom, |v| coords(&g, v).iter().map(|c| (c * c) as f64).sum());
    assert_eq!(g.laplacian_apply(&f, o).unwrap(), 1.0);
    let missing = VertexField::constant(VertexSet::singleton(o), 0.0);
    assert!(g.laplacian_apply(&missing, o).is_err());
}

#[test]
fn laplacian_trivial_cases() {
    let g = lattice_box(1, 4).unwrap();
    let all = VertexSet::new(0..g.len());
    let c = VertexField::constant(all.clone(), 3.5);
    let id = VertexField::from_fn(all, |v| coords(&g, v)[0] as f64);
    for l in ["-2", "0", "3"] {
        let x = g.vertex(l).unwrap();
        assert_eq!(g.laplacian_apply(&c, x).unwrap(), 0.0);
        assert_eq!(g.laplacian_apply(&id, x).unwrap(), 0.0);
    }
}

#[test]
fn affine_functions_are_harmonic_inside_lattice() {
    let g = lattice_box(3, 3).unwrap();
    let all = VertexSet::new(0..g.len());
    let f = VertexField::from_fn(all, |v| {
        let c = coords(&g, v);
        2.0 * c[0] as f64 - 0.5 * c[2] as f64 + 1.0
    });
    for v in 0..g.len() {
        if !g.is_halo(v) {
            assert!(g.laplacian_apply(&f, v).unwrap().abs() < 1e-14);
        }
    }
}

#[test]
fn generator_examples() {
    let p = lattice_box(1, 3).unwrap();
    assert_eq!((p.len(), p.edge_count()), (7, 6));
    let q = lattice_box(2, 1).unwrap();
    assert_eq!((q.len(), q.edge_count()), (9, 12));
    assert_eq!(lattice_box(2, 10).unwrap().ball(0, 0).unwrap().len(), 1);
    let t = three_rail(5).unwrap();
    let id = |l: &str| t.vertex(l).unwrap();
    assert_eq!(t.weight(id("3,1"), id("3,2")), 0.125);
    assert_eq!(t.weight(id("2,0"), id("3,0")), 1.0);
    // μ((0,0)) by scanning incident edges
    let scan: f64 = t.neighbors(id("0,0")).map(|(_, w)| w).sum();
    assert_eq!(scan, 4.0);
    assert_eq!(t.measure(id("0,0")), scan);
    // (0,1) has exactly two incident edges, both weight 1
    assert_eq!(t.degree(id("0,1")), 2);
    assert_eq!(t.transition_prob(id("0,1"), id("0,2")).unwrap(), 0.5);
}

#[test]
fn perturbation_examples() {
    let g = lattice_box(1, 5).unwrap();
    let same = perturb_weights(&g, 2.0, |_, _| 1.0).unwrap();
    for (u, v, w) in g.edges() {
        assert_eq!(same.weight(u, v), w);
    }
    assert!(perturb_weights(&g, 2.0, |_, _| 3.0).is_err());
}

// word length by the closed-form formula when it applies (x′ ≥ 0, or mirrored),
// away from the lit-endpoint case
fn formula(s: &LampState) -> Option<u64> {
    let far_lit = if s.position >= 0 {
        s.lit(s.position) && s.lamps.last().is_some_and(|&b| b.max(0) == s.position) && s.position > 0
    } else {
        s.lit(s.position) && s.lamps.first().is_some_and(|&a| a.min(0) == s.position)
    };
    (!far_lit && !(s.position == 0 && s.lit(0))).then(|| s.sweep_distance())
}

#[test]
fn lamplighter_bfs_agrees_with_formula() {
    let ball = lamplighter_ball(8).unwrap();
    let mut checked = 0;
    for (s, &d) in ball.states.iter().zip(&ball.distance) {
        assert_eq!(d as u64, s.word_length(), "{}", s.label());
        if let Some(f) = formula(s) {
            assert_eq!(d as u64, f, "{}", s.label());
            checked += 1;
        }
    }
    assert!(checked > ball.len() / 2);
    assert_eq!(ball.distance[ball.index_of(&LampState::origin()).unwrap()], 0);
    for s in &ball.states {
        let m = s.moves();
        assert_eq!(m.iter().collect::<BTreeSet<_>>().len(), 4);
    }
    // every interior state has its four successors inside the ball
    for (i, succ) in ball.successors.iter().enumerate() {
        if ball.distance[i] <= 8 {
            assert!(succ.iter().all(Option::is_some));
        }
    }
}

#[test]
fn hard_pair_distance() {
    let ball = lamplighter_ball(9).unwrap();
    for r in [3i64, 6] {
        let y1 = LampState::new(-r, -r..=0);
        let y2 = LampState::new(r, 0..=r);
        let i1 = ball.index_of(&y1).unwrap();
        let i2 = ball.index_of(&y2).unwrap();
        assert_eq!(ball.distance[i1] as i64, r + 2);
        assert_eq!(ball.distance[i2] as i64, r + 2);
    }
}

fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..14)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec((any::<prop::sample::Index>(), 0.01f64..10.0), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, 0.01f64..10.0), 0..2 * n);
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut b = GraphBuilder::new();
            for i in 0..n {
                b.vertex(&format!("v{i}"));
            }
            for (i, (p, w)) in tree.into_iter().enumerate() {
                let child = i + 1;
                b.edge_idx(p.index(child), child, w).unwrap();
            }
            for (u, v, w) in extra {
                if u != v {
                    let _ = b.edge_idx(u, v, w);
                }
            }
            b.build().unwrap()
        })
}

proptest! {
    #[test]
    fn transition_rows_sum_to_one(g in arb_graph()) {
        for x in 0..g.len() {
            let s: f64 = (0..g.len()).map(|y| g.transition_prob(x, y).unwrap()).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn balls_nest_and_closures_fit(g in arb_graph(), r in 0u32..5) {
        for x in 0..g.len() {
            let b = g.ball(x, r).unwrap();
            let b1 = g.ball(x, r + 1).unwrap();
            prop_assert!(b.is_subset(&b1));
            prop_assert!(g.closure(&b).is_subset(&b1));
            prop_assert!(g.exterior_boundary(&b).is_disjoint(&b));
        }
    }

    #[test]
    fn geodesic_lengths(g in arb_graph()) {
        let d0 = g.distances_from(0);
        for (y, &dy) in d0.iter().enumerate() {
            let p = g.geodesic(0, y).unwrap();
            let q = g.geodesic(y, 0).unwrap();
            prop_assert_eq!(p.len() as u32 - 1, dy);
            prop_assert_eq!(q.len(), p.len());
            for w in p.windows(2) {
                prop_assert!(g.weight(w[0], w[1]) > 0.0);
            }
        }
    }

    #[test]
    fn p0_is_scale_invariant(g in arb_graph(), s in 0.001f64..1000.0) {
        let h = g.map_weights(|_, _, _| s).unwrap();
        let (a, b) = (g.controlled_weights_p0(), h.controlled_weights_p0());
        prop_assert!((a - b).abs() <= 1e-12 * a, "{} vs {}", a, b);
    }
}
