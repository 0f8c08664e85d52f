use dpg_core::gadgets::*;
use dpg_core::graph::generators::*;
use dpg_core::reduce::{all_certificates, dp_remove, is_irreducible, remove_independent_set};
use dpg_core::{Graph, StubGraph, VertexId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn independent(g: &Graph, set: &[VertexId]) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, &a)| set[i + 1..].iter().all(|&b| !g.has_edge(a, b)))
}

fn check_instance(phi: &Formula) -> Verification {
    let inst = build_reduction(phi, BuildOptions::default()).unwrap();
    assert!(inst.graph.max_degree() <= 28, "{phi}");
    assert!(independent(&inst.graph, &inst.target_set()), "{phi}");
    assert_eq!(inst.m_target, inst.target_set().len());
    verify_reduction(&inst, phi).unwrap()
}

#[test]
fn blocker_leaves_other_certificates_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let n = rng.gen_range(2..=10);
        let g = gnp(n, 0.45, &mut rng);
        let x = VertexId::from(rng.gen_range(0..n));
        let before: Vec<_> = g
            .vertices()
            .map(|v| all_certificates(&StubGraph::new(g.clone()), v, usize::MAX).unwrap())
            .collect();
        let mut h = g.clone();
        let clique = attach_blocker(&mut h, x).unwrap();
        let sh = StubGraph::new(h);
        for v in g.vertices() {
            let after = all_certificates(&sh, v, usize::MAX).unwrap();
            if v == x {
                assert!(after.is_empty());
            } else {
                assert_eq!(after, before[v.index()], "vertex {v}");
            }
        }
        for k in clique {
            assert!(all_certificates(&sh, k, usize::MAX).unwrap().is_empty());
        }
    }
}

#[test]
fn blocker_on_degree_three_vertex() {
    let mut g = star(3);
    let k = attach_blocker(&mut g, VertexId::from(0)).unwrap();
    assert_eq!(k.len(), 5);
    assert_eq!(g.degree(VertexId::from(0)), 8);
    assert!(attach_blocker(&mut g, VertexId::from(99)).is_err());
}

#[test]
fn all_positive_clause() {
    let phi = Formula::new(3, vec![vec![1, 2, 3]]).unwrap();
    assert_eq!(phi.count_satisfying(), 7);
    let v = check_instance(&phi);
    assert!(v.satisfiable && v.removable);
}

#[test]
fn unsatisfiable_without_unit_clauses() {
    // x and y each split into a 4-cycle of implications so that every
    // variable occurs three times; the core (x∨y)(¬x∨y)(x∨¬y)(¬x∨¬y) is
    // unsatisfiable.
    let clauses = vec![
        vec![-1, 2],
        vec![-2, 3],
        vec![-3, 4],
        vec![-4, 1],
        vec![-5, 6],
        vec![-6, 7],
        vec![-7, 8],
        vec![-8, 5],
        vec![1, 5],
        vec![-2, 6],
        vec![3, -7],
        vec![-4, -8],
    ];
    let phi = Formula::new(8, clauses).unwrap();
    assert!(phi.is_three_sat_three());
    let inst = build_reduction(&phi, BuildOptions::default()).unwrap();
    assert!(inst.conflict_vertex.is_none());
    assert!(inst.forced.is_empty());
    assert_eq!(check_instance(&phi), Verification { satisfiable: false, removable: false });
    // Dropping one core clause makes it satisfiable.
    let mut sat = phi.clone();
    sat.clauses.pop();
    assert_eq!(check_instance(&sat), Verification { satisfiable: true, removable: true });
}

#[test]
fn even_blockers_agree_too() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let phi = Formula::random_three_sat_three(4, 6, &mut rng);
        let inst = build_reduction(&phi, BuildOptions { even_blockers: true }).unwrap();
        assert!(inst.graph.max_degree() <= 28);
        assert!(verify_reduction(&inst, &phi).unwrap().agrees(), "{phi}");
    }
}

#[test]
fn padding_keeps_removability() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let phi = Formula::random_three_sat_three(3, 4, &mut rng);
        let inst = build_reduction(&phi, BuildOptions::default()).unwrap();
        let padded = padded_instance(&inst, 1.0).unwrap();
        assert!(inst.m_target <= padded.vertex_count());
        let a = remove_independent_set(&StubGraph::new(inst.graph.clone()), &inst.target_set()).unwrap();
        let b = remove_independent_set(&StubGraph::new(padded), &inst.target_set()).unwrap();
        assert_eq!(a.is_some(), b.is_some());
    }
}

#[test]
fn verification_is_size_limited() {
    let phi = Formula::new(9, vec![vec![1, 2, 3]]).unwrap();
    let inst = build_reduction(&phi, BuildOptions::default()).unwrap();
    assert!(matches!(verify_reduction(&inst, &phi), Err(GadgetError::TooLarge { vars: 9, .. })));
    let bad = Formula::new(2, vec![vec![1, 2], vec![1, -2], vec![1], vec![-1, 2]]).unwrap();
    assert!(matches!(build_reduction(&bad, BuildOptions::default()), Err(GadgetError::NotThreeSatThree)));
}

#[test]
fn four_regular_checker_matches_irreducibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kinds = [BlockKind::K4, BlockKind::K5MinusEdge, BlockKind::K5];
    let (mut samples, mut irreducible) = (0, 0);
    while samples < 200 {
        let g = if samples % 2 == 0 {
            let n = rng.gen_range(5..=16);
            match random_regular(n, 4, &mut rng) {
                Some(g) => g,
                None => continue,
            }
        } else {
            let blocks: Vec<BlockKind> = (0..rng.gen_range(1..=3)).map(|_| kinds[rng.gen_range(0..3)]).collect();
            match random_block_4regular(&blocks, 50, &mut rng) {
                Some(g) if g.vertex_count() <= 16 => g,
                _ => continue,
            }
        };
        samples += 1;
        let verdict = check_4regular_indecomposable_structure(&g).unwrap().indecomposable;
        let irr = is_irreducible(&StubGraph::new(g)).0;
        assert_eq!(verdict, irr);
        irreducible += irr as usize;
    }
    assert!(irreducible >= 50);
}

#[test]
fn low_degree_graphs_decompose() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(1..=40);
        let g = random_bounded_degree(n, 3, 3 * n, &mut rng);
        let sg = StubGraph::new(g);
        let r = decompose_low_degree(&sg, 100_000).unwrap().expect("search limit");
        assert!(check_low_degree_kernel(&r.kernel).unwrap());
        let mut cur = sg.clone();
        let mut components = cur.graph().component_count();
        for c in &r.removals {
            dp_remove(&mut cur, c).unwrap();
            let now = cur.graph().component_count();
            assert!(now <= components);
            components = now;
        }
        assert_eq!(cur, r.kernel);
        assert_eq!(r.reconstruct().unwrap(), sg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_agrees_with_brute_force(seed in any::<u64>(), nv in 1usize..=6, nc in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Formula::random_three_sat_three(nv, nc, &mut rng);
        prop_assert!(check_instance(&phi).agrees(), "{}", phi);
    }

    #[test]
    fn variable_vertices_keep_two_certificates(seed in any::<u64>(), nv in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Formula::random_three_sat_three(nv, nv + 2, &mut rng);
        let inst = build_reduction(&phi, BuildOptions::default()).unwrap();
        let sg = StubGraph::new(inst.graph.clone());
        for &x in &inst.variable_vertices {
            prop_assert_eq!(all_certificates(&sg, x, usize::MAX).unwrap().len(), 2);
        }
    }
}
