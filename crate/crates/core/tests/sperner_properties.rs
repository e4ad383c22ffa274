use fixpoint_cc::functions::random_lipschitz;
use fixpoint_cc::numerics::NormKind;
use fixpoint_cc::sperner::{
    brouwer_to_sperner, brute_force_panchromatic, merge_coloring, mu_color, mu_vector,
    run_surplus_protocol, run_three_player_protocol, surplus_graph, surplus_path, validate_sperner,
    Node, OnSegment, SpernerInstance, SurplusGraph,
};
use fixpoint_cc::Map;
use proptest::prelude::*;

fn check_graph(g: &SurplusGraph<'_>) {
    let tri = g.triangulation();
    for cell in tri.cells() {
        assert!(g.degree(&Node::Cell(cell)) <= 2);
    }
    assert_eq!(g.degree(&Node::Start) % 2, 1);
    assert_eq!(g.degree(&Node::End) % 2, 1);

    let path = surplus_path(g).unwrap();
    assert_eq!(path.edges.len(), path.cells.len() + 1);
    for (j, cell) in path.cells.iter().enumerate() {
        let ids = tri.cell_vertex_ids(cell);
        for edge in [&path.edges[j], &path.edges[j + 1]] {
            assert!(edge.facet.iter().all(|v| ids.contains(v)));
            let mut colors: Vec<u8> = edge.facet.iter().map(|&v| g.merged()[v as usize]).collect();
            colors.sort_unstable();
            colors.dedup();
            assert_eq!(colors.len(), tri.dim(), "shared facet is panchromatic");
        }
    }
    // The first facet lies on the start face, the last on the end face.
    let on_face = |facet: &[u32], axis: u8| {
        facet
            .iter()
            .all(|&v| tri.vertex_bary(v).unwrap()[axis as usize] == 0)
    };
    assert!(on_face(&path.edges[0].facet, g.drop_color()));
    assert!(on_face(&path.edges[path.cells.len()].facet, g.keep()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_colorings_have_odd_parity_and_good_graphs(
        d in 1usize..=4,
        k in 1u32..=6,
        seed in any::<u64>(),
    ) {
        let inst = SpernerInstance::random(d, k, 1, seed).unwrap();
        prop_assert!(validate_sperner(&inst).is_ok());
        prop_assert_eq!(brute_force_panchromatic(&inst).len() % 2, 1);
        let tri = inst.triangulation();
        let g = surplus_graph(tri, merge_coloring(inst.colors(), d), 0, d as u8).unwrap();
        check_graph(&g);
    }

    #[test]
    fn mu_vector_reconstructs_the_difference(
        raw in proptest::collection::vec(-1.0f64..1.0, 2..6),
    ) {
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let w: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let mu = mu_vector(&w);
        prop_assert!(mu.iter().all(|&m| m >= 0.0));
        prop_assert_eq!(mu[mu_color(&w)], 0.0);
        // v_i - o = e_i - (1/(a+1)) * 1.
        let total: f64 = mu.iter().sum();
        let share = total / w.len() as f64;
        for (i, &wi) in w.iter().enumerate() {
            prop_assert!((mu[i] - share - wi).abs() < 1e-10);
        }
    }
}

#[test]
fn surplus_protocol_is_sound_on_many_instances() {
    for d in 2..=4usize {
        for i in 0..500u64 {
            let k = 2 + (i % 7) as u32;
            let inst = SpernerInstance::random(d, k, d - 1, 10_000 * d as u64 + i).unwrap();
            let run = run_surplus_protocol(&inst).unwrap();
            let cell = run.cell().expect("valid colorings yield cells");
            assert!(inst.is_panchromatic(cell));
            assert!(brute_force_panchromatic(&inst).contains(cell));
            let bound = run.bit_bound(inst.triangulation()).unwrap();
            assert!(run.transcript.total_bits() <= bound);
        }
    }
}

#[test]
fn three_player_protocol_is_sound() {
    for i in 0..200u64 {
        let k = 1 + (i % 10) as u32;
        let inst = SpernerInstance::random(2, k, 1, 77 + i).unwrap();
        let run = run_three_player_protocol(&inst).unwrap();
        let cell = run.cell().unwrap();
        assert!(brute_force_panchromatic(&inst).contains(cell));
        assert!(run.transcript.total_bits() <= run.bit_bound(inst.triangulation()).unwrap());
    }
}

#[test]
fn embedded_colorings_are_valid_and_solvable() {
    for i in 0..20u64 {
        let p = NormKind::L2;
        let f_a: Map = random_lipschitz(2 * i, 1, 1, 1.5, p, 6).unwrap().into();
        let f_b: Map = random_lipschitz(2 * i + 1, 1, 1, 1.5, p, 6).unwrap().into();
        let k = 4 + 2 * (i % 6) as u32 + (i % 2) as u32;
        let emb = brouwer_to_sperner(&OnSegment(f_a), &OnSegment(f_b), 1, k).unwrap();
        let inst = emb.instance();
        assert!(validate_sperner(inst).is_ok());
        let d = inst.triangulation().dim();
        let g = surplus_graph(
            inst.triangulation(),
            merge_coloring(inst.colors(), d),
            0,
            d as u8,
        )
        .unwrap();
        check_graph(&g);
        let run = run_surplus_protocol(inst).unwrap();
        let cell = run.cell().unwrap();
        assert!(brute_force_panchromatic(inst).contains(cell));
        let back = emb.back_map(cell).unwrap();
        assert!((back.q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((back.p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
