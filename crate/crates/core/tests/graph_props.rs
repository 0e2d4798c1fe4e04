mod common;

use common::{brute_automorphisms, edge_names, brute_isomorphic, erase_labels, permutations, random_graph, small_graphs};
use gwsym::graph::{contract, graph_automorphisms, graph_canonical_form, Contraction, Fixing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn contraction_composition_is_exhaustively_associative() {
    let graphs = small_graphs();
    assert!(graphs.len() > 20);
    let mut checked = 0;
    for g in &graphs {
        let edges = edge_names(g);
        let m = edges.len();
        // Every ordered pair of disjoint edge subsets.
        for a in 0u32..(1 << m) {
            for b in 0u32..(1 << m) {
                if a & b != 0 {
                    continue;
                }
                let pick = |mask: u32| -> Vec<usize> {
                    (0..m).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect()
                };
                let first = contract(g, &pick(a));
                let b_images: Vec<usize> =
                    pick(b).iter().map(|&e| first.edge_image(e).expect("disjoint from the first set")).collect();
                let second = contract(&first.target, &b_images);
                let composed = first.then(&second);
                let direct = contract(g, &pick(a | b));
                assert_eq!(composed, direct);
                assert!(direct.violations().is_empty(), "{:?}", direct.violations());
                checked += 1;
            }
        }
        assert_eq!(Contraction::identity(g).then(&contract(g, &edges)), contract(g, &edges));
    }
    assert!(checked > 100);
}

#[test]
fn automorphism_counts_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let unique = rng.gen_bool(0.5);
        let g = random_graph(&mut rng, 6, unique);
        assert_eq!(graph_automorphisms(&g, Fixing::TAILS), brute_automorphisms(&g), "{g:?}");
        assert_eq!(graph_automorphisms(&g, Fixing::NOTHING), brute_automorphisms(&erase_labels(&g)), "{g:?}");
    }
}

#[test]
fn canonical_forms_decide_isomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut positives = 0;
    let mut negatives = 0;
    for _ in 0..300 {
        let a = random_graph(&mut rng, 6, false);
        let b = if rng.gen_bool(0.5) {
            let vp = permutations(a.num_vertices());
            let hp = permutations(a.half_edges.len());
            a.relabeled(&vp[rng.gen_range(0..vp.len())], &hp[rng.gen_range(0..hp.len())])
        } else {
            random_graph(&mut rng, 6, false)
        };
        let iso = brute_isomorphic(&a, &b);
        assert_eq!(graph_canonical_form(&a) == graph_canonical_form(&b), iso, "{a:?}\n{b:?}");
        if iso {
            positives += 1;
        } else {
            negatives += 1;
        }
    }
    assert!(positives > 50 && negatives > 50);
}
