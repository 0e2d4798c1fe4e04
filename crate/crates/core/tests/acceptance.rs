//! One line per acceptance criterion, then a single assertion over all of them.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{brute_isomorphic, edge_names, permutations, random_graph, small_graphs};
use gwsym::eta::{build_eta, eta_degree, EtaChoice};
use gwsym::graph::{contract, covering_canonical_form, graph_canonical_form};
use gwsym::hurwitz::{brute_all, brute_transitive, frobenius_all, HurwitzKernel, Partition, TupleSpec};
use gwsym::integrator::{covering_vertex_integral, monomial_integral, Integrator};
use gwsym::oracle::dvv_bracket;
use gwsym::strata::{contributing_terms, StrataConfig};
use gwsym::{BracketQuery, Rational};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs `check`, which returns a detail string or panics, and prints the
/// criterion line.
fn criterion(n: u32, name: &str, limit: Option<Duration>, check: impl FnOnce() -> String) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check));
    let took = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) => match limit {
            Some(l) if took > l => (false, format!("{d}; over the {:.0?} limit", l)),
            _ => (true, d),
        },
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, msg)
        }
    };
    println!("criterion {n} {}: {name} [{:.2?}] {detail}", if ok { "PASS" } else { "FAIL" }, took);
    ok
}

fn q(g: u32, k: &[u32]) -> BracketQuery {
    BracketQuery::new(g, k.to_vec()).unwrap()
}

fn golden_a() -> String {
    let v = Integrator::default().bracket(&q(1, &[1]), None).unwrap().value;
    assert_eq!(v, Rational::new(1, 24));
    format!("<tau_1>_1 = {v}")
}

fn golden_b() -> String {
    let b = Integrator::default().bracket(&q(2, &[4]), None).unwrap();
    assert_eq!(b.value, Rational::new(1, 1152));
    let main: Vec<_> = b.terms.iter().filter(|t| t.edges == 0).map(|t| t.contribution.clone()).collect();
    let boundary: Vec<_> = b.terms.iter().filter(|t| t.edges > 0).map(|t| t.contribution.clone()).collect();
    assert_eq!(main, [Rational::new(1, 720)]);
    assert_eq!(boundary.len(), 6);
    assert_eq!(boundary.iter().sum::<Rational>(), Rational::new(-1, 1920));
    format!("<tau_4>_2 = {} = 1/720 + 6 x ({})", b.value, boundary[0])
}

fn intermediates() -> String {
    let it = Integrator::default();
    let k = it.kernel();
    let two = Rational::from(2);
    let three = Rational::from(3);
    for (g, p, want) in [(1u32, 1u32, two.pow(-6)), (2, 4, two.pow(-6) / three.clone())] {
        let query = q(g, &[p]);
        let eta = build_eta(g, 1, None).unwrap();
        let terms = contributing_terms(&eta, &query, &StrataConfig::default()).unwrap();
        let main = terms.iter().find(|t| t.num_edges() == 0).unwrap();
        let mut psi = vec![0u8; main.rho.target.half_edges.len()];
        psi[main.tail_weights.iter().find(|w| !w.weight.is_zero()).unwrap().half_edge] = p as u8;
        assert_eq!(monomial_integral(k, main, &psi).unwrap(), want);
        let prefactor = eta_degree(&eta).recip();
        assert_eq!(prefactor, if g == 1 { Rational::new(8, 3) } else { Rational::new(4, 15) });
        if g == 2 {
            for t in terms.iter().filter(|t| t.num_edges() == 1) {
                assert_eq!(t.norm.recip(), Rational::from(4));
                let e = t.edge_weights[0].edge;
                let germs = [e, t.rho.target.half_edges[e].partner];
                for vd in &t.vertices {
                    let at = t.rho.target.half_edges_at(vd.vertex);
                    let (exps, want): (Vec<u32>, Rational) = if at.len() == 3 {
                        (vec![0; 3], Rational::new(1, 12))
                    } else {
                        (at.iter().map(|h| if germs.contains(h) { 3 } else { 0 }).collect(), two.pow(-10))
                    };
                    assert_eq!(covering_vertex_integral(k, &vd.datum, &exps).unwrap(), want);
                }
            }
        }
    }
    let mut classes = vec!["3".parse::<Partition>().unwrap()];
    classes.extend((0..6).map(|_| "2,1".parse::<Partition>().unwrap()));
    let s = TupleSpec::new(3, classes).unwrap();
    assert_eq!(k.transitive(&s).unwrap(), BigUint::from(486u32));
    "2^-6, 2^-6/3, 1/12, 2^-10, 1/|f_i| = 4, 486, 8/3, 4/15".into()
}

fn oracle_sweep(it: &Integrator) -> String {
    let mut count = 0;
    for (g, max_n) in [(1, 3), (2, 2)] {
        for n in 1..=max_n {
            for query in BracketQuery::all(g, n) {
                let ours = it.bracket(&query, None).unwrap().value;
                assert_eq!(ours, dvv_bracket(&query), "{query}");
                count += 1;
            }
        }
    }
    format!("{count} queries agree")
}

fn eta_independence(it: &Integrator) -> String {
    let choices = EtaChoice::all(1, 2);
    assert!(choices.len() >= 3);
    for query in BracketQuery::all(1, 2) {
        let values: Vec<Rational> = choices.iter().map(|c| it.bracket(&query, Some(c)).unwrap().value).collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]), "{query}: {values:?}");
    }
    format!("{} labels agree", choices.len())
}

fn hurwitz_kernel() -> String {
    let kernel = HurwitzKernel::default();
    let mut checked = 0;
    let mut agree = |s: &TupleSpec, table| {
        assert_eq!(brute_all(s), frobenius_all(s, table), "{s:?}");
        let t = kernel.count_transitive(s).unwrap();
        assert_eq!(t.brute, t.character, "{s:?}");
        assert_eq!(t.brute, Some(brute_transitive(s)));
        checked += 1;
    };
    let tables: Vec<_> = (1..=5).map(|d| HurwitzKernel::default().character_table(d).unwrap()).collect();
    for d in 1..=3u32 {
        let parts = Partition::all(d);
        for n in 1..=6u32 {
            for code in 0..parts.len().pow(n) {
                let mut c = code;
                let classes = (0..n)
                    .map(|_| {
                        let p = parts[c % parts.len()].clone();
                        c /= parts.len();
                        p
                    })
                    .collect();
                agree(&TupleSpec::new(d, classes).unwrap(), &tables[d as usize - 1]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let d = rng.gen_range(1..=5u32);
        let n = rng.gen_range(1..=7);
        let parts = Partition::all(d);
        let classes = (0..n).map(|_| parts[rng.gen_range(0..parts.len())].clone()).collect();
        agree(&TupleSpec::new(d, classes).unwrap(), &tables[d as usize - 1]);
    }
    for d in 1..=8 {
        assert!(HurwitzKernel::default().character_table(d).unwrap().column_orthogonality_holds(), "degree {d}");
    }
    format!("{checked} specs, orthogonality up to degree 8")
}

fn pruning_soundness() -> String {
    let pruned = Integrator::default();
    let full = Integrator::new(Default::default(), StrataConfig { prune: false, max_edges: None });
    let mut count = 0;
    for (g, n) in [(1, 1), (1, 2), (2, 1)] {
        for query in BracketQuery::all(g, n) {
            let a = pruned.bracket(&query, None).unwrap();
            let b = full.bracket(&query, None).unwrap();
            assert_eq!(a.value, b.value, "{query}");
            assert!(a.terms.len() <= b.terms.len());
            count += 1;
        }
    }
    format!("{count} queries unchanged")
}

fn structural() -> String {
    let mut coverings = 0;
    for (g, powers) in [(1, vec![1]), (1, vec![1, 1]), (1, vec![2, 1, 0]), (2, vec![4]), (2, vec![2, 3])] {
        let query = BracketQuery::new(g, powers).unwrap();
        let eta = build_eta(g, query.points(), None).unwrap();
        let key = covering_canonical_form(&eta.covering);
        for t in contributing_terms(&eta, &query, &StrataConfig::default()).unwrap() {
            assert_eq!(t.rho.validate(), Ok(()), "{}", t.key);
            for vd in &t.vertices {
                assert!(vd.datum.violations().is_empty(), "{}", t.key);
            }
            let f = t.morphism();
            assert!(f.violations().is_empty(), "{}", t.key);
            assert_eq!(covering_canonical_form(&f.target), key);
            coverings += 1;
        }
    }

    let mut compositions = 0;
    for g in small_graphs() {
        let edges = edge_names(&g);
        let m = edges.len();
        let pick = |mask: u32| -> Vec<usize> { (0..m).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect() };
        for a in 0u32..(1 << m) {
            for b in (0u32..(1 << m)).filter(|b| a & b == 0) {
                let first = contract(&g, &pick(a));
                let images: Vec<usize> = pick(b).iter().map(|&e| first.edge_image(e).unwrap()).collect();
                assert_eq!(first.then(&contract(&first.target, &images)), contract(&g, &pick(a | b)));
                compositions += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let a = random_graph(&mut rng, 6, false);
        let b = if rng.gen_bool(0.5) {
            let vp = permutations(a.num_vertices());
            let hp = permutations(a.half_edges.len());
            a.relabeled(&vp[rng.gen_range(0..vp.len())], &hp[rng.gen_range(0..hp.len())])
        } else {
            random_graph(&mut rng, 6, false)
        };
        assert_eq!(graph_canonical_form(&a) == graph_canonical_form(&b), brute_isomorphic(&a, &b));
    }
    format!("{coverings} coverings, {compositions} compositions, 200 isomorphism pairs")
}

#[test]
fn acceptance() {
    let it = Integrator::default();
    let results = [
        criterion(1, "golden value <tau_1>_1", Some(Duration::from_secs(1)), golden_a),
        criterion(2, "golden value <tau_4>_2", Some(Duration::from_secs(60)), golden_b),
        criterion(3, "intermediate reproductions", None, intermediates),
        criterion(4, "oracle sweep", Some(Duration::from_secs(900)), || oracle_sweep(&it)),
        criterion(5, "label independence", None, || eta_independence(&it)),
        criterion(6, "hurwitz kernel", None, hurwitz_kernel),
        criterion(7, "pruning soundness", None, pruning_soundness),
        criterion(8, "structural suite", None, structural),
    ];
    let failed: Vec<usize> = (0..8).filter(|&i| !results[i]).map(|i| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
