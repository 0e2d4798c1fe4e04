//! Graph generators and brute-force references shared by the test suites.

#![allow(dead_code)]

use gwsym::graph::{HalfEdge, TwistedGraph};
use gwsym::semigroup::Bool01;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Sub-multisets of `items` of size at most `k`, each listed once.
pub fn multisets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    fn rec<T: Copy>(items: &[T], start: usize, k: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            out.push(cur.clone());
            rec(items, i, k, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Every graph on up to three vertices with up to three edges (loops and
/// parallel edges included), one tail per vertex.
pub fn small_graphs() -> Vec<TwistedGraph<Bool01>> {
    let mut out = Vec::new();
    for nv in 1..=3usize {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        let edge_sets = multisets(&pairs, 3);
        for edges in edge_sets {
            let mut g = TwistedGraph::new();
            for v in 0..nv {
                g.add_vertex((v % 2) as u32, Bool01(v == 1));
            }
            for v in 0..nv {
                g.add_tail(v, v as u32, 1);
            }
            for (i, &(a, b)) in edges.iter().enumerate() {
                g.add_edge(a, b, 1 + (i % 2) as u32);
            }
            out.push(g);
        }
    }
    out
}

/// A random graph with at most `max_h` half-edges.
pub fn random_graph(rng: &mut ChaCha8Rng, max_h: usize, unique_labels: bool) -> TwistedGraph<Bool01> {
    let nv = rng.gen_range(1..=3);
    let nh = rng.gen_range(nv..=max_h.max(nv));
    let mut g = TwistedGraph::new();
    for _ in 0..nv {
        g.add_vertex(rng.gen_range(0..2), Bool01(rng.gen_bool(0.3)));
    }
    let mut free: Vec<usize> = (0..nh).collect();
    let owners: Vec<usize> = (0..nh).map(|h| if h < nv { h } else { rng.gen_range(0..nv) }).collect();
    let mults: Vec<u32> = (0..nh).map(|_| rng.gen_range(1..=2)).collect();
    let mut half_edges = vec![HalfEdge { vertex: 0, mult: 1, partner: 0, tail: None }; nh];
    let mut label = 0;
    while let Some(h) = free.pop() {
        let pair = !free.is_empty() && rng.gen_bool(0.6);
        if pair {
            let j = free.remove(rng.gen_range(0..free.len()));
            half_edges[h] = HalfEdge { vertex: owners[h], mult: mults[h], partner: j, tail: None };
            half_edges[j] = HalfEdge { vertex: owners[j], mult: mults[h], partner: h, tail: None };
        } else {
            let l = if unique_labels { label } else { rng.gen_range(0..2) };
            label += 1;
            half_edges[h] = HalfEdge { vertex: owners[h], mult: mults[h], partner: h, tail: Some(l) };
        }
    }
    g.half_edges = half_edges;
    g
}

pub fn brute_isomorphic(a: &TwistedGraph<Bool01>, b: &TwistedGraph<Bool01>) -> bool {
    if a.num_vertices() != b.num_vertices() || a.half_edges.len() != b.half_edges.len() {
        return false;
    }
    let vp = permutations(a.num_vertices());
    let hp = permutations(a.half_edges.len());
    vp.iter().any(|v| hp.iter().any(|h| &a.relabeled(v, h) == b))
}

pub fn brute_automorphisms(g: &TwistedGraph<Bool01>) -> u64 {
    let vp = permutations(g.num_vertices());
    let hp = permutations(g.half_edges.len());
    vp.iter().map(|v| hp.iter().filter(|h| &g.relabeled(v, h) == g).count() as u64).sum()
}

pub fn erase_labels(g: &TwistedGraph<Bool01>) -> TwistedGraph<Bool01> {
    let mut g = g.clone();
    for h in &mut g.half_edges {
        if h.tail.is_some() {
            h.tail = Some(0);
        }
    }
    g
}

pub fn edge_names(g: &TwistedGraph<Bool01>) -> Vec<usize> {
    g.edges().into_iter().map(|(a, _)| a).collect()
}
