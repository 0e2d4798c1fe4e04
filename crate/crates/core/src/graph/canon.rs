//! Individualisation-refinement on small coloured graphs.
//!
//! Every structure in [`crate::graph`] is encoded as a simple graph whose
//! nodes are vertices *and* half-edges, with node colours carrying the labels
//! and link colours carrying the incidence kind. Canonical certificates and
//! automorphism counts are then computed here, once.
//!
//! The search tree is explored completely: the leaves whose certificate equals
//! the least one are exactly the images of one leaf under the automorphism
//! group, so counting them gives the group order.

use std::cmp::Ordering;

#[derive(Debug, Clone, Default)]
pub(crate) struct ColoredGraph {
    colors: Vec<Vec<u32>>,
    adj: Vec<Vec<(u32, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Certificate {
    colors: Vec<Vec<u32>>,
    links: Vec<(usize, usize, u32)>,
}

impl Certificate {
    pub(crate) fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let push = |out: &mut Vec<u8>, x: u32| out.extend_from_slice(&x.to_be_bytes());
        push(&mut out, self.colors.len() as u32);
        for c in &self.colors {
            push(&mut out, c.len() as u32);
            for &x in c {
                push(&mut out, x);
            }
        }
        push(&mut out, self.links.len() as u32);
        for &(a, b, c) in &self.links {
            push(&mut out, a as u32);
            push(&mut out, b as u32);
            push(&mut out, c);
        }
        out
    }
}

/// Result of a full search: the least certificate and the number of leaves
/// attaining it.
#[derive(Debug, Clone)]
pub(crate) struct CanonResult {
    pub certificate: Certificate,
    pub automorphisms: u64,
}

impl ColoredGraph {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add_node(&mut self, color: Vec<u32>) -> usize {
        self.colors.push(color);
        self.adj.push(Vec::new());
        self.colors.len() - 1
    }

    pub(crate) fn link(&mut self, a: usize, b: usize, color: u32) {
        self.adj[a].push((color, b));
        self.adj[b].push((color, a));
    }

    pub(crate) fn len(&self) -> usize {
        self.colors.len()
    }

    fn initial_ranks(&self) -> Vec<u32> {
        let mut keys: Vec<&Vec<u32>> = self.colors.iter().collect();
        keys.sort();
        keys.dedup();
        self.colors
            .iter()
            .map(|c| keys.binary_search(&c).unwrap() as u32)
            .collect()
    }

    fn refine(&self, mut ranks: Vec<u32>) -> Vec<u32> {
        let mut classes = count_distinct(&ranks);
        loop {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..self.len())
                .map(|v| {
                    let mut nb: Vec<(u32, u32)> =
                        self.adj[v].iter().map(|&(c, u)| (c, ranks[u])).collect();
                    nb.sort_unstable();
                    (ranks[v], nb)
                })
                .collect();
            let mut sorted: Vec<&(u32, Vec<(u32, u32)>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            ranks = sigs
                .iter()
                .map(|s| sorted.binary_search(&s).unwrap() as u32)
                .collect();
            if sorted.len() == classes {
                return ranks;
            }
            classes = sorted.len();
        }
    }

    fn certificate(&self, ranks: &[u32]) -> Certificate {
        let n = self.len();
        let mut order = vec![0; n];
        for (v, &r) in ranks.iter().enumerate() {
            order[r as usize] = v;
        }
        let colors = order.iter().map(|&v| self.colors[v].clone()).collect();
        let mut links = Vec::new();
        for v in 0..n {
            for &(c, u) in &self.adj[v] {
                let (a, b) = (ranks[v] as usize, ranks[u] as usize);
                if a < b || (a == b && v <= u) {
                    links.push((a, b, c));
                }
            }
        }
        links.sort_unstable();
        Certificate { colors, links }
    }

    pub(crate) fn canonize(&self) -> CanonResult {
        if self.len() == 0 {
            return CanonResult {
                certificate: Certificate { colors: vec![], links: vec![] },
                automorphisms: 1,
            };
        }
        let ranks = self.refine(self.initial_ranks());
        let mut best: Option<CanonResult> = None;
        self.search(ranks, &mut best);
        best.expect("search visits at least one leaf")
    }

    fn search(&self, ranks: Vec<u32>, best: &mut Option<CanonResult>) {
        let n = self.len();
        let mut sizes = vec![0usize; n];
        for &r in &ranks {
            sizes[r as usize] += 1;
        }
        let target = (0..n).find(|&r| sizes[r] > 1);
        let Some(target) = target else {
            let cert = self.certificate(&ranks);
            match best {
                None => *best = Some(CanonResult { certificate: cert, automorphisms: 1 }),
                Some(b) => match cert.cmp(&b.certificate) {
                    Ordering::Less => {
                        *best = Some(CanonResult { certificate: cert, automorphisms: 1 })
                    }
                    Ordering::Equal => b.automorphisms += 1,
                    Ordering::Greater => {}
                },
            }
            return;
        };
        let cell: Vec<usize> = (0..n).filter(|&v| ranks[v] as usize == target).collect();
        for &v in &cell {
            let split: Vec<u32> = (0..n)
                .map(|x| 2 * ranks[x] + u32::from(x != v))
                .collect();
            let compact = compress(&split);
            self.search(self.refine(compact), best);
        }
    }
}

fn count_distinct(ranks: &[u32]) -> usize {
    let mut r = ranks.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len()
}

fn compress(values: &[u32]) -> Vec<u32> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    values.iter().map(|x| sorted.binary_search(x).unwrap() as u32).collect()
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(s, "{b:02x}").unwrap();
    }
    s
}
