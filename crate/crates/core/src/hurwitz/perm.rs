//! Permutations of at most 16 points packed into a `u64`, four bits per image.

use super::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Perm {
    packed: u64,
    len: u8,
}

impl Perm {
    pub(crate) fn from_images(images: &[u8]) -> Self {
        debug_assert!(images.len() <= 16);
        let mut packed = 0u64;
        for (i, &x) in images.iter().enumerate() {
            packed |= (x as u64) << (4 * i);
        }
        Perm { packed, len: images.len() as u8 }
    }

    pub(crate) fn identity(d: usize) -> Self {
        let images: Vec<u8> = (0..d as u8).collect();
        Self::from_images(&images)
    }

    #[inline]
    pub(crate) fn image(&self, i: usize) -> usize {
        ((self.packed >> (4 * i)) & 0xf) as usize
    }

    pub(crate) fn degree(&self) -> usize {
        self.len as usize
    }

    /// `self` then `other`: `i ↦ other(self(i))`.
    pub(crate) fn then(&self, other: &Perm) -> Perm {
        let mut packed = 0u64;
        for i in 0..self.degree() {
            packed |= (other.image(self.image(i)) as u64) << (4 * i);
        }
        Perm { packed, len: self.len }
    }

    pub(crate) fn inverse(&self) -> Perm {
        let mut packed = 0u64;
        for i in 0..self.degree() {
            packed |= (i as u64) << (4 * self.image(i));
        }
        Perm { packed, len: self.len }
    }

    pub(crate) fn cycle_type(&self) -> Partition {
        let d = self.degree();
        let mut seen = 0u32;
        let mut parts = Vec::new();
        for s in 0..d {
            if seen & (1 << s) != 0 {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while seen & (1 << x) == 0 {
                seen |= 1 << x;
                x = self.image(x);
                len += 1;
            }
            parts.push(len);
        }
        Partition::new(parts).expect("cycle lengths are positive")
    }

    /// Merges the cycles of `self` into the orbit labelling `labels`
    /// (canonical: each block named by its least point, renumbered densely).
    pub(crate) fn merge_orbits(&self, labels: u64) -> u64 {
        let d = self.degree();
        let mut parent: [u8; 16] = [0; 16];
        for i in 0..d {
            parent[i] = ((labels >> (4 * i)) & 0xf) as u8;
        }
        // Block representatives: first point in each block.
        let mut rep = [u8::MAX; 16];
        for i in 0..d {
            let b = parent[i] as usize;
            if rep[b] == u8::MAX {
                rep[b] = i as u8;
            }
        }
        let mut uf: [u8; 16] = [0; 16];
        for i in 0..d {
            uf[i] = rep[parent[i] as usize];
        }
        fn find(uf: &mut [u8; 16], mut x: usize) -> usize {
            while uf[x] as usize != x {
                uf[x] = uf[uf[x] as usize];
                x = uf[x] as usize;
            }
            x
        }
        for i in 0..d {
            let (a, b) = (find(&mut uf, i), find(&mut uf, self.image(i)));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                uf[hi] = lo as u8;
            }
        }
        canonical_labels(d, |i| find(&mut uf, i))
    }
}

/// Dense relabelling of a block assignment in order of first appearance.
pub(crate) fn canonical_labels(d: usize, mut block: impl FnMut(usize) -> usize) -> u64 {
    let mut names = [u8::MAX; 16];
    let mut next = 0u8;
    let mut out = 0u64;
    for i in 0..d {
        let b = block(i);
        if names[b] == u8::MAX {
            names[b] = next;
            next += 1;
        }
        out |= (names[b] as u64) << (4 * i);
    }
    out
}

/// Orbit labelling with every point in its own block.
pub(crate) fn discrete_labels(d: usize) -> u64 {
    canonical_labels(d, |i| i)
}

pub(crate) fn is_single_block(d: usize, labels: u64) -> bool {
    (0..d).all(|i| (labels >> (4 * i)) & 0xf == 0)
}

/// All of `S_d` in lexicographic order.
pub(crate) fn all_perms(d: usize) -> Vec<Perm> {
    let mut cur: Vec<u8> = (0..d as u8).collect();
    let mut out = vec![Perm::from_images(&cur)];
    loop {
        let Some(i) = (1..d).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Perm::from_images(&cur));
    }
}
