use serde::{Deserialize, Serialize};

use super::partition::Partition;
use super::perm::{all_perms, Perm};

/// Structure constants of the centre of `ℚ[S_d]` in the basis of class
/// sums: `C_λ · C_μ = Σ_ν c[λ][μ][ν] C_ν`, indices as in `partitions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassAlgebra {
    pub degree: u32,
    pub partitions: Vec<Partition>,
    pub constants: Vec<Vec<Vec<u64>>>,
}

impl ClassAlgebra {
    /// Direct convolution: for a fixed `z` of each type `ν`, count the
    /// factorisations `z = a·b` by the types of `a` and `b`.
    pub(crate) fn build(d: u32) -> Self {
        let partitions = Partition::all(d);
        let n = partitions.len();
        let perms = all_perms(d as usize);
        let class_of = |p: &Perm| {
            let t = p.cycle_type();
            partitions.iter().position(|q| *q == t).unwrap()
        };
        let inverse_classes: Vec<(Perm, usize)> = perms.iter().map(|a| (a.inverse(), class_of(a))).collect();
        let mut constants = vec![vec![vec![0u64; n]; n]; n];
        for (nu, shape) in partitions.iter().enumerate() {
            let z = representative(shape);
            for (a_inv, la) in &inverse_classes {
                let b = a_inv.then(&z);
                constants[*la][class_of(&b)][nu] += 1;
            }
        }
        ClassAlgebra { degree: d, partitions, constants }
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    pub fn get(&self, lambda: &Partition, mu: &Partition, nu: &Partition) -> Option<u64> {
        Some(self.constants[self.index_of(lambda)?][self.index_of(mu)?][self.index_of(nu)?])
    }
}

/// The permutation `(1 … λ_1)(λ_1+1 … λ_1+λ_2)…`.
fn representative(shape: &Partition) -> Perm {
    let d = shape.size() as usize;
    let mut images = vec![0u8; d];
    let mut start = 0;
    for &p in shape.parts() {
        let p = p as usize;
        for i in 0..p {
            images[start + i] = (start + (i + 1) % p) as u8;
        }
        start += p;
    }
    Perm::from_images(&images)
}
