//! Truncated polynomials in marked-point variables `z_i` and germ classes `ψ_h`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::rational::Rational;

/// Variables and truncation bounds of a [`PsiSeries`].
///
/// `z_i` is kept up to degree `z_caps[i]`. Each `ψ` variable belongs to a
/// group (a target vertex), and the total `ψ`-degree of each group is kept
/// up to `group_caps[group]` (the vertex dimension).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesShape {
    pub z_caps: Vec<u32>,
    pub psi_groups: Vec<usize>,
    pub group_caps: Vec<u32>,
}

impl SeriesShape {
    fn num_z(&self) -> usize {
        self.z_caps.len()
    }

    fn admits(&self, m: &[u8]) -> bool {
        let (z, psi) = m.split_at(self.num_z());
        if z.iter().zip(&self.z_caps).any(|(&e, &c)| e as u32 > c) {
            return false;
        }
        let mut used = vec![0u32; self.group_caps.len()];
        for (&e, &g) in psi.iter().zip(&self.psi_groups) {
            used[g] += e as u32;
            if used[g] > self.group_caps[g] {
                return false;
            }
        }
        true
    }
}

/// A polynomial with exact coefficients, truncated to its [`SeriesShape`]
/// after every operation. A monomial is stored as its exponent vector:
/// the `z` exponents followed by the `ψ` exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiSeries {
    shape: Arc<SeriesShape>,
    terms: BTreeMap<Vec<u8>, Rational>,
}

impl PsiSeries {
    pub fn zero(shape: Arc<SeriesShape>) -> Self {
        PsiSeries { shape, terms: BTreeMap::new() }
    }

    pub fn constant(shape: Arc<SeriesShape>, c: Rational) -> Self {
        let width = shape.num_z() + shape.psi_groups.len();
        let mut s = Self::zero(shape);
        s.insert(vec![0; width], c);
        s
    }

    pub fn one(shape: Arc<SeriesShape>) -> Self {
        Self::constant(shape, Rational::one())
    }

    fn width(&self) -> usize {
        self.shape.num_z() + self.shape.psi_groups.len()
    }

    fn insert(&mut self, m: Vec<u8>, c: Rational) {
        if c.is_zero() || !self.shape.admits(&m) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `Σ c_i z_i`.
    pub fn z_linear(shape: Arc<SeriesShape>, coeffs: &[u32]) -> Self {
        let mut s = Self::zero(shape);
        for (i, &c) in coeffs.iter().enumerate() {
            if c > 0 {
                let mut m = vec![0; s.width()];
                m[i] = 1;
                s.insert(m, Rational::from(c));
            }
        }
        s
    }

    /// The single variable `ψ_h`.
    pub fn psi(shape: Arc<SeriesShape>, h: usize) -> Self {
        let mut s = Self::zero(shape);
        let mut m = vec![0; s.width()];
        m[s.shape.num_z() + h] = 1;
        s.insert(m, Rational::one());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn shape(&self) -> &Arc<SeriesShape> {
        &self.shape
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn add(&self, other: &PsiSeries) -> PsiSeries {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> PsiSeries {
        let mut out = Self::zero(self.shape.clone());
        for (m, v) in &self.terms {
            out.insert(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &PsiSeries) -> PsiSeries {
        let mut out = Self::zero(self.shape.clone());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let m: Vec<u8> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.insert(m, x * y);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> PsiSeries {
        let mut out = Self::one(self.shape.clone());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// `exp(self)` for a series without constant term; the sum stops once
    /// the powers truncate to zero.
    pub fn exp(&self) -> PsiSeries {
        assert!(
            !self.terms.keys().any(|m| m.iter().all(|&e| e == 0)),
            "exp needs a series without constant term"
        );
        let mut out = Self::one(self.shape.clone());
        let mut power = Self::one(self.shape.clone());
        let mut j = 0u32;
        loop {
            j += 1;
            power = power.mul(self).scale(&Rational::new(1, j));
            if power.is_zero() {
                return out;
            }
            out = out.add(&power);
        }
    }

    /// The coefficient of `∏ z_i^{e_i}`, as a list of `ψ` exponent vectors
    /// with their coefficients.
    pub fn coefficient_of_z(&self, z: &[u32]) -> Vec<(Vec<u8>, Rational)> {
        let nz = self.shape.num_z();
        self.terms
            .iter()
            .filter(|(m, _)| m[..nz].iter().zip(z).all(|(&a, &b)| a as u32 == b))
            .map(|(m, c)| (m[nz..].to_vec(), c.clone()))
            .collect()
    }
}

impl fmt::Display for PsiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let nz = self.shape.num_z();
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if i < nz { format!("z{}", i + 1) } else { format!("psi{}", i - nz) };
                if e == 1 {
                    write!(f, "*{name}")?;
                } else {
                    write!(f, "*{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}
