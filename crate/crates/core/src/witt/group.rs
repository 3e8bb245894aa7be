//! `W_n(R)` as a finite abelian group. It is generated by the `v^i [e_j]`
//! for an additive basis `e_j` of `R`, and coordinates come from peeling off
//! one Verschiebung level at a time.

use std::sync::Arc;

use crate::abelian::{FinGroup, GroupHom};
use crate::algebra::FiniteAlgebra;
use crate::modular::Zpm;

use super::WittVector;

#[derive(Clone, Debug)]
pub struct WittGroup {
    ring: Arc<FiniteAlgebra>,
    len: usize,
    gens: Vec<WittVector>,
    /// `k [e_j]` at length `len - i`, indexed `[i][j][k]`, for small orders.
    multiples: Option<Vec<Vec<Vec<WittVector>>>>,
    group: FinGroup,
}

const MULTIPLE_CACHE_ORDER: u64 = 64;

/// A power of `p` killing `W_n(R)`.
pub fn exponent_bound(ring: &FiniteAlgebra, n: usize) -> u32 {
    ring.char_exponent() + n as u32
}

impl WittGroup {
    /// Presentation over `Z/p^m`; `m` must be at least [`exponent_bound`].
    pub fn new(ring: &Arc<FiniteAlgebra>, len: usize, m: u32) -> WittGroup {
        let z = Zpm::new(ring.p(), m).expect("precision fits");
        let rank = ring.rank();
        let mut gens = Vec::with_capacity(len * rank);
        for i in 0..len {
            for j in 0..rank {
                let mut g = WittVector::teichmuller(ring, &ring.basis_elem(j), len - i);
                for _ in 0..i {
                    g = g.verschiebung();
                }
                gens.push(g);
            }
        }
        let mut me = WittGroup {
            ring: ring.clone(),
            len,
            gens,
            multiples: None,
            group: FinGroup::new(z.clone(), 0, Vec::new()),
        };
        if (0..rank).all(|j| ring.order_modulus(j) <= MULTIPLE_CACHE_ORDER) {
            let table = (0..len)
                .map(|i| {
                    (0..rank)
                        .map(|j| {
                            let t = WittVector::teichmuller(ring, &ring.basis_elem(j), len - i);
                            let mut acc = WittVector::zero(ring, len - i);
                            let mut out = Vec::new();
                            for _ in 0..ring.order_modulus(j) {
                                out.push(acc.clone());
                                acc = acc.add(&t).expect("same length");
                            }
                            out
                        })
                        .collect()
                })
                .collect();
            me.multiples = Some(table);
        }
        let n = len * rank;
        let mut rels = Vec::with_capacity(n);
        for (idx, g) in me.gens.iter().enumerate() {
            let ord = ring.order_modulus(idx % rank);
            let mut row: Vec<u64> = me.coords(&g.scale(ord as i64)).iter().map(|c| z.neg(*c)).collect();
            row[idx] = z.add(row[idx], ord % z.modulus());
            rels.push(row);
        }
        me.group = FinGroup::new(z, n, rels);
        me
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn group(&self) -> &FinGroup {
        &self.group
    }

    pub fn zpm(&self) -> &Zpm {
        self.group.zpm()
    }

    pub fn generators(&self) -> &[WittVector] {
        &self.gens
    }

    /// Integer coordinates with `x = Σ c_g g`.
    pub fn coords(&self, x: &WittVector) -> Vec<u64> {
        let rank = self.ring.rank();
        // after level `i` is cleared the rest is `v^i(y)`, so continue with `y`
        let mut y = x.truncate(self.len);
        let mut c = vec![0u64; self.len * rank];
        for i in 0..self.len {
            let a = y.coord(0).clone();
            if !self.ring.is_zero(&a) {
                let n = self.len - i;
                for (j, aj) in a.iter().enumerate() {
                    if *aj != 0 {
                        c[i * rank + j] = *aj;
                        let g = match &self.multiples {
                            Some(t) => t[i][j][*aj as usize].clone(),
                            None => WittVector::teichmuller(&self.ring, &self.ring.basis_elem(j), n).scale(*aj as i64),
                        };
                        y = y.sub(&g).expect("same length");
                    }
                }
                debug_assert!(self.ring.is_zero(y.coord(0)));
            }
            if i + 1 < self.len {
                y = WittVector::new(&self.ring, y.coords()[1..].to_vec());
            }
        }
        c
    }

    pub fn element(&self, c: &[u64]) -> WittVector {
        let mut acc = WittVector::zero(&self.ring, self.len);
        for (g, ci) in self.gens.iter().zip(c) {
            if *ci != 0 {
                acc = acc.add(&g.scale(*ci as i64)).expect("same length");
            }
        }
        acc
    }

    /// Matrix of the additive map `f` into `target`.
    pub fn hom(&self, target: &WittGroup, f: impl Fn(&WittVector) -> WittVector) -> GroupHom {
        let matrix = self.gens.iter().map(|g| target.coords(&f(g).truncate(target.len))).collect();
        GroupHom { matrix }
    }
}
