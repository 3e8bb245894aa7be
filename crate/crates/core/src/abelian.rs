//! Finite abelian p-groups presented as `(Z/p^M)^n / Rel`, and additive maps
//! between them given by integer matrices on generators.

use crate::modular::{cokernel_invariants, howell_form, solve_particular, HowellForm, Matrix, Zpm};

#[derive(Clone, Debug)]
pub struct FinGroup {
    z: Zpm,
    ngens: usize,
    rels: Vec<Vec<u64>>,
    rel_form: HowellForm,
}

impl FinGroup {
    /// The group `(Z/p^M)^n / span(rels)`; `p^M` must kill the group.
    pub fn new(z: Zpm, ngens: usize, rels: Vec<Vec<u64>>) -> FinGroup {
        let rel_form = howell_form(&z, &rels, ngens);
        FinGroup { z, ngens, rels, rel_form }
    }

    pub fn zpm(&self) -> &Zpm {
        &self.z
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[Vec<u64>] {
        &self.rels
    }

    /// `log_p` of the order.
    pub fn log_order(&self) -> u32 {
        self.z.exp() * self.ngens as u32 - self.rel_form.log_order(&self.z)
    }

    pub fn is_zero(&self, x: &[u64]) -> bool {
        self.rel_form.contains(&self.z, x)
    }

    pub fn equal(&self, x: &[u64], y: &[u64]) -> bool {
        let d: Vec<u64> = x.iter().zip(y).map(|(a, b)| self.z.sub(*a, *b)).collect();
        self.is_zero(&d)
    }

    /// Canonical representative modulo the relations.
    pub fn reduce(&self, x: &[u64]) -> Vec<u64> {
        self.rel_form.reduce(&self.z, x)
    }

    /// Invariant factors as exponents of `p`, increasing.
    pub fn invariants(&self) -> Vec<u32> {
        cokernel_invariants(&self.z, &self.rels, self.ngens)
    }

    /// `G^k`, with generators of copy `i` at `i * ngens ..`.
    pub fn power(&self, k: usize) -> FinGroup {
        let n = self.ngens;
        let mut rels = Vec::with_capacity(self.rels.len() * k);
        for i in 0..k {
            for r in &self.rels {
                let mut row = vec![0u64; n * k];
                row[i * n..(i + 1) * n].copy_from_slice(r);
                rels.push(row);
            }
        }
        FinGroup::new(self.z.clone(), n * k, rels)
    }

    /// `log_p` of the order of the subgroup generated by `gens`.
    pub fn log_order_of_span(&self, gens: &[Vec<u64>]) -> u32 {
        let mut all = self.rels.clone();
        all.extend(gens.iter().cloned());
        let h = howell_form(&self.z, &all, self.ngens);
        h.log_order(&self.z) - self.rel_form.log_order(&self.z)
    }
}

/// Additive map `G -> H`: row `i` holds the image of generator `i`.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub matrix: Matrix,
}

impl GroupHom {
    pub fn apply(&self, z: &Zpm, x: &[u64], target: &FinGroup) -> Vec<u64> {
        let mut out = vec![0u64; target.ngens()];
        for (xi, row) in x.iter().zip(&self.matrix) {
            if *xi != 0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o = z.add(*o, z.mul(*xi, *r));
                }
            }
        }
        target.reduce(&out)
    }

    /// `log_p |image|`.
    pub fn log_image(&self, target: &FinGroup) -> u32 {
        target.log_order_of_span(&self.matrix)
    }

    /// `log_p |kernel|`.
    pub fn log_kernel(&self, source: &FinGroup, target: &FinGroup) -> u32 {
        source.log_order() - self.log_image(target)
    }

    pub fn is_injective(&self, source: &FinGroup, target: &FinGroup) -> bool {
        self.log_kernel(source, target) == 0
    }

    pub fn is_surjective(&self, target: &FinGroup) -> bool {
        self.log_image(target) == target.log_order()
    }

    /// `self` followed by `other`.
    pub fn then(&self, z: &Zpm, other: &GroupHom) -> GroupHom {
        let matrix = self.matrix.iter().map(|row| other.apply_raw(z, row)).collect();
        GroupHom { matrix }
    }

    fn apply_raw(&self, z: &Zpm, x: &[u64]) -> Vec<u64> {
        let cols = self.matrix.first().map_or(0, |r| r.len());
        let mut out = vec![0u64; cols];
        for (xi, row) in x.iter().zip(&self.matrix) {
            if *xi != 0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o = z.add(*o, z.mul(*xi, *r));
                }
            }
        }
        out
    }

    pub fn is_zero(&self, target: &FinGroup) -> bool {
        self.matrix.iter().all(|r| target.is_zero(r))
    }

    /// Some `x` with `self(x) = b`, if one exists.
    pub fn preimage(&self, z: &Zpm, source: &FinGroup, target: &FinGroup, b: &[u64]) -> Option<Vec<u64>> {
        let n = source.ngens();
        let mut a = self.matrix.clone();
        a.extend(target.relations().iter().cloned());
        let rows = a.len();
        let x = solve_particular(z, &a, rows, target.ngens(), b)?;
        Some(source.reduce(&x[..n]))
    }
}

/// Exactness of `A -f-> B -g-> C` at `B`: `g f = 0` and `|ker g| = |im f|`.
pub fn exact_at(z: &Zpm, f: &GroupHom, g: &GroupHom, b: &FinGroup, c: &FinGroup) -> bool {
    f.then(z, g).is_zero(c) && g.log_kernel(b, c) == f.log_image(b)
}
