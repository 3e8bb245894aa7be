use std::sync::Arc;

use rand::Rng;

use crate::error::AlgebraError;
use crate::modular::{howell_form, solve_linear, HowellForm, Matrix};

use super::{Elem, FiniteAlgebra};

/// An additive subgroup of a ring, kept in Howell form over `Z/p^top`
/// together with the order relations of the ambient basis.
#[derive(Clone, Debug)]
pub struct Submodule {
    gens: Vec<Elem>,
    howell: HowellForm,
    log_order: u32,
}

impl Submodule {
    pub fn new(alg: &FiniteAlgebra, gens: Vec<Elem>) -> Submodule {
        let gens: Vec<Elem> = gens
            .into_iter()
            .map(|g| alg.normalize(&g))
            .filter(|g| !alg.is_zero(g))
            .collect();
        let rels = alg.order_relations();
        let mut all = gens.clone();
        all.extend(rels.iter().cloned());
        let z = alg.zpm();
        let howell = howell_form(z, &all, alg.rank());
        let ambient: u32 = alg.orders().iter().map(|o| z.exp() - o).sum();
        let log_order = howell.log_order(z) - ambient;
        Submodule { gens, howell, log_order }
    }

    pub fn zero(alg: &FiniteAlgebra) -> Submodule {
        Submodule::new(alg, Vec::new())
    }

    pub fn whole(alg: &FiniteAlgebra) -> Submodule {
        Submodule::new(alg, (0..alg.rank()).map(|i| alg.basis_elem(i)).collect())
    }

    pub fn contains(&self, alg: &FiniteAlgebra, x: &[u64]) -> bool {
        self.howell.contains(alg.zpm(), x)
    }

    pub fn gens(&self) -> &[Elem] {
        &self.gens
    }

    /// A generating set reduced to the Howell rows, normalized into the ring.
    pub fn basis(&self, alg: &FiniteAlgebra) -> Vec<Elem> {
        self.howell
            .basis()
            .into_iter()
            .map(|r| alg.normalize(&r))
            .filter(|r| !alg.is_zero(r))
            .collect()
    }

    /// `log_p` of the number of elements.
    pub fn log_order(&self) -> u32 {
        self.log_order
    }

    pub fn is_zero(&self) -> bool {
        self.log_order == 0
    }

    pub fn random<R: Rng>(&self, alg: &FiniteAlgebra, rng: &mut R) -> Elem {
        let m = alg.zpm().modulus();
        let mut acc = alg.zero();
        for g in &self.gens {
            let c = rng.gen_range(0..m);
            acc = alg.add(&acc, &alg.scalar(g, c as i64));
        }
        acc
    }

    /// All elements, for small submodules.
    pub fn enumerate(&self, alg: &FiniteAlgebra) -> Vec<Elem> {
        let z = alg.zpm();
        let mut out = vec![alg.zero()];
        for (_, v, row) in &self.howell.rows {
            let count = z.p().pow(z.exp() - v);
            let row = alg.normalize(row);
            let mut next = Vec::with_capacity(out.len() * count as usize);
            for x in &out {
                for c in 0..count {
                    next.push(alg.add(x, &alg.scalar(&row, c as i64)));
                }
            }
            next.sort();
            next.dedup();
            out = next;
        }
        out
    }

    pub fn same_as(&self, other: &Submodule) -> bool {
        self.howell == other.howell
    }
}

/// Elements reducing to zero in the residue field.
pub(crate) fn residue_kernel(alg: &FiniteAlgebra) -> Vec<Elem> {
    let z = alg.zpm();
    let d = alg.field_degree();
    let n = alg.rank();
    // x -> p^(top-1) * residue(x) embeds F_p^d into (Z/p^top)^d
    let scale = z.p_pow(z.exp() - 1);
    let a: Matrix = (0..n)
        .map(|i| {
            let r = alg.residue(&alg.basis_elem(i));
            r.iter().map(|c| z.mul(*c, scale)).collect()
        })
        .collect();
    // rows for the order relations also map to zero; they are added by Submodule
    let sol = solve_linear(z, &a, n, d);
    sol.kernel.basis()
}

/// An ideal of a ring, stored as the additive span of `gens * basis`.
#[derive(Clone, Debug)]
pub struct Ideal {
    ring: Arc<FiniteAlgebra>,
    gens: Vec<Elem>,
    module: Submodule,
}

impl Ideal {
    pub fn new(ring: &Arc<FiniteAlgebra>, gens: Vec<Elem>) -> Result<Ideal, AlgebraError> {
        let mut span = Vec::new();
        for g in &gens {
            for i in 0..ring.rank() {
                span.push(ring.mul(g, &ring.basis_elem(i)));
            }
        }
        let module = Submodule::new(ring, span);
        let ideal = Ideal { ring: ring.clone(), gens, module };
        ideal.verify()?;
        Ok(ideal)
    }

    /// Wraps an additive subgroup that is already an ideal.
    pub fn from_submodule(ring: &Arc<FiniteAlgebra>, module: Submodule) -> Result<Ideal, AlgebraError> {
        let ideal = Ideal { ring: ring.clone(), gens: module.basis(ring), module };
        ideal.verify()?;
        Ok(ideal)
    }

    pub fn zero(ring: &Arc<FiniteAlgebra>) -> Ideal {
        Ideal { ring: ring.clone(), gens: Vec::new(), module: Submodule::zero(ring) }
    }

    pub fn unit(ring: &Arc<FiniteAlgebra>) -> Ideal {
        Ideal::new(ring, vec![ring.one()]).expect("unit ideal")
    }

    pub fn nilradical(ring: &Arc<FiniteAlgebra>) -> Ideal {
        Ideal::from_submodule(ring, ring.nilradical().clone()).expect("nilradical is an ideal")
    }

    /// `p R`.
    pub fn p_ideal(ring: &Arc<FiniteAlgebra>) -> Ideal {
        Ideal::new(ring, vec![ring.from_int(ring.p() as i64)]).expect("pR")
    }

    fn verify(&self) -> Result<(), AlgebraError> {
        for g in self.module.basis(&self.ring) {
            for i in 0..self.ring.rank() {
                let x = self.ring.mul(&g, &self.ring.basis_elem(i));
                if !self.module.contains(&self.ring, &x) {
                    return Err(AlgebraError::NotInIdeal);
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        &self.ring
    }

    pub fn gens(&self) -> &[Elem] {
        &self.gens
    }

    pub fn basis(&self) -> Vec<Elem> {
        self.module.basis(&self.ring)
    }

    pub fn module(&self) -> &Submodule {
        &self.module
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.module.contains(&self.ring, x)
    }

    pub fn is_zero(&self) -> bool {
        self.module.is_zero()
    }

    pub fn log_order(&self) -> u32 {
        self.module.log_order()
    }

    pub fn same_as(&self, other: &Ideal) -> bool {
        self.module.same_as(&other.module)
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        let mut gens = Vec::new();
        for a in self.basis() {
            for b in other.basis() {
                gens.push(self.ring.mul(&a, &b));
            }
        }
        Ideal::new(&self.ring, gens).expect("product of ideals")
    }

    pub fn pow(&self, k: u32) -> Ideal {
        let mut acc = Ideal::unit(&self.ring);
        for _ in 0..k {
            acc = acc.product(self);
        }
        acc
    }

    /// Smallest `N` with `I^N = 0`, if reached before the powers stabilise.
    pub fn nilpotency_index(&self) -> Option<u32> {
        let mut acc = Ideal::unit(&self.ring);
        let mut last = acc.log_order();
        for k in 1..=self.ring.log_size() + 1 {
            acc = acc.product(self);
            if acc.is_zero() {
                return Some(k);
            }
            if acc.log_order() == last {
                return None;
            }
            last = acc.log_order();
        }
        None
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Elem {
        self.module.random(&self.ring, rng)
    }

    pub fn enumerate(&self) -> Vec<Elem> {
        self.module.enumerate(&self.ring)
    }
}

/// Nilpotence data of the nilradical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct NilpotenceBounds {
    /// Smallest `N` with `N_R^N = 0`.
    pub nil_index: Option<u32>,
    /// Smallest `e` with `p^e R = 0`.
    pub char_exponent: u32,
}

pub fn nilpotence_bounds(ring: &Arc<FiniteAlgebra>) -> NilpotenceBounds {
    let nil_index = if ring.is_field() {
        Some(1)
    } else {
        Ideal::nilradical(ring).nilpotency_index()
    };
    NilpotenceBounds { nil_index, char_exponent: ring.char_exponent() }
}
