//! Finite local test rings presented by a basis with additive orders and
//! multiplication structure constants over `Z/p^m`.
//!
//! An element is a coordinate vector `Vec<u64>`; coordinate `i` lives in
//! `Z/p^{orders[i]}`. Every algebra knows its residue field `k = F_{p^d}`,
//! its nilradical, and (for Witt arithmetic) a torsion-free cover at any
//! requested `p`-adic precision.

mod build;
mod hom;
mod ideal;
mod pd;
mod spec;

pub use build::{build_truncated_poly_algebra, CoeffKind, Relation};
pub(crate) use build::monomials_of_degree;
pub use hom::AlgebraHom;
pub use ideal::{nilpotence_bounds, Ideal, NilpotenceBounds, Submodule};
pub use pd::{DividedPowerStructure, PdKind};
pub use spec::RingSpec;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::error::AlgebraError;
use crate::modular::{self, Matrix, Zpm};

pub type Elem = Vec<u64>;

/// The prime, working precision and residue degree of a ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct PrimeParams {
    pub p: u64,
    pub m: u32,
    pub d: u32,
}

impl PrimeParams {
    pub fn new(p: u64, m: u32, d: u32) -> Result<Self, AlgebraError> {
        if !modular::is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if m == 0 || d == 0 {
            return Err(AlgebraError::Spec("m and d must be at least 1".into()));
        }
        Ok(PrimeParams { p, m, d })
    }
}

/// How to rebuild a torsion-free cover of the ring at a higher precision.
#[derive(Clone, Debug)]
pub(crate) enum CoverRecipe {
    /// Free `Z/p^M`-module on the same monomial basis, pure monomial relations only.
    Monomial(build::MonomialData),
    /// Quotient of a parent ring: cover the parent, then project.
    Quotient {
        parent: Arc<FiniteAlgebra>,
        /// images of parent basis in this ring
        projection: Matrix,
        /// a preimage in the parent of each basis element of this ring
        section: Matrix,
    },
}

/// A surjection `cover -> ring` from a ring that is free over `Z/p^M`.
#[derive(Clone, Debug)]
pub struct Cover {
    pub ring: Arc<FiniteAlgebra>,
    /// images of cover basis elements in the target
    pub projection: Matrix,
    /// additive section target -> cover on basis elements
    pub section: Matrix,
}

pub struct FiniteAlgebra {
    pub(crate) params: PrimeParams,
    pub(crate) zpm: Zpm,
    pub(crate) labels: Vec<String>,
    pub(crate) orders: Vec<u32>,
    pub(crate) table: Vec<Vec<Elem>>,
    pub(crate) one: Elem,
    /// `None` for the residue field itself.
    pub(crate) field: Option<Arc<FiniteAlgebra>>,
    /// Residue map on basis elements, as coordinates in the field basis.
    pub(crate) residue: Matrix,
    /// Additive section of the residue map on the field basis.
    pub(crate) lift: Matrix,
    /// Coefficients of the monic defining polynomial of `k` (fields only).
    pub(crate) field_poly: Vec<u64>,
    pub(crate) recipe: CoverRecipe,
    pub(crate) name: String,
    nil: OnceLock<Submodule>,
    teich: OnceLock<Vec<Elem>>,
    covers: Mutex<HashMap<u32, Arc<Cover>>>,
}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAlgebra")
            .field("name", &self.name)
            .field("p", &self.params.p)
            .field("labels", &self.labels)
            .field("orders", &self.orders)
            .finish()
    }
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.params == other.params
                && self.orders == other.orders
                && self.table == other.table
                && self.residue == other.residue)
    }
}

impl FiniteAlgebra {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        params: PrimeParams,
        labels: Vec<String>,
        orders: Vec<u32>,
        table: Vec<Vec<Elem>>,
        one: Elem,
        field: Option<Arc<FiniteAlgebra>>,
        residue: Matrix,
        lift: Matrix,
        field_poly: Vec<u64>,
        recipe: CoverRecipe,
        name: String,
    ) -> Result<Self, AlgebraError> {
        let top = orders.iter().copied().max().unwrap_or(1).max(1);
        let zpm = Zpm::new(params.p, top)?;
        let alg = FiniteAlgebra {
            params,
            zpm,
            labels,
            orders,
            table,
            one,
            field,
            residue,
            lift,
            field_poly,
            recipe,
            name,
            nil: OnceLock::new(),
            teich: OnceLock::new(),
            covers: Mutex::new(HashMap::new()),
        };
        alg.check_structure()?;
        Ok(alg)
    }

    pub fn params(&self) -> PrimeParams {
        self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn zpm(&self) -> &Zpm {
        &self.zpm
    }

    /// Smallest `e` with `p^e * 1 = 0`.
    pub fn char_exponent(&self) -> u32 {
        let mut e = 0;
        let mut x = self.one();
        while !self.is_zero(&x) {
            x = self.scalar(&x, self.params.p as i64);
            e += 1;
        }
        e
    }

    pub fn is_field(&self) -> bool {
        self.field.is_none()
    }

    /// The residue field `k`.
    pub fn residue_field(self: &Arc<Self>) -> Arc<FiniteAlgebra> {
        match &self.field {
            Some(k) => k.clone(),
            None => self.clone(),
        }
    }

    pub fn field_degree(&self) -> usize {
        self.params.d as usize
    }

    /// Number of elements, as `log_p`.
    pub fn log_size(&self) -> u32 {
        self.orders.iter().sum()
    }

    // ---- element arithmetic ----

    pub fn zero(&self) -> Elem {
        vec![0; self.rank()]
    }

    pub fn one(&self) -> Elem {
        self.one.clone()
    }

    pub fn basis_elem(&self, i: usize) -> Elem {
        let mut e = self.zero();
        e[i] = 1 % self.order_modulus(i);
        e
    }

    #[inline]
    pub(crate) fn order_modulus(&self, i: usize) -> u64 {
        self.params.p.pow(self.orders[i])
    }

    pub fn normalize(&self, x: &[u64]) -> Elem {
        x.iter()
            .enumerate()
            .map(|(i, c)| c % self.order_modulus(i))
            .collect()
    }

    pub fn from_int(&self, c: i64) -> Elem {
        self.scalar(&self.one, c)
    }

    pub fn is_zero(&self, x: &[u64]) -> bool {
        x.iter().all(|c| *c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| (x + y) % self.order_modulus(i))
            .collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| {
                let m = self.order_modulus(i);
                (x + m - y % m) % m
            })
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> Elem {
        self.sub(&self.zero(), a)
    }

    pub fn scalar(&self, a: &[u64], c: i64) -> Elem {
        a.iter()
            .enumerate()
            .map(|(i, x)| {
                let m = self.order_modulus(i) as i128;
                ((*x as i128 * (c as i128).rem_euclid(m)).rem_euclid(m)) as u64
            })
            .collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Elem {
        let z = &self.zpm;
        let mut acc = vec![0u64; self.rank()];
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if *bj == 0 {
                    continue;
                }
                let c = z.mul(*ai, *bj);
                for (k, t) in self.table[i][j].iter().enumerate() {
                    if *t != 0 {
                        acc[k] = z.add(acc[k], z.mul(c, *t));
                    }
                }
            }
        }
        self.normalize(&acc)
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Elem {
        let mut base = a.to_vec();
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        r
    }

    pub fn sum<'a>(&self, xs: impl IntoIterator<Item = &'a Elem>) -> Elem {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Linear combination of basis images with integer coefficients.
    pub(crate) fn combine(&self, coeffs: &[u64], images: &[Elem]) -> Elem {
        let mut acc = self.zero();
        for (c, img) in coeffs.iter().zip(images) {
            if *c != 0 {
                acc = self.add(&acc, &self.scalar(img, *c as i64));
            }
        }
        acc
    }

    // ---- residue field ----

    /// Image in the residue field `k` (coordinates over `F_p`).
    pub fn residue(&self, x: &[u64]) -> Elem {
        let p = self.params.p;
        let d = self.field_degree();
        if self.is_field() {
            return x.iter().map(|c| c % p).collect();
        }
        let mut out = vec![0u64; d];
        for (c, row) in x.iter().zip(&self.residue) {
            for (o, r) in out.iter_mut().zip(row) {
                *o = (*o + (c % p) * r) % p;
            }
        }
        out
    }

    /// Some preimage of a residue field element.
    pub fn lift_residue(&self, a: &[u64]) -> Elem {
        if self.is_field() {
            return a.to_vec();
        }
        self.combine(a, &self.lift)
    }

    pub fn is_unit(&self, x: &[u64]) -> bool {
        self.residue(x).iter().any(|c| *c != 0)
    }

    pub fn is_nilpotent(&self, x: &[u64]) -> bool {
        !self.is_unit(x)
    }

    /// Inverse of a unit: `x^{-1} = x^{|R^*|-1}` is avoided; Newton iteration
    /// from the residue-field inverse instead.
    pub fn inv(&self, x: &[u64]) -> Option<Elem> {
        if !self.is_unit(x) {
            return None;
        }
        let k = self.field.as_ref();
        let r = self.residue(x);
        let rinv = match k {
            Some(k) => k.field_inv(&r)?,
            None => self.field_inv(&r)?,
        };
        let mut y = self.lift_residue(&rinv);
        // y <- y(2 - xy); converges since 1 - xy is nilpotent
        let two = self.from_int(2);
        for _ in 0..64 {
            let e = self.sub(&self.one(), &self.mul(x, &y));
            if self.is_zero(&e) {
                return Some(y);
            }
            y = self.mul(&y, &self.sub(&two, &self.mul(x, &y)));
        }
        None
    }

    /// Inverse in a field by exponentiation `a^{q-2}`.
    pub(crate) fn field_inv(&self, a: &[u64]) -> Option<Elem> {
        if self.is_zero(a) {
            return None;
        }
        let q = self.params.p.pow(self.params.d);
        Some(self.pow(a, q - 2))
    }

    /// Enumerates all elements of the residue field (only meaningful for fields
    /// or used through `residue_field`).
    pub fn enumerate(&self) -> Vec<Elem> {
        let mut out = vec![Vec::new()];
        for i in 0..self.rank() {
            let m = self.order_modulus(i);
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..m).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// Index of a residue-field element in `enumerate()` order.
    fn field_index(&self, a: &[u64]) -> usize {
        let p = self.params.p as usize;
        a.iter().fold(0usize, |acc, c| acc * p + *c as usize)
    }

    /// `a^{1/p}` in a perfect field: `a^{p^{d-1}}`.
    pub fn frobenius_inverse(&self, a: &[u64]) -> Elem {
        let mut x = a.to_vec();
        for _ in 1..self.params.d {
            x = self.pow(&x, self.params.p);
        }
        x
    }

    /// The Teichmüller section `k -> R` on a residue field element.
    pub fn teichmuller(self: &Arc<Self>, a: &[u64]) -> Elem {
        if self.is_field() {
            return a.to_vec();
        }
        let k = self.residue_field();
        let table = self.teich.get_or_init(|| {
            k.enumerate()
                .iter()
                .map(|alpha| self.teichmuller_uncached(alpha))
                .collect()
        });
        table[k.field_index(a)].clone()
    }

    /// Lift, then iterate `y -> y^{p^d}` until two iterates agree.
    pub fn teichmuller_uncached(&self, a: &[u64]) -> Elem {
        let q = self.params.p.pow(self.params.d);
        let mut y = self.lift_residue(a);
        loop {
            let next = self.pow(&y, q);
            if next == y {
                return y;
            }
            y = next;
        }
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Elem {
        (0..self.rank())
            .map(|i| rng.gen_range(0..self.order_modulus(i)))
            .collect()
    }

    pub fn random_nilpotent<R: Rng>(&self, rng: &mut R) -> Elem {
        let nil = self.nilradical();
        nil.random(self, rng)
    }

    /// The nilradical, computed as the kernel of the residue map.
    pub fn nilradical(&self) -> &Submodule {
        self.nil.get_or_init(|| {
            if self.is_field() {
                return Submodule::zero(self);
            }
            let gens = ideal::residue_kernel(self);
            Submodule::new(self, gens)
        })
    }

    pub fn format(&self, x: &[u64]) -> String {
        let terms: Vec<String> = x
            .iter()
            .zip(&self.labels)
            .filter(|(c, _)| **c != 0)
            .map(|(c, l)| if l == "1" { format!("{c}") } else { format!("{c}*{l}") })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    // ---- covers for Witt arithmetic ----

    /// A surjection onto this ring from a ring free over `Z/p^prec`.
    pub fn cover(self: &Arc<Self>, prec: u32) -> Option<Arc<Cover>> {
        if let Some(c) = self.covers.lock().expect("cover cache").get(&prec) {
            return Some(c.clone());
        }
        let cover = match &self.recipe {
            CoverRecipe::Monomial(data) => {
                let ring = Arc::new(build::monomial_cover(data, self.residue_field(), prec).ok()?);
                let (projection, section) = build::monomial_cover_maps(data, &ring, self);
                Cover { ring, projection, section }
            }
            CoverRecipe::Quotient { parent, projection, section } => {
                let pc = parent.cover(prec)?;
                // cover -> parent -> self
                let proj: Matrix = pc
                    .projection
                    .iter()
                    .map(|img| self.combine(img, projection))
                    .collect();
                let sec: Matrix = section
                    .iter()
                    .map(|pre| pc.ring.combine(pre, &pc.section))
                    .collect();
                Cover { ring: pc.ring.clone(), projection: proj, section: sec }
            }
        };
        let cover = Arc::new(cover);
        self.covers
            .lock()
            .expect("cover cache")
            .insert(prec, cover.clone());
        Some(cover)
    }

    fn check_structure(&self) -> Result<(), AlgebraError> {
        let n = self.rank();
        if self.table.len() != n || self.table.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::BadStructure("table shape".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if self.table[i][j] != self.table[j][i] {
                    return Err(AlgebraError::BadStructure(format!(
                        "commutativity on ({}, {})",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        for i in 0..n {
            let bi = self.basis_elem(i);
            if self.mul(&self.one, &bi) != bi {
                return Err(AlgebraError::BadStructure(format!("unit on {}", self.labels[i])));
            }
            for j in 0..n {
                let bj = self.basis_elem(j);
                let bij = self.mul(&bi, &bj);
                for k in 0..n {
                    let bk = self.basis_elem(k);
                    if self.mul(&bij, &bk) != self.mul(&bi, &self.mul(&bj, &bk)) {
                        return Err(AlgebraError::BadStructure(format!(
                            "associativity on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
                // p^{o_i} b_i b_j must vanish
                let killed = self.scalar(&bij, self.order_modulus(i) as i64);
                if !self.is_zero(&killed) {
                    return Err(AlgebraError::BadStructure(format!(
                        "additive order on ({}, {})",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that the residue map is a ring homomorphism onto `k` whose
    /// kernel is nilpotent, i.e. that the ring is admissible local.
    pub fn check_admissible(self: &Arc<Self>) -> Result<(), AlgebraError> {
        if self.is_field() {
            return Ok(());
        }
        let k = self.residue_field();
        if k.residue(&self.residue(&self.one)) != k.one() {
            return Err(AlgebraError::NotAdmissible("residue(1) != 1".into()));
        }
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                let bi = self.basis_elem(i);
                let bj = self.basis_elem(j);
                let lhs = self.residue(&self.mul(&bi, &bj));
                let rhs = k.mul(&self.residue(&bi), &self.residue(&bj));
                if lhs != rhs {
                    return Err(AlgebraError::NotAdmissible(format!(
                        "residue map not multiplicative on ({}, {})",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        for (j, l) in self.lift.iter().enumerate() {
            if self.residue(l) != k.basis_elem(j) {
                return Err(AlgebraError::NotAdmissible("residue section".into()));
            }
        }
        let bounds = nilpotence_bounds(self);
        if bounds.nil_index.is_none() {
            return Err(AlgebraError::NotAdmissible("nilradical is not nilpotent".into()));
        }
        Ok(())
    }

    /// Multiplication by `x` as an integer matrix on basis coordinates.
    pub fn mul_matrix(&self, x: &[u64]) -> Matrix {
        (0..self.rank())
            .map(|i| self.mul(x, &self.basis_elem(i)))
            .collect()
    }

    /// Relation rows `p^{o_i} e_i` presenting the additive group over `Z/p^top`.
    pub fn order_relations(&self) -> Vec<Elem> {
        (0..self.rank())
            .filter(|i| self.orders[*i] < self.zpm.exp())
            .map(|i| {
                let mut r = vec![0; self.rank()];
                r[i] = self.order_modulus(i);
                r
            })
            .collect()
    }

    /// Generators of `Ann(a)` as a group.
    pub fn annihilator(&self, a: &[u64]) -> Vec<Elem> {
        let m = self.mul_matrix(a);
        let sol = crate::modular::solve_linear(&self.zpm, &m, self.rank(), self.rank());
        sol.kernel
            .basis()
            .iter()
            .map(|x| self.normalize(x))
            .filter(|x| !self.is_zero(x))
            .collect()
    }

    /// Some `y` with `y a = x`, if one exists.
    pub fn divide(&self, x: &[u64], a: &[u64]) -> Option<Elem> {
        let mut m = self.mul_matrix(a);
        m.extend(self.order_relations());
        let rows = m.len();
        let y = crate::modular::solve_particular(&self.zpm, &m, rows, self.rank(), x)?;
        Some(self.normalize(&y[..self.rank()]))
    }

    /// Some `y` with `p y = x`, if one exists.
    pub fn div_p(&self, x: &[u64]) -> Option<Elem> {
        let p = self.params.p;
        let mut y = Vec::with_capacity(x.len());
        for (i, c) in x.iter().enumerate() {
            if self.orders[i] == 0 {
                y.push(0);
                continue;
            }
            if c % p != 0 {
                return None;
            }
            y.push((c / p) % self.order_modulus(i));
        }
        Some(y)
    }
}

#[cfg(test)]
mod tests;
