//! Truncated `p`-typical Witt vectors over finite algebras.
//!
//! Two evaluation strategies are available: the cached universal
//! polynomials (short lengths only) and ghost arithmetic on a free cover of
//! the ring followed by projection. They are cross-checked in tests.
//!
//! Length ledger: `v` maps length `n` to `n + 1`; `f` maps length `n` to
//! `n - 1`, except over rings with `pR = 0` where it is computed
//! coordinatewise and keeps the length. Binary operations require equal
//! lengths.

mod group;
mod int;
mod log;
mod poly;

pub use int::{
    frobenius_power_u0_mod, from_ghost_int, from_ghost_mod, ghost_int, integer_mod, u0_ghost,
    u0_integer,
};
pub use group::{exponent_bound, WittGroup};
pub use log::{divided_coeff, log_coords, log_inverse, log_inverse_finite};
pub use poly::{max_poly_length, term_counts, universal_polys, UniversalPolys};

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::{AlgebraHom, Cover, Elem, FiniteAlgebra};
use crate::error::WittError;
use crate::modular::Zpm;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WittStrategy {
    /// Ghost lift, the only strategy valid at every length.
    #[default]
    Auto,
    Polynomial,
    GhostLift,
}

#[derive(Clone)]
pub struct WittVector {
    ring: Arc<FiniteAlgebra>,
    coords: Vec<Elem>,
}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| self.ring.format(c)).collect();
        write!(f, "W[{}]({})", self.ring.name(), parts.join(", "))
    }
}

impl PartialEq for WittVector {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && *self.ring == *other.ring
    }
}

impl Eq for WittVector {}

fn same_ring(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl WittVector {
    pub fn new(ring: &Arc<FiniteAlgebra>, coords: Vec<Elem>) -> WittVector {
        let coords = coords.iter().map(|c| ring.normalize(c)).collect();
        WittVector { ring: ring.clone(), coords }
    }

    pub fn zero(ring: &Arc<FiniteAlgebra>, n: usize) -> WittVector {
        WittVector { ring: ring.clone(), coords: vec![ring.zero(); n] }
    }

    pub fn one(ring: &Arc<FiniteAlgebra>, n: usize) -> WittVector {
        WittVector::teichmuller(ring, &ring.one(), n)
    }

    /// `[a] = (a, 0, 0, ...)`.
    pub fn teichmuller(ring: &Arc<FiniteAlgebra>, a: &[u64], n: usize) -> WittVector {
        let mut coords = vec![ring.zero(); n];
        if n > 0 {
            coords[0] = ring.normalize(a);
        }
        WittVector { ring: ring.clone(), coords }
    }

    /// The image of an integer.
    pub fn from_int(ring: &Arc<FiniteAlgebra>, c: i64, n: usize) -> WittVector {
        let z = work_zpm(ring, n);
        let coords = integer_mod(&z, c, n);
        WittVector::from_integer_coords(ring, &coords)
    }

    /// The image of an integral Witt vector given by residues of its coordinates.
    pub fn from_integer_coords(ring: &Arc<FiniteAlgebra>, coords: &[u64]) -> WittVector {
        let m = ring.zpm().modulus();
        let coords = coords.iter().map(|c| ring.from_int((c % m) as i64)).collect();
        WittVector { ring: ring.clone(), coords }
    }

    pub fn random<R: Rng>(ring: &Arc<FiniteAlgebra>, n: usize, rng: &mut R) -> WittVector {
        WittVector { ring: ring.clone(), coords: (0..n).map(|_| ring.random(rng)).collect() }
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Elem {
        &self.coords[i]
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn truncate(&self, n: usize) -> WittVector {
        assert!(n <= self.len(), "cannot extend a truncated Witt vector");
        WittVector { ring: self.ring.clone(), coords: self.coords[..n].to_vec() }
    }

    /// Pads with zero coordinates; only meaningful for finite-support vectors.
    pub fn zero_extend(&self, n: usize) -> WittVector {
        let mut coords = self.coords.clone();
        coords.resize(n.max(self.len()), self.ring.zero());
        WittVector { ring: self.ring.clone(), coords }
    }

    /// Index of the last nonzero coordinate plus one.
    pub fn support_len(&self) -> usize {
        self.coords
            .iter()
            .rposition(|c| !self.ring.is_zero(c))
            .map_or(0, |i| i + 1)
    }

    fn check(&self, other: &WittVector) -> Result<(), WittError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(WittError::RingMismatch);
        }
        if self.len() != other.len() {
            return Err(WittError::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    /// Ghost components computed in the ring itself.
    pub fn ghost(&self) -> Vec<Elem> {
        ghost_in(&self.ring, &self.coords)
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector, WittError> {
        self.add_with(other, WittStrategy::Auto)
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector, WittError> {
        self.mul_with(other, WittStrategy::Auto)
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector, WittError> {
        self.check(other)?;
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WittVector {
        if self.ring.p() != 2 {
            let coords = self.coords.iter().map(|c| self.ring.neg(c)).collect();
            return WittVector { ring: self.ring.clone(), coords };
        }
        let minus_one = WittVector::from_int(&self.ring, -1, self.len());
        self.mul(&minus_one).expect("same shape")
    }

    pub fn add_with(&self, other: &WittVector, strategy: WittStrategy) -> Result<WittVector, WittError> {
        self.check(other)?;
        match strategy {
            WittStrategy::Polynomial => {
                let polys = universal_polys(self.ring.p(), self.len())?;
                let coords = polys.eval(&self.ring, &polys.sum, &self.coords, &other.coords);
                Ok(WittVector { ring: self.ring.clone(), coords })
            }
            _ => Ok(ghost_lift(&self.ring, &[self, other], self.len(), |c, g| {
                (0..g[0].len()).map(|i| c.add(&g[0][i], &g[1][i])).collect()
            })),
        }
    }

    pub fn mul_with(&self, other: &WittVector, strategy: WittStrategy) -> Result<WittVector, WittError> {
        self.check(other)?;
        match strategy {
            WittStrategy::Polynomial => {
                let polys = universal_polys(self.ring.p(), self.len())?;
                let coords = polys.eval(&self.ring, &polys.prod, &self.coords, &other.coords);
                Ok(WittVector { ring: self.ring.clone(), coords })
            }
            _ => Ok(ghost_lift(&self.ring, &[self, other], self.len(), |c, g| {
                (0..g[0].len()).map(|i| c.mul(&g[0][i], &g[1][i])).collect()
            })),
        }
    }

    pub fn scale(&self, c: i64) -> WittVector {
        let k = WittVector::from_int(&self.ring, c, self.len());
        self.mul(&k).expect("same shape")
    }

    pub fn pow(&self, mut e: u64) -> WittVector {
        let mut base = self.clone();
        let mut acc = WittVector::one(&self.ring, self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same shape");
            }
        }
        acc
    }

    /// `[a] x = (a x_0, a^p x_1, a^{p^2} x_2, ...)`.
    pub fn mul_teichmuller(&self, a: &[u64]) -> WittVector {
        let p = self.ring.p();
        let mut ap = a.to_vec();
        let mut coords = Vec::with_capacity(self.len());
        for c in &self.coords {
            coords.push(self.ring.mul(&ap, c));
            ap = self.ring.pow(&ap, p);
        }
        WittVector { ring: self.ring.clone(), coords }
    }

    /// Whether `p R = 0`, in which case `f` is coordinatewise.
    fn char_p(&self) -> bool {
        self.ring.char_exponent() <= 1
    }

    /// Frobenius. Length `n - 1` in general, length `n` when `pR = 0`.
    pub fn frobenius(&self) -> WittVector {
        let p = self.ring.p();
        if self.char_p() {
            let coords = self.coords.iter().map(|c| self.ring.pow(c, p)).collect();
            return WittVector { ring: self.ring.clone(), coords };
        }
        if self.len() <= 1 {
            return WittVector::zero(&self.ring, 0);
        }
        ghost_lift(&self.ring, &[self], self.len() - 1, |_, g| g[0][1..].to_vec())
    }

    /// Frobenius followed by truncation to length `n - 1`, uniform in the ring.
    pub fn frobenius_trunc(&self) -> WittVector {
        let f = self.frobenius();
        let n = self.len().saturating_sub(1);
        f.truncate(n.min(f.len()))
    }

    pub fn frobenius_pow(&self, k: usize) -> WittVector {
        (0..k).fold(self.clone(), |x, _| x.frobenius())
    }

    /// Inverse Frobenius over a perfect field: coordinatewise `p`-th roots.
    pub fn frobenius_inverse(&self) -> Result<WittVector, WittError> {
        if !self.ring.is_field() {
            return Err(WittError::Algebra(crate::error::AlgebraError::NotAdmissible(
                "inverse Frobenius needs a perfect field".into(),
            )));
        }
        let coords = self.coords.iter().map(|c| self.ring.frobenius_inverse(c)).collect();
        Ok(WittVector { ring: self.ring.clone(), coords })
    }

    /// Verschiebung `(0, x_0, ..., x_{n-1})`, length `n + 1`.
    pub fn verschiebung(&self) -> WittVector {
        let mut coords = Vec::with_capacity(self.len() + 1);
        coords.push(self.ring.zero());
        coords.extend(self.coords.iter().cloned());
        WittVector { ring: self.ring.clone(), coords }
    }

    /// Verschiebung keeping length `n` (drops the last coordinate).
    pub fn verschiebung_trunc(&self) -> WittVector {
        self.verschiebung().truncate(self.len())
    }

    /// `v^{-1}`: drops a leading zero coordinate.
    pub fn verschiebung_inverse(&self) -> Result<WittVector, WittError> {
        if self.is_empty() || !self.ring.is_zero(&self.coords[0]) {
            return Err(WittError::NotInImageOfV);
        }
        Ok(WittVector { ring: self.ring.clone(), coords: self.coords[1..].to_vec() })
    }

    /// Inverse of a unit (`x_0` a unit in `R`) by Newton iteration.
    pub fn inverse(&self) -> Option<WittVector> {
        if self.is_empty() {
            return Some(self.clone());
        }
        let inv0 = self.ring.inv(&self.coords[0])?;
        let n = self.len();
        let two = WittVector::from_int(&self.ring, 2, n);
        let one = WittVector::one(&self.ring, n);
        let mut y = WittVector::teichmuller(&self.ring, &inv0, n);
        for _ in 0..128 {
            let xy = self.mul(&y).ok()?;
            if xy == one {
                return Some(y);
            }
            y = y.mul(&two.sub(&xy).ok()?).ok()?;
        }
        None
    }

    /// Applies a ring homomorphism coordinatewise.
    pub fn map(&self, hom: &AlgebraHom) -> WittVector {
        let coords = self.coords.iter().map(|c| hom.apply(c)).collect();
        WittVector { ring: hom.target().clone(), coords }
    }

    /// Reduction to `W(k)` through the residue map.
    pub fn residue(&self) -> WittVector {
        let k = self.ring.residue_field();
        let coords = self.coords.iter().map(|c| self.ring.residue(c)).collect();
        WittVector { ring: k, coords }
    }

    /// Moves a vector over the residue field into the ring through the
    /// Teichmüller section coordinatewise; only a ring map when `R = k`.
    pub fn coords_teichmuller(ring: &Arc<FiniteAlgebra>, a: &WittVector) -> Vec<Elem> {
        a.coords.iter().map(|c| ring.teichmuller(c)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ring": self.ring.name(),
            "coords": self.coords,
        })
    }
}

/// `Z/p^M` large enough to compute integral Witt vectors of length `n` over `ring`.
pub(crate) fn work_zpm(ring: &FiniteAlgebra, n: usize) -> Zpm {
    Zpm::new(ring.p(), ring.zpm().exp() + n as u32 + 1).expect("precision fits")
}

/// Ghost components in any ring.
pub fn ghost_in(ring: &FiniteAlgebra, x: &[Elem]) -> Vec<Elem> {
    let p = ring.p();
    (0..x.len())
        .map(|i| {
            let mut acc = ring.zero();
            for (j, xj) in x.iter().enumerate().take(i + 1) {
                let t = ring.pow(xj, p.pow((i - j) as u32));
                acc = ring.add(&acc, &ring.scalar(&t, p.pow(j as u32) as i64));
            }
            acc
        })
        .collect()
}

fn div_p_pow_exact(ring: &FiniteAlgebra, x: &[u64], e: u32) -> Elem {
    let z = ring.zpm();
    let d = ring.p().pow(e);
    x.iter()
        .map(|c| {
            debug_assert!(c % d == 0 || e >= z.exp(), "inexact ghost division");
            c / d
        })
        .collect()
}

/// Ghost arithmetic on a free cover: lift inputs, combine ghost components,
/// solve for coordinates, project back.
fn ghost_lift(
    ring: &Arc<FiniteAlgebra>,
    inputs: &[&WittVector],
    out_len: usize,
    combine: impl Fn(&FiniteAlgebra, &[Vec<Elem>]) -> Vec<Elem>,
) -> WittVector {
    let n = inputs.iter().map(|x| x.len()).max().unwrap_or(0).max(out_len);
    let prec = ring.zpm().exp() + n as u32 + 1;
    let cover = ring.cover(prec).expect("every constructed ring has a cover");
    let c = &cover.ring;
    let ghosts: Vec<Vec<Elem>> = inputs
        .iter()
        .map(|x| {
            let lifted: Vec<Elem> = x.coords.iter().map(|e| lift_to_cover(&cover, e)).collect();
            ghost_in(c, &lifted)
        })
        .collect();
    let out_ghost = combine(c, &ghosts);
    let coords = solve_in_cover(c, &out_ghost[..out_len]);
    let coords = coords.iter().map(|e| ring.combine(e, &cover.projection)).collect();
    WittVector { ring: ring.clone(), coords }
}

pub(crate) fn lift_to_cover(cover: &Cover, x: &[u64]) -> Elem {
    cover.ring.combine(x, &cover.section)
}

/// Coordinates from ghost components in a ring free over `Z/p^M`.
pub(crate) fn solve_in_cover(c: &FiniteAlgebra, ghost: &[Elem]) -> Vec<Elem> {
    let p = c.p();
    let mut out: Vec<Elem> = Vec::with_capacity(ghost.len());
    for (i, g) in ghost.iter().enumerate() {
        let mut r = g.clone();
        for (j, s) in out.iter().enumerate() {
            let t = c.pow(s, p.pow((i - j) as u32));
            r = c.sub(&r, &c.scalar(&t, p.pow(j as u32) as i64));
        }
        out.push(div_p_pow_exact(c, &r, i as u32));
    }
    out
}

/// `u0 = v^{-1}(p - [p])` for `p = 2`, and `1` for odd `p`, at length `n`.
pub fn u0(ring: &Arc<FiniteAlgebra>, n: usize) -> WittVector {
    let z = work_zpm(ring, n);
    WittVector::from_integer_coords(ring, &frobenius_power_u0_mod(&z, 0, n))
}

/// `c = u0 f(u0) f^2(u0) ...`, the product truncated once the factors are 1.
pub fn c_unit(ring: &Arc<FiniteAlgebra>, n: usize) -> WittVector {
    let one = WittVector::one(ring, n);
    if ring.p() != 2 {
        return one;
    }
    let z = work_zpm(ring, n);
    let mut c = one.clone();
    for k in 0..64 {
        let factor = WittVector::from_integer_coords(ring, &frobenius_power_u0_mod(&z, k, n));
        if factor == one {
            break;
        }
        c = c.mul(&factor).expect("same shape");
    }
    c
}


/// Smallest `M` with `p^M W_n(N_R) = 0`. `W_n(N_R)` is additively generated
/// by the `v^i [a]`, and `p^M v^i[a] = v^i(p^M [a])`, so probing Teichmüller
/// vectors of all nilpotent `a` at length `n` suffices.
pub fn nil_p_exponent(ring: &Arc<FiniteAlgebra>, n: usize) -> Option<u32> {
    let nil = ring.nilradical().enumerate(ring);
    let p = WittVector::from_int(ring, ring.p() as i64, n);
    let mut worst = 0;
    for a in nil {
        let mut x = WittVector::teichmuller(ring, &a, n);
        let mut e = 0;
        while !x.is_zero() {
            if e > 64 {
                return None;
            }
            x = x.mul(&p).expect("same shape");
            e += 1;
        }
        worst = worst.max(e);
    }
    Some(worst)
}

#[cfg(test)]
mod tests;
