//! `𝕎(B, δ) = 𝕎(B) + W̃(b)` for a divided power ideal `b ⊂ B`, with the
//! `W̃(b)` part held in Log coordinates.

use std::sync::Arc;

use crate::algebra::{DividedPowerStructure, Elem, FiniteAlgebra};
use crate::error::{WittError, ZinkError};
use crate::witt::{ghost_in, log_coords, log_inverse, u0, WittVector};

use super::ZinkElement;

#[derive(Clone, Debug)]
pub struct RelativeZinkElement {
    base: ZinkElement,
    log_tail: Vec<Elem>,
    pd: DividedPowerStructure,
}

/// Ghost components `w_i(u0^{-1})` in `B`.
pub fn u0_inverse_ghosts(ring: &Arc<FiniteAlgebra>, n: usize) -> Vec<Elem> {
    let inv = u0(ring, n).inverse().expect("u0 is a unit");
    ghost_in(ring, inv.coords())
}

impl RelativeZinkElement {
    pub fn new(
        base: ZinkElement,
        log_tail: Vec<Elem>,
        pd: DividedPowerStructure,
    ) -> Result<RelativeZinkElement, ZinkError> {
        if !Arc::ptr_eq(base.ring(), pd.ring()) {
            return Err(WittError::RingMismatch.into());
        }
        if log_tail.len() != base.len() {
            return Err(WittError::LengthMismatch(base.len(), log_tail.len()).into());
        }
        if let Some(i) = log_tail.iter().position(|a| !pd.contains(a)) {
            return Err(WittError::NotInIdeal(i).into());
        }
        Ok(RelativeZinkElement { base, log_tail, pd })
    }

    /// The element of `W̃(b)` with the given Log coordinates.
    pub fn from_log(log_tail: Vec<Elem>, pd: DividedPowerStructure) -> Result<Self, ZinkError> {
        let base = ZinkElement::zero(pd.ring(), log_tail.len());
        Self::new(base, log_tail, pd)
    }

    pub fn base(&self) -> &ZinkElement {
        &self.base
    }

    pub fn log_tail(&self) -> &[Elem] {
        &self.log_tail
    }

    pub fn pd(&self) -> &DividedPowerStructure {
        &self.pd
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Witt coordinates of the sum, truncated to the working length.
    pub fn to_witt(&self) -> Result<WittVector, ZinkError> {
        let ring = self.base.ring();
        let tail = log_inverse(ring, &self.log_tail, &self.pd, self.len())?;
        Ok(self.base.to_witt().add(&tail)?)
    }

    pub fn w0(&self) -> Elem {
        let ring = self.base.ring();
        ring.add(&self.base.w0(), &self.log_tail[0])
    }

    /// Membership in `𝕀_{B/R}`: `w0` lies in `b`.
    pub fn in_ideal(&self) -> bool {
        !self.is_empty() && self.pd.contains(&self.w0())
    }

    pub fn tail_is_zero(&self) -> bool {
        let ring = self.base.ring();
        self.log_tail.iter().all(|a| ring.is_zero(a))
    }

    /// Moves `[w0(base)]` into the tail so that the base lies in `𝕀_B`.
    fn normalize(&self) -> Result<RelativeZinkElement, ZinkError> {
        let ring = self.base.ring();
        let b = self.base.w0();
        if !self.pd.contains(&b) {
            return Err(ZinkError::NotInIdeal);
        }
        let n = self.len();
        let tb = WittVector::teichmuller(ring, &b, n);
        let base = ZinkElement::decompose(&self.base.to_witt().sub(&tb)?);
        let logb = log_coords(&tb, &self.pd)?;
        let log_tail = self.log_tail.iter().zip(&logb).map(|(a, c)| ring.add(a, c)).collect();
        Ok(RelativeZinkElement { base, log_tail, pd: self.pd.clone() })
    }

    /// `t̃𝕗1`: `𝕗1` on the base and the weighted shift
    /// `[a0, a1, ...] -> [w0(u0^{-1}) a1, w1(u0^{-1}) a2, ...]` on the tail.
    pub fn tilde_ff1(&self) -> Result<RelativeZinkElement, ZinkError> {
        if !self.in_ideal() {
            return Err(ZinkError::NotInIdeal);
        }
        let z = self.normalize()?;
        let ring = z.base.ring().clone();
        let n = z.len();
        let g = u0_inverse_ghosts(&ring, n);
        let log_tail = (1..n).map(|i| ring.mul(&g[i - 1], &z.log_tail[i])).collect();
        Ok(RelativeZinkElement { base: z.base.ff1()?, log_tail, pd: z.pd })
    }

    /// Shift on the tail alone, keeping the length; used to test nilpotence.
    pub fn tail_shift(&self) -> RelativeZinkElement {
        let ring = self.base.ring().clone();
        let n = self.len();
        let g = u0_inverse_ghosts(&ring, n);
        let mut log_tail: Vec<Elem> =
            (1..n).map(|i| ring.mul(&g[i - 1], &self.log_tail[i])).collect();
        log_tail.push(ring.zero());
        RelativeZinkElement { base: self.base.clone(), log_tail, pd: self.pd.clone() }
    }

    /// Number of tail shifts until the tail vanishes, up to `max`.
    pub fn tail_nilpotence_steps(&self, max: usize) -> Option<usize> {
        let mut z = self.clone();
        for step in 0..=max {
            if z.tail_is_zero() {
                return Some(step);
            }
            z = z.tail_shift();
        }
        None
    }
}
