//! The Zink ring `𝕎(R) = sW(k) ⊕ Ŵ(N_R)` inside `W(R)`, the modified
//! Verschiebung `𝕧 = v(u0 ·)` and its inverse `𝕗1`, the v-stabilised ring
//! `𝕎⁺(R)` for `p = 2`, and the enlarged ring `𝕎(B, δ)`.

mod relative;
mod vstab;

#[cfg(test)]
mod tests;

use std::sync::Arc;

use crate::algebra::{nilpotence_bounds, Elem, FiniteAlgebra};
use crate::error::ZinkError;
use crate::witt::{u0, WittVector};

pub use relative::{u0_inverse_ghosts, RelativeZinkElement};
pub use vstab::{xi, VStabElement};

/// Extra coordinates inspected past the support bound when certifying that
/// a nilpotent part has finite support.
pub const TAIL_WINDOW: usize = 3;

/// `s(a) = Σ p^i [t(a_i^{p^{-i}})]` in `W_n(R)`, where `t` is the
/// Teichmüller section `k -> R`.
pub fn section_witt(ring: &Arc<FiniteAlgebra>, a: &WittVector) -> WittVector {
    let n = a.len();
    let k = a.ring();
    if ring.char_exponent() == 1 {
        // `t` is a ring map in characteristic p, so s acts coordinatewise.
        let coords = a.coords().iter().map(|c| ring.teichmuller(c)).collect();
        return WittVector::new(ring, coords);
    }
    let mut acc = WittVector::zero(ring, n);
    let mut pi = WittVector::one(ring, n);
    let p = WittVector::from_int(ring, ring.p() as i64, n);
    for (i, ai) in a.coords().iter().enumerate() {
        if !k.is_zero(ai) {
            let mut beta = ai.clone();
            for _ in 0..i {
                beta = k.frobenius_inverse(&beta);
            }
            let term = pi.mul_teichmuller(&ring.teichmuller(&beta));
            acc = acc.add(&term).expect("same length");
        }
        if i + 1 < n {
            pi = pi.mul(&p).expect("same length");
        }
    }
    acc
}

/// Per-ring bound on how far the support of a finite nilpotent Witt vector
/// may grow under one addition: `⌈log_p N⌉` for `N_R^N = 0`.
pub fn support_growth(ring: &Arc<FiniteAlgebra>) -> usize {
    let n = nilpotence_bounds(ring).nil_index.unwrap_or(1).max(1) as u64;
    let p = ring.p();
    let mut g = 0;
    let mut q = 1u64;
    while q < n {
        q *= p;
        g += 1;
    }
    g
}

/// Element of `𝕎(R)` at Witt length `n`: a vector over the residue field
/// pushed through `s` (zero-padded), plus a nilpotent part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZinkElement {
    wk: WittVector,
    nil: WittVector,
}

impl ZinkElement {
    pub fn zero(ring: &Arc<FiniteAlgebra>, n: usize) -> ZinkElement {
        let k = ring.residue_field();
        ZinkElement { wk: WittVector::zero(&k, n), nil: WittVector::zero(ring, n) }
    }

    pub fn one(ring: &Arc<FiniteAlgebra>, n: usize) -> ZinkElement {
        let k = ring.residue_field();
        ZinkElement { wk: WittVector::one(&k, n), nil: WittVector::zero(ring, n) }
    }

    /// `s(a)` as an element of `𝕎(R)`.
    pub fn section(ring: &Arc<FiniteAlgebra>, a: &WittVector) -> ZinkElement {
        ZinkElement { wk: a.clone(), nil: WittVector::zero(ring, a.len()) }
    }

    /// Builds an element from its parts; `nil` must have nilpotent entries.
    pub fn from_parts(wk: WittVector, nil: WittVector) -> Result<ZinkElement, ZinkError> {
        if wk.len() != nil.len() {
            return Err(crate::error::WittError::LengthMismatch(wk.len(), nil.len()).into());
        }
        let ring = nil.ring();
        if let Some(i) = nil.coords().iter().position(|c| !ring.is_nilpotent(c)) {
            return Err(ZinkError::NotInZink(i));
        }
        Ok(ZinkElement { wk, nil })
    }

    /// Splits a truncated vector into `s(x̄) + (x - s(x̄))`. Every class in
    /// `W_n(R)` has such a decomposition; no support check is made.
    pub fn decompose(x: &WittVector) -> ZinkElement {
        let wk = x.residue();
        let s = section_witt(x.ring(), &wk);
        let nil = x.sub(&s).expect("same length");
        ZinkElement { wk, nil }
    }

    /// Membership test for the finite-support vector `x` (coordinates past
    /// its length are zero). The nilpotent part is computed on a guard
    /// window beyond the support bound and must vanish there.
    pub fn from_witt(x: &WittVector) -> Result<ZinkElement, ZinkError> {
        let n = x.len();
        let start = n + support_growth(x.ring());
        let full = Self::decompose(&x.zero_extend(start + TAIL_WINDOW));
        Self::check_tail(&full.nil, start)?;
        Ok(full.truncate(n))
    }

    /// Certifies that `nil` vanishes from `start` to its end.
    pub(crate) fn check_tail(nil: &WittVector, start: usize) -> Result<(), ZinkError> {
        let ring = nil.ring();
        match (start..nil.len()).find(|i| !ring.is_zero(nil.coord(*i))) {
            Some(i) => Err(ZinkError::NotInZink(i)),
            None => Ok(()),
        }
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        self.nil.ring()
    }

    pub fn len(&self) -> usize {
        self.nil.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nil.is_empty()
    }

    pub fn wk_part(&self) -> &WittVector {
        &self.wk
    }

    pub fn nil_part(&self) -> &WittVector {
        &self.nil
    }

    pub fn to_witt(&self) -> WittVector {
        section_witt(self.ring(), &self.wk).add(&self.nil).expect("same length")
    }

    pub fn truncate(&self, n: usize) -> ZinkElement {
        ZinkElement { wk: self.wk.truncate(n), nil: self.nil.truncate(n) }
    }

    pub fn is_zero(&self) -> bool {
        self.wk.is_zero() && self.nil.is_zero()
    }

    /// `w0`, the first ghost component.
    pub fn w0(&self) -> Elem {
        self.to_witt().coord(0).clone()
    }

    /// Membership in `𝕀_R = ker w0`.
    pub fn in_ideal(&self) -> bool {
        self.ring().is_zero(&self.w0())
    }

    /// Residue of `w0` in `k`.
    pub fn residue(&self) -> Elem {
        self.wk.coord(0).clone()
    }

    fn lift(
        &self,
        other: &ZinkElement,
        op: impl Fn(&WittVector, &WittVector) -> Result<WittVector, crate::error::WittError>,
    ) -> Result<ZinkElement, ZinkError> {
        if self.len() != other.len() {
            return Err(crate::error::WittError::LengthMismatch(self.len(), other.len()).into());
        }
        // s is applied to the zero-padded lift of the W_n(k) part, so it is
        // not multiplicative at finite length; the nil part absorbs this.
        let wk = op(&self.wk, &other.wk)?;
        let x = op(&self.to_witt(), &other.to_witt())?;
        let s = section_witt(self.ring(), &wk);
        Ok(ZinkElement { wk, nil: x.sub(&s)? })
    }

    pub fn add(&self, other: &ZinkElement) -> Result<ZinkElement, ZinkError> {
        self.lift(other, WittVector::add)
    }

    pub fn sub(&self, other: &ZinkElement) -> Result<ZinkElement, ZinkError> {
        self.lift(other, WittVector::sub)
    }

    pub fn mul(&self, other: &ZinkElement) -> Result<ZinkElement, ZinkError> {
        self.lift(other, WittVector::mul)
    }

    pub fn neg(&self) -> ZinkElement {
        ZinkElement { wk: self.wk.neg(), nil: Self::decompose(&self.to_witt().neg()).nil }
    }

    /// Frobenius; loses one coordinate unless `pR = 0`.
    pub fn frobenius(&self) -> ZinkElement {
        let x = self.to_witt().frobenius();
        let wk = self.wk.frobenius().truncate(x.len());
        let s = section_witt(self.ring(), &wk);
        ZinkElement { nil: x.sub(&s).expect("same length"), wk }
    }

    /// `𝕧(z) = v(u0 z)`, one coordinate longer.
    pub fn vv(&self) -> ZinkElement {
        Self::decompose(&vv(&self.to_witt()))
    }

    /// `𝕗1 = 𝕧^{-1}` on `𝕀_R`, one coordinate shorter.
    pub fn ff1(&self) -> Result<ZinkElement, ZinkError> {
        Ok(Self::decompose(&ff1(&self.to_witt())?))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "wk_part": self.wk.coords(),
            "nil_part": self.nil.coords(),
        })
    }
}

/// `𝕧(x) = v(u0 x)`, from length `n` to `n + 1`.
pub fn vv(x: &WittVector) -> WittVector {
    let u = u0(x.ring(), x.len());
    u.mul(x).expect("same length").verschiebung()
}

/// `𝕗1(x) = u0^{-1} v^{-1}(x)` for `w0(x) = 0`, from length `n` to `n - 1`.
pub fn ff1(x: &WittVector) -> Result<WittVector, ZinkError> {
    let y = x.verschiebung_inverse().map_err(|_| ZinkError::NotInIdeal)?;
    let uinv = u0(x.ring(), y.len()).inverse().expect("u0 is a unit");
    Ok(uinv.mul(&y)?)
}

/// `γ_p(v(x)) = (p^{p-2} / (p-1)!) v(x^p)`. For `p = 2` this is only a
/// divided power on the ideal of `𝕎⁺`, so `plus` must be set.
pub fn gamma_on_ideal(z: &WittVector, plus: bool) -> Result<WittVector, ZinkError> {
    let ring = z.ring();
    let p = ring.p();
    if p == 2 && !plus {
        return Err(ZinkError::UnsupportedPD(
            "p = 2 needs the v-stabilised ideal".to_string(),
        ));
    }
    let x = z.verschiebung_inverse().map_err(|_| ZinkError::NotInIdeal)?;
    let y = x.pow(p).verschiebung();
    let n = y.len();
    // The scalar lives in W(Z_(p)), not in R: invert (p-1)! as a Witt vector.
    let fact = (1..p).product::<u64>() as i64;
    let scalar = WittVector::from_int(ring, p.pow(p as u32 - 2) as i64, n)
        .mul(&WittVector::from_int(ring, fact, n).inverse().expect("(p-1)! is a unit"))?;
    Ok(scalar.mul(&y)?)
}
