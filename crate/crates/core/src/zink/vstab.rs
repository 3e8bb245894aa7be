//! `𝕎⁺(R) = 𝕎(R) + 𝕎(R) v(1)` for `p = 2`, written as `b + [t(ε)] ξ` with
//! `ξ = 2 - v(1)` and `ε ∈ k`.

use std::sync::Arc;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::ZinkError;
use crate::witt::WittVector;

use super::{support_growth, ZinkElement, TAIL_WINDOW};

/// `ξ = p - v(1)` at length `n`.
pub fn xi(ring: &Arc<FiniteAlgebra>, n: usize) -> WittVector {
    let p = WittVector::from_int(ring, ring.p() as i64, n);
    let v1 = WittVector::one(ring, n).verschiebung_trunc();
    p.sub(&v1).expect("same length")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VStabElement {
    base: ZinkElement,
    eps: Elem,
}

fn teich_xi(ring: &Arc<FiniteAlgebra>, eps: &[u64], n: usize) -> WittVector {
    xi(ring, n).mul_teichmuller(&ring.teichmuller(eps))
}

impl VStabElement {
    pub fn new(base: ZinkElement, eps: Elem) -> Result<VStabElement, ZinkError> {
        if base.ring().p() != 2 {
            return Err(ZinkError::NotPrimeTwo);
        }
        Ok(VStabElement { base, eps })
    }

    pub fn from_zink(base: ZinkElement) -> Result<VStabElement, ZinkError> {
        let eps = base.ring().residue_field().zero();
        Self::new(base, eps)
    }

    pub fn base(&self) -> &ZinkElement {
        &self.base
    }

    /// The class in `𝕎⁺(R)/𝕎(R) ≅ k`.
    pub fn eps(&self) -> &Elem {
        &self.eps
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        self.base.ring()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn in_zink(&self) -> bool {
        self.ring().residue_field().is_zero(&self.eps)
    }

    pub fn to_witt(&self) -> WittVector {
        let t = teich_xi(self.ring(), &self.eps, self.len());
        self.base.to_witt().add(&t).expect("same length")
    }

    /// Rewrites the truncated vector `x` with a prescribed `ε`.
    fn with_eps(x: &WittVector, eps: Elem) -> VStabElement {
        let t = teich_xi(x.ring(), &eps, x.len());
        let base = ZinkElement::decompose(&x.sub(&t).expect("same length"));
        VStabElement { base, eps }
    }

    /// Membership test for a finite-support vector: searches `ε ∈ k` with
    /// `x - [t(ε)] ξ ∈ 𝕎(R)`, certified on a guard window.
    pub fn from_witt(x: &WittVector) -> Result<VStabElement, ZinkError> {
        let ring = x.ring();
        if ring.p() != 2 {
            return Err(ZinkError::NotPrimeTwo);
        }
        let n = x.len();
        let start = n + support_growth(ring);
        let full = x.zero_extend(start + TAIL_WINDOW);
        let mut first_err = None;
        for eps in ring.residue_field().enumerate() {
            let cand = Self::with_eps(&full, eps);
            match ZinkElement::check_tail(cand.base.nil_part(), start) {
                Ok(()) => {
                    return Ok(VStabElement { base: cand.base.truncate(n), eps: cand.eps });
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Err(first_err.expect("k is nonempty"))
    }

    fn check_len(&self, other: &VStabElement) -> Result<(), ZinkError> {
        if self.len() != other.len() {
            return Err(crate::error::WittError::LengthMismatch(self.len(), other.len()).into());
        }
        Ok(())
    }

    pub fn add(&self, other: &VStabElement) -> Result<VStabElement, ZinkError> {
        self.check_len(other)?;
        let k = self.ring().residue_field();
        let x = self.to_witt().add(&other.to_witt())?;
        Ok(Self::with_eps(&x, k.add(&self.eps, &other.eps)))
    }

    pub fn neg(&self) -> VStabElement {
        let k = self.ring().residue_field();
        Self::with_eps(&self.to_witt().neg(), k.neg(&self.eps))
    }

    pub fn sub(&self, other: &VStabElement) -> Result<VStabElement, ZinkError> {
        self.add(&other.neg())
    }

    /// Product via `ξ² = 2ξ` and `z ξ ≡ [z̄] ξ` modulo `𝕎(R)`.
    pub fn mul(&self, other: &VStabElement) -> Result<VStabElement, ZinkError> {
        self.check_len(other)?;
        let k = self.ring().residue_field();
        let eps = k.add(
            &k.mul(&self.base.residue(), &other.eps),
            &k.mul(&other.base.residue(), &self.eps),
        );
        let x = self.to_witt().mul(&other.to_witt())?;
        Ok(Self::with_eps(&x, eps))
    }

    /// Verschiebung, one coordinate longer. `v(s(a))` contributes `a_0^{1/2}`
    /// to `ε`, and `v([t(e)] ξ) = 2 v([t(e)]) - v²([t(e)²])`.
    pub fn v(&self) -> VStabElement {
        let ring = self.ring();
        let k = ring.residue_field();
        let eps = k.add(&k.frobenius_inverse(&self.base.residue()), &v2_class(ring, &self.eps));
        Self::with_eps(&self.to_witt().verschiebung(), eps)
    }

    /// `f1 = v^{-1}` on elements with `w0 = 0`, one coordinate shorter.
    pub fn f1(&self) -> Result<VStabElement, ZinkError> {
        let ring = self.ring();
        let k = ring.residue_field();
        let x = self.to_witt();
        let y = x.verschiebung_inverse().map_err(|_| ZinkError::NotInIdeal)?;
        let r = k.frobenius_inverse(&ring.residue(y.coord(0)));
        let target = k.sub(&self.eps, &r);
        let eps = k
            .enumerate()
            .into_iter()
            .find(|e| v2_class(ring, e) == target)
            .expect("v is injective on the quotient");
        Ok(Self::with_eps(&y, eps))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "base": self.base.to_json(), "eps": self.eps })
    }
}

/// Class of `v²([t(e)²])` in `𝕎⁺/𝕎`, the `ε` of `v([t(e)] ξ)` up to sign.
fn v2_class(ring: &Arc<FiniteAlgebra>, e: &[u64]) -> Elem {
    let k = ring.residue_field();
    if k.is_zero(e) {
        return k.zero();
    }
    let t = ring.teichmuller(&k.mul(e, e));
    let x = WittVector::teichmuller(ring, &t, 1).verschiebung().verschiebung();
    let cls = VStabElement::from_witt(&x).expect("v preserves the v-stabilised ring");
    k.neg(&cls.eps)
}
