use rand::Rng;
use serde::Serialize;

use super::matrix::{self, SMatrix};
use super::Window;
use crate::frames::SElem;

/// Old index of each dual basis vector; the dual basis is ordered `(T*, L*)`.
pub(crate) fn dual_order(h: usize, l: usize) -> Vec<usize> {
    (l..h).chain(0..l).collect()
}

impl Window {
    /// `L^t = T*`, `T^t = L*` and `Ψ^t = (Ψ^{-1})ᵀ`, so that
    /// `⟨Ψx, Ψ^t x'⟩ = σ⟨x, x'⟩` for the tautological pairing.
    pub fn dual(&self) -> Window {
        let f = self.frame();
        let h = self.height();
        let inv = matrix::inverse(f, self.psi()).expect("Ψ is invertible");
        let psi = matrix::permute(&matrix::transpose(&inv), &dual_order(h, self.rank_l()));
        Window { frame: f.clone(), l: h - self.rank_l(), psi }
    }

    /// Tautological pairing `P × P^t -> S`.
    pub fn pairing_matrix(&self) -> SMatrix {
        let f = self.frame();
        let h = self.height();
        let order = dual_order(h, self.rank_l());
        (0..h)
            .map(|i| (0..h).map(|j| if order[j] == i { f.one() } else { f.zero() }).collect())
            .collect()
    }

    /// Whether `(𝒫^t)^t = 𝒫` under the canonical identification.
    pub fn is_bidual(&self) -> bool {
        let dd = self.dual().dual();
        dd.rank_l() == self.rank_l()
            && self.is_isomorphism(&dd, &matrix::identity(self.frame(), self.height()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingReport {
    /// `⟨Ψ e_i, Ψ^t e'_j⟩ = σ⟨e_i, e'_j⟩` on all basis pairs.
    pub basis_relation: bool,
    /// `⟨L, L^t⟩ = 0 = ⟨T, T^t⟩`.
    pub orthogonality: bool,
    /// `β(Q × Q') ⊆ I` and `β(F1 x, F1' x') = σ1 β(x, x')`, sampled and
    /// compared on the coordinates a truncated input determines.
    pub f1_relation: bool,
}

impl PairingReport {
    pub fn passed(&self) -> bool {
        self.basis_relation && self.orthogonality && self.f1_relation
    }
}

fn pair(w: &Window, b: &SMatrix, x: &[SElem], y: &[SElem]) -> SElem {
    let f = w.frame();
    let mut acc = f.zero();
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            if !f.is_zero(&b[i][j]) {
                acc = f.add(&acc, &f.mul(xi, &f.mul(&b[i][j], yj)));
            }
        }
    }
    acc
}

/// Checks the tautological pairing between `w` and `wt`.
pub fn pairing_check<R: Rng>(w: &Window, wt: &Window, rng: &mut R, samples: usize) -> PairingReport {
    let f = w.frame();
    let b = w.pairing_matrix();
    let lhs = matrix::mul(f, &matrix::mul(f, &matrix::transpose(w.psi()), &b), wt.psi());
    let sb = matrix::map(&b, |x| f.sigma(x));
    let basis_relation = matrix::equal(f, &lhs, &sb);
    let (l, lt) = (w.rank_l(), wt.rank_l());
    let h = w.height();
    let orthogonality = (0..h).all(|i| {
        (0..h).all(|j| {
            let same = (i < l && j < lt) || (i >= l && j >= lt);
            !same || f.is_zero(&b[i][j])
        })
    });
    let mut f1_relation = true;
    for _ in 0..samples {
        let (x, y) = (w.random_q(rng), wt.random_q(rng));
        let bxy = pair(w, &b, &x, &y);
        if !f.in_ideal(&bxy) {
            f1_relation = false;
            break;
        }
        let (Ok(fx), Ok(fy), Ok(s)) = (w.f1(&x), wt.f1(&y), f.sigma1(&bxy)) else {
            f1_relation = false;
            break;
        };
        if !f.eq_at(&pair(w, &b, &fx, &fy), &s, f.determined_len()) {
            f1_relation = false;
            break;
        }
    }
    PairingReport { basis_relation, orthogonality, f1_relation }
}
