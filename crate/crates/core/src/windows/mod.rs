//! Windows over frames in normal representation: `P = L ⊕ T` free with the
//! `L`-basis first, `Q = L ⊕ I T`, and `Ψ` with `Ψ|L = F1`, `Ψ|T = F`.

mod dieudonne;
mod dual;
mod lift;
pub mod matrix;

#[cfg(test)]
mod tests;

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::WindowError;
use crate::frames::{Frame, FrameHom, SElem, SModel};
use crate::abelian::GroupHom;

pub use dieudonne::{DieudonneModule, DieudonneReport};
pub use dual::{pairing_check, PairingReport};
pub use lift::{
    canonical_iso, crystal_value, enumerate_lifts, hodge_filtration, lift_hodge, lift_window,
    lift_window_random, reduce_window, CanonicalIso, CrystalValue, LiftEnumeration,
};
pub use matrix::SMatrix;

#[derive(Clone, Debug)]
pub struct Window {
    frame: Arc<Frame>,
    l: usize,
    psi: SMatrix,
}

impl Window {
    /// Normal representation with `rank L = l`; `Ψ` must be invertible.
    pub fn new(frame: &Arc<Frame>, l: usize, psi: SMatrix) -> Result<Window, WindowError> {
        let h = psi.len();
        if l > h || psi.iter().any(|r| r.len() != h) {
            return Err(WindowError::Shape(format!("{h}x? matrix with rank L = {l}")));
        }
        if !matrix::is_invertible(frame, &psi) {
            return Err(WindowError::NotInvertible);
        }
        Ok(Window { frame: frame.clone(), l, psi })
    }

    /// The unit window `(S, I, σ, σ1)`: `L = 0`, `T = S`.
    pub fn unit(frame: &Arc<Frame>) -> Window {
        Window { frame: frame.clone(), l: 0, psi: matrix::identity(frame, 1) }
    }

    /// `(S, S, σ, ·)`: `L = S`, `T = 0`.
    pub fn etale_unit(frame: &Arc<Frame>, h: usize) -> Window {
        Window { frame: frame.clone(), l: h, psi: matrix::identity(frame, h) }
    }

    pub fn random<R: Rng>(frame: &Arc<Frame>, h: usize, l: usize, rng: &mut R) -> Window {
        loop {
            let psi: SMatrix = (0..h).map(|_| (0..h).map(|_| frame.random(rng)).collect()).collect();
            if let Ok(w) = Window::new(frame, l, psi) {
                return w;
            }
        }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn psi(&self) -> &SMatrix {
        &self.psi
    }

    pub fn height(&self) -> usize {
        self.psi.len()
    }

    pub fn rank_l(&self) -> usize {
        self.l
    }

    /// `rank T = rank P/Q`.
    pub fn dimension(&self) -> usize {
        self.height() - self.l
    }

    pub fn in_q(&self, x: &[SElem]) -> bool {
        x[self.l..].iter().all(|c| self.frame.in_ideal(c))
    }

    fn combine(&self, coeffs: &[SElem]) -> Vec<SElem> {
        let f = &self.frame;
        (0..self.height())
            .map(|i| {
                coeffs
                    .iter()
                    .enumerate()
                    .fold(f.zero(), |acc, (j, c)| f.add(&acc, &f.mul(c, &self.psi[i][j])))
            })
            .collect()
    }

    pub fn f1(&self, q: &[SElem]) -> Result<Vec<SElem>, WindowError> {
        let f = &self.frame;
        let mut c = Vec::with_capacity(q.len());
        for (j, x) in q.iter().enumerate() {
            c.push(if j < self.l { f.sigma(x) } else { f.sigma1(x)? });
        }
        Ok(self.combine(&c))
    }

    pub fn f(&self, x: &[SElem]) -> Vec<SElem> {
        let f = &self.frame;
        let c: Vec<SElem> = x
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let s = f.sigma(a);
                if j < self.l {
                    f.mul(f.theta(), &s)
                } else {
                    s
                }
            })
            .collect();
        self.combine(&c)
    }

    pub fn random_q<R: Rng>(&self, rng: &mut R) -> Vec<SElem> {
        (0..self.height())
            .map(|j| if j < self.l { self.frame.random(rng) } else { self.frame.random_ideal(rng) })
            .collect()
    }

    /// Samples `F1(a x) = σ1(a) F(x)` for `a ∈ I` and `F = θ F1` on `Q`.
    pub fn check_axioms<R: Rng>(&self, rng: &mut R, samples: usize) -> Result<(), WindowError> {
        let f = &self.frame;
        let eqv = |a: &[SElem], b: &[SElem]| a.iter().zip(b).all(|(x, y)| f.eq(x, y));
        for _ in 0..samples {
            let a = f.random_ideal(rng);
            let x: Vec<SElem> = (0..self.height()).map(|_| f.random(rng)).collect();
            let ax: Vec<SElem> = x.iter().map(|c| f.mul(&a, c)).collect();
            let lhs = self.f1(&ax)?;
            let s1a = f.sigma1(&a)?;
            let rhs: Vec<SElem> = self.f(&x).iter().map(|c| f.mul(&s1a, c)).collect();
            if !eqv(&lhs, &rhs) {
                return Err(crate::error::FrameError::FrameAxiomViolation {
                    axiom: "F1(ax) = σ1(a) F(x)".into(),
                    witness: format!("{a:?}"),
                }
                .into());
            }
            let q = self.random_q(rng);
            let th: Vec<SElem> = self.f1(&q)?.iter().map(|c| f.mul(f.theta(), c)).collect();
            if !eqv(&self.f(&q), &th) {
                return Err(crate::error::FrameError::FrameAxiomViolation {
                    axiom: "F = θ F1 on Q".into(),
                    witness: format!("{q:?}"),
                }
                .into());
            }
        }
        Ok(())
    }

    /// `Ũ = [[σ(A), θσ(B)], [σ1(C), σ(D)]]` for `U` from `self` to a window
    /// of the same shape; `C` must lie in `I`.
    pub fn twist(&self, u: &SMatrix) -> Result<SMatrix, WindowError> {
        let f = &self.frame;
        let l = self.l;
        let mut out = Vec::with_capacity(u.len());
        for (i, row) in u.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, x) in row.iter().enumerate() {
                r.push(match (i < l, j < l) {
                    (true, false) => f.mul(f.theta(), &f.sigma(x)),
                    (false, true) => f.sigma1(x)?,
                    _ => f.sigma(x),
                });
            }
            out.push(r);
        }
        Ok(out)
    }

    /// `U: self -> other` is a window map: `U(Q) ⊆ Q'` and `Ψ' Ũ = U Ψ`.
    pub fn is_morphism(&self, other: &Window, u: &SMatrix) -> bool {
        let f = &self.frame;
        if self.l != other.l || self.height() != other.height() {
            return false;
        }
        let Ok(t) = self.twist(u) else {
            return false;
        };
        matrix::equal(f, &matrix::mul(f, &other.psi, &t), &matrix::mul(f, u, &self.psi))
    }

    pub fn is_isomorphism(&self, other: &Window, u: &SMatrix) -> bool {
        matrix::is_invertible(&self.frame, u) && self.is_morphism(other, u)
    }

    /// `Ψ' = α(Ψ)`, with the `L`-columns multiplied by `u`.
    pub fn base_change(&self, hom: &FrameHom) -> Window {
        let t = hom.target();
        let mut psi = matrix::map(&self.psi, |x| hom.apply(x));
        for row in psi.iter_mut() {
            for x in row.iter_mut().take(self.l) {
                *x = t.mul(hom.u(), x);
            }
        }
        Window { frame: t.clone(), l: self.l, psi }
    }

    /// Direct sum with basis `(L, L', T, T')`.
    pub fn direct_sum(&self, other: &Window) -> Window {
        let f = &self.frame;
        let (h1, h2) = (self.height(), other.height());
        let order: Vec<(usize, usize)> = (0..self.l)
            .map(|i| (0, i))
            .chain((0..other.l).map(|i| (1, i)))
            .chain((self.l..h1).map(|i| (0, i)))
            .chain((other.l..h2).map(|i| (1, i)))
            .collect();
        let psi = order
            .iter()
            .map(|(a, i)| {
                order
                    .iter()
                    .map(|(b, j)| match (a, b) {
                        (0, 0) => self.psi[*i][*j].clone(),
                        (1, 1) => other.psi[*i][*j].clone(),
                        _ => f.zero(),
                    })
                    .collect()
            })
            .collect();
        Window { frame: f.clone(), l: self.l + other.l, psi }
    }

    pub fn to_fv_module(&self) -> FvModule {
        let f = &self.frame;
        let h = self.height();
        let d1: Vec<SElem> = (0..h).map(|j| if j < self.l { f.theta().clone() } else { f.one() }).collect();
        let d2: Vec<SElem> = (0..h).map(|j| if j < self.l { f.one() } else { f.theta().clone() }).collect();
        let inv = matrix::inverse(f, &self.psi).expect("Ψ is invertible");
        FvModule {
            frame: f.clone(),
            l: self.l,
            f_sharp: matrix::scale_columns(f, &self.psi, &d1),
            v_sharp: matrix::scale_rows(f, &inv, &d2),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "frame": self.frame.kind().name(),
            "ring": self.frame.ring().name(),
            "rank_l": self.l,
            "height": self.height(),
            "dimension": self.dimension(),
            "psi": matrix::to_json(&self.psi),
        })
    }
}

/// `(P, Q, F♯, V♯)` with `F♯ V♯ = θ = V♯ F♯`.
#[derive(Clone, Debug)]
pub struct FvModule {
    pub frame: Arc<Frame>,
    pub l: usize,
    pub f_sharp: SMatrix,
    pub v_sharp: SMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FvReport {
    pub fv_is_theta: bool,
    pub vf_is_theta: bool,
}

impl FvModule {
    pub fn check(&self) -> FvReport {
        let f = &self.frame;
        let h = self.f_sharp.len();
        let theta = matrix::scale(f, f.theta(), &matrix::identity(f, h));
        FvReport {
            fv_is_theta: matrix::equal(f, &matrix::mul(f, &self.f_sharp, &self.v_sharp), &theta),
            vf_is_theta: matrix::equal(f, &matrix::mul(f, &self.v_sharp, &self.f_sharp), &theta),
        }
    }

    pub fn equals(&self, other: &FvModule) -> bool {
        let f = &self.frame;
        self.l == other.l
            && matrix::equal(f, &self.f_sharp, &other.f_sharp)
            && matrix::equal(f, &self.v_sharp, &other.v_sharp)
    }

    /// `(F♯, V♯) -> (V♯ᵀ, F♯ᵀ)`, in the dual basis ordered `(T*, L*)`.
    pub fn dual(&self) -> FvModule {
        let h = self.f_sharp.len();
        let perm = dual::dual_order(h, self.l);
        FvModule {
            frame: self.frame.clone(),
            l: h - self.l,
            f_sharp: matrix::permute(&matrix::transpose(&self.v_sharp), &perm),
            v_sharp: matrix::permute(&matrix::transpose(&self.f_sharp), &perm),
        }
    }

    /// A window with this F-V module: `Ψ = [X | F♯_T]` where `θ X = F♯_L`
    /// and `V♯_L X = 1`. When `θ` is a zero divisor `X` is not unique; the
    /// solution returned is the one found by the linear solver.
    pub fn to_window(&self) -> Result<Window, WindowError> {
        let f = &self.frame;
        let h = self.f_sharp.len();
        let l = self.l;
        if l == 0 {
            return Window::new(f, 0, self.f_sharp.clone());
        }
        let n = self
            .f_sharp
            .iter()
            .chain(&self.v_sharp)
            .flatten()
            .chain(std::iter::once(f.theta()))
            .map(SElem::precision)
            .min()
            .unwrap_or(usize::MAX)
            .min(f.len().max(1));
        let n = if f.is_witt_type() { n } else { usize::MAX };
        let model = SModel::new(f, n);
        let ng = model.ngens();
        let z = model.zpm().clone();
        let cell = |x: &SElem| model.coords(&f.truncate(x, n));
        let (unknowns, eqs) = (h * l, h * l + l * l);
        let mut rows = Vec::with_capacity(unknowns * ng);
        for r in 0..h {
            for c in 0..l {
                for g in 0..ng {
                    let x = model.generator(g);
                    let mut row = vec![0u64; eqs * ng];
                    let put = |row: &mut Vec<u64>, slot: usize, v: &SElem| {
                        row[slot * ng..(slot + 1) * ng].copy_from_slice(&cell(v));
                    };
                    put(&mut row, r * l + c, &f.mul(f.theta(), &x));
                    for i in 0..l {
                        put(&mut row, h * l + i * l + c, &f.mul(&self.v_sharp[i][r], &x));
                    }
                    rows.push(row);
                }
            }
        }
        let mut b = Vec::with_capacity(eqs * ng);
        for row in self.f_sharp.iter() {
            for x in row.iter().take(l) {
                b.extend(cell(x));
            }
        }
        for i in 0..l {
            for c in 0..l {
                b.extend(cell(&if i == c { f.one() } else { f.zero() }));
            }
        }
        let hom = GroupHom { matrix: rows };
        let src = model.group().power(unknowns);
        let tgt = model.group().power(eqs);
        let x = hom
            .preimage(&z, &src, &tgt, &b)
            .ok_or_else(|| WindowError::NoNormalDecomposition("no Ψ with these F♯, V♯".into()))?;
        let psi: SMatrix = (0..h)
            .map(|r| {
                (0..h)
                    .map(|c| {
                        if c < l {
                            let k = (r * l + c) * ng;
                            model.element(&x[k..k + ng])
                        } else {
                            self.f_sharp[r][c].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        Window::new(f, l, psi)
    }
}
