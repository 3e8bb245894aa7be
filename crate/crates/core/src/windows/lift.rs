//! Lifting windows along `𝒟_{B/R} -> 𝒟_R`, the canonical isomorphism
//! between two lifts, crystal values and lifts of the Hodge filtration.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::matrix::{self, SMatrix};
use super::Window;
use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::WindowError;
use crate::frames::{Frame, FrameHom, FrameKind, SElem};
use crate::witt::{exponent_bound, WittVector};

fn require_relative(f: &Frame) -> Result<(), WindowError> {
    if f.kind() != FrameKind::Relative {
        return Err(WindowError::Shape(format!("expected a relative frame, got {}", f.kind().name())));
    }
    Ok(())
}

fn lift_entries(w: &Window, target: &Arc<Frame>) -> Result<SMatrix, WindowError> {
    require_relative(target)?;
    if **w.frame().ring() != **target.quotient() {
        return Err(WindowError::Shape("window ring is not the quotient of the lift".into()));
    }
    let b = target.ring();
    let sec = target
        .projection()
        .section()
        .ok_or_else(|| WindowError::Shape("projection has no additive section".into()))?;
    let lift = |y: &Elem| -> Elem {
        y.iter()
            .zip(&sec)
            .fold(b.zero(), |acc, (c, s)| b.add(&acc, &b.scalar(s, *c as i64)))
    };
    Ok(matrix::map(w.psi(), |x| {
        SElem::W(WittVector::new(b, x.witt().coords().iter().map(&lift).collect()))
    }))
}

/// An entrywise lift of `Ψ` to `𝒟_{B/R}`.
pub fn lift_window(w: &Window, target: &Arc<Frame>) -> Result<Window, WindowError> {
    Window::new(target, w.rank_l(), lift_entries(w, target)?)
}

/// An entrywise lift perturbed by random elements of `W(𝔟)`.
pub fn lift_window_random<R: Rng>(
    w: &Window,
    target: &Arc<Frame>,
    rng: &mut R,
) -> Result<Window, WindowError> {
    let pd = target.pd().expect("relative frame");
    let b = target.ring();
    let mut psi = lift_entries(w, target)?;
    for x in psi.iter_mut().flatten() {
        let n = x.precision();
        let d = WittVector::new(b, (0..n).map(|_| pd.ideal().random(rng)).collect());
        *x = SElem::W(x.witt().add(&d).expect("same length"));
    }
    Window::new(target, w.rank_l(), psi)
}

/// Base change along `𝒟_{B/R} -> 𝒟_R`; `base` must be built on the
/// quotient ring of the relative frame.
pub fn reduce_window(w: &Window, base: &Arc<Frame>) -> Window {
    let f = w.frame();
    let hom = FrameHom::from_ring_hom(f.clone(), base.clone(), f.projection().clone());
    w.base_change(&hom)
}

#[derive(Clone, Debug)]
pub struct CanonicalIso {
    pub matrix: SMatrix,
    pub steps: usize,
    pub bound: usize,
}

/// The isomorphism `w1 -> w2` reducing to the identity, by iterating
/// `U <- Ψ2 Ũ Ψ1^{-1}` from `U = 1` until two iterates agree.
pub fn canonical_iso(w1: &Window, w2: &Window) -> Result<CanonicalIso, WindowError> {
    let f = w1.frame();
    require_relative(f)?;
    if !Arc::ptr_eq(f, w2.frame()) || w1.rank_l() != w2.rank_l() || w1.height() != w2.height() {
        return Err(WindowError::Shape("lifts of different shapes".into()));
    }
    let n = f.len();
    let bound = exponent_bound(f.ring(), n) as usize * n.max(1) + 1;
    let inv1 = matrix::inverse(f, w1.psi()).ok_or(WindowError::NotInvertible)?;
    let mut u = matrix::identity(f, w1.height());
    for steps in 0..=bound {
        let next = matrix::mul(f, &matrix::mul(f, w2.psi(), &w1.twist(&u)?), &inv1);
        if matrix::equal(f, &next, &u) {
            if !w1.is_isomorphism(w2, &next) {
                return Err(WindowError::NonConvergent(bound));
            }
            return Ok(CanonicalIso { matrix: next, steps, bound });
        }
        u = next;
    }
    Err(WindowError::NonConvergent(bound))
}

/// `𝔻(𝒫)_{B/A}`: the free `B`-module `P/𝕀P` with `w0(Ψ)`, and the Hodge
/// filtration `Q/𝕀P` over `A = B/𝔟`.
#[derive(Clone, Debug, Serialize)]
pub struct CrystalValue {
    pub ring: String,
    pub base: String,
    pub rank: usize,
    pub corank: usize,
    pub psi0: Vec<Vec<Elem>>,
    pub hodge: Vec<Vec<Elem>>,
}

/// Crystal value on the frame of `w`, or on `target` after lifting.
pub fn crystal_value(w: &Window, target: Option<&Arc<Frame>>) -> Result<CrystalValue, WindowError> {
    let lifted;
    let w = match target {
        Some(t) => {
            lifted = lift_window(w, t)?;
            &lifted
        }
        None => w,
    };
    let f = w.frame();
    if !f.is_witt_type() {
        return Err(WindowError::Shape("crystal values need a Witt-type frame".into()));
    }
    let a = f.quotient();
    let h = w.height();
    let hodge = (0..w.rank_l())
        .map(|j| (0..h).map(|i| if i == j { a.one() } else { a.zero() }).collect())
        .collect();
    Ok(CrystalValue {
        ring: f.ring().name().to_string(),
        base: a.name().to_string(),
        rank: h,
        corank: w.dimension(),
        psi0: w.psi().iter().map(|r| r.iter().map(|x| x.witt().coord(0).clone()).collect()).collect(),
        hodge,
    })
}

fn elem_inverse(ring: &FiniteAlgebra, a: &[Vec<Elem>]) -> Option<Vec<Vec<Elem>>> {
    let h = a.len();
    let mut m = a.to_vec();
    let mut inv: Vec<Vec<Elem>> =
        (0..h).map(|i| (0..h).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
    for c in 0..h {
        let r = (c..h).find(|r| ring.is_unit(&m[*r][c]))?;
        m.swap(c, r);
        inv.swap(c, r);
        let s = ring.inv(&m[c][c])?;
        m[c] = m[c].iter().map(|x| ring.mul(&s, x)).collect();
        inv[c] = inv[c].iter().map(|x| ring.mul(&s, x)).collect();
        for r in 0..h {
            if r != c {
                let k = m[r][c].clone();
                let (pm, pi) = (m[c].clone(), inv[c].clone());
                m[r] = m[r].iter().zip(&pm).map(|(x, y)| ring.sub(x, &ring.mul(&k, y))).collect();
                inv[r] = inv[r].iter().zip(&pi).map(|(x, y)| ring.sub(x, &ring.mul(&k, y))).collect();
            }
        }
    }
    Some(inv)
}

/// Normalizes `l` column vectors to the form `(1; M)`.
fn normalize_hodge(ring: &FiniteAlgebra, cols: &[Vec<Elem>], l: usize) -> Result<Vec<Vec<Elem>>, WindowError> {
    let top: Vec<Vec<Elem>> = (0..l).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let inv = elem_inverse(ring, &top).ok_or(WindowError::NotASummand)?;
    Ok((0..l)
        .map(|j| {
            (0..cols[0].len())
                .map(|i| {
                    (0..l).fold(ring.zero(), |acc, k| ring.add(&acc, &ring.mul(&cols[k][i], &inv[k][j])))
                })
                .collect()
        })
        .collect())
}

/// Hodge filtration of `P` carried over by `u`: the first `l` columns of
/// `w0(u)`, normalized to `(1; M)`.
pub fn hodge_filtration(f: &Frame, u: &SMatrix, l: usize) -> Result<Vec<Vec<Elem>>, WindowError> {
    let cols: Vec<Vec<Elem>> =
        (0..l).map(|j| u.iter().map(|r| r[j].witt().coord(0).clone()).collect()).collect();
    normalize_hodge(f.ring(), &cols, l)
}

fn hodge_basis_change(w: &Window, m: &[Vec<Elem>]) -> SMatrix {
    let f = w.frame();
    let (h, l) = (w.height(), w.rank_l());
    let mut g = matrix::identity(f, h);
    for (j, col) in m.iter().enumerate() {
        for i in l..h {
            g[i][j] = SElem::W(WittVector::teichmuller(f.ring(), &col[i], f.len()));
        }
    }
    g
}

fn transport(w: &Window, g: &SMatrix) -> Result<SMatrix, WindowError> {
    let f = w.frame();
    let ginv = matrix::inverse(f, g).ok_or(WindowError::NotInvertible)?;
    Ok(matrix::mul(f, &matrix::mul(f, &ginv, w.psi()), &w.twist(g)?))
}

/// The window over `𝒟_B` lifting `w` (over `𝒟_{B/R}`, nilpotent PD) whose
/// Hodge filtration is spanned by the columns `hodge`.
pub fn lift_hodge(w: &Window, hodge: &[Vec<Elem>], target: &Arc<Frame>) -> Result<Window, WindowError> {
    let f = w.frame();
    require_relative(f)?;
    let pd = f.pd().expect("relative frame");
    if !pd.is_nilpotent() {
        return Err(WindowError::NotNilpotentPD);
    }
    if target.kind() != FrameKind::Dieudonne || !Arc::ptr_eq(target.ring(), f.ring()) {
        return Err(WindowError::Shape("target must be 𝒟_B on the same ring".into()));
    }
    let l = w.rank_l();
    if hodge.len() != l || hodge.iter().any(|c| c.len() != w.height()) {
        return Err(WindowError::NotASummand);
    }
    let m = normalize_hodge(f.ring(), hodge, l)?;
    if m.iter().any(|c| c[l..].iter().any(|x| !pd.contains(x))) {
        return Err(WindowError::NotASummand);
    }
    let g = hodge_basis_change(w, &m);
    Window::new(target, l, transport(w, &g)?)
}

/// Exhaustive comparison of window lifts of `w` to `𝒟_B` with lifts of
/// its Hodge filtration.
#[derive(Clone, Debug, Serialize)]
pub struct LiftEnumeration {
    pub basis_changes: usize,
    pub classes: usize,
    pub summand_lifts: usize,
    pub well_defined: bool,
    pub injective: bool,
    pub surjective: bool,
    pub lift_hodge_agrees: bool,
}

impl LiftEnumeration {
    pub fn is_bijection(&self) -> bool {
        self.well_defined && self.injective && self.surjective && self.lift_hodge_agrees
    }
}

const MAX_ENUMERATION: usize = 1 << 16;

/// Every lift is `Ψ_G = G^{-1} Ψ G̃` for some `G ≡ 1 mod W(𝔟)`; two lifts
/// are identified when `G2^{-1} G1` is a window map over `𝒟_B`.
pub fn enumerate_lifts(w: &Window, target: &Arc<Frame>) -> Result<LiftEnumeration, WindowError> {
    let f = w.frame();
    require_relative(f)?;
    let pd = f.pd().expect("relative frame");
    let ring = f.ring();
    let (h, l, n) = (w.height(), w.rank_l(), f.len());
    let ideal = pd.ideal().enumerate();
    let per_entry = ideal.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    let total = per_entry.checked_pow((h * h) as u32).unwrap_or(usize::MAX);
    if total > MAX_ENUMERATION {
        return Err(WindowError::Shape(format!("{total} basis changes is too many to enumerate")));
    }
    let digit = |mut k: usize| -> WittVector {
        let coords = (0..n)
            .map(|_| {
                let c = ideal[k % ideal.len()].clone();
                k /= ideal.len();
                c
            })
            .collect();
        WittVector::new(ring, coords)
    };
    let one = matrix::identity(f, h);
    let mut reps: Vec<(SMatrix, Window, Vec<Vec<Elem>>)> = Vec::new();
    let mut well_defined = true;
    for idx in 0..total {
        let mut k = idx;
        let mut g = one.clone();
        for row in g.iter_mut() {
            for x in row.iter_mut() {
                let d = digit(k % per_entry);
                k /= per_entry;
                *x = f.add(x, &SElem::W(d));
            }
        }
        let lift = Window::new(target, l, transport(w, &g)?)?;
        let hodge = hodge_filtration(f, &g, l)?;
        let mut found = false;
        for (gr, wr, hr) in &reps {
            let ginv = matrix::inverse(f, gr).ok_or(WindowError::NotInvertible)?;
            let u = matrix::mul(f, &ginv, &g);
            if lift.is_isomorphism(wr, &u) {
                found = true;
                well_defined &= *hr == hodge;
                break;
            }
        }
        if !found {
            reps.push((g, lift, hodge));
        }
    }
    let mut hodges: Vec<&Vec<Vec<Elem>>> = reps.iter().map(|r| &r.2).collect();
    hodges.sort();
    hodges.dedup();
    let injective = hodges.len() == reps.len();
    let b = ideal.len();
    let summand_lifts = b.checked_pow(((h - l) * l) as u32).unwrap_or(usize::MAX);
    let surjective = hodges.len() == summand_lifts;
    let mut lift_hodge_agrees = true;
    for (g, wr, hr) in &reps {
        let lw = lift_hodge(w, hr, target)?;
        let m = hodge_basis_change(w, hr);
        let minv = matrix::inverse(f, &m).ok_or(WindowError::NotInvertible)?;
        lift_hodge_agrees &= wr.is_isomorphism(&lw, &matrix::mul(f, &minv, g));
    }
    Ok(LiftEnumeration {
        basis_changes: total,
        classes: reps.len(),
        summand_lifts,
        well_defined,
        injective,
        surjective,
        lift_hodge_agrees,
    })
}
