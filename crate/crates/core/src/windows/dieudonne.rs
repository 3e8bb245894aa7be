use std::sync::Arc;

use serde::Serialize;

use super::matrix::{self, SMatrix};
use super::{FvModule, Window};
use crate::error::WindowError;
use crate::frames::{Frame, FrameHom, FrameKind, SElem};

/// Free `W(k)`-module with `f`-linear `F` and `f^{-1}`-linear `V`, given by
/// their matrices on a basis.
#[derive(Clone, Debug)]
pub struct DieudonneModule {
    pub frame: Arc<Frame>,
    pub f: SMatrix,
    pub v: SMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DieudonneReport {
    pub fv_is_p: bool,
    pub vf_is_p: bool,
}

fn sigma_inv(_f: &Frame, x: &SElem) -> Result<SElem, WindowError> {
    Ok(SElem::W(x.witt().frobenius_inverse()?))
}

impl DieudonneModule {
    pub fn height(&self) -> usize {
        self.f.len()
    }

    /// `F σ(V) = p` and `V σ^{-1}(F) = p`.
    pub fn check(&self) -> Result<DieudonneReport, WindowError> {
        let fr = &self.frame;
        let p = matrix::scale(fr, &fr.from_int(fr.p() as i64), &matrix::identity(fr, self.height()));
        let sv = matrix::map(&self.v, |x| fr.sigma(x));
        let mut fi = Vec::new();
        for r in &self.f {
            fi.push(r.iter().map(|x| sigma_inv(fr, x)).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(DieudonneReport {
            fv_is_p: matrix::equal(fr, &matrix::mul(fr, &self.f, &sv), &p),
            vf_is_p: matrix::equal(fr, &matrix::mul(fr, &self.v, &fi), &p),
        })
    }

    /// `Q = V(P) + pP`; a basis adapted to `Q` is chosen first when the
    /// image of `V` mod `p` is not spanned by leading basis vectors.
    pub fn to_window(&self) -> Result<Window, WindowError> {
        let fr = &self.frame;
        let k = fr.ring().residue_field();
        let vbar: Vec<Vec<_>> = self.v.iter().map(|r| r.iter().map(|x| fr.residue(x)).collect()).collect();
        let rank = residue_rank(&k, &vbar);
        let leading: Vec<Vec<_>> = vbar.iter().take(rank).cloned().collect();
        if residue_rank(&k, &leading) != rank || vbar[rank..].iter().flatten().any(|x| !k.is_zero(x)) {
            return Err(WindowError::NoNormalDecomposition(
                "image of V mod p is not spanned by leading basis vectors".into(),
            ));
        }
        let v_sharp = matrix::map(&self.v, |x| fr.sigma(x));
        FvModule { frame: fr.clone(), l: rank, f_sharp: self.f.clone(), v_sharp }.to_window()
    }
}

fn residue_rank(k: &crate::algebra::FiniteAlgebra, m: &[Vec<crate::algebra::Elem>]) -> usize {
    let mut m = m.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..m.len()).find(|r| !k.is_zero(&m[*r][c])) else {
            continue;
        };
        m.swap(rank, r);
        let s = k.inv(&m[rank][c]).expect("field");
        for r in rank + 1..m.len() {
            let t = k.mul(&m[r][c], &s);
            let pivot = m[rank].clone();
            m[r] = m[r].iter().zip(&pivot).map(|(x, y)| k.sub(x, &k.mul(&t, y))).collect();
        }
        rank += 1;
    }
    rank
}

impl Window {
    /// The Dieudonné module of a window over `𝒲_k` or `𝒟_k`, `k` a perfect
    /// field; `𝒟_k` windows are moved to `𝒲_k` first.
    pub fn to_dieudonne_module(&self) -> Result<DieudonneModule, WindowError> {
        let fr = self.frame();
        if !fr.ring().is_field() {
            return Err(WindowError::NotPerfectBase);
        }
        let w = match fr.kind() {
            FrameKind::Witt => self.clone(),
            FrameKind::Dieudonne => {
                let target = Arc::new(Frame::witt(fr.ring(), fr.len())?);
                self.base_change(&FrameHom::inclusion(fr.clone(), target))
            }
            _ => return Err(WindowError::NotPerfectBase),
        };
        let fv = w.to_fv_module();
        let wf = w.frame();
        let mut v = Vec::new();
        for r in &fv.v_sharp {
            v.push(r.iter().map(|x| sigma_inv(wf, x)).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(DieudonneModule { frame: wf.clone(), f: fv.f_sharp, v })
    }
}
