use std::sync::Arc;

use serde::Serialize;

use super::BkSetup;
use crate::algebra::Elem;
use crate::error::BkError;
use crate::frames::{Frame, FrameKind, SElem};
use crate::windows::{matrix, SMatrix, Window};

/// `φ: Q -> Q^{(σ)}` on a free `𝔖_a`-module, with a certificate `ψ`,
/// `φψ = E`.
#[derive(Clone, Debug)]
pub struct BreuilWindow {
    frame: Arc<Frame>,
    phi: SMatrix,
    psi: SMatrix,
}

/// A window over `ℬ_a` and the basis change `B` of `Q` it was read in.
#[derive(Clone, Debug)]
pub struct BkConversion {
    pub window: Window,
    pub basis_change: SMatrix,
}

fn to_s(m: &[Vec<Elem>]) -> SMatrix {
    m.iter().map(|r| r.iter().map(|x| SElem::A(x.clone())).collect()).collect()
}

/// `φ = A diag(1_r, E) B` with `A`, `B` invertible.
fn decompose(f: &Frame, phi: &SMatrix) -> Result<(SMatrix, SMatrix, usize), BkError> {
    let h = phi.len();
    let mut m = phi.clone();
    let mut left = matrix::identity(f, h);
    let mut right = matrix::identity(f, h);
    let mut r = 0;
    while r < h {
        let Some((i, j)) = (r..h).flat_map(|i| (r..h).map(move |j| (i, j))).find(|(i, j)| f.is_unit(&m[*i][*j]))
        else {
            break;
        };
        m.swap(r, i);
        left.swap(r, i);
        for row in m.iter_mut().chain(right.iter_mut()) {
            row.swap(r, j);
        }
        let s = f.inv(&m[r][r]).expect("unit pivot");
        m[r] = m[r].iter().map(|x| f.mul(&s, x)).collect();
        left[r] = left[r].iter().map(|x| f.mul(&s, x)).collect();
        for k in 0..h {
            if k != r && !f.is_zero(&m[k][r]) {
                let c = m[k][r].clone();
                let (pm, pl) = (m[r].clone(), left[r].clone());
                m[k] = m[k].iter().zip(&pm).map(|(x, y)| f.sub(x, &f.mul(&c, y))).collect();
                left[k] = left[k].iter().zip(&pl).map(|(x, y)| f.sub(x, &f.mul(&c, y))).collect();
            }
        }
        for k in 0..h {
            if k != r && !f.is_zero(&m[r][k]) {
                let c = m[r][k].clone();
                for row in m.iter_mut().chain(right.iter_mut()) {
                    let v = f.sub(&row[k], &f.mul(&c, &row[r]));
                    row[k] = v;
                }
            }
        }
        r += 1;
    }
    // left · φ · right = diag(1_r, m'), and m' = E U with U invertible
    let e = &f.bk().expect("bk frame").e;
    let mut u = matrix::identity(f, h);
    for i in r..h {
        for j in r..h {
            let q = f
                .ring()
                .divide(m[i][j].elem(), e)
                .ok_or_else(|| BkError::NotAWindow("cokernel of φ is not killed by E".into()))?;
            u[i][j] = SElem::A(q);
        }
    }
    if !matrix::is_invertible(f, &u) {
        return Err(BkError::NotAWindow("φ / E is not invertible on the non-unit block".into()));
    }
    let a = matrix::inverse(f, &left).expect("elementary");
    let b = matrix::mul(f, &u, &matrix::inverse(f, &right).expect("elementary"));
    Ok((a, b, r))
}

fn diag_e(f: &Frame, h: usize, r: usize, e_first: bool) -> SMatrix {
    let e = SElem::A(f.bk().expect("bk frame").e.clone());
    let mut d = matrix::identity(f, h);
    for (i, row) in d.iter_mut().enumerate() {
        if (i < r) == e_first {
            row[i] = e.clone();
        }
    }
    d
}

impl BreuilWindow {
    pub fn new(setup: &BkSetup, phi: Vec<Vec<Elem>>) -> Result<BreuilWindow, BkError> {
        let f = setup.frame();
        let phi = to_s(&phi);
        if phi.iter().any(|r| r.len() != phi.len()) {
            return Err(BkError::NotAWindow("φ must be square".into()));
        }
        let (a, b, r) = decompose(f, &phi)?;
        let h = phi.len();
        let psi = matrix::mul(
            f,
            &matrix::mul(f, &matrix::inverse(f, &b).expect("invertible"), &diag_e(f, h, r, true)),
            &matrix::inverse(f, &a).expect("invertible"),
        );
        let e = matrix::scale(f, &SElem::A(setup.e().clone()), &matrix::identity(f, h));
        if !matrix::equal(f, &matrix::mul(f, &phi, &psi), &e) {
            return Err(BkError::NotAWindow("no ψ with φψ = E".into()));
        }
        Ok(BreuilWindow { frame: f.clone(), phi, psi })
    }

    pub fn height(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &SMatrix {
        &self.phi
    }

    /// The certificate with `φψ = E`.
    pub fn psi(&self) -> &SMatrix {
        &self.psi
    }

    /// `P = Q^{(σ)}` with `F1♯` inverse to `φ`: `Ψ = A^{-1} σ(B^{-1})`.
    pub fn to_window(&self) -> Result<BkConversion, BkError> {
        let f = &self.frame;
        let (a, b, r) = decompose(f, &self.phi)?;
        let binv = matrix::inverse(f, &b).expect("invertible");
        let psi = matrix::mul(
            f,
            &matrix::inverse(f, &a).expect("invertible"),
            &matrix::map(&binv, |x| f.sigma(x)),
        );
        let window = Window::new(f, r, psi)?;
        Ok(BkConversion { window, basis_change: b })
    }

    /// `φ = Ψ^{-1} diag(1_L, E_T)`.
    pub fn from_window(w: &Window) -> Result<BreuilWindow, BkError> {
        let f = w.frame();
        if f.kind() != FrameKind::BreuilKisin {
            return Err(BkError::NotAWindow("window is not over a Breuil–Kisin frame".into()));
        }
        let h = w.height();
        let inv = matrix::inverse(f, w.psi()).ok_or(BkError::NotAWindow("Ψ is singular".into()))?;
        let phi = matrix::mul(f, &inv, &diag_e(f, h, w.rank_l(), false));
        let a = w.psi().clone();
        let psi = matrix::mul(f, &diag_e(f, h, w.rank_l(), true), &a);
        Ok(BreuilWindow { frame: f.clone(), phi, psi })
    }

    /// Whether `g: Q -> Q'` satisfies `σ(g) φ = φ' g`.
    pub fn is_isomorphism(&self, other: &BreuilWindow, g: &SMatrix) -> bool {
        let f = &self.frame;
        matrix::is_invertible(f, g)
            && matrix::equal(
                f,
                &matrix::mul(f, &matrix::map(g, |x| f.sigma(x)), &self.phi),
                &matrix::mul(f, &other.phi, g),
            )
    }

    pub fn direct_sum(&self, other: &BreuilWindow) -> BreuilWindow {
        let f = &self.frame;
        let block = |a: &SMatrix, b: &SMatrix| -> SMatrix {
            let (h1, h2) = (a.len(), b.len());
            (0..h1 + h2)
                .map(|i| {
                    (0..h1 + h2)
                        .map(|j| match (i < h1, j < h1) {
                            (true, true) => a[i][j].clone(),
                            (false, false) => b[i - h1][j - h1].clone(),
                            _ => f.zero(),
                        })
                        .collect()
                })
                .collect()
        };
        BreuilWindow { frame: f.clone(), phi: block(&self.phi, &other.phi), psi: block(&self.psi, &other.psi) }
    }
}

/// The display over `𝒟_{R_a}` at Witt length `n`: base change along `κ`.
pub fn bk_to_display(setup: &BkSetup, bw: &BreuilWindow, n: usize) -> Result<Window, BkError> {
    let hom = setup.kappa_hom(n, FrameKind::Dieudonne)?;
    Ok(bw.to_window()?.window.base_change(&hom))
}

/// `(𝔖/p^e)^h` with `φ`, `ψ`.
#[derive(Clone, Debug)]
pub struct BreuilModule {
    pub torsion: u32,
    pub phi: Vec<Vec<Elem>>,
    pub psi: Vec<Vec<Elem>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BreuilModuleReport {
    pub phi_psi: bool,
    pub psi_phi: bool,
    pub torsion: bool,
    pub failures: Vec<String>,
}

impl BreuilModuleReport {
    pub fn valid(&self) -> bool {
        self.phi_psi && self.psi_phi && self.torsion
    }
}

impl BreuilModule {
    /// Checks `φψ = E = ψφ` on the basis of `(𝔖/p^e)^h`.
    pub fn validate(&self, setup: &BkSetup) -> BreuilModuleReport {
        let f = setup.frame();
        let mut failures = Vec::new();
        let h = self.phi.len();
        let torsion = self.torsion >= 1
            && self.torsion <= setup.spec.m
            && self.psi.len() == h
            && self.phi.iter().chain(&self.psi).all(|r| r.len() == h);
        if !torsion {
            failures.push(format!("not a presentation of (𝔖/p^{})^{h}", self.torsion));
            return BreuilModuleReport { phi_psi: false, psi_phi: false, torsion, failures };
        }
        let pe = setup.p().pow(self.torsion);
        let (phi, psi) = (to_s(&self.phi), to_s(&self.psi));
        let e = matrix::scale(f, &SElem::A(setup.e().clone()), &matrix::identity(f, h));
        let mut check = |name: &str, prod: SMatrix| {
            let diff = matrix::sub(f, &prod, &e);
            let ok = diff
                .iter()
                .flatten()
                .all(|x| x.elem().iter().all(|c| c % pe == 0));
            if !ok {
                failures.push(format!("{name} ≠ E modulo p^{}", self.torsion));
            }
            ok
        };
        let phi_psi = check("φψ", matrix::mul(f, &phi, &psi));
        let psi_phi = check("ψφ", matrix::mul(f, &psi, &phi));
        BreuilModuleReport { phi_psi, psi_phi, torsion, failures }
    }
}
