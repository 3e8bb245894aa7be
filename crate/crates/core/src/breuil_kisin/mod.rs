//! Truncated Breuil–Kisin rings `𝔖_{a,m} = Z/p^m[x_1..x_r]/J^a`, the lift
//! `δ: 𝔖 -> W(𝔖)` of `σ`, the frame maps `κ` into `W(R_a)`, and Breuil
//! windows and modules.

mod nilpotence;
mod window;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::algebra::{build_truncated_poly_algebra, AlgebraHom, CoeffKind, Elem, FiniteAlgebra, PrimeParams};
use crate::error::BkError;
use crate::frames::{Frame, FrameHom, FrameKind, RingMap, SElem};
use crate::witt::{u0, WittVector};

pub use nilpotence::{DeltaWitness, GradedTauData, NilpotenceReport};
pub use window::{bk_to_display, BkConversion, BreuilModule, BreuilModuleReport, BreuilWindow};

/// JSON description of a setup; `e` and `sigma` are polynomial expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BkSpec {
    pub p: u64,
    /// Coefficients are `W_m(F_p) = Z/p^m`.
    pub m: u32,
    /// Degree cut: `J^a = 0`.
    pub a: u32,
    pub vars: Vec<String>,
    pub e: String,
    /// `σ(x_i)` for each variable.
    pub sigma: Vec<String>,
}

impl BkSpec {
    /// `𝔖 = W(F_p)[[t]]`, `σ(t) = t^p`, `E = p - t`.
    pub fn motivating(p: u64, m: u32, a: u32) -> BkSpec {
        BkSpec {
            p,
            m,
            a,
            vars: vec!["t".into()],
            e: format!("{p} - t"),
            sigma: vec![format!("t^{p}")],
        }
    }
}

type Lifted = (Arc<FiniteAlgebra>, AlgebraHom);

pub struct BkSetup {
    spec: BkSpec,
    frame: Arc<Frame>,
    monos: Vec<Vec<u32>>,
    /// `𝔖_{a,m'}` with its `σ` for raised precisions `m'`.
    lifted: Mutex<HashMap<u32, Lifted>>,
    kappa: Mutex<HashMap<usize, Arc<KappaTable>>>,
}

impl std::fmt::Debug for BkSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BkSetup({:?})", self.spec)
    }
}

fn setup_err(e: impl std::fmt::Display) -> BkError {
    BkError::Setup(e.to_string())
}

fn build_ring(spec: &BkSpec, prec: u32) -> Result<Lifted, BkError> {
    let params = PrimeParams::new(spec.p, prec, 1)?;
    let vars: Vec<&str> = spec.vars.iter().map(|s| s.as_str()).collect();
    let ring = build_truncated_poly_algebra(params, CoeffKind::Witt, &vars, &[], Some(spec.a))?;
    let images: Vec<Elem> =
        spec.sigma.iter().map(|s| ring.parse_element(&vars, s)).collect::<Result<_, _>>()?;
    let monos = ring.basis_monomials(&vars)?;
    let basis_images = monos
        .iter()
        .map(|mono| {
            mono.iter()
                .zip(&images)
                .fold(ring.one(), |acc, (e, x)| ring.mul(&acc, &ring.pow(x, *e as u64)))
        })
        .collect();
    let sigma = AlgebraHom::new(&ring, &ring, basis_images)?;
    Ok((ring, sigma))
}

impl BkSetup {
    pub fn new(spec: BkSpec) -> Result<BkSetup, BkError> {
        if spec.vars.len() != spec.sigma.len() {
            return Err(setup_err("one σ image per variable is required"));
        }
        if spec.m == 0 || spec.a == 0 {
            return Err(setup_err("m and a must be positive"));
        }
        let (ring, sigma) = build_ring(&spec, spec.m)?;
        let vars: Vec<&str> = spec.vars.iter().map(|s| s.as_str()).collect();
        let monos = ring.basis_monomials(&vars)?;
        let e = ring.parse_element(&vars, &spec.e)?;
        let one = monos.iter().position(|c| c.iter().all(|e| *e == 0)).expect("1 is a basis monomial");
        if e[one] != spec.p % ring.order_modulus(one) {
            return Err(setup_err("E must have constant term p"));
        }
        for (i, v) in spec.vars.iter().enumerate() {
            let x = ring.parse_element(&vars, v)?;
            let sx = sigma.apply(&x);
            if sx[one] != 0 {
                return Err(setup_err(format!("σ({v}) is not in J")));
            }
            if ring.div_p(&ring.sub(&sx, &ring.pow(&x, spec.p))).is_none() {
                return Err(setup_err(format!("σ({v}) does not lift x^p (variable {i})")));
            }
        }
        let frame = Arc::new(Frame::breuil_kisin(&ring, sigma, e)?);
        let mut lifted = HashMap::new();
        lifted.insert(spec.m, (ring, frame.bk().expect("bk frame").sigma.clone()));
        Ok(BkSetup { spec, frame, monos, lifted: Mutex::new(lifted), kappa: Mutex::new(HashMap::new()) })
    }

    pub fn from_json(s: &str) -> Result<BkSetup, BkError> {
        let spec: BkSpec = serde_json::from_str(s).map_err(setup_err)?;
        BkSetup::new(spec)
    }

    pub fn spec(&self) -> &BkSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn rank(&self) -> usize {
        self.spec.vars.len()
    }

    /// `𝔖_{a,m}`.
    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        self.frame.ring()
    }

    /// `R_a = 𝔖_a / E`.
    pub fn base(&self) -> &Arc<FiniteAlgebra> {
        self.frame.quotient()
    }

    /// The frame `ℬ_a`.
    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn e(&self) -> &Elem {
        &self.frame.bk().expect("bk frame").e
    }

    pub fn sigma(&self, x: &Elem) -> Elem {
        self.frame.bk().expect("bk frame").sigma.apply(x)
    }

    fn vars(&self) -> Vec<&str> {
        self.spec.vars.iter().map(|s| s.as_str()).collect()
    }

    pub fn parse(&self, s: &str) -> Result<Elem, BkError> {
        Ok(self.ring().parse_element(&self.vars(), s)?)
    }

    /// The variable `x_i` as an element.
    pub fn var(&self, i: usize) -> Elem {
        self.ring().parse_element(&self.vars(), &self.spec.vars[i]).expect("variable parses")
    }

    /// Basis index of a monomial, if it survives the degree cut.
    fn mono_index(&self, c: &[u32]) -> Option<usize> {
        self.monos.iter().position(|m| m.as_slice() == c)
    }

    fn lifted(&self, prec: u32) -> Result<Lifted, BkError> {
        let mut cache = self.lifted.lock().expect("cache lock");
        if let Some(l) = cache.get(&prec) {
            return Ok(l.clone());
        }
        let l = build_ring(&self.spec, prec)?;
        cache.insert(prec, l.clone());
        Ok(l)
    }

    /// Coordinates of `δ(x)` up to length `len`, by
    /// `d_n = (σ^n(x) - Σ_{i<n} p^i d_i^{p^{n-i}}) / p^n` at precision `m + len`.
    pub fn delta(&self, x: &Elem, len: usize) -> Result<WittVector, BkError> {
        let p = self.spec.p;
        let (big, sigma) = self.lifted(self.spec.m + len as u32)?;
        let mut ds: Vec<Elem> = Vec::with_capacity(len);
        let mut s = x.clone();
        for n in 0..len {
            let mut num = s.clone();
            for (i, d) in ds.iter().enumerate() {
                let t = big.pow(d, p.pow((n - i) as u32));
                num = big.sub(&num, &big.scalar(&t, p.pow(i as u32) as i64));
            }
            let pn = p.pow(n as u32);
            if num.iter().any(|c| c % pn != 0) {
                return Err(BkError::DivisionFailure(n as u32));
            }
            ds.push(num.iter().map(|c| c / pn).collect());
            s = sigma.apply(&s);
        }
        let small = self.ring();
        Ok(WittVector::new(small, ds.iter().map(|d| small.normalize(d)).collect()))
    }

    fn kappa_table(&self, n: usize) -> Result<Arc<KappaTable>, BkError> {
        if let Some(t) = self.kappa.lock().expect("cache lock").get(&n) {
            return Ok(t.clone());
        }
        let r = self.base().clone();
        let proj = self.frame.projection();
        let gens: Vec<WittVector> = (0..self.rank())
            .map(|i| Ok(self.delta(&self.var(i), n)?.map(proj)))
            .collect::<Result<_, BkError>>()?;
        let eval = |c: &[u32]| {
            c.iter()
                .zip(&gens)
                .fold(WittVector::one(&r, n), |acc, (e, g)| acc.mul(&g.pow(*e as u64)).expect("same length"))
        };
        // κ must kill p^m and J^a for the map to factor through 𝔖_{a,m}
        let pm = (self.spec.p as i64).checked_pow(self.spec.m).ok_or_else(|| setup_err("p^m overflows"))?;
        if !WittVector::from_int(&r, pm, n).is_zero() {
            return Err(setup_err(format!("p^{} does not kill W_{n}(R_a); raise m", self.spec.m)));
        }
        for c in crate::algebra::monomials_of_degree(self.rank(), self.spec.a) {
            if !eval(&c).is_zero() {
                return Err(setup_err(format!("κ does not kill J^{} at length {n}", self.spec.a)));
            }
        }
        let images = self.monos.iter().map(|c| eval(c)).collect();
        let t = Arc::new(KappaTable { ring: r, n, images });
        self.kappa.lock().expect("cache lock").insert(n, t.clone());
        Ok(t)
    }

    /// `κ_a(x) ∈ W_n(R_a)`.
    pub fn kappa(&self, x: &Elem, n: usize) -> Result<WittVector, BkError> {
        Ok(self.kappa_table(n)?.apply(x))
    }

    /// `κ(x)` read directly off `δ(x)`, without the multiplicative table.
    pub fn kappa_direct(&self, x: &Elem, n: usize) -> Result<WittVector, BkError> {
        Ok(self.delta(x, n)?.map(self.frame.projection()))
    }

    /// `κ` as a frame map into `𝒲_{R_a}` (with `u`) or `𝒟_{R_a}` (with `𝕦`).
    pub fn kappa_hom(&self, n: usize, kind: FrameKind) -> Result<FrameHom, BkError> {
        let target = match kind {
            FrameKind::Witt => Frame::witt(self.base(), n)?,
            FrameKind::Dieudonne => {
                let rep = self.nilpotence_condition()?;
                if !rep.holds {
                    return Err(BkError::NotInZink(rep.delta_witness.map_or(0, |w| w.coord)));
                }
                Frame::dieudonne(self.base(), n)?
            }
            _ => return Err(setup_err("κ targets 𝒲 or 𝒟 only")),
        };
        let target = Arc::new(target);
        let table = self.kappa_table(n)?;
        let ke = SElem::W(table.apply(self.e()));
        let u = target.sigma1(&ke)?;
        let map: RingMap = Arc::new(move |x| SElem::W(table.apply(x.elem())));
        Ok(FrameHom::new(self.frame.clone(), target, map, u))
    }

    /// `κ(E)`, `u = f1(κ(E))` and `𝕦 = 𝕗1(κ(E))` at length `n`.
    pub fn units(&self, n: usize) -> Result<KappaUnits, BkError> {
        let kappa_e = self.kappa(self.e(), n)?;
        let w = self.kappa_hom(n, FrameKind::Witt)?;
        let u = w.u().witt().clone();
        let d = self.kappa_hom(n, FrameKind::Dieudonne).ok();
        let uu = d.as_ref().map(|d| d.u().witt().clone());
        let wf = w.target();
        let u_is_unit = wf.is_unit(w.u());
        let relation = uu.as_ref().map(|uu| {
            let lhs = wf.mul(&SElem::W(uu.clone()), &SElem::W(u0(self.base(), n)));
            wf.eq_at(&lhs, w.u(), wf.determined_len())
        });
        Ok(KappaUnits { kappa_e, u, uu, u_is_unit, relation })
    }
}

#[derive(Clone, Debug)]
pub struct KappaUnits {
    pub kappa_e: WittVector,
    pub u: WittVector,
    /// Present when the nilpotence condition holds.
    pub uu: Option<WittVector>,
    pub u_is_unit: bool,
    /// `𝕦 · u0 = u` on the determined coordinates.
    pub relation: Option<bool>,
}

/// `κ` on the monomial basis of `𝔖_{a,m}`.
struct KappaTable {
    ring: Arc<FiniteAlgebra>,
    n: usize,
    images: Vec<WittVector>,
}

impl KappaTable {
    fn apply(&self, x: &[u64]) -> WittVector {
        let mut acc = WittVector::zero(&self.ring, self.n);
        for (c, img) in x.iter().zip(&self.images) {
            if *c != 0 {
                acc = acc.add(&img.scale(*c as i64)).expect("same length");
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests;
