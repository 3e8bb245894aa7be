//! Frames `(S, I, R, σ, σ1)` with `σ = θ σ1` on `I`, and u-homomorphisms.
//!
//! Witt-type rings are modelled by `W_n` of a finite ring; `σ` and `σ1` may
//! shorten vectors, and all comparisons happen at the common length.

#[cfg(test)]
mod tests;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::abelian::FinGroup;
use crate::algebra::{AlgebraHom, DividedPowerStructure, Elem, FiniteAlgebra, Ideal};
use crate::error::FrameError;
use crate::modular::Zpm;
use crate::witt::{exponent_bound, log_coords, log_inverse, u0, WittGroup, WittVector};
use crate::zink::{ff1, u0_inverse_ghosts, vv};

/// Samples drawn by the axiom check run at construction.
pub const CONSTRUCTION_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameKind {
    /// `(W(R), I_R, R, f, v^{-1})`, `θ = p`.
    Witt,
    /// `(𝕎(R), 𝕀_R, R, f, 𝕗1)`, `θ = p u0`.
    Dieudonne,
    /// `(𝕎(B, δ), 𝕀_{B/R}, R, f, t̃𝕗1)`.
    Relative,
    /// `(𝕎⁺(R), 𝕀⁺_R, R, f, v^{-1})` for `p = 2`.
    Vstab,
    /// `(𝔖, E𝔖, 𝔖/E, σ, σ1)` with `σ1(Ex) = σ(x)`.
    BreuilKisin,
}

impl FrameKind {
    pub fn name(self) -> &'static str {
        match self {
            FrameKind::Witt => "witt",
            FrameKind::Dieudonne => "dieudonne",
            FrameKind::Relative => "relative",
            FrameKind::Vstab => "vstab",
            FrameKind::BreuilKisin => "breuil-kisin",
        }
    }
}

/// Element of a frame ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SElem {
    W(WittVector),
    A(Elem),
}

impl SElem {
    pub fn witt(&self) -> &WittVector {
        match self {
            SElem::W(x) => x,
            SElem::A(_) => panic!("expected a Witt vector"),
        }
    }

    pub fn elem(&self) -> &Elem {
        match self {
            SElem::A(x) => x,
            SElem::W(_) => panic!("expected a ring element"),
        }
    }

    /// Witt length, or `usize::MAX` for plain ring elements.
    pub fn precision(&self) -> usize {
        match self {
            SElem::W(x) => x.len(),
            SElem::A(_) => usize::MAX,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SElem::W(x) => serde_json::json!(x.coords()),
            SElem::A(x) => serde_json::json!(x),
        }
    }
}

/// The Breuil–Kisin ring data: `𝔖` truncated, its Frobenius lift and `E`.
#[derive(Clone, Debug)]
pub struct BkRing {
    pub sigma: AlgebraHom,
    pub e: Elem,
    /// `σ(Ann E)`: the indeterminacy of `σ1` once `E` is a zero divisor.
    pub slack: Ideal,
}

#[derive(Clone)]
pub struct Frame {
    kind: FrameKind,
    ring: Arc<FiniteAlgebra>,
    quotient: Arc<FiniteAlgebra>,
    proj: AlgebraHom,
    pd: Option<DividedPowerStructure>,
    bk: Option<BkRing>,
    len: usize,
    theta: SElem,
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({}, {}, len {})", self.kind.name(), self.ring.name(), self.len)
    }
}

fn violation(axiom: &str, witness: impl fmt::Debug) -> FrameError {
    FrameError::FrameAxiomViolation { axiom: axiom.to_string(), witness: format!("{witness:?}") }
}

impl Frame {
    fn build(
        kind: FrameKind,
        ring: &Arc<FiniteAlgebra>,
        quotient: Arc<FiniteAlgebra>,
        proj: AlgebraHom,
        pd: Option<DividedPowerStructure>,
        bk: Option<BkRing>,
        len: usize,
    ) -> Result<Frame, FrameError> {
        let mut f = Frame {
            kind,
            ring: ring.clone(),
            quotient,
            proj,
            pd,
            bk,
            len,
            theta: SElem::A(ring.one()),
        };
        let g = f.ideal_generator();
        let s1 = f.sigma1(&g)?;
        let inv = f.inv(&s1).ok_or_else(|| violation("σ1(I) generates S", &s1))?;
        f.theta = f.mul(&f.sigma(&g), &inv);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        f.check_axioms(&mut rng, CONSTRUCTION_SAMPLES)?;
        Ok(f)
    }

    /// `𝒲_R` at Witt length `n`.
    pub fn witt(ring: &Arc<FiniteAlgebra>, n: usize) -> Result<Frame, FrameError> {
        Self::build(FrameKind::Witt, ring, ring.clone(), AlgebraHom::identity(ring), None, None, n)
    }

    /// `𝒟_R` at Witt length `n`.
    pub fn dieudonne(ring: &Arc<FiniteAlgebra>, n: usize) -> Result<Frame, FrameError> {
        Self::build(FrameKind::Dieudonne, ring, ring.clone(), AlgebraHom::identity(ring), None, None, n)
    }

    /// `𝒟⁺_R` at Witt length `n`; only for `p = 2`.
    pub fn vstab(ring: &Arc<FiniteAlgebra>, n: usize) -> Result<Frame, FrameError> {
        if ring.p() != 2 {
            return Err(crate::error::ZinkError::NotPrimeTwo.into());
        }
        Self::build(FrameKind::Vstab, ring, ring.clone(), AlgebraHom::identity(ring), None, None, n)
    }

    /// `𝒟_{B/R}` for divided powers on `b ⊂ B`, `R = B/b`.
    pub fn relative(pd: &DividedPowerStructure, n: usize) -> Result<Frame, FrameError> {
        let ring = pd.ring().clone();
        let (quotient, proj) = FiniteAlgebra::quotient(&ring, pd.ideal())?;
        Self::build(FrameKind::Relative, &ring, quotient, proj, Some(pd.clone()), None, n)
    }

    /// `ℬ` over a truncated `𝔖` with Frobenius lift `σ` and `E`.
    pub fn breuil_kisin(ring: &Arc<FiniteAlgebra>, sigma: AlgebraHom, e: Elem) -> Result<Frame, FrameError> {
        let ideal = Ideal::new(ring, vec![e.clone()])?;
        let (quotient, proj) = FiniteAlgebra::quotient(ring, &ideal)?;
        let slack = Ideal::new(ring, ring.annihilator(&e).iter().map(|z| sigma.apply(z)).collect())?;
        let bk = BkRing { sigma, e, slack };
        Self::build(FrameKind::BreuilKisin, ring, quotient, proj, None, Some(bk), 1)
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        &self.ring
    }

    /// `R = S/I`.
    pub fn quotient(&self) -> &Arc<FiniteAlgebra> {
        &self.quotient
    }

    pub fn projection(&self) -> &AlgebraHom {
        &self.proj
    }

    pub fn pd(&self) -> Option<&DividedPowerStructure> {
        self.pd.as_ref()
    }

    pub fn bk(&self) -> Option<&BkRing> {
        self.bk.as_ref()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn theta(&self) -> &SElem {
        &self.theta
    }

    pub fn is_witt_type(&self) -> bool {
        self.kind != FrameKind::BreuilKisin
    }

    fn w(&self, x: WittVector) -> SElem {
        SElem::W(x)
    }

    pub fn zero(&self) -> SElem {
        self.from_int(0)
    }

    pub fn one(&self) -> SElem {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> SElem {
        if self.is_witt_type() {
            self.w(WittVector::from_int(&self.ring, c, self.len))
        } else {
            SElem::A(self.ring.from_int(c))
        }
    }

    fn pair<'a>(&self, a: &'a SElem, b: &'a SElem) -> (WittVector, WittVector) {
        let n = a.precision().min(b.precision());
        (a.witt().truncate(n), b.witt().truncate(n))
    }

    pub fn add(&self, a: &SElem, b: &SElem) -> SElem {
        match (a, b) {
            (SElem::A(x), SElem::A(y)) => SElem::A(self.ring.add(x, y)),
            _ => {
                let (x, y) = self.pair(a, b);
                self.w(x.add(&y).expect("same length"))
            }
        }
    }

    pub fn sub(&self, a: &SElem, b: &SElem) -> SElem {
        match (a, b) {
            (SElem::A(x), SElem::A(y)) => SElem::A(self.ring.sub(x, y)),
            _ => {
                let (x, y) = self.pair(a, b);
                self.w(x.sub(&y).expect("same length"))
            }
        }
    }

    pub fn neg(&self, a: &SElem) -> SElem {
        match a {
            SElem::A(x) => SElem::A(self.ring.neg(x)),
            SElem::W(x) => self.w(x.neg()),
        }
    }

    pub fn mul(&self, a: &SElem, b: &SElem) -> SElem {
        match (a, b) {
            (SElem::A(x), SElem::A(y)) => SElem::A(self.ring.mul(x, y)),
            _ => {
                let (x, y) = self.pair(a, b);
                self.w(x.mul(&y).expect("same length"))
            }
        }
    }

    /// Equality at the common precision; over a truncated `𝔖` modulo the
    /// indeterminacy of `σ1`.
    pub fn eq(&self, a: &SElem, b: &SElem) -> bool {
        match (a, b) {
            (SElem::A(x), SElem::A(y)) => match &self.bk {
                Some(bk) => bk.slack.contains(&self.ring.sub(x, y)),
                None => self.ring.normalize(x) == self.ring.normalize(y),
            },
            _ => {
                let (x, y) = self.pair(a, b);
                x == y
            }
        }
    }

    /// Equality of the first `n` coordinates (plain elements: full equality).
    pub fn eq_at(&self, a: &SElem, b: &SElem, n: usize) -> bool {
        match (a, b) {
            (SElem::W(x), SElem::W(y)) => {
                let n = n.min(x.len()).min(y.len());
                x.truncate(n) == y.truncate(n)
            }
            _ => self.eq(a, b),
        }
    }

    /// Coordinates of `σ1(x)` fixed by a length-`len` input.
    pub fn determined_len(&self) -> usize {
        self.len.saturating_sub(1)
    }

    pub fn is_zero(&self, a: &SElem) -> bool {
        match a {
            SElem::A(x) => self.ring.is_zero(x),
            SElem::W(x) => x.is_zero(),
        }
    }

    pub fn truncate(&self, a: &SElem, n: usize) -> SElem {
        match a {
            SElem::A(_) => a.clone(),
            SElem::W(x) => self.w(x.truncate(n)),
        }
    }

    pub fn is_unit(&self, a: &SElem) -> bool {
        match a {
            SElem::A(x) => self.ring.is_unit(x),
            SElem::W(x) => !x.is_empty() && self.ring.is_unit(x.coord(0)),
        }
    }

    pub fn inv(&self, a: &SElem) -> Option<SElem> {
        match a {
            SElem::A(x) => self.ring.inv(x).map(SElem::A),
            SElem::W(x) => x.inverse().map(SElem::W),
        }
    }

    /// Image in the residue field of `S`.
    pub fn residue(&self, a: &SElem) -> Elem {
        match a {
            SElem::A(x) => self.ring.residue(x),
            SElem::W(x) => self.ring.residue(x.coord(0)),
        }
    }

    /// Image in `R = S/I`.
    pub fn to_quotient(&self, a: &SElem) -> Elem {
        match a {
            SElem::A(x) => self.proj.apply(x),
            SElem::W(x) => self.proj.apply(x.coord(0)),
        }
    }

    pub fn in_ideal(&self, a: &SElem) -> bool {
        self.quotient.is_zero(&self.to_quotient(a))
    }

    /// Vectors with nilpotent coordinates are read as finite-support
    /// vectors, so `σ` and `σ1` keep their length.
    fn extend(&self, x: &WittVector) -> WittVector {
        if x.coords().iter().all(|c| self.ring.is_nilpotent(c)) {
            x.zero_extend(x.len() + 1)
        } else {
            x.clone()
        }
    }

    pub fn sigma(&self, a: &SElem) -> SElem {
        match a {
            SElem::A(x) => SElem::A(self.bk.as_ref().expect("bk data").sigma.apply(x)),
            SElem::W(x) => {
                let y = self.extend(x).frobenius();
                self.w(y.truncate(y.len().min(x.len())))
            }
        }
    }

    pub fn sigma1(&self, a: &SElem) -> Result<SElem, FrameError> {
        if !self.in_ideal(a) {
            return Err(FrameError::NotInIdeal);
        }
        Ok(match self.kind {
            FrameKind::Witt | FrameKind::Vstab => self.w(
                self.extend(a.witt())
                    .verschiebung_inverse()
                    .map_err(|_| FrameError::NotInIdeal)?,
            ),
            FrameKind::Dieudonne => self.w(ff1(&self.extend(a.witt()))?),
            FrameKind::Relative => self.w(self.relative_sigma1(a.witt())?),
            FrameKind::BreuilKisin => {
                let bk = self.bk.as_ref().expect("bk data");
                let y = self.ring.divide(a.elem(), &bk.e).ok_or(FrameError::NotInIdeal)?;
                SElem::A(bk.sigma.apply(&y))
            }
        })
    }

    /// Weighted shift `[a0, a1, ...] -> [w0(u0^{-1}) a1, w1(u0^{-1}) a2, ...]`
    /// on the Log coordinates of a vector over the PD ideal.
    fn log_shift(&self, x: &WittVector) -> Result<WittVector, FrameError> {
        let pd = self.pd.as_ref().expect("pd data");
        let ring = &self.ring;
        let n = x.len();
        let logs = log_coords(x, pd)?;
        let g = u0_inverse_ghosts(ring, n);
        let shifted: Vec<Elem> = (1..n).map(|i| ring.mul(&g[i - 1], &logs[i])).collect();
        Ok(log_inverse(ring, &shifted, pd, n)?)
    }

    /// `t̃𝕗1(x) = 𝕗1(x - [x0]) + (shifted Log of [x0])`; vectors over the
    /// PD ideal are shifted as a whole.
    fn relative_sigma1(&self, x: &WittVector) -> Result<WittVector, FrameError> {
        let pd = self.pd.as_ref().expect("pd data");
        if x.coords().iter().all(|c| pd.contains(c)) {
            return self.log_shift(x);
        }
        let t = WittVector::teichmuller(&self.ring, x.coord(0), x.len());
        let base = ff1(&self.extend(&x.sub(&t)?))?;
        let tail = self.log_shift(&t)?;
        let n = base.len().min(tail.len());
        Ok(base.truncate(n).add(&tail.truncate(n))?)
    }

    /// An ideal element whose `σ1`-image is `1`.
    pub fn ideal_generator(&self) -> SElem {
        match self.kind {
            FrameKind::Witt | FrameKind::Vstab => {
                self.w(WittVector::one(&self.ring, self.len - 1).verschiebung())
            }
            FrameKind::Dieudonne | FrameKind::Relative => {
                self.w(vv(&WittVector::one(&self.ring, self.len - 1)))
            }
            FrameKind::BreuilKisin => SElem::A(self.bk.as_ref().expect("bk data").e.clone()),
        }
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> SElem {
        if self.is_witt_type() {
            self.w(WittVector::random(&self.ring, self.len, rng))
        } else {
            SElem::A(self.ring.random(rng))
        }
    }

    pub fn random_ideal<R: Rng>(&self, rng: &mut R) -> SElem {
        match self.kind {
            FrameKind::BreuilKisin => {
                let g = self.ideal_generator();
                let x = self.random(rng);
                self.mul(&g, &x)
            }
            _ => {
                let y = WittVector::random(&self.ring, self.len - 1, rng).verschiebung();
                let y = if let Some(pd) = &self.pd {
                    let b = pd.ideal().random(rng);
                    y.add(&WittVector::teichmuller(&self.ring, &b, self.len)).expect("same length")
                } else {
                    y
                };
                self.w(y)
            }
        }
    }

    /// `σ(a) ≡ a^p` modulo `p` (seen in the residue field), `σ = θ σ1` on
    /// `I`, and nilpotence of `I` modulo the residue field, on samples.
    pub fn check_axioms<R: Rng>(&self, rng: &mut R, samples: usize) -> Result<(), FrameError> {
        let p = self.p();
        for _ in 0..samples {
            let a = self.random(rng);
            let d = self.sub(&self.sigma(&a), &self.pow(&a, p));
            let ok = match &d {
                SElem::A(x) => Ideal::p_ideal(&self.ring).contains(x),
                SElem::W(x) => x.is_empty() || self.ring.residue_field().is_zero(&self.ring.residue(x.coord(0))),
            };
            if !ok {
                return Err(violation("σ(a) ≡ a^p mod p", &a));
            }
            let x = self.random_ideal(rng);
            let lhs = self.sigma(&x);
            let rhs = self.mul(&self.theta, &self.sigma1(&x)?);
            if !self.eq(&lhs, &rhs) {
                return Err(violation("σ = θ σ1 on I", &x));
            }
            let r = match &x {
                SElem::A(e) => self.ring.residue(e),
                SElem::W(w) => self.ring.residue(w.coord(0)),
            };
            if !self.ring.residue_field().is_zero(&r) {
                return Err(violation("I + pS ⊆ Rad(S)", &x));
            }
        }
        Ok(())
    }

    pub fn pow(&self, a: &SElem, e: u64) -> SElem {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// `u0` in this frame's Witt ring.
    pub fn u0(&self) -> SElem {
        self.w(u0(&self.ring, self.len))
    }
}

/// `S` as a finite abelian group.
#[derive(Clone, Debug)]
pub struct SModel {
    witt: Option<WittGroup>,
    ring: Arc<FiniteAlgebra>,
    group: FinGroup,
}

impl SModel {
    /// Model of `W_n(R)` (Witt-type frames, `n` given) or of the algebra.
    pub fn new(frame: &Frame, n: usize) -> SModel {
        let ring = frame.ring.clone();
        if frame.is_witt_type() {
            let w = WittGroup::new(&ring, n, exponent_bound(&ring, n));
            let group = w.group().clone();
            SModel { witt: Some(w), ring, group }
        } else {
            let group = FinGroup::new(ring.zpm().clone(), ring.rank(), ring.order_relations());
            SModel { witt: None, ring, group }
        }
    }

    pub fn group(&self) -> &FinGroup {
        &self.group
    }

    pub fn zpm(&self) -> &Zpm {
        self.group.zpm()
    }

    pub fn ngens(&self) -> usize {
        self.group.ngens()
    }

    pub fn coords(&self, x: &SElem) -> Vec<u64> {
        match &self.witt {
            Some(w) => w.coords(x.witt()),
            None => x.elem().clone(),
        }
    }

    pub fn element(&self, c: &[u64]) -> SElem {
        match &self.witt {
            Some(w) => SElem::W(w.element(c)),
            None => SElem::A(self.ring.normalize(c)),
        }
    }

    pub fn generator(&self, i: usize) -> SElem {
        match &self.witt {
            Some(w) => SElem::W(w.generators()[i].clone()),
            None => SElem::A(self.ring.basis_elem(i)),
        }
    }
}

pub type RingMap = Arc<dyn Fn(&SElem) -> SElem + Send + Sync>;

/// A u-homomorphism `α: S -> S'` with `σ1' α = u · α σ1`.
#[derive(Clone)]
pub struct FrameHom {
    source: Arc<Frame>,
    target: Arc<Frame>,
    map: RingMap,
    u: SElem,
}

impl fmt::Debug for FrameHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FrameHom({:?} -> {:?})", self.source, self.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl FrameHom {
    pub fn new(source: Arc<Frame>, target: Arc<Frame>, map: RingMap, u: SElem) -> FrameHom {
        FrameHom { source, target, map, u }
    }

    pub fn identity(frame: Arc<Frame>) -> FrameHom {
        let u = frame.one();
        FrameHom { source: frame.clone(), target: frame, map: Arc::new(|x| x.clone()), u }
    }

    /// `𝒟_R -> 𝒲_R` or `𝒟_R -> 𝒟⁺_R`: the inclusion, with `u = u0`.
    pub fn inclusion(source: Arc<Frame>, target: Arc<Frame>) -> FrameHom {
        let u = target.u0();
        FrameHom { source, target, map: Arc::new(|x| x.clone()), u }
    }

    /// Coordinatewise ring map `W(B) -> W(B')`, with `u = 1`.
    pub fn from_ring_hom(source: Arc<Frame>, target: Arc<Frame>, hom: AlgebraHom) -> FrameHom {
        let u = target.one();
        let map: RingMap = Arc::new(move |x| SElem::W(x.witt().map(&hom)));
        FrameHom { source, target, map, u }
    }

    pub fn source(&self) -> &Arc<Frame> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Frame> {
        &self.target
    }

    pub fn u(&self) -> &SElem {
        &self.u
    }

    pub fn apply(&self, x: &SElem) -> SElem {
        (self.map)(x)
    }

    /// `self` followed by `next`; the unit becomes `u_next · next(u)`.
    pub fn then(&self, next: &FrameHom) -> FrameHom {
        let (a, b) = (self.map.clone(), next.map.clone());
        let t = &next.target;
        let u = t.mul(&next.u, &next.apply(&self.u));
        FrameHom {
            source: self.source.clone(),
            target: t.clone(),
            map: Arc::new(move |x| b(&a(x))),
            u,
        }
    }

    /// Checks `α(I) ⊆ I'`, `σ' α = α σ`, `σ1' α = u α σ1` and `α(θ) = u θ'`.
    pub fn check<R: Rng>(&self, rng: &mut R, samples: usize) -> HomReport {
        let (s, t) = (&self.source, &self.target);
        let fail = |what: &str, x: &SElem| HomReport {
            passed: false,
            counterexample: Some(format!("{what} at {x:?}")),
        };
        let at = self.apply(&s.theta);
        if !t.eq(&at, &t.mul(&self.u, &t.theta)) {
            return fail("α(θ) = u θ'", &s.theta);
        }
        for _ in 0..samples {
            let a = s.random(rng);
            // images are truncations, so σ' fixes only the first len - 1 coordinates
            let det = t.determined_len();
            if !t.eq_at(&t.sigma(&self.apply(&a)), &self.apply(&s.sigma(&a)), det) {
                return fail("σ' α = α σ", &a);
            }
            let x = s.random_ideal(rng);
            let ax = self.apply(&x);
            if !t.in_ideal(&ax) {
                return fail("α(I) ⊆ I'", &x);
            }
            let lhs = match t.sigma1(&ax) {
                Ok(v) => v,
                Err(_) => return fail("σ1' defined on α(I)", &x),
            };
            let rhs = match s.sigma1(&x) {
                Ok(v) => t.mul(&self.u, &self.apply(&v)),
                Err(_) => return fail("σ1 defined on I", &x),
            };
            if !t.eq_at(&lhs, &rhs, det) {
                return fail("σ1' α = u α σ1", &x);
            }
        }
        HomReport { passed: true, counterexample: None }
    }
}
