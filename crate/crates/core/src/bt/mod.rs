//! `G[p^n](A)` for the p-divisible group of a display over `𝒟_R`, as the
//! middle cohomology of the cone of `p^n` on `[Q_A -> P_A]`, and brute-force
//! references for `μ_{p^n}` and étale groups.

mod model;
#[cfg(test)]
mod tests;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraHom, Elem, FiniteAlgebra};
use crate::breuil_kisin::{bk_to_display, BkSetup, BreuilWindow};
use crate::error::BtError;
use crate::frames::FrameKind;
use crate::windows::Window;
use crate::witt::{exponent_bound, WittVector};

use model::{support_growth, Model, ModelKind, Split};

/// A finite `R`-algebra `A`, local with residue field `F_p`.
#[derive(Clone, Debug)]
pub struct TestAlgebra {
    structure: AlgebraHom,
}

impl TestAlgebra {
    pub fn new(structure: AlgebraHom) -> Result<TestAlgebra, BtError> {
        let a = structure.target();
        if a.field_degree() != 1 {
            return Err(BtError::BadTestAlgebra(format!("{} has residue field of degree {}", a.name(), a.field_degree())));
        }
        Ok(TestAlgebra { structure })
    }

    pub fn over_itself(r: &Arc<FiniteAlgebra>) -> Result<TestAlgebra, BtError> {
        TestAlgebra::new(AlgebraHom::identity(r))
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        self.structure.target()
    }

    pub fn base(&self) -> &Arc<FiniteAlgebra> {
        self.structure.source()
    }

    pub fn structure(&self) -> &AlgebraHom {
        &self.structure
    }
}

/// `⊕ Z/p^{e_i}`, exponents ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsGroup {
    pub p: u64,
    pub invariants: Vec<u32>,
}

impl PointsGroup {
    pub fn new(p: u64, mut invariants: Vec<u32>) -> PointsGroup {
        invariants.retain(|e| *e > 0);
        invariants.sort_unstable();
        PointsGroup { p, invariants }
    }

    pub fn log_order(&self) -> u32 {
        self.invariants.iter().sum()
    }

    pub fn order(&self) -> u128 {
        u128::from(self.p).pow(self.log_order())
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }
}

impl fmt::Display for PointsGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.invariants.iter().rev().map(|e| format!("Z/{}", self.p.pow(*e))).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Invariants of an abelian `p`-group from `log_p |G[p^k]|`, `k = 0, 1, ...`.
pub fn invariants_from_counts(p: u64, counts: &[u32]) -> PointsGroup {
    // factors of exponent >= k
    let at_least: Vec<u32> = counts.windows(2).map(|w| w[1] - w[0]).collect();
    let mut inv = Vec::new();
    for (k, n) in at_least.iter().enumerate() {
        let next = at_least.get(k + 1).copied().unwrap_or(0);
        inv.extend(std::iter::repeat(k as u32 + 1).take((n - next) as usize));
    }
    PointsGroup::new(p, inv)
}

fn log_p(p: u64, mut n: usize) -> u32 {
    let mut e = 0;
    while n > 1 {
        n /= p as usize;
        e += 1;
    }
    e
}

/// `μ_{p^n}(A)` by enumerating `A`.
pub fn mu_reference(a: &Arc<FiniteAlgebra>, n: u32) -> PointsGroup {
    let p = a.p();
    let roots: Vec<Elem> = a.enumerate().into_iter().filter(|x| a.pow(x, p.pow(n)) == a.one()).collect();
    let counts: Vec<u32> = (0..=n)
        .map(|k| log_p(p, roots.iter().filter(|x| a.pow(x, p.pow(k)) == a.one()).count()))
        .collect();
    invariants_from_counts(p, &counts)
}

/// `(Z/p^n)^h`.
pub fn etale_reference(p: u64, h: usize, n: u32) -> PointsGroup {
    PointsGroup::new(p, vec![n; h])
}

type PsiFn = dyn Fn(usize) -> Result<Vec<Vec<WittVector>>, BtError> + Send + Sync;

/// A display over `𝒟_R` that can be produced at any Witt length.
#[derive(Clone)]
pub struct DisplaySource {
    ring: Arc<FiniteAlgebra>,
    l: usize,
    h: usize,
    psi: Arc<PsiFn>,
}

impl fmt::Debug for DisplaySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DisplaySource").field("ring", &self.ring.name()).field("h", &self.h).field("l", &self.l).finish()
    }
}

fn identity_psi(ring: &Arc<FiniteAlgebra>, h: usize, len: usize) -> Vec<Vec<WittVector>> {
    (0..h)
        .map(|i| (0..h).map(|j| WittVector::from_int(ring, i64::from(i == j), len)).collect())
        .collect()
}

impl DisplaySource {
    pub fn from_fn(
        ring: &Arc<FiniteAlgebra>,
        l: usize,
        h: usize,
        psi: impl Fn(usize) -> Result<Vec<Vec<WittVector>>, BtError> + Send + Sync + 'static,
    ) -> DisplaySource {
        DisplaySource { ring: ring.clone(), l, h, psi: Arc::new(psi) }
    }

    /// `Q = I`, `Ψ = 1`: the display of `μ_{p^∞}`.
    pub fn unit(ring: &Arc<FiniteAlgebra>) -> DisplaySource {
        let r = ring.clone();
        DisplaySource::from_fn(ring, 0, 1, move |len| Ok(identity_psi(&r, 1, len)))
    }

    /// `L = P`, `Ψ = 1`.
    pub fn etale(ring: &Arc<FiniteAlgebra>, h: usize) -> DisplaySource {
        let r = ring.clone();
        DisplaySource::from_fn(ring, h, h, move |len| Ok(identity_psi(&r, h, len)))
    }

    /// A fixed window; lengths beyond its own are refused.
    pub fn from_window(w: &Window) -> Result<DisplaySource, BtError> {
        if w.frame().kind() != FrameKind::Dieudonne {
            return Err(BtError::Source("window is not over a Dieudonné frame".into()));
        }
        let psi: Vec<Vec<WittVector>> = w.psi().iter().map(|r| r.iter().map(|x| x.witt().clone()).collect()).collect();
        let have = w.frame().len();
        Ok(DisplaySource::from_fn(w.frame().ring(), w.rank_l(), w.height(), move |len| {
            if len > have {
                return Err(BtError::Source(format!("window known to length {have}, {len} requested")));
            }
            Ok(psi.iter().map(|r| r.iter().map(|x| x.truncate(len)).collect()).collect())
        }))
    }

    /// The display `κ^* (Q, φ)` over `𝒟_{R_a}`.
    pub fn from_breuil(setup: Arc<BkSetup>, bw: BreuilWindow) -> Result<DisplaySource, BtError> {
        let w = bk_to_display(&setup, &bw, 2).map_err(|e| BtError::Source(e.to_string()))?;
        let ring = setup.base().clone();
        Ok(DisplaySource::from_fn(&ring, w.rank_l(), w.height(), move |len| {
            // the unit σ1(κ(E)) loses one Witt component
            let w = bk_to_display(&setup, &bw, len + 1).map_err(|e| BtError::Source(e.to_string()))?;
            Ok(w.psi().iter().map(|r| r.iter().map(|x| x.witt().truncate(len)).collect()).collect())
        }))
    }

    /// Basis `(L, L', T, T')`.
    pub fn direct_sum(&self, other: &DisplaySource) -> DisplaySource {
        let (a, b) = (self.clone(), other.clone());
        let order: Vec<(bool, usize)> = (0..a.l)
            .map(|i| (false, i))
            .chain((0..b.l).map(|i| (true, i)))
            .chain((a.l..a.h).map(|i| (false, i)))
            .chain((b.l..b.h).map(|i| (true, i)))
            .collect();
        let ring = self.ring.clone();
        DisplaySource::from_fn(&self.ring, a.l + b.l, a.h + b.h, move |len| {
            let (pa, pb) = ((a.psi)(len)?, (b.psi)(len)?);
            Ok(order
                .iter()
                .map(|(x, i)| {
                    order
                        .iter()
                        .map(|(y, j)| match (x, y) {
                            (false, false) => pa[*i][*j].clone(),
                            (true, true) => pb[*i][*j].clone(),
                            _ => WittVector::zero(&ring, len),
                        })
                        .collect()
                })
                .collect())
        })
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        &self.ring
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn rank_l(&self) -> usize {
        self.l
    }

    pub fn psi(&self, len: usize) -> Result<Vec<Vec<WittVector>>, BtError> {
        let m = (self.psi)(len)?;
        if m.len() != self.h || m.iter().any(|r| r.len() != self.h || r.iter().any(|x| x.len() < len)) {
            return Err(BtError::Source(format!("Ψ has the wrong shape at length {len}: {} rows, h = {}, min entry length {:?}", m.len(), self.h, m.iter().flatten().map(|x| x.len()).min())));
        }
        Ok(m)
    }

    fn psi_over(&self, a: &TestAlgebra, len: usize) -> Result<Vec<Vec<WittVector>>, BtError> {
        if !Arc::ptr_eq(a.base(), &self.ring) && a.base().name() != self.ring.name() {
            return Err(BtError::BadTestAlgebra("not an algebra over the display's base".into()));
        }
        Ok(self
            .psi(len)?
            .iter()
            .map(|r| r.iter().map(|x| x.truncate(len).map(a.structure())).collect())
            .collect())
    }

    /// `V♯ = diag(1_L, θ) Ψ^{-1}` nilpotent modulo `(p, 𝒩_R)`.
    pub fn is_nilpotent(&self) -> Result<bool, BtError> {
        let k = self.ring.residue_field();
        let psi = self.psi(1)?;
        let m: Vec<Vec<Elem>> = psi.iter().map(|r| r.iter().map(|x| self.ring.residue(x.coord(0))).collect()).collect();
        let inv = field_inverse(&k, &m).ok_or(BtError::Window(crate::error::WindowError::NotInvertible))?;
        let h = self.h;
        let v: Vec<Vec<Elem>> = (0..h).map(|i| if i < self.l { inv[i].clone() } else { vec![k.zero(); h] }).collect();
        let mut pow = v.clone();
        for _ in 1..h.max(1) {
            pow = field_mul(&k, &pow, &v);
        }
        Ok(pow.iter().flatten().all(|x| k.is_zero(x)))
    }
}

fn field_mul(k: &FiniteAlgebra, a: &[Vec<Elem>], b: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..n).map(|j| k.sum(row.iter().zip(b).map(|(x, r)| k.mul(x, &r[j])).collect::<Vec<_>>().iter())).collect())
        .collect()
}

fn field_inverse(k: &FiniteAlgebra, m: &[Vec<Elem>]) -> Option<Vec<Vec<Elem>>> {
    let h = m.len();
    let mut a: Vec<Vec<Elem>> = m.to_vec();
    let mut inv: Vec<Vec<Elem>> = (0..h).map(|i| (0..h).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect();
    for c in 0..h {
        let r = (c..h).find(|r| !k.is_zero(&a[*r][c]))?;
        a.swap(c, r);
        inv.swap(c, r);
        let s = k.inv(&a[c][c])?;
        a[c] = a[c].iter().map(|x| k.mul(&s, x)).collect();
        inv[c] = inv[c].iter().map(|x| k.mul(&s, x)).collect();
        for i in 0..h {
            if i != c && !k.is_zero(&a[i][c]) {
                let f = a[i][c].clone();
                let (pa, pi) = (a[c].clone(), inv[c].clone());
                a[i] = a[i].iter().zip(&pa).map(|(x, y)| k.sub(x, &k.mul(&f, y))).collect();
                inv[i] = inv[i].iter().zip(&pi).map(|(x, y)| k.sub(x, &k.mul(&f, y))).collect();
            }
        }
    }
    Some(inv)
}

/// Escalation schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BtOptions {
    /// First `Ŵ`-level `K` of the cycles.
    pub start_level: usize,
    /// Boundary level above the level of the `P`-part of cycles; `c_e + 1`
    /// when absent.
    pub delta: Option<usize>,
    /// Number of escalation steps before giving up.
    pub cap: usize,
    /// Precision above `exponent_bound(A, L)`.
    pub extra_precision: u32,
}

impl Default for BtOptions {
    fn default() -> Self {
        BtOptions { start_level: 1, delta: None, cap: 6, extra_precision: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub level: usize,
    pub witt_length: usize,
    pub precision: u32,
    pub invariants: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionPoints {
    pub n: u32,
    pub group: PointsGroup,
    pub attempts: Vec<Attempt>,
}

struct Levels {
    nq: usize,
    np: usize,
    nb: usize,
}

fn levels(c: usize, delta: usize, nq: usize) -> Levels {
    let np = nq + 2 * c + 1;
    Levels { nq, np, nb: np + delta }
}

/// Images of level-`nb` generators have support below `nb + 2 c_e + 1`.
fn witt_length(c: usize, delta: usize, nq: usize) -> usize {
    levels(c, delta, nq).nb + 2 * c + 2
}

fn build(src: &DisplaySource, a: &TestAlgebra, n: u32, kind: ModelKind, len: usize, prec: u32) -> Result<Model, BtError> {
    let psi = src.psi_over(a, len.max(prec as usize))?;
    Model::new(a.ring(), &psi, src.l, n, kind, len, prec)
}

fn escalate(src: &DisplaySource, a: &TestAlgebra, n: u32, kind: ModelKind, opts: &BtOptions) -> Result<TorsionPoints, BtError> {
    let ring = a.ring();
    let c = support_growth(ring);
    let delta = opts.delta.unwrap_or(c + 1);
    let mut attempts: Vec<Attempt> = Vec::new();
    for step in 0..opts.cap.max(1) {
        let lv = levels(c, delta, opts.start_level + step);
        let len = witt_length(c, delta, lv.nq);
        let prec = exponent_bound(ring, len) + opts.extra_precision + 2 * step as u32;
        let model = build(src, a, n, kind, len, prec)?;
        let hom = model.homology(lv.nq, lv.np, lv.nb);
        attempts.push(Attempt { level: lv.nq, witt_length: len, precision: prec, invariants: hom.invariants });
        let k = attempts.len();
        if k >= 3 && attempts[k - 3..].iter().all(|t| t.invariants == attempts[k - 1].invariants) {
            let group = PointsGroup::new(ring.p(), attempts[k - 1].invariants.clone());
            return Ok(TorsionPoints { n, group, attempts });
        }
    }
    Err(BtError::NoStabilization {
        cap: opts.cap,
        last: attempts.last().map(|t| t.invariants.clone()).unwrap_or_default(),
    })
}

/// `G[p^n](A)`, escalating level and precision until the invariant factors
/// have repeated twice.
pub fn torsion_points(src: &DisplaySource, a: &TestAlgebra, n: u32, opts: &BtOptions) -> Result<TorsionPoints, BtError> {
    escalate(src, a, n, ModelKind { free: true, zink: true }, opts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShortcutReport {
    /// From `u0 F1 - 1` on the hat parts (the display over `𝒲_A`).
    pub group: PointsGroup,
    /// The same with `F1` over `𝒟_A`; equal through the `c`-twist.
    pub untwisted: PointsGroup,
    pub twist_agrees: bool,
}

/// For nilpotent displays only the hat parts contribute.
pub fn nilpotent_shortcut(src: &DisplaySource, a: &TestAlgebra, n: u32, opts: &BtOptions) -> Result<ShortcutReport, BtError> {
    if !src.is_nilpotent()? {
        return Err(BtError::NotNilpotent);
    }
    let group = escalate(src, a, n, ModelKind { free: false, zink: false }, opts)?.group;
    let untwisted = escalate(src, a, n, ModelKind { free: false, zink: true }, opts)?.group;
    let twist_agrees = group == untwisted;
    Ok(ShortcutReport { group, untwisted, twist_agrees })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub groups: [PointsGroup; 3],
    pub orders_multiply: bool,
    /// Images of cycles are cycles of the next model.
    pub maps_defined: bool,
    pub injective: bool,
    pub composite_zero: bool,
    pub middle_exact: bool,
    pub surjective: bool,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.orders_multiply && self.maps_defined && self.injective && self.composite_zero && self.middle_exact && self.surjective
    }
}

fn int_matrix(m: &Model, ring: &Arc<FiniteAlgebra>, u: &[Vec<i64>], len: usize) -> Result<Vec<Vec<Split>>, BtError> {
    u.iter().map(|r| r.iter().map(|x| m.split(&WittVector::from_int(ring, *x, len))).collect()).collect()
}

fn check_blocks(u: &[Vec<i64>], rows: &DisplaySource, cols: &DisplaySource) -> Result<(), BtError> {
    if u.len() != rows.h || u.iter().any(|r| r.len() != cols.h) {
        return Err(BtError::Source("morphism has the wrong shape".into()));
    }
    for (i, r) in u.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            if *x != 0 && (i < rows.l) != (j < cols.l) {
                return Err(BtError::Source("morphism mixes L and T".into()));
            }
        }
    }
    Ok(())
}

/// Exactness of `0 -> G'[p^n](A) -> G[p^n](A) -> G''[p^n](A) -> 0` for
/// integer morphisms `sub -> total -> quot` respecting `L ⊕ T`.
pub fn check_exactness(
    sub: &DisplaySource,
    total: &DisplaySource,
    quot: &DisplaySource,
    inc: &[Vec<i64>],
    proj: &[Vec<i64>],
    a: &TestAlgebra,
    n: u32,
    level: usize,
) -> Result<ExactnessReport, BtError> {
    check_blocks(inc, total, sub)?;
    check_blocks(proj, quot, total)?;
    let ring = a.ring();
    let c = support_growth(ring);
    let delta = c + 1;
    let g = c + 1;
    let lv: Vec<Levels> = (0..3).map(|k| levels(c, delta, level + k * g)).collect();
    let len = witt_length(c, delta, lv[2].nq);
    let prec = exponent_bound(ring, len) + 2;
    let kind = ModelKind { free: true, zink: true };
    let models = [
        build(sub, a, n, kind, len, prec)?,
        build(total, a, n, kind, len, prec)?,
        build(quot, a, n, kind, len, prec)?,
    ];
    let homs: Vec<_> = models.iter().zip(&lv).map(|(m, l)| m.homology(l.nq, l.np, l.nb)).collect();
    let groups = [0, 1, 2].map(|i| PointsGroup::new(ring.p(), homs[i].invariants.clone()));
    let ui = int_matrix(&models[1], ring, inc, len.max(prec as usize))?;
    let up = int_matrix(&models[2], ring, proj, len.max(prec as usize))?;
    let img_i: Vec<Vec<u64>> = homs[0].cycles.iter().map(|v| models[0].push(&models[1], &ui, v)).collect();
    let img_p: Vec<Vec<u64>> = homs[1].cycles.iter().map(|v| models[1].push(&models[2], &up, v)).collect();
    let img_pi: Vec<Vec<u64>> = img_i.iter().map(|v| models[1].push(&models[2], &up, v)).collect();
    let in_cycles = |m: &Model, h: &model::Homology, x: &[Vec<u64>]| {
        let span: Vec<Vec<u64>> = h.cycles.iter().chain(&h.bounds).cloned().collect();
        m.contained(x, &span)
    };
    let maps_defined = in_cycles(&models[1], &homs[1], &img_i) && in_cycles(&models[2], &homs[2], &img_p);
    let log_i = models[1].log_image(&img_i, &homs[1].bounds);
    let log_p = models[2].log_image(&img_p, &homs[2].bounds);
    let [g0, g1, g2] = [0, 1, 2].map(|i| groups[i].log_order());
    Ok(ExactnessReport {
        orders_multiply: g1 == g0 + g2,
        maps_defined,
        injective: log_i == g0,
        composite_zero: models[2].contained(&img_pi, &homs[2].bounds),
        middle_exact: log_i + log_p == g1,
        surjective: log_p == g2,
        groups,
    })
}
