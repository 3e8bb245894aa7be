//! Finite models of the cone of `p^n` on `Z(𝒫) = [Q_A -> P_A]`.
//!
//! `𝕎(A) = W(k) ⊕ Ŵ(𝒩_A)` with `k = F_p`. The `W(k)` summand is kept as a
//! free `Z_p`-coordinate (an integer `c`, standing for its image in `W(A)`).
//! `Ŵ(𝒩)` is exhausted by the finite subgroups `S_K` spanned by the
//! `v^i [a]` with `i < K`. Every element of `S_K` has support below
//! `K + c_e`, so all arithmetic is exact inside `W_L(A)` once `L` is large.
//! The cohomology of `Z` is the colimit over `K`. The model computes the
//! image of the level-`K` cycles in the level-`K + Δ` homology.

use std::sync::Arc;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::BtError;
use crate::modular::{howell_form, smith, solve_linear, cokernel_invariants, vec_mat, Matrix, Zpm};
use crate::witt::{u0, WittGroup, WittVector};

/// `s(c) + ŷ` with `c ∈ Z_p` (mod `p^{m'}`) and `ŷ` of nilpotent coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Split {
    pub c: u64,
    pub hat: WittVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ModelKind {
    /// Keep the `W(k)` coordinate; off for the hat complex.
    pub free: bool,
    /// `𝕧 = v(u0 ·)` on the `T`-part; `v` otherwise.
    pub zink: bool,
}

pub(crate) struct Model {
    a: Arc<FiniteAlgebra>,
    z: Zpm,
    len: usize,
    gl: WittGroup,
    kind: ModelKind,
    h: usize,
    l: usize,
    psi: Vec<Vec<Split>>,
    eps: WittVector,
    u0: WittVector,
    nil: Vec<Elem>,
    pn: u64,
}

/// Cycles and boundaries inside the middle term, in ambient coordinates.
#[derive(Clone, Debug)]
pub(crate) struct Homology {
    pub cycles: Vec<Vec<u64>>,
    pub bounds: Vec<Vec<u64>>,
    pub invariants: Vec<u32>,
}

/// Smallest `c` with `p^c >= e`, where `𝒩^e = 0`. The bound on `e` is the
/// length of `𝒩` plus one.
pub(crate) fn support_growth(a: &Arc<FiniteAlgebra>) -> usize {
    let e = a.nilradical().log_order() as u64 + 1;
    let mut c = 0;
    let mut q = 1u64;
    while q < e {
        q *= a.p();
        c += 1;
    }
    c
}

/// `Z_p`-kernel of `x -> x A` read off a Smith form: rows of `left` whose
/// diagonal entry vanishes modulo `p^{m'}`.
pub(crate) fn exact_kernel(z: &Zpm, a: &Matrix, rows: usize, cols: usize) -> Vec<Vec<u64>> {
    let s = smith(z, a, rows, cols);
    (0..rows)
        .filter(|i| *i >= s.diag.len() || s.diag[*i] == 0)
        .map(|i| s.left[i].clone())
        .collect()
}

fn teich_int(z: &Zpm, a: u64) -> u64 {
    let mut x = a % z.modulus();
    for _ in 0..z.exp() {
        x = z.pow(x, z.p());
    }
    x
}

impl Model {
    /// `psi` over `A`, with entries of length at least `max(len, prec)`.
    pub fn new(
        a: &Arc<FiniteAlgebra>,
        psi: &[Vec<WittVector>],
        l: usize,
        n: u32,
        kind: ModelKind,
        len: usize,
        prec: u32,
    ) -> Result<Model, BtError> {
        let z = Zpm::new(a.p(), prec)?;
        let gl = WittGroup::new(a, len, prec);
        let p = a.p();
        let shift_one = if kind.zink { u0(a, len - 1).verschiebung() } else { WittVector::one(a, len - 1).verschiebung() };
        let eps = shift_one.sub(&WittVector::from_int(a, p as i64, len))?;
        let nil = a.nilradical().enumerate(a).into_iter().filter(|x| !a.is_zero(x)).collect();
        let mut me = Model {
            a: a.clone(),
            z,
            len,
            gl,
            kind,
            h: psi.len(),
            l,
            psi: Vec::new(),
            eps,
            u0: u0(a, len),
            nil,
            pn: p.pow(n),
        };
        if !me.is_nil(&me.eps) {
            return Err(BtError::Source("shift of 1 is not p plus a nilpotent vector".into()));
        }
        let mut rows = Vec::with_capacity(me.h);
        for row in psi {
            let mut out = Vec::with_capacity(row.len());
            for (j, x) in row.iter().enumerate() {
                let mut s = me.split(x)?;
                if !kind.zink && j < l {
                    let u = me.split(&u0(a, x.len()))?;
                    s = me.mul(&u, &s);
                }
                out.push(s);
            }
            rows.push(out);
        }
        me.psi = rows;
        Ok(me)
    }

    fn width(&self) -> usize {
        usize::from(self.kind.free) + self.gl.generators().len()
    }

    /// Ambient dimension of the middle term `P ⊕ Q`.
    pub fn dim(&self) -> usize {
        2 * self.h * self.width()
    }

    fn is_nil(&self, x: &WittVector) -> bool {
        x.coords().iter().all(|c| self.a.is_nilpotent(c))
    }

    /// Splits a vector of `W(A)` known to at least `max(len, prec)` places.
    pub fn split(&self, y: &WittVector) -> Result<Split, BtError> {
        let need = self.len.max(self.z.exp() as usize);
        if y.len() < need {
            return Err(BtError::Source(format!("display entries of length {} < {need}", y.len())));
        }
        let p = self.a.p();
        let mut c = 0u64;
        let mut pi = 1u64;
        for i in 0..(self.z.exp() as usize).min(y.len()) {
            let r = self.a.residue(y.coord(i));
            if r.len() != 1 {
                return Err(BtError::BadTestAlgebra("residue field must be F_p".into()));
            }
            c = self.z.add(c, self.z.mul(teich_int(&self.z, r[0]), pi));
            pi = self.z.mul(pi, p);
        }
        let hat = y.truncate(self.len).sub(&WittVector::from_int(&self.a, c as i64, self.len))?;
        if !self.is_nil(&hat) {
            return Err(BtError::Source("entry is not in the Zink ring".into()));
        }
        Ok(Split { c, hat })
    }

    fn zero(&self) -> Split {
        Split { c: 0, hat: WittVector::zero(&self.a, self.len) }
    }

    fn add(&self, x: &Split, y: &Split) -> Split {
        Split { c: self.z.add(x.c, y.c), hat: x.hat.add(&y.hat).expect("same length") }
    }

    fn sub(&self, x: &Split, y: &Split) -> Split {
        Split { c: self.z.sub(x.c, y.c), hat: x.hat.sub(&y.hat).expect("same length") }
    }

    fn scale(&self, x: &Split, k: u64) -> Split {
        Split { c: self.z.mul(x.c, k), hat: if x.hat.is_zero() { x.hat.clone() } else { x.hat.scale(k as i64) } }
    }

    fn scale_hat(&self, w: &WittVector, k: u64) -> WittVector {
        match k {
            0 => WittVector::zero(&self.a, self.len),
            1 => w.clone(),
            _ if w.is_zero() => w.clone(),
            _ => w.scale(k as i64),
        }
    }

    fn mul(&self, x: &Split, y: &Split) -> Split {
        let mut hat = self.scale_hat(&y.hat, x.c);
        let t = self.scale_hat(&x.hat, y.c);
        if !t.is_zero() {
            hat = hat.add(&t).expect("same length");
        }
        if !x.hat.is_zero() && !y.hat.is_zero() {
            hat = hat.add(&x.hat.mul(&y.hat).expect("same length")).expect("same length");
        }
        Split { c: self.z.mul(x.c, y.c), hat }
    }

    /// `f` on finite-support input: `f` is the identity on `W(F_p)`.
    pub fn frob(&self, x: &Split) -> Split {
        let hat = if x.hat.is_zero() {
            x.hat.clone()
        } else {
            x.hat.zero_extend(self.len + 1).frobenius().truncate(self.len)
        };
        Split { c: x.c, hat }
    }

    /// `𝕧` (or `v`): `c` goes to `p c + c ε`.
    fn shift(&self, x: &Split) -> Split {
        let mut hat = self.scale_hat(&self.eps, x.c);
        if !x.hat.is_zero() {
            let y = if self.kind.zink { x.hat.mul(&self.u0).expect("same length") } else { x.hat.clone() };
            hat = hat.add(&y.verschiebung().truncate(self.len)).expect("same length");
        }
        Split { c: self.z.mul(x.c, self.a.p()), hat }
    }

    /// Generators of the level-`k` piece of one slot.
    fn gens(&self, k: usize) -> Vec<Split> {
        let mut out = Vec::new();
        if self.kind.free {
            out.push(Split { c: 1, hat: WittVector::zero(&self.a, self.len) });
        }
        for i in 0..k.min(self.len) {
            for a in &self.nil {
                let mut g = WittVector::teichmuller(&self.a, a, self.len - i);
                for _ in 0..i {
                    g = g.verschiebung();
                }
                out.push(Split { c: 0, hat: g });
            }
        }
        out
    }

    fn slot_coords(&self, x: &Split) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.width());
        if self.kind.free {
            v.push(x.c % self.z.modulus());
        }
        v.extend(self.gl.coords(&x.hat).into_iter().map(|c| c % self.z.modulus()));
        v
    }

    /// `F1 - ι` on the element `x` placed in `Q`-slot `j`.
    fn d_slot(&self, j: usize, x: &Split) -> Vec<Split> {
        let c = if j < self.l { self.frob(x) } else { x.clone() };
        (0..self.h)
            .map(|i| {
                let f1 = self.mul(&self.psi[i][j], &c);
                if i != j {
                    f1
                } else if j < self.l {
                    self.sub(&f1, x)
                } else {
                    self.sub(&f1, &self.shift(x))
                }
            })
            .collect()
    }

    /// Ambient coordinates of `(x, q)` in the middle term.
    pub fn encode(&self, x: &[Split], q: &[Split]) -> Vec<u64> {
        x.iter().chain(q).flat_map(|s| self.slot_coords(s)).collect()
    }

    pub fn decode(&self, v: &[u64]) -> (Vec<Split>, Vec<Split>) {
        let w = self.width();
        let free = usize::from(self.kind.free);
        let slots: Vec<Split> = v
            .chunks(w)
            .map(|ch| Split { c: if self.kind.free { ch[0] } else { 0 }, hat: self.gl.element(&ch[free..]) })
            .collect();
        let q = slots[self.h..].to_vec();
        let mut x = slots;
        x.truncate(self.h);
        (x, q)
    }

    fn place(&self, slot: usize, coords: &[u64], total_slots: usize) -> Vec<u64> {
        let w = self.width();
        let mut v = vec![0u64; total_slots * w];
        v[slot * w..(slot + 1) * w].copy_from_slice(coords);
        v
    }

    /// Relations of `total_slots` copies of `Z_p ⊕ W_L(A)`.
    fn relations(&self, total_slots: usize) -> Vec<Vec<u64>> {
        let free = usize::from(self.kind.free);
        let mut out = Vec::new();
        for s in 0..total_slots {
            for r in self.gl.group().relations() {
                let mut c = vec![0u64; self.width()];
                c[free..].copy_from_slice(r);
                out.push(self.place(s, &c, total_slots));
            }
        }
        out
    }

    /// `(Cycles_{nq} + B_{nb}) / B_{nb}` with `x` ranging over level `np`.
    pub fn homology(&self, nq: usize, np: usize, nb: usize) -> Homology {
        let z = &self.z;
        let (h, w) = (self.h, self.width());
        let pdim = h * w;
        let dim = self.dim();
        // rows of `p^n x - d(q) = 0`, with their position in the middle term
        let mut aug: Matrix = Vec::new();
        let mut mid: Matrix = Vec::new();
        for i in 0..h {
            for g in self.gens(np) {
                aug.push(self.place(i, &self.slot_coords(&self.scale(&g, self.pn)), h));
                mid.push(self.place(i, &self.slot_coords(&g), 2 * h));
            }
        }
        for j in 0..h {
            for g in self.gens(nq) {
                let d: Vec<u64> = self.d_slot(j, &g).iter().flat_map(|s| self.slot_coords(s)).collect();
                aug.push(d.iter().map(|c| z.neg(*c)).collect());
                mid.push(self.place(h + j, &self.slot_coords(&g), 2 * h));
            }
        }
        for r in self.relations(h) {
            aug.push(r);
            mid.push(vec![0; dim]);
        }
        let ker = exact_kernel(z, &aug, aug.len(), pdim);
        let cycles: Vec<Vec<u64>> = ker
            .iter()
            .map(|k| vec_mat(z, k, &mid, dim))
            .filter(|v| v.iter().any(|c| *c != 0))
            .collect();
        let mut bounds = self.relations(2 * h);
        for j in 0..h {
            for g in self.gens(nb) {
                let mut v: Vec<u64> = self.d_slot(j, &g).iter().flat_map(|s| self.slot_coords(s)).collect();
                v.extend(self.place(j, &self.slot_coords(&self.scale(&g, self.pn)), h));
                bounds.push(v);
            }
        }
        let invariants = self.subquotient_invariants(&cycles, &bounds);
        Homology { cycles, bounds, invariants }
    }

    /// Invariant factors of `(span(a) + span(b)) / span(b)`.
    pub fn subquotient_invariants(&self, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<u32> {
        if a.is_empty() {
            return Vec::new();
        }
        let z = &self.z;
        let m: Matrix = a.iter().chain(b).cloned().collect();
        let sol = solve_linear(z, &m, m.len(), self.dim());
        let rels: Vec<Vec<u64>> = sol.kernel.basis().into_iter().map(|r| r[..a.len()].to_vec()).collect();
        cokernel_invariants(z, &rels, a.len())
    }

    /// `log_p |(span(a) + span(b)) / span(b)|`.
    pub fn log_image(&self, a: &[Vec<u64>], b: &[Vec<u64>]) -> u32 {
        let dim = self.dim();
        let both: Vec<Vec<u64>> = a.iter().chain(b).cloned().collect();
        howell_form(&self.z, &both, dim).log_order(&self.z) - howell_form(&self.z, b, dim).log_order(&self.z)
    }

    pub fn contained(&self, a: &[Vec<u64>], b: &[Vec<u64>]) -> bool {
        let hf = howell_form(&self.z, b, self.dim());
        a.iter().all(|x| hf.contains(&self.z, x))
    }

    /// Image of a middle element under a block-diagonal morphism `U`
    /// (entries over `A`), encoded in `target`. `f(U)` acts on the
    /// `T`-coordinates written as `𝕧(z)`.
    pub fn push(&self, target: &Model, u: &[Vec<Split>], v: &[u64]) -> Vec<u64> {
        let (x, q) = self.decode(v);
        let apply = |vec: &[Split], twist: bool| -> Vec<Split> {
            (0..target.h)
                .map(|i| {
                    let mut acc = target.zero();
                    for (j, s) in vec.iter().enumerate() {
                        let e = if twist && j >= self.l { target.frob(&u[i][j]) } else { u[i][j].clone() };
                        if e.c == 0 && e.hat.is_zero() {
                            continue;
                        }
                        acc = target.add(&acc, &target.mul(&e, s));
                    }
                    acc
                })
                .collect()
        };
        target.encode(&apply(&x, false), &apply(&q, true))
    }
}
