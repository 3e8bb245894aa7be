//! Arithmetic and linear algebra over the local rings `Z/p^M`.
//!
//! Everything in this module works with plain `u64` residues in `[0, p^M)`.
//! Matrices are row-major `Vec<Vec<u64>>`; a module is always spanned by the
//! *rows* of a matrix, and linear maps act on row vectors from the right.

use crate::error::AlgebraError;

/// The ring `Z/p^M` for a prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zpm {
    p: u64,
    exp: u32,
    modulus: u64,
}

impl Zpm {
    pub fn new(p: u64, exp: u32) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let modulus = p
            .checked_pow(exp)
            .filter(|m| *m < (1u64 << 62))
            .ok_or(AlgebraError::PrecisionOverflow { p, exp })?;
        Ok(Zpm { p, exp, modulus })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn exp(&self) -> u32 {
        self.exp
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// p-adic valuation of a residue; `exp` for zero.
    pub fn val(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.exp;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let (g, x, _) = ext_gcd(a as i128, self.modulus as i128);
        debug_assert_eq!(g, 1);
        Some(self.reduce_i128(x))
    }

    /// `p^e` reduced; zero once `e >= exp`.
    pub fn p_pow(&self, e: u32) -> u64 {
        if e >= self.exp {
            0
        } else {
            self.p.pow(e)
        }
    }

    /// Writes a nonzero `a` as `p^v * u` with `u` a unit and returns `(v, u)`.
    pub fn split(&self, a: u64) -> (u32, u64) {
        let v = self.val(a);
        (v, a / self.p.pow(v.min(self.exp - 1)) % self.modulus)
    }

    /// Divides `a` by `p^v` when possible, returning one representative.
    pub fn div_p_pow(&self, a: u64, v: u32) -> Option<u64> {
        if v == 0 {
            return Some(a);
        }
        if self.val(a) < v {
            return None;
        }
        if v >= self.exp {
            return Some(0);
        }
        Some(a / self.p.pow(v))
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub type Matrix = Vec<Vec<u64>>;

pub fn zero_matrix(rows: usize, cols: usize) -> Matrix {
    vec![vec![0; cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zero_matrix(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// Row vector times matrix.
pub fn vec_mat(z: &Zpm, x: &[u64], a: &Matrix, cols: usize) -> Vec<u64> {
    let mut out = vec![0; cols];
    for (xi, row) in x.iter().zip(a) {
        if *xi == 0 {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o = z.add(*o, z.mul(*xi, *r));
        }
    }
    out
}

pub fn mat_mul(z: &Zpm, a: &Matrix, b: &Matrix, cols: usize) -> Matrix {
    a.iter().map(|row| vec_mat(z, row, b, cols)).collect()
}

/// A Howell-normalized row basis of a submodule of `(Z/p^M)^n`.
///
/// Pivots are powers of `p`, entries above a pivot are reduced modulo it, and
/// the Howell property holds: every element of the span whose first `c`
/// entries vanish is spanned by the rows with pivot column `>= c`. This makes
/// the form canonical for the submodule and membership testing exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellForm {
    pub ncols: usize,
    /// `(pivot column, pivot valuation, row)` in increasing column order.
    pub rows: Vec<(usize, u32, Vec<u64>)>,
}

pub fn howell_form(z: &Zpm, gens: &[Vec<u64>], ncols: usize) -> HowellForm {
    let mut work: Vec<Vec<u64>> = gens
        .iter()
        .map(|r| r.iter().map(|x| x % z.modulus()).collect())
        .filter(|r: &Vec<u64>| r.iter().any(|x| *x != 0))
        .collect();
    let mut out: Vec<(usize, u32, Vec<u64>)> = Vec::new();
    for col in 0..ncols {
        // rows in `work` vanish on all columns < col
        let best = work
            .iter()
            .enumerate()
            .filter(|(_, r)| r[col] != 0)
            .min_by_key(|(_, r)| z.val(r[col]))
            .map(|(i, _)| i);
        let Some(bi) = best else { continue };
        let mut piv = work.swap_remove(bi);
        let (v, u) = z.split(piv[col]);
        let uinv = z.inv(u).expect("unit part");
        for x in piv.iter_mut() {
            *x = z.mul(*x, uinv);
        }
        for r in work.iter_mut() {
            if r[col] != 0 {
                let q = z.div_p_pow(r[col], v).expect("min valuation pivot");
                for (x, y) in r.iter_mut().zip(&piv) {
                    *x = z.sub(*x, z.mul(q, *y));
                }
            }
        }
        // saturation: p^(M-v) * pivot row kills the pivot entry
        let sat: Vec<u64> = piv.iter().map(|x| z.mul(*x, z.p_pow(z.exp() - v))).collect();
        work.retain(|r| r.iter().any(|x| *x != 0));
        if sat.iter().any(|x| *x != 0) {
            work.push(sat);
        }
        out.push((col, v, piv));
    }
    // reduce entries above pivots; column c_j is untouched by later rows
    for j in 0..out.len() {
        let (cj, vj, rowj) = out[j].clone();
        let pv = z.p_pow(vj);
        for i in 0..j {
            let x = out[i].2[cj];
            if pv == 0 {
                continue;
            }
            let q = x / pv;
            if q != 0 {
                let row = &mut out[i].2;
                for (a, b) in row.iter_mut().zip(&rowj) {
                    *a = z.sub(*a, z.mul(q, *b));
                }
            }
        }
    }
    HowellForm { ncols, rows: out }
}

impl HowellForm {
    /// Number of elements of the spanned submodule, as a power of `p`.
    pub fn log_order(&self, z: &Zpm) -> u32 {
        self.rows.iter().map(|(_, v, _)| z.exp() - v).sum()
    }

    /// Reduces `x` against the form; returns the remainder.
    pub fn reduce(&self, z: &Zpm, x: &[u64]) -> Vec<u64> {
        let mut r: Vec<u64> = x.iter().map(|a| a % z.modulus()).collect();
        for (c, v, row) in &self.rows {
            if r[*c] == 0 {
                continue;
            }
            let Some(q) = z.div_p_pow(r[*c], *v) else {
                continue;
            };
            for (a, b) in r.iter_mut().zip(row) {
                *a = z.sub(*a, z.mul(q, *b));
            }
        }
        r
    }

    pub fn contains(&self, z: &Zpm, x: &[u64]) -> bool {
        self.reduce(z, x).iter().all(|a| *a == 0)
    }

    pub fn basis(&self) -> Vec<Vec<u64>> {
        self.rows.iter().map(|(_, _, r)| r.clone()).collect()
    }
}

/// Kernel, image and membership data for the map `x -> x A` on `(Z/p^M)^rows`.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub kernel: HowellForm,
    pub image: HowellForm,
}

pub fn solve_linear(z: &Zpm, a: &Matrix, rows: usize, cols: usize) -> LinearSolution {
    // Howell form of [A | I]: rows with vanishing A-part span the kernel.
    let aug: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.extend((0..rows).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    let h = howell_form(z, &aug, cols + rows);
    let kernel_rows: Vec<Vec<u64>> = h
        .rows
        .iter()
        .filter(|(c, _, _)| *c >= cols)
        .map(|(_, _, r)| r[cols..].to_vec())
        .collect();
    LinearSolution {
        kernel: howell_form(z, &kernel_rows, rows),
        image: howell_form(z, a, cols),
    }
}

/// Solves `x A = b` for one particular `x`, if a solution exists.
pub fn solve_particular(z: &Zpm, a: &Matrix, rows: usize, cols: usize, b: &[u64]) -> Option<Vec<u64>> {
    let snf = smith(z, a, rows, cols);
    // x A = b  <=>  (x U^-1) D = b V, with A = U^-1 D V^-1
    let bv = vec_mat(z, b, &snf.right, cols);
    let mut y = vec![0u64; rows];
    for (j, bj) in bv.iter().enumerate() {
        if j < snf.diag.len() && snf.diag[j] != 0 {
            let (v, u) = z.split(snf.diag[j]);
            let q = z.div_p_pow(*bj, v)?;
            y[j] = z.mul(q, z.inv(u).expect("unit"));
        } else if *bj != 0 {
            return None;
        }
    }
    // x = y U
    Some(vec_mat(z, &y, &snf.left, rows))
}

/// Smith normal form `left * A * right = diag` over `Z/p^M`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub left: Matrix,
    pub right: Matrix,
    /// Diagonal entries, each a power of `p` (zero allowed), nondecreasing valuation.
    pub diag: Vec<u64>,
}

pub fn smith(z: &Zpm, a: &Matrix, rows: usize, cols: usize) -> Smith {
    let mut m: Matrix = a.iter().map(|r| r.iter().map(|x| x % z.modulus()).collect()).collect();
    let mut left = identity(rows);
    let mut right = identity(cols);
    let steps = rows.min(cols);
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if *x != 0 {
                    let v = z.val(*x);
                    if best.map_or(true, |b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((bi, bj, v)) = best else {
            diag.extend(std::iter::repeat(0).take(steps - k));
            break;
        };
        m.swap(k, bi);
        left.swap(k, bi);
        for row in m.iter_mut() {
            row.swap(k, bj);
        }
        for row in right.iter_mut() {
            row.swap(k, bj);
        }
        let (_, u) = z.split(m[k][k]);
        let uinv = z.inv(u).expect("unit");
        for x in m[k].iter_mut() {
            *x = z.mul(*x, uinv);
        }
        for x in left[k].iter_mut() {
            *x = z.mul(*x, uinv);
        }
        for i in 0..rows {
            if i != k && m[i][k] != 0 {
                let q = z.div_p_pow(m[i][k], v).expect("min valuation");
                let (mk, lk) = (m[k].clone(), left[k].clone());
                for (x, y) in m[i].iter_mut().zip(&mk) {
                    *x = z.sub(*x, z.mul(q, *y));
                }
                for (x, y) in left[i].iter_mut().zip(&lk) {
                    *x = z.sub(*x, z.mul(q, *y));
                }
            }
        }
        for j in 0..cols {
            if j != k && m[k][j] != 0 {
                let q = z.div_p_pow(m[k][j], v).expect("min valuation");
                for row in m.iter_mut() {
                    let t = z.mul(q, row[k]);
                    row[j] = z.sub(row[j], t);
                }
                for row in right.iter_mut() {
                    let t = z.mul(q, row[k]);
                    row[j] = z.sub(row[j], t);
                }
            }
        }
        diag.push(m[k][k]);
    }
    Smith { left, right, diag }
}

/// Invariant factors of `(Z/p^M)^n / span(rows)`, as exponents `e` of `p^e`,
/// omitting trivial factors, in increasing order.
pub fn cokernel_invariants(z: &Zpm, rels: &[Vec<u64>], n: usize) -> Vec<u32> {
    let snf = smith(z, &rels.to_vec(), rels.len(), n);
    let mut out: Vec<u32> = (0..n)
        .map(|j| snf.diag.get(j).map_or(z.exp(), |d| z.val(*d)))
        .filter(|e| *e > 0)
        .collect();
    out.sort_unstable();
    out
}
