//! Universal Witt addition and multiplication polynomials over `Z`,
//! generated by ghost-solving with exact big integers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::WittError;

type Mono = Vec<u16>;

#[derive(Clone, Debug, Default)]
struct IntPoly {
    terms: HashMap<Mono, BigInt>,
}

impl IntPoly {
    fn var(nvars: usize, i: usize) -> IntPoly {
        let mut m = vec![0u16; nvars];
        m[i] = 1;
        let mut terms = HashMap::new();
        terms.insert(m, BigInt::one());
        IntPoly { terms }
    }

    fn add_assign(&mut self, other: &IntPoly, sign: i32) {
        for (m, c) in &other.terms {
            let e = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
            if sign >= 0 {
                *e += c;
            } else {
                *e -= c;
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut terms: HashMap<Mono, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Mono = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                *terms.entry(m).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        IntPoly { terms }
    }

    fn pow(&self, mut e: u64, nvars: usize) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one(nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn one(nvars: usize) -> IntPoly {
        let mut terms = HashMap::new();
        terms.insert(vec![0u16; nvars], BigInt::one());
        IntPoly { terms }
    }

    fn div_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut terms = HashMap::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            terms.insert(m.clone(), q);
        }
        Some(IntPoly { terms })
    }
}

/// One universal polynomial, ready for evaluation: coefficients reduced
/// modulo the largest power of `p` below `2^62`.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Mono, u64)>,
    exact_terms: usize,
}

impl CompiledPoly {
    pub fn len(&self) -> usize {
        self.exact_terms
    }

    pub fn is_empty(&self) -> bool {
        self.exact_terms == 0
    }
}

/// Sum and product polynomials `S_0..S_{n-1}`, `P_0..P_{n-1}` in the
/// variables `x_0..x_{n-1}, y_0..y_{n-1}`.
#[derive(Debug)]
pub struct UniversalPolys {
    pub p: u64,
    pub n: usize,
    pub sum: Vec<CompiledPoly>,
    pub prod: Vec<CompiledPoly>,
    modulus: u64,
}

/// Largest length for which the polynomials are generated.
pub fn max_poly_length(p: u64) -> usize {
    match p {
        2 => 5,
        3 => 4,
        _ => 3,
    }
}

fn witt_poly(p: u64, i: usize, offset: usize, nvars: usize) -> IntPoly {
    let mut w = IntPoly::default();
    for j in 0..=i {
        let term = IntPoly::var(nvars, offset + j).pow(p.pow((i - j) as u32), nvars);
        w.add_assign(&term.scale(&BigInt::from(p).pow(j as u32)), 1);
    }
    w
}

fn solve(p: u64, n: usize, ghost: impl Fn(usize) -> IntPoly) -> Vec<IntPoly> {
    let nvars = 2 * n;
    let mut out: Vec<IntPoly> = Vec::with_capacity(n);
    for i in 0..n {
        let mut g = ghost(i);
        for (j, s) in out.iter().enumerate() {
            let t = s.pow(p.pow((i - j) as u32), nvars).scale(&BigInt::from(p).pow(j as u32));
            g.add_assign(&t, -1);
        }
        let d = BigInt::from(p).pow(i as u32);
        out.push(g.div_exact(&d).expect("Witt polynomials are integral"));
    }
    out
}

fn compile(poly: &IntPoly, modulus: u64) -> CompiledPoly {
    let m = BigInt::from(modulus);
    let mut terms: Vec<(Mono, u64)> = poly
        .terms
        .iter()
        .map(|(mono, c)| {
            let r = c.mod_floor(&m);
            (mono.clone(), r.to_u64().expect("reduced"))
        })
        .filter(|(_, c)| *c != 0)
        .collect();
    terms.sort();
    CompiledPoly { terms, exact_terms: poly.terms.len() }
}

fn top_modulus(p: u64) -> u64 {
    let mut m = p;
    while m.checked_mul(p).is_some_and(|x| x < (1u64 << 62)) {
        m *= p;
    }
    m
}

impl UniversalPolys {
    fn generate(p: u64, n: usize) -> UniversalPolys {
        let nvars = 2 * n;
        let sum = solve(p, n, |i| {
            let mut w = witt_poly(p, i, 0, nvars);
            w.add_assign(&witt_poly(p, i, n, nvars), 1);
            w
        });
        let prod = solve(p, n, |i| witt_poly(p, i, 0, nvars).mul(&witt_poly(p, i, n, nvars)));
        let modulus = top_modulus(p);
        UniversalPolys {
            p,
            n,
            sum: sum.iter().map(|q| compile(q, modulus)).collect(),
            prod: prod.iter().map(|q| compile(q, modulus)).collect(),
            modulus,
        }
    }

    /// Evaluates `polys` on `(x, y)` in the ring.
    pub fn eval(&self, ring: &FiniteAlgebra, polys: &[CompiledPoly], x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        debug_assert_eq!(self.modulus % ring.zpm().modulus(), 0);
        debug_assert_eq!(x.len(), self.n);
        let n = x.len();
        let vars: Vec<&Elem> = x.iter().chain(y.iter()).collect();
        let max_exp = self.p.pow(self.n as u32 - 1) as usize;
        // powers[v][e] = vars[v]^e
        let mut powers: Vec<Vec<Elem>> = Vec::with_capacity(vars.len());
        for v in &vars {
            let mut row = Vec::with_capacity(max_exp + 1);
            row.push(ring.one());
            for e in 1..=max_exp {
                let next = ring.mul(&row[e - 1], v);
                row.push(next);
            }
            powers.push(row);
        }
        polys[..n]
            .iter()
            .map(|poly| {
                let mut acc = ring.zero();
                for (mono, c) in &poly.terms {
                    let mut t = ring.from_int((*c % ring.zpm().modulus()) as i64);
                    for (v, e) in mono.iter().enumerate() {
                        if *e > 0 {
                            t = ring.mul(&t, &powers[v][*e as usize]);
                        }
                    }
                    acc = ring.add(&acc, &t);
                }
                acc
            })
            .collect()
    }
}

type CacheCell = Arc<OnceLock<Arc<UniversalPolys>>>;

fn cache() -> &'static Mutex<HashMap<(u64, usize), CacheCell>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), CacheCell>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The cached polynomials for `(p, n)`, generated on first use.
pub fn universal_polys(p: u64, n: usize) -> Result<Arc<UniversalPolys>, WittError> {
    if n > max_poly_length(p) {
        return Err(WittError::LengthTooLarge(max_poly_length(p)));
    }
    let cell = {
        let mut map = cache().lock().expect("polynomial cache");
        map.entry((p, n)).or_default().clone()
    };
    Ok(cell.get_or_init(|| Arc::new(UniversalPolys::generate(p, n))).clone())
}

/// Term counts of the exact integer polynomials, for reporting.
pub fn term_counts(p: u64, n: usize) -> Result<(Vec<usize>, Vec<usize>), WittError> {
    let u = universal_polys(p, n)?;
    Ok((u.sum.iter().map(|c| c.len()).collect(), u.prod.iter().map(|c| c.len()).collect()))
}
