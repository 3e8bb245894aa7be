//! Log coordinates on `W(b)` for a divided power ideal `b`: the divided Witt
//! polynomials `w~_n(x) = sum_i ((p^{n-i})! / p^{n-i}) gamma_{p^{n-i}}(x_i)`.

use std::sync::Arc;

use crate::algebra::{DividedPowerStructure, Elem, FiniteAlgebra};
use crate::error::WittError;

use super::WittVector;

/// `(p^k)! / p^k` modulo `modulus`.
pub fn divided_coeff(p: u64, k: u32, modulus: u64) -> u64 {
    let n = p.pow(k);
    let m = modulus as u128;
    let mut val: i64 = -(k as i64);
    let mut acc: u128 = 1 % m;
    for i in 1..=n {
        let mut j = i;
        while j % p == 0 {
            j /= p;
            val += 1;
        }
        acc = acc * (j as u128 % m) % m;
    }
    for _ in 0..val {
        acc = acc * p as u128 % m;
    }
    acc as u64
}

fn gamma_term(
    pd: &DividedPowerStructure,
    ring: &FiniteAlgebra,
    k: u32,
    x: &[u64],
) -> Result<Elem, WittError> {
    let p = ring.p();
    let g = pd.gamma(p.pow(k), x)?;
    Ok(ring.scalar(&g, divided_coeff(p, k, ring.zpm().modulus()) as i64))
}

fn check_ideal(pd: &DividedPowerStructure, xs: &[Elem]) -> Result<(), WittError> {
    match xs.iter().position(|x| !pd.contains(x)) {
        Some(i) => Err(WittError::NotInIdeal(i)),
        None => Ok(()),
    }
}

/// Log coordinates of a vector with all coordinates in the PD ideal.
pub fn log_coords(x: &WittVector, pd: &DividedPowerStructure) -> Result<Vec<Elem>, WittError> {
    let ring = x.ring();
    check_ideal(pd, x.coords())?;
    (0..x.len())
        .map(|n| {
            let mut acc = ring.zero();
            for (i, xi) in x.coords().iter().enumerate().take(n + 1) {
                acc = ring.add(&acc, &gamma_term(pd, ring, (n - i) as u32, xi)?);
            }
            Ok(acc)
        })
        .collect()
}

/// First `n` Witt coordinates of the vector whose Log coordinates are `c`
/// (extended by zeros).
pub fn log_inverse(
    ring: &Arc<FiniteAlgebra>,
    c: &[Elem],
    pd: &DividedPowerStructure,
    n: usize,
) -> Result<WittVector, WittError> {
    check_ideal(pd, c)?;
    let mut x: Vec<Elem> = Vec::with_capacity(n);
    for k in 0..n {
        let mut r = c.get(k).cloned().unwrap_or_else(|| ring.zero());
        for (i, xi) in x.iter().enumerate() {
            r = ring.sub(&r, &gamma_term(pd, ring, (k - i) as u32, xi)?);
        }
        x.push(r);
    }
    Ok(WittVector::new(ring, x))
}

/// Log inverse of a finite sequence, required to have finite support within
/// the support of `c`; checked on `guard` further coordinates.
pub fn log_inverse_finite(
    ring: &Arc<FiniteAlgebra>,
    c: &[Elem],
    pd: &DividedPowerStructure,
    guard: usize,
) -> Result<WittVector, WittError> {
    let len = c.len();
    let full = log_inverse(ring, c, pd, len + guard)?;
    if let Some(i) = (len..len + guard).find(|i| !ring.is_zero(full.coord(*i))) {
        return Err(WittError::NonNilpotentTail(i));
    }
    Ok(full.truncate(len))
}
