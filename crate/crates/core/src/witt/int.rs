//! Witt vectors over `Z`: ghost maps, ghost solving, and the distinguished
//! integral vectors `u0` and `c`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::modular::Zpm;

/// Ghost components `w_i = sum_j p^j x_j^{p^{i-j}}` of an integral vector.
pub fn ghost_int(p: u64, x: &[BigInt]) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    (0..x.len())
        .map(|i| {
            (0..=i).fold(BigInt::zero(), |acc, j| {
                acc + pb.pow(j as u32) * x[j].pow(p.pow((i - j) as u32) as u32)
            })
        })
        .collect()
}

/// Recovers an integral vector from its ghost components. Returns the first
/// index where division by `p^i` is not exact.
pub fn from_ghost_int(p: u64, ghost: &[BigInt]) -> Result<Vec<BigInt>, usize> {
    let pb = BigInt::from(p);
    let mut x: Vec<BigInt> = Vec::with_capacity(ghost.len());
    for (i, g) in ghost.iter().enumerate() {
        let mut r = g.clone();
        for (j, xj) in x.iter().enumerate() {
            r -= pb.pow(j as u32) * xj.pow(p.pow((i - j) as u32) as u32);
        }
        let d = pb.pow(i as u32);
        let (q, rem) = r.div_rem(&d);
        if !rem.is_zero() {
            return Err(i);
        }
        x.push(q);
    }
    Ok(x)
}

/// Ghost solving modulo `p^M`: `ghost` is known modulo `p^M` and the result
/// coordinate `i` is correct modulo `p^{M-i}`. `None` if a division fails.
pub fn from_ghost_mod(z: &Zpm, ghost: &[u64]) -> Option<Vec<u64>> {
    let p = z.p();
    let mut x: Vec<u64> = Vec::with_capacity(ghost.len());
    for (i, g) in ghost.iter().enumerate() {
        let mut r = *g;
        for (j, xj) in x.iter().enumerate() {
            let t = z.mul(z.p_pow(j as u32), z.pow(*xj, p.pow((i - j) as u32)));
            r = z.sub(r, t);
        }
        if i as u32 >= z.exp() {
            x.push(0);
            continue;
        }
        let q = z.div_p_pow(r, i as u32)?;
        x.push(q % (z.modulus() / p.pow(i as u32)));
    }
    Some(x)
}

/// Ghost components of `u0`: `1 - p^{p^{i+1}-1}` for `p = 2`, all `1` for odd `p`.
pub fn u0_ghost(p: u64, n: usize) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    (0..n)
        .map(|i| {
            if p == 2 {
                BigInt::one() - pb.pow((p.pow(i as u32 + 1) - 1) as u32)
            } else {
                BigInt::one()
            }
        })
        .collect()
}

/// Exact coordinates of `u0` in `W(Z)`, e.g. `(-1, -4, -40, ...)` for `p = 2`.
pub fn u0_integer(p: u64, n: usize) -> Vec<BigInt> {
    from_ghost_int(p, &u0_ghost(p, n)).expect("u0 is integral")
}

/// Coordinates of `f^k(u0)` modulo `p^M` (coordinate `i` valid mod `p^{M-i}`).
pub fn frobenius_power_u0_mod(z: &Zpm, k: u32, n: usize) -> Vec<u64> {
    let p = z.p();
    let ghost: Vec<u64> = (0..n)
        .map(|i| {
            if p == 2 {
                let e = p.checked_pow(i as u32 + k + 1).map_or(u64::MAX, |x| x - 1);
                let t = if e >= z.exp() as u64 { 0 } else { z.p_pow(e as u32) };
                z.sub(1 % z.modulus(), t)
            } else {
                1 % z.modulus()
            }
        })
        .collect();
    from_ghost_mod(z, &ghost).expect("u0 is integral")
}

/// Coordinates of the integer `c` in `W(Z)` modulo `p^M`.
pub fn integer_mod(z: &Zpm, c: i64, n: usize) -> Vec<u64> {
    let g = z.reduce_i128(c as i128);
    from_ghost_mod(z, &vec![g; n]).expect("integers are integral")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|x| BigInt::from(*x)).collect()
    }

    #[test]
    fn ghost_of_v1() {
        assert_eq!(ghost_int(2, &big(&[0, 1, 0])), big(&[0, 2, 2]));
    }

    #[test]
    fn u0_first_coordinates() {
        assert_eq!(u0_ghost(2, 3), big(&[-1, -7, -127]));
        assert_eq!(u0_integer(2, 3), big(&[-1, -4, -40]));
        assert_eq!(u0_integer(3, 4), big(&[1, 0, 0, 0]));
    }

    #[test]
    fn mod_solver_matches_exact() {
        let z = Zpm::new(2, 16).unwrap();
        let exact = u0_integer(2, 5);
        let approx = frobenius_power_u0_mod(&z, 0, 5);
        for (i, (e, a)) in exact.iter().zip(&approx).enumerate() {
            let m = BigInt::from(2u64.pow(16 - i as u32));
            assert_eq!(e.mod_floor(&m), BigInt::from(*a % 2u64.pow(16 - i as u32)));
        }
    }

    #[test]
    fn minus_one() {
        let z = Zpm::new(2, 8).unwrap();
        let c = integer_mod(&z, -1, 3);
        let exact = from_ghost_int(2, &big(&[-1, -1, -1])).unwrap();
        assert_eq!(exact, big(&[-1, -1, -1]));
        assert_eq!(c[0], 255);
        assert_eq!(c[1] % 128, 127);
    }
}
