use super::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    build_truncated_poly_algebra, CoeffKind, DividedPowerStructure, Ideal, PdKind, PrimeParams,
};

fn zmod(p: u64, m: u32) -> Arc<FiniteAlgebra> {
    FiniteAlgebra::integers_mod(p, m).unwrap()
}

fn ftrunc(p: u64, a: u32) -> Arc<FiniteAlgebra> {
    FiniteAlgebra::truncated_field_poly(p, a).unwrap()
}

fn z4t() -> Arc<FiniteAlgebra> {
    let params = PrimeParams::new(2, 2, 1).unwrap();
    build_truncated_poly_algebra(params, CoeffKind::Witt, &["t"], &["t^2", "2t"], None).unwrap()
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(7)
}

#[test]
fn one_plus_one_in_w2_f2() {
    let k = FiniteAlgebra::finite_field(2, 1).unwrap();
    let one = WittVector::one(&k, 2);
    let two = one.add(&one).unwrap();
    assert_eq!(two, WittVector::one(&k, 1).verschiebung());
    let two_poly = one.add_with(&one, WittStrategy::Polynomial).unwrap();
    assert_eq!(two, two_poly);
}

#[test]
fn strategies_agree() {
    let mut r = rng();
    let rings = vec![zmod(2, 3), ftrunc(2, 3), z4t(), zmod(3, 2), ftrunc(3, 2)];
    for ring in rings {
        let max = max_poly_length(ring.p()).min(4);
        for n in 1..=max {
            for _ in 0..10 {
                let x = WittVector::random(&ring, n, &mut r);
                let y = WittVector::random(&ring, n, &mut r);
                assert_eq!(
                    x.add_with(&y, WittStrategy::Polynomial).unwrap(),
                    x.add_with(&y, WittStrategy::GhostLift).unwrap(),
                    "sum over {} at length {n}",
                    ring.name()
                );
                assert_eq!(
                    x.mul_with(&y, WittStrategy::Polynomial).unwrap(),
                    x.mul_with(&y, WittStrategy::GhostLift).unwrap(),
                    "product over {} at length {n}",
                    ring.name()
                );
            }
        }
    }
}

#[test]
fn length_five_polynomials_p2() {
    let mut r = rng();
    let ring = zmod(2, 4);
    for _ in 0..5 {
        let x = WittVector::random(&ring, 5, &mut r);
        let y = WittVector::random(&ring, 5, &mut r);
        assert_eq!(
            x.mul_with(&y, WittStrategy::Polynomial).unwrap(),
            x.mul_with(&y, WittStrategy::GhostLift).unwrap()
        );
    }
    let (s, p) = term_counts(2, 5).unwrap();
    assert_eq!(s[4], 454);
    assert_eq!(p[4], 710);
    assert!(universal_polys(2, 6).is_err());
}

#[test]
fn length_mismatch() {
    let ring = zmod(2, 2);
    let x = WittVector::one(&ring, 2);
    let y = WittVector::one(&ring, 3);
    assert_eq!(x.add(&y), Err(WittError::LengthMismatch(2, 3)));
}

#[test]
fn ring_axioms_random() {
    let mut r = rng();
    for ring in [zmod(2, 3), z4t(), ftrunc(3, 2)] {
        for _ in 0..10 {
            let n = 3;
            let x = WittVector::random(&ring, n, &mut r);
            let y = WittVector::random(&ring, n, &mut r);
            let z = WittVector::random(&ring, n, &mut r);
            let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
            let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert!(x.add(&x.neg()).unwrap().is_zero());
            assert_eq!(x.mul(&WittVector::one(&ring, n)).unwrap(), x);
        }
    }
}

#[test]
fn teichmuller_rules() {
    let mut r = rng();
    let ring = zmod(2, 3);
    for _ in 0..20 {
        let a = ring.random(&mut r);
        let b = ring.random(&mut r);
        let ta = WittVector::teichmuller(&ring, &a, 3);
        let tb = WittVector::teichmuller(&ring, &b, 3);
        assert_eq!(ta.mul(&tb).unwrap(), WittVector::teichmuller(&ring, &ring.mul(&a, &b), 3));
        assert_eq!(ta.frobenius(), WittVector::teichmuller(&ring, &ring.pow(&a, 2), 2));
        let x = WittVector::random(&ring, 3, &mut r);
        assert_eq!(x.mul_teichmuller(&a), ta.mul(&x).unwrap());
    }
}

#[test]
fn fv_is_p_in_char_p() {
    let mut r = rng();
    let ring = ftrunc(2, 3);
    for _ in 0..20 {
        let x = WittVector::random(&ring, 3, &mut r);
        let fv = x.verschiebung().frobenius().truncate(3);
        assert_eq!(fv, x.scale(2));
    }
}

#[test]
fn fv_is_p_general() {
    let mut r = rng();
    let ring = zmod(2, 3);
    for _ in 0..20 {
        let x = WittVector::random(&ring, 3, &mut r);
        assert_eq!(x.verschiebung().frobenius(), x.scale(2));
    }
}

#[test]
fn projection_formula() {
    let mut r = rng();
    for ring in [zmod(2, 3), z4t()] {
        for _ in 0..20 {
            let z = WittVector::random(&ring, 4, &mut r);
            let x = WittVector::random(&ring, 3, &mut r);
            let lhs = z.mul(&x.verschiebung()).unwrap();
            let rhs = z.frobenius().mul(&x).unwrap().verschiebung();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn frobenius_is_p_power_mod_p() {
    let mut r = rng();
    let ring = zmod(2, 3);
    let n = 3;
    // all p y in W_2(Z/8)
    let mut p_multiples = std::collections::HashSet::new();
    for a in 0..8u64 {
        for b in 0..8u64 {
            let y = WittVector::new(&ring, vec![vec![a], vec![b]]);
            p_multiples.insert(y.scale(2).into_coords());
        }
    }
    for _ in 0..20 {
        let x = WittVector::random(&ring, n, &mut r);
        let d = x.frobenius().sub(&x.pow(2).truncate(n - 1)).unwrap();
        assert!(p_multiples.contains(d.coords()));
    }
}

#[test]
fn ghost_is_additive_and_multiplicative_on_covers() {
    let mut r = rng();
    for base in [zmod(2, 3), ftrunc(2, 3), z4t()] {
        let c = base.cover(8).unwrap().ring.clone();
        for _ in 0..100 {
            let x = WittVector::random(&c, 3, &mut r);
            let y = WittVector::random(&c, 3, &mut r);
            let gs = x.add(&y).unwrap().ghost();
            let gp = x.mul(&y).unwrap().ghost();
            let (gx, gy) = (x.ghost(), y.ghost());
            for i in 0..3 {
                assert_eq!(gs[i], c.add(&gx[i], &gy[i]));
                assert_eq!(gp[i], c.mul(&gx[i], &gy[i]));
            }
        }
    }
}

#[test]
fn u0_coordinates_and_v_identity() {
    let ring = zmod(2, 12);
    let u = u0(&ring, 4);
    let m = 1u64 << 12;
    assert_eq!(u.coord(0), &vec![m - 1]);
    assert_eq!(u.coord(1), &vec![m - 4]);
    assert_eq!(u.coord(2), &vec![m - 40]);
    let r8 = zmod(2, 8);
    let u = u0(&r8, 4);
    let lhs = u.verschiebung();
    let rhs = WittVector::from_int(&r8, 2, 5)
        .sub(&WittVector::teichmuller(&r8, &[2], 5))
        .unwrap();
    assert_eq!(lhs, rhs);
    assert!(u.inverse().is_some());
    let r3 = zmod(3, 3);
    assert_eq!(u0(&r3, 3), WittVector::one(&r3, 3));
}

#[test]
fn c_unit_relation() {
    let ring = zmod(2, 6);
    let n = 3;
    let c = c_unit(&ring, n);
    let k = ring.residue_field();
    assert_eq!(c.residue(), WittVector::one(&k, n));
    let u = u0(&ring, n);
    // u0 = c f(c^{-1})  <=>  u0 f(c) = c
    let lhs = u.truncate(n - 1).mul(&c.frobenius()).unwrap();
    assert_eq!(lhs, c.truncate(n - 1));
    assert_eq!(c_unit(&zmod(3, 3), 3), WittVector::one(&zmod(3, 3), 3));
}

#[test]
fn log_of_xi() {
    let ring = zmod(2, 3);
    let pd = DividedPowerStructure::canonical(&ring);
    let n = 4;
    let xi = WittVector::from_int(&ring, 2, n)
        .sub(&WittVector::one(&ring, n - 1).verschiebung())
        .unwrap();
    let log = log_coords(&xi, &pd).unwrap();
    assert_eq!(log, vec![vec![2], vec![0], vec![0], vec![0]]);
    assert_eq!(log_inverse(&ring, &log, &pd, n).unwrap(), xi);
    assert!(matches!(
        log_inverse_finite(&ring, &log, &pd, 4),
        Err(WittError::NonNilpotentTail(_))
    ));
    assert!(log_coords(&WittVector::zero(&ring, 3), &pd).unwrap().iter().all(|c| c == &vec![0]));
}

#[test]
fn log_square_zero_bijection() {
    let ring = ftrunc(2, 4);
    let t2 = ring.basis_elem(2);
    let b = Ideal::new(&ring, vec![t2]).unwrap();
    let pd = DividedPowerStructure::new(b.clone(), PdKind::TrivialSquareZero).unwrap();
    let elems = b.enumerate();
    assert_eq!(elems.len(), 4);
    let mut images = std::collections::HashSet::new();
    let mut all = Vec::new();
    for a in &elems {
        for c in &elems {
            for d in &elems {
                let x = WittVector::new(&ring, vec![a.clone(), c.clone(), d.clone()]);
                let l = log_coords(&x, &pd).unwrap();
                assert_eq!(log_inverse(&ring, &l, &pd, 3).unwrap(), x);
                images.insert(l);
                all.push(x);
            }
        }
    }
    assert_eq!(images.len(), 64);
    for x in all.iter().step_by(5) {
        for y in all.iter().step_by(7) {
            let lhs = log_coords(&x.add(y).unwrap(), &pd).unwrap();
            let (lx, ly) = (log_coords(x, &pd).unwrap(), log_coords(y, &pd).unwrap());
            let rhs: Vec<Elem> = lx.iter().zip(&ly).map(|(a, b)| ring.add(a, b)).collect();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn log_transport_rules() {
    let ring = zmod(2, 4);
    let pd = DividedPowerStructure::canonical(&ring);
    let mut r = rng();
    for _ in 0..20 {
        let coords: Vec<Elem> = (0..4).map(|_| ring.scalar(&ring.random(&mut r), 2)).collect();
        let y = WittVector::new(&ring, coords);
        let ly = log_coords(&y, &pd).unwrap();
        // v shifts
        let lv = log_coords(&y.verschiebung(), &pd).unwrap();
        assert_eq!(lv[0], ring.zero());
        assert_eq!(&lv[1..], &ly[..]);
        // f multiplies the shifted sequence by p
        let lf = log_coords(&y.frobenius(), &pd).unwrap();
        for i in 0..3 {
            assert_eq!(lf[i], ring.scalar(&ly[i + 1], 2));
        }
        // module rule
        let x = WittVector::random(&ring, 4, &mut r);
        let lxy = log_coords(&x.mul(&y).unwrap(), &pd).unwrap();
        let gx = x.ghost();
        for i in 0..4 {
            assert_eq!(lxy[i], ring.mul(&gx[i], &ly[i]));
        }
    }
}

#[test]
fn nil_exponent_matches_exhaustive_probe() {
    let ring = ftrunc(2, 4);
    let n = 3;
    let m = nil_p_exponent(&ring, n).unwrap();
    let nil = ring.nilradical().enumerate(&ring);
    let two = WittVector::from_int(&ring, 2, n);
    let mut worst = 0;
    for a in &nil {
        for b in &nil {
            for c in &nil {
                let mut x = WittVector::new(&ring, vec![a.clone(), b.clone(), c.clone()]);
                let mut e = 0;
                while !x.is_zero() {
                    x = x.mul(&two).unwrap();
                    e += 1;
                }
                worst = worst.max(e);
            }
        }
    }
    assert_eq!(m, worst);
}
