use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::{build_truncated_poly_algebra, CoeffKind, PdKind, PrimeParams};
use crate::witt::WittVector;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(11)
}

fn zmod(p: u64, m: u32) -> Arc<FiniteAlgebra> {
    FiniteAlgebra::integers_mod(p, m).unwrap()
}

fn ftrunc(p: u64, a: u32) -> Arc<FiniteAlgebra> {
    FiniteAlgebra::truncated_field_poly(p, a).unwrap()
}

fn sigma_is_theta_sigma1(f: &Frame) {
    let mut r = rng();
    for _ in 0..100 {
        let x = f.random_ideal(&mut r);
        let lhs = f.sigma(&x);
        let rhs = f.mul(f.theta(), &f.sigma1(&x).unwrap());
        assert!(f.eq(&lhs, &rhs), "{:?} at {x:?}", f);
    }
}

#[test]
fn theta_of_witt_frame_is_p() {
    for ring in [zmod(2, 3), ftrunc(2, 3), zmod(3, 2)] {
        let f = Frame::witt(&ring, 3).unwrap();
        assert!(f.eq(f.theta(), &f.from_int(ring.p() as i64)));
    }
}

#[test]
fn theta_of_dieudonne_frame() {
    // p = 2: θ = 2 - [4]
    let ring = zmod(2, 4);
    let f = Frame::dieudonne(&ring, 3).unwrap();
    let four = WittVector::teichmuller(&ring, &ring.from_int(4), 3);
    let want = WittVector::from_int(&ring, 2, 3).sub(&four).unwrap();
    assert_eq!(f.theta().witt(), &want.truncate(f.theta().precision()));
    assert_eq!(f.theta().witt().ghost(), want.truncate(f.theta().precision()).ghost());
    // p = 3: θ = 3 u0 = 3
    let ring = zmod(3, 2);
    let f = Frame::dieudonne(&ring, 3).unwrap();
    assert!(f.eq(f.theta(), &f.from_int(3)));
}

#[test]
fn sigma_factors_through_theta() {
    for ring in [zmod(2, 3), ftrunc(2, 3), zmod(3, 2), ftrunc(3, 2)] {
        sigma_is_theta_sigma1(&Frame::witt(&ring, 3).unwrap());
        sigma_is_theta_sigma1(&Frame::dieudonne(&ring, 3).unwrap());
    }
    sigma_is_theta_sigma1(&Frame::vstab(&zmod(2, 3), 3).unwrap());
    let b = ftrunc(2, 4);
    let ideal = Ideal::new(&b, vec![b.pow(&b.basis_elem(1), 2)]).unwrap();
    let pd = DividedPowerStructure::new(ideal, PdKind::TrivialSquareZero).unwrap();
    sigma_is_theta_sigma1(&Frame::relative(&pd, 3).unwrap());
}

fn bk_frame() -> Frame {
    // 𝔖 = Z/4[u]/u^4, σ(u) = u^2, E = u + 2
    let s = build_truncated_poly_algebra(
        PrimeParams::new(2, 2, 1).unwrap(),
        CoeffKind::Witt,
        &["u"],
        &[],
        Some(4),
    )
    .unwrap();
    let u = s.basis_elem(1);
    let images = (0..4).map(|i| s.pow(&u, 2 * i)).collect();
    let sigma = AlgebraHom::new(&s, &s, images).unwrap();
    let e = s.add(&u, &s.from_int(2));
    Frame::breuil_kisin(&s, sigma, e).unwrap()
}

#[test]
fn breuil_kisin_theta() {
    let f = bk_frame();
    let e = f.ideal_generator();
    assert!(f.eq(f.theta(), &f.sigma(&e)));
    sigma_is_theta_sigma1(&f);
}

#[test]
fn u_homomorphisms() {
    let mut r = rng();
    for ring in [zmod(2, 3), ftrunc(2, 3), zmod(3, 2)] {
        let d = Arc::new(Frame::dieudonne(&ring, 3).unwrap());
        let w = Arc::new(Frame::witt(&ring, 3).unwrap());
        assert!(FrameHom::identity(d.clone()).check(&mut r, 30).passed);
        let h = FrameHom::inclusion(d.clone(), w);
        assert!(h.check(&mut r, 30).passed, "{:?}", h.check(&mut r, 30));
        if ring.p() == 2 {
            let plus = Arc::new(Frame::vstab(&ring, 3).unwrap());
            assert!(FrameHom::inclusion(d, plus).check(&mut r, 30).passed);
        }
    }
}

#[test]
fn wrong_unit_fails() {
    let ring = zmod(2, 3);
    let d = Arc::new(Frame::dieudonne(&ring, 3).unwrap());
    let w = Arc::new(Frame::witt(&ring, 3).unwrap());
    let one = w.one();
    let h = FrameHom::new(d, w, Arc::new(|x| x.clone()), one);
    let rep = h.check(&mut rng(), 30);
    assert!(!rep.passed);
    assert!(rep.counterexample.is_some());
}

#[test]
fn composition_multiplies_units() {
    let ring = zmod(2, 3);
    let d = Arc::new(Frame::dieudonne(&ring, 3).unwrap());
    let w = Arc::new(Frame::witt(&ring, 3).unwrap());
    let h = FrameHom::identity(d.clone()).then(&FrameHom::inclusion(d, w.clone()));
    assert!(w.eq(h.u(), &w.u0()));
    assert!(h.check(&mut rng(), 20).passed);
}
