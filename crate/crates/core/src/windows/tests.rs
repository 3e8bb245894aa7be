use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::{DividedPowerStructure, FiniteAlgebra, Ideal, PdKind};
use crate::frames::{Frame, FrameHom};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(5)
}

fn dieudonne(ring: Arc<FiniteAlgebra>, n: usize) -> Arc<Frame> {
    Arc::new(Frame::dieudonne(&ring, n).unwrap())
}

fn frames() -> Vec<Arc<Frame>> {
    vec![
        dieudonne(FiniteAlgebra::integers_mod(2, 3).unwrap(), 3),
        dieudonne(FiniteAlgebra::truncated_field_poly(2, 3).unwrap(), 3),
        dieudonne(FiniteAlgebra::integers_mod(3, 2).unwrap(), 2),
    ]
}

fn random_window(f: &Arc<Frame>, r: &mut ChaCha8Rng) -> Window {
    let h = r.gen_range(1..=3);
    let l = r.gen_range(0..=h);
    Window::random(f, h, l, r)
}

/// `B -> B/𝔟` with trivial divided powers on the square-zero ideal `𝔟`.
fn relative(b: Arc<FiniteAlgebra>, gen: Vec<u64>, n: usize) -> Arc<Frame> {
    let ideal = Ideal::new(&b, vec![gen]).unwrap();
    let pd = DividedPowerStructure::new(ideal, PdKind::TrivialSquareZero).unwrap();
    Arc::new(Frame::relative(&pd, n).unwrap())
}

#[test]
fn window_axioms_hold() {
    let mut r = rng();
    for f in frames() {
        for _ in 0..5 {
            let w = random_window(&f, &mut r);
            w.check_axioms(&mut r, 5).unwrap();
        }
        Window::unit(&f).check_axioms(&mut r, 5).unwrap();
    }
}

#[test]
fn validity_is_det_unit() {
    let f = &frames()[0];
    let mut r = rng();
    let w = Window::random(f, 2, 1, &mut r);
    // a singular residue matrix is rejected
    let mut psi = w.psi().clone();
    psi[1] = psi[0].clone();
    assert!(matches!(Window::new(f, 1, psi), Err(WindowError::NotInvertible)));
    // perturbing by the ideal keeps validity
    let mut psi = w.psi().clone();
    psi[0][0] = f.add(&psi[0][0], &f.random_ideal(&mut r));
    assert!(Window::new(f, 1, psi).is_ok());
}

#[test]
fn fv_identities() {
    let mut r = rng();
    for f in frames() {
        let unit = Window::unit(&f).to_fv_module();
        assert!(matrix::is_identity(&f, &unit.f_sharp));
        assert!(f.eq(&unit.v_sharp[0][0], f.theta()));
        for _ in 0..5 {
            let rep = random_window(&f, &mut r).to_fv_module().check();
            assert!(rep.fv_is_theta && rep.vf_is_theta);
        }
    }
}

#[test]
fn fv_round_trip() {
    let mut r = rng();
    for f in frames() {
        for _ in 0..4 {
            let w = random_window(&f, &mut r);
            let fv = w.to_fv_module();
            let back = fv.to_window().unwrap();
            assert_eq!(back.rank_l(), w.rank_l());
            assert!(back.to_fv_module().equals(&fv));
        }
    }
}

#[test]
fn duality() {
    let mut r = rng();
    for f in frames() {
        let d = Window::unit(&f).dual();
        assert_eq!((d.rank_l(), d.dimension()), (1, 0));
        assert!(matrix::is_identity(&f, d.psi()));
        for _ in 0..5 {
            let w = random_window(&f, &mut r);
            assert!(w.is_bidual());
            let rep = pairing_check(&w, &w.dual(), &mut r, 5);
            assert!(rep.passed(), "{rep:?}");
            assert!(w.dual().to_fv_module().equals(&w.to_fv_module().dual()));
        }
    }
}

#[test]
fn base_change_along_u0_homs() {
    let ring = FiniteAlgebra::integers_mod(2, 3).unwrap();
    let d = dieudonne(ring.clone(), 3);
    let plus = Arc::new(Frame::vstab(&ring, 3).unwrap());
    let w = Arc::new(Frame::witt(&ring, 3).unwrap());
    let unit = Window::unit(&d).base_change(&FrameHom::inclusion(d.clone(), plus.clone()));
    assert!(matrix::is_identity(&plus, unit.psi()));
    let id = FrameHom::identity(d.clone());
    let mut r = rng();
    for _ in 0..5 {
        let x = random_window(&d, &mut r);
        assert!(matrix::equal(&d, x.base_change(&id).psi(), x.psi()));
        let y = x.base_change(&FrameHom::inclusion(d.clone(), w.clone()));
        let rep = y.to_fv_module().check();
        assert!(rep.fv_is_theta && rep.vf_is_theta);
        y.check_axioms(&mut r, 3).unwrap();
    }
}

#[test]
fn base_change_is_functorial() {
    let ring = FiniteAlgebra::truncated_field_poly(2, 3).unwrap();
    let d = dieudonne(ring.clone(), 3);
    let w = Arc::new(Frame::witt(&ring, 3).unwrap());
    let a = FrameHom::identity(d.clone());
    let b = FrameHom::inclusion(d, w.clone());
    let mut r = rng();
    for _ in 0..5 {
        let x = random_window(a.source(), &mut r);
        let one = x.base_change(&a).base_change(&b);
        let two = x.base_change(&a.then(&b));
        assert!(matrix::equal(&w, one.psi(), two.psi()));
    }
}

#[test]
fn crystalline_lift_is_unique() {
    let b = FiniteAlgebra::truncated_field_poly(2, 4).unwrap();
    let t2 = b.pow(&b.basis_elem(1), 2);
    let rel = relative(b, t2, 3);
    let base = dieudonne(rel.quotient().clone(), 3);
    let mut r = rng();
    for _ in 0..3 {
        let w = Window::random(&base, 2, 1, &mut r);
        let l1 = lift_window_random(&w, &rel, &mut r).unwrap();
        let l2 = lift_window_random(&w, &rel, &mut r).unwrap();
        assert!(matrix::equal(&base, reduce_window(&l1, &base).psi(), w.psi()));
        let iso = canonical_iso(&l1, &l2).unwrap();
        assert!(iso.steps <= iso.bound);
        assert!(l1.is_isomorphism(&l2, &iso.matrix));
        let red = matrix::map(&iso.matrix, |x| {
            crate::frames::SElem::W(x.witt().map(rel.projection()))
        });
        assert!(matrix::is_identity(&base, &red));
        let back = canonical_iso(&l2, &l1).unwrap();
        assert!(matrix::is_identity(&rel, &matrix::mul(&rel, &back.matrix, &iso.matrix)));
    }
    let w = Window::random(&base, 2, 1, &mut r);
    let l = lift_window(&w, &rel).unwrap();
    assert!(matrix::is_identity(&rel, &canonical_iso(&l, &l).unwrap().matrix));
}

#[test]
fn hodge_lifts_biject() {
    let b = FiniteAlgebra::truncated_field_poly(2, 2).unwrap();
    let eps = b.basis_elem(1);
    let rel = relative(b.clone(), eps, 2);
    let base = dieudonne(rel.quotient().clone(), 2);
    let db = dieudonne(b, 2);
    let mut r = rng();
    let w = lift_window(&Window::random(&base, 2, 1, &mut r), &rel).unwrap();
    let e = enumerate_lifts(&w, &db).unwrap();
    assert!(e.is_bijection(), "{e:?}");
    assert_eq!(e.classes, 2);
    let taut = vec![vec![rel.ring().one(), rel.ring().zero()]];
    let lw = lift_hodge(&w, &taut, &db).unwrap();
    assert_eq!((lw.height(), lw.dimension()), (2, 1));
    assert!(matches!(
        lift_hodge(&w, &[vec![rel.ring().zero(), rel.ring().one()]], &db),
        Err(WindowError::NotASummand)
    ));
}

#[test]
fn crystal_value_bookkeeping() {
    let mut r = rng();
    let f = &frames()[1];
    let w = Window::random(f, 3, 1, &mut r);
    let c = crystal_value(&w, None).unwrap();
    assert_eq!((c.rank, c.corank, c.hodge.len()), (3, 2, 1));
    let b = FiniteAlgebra::truncated_field_poly(2, 4).unwrap();
    let t2 = b.pow(&b.basis_elem(1), 2);
    let rel = relative(b, t2, 3);
    let base = dieudonne(rel.quotient().clone(), 3);
    let w = Window::random(&base, 2, 1, &mut r);
    let up = crystal_value(&w, Some(&rel)).unwrap();
    let down = crystal_value(&w, None).unwrap();
    let proj: Vec<Vec<_>> =
        up.psi0.iter().map(|row| row.iter().map(|x| rel.projection().apply(x)).collect()).collect();
    assert_eq!(proj, down.psi0);
}

#[test]
fn dieudonne_modules() {
    let k = FiniteAlgebra::finite_field(2, 1).unwrap();
    let wk = Arc::new(Frame::witt(&k, 4).unwrap());
    let dk = dieudonne(k.clone(), 4);
    let p = wk.from_int(2);
    // unit window Q = I: F = 1, V = p
    let m = Window::unit(&dk).to_dieudonne_module().unwrap();
    assert!(wk.eq(&m.f[0][0], &wk.one()) && wk.eq(&m.v[0][0], &p));
    // L = P: F = p, V = 1
    let m = Window::etale_unit(&dk, 1).to_dieudonne_module().unwrap();
    assert!(wk.eq(&m.f[0][0], &p) && wk.eq(&m.v[0][0], &wk.one()));
    let mut r = rng();
    for _ in 0..5 {
        let w = Window::random(&wk, 2, r.gen_range(0..=2), &mut r);
        let m = w.to_dieudonne_module().unwrap();
        let rep = m.check().unwrap();
        assert!(rep.fv_is_p && rep.vf_is_p);
        let back = m.to_window().unwrap();
        assert!(back.to_fv_module().equals(&w.to_fv_module()));
    }
    let r2 = FiniteAlgebra::integers_mod(2, 2).unwrap();
    let f = dieudonne(r2, 2);
    assert!(matches!(Window::unit(&f).to_dieudonne_module(), Err(WindowError::NotPerfectBase)));
}

#[test]
fn direct_sum_shape() {
    let f = &frames()[0];
    let s = Window::unit(f).direct_sum(&Window::etale_unit(f, 1));
    assert_eq!((s.rank_l(), s.dimension()), (1, 1));
    s.check_axioms(&mut rng(), 3).unwrap();
}
