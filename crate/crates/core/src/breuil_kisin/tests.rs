use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::windows::{matrix, SMatrix};
use crate::witt::ghost_in;

fn spec(m: u32, a: u32, vars: &[&str], e: &str, sigma: &[&str]) -> BkSpec {
    BkSpec {
        p: 2,
        m,
        a,
        vars: vars.iter().map(|s| s.to_string()).collect(),
        e: e.into(),
        sigma: sigma.iter().map(|s| s.to_string()).collect(),
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(9)
}

#[test]
fn motivating_example_kappa() {
    let s = BkSetup::new(BkSpec::motivating(2, 12, 8)).unwrap();
    let r = s.base().clone();
    assert_eq!((r.rank(), r.char_exponent()), (1, 8));
    let n = 4;
    let two = WittVector::from_int(&r, 2, n);
    let expect = two.sub(&WittVector::teichmuller(&r, &r.from_int(2), n)).unwrap();
    let units = s.units(n).unwrap();
    assert_eq!(units.kappa_e, expect);
    assert!(units.u.len() + 1 >= n);
    assert_eq!(units.u, u0(&r, n).truncate(units.u.len()));
    assert!(units.u_is_unit);
    assert_eq!(units.relation, Some(true));
    let uu = units.uu.unwrap();
    assert_eq!(uu, WittVector::one(&r, uu.len()));
    // constants go to their Witt images
    for c in [0, 1, 3, 7, 100] {
        assert_eq!(s.kappa(&s.ring().from_int(c), n).unwrap(), WittVector::from_int(&r, c, n));
    }
}

#[test]
fn kappa_is_a_frame_hom() {
    let s = BkSetup::new(BkSpec::motivating(2, 12, 8)).unwrap();
    let mut r = rng();
    for kind in [FrameKind::Witt, FrameKind::Dieudonne] {
        let h = s.kappa_hom(4, kind).unwrap();
        let rep = h.check(&mut r, 50);
        assert!(rep.passed, "{kind:?}: {rep:?}");
    }
}

#[test]
fn delta_examples() {
    let s = BkSetup::new(BkSpec::motivating(2, 6, 4)).unwrap();
    let t = s.var(0);
    let d = s.delta(&t, 3).unwrap();
    assert_eq!(d, WittVector::teichmuller(s.ring(), &t, 3));
    assert_eq!(s.delta(&s.ring().one(), 3).unwrap(), WittVector::one(s.ring(), 3));
    let s = BkSetup::new(spec(6, 4, &["t"], "2 - t", &["t^2 + 2*t"])).unwrap();
    let ring = s.ring();
    let t = s.var(0);
    let d = s.delta(&t, 3).unwrap();
    let ghost = ghost_in(ring, d.coords());
    let mut st = t.clone();
    for g in ghost {
        assert_eq!(g, st);
        st = s.sigma(&st);
    }
    assert_eq!(d.coord(1), &t);
}

#[test]
fn kappa_table_matches_direct_delta() {
    let s = BkSetup::new(spec(8, 4, &["t"], "2 - t", &["t^2"])).unwrap();
    let mut r = rng();
    for _ in 0..10 {
        let x = s.ring().random(&mut r);
        assert_eq!(s.kappa(&x, 3).unwrap(), s.kappa_direct(&x, 3).unwrap());
    }
}

#[test]
fn non_frobenius_lift_is_rejected() {
    assert!(BkSetup::new(spec(4, 3, &["t"], "2 - t", &["t"])).is_err());
    assert!(BkSetup::new(spec(4, 3, &["t"], "t", &["t^2"])).is_err());
}

#[test]
fn nilpotence_examples() {
    let cases = [
        (spec(4, 4, &["x"], "2 - x", &["x^2"]), true),
        (spec(4, 4, &["x", "y"], "2 - x", &["x^2 + 2*y", "y^2"]), true),
        (spec(4, 4, &["x"], "2 - x", &["x^2 + 2*x"]), false),
    ];
    for (sp, expect) in cases {
        let s = BkSetup::new(sp).unwrap();
        let rep = s.nilpotence_condition().unwrap();
        assert_eq!(rep.holds, expect, "{rep:?}");
        assert!(rep.delta_agrees, "{rep:?}");
        assert_eq!(rep.delta_witness.is_none(), expect);
    }
    let s = BkSetup::new(spec(4, 4, &["x"], "2 - x", &["x^2 + 2*x"])).unwrap();
    assert!(matches!(s.kappa_hom(2, FrameKind::Dieudonne), Err(BkError::NotInZink(_))));
}

#[test]
fn graded_tau_lemma() {
    let s = BkSetup::new(spec(5, 4, &["t"], "2 - t", &["t^2 + 2*t"])).unwrap();
    let nil = s.nilpotence_condition().unwrap();
    for n in 0..=2 {
        let g = s.graded_tau(n).unwrap();
        assert!(g.in_filtration && g.commutes && g.vanishes_on_kernel, "{g:?}");
        assert_eq!(g.gr_0, nil.matrix);
    }
    assert!(s.graded_tau(3).is_err());
    // τ(x) = y for σ(x) = x^2 + 2y
    let s = BkSetup::new(spec(4, 3, &["x", "y"], "2 - x", &["x^2 + 2*y", "y^2"])).unwrap();
    let g = s.graded_tau(0).unwrap();
    assert_eq!(g.gr_0, vec![vec![0, 0], vec![1, 0]]);
    let g = s.graded_tau(1).unwrap();
    assert!(g.commutes && g.vanishes_on_kernel);
}

fn invertible(f: &Frame, r: &mut ChaCha8Rng) -> SMatrix {
    loop {
        let m: SMatrix = (0..2).map(|_| (0..2).map(|_| f.random(r)).collect()).collect();
        if matrix::is_invertible(f, &m) {
            return m;
        }
    }
}

fn motiv16() -> BkSetup {
    BkSetup::new(BkSpec::motivating(2, 8, 4)).unwrap()
}

#[test]
fn breuil_window_shapes() {
    let s = motiv16();
    let ring = s.ring();
    let w = BreuilWindow::new(&s, vec![vec![s.e().clone()]]).unwrap().to_window().unwrap().window;
    assert_eq!((w.height(), w.dimension()), (1, 1));
    let w = BreuilWindow::new(&s, vec![vec![ring.one()]]).unwrap().to_window().unwrap().window;
    assert_eq!((w.height(), w.dimension()), (1, 0));
    assert!(matches!(BreuilWindow::new(&s, vec![vec![s.var(0)]]), Err(BkError::NotAWindow(_))));
    assert!(matches!(BreuilWindow::new(&s, vec![vec![ring.zero()]]), Err(BkError::NotAWindow(_))));
}

#[test]
fn breuil_window_round_trip() {
    let s = motiv16();
    let f = s.frame().clone();
    let mut r = rng();
    for _ in 0..5 {
        let a = invertible(&f, &mut r);
        let b = invertible(&f, &mut r);
        let d = vec![vec![f.one(), f.zero()], vec![f.zero(), SElem::A(s.e().clone())]];
        let phi = matrix::mul(&f, &matrix::mul(&f, &a, &d), &b);
        let phi: Vec<Vec<Elem>> = phi.iter().map(|r| r.iter().map(|x| x.elem().clone()).collect()).collect();
        let bw = BreuilWindow::new(&s, phi).unwrap();
        let conv = bw.to_window().unwrap();
        assert_eq!(conv.window.rank_l(), 1);
        conv.window.check_axioms(&mut r, 5).unwrap();
        let back = BreuilWindow::from_window(&conv.window).unwrap();
        assert!(bw.is_isomorphism(&back, &conv.basis_change));
        let again = back.to_window().unwrap();
        assert_eq!(again.window.rank_l(), 1);
        let third = BreuilWindow::from_window(&again.window).unwrap();
        assert!(back.is_isomorphism(&third, &again.basis_change));
    }
}

#[test]
fn displays_from_breuil_windows() {
    let s = motiv16();
    let e = BreuilWindow::new(&s, vec![vec![s.e().clone()]]).unwrap();
    let one = BreuilWindow::new(&s, vec![vec![s.ring().one()]]).unwrap();
    let mut r = rng();
    let de = bk_to_display(&s, &e, 3).unwrap();
    assert_eq!((de.height(), de.dimension()), (1, 1));
    assert_eq!(de.frame().kind(), FrameKind::Dieudonne);
    de.check_axioms(&mut r, 5).unwrap();
    let d1 = bk_to_display(&s, &one, 3).unwrap();
    assert_eq!((d1.height(), d1.dimension()), (1, 0));
    assert!(matrix::is_identity(d1.frame(), d1.psi()));
    let sum = bk_to_display(&s, &e.direct_sum(&one), 3).unwrap();
    assert_eq!((sum.height(), sum.dimension()), (2, 1));
    let rep = sum.to_fv_module().check();
    assert!(rep.fv_is_theta && rep.vf_is_theta);
}

#[test]
fn breuil_module_validation() {
    let s = motiv16();
    let ring = s.ring();
    let e = s.e().clone();
    let m = |phi: &Elem, psi: &Elem| BreuilModule { torsion: 1, phi: vec![vec![phi.clone()]], psi: vec![vec![psi.clone()]] };
    assert!(m(&e, &ring.one()).validate(&s).valid());
    assert!(m(&ring.one(), &e).validate(&s).valid());
    let bad = m(&ring.zero(), &e).validate(&s);
    assert!(!bad.valid() && !bad.failures.is_empty());
}
