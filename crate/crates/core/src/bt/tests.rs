use super::*;

fn z16() -> Arc<FiniteAlgebra> {
    FiniteAlgebra::integers_mod(2, 4).unwrap()
}

fn t(k: u32) -> Arc<FiniteAlgebra> {
    FiniteAlgebra::truncated_field_poly(2, k).unwrap()
}

fn g(inv: &[u32]) -> PointsGroup {
    PointsGroup::new(2, inv.to_vec())
}

#[test]
fn mu_oracle() {
    assert_eq!(mu_reference(&z16(), 2), g(&[1, 2]));
    assert_eq!(mu_reference(&z16(), 1), g(&[1, 1]));
    assert_eq!(mu_reference(&t(3), 1), g(&[1]));
    // 1 + N over F_2[t]/t^4 is Z/4 x Z/2; all of it is 4-torsion
    assert_eq!(mu_reference(&t(4), 2), g(&[1, 2]));
    assert_eq!(mu_reference(&FiniteAlgebra::finite_field(2, 1).unwrap(), 3), g(&[]));
    assert_eq!(g(&[2, 1]).to_string(), "Z/4 x Z/2");
}

#[test]
fn counts_to_invariants() {
    assert_eq!(invariants_from_counts(3, &[0, 2, 3, 3]), PointsGroup::new(3, vec![1, 2]));
    assert_eq!(etale_reference(2, 2, 2), g(&[2, 2]));
}

fn pts(src: &DisplaySource, a: &Arc<FiniteAlgebra>, n: u32) -> PointsGroup {
    let ta = TestAlgebra::over_itself(a).unwrap();
    torsion_points(src, &ta, n, &BtOptions::default()).unwrap().group
}

#[test]
fn multiplicative_points() {
    for (a, n) in [(z16(), 2), (t(3), 1), (t(4), 2)] {
        assert_eq!(pts(&DisplaySource::unit(&a), &a, n), mu_reference(&a, n), "{} n={n}", a.name());
    }
}

#[test]
fn etale_points() {
    for a in [z16(), t(2)] {
        for h in 1..=2 {
            for n in 1..=2 {
                assert_eq!(pts(&DisplaySource::etale(&a, h), &a, n), etale_reference(2, h, n), "{} h={h} n={n}", a.name());
            }
        }
    }
}

/// `Ψ = [[1, 0], [c, 1]]` with `L` first: an extension of the étale display
/// by the multiplicative one.
fn extension(a: &Arc<FiniteAlgebra>, c: Elem) -> DisplaySource {
    let r = a.clone();
    DisplaySource::from_fn(a, 1, 2, move |len| {
        let one = WittVector::one(&r, len);
        let zero = WittVector::zero(&r, len);
        Ok(vec![vec![one.clone(), zero], vec![WittVector::teichmuller(&r, &c, len), one]])
    })
}

#[test]
fn split_extension_is_exact() {
    let a = t(2);
    let (mu, et) = (DisplaySource::unit(&a), DisplaySource::etale(&a, 1));
    let sum = et.direct_sum(&mu);
    let ta = TestAlgebra::over_itself(&a).unwrap();
    let rep = check_exactness(&mu, &sum, &et, &[vec![0], vec![1]], &[vec![1, 0]], &ta, 1, 1).unwrap();
    assert!(rep.exact(), "{rep:?}");
    assert_eq!(rep.groups[0], mu_reference(&a, 1));
    assert_eq!(rep.groups[2], etale_reference(2, 1, 1));
}

/// Over `F_2[t]/t^2` the class of the extension is `1 + t`, not a square,
/// so `G[2] -> Z/2` is not onto. After `t -> s^2` it becomes a square and
/// the sequence splits on points.
#[test]
fn nonsplit_extension_on_points() {
    let a = t(2);
    let ext = extension(&a, a.basis_elem(1));
    let (mu, et) = (DisplaySource::unit(&a), DisplaySource::etale(&a, 1));
    let check = |ta: &TestAlgebra| {
        check_exactness(&mu, &ext, &et, &[vec![0], vec![1]], &[vec![1, 0]], ta, 1, 1).unwrap()
    };
    let rep = check(&TestAlgebra::over_itself(&a).unwrap());
    assert!(rep.maps_defined && rep.injective && rep.composite_zero && rep.middle_exact, "{rep:?}");
    assert!(!rep.surjective && !rep.orders_multiply);
    assert_eq!(rep.groups[1], g(&[1]));
    let s4 = t(4);
    let sq = TestAlgebra::new(AlgebraHom::new(&a, &s4, vec![s4.one(), s4.basis_elem(2)]).unwrap()).unwrap();
    let rep = check(&sq);
    assert!(rep.exact(), "{rep:?}");
    assert_eq!(rep.groups[1].log_order(), 3);
    let f2 = FiniteAlgebra::finite_field(2, 1).unwrap();
    let red = TestAlgebra::new(AlgebraHom::new(&a, &f2, vec![f2.one(), f2.zero()]).unwrap()).unwrap();
    assert_eq!(torsion_points(&ext, &red, 1, &BtOptions::default()).unwrap().group, g(&[1]));
    // a map mixing L and T is refused
    let ta = TestAlgebra::over_itself(&a).unwrap();
    assert!(check_exactness(&mu, &ext, &et, &[vec![1], vec![0]], &[vec![1, 0]], &ta, 1, 1).is_err());
}

#[test]
fn nilpotent_shortcut_agrees() {
    for (a, n) in [(t(3), 1), (z16(), 2)] {
        let src = DisplaySource::unit(&a);
        let ta = TestAlgebra::over_itself(&a).unwrap();
        let rep = nilpotent_shortcut(&src, &ta, n, &BtOptions::default()).unwrap();
        assert!(rep.twist_agrees, "{rep:?}");
        assert_eq!(rep.group, pts(&src, &a, n));
    }
    let k = FiniteAlgebra::finite_field(2, 1).unwrap();
    let ta = TestAlgebra::over_itself(&k).unwrap();
    let rep = nilpotent_shortcut(&DisplaySource::unit(&k), &ta, 2, &BtOptions::default()).unwrap();
    assert!(rep.group.is_trivial());
    let et = DisplaySource::etale(&z16(), 1);
    let ta = TestAlgebra::over_itself(&z16()).unwrap();
    assert!(matches!(nilpotent_shortcut(&et, &ta, 1, &BtOptions::default()), Err(BtError::NotNilpotent)));
}

#[test]
fn points_over_an_algebra() {
    // Z/16 -> Z/4
    let r = z16();
    let a = FiniteAlgebra::integers_mod(2, 2).unwrap();
    let hom = AlgebraHom::new(&r, &a, vec![a.one()]).unwrap();
    let ta = TestAlgebra::new(hom).unwrap();
    let got = torsion_points(&DisplaySource::unit(&r), &ta, 1, &BtOptions::default()).unwrap();
    assert_eq!(got.group, mu_reference(&a, 1));
    let f4 = FiniteAlgebra::finite_field(2, 2).unwrap();
    assert!(matches!(TestAlgebra::over_itself(&f4), Err(BtError::BadTestAlgebra(_))));
}

#[test]
fn breuil_kisin_displays() {
    let setup = Arc::new(BkSetup::new(crate::breuil_kisin::BkSpec::motivating(2, 33, 4)).unwrap());
    // three escalation steps stay within Witt length 28, which m = 33 supports
    let opts = BtOptions { cap: 3, ..Default::default() };
    let r = setup.base().clone();
    assert_eq!((r.rank(), r.char_exponent()), (1, 4));
    let e = BreuilWindow::new(&setup, vec![vec![setup.e().clone()]]).unwrap();
    let one = BreuilWindow::new(&setup, vec![vec![setup.ring().one()]]).unwrap();
    let ta = TestAlgebra::over_itself(&r).unwrap();
    let mu = torsion_points(&DisplaySource::from_breuil(setup.clone(), e).unwrap(), &ta, 2, &opts).unwrap();
    assert_eq!(mu.group, mu_reference(&r, 2));
    let et = torsion_points(&DisplaySource::from_breuil(setup, one).unwrap(), &ta, 2, &opts).unwrap();
    assert_eq!(et.group, etale_reference(2, 1, 2));
}
