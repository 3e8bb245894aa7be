use super::*;

fn z(p: u64, m: u32) -> Arc<FiniteAlgebra> {
    FiniteAlgebra::integers_mod(p, m).unwrap()
}

#[test]
fn integers_mod_four() {
    let r = z(2, 2);
    assert_eq!(r.rank(), 1);
    assert_eq!(r.char_exponent(), 2);
    let nil = Ideal::nilradical(&r);
    assert_eq!(nil.log_order(), 1);
    assert!(nil.contains(&[2]));
    assert!(!nil.contains(&[1]));
    assert_eq!(r.residue_field().rank(), 1);
}

#[test]
fn truncated_poly_over_f2() {
    let r = FiniteAlgebra::truncated_field_poly(2, 4).unwrap();
    assert_eq!(r.labels(), &["1", "t", "t^2", "t^3"]);
    assert_eq!(nilpotence_bounds(&r).nil_index, Some(4));
    let t = r.basis_elem(1);
    assert_eq!(r.pow(&t, 3), r.basis_elem(3));
    assert!(r.is_zero(&r.pow(&t, 4)));
}

#[test]
fn nil_index_examples() {
    let r = FiniteAlgebra::truncated_field_poly(2, 2).unwrap();
    assert_eq!(nilpotence_bounds(&r).nil_index, Some(2));
    assert_eq!(nilpotence_bounds(&z(2, 3)).nil_index, Some(3));
}

#[test]
fn witt_coefficients_with_cut() {
    let p = PrimeParams::new(2, 3, 1).unwrap();
    let r = build_truncated_poly_algebra(p, CoeffKind::Witt, &["t"], &[], Some(2)).unwrap();
    assert_eq!(r.labels(), &["1", "t"]);
    assert_eq!(r.orders(), &[3, 3]);
    assert_eq!(nilpotence_bounds(&r).nil_index, Some(4));
    // J = (t), nilradical (2, t)
    assert_eq!(Ideal::nilradical(&r).log_order(), 5);
}

#[test]
fn mixed_orders() {
    let p = PrimeParams::new(2, 2, 1).unwrap();
    let r = build_truncated_poly_algebra(p, CoeffKind::Witt, &["t"], &["t^2", "2t"], None).unwrap();
    assert_eq!(r.orders(), &[2, 1]);
    assert_eq!(r.log_size(), 3);
    let t = r.basis_elem(1);
    assert!(r.is_zero(&r.scalar(&t, 2)));
    assert_eq!(nilpotence_bounds(&r).nil_index, Some(2));
}

#[test]
fn extension_field() {
    let k = FiniteAlgebra::finite_field(2, 2).unwrap();
    assert!(k.is_field());
    let elems = k.enumerate();
    assert_eq!(elems.len(), 4);
    for a in &elems {
        if !k.is_zero(a) {
            let inv = k.field_inv(a).unwrap();
            assert_eq!(k.mul(a, &inv), k.one());
        }
        assert_eq!(k.pow(&k.frobenius_inverse(a), 2), *a);
    }
}

#[test]
fn teichmuller_is_multiplicative() {
    let r = FiniteAlgebra::witt_of_field(2, 3, 2).unwrap();
    let k = r.residue_field();
    for a in k.enumerate() {
        let ta = r.teichmuller(&a);
        assert_eq!(r.residue(&ta), a);
        for b in k.enumerate() {
            let tb = r.teichmuller(&b);
            assert_eq!(r.mul(&ta, &tb), r.teichmuller(&k.mul(&a, &b)));
        }
    }
}

#[test]
fn relation_parsing() {
    let vars = vec!["x".to_string(), "y".to_string()];
    let r = Relation::parse("2*x*y^2", &vars, 2).unwrap();
    assert_eq!(r, Relation { val: 1, mono: vec![1, 2] });
    assert_eq!(Relation::parse("4", &vars, 2).unwrap(), Relation { val: 2, mono: vec![0, 0] });
    assert!(Relation::parse("z", &vars, 2).is_err());
}

#[test]
fn not_finite_is_rejected() {
    let p = PrimeParams::new(2, 1, 1).unwrap();
    let err = build_truncated_poly_algebra(p, CoeffKind::Field, &["t"], &["2t"], None);
    assert!(matches!(err, Err(AlgebraError::NotFinite(_))));
}

#[test]
fn divided_powers() {
    let r8 = z(2, 3);
    let pd = DividedPowerStructure::canonical(&r8);
    assert_eq!(pd.gamma(2, &[2]).unwrap(), vec![2]);
    let r16 = z(2, 4);
    let pd = DividedPowerStructure::canonical(&r16);
    assert_eq!(pd.gamma(3, &[2]).unwrap(), vec![12]);
    // 3! gamma_3(2) = 8
    assert_eq!(r16.scalar(&pd.gamma(3, &[2]).unwrap(), 6), vec![8]);
    let s = FiniteAlgebra::truncated_field_poly(2, 2).unwrap();
    let b = Ideal::new(&s, vec![s.basis_elem(1)]).unwrap();
    let pd = DividedPowerStructure::new(b, PdKind::TrivialSquareZero).unwrap();
    assert_eq!(pd.gamma(2, &s.basis_elem(1)).unwrap(), s.zero());
    assert!(pd.gamma(2, &s.one()).is_err());
}

#[test]
fn pd_axioms_canonical() {
    let r = z(3, 4);
    let pd = DividedPowerStructure::canonical(&r);
    for x in (0..81u64).filter(|x| x % 3 == 0) {
        let x = vec![x];
        for n in 1..6u64 {
            for k in 1..6u64 {
                let lhs = r.mul(&pd.gamma(n, &x).unwrap(), &pd.gamma(k, &x).unwrap());
                let binom = num_integer::binomial(n + k, n);
                let rhs = r.scalar(&pd.gamma(n + k, &x).unwrap(), binom as i64);
                assert_eq!(lhs, rhs);
            }
            let fact: u64 = (1..=n).product();
            assert_eq!(r.scalar(&pd.gamma(n, &x).unwrap(), fact as i64), r.pow(&x, n));
        }
    }
}

#[test]
fn quotient_of_power_series_model() {
    // Z/2^6[t]/t^4 modulo E = 2 - t is Z/16
    let p = PrimeParams::new(2, 6, 1).unwrap();
    let s = build_truncated_poly_algebra(p, CoeffKind::Witt, &["t"], &["t^4"], None).unwrap();
    let e = s.sub(&s.from_int(2), &s.basis_elem(1));
    let ideal = Ideal::new(&s, vec![e]).unwrap();
    let (q, pi) = FiniteAlgebra::quotient(&s, &ideal).unwrap();
    assert_eq!(q.log_size(), 4);
    assert_eq!(q.char_exponent(), 4);
    assert_eq!(pi.apply(&s.basis_elem(1)), q.from_int(2));
    let cover = q.cover(10).unwrap();
    assert_eq!(cover.projection.len(), cover.ring.rank());
}

#[test]
fn hom_identity_and_rejection() {
    let r = FiniteAlgebra::truncated_field_poly(2, 3).unwrap();
    let id = AlgebraHom::identity(&r);
    let x = vec![1, 1, 0];
    assert_eq!(id.apply(&x), x);
    // t -> 1 is not a hom
    let bad = AlgebraHom::new(&r, &r, vec![r.one(), r.one(), r.zero()]);
    assert!(bad.is_err());
}

#[test]
fn ring_spec_json() {
    let spec = RingSpec::from_json(
        r#"{"p":2,"m":8,"field":{"d":1},"vars":["t"],"relations":["t^4"],"coeff":"k"}"#,
    )
    .unwrap();
    let r = spec.build().unwrap();
    assert_eq!(r.rank(), 4);
    assert_eq!(r.char_exponent(), 1);
}
