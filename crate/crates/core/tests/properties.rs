use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zink_core::frames::Frame;
use zink_core::modular::{cokernel_invariants, Zpm};
use zink_core::windows::{pairing_check, Window};
use zink_core::witt::{u0, WittVector};
use zink_core::zink::{ff1, vv};
use zink_core::FiniteAlgebra;

fn rings() -> Vec<Arc<FiniteAlgebra>> {
    vec![
        FiniteAlgebra::integers_mod(2, 3).unwrap(),
        FiniteAlgebra::truncated_field_poly(2, 3).unwrap(),
        FiniteAlgebra::integers_mod(3, 2).unwrap(),
        FiniteAlgebra::witt_of_field(2, 2, 2).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witt_ring_axioms(seed in any::<u64>(), which in 0usize..4, len in 1usize..4) {
        let ring = rings()[which].clone();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = WittVector::random(&ring, len, &mut r);
        let y = WittVector::random(&ring, len, &mut r);
        let z = WittVector::random(&ring, len, &mut r);
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
        let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(x.sub(&x).unwrap().is_zero());
        prop_assert_eq!(x.mul(&WittVector::one(&ring, len)).unwrap(), x.clone());
    }

    #[test]
    fn ghost_map_is_a_ring_map(seed in any::<u64>(), len in 1usize..4) {
        let ring = FiniteAlgebra::integers_mod(2, 6).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = WittVector::random(&ring, len, &mut r);
        let y = WittVector::random(&ring, len, &mut r);
        let (gx, gy) = (x.ghost(), y.ghost());
        let sum: Vec<_> = gx.iter().zip(&gy).map(|(a, b)| ring.add(a, b)).collect();
        let prod: Vec<_> = gx.iter().zip(&gy).map(|(a, b)| ring.mul(a, b)).collect();
        prop_assert_eq!(x.add(&y).unwrap().ghost(), sum);
        prop_assert_eq!(x.mul(&y).unwrap().ghost(), prod);
    }

    #[test]
    fn ff1_undoes_vv(seed in any::<u64>(), which in 0usize..4, len in 1usize..4) {
        let ring = rings()[which].clone();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = WittVector::random(&ring, len, &mut r);
        let y = vv(&x);
        prop_assert!(ring.is_zero(y.coord(0)));
        prop_assert_eq!(ff1(&y).unwrap(), x.clone());
        // f keeps the length in characteristic p
        prop_assert_eq!(y.frobenius().truncate(len), x.mul(&u0(&ring, len)).unwrap().scale(ring.p() as i64));
    }

    #[test]
    fn windows_are_bidual(seed in any::<u64>(), which in 0usize..3, h in 1usize..=3) {
        let ring = rings()[which].clone();
        let f = Arc::new(Frame::dieudonne(&ring, 2).unwrap());
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let l = (seed as usize) % (h + 1);
        let w = Window::random(&f, h, l, &mut r);
        prop_assert!(w.is_bidual());
        prop_assert_eq!(w.dual().rank_l(), h - l);
        prop_assert!(pairing_check(&w, &w.dual(), &mut r, 3).passed());
    }

    #[test]
    fn cokernel_matches_brute_force(rows in proptest::collection::vec(proptest::collection::vec(0u64..4, 4), 0..5)) {
        // (Z/4)^4 / span(rows), counted element by element
        let z = Zpm::new(2, 2).unwrap();
        let inv = cokernel_invariants(&z, &rows, 4);
        let mut span: HashSet<[u64; 4]> = HashSet::from([[0; 4]]);
        loop {
            let mut next = span.clone();
            for s in &span {
                for r in &rows {
                    let mut t = *s;
                    for (a, b) in t.iter_mut().zip(r) {
                        *a = (*a + b) % 4;
                    }
                    next.insert(t);
                }
            }
            if next.len() == span.len() {
                break;
            }
            span = next;
        }
        for k in 0..=2u32 {
            let mut hits = 0usize;
            for code in 0..256u64 {
                let x: [u64; 4] = std::array::from_fn(|i| (code >> (2 * i)) & 3);
                let y: [u64; 4] = std::array::from_fn(|i| (x[i] << k) % 4);
                if span.contains(&y) {
                    hits += 1;
                }
            }
            let log: u32 = inv.iter().map(|e| (*e).min(k)).sum();
            prop_assert_eq!(hits, span.len() << log);
        }
    }
}
