use num_bigint::BigInt;
use num_traits::One;
use polya::zindex::{basic_series, BasicKind, CycleIndex, Monomial, Q};
use proptest::prelude::*;

type Terms = Vec<(Vec<u32>, i64, i64)>;

fn terms(min_len: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(1u32..=3, min_len..4), -5i64..=5, 1i64..=4), 1..6)
}

fn series(t: &Terms, trunc: usize) -> CycleIndex {
    let mut z = CycleIndex::zero(trunc, false);
    for (idx, a, b) in t {
        let pairs: Vec<(u32, u32)> = idx.iter().map(|&i| (i, 1)).collect();
        z.insert(Monomial::from_pairs(&pairs, None), Q::new(BigInt::from(*a), BigInt::from(*b)));
    }
    z
}

fn delta(z: &CycleIndex) -> CycleIndex {
    z.delta_point(1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in terms(0), b in terms(0), c in terms(0), trunc in 1usize..8) {
        let (f, g, h) = (series(&a, trunc), series(&b, trunc), series(&c, trunc));
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
        prop_assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn pointing_is_a_derivation(a in terms(0), b in terms(0), trunc in 1usize..9) {
        let (f, g) = (series(&a, trunc), series(&b, trunc));
        prop_assert_eq!(delta(&f.add(&g).unwrap()), delta(&f).add(&delta(&g)).unwrap());
        prop_assert_eq!(
            delta(&f.mul(&g).unwrap()),
            delta(&f).mul(&g).unwrap().add(&f.mul(&delta(&g)).unwrap()).unwrap()
        );
    }

    #[test]
    fn pointing_chain_rule(a in terms(0), b in terms(1), trunc in 1usize..9) {
        let (f, g) = (series(&a, trunc), series(&b, trunc));
        prop_assert_eq!(delta(&f.plethysm(&g).unwrap()), delta(&f).pointed_plethysm(&g).unwrap());
    }

    #[test]
    fn pointing_counts_each_atom_once(a in terms(0), trunc in 1usize..10) {
        let f = series(&a, trunc);
        prop_assert_eq!(delta(&f).specialize_t(), f.weight_derivative());
        // symmetric pointing drops exactly the fixed points
        let fixed = f.delta_point(1).unwrap().sub(&f.delta_point(2).unwrap()).unwrap();
        for (m, _) in fixed.terms() {
            prop_assert_eq!(m.t, Some(1));
        }
    }

    #[test]
    fn plethysm_laws(a in terms(0), b in terms(1), c in terms(1), trunc in 1usize..8) {
        let (f, g, h) = (series(&a, trunc), series(&b, trunc), series(&c, trunc));
        prop_assert_eq!(f.plethysm(&CycleIndex::s(1, trunc)).unwrap(), f.clone());
        prop_assert_eq!(CycleIndex::s(1, trunc).plethysm(&g).unwrap(), g.clone());
        prop_assert_eq!(
            f.plethysm(&g).unwrap().plethysm(&h).unwrap(),
            f.plethysm(&g.plethysm(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(
            f.add(&g).unwrap().plethysm(&h).unwrap(),
            f.plethysm(&h).unwrap().add(&g.plethysm(&h).unwrap()).unwrap()
        );
    }

    #[test]
    fn scale_index_is_plethysm_into_power_sum(a in terms(1), k in 1u32..4, trunc in 1usize..10) {
        let f = series(&a, trunc);
        prop_assert_eq!(f.scale_index(k), CycleIndex::s(k, trunc).plethysm(&f).unwrap());
    }
}

/// Number of multisets of size n over a k-element alphabet, by brute force.
fn multisets(n: usize, k: usize) -> u64 {
    fn go(n: usize, k: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        if k == 0 {
            return 0;
        }
        (0..=n).map(|j| go(n - j, k - 1)).sum()
    }
    go(n, k)
}

#[test]
fn basic_species_count_unlabeled_shapes() {
    let n = 12;
    for (kind, want) in [(BasicKind::Set, 1), (BasicKind::Seq, 1), (BasicKind::Cyc, 1)] {
        let ogs = basic_series(kind, None, n).to_ogs().unwrap();
        for d in 1..=n {
            assert_eq!(ogs.coeffs[d], BigInt::from(want), "{:?} at {}", kind, d);
        }
    }
    // SET over three kinds of atoms: s_i -> 3 x^i
    let three = CycleIndex::s(1, n).add(&CycleIndex::s(1, n)).unwrap().add(&CycleIndex::s(1, n)).unwrap();
    let ogs = basic_series(BasicKind::Set, None, n).plethysm(&three).unwrap().to_ogs().unwrap();
    for d in 0..=n {
        assert_eq!(ogs.coeffs[d], BigInt::from(multisets(d, 3)));
    }
}

/// Necklaces of length n over 2 colours, by canonical rotation.
fn necklaces(n: usize) -> u64 {
    (0u32..1 << n)
        .filter(|&w| (1..n).all(|r| ((w << r | w >> (n - r)) & ((1 << n) - 1)) >= w))
        .count() as u64
}

#[test]
fn cycles_of_two_colours_are_necklaces() {
    let n = 10;
    let two = CycleIndex::s(1, n).add(&CycleIndex::s(1, n)).unwrap();
    let ogs = basic_series(BasicKind::Cyc, None, n).plethysm(&two).unwrap().to_ogs().unwrap();
    for d in 1..=n {
        assert_eq!(ogs.coeffs[d], BigInt::from(necklaces(d)), "length {}", d);
    }
}

#[test]
fn set_k_has_unit_weight_sum() {
    for k in 0..6u32 {
        let z = basic_series(BasicKind::Set, Some(k), 8);
        let total: Q = z.specialize().into_iter().fold(Q::from_integer(0.into()), |a, c| a + c);
        assert!(total.is_one(), "SET[{}]", k);
    }
}
