use hyperorbit_core::orbits::{pair_from_point, CurvePoint};
use hyperorbit_core::{densities, local, search, sturm};
use hyperorbit_core::{BinaryForm, RankNRing, SymmetricPair, Unimodular};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn even_form(max_n: usize, h: i64) -> impl Strategy<Value = BinaryForm> {
    (1..=max_n / 2).prop_flat_map(move |k| {
        prop::collection::vec(-h..=h, 2 * k + 1).prop_map(|c| BinaryForm::from_i64(&c).unwrap())
    })
}

fn nondegenerate(max_n: usize, h: i64) -> impl Strategy<Value = BinaryForm> {
    even_form(max_n, h).prop_filter("nonzero discriminant", |f| {
        !f.discriminant().unwrap().is_zero()
    })
}

fn unimodular() -> impl Strategy<Value = Unimodular> {
    any::<u64>().prop_map(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        Unimodular::random(&mut rng, 4, 3)
    })
}

/// Upper unitriangular matrix with a random permutation of rows, det +-1.
fn gl_matrix(n: usize, seed: u64) -> Vec<Vec<BigInt>> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Equal => BigInt::one(),
                    std::cmp::Ordering::Greater => BigInt::from(rng.random_range(-2..=2)),
                    std::cmp::Ordering::Less => BigInt::zero(),
                })
                .collect()
        })
        .collect();
    m.rotate_left(rng.random_range(0..n));
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discriminant_is_sl2_invariant(f in even_form(8, 20), g in unimodular()) {
        prop_assert_eq!(f.act(&g).discriminant().unwrap(), f.discriminant().unwrap());
    }

    #[test]
    fn action_is_substitution(f in even_form(8, 20), g in unimodular(), x in -9i64..10, y in -9i64..10) {
        let (x, y) = (BigInt::from(x), BigInt::from(y));
        let lhs = f.act(&g).evaluate(&x, &y);
        let rhs = f.evaluate(&(&g.a * &x + &g.c * &y), &(&g.b * &x + &g.d * &y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ring_table_is_consistent(f in even_form(6, 15).prop_filter("f0 != 0", |f| !f.leading().is_zero())) {
        let ring = RankNRing::from_form(&f).unwrap();
        prop_assert!(ring.agrees_with_algebra());
        prop_assert!(ring.is_associative());
        prop_assert_eq!(ring.discriminant(), f.discriminant().unwrap());
    }

    #[test]
    fn invariant_form_survives_conjugation(f in nondegenerate(6, 10), c in -5i64..6, seed in any::<u64>()) {
        // Force f_n = c^2 so (0, 1, c) lies on the curve.
        let mut coeffs = f.coeffs().to_vec();
        *coeffs.last_mut().unwrap() = BigInt::from(c * c);
        let f = BinaryForm::new(coeffs).unwrap();
        let pair = pair_from_point(&f, &CurvePoint::from_i64(0, 1, c)).unwrap().pair;
        let moved = pair.gl_act(&gl_matrix(f.degree(), seed)).unwrap();
        prop_assert_eq!(moved.invariant_form().unwrap(), f);
    }

    #[test]
    fn sl2_action_on_pairs_matches_forms(f in even_form(6, 10), c in -5i64..6, g in unimodular()) {
        let mut coeffs = f.coeffs().to_vec();
        *coeffs.last_mut().unwrap() = BigInt::from(c * c);
        let f = BinaryForm::new(coeffs).unwrap();
        let pair: SymmetricPair = pair_from_point(&f, &CurvePoint::from_i64(0, 1, c)).unwrap().pair;
        prop_assert_eq!(pair.sl2_act(&g).invariant_form().unwrap(), f.act(&g));
    }

    #[test]
    fn factor_degrees_sum_to_n(f in even_form(10, 50), p in prop::sample::select(vec![2u128, 3, 5, 7, 11, 101])) {
        if let Ok(t) = f.factorization_type_mod_p(p, 1) {
            prop_assert_eq!(t.total_degree(), f.degree());
        }
    }

    #[test]
    fn fast_root_count_is_exact(c in prop::collection::vec(-(1i64 << 29)..(1i64 << 29), 3..16)) {
        let big: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        if c.last() != Some(&0) {
            prop_assert_eq!(sturm::real_root_count_i64(&c), sturm::exact_real_root_count(&big));
        }
    }

    #[test]
    fn found_points_are_points(f in nondegenerate(6, 30)) {
        if let Some(p) = search::rational_point_search(&f, 8) {
            prop_assert!(p.lies_on(&f));
            prop_assert!(pair_from_point(&f, &p).is_ok());
            for p in local::bad_primes(&f).unwrap() {
                prop_assert!(local::locally_soluble_p(&f, &p).unwrap());
            }
            prop_assert!(local::locally_soluble_r(&f).unwrap());
        }
    }

    #[test]
    fn descent_matches_prime_power_oracle(f in nondegenerate(4, 25), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let k = if p == 2 { 6 } else { 3 };
        if let Some(expected) = local::soluble_mod_prime_power(&f, p, k) {
            prop_assert_eq!(local::locally_soluble_p(&f, &BigInt::from(p)).unwrap(), expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn real_root_classes_partition_samples(k in 1usize..5, samples in 1u64..3000, seed in any::<u64>()) {
        let d = densities::mu_real(2 * k, samples, seed).unwrap();
        prop_assert_eq!(d.counts.iter().sum::<u64>(), samples);
        prop_assert_eq!(d.counts.len(), k + 1);
    }
}
