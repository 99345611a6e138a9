use arithdyn::factorint::{factor, is_probable_prime, primitive_primes, Effort};
use arithdyn::orbit::prefix;
use arithdyn::IntPoly;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small budget: the identity must hold whether or not factoring completes.
const EFFORT: Effort = Effort {
    trial_bound: 2_000,
    rho_iterations: 5_000,
};

#[test]
fn product_identity_on_ten_thousand_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_a11);
    let mut complete = 0;
    for _ in 0..10_000 {
        let bits = rng.gen_range(1..=128u32);
        let raw: u128 = rng.gen::<u128>() >> (128 - bits);
        if raw == 0 {
            continue;
        }
        let n = if rng.gen_bool(0.5) {
            -BigInt::from(raw)
        } else {
            BigInt::from(raw)
        };
        let f = factor(&n, EFFORT);
        assert_eq!(f.product(), n);
        let primes: Vec<&BigUint> = f.primes().collect();
        assert!(primes.windows(2).all(|w| w[0] < w[1]), "{n}: primes not ascending");
        for q in primes {
            assert!(is_probable_prime(&BigInt::from(q.clone())), "{n}: {q} not prime");
        }
        match &f.cofactor {
            Some(c) => assert!(!is_probable_prime(&BigInt::from(c.clone())) && c > &BigUint::one()),
            None => complete += 1,
        }
    }
    assert!(complete > 5_000, "only {complete} complete factorizations");
}

#[test]
fn smooth_numbers_factor_exactly() {
    let small = [2u32, 3, 5, 7, 11, 13, 101, 65537, 1_000_003, 2_147_483_647];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let mut want = std::collections::BTreeMap::new();
        let mut n = BigUint::one();
        for _ in 0..rng.gen_range(1..6) {
            let q = small[rng.gen_range(0..small.len())];
            let e = rng.gen_range(1..4u32);
            *want.entry(BigUint::from(q)).or_insert(0u32) += e;
            n *= BigUint::from(q).pow(e);
        }
        let f = factor(&BigInt::from(n.clone()), Effort::default());
        assert!(f.is_complete(), "{n}");
        let got: std::collections::BTreeMap<_, _> =
            f.prime_powers.iter().map(|pp| (pp.prime.clone(), pp.exponent)).collect();
        assert_eq!(got, want, "{n}");
    }
}

#[test]
fn primitive_primes_divide_no_earlier_term() {
    for (f, s) in [("x^2-x+1", 2), ("x^2+1", 1), ("x^2-2", 3), ("2x^2+1", 1)] {
        let poly: IntPoly = f.parse().unwrap();
        let xs = prefix(&poly, &BigInt::from(s), 8);
        for n in 1..=8 {
            let rep = primitive_primes(&xs, n, EFFORT);
            for q in &rep.primitive {
                let q = BigInt::from(q.clone());
                assert!((&xs[n] % &q).is_zero());
                assert!((1..n).all(|m| !(&xs[m] % &q).is_zero()), "{f} n={n}: {q}");
            }
            for q in &rep.imprimitive {
                let q = BigInt::from(q.clone());
                assert!((1..n).any(|m| (&xs[m] % &q).is_zero()), "{f} n={n}: {q}");
            }
        }
    }
}
