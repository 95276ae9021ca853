use aspi_core::machine::{
    decode, exact_te, exact_te_brute_force, index_of, nth_machine, run, TeLimits,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn prefix_skipping_matches_brute_force_on_random_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let limits = TeLimits {
        max_n: 6,
        per_run_limit: 2_000,
    };
    for _ in 0..200 {
        let len = rng.random_range(0..=48);
        let code: Vec<bool> = (0..len).map(|_| rng.random_bool(0.5)).collect();
        let p = decode(&code);
        for n in 0..=6 {
            assert_eq!(
                exact_te(&p, n, &limits),
                exact_te_brute_force(&p, n, &limits),
                "{p} at n={n}"
            );
        }
    }
}

#[test]
fn enumeration_is_a_bijection_up_to_ten_thousand() {
    for i in 1..=10_000u64 {
        assert_eq!(index_of(&nth_machine(i)), Some(i));
    }
}

fn bits(max: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 0..max)
}

proptest! {
    #[test]
    fn runs_are_deterministic(code in bits(40), input in bits(12), limit in 0u64..500) {
        let p = decode(&code);
        prop_assert_eq!(run(&p, &input, limit), run(&p, &input, limit));
    }

    #[test]
    fn raising_the_limit_keeps_halted_runs(code in bits(40), input in bits(12), limit in 0u64..300, extra in 0u64..300) {
        let p = decode(&code);
        let low = run(&p, &input, limit);
        if low.halted {
            prop_assert_eq!(run(&p, &input, limit + extra), low);
        }
    }

    #[test]
    fn text_form_round_trips(code in bits(60)) {
        let p = decode(&code);
        prop_assert_eq!(p.to_string().parse::<aspi_core::machine::Program>().unwrap(), p);
    }
}
