use proptest::prelude::*;

use blockfree::ats::language;
use blockfree::corpus::{random_dpda, GenParams};
use blockfree::io::{parse_epda, write_epda, Names};
use blockfree::oracle::{blockfree_bounded, has_deadlock_bounded, has_lifelock_bounded, languages_equal_upto};
use blockfree::pipeline::{run_pipeline, Options};
use blockfree::reach::{k_prefix_overapprox, kprefix};
use blockfree::{Budget, Error};

fn params() -> impl Strategy<Value = GenParams> {
    (2usize..=5, 2usize..=3, 1usize..=3, 0usize..=2).prop_map(|(states, stack, outputs, max_push)| GenParams {
        states,
        stack,
        outputs,
        max_push,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn text_roundtrip(seed in any::<u64>(), p in params()) {
        let a = random_dpda(seed, p);
        prop_assert_eq!(parse_epda(&write_epda(&a), Names::Strict).unwrap(), a);
    }

    #[test]
    fn generated_automata_are_deterministic(seed in any::<u64>(), p in params()) {
        prop_assert!(random_dpda(seed, p).classify().is_dpda());
    }

    #[test]
    fn solution_keeps_the_language_and_is_clean(seed in any::<u64>(), p in params()) {
        let m0 = random_dpda(seed, p);
        let run = run_pipeline(&m0, Options::default());
        match run.output() {
            Err(Error::EmptyLanguage) => {
                let l = language(&m0.system(), true, 6, Budget::default());
                prop_assert!(!l.complete || l.words.is_empty());
            }
            Err(e) => prop_assert!(false, "{}", e),
            Ok(m) => {
                let b = Budget::default();
                prop_assert!(m.classify().is_dpda());
                prop_assert_eq!(languages_equal_upto(&m0, m, 6, true, b).unwrap(), None);
                prop_assert!(has_deadlock_bounded(&m.system(), 20, b).is_clean());
                prop_assert!(has_lifelock_bounded(&m.system(), 20, b).is_clean());
                prop_assert!(blockfree_bounded(&m.system(), 12, 30, b).all_ok());
            }
        }
    }

    #[test]
    fn approximation_covers_explored_stacks(seed in any::<u64>(), p in params(), k in 0usize..=3) {
        let a = random_dpda(seed, p);
        let r = k_prefix_overapprox(&a, k).unwrap();
        let ex = blockfree::ats::explore(&a.system(), Budget::new(12, 5_000));
        for c in &ex.configs {
            prop_assert!(r.from_initial(c.state).contains(&kprefix(&c.stack_word(), k)));
        }
    }
}
